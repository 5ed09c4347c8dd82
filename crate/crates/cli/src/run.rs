//! The `generate`, `solve` and `compare` commands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gsco_core::graph::{watts_strogatz, Graph};
use gsco_core::instance::{
    matrix_to_csv, read_instance, vector_to_csv, write_instance, InstanceHeader, ModelHeader, HEADER_FILE,
    MATRIX_FILE, OBSERVATIONS_FILE, TRUTH_FILE,
};
use gsco_core::solver::FwVariant;
use gsco_core::{
    best_pgd, generate_instance, random_pgd, solve, ConstraintModel, DmoSelection, DmoVariant, InstanceSpec,
    LeastSquaresObjective, PgdConfig, PgdStep, SolveOutput, SolverConfig, StepRule, SupportSet, UpdateOption,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub const GRAPH_FILE: &str = "graph.edgelist";
pub const TRUTH_SUMMARY_FILE: &str = "truth.json";
pub const CONFIG_ECHO_FILE: &str = "config.txt";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const COMPARE_FILE: &str = "compare.csv";

const DEFAULT_OUT: &str = "gsco-out";
const LIPSCHITZ_TOL: f64 = 1e-10;

pub fn out_dir(cfg: &Config) -> PathBuf {
    PathBuf::from(cfg.str("out").unwrap_or(DEFAULT_OUT))
}

/// A problem instance ready to solve.
pub struct Problem {
    pub header: InstanceHeader,
    pub objective: LeastSquaresObjective,
    pub model: ConstraintModel,
    pub x_star: Vec<f64>,
    pub truth_support: Option<SupportSet>,
}

/// Loads `instance.path` if given, otherwise builds the instance described by
/// the config.
pub fn problem_from_config(cfg: &Config) -> CliResult<Problem> {
    if let Some(dir) = cfg.str("instance.path") {
        let stored = read_instance(Path::new(dir))?;
        return Ok(Problem {
            header: stored.header,
            objective: stored.objective,
            model: stored.model,
            x_star: stored.x_star,
            truth_support: None,
        });
    }
    let seed = cfg.get_or("seed", 0u64)?;
    let d: usize = cfg.get_or("instance.d", 16)?;
    let n: usize = cfg.get_or("instance.n", 8)?;
    let sigma: f64 = cfg.get_or("instance.sigma", gsco_core::objective::DEFAULT_SIGMA)?;
    let s: usize = cfg.get_or("model.s", 4)?;
    let radius: f64 = cfg.get_or("model.C", 1.0)?;
    let model = match cfg.str("model.variant").unwrap_or("gsubgraph") {
        "gsubgraph" => {
            let g: usize = cfg.get_or("model.g", 2)?;
            let graph = match cfg.str("model.graph_path") {
                Some(p) => Graph::from_edge_list(
                    &fs::read_to_string(p).map_err(|e| CliError::Io(format!("{p}: {e}")))?,
                )?,
                None => {
                    let edges: usize = cfg.get_or("graph.edges", 2 * d)?;
                    let rewire: f64 = cfg.get_or("graph.rewire", 0.1)?;
                    watts_strogatz(d, edges, rewire, seed)?
                }
            };
            if graph.node_count() != d {
                return Err(CliError::Config(format!(
                    "graph has {} nodes but instance.d = {d}",
                    graph.node_count()
                )));
            }
            ConstraintModel::g_subgraph(Arc::new(graph), s, g, radius)?
        }
        "cardinality" => ConstraintModel::cardinality(d, s, radius)?,
        other => return Err(CliError::Config(format!("unknown model.variant `{other}`"))),
    };
    let inst = generate_instance(&InstanceSpec { d, n, sigma, model: model.clone(), seed })?;
    let graph_path = model.graph().map(|_| GRAPH_FILE.to_string());
    Ok(Problem {
        header: InstanceHeader { d, n, sigma, seed, model: ModelHeader::describe(&model, graph_path) },
        objective: inst.objective,
        model,
        x_star: inst.x_star,
        truth_support: Some(inst.truth_support),
    })
}

/// SHA-256 over the matrix and observations; identifies an instance.
pub fn instance_fingerprint(objective: &LeastSquaresObjective) -> String {
    let mut h = Sha256::new();
    h.update(matrix_to_csv(objective.matrix()).as_bytes());
    h.update(b"\n--\n");
    h.update(vector_to_csv(objective.observations()).as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSummary {
    pub f_x_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_support: Option<SupportSet>,
}

pub struct GenerateReport {
    pub dir: PathBuf,
    /// SHA-256 over every file written, in a fixed order.
    pub fingerprint: String,
    pub f_x_star: f64,
}

pub fn cmd_generate(cfg: &Config) -> CliResult<GenerateReport> {
    let problem = problem_from_config(cfg)?;
    let dir = out_dir(cfg);
    write_instance(&dir, &problem.header, &problem.objective, &problem.x_star)?;
    let mut files = vec![HEADER_FILE, MATRIX_FILE, OBSERVATIONS_FILE, TRUTH_FILE];
    if let Some(graph) = problem.model.graph() {
        fs::write(dir.join(GRAPH_FILE), graph.to_edge_list())?;
        files.push(GRAPH_FILE);
    }
    let f_x_star = problem.objective.evaluate(&problem.x_star)?;
    let truth = TruthSummary { f_x_star, truth_support: problem.truth_support };
    fs::write(dir.join(TRUTH_SUMMARY_FILE), to_json(&truth)?)?;
    files.push(TRUTH_SUMMARY_FILE);

    let mut h = Sha256::new();
    for f in files {
        h.update(f.as_bytes());
        h.update(fs::read(dir.join(f))?);
    }
    Ok(GenerateReport { dir, fingerprint: hex::encode(h.finalize()), f_x_star })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DmoFw,
    DmoAccFw,
    RandomPgd,
    BestPgd,
}

impl Method {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "dmo_fw" => Ok(Method::DmoFw),
            "dmo_accfw" => Ok(Method::DmoAccFw),
            "random_pgd" => Ok(Method::RandomPgd),
            "best_pgd" => Ok(Method::BestPgd),
            other => Err(CliError::Config(format!("unknown method `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::DmoFw => "dmo_fw",
            Method::DmoAccFw => "dmo_accfw",
            Method::RandomPgd => "random_pgd",
            Method::BestPgd => "best_pgd",
        }
    }
}

/// Written next to the trace of every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub method: String,
    pub instance: String,
    pub best_t: usize,
    pub best_objective: f64,
    pub termination: gsco_core::Termination,
    pub iterations: usize,
    pub floored_steps: usize,
    pub max_iterate_norm: f64,
}

fn lipschitz(cfg: &Config, objective: &LeastSquaresObjective) -> CliResult<f64> {
    match cfg.get("solver.L")? {
        Some(l) => Ok(l),
        None => Ok(objective.lipschitz_constant(LIPSCHITZ_TOL)?),
    }
}

pub fn solver_config(cfg: &Config, method: Method, problem: &Problem) -> CliResult<SolverConfig> {
    let seed = cfg.get_or("seed", 0u64)?;
    let variant: DmoVariant = cfg.get_or("dmo.variant", DmoVariant::TopG)?;
    let selection = DmoSelection {
        variant,
        theta: cfg.get_or("dmo.theta", gsco_core::dmo::DEFAULT_THETA)?,
        seed: cfg.get_or("dmo.seed", seed)?,
    };
    let mut sc = SolverConfig::new(selection);
    sc.variant = if method == Method::DmoAccFw { FwVariant::AccFw } else { FwVariant::Fw };
    sc.option = match cfg.str("solver.option").unwrap_or("I") {
        "I" | "1" => UpdateOption::I,
        "II" | "2" => UpdateOption::II,
        other => return Err(CliError::Config(format!("unknown solver.option `{other}`"))),
    };
    sc.step_rule = match cfg.str("solver.step").unwrap_or("open_loop") {
        "open_loop" => StepRule::OpenLoop,
        "backtracking" => StepRule::Backtracking {
            beta: cfg.get_or("solver.beta", 0.5)?,
            eta_init: cfg.get_or("solver.eta_init", 1.0)?,
        },
        "demyanov_rubinov" => StepRule::DemyanovRubinov { lipschitz: lipschitz(cfg, &problem.objective)? },
        other => return Err(CliError::Config(format!("unknown solver.step `{other}`"))),
    };
    sc.delta = match cfg.str("solver.delta") {
        None | Some("auto") => selection.guarantee_for(&problem.model),
        Some(_) => cfg.require("solver.delta")?,
    };
    if sc.variant == FwVariant::AccFw {
        sc.lipschitz = Some(lipschitz(cfg, &problem.objective)?);
    }
    sc.max_iters = cfg.get_or("solver.max_iters", 1000)?;
    sc.rel_tol = cfg.get_or("solver.rel_tol", gsco_core::solver::DEFAULT_REL_TOL)?;
    sc.record_wall_clock = cfg.get_or("trace.wall_clock", false)?;
    Ok(sc)
}

pub fn pgd_config(cfg: &Config, problem: &Problem) -> CliResult<PgdConfig> {
    let step = match cfg.str("pgd.step").unwrap_or("inverse_l") {
        "inverse_l" => PgdStep::InverseL { lipschitz: lipschitz(cfg, &problem.objective)? },
        "fixed" => PgdStep::Fixed { alpha: cfg.require("pgd.alpha")? },
        other => return Err(CliError::Config(format!("unknown pgd.step `{other}`"))),
    };
    let mut pc = PgdConfig::new(step);
    pc.max_iters = cfg.get_or("pgd.max_iters", 1000)?;
    pc.rel_tol = cfg.get_or("pgd.rel_tol", gsco_core::solver::DEFAULT_REL_TOL)?;
    pc.seed = cfg.get_or("pgd.seed", cfg.get_or("seed", 0u64)?)?;
    pc.record_wall_clock = cfg.get_or("trace.wall_clock", false)?;
    Ok(pc)
}

pub fn run_method(cfg: &Config, problem: &Problem) -> CliResult<(Method, SolveOutput)> {
    let method = Method::parse(cfg.str("method").unwrap_or("dmo_fw"))?;
    let out = match method {
        Method::DmoFw | Method::DmoAccFw => {
            solve(&solver_config(cfg, method, problem)?, &problem.objective, &problem.model, None)?
        }
        Method::RandomPgd => random_pgd(&problem.objective, &problem.model, &pgd_config(cfg, problem)?, None)?,
        Method::BestPgd => best_pgd(&problem.objective, &problem.model, &pgd_config(cfg, problem)?, None)?,
    };
    Ok((method, out))
}

pub fn cmd_solve(cfg: &Config) -> CliResult<RunSummary> {
    let problem = problem_from_config(cfg)?;
    let (method, out) = run_method(cfg, &problem)?;
    let dir = out_dir(cfg);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(CONFIG_ECHO_FILE), cfg.echo())?;
    fs::write(dir.join(TRACE_FILE), out.trace.to_csv())?;
    let s = out.trace.summary();
    let summary = RunSummary {
        name: cfg.str("name").unwrap_or(method.name()).to_string(),
        method: method.name().to_string(),
        instance: instance_fingerprint(&problem.objective),
        best_t: s.best_t,
        best_objective: s.best_objective,
        termination: s.termination,
        iterations: s.iterations,
        floored_steps: s.floored_steps,
        max_iterate_norm: s.max_iterate_norm,
    };
    fs::write(dir.join(SUMMARY_FILE), to_json(&summary)?)?;
    Ok(summary)
}

/// One run as read back for comparison.
pub struct LoadedRun {
    pub summary: RunSummary,
    pub objectives: Vec<(usize, String)>,
}

pub fn load_run(dir: &Path) -> CliResult<LoadedRun> {
    let read = |f: &str| {
        fs::read_to_string(dir.join(f)).map_err(|e| CliError::Io(format!("{}: {e}", dir.join(f).display())))
    };
    let summary: RunSummary = serde_json::from_str(&read(SUMMARY_FILE)?)
        .map_err(|e| CliError::Config(format!("{}: bad summary: {e}", dir.display())))?;
    let mut objectives = Vec::new();
    for (k, line) in read(TRACE_FILE)?.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Config(format!("{}: bad trace line {}", dir.display(), k + 1));
        let t = cells.first().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
        let f = cells.get(2).filter(|c| c.parse::<f64>().is_ok()).ok_or_else(bad)?;
        objectives.push((t, f.to_string()));
    }
    Ok(LoadedRun { summary, objectives })
}

pub struct Comparison {
    pub csv_path: PathBuf,
    /// `(label, best objective)`, best first.
    pub ranking: Vec<(String, f64)>,
}

/// Runs each config (concurrently, each into its own directory under the
/// output directory), then merges those and the given run directories.
pub fn cmd_compare(configs: &[Config], run_dirs: &[PathBuf], out: &Path) -> CliResult<Comparison> {
    let mut dirs: Vec<PathBuf> = run_dirs.to_vec();
    let planned: Vec<(Config, PathBuf)> = configs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let label = c.str("name").or(c.str("method")).unwrap_or("dmo_fw").to_string();
            let mut c = c.clone();
            let dir = out.join(format!("run{k}_{label}"));
            c.set("out", &dir.to_string_lossy())?;
            Ok((c, dir))
        })
        .collect::<CliResult<_>>()?;
    let results: Vec<CliResult<RunSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = planned.iter().map(|(c, _)| scope.spawn(move || cmd_solve(c))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    for (r, (_, dir)) in results.into_iter().zip(&planned) {
        r?;
        dirs.push(dir.clone());
    }
    if dirs.len() < 2 {
        return Err(CliError::Config("compare needs at least two runs".into()));
    }

    let runs: Vec<LoadedRun> = dirs.iter().map(|d| load_run(d)).collect::<CliResult<_>>()?;
    let instance = &runs[0].summary.instance;
    if let Some((d, r)) = dirs.iter().zip(&runs).find(|(_, r)| &r.summary.instance != instance) {
        return Err(CliError::Config(format!(
            "run {} was solved on a different instance ({} vs {})",
            d.display(),
            &r.summary.instance[..12],
            &instance[..12]
        )));
    }
    let labels = unique_labels(&runs);
    let mut csv = String::from("method,t,objective\n");
    for (label, run) in labels.iter().zip(&runs) {
        for (t, f) in &run.objectives {
            let _ = writeln!(csv, "{label},{t},{f}");
        }
    }
    fs::create_dir_all(out)?;
    let csv_path = out.join(COMPARE_FILE);
    fs::write(&csv_path, csv)?;

    let mut ranking: Vec<(String, f64)> =
        labels.into_iter().zip(&runs).map(|(l, r)| (l, r.summary.best_objective)).collect();
    ranking.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Comparison { csv_path, ranking })
}

fn unique_labels(runs: &[LoadedRun]) -> Vec<String> {
    let names: Vec<&str> = runs.iter().map(|r| r.summary.name.as_str()).collect();
    names
        .iter()
        .enumerate()
        .map(|(k, n)| {
            if names.iter().filter(|m| *m == n).count() > 1 {
                format!("{n}#{k}")
            } else {
                n.to_string()
            }
        })
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[&str]) -> Config {
        let mut c = Config::default();
        for p in pairs {
            c.apply(p).unwrap();
        }
        c
    }

    #[test]
    fn generated_problem_matches_header() {
        let p = problem_from_config(&cfg(&["instance.d=16", "instance.n=8", "seed=3"])).unwrap();
        assert_eq!(p.objective.dim(), 16);
        assert_eq!(p.objective.n_obs(), 8);
        assert_eq!(p.header.model.graph_path.as_deref(), Some(GRAPH_FILE));
        assert!(p.model.is_member(p.truth_support.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn unknown_method_is_config_error() {
        assert!(matches!(Method::parse("sgd"), Err(CliError::Config(_))));
    }

    #[test]
    fn delta_defaults_to_oracle_guarantee() {
        let c = cfg(&["model.s=4", "model.g=2"]);
        let p = problem_from_config(&c).unwrap();
        let sc = solver_config(&c, Method::DmoFw, &p).unwrap();
        assert_eq!(sc.delta, (0.5f64).sqrt());
        assert!(!sc.record_wall_clock);
        let exact = solver_config(&cfg(&["dmo.variant=exact"]), Method::DmoFw, &p).unwrap();
        assert_eq!(exact.delta, 1.0);
    }

    #[test]
    fn accfw_gets_lipschitz() {
        let c = cfg(&["solver.L=2.5"]);
        let p = problem_from_config(&c).unwrap();
        let sc = solver_config(&c, Method::DmoAccFw, &p).unwrap();
        assert_eq!(sc.variant, FwVariant::AccFw);
        assert_eq!(sc.lipschitz, Some(2.5));
    }

    #[test]
    fn duplicate_labels_are_disambiguated() {
        let mk = |n: &str| LoadedRun {
            summary: RunSummary {
                name: n.into(),
                method: n.into(),
                instance: String::new(),
                best_t: 0,
                best_objective: 0.0,
                termination: gsco_core::Termination::MaxIters,
                iterations: 0,
                floored_steps: 0,
                max_iterate_norm: 0.0,
            },
            objectives: Vec::new(),
        };
        let labels = unique_labels(&[mk("a"), mk("b"), mk("a")]);
        assert_eq!(labels, vec!["a#0", "b", "a#2"]);
    }
}
