//! On-disk instance format: `instance.json` (header) plus `A.csv`
//! (row-major, one matrix row per line), `y.csv` and `x_star.csv` (one
//! value per line). Numbers use the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GscoError, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::model::{ConstraintModel, ModelVariant};
use crate::objective::LeastSquaresObjective;

pub const HEADER_FILE: &str = "instance.json";
pub const MATRIX_FILE: &str = "A.csv";
pub const OBSERVATIONS_FILE: &str = "y.csv";
pub const TRUTH_FILE: &str = "x_star.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    /// `gsubgraph` or `cardinality`.
    pub variant: String,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(rename = "C")]
    pub radius: f64,
    /// Edge-list file, relative to the instance directory unless absolute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_path: Option<String>,
}

impl ModelHeader {
    pub fn describe(model: &ConstraintModel, graph_path: Option<String>) -> Self {
        match model.variant() {
            ModelVariant::GSubgraph { s, g, .. } => ModelHeader {
                variant: "gsubgraph".into(),
                s: *s,
                g: Some(*g),
                radius: model.radius(),
                graph_path,
            },
            ModelVariant::CardinalityOnly { s, .. } => ModelHeader {
                variant: "cardinality".into(),
                s: *s,
                g: None,
                radius: model.radius(),
                graph_path: None,
            },
        }
    }

    /// Rebuilds the model, loading the graph relative to `base`.
    pub fn build(&self, d: usize, base: &Path) -> Result<ConstraintModel> {
        match self.variant.as_str() {
            "gsubgraph" => {
                let g = self
                    .g
                    .ok_or_else(|| GscoError::Config("gsubgraph model needs `g`".into()))?;
                let rel = self
                    .graph_path
                    .as_ref()
                    .ok_or_else(|| GscoError::Config("gsubgraph model needs `graph_path`".into()))?;
                let graph = Graph::from_edge_list(&fs::read_to_string(resolve(base, rel))?)?;
                if graph.node_count() != d {
                    return Err(GscoError::Dimension { expected: d, got: graph.node_count() });
                }
                ConstraintModel::g_subgraph(Arc::new(graph), self.s, g, self.radius)
            }
            "cardinality" => ConstraintModel::cardinality(d, self.s, self.radius),
            other => Err(GscoError::Config(format!("unknown model variant `{other}`"))),
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub d: usize,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub model: ModelHeader,
}

/// Everything read back from an instance directory.
#[derive(Debug, Clone)]
pub struct StoredInstance {
    pub header: InstanceHeader,
    pub objective: LeastSquaresObjective,
    pub x_star: Vec<f64>,
    pub model: ConstraintModel,
}

pub fn matrix_to_csv(a: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        for (j, v) in a.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn vector_to_csv(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        let _ = writeln!(out, "{x}");
    }
    out
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim().parse().map_err(|_| GscoError::Parse {
        line,
        msg: format!("invalid number `{tok}`"),
    })
}

pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut rows = 0;
    let mut cols = None;
    let mut data = Vec::new();
    for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let before = data.len();
        for tok in line.split(',') {
            data.push(parse_f64(tok, k + 1)?);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(GscoError::Parse {
                    line: k + 1,
                    msg: format!("expected {c} columns, found {width}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::from_row_major(rows, cols.unwrap_or(0), data)
}

pub fn vector_from_csv(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| parse_f64(l, k + 1))
        .collect()
}

pub fn write_instance(
    dir: &Path,
    header: &InstanceHeader,
    objective: &LeastSquaresObjective,
    x_star: &[f64],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(header).map_err(|e| GscoError::Io(e.to_string()))?;
    fs::write(dir.join(HEADER_FILE), json + "\n")?;
    fs::write(dir.join(MATRIX_FILE), matrix_to_csv(objective.matrix()))?;
    fs::write(dir.join(OBSERVATIONS_FILE), vector_to_csv(objective.observations()))?;
    fs::write(dir.join(TRUTH_FILE), vector_to_csv(x_star))?;
    Ok(())
}

pub fn read_instance(dir: &Path) -> Result<StoredInstance> {
    let header: InstanceHeader = serde_json::from_str(&fs::read_to_string(dir.join(HEADER_FILE))?)
        .map_err(|e| GscoError::Config(format!("bad instance header: {e}")))?;
    let a = matrix_from_csv(&fs::read_to_string(dir.join(MATRIX_FILE))?)?;
    let y = vector_from_csv(&fs::read_to_string(dir.join(OBSERVATIONS_FILE))?)?;
    let x_star = vector_from_csv(&fs::read_to_string(dir.join(TRUTH_FILE))?)?;
    if a.rows() != header.n || a.cols() != header.d {
        return Err(GscoError::Dimension {
            expected: header.n * header.d,
            got: a.rows() * a.cols(),
        });
    }
    if x_star.len() != header.d {
        return Err(GscoError::Dimension { expected: header.d, got: x_star.len() });
    }
    let model = header.model.build(header.d, dir)?;
    Ok(StoredInstance {
        objective: LeastSquaresObjective::new(a, y)?,
        x_star,
        model,
        header,
    })
}
