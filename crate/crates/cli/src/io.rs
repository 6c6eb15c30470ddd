//! JSON instance and result files.

use ldilp::problem::{IlpInstance, SolveResult};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `A` is accepted either flat in row-major order or as a list of rows.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum MatrixField {
    Flat(Vec<i64>),
    Rows(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    k: usize,
    n: usize,
    #[serde(rename = "A")]
    a: MatrixField,
    b: Vec<i64>,
    /// Defaults to the zero objective.
    #[serde(default)]
    c: Option<Vec<i64>>,
    #[serde(default)]
    #[allow(dead_code)]
    comment: Option<String>,
}

/// Serialized form of an instance; `A` is written flat, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceFile {
    pub k: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

impl InstanceFile {
    pub fn from_instance(inst: &IlpInstance, comment: Option<String>) -> Self {
        InstanceFile {
            k: inst.k(),
            n: inst.n(),
            a: inst.a().iter().flatten().copied().collect(),
            b: inst.b().to_vec(),
            c: inst.c().to_vec(),
            comment,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Parses and validates an instance. Shape errors are malformed input; a
/// matrix without full row rank is reported separately.
pub fn parse_instance(text: &str) -> Result<IlpInstance, CliError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
    let (k, n) = (raw.k, raw.n);
    if k == 0 || n == 0 {
        return Err(CliError::Malformed("k and n must be positive".into()));
    }
    let rows = match raw.a {
        MatrixField::Flat(v) => {
            if v.len() != k * n {
                return Err(CliError::Malformed(format!(
                    "A has {} entries, expected k * n = {}",
                    v.len(),
                    k * n
                )));
            }
            v.chunks(n).map(<[i64]>::to_vec).collect::<Vec<_>>()
        }
        MatrixField::Rows(r) => {
            if r.len() != k || r.iter().any(|row| row.len() != n) {
                return Err(CliError::Malformed(format!("A is not a {k} x {n} matrix")));
            }
            r
        }
    };
    if raw.b.len() != k {
        return Err(CliError::Malformed(format!(
            "b has length {}, expected {k}",
            raw.b.len()
        )));
    }
    let c = raw.c.unwrap_or_else(|| vec![0; n]);
    if c.len() != n {
        return Err(CliError::Malformed(format!(
            "c has length {}, expected {n}",
            c.len()
        )));
    }
    Ok(IlpInstance::new(rows, raw.b, c)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub eta: u64,
    pub rho: u32,
    /// Exact `|det B'|` as `p/q` or `p`.
    pub delta: String,
    pub level_sizes: Vec<usize>,
    pub wall_ms: f64,
    pub shift_y: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub status: String,
    pub objective: Option<i64>,
    pub x: Option<Vec<i64>>,
    pub stats: StatsFile,
}

impl ResultFile {
    /// Re-verifies `A x = b, x >= 0` and the objective before building the
    /// file. Without `full_stats` the level sizes are empty and the wall time
    /// is zero, so that repeated runs print identical bytes.
    pub fn new(inst: &IlpInstance, res: &SolveResult, full_stats: bool) -> Result<Self, CliError> {
        if let Some(x) = &res.x {
            if x.len() != inst.n() || !inst.is_feasible(x) {
                return Err(CliError::Solver(ldilp::Error::InvalidWitness(format!(
                    "{x:?} does not satisfy A x = b, x >= 0"
                ))));
            }
            if let Some(obj) = res.objective {
                if obj != inst.objective(x) {
                    return Err(CliError::Solver(ldilp::Error::InvalidWitness(format!(
                        "objective {obj} differs from c^T x = {}",
                        inst.objective(x)
                    ))));
                }
            }
        }
        let s = &res.stats;
        Ok(ResultFile {
            status: res.status.as_str().to_string(),
            objective: res.objective,
            x: res.x.clone(),
            stats: StatsFile {
                eta: s.eta,
                rho: s.rho,
                delta: s
                    .delta
                    .as_ref()
                    .map_or_else(|| "0".into(), |d| d.to_string()),
                level_sizes: if full_stats {
                    s.level_sizes.clone()
                } else {
                    Vec::new()
                },
                wall_ms: if full_stats { s.wall_ms } else { 0.0 },
                shift_y: s.shift_y.clone(),
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
