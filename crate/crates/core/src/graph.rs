//! Per-coalition communication digraphs with doubly-stochastic weights.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute tolerance for the row/column sum checks.
pub const STOCHASTIC_TOL: f64 = 1e-12;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 10_000;

/// Outcome of each structural check on a weight matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub nonnegative: bool,
    pub row_stochastic: bool,
    pub column_stochastic: bool,
    pub self_loops: bool,
    pub strongly_connected: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.nonnegative {
            out.push("nonnegativity");
        }
        if !self.row_stochastic {
            out.push("row-stochastic");
        }
        if !self.column_stochastic {
            out.push("column-stochastic");
        }
        if !self.self_loops {
            out.push("self-loops");
        }
        if !self.strongly_connected {
            out.push("strong connectivity");
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "nonnegativity: {}", mark(self.nonnegative))?;
        writeln!(f, "row-stochastic: {}", mark(self.row_stochastic))?;
        writeln!(f, "column-stochastic: {}", mark(self.column_stochastic))?;
        writeln!(f, "self-loops: {}", mark(self.self_loops))?;
        write!(f, "strong connectivity: {}", mark(self.strongly_connected))
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: bad.len() });
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

/// Run every structural check on a square weight matrix given by rows.
pub fn validate_graph(rows: &[Vec<f64>]) -> Result<ValidationReport> {
    Ok(validate_matrix(&to_matrix(rows)?))
}

fn validate_matrix(a: &DMatrix<f64>) -> ValidationReport {
    let n = a.nrows();
    let finite = a.iter().all(|v| v.is_finite());
    ValidationReport {
        nonnegative: finite && a.iter().all(|&v| v >= 0.0),
        row_stochastic: finite && a.row_iter().all(|r| (r.sum() - 1.0).abs() <= STOCHASTIC_TOL),
        column_stochastic: finite && a.column_iter().all(|c| (c.sum() - 1.0).abs() <= STOCHASTIC_TOL),
        self_loops: (0..n).all(|k| a[(k, k)] > 0.0),
        strongly_connected: strongly_connected(a),
    }
}

// Edge l -> j whenever a[(j, l)] > 0; strong connectivity needs every node
// reachable from node 0 along edges and along reversed edges.
fn strongly_connected(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if forward { a[(v, u)] } else { a[(u, v)] };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Validated doubly-stochastic, strongly connected weight matrix `A^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionGraph {
    weights: DMatrix<f64>,
}

impl CoalitionGraph {
    /// Build from explicit rows; every check in [`validate_graph`] must pass.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let weights = to_matrix(rows)?;
        if weights.nrows() == 0 {
            return Err(Error::InvalidGraph("empty matrix".into()));
        }
        let report = validate_matrix(&weights);
        if !report.passed() {
            return Err(Error::InvalidGraph(format!(
                "failed checks: {}",
                report.failures().join(", ")
            )));
        }
        Ok(Self { weights })
    }

    /// Uniform complete graph `(1/n) 1 1^T`.
    pub fn complete(n: usize) -> Self {
        assert!(n > 0, "graph size must be positive");
        Self {
            weights: DMatrix::from_element(n, n, 1.0 / n as f64),
        }
    }

    pub fn size(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.weights.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn sigma(&self) -> f64 {
        contraction_sigma(self)
    }
}

/// Directed ring `j <- j-1 (mod n)` with edge weight `1 - self_weight` and
/// self-loops of weight `self_weight`.
pub fn build_ring(n: usize, self_weight: f64) -> Result<CoalitionGraph> {
    if !(self_weight > 0.0 && self_weight < 1.0) {
        return Err(Error::InvalidWeight(self_weight));
    }
    if n == 0 {
        return Err(Error::InvalidInput("ring size must be at least 1".into()));
    }
    if n == 1 {
        return Ok(CoalitionGraph::complete(1));
    }
    let mut w = DMatrix::zeros(n, n);
    for j in 0..n {
        w[(j, j)] = self_weight;
        w[(j, (j + n - 1) % n)] = 1.0 - self_weight;
    }
    Ok(CoalitionGraph { weights: w })
}

/// How each coalition's graph is generated.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    Ring { self_weight: f64 },
    Complete,
    /// One matrix per coalition, or a single matrix shared by all.
    Custom(Vec<Vec<Vec<f64>>>),
}

impl GraphKind {
    /// Graph for coalition `coalition` of size `n`.
    pub fn build(&self, coalition: usize, n: usize) -> Result<CoalitionGraph> {
        match self {
            GraphKind::Ring { self_weight } => build_ring(n, *self_weight),
            GraphKind::Complete => {
                if n == 0 {
                    return Err(Error::InvalidInput("graph size must be at least 1".into()));
                }
                Ok(CoalitionGraph::complete(n))
            }
            GraphKind::Custom(mats) => {
                let rows = match mats.len() {
                    0 => return Err(Error::InvalidGraph("no matrices given".into())),
                    1 => &mats[0],
                    _ => mats.get(coalition).ok_or_else(|| {
                        Error::InvalidIndex(format!("no matrix for coalition {coalition} among {}", mats.len()))
                    })?,
                };
                let g = CoalitionGraph::from_rows(rows)?;
                if g.size() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "coalition {coalition} has {n} players but its matrix is {0}x{0}",
                        g.size()
                    )));
                }
                Ok(g)
            }
        }
    }
}

/// Spectral norm of `A - (1/n) 1 1^T` by power iteration on its Gram matrix.
pub fn contraction_sigma(graph: &CoalitionGraph) -> f64 {
    let n = graph.size();
    let centered = &graph.weights - DMatrix::from_element(n, n, 1.0 / n as f64);
    spectral_norm(&centered)
}

/// Largest singular value of `m`, computed without an eigensolver.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    let n = gram.nrows();
    if n == 0 {
        return 0.0;
    }
    // irregular start so it is not orthogonal to the top eigenspace
    let mut v = DVector::from_fn(n, |k, _| 1.0 + ((k as f64 + 1.0) * 0.618_033_988_749).fract());
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - lambda).abs() <= POWER_TOL * next.abs().max(1e-300) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// Per-coalition contraction quantities feeding the global constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub sigma: f64,
    pub sigma_sq: f64,
    /// `(1 + sigma^2) / (1 - sigma^2)`
    pub varsigma: f64,
}

pub fn kappa_from_sigma(sigma: f64) -> Result<Kappa> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::InvalidGraph(format!("contraction factor {sigma} is not in [0, 1)")));
    }
    let s2 = sigma * sigma;
    Ok(Kappa {
        sigma,
        sigma_sq: s2,
        varsigma: (1.0 + s2) / (1.0 - s2),
    })
}

pub fn coalition_kappa(graph: &CoalitionGraph) -> Result<Kappa> {
    kappa_from_sigma(contraction_sigma(graph))
}
