//! Measurement noise of an actual measurement `M` relative to an ideal `E`.
//!
//! `M` is measured on the eigenstates `ω_x` of `E`, which are prepared with the
//! prior `p(x) = <u, e_x>`. The resulting joint distribution
//! `p(x, x̂) = p(x) m_x̂(ω_x)` yields the noise `N(M; E) = H(E | M)` and the
//! error probability of any guessing function `f: X̂ → X`.

use serde::Serialize;

use crate::error::{GptError, Result, Violation};
use crate::polygon::IdealMeasurement;
use crate::theory::{Measurement, DEFAULT_TOL};
use crate::uncertainty::{entropy, LogBase, ProbDist};
use crate::vector::VecV;

/// Above this many guessing functions the exhaustive search is skipped.
pub const BRUTE_FORCE_CAP: u64 = 1_000_000;

pub fn prior(e: &IdealMeasurement) -> Result<ProbDist> {
    ProbDist::new(e.priors().to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    rows: Vec<String>,
    cols: Vec<String>,
    p: Vec<Vec<f64>>,
    prior: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl JointDistribution {
    /// Builds and validates a joint distribution against its expected row marginal.
    pub fn new(p: Vec<Vec<f64>>, prior: Vec<f64>, tol: f64) -> Result<Self> {
        let mut violations = Vec::new();
        if p.len() != prior.len() || p.is_empty() {
            return Err(GptError::DimensionMismatch {
                expected: prior.len(),
                got: p.len(),
            });
        }
        let ncols = p[0].len();
        for (x, row) in p.iter().enumerate() {
            if row.len() != ncols {
                return Err(GptError::DimensionMismatch {
                    expected: ncols,
                    got: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() || v < -tol {
                    violations.push(Violation::new("nonnegative", Some(x), -v));
                }
            }
            let s: f64 = row.iter().sum();
            if (s - prior[x]).abs() > tol {
                violations.push(Violation::new("row_sum", Some(x), (s - prior[x]).abs()));
            }
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > tol {
            violations.push(Violation::new("total", None, (total - 1.0).abs()));
        }
        if !violations.is_empty() {
            return Err(GptError::invalid("joint distribution", violations));
        }
        let p: Vec<Vec<f64>> = p
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.max(0.0)).collect())
            .collect();
        let col_marginal = (0..ncols).map(|c| p.iter().map(|r| r[c]).sum()).collect();
        Ok(JointDistribution {
            rows: (0..p.len()).map(|x| x.to_string()).collect(),
            cols: (0..ncols).map(|x| x.to_string()).collect(),
            p,
            prior,
            col_marginal,
        })
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != self.p.len() || cols.len() != self.col_marginal.len() {
            return Err(GptError::DimensionMismatch {
                expected: self.p.len() * self.col_marginal.len(),
                got: rows.len() * cols.len(),
            });
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn p(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    pub fn rows(&self) -> usize {
        self.p.len()
    }

    pub fn cols(&self) -> usize {
        self.col_marginal.len()
    }

    /// `H(X | X̂) = Σ_x̂ p(x̂) H(p(· | x̂))`; empty columns contribute nothing.
    pub fn conditional_entropy(&self, base: LogBase) -> f64 {
        let mut h = 0.0;
        for (c, &pc) in self.col_marginal.iter().enumerate() {
            if pc <= 0.0 {
                continue;
            }
            let cond: Vec<f64> = self
                .p
                .iter()
                .map(|r| clamp_unit(r[c] / pc, DEFAULT_TOL))
                .collect();
            h += pc * entropy(&cond, base);
        }
        h.max(0.0)
    }

    /// `Σ_x Σ_{x̂ : f(x̂) ≠ x} p(x, x̂)`.
    pub fn error_probability(&self, f: &GuessingFunction) -> Result<f64> {
        f.check(self.rows(), self.cols())?;
        let mut err = 0.0;
        for (x, row) in self.p.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if f.0[c] != x {
                    err += v;
                }
            }
        }
        Ok(err)
    }

    /// Maximum-a-posteriori guess `f(x̂) = argmax_x p(x, x̂)`, ties to the smallest `x`.
    pub fn map_guess(&self) -> GuessingFunction {
        GuessingFunction(
            (0..self.cols())
                .map(|c| {
                    let mut best = 0;
                    for x in 1..self.rows() {
                        if self.p[x][c] > self.p[best][c] {
                            best = x;
                        }
                    }
                    best
                })
                .collect(),
        )
    }

    pub fn to_json(&self, base: LogBase) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "p": self.p,
            "prior": self.prior,
            "noise_bits": self.conditional_entropy(base),
        })
    }
}

fn clamp_unit(v: f64, tol: f64) -> f64 {
    if v < tol {
        v.max(0.0)
    } else if v > 1.0 - tol {
        v.min(1.0)
    } else {
        v
    }
}

/// `f: X̂ → X`, stored as `f[x̂]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuessingFunction(pub Vec<usize>);

impl GuessingFunction {
    fn check(&self, rows: usize, cols: usize) -> Result<()> {
        if self.0.len() != cols {
            return Err(GptError::NotTotal(format!(
                "defined on {} of {cols} outcomes",
                self.0.len()
            )));
        }
        if let Some(bad) = self.0.iter().find(|&&x| x >= rows) {
            return Err(GptError::NotTotal(format!("guess {bad} is not an outcome of E")));
        }
        Ok(())
    }
}

/// Joint distribution of eigenstate preparations of `e` against raw effects,
/// with probabilities clamped into `[0, 1]`. Used for search iterates that
/// may sit slightly outside the effect space.
pub(crate) fn joint_matrix(e: &IdealMeasurement, effects: &[VecV]) -> Vec<Vec<f64>> {
    let priors = e.priors();
    e.eigenstates()
        .iter()
        .zip(priors)
        .map(|(w, px)| {
            effects
                .iter()
                .map(|m| px * m.dot(&w.vector()).clamp(0.0, 1.0))
                .collect()
        })
        .collect()
}

/// `H(E | M)` for a raw effect list; zero-mass columns are skipped.
pub(crate) fn noise_of_effects(e: &IdealMeasurement, effects: &[VecV], base: LogBase) -> f64 {
    let p = joint_matrix(e, effects);
    let mut h = 0.0;
    for c in 0..effects.len() {
        let pc: f64 = p.iter().map(|r| r[c]).sum();
        if pc <= 0.0 {
            continue;
        }
        let cond: Vec<f64> = p.iter().map(|r| clamp_unit(r[c] / pc, DEFAULT_TOL)).collect();
        h += pc * entropy(&cond, base);
    }
    h.max(0.0)
}

pub fn joint_distribution(e: &IdealMeasurement, m: &Measurement) -> Result<JointDistribution> {
    if !e.theory().same_space(m.theory()) {
        return Err(GptError::TheoryMismatch(format!(
            "{} vs {}",
            e.theory().name(),
            m.theory().name()
        )));
    }
    let tol = e.theory().tol();
    let priors = e.priors();
    let mut p = Vec::with_capacity(2);
    for (w, px) in e.eigenstates().iter().zip(priors) {
        let row = m
            .effects()
            .iter()
            .map(|mx| crate::theory::clamp_prob(mx.dot(&w.vector()), tol).map(|q| px * q))
            .collect::<Result<Vec<_>>>()?;
        p.push(row);
    }
    JointDistribution::new(p, priors.to_vec(), tol.max(DEFAULT_TOL) * m.len() as f64)?
        .with_labels(vec!["0".into(), "1".into()], m.labels().to_vec())
}

/// `N(M; E) = H(E | M)`.
pub fn noise(e: &IdealMeasurement, m: &Measurement, base: LogBase) -> Result<f64> {
    Ok(joint_distribution(e, m)?.conditional_entropy(base))
}

pub fn error_probability(e: &IdealMeasurement, m: &Measurement, f: &GuessingFunction) -> Result<f64> {
    joint_distribution(e, m)?.error_probability(f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinError {
    pub error: f64,
    pub guess: GuessingFunction,
}

/// Minimum error probability over guessing functions, attained by the MAP rule.
pub fn min_error_probability(e: &IdealMeasurement, m: &Measurement) -> Result<MinError> {
    let jd = joint_distribution(e, m)?;
    let guess = jd.map_guess();
    let error = jd.error_probability(&guess)?;
    Ok(MinError { error, guess })
}

/// Exhaustive minimum over all `|X|^|X̂|` guessing functions, or `None`
/// when that count exceeds [`BRUTE_FORCE_CAP`]. Ties keep the first function
/// in lexicographic order.
pub fn min_error_exhaustive(jd: &JointDistribution) -> Option<MinError> {
    let rows = jd.rows() as u64;
    let cols = jd.cols() as u32;
    let count = rows.checked_pow(cols)?;
    if count > BRUTE_FORCE_CAP {
        return None;
    }
    let mut best: Option<MinError> = None;
    for code in 0..count {
        let mut c = code;
        let mut f = vec![0usize; cols as usize];
        for slot in f.iter_mut().rev() {
            *slot = (c % rows) as usize;
            c /= rows;
        }
        let guess = GuessingFunction(f);
        let error = jd.error_probability(&guess).expect("total by construction");
        if best.as_ref().is_none_or(|b| error < b.error) {
            best = Some(MinError { error, guess });
        }
    }
    best
}
