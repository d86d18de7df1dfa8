//! Numerical check of the entropic measurement uncertainty relation.

use serde::{Deserialize, Serialize};

use super::{grid_noise, noise_sum, optimize_noise, random_feasible_joint, JointMeasurement, OptimizerConfig};
use crate::error::Result;
use crate::polygon::IdealMeasurement;
use crate::uncertainty::{check_same_theory, gamma, pur_bound, LogBase};

/// Slack allowed on every inequality.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub a: String,
    pub b: String,
    pub gamma: f64,
    /// `Γ = -2 log(γ/2)`.
    pub bound: f64,
    pub samples: usize,
    pub seed: u64,
    /// `None` when nothing was checked.
    pub min_noise_sum: Option<f64>,
    /// Minimum of `H(A|M) + H(B|M)` on the full outcome grid.
    pub min_grid_entropy_sum: Option<f64>,
    /// Minimum of `H(A|M^A) - H(A|M)` and `H(B|M^B) - H(B|M)`.
    pub min_coarsening_gain: Option<f64>,
    pub optimizer_noise_sum: Option<f64>,
    pub failures: Vec<String>,
    pub passed: bool,
}

struct Tally {
    min_ns: f64,
    min_grid: f64,
    min_gain: f64,
    failures: Vec<String>,
}

impl Tally {
    fn check(
        &mut self,
        label: &str,
        m: &JointMeasurement,
        a: &IdealMeasurement,
        b: &IdealMeasurement,
        bound: f64,
        base: LogBase,
    ) -> Result<f64> {
        let ns = noise_sum(m, a, b, base)?;
        let ha = grid_noise(m, a, base)?;
        let hb = grid_noise(m, b, base)?;
        let (ma, mb) = (m.row_sums(), m.col_sums());
        let ha_marg = crate::noise::noise_of_effects(a, &ma, base);
        let hb_marg = crate::noise::noise_of_effects(b, &mb, base);
        let gain = (ha_marg - ha).min(hb_marg - hb);
        self.min_ns = self.min_ns.min(ns);
        self.min_grid = self.min_grid.min(ha + hb);
        self.min_gain = self.min_gain.min(gain);
        if ns < bound - CHECK_TOL {
            self.failures.push(format!("{label}: noise sum {ns} < bound {bound}"));
        }
        if ha + hb < bound - CHECK_TOL {
            self.failures
                .push(format!("{label}: H(A|M) + H(B|M) = {} < bound {bound}", ha + hb));
        }
        if gain < -CHECK_TOL {
            self.failures.push(format!("{label}: coarsening lowered conditional entropy by {}", -gain));
        }
        Ok(ns)
    }
}

/// Checks `H(A|M) + H(B|M) >= Γ` and `N(M^A;A) + N(M^B;B) >= Γ` on
/// `n_samples` seeded random joints and, when `optimizer` is given, on the
/// optimiser's best grid.
pub fn theorem_check(
    a: &IdealMeasurement,
    b: &IdealMeasurement,
    n_samples: usize,
    seed: u64,
    optimizer: Option<&OptimizerConfig>,
    base: LogBase,
) -> Result<TheoremReport> {
    check_same_theory(a, b)?;
    let g = gamma(a, b)?.gamma;
    let bound = pur_bound(g, base)?;
    let mut t = Tally {
        min_ns: f64::INFINITY,
        min_grid: f64::INFINITY,
        min_gain: f64::INFINITY,
        failures: Vec::new(),
    };
    for s in 0..n_samples {
        let sample_seed = seed.wrapping_add(s as u64);
        let m = random_feasible_joint(a, b, sample_seed)?;
        t.check(&format!("sample seed {sample_seed}"), &m, a, b, bound, base)?;
    }
    let optimizer_noise_sum = match optimizer {
        Some(cfg) => {
            let r = optimize_noise(a, b, cfg, base)?;
            Some(t.check("optimizer", &r.best, a, b, bound, base)?)
        }
        None => None,
    };
    let passed = t.failures.is_empty();
    Ok(TheoremReport {
        a: a.address().to_string(),
        b: b.address().to_string(),
        gamma: g,
        bound,
        samples: n_samples,
        seed,
        min_noise_sum: t.min_ns.is_finite().then_some(t.min_ns),
        min_grid_entropy_sum: t.min_grid.is_finite().then_some(t.min_grid),
        min_coarsening_gain: t.min_gain.is_finite().then_some(t.min_gain),
        optimizer_noise_sum,
        failures: t.failures,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::ideal_measurement;

    fn im(s: &str) -> IdealMeasurement {
        ideal_measurement(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn trit_bound_is_vacuous_but_checked() {
        let r = theorem_check(&im("3:0"), &im("3:1"), 100, 0, None, LogBase::Bits).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn octagon_pair_passes() {
        let r = theorem_check(&im("8:0"), &im("8:2"), 100, 0, None, LogBase::Bits).unwrap();
        assert!(r.bound > 0.0);
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.min_noise_sum.unwrap() >= r.bound);
    }
}
