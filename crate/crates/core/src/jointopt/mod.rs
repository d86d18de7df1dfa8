//! Approximate joint measurements of two binary ideal measurements.
//!
//! A joint measurement is a grid `M = {m_x̂ŷ}` of unnormalised effects summing
//! to `u`. Its row and column sums are the marginals `M^A`, `M^B`, and the
//! quantity of interest is the noise sum `N(M^A; A) + N(M^B; B)`, which never
//! drops below the entropic preparation bound `Γ = -2 log(γ/2)`.

mod search;
mod theorem;

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use serde::Serialize;

pub use search::{optimize_noise, OptimizerConfig, OptimizerResult};
pub use theorem::{theorem_check, TheoremReport};

use crate::error::{GptError, Result, Violation};
use crate::lp::{self, PhaseOne};
use crate::noise::noise_of_effects;
use crate::polygon::{IdealMeasurement, Site};
use crate::theory::{Measurement, Theory, TheoryKind};
use crate::uncertainty::{check_same_theory, LogBase};
use crate::vector::VecV;

/// Number of disc pure states used as the polyhedral surrogate in feasibility LPs.
pub const DISC_SURROGATE_N: usize = 360;

#[derive(Debug, Clone, Serialize)]
pub struct JointMeasurement {
    #[serde(skip)]
    theory: Arc<Theory>,
    cells: Vec<Vec<VecV>>,
}

impl JointMeasurement {
    /// Validates `Σ m = u` and dual-cone membership of every cell. Zero cells
    /// are allowed; the marginals are then valid automatically.
    pub fn new(theory: &Arc<Theory>, cells: Vec<Vec<VecV>>) -> Result<Self> {
        let report = validate_grid(theory, &cells);
        if !report.is_empty() {
            return Err(GptError::invalid("joint measurement", report));
        }
        Ok(JointMeasurement {
            theory: Arc::clone(theory),
            cells,
        })
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }

    pub fn cells(&self) -> &[Vec<VecV>] {
        &self.cells
    }

    pub fn cell(&self, x: usize, y: usize) -> VecV {
        self.cells[x][y]
    }

    /// `m_x̂ = Σ_ŷ m_x̂ŷ`.
    pub fn row_sums(&self) -> Vec<VecV> {
        row_sums(&self.cells)
    }

    /// `m_ŷ = Σ_x̂ m_x̂ŷ`.
    pub fn col_sums(&self) -> Vec<VecV> {
        col_sums(&self.cells)
    }

    /// All cells in row-major order.
    pub fn flattened(&self) -> Vec<VecV> {
        self.cells.iter().flatten().copied().collect()
    }

    /// `(M^A, M^B)` with zero effects dropped.
    pub fn marginals(&self) -> Result<(Measurement, Measurement)> {
        let tol = self.theory.tol();
        let keep = |v: Vec<VecV>| -> (Vec<VecV>, Vec<String>) {
            v.into_iter()
                .enumerate()
                .filter(|(_, e)| e.norm() > tol)
                .map(|(k, e)| (e, k.to_string()))
                .unzip()
        };
        let (ra, la) = keep(self.row_sums());
        let (rb, lb) = keep(self.col_sums());
        Ok((
            Measurement::with_labels(&self.theory, ra, la)?,
            Measurement::with_labels(&self.theory, rb, lb)?,
        ))
    }

    /// Largest dual-cone violation over all cells.
    pub fn max_violation(&self) -> f64 {
        self.cells
            .iter()
            .flatten()
            .map(|c| (-self.theory.dual_cone_slack(c)).max(0.0))
            .fold(0.0, f64::max)
    }
}

fn row_sums(cells: &[Vec<VecV>]) -> Vec<VecV> {
    cells.iter().map(|r| r.iter().copied().sum()).collect()
}

fn col_sums(cells: &[Vec<VecV>]) -> Vec<VecV> {
    let ncols = cells.first().map_or(0, Vec::len);
    (0..ncols).map(|c| cells.iter().map(|r| r[c]).sum()).collect()
}

fn validate_grid(theory: &Theory, cells: &[Vec<VecV>]) -> Vec<Violation> {
    let tol = theory.tol();
    let mut v = Vec::new();
    let ncols = cells.first().map_or(0, Vec::len);
    if cells.is_empty() || ncols == 0 || cells.iter().any(|r| r.len() != ncols) {
        v.push(Violation::new("shape", None, 0.0));
        return v;
    }
    for (k, c) in cells.iter().flatten().enumerate() {
        let s = theory.dual_cone_slack(c);
        if s < -tol {
            v.push(Violation::new("cell_dual_cone", Some(k), -s));
        }
    }
    let total: VecV = cells.iter().flatten().copied().sum();
    let res = total.max_abs_diff(&theory.unit_effect().vector());
    if res > tol {
        v.push(Violation::new("sum_to_unit", None, res));
    }
    v
}

pub(crate) fn check_grid_theory(m: &JointMeasurement, a: &IdealMeasurement, b: &IdealMeasurement) -> Result<()> {
    check_same_theory(a, b)?;
    if !m.theory().same_space(a.theory()) {
        return Err(GptError::TheoryMismatch(format!(
            "{} vs {}",
            m.theory().name(),
            a.theory().name()
        )));
    }
    Ok(())
}

/// `N(M^A; A) + N(M^B; B)`.
pub fn noise_sum(m: &JointMeasurement, a: &IdealMeasurement, b: &IdealMeasurement, base: LogBase) -> Result<f64> {
    check_grid_theory(m, a, b)?;
    Ok(noise_of_effects(a, &m.row_sums(), base) + noise_of_effects(b, &m.col_sums(), base))
}

/// `H(E | M)` with `M` read as a measurement on the full outcome grid.
pub fn grid_noise(m: &JointMeasurement, e: &IdealMeasurement, base: LogBase) -> Result<f64> {
    if !m.theory().same_space(e.theory()) {
        return Err(GptError::TheoryMismatch(format!(
            "{} vs {}",
            m.theory().name(),
            e.theory().name()
        )));
    }
    Ok(noise_of_effects(e, &m.flattened(), base))
}

/// Grid whose marginals are exactly `alpha` and `beta` (the `x̂ = 0`, `ŷ = 0`
/// effects), parameterised by its `(0, 0)` cell.
pub(crate) fn grid_from_corner(u: VecV, alpha: VecV, beta: VecV, corner: VecV) -> Vec<Vec<VecV>> {
    vec![
        vec![corner, alpha - corner],
        vec![beta - corner, u - alpha - beta + corner],
    ]
}

/// Phase-one LP for a `(0, 0)` cell making all four cells nonnegative on every
/// generator in `gens`, given marginal targets `alpha` and `beta`.
pub(crate) fn corner_lp(gens: &[VecV], u: VecV, alpha: VecV, beta: VecV) -> PhaseOne {
    let rest = u - alpha - beta;
    let mut a = Vec::with_capacity(4 * gens.len());
    let mut rhs = Vec::with_capacity(4 * gens.len());
    for g in gens {
        let row = g.as_array();
        let neg = (-*g).as_array();
        // <t, g> >= 0
        a.push(neg.to_vec());
        rhs.push(0.0);
        // <alpha - t, g> >= 0
        a.push(row.to_vec());
        rhs.push(alpha.dot(g));
        // <beta - t, g> >= 0
        a.push(row.to_vec());
        rhs.push(beta.dot(g));
        // <u - alpha - beta + t, g> >= 0
        a.push(neg.to_vec());
        rhs.push(rest.dot(g));
    }
    lp::phase_one(&a, &rhs)
}

/// Constraint generators for feasibility LPs: the pure states, or a fine
/// inscribed polygon of disc pure states.
pub(crate) fn lp_generators(theory: &Theory) -> (Vec<VecV>, Option<usize>) {
    match theory.kind() {
        TheoryKind::Disc => (
            (0..DISC_SURROGATE_N)
                .map(|k| VecV::polar(1.0, TAU * k as f64 / DISC_SURROGATE_N as f64, 1.0))
                .collect(),
            Some(DISC_SURROGATE_N),
        ),
        _ => (theory.pure_states().to_vec(), None),
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum Feasibility {
    Feasible(JointMeasurement),
    Infeasible,
    /// Only for the disc: the surrogate LP is feasible but its witness leaves
    /// the disc's cone, so no claim is made either way.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub verdict: Feasibility,
    pub residual: f64,
    /// `Some(n)` when the disc was replaced by an inscribed `n`-gon.
    pub surrogate: Option<usize>,
    pub lp_iterations: usize,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Feasibility::Feasible(_))
    }
}

/// Decides whether `A` and `B` are jointly measurable.
pub fn exact_joint_feasible(a: &IdealMeasurement, b: &IdealMeasurement) -> Result<FeasibilityReport> {
    check_same_theory(a, b)?;
    let theory = a.theory();
    let tol = theory.tol();
    let (gens, surrogate) = lp_generators(theory);
    let u = theory.unit_effect().vector();
    let out = corner_lp(&gens, u, a.effect(0), b.effect(0));
    let verdict = if out.is_feasible(tol) {
        let corner = VecV::new(out.x[0], out.x[1], out.x[2]);
        let cells = grid_from_corner(u, a.effect(0), b.effect(0), corner);
        match JointMeasurement::new(theory, cells) {
            Ok(m) => Feasibility::Feasible(m),
            Err(_) if surrogate.is_some() => Feasibility::Undetermined,
            Err(e) => return Err(e),
        }
    } else {
        Feasibility::Infeasible
    };
    Ok(FeasibilityReport {
        verdict,
        residual: out.residual,
        surrogate,
        lp_iterations: out.iterations,
    })
}

/// The four reference grids mixed by [`random_feasible_joint`]:
/// product with `A` sharp, product with `B` sharp, all-equal, and the
/// diagonal embedding of `c`.
pub fn reference_grids(a: &IdealMeasurement, b: &IdealMeasurement, c: &IdealMeasurement) -> [Vec<Vec<VecV>>; 4] {
    let u = a.theory().unit_effect().vector();
    let pa = a.priors();
    let pb = b.priors();
    let a_sharp = (0..2)
        .map(|x| (0..2).map(|y| pb[y] * a.effect(x)).collect())
        .collect();
    let b_sharp = (0..2)
        .map(|x| (0..2).map(|y| pa[x] * b.effect(y)).collect())
        .collect();
    let equal = vec![vec![0.25 * u; 2]; 2];
    let diag = vec![vec![c.effect(0), VecV::ZERO], vec![VecV::ZERO, c.effect(1)]];
    [a_sharp, b_sharp, equal, diag]
}

/// Convex mixture of the reference grids with the given weights.
pub fn mix_grids(
    a: &IdealMeasurement,
    b: &IdealMeasurement,
    c: &IdealMeasurement,
    weights: [f64; 4],
) -> Result<JointMeasurement> {
    check_same_theory(a, b)?;
    check_same_theory(a, c)?;
    let grids = reference_grids(a, b, c);
    let mut cells = vec![vec![VecV::ZERO; 2]; 2];
    for (g, w) in grids.iter().zip(weights) {
        for x in 0..2 {
            for y in 0..2 {
                cells[x][y] += w * g[x][y];
            }
        }
    }
    JointMeasurement::new(a.theory(), cells)
}

/// Seeded random point of the feasible set: a Dirichlet mixture of the
/// reference grids, with a random ideal measurement on the diagonal.
pub fn random_feasible_joint(a: &IdealMeasurement, b: &IdealMeasurement, seed: u64) -> Result<JointMeasurement> {
    check_same_theory(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = Dirichlet::new([1.0; 4]).expect("valid concentration");
    let w = dir.sample(&mut rng);
    let theory = a.theory();
    let site = match theory.kind() {
        TheoryKind::Polygon(n) => Site::Index(rng.random_range(0..*n)),
        _ => Site::Angle(rng.random_range(0.0..TAU)),
    };
    let c = IdealMeasurement::new(theory, site)?;
    mix_grids(a, b, &c, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::ideal_measurement;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn im(s: &str) -> IdealMeasurement {
        ideal_measurement(s.parse().unwrap()).unwrap()
    }

    fn disc_pair() -> (IdealMeasurement, IdealMeasurement) {
        (im("inf:0"), im(&format!("inf:{FRAC_PI_2}")))
    }

    #[test]
    fn reference_marginals() {
        let (a, b) = disc_pair();
        let c = IdealMeasurement::new(a.theory(), Site::Angle(FRAC_PI_4)).unwrap();
        let u = a.theory().unit_effect().vector();

        let m = mix_grids(&a, &b, &c, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let (ma, mb) = m.marginals().unwrap();
        assert!(ma.effects()[0].approx_eq(&a.effect(0), 1e-15));
        assert!(mb.effects()[0].approx_eq(&(0.5 * u), 1e-15));

        let m = mix_grids(&a, &b, &c, [0.0, 0.0, 0.0, 1.0]).unwrap();
        let (ma, mb) = m.marginals().unwrap();
        assert!(ma.effects()[0].approx_eq(&c.effect(0), 1e-15));
        assert!(mb.effects()[1].approx_eq(&c.effect(1), 1e-15));

        let m = mix_grids(&a, &b, &c, [0.0, 0.0, 1.0, 0.0]).unwrap();
        let (ma, mb) = m.marginals().unwrap();
        for e in ma.effects().iter().chain(mb.effects()) {
            assert!(e.approx_eq(&(0.5 * u), 1e-15));
        }
    }

    #[test]
    fn noise_sum_examples() {
        let (a, b) = disc_pair();
        let c = IdealMeasurement::new(a.theory(), Site::Angle(FRAC_PI_4)).unwrap();
        let diag = mix_grids(&a, &b, &c, [0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(
            noise_sum(&diag, &a, &b, LogBase::Bits).unwrap(),
            1.201_752_073_385_712,
            epsilon = 1e-12
        );
        let sharp = mix_grids(&a, &b, &c, [1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(noise_sum(&sharp, &a, &b, LogBase::Bits).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_validation() {
        let (a, _) = disc_pair();
        let th = a.theory();
        let u = th.unit_effect().vector();
        assert!(JointMeasurement::new(th, vec![vec![u, u], vec![VecV::ZERO, -1.0 * u]]).is_err());
        let bad = JointMeasurement::new(th, vec![vec![0.5 * u, 0.5 * u], vec![VecV::ZERO, VecV::ZERO]]).unwrap();
        // marginal A collapses to {u}
        assert!(bad.marginals().is_err());
        let outside = VecV::new(0.3, 0.0, 0.25);
        let err = JointMeasurement::new(
            th,
            vec![vec![outside, 0.25 * u], vec![0.25 * u, 0.75 * u - outside]],
        )
        .unwrap_err();
        assert!(err.violations().iter().any(|v| v.constraint == "cell_dual_cone"));
    }

    #[test]
    fn trit_pair_is_feasible() {
        let (a, b) = (im("3:0"), im("3:1"));
        let r = exact_joint_feasible(&a, &b).unwrap();
        let Feasibility::Feasible(m) = &r.verdict else {
            panic!("expected feasible, got {r:?}");
        };
        assert!(m.row_sums()[0].approx_eq(&a.effect(0), 1e-7));
        assert!(m.col_sums()[0].approx_eq(&b.effect(0), 1e-7));
        assert!(m.max_violation() <= 1e-9);
        assert!(noise_sum(m, &a, &b, LogBase::Bits).unwrap() <= 1e-9);
    }

    #[test]
    fn disc_quarter_turn_is_infeasible() {
        let (a, b) = disc_pair();
        let r = exact_joint_feasible(&a, &b).unwrap();
        assert!(matches!(r.verdict, Feasibility::Infeasible));
        assert_eq!(r.surrogate, Some(DISC_SURROGATE_N));
        assert!(r.residual > 1e-3);
    }

    #[test]
    fn same_measurement_is_trivially_compatible() {
        let a = im("6:2");
        let b = IdealMeasurement::new(a.theory(), Site::Index(2)).unwrap();
        assert!(exact_joint_feasible(&a, &b).unwrap().is_feasible());
    }

    #[test]
    fn random_joints_are_deterministic() {
        let (a, b) = (im("5:0"), im("5:1"));
        let m1 = random_feasible_joint(&a, &b, 7).unwrap();
        let m2 = random_feasible_joint(&a, &b, 7).unwrap();
        assert_eq!(m1.cells(), m2.cells());
        let m3 = random_feasible_joint(&a, &b, 8).unwrap();
        assert_ne!(m1.cells(), m3.cells());
    }

    #[test]
    fn refuses_grids_from_other_theories() {
        let (a, b) = (im("5:0"), im("5:1"));
        let other = random_feasible_joint(&im("7:0"), &im("7:1"), 0).unwrap();
        assert!(matches!(noise_sum(&other, &a, &b, LogBase::Bits), Err(GptError::TheoryMismatch(_))));
    }
}
