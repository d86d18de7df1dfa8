//! Preparation uncertainty: outcome distributions, Shannon entropy,
//! Landau–Pollak constants and the entropic bound they imply.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result, Violation};
use crate::polygon::{self, Address, IdealMeasurement, Order, Site};
use crate::theory::{Measurement, State, TheoryKind, DEFAULT_TOL};
use crate::vector::VecV;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x.log2(),
            LogBase::Nats => x.ln(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "bits" => Ok(LogBase::Bits),
            "e" | "nats" => Ok(LogBase::Nats),
            _ => Err(GptError::Parse(format!("log base must be 2 or e, got {s:?}"))),
        }
    }
}

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbDist {
    probs: Vec<f64>,
    base: LogBase,
}

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        ProbDist::with_tol(probs, DEFAULT_TOL)
    }

    /// Entries within `tol` below zero are clamped to zero.
    pub fn with_tol(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        let mut violations = Vec::new();
        for (x, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -tol {
                violations.push(Violation::new("nonnegative", Some(x), -*p));
            } else if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol {
            violations.push(Violation::new("normalization", None, (sum - 1.0).abs()));
        }
        if violations.is_empty() {
            Ok(ProbDist {
                probs,
                base: LogBase::Bits,
            })
        } else {
            Err(GptError::invalid("distribution", violations))
        }
    }

    pub fn in_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }
}

/// `-Σ p log p` with `0 log 0 = 0`.
pub fn entropy(probs: &[f64], base: LogBase) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * base.log(p))
        .sum();
    h.max(0.0)
}

pub fn shannon_entropy(p: &ProbDist) -> f64 {
    entropy(&p.probs, p.base)
}

/// `{e_x(ω)}_x`.
pub fn outcome_distribution(m: &Measurement, w: &State) -> Result<ProbDist> {
    let theory = m.theory();
    let probs = m
        .effects()
        .iter()
        .map(|e| crate::theory::clamp_prob(e.dot(&w.vector()), theory.tol()))
        .collect::<Result<Vec<_>>>()?;
    ProbDist::with_tol(probs, theory.tol().max(DEFAULT_TOL) * m.len() as f64)
}

/// `H(A(ω)) + H(B(ω))`.
pub fn entropy_sum(a: &IdealMeasurement, b: &IdealMeasurement, w: &State, base: LogBase) -> Result<f64> {
    let pa = outcome_distribution(a.measurement(), w)?;
    let pb = outcome_distribution(b.measurement(), w)?;
    Ok(entropy(pa.probs(), base) + entropy(pb.probs(), base))
}

/// `-2 log(γ/2)`.
pub fn pur_bound(gamma: f64, base: LogBase) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 2.0 + DEFAULT_TOL) {
        return Err(GptError::GammaOutOfRange(gamma));
    }
    if gamma >= 2.0 {
        return Ok(0.0);
    }
    Ok(-2.0 * base.log(gamma / 2.0))
}

/// One maximising `(state, x, y)` triple of `(a_x + b_y)(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    /// Vertex index for polygons, angle for the disc.
    pub site: Site,
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaResult {
    pub gamma: f64,
    /// First maximiser in (k, x, y) order.
    pub maximizer: Maximizer,
    /// All maximisers within tolerance of `gamma`.
    pub maximizers: Vec<Maximizer>,
}

pub(crate) fn check_same_theory(a: &IdealMeasurement, b: &IdealMeasurement) -> Result<()> {
    if a.theory().same_space(b.theory()) {
        Ok(())
    } else {
        Err(GptError::TheoryMismatch(format!(
            "{} vs {}",
            a.theory().name(),
            b.theory().name()
        )))
    }
}

pub const PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Landau–Pollak constant `γ = max_k max_{x,y} (a_x + b_y)(ω(k))`.
///
/// Polygons are scanned vertex by vertex. On the disc every `a_x + b_y` is
/// affine on the circle, so its maximum is `c + |d|` for its planar part `d`.
pub fn gamma(a: &IdealMeasurement, b: &IdealMeasurement) -> Result<GammaResult> {
    check_same_theory(a, b)?;
    let theory = a.theory();
    let tol = theory.tol();
    let mut cands = Vec::new();
    match theory.kind() {
        TheoryKind::Disc => {
            for (x, y) in PAIRS {
                let s = a.effect(x) + b.effect(y);
                let d = s.planar_norm();
                let angle = if d > 0.0 {
                    polygon::reduce_angle(s.y().atan2(s.x()))
                } else {
                    0.0
                };
                cands.push(Maximizer {
                    site: Site::Angle(angle),
                    x,
                    y,
                    value: s.z() + d,
                });
            }
            // ties between pairs on the disc are broken by angle first
            cands.sort_by(|p, q| site_key(p).total_cmp(&site_key(q)));
        }
        _ => {
            for (k, w) in theory.pure_states().iter().enumerate() {
                for (x, y) in PAIRS {
                    cands.push(Maximizer {
                        site: Site::Index(k),
                        x,
                        y,
                        value: a.effect(x).dot(w) + b.effect(y).dot(w),
                    });
                }
            }
        }
    }
    let g = cands.iter().map(|m| m.value).fold(f64::MIN, f64::max);
    let maximizers: Vec<Maximizer> = cands.into_iter().filter(|m| m.value >= g - tol).collect();
    Ok(GammaResult {
        gamma: g,
        maximizer: maximizers[0],
        maximizers,
    })
}

fn site_key(m: &Maximizer) -> f64 {
    match m.site {
        Site::Index(k) => k as f64,
        Site::Angle(t) => t,
    }
}

/// Closed-form `(a^i_x + b^j_y)(ω(k))` for the pair of ideal measurements
/// with `a₀ = e(i)`, `b₀ = e(j)`.
pub fn table_entry(order: Order, i: Site, j: Site, k: Site, x: usize, y: usize) -> Result<f64> {
    if x > 1 || y > 1 {
        return Err(GptError::IndexOutOfRange(format!("outcome ({x}, {y})")));
    }
    let ti = polygon::effect_angle(Address::new(order, i)?);
    let tj = polygon::effect_angle(Address::new(order, j)?);
    let phi = polygon::vertex_angle(Address::new(order, k)?);
    let mean = 0.5 * (ti + tj) - phi;
    let half = 0.5 * (ti - tj);
    let cc = mean.cos() * half.cos();
    let ss = mean.sin() * half.sin();
    let r2 = polygon::radius_sq(order);
    let v = match order {
        Order::Polygon(n) if n % 2 == 1 => {
            let c = 2.0 * r2 / (1.0 + r2);
            match (x, y) {
                (0, 0) => 2.0 / (1.0 + r2) + c * cc,
                (1, 0) => 1.0 + c * ss,
                (0, 1) => 1.0 - c * ss,
                _ => c - c * cc,
            }
        }
        _ => match (x, y) {
            (0, 0) => 1.0 + r2 * cc,
            (1, 0) => 1.0 + r2 * ss,
            (0, 1) => 1.0 - r2 * ss,
            _ => 1.0 - r2 * cc,
        },
    };
    Ok(v)
}

/// Result of evaluating `max_x a_x(ω) + max_y b_y(ω)` over many states.
#[derive(Debug, Clone, Serialize)]
pub struct LandauPollakReport {
    pub gamma: f64,
    pub max_found: f64,
    pub argmax: Site,
    pub states_evaluated: usize,
    pub passed: bool,
}

fn lp_value(a: &IdealMeasurement, b: &IdealMeasurement, w: &VecV) -> f64 {
    let pa = a.effect(0).dot(w).max(a.effect(1).dot(w));
    let pb = b.effect(0).dot(w).max(b.effect(1).dot(w));
    pa + pb
}

/// Checks the Landau–Pollak relation on every vertex (polygons) or on a
/// `samples`-point angular grid plus the closed-form maximisers (disc).
pub fn landau_pollak_check(
    a: &IdealMeasurement,
    b: &IdealMeasurement,
    gamma_value: f64,
    samples: usize,
) -> Result<LandauPollakReport> {
    check_same_theory(a, b)?;
    let theory = a.theory();
    let mut sites: Vec<(Site, VecV)> = Vec::new();
    match theory.kind() {
        TheoryKind::Disc => {
            for s in 0..samples {
                let t = TAU * s as f64 / samples as f64;
                sites.push((Site::Angle(t), VecV::polar(1.0, t, 1.0)));
            }
            for m in gamma(a, b)?.maximizers {
                if let Site::Angle(t) = m.site {
                    sites.push((m.site, VecV::polar(1.0, t, 1.0)));
                }
            }
        }
        _ => {
            for (k, w) in theory.pure_states().iter().enumerate() {
                sites.push((Site::Index(k), *w));
            }
        }
    }
    let mut best = (f64::MIN, Site::Index(0));
    for (site, w) in &sites {
        let v = lp_value(a, b, w);
        if v > best.0 {
            best = (v, *site);
        }
    }
    Ok(LandauPollakReport {
        gamma: gamma_value,
        max_found: best.0,
        argmax: best.1,
        states_evaluated: sites.len(),
        passed: best.0 <= gamma_value + theory.tol(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::ideal_measurement;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn im(s: &str) -> IdealMeasurement {
        ideal_measurement(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(shannon_entropy(&ProbDist::new(vec![0.5, 0.5]).unwrap()), 1.0, epsilon = 1e-15);
        assert_eq!(shannon_entropy(&ProbDist::new(vec![1.0, 0.0]).unwrap()), 0.0);
        // independent 30-digit evaluation
        let h = shannon_entropy(&ProbDist::new(vec![0.853553, 0.146447]).unwrap());
        assert_abs_diff_eq!(h, 0.600_877_030_012_310_6, epsilon = 1e-12);
        let nats = ProbDist::new(vec![0.5, 0.5]).unwrap().in_base(LogBase::Nats);
        assert_abs_diff_eq!(shannon_entropy(&nats), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(ProbDist::new(vec![0.5, 0.6]).is_err());
        assert!(ProbDist::new(vec![1.1, -0.1]).is_err());
        assert_eq!(ProbDist::new(vec![1.0 + 1e-12, -1e-12]).unwrap().probs()[1], 0.0);
    }

    #[test]
    fn pur_bound_examples() {
        assert_eq!(pur_bound(2.0, LogBase::Bits).unwrap(), 0.0);
        assert_abs_diff_eq!(pur_bound(1.0, LogBase::Bits).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            pur_bound(1.0 + FRAC_1_SQRT_2, LogBase::Bits).unwrap(),
            0.456_893_393_672_776_05,
            epsilon = 1e-12
        );
        assert!(pur_bound(0.0, LogBase::Bits).is_err());
        assert!(pur_bound(2.1, LogBase::Bits).is_err());
    }

    #[test]
    fn outcome_distribution_examples() {
        let a = im("inf:0");
        let d = a.theory().clone();
        let w0 = d.pure_state(Site::Angle(0.0)).unwrap();
        assert_eq!(outcome_distribution(a.measurement(), &w0).unwrap().probs(), &[1.0, 0.0]);
        let mm = d.maximally_mixed();
        assert_eq!(outcome_distribution(a.measurement(), &mm).unwrap().probs(), &[0.5, 0.5]);
        let t = im("3:0");
        let w1 = t.theory().pure_state(Site::Index(1)).unwrap();
        let p = outcome_distribution(t.measurement(), &w1).unwrap();
        assert_abs_diff_eq!(p.probs()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.probs()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_examples() {
        assert_abs_diff_eq!(gamma(&im("3:0"), &im("3:1")).unwrap().gamma, 2.0, epsilon = 1e-12);
        let g = gamma(&im("inf:0"), &im(&format!("inf:{FRAC_PI_2}"))).unwrap();
        assert_abs_diff_eq!(g.gamma, 1.0 + FRAC_1_SQRT_2, epsilon = 1e-12);
        // n = 12: θ_i - θ_j = π/2 means i - j = 3
        let g = gamma(&im("12:4"), &im("12:1")).unwrap();
        assert_abs_diff_eq!(g.gamma, 1.732_050_807_568_877_3, epsilon = 1e-12);
    }

    #[test]
    fn gamma_rejects_mixed_theories() {
        assert!(matches!(gamma(&im("5:0"), &im("6:0")), Err(GptError::TheoryMismatch(_))));
    }

    #[test]
    fn table_examples() {
        let r2 = polygon::radius_sq(Order::Polygon(8));
        let v = table_entry(Order::Polygon(8), Site::Index(1), Site::Index(3), Site::Index(0), 0, 0).unwrap();
        assert_abs_diff_eq!(v, 1.0 + r2 * (3.0 * PI / 8.0).cos() * (-FRAC_PI_4).cos(), epsilon = 1e-12);
        for k in 0..5 {
            let t = |x, y| table_entry(Order::Polygon(5), Site::Index(0), Site::Index(2), Site::Index(k), x, y).unwrap();
            // complementary cells add to (a_0 + a_1 + b_0 + b_1)(ω) = 2
            assert_abs_diff_eq!(t(0, 0) + t(1, 1), 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t(0, 1) + t(1, 0), 2.0, epsilon = 1e-12);
        }
        assert!(table_entry(Order::Polygon(5), Site::Index(5), Site::Index(1), Site::Index(0), 0, 0).is_err());
        assert!(table_entry(Order::Polygon(5), Site::Index(0), Site::Index(1), Site::Index(0), 2, 0).is_err());
    }

    #[test]
    fn landau_pollak_examples() {
        let a = im("inf:0");
        let b = im(&format!("inf:{FRAC_PI_2}"));
        let r = landau_pollak_check(&a, &b, 1.0 + FRAC_1_SQRT_2, 10_000).unwrap();
        assert!(r.passed);
        assert_abs_diff_eq!(r.max_found, 1.0 + FRAC_1_SQRT_2, epsilon = 1e-12);
        let r = landau_pollak_check(&im("3:0"), &im("3:1"), 2.0, 0).unwrap();
        assert!(r.passed);
        assert_abs_diff_eq!(r.max_found, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_sum_examples() {
        let a = im("inf:0");
        let b = im(&format!("inf:{FRAC_PI_2}"));
        let d = a.theory().clone();
        let w0 = d.pure_state(Site::Angle(0.0)).unwrap();
        assert_abs_diff_eq!(entropy_sum(&a, &b, &w0, LogBase::Bits).unwrap(), 1.0, epsilon = 1e-12);
        let w = d.pure_state(Site::Angle(FRAC_PI_4)).unwrap();
        assert_abs_diff_eq!(
            entropy_sum(&a, &b, &w, LogBase::Bits).unwrap(),
            1.201_752_073_385_712,
            epsilon = 1e-12
        );
        let t0 = im("3:0");
        let w1 = t0.theory().pure_state(Site::Index(1)).unwrap();
        assert_abs_diff_eq!(entropy_sum(&t0, &im("3:1"), &w1, LogBase::Bits).unwrap(), 0.0, epsilon = 1e-9);
    }
}
