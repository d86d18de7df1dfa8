//! Convex-cone foundations of a generalized probabilistic theory.
//!
//! A [`Theory`] fixes a state space `Ω ⊂ R^3`, its unit effect and its
//! tolerance. States live in the primal cone `V_+` generated by `Ω`; effects
//! live in the dual cone `V_+^*` and are bounded above by `u`. All shipped
//! theories use the Euclidean inner product.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result, Violation};
use crate::polygon::{self, Address, Order, Site};
use crate::vector::VecV;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Hard cap on user-supplied finite theories; facet search is quadratic.
const MAX_FINITE_STATES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TheoryKind {
    Polygon(usize),
    Disc,
    /// User-supplied finite state space loaded from a JSON descriptor.
    Finite,
}

#[derive(Debug, Clone)]
pub struct Theory {
    kind: TheoryKind,
    /// Empty for the disc, whose pure states are parametric.
    pure_states: Vec<VecV>,
    /// Extreme rays of the dual cone, i.e. facet normals of the primal cone.
    dual_generators: Vec<VecV>,
    unit_effect: VecV,
    alpha: f64,
    tol: f64,
}

/// A vector checked to lie in `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State(VecV);

/// A vector checked to lie in the effect space `V_+^* ∩ (u - V_+^*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Effect(VecV);

impl State {
    pub fn vector(&self) -> VecV {
        self.0
    }
}

impl Effect {
    pub fn vector(&self) -> VecV {
        self.0
    }
}

/// Element of the symmetry group acting on the `(x, y)` plane.
///
/// The reflection `(x, y) -> (x, -y)` is applied before the rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Symmetry {
    /// Rotation by `2π·rotation/n`, for `Ω_n`.
    Dihedral { rotation: usize, reflect: bool },
    /// Rotation by an arbitrary angle, for the disc.
    Continuous { angle: f64, reflect: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SelfDuality {
    SelfDual,
    NotSelfDual { witness: VecV, reason: String },
}

impl SelfDuality {
    pub fn is_self_dual(&self) -> bool {
        matches!(self, SelfDuality::SelfDual)
    }
}

/// Result of [`Theory::validate_measurement`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural diagnostics for a theory, as printed by `gptlab validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub theory: String,
    pub pure_states: Option<usize>,
    pub alpha: f64,
    pub unit_effect: VecV,
    pub max_unit_residual: f64,
    pub max_norm_spread: f64,
    pub transitive: bool,
    pub self_dual: bool,
    pub witness: Option<VecV>,
    pub maximally_mixed: VecV,
    pub passed: bool,
}

#[derive(Deserialize)]
struct TheoryDescriptor {
    kind: String,
    pure_states: Vec<Vec<f64>>,
    #[serde(default)]
    tol: Option<f64>,
}

impl Theory {
    /// `Ω_n` or the disc with the default tolerance.
    pub fn for_order(order: Order) -> Result<Arc<Theory>> {
        Theory::for_order_with_tol(order, DEFAULT_TOL)
    }

    pub fn for_order_with_tol(order: Order, tol: f64) -> Result<Arc<Theory>> {
        check_tol(tol)?;
        match order.validate()? {
            Order::Polygon(n) => {
                let pure_states = (0..n)
                    .map(|i| polygon::pure_state_vec(Address::vertex(n, i).expect("i < n")))
                    .collect();
                let dual_generators = (0..n)
                    .map(|i| polygon::pure_effect_vec(Address::vertex(n, i).expect("i < n")))
                    .collect();
                Ok(Arc::new(Theory {
                    kind: TheoryKind::Polygon(n),
                    pure_states,
                    dual_generators,
                    unit_effect: VecV::new(0.0, 0.0, 1.0),
                    alpha: 1.0 + polygon::radius_sq(order),
                    tol,
                }))
            }
            Order::Disc => Ok(Arc::new(Theory {
                kind: TheoryKind::Disc,
                pure_states: Vec::new(),
                dual_generators: Vec::new(),
                unit_effect: VecV::new(0.0, 0.0, 1.0),
                alpha: 2.0,
                tol,
            })),
        }
    }

    pub fn polygon(n: usize) -> Result<Arc<Theory>> {
        Theory::for_order(Order::Polygon(n))
    }

    pub fn disc() -> Arc<Theory> {
        Theory::for_order(Order::Disc).expect("disc is always valid")
    }

    /// Finite theory from an explicit pure-state list. Runs every theory
    /// invariant and reports all violations at once.
    pub fn finite(pure_states: Vec<VecV>, tol: f64) -> Result<Arc<Theory>> {
        let mut violations = Vec::new();
        if !(tol.is_finite() && tol > 0.0) {
            violations.push(Violation::new("tol", None, tol));
            return Err(GptError::invalid("theory", violations));
        }
        let n = pure_states.len();
        if n < 3 {
            violations.push(Violation::new("min_states", None, n as f64));
            return Err(GptError::invalid("theory", violations));
        }
        if n > MAX_FINITE_STATES {
            violations.push(Violation::new("max_states", None, n as f64));
            return Err(GptError::invalid("theory", violations));
        }

        // u solves <u, ω> = 1 in the least-squares sense.
        let mut gram = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for w in &pure_states {
            for r in 0..3 {
                rhs[r] += w[r];
                for c in 0..3 {
                    gram[r][c] += w[r] * w[c];
                }
            }
        }
        let Some(u) = solve3(gram, rhs) else {
            violations.push(Violation::new("span", None, 0.0));
            return Err(GptError::invalid("theory", violations));
        };
        for (k, w) in pure_states.iter().enumerate() {
            let res = (u.dot(w) - 1.0).abs();
            if res > tol {
                violations.push(Violation::new("unit_effect", Some(k), res));
            }
        }

        let alpha = pure_states[0].norm_sq();
        for (k, w) in pure_states.iter().enumerate().skip(1) {
            let res = (w.norm_sq() - alpha).abs();
            if res > tol {
                violations.push(Violation::new("equal_norm", Some(k), res));
            }
        }
        for k in 1..n {
            for j in 0..k {
                let d = pure_states[k].max_abs_diff(&pure_states[j]);
                if d <= tol {
                    violations.push(Violation::new("duplicate_state", Some(k), d));
                }
            }
        }
        if !violations.is_empty() {
            return Err(GptError::invalid("theory", violations));
        }

        let order = cyclic_order(&pure_states, &u);
        let center = (1.0 / u.norm_sq()) * u;
        let dual_generators: Vec<VecV> = (0..n)
            .map(|j| {
                let a = pure_states[order[j]];
                let b = pure_states[order[(j + 1) % n]];
                let mut normal = a.cross(&b);
                if normal.dot(&center) < 0.0 {
                    normal = -normal;
                }
                let top = pure_states.iter().map(|w| normal.dot(w)).fold(f64::MIN, f64::max);
                (1.0 / top) * normal
            })
            .collect();
        for (j, g) in dual_generators.iter().enumerate() {
            let low = pure_states.iter().map(|w| g.dot(w)).fold(f64::MAX, f64::min);
            if low < -tol {
                violations.push(Violation::new("convex_position", Some(j), -low));
            }
        }
        if !violations.is_empty() {
            return Err(GptError::invalid("theory", violations));
        }

        let pure_states = order.iter().map(|&k| pure_states[k]).collect();
        Ok(Arc::new(Theory {
            kind: TheoryKind::Finite,
            pure_states,
            dual_generators,
            unit_effect: u,
            alpha,
            tol,
        }))
    }

    /// Loads `{"kind":"finite","pure_states":[[x,y,z],...],"tol":1e-9}`.
    pub fn from_json(text: &str) -> Result<Arc<Theory>> {
        let desc: TheoryDescriptor = serde_json::from_str(text)?;
        let mut violations = Vec::new();
        if desc.kind != "finite" {
            violations.push(Violation::new("kind", None, 0.0));
        }
        let mut states = Vec::with_capacity(desc.pure_states.len());
        for (k, s) in desc.pure_states.iter().enumerate() {
            match VecV::try_from_slice(s) {
                Ok(v) => states.push(v),
                Err(GptError::DimensionMismatch { got, .. }) => {
                    violations.push(Violation::new("dimension", Some(k), got as f64))
                }
                Err(_) => violations.push(Violation::new("non_finite", Some(k), f64::NAN)),
            }
        }
        if !violations.is_empty() {
            return Err(GptError::invalid("theory", violations));
        }
        Theory::finite(states, desc.tol.unwrap_or(DEFAULT_TOL))
    }

    pub fn kind(&self) -> &TheoryKind {
        &self.kind
    }

    pub fn order(&self) -> Option<Order> {
        match self.kind {
            TheoryKind::Polygon(n) => Some(Order::Polygon(n)),
            TheoryKind::Disc => Some(Order::Disc),
            TheoryKind::Finite => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            TheoryKind::Polygon(n) => format!("polygon({n})"),
            TheoryKind::Disc => "disc".to_string(),
            TheoryKind::Finite => format!("finite({})", self.pure_states.len()),
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Squared norm shared by all pure states.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pure_states(&self) -> &[VecV] {
        &self.pure_states
    }

    pub fn dual_generators(&self) -> &[VecV] {
        &self.dual_generators
    }

    pub fn unit_effect(&self) -> Effect {
        Effect(self.unit_effect)
    }

    /// Same state space, regardless of tolerance.
    pub fn same_space(&self, other: &Theory) -> bool {
        self.kind == other.kind
            && self.pure_states.len() == other.pure_states.len()
            && self
                .pure_states
                .iter()
                .zip(&other.pure_states)
                .all(|(a, b)| a.approx_eq(b, self.tol.max(other.tol)))
    }

    /// `min_ω <v, ω>` over pure states; the dual cone is `{v : slack >= 0}`.
    pub fn dual_cone_slack(&self, v: &VecV) -> f64 {
        match self.kind {
            TheoryKind::Disc => v.z() - v.planar_norm(),
            _ => self
                .pure_states
                .iter()
                .map(|w| v.dot(w))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `min_j <g_j, v>` over dual generators; the primal cone is `{v : slack >= 0}`.
    pub fn primal_cone_slack(&self, v: &VecV) -> f64 {
        match self.kind {
            TheoryKind::Disc => v.z() - v.planar_norm(),
            _ => self
                .dual_generators
                .iter()
                .map(|g| g.dot(v))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn dual_cone_contains(&self, v: &VecV) -> bool {
        self.dual_cone_slack(v) >= -self.tol
    }

    pub fn primal_cone_contains(&self, v: &VecV) -> bool {
        self.primal_cone_slack(v) >= -self.tol
    }

    pub fn is_effect(&self, v: &VecV) -> bool {
        self.dual_cone_contains(v) && self.dual_cone_contains(&(self.unit_effect - *v))
    }

    pub fn is_state(&self, v: &VecV) -> bool {
        self.primal_cone_contains(v) && (self.unit_effect.dot(v) - 1.0).abs() <= self.tol
    }

    pub fn effect(&self, v: VecV) -> Result<Effect> {
        let mut violations = Vec::new();
        let s = self.dual_cone_slack(&v);
        if s < -self.tol {
            violations.push(Violation::new("dual_cone", None, -s));
        }
        let s = self.dual_cone_slack(&(self.unit_effect - v));
        if s < -self.tol {
            violations.push(Violation::new("complement_dual_cone", None, -s));
        }
        if violations.is_empty() {
            Ok(Effect(v))
        } else {
            Err(GptError::invalid("effect", violations))
        }
    }

    pub fn state(&self, v: VecV) -> Result<State> {
        let mut violations = Vec::new();
        let s = self.primal_cone_slack(&v);
        if s < -self.tol {
            violations.push(Violation::new("primal_cone", None, -s));
        }
        let res = (self.unit_effect.dot(&v) - 1.0).abs();
        if res > self.tol {
            violations.push(Violation::new("normalization", None, res));
        }
        if violations.is_empty() {
            Ok(State(v))
        } else {
            Err(GptError::invalid("state", violations))
        }
    }

    /// Checks `Σ e_x = u`, every `e_x` an effect, no zero effect, at least two outcomes.
    pub fn validate_measurement(&self, effects: &[VecV]) -> ValidationReport {
        let mut violations = Vec::new();
        if effects.len() < 2 {
            violations.push(Violation::new("min_outcomes", None, effects.len() as f64));
        }
        for (x, e) in effects.iter().enumerate() {
            if e.norm() <= self.tol {
                violations.push(Violation::new("zero_effect", Some(x), e.norm()));
                continue;
            }
            let s = self.dual_cone_slack(e);
            if s < -self.tol {
                violations.push(Violation::new("dual_cone", Some(x), -s));
            }
            let s = self.dual_cone_slack(&(self.unit_effect - *e));
            if s < -self.tol {
                violations.push(Violation::new("complement_dual_cone", Some(x), -s));
            }
        }
        let total: VecV = effects.iter().copied().sum();
        let res = total.max_abs_diff(&self.unit_effect);
        if res > self.tol {
            violations.push(Violation::new("sum_to_unit", None, res));
        }
        ValidationReport { violations }
    }

    /// `e(ω)`, clamped into `[0, 1]` when within tolerance of it.
    pub fn prob(&self, e: &Effect, w: &State) -> Result<f64> {
        clamp_prob(e.0.dot(&w.0), self.tol)
    }

    /// The unique symmetry-invariant state.
    pub fn maximally_mixed(&self) -> State {
        match self.kind {
            TheoryKind::Finite => {
                let sum: VecV = self.pure_states.iter().copied().sum();
                State((1.0 / self.unit_effect.dot(&sum)) * sum)
            }
            _ => State(VecV::new(0.0, 0.0, 1.0)),
        }
    }

    pub fn apply_symmetry(&self, g: Symmetry, v: &VecV) -> Result<VecV> {
        let (angle, reflect) = match (&self.kind, g) {
            (TheoryKind::Polygon(n), Symmetry::Dihedral { rotation, reflect }) => {
                if rotation >= *n {
                    return Err(GptError::InvalidGroupElement(format!(
                        "rotation {rotation} for n = {n}"
                    )));
                }
                (TAU * rotation as f64 / *n as f64, reflect)
            }
            (TheoryKind::Disc, Symmetry::Continuous { angle, reflect }) if angle.is_finite() => {
                (angle, reflect)
            }
            (k, g) => {
                return Err(GptError::InvalidGroupElement(format!("{g:?} on {k:?}")));
            }
        };
        let (x, y) = if reflect { (v.x(), -v.y()) } else { (v.x(), v.y()) };
        let (s, c) = angle.sin_cos();
        Ok(VecV::new(c * x - s * y, s * x + c * y, v.z()))
    }

    /// Whether the symmetry group acts transitively on pure states.
    ///
    /// Polygons: the rotation by `k` steps maps vertex 0 onto vertex `k`.
    /// Finite theories: for every vertex some linear map realising a
    /// combinatorial symmetry of the cyclic vertex order sends vertex 0 there.
    pub fn is_transitive(&self) -> bool {
        match self.kind {
            TheoryKind::Disc => true,
            TheoryKind::Polygon(n) => {
                let w0 = self.pure_states[0];
                (0..n).all(|k| {
                    self.apply_symmetry(
                        Symmetry::Dihedral {
                            rotation: k,
                            reflect: false,
                        },
                        &w0,
                    )
                    .map(|w| w.approx_eq(&self.pure_states[k], self.tol))
                    .unwrap_or(false)
                })
            }
            TheoryKind::Finite => {
                let n = self.pure_states.len();
                let ps = &self.pure_states;
                let src = [ps[0], ps[1], ps[2]];
                (0..n).all(|k| {
                    [1isize, -1].iter().any(|&step| {
                        let idx = |j: usize| (k as isize + step * j as isize).rem_euclid(n as isize) as usize;
                        let Some(t) = linear_map(src, [ps[idx(0)], ps[idx(1)], ps[idx(2)]]) else {
                            return false;
                        };
                        (0..n).all(|j| apply3(&t, &ps[j]).approx_eq(&ps[idx(j)], self.tol.sqrt()))
                    })
                })
            }
        }
    }

    /// Self-duality of `V_+` under the Euclidean inner product.
    pub fn check_self_duality(&self) -> SelfDuality {
        if self.kind == TheoryKind::Disc {
            return SelfDuality::SelfDual;
        }
        for w in &self.pure_states {
            let s = self.dual_cone_slack(w);
            if s < -self.tol {
                return SelfDuality::NotSelfDual {
                    witness: *w,
                    reason: format!("pure state outside the dual cone (slack {s:.3e})"),
                };
            }
        }
        for g in &self.dual_generators {
            let ray = (1.0 / self.unit_effect.dot(g)) * *g;
            if !self.pure_states.iter().any(|w| w.approx_eq(&ray, self.tol.sqrt())) {
                return SelfDuality::NotSelfDual {
                    witness: *g,
                    reason: "dual extreme ray not generated by a pure state".to_string(),
                };
            }
        }
        SelfDuality::SelfDual
    }

    pub fn report(&self) -> TheoryReport {
        let max_unit_residual = self
            .pure_states
            .iter()
            .map(|w| (self.unit_effect.dot(w) - 1.0).abs())
            .fold(0.0, f64::max);
        let max_norm_spread = self
            .pure_states
            .iter()
            .map(|w| (w.norm_sq() - self.alpha).abs())
            .fold(0.0, f64::max);
        let transitive = self.is_transitive();
        let sd = self.check_self_duality();
        let witness = match &sd {
            SelfDuality::NotSelfDual { witness, .. } => Some(*witness),
            SelfDuality::SelfDual => None,
        };
        let passed = max_unit_residual <= self.tol && max_norm_spread <= self.tol && transitive;
        TheoryReport {
            theory: self.name(),
            pure_states: (self.kind != TheoryKind::Disc).then_some(self.pure_states.len()),
            alpha: self.alpha,
            unit_effect: self.unit_effect,
            max_unit_residual,
            max_norm_spread,
            transitive,
            self_dual: sd.is_self_dual(),
            witness,
            maximally_mixed: self.maximally_mixed().vector(),
            passed,
        }
    }

    /// Pure state on this theory addressed by `site`.
    pub fn pure_state(&self, site: Site) -> Result<State> {
        match (&self.kind, site) {
            (TheoryKind::Finite, Site::Index(i)) => self
                .pure_states
                .get(i)
                .map(|w| State(*w))
                .ok_or_else(|| GptError::IndexOutOfRange(format!("{i}"))),
            (TheoryKind::Finite, s) => Err(GptError::IndexOutOfRange(format!("{s:?}"))),
            _ => {
                let order = self.order().expect("polygon or disc");
                let site = match site {
                    Site::Angle(t) if t.is_finite() => Site::Angle(polygon::reduce_angle(t)),
                    s => s,
                };
                Ok(State(polygon::pure_state_vec(Address::new(order, site)?)))
            }
        }
    }
}

/// Clamps a probability into `[0, 1]` if it is within `tol` of the interval.
pub fn clamp_prob(p: f64, tol: f64) -> Result<f64> {
    if (-tol..=1.0 + tol).contains(&p) {
        Ok(p.clamp(0.0, 1.0))
    } else {
        Err(GptError::ProbabilityOutOfRange(p))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(GptError::invalid("theory", vec![Violation::new("tol", None, tol)]))
    }
}

/// A validated finite-outcome measurement `{e_x}` with `Σ e_x = u`.
#[derive(Debug, Clone)]
pub struct Measurement {
    theory: Arc<Theory>,
    effects: Vec<VecV>,
    labels: Vec<String>,
}

impl Measurement {
    pub fn new(theory: &Arc<Theory>, effects: Vec<VecV>) -> Result<Self> {
        let labels = (0..effects.len()).map(|x| x.to_string()).collect();
        Measurement::with_labels(theory, effects, labels)
    }

    pub fn with_labels(theory: &Arc<Theory>, effects: Vec<VecV>, labels: Vec<String>) -> Result<Self> {
        let report = theory.validate_measurement(&effects);
        if !report.passed() {
            return Err(GptError::invalid("measurement", report.violations));
        }
        if labels.len() != effects.len() {
            return Err(GptError::DimensionMismatch {
                expected: effects.len(),
                got: labels.len(),
            });
        }
        Ok(Measurement {
            theory: Arc::clone(theory),
            effects,
            labels,
        })
    }

    /// The trivial measurement `{q_x u}` for a distribution `q`.
    pub fn trivial(theory: &Arc<Theory>, weights: &[f64]) -> Result<Self> {
        let u = theory.unit_effect().vector();
        Measurement::new(theory, weights.iter().map(|&q| q * u).collect())
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }

    pub fn effects(&self) -> &[VecV] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Indices of `points` sorted by angle around the plane `<u, x> = 1`.
fn cyclic_order(points: &[VecV], u: &VecV) -> Vec<usize> {
    let center = (1.0 / u.norm_sq()) * *u;
    let b1 = points[0] - center;
    let b1 = (1.0 / b1.norm()) * b1;
    let un = (1.0 / u.norm()) * *u;
    let b2 = un.cross(&b1);
    let mut idx: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = *p - center;
            (d.dot(&b2).atan2(d.dot(&b1)).rem_euclid(TAU), k)
        })
        .collect();
    idx.sort_by(|a, b| a.0.total_cmp(&b.0));
    idx.into_iter().map(|(_, k)| k).collect()
}

pub(crate) type Mat3 = [[f64; 3]; 3];

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn solve3(m: Mat3, b: [f64; 3]) -> Option<VecV> {
    let d = det3(&m);
    let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if d.abs() <= 1e-12 * scale * scale * scale {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *slot = det3(&mc) / d;
    }
    Some(VecV::new(out[0], out[1], out[2]))
}

/// Linear `T` with `T src_k = dst_k`, as row vectors.
fn linear_map(src: [VecV; 3], dst: [VecV; 3]) -> Option<[VecV; 3]> {
    // Row r of T solves src_k · t_r = dst_k[r] for k = 0..3.
    let m: Mat3 = [src[0].as_array(), src[1].as_array(), src[2].as_array()];
    let mut rows = [VecV::ZERO; 3];
    for (r, row) in rows.iter_mut().enumerate() {
        *row = solve3(m, [dst[0][r], dst[1][r], dst[2][r]])?;
    }
    Some(rows)
}

fn apply3(t: &[VecV; 3], v: &VecV) -> VecV {
    VecV::new(t[0].dot(v), t[1].dot(v), t[2].dot(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_effect_is_height() {
        for n in [3, 8] {
            let t = Theory::polygon(n).unwrap();
            assert_eq!(t.unit_effect().vector(), VecV::new(0.0, 0.0, 1.0));
            for w in t.pure_states() {
                assert_abs_diff_eq!(t.unit_effect().vector().dot(w), 1.0, epsilon = 1e-12);
            }
        }
        assert_eq!(Theory::disc().unit_effect().vector(), VecV::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn square_vertex_norm() {
        let t = Theory::polygon(4).unwrap();
        let w = t.pure_states()[0];
        assert_abs_diff_eq!(w.norm_sq(), 1.0 + 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.alpha(), 2.414_213_562_373_095, epsilon = 1e-12);
    }

    #[test]
    fn disc_cone_examples() {
        let d = Theory::disc();
        assert!(!d.dual_cone_contains(&VecV::new(0.6, 0.0, 0.5)));
        assert!(d.dual_cone_contains(&VecV::new(0.3, 0.4, 0.5)));
        assert!(d.primal_cone_contains(&VecV::new(0.0, 0.0, 1.0)));
        assert!(d.is_effect(&VecV::new(0.0, 0.0, 0.5)));
        assert!(!d.is_effect(&VecV::new(0.0, 0.0, 1.5)));
    }

    #[test]
    fn polygon_cone_examples() {
        let p5 = Theory::polygon(5).unwrap();
        assert!(p5.dual_cone_contains(&p5.unit_effect().vector()));
        let p4 = Theory::polygon(4).unwrap();
        assert!(p4.primal_cone_contains(&p4.pure_states()[2]));
        let r = 2f64.powf(0.25);
        assert!(!p4.primal_cone_contains(&VecV::new(r, r, 1.0)));
    }

    #[test]
    fn measurement_validation() {
        let p5 = Theory::polygon(5).unwrap();
        let e = p5.dual_generators()[0];
        let u = p5.unit_effect().vector();
        assert!(p5.validate_measurement(&[e, u - e]).passed());
        let bad = p5.validate_measurement(&[e, u]);
        assert!(bad.violations.iter().any(|v| v.constraint == "sum_to_unit"));
        let zero = p5.validate_measurement(&[VecV::ZERO, u]);
        assert!(zero.violations.iter().any(|v| v.constraint == "zero_effect"));
        assert!(Measurement::new(&p5, vec![u]).is_err());
    }

    #[test]
    fn probabilities() {
        let d = Theory::disc();
        let e0 = d.effect(VecV::new(0.5, 0.0, 0.5)).unwrap();
        let w0 = d.pure_state(Site::Angle(0.0)).unwrap();
        let wpi = d.pure_state(Site::Angle(PI)).unwrap();
        assert_abs_diff_eq!(d.prob(&e0, &w0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(&e0, &wpi).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(d.prob(&d.unit_effect(), &d.maximally_mixed()).unwrap(), 1.0);
        assert!(clamp_prob(1.0 + 1e-6, 1e-9).is_err());
        assert_eq!(clamp_prob(-1e-12, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn barycenter_is_maximally_mixed() {
        for n in [3, 6] {
            let t = Theory::polygon(n).unwrap();
            let sum: VecV = t.pure_states().iter().copied().sum();
            let bary = (1.0 / n as f64) * sum;
            assert!(bary.approx_eq(&t.maximally_mixed().vector(), 1e-12));
        }
    }

    #[test]
    fn dihedral_examples() {
        let t = Theory::polygon(4).unwrap();
        let ps = t.pure_states();
        let rot = Symmetry::Dihedral {
            rotation: 1,
            reflect: false,
        };
        assert!(t.apply_symmetry(rot, &ps[0]).unwrap().approx_eq(&ps[1], 1e-12));
        let refl = Symmetry::Dihedral {
            rotation: 0,
            reflect: true,
        };
        assert!(t.apply_symmetry(refl, &ps[1]).unwrap().approx_eq(&ps[3], 1e-12));
        assert!(t
            .apply_symmetry(
                Symmetry::Dihedral {
                    rotation: 4,
                    reflect: false
                },
                &ps[0]
            )
            .is_err());
        let d = Theory::disc();
        let w = d
            .apply_symmetry(
                Symmetry::Continuous {
                    angle: PI,
                    reflect: false,
                },
                &VecV::new(1.0, 0.0, 1.0),
            )
            .unwrap();
        assert!(w.approx_eq(&VecV::new(-1.0, 0.0, 1.0), 1e-12));
        assert!(d.apply_symmetry(rot, &w).is_err());
    }

    #[test]
    fn self_duality_by_parity() {
        assert!(Theory::polygon(5).unwrap().check_self_duality().is_self_dual());
        assert!(!Theory::polygon(4).unwrap().check_self_duality().is_self_dual());
        assert!(Theory::disc().check_self_duality().is_self_dual());
    }

    #[test]
    fn finite_theory_from_json() {
        let t5 = Theory::polygon(5).unwrap();
        let states: Vec<[f64; 3]> = t5.pure_states().iter().rev().map(|w| w.as_array()).collect();
        let json = serde_json::json!({"kind": "finite", "pure_states": states, "tol": 1e-9}).to_string();
        let t = Theory::from_json(&json).unwrap();
        assert_eq!(*t.kind(), TheoryKind::Finite);
        assert!(t.unit_effect().vector().approx_eq(&VecV::new(0.0, 0.0, 1.0), 1e-9));
        assert!(t.is_transitive());
        assert!(t.check_self_duality().is_self_dual());
        for g in t.dual_generators() {
            assert!(t5.dual_generators().iter().any(|h| h.approx_eq(g, 1e-9)));
        }
    }

    #[test]
    fn finite_theory_violations_are_listed() {
        let json = r#"{"kind":"finite","pure_states":[[1,0,1],[0,1,1],[-1,0,2],[0,-1]],"tol":1e-9}"#;
        let err = Theory::from_json(json).unwrap_err();
        assert_eq!(err.violations().len(), 1);
        assert_eq!(err.violations()[0].constraint, "dimension");
        assert_eq!(err.violations()[0].index, Some(3));

        // a rectangle: common plane, unequal edge lengths but equal norms
        let json = r#"{"kind":"finite","pure_states":[[1,0,1],[0,1,1],[-1,0,1],[0,-1,1],[0.6,0.6,1]]}"#;
        let err = Theory::from_json(json).unwrap_err();
        assert!(err.violations().iter().any(|v| v.constraint == "equal_norm" && v.index == Some(4)));
    }

    #[test]
    fn irregular_finite_theory_is_not_transitive() {
        let a = 0.3f64;
        let states = vec![
            VecV::new(1.0, 0.0, 1.0),
            VecV::new(a.cos(), a.sin(), 1.0),
            VecV::new(-1.0, 0.0, 1.0),
            VecV::new(0.0, -1.0, 1.0),
        ];
        let t = Theory::finite(states, 1e-9).unwrap();
        assert!(!t.is_transitive());
    }
}
