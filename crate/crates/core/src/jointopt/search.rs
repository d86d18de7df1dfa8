//! Multi-start penalised Nelder–Mead search over approximate joint measurements.
//!
//! The noise sum is concave in the cells (conditional entropy is jointly
//! concave in the joint distribution), so its minimum over the feasible set is
//! attained at an extreme point. The search is therefore seeded by enumerating
//! the extreme points spanned by a finite set of cone generators: exact for
//! polygons with at most [`VERTEX_GENERATORS`] pure effects, an inner
//! approximation otherwise.
//!
//! The free parameters are the cells `m₀₀, m₀₁, m₁₀` (nine reals); the last
//! cell is `u` minus their sum. Iterates outside the cone pay a penalty
//! proportional to their summed constraint violations; the weight doubles
//! whenever a round ends infeasible or without progress. Each restart's final
//! point is pulled back into the feasible set along the segment towards the
//! all-equal grid `u/4`, and only validated grids are ever compared.

use serde::{Deserialize, Serialize};

use super::{
    corner_lp, grid_from_corner, lp_generators, random_feasible_joint, reference_grids, JointMeasurement,
};
use crate::error::{GptError, Result};
use crate::noise::noise_of_effects;
use crate::polygon::IdealMeasurement;
use crate::theory::{solve3, Theory, TheoryKind};
use crate::uncertainty::{check_same_theory, gamma, pur_bound, LogBase};
use crate::vector::VecV;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerResult {
    pub best: JointMeasurement,
    pub noise_sum: f64,
    /// `Γ = -2 log(γ/2)` for the pair.
    pub bound: f64,
    pub gap: f64,
    pub restarts: usize,
    pub seed: u64,
    /// `(iteration, best validated noise sum so far)` after each restart.
    pub trace: Vec<(usize, f64)>,
    /// Best noise sum over the enumerated extreme points.
    pub extreme_point_noise_sum: Option<f64>,
    /// Validated noise sum reached by each restart, `None` if it was discarded.
    pub per_restart: Vec<Option<f64>>,
    /// `gap >= -tol`.
    pub bound_respected: bool,
}

/// Most cone generators used by the extreme-point stage.
pub const VERTEX_GENERATORS: usize = 32;

const INITIAL_PENALTY: f64 = 10.0;
const ROUNDS: usize = 8;

struct Problem<'a> {
    a: &'a IdealMeasurement,
    b: &'a IdealMeasurement,
    theory: &'a Theory,
    u: VecV,
    base: LogBase,
}

fn unpack(p: &[f64; 9]) -> [VecV; 3] {
    [
        VecV::new(p[0], p[1], p[2]),
        VecV::new(p[3], p[4], p[5]),
        VecV::new(p[6], p[7], p[8]),
    ]
}

fn pack(cells: &[Vec<VecV>]) -> [f64; 9] {
    let mut p = [0.0; 9];
    for (k, c) in [cells[0][0], cells[0][1], cells[1][0]].iter().enumerate() {
        p[3 * k..3 * k + 3].copy_from_slice(&c.as_array());
    }
    p
}

impl Problem<'_> {
    fn cells(&self, p: &[f64; 9]) -> Vec<Vec<VecV>> {
        let [m00, m01, m10] = unpack(p);
        vec![vec![m00, m01], vec![m10, self.u - m00 - m01 - m10]]
    }

    fn violation(&self, cells: &[Vec<VecV>]) -> f64 {
        cells
            .iter()
            .flatten()
            .map(|c| match self.theory.kind() {
                TheoryKind::Disc => (c.planar_norm() - c.z()).max(0.0),
                _ => self
                    .theory
                    .pure_states()
                    .iter()
                    .map(|w| (-c.dot(w)).max(0.0))
                    .sum(),
            })
            .sum()
    }

    fn noise(&self, cells: &[Vec<VecV>]) -> f64 {
        let rows = vec![cells[0][0] + cells[0][1], cells[1][0] + cells[1][1]];
        let cols = vec![cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]];
        noise_of_effects(self.a, &rows, self.base) + noise_of_effects(self.b, &cols, self.base)
    }

    fn objective(&self, p: &[f64; 9], weight: f64) -> f64 {
        let cells = self.cells(p);
        self.noise(&cells) + weight * self.violation(&cells)
    }

    /// Mixes `cells` with the all-equal grid just enough to clear every
    /// cone violation. Returns `None` if the required mixing weight is 1.
    fn repair(&self, cells: &[Vec<VecV>]) -> Option<Vec<Vec<VecV>>> {
        let quarter = 0.25 * self.u;
        let mut lambda: f64 = 0.0;
        for c in cells.iter().flatten() {
            let s = self.theory.dual_cone_slack(c);
            if s < 0.0 {
                // slack of u/4 is 1/4 for every shipped theory
                let floor = self.theory.dual_cone_slack(&quarter);
                lambda = lambda.max(-s / (floor - s));
            }
        }
        if lambda >= 1.0 {
            return None;
        }
        Some(
            cells
                .iter()
                .map(|r| r.iter().map(|c| (1.0 - lambda) * *c + lambda * quarter).collect())
                .collect(),
        )
    }
}

/// Generators for the extreme-point stage: the dual-cone generators (evenly
/// thinned to [`VERTEX_GENERATORS`]) or, on the disc, effects at multiples of
/// `2π/VERTEX_GENERATORS` from `A`'s angle; plus both ideal measurements' effects.
fn vertex_generators(prob: &Problem<'_>) -> Vec<VecV> {
    let mut gens: Vec<VecV> = match prob.theory.kind() {
        TheoryKind::Disc => (0..VERTEX_GENERATORS)
            .map(|k| {
                let t = prob.a.source_angle() + std::f64::consts::TAU * k as f64 / VERTEX_GENERATORS as f64;
                VecV::polar(0.5, t, 0.5)
            })
            .collect(),
        _ => {
            let all = prob.theory.dual_generators();
            if all.len() <= VERTEX_GENERATORS {
                all.to_vec()
            } else {
                (0..VERTEX_GENERATORS)
                    .map(|k| all[k * all.len() / VERTEX_GENERATORS])
                    .collect()
            }
        }
    };
    for e in prob.a.effects().iter().chain(prob.b.effects()) {
        if !gens.iter().any(|g| g.approx_eq(e, 1e-12)) {
            gens.push(*e);
        }
    }
    gens
}

/// Minimum noise sum over grids `Σ_t λ_t g_t = u` with three generators,
/// each term placed in one of the four cells.
fn vertex_search(prob: &Problem<'_>) -> Option<(f64, Vec<Vec<VecV>>)> {
    let g = vertex_generators(prob);
    let n = g.len();
    let u = prob.u.as_array();
    let mut best: Option<(f64, Vec<Vec<VecV>>)> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let cols = [g[i], g[j], g[k]];
                let m = [0, 1, 2].map(|r| cols.map(|c| c.as_array()[r]));
                let Some(l) = solve3(m, u) else { continue };
                let l = l.as_array();
                if l.iter().any(|&v| v < -1e-12) {
                    continue;
                }
                let parts = [0, 1, 2].map(|t| l[t].max(0.0) * cols[t]);
                for assign in 0..64usize {
                    let mut cells = vec![vec![VecV::ZERO; 2]; 2];
                    for (t, p) in parts.iter().enumerate() {
                        let c = (assign >> (2 * t)) & 3;
                        cells[c / 2][c % 2] += *p;
                    }
                    let v = prob.noise(&cells);
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, cells));
                    }
                }
            }
        }
    }
    best
}

/// Minimal Nelder–Mead on `R^9`. Returns the best vertex and its value.
fn nelder_mead(
    f: &dyn Fn(&[f64; 9]) -> f64,
    start: [f64; 9],
    step: f64,
    max_iters: usize,
) -> ([f64; 9], f64, usize) {
    const N: usize = 9;
    let mut simplex: Vec<([f64; 9], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for k in 0..N {
        let mut p = start;
        p[k] += step;
        simplex.push((p, f(&p)));
    }
    let mut iters = 0;
    while iters < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[N].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() < 1e-15 && size < 1e-12 {
            break;
        }
        iters += 1;
        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let worst = simplex[N];
        let along = |t: f64| {
            let mut q = [0.0; N];
            for k in 0..N {
                q[k] = centroid[k] + t * (worst.0[k] - centroid[k]);
            }
            q
        };
        let r = along(-1.0);
        let fr = f(&r);
        if fr < simplex[0].1 {
            let e = along(-2.0);
            let fe = f(&e);
            simplex[N] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (r, fr);
        } else {
            let (c, fc) = if fr < worst.1 {
                let c = along(-0.5);
                (c, f(&c))
            } else {
                let c = along(0.5);
                (c, f(&c))
            };
            if fc < worst.1.min(fr) {
                simplex[N] = (c, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.0.iter_mut().zip(best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1, iters)
}

/// Starting grid for restart `r`.
fn start_grid(prob: &Problem<'_>, r: usize, seed: u64, vertex: Option<&Vec<Vec<VecV>>>) -> Result<Vec<Vec<VecV>>> {
    let (a, b) = (prob.a, prob.b);
    match r {
        0 if vertex.is_some() => Ok(vertex.expect("checked").clone()),
        0 => {
            // least-violating grid with the ideal marginals
            let (gens, _) = lp_generators(prob.theory);
            let lp = corner_lp(&gens, prob.u, a.effect(0), b.effect(0));
            let corner = VecV::new(lp.x[0], lp.x[1], lp.x[2]);
            let cells = grid_from_corner(prob.u, a.effect(0), b.effect(0), corner);
            prob.repair(&cells).ok_or(GptError::NoFeasibleCandidate)
        }
        1..=3 => {
            let [a_sharp, b_sharp, equal, _] = reference_grids(a, b, a);
            Ok([a_sharp, b_sharp, equal][r - 1].clone())
        }
        _ => Ok(random_feasible_joint(a, b, seed.wrapping_add(r as u64))?.cells().to_vec()),
    }
}

/// Validated grid from a search end point, or `None` if it cannot be made feasible.
fn polish(prob: &Problem<'_>, cells: &[Vec<VecV>], tol: f64) -> Option<JointMeasurement> {
    let theory_ref = prob.a.theory();
    if let Some(fixed) = prob.repair(cells) {
        if let Ok(m) = JointMeasurement::new(theory_ref, fixed) {
            return Some(m);
        }
    }
    // re-solve the cell split at the candidate's marginals
    if *prob.theory.kind() == TheoryKind::Disc {
        return None;
    }
    let alpha = cells[0][0] + cells[0][1];
    let beta = cells[0][0] + cells[1][0];
    let lp = corner_lp(prob.theory.pure_states(), prob.u, alpha, beta);
    if !lp.is_feasible(tol) {
        return None;
    }
    let corner = VecV::new(lp.x[0], lp.x[1], lp.x[2]);
    JointMeasurement::new(theory_ref, grid_from_corner(prob.u, alpha, beta, corner)).ok()
}

/// Minimises `N(M^A; A) + N(M^B; B)` over joint measurements of the pair.
pub fn optimize_noise(
    a: &IdealMeasurement,
    b: &IdealMeasurement,
    config: &OptimizerConfig,
    base: LogBase,
) -> Result<OptimizerResult> {
    check_same_theory(a, b)?;
    let theory = a.theory();
    let prob = Problem {
        a,
        b,
        theory,
        u: theory.unit_effect().vector(),
        base,
    };
    let bound = pur_bound(gamma(a, b)?.gamma, base)?;
    let chunk = (config.max_iters / ROUNDS).max(1);
    let vertex = vertex_search(&prob).filter(|(_, c)| JointMeasurement::new(theory, c.clone()).is_ok());

    let mut best: Option<(f64, JointMeasurement)> = None;
    let mut trace = Vec::new();
    let mut per_restart = Vec::with_capacity(config.restarts);
    let mut total_iters = 0usize;

    for r in 0..config.restarts.max(1) {
        let start = start_grid(&prob, r, config.seed, vertex.as_ref().map(|(_, c)| c))?;
        let mut incumbent: Option<(f64, JointMeasurement)> =
            JointMeasurement::new(theory, start.clone()).ok().map(|m| (prob.noise(m.cells()), m));
        let mut point = pack(&start);
        let mut weight = INITIAL_PENALTY;
        let mut step = 0.05;
        let mut used = 0;
        let mut last = f64::INFINITY;
        while used < config.max_iters {
            let f = |p: &[f64; 9]| prob.objective(p, weight);
            let (p, val, it) = nelder_mead(&f, point, step, chunk.min(config.max_iters - used));
            used += it.max(1);
            point = p;
            let cells = prob.cells(&point);
            let infeasible = prob.violation(&cells) > config.tol;
            if infeasible || val >= last - 1e-12 {
                weight *= 2.0;
            }
            last = val;
            step = (step * 0.5).max(1e-4);
            if let Some(m) = polish(&prob, &cells, config.tol) {
                let ns = prob.noise(m.cells());
                if incumbent.as_ref().is_none_or(|(v, _)| ns < *v) {
                    incumbent = Some((ns, m));
                }
            }
        }
        total_iters += used;
        per_restart.push(incumbent.as_ref().map(|(v, _)| *v));
        if let Some((v, m)) = incumbent {
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, m));
            }
        }
        if let Some((v, _)) = &best {
            trace.push((total_iters, *v));
        }
    }

    let (noise_sum, best) = best.ok_or(GptError::NoFeasibleCandidate)?;
    let gap = noise_sum - bound;
    Ok(OptimizerResult {
        best,
        noise_sum,
        bound,
        gap,
        restarts: config.restarts.max(1),
        seed: config.seed,
        trace,
        extreme_point_noise_sum: vertex.map(|(v, _)| v),
        per_restart,
        bound_respected: gap >= -config.tol,
    })
}
