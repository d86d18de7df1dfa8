//! Dense phase-one simplex for small feasibility problems `A x <= b`, `x` free.
//!
//! Free variables are split as `x = p - q`. Rows with `b_i >= 0` start with
//! their slack basic; the others get an artificial variable, and phase one
//! minimises the sum of artificials. Bland's rule keeps degenerate problems
//! (the polygon constraints are highly symmetric) from cycling.

const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Point minimising the artificial sum; feasible when `residual` is ~0.
    pub x: Vec<f64>,
    /// Optimal phase-one objective.
    pub residual: f64,
    pub iterations: usize,
}

impl PhaseOne {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

struct Tableau {
    width: usize,
    rows: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] *= inv;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        // row `rows` is the objective
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[pr] = pc;
    }
}

/// Minimises total violation of `a x <= b` over free `x`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    assert_eq!(a.len(), b.len(), "one bound per constraint row");
    let m = a.len();
    let d = a.first().map_or(0, Vec::len);
    let art_rows: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let n_struct = 2 * d;
    let slack0 = n_struct;
    let art0 = slack0 + m;
    let ncols = art0 + art_rows.len();
    let width = ncols + 1;
    let rhs = ncols;

    let mut t = Tableau {
        width,
        rows: m,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
    };
    let mut art_of_row = vec![None; m];
    for (k, &i) in art_rows.iter().enumerate() {
        art_of_row[i] = Some(art0 + k);
    }
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t.data[i * width..(i + 1) * width];
        for j in 0..d {
            row[j] = sign * a[i][j];
            row[d + j] = -sign * a[i][j];
        }
        row[slack0 + i] = sign;
        row[rhs] = sign * b[i];
        match art_of_row[i] {
            Some(c) => {
                row[c] = 1.0;
                t.basis[i] = c;
            }
            None => t.basis[i] = slack0 + i,
        }
    }
    // reduced costs of Σ artificials, priced out against the artificial basis
    let obj = m * width;
    for &i in &art_rows {
        for c in 0..art0 {
            t.data[obj + c] -= t.data[i * width + c];
        }
        t.data[obj + rhs] -= t.data[i * width + rhs];
    }

    let mut iterations = 0;
    while let Some(pc) = (0..art0).find(|&c| t.at(m, c) < -PIVOT_EPS) {
        let mut best: Option<(f64, usize, usize)> = None;
        for r in 0..m {
            let coef = t.at(r, pc);
            if coef > PIVOT_EPS {
                let ratio = t.at(r, rhs) / coef;
                let better = match best {
                    None => true,
                    Some((br, _, bb)) => ratio < br - 1e-14 || (ratio <= br + 1e-14 && t.basis[r] < bb),
                };
                if better {
                    best = Some((ratio, r, t.basis[r]));
                }
            }
        }
        let Some((_, pr, _)) = best else {
            // cannot happen in phase one: the objective is bounded below by 0
            break;
        };
        t.pivot(pr, pc);
        iterations += 1;
    }

    let mut vals = vec![0.0; ncols];
    for r in 0..m {
        vals[t.basis[r]] = t.at(r, rhs);
    }
    let x = (0..d).map(|j| vals[j] - vals[d + j]).collect();
    let residual = vals[art0..].iter().sum::<f64>().max(0.0);
    PhaseOne {
        x,
        residual,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_violation(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(r, &bi)| r.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi)
            .fold(0.0, f64::max)
    }

    #[test]
    fn box_is_feasible() {
        // 1 <= x <= 2, -3 <= y <= -1
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let b = vec![2.0, -1.0, -1.0, 3.0];
        let r = phase_one(&a, &b);
        assert!(r.is_feasible(1e-12));
        assert!(max_violation(&a, &b, &r.x) <= 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        // x <= 1 and x >= 2
        let a = vec![vec![1.0], vec![-1.0]];
        let b = vec![1.0, -2.0];
        let r = phase_one(&a, &b);
        assert!((r.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_point() {
        // x + y <= 0, x - y <= 0, -x <= 0 pins x = 0 and y = 0 from several sides
        let a = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let b = vec![0.0; 5];
        let r = phase_one(&a, &b);
        assert!(r.is_feasible(1e-12));
        assert!(r.x.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn empty_problem() {
        let r = phase_one(&[], &[]);
        assert!(r.x.is_empty() && r.residual == 0.0);
    }
}
