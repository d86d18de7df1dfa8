//! Vectors in the ambient space `V = R^3`.
//!
//! The first two coordinates span the plane of the polygon, the third is the
//! height paired with the unit effect `u = (0, 0, 1)`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};

pub const DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "Vec<f64>")]
pub struct VecV([f64; DIM]);

impl VecV {
    pub const ZERO: VecV = VecV([0.0, 0.0, 0.0]);

    /// Builds a vector from closed-form coordinates. Non-finite input is a
    /// programming error; use [`VecV::try_new`] for external data.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite() && z.is_finite());
        VecV([x, y, z])
    }

    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(VecV([x, y, z]))
        } else {
            Err(GptError::NonFinite)
        }
    }

    pub fn try_from_slice(s: &[f64]) -> Result<Self> {
        if s.len() != DIM {
            return Err(GptError::DimensionMismatch {
                expected: DIM,
                got: s.len(),
            });
        }
        Self::try_new(s[0], s[1], s[2])
    }

    /// `(cos θ, sin θ, 0)` scaled by `radius`, lifted to height `z`.
    pub fn polar(radius: f64, angle: f64, z: f64) -> Self {
        VecV::new(radius * angle.cos(), radius * angle.sin(), z)
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn as_array(&self) -> [f64; DIM] {
        self.0
    }

    pub fn dot(&self, other: &VecV) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Length of the in-plane part `(x, y)`.
    pub fn planar_norm(&self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    pub fn cross(&self, o: &VecV) -> VecV {
        VecV([
            self.0[1] * o.0[2] - self.0[2] * o.0[1],
            self.0[2] * o.0[0] - self.0[0] * o.0[2],
            self.0[0] * o.0[1] - self.0[1] * o.0[0],
        ])
    }

    pub fn max_abs_diff(&self, o: &VecV) -> f64 {
        (0..DIM)
            .map(|k| (self.0[k] - o.0[k]).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, o: &VecV, tol: f64) -> bool {
        self.max_abs_diff(o) <= tol
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

/// Euclidean inner product, the invariant inner product of every shipped theory.
pub fn inner(v: &VecV, w: &VecV) -> f64 {
    v.dot(w)
}

/// Inner product of raw coordinate slices, for data that has not been typed yet.
pub fn inner_slices(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(GptError::DimensionMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    Ok(v.iter().zip(w).map(|(a, b)| a * b).sum())
}

impl From<VecV> for [f64; 3] {
    fn from(v: VecV) -> Self {
        v.0
    }
}

impl TryFrom<Vec<f64>> for VecV {
    type Error = GptError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        VecV::try_from_slice(&v)
    }
}

impl Index<usize> for VecV {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for VecV {
    type Output = VecV;

    fn add(self, o: VecV) -> VecV {
        VecV([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for VecV {
    fn add_assign(&mut self, o: VecV) {
        *self = *self + o;
    }
}

impl Sub for VecV {
    type Output = VecV;

    fn sub(self, o: VecV) -> VecV {
        VecV([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for VecV {
    type Output = VecV;

    fn neg(self) -> VecV {
        VecV([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<VecV> for f64 {
    type Output = VecV;

    fn mul(self, v: VecV) -> VecV {
        VecV([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

impl Mul<f64> for VecV {
    type Output = VecV;

    fn mul(self, s: f64) -> VecV {
        s * self
    }
}

impl std::iter::Sum for VecV {
    fn sum<I: Iterator<Item = VecV>>(iter: I) -> VecV {
        iter.fold(VecV::ZERO, |a, b| a + b)
    }
}
