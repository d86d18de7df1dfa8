//! Regular polygon theories `Ω_n` and the disc `Ω_∞`.
//!
//! Pure states of `Ω_n` sit on a circle of radius `r_n = sqrt(1 / cos(π/n))` at
//! height 1. Pure indecomposable effects point at the edge midpoints for even
//! `n` and at the vertices for odd `n`; on the disc both are parametrised by a
//! single angle.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::theory::{Measurement, State, Theory, TheoryKind};
use crate::vector::VecV;

/// Largest polygon order that is materialised as a vertex list.
pub const DEFAULT_N_MAX: usize = 1_000_000;

/// Which member of the polygon family a theory is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Polygon(usize),
    Disc,
}

impl Order {
    pub fn validate(self) -> Result<Self> {
        match self {
            Order::Polygon(n) if !(3..=DEFAULT_N_MAX).contains(&n) => Err(GptError::InvalidOrder(n)),
            o => Ok(o),
        }
    }

    pub fn is_even(self) -> bool {
        matches!(self, Order::Polygon(n) if n % 2 == 0)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Polygon(n) => write!(f, "{n}"),
            Order::Disc => f.write_str("inf"),
        }
    }
}

impl FromStr for Order {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞" | "disc") {
            return Ok(Order::Disc);
        }
        let n: usize = s
            .parse()
            .map_err(|_| GptError::Parse(format!("bad theory order {s:?}")))?;
        Order::Polygon(n).validate()
    }
}

/// A position on a polygon: a vertex/effect index, or an angle on the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Site {
    Index(usize),
    Angle(f64),
}

impl Site {
    fn check(self, order: Order) -> Result<Self> {
        match (order, self) {
            (Order::Polygon(n), Site::Index(i)) if i < n => Ok(self),
            (Order::Disc, Site::Angle(t)) if t.is_finite() && (0.0..TAU).contains(&t) => Ok(self),
            (o, s) => Err(GptError::IndexOutOfRange(format!("{s:?} for order {o}"))),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Index(i) => write!(f, "{i}"),
            Site::Angle(t) => write!(f, "{t}"),
        }
    }
}

/// `PolygonIndex`: a checked `(order, site)` pair, written `"n:i"` or `"inf:<radians>"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Address {
    pub order: Order,
    pub site: Site,
}

impl Address {
    pub fn new(order: Order, site: Site) -> Result<Self> {
        let order = order.validate()?;
        let site = site.check(order)?;
        Ok(Address { order, site })
    }

    pub fn vertex(n: usize, i: usize) -> Result<Self> {
        Address::new(Order::Polygon(n), Site::Index(i))
    }

    /// Disc address; the angle is reduced into `[0, 2π)`.
    pub fn disc(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(GptError::IndexOutOfRange(format!("angle {angle}")));
        }
        Address::new(Order::Disc, Site::Angle(reduce_angle(angle)))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.order, self.site)
    }
}

impl FromStr for Address {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        let (o, i) = s
            .split_once(':')
            .ok_or_else(|| GptError::Parse(format!("expected \"n:i\" or \"inf:<radians>\", got {s:?}")))?;
        let order: Order = o.parse()?;
        let site = match order {
            Order::Polygon(_) => Site::Index(
                i.trim()
                    .parse()
                    .map_err(|_| GptError::Parse(format!("bad vertex index {i:?}")))?,
            ),
            Order::Disc => Site::Angle(
                i.trim()
                    .parse()
                    .map_err(|_| GptError::Parse(format!("bad angle {i:?}")))?,
            ),
        };
        Address::new(order, site)
    }
}

pub(crate) fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `r_n`; 1 on the disc.
pub fn radius(order: Order) -> f64 {
    match order {
        Order::Polygon(n) => (1.0 / (PI / n as f64).cos()).sqrt(),
        Order::Disc => 1.0,
    }
}

/// `r_n²`.
pub fn radius_sq(order: Order) -> f64 {
    match order {
        Order::Polygon(n) => 1.0 / (PI / n as f64).cos(),
        Order::Disc => 1.0,
    }
}

/// Direction of the pure state `ω(k)` seen from the z-axis: `φ_k = 2kπ/n`.
pub fn vertex_angle(addr: Address) -> f64 {
    match (addr.order, addr.site) {
        (Order::Polygon(n), Site::Index(k)) => TAU * k as f64 / n as f64,
        (_, Site::Angle(t)) => t,
        _ => unreachable!("Address is checked on construction"),
    }
}

/// Direction of the effect `e(i)`: `(2i-1)π/n` for even n, `2iπ/n` for odd n.
pub fn effect_angle(addr: Address) -> f64 {
    match (addr.order, addr.site) {
        (Order::Polygon(n), Site::Index(i)) if n % 2 == 0 => (2.0 * i as f64 - 1.0) * PI / n as f64,
        (Order::Polygon(n), Site::Index(i)) => 2.0 * i as f64 * PI / n as f64,
        (_, Site::Angle(t)) => t,
        _ => unreachable!("Address is checked on construction"),
    }
}

/// Coordinates of the pure state `ω_n^ext(i)`.
pub fn pure_state_vec(addr: Address) -> VecV {
    VecV::polar(radius(addr.order), vertex_angle(addr), 1.0)
}

/// Coordinates of the pure indecomposable effect `e_n^ext(i)`.
pub fn pure_effect_vec(addr: Address) -> VecV {
    let theta = effect_angle(addr);
    match addr.order {
        Order::Polygon(n) if n % 2 == 1 => {
            let r = radius(addr.order);
            (1.0 / (1.0 + r * r)) * VecV::polar(r, theta, 1.0)
        }
        Order::Polygon(_) => 0.5 * VecV::polar(radius(addr.order), theta, 1.0),
        Order::Disc => 0.5 * VecV::polar(1.0, theta, 1.0),
    }
}

/// Eigenstates `(ω₀, ω₁)` of the binary ideal measurement `{e(i), u - e(i)}`.
///
/// Odd n and the disc use `e_x / <u, e_x>`. For even n this normalisation
/// leaves the state space, so `ω₀` is the midpoint of the edge on which `e(i)`
/// equals 1 and `ω₁` the antipodal edge midpoint.
pub fn eigenstate_vecs(addr: Address) -> (VecV, VecV) {
    let theta = effect_angle(addr);
    match addr.order {
        Order::Polygon(n) if n % 2 == 0 => {
            let rho = 1.0 / radius(addr.order);
            (VecV::polar(rho, theta, 1.0), VecV::polar(-rho, theta, 1.0))
        }
        _ => {
            let e0 = pure_effect_vec(addr);
            let e1 = VecV::new(0.0, 0.0, 1.0) - e0;
            ((1.0 / e0.z()) * e0, (1.0 / e1.z()) * e1)
        }
    }
}

/// Binary ideal measurement `{e(i), u - e(i)}` together with its eigenstates.
#[derive(Debug, Clone)]
pub struct IdealMeasurement {
    address: Address,
    measurement: Measurement,
    eigenstates: [State; 2],
}

impl IdealMeasurement {
    /// Ideal measurement addressed within an existing polygon or disc theory.
    pub fn new(theory: &Arc<Theory>, site: Site) -> Result<Self> {
        let order = match theory.kind() {
            TheoryKind::Polygon(n) => Order::Polygon(*n),
            TheoryKind::Disc => Order::Disc,
            TheoryKind::Finite => {
                return Err(GptError::Unsupported(
                    "ideal measurements are defined for polygon and disc theories".into(),
                ))
            }
        };
        let site = match site {
            Site::Angle(t) if order == Order::Disc && t.is_finite() => Site::Angle(reduce_angle(t)),
            s => s,
        };
        let address = Address::new(order, site)?;
        let e0 = pure_effect_vec(address);
        let e1 = theory.unit_effect().vector() - e0;
        let measurement = Measurement::new(theory, vec![e0, e1])?;
        let (w0, w1) = eigenstate_vecs(address);
        let eigenstates = [theory.state(w0)?, theory.state(w1)?];
        Ok(IdealMeasurement {
            address,
            measurement,
            eigenstates,
        })
    }

    pub fn address(&self) -> Address {
        self.address
    }

    pub fn theory(&self) -> &Arc<Theory> {
        self.measurement.theory()
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn effects(&self) -> &[VecV] {
        self.measurement.effects()
    }

    pub fn effect(&self, x: usize) -> VecV {
        self.measurement.effects()[x]
    }

    pub fn eigenstates(&self) -> &[State; 2] {
        &self.eigenstates
    }

    /// `θ_i` of `e₀`.
    pub fn source_angle(&self) -> f64 {
        effect_angle(self.address)
    }

    /// `{<u, e_x>}_x`.
    pub fn priors(&self) -> [f64; 2] {
        let u = self.theory().unit_effect().vector();
        [u.dot(&self.effect(0)), u.dot(&self.effect(1))]
    }
}

/// Builds `Ω_n` (or the disc) and the ideal measurement at `addr` in one step.
pub fn ideal_measurement(addr: Address) -> Result<IdealMeasurement> {
    let theory = Theory::for_order(addr.order)?;
    IdealMeasurement::new(&theory, addr.site)
}

/// Pure state at `addr` as a validated state of the matching theory.
pub fn pure_state(addr: Address) -> Result<State> {
    Theory::for_order(addr.order)?.state(pure_state_vec(addr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn v(a: Address) -> [f64; 3] {
        pure_state_vec(a).as_array()
    }

    #[test]
    fn pure_state_examples() {
        let s = v(Address::vertex(4, 0).unwrap());
        assert_abs_diff_eq!(s[0], 2f64.powf(0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-12);
        let s = v(Address::vertex(3, 1).unwrap());
        assert_abs_diff_eq!(s[0], -0.707_106_781_186_547_5, epsilon = 1e-9);
        assert_abs_diff_eq!(s[1], 1.224_744_871_391_589, epsilon = 1e-9);
        let s = v(Address::disc(FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(s[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-12);
        assert_eq!(s[2], 1.0);
    }

    #[test]
    fn pure_effect_examples() {
        let e = pure_effect_vec(Address::vertex(4, 1).unwrap());
        assert_abs_diff_eq!(e.x(), 0.420_448_207_626_857, epsilon = 1e-9);
        assert_abs_diff_eq!(e.y(), 0.420_448_207_626_857, epsilon = 1e-9);
        assert_abs_diff_eq!(e.z(), 0.5, epsilon = 1e-15);
        let e = pure_effect_vec(Address::vertex(3, 0).unwrap());
        assert_abs_diff_eq!(e.x(), 2f64.sqrt() / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.z(), 1.0 / 3.0, epsilon = 1e-12);
        let e = pure_effect_vec(Address::disc(0.0).unwrap());
        assert_eq!(e.as_array(), [0.5, 0.0, 0.5]);
    }

    #[test]
    fn angles() {
        assert_abs_diff_eq!(effect_angle(Address::vertex(8, 1).unwrap()), PI / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(effect_angle(Address::vertex(5, 2).unwrap()), 4.0 * PI / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vertex_angle(Address::vertex(6, 3).unwrap()), PI, epsilon = 1e-15);
    }

    #[test]
    fn index_range_is_checked() {
        assert!(Address::vertex(4, 4).is_err());
        assert!(Address::vertex(2, 0).is_err());
        assert!(Address::new(Order::Disc, Site::Angle(7.0)).is_err());
        assert!(Address::new(Order::Disc, Site::Index(0)).is_err());
        assert!(Address::new(Order::Polygon(5), Site::Angle(0.0)).is_err());
        assert!(Address::new(Order::Polygon(DEFAULT_N_MAX + 1), Site::Index(0)).is_err());
    }

    #[test]
    fn address_parsing() {
        let a: Address = "12:3".parse().unwrap();
        assert_eq!(a, Address::vertex(12, 3).unwrap());
        let d: Address = "inf:1.5707963".parse().unwrap();
        assert_eq!(d.order, Order::Disc);
        assert!("12:12".parse::<Address>().is_err());
        assert!("12".parse::<Address>().is_err());
        assert!("x:1".parse::<Address>().is_err());
        assert_eq!(a.to_string(), "12:3");
    }

    #[test]
    fn disc_eigenbasis() {
        let m = ideal_measurement(Address::disc(0.0).unwrap()).unwrap();
        assert_eq!(m.effect(0).as_array(), [0.5, 0.0, 0.5]);
        assert_eq!(m.effect(1).as_array(), [-0.5, 0.0, 0.5]);
        assert!(m.eigenstates()[0].vector().approx_eq(&VecV::new(1.0, 0.0, 1.0), 1e-15));
        assert!(m.eigenstates()[1].vector().approx_eq(&VecV::new(-1.0, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn trit_eigenstate_is_vertex() {
        let m = ideal_measurement(Address::vertex(3, 0).unwrap()).unwrap();
        let w = pure_state_vec(Address::vertex(3, 0).unwrap());
        assert!(m.eigenstates()[0].vector().approx_eq(&w, 1e-12));
    }

    #[test]
    fn square_eigenstates_are_edge_midpoints() {
        let m = ideal_measurement(Address::vertex(4, 1).unwrap()).unwrap();
        let [w0, w1] = m.eigenstates();
        // midpoint of (r, 0) and (0, r) with r = 2^{1/4}
        let c = 2f64.powf(0.25) / 2.0;
        assert!(w0.vector().approx_eq(&VecV::new(c, c, 1.0), 1e-12));
        assert!(w1.vector().approx_eq(&VecV::new(-c, -c, 1.0), 1e-12));
        let e0 = m.effect(0);
        assert_abs_diff_eq!(e0.dot(&w0.vector()), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e0.dot(&w1.vector()), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn priors_by_parity() {
        let even = ideal_measurement(Address::vertex(8, 2).unwrap()).unwrap().priors();
        assert_abs_diff_eq!(even[0], 0.5, epsilon = 1e-15);
        let odd = ideal_measurement(Address::vertex(3, 0).unwrap()).unwrap().priors();
        assert_abs_diff_eq!(odd[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(odd[1], 2.0 / 3.0, epsilon = 1e-12);
    }
}
