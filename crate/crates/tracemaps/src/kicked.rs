//! Kicked two-level systems with SU(2) dynamics.
//!
//! Two δ-kicks alternate according to the substitution sequence; the time
//! evolution operators obey the matrix recursion `U_{n+1} = U_{n-1}^k U_n^l`
//! and their half-traces follow the trace map. For kicks about a common
//! axis the orbit stays on the bounded part of `{I = 0}`; the invariant
//! value is a closed expression in the kick angles and axes.

use crate::fibfamily::FibParams;
use crate::mat2::Mat2;
use crate::tracemap::{fricke, TraceMap};
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KickError {
    #[error("AxisNotUnit: |axis| = {0}, expected 1 within 1e-12")]
    AxisNotUnit(f64),
    #[error("ZeroAxis: cannot normalize the zero vector")]
    ZeroAxis,
}

/// One δ-kick: rotation angle and unit axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kick {
    pub angle: f64,
    pub axis: [f64; 3],
}

impl Kick {
    pub fn new(angle: f64, axis: [f64; 3]) -> Result<Self, KickError> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(KickError::AxisNotUnit(norm));
        }
        Ok(Kick { angle, axis })
    }

    /// Build a kick from an arbitrary direction vector.
    pub fn normalized(angle: f64, axis: [f64; 3]) -> Result<Self, KickError> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(KickError::ZeroAxis);
        }
        Ok(Kick {
            angle,
            axis: [axis[0] / norm, axis[1] / norm, axis[2] / norm],
        })
    }

    pub fn dot(&self, other: &Kick) -> f64 {
        self.axis[0] * other.axis[0] + self.axis[1] * other.axis[1] + self.axis[2] * other.axis[2]
    }
}

/// The SU(2) kick matrix `cos(a)·1 - i sin(a) (n̂·σ)`.
pub fn su2_kick(k: &Kick) -> Mat2<Complex64> {
    let c = k.angle.cos();
    let s = k.angle.sin();
    let i = Complex64::new(0.0, 1.0);
    let [nx, ny, nz] = k.axis;
    Mat2::new([
        [
            Complex64::new(c, 0.0) - i * s * nz,
            -i * s * Complex64::new(nx, -ny),
        ],
        [
            -i * s * Complex64::new(nx, ny),
            Complex64::new(c, 0.0) + i * s * nz,
        ],
    ])
}

/// Half-trace triple of `(U⁽⁰⁾, U⁽¹⁾, U⁽⁰⁾U⁽¹⁾)`:
/// `(cos a₀, cos a₁, cos a₀ cos a₁ - sin a₀ sin a₁ n̂₀·n̂₁)`.
pub fn initial_traces(k0: &Kick, k1: &Kick) -> [f64; 3] {
    let (c0, s0) = (k0.angle.cos(), k0.angle.sin());
    let (c1, s1) = (k1.angle.cos(), k1.angle.sin());
    [c0, c1, c0 * c1 - s0 * s1 * k0.dot(k1)]
}

/// The conserved value `I = [(n̂₀·n̂₁)² - 1]·(sin a₀ sin a₁)²`; always in
/// `[-1, 0]` for SU(2) data, and equal to the Fricke character evaluated at
/// the initial trace triple.
pub fn invariant_value(k0: &Kick, k1: &Kick) -> f64 {
    let d = k0.dot(k1);
    let s = k0.angle.sin() * k1.angle.sin();
    (d * d - 1.0) * s * s
}

/// A trace-map orbit with the invariant value of its starting point.
#[derive(Debug, Clone)]
pub struct TraceOrbit {
    /// `steps + 1` points, starting with the initial triple.
    pub points: Vec<[f64; 3]>,
    pub invariant_start: f64,
}

/// Iterate a trace map from a starting triple. Divergence is a result,
/// not an error.
pub fn orbit(map: &TraceMap, start: [f64; 3], steps: usize) -> TraceOrbit {
    let i = fricke();
    let invariant_start = i.eval(&start[0], &start[1], &start[2]);
    let mut points = Vec::with_capacity(steps + 1);
    points.push(start);
    let mut cur = start;
    for _ in 0..steps {
        cur = map.apply(&cur);
        points.push(cur);
    }
    TraceOrbit {
        points,
        invariant_start,
    }
}

/// Exact-rational orbit for rational starting data; useful as a short-orbit
/// oracle where floating iterates lose meaning pointwise.
pub fn orbit_exact(
    map: &TraceMap,
    start: &[BigRational; 3],
    steps: usize,
) -> Vec<[BigRational; 3]> {
    let mut points = Vec::with_capacity(steps + 1);
    points.push(start.clone());
    let mut cur = start.clone();
    for _ in 0..steps {
        cur = map.apply(&cur);
        points.push(cur.clone());
    }
    points
}

fn dagger(m: &Mat2<Complex64>) -> Mat2<Complex64> {
    Mat2::new([
        [m.e[0][0].conj(), m.e[1][0].conj()],
        [m.e[0][1].conj(), m.e[1][1].conj()],
    ])
}

/// Polar projection onto SU(2): `M ↦ M·(M†M)^{-1/2}`, then the determinant
/// phase is split off.
pub fn su2_project(m: &Mat2<Complex64>) -> Mat2<Complex64> {
    let h = dagger(m).mul(m);
    let tau = h.trace().re;
    let delta = h.det().re.max(0.0).sqrt();
    // inverse square root of a positive 2x2 hermitian: ((H + δ1)/√(τ+2δ))⁻¹
    let sqrt_h = Mat2::new([
        [h.e[0][0] + Complex64::new(delta, 0.0), h.e[0][1]],
        [h.e[1][0], h.e[1][1] + Complex64::new(delta, 0.0)],
    ])
    .scale(&Complex64::new(1.0 / (tau + 2.0 * delta).sqrt(), 0.0));
    let unitary = m.mul(&sqrt_h.inverse());
    let det = unitary.det();
    let phase = det.sqrt();
    unitary.scale(&(Complex64::new(1.0, 0.0) / phase))
}

/// Matrix orbit `U_{n+1} = U_{n-1}^k · U_n^l` with `U_0`, `U_1` the two
/// kick matrices. Returns `steps + 1` matrices.
///
/// Both running matrices are re-unitarized every 10 steps: the unitarity
/// defect of the three-term recursion compounds like the substitution's
/// Perron eigenvalue, so a 10-step cadence keeps the drift near rounding
/// level.
pub fn matrix_orbit(k0: &Kick, k1: &Kick, subst: FibParams, steps: usize) -> Vec<Mat2<Complex64>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut prev = su2_kick(k0);
    let mut cur = su2_kick(k1);
    out.push(prev);
    if steps == 0 {
        return out;
    }
    out.push(cur);
    for n in 2..=steps {
        let next = prev.pow(subst.k).mul(&cur.pow(subst.l));
        prev = cur;
        cur = next;
        if n % 10 == 0 {
            prev = su2_project(&prev);
            cur = su2_project(&cur);
        }
        out.push(cur);
    }
    out
}
