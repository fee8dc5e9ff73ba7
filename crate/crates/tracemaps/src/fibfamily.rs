//! The generalized Fibonacci family `a → b, b → bˡ aᵏ`.
//!
//! Closed forms for the trace map and transformation polynomial in terms of
//! Chebyshev polynomials, the integer-eigenvalue condition for the
//! substitution matrix, and the extra invariants H and H̃ that exist for
//! `k = 1 ± l`.

use crate::poly::{chebyshev_u, IntPoly3, Var};
use crate::tracemap::TraceMap;

/// Parameters of the family; `k ≠ 0` are the non-singular cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FibParams {
    pub k: i64,
    pub l: i64,
}

impl FibParams {
    pub fn new(k: i64, l: i64) -> Self {
        FibParams { k, l }
    }

    pub fn is_singular(&self) -> bool {
        self.k == 0
    }
}

fn middle_component(k: i64, l: i64) -> IntPoly3 {
    let ux = |n: i64| chebyshev_u(n, Var::X);
    let uy = |n: i64| chebyshev_u(n, Var::Y);
    let x = IntPoly3::var(Var::X);
    let y = IntPoly3::var(Var::Y);
    let z = IntPoly3::var(Var::Z);
    &(&(&(&ux(k - 1) * &uy(l - 1)) * &z) - &(&(&ux(k - 1) * &uy(l - 2)) * &x))
        - &(&(&(&ux(k - 2) * &uy(l - 1)) * &y) - &(&ux(k - 2) * &uy(l - 2)))
}

/// Closed-form trace map `(y, g, h)` with `h = g` at `l+1`; equals the
/// word-level derivation for every integer pair `(k, l)`.
pub fn closed_form_map(p: FibParams) -> TraceMap {
    TraceMap {
        fx: IntPoly3::var(Var::Y),
        fy: middle_component(p.k, p.l),
        fz: middle_component(p.k, p.l + 1),
    }
}

/// Closed-form transformation polynomial `(U_{k-1}(x))²`.
pub fn closed_form_transformation(p: FibParams) -> IntPoly3 {
    let u = chebyshev_u(p.k - 1, Var::X);
    &u * &u
}

/// Smallest integer `m` (by absolute value, nonnegative on ties) with
/// `k = m·l + m²`, if one exists. Exactly then the substitution matrix has
/// integer eigenvalues `λ₊ = l + m`, `λ₋ = -m`.
pub fn integer_eigenvalue_condition(p: FibParams) -> Option<i64> {
    let disc = p.l * p.l + 4 * p.k;
    if disc < 0 {
        return None;
    }
    let s = (disc as f64).sqrt() as i64;
    let s = [s - 1, s, s + 1]
        .into_iter()
        .find(|&c| c >= 0 && c * c == disc)?;
    if (s - p.l).rem_euclid(2) != 0 {
        return None;
    }
    let m1 = (-p.l + s) / 2;
    let m2 = (-p.l - s) / 2;
    let m = if m1.abs() < m2.abs() {
        m1
    } else if m2.abs() < m1.abs() {
        m2
    } else {
        m1.max(m2)
    };
    debug_assert_eq!(m * p.l + m * m, p.k);
    Some(m)
}

/// Invariant of the `k = l + 1` maps: `H = U_{l+1}(x)·y - U_l(x)·z`.
pub fn invariant_h(l: i64) -> IntPoly3 {
    let y = IntPoly3::var(Var::Y);
    let z = IntPoly3::var(Var::Z);
    &(&chebyshev_u(l + 1, Var::X) * &y) - &(&chebyshev_u(l, Var::X) * &z)
}

/// Invariant of the `k = 1 - l` maps: `H̃ = U_{l-1}(x)·y - U_{l-2}(x)·z`.
pub fn invariant_h_tilde(l: i64) -> IntPoly3 {
    let y = IntPoly3::var(Var::Y);
    let z = IntPoly3::var(Var::Z);
    &(&chebyshev_u(l - 1, Var::X) * &y) - &(&chebyshev_u(l - 2, Var::X) * &z)
}
