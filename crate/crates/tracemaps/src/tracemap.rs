//! Trace maps of substitution rules.
//!
//! Substituting a pair of unimodular 2×2 matrices for the two letters turns
//! a substitution rule into a polynomial self-map of ℂ³ acting on the
//! half-traces `x = ½tr A`, `y = ½tr B`, `z = ½tr AB`. This module derives
//! that map exactly for arbitrary rules, computes the Fricke character and
//! its transformation polynomial, and classifies substitutions by the
//! latter.
//!
//! The derivation reduces a word's half-trace to the base polynomials by
//! Cayley-Hamilton rewriting:
//!
//! - inverse elimination: `tr(U C⁻¹ V) = tr(C) tr(UV) - tr(U C V)`
//! - cyclic invariance of the trace and `tr(W) = tr(W⁻¹)`
//! - square elimination: `tr(U C² V) = tr(C) tr(UCV) - tr(UV)`
//! - power closure: `½tr(Cⁿ) = U_{n-1}(c)·c - U_{n-2}(c)` with `c = ½tr C`,
//!   and likewise for alternating words `(ab)ⁿ` in `z`
//!
//! The measure (inverse-letter count, word length) strictly decreases, and
//! results are memoized on the minimal cyclic representative.

use crate::mat2::Mat2;
use crate::poly::{chebyshev_u, divide_by_monic_in_z, IntPoly3, PolyScalar, Var};
use crate::word::{Gen, Substitution, Word};
use num_complex::Complex64;
use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceMapError {
    /// The Fricke character must divide its own pullback exactly; a
    /// remainder means the half-trace reducer is broken. Never swallowed.
    #[error("DivisionLeftRemainder: I∘F is not a multiple of I (remainder {0})")]
    DivisionLeftRemainder(String),
}

/// Polynomial self-map of ℂ³ induced by a substitution on half-traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceMap {
    pub fx: IntPoly3,
    pub fy: IntPoly3,
    pub fz: IntPoly3,
}

impl TraceMap {
    pub fn identity() -> Self {
        TraceMap {
            fx: IntPoly3::var(Var::X),
            fy: IntPoly3::var(Var::Y),
            fz: IntPoly3::var(Var::Z),
        }
    }

    pub fn components(&self) -> [&IntPoly3; 3] {
        [&self.fx, &self.fy, &self.fz]
    }

    /// Apply the map to a point.
    pub fn apply<T: PolyScalar>(&self, p: &[T; 3]) -> [T; 3] {
        [
            self.fx.eval(&p[0], &p[1], &p[2]),
            self.fy.eval(&p[0], &p[1], &p[2]),
            self.fz.eval(&p[0], &p[1], &p[2]),
        ]
    }

    /// Iterate the map `n` times.
    pub fn iterate<T: PolyScalar>(&self, p: &[T; 3], n: usize) -> [T; 3] {
        let mut cur = p.clone();
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        cur
    }
}

/// Functional composition `F ∘ G`, realized by polynomial substitution.
/// Matches the substitution product: `derive(r.compose(s))` equals
/// `compose_maps(&derive(r), &derive(s))`.
pub fn compose_maps(f: &TraceMap, g: &TraceMap) -> TraceMap {
    TraceMap {
        fx: f.fx.substitute(&g.fx, &g.fy, &g.fz),
        fy: f.fy.substitute(&g.fx, &g.fy, &g.fz),
        fz: f.fz.substitute(&g.fx, &g.fy, &g.fz),
    }
}

/// The Fricke character `I(x,y,z) = x² + y² + z² - 2xyz - 1`.
pub fn fricke() -> IntPoly3 {
    IntPoly3::from_terms([
        ([2, 0, 0], 1),
        ([0, 2, 0], 1),
        ([0, 0, 2], 1),
        ([1, 1, 1], -2),
        ([0, 0, 0], -1),
    ])
}

// Letters for the reducer: +1 = a, -1 = a⁻¹, +2 = b, -2 = b⁻¹.
type Letters = Vec<i8>;

fn to_letters(w: &Word) -> Letters {
    w.letters()
        .into_iter()
        .map(|(g, s)| match g {
            Gen::A => s,
            Gen::B => 2 * s,
        })
        .collect()
}

fn free_reduce(w: &[i8]) -> Letters {
    let mut out: Letters = Vec::with_capacity(w.len());
    for &c in w {
        if out.last() == Some(&-c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

fn cyclic_reduce(mut w: Letters) -> Letters {
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

// Rank order a < b < a⁻¹ < b⁻¹ keeps positive rotations ahead of inverted
// ones, so positive words stay positive under canonicalization.
fn letter_rank(c: i8) -> u8 {
    match c {
        1 => 0,
        2 => 1,
        -1 => 2,
        -2 => 3,
        _ => unreachable!("invalid letter code"),
    }
}

fn rank_key(w: &[i8]) -> Vec<u8> {
    w.iter().map(|&c| letter_rank(c)).collect()
}

/// Minimal cyclic rotation over the word and its inverse; the half-trace is
/// invariant under both, so this is the memo key.
fn canonical_cyclic(w: &[i8]) -> Letters {
    let mut best: Option<(Vec<u8>, Letters)> = None;
    let inv: Letters = w.iter().rev().map(|&c| -c).collect();
    for cand in [w.to_vec(), inv] {
        let n = cand.len();
        for r in 0..n.max(1) {
            let rotated: Letters = cand[r..].iter().chain(cand[..r].iter()).copied().collect();
            let key = rank_key(&rotated);
            match &best {
                Some((bk, _)) if *bk <= key => {}
                _ => best = Some((key, rotated)),
            }
        }
    }
    best.map(|(_, w)| w).unwrap_or_default()
}

fn halftrace_of_letter(c: i8) -> IntPoly3 {
    match c.abs() {
        1 => IntPoly3::var(Var::X),
        2 => IntPoly3::var(Var::Y),
        _ => unreachable!("invalid letter code"),
    }
}

/// `½tr(Cⁿ)` as a polynomial in the half-trace `t` of C.
fn power_halftrace(n: usize, var: Var) -> IntPoly3 {
    let n = n as i64;
    let t = IntPoly3::var(var);
    &(&chebyshev_u(n - 1, var) * &t) - &chebyshev_u(n - 2, var)
}

fn halftrace_rec(input: &[i8], memo: &mut HashMap<Letters, IntPoly3>) -> IntPoly3 {
    let w = cyclic_reduce(free_reduce(input));
    if w.is_empty() {
        return IntPoly3::one();
    }
    // single power c^±n
    if w.iter().all(|&c| c == w[0]) {
        let var = if w[0].abs() == 1 { Var::X } else { Var::Y };
        return power_halftrace(w.len(), var);
    }
    let w = canonical_cyclic(&w);
    if let Some(p) = memo.get(&w) {
        return p.clone();
    }
    let result = if let Some(i) = w.iter().position(|&c| c < 0) {
        // inverse elimination on the leftmost inverse letter
        let c = -w[i];
        let mut dropped = w.clone();
        dropped.remove(i);
        let mut flipped = w.clone();
        flipped[i] = c;
        let two_tc = IntPoly3::constant(2) * halftrace_of_letter(c);
        &(&two_tc * &halftrace_rec(&dropped, memo)) - &halftrace_rec(&flipped, memo)
    } else {
        let n = w.len();
        match (0..n).find(|&i| w[i] == w[(i + 1) % n]) {
            Some(i) => {
                // cyclic square elimination, rotated so the square leads
                let rotated: Letters = w[i..].iter().chain(w[..i].iter()).copied().collect();
                let two_tc = IntPoly3::constant(2) * halftrace_of_letter(rotated[0]);
                &(&two_tc * &halftrace_rec(&rotated[1..], memo))
                    - &halftrace_rec(&rotated[2..], memo)
            }
            None => {
                // cyclically alternating positive word (ab)ⁿ
                debug_assert!(n % 2 == 0);
                power_halftrace(n / 2, Var::Z)
            }
        }
    };
    memo.insert(w, result.clone());
    result
}

/// Half-trace of a word as the unique polynomial in `(x, y, z)`:
/// `p(½tr A, ½tr B, ½tr AB) = ½tr W(A,B)` for all unimodular pairs.
pub fn word_halftrace(w: &Word) -> IntPoly3 {
    let mut memo = HashMap::new();
    halftrace_rec(&to_letters(w), &mut memo)
}

/// Derive the trace map of a substitution: the half-traces of the images of
/// `a`, `b`, and `ab`. The memo cache is shared within one derivation.
pub fn derive(rho: &Substitution) -> TraceMap {
    let mut memo = HashMap::new();
    let wab = rho.image_a.concat(&rho.image_b);
    TraceMap {
        fx: halftrace_rec(&to_letters(&rho.image_a), &mut memo),
        fy: halftrace_rec(&to_letters(&rho.image_b), &mut memo),
        fz: halftrace_rec(&to_letters(&wab), &mut memo),
    }
}

/// Transformation polynomial of a trace map: the exact quotient
/// `P = (I ∘ F) / I`. The division always terminates with zero remainder;
/// anything else is surfaced as an internal error.
pub fn transformation_of_map(f: &TraceMap) -> Result<IntPoly3, TraceMapError> {
    let i = fricke();
    let pulled = i.substitute(&f.fx, &f.fy, &f.fz);
    let (q, r) =
        divide_by_monic_in_z(&pulled, &i).expect("Fricke character is monic of degree 2 in z");
    if !r.is_zero() {
        return Err(TraceMapError::DivisionLeftRemainder(r.to_string()));
    }
    Ok(q)
}

/// Transformation polynomial `P` of a substitution, with `I∘F = P·I`.
pub fn transformation_polynomial(rho: &Substitution) -> Result<IntPoly3, TraceMapError> {
    transformation_of_map(&derive(rho))
}

/// The trichotomy read off the transformation polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstClassKind {
    /// `P ≡ 1`: the substitution is an automorphism.
    Invertible,
    /// `P ≡ 0`: the substitution has nontrivial kernel.
    NontrivialKernel,
    /// `P` nonconstant: injective but not onto.
    InjectiveNotOnto,
}

impl SubstClassKind {
    pub fn name(self) -> &'static str {
        match self {
            SubstClassKind::Invertible => "Invertible",
            SubstClassKind::NontrivialKernel => "NontrivialKernel",
            SubstClassKind::InjectiveNotOnto => "InjectiveNotOnto",
        }
    }
}

/// Classification of a substitution with its witness polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstClass {
    pub kind: SubstClassKind,
    pub witness: IntPoly3,
}

pub fn classify(rho: &Substitution) -> Result<SubstClass, TraceMapError> {
    let p = transformation_polynomial(rho)?;
    let kind = match p.as_constant() {
        None => SubstClassKind::InjectiveNotOnto,
        Some(c) if c == 0.into() => SubstClassKind::NontrivialKernel,
        Some(c) if c == 1.into() => SubstClassKind::Invertible,
        Some(c) => unreachable!("constant transformation polynomial {c} other than 0 or 1"),
    };
    Ok(SubstClass { kind, witness: p })
}

/// True iff `H ∘ F = H` as exact polynomials.
pub fn check_invariant(f: &TraceMap, h: &IntPoly3) -> bool {
    h.substitute(&f.fx, &f.fy, &f.fz) == *h
}

/// Diagonal unimodular pair realizing a point of the surface `{I = 0}`:
/// `A = diag(α, α⁻¹)`, `B = diag(β^ε, β^-ε)` with `α = x + √(x²-1)`,
/// `β = y + √(y²-1)` on the principal branch. The two branch signs realize
/// the two roots `z` of `I(x, y, ·) = 0`, via `2z = αβ^ε + (αβ^ε)⁻¹`.
pub fn fricke_surface_matrices(
    x: Complex64,
    y: Complex64,
    branch: i8,
) -> (Mat2<Complex64>, Mat2<Complex64>) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let alpha = x + (x * x - one).sqrt();
    let beta = y + (y * y - one).sqrt();
    let b_diag = if branch >= 0 { beta } else { one / beta };
    let a = Mat2::new([[alpha, zero], [zero, one / alpha]]);
    let b = Mat2::new([[b_diag, zero], [zero, one / b_diag]]);
    (a, b)
}

/// Evaluate a word on a concrete matrix pair: the image of the
/// homomorphism `a ↦ ma, b ↦ mb`.
pub fn word_matrix<T>(w: &Word, ma: &Mat2<T>, mb: &Mat2<T>) -> Mat2<T>
where
    T: Clone
        + num_traits::Zero
        + num_traits::One
        + Add<Output = T>
        + Mul<Output = T>
        + Sub<Output = T>
        + Neg<Output = T>
        + Div<Output = T>,
{
    let mut acc = Mat2::identity();
    for &(g, e) in w.blocks() {
        let base = match g {
            Gen::A => ma,
            Gen::B => mb,
        };
        acc = acc.mul(&base.pow(e));
    }
    acc
}
