//! Shared helpers for the integration suites: random words, substitutions,
//! unimodular matrix pairs, and kick data.
#![allow(dead_code)] // each suite uses its own subset

use num_complex::Complex64;
use rand::Rng;
use tracemaps::kicked::Kick;
use tracemaps::mat2::Mat2;
use tracemaps::word::{Gen, Substitution, Word};

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let raw: Vec<(Gen, i64)> = (0..len)
        .map(|_| {
            let g = if rng.gen() { Gen::A } else { Gen::B };
            (g, if rng.gen() { 1 } else { -1 })
        })
        .collect();
    Word::reduce(&raw)
}

pub fn random_subst(rng: &mut impl Rng, max_len: usize) -> Substitution {
    Substitution::new(random_word(rng, max_len), random_word(rng, max_len))
}

/// Random unimodular complex 2×2 matrix with a well-conditioned determinant
/// normalization.
pub fn random_sl2(rng: &mut impl Rng) -> Mat2<Complex64> {
    loop {
        let e = |rng: &mut dyn rand::RngCore| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        };
        let m = Mat2::new([[e(rng), e(rng)], [e(rng), e(rng)]]);
        let det = m.det();
        if det.norm() > 0.1 {
            let s = det.sqrt();
            return m.scale(&(Complex64::new(1.0, 0.0) / s));
        }
    }
}

/// Half-trace triple of a matrix pair.
pub fn halftraces(a: &Mat2<Complex64>, b: &Mat2<Complex64>) -> [Complex64; 3] {
    [a.trace() / 2.0, b.trace() / 2.0, a.mul(b).trace() / 2.0]
}

pub fn random_kick(rng: &mut impl Rng) -> Kick {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 0.01 && n2 <= 1.0 {
            return Kick::normalized(rng.gen_range(0.0..std::f64::consts::PI), v).unwrap();
        }
    }
}
