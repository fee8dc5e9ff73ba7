//! Concrete gap labeling for the generalized Fibonacci chains.
//!
//! The possible values of the integrated density of states on spectral gaps
//! form a ℤ(λ⁻¹)-module built from the statistically normalized Perron
//! eigenvectors of the one- and two-letter occurrence matrices. Everything
//! here is exact: eigendata live in the quadratic field ℚ(√(l²+4k)) and
//! module membership is decided by integer congruences.

use crate::word::{Gen, IntMatrix2, Substitution};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapLabelError {
    #[error("DegenerateD: k(k+l-1) = 0 for k={k}, l={l}; the substitution is reducible (k=0) or does not grow (k+l=1)")]
    DegenerateD { k: i64, l: i64 },
    #[error("InverseLettersUnsupported: induced substitutions require positive image words")]
    InverseLettersUnsupported,
    #[error("EmptyImage: induced substitutions require nonempty image words")]
    EmptyImage,
    #[error("FieldMismatch: operands live in different quadratic fields ({0} vs {1})")]
    FieldMismatch(QuadField, QuadField),
}

/// The quadratic field tag: λ₊ is the Perron root of `t² = l·t + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadField {
    pub k: i64,
    pub l: i64,
}

impl QuadField {
    pub fn new(k: i64, l: i64) -> Self {
        QuadField { k, l }
    }

    pub fn discriminant(&self) -> i64 {
        self.l * self.l + 4 * self.k
    }

    /// `λ₊` when the discriminant is a perfect square (then automatically
    /// an integer), `None` in the genuinely irrational case.
    pub fn rational_lambda(&self) -> Option<i64> {
        let s = perfect_square_root(self.discriminant())?;
        if (s - self.l).rem_euclid(2) != 0 {
            return None;
        }
        Some((self.l + s) / 2)
    }

    pub fn lambda_f64(&self) -> f64 {
        0.5 * (self.l as f64 + (self.discriminant() as f64).sqrt())
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Q(sqrt({}))[k={},l={}]",
            self.discriminant(),
            self.k,
            self.l
        )
    }
}

fn perfect_square_root(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = (n as f64).sqrt() as i64;
    [s - 1, s, s + 1]
        .into_iter()
        .find(|&c| c >= 0 && c * c == n)
}

/// Exact element `a + b·λ₊` of the quadratic field, with rational `a`, `b`.
///
/// Multiplication reduces via `λ₊² = k + l·λ₊`; the reciprocal of λ₊ is
/// `(λ₊ - l)/k` whenever `k ≠ 0`. Arithmetic across different field tags is
/// a checked error.
#[derive(Debug, Clone)]
pub struct QuadExact {
    pub a: BigRational,
    pub b: BigRational,
    pub field: QuadField,
}

impl QuadExact {
    pub fn new(a: BigRational, b: BigRational, field: QuadField) -> Self {
        QuadExact { a, b, field }
    }

    pub fn from_integer(n: i64, field: QuadField) -> Self {
        QuadExact::new(big(n), BigRational::zero(), field)
    }

    pub fn from_ratio(num: i64, den: i64, field: QuadField) -> Self {
        QuadExact::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
            field,
        )
    }

    pub fn zero(field: QuadField) -> Self {
        QuadExact::from_integer(0, field)
    }

    pub fn one(field: QuadField) -> Self {
        QuadExact::from_integer(1, field)
    }

    /// The Perron root itself.
    pub fn lambda(field: QuadField) -> Self {
        QuadExact::new(BigRational::zero(), BigRational::one(), field)
    }

    fn check_field(&self, other: &QuadExact) -> Result<(), GapLabelError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GapLabelError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &QuadExact) -> Result<QuadExact, GapLabelError> {
        self.check_field(other)?;
        Ok(QuadExact::new(
            &self.a + &other.a,
            &self.b + &other.b,
            self.field,
        ))
    }

    pub fn checked_sub(&self, other: &QuadExact) -> Result<QuadExact, GapLabelError> {
        self.check_field(other)?;
        Ok(QuadExact::new(
            &self.a - &other.a,
            &self.b - &other.b,
            self.field,
        ))
    }

    pub fn checked_mul(&self, other: &QuadExact) -> Result<QuadExact, GapLabelError> {
        self.check_field(other)?;
        let k = big(self.field.k);
        let l = big(self.field.l);
        let bb = &self.b * &other.b;
        Ok(QuadExact::new(
            &self.a * &other.a + &bb * &k,
            &self.a * &other.b + &self.b * &other.a + &bb * &l,
            self.field,
        ))
    }

    /// Galois conjugate: `λ₊ ↦ λ₋ = l - λ₊`.
    pub fn conj(&self) -> QuadExact {
        QuadExact::new(
            &self.a + &self.b * &big(self.field.l),
            -self.b.clone(),
            self.field,
        )
    }

    /// Field norm `self · conj(self)`, a rational number.
    pub fn norm(&self) -> BigRational {
        let prod = self.checked_mul(&self.conj()).expect("same field");
        debug_assert!(prod.b.is_zero());
        prod.a
    }

    pub fn checked_div(&self, other: &QuadExact) -> Result<QuadExact, GapLabelError> {
        self.check_field(other)?;
        let n = other.norm();
        let inv = other.conj().scale(&n.recip());
        self.checked_mul(&inv)
    }

    pub fn scale(&self, r: &BigRational) -> QuadExact {
        QuadExact::new(&self.a * r, &self.b * r, self.field)
    }

    pub fn neg(&self) -> QuadExact {
        QuadExact::new(-self.a.clone(), -self.b.clone(), self.field)
    }

    pub fn to_f64(&self) -> f64 {
        rat_f64(&self.a) + rat_f64(&self.b) * self.field.lambda_f64()
    }

    /// Value as an exact rational, when the field degenerates (perfect
    /// square discriminant) or the λ coefficient vanishes.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        let lam = self.field.rational_lambda()?;
        Some(&self.a + &self.b * &big(lam))
    }
}

impl PartialEq for QuadExact {
    /// Compares values: in a degenerate field `(a, b)` pairs are not unique,
    /// so the rational values are compared instead.
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field {
            return false;
        }
        match (self.as_rational(), other.as_rational()) {
            (Some(x), Some(y)) => x == y,
            _ => self.a == other.a && self.b == other.b,
        }
    }
}

impl Eq for QuadExact {}

impl fmt::Display for QuadExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*lambda", self.a, self.b)
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// The four two-letter words in fixed order `aa, ab, ba, bb`.
pub const PAIRS: [(Gen, Gen); 4] = [
    (Gen::A, Gen::A),
    (Gen::A, Gen::B),
    (Gen::B, Gen::A),
    (Gen::B, Gen::B),
];

pub fn pair_index(p: (Gen, Gen)) -> usize {
    PAIRS.iter().position(|&q| q == p).unwrap()
}

/// Substitution induced on two-letter words by the sliding-window rule:
/// if `ϱ(w₀w₁) = a₀a₁…`, the image of the pair `w₀w₁` is
/// `(a₀a₁)(a₁a₂)…(a_{m-1}a_m)` with `m = |ϱ(w₀)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubstitution {
    /// Images indexed like [`PAIRS`].
    pub images: [Vec<(Gen, Gen)>; 4],
}

pub fn induced_two_letter(rho: &Substitution) -> Result<InducedSubstitution, GapLabelError> {
    for img in [&rho.image_a, &rho.image_b] {
        if img.is_empty() {
            return Err(GapLabelError::EmptyImage);
        }
        if !img.is_positive() {
            return Err(GapLabelError::InverseLettersUnsupported);
        }
    }
    let image_of = |pair: (Gen, Gen)| {
        let word = rho.image(pair.0).concat(rho.image(pair.1));
        let letters: Vec<Gen> = word.letters().into_iter().map(|(g, _)| g).collect();
        let m = rho.image(pair.0).len();
        (0..m).map(|i| (letters[i], letters[i + 1])).collect()
    };
    Ok(InducedSubstitution {
        images: [
            image_of(PAIRS[0]),
            image_of(PAIRS[1]),
            image_of(PAIRS[2]),
            image_of(PAIRS[3]),
        ],
    })
}

/// One-letter occurrence matrix: column j counts the letters in the image
/// of letter j. Coincides with the transpose of the substitution matrix.
pub fn m1(rho: &Substitution) -> Result<IntMatrix2, GapLabelError> {
    for img in [&rho.image_a, &rho.image_b] {
        if !img.is_positive() && !img.is_empty() {
            return Err(GapLabelError::InverseLettersUnsupported);
        }
    }
    let count = |g: Gen, of: Gen| rho.image(of).count_signed(g);
    Ok(IntMatrix2::from_i64([
        [count(Gen::A, Gen::A), count(Gen::A, Gen::B)],
        [count(Gen::B, Gen::A), count(Gen::B, Gen::B)],
    ]))
}

/// Two-letter occurrence matrix: column j counts the pairs in the induced
/// image of pair j.
pub fn m2(rho: &Substitution) -> Result<[[i64; 4]; 4], GapLabelError> {
    let induced = induced_two_letter(rho)?;
    let mut out = [[0i64; 4]; 4];
    for (j, image) in induced.images.iter().enumerate() {
        for &p in image {
            out[pair_index(p)][j] += 1;
        }
    }
    Ok(out)
}

/// Apply an integer 4×4 matrix to a vector of field elements, exactly.
pub fn mat4_apply(m: &[[i64; 4]; 4], v: &[QuadExact; 4]) -> [QuadExact; 4] {
    std::array::from_fn(|i| {
        let mut acc = QuadExact::zero(v[0].field);
        for j in 0..4 {
            acc = acc
                .checked_add(&v[j].scale(&big(m[i][j])))
                .expect("same field");
        }
        acc
    })
}

/// Exact Perron data of the generalized Fibonacci substitution.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub field: QuadField,
    pub d: i64,
    pub lambda_plus: QuadExact,
    /// Letter frequencies, statistically normalized (components sum to 1).
    pub v1: [QuadExact; 2],
    /// Pair frequencies in the order `aa, ab, ba, bb`, also summing to 1.
    pub v2: [QuadExact; 4],
}

pub fn perron_data(k: i64, l: i64) -> Result<PerronData, GapLabelError> {
    let d = k * (k + l - 1);
    if d == 0 {
        return Err(GapLabelError::DegenerateD { k, l });
    }
    let field = QuadField::new(k, l);
    let lam = QuadExact::lambda(field);
    let over_d = BigRational::new(BigInt::one(), BigInt::from(d));
    let lin = |c0: i64, c1: i64| {
        QuadExact::from_integer(c0, field)
            .checked_add(&lam.scale(&big(c1)))
            .expect("same field")
            .scale(&over_d)
    };
    let v1 = [lin(k * (k + l), -k), lin(-k, k)];
    let v2 = [
        lin((k + l) * (k - 1), -(k - 1)),
        lin(k + l, -1),
        lin(k + l, -1),
        lin(-(2 * k + l), k + 1),
    ];
    Ok(PerronData {
        field,
        d,
        lambda_plus: lam,
        v1,
        v2,
    })
}

/// The ℤ(λ⁻¹)-module of possible gap IDOS values:
/// `(μ̃ + ν̃λ₊)/(D·kᵖ)` subject to `μ̃ + ν̃ ≡ 0` and `μ̃ + (k+l)ν̃ ≡ 0 (mod D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyModule {
    pub k: i64,
    pub l: i64,
    /// `D = k(k+l-1)`, the common denominator and congruence modulus.
    pub d: i64,
}

pub fn frequency_module(k: i64, l: i64) -> Result<FrequencyModule, GapLabelError> {
    let d = k * (k + l - 1);
    if d == 0 {
        return Err(GapLabelError::DegenerateD { k, l });
    }
    Ok(FrequencyModule { k, l, d })
}

impl FrequencyModule {
    pub fn field(&self) -> QuadField {
        QuadField::new(self.k, self.l)
    }

    /// Both congruences `μ̃ + ν̃ ≡ 0 (D)` and `μ̃ + (k+l)·ν̃ ≡ 0 (D)`.
    pub fn congruences_hold(&self, mu: &BigInt, nu: &BigInt) -> bool {
        let d = BigInt::from(self.d);
        ((mu + nu) % &d).is_zero() && ((mu + nu * BigInt::from(self.k + self.l)) % &d).is_zero()
    }

    /// Exact membership test, searching the k-adic exponent up to `p_max`.
    ///
    /// Irrational discriminant: the representation `μ̃ + ν̃λ₊` is unique per
    /// exponent, so integrality plus the congruences decide. Perfect-square
    /// discriminant: λ₊ is an integer and all ν̃ residues mod D are scanned.
    pub fn contains(&self, value: &QuadExact, p_max: u32) -> Result<bool, GapLabelError> {
        if value.field != self.field() {
            return Err(GapLabelError::FieldMismatch(value.field, self.field()));
        }
        let rational_lambda = self.field().rational_lambda();
        for p in 0..=p_max {
            let scale =
                BigRational::from_integer(BigInt::from(self.d) * BigInt::from(self.k).pow(p));
            match rational_lambda {
                None => {
                    let mu = &value.a * &scale;
                    let nu = &value.b * &scale;
                    if mu.is_integer()
                        && nu.is_integer()
                        && self.congruences_hold(&mu.to_integer(), &nu.to_integer())
                    {
                        return Ok(true);
                    }
                }
                Some(lam) => {
                    let c = (&value.a + &value.b * &big(lam)) * &scale;
                    if !c.is_integer() {
                        continue;
                    }
                    let c = c.to_integer();
                    for nu_res in 0..self.d.unsigned_abs() {
                        let nu = BigInt::from(nu_res);
                        let mu = &c - &nu * BigInt::from(lam);
                        if self.congruences_hold(&mu, &nu) {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }
}

/// Limit IDOS value of the gap label `(μ, ν)` on a metallic chain
/// (`k = 1`): `(λ₊ - 1)/l · (μ + ν/λ₊)`, using `1/λ₊ = λ₊ - l`.
pub fn label_to_idos(mu: i64, nu: i64, l: i64) -> QuadExact {
    let field = QuadField::new(1, l);
    let lam = QuadExact::lambda(field);
    let lam_minus_one = lam.checked_sub(&QuadExact::one(field)).expect("same field");
    let inv_lam = lam
        .checked_sub(&QuadExact::from_integer(l, field))
        .expect("same field");
    let inner = QuadExact::from_integer(mu, field)
        .checked_add(&inv_lam.scale(&big(nu)))
        .expect("same field");
    lam_minus_one
        .checked_mul(&inner)
        .expect("same field")
        .scale(&big(l).recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fib(k: i64, l: i64) -> Substitution {
        Substitution::gen_fibonacci(k, l)
    }

    #[test]
    fn induced_substitution_table() {
        // image of ba must be (bb)^{l-1} (ba) (aa)^{k-1} (ab)
        for (k, l) in [(1i64, 1i64), (1, 2), (2, 1), (3, 2)] {
            let ind = induced_two_letter(&fib(k, l)).unwrap();
            let mut expected = Vec::new();
            for _ in 0..l - 1 {
                expected.push((Gen::B, Gen::B));
            }
            expected.push((Gen::B, Gen::A));
            for _ in 0..k - 1 {
                expected.push((Gen::A, Gen::A));
            }
            expected.push((Gen::A, Gen::B));
            assert_eq!(
                ind.images[pair_index((Gen::B, Gen::A))],
                expected,
                "k={k} l={l}"
            );
            // image of bb is the same pair string for this family
            assert_eq!(ind.images[pair_index((Gen::B, Gen::B))], expected);
        }
        let ind = induced_two_letter(&fib(1, 1)).unwrap();
        assert_eq!(
            ind.images[pair_index((Gen::B, Gen::A))],
            vec![(Gen::B, Gen::A), (Gen::A, Gen::B)]
        );
        let id = induced_two_letter(&Substitution::identity()).unwrap();
        for (i, &p) in PAIRS.iter().enumerate() {
            assert_eq!(id.images[i], vec![p]);
        }
    }

    #[test]
    fn induced_rejects_bad_images() {
        assert_eq!(
            induced_two_letter(&fib(-1, 2)),
            Err(GapLabelError::InverseLettersUnsupported)
        );
        assert_eq!(
            induced_two_letter(&Substitution::new(Word::empty(), Word::gen(Gen::B))),
            Err(GapLabelError::EmptyImage)
        );
    }

    #[test]
    fn occurrence_matrices() {
        for (k, l) in [(1i64, 2i64), (2, 1), (3, 4)] {
            let rho = fib(k, l);
            assert_eq!(m1(&rho).unwrap(), IntMatrix2::from_i64([[0, k], [1, l]]));
            assert_eq!(m1(&rho).unwrap(), rho.matrix().transpose());
            assert_eq!(
                m2(&rho).unwrap(),
                [
                    [0, 0, k - 1, k - 1],
                    [0, 0, 1, 1],
                    [0, 0, 1, 1],
                    [1, 1, l - 1, l - 1]
                ]
            );
        }
    }

    #[test]
    fn m1_transposes_substitution_matrix_on_random_positive_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let img = |rng: &mut ChaCha8Rng| {
                let len = rng.gen_range(1..6);
                Word::reduce(
                    &(0..len)
                        .map(|_| (if rng.gen() { Gen::A } else { Gen::B }, 1i64))
                        .collect::<Vec<_>>(),
                )
            };
            let rho = Substitution::new(img(&mut rng), img(&mut rng));
            assert_eq!(m1(&rho).unwrap(), rho.matrix().transpose());
        }
    }

    #[test]
    fn m2_characteristic_polynomial_is_t2_times_trace_quadratic() {
        // eigenvalues {0, 0, λ±}: char(t) = t⁴ - l·t³ - k·t²
        for (k, l) in [(1i64, 1i64), (1, 2), (2, 1), (3, 2), (1, 5)] {
            let m = m2(&fib(k, l)).unwrap();
            let mul = |a: &[[i128; 4]; 4], b: &[[i128; 4]; 4]| {
                let mut c = [[0i128; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        c[i][j] = (0..4).map(|t| a[i][t] * b[t][j]).sum();
                    }
                }
                c
            };
            let m128: [[i128; 4]; 4] =
                std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] as i128));
            let tr = |a: &[[i128; 4]; 4]| (0..4).map(|i| a[i][i]).sum::<i128>();
            let m2p = mul(&m128, &m128);
            let m3p = mul(&m2p, &m128);
            let m4p = mul(&m3p, &m128);
            let (p1, p2, p3, p4) = (tr(&m128), tr(&m2p), tr(&m3p), tr(&m4p));
            // Newton's identities for elementary symmetric functions
            let e1 = p1;
            let e2 = (e1 * p1 - p2) / 2;
            let e3 = (e2 * p1 - e1 * p2 + p3) / 3;
            let e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4;
            assert_eq!(
                (e1, e2, e3, e4),
                (l as i128, -k as i128, 0, 0),
                "k={k} l={l}"
            );
        }
    }

    #[test]
    fn perron_eigen_equations_hold_exactly() {
        for (k, l) in [(1i64, 1i64), (1, 2), (2, 1), (3, 2)] {
            let pd = perron_data(k, l).unwrap();
            let one = QuadExact::one(pd.field);
            let sum1 = pd.v1[0].checked_add(&pd.v1[1]).unwrap();
            assert_eq!(sum1, one, "v1 normalization k={k} l={l}");
            let mut sum2 = QuadExact::zero(pd.field);
            for c in &pd.v2 {
                sum2 = sum2.checked_add(c).unwrap();
            }
            assert_eq!(sum2, one, "v2 normalization k={k} l={l}");

            // M1 v1 = λ v1
            let m = m1(&fib(k, l)).unwrap();
            let mi: [[i64; 2]; 2] = std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    use num_traits::ToPrimitive;
                    m.entries[i][j].to_i64().unwrap()
                })
            });
            for i in 0..2 {
                let lhs = pd.v1[0]
                    .scale(&big(mi[i][0]))
                    .checked_add(&pd.v1[1].scale(&big(mi[i][1])))
                    .unwrap();
                let rhs = pd.lambda_plus.checked_mul(&pd.v1[i]).unwrap();
                assert_eq!(lhs, rhs, "M1 eigen row {i} k={k} l={l}");
            }

            // M2 v2 = λ v2
            let m2m = m2(&fib(k, l)).unwrap();
            let image = mat4_apply(&m2m, &pd.v2);
            for i in 0..4 {
                let rhs = pd.lambda_plus.checked_mul(&pd.v2[i]).unwrap();
                assert_eq!(image[i], rhs, "M2 eigen row {i} k={k} l={l}");
            }

            // marginals: pair frequencies sum to letter frequencies
            assert_eq!(pd.v1[0], pd.v2[0].checked_add(&pd.v2[1]).unwrap());
            assert_eq!(pd.v1[1], pd.v2[2].checked_add(&pd.v2[3]).unwrap());
        }
    }

    #[test]
    fn golden_mean_letter_frequencies() {
        let pd = perron_data(1, 1).unwrap();
        let field = pd.field;
        // v1 = (2 - τ, τ - 1)
        let expected0 = QuadExact::from_integer(2, field)
            .checked_sub(&QuadExact::lambda(field))
            .unwrap();
        assert_eq!(pd.v1[0], expected0);
        let v = pd.v1[0].to_f64();
        assert!((v - 0.381966011250105).abs() < 1e-12);
        let pd = perron_data(1, 2).unwrap();
        assert!((pd.v1[0].to_f64() - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((pd.v1[1].to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cases_are_rejected() {
        assert!(matches!(
            perron_data(0, 3),
            Err(GapLabelError::DegenerateD { .. })
        ));
        assert!(matches!(
            frequency_module(2, -1),
            Err(GapLabelError::DegenerateD { .. })
        ));
    }

    #[test]
    fn quad_arithmetic_reduces_by_the_defining_relation() {
        let field = QuadField::new(1, 2);
        let lam = QuadExact::lambda(field);
        // λ² = 2λ + 1 for the octonacci field
        let sq = lam.checked_mul(&lam).unwrap();
        let expected = lam
            .scale(&big(2))
            .checked_add(&QuadExact::one(field))
            .unwrap();
        assert_eq!(sq, expected);
        // 1/λ = λ - 2
        let inv = QuadExact::one(field).checked_div(&lam).unwrap();
        let expected = lam.checked_sub(&QuadExact::from_integer(2, field)).unwrap();
        assert_eq!(inv, expected);
        // cross-field arithmetic is refused
        let other = QuadExact::one(QuadField::new(1, 1));
        assert!(matches!(
            lam.checked_add(&other),
            Err(GapLabelError::FieldMismatch(..))
        ));
    }

    #[test]
    fn octonacci_module_membership() {
        let module = frequency_module(1, 2).unwrap();
        let field = module.field();
        assert!(module.contains(&QuadExact::zero(field), 0).unwrap());
        assert!(module.contains(&QuadExact::one(field), 0).unwrap());
        // (λ - 1)/2 is a member: μ̃ = -1, ν̃ = 1, sum ≡ 0 (mod 2)
        let half_lam_minus_one = QuadExact::lambda(field)
            .checked_sub(&QuadExact::one(field))
            .unwrap()
            .scale(&big(2).recip());
        assert!(module.contains(&half_lam_minus_one, 0).unwrap());
        // 1/2 is not: μ̃ = 1, ν̃ = 0, sum odd
        let half = QuadExact::from_ratio(1, 2, field);
        assert!(!module.contains(&half, 3).unwrap());
    }

    #[test]
    fn module_is_closed_under_multiplication_by_inverse_lambda() {
        let module = frequency_module(1, 2).unwrap();
        let field = module.field();
        let inv_lam = QuadExact::lambda(field)
            .checked_sub(&QuadExact::from_integer(2, field))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut tested = 0;
        while tested < 50 {
            let mu = rng.gen_range(-10i64..10);
            let nu = rng.gen_range(-10i64..10);
            if (mu + nu) % module.d != 0 {
                continue;
            }
            let member = QuadExact::from_integer(mu, field)
                .checked_add(&QuadExact::lambda(field).scale(&big(nu)))
                .unwrap()
                .scale(&big(module.d).recip());
            assert!(module.contains(&member, 0).unwrap());
            let mapped = member.checked_mul(&inv_lam).unwrap();
            assert!(module.contains(&mapped, 1).unwrap());
            tested += 1;
        }
    }

    #[test]
    fn integer_eigenvalue_module_membership() {
        // k=2, l=1: λ₊ = 2 is rational, D = 4; the whole-chain endpoints
        // must still be members.
        let module = frequency_module(2, 1).unwrap();
        let field = module.field();
        assert_eq!(field.rational_lambda(), Some(2));
        assert!(module.contains(&QuadExact::zero(field), 2).unwrap());
        assert!(module.contains(&QuadExact::one(field), 2).unwrap());
        assert!(module
            .contains(&QuadExact::from_ratio(1, 4, field), 2)
            .unwrap());
    }

    #[test]
    fn label_values_lie_in_the_module() {
        assert_eq!(
            label_to_idos(0, 0, 2),
            QuadExact::zero(QuadField::new(1, 2))
        );
        // Fibonacci: (1,0) ↦ τ - 1 ≈ 0.618
        let v = label_to_idos(1, 0, 1);
        assert!((v.to_f64() - 0.6180339887498949).abs() < 1e-12);
        for l in 1..=4i64 {
            let module = frequency_module(1, l).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(29 + l as u64);
            for _ in 0..40 {
                let mu = rng.gen_range(-8i64..8);
                let nu = rng.gen_range(-8i64..8);
                let value = label_to_idos(mu, nu, l);
                assert!(
                    module.contains(&value, 0).unwrap(),
                    "label ({mu},{nu}) escaped the module at l={l}"
                );
            }
        }
    }

    #[test]
    fn module_members_decompose_into_labels_for_metallic_chains() {
        // Every (μ̃ + ν̃λ)/l with μ̃+ν̃ ≡ 0 (l) is a label value: ν = (μ̃+ν̃)/l,
        // μ = ν̃ + ν.
        let l = 3i64;
        let field = QuadField::new(1, l);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let nu_t = rng.gen_range(-9i64..9);
            let mu_t = -nu_t + l * rng.gen_range(-3i64..3);
            let member = QuadExact::from_integer(mu_t, field)
                .checked_add(&QuadExact::lambda(field).scale(&big(nu_t)))
                .unwrap()
                .scale(&big(l).recip());
            let nu = (mu_t + nu_t) / l;
            let mu = nu_t + nu;
            assert_eq!(label_to_idos(mu, nu, l), member);
        }
    }
}
