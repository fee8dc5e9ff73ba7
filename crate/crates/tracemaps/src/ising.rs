//! Free energy of aperiodic 1D Ising chains.
//!
//! Couplings and fields take two values, modulated by the generalized
//! Fibonacci substitution along the chain. The transfer-matrix recursion
//! splits into the trace map acting on determinant-normalized traces and a
//! trivial recursion for the determinants, so the partition function can be
//! iterated directly into the thermodynamic limit. Traces grow like
//! `exp(O(N))`, far beyond floating range, hence the mantissa/exponent
//! scalar used throughout.

use crate::fibfamily::{closed_form_map, FibParams};
use crate::mat2::Mat2;
use crate::poly::PolyScalar;
use crate::word::{Gen, Substitution, Word};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsingError {
    #[error("AntiferroNormalization: 2·sinh(2·K{index}) = {value} is not positive; the determinant normalization requires K{index} > 0")]
    AntiferroNormalization { index: u8, value: f64 },
    #[error("TraceCollapse: normalized trace x = {x:e} at generation {generation} is not positive, log Z is undefined")]
    TraceCollapse { generation: u32, x: f64 },
    #[error("NonPositiveLength: substitution k={k}, l={l} does not generate positive chains")]
    NonPositiveLength { k: i64, l: i64 },
    #[error(
        "OracleTooLarge: direct product over {length} sites refused (generation {generation})"
    )]
    OracleTooLarge { generation: u32, length: i128 },
}

/// Number with value `mantissa · 2^exponent`, `|mantissa| ∈ [1, 2)` or 0.
/// The 128-bit exponent keeps chains of 10¹² sites far from overflow.
#[derive(Debug, Clone, Copy)]
pub struct ScaledScalar {
    mantissa: f64,
    exponent: i128,
}

impl ScaledScalar {
    pub const ZERO: ScaledScalar = ScaledScalar {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn from_f64(v: f64) -> Self {
        Self::normalize(v, 0)
    }

    fn normalize(v: f64, shift: i128) -> Self {
        if v == 0.0 {
            return Self::ZERO;
        }
        assert!(v.is_finite(), "ScaledScalar from non-finite value");
        let bits = v.to_bits();
        let raw = ((bits >> 52) & 0x7ff) as i64;
        if raw == 0 {
            // subnormal: renormalize through a scale-up
            return Self::normalize(v * (2f64).powi(200), shift - 200);
        }
        let mantissa = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        ScaledScalar {
            mantissa,
            exponent: (raw - 1023) as i128 + shift,
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i128 {
        self.exponent
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa > 0.0
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(&self) -> f64 {
        assert!(self.is_positive(), "ln of non-positive ScaledScalar");
        self.mantissa.ln() + self.exponent as f64 * LN_2
    }

    pub fn to_f64(&self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        if self.exponent > 1023 {
            return f64::INFINITY * self.mantissa.signum();
        }
        if self.exponent < -1070 {
            return 0.0;
        }
        self.mantissa * (2f64).powi(self.exponent as i32)
    }

    pub fn abs(&self) -> ScaledScalar {
        ScaledScalar {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }
}

impl Add for ScaledScalar {
    type Output = ScaledScalar;
    fn add(self, rhs: ScaledScalar) -> ScaledScalar {
        if self.mantissa == 0.0 {
            return rhs;
        }
        if rhs.mantissa == 0.0 {
            return self;
        }
        let (hi, lo) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = hi.exponent - lo.exponent;
        if d > 64 {
            return hi;
        }
        let v = hi.mantissa + lo.mantissa * (2f64).powi(-(d as i32));
        ScaledScalar::normalize(v, hi.exponent)
    }
}

impl Sub for ScaledScalar {
    type Output = ScaledScalar;
    fn sub(self, rhs: ScaledScalar) -> ScaledScalar {
        self + (-rhs)
    }
}

impl Neg for ScaledScalar {
    type Output = ScaledScalar;
    fn neg(self) -> ScaledScalar {
        ScaledScalar {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for ScaledScalar {
    type Output = ScaledScalar;
    fn mul(self, rhs: ScaledScalar) -> ScaledScalar {
        ScaledScalar::normalize(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl PartialEq for ScaledScalar {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && (self.exponent == other.exponent || self.mantissa == 0.0)
    }
}

impl PartialOrd for ScaledScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let sign = |s: &ScaledScalar| {
            if s.mantissa > 0.0 {
                1
            } else if s.mantissa < 0.0 {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (sign(self), sign(other));
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        let mag = (self.exponent, self.mantissa.abs())
            .partial_cmp(&(other.exponent, other.mantissa.abs()))?;
        Some(if sa > 0 { mag } else { mag.reverse() })
    }
}

impl Zero for ScaledScalar {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }
}

impl One for ScaledScalar {
    fn one() -> Self {
        ScaledScalar {
            mantissa: 1.0,
            exponent: 0,
        }
    }
}

impl PolyScalar for ScaledScalar {
    fn from_coeff(c: &BigInt) -> Self {
        ScaledScalar::from_f64(c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Dimensionless couplings `K = J/k_B T` and fields `h = H/k_B T`; index 0
/// belongs to letter `a`, index 1 to letter `b` of the substitution.
#[derive(Debug, Clone, Copy)]
pub struct IsingParams {
    pub k0: f64,
    pub k1: f64,
    pub h0: f64,
    pub h1: f64,
    pub subst: FibParams,
}

impl IsingParams {
    fn validate(&self) -> Result<(), IsingError> {
        if self.subst.k < 1 || self.subst.l < 1 {
            return Err(IsingError::NonPositiveLength {
                k: self.subst.k,
                l: self.subst.l,
            });
        }
        for (index, k) in [(0u8, self.k0), (1, self.k1)] {
            let value = 2.0 * (2.0 * k).sinh();
            if value <= 0.0 {
                return Err(IsingError::AntiferroNormalization { index, value });
            }
        }
        Ok(())
    }
}

/// Per-site transfer matrix `[[e^{K+h}, e^{-K}], [e^{-K}, e^{K-h}]]`.
/// With `h` set to the mean of two neighbouring fields this is also the
/// general bond matrix.
pub fn elementary_transfer(k: f64, h: f64) -> Mat2<f64> {
    Mat2::new([[(k + h).exp(), (-k).exp()], [(-k).exp(), (k - h).exp()]])
}

fn elementary_scaled(k: f64, h: f64) -> Mat2<ScaledScalar> {
    let m = elementary_transfer(k, h);
    Mat2::new([
        [
            ScaledScalar::from_f64(m.e[0][0]),
            ScaledScalar::from_f64(m.e[0][1]),
        ],
        [
            ScaledScalar::from_f64(m.e[1][0]),
            ScaledScalar::from_f64(m.e[1][1]),
        ],
    ])
}

/// Chain word of generation n: `w_0 = a`, `w_1 = b`, `w_{m+1} = ϱ(w_m)`.
pub fn chain_word(params: &IsingParams, n: u32) -> Result<Word, IsingError> {
    params.validate()?;
    let length = chain_length(params.subst, n);
    if length > 2_000_000 {
        return Err(IsingError::OracleTooLarge {
            generation: n,
            length,
        });
    }
    let rho = Substitution::gen_fibonacci(params.subst.k, params.subst.l);
    let mut w = Word::gen(Gen::A);
    for _ in 0..n {
        w = rho.apply(&w);
    }
    Ok(w)
}

/// `N_n = f_n + k·f_{n-1}`, the number of sites at generation n.
pub fn chain_length(subst: FibParams, n: u32) -> i128 {
    crate::spectra::approximant_length(subst.k, subst.l, n)
}

/// Transfer matrix of the full generation-n chain by direct product, in
/// scaled arithmetic. Oracle-sized generations only.
pub fn chain_transfer_direct(
    params: &IsingParams,
    n: u32,
) -> Result<Mat2<ScaledScalar>, IsingError> {
    let word = chain_word(params, n)?;
    let ta = elementary_scaled(params.k0, params.h0);
    let tb = elementary_scaled(params.k1, params.h1);
    let mut acc: Mat2<ScaledScalar> = Mat2::identity();
    for (g, _) in word.letters() {
        acc = acc.mul(match g {
            Gen::A => &ta,
            Gen::B => &tb,
        });
    }
    Ok(acc)
}

/// Starting triple of determinant-normalized half-traces:
/// `x_0 = e^{K0} cosh(h0) / √(2 sinh 2K0)` and its companions for `y_0`
/// and the product trace `z_0`.
pub fn initial_traces(params: &IsingParams) -> Result<[f64; 3], IsingError> {
    params.validate()?;
    let d0sq = 2.0 * (2.0 * params.k0).sinh();
    let d1sq = 2.0 * (2.0 * params.k1).sinh();
    let x0 = params.k0.exp() * params.h0.cosh() / d0sq.sqrt();
    let y0 = params.k1.exp() * params.h1.cosh() / d1sq.sqrt();
    let ks = params.k0 + params.k1;
    let hs = params.h0 + params.h1;
    let z0 = (ks.exp() * hs.cosh() + (-ks).exp())
        / (2.0 * ((2.0 * params.k0).sinh() * (2.0 * params.k1).sinh()).sqrt());
    Ok([x0, y0, z0])
}

/// Per-generation output of the free-energy iteration.
#[derive(Debug, Clone, Copy)]
pub struct GenerationReport {
    pub generation: u32,
    pub length: i128,
    /// `x_n = Z_n / (2 d_n)` as mantissa · 2^exponent.
    pub x_mantissa: f64,
    pub x_exponent: i128,
    /// `log Z_n = log 2 + log x_n + log d_n`.
    pub log_z: f64,
    /// Dimensionless free energy per site, `-log(Z_n)/N_n`.
    pub free_energy: f64,
}

/// Iterate the trace map from the starting triple and assemble the free
/// energy per site for generations `1..=n_max`. The determinant factor is
/// accumulated in log space via `log d_{m+1} = l·log d_m + k·log d_{m-1}`,
/// matching the closed form `d_m = d_0^{k f_{m-1}} d_1^{f_m}`.
pub fn free_energy_series(
    params: &IsingParams,
    n_max: u32,
) -> Result<Vec<GenerationReport>, IsingError> {
    let [x0, y0, z0] = initial_traces(params)?;
    let map = closed_form_map(params.subst);
    let mut state = [
        ScaledScalar::from_f64(x0),
        ScaledScalar::from_f64(y0),
        ScaledScalar::from_f64(z0),
    ];
    let (k, l) = (params.subst.k, params.subst.l);
    let mut ld_prev = 0.5 * (2.0 * (2.0 * params.k0).sinh()).ln(); // log d_0
    let mut ld_cur = 0.5 * (2.0 * (2.0 * params.k1).sinh()).ln(); // log d_1
    let mut f_prev = 0i128; // f_0
    let mut f_cur = 1i128; // f_1
    let mut out = Vec::with_capacity(n_max as usize);
    for generation in 1..=n_max {
        state = map.apply(&state);
        let x = state[0];
        if !x.is_positive() {
            return Err(IsingError::TraceCollapse {
                generation,
                x: x.to_f64(),
            });
        }
        let length = f_cur + k as i128 * f_prev;
        let log_z = LN_2 + x.ln() + ld_cur;
        out.push(GenerationReport {
            generation,
            length,
            x_mantissa: x.mantissa(),
            x_exponent: x.exponent(),
            log_z,
            free_energy: -log_z / length as f64,
        });
        let ld_next = l as f64 * ld_cur + k as f64 * ld_prev;
        ld_prev = ld_cur;
        ld_cur = ld_next;
        let f_next = l as i128 * f_cur + k as i128 * f_prev;
        f_prev = f_cur;
        f_cur = f_next;
    }
    Ok(out)
}

/// Free energy at a single generation.
pub fn free_energy(params: &IsingParams, n: u32) -> Result<GenerationReport, IsingError> {
    free_energy_series(params, n)?
        .pop()
        .ok_or(IsingError::NonPositiveLength {
            k: params.subst.k,
            l: params.subst.l,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracemap::fricke;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(k0: f64, k1: f64, h0: f64, h1: f64, k: i64, l: i64) -> IsingParams {
        IsingParams {
            k0,
            k1,
            h0,
            h1,
            subst: FibParams::new(k, l),
        }
    }

    #[test]
    fn scaled_scalar_arithmetic() {
        let a = ScaledScalar::from_f64(3.75);
        assert_eq!(a.to_f64(), 3.75);
        assert_eq!(a.mantissa(), 1.875);
        assert_eq!(a.exponent(), 1);
        let b = ScaledScalar::from_f64(-0.3);
        assert!((a * b).to_f64() - (-1.125) < 1e-15);
        assert!(((a + b).to_f64() - 3.45).abs() < 1e-15);
        assert!(((a - b).to_f64() - 4.05).abs() < 1e-15);
        let big = ScaledScalar::from_f64(2f64.powi(500));
        let sq = big * big;
        assert_eq!(sq.exponent(), 1000);
        assert_eq!(sq.mantissa(), 1.0);
        let huge = sq * sq * sq; // 2^3000, beyond f64 range
        assert_eq!(huge.exponent(), 3000);
        assert!((huge.ln() - 3000.0 * LN_2).abs() < 1e-9);
        // adding something 64+ binades smaller is a no-op
        assert_eq!(huge + ScaledScalar::one(), huge);
        assert!(ScaledScalar::from_f64(1.5) > ScaledScalar::from_f64(-2.0));
        assert!(ScaledScalar::from_f64(0.25) < ScaledScalar::one());
        assert!(ScaledScalar::from_f64(-0.25) > ScaledScalar::from_f64(-1.0));
    }

    #[test]
    fn scaled_scalar_cancellation() {
        let a = ScaledScalar::from_f64(1.0 + 2f64.powi(-40));
        let b = ScaledScalar::one();
        let d = a - b;
        assert!((d.to_f64() - 2f64.powi(-40)).abs() < 1e-27);
        assert!((ScaledScalar::one() - ScaledScalar::one()).is_zero());
    }

    #[test]
    fn elementary_matrix_entries() {
        let t = elementary_transfer(0.7, 0.0);
        assert!((t.e[0][0] - 0.7f64.exp()).abs() < 1e-15);
        assert!((t.e[0][1] - (-0.7f64).exp()).abs() < 1e-15);
        assert_eq!(t.e[0][0], t.e[1][1]);
        // det = e^{2K} - e^{-2K} = 2 sinh 2K
        let det = t.det();
        assert!((det - 2.0 * (1.4f64).sinh()).abs() < 1e-12);
    }

    #[test]
    fn initial_traces_match_direct_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let p = params(
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                1,
                1,
            );
            let [x0, y0, z0] = initial_traces(&p).unwrap();
            let t0 = elementary_transfer(p.k0, p.h0);
            let t1 = elementary_transfer(p.k1, p.h1);
            let d0 = t0.det().sqrt();
            let d1 = t1.det().sqrt();
            assert!((x0 - t0.trace() / (2.0 * d0)).abs() < 1e-13);
            assert!((y0 - t1.trace() / (2.0 * d1)).abs() < 1e-13);
            let z_direct = t0.mul(&t1).trace() / (2.0 * d0 * d1);
            assert!((z0 - z_direct).abs() < 1e-12);
        }
    }

    #[test]
    fn antiferro_couplings_are_rejected() {
        let p = params(-0.5, 1.0, 0.0, 0.0, 1, 1);
        assert!(matches!(
            initial_traces(&p),
            Err(IsingError::AntiferroNormalization { index: 0, .. })
        ));
        let p = params(0.5, 1.0, 0.0, 0.0, 0, 1);
        assert!(matches!(
            free_energy(&p, 3),
            Err(IsingError::NonPositiveLength { .. })
        ));
    }

    #[test]
    fn field_free_starting_point_lies_on_the_invariant_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let i = fricke();
        for _ in 0..30 {
            let (k0, k1) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
            let p = params(k0, k1, 0.0, 0.0, 1, 1);
            let [x, y, z] = initial_traces(&p).unwrap();
            assert!(i.eval(&x, &y, &z).abs() < 1e-12);
            // commutator norm vanishes exactly when I does
            let t0 = elementary_transfer(p.k0, p.h0);
            let t1 = elementary_transfer(p.k1, p.h1);
            let c = t0.mul(&t1);
            let c2 = t1.mul(&t0);
            let comm: f64 = (0..2)
                .flat_map(|r| (0..2).map(move |s| (r, s)))
                .map(|(r, s)| (c.e[r][s] - c2.e[r][s]).abs())
                .fold(0.0, f64::max);
            assert!(comm < 1e-12);
        }
        // generic fields leave the surface and the matrices do not commute
        let p = params(0.5, 1.0, 0.2, -0.3, 1, 1);
        let [x, y, z] = initial_traces(&p).unwrap();
        assert!(i.eval(&x, &y, &z).abs() > 1e-3);
    }

    #[test]
    fn trace_map_iteration_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for subst in [(1i64, 1i64), (1, 2), (2, 1)] {
            for _ in 0..7 {
                let p = params(
                    rng.gen_range(0.1..2.0),
                    rng.gen_range(0.1..2.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    subst.0,
                    subst.1,
                );
                let series = free_energy_series(&p, 8).unwrap();
                for report in &series {
                    let direct = chain_transfer_direct(&p, report.generation).unwrap();
                    let ln_direct = direct.trace().ln();
                    assert!(
                        (report.log_z - ln_direct).abs() <= 1e-10 * (1.0 + ln_direct.abs()),
                        "gen {} subst {subst:?}: {} vs {}",
                        report.generation,
                        report.log_z,
                        ln_direct
                    );
                }
            }
        }
    }

    #[test]
    fn homogeneous_chain_free_energy() {
        // K0 = K1 = K, h = 0: F → -log(2 cosh K)
        for (k, l) in [(1i64, 1i64), (1, 2), (2, 1)] {
            let p = params(1.0, 1.0, 0.0, 0.0, k, l);
            let report = free_energy(&p, 30).unwrap();
            let expected = -(2.0 * 1f64.cosh()).ln();
            assert!(
                (report.free_energy - expected).abs() < 1e-8,
                "(k,l)=({k},{l}): {} vs {expected}",
                report.free_energy
            );
        }
        // exact at every finite generation too: Z = (2cosh K)^N + (2sinh K)^N
        let p = params(0.8, 0.8, 0.0, 0.0, 1, 1);
        for report in free_energy_series(&p, 12).unwrap() {
            let n = report.length as f64;
            let z = (2.0 * 0.8f64.cosh()).powf(n) + (2.0 * 0.8f64.sinh()).powf(n);
            assert!((report.log_z - z.ln()).abs() < 1e-10 * (1.0 + z.ln().abs()));
        }
    }

    #[test]
    fn commuting_case_reduces_to_frequency_average() {
        // h = 0 makes both transfer matrices commute; the free energy is the
        // letter-frequency-weighted mix of the single-bond free energies.
        for (k, l) in [(1i64, 1i64), (1, 2)] {
            let p = params(0.6, 1.3, 0.0, 0.0, k, l);
            let report = free_energy(&p, 30).unwrap();
            let pd = crate::gaplabel::perron_data(k, l).unwrap();
            let va = pd.v1[0].to_f64();
            let vb = pd.v1[1].to_f64();
            let expected = -(va * (2.0 * 0.6f64.cosh()).ln() + vb * (2.0 * 1.3f64.cosh()).ln());
            assert!(
                (report.free_energy - expected).abs() < 1e-8,
                "(k,l)=({k},{l}): {} vs {expected}",
                report.free_energy
            );
        }
    }

    #[test]
    fn determinant_exponents_follow_the_closed_form() {
        // d_{m+1} = d_m^l · d_{m-1}^k in exponent pairs over (d_0, d_1)
        for (k, l) in [(1i128, 1i128), (1, 2), (2, 1), (3, 2)] {
            let mut prev = (1i128, 0i128); // d_0 = d_0^1 d_1^0
            let mut cur = (0i128, 1i128); // d_1
            let mut f_prev = 0i128;
            let mut f_cur = 1i128;
            for _ in 0..20 {
                let next = (l * cur.0 + k * prev.0, l * cur.1 + k * prev.1);
                prev = cur;
                cur = next;
                let f_next = l * f_cur + k * f_prev;
                f_prev = f_cur;
                f_cur = f_next;
                // d_m = d_0^{k f_{m-1}} · d_1^{f_m}
                assert_eq!(cur.0, k * f_prev);
                assert_eq!(cur.1, f_cur);
            }
        }
    }

    #[test]
    fn free_energy_converges_monotonically_for_generic_parameters() {
        let p = params(0.5, 1.0, 0.2, -0.3, 1, 1);
        let series = free_energy_series(&p, 25).unwrap();
        let deltas: Vec<f64> = series
            .windows(2)
            .map(|w| (w[1].free_energy - w[0].free_energy).abs())
            .collect();
        // after the short transient the decay is geometric, ratio ~ 1/τ²
        for w in deltas.windows(2).skip(6) {
            assert!(
                w[1] <= w[0] * 0.9 + 1e-14,
                "convergence stalled: {} then {}",
                w[0],
                w[1]
            );
        }
        assert!(deltas.last().unwrap() < &1e-9);
    }
}
