//! Tight-binding spectra of periodic approximants.
//!
//! The approximant of generation n is the word obtained by applying the
//! substitution n-1 times to `b`; its spectrum is the set of energies where
//! the half-trace of the full-period transfer product has magnitude at most
//! one. The trace is computed by iterating the closed-form trace map from
//! the energy-dependent initial triple, bands are located by a grid scan
//! with bisection refinement, and gap IDOS values come out as exact
//! fractions `m / N` over the period which are then decomposed into
//! `(μ, ν)` labels.

use crate::fibfamily::{closed_form_map, FibParams};
use crate::mat2::Mat2;
use crate::tracemap::TraceMap;
use crate::word::{Gen, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("ResolutionTooCoarse: trace jumps across the whole band window in [{e_low}, {e_high}]; refine the grid")]
    ResolutionTooCoarse { e_low: f64, e_high: f64 },
    #[error("NonPositiveParams: chain requires k >= 1 and l >= 1, got k={k}, l={l}")]
    NonPositiveParams { k: i64, l: i64 },
    #[error("BadGeneration: generation must be >= 1, got {0}")]
    BadGeneration(u32),
    #[error("WordTooLong: approximant has {0} letters, too long for direct products")]
    WordTooLong(i128),
    #[error("LabelsRequireMetallic: gap labels are defined for k = 1 chains, got k={0}")]
    LabelsRequireMetallic(i64),
    #[error("BandCountMismatch: found {found} Bloch bands, period is {period}; refine the grid")]
    BandCountMismatch { found: i128, period: i128 },
}

/// Generalized Fibonacci numbers `f_{n+1} = l·f_n + k·f_{n-1}`,
/// `f_0 = 0`, `f_1 = 1`.
pub fn gen_fib_numbers(k: i64, l: i64, n: u32) -> i128 {
    let (mut prev, mut cur) = (0i128, 1i128);
    for _ in 0..n {
        let next = l as i128 * cur + k as i128 * prev;
        prev = cur;
        cur = next;
    }
    prev
}

/// Metallic-chain Fibonacci numbers (`k = 1`).
pub fn fib_numbers(l: i64, n: u32) -> i128 {
    gen_fib_numbers(1, l, n)
}

/// Length of the generation-n approximant, `f_n + k·f_{n-1}`.
pub fn approximant_length(k: i64, l: i64, n: u32) -> i128 {
    gen_fib_numbers(k, l, n) + k as i128 * gen_fib_numbers(k, l, n.saturating_sub(1))
}

/// A tight-binding chain with two-valued on-site potential modulated by the
/// generalized Fibonacci rule; letter `a` carries `V1`, letter `b` carries
/// `V2`. The generation-n approximant is the substitution applied n-1 times
/// to `b`.
#[derive(Debug, Clone)]
pub struct TightBindingChain {
    pub v1: BigRational,
    pub v2: BigRational,
    pub params: FibParams,
    pub n: u32,
}

impl TightBindingChain {
    pub fn new(params: FibParams, n: u32, v1: BigRational, v2: BigRational) -> Self {
        TightBindingChain { v1, v2, params, n }
    }

    pub fn from_f64(params: FibParams, n: u32, v1: f64, v2: f64) -> Self {
        TightBindingChain {
            v1: BigRational::from_float(v1).expect("finite potential"),
            v2: BigRational::from_float(v2).expect("finite potential"),
            params,
            n,
        }
    }

    fn validate(&self) -> Result<(), SpectraError> {
        if self.params.k < 1 || self.params.l < 1 {
            return Err(SpectraError::NonPositiveParams {
                k: self.params.k,
                l: self.params.l,
            });
        }
        if self.n < 1 {
            return Err(SpectraError::BadGeneration(self.n));
        }
        Ok(())
    }

    pub fn period(&self) -> i128 {
        approximant_length(self.params.k, self.params.l, self.n)
    }

    pub fn v1_f64(&self) -> f64 {
        rat_f64(&self.v1)
    }

    pub fn v2_f64(&self) -> f64 {
        rat_f64(&self.v2)
    }

    /// The approximant word itself (for direct transfer products).
    pub fn word(&self) -> Result<Word, SpectraError> {
        self.validate()?;
        if self.period() > 200_000 {
            return Err(SpectraError::WordTooLong(self.period()));
        }
        let rho = crate::word::Substitution::gen_fibonacci(self.params.k, self.params.l);
        let mut w = Word::gen(Gen::B);
        for _ in 0..self.n - 1 {
            w = rho.apply(&w);
        }
        Ok(w)
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Transfer matrix of one site, `[[E - V, -1], [1, 0]]`; unimodular.
pub fn transfer_matrix(e: f64, v: f64) -> Mat2<f64> {
    Mat2::new([[e - v, -1.0], [1.0, 0.0]])
}

pub fn transfer_matrix_exact(e: &BigRational, v: &BigRational) -> Mat2<BigRational> {
    Mat2::new([
        [e - v, -BigRational::one()],
        [BigRational::one(), BigRational::zero()],
    ])
}

/// Half-trace coordinates of the two site matrices and their product:
/// `x = (E-V1)/2`, `y = (E-V2)/2`, `z = (E-V1)(E-V2)/2 - 1`. On this curve
/// the Fricke character is the energy-independent constant `(V2-V1)²/4`.
pub fn trace_coords(e: f64, v1: f64, v2: f64) -> [f64; 3] {
    let x = 0.5 * (e - v1);
    let y = 0.5 * (e - v2);
    [x, y, 2.0 * x * y - 1.0]
}

pub fn trace_coords_exact(e: &BigRational, v1: &BigRational, v2: &BigRational) -> [BigRational; 3] {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let x = (e - v1) * &half;
    let y = (e - v2) * &half;
    let z = &(&x * &y) * &BigRational::from_integer(2.into()) - BigRational::one();
    [x, y, z]
}

/// Full-period trace `2·x_N(E)` of the generation-n approximant, computed
/// by iterating the trace map n-1 times and reading the `y` component (the
/// half-trace of the image of `b`).
pub fn approximant_trace(chain: &TightBindingChain, map: &TraceMap, e: f64) -> f64 {
    let start = trace_coords(e, chain.v1_f64(), chain.v2_f64());
    let end = map.iterate(&start, chain.n as usize - 1);
    2.0 * end[1]
}

/// Exact-rational version of [`approximant_trace`], usable as an oracle for
/// small generations.
pub fn approximant_trace_exact(
    chain: &TightBindingChain,
    map: &TraceMap,
    e: &BigRational,
) -> BigRational {
    let start = trace_coords_exact(e, &chain.v1, &chain.v2);
    let end = map.iterate(&start, chain.n as usize - 1);
    &end[1] * &BigRational::from_integer(2.into())
}

/// Trace of the explicitly multiplied transfer-matrix product for the same
/// approximant word.
pub fn transfer_product_trace(chain: &TightBindingChain, e: f64) -> Result<f64, SpectraError> {
    let word = chain.word()?;
    let (v1, v2) = (chain.v1_f64(), chain.v2_f64());
    let mut acc = Mat2::identity();
    for (g, _) in word.letters() {
        let v = match g {
            Gen::A => v1,
            Gen::B => v2,
        };
        acc = acc.mul(&transfer_matrix(e, v));
    }
    Ok(acc.trace())
}

pub fn transfer_product_trace_exact(
    chain: &TightBindingChain,
    e: &BigRational,
) -> Result<BigRational, SpectraError> {
    let word = chain.word()?;
    let mut acc: Mat2<BigRational> = Mat2::identity();
    for (g, _) in word.letters() {
        let v = match g {
            Gen::A => &chain.v1,
            Gen::B => &chain.v2,
        };
        acc = acc.mul(&transfer_matrix_exact(e, v));
    }
    Ok(acc.trace())
}

/// One spectral band: `[e_low, e_high]` with `|trace| <= 2`. A band whose
/// internal gaps are all closed carries multiplicity > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub e_low: f64,
    pub e_high: f64,
    /// Number of Bloch bands merged into this interval (zeros of the trace).
    pub multiplicity: u32,
    /// Bloch bands up to and including this one.
    pub cumulative: i128,
}

/// One gap with its exact IDOS fraction and, once assigned, its label.
#[derive(Debug, Clone, PartialEq)]
pub struct GapInfo {
    pub e_low: f64,
    pub e_high: f64,
    /// IDOS on the gap is `idos_num / idos_den` exactly.
    pub idos_num: i128,
    pub idos_den: i128,
    pub label: Option<(i64, i64)>,
    /// True for gaps of zero width (trace tangent to ±2).
    pub closed: bool,
}

/// Band/gap structure of one approximant with IDOS staircase data.
#[derive(Debug, Clone, PartialEq)]
pub struct IdosStaircase {
    pub generation: u32,
    pub period: i128,
    pub bands: Vec<Band>,
    pub gaps: Vec<GapInfo>,
}

/// Scan configuration for [`band_structure`].
#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Energy window; defaults to `[min(V)-2.5, max(V)+2.5]`.
    pub window: Option<(f64, f64)>,
    pub grid: usize,
    /// Absolute tolerance for band-edge bisection.
    pub tol: f64,
    pub jobs: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            window: None,
            grid: 10_000,
            tol: 1e-10,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Above,
    In,
    Below,
}

fn region(t: f64) -> Region {
    if t > 2.0 {
        Region::Above
    } else if t < -2.0 {
        Region::Below
    } else {
        Region::In
    }
}

fn bisect_to(f: &dyn Fn(f64) -> f64, mut out: f64, mut inside: f64, target: f64, tol: f64) -> f64 {
    // invariant: f(out) is strictly beyond target, f(inside) is not
    let out_sign = (f(out) - target).signum();
    while (out - inside).abs() > tol {
        let mid = 0.5 * (out + inside);
        let diff = f(mid) - target;
        if diff != 0.0 && diff.signum() == out_sign {
            out = mid;
        } else {
            inside = mid;
        }
    }
    0.5 * (out + inside)
}

fn parallel_map(n: usize, jobs: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
    if jobs <= 1 || n < 2 * jobs {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(jobs);
    let mut out = vec![0.0; n];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (c, slice) in out.chunks_mut(chunk).enumerate() {
            let start = c * chunk;
            handles.push(scope.spawn(move || {
                for (i, slot) in slice.iter_mut().enumerate() {
                    *slot = f(start + i);
                }
            }));
        }
        for h in handles {
            h.join().expect("scan worker panicked");
        }
    });
    out
}

/// Locate the bands and gaps of the approximant spectrum.
///
/// The trace is sampled on a uniform grid; band edges are refined by
/// bisection on `trace ∓ 2` to the configured tolerance. Cells where the
/// trace jumps from one side of the band strip to the other without an
/// in-band sample signal an unresolved band and return
/// [`SpectraError::ResolutionTooCoarse`]. Tangencies (closed gaps) inside a
/// detected band are counted via the zeros of the trace and reported as
/// zero-width gaps rather than silently merged.
pub fn band_structure(
    chain: &TightBindingChain,
    cfg: &ScanConfig,
) -> Result<IdosStaircase, SpectraError> {
    chain.validate()?;
    let map = closed_form_map(chain.params);
    let (v1, v2) = (chain.v1_f64(), chain.v2_f64());
    let (lo, hi) = cfg.window.unwrap_or_else(|| {
        let vmin = v1.min(v2);
        let vmax = v1.max(v2);
        (vmin - 2.5, vmax + 2.5)
    });
    let grid = cfg.grid.max(8);
    let step = (hi - lo) / grid as f64;
    let trace_at = |e: f64| approximant_trace(chain, &map, e);
    let energies: Vec<f64> = (0..=grid).map(|i| lo + step * i as f64).collect();
    let traces = parallel_map(energies.len(), cfg.jobs, &|i| trace_at(energies[i]));

    // collect band intervals
    let mut edges: Vec<(f64, f64)> = Vec::new(); // (enter, leave)
    let mut current_start: Option<f64> = None;
    for i in 0..grid {
        let (e0, e1) = (energies[i], energies[i + 1]);
        let (r0, r1) = (region(traces[i]), region(traces[i + 1]));
        match (r0, r1) {
            (Region::Above, Region::Below) | (Region::Below, Region::Above) => {
                return Err(SpectraError::ResolutionTooCoarse {
                    e_low: e0,
                    e_high: e1,
                });
            }
            (Region::Above, Region::In) => {
                current_start = Some(bisect_to(&trace_at, e0, e1, 2.0, cfg.tol));
            }
            (Region::Below, Region::In) => {
                current_start = Some(bisect_to(&trace_at, e0, e1, -2.0, cfg.tol));
            }
            (Region::In, Region::Above) => {
                let start = current_start.take().unwrap_or(lo);
                edges.push((start, bisect_to(&trace_at, e1, e0, 2.0, cfg.tol)));
            }
            (Region::In, Region::Below) => {
                let start = current_start.take().unwrap_or(lo);
                edges.push((start, bisect_to(&trace_at, e1, e0, -2.0, cfg.tol)));
            }
            _ => {}
        }
    }
    if let Some(start) = current_start.take() {
        edges.push((start, hi));
    }

    // multiplicity per band from the zeros of the trace inside it
    let period = chain.period();
    let mut bands = Vec::with_capacity(edges.len());
    let mut gaps = Vec::new();
    let mut cumulative: i128 = 0;
    for (band_idx, &(e_low, e_high)) in edges.iter().enumerate() {
        let inside: Vec<usize> = (0..=grid)
            .filter(|&i| energies[i] > e_low && energies[i] < e_high)
            .collect();
        let mut crossings: Vec<(f64, f64)> = Vec::new(); // bracketing pairs around zeros
        let mut prev: Option<(f64, f64)> = None;
        for &i in &inside {
            let (e, t) = (energies[i], traces[i]);
            if let Some((pe, pt)) = prev {
                if pt.signum() != t.signum() {
                    crossings.push((pe, e));
                }
            }
            prev = Some((e, t));
        }
        let multiplicity = crossings.len().max(1) as u32;
        // interior tangencies: between consecutive zeros the trace touches
        // ±2; report them as closed gaps
        for w in crossings.windows(2) {
            let (_, z0_hi) = w[0];
            let (z1_lo, _) = w[1];
            let peak = extremum_energy(&trace_at, z0_hi, z1_lo, cfg.tol);
            cumulative += 1;
            gaps.push(GapInfo {
                e_low: peak,
                e_high: peak,
                idos_num: cumulative,
                idos_den: period,
                label: None,
                closed: true,
            });
        }
        cumulative += 1; // the last Bloch band of this interval
        bands.push(Band {
            e_low,
            e_high,
            multiplicity,
            cumulative,
        });
        if band_idx + 1 < edges.len() {
            gaps.push(GapInfo {
                e_low: e_high,
                e_high: edges[band_idx + 1].0,
                idos_num: cumulative,
                idos_den: period,
                label: None,
                closed: false,
            });
        }
    }
    if cumulative != period {
        return Err(SpectraError::BandCountMismatch {
            found: cumulative,
            period,
        });
    }
    Ok(IdosStaircase {
        generation: chain.n,
        period,
        bands,
        gaps,
    })
}

fn extremum_energy(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    // golden-section search for the extremum of |trace| between two zeros
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    while hi - lo > tol {
        let a = lo + phi * (hi - lo);
        let b = hi - phi * (hi - lo);
        if f(a).abs() < f(b).abs() {
            lo = a;
        } else {
            hi = b;
        }
    }
    0.5 * (lo + hi)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Decompose each gap's IDOS numerator `m` as `m = μ·f_n + ν·f_{n-1}`,
/// choosing the representative with minimal `|ν|` (ties: smaller `|μ|`).
/// Defined for metallic chains (`k = 1`), where consecutive Fibonacci
/// numbers are coprime.
pub fn assign_labels(
    stair: &IdosStaircase,
    params: FibParams,
) -> Result<IdosStaircase, SpectraError> {
    if params.k != 1 {
        return Err(SpectraError::LabelsRequireMetallic(params.k));
    }
    let f_n = fib_numbers(params.l, stair.generation);
    let f_prev = fib_numbers(params.l, stair.generation.saturating_sub(1));
    let mut out = stair.clone();
    for gap in &mut out.gaps {
        gap.label = Some(decompose_label(gap.idos_num, f_n, f_prev));
    }
    Ok(out)
}

/// Minimal-|ν| (then minimal-|μ|) solution of `m = μ·f + ν·g` for coprime
/// `f`, `g`.
pub fn decompose_label(m: i128, f: i128, g: i128) -> (i64, i64) {
    if f == 1 {
        // generation 1: f_1 = 1, f_0 = 0; ν is unconstrained, take ν = 0
        return (m as i64, 0);
    }
    let (gcd, _, inv_g) = ext_gcd(f, g.rem_euclid(f));
    debug_assert_eq!(gcd, 1, "consecutive Fibonacci numbers must be coprime");
    let nu0 = (m.rem_euclid(f) * inv_g.rem_euclid(f)).rem_euclid(f);
    let candidates = [nu0, nu0 - f];
    let mut best: Option<(i128, i128)> = None;
    for nu in candidates {
        let mu = (m - nu * g) / f;
        debug_assert_eq!(mu * f + nu * g, m);
        let better = match best {
            None => true,
            Some((bmu, bnu)) => {
                nu.abs() < bnu.abs() || (nu.abs() == bnu.abs() && mu.abs() < bmu.abs())
            }
        };
        if better {
            best = Some((mu, nu));
        }
    }
    let (mu, nu) = best.unwrap();
    (mu as i64, nu as i64)
}
