//! Exact sparse polynomial ring ℤ[x,y,z].
//!
//! Coefficients are arbitrary-precision integers; monomials are ordered
//! graded-lex (total degree first, then x > y > z), which fixes a canonical
//! text form used for golden output. Includes Chebyshev polynomials of the
//! second kind for every integer index and exact division by polynomials
//! monic in z.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

/// The three ring variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("NotMonicInZ: divisor's leading z-coefficient is not the constant 1")]
    NotMonicInZ,
    #[error("PolyParse: {0}")]
    Parse(String),
}

/// Exponent triple `(i, j, k)` for `x^i y^j z^k`, graded-lex ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mono(pub [u32; 3]);

impl Mono {
    pub const ONE: Mono = Mono([0, 0, 0]);

    pub fn var(v: Var) -> Mono {
        let mut e = [0, 0, 0];
        e[v.index()] = 1;
        Mono(e)
    }

    pub fn total_degree(self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(self, other: Mono) -> Mono {
        Mono([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Scalar types a polynomial can be evaluated over.
pub trait PolyScalar: Clone + Zero + Add<Output = Self> + Mul<Output = Self> {
    fn from_coeff(c: &BigInt) -> Self;
}

impl PolyScalar for f64 {
    fn from_coeff(c: &BigInt) -> Self {
        c.to_f64().unwrap_or(f64::NAN)
    }
}

impl PolyScalar for Complex64 {
    fn from_coeff(c: &BigInt) -> Self {
        Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl PolyScalar for BigRational {
    fn from_coeff(c: &BigInt) -> Self {
        BigRational::from_integer(c.clone())
    }
}

/// Sparse polynomial in ℤ[x,y,z]; no zero coefficients are stored, the zero
/// polynomial is the empty map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly3 {
    terms: BTreeMap<Mono, BigInt>,
}

impl IntPoly3 {
    pub fn zero() -> Self {
        IntPoly3::default()
    }

    pub fn one() -> Self {
        IntPoly3::constant(BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        let c = c.into();
        let mut p = IntPoly3::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::ONE, c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        IntPoly3::term(Mono::var(v), BigInt::one())
    }

    pub fn term(m: Mono, c: BigInt) -> Self {
        let mut p = IntPoly3::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Build from `(exponents, coefficient)` pairs (repeated monomials add).
    pub fn from_terms<I: IntoIterator<Item = ([u32; 3], i64)>>(it: I) -> Self {
        let mut p = IntPoly3::zero();
        for (e, c) in it {
            p.add_term(Mono(e), BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Mono::ONE).cloned(),
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Highest exponent of `v`, or `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.0[v.index()]).max()
    }

    /// Coefficient of `z^j` as a polynomial in x and y.
    pub fn z_coefficient(&self, j: u32) -> IntPoly3 {
        let mut out = IntPoly3::zero();
        for (m, c) in &self.terms {
            if m.0[2] == j {
                out.add_term(Mono([m.0[0], m.0[1], 0]), c.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> IntPoly3 {
        let mut out = IntPoly3::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Evaluate at a point; exact over rationals, floating otherwise.
    pub fn eval<T: PolyScalar>(&self, x: &T, y: &T, z: &T) -> T {
        let dx = self.degree_in(Var::X).unwrap_or(0) as usize;
        let dy = self.degree_in(Var::Y).unwrap_or(0) as usize;
        let dz = self.degree_in(Var::Z).unwrap_or(0) as usize;
        let px = power_table(x, dx);
        let py = power_table(y, dy);
        let pz = power_table(z, dz);
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let term = T::from_coeff(c)
                * px[m.0[0] as usize].clone()
                * py[m.0[1] as usize].clone()
                * pz[m.0[2] as usize].clone();
            acc = acc + term;
        }
        acc
    }

    /// Substitute polynomials for the variables and expand exactly.
    pub fn substitute(&self, fx: &IntPoly3, fy: &IntPoly3, fz: &IntPoly3) -> IntPoly3 {
        let dx = self.degree_in(Var::X).unwrap_or(0);
        let dy = self.degree_in(Var::Y).unwrap_or(0);
        let dz = self.degree_in(Var::Z).unwrap_or(0);
        let px = poly_power_table(fx, dx);
        let py = poly_power_table(fy, dy);
        let pz = poly_power_table(fz, dz);
        let mut acc = IntPoly3::zero();
        for (m, c) in &self.terms {
            let prod = &(&px[m.0[0] as usize] * &py[m.0[1] as usize]) * &pz[m.0[2] as usize];
            acc = &acc + &(&prod * &IntPoly3::constant(c.clone()));
        }
        acc
    }
}

fn power_table<T: PolyScalar>(base: &T, max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(T::from_coeff(&BigInt::one()));
    for i in 0..max {
        out.push(out[i].clone() * base.clone());
    }
    out
}

fn poly_power_table(base: &IntPoly3, max: u32) -> Vec<IntPoly3> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(IntPoly3::one());
    for i in 0..max as usize {
        out.push(&out[i] * base);
    }
    out
}

impl Add for &IntPoly3 {
    type Output = IntPoly3;
    fn add(self, rhs: &IntPoly3) -> IntPoly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &IntPoly3 {
    type Output = IntPoly3;
    fn sub(self, rhs: &IntPoly3) -> IntPoly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &IntPoly3 {
    type Output = IntPoly3;
    fn neg(self) -> IntPoly3 {
        IntPoly3 {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &IntPoly3 {
    type Output = IntPoly3;
    fn mul(self, rhs: &IntPoly3) -> IntPoly3 {
        let mut out = IntPoly3::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }
}

impl Add for IntPoly3 {
    type Output = IntPoly3;
    fn add(self, rhs: IntPoly3) -> IntPoly3 {
        &self + &rhs
    }
}

impl Sub for IntPoly3 {
    type Output = IntPoly3;
    fn sub(self, rhs: IntPoly3) -> IntPoly3 {
        &self - &rhs
    }
}

impl Mul for IntPoly3 {
    type Output = IntPoly3;
    fn mul(self, rhs: IntPoly3) -> IntPoly3 {
        &self * &rhs
    }
}

impl Neg for IntPoly3 {
    type Output = IntPoly3;
    fn neg(self) -> IntPoly3 {
        -&self
    }
}

/// Chebyshev polynomial of the second kind `U_n` in the named variable,
/// for any integer index: `U_{-1} = 0`, `U_0 = 1`,
/// `U_{n+1} = 2t·U_n - U_{n-1}`, run forwards and backwards
/// (so `U_{-(n+2)} = -U_n`).
pub fn chebyshev_u(n: i64, var: Var) -> IntPoly3 {
    let two_t = IntPoly3::term(Mono::var(var), BigInt::from(2));
    if n >= -1 {
        let mut prev = IntPoly3::zero(); // U_{-1}
        let mut cur = IntPoly3::one(); // U_0
        if n == -1 {
            return prev;
        }
        for _ in 0..n {
            let next = &(&two_t * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        let mut above = IntPoly3::one(); // U_0
        let mut cur = IntPoly3::zero(); // U_{-1}
        for _ in 0..(-n - 1) {
            // U_{m-1} = 2t·U_m - U_{m+1}
            let below = &(&two_t * &cur) - &above;
            above = cur;
            cur = below;
        }
        cur
    }
}

/// Exact Euclidean division by a divisor that is monic in z.
///
/// Returns `(quotient, remainder)` with `num = quotient·den + remainder` and
/// `deg_z(remainder) < deg_z(den)`. Because the divisor is monic in z the
/// coefficients stay integral. Fails with [`PolyError::NotMonicInZ`] if the
/// leading z-coefficient of `den` is not the constant 1.
pub fn divide_by_monic_in_z(
    num: &IntPoly3,
    den: &IntPoly3,
) -> Result<(IntPoly3, IntPoly3), PolyError> {
    let d = den.degree_in(Var::Z).ok_or(PolyError::NotMonicInZ)?;
    if !den.z_coefficient(d).is_one() {
        return Err(PolyError::NotMonicInZ);
    }
    let mut quotient = IntPoly3::zero();
    let mut rest = num.clone();
    loop {
        let deg = match rest.degree_in(Var::Z) {
            Some(deg) if deg >= d => deg,
            _ => break,
        };
        let lead = rest.z_coefficient(deg);
        let shift = IntPoly3::term(Mono([0, 0, deg - d]), BigInt::one());
        let q_term = &lead * &shift;
        quotient = &quotient + &q_term;
        rest = &rest - &(&q_term * den);
        debug_assert!(rest.degree_in(Var::Z).map_or(true, |e| e < deg));
    }
    Ok((quotient, rest))
}

impl fmt::Display for IntPoly3 {
    /// Canonical text form: terms in descending graded-lex order, e.g.
    /// `-2*x*y*z + x^2 + y^2 + z^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote_factor = false;
            if !mag.is_one() || *m == Mono::ONE {
                write!(f, "{mag}")?;
                wrote_factor = true;
            }
            for v in Var::ALL {
                let e = m.0[v.index()];
                if e == 0 {
                    continue;
                }
                if wrote_factor {
                    write!(f, "*")?;
                }
                write!(f, "{}", v.symbol())?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote_factor = true;
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly3 {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0usize;
        let mut poly = IntPoly3::zero();
        let skip_ws = |pos: &mut usize| {
            while *pos < chars.len() && chars[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        if pos == chars.len() {
            return Err(PolyError::Parse("empty input".into()));
        }
        let mut first = true;
        while pos < chars.len() {
            let mut sign = 1i32;
            if first {
                if chars[pos] == '-' {
                    sign = -1;
                    pos += 1;
                } else if chars[pos] == '+' {
                    pos += 1;
                }
                first = false;
            } else {
                match chars[pos] {
                    '+' => pos += 1,
                    '-' => {
                        sign = -1;
                        pos += 1;
                    }
                    c => return Err(PolyError::Parse(format!("expected + or -, got {c:?}"))),
                }
            }
            skip_ws(&mut pos);
            // one term: integer factors and var^exp factors joined by optional '*'
            let mut coeff = BigInt::from(sign);
            let mut exps = [0u32; 3];
            let mut saw_factor = false;
            loop {
                skip_ws(&mut pos);
                if pos >= chars.len() {
                    break;
                }
                let c = chars[pos];
                if c.is_ascii_digit() {
                    let start = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let digits: String = chars[start..pos].iter().collect();
                    let n: BigInt = digits
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad integer {digits:?}")))?;
                    coeff *= n;
                    saw_factor = true;
                } else if let Some(v) = match c {
                    'x' => Some(Var::X),
                    'y' => Some(Var::Y),
                    'z' => Some(Var::Z),
                    _ => None,
                } {
                    pos += 1;
                    let mut e = 1u32;
                    if pos < chars.len() && chars[pos] == '^' {
                        pos += 1;
                        let start = pos;
                        while pos < chars.len() && chars[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        if start == pos {
                            return Err(PolyError::Parse("missing exponent after ^".into()));
                        }
                        let digits: String = chars[start..pos].iter().collect();
                        e = digits
                            .parse()
                            .map_err(|_| PolyError::Parse(format!("bad exponent {digits:?}")))?;
                    }
                    exps[v.index()] += e;
                    saw_factor = true;
                } else if c == '*' {
                    pos += 1;
                    continue;
                } else {
                    break;
                }
            }
            if !saw_factor {
                return Err(PolyError::Parse("term with no factors".into()));
            }
            poly.add_term(Mono(exps), coeff);
            skip_ws(&mut pos);
        }
        Ok(poly)
    }
}
