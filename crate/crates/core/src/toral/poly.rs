//! Exact integer polynomials, cyclotomic factors, and unit-circle root counts.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial with big-integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^k − 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[0] = BigInt::from(-1);
        c[k] = BigInt::one();
        Self::new(c)
    }

    /// Parses whitespace- or comma-separated integers, constant term first.
    pub fn parse(text: &str) -> Result<Self, String> {
        let coeffs = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigInt>().map_err(|_| format!("bad coefficient `{t}`")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `x^deg · p(1/x)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact quotient and remainder when every division step stays integral
    /// (always the case for a leading coefficient `±1`).
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        if divisor.is_zero() {
            return None;
        }
        let dl = divisor.lead();
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * d;
            }
            quot[i] = q;
        }
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Quotient when `divisor` divides exactly.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        match self.div_rem(divisor) {
            Some((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Whether `divisor` divides `self` over the rationals.
    pub fn divisible_by(&self, divisor: &Self) -> bool {
        RatPoly::from_int(self).rem(&RatPoly::from_int(divisor)).is_zero()
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{mag}x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: Self) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPolynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: Self) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: Self) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

/// Polynomial over the rationals, used for gcds and Sturm sequences.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub(crate) fn from_int(p: &IntPolynomial) -> Self {
        RatPoly(p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub(crate) fn rem(&self, d: &Self) -> Self {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().expect("nonzero divisor").clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r.last().expect("nonempty") / &lead;
            for (j, c) in d.0.iter().enumerate() {
                r[shift + j] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly(r).trim()
    }

    fn derivative(&self) -> Self {
        RatPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trim()
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut x, mut y) = (self.clone(), other.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x
    }

    fn quotient(&self, d: &Self) -> Self {
        let lead = d.0.last().expect("nonzero divisor").clone();
        let dd = d.degree();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return RatPoly(Vec::new());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            for (j, e) in d.0.iter().enumerate() {
                r[i + j] -= &c * e;
            }
            q[i] = c;
        }
        RatPoly(q).trim()
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        RatPoly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
        .trim()
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Primitive integer multiple with positive leading coefficient.
    pub(crate) fn to_primitive(&self) -> IntPolynomial {
        let denom = self.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPolynomial::new(
            self.0
                .iter()
                .map(|c| (c * BigRational::from_integer(denom.clone())).to_integer())
                .collect(),
        )
        .primitive()
    }
}

/// Greatest common divisor over the rationals, as a primitive integer polynomial
/// with positive leading coefficient (`1` for coprime inputs).
pub fn poly_gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let g = RatPoly::from_int(a).gcd(&RatPoly::from_int(b));
    if g.is_zero() {
        IntPolynomial::zero()
    } else {
        g.to_primitive()
    }
}

/// Quotient over the rationals, returned primitive.
fn rat_quotient(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let q = RatPoly::from_int(a).quotient(&RatPoly::from_int(b));
    if q.is_zero() {
        IntPolynomial::one()
    } else {
        q.to_primitive()
    }
}

/// Squarefree factors `s_1, s_2, …` with `p = c · ∏ s_i^i` (Yun's algorithm).
pub fn squarefree_decomposition(p: &IntPolynomial) -> Vec<IntPolynomial> {
    let p = p.primitive();
    if p.degree() == 0 {
        return Vec::new();
    }
    let f = RatPoly::from_int(&p);
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.quotient(&a0);
    let c = df.quotient(&a0);
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    while b.degree() > 0 {
        let a = b.gcd(&d);
        out.push(a.to_primitive());
        b = b.quotient(&a);
        let c = d.quotient(&a);
        d = c.sub(&b.derivative());
    }
    while out.last().is_some_and(|s| s.degree() == 0) {
        out.pop();
    }
    out
}

/// Squarefree part `p / gcd(p, p')`, primitive.
pub fn squarefree_part(p: &IntPolynomial) -> IntPolynomial {
    let p = p.primitive();
    if p.degree() == 0 {
        return p;
    }
    rat_quotient(&p, &poly_gcd(&p, &p.derivative()))
}

/// Euler's totient.
pub fn totient(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: usize) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic index starts at 1");
    let mut p = IntPolynomial::x_pow_minus_one(n);
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = p.div_exact(&cyclotomic(d)).expect("cyclotomic factors divide x^n - 1");
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicFactor {
    pub order: usize,
    pub poly: IntPolynomial,
    pub multiplicity: usize,
}

/// `f = g·h` with `g` a product of cyclotomic polynomials and `h` free of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicSplit {
    pub g: IntPolynomial,
    pub h: IntPolynomial,
    pub factors: Vec<CyclotomicFactor>,
    pub gcd: IntPolynomial,
}

/// Divides out every cyclotomic factor. Orders are scanned up to `2·deg²`,
/// which covers every `n` with `φ(n) ≤ deg`.
pub fn cyclotomic_split(f: &IntPolynomial) -> CyclotomicSplit {
    let deg = f.degree();
    let mut h = f.clone();
    let mut g = IntPolynomial::one();
    let mut factors = Vec::new();
    for n in 1..=(2 * deg * deg).max(2) {
        if totient(n) > h.degree() {
            continue;
        }
        let phi = cyclotomic(n);
        let mut multiplicity = 0;
        while let Some(q) = h.div_exact(&phi) {
            h = q;
            g = &g * &phi;
            multiplicity += 1;
        }
        if multiplicity > 0 {
            factors.push(CyclotomicFactor { order: n, poly: phi, multiplicity });
        }
    }
    let gcd = poly_gcd(&g, &h);
    CyclotomicSplit { g, h, factors, gcd }
}

/// Whether some cyclotomic polynomial divides `p`.
pub fn has_cyclotomic_factor(p: &IntPolynomial) -> bool {
    let deg = p.degree();
    (1..=(2 * deg * deg).max(2))
        .filter(|&n| totient(n) <= deg)
        .any(|n| p.div_exact(&cyclotomic(n)).is_some())
}

/// Number of sign changes of a Sturm sequence at `x`.
fn sign_changes(seq: &[RatPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots of `p` in `(lo, hi]`, by Sturm's theorem.
pub(crate) fn real_roots_between(p: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> usize {
    let p = squarefree_part(p);
    if p.degree() == 0 {
        return 0;
    }
    let mut seq = vec![RatPoly::from_int(&p)];
    seq.push(seq[0].derivative());
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(RatPoly(r.0.into_iter().map(|c| -c).collect()));
    }
    sign_changes(&seq, lo).saturating_sub(sign_changes(&seq, hi))
}

/// Number of distinct roots of `p` on the unit circle, decided exactly.
///
/// Roots at `±1` are tested directly. The remaining unit-circle roots lie in
/// the self-reciprocal part `r = gcd(p, p*)`, and writing `r(x) = x^k q(x + 1/x)`
/// sends them to the real roots of `q` inside `(−2, 2)`.
pub fn unit_circle_root_count(p: &IntPolynomial) -> usize {
    let mut s = squarefree_part(p);
    if s.degree() == 0 {
        return 0;
    }
    let mut count = 0;
    for root in [1i64, -1] {
        let lin = IntPolynomial::from_i64(&[-root, 1]);
        if let Some(q) = s.div_exact(&lin) {
            count += 1;
            s = q;
        }
    }
    let r = poly_gcd(&s, &s.reverse());
    if r.degree() == 0 {
        return count;
    }
    let q = reciprocal_to_trace(&r);
    let two = BigRational::from_integer(BigInt::from(2));
    count + 2 * real_roots_between(&q, &-two.clone(), &two)
}

/// `q` with `r(x) = x^k q(x + 1/x)` for a palindromic `r` of degree `2k`.
pub(crate) fn reciprocal_to_trace(r: &IntPolynomial) -> IntPolynomial {
    let a = r.coeffs();
    let k = r.degree() / 2;
    debug_assert_eq!(r.degree() % 2, 0);
    debug_assert!((0..=2 * k).all(|i| a[i] == a[2 * k - i]));
    // Dickson polynomials: x^j + x^{-j} = D_j(x + 1/x)
    let t = IntPolynomial::from_i64(&[0, 1]);
    let mut dickson = vec![IntPolynomial::from_i64(&[2]), t.clone()];
    for j in 2..=k {
        let next = &(&t * &dickson[j - 1]) - &dickson[j - 2];
        dickson.push(next);
    }
    let mut q = IntPolynomial::new(vec![a[k].clone()]);
    for j in 1..=k {
        q = &q + &(&IntPolynomial::new(vec![a[k + j].clone()]) * &dickson[j]);
    }
    q
}
