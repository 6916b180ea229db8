//! Scalar fields and quantum-integer arithmetic.
//!
//! Two concrete fields are supported: exact rationals ([`Rational`]) and
//! complex doubles ([`Complex64`]). Exact computations require a rational
//! square root of `q`, so every representation matrix has rational entries.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Nullspace};

pub use num_complex::Complex64;
pub type Rational = num_rational::BigRational;

/// Default relative tolerance for approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A field the whole pipeline can compute over.
///
/// Exact fields ignore tolerances; approximate fields compare with
/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_complex(&self) -> Complex64;
    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Option<Self>;

    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64;

    /// Square root inside the field, if one exists.
    fn sqrt(&self) -> Option<Self>;

    fn close(&self, other: &Self, tol: f64) -> bool;

    fn is_negligible(&self, tol: f64) -> bool {
        self.close(&Self::zero(), tol)
    }

    /// Kernel of a matrix over this field.
    fn nullspace(m: &Matrix<Self>, tol: f64) -> Nullspace<Self>;

    /// Kernel of a sparse system given as rows of `(column, coefficient)`.
    fn sparse_nullspace(rows: Vec<Vec<(usize, Self)>>, cols: usize, tol: f64) -> Nullspace<Self>;

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }

    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Approx(_) => None,
        }
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }

    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn close(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn nullspace(m: &Matrix<Self>, _tol: f64) -> Nullspace<Self> {
        crate::linalg::exact_nullspace(m)
    }

    fn sparse_nullspace(rows: Vec<Vec<(usize, Self)>>, cols: usize, _tol: f64) -> Nullspace<Self> {
        crate::linalg::exact_sparse_nullspace(rows, cols)
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::Approx(*self)
    }

    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.to_complex())
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn sqrt(&self) -> Option<Self> {
        Some(Complex64::sqrt(*self))
    }

    fn close(&self, other: &Self, tol: f64) -> bool {
        approx_eq(*self, *other, tol)
    }

    fn nullspace(m: &Matrix<Self>, tol: f64) -> Nullspace<Self> {
        crate::linalg::approx_nullspace(m, tol)
    }

    fn sparse_nullspace(rows: Vec<Vec<(usize, Self)>>, cols: usize, tol: f64) -> Nullspace<Self> {
        crate::linalg::approx_sparse_nullspace(rows, cols, tol)
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: Complex64, b: Complex64, tol: f64) -> bool {
    let scale = 1f64.max(a.norm()).max(b.norm());
    (a - b).norm() <= tol * scale
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators and denominators together
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn bigint_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Exact square root of a non-negative rational, when it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    let n = bigint_sqrt(r.numer())?;
    let d = bigint_sqrt(r.denom())?;
    Some(Rational::new(n, d))
}

/// A field element tagged with its mode; used at API, JSON and CLI boundaries.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(Complex64),
}

impl Scalar {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => r.to_complex(),
            Scalar::Approx(c) => *c,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", format_rational(r)),
            Scalar::Approx(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

/// Always `p/q`, including integers (`4/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Domain(format!("zero denominator in `{s}`")));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(r)
}

/// Parses `re,im` (or a bare real).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("invalid complex `{s}`"));
    let mut parts = s.split(',').map(str::trim);
    let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&format_rational(r)),
            Scalar::Approx(c) => {
                use serde::ser::SerializeStruct;
                let mut st = serializer.serialize_struct("Complex", 2)?;
                st.serialize_field("re", &c.re)?;
                st.serialize_field("im", &c.im)?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Cx { re: f64, im: f64 },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => parse_rational(&s).map(Scalar::Exact).map_err(serde::de::Error::custom),
            Repr::Cx { re, im } => Ok(Scalar::Approx(Complex64::new(re, im))),
        }
    }
}

/// The deformation parameter together with a chosen square root.
#[derive(Clone, Debug)]
pub struct QContext<F: Field> {
    pub q: F,
    pub sqrt_q: F,
    pub tol: f64,
}

impl<F: Field> QContext<F> {
    /// Builds a context from a square root `s`; `q = s²`.
    pub fn from_sqrt(sqrt_q: F, tol: f64) -> Result<Self> {
        let q = sqrt_q.clone() * &sqrt_q;
        let ctx = QContext { q, sqrt_q, tol };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Builds a context from `q` and a declared square root, checking `s² = q`.
    pub fn new(q: F, sqrt_q: F, tol: f64) -> Result<Self> {
        if !(sqrt_q.clone() * &sqrt_q).close(&q, tol) {
            return Err(Error::Domain(format!(
                "declared sqrt {:?} does not square to q = {:?}",
                sqrt_q.to_scalar(),
                q.to_scalar()
            )));
        }
        let ctx = QContext { q, sqrt_q, tol };
        ctx.validate()?;
        Ok(ctx)
    }

    fn validate(&self) -> Result<()> {
        if !(tol_ok(self.tol)) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if self.q.is_negligible(self.tol) {
            return Err(Error::Domain("q = 0 is not allowed".into()));
        }
        if (self.q.clone() + F::one()).is_negligible(self.tol) {
            return Err(Error::Domain("q = -1 is not allowed".into()));
        }
        Ok(())
    }

    pub fn q_int(&self, n: u32) -> F {
        q_int(n, &self.q)
    }

    pub fn q_factorial(&self, n: u32) -> F {
        q_factorial(n, &self.q)
    }

    /// `[n]` at `q²`.
    pub fn q_int_sq(&self, n: u32) -> F {
        q_int(n, &(self.q.clone() * &self.q))
    }

    /// `q^{k/2}`.
    pub fn half_pow(&self, k: u32) -> F {
        self.sqrt_q.powu(k)
    }
}

fn tol_ok(t: f64) -> bool {
    t > 0.0 && t.is_finite()
}

impl QContext<Complex64> {
    /// Approximate context using the principal square root.
    pub fn approx(q: Complex64, tol: f64) -> Result<Self> {
        QContext::new(q, q.sqrt(), tol)
    }
}

impl QContext<Rational> {
    /// Exact context `q = s²`.
    pub fn exact(sqrt_q: Rational) -> Result<Self> {
        QContext::from_sqrt(sqrt_q, DEFAULT_TOL)
    }

    /// Exact context from `q` alone, when `q` is a rational square.
    pub fn exact_from_q(q: &Rational) -> Result<Self> {
        let s = rational_sqrt(q).ok_or_else(|| {
            Error::Domain(format!("q = {} has no rational square root", format_rational(q)))
        })?;
        QContext::exact(s)
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`; zero when `n = 0`.
pub fn q_int<F: Field>(n: u32, q: &F) -> F {
    let mut acc = F::zero();
    let mut power = F::one();
    for _ in 0..n {
        acc = acc + &power;
        power = power * q;
    }
    acc
}

pub fn q_factorial<F: Field>(n: u32, q: &F) -> F {
    (1..=n).fold(F::one(), |acc, k| acc * &q_int(k, q))
}

/// The two excluded values `w±(λ) = (-λ ± √(-1-2λ)) / (1+λ)`.
///
/// Exact when `-1-2λ` is a rational square, otherwise complex doubles.
pub fn excluded_q(lambda: &Scalar) -> Result<(Scalar, Scalar)> {
    match lambda {
        Scalar::Exact(l) => {
            let denom = l + Rational::one();
            if denom.is_zero() {
                return Err(Error::Domain("λ = -1 makes w± undefined".into()));
            }
            let disc = -Rational::one() - l * Rational::from_i64(2);
            if let Some(root) = (!disc.is_negative()).then(|| rational_sqrt(&disc)).flatten() {
                let plus = (-l.clone() + &root) / &denom;
                let minus = (-l.clone() - &root) / &denom;
                return Ok((Scalar::Exact(plus), Scalar::Exact(minus)));
            }
            excluded_q(&Scalar::Approx(l.to_complex()))
        }
        Scalar::Approx(l) => {
            let denom = l + 1.0;
            if denom.norm() == 0.0 {
                return Err(Error::Domain("λ = -1 makes w± undefined".into()));
            }
            let root = (-1.0 - 2.0 * l).sqrt();
            Ok((Scalar::Approx((-l + root) / denom), Scalar::Approx((-l - root) / denom)))
        }
    }
}

/// Three-valued answer for the excluded-value test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    /// Only the sufficient condition was available and it failed.
    UnknownSufficientCheckFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub n: u32,
    pub q: Scalar,
    pub q_int_nonzero: bool,
    pub q_factorial_nonzero: bool,
    pub avoids_excluded: Verdict,
    /// The rational-angle candidate `λ = -(1+q²)/(1+q)²`, when computed exactly.
    pub lambda_candidate: Option<Scalar>,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.q_int_nonzero && self.q_factorial_nonzero && self.avoids_excluded == Verdict::Yes
    }

    /// First failing hypothesis, for refusals.
    pub fn failure(&self) -> Option<String> {
        if !self.q_int_nonzero {
            Some(format!("[{}]_q = 0", self.n))
        } else if !self.q_factorial_nonzero {
            Some(format!("[{}]_q! = 0", self.n.saturating_sub(2)))
        } else {
            match self.avoids_excluded {
                Verdict::Yes => None,
                Verdict::No => Some("q is an excluded value w±(cos 2kπ/m)".into()),
                Verdict::UnknownSufficientCheckFailed => {
                    Some("q lies on the positive real axis or the unit circle (cannot certify)".into())
                }
            }
        }
    }
}

/// Rational values of cosines at rational multiples of π.
pub fn is_rational_angle_cosine(l: &Rational) -> bool {
    let half = rational(1, 2);
    l.is_zero() || l.abs() == half || l.abs() == Rational::one()
}

/// `cos(2π/m)` has degree `φ(m)/2` over ℚ; the moduli with degree at most two.
pub fn low_degree_cosine_moduli() -> Vec<u32> {
    (1..=12).filter(|&m| totient(m) <= 4).collect()
}

fn totient(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

/// Minimal polynomials (monic, coefficients low→high) of `cos(2π/m)` for `φ(m) = 4`.
fn quadratic_cosine_minpolys() -> Vec<(u32, [Rational; 3])> {
    // cos(2π/5): x² + x/2 - 1/4; cos(2π/8): x² - 1/2; cos(2π/10): x² - x/2 - 1/4;
    // cos(2π/12): x² - 3/4
    vec![
        (5, [rational(-1, 4), rational(1, 2), Rational::one()]),
        (8, [rational(-1, 2), Rational::zero(), Rational::one()]),
        (10, [rational(-1, 4), rational(-1, 2), Rational::one()]),
        (12, [rational(-3, 4), Rational::zero(), Rational::one()]),
    ]
}

/// Decides whether an exact `q` is one of the excluded values.
///
/// Solving `w±(λ) = q` gives `(q+1)²λ² + 2(q²+q+1)λ + (q²+1) = 0`. Rational roots
/// are tested with Niven's theorem; an irreducible quadratic is compared with the
/// minimal polynomials of the quadratic-degree rational-angle cosines.
fn exact_excluded(q: &Rational) -> (bool, Option<Rational>) {
    let one = Rational::one();
    let two = Rational::from_i64(2);
    let a = (q + &one) * (q + &one);
    if a.is_zero() {
        // q = -1: rejected at context construction, nothing to decide here
        return (false, None);
    }
    let b = two.clone() * (q * q + q + &one);
    let c = q * q + &one;
    let disc = b.clone() * &b - Rational::from_i64(4) * &a * &c;
    let satisfies = |l: &Rational| -> bool {
        // the squared equation may admit spurious roots; check w±(λ) = q directly
        match excluded_q(&Scalar::Exact(l.clone())) {
            Ok((Scalar::Exact(p), Scalar::Exact(m))) => p == *q || m == *q,
            Ok((p, m)) => {
                let qc = q.to_complex();
                approx_eq(p.to_complex(), qc, 1e-12) || approx_eq(m.to_complex(), qc, 1e-12)
            }
            Err(_) => false,
        }
    };
    if let Some(root) = rational_sqrt(&disc) {
        let mut candidate = None;
        let mut excluded = false;
        for sign in [1i64, -1] {
            let l = (-b.clone() + root.clone() * Rational::from_i64(sign)) / (two.clone() * &a);
            if l == -one.clone() {
                continue;
            }
            candidate = Some(l.clone());
            if is_rational_angle_cosine(&l) && satisfies(&l) {
                excluded = true;
            }
        }
        (excluded, candidate)
    } else {
        let monic = [c / &a, b / &a, one];
        let excluded = quadratic_cosine_minpolys().iter().any(|(_, p)| *p == monic);
        (excluded, None)
    }
}

/// Checks the density hypotheses for `q` and `n`.
pub fn is_q_admissible(q: &Scalar, n: u32, tol: f64) -> Admissibility {
    match q {
        Scalar::Exact(qr) => {
            let qi = q_int(n, qr);
            let qf = q_factorial(n.saturating_sub(2), qr);
            let (excluded, lambda) = exact_excluded(qr);
            Admissibility {
                n,
                q: q.clone(),
                q_int_nonzero: !qi.is_zero(),
                q_factorial_nonzero: !qf.is_zero(),
                avoids_excluded: if excluded { Verdict::No } else { Verdict::Yes },
                lambda_candidate: lambda.map(Scalar::Exact),
            }
        }
        Scalar::Approx(qc) => {
            let qi = q_int(n, qc);
            let qf = q_factorial(n.saturating_sub(2), qc);
            let on_positive_axis = qc.im.abs() <= tol * qc.norm().max(1.0) && qc.re > 0.0;
            let on_unit_circle = (qc.norm() - 1.0).abs() <= tol;
            let avoids = if on_positive_axis || on_unit_circle {
                Verdict::UnknownSufficientCheckFailed
            } else {
                Verdict::Yes
            };
            let lambda = -(1.0 + qc * qc) / ((1.0 + qc) * (1.0 + qc));
            Admissibility {
                n,
                q: q.clone(),
                q_int_nonzero: !qi.is_negligible(tol),
                q_factorial_nonzero: !qf.is_negligible(tol),
                avoids_excluded: avoids,
                lambda_candidate: Some(Scalar::Approx(lambda)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn q_int_values() {
        assert_eq!(q_int(3, &r(2, 1)), r(7, 1));
        assert_eq!(q_int(2, &r(-1, 1)), r(0, 1));
        assert_eq!(q_int(0, &r(5, 1)), r(0, 1));
        for n in 0..10 {
            assert_eq!(q_int(n, &r(1, 1)), r(n as i64, 1));
        }
    }

    #[test]
    fn q_factorial_values() {
        assert_eq!(q_factorial(0, &r(9, 7)), r(1, 1));
        let expected = q_int(1, &r(2, 1)) * q_int(2, &r(2, 1)) * q_int(3, &r(2, 1));
        assert_eq!(expected, r(21, 1));
        assert_eq!(q_factorial(3, &r(2, 1)), expected);
        assert_eq!(q_factorial(2, &r(-1, 1)), r(0, 1));
    }

    #[test]
    fn excluded_q_examples() {
        let (p, m) = excluded_q(&Scalar::Exact(r(0, 1))).unwrap();
        assert!(approx_eq(p.to_complex(), Complex64::new(0.0, 1.0), 1e-14));
        assert!(approx_eq(m.to_complex(), Complex64::new(0.0, -1.0), 1e-14));

        let (p, m) = excluded_q(&Scalar::Exact(r(-1, 2))).unwrap();
        assert_eq!((p, m), (Scalar::Exact(r(1, 1)), Scalar::Exact(r(1, 1))));

        let (p, m) = excluded_q(&Scalar::Exact(r(-17, 25))).unwrap();
        assert_eq!((p, m), (Scalar::Exact(r(4, 1)), Scalar::Exact(r(1, 4))));

        assert!(excluded_q(&Scalar::Exact(r(-1, 1))).is_err());
        assert!(excluded_q(&Scalar::Approx(Complex64::new(-1.0, 0.0))).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let a = is_q_admissible(&Scalar::Exact(r(4, 1)), 4, DEFAULT_TOL);
        assert!(a.admissible(), "{a:?}");
        assert_eq!(a.lambda_candidate, Some(Scalar::Exact(r(-17, 25))));

        let a = is_q_admissible(&Scalar::Exact(r(1, 1)), 3, DEFAULT_TOL);
        assert_eq!(a.avoids_excluded, Verdict::No);
        assert!(!a.admissible());

        let a = is_q_admissible(&Scalar::Approx(Complex64::new(2.0, 1.0)), 5, DEFAULT_TOL);
        assert!(a.admissible(), "{a:?}");

        let a = is_q_admissible(&Scalar::Approx(Complex64::new(4.0, 0.0)), 4, DEFAULT_TOL);
        assert_eq!(a.avoids_excluded, Verdict::UnknownSufficientCheckFailed);

        // q = -2: [2]_q = -1, [3]_q = 3, [4]_q = -5; λ = -5 is not a cosine
        let a = is_q_admissible(&Scalar::Exact(r(-2, 1)), 4, DEFAULT_TOL);
        assert!(a.admissible());
        // [3]_q = 0 never happens for rational q, but [2]_q = 0 needs q = -1 (rejected elsewhere)
        let a = is_q_admissible(&Scalar::Exact(r(-1, 1)), 4, DEFAULT_TOL);
        assert!(!a.q_factorial_nonzero);
    }

    #[test]
    fn cube_root_of_unity_fails_factorial() {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let a = is_q_admissible(&Scalar::Approx(w), 5, DEFAULT_TOL);
        assert!(!a.q_factorial_nonzero);
        assert_eq!(a.avoids_excluded, Verdict::UnknownSufficientCheckFailed);
    }

    #[test]
    fn low_degree_moduli() {
        assert_eq!(low_degree_cosine_moduli(), vec![1, 2, 3, 4, 5, 6, 8, 10, 12]);
        for (m, p) in quadratic_cosine_minpolys() {
            let x = (2.0 * std::f64::consts::PI / m as f64).cos();
            let v = rational_to_f64(&p[0]) + rational_to_f64(&p[1]) * x + x * x;
            assert!(v.abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn context_rejects_degenerate_q() {
        assert!(QContext::exact(r(0, 1)).is_err());
        assert!(QContext::<Rational>::new(r(-1, 1), r(1, 1), DEFAULT_TOL).is_err());
        assert!(QContext::<Rational>::new(r(4, 1), r(3, 1), DEFAULT_TOL).is_err());
        assert!(QContext::exact_from_q(&r(2, 1)).is_err());
        let c = QContext::exact_from_q(&r(9, 4)).unwrap();
        assert_eq!(c.sqrt_q, r(3, 2));
    }

    #[test]
    fn rational_text_and_json() {
        assert_eq!(parse_rational("4/1").unwrap(), r(4, 1));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), r(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&r(4, 1)), "4/1");
        let s = serde_json::to_string(&Scalar::Exact(r(-3, 2))).unwrap();
        assert_eq!(s, "\"-3/2\"");
        let s = serde_json::to_string(&Scalar::Approx(Complex64::new(1.5, -2.0))).unwrap();
        assert_eq!(s, r#"{"re":1.5,"im":-2.0}"#);
        let back: Scalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Scalar::Approx(Complex64::new(1.5, -2.0)));
        assert_eq!(parse_complex("2,1").unwrap(), Complex64::new(2.0, 1.0));
    }
}
