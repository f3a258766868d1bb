//! Binary quartic forms `a X^4 + b X^3 Y + c X^2 Y^2 + d X Y^3 + e Y^4` with
//! exact rational coefficients, their classical invariants `I`, `J` and
//! discriminant, and the two group actions used elsewhere in the crate:
//!
//! * the substitution action `g . f(X, Y) = f((X, Y) g)` of unimodular integer
//!   matrices, and
//! * the twisted projective action `g . f = det(g)^-2 f((X, Y) g)` under which
//!   scalar matrices act trivially and `I`, `J` are absolute invariants.
//!
//! Row-vector convention: `(X, Y) . [[p, q], [r, s]] = (pX + rY, qX + sY)`.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuarticError {
    #[error("invariants not divisible: 12 must divide I and 432 must divide J (I = {i}, J = {j})")]
    NotDivisible { i: BigRational, j: BigRational },
    #[error("quartic is not monic")]
    NotMonic,
    #[error("quartic has non-integral coefficients")]
    NotIntegral,
    #[error("X^3 Y coefficient {0} is not divisible by 4")]
    ShiftNotIntegral(BigInt),
    #[error("transform is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
    #[error("transform is singular")]
    SingularTransform,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Degree-2 and degree-3 invariants plus the discriminant `(4 I^3 - J^2) / 27`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub i: BigRational,
    pub j: BigRational,
    pub disc: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQuartic {
    coeffs: [BigRational; 5],
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn divides(k: i64, v: &BigRational) -> bool {
    v.is_integer() && v.numer().is_multiple_of(&BigInt::from(k))
}

/// Expand `sum_k c_k L1^(4-k) L2^k` where `L1 = p X + r Y`, `L2 = q X + s Y`.
/// Coefficient vectors are indexed by the power of `Y`.
pub(crate) fn substitute<T>(c: &[T; 5], m: &[T; 4]) -> [T; 5]
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    fn mul_lin<T>(poly: &[T], x: &T, y: &T) -> Vec<T>
    where
        T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
    {
        let mut out = vec![T::zero(); poly.len() + 1];
        for (k, a) in poly.iter().enumerate() {
            out[k] = out[k].clone() + a.clone() * x.clone();
            out[k + 1] = out[k + 1].clone() + a.clone() * y.clone();
        }
        out
    }
    let [p, q, r, s] = m;
    // powers of L1 and L2 up to degree 4
    let mut l1 = vec![vec![T::one()]];
    let mut l2 = vec![vec![T::one()]];
    for k in 0..4 {
        l1.push(mul_lin(&l1[k], p, r));
        l2.push(mul_lin(&l2[k], q, s));
    }
    let mut out: [T; 5] = std::array::from_fn(|_| T::zero());
    for (k, ck) in c.iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        let a = &l1[4 - k];
        let b = &l2[k];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = out[i + j].clone() + ck.clone() * ai.clone() * bj.clone();
            }
        }
    }
    out
}

impl BinaryQuartic {
    pub fn new(coeffs: [BigRational; 5]) -> Self {
        Self { coeffs }
    }

    pub fn from_ints(c: [i64; 5]) -> Self {
        Self::new(c.map(int))
    }

    pub fn from_bigints(c: [BigInt; 5]) -> Self {
        Self::new(c.map(BigRational::from_integer))
    }

    pub fn coeffs(&self) -> &[BigRational; 5] {
        &self.coeffs
    }

    /// Integer coefficients, if the form is integral.
    pub fn integer_coeffs(&self) -> Option<[BigInt; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(std::array::from_fn(|k| self.coeffs[k].to_integer()))
    }

    /// Coefficients as `i128` when integral and representable.
    pub fn i128_coeffs(&self) -> Option<[i128; 5]> {
        let c = self.integer_coeffs()?;
        let v: Vec<i128> = c.iter().filter_map(|x| x.to_i128()).collect();
        v.try_into().ok()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integral with `4 | b`, `6 | c`, `4 | d`.
    pub fn is_integer_matrix(&self) -> bool {
        let [_, b, c, d, _] = &self.coeffs;
        self.is_integral() && divides(4, b) && divides(6, c) && divides(4, d)
    }

    /// Integral, monic and without `X^3 Y` term.
    pub fn is_flattened(&self) -> bool {
        self.is_integral() && self.coeffs[0].is_one() && self.coeffs[1].is_zero()
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut xp = BigRational::one();
        let mut terms: [BigRational; 5] = std::array::from_fn(|_| BigRational::zero());
        for k in (0..5).rev() {
            terms[k] = xp.clone();
            xp = &xp * x;
        }
        let mut yp = BigRational::one();
        for k in 0..5 {
            acc += &self.coeffs[k] * &terms[k] * &yp;
            yp = &yp * y;
        }
        acc
    }

    pub fn eval_int(&self, x: i64, y: i64) -> BigRational {
        self.eval(&int(x), &int(y))
    }

    pub fn invariants(&self) -> Invariants {
        let [a, b, c, d, e] = &self.coeffs;
        let i = int(12) * a * e - int(3) * b * d + c * c;
        let j = int(72) * a * c * e - int(27) * a * d * d - int(27) * b * b * e + int(9) * b * c * d
            - int(2) * c * c * c;
        let disc = (int(4) * &i * &i * &i - &j * &j) / int(27);
        Invariants { i, j, disc }
    }

    /// `(I / 12, J / 432)` when both quotients are integers.
    pub fn derived_invariants(&self) -> Result<(BigInt, BigInt), QuarticError> {
        let Invariants { i, j, .. } = self.invariants();
        let ip = &i / int(12);
        let jp = &j / int(432);
        if ip.is_integer() && jp.is_integer() {
            Ok((ip.to_integer(), jp.to_integer()))
        } else {
            Err(QuarticError::NotDivisible { i, j })
        }
    }

    /// `f((X, Y) g)` without determinant scaling.
    pub fn substitute(&self, g: &ProjectiveTransform) -> Self {
        let m = g.entries().clone().map(BigRational::from_integer);
        Self::new(substitute(&self.coeffs, &m))
    }

    /// The substitution action of a determinant `+-1` integer matrix.
    pub fn act_unimodular(&self, g: &ProjectiveTransform) -> Result<Self, QuarticError> {
        if !g.is_unimodular() {
            return Err(QuarticError::NotUnimodular(g.det().clone()));
        }
        Ok(self.substitute(g))
    }

    /// Twisted action `det(g)^-2 f((X, Y) g)`.
    pub fn act_twisted(&self, g: &ProjectiveTransform) -> Self {
        let det = BigRational::from_integer(g.det().clone());
        let scale = (&det * &det).recip();
        let mut out = self.substitute(g);
        for c in out.coeffs.iter_mut() {
            *c = &*c * &scale;
        }
        out
    }

    /// Removes the `X^3 Y` term of a monic integral form with `4 | b` through
    /// `X -> X + shift Y`, `shift = -b / 4`.
    pub fn complete(&self) -> Result<(Self, BigInt), QuarticError> {
        if !self.is_integral() {
            return Err(QuarticError::NotIntegral);
        }
        if !self.coeffs[0].is_one() {
            return Err(QuarticError::NotMonic);
        }
        let b = self.coeffs[1].to_integer();
        if !b.is_multiple_of(&BigInt::from(4)) {
            return Err(QuarticError::ShiftNotIntegral(b));
        }
        let shift: BigInt = -(b / BigInt::from(4));
        let g = ProjectiveTransform::shear(shift.clone());
        let out = self.substitute(&g);
        debug_assert!(out.is_flattened());
        Ok((out, shift))
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, QuarticError> {
    let s = s.trim();
    let bad = || QuarticError::Parse(format!("invalid number {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for BinaryQuartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_rational).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for BinaryQuartic {
    type Err = QuarticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 5 {
            return Err(QuarticError::Parse(format!(
                "expected 5 comma-separated coefficients, got {}",
                parts.len()
            )));
        }
        let mut coeffs: [BigRational; 5] = std::array::from_fn(|_| BigRational::zero());
        for (slot, p) in coeffs.iter_mut().zip(parts) {
            *slot = parse_rational(p)?;
        }
        Ok(Self::new(coeffs))
    }
}

/// An element of PGL2(Q), stored as its canonical integer representative:
/// content 1 and first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveTransform {
    entries: [BigInt; 4],
    det: BigInt,
}

impl ProjectiveTransform {
    /// Canonicalizes the integer matrix `[[a, b], [c, d]]`.
    pub fn new(entries: [BigInt; 4]) -> Result<Self, QuarticError> {
        let content = entries.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if content.is_zero() {
            return Err(QuarticError::SingularTransform);
        }
        let sign_neg = entries.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
        let divisor = if sign_neg { -content } else { content };
        let entries = entries.map(|x| x / &divisor);
        let det = &entries[0] * &entries[3] - &entries[1] * &entries[2];
        if det.is_zero() {
            return Err(QuarticError::SingularTransform);
        }
        Ok(Self { entries, det })
    }

    pub fn from_ints(e: [i64; 4]) -> Result<Self, QuarticError> {
        Self::new(e.map(BigInt::from))
    }

    /// Clears denominators of a rational matrix, then canonicalizes.
    pub fn from_rationals(e: [BigRational; 4]) -> Result<Self, QuarticError> {
        let lcm = e.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let scaled = e.map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer());
        Self::new(scaled)
    }

    pub fn identity() -> Self {
        Self::from_ints([1, 0, 0, 1]).expect("identity is nonsingular")
    }

    /// `[[1, 0], [lambda, 1]]`, i.e. `X -> X + lambda Y`.
    pub fn shear(lambda: BigInt) -> Self {
        Self::new([BigInt::one(), BigInt::zero(), lambda, BigInt::one()]).expect("det 1")
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.entries
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    /// Matrix product `self * other`, canonicalized.
    pub fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        Self::new([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
            .expect("product of nonsingular matrices is nonsingular")
    }
}

impl fmt::Display for ProjectiveTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl FromStr for ProjectiveTransform {
    type Err = QuarticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(QuarticError::Parse(format!("expected 4 matrix entries, got {}", parts.len())));
        }
        let mut e: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
        for (slot, p) in e.iter_mut().zip(parts) {
            *slot = p.trim().parse().map_err(|_| QuarticError::Parse(format!("invalid integer {p:?}")))?;
        }
        Self::new(e)
    }
}
