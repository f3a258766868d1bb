//! The explicit correspondence between integral points on `y^2 = x^3 + Ax + B`
//! and flattened quartics `X^4 + 6c X^2 Y^2 + 4d X Y^3 + e Y^4`.
//!
//! A point `(x0, y0)` maps to `X^4 - 6 x0 X^2 Y^2 + 8 y0 X Y^3 + (-4A - 3 x0^2) Y^4`,
//! whose derived invariants are `(I', J') = (-4A, -4B)`. The inverse reads
//! `A = -(3c^2 + e)/4`, `B = (c^3 + d^2 - ce)/4`, `P = (-c, d/2)` off the
//! `4d` parametrization. Integer-matrix forms with a representation of one
//! are carried to this shape by [`flatten_triple`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::quartic::{BinaryQuartic, ProjectiveTransform, QuarticError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MordellError {
    #[error("singular curve: 4A^3 + 27B^2 = 0")]
    SingularCurve,
    #[error("point ({x}, {y}) is not on the curve")]
    PointNotOnCurve { x: i64, y: i64 },
    #[error("divisibility failure: 4 must divide 3c^2 + e and c^3 + d^2 - ce")]
    DivisibilityFailure,
    #[error("quartic is not of the shape X^4 + 6c X^2 Y^2 + 4d X Y^3 + e Y^4")]
    ShapeMismatch,
    #[error("quartic is not integer-matrix")]
    NotIntegerMatrix,
    #[error("f(p, q) = {0}, expected 1")]
    NotARepresentationOfOne(BigRational),
    #[error("value does not fit in a 64-bit integer")]
    Overflow,
    #[error(transparent)]
    Quartic(#[from] QuarticError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Integral short Weierstrass model `y^2 = x^3 + Ax + B` with nonzero discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeierstrassCurve {
    a: i64,
    b: i64,
}

/// Affine integer solution. The point at infinity is never represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralPoint {
    pub x: i64,
    pub y: i64,
}

impl IntegralPoint {
    pub fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn negate(self) -> Self {
        Self { x: self.x, y: -self.y }
    }
}

impl fmt::Display for IntegralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for IntegralPoint {
    type Err = MordellError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = parse_pair(s)?;
        Ok(Self { x, y })
    }
}

pub(crate) fn parse_pair(s: &str) -> Result<(i64, i64), MordellError> {
    let bad = || MordellError::Parse(format!("expected two comma-separated integers, got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

/// `-16 (4A^3 + 27B^2)`, exact.
pub fn discriminant(a: i64, b: i64) -> BigInt {
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    BigInt::from(-16) * (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b)
}

/// `max(4|A|^3, 27B^2)`, exact.
pub fn naive_height(a: i64, b: i64) -> BigInt {
    let (a, b) = (BigInt::from(a).abs(), BigInt::from(b));
    (BigInt::from(4) * &a * &a * &a).max(BigInt::from(27) * &b * &b)
}

/// Fast path for `-16 (4A^3 + 27B^2)` when it fits in `i128`.
pub fn discriminant_i128(a: i64, b: i64) -> Option<i128> {
    let (a, b) = (a as i128, b as i128);
    let a3 = a.checked_mul(a)?.checked_mul(a)?.checked_mul(4)?;
    let b2 = b.checked_mul(b)?.checked_mul(27)?;
    a3.checked_add(b2)?.checked_mul(-16)
}

impl WeierstrassCurve {
    pub fn new(a: i64, b: i64) -> Result<Self, MordellError> {
        if discriminant(a, b).is_zero() {
            return Err(MordellError::SingularCurve);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn discriminant(&self) -> BigInt {
        discriminant(self.a, self.b)
    }

    pub fn height(&self) -> BigInt {
        naive_height(self.a, self.b)
    }

    /// `x^3 + Ax + B`, or `None` on `i128` overflow.
    pub fn rhs_i128(&self, x: i64) -> Option<i128> {
        let x = x as i128;
        x.checked_mul(x)?
            .checked_mul(x)?
            .checked_add(x.checked_mul(self.a as i128)?)?
            .checked_add(self.b as i128)
    }

    pub fn contains(&self, p: IntegralPoint) -> bool {
        let (x, y) = (BigInt::from(p.x), BigInt::from(p.y));
        &y * &y == &x * &x * &x + BigInt::from(self.a) * &x + BigInt::from(self.b)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl FromStr for WeierstrassCurve {
    type Err = MordellError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = parse_pair(s)?;
        Self::new(a, b)
    }
}

/// `X^4 - 6 x0 X^2 Y^2 + 8 y0 X Y^3 + (-4A - 3 x0^2) Y^4`.
pub fn point_to_quartic(curve: &WeierstrassCurve, p: IntegralPoint) -> Result<BinaryQuartic, MordellError> {
    if !curve.contains(p) {
        return Err(MordellError::PointNotOnCurve { x: p.x, y: p.y });
    }
    let x0 = BigInt::from(p.x);
    let y0 = BigInt::from(p.y);
    let e = BigInt::from(-4) * curve.a - BigInt::from(3) * &x0 * &x0;
    Ok(BinaryQuartic::from_bigints([
        BigInt::one(),
        BigInt::zero(),
        BigInt::from(-6) * x0,
        BigInt::from(8) * y0,
        e,
    ]))
}

/// `(c, d, e)` with `f = X^4 + 6c X^2 Y^2 + 4d X Y^3 + e Y^4`.
pub fn params_4d(f: &BinaryQuartic) -> Option<(BigInt, BigInt, BigInt)> {
    if !f.is_flattened() {
        return None;
    }
    let [_, _, c, d, e] = f.integer_coeffs()?;
    let (c6, r6) = c.div_rem(&BigInt::from(6));
    let (d4, r4) = d.div_rem(&BigInt::from(4));
    (r6.is_zero() && r4.is_zero()).then_some((c6, d4, e))
}

/// `(c, d, e)` with `f = X^4 + 6c X^2 Y^2 + 8d X Y^3 + e Y^4`; these are
/// exactly the images of integral points when additionally `e = c^2 mod 4`.
pub fn params_8d(f: &BinaryQuartic) -> Option<(BigInt, BigInt, BigInt)> {
    let (c, d, e) = params_4d(f)?;
    let (d8, r) = d.div_rem(&BigInt::from(2));
    r.is_zero().then_some((c, d8, e))
}

/// `X^4 + 6c X^2 Y^2 + 4d X Y^3 + e Y^4`.
pub fn quartic_from_4d(c: i64, d: i64, e: i64) -> BinaryQuartic {
    BinaryQuartic::from_bigints([
        BigInt::one(),
        BigInt::zero(),
        BigInt::from(c) * 6,
        BigInt::from(d) * 4,
        BigInt::from(e),
    ])
}

fn to_i64(v: &BigInt) -> Result<i64, MordellError> {
    v.to_i64().ok_or(MordellError::Overflow)
}

/// Inverse of [`point_to_quartic`] on the `4d` parametrization.
pub fn quartic_to_point(f: &BinaryQuartic) -> Result<(WeierstrassCurve, IntegralPoint), MordellError> {
    let (c, d, e) = params_4d(f).ok_or(MordellError::ShapeMismatch)?;
    let four = BigInt::from(4);
    let i_num = BigInt::from(3) * &c * &c + &e;
    let j_num = &c * &c * &c + &d * &d - &c * &e;
    if !i_num.is_multiple_of(&four) || !j_num.is_multiple_of(&four) {
        return Err(MordellError::DivisibilityFailure);
    }
    // 4 | c^3 + d^2 - ce and 4 | 3c^2 + e force d even
    debug_assert!(d.is_even());
    let a = to_i64(&(-(i_num / &four)))?;
    let b = to_i64(&(j_num / &four))?;
    let curve = WeierstrassCurve::new(a, b)?;
    let p = IntegralPoint::new(to_i64(&-c)?, to_i64(&(d / 2))?);
    debug_assert!(curve.contains(p));
    Ok((curve, p))
}

/// `y^2 = x^3 - 4I' x - 16J'`.
pub fn jacobian_of(f: &BinaryQuartic) -> Result<WeierstrassCurve, MordellError> {
    if !f.is_integer_matrix() {
        return Err(MordellError::Quartic(QuarticError::NotDivisible {
            i: f.invariants().i,
            j: f.invariants().j,
        }));
    }
    let (ip, jp) = f.derived_invariants()?;
    let a = to_i64(&(BigInt::from(-4) * ip))?;
    let b = to_i64(&(BigInt::from(-16) * jp))?;
    WeierstrassCurve::new(a, b)
}

/// `(alpha, beta)` with `p alpha + q beta = 1` and `|beta|` minimal
/// (ties resolved towards positive `beta`). Requires `gcd(p, q) = 1`.
pub fn bezout_min_beta(p: &BigInt, q: &BigInt) -> Option<(BigInt, BigInt)> {
    let eg = p.extended_gcd(q);
    let beta = match eg.gcd.to_i8() {
        Some(1) => eg.y,
        Some(-1) => -eg.y,
        _ => return None,
    };
    if p.is_zero() {
        // q = +-1: beta = q, alpha free; take alpha = 0
        return Some((BigInt::zero(), q.clone()));
    }
    // beta ranges over beta0 - k p; pick the representative in (-|p|/2, |p|/2]
    let m = p.abs();
    let mut b = beta.mod_floor(&m);
    if &b * 2 > m {
        b -= &m;
    }
    let rem = BigInt::one() - q * &b;
    debug_assert!(rem.is_multiple_of(p));
    Some((rem / p, b))
}

/// Unimodular matrix with first row `(p, q)`, so that `(1, 0) g = (p, q)`.
pub fn completion(p: &BigInt, q: &BigInt) -> Option<ProjectiveTransform> {
    let (alpha, beta) = bezout_min_beta(p, q)?;
    Some(ProjectiveTransform::new([p.clone(), q.clone(), -beta, alpha]).expect("det 1"))
}

/// Flattens `f` along a unimodular `g` whose first row is a representation
/// of one: `g . f` is monic and is then completed.
pub fn flatten_with_completion(
    f: &BinaryQuartic,
    g: &ProjectiveTransform,
) -> Result<BinaryQuartic, MordellError> {
    if !f.is_integer_matrix() {
        return Err(MordellError::NotIntegerMatrix);
    }
    let moved = f.act_unimodular(g)?;
    let lead = moved.coeffs()[0].clone();
    if !lead.is_one() {
        return Err(MordellError::NotARepresentationOfOne(lead));
    }
    Ok(moved.complete()?.0)
}

/// The unique flattened SL2(Z)-transform of `f` sending `(p, q)` to `(1, 0)`.
pub fn flatten_triple(f: &BinaryQuartic, p: i64, q: i64) -> Result<BinaryQuartic, MordellError> {
    if !f.is_integer_matrix() {
        return Err(MordellError::NotIntegerMatrix);
    }
    let value = f.eval_int(p, q);
    if !value.is_one() {
        return Err(MordellError::NotARepresentationOfOne(value));
    }
    let g = completion(&BigInt::from(p), &BigInt::from(q)).expect("f(p, q) = 1 forces gcd(p, q) = 1");
    flatten_with_completion(f, &g)
}
