//! Height-ordered family sweeps: enumeration, the smooth square part of the
//! discriminant with its windowed divisor, point-count and discriminant
//! moments, and divisibility counts.
//!
//! Work is split into shards of consecutive values of the first coefficient
//! (`A`, or `d2` for marked models). Shards are independent and their
//! statistics merge by exact addition, so the merge order never changes a
//! result.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Factorization};
use crate::curve::{self, RankTable};
use crate::mordell::WeierstrassCurve;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid family specification: {0}")]
    InvalidFamily(String),
    #[error("invalid smoothness parameter: {0}")]
    InvalidSmoothness(String),
    #[error("{n} has prime factor {p} above the smoothness cutoff {cutoff}")]
    NotSmooth { n: u64, p: u64, cutoff: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("discriminant {0} exceeds the 64-bit factorization range")]
    TooLarge(i128),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error(transparent)]
    Curve(#[from] curve::CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Univ,
    Min,
    Congruence,
    /// Congruence approximation of the semistable family (primes `>= 5` only).
    SsApprox,
    Marked,
    Marked2,
}

impl FamilyKind {
    pub fn is_marked(self) -> bool {
        matches!(self, FamilyKind::Marked | FamilyKind::Marked2)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Univ => "univ",
            FamilyKind::Min => "min",
            FamilyKind::Congruence => "congruence",
            FamilyKind::SsApprox => "ss-approx",
            FamilyKind::Marked => "marked",
            FamilyKind::Marked2 => "marked2",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "univ" => FamilyKind::Univ,
            "min" => FamilyKind::Min,
            "congruence" => FamilyKind::Congruence,
            "ss-approx" => FamilyKind::SsApprox,
            "marked" => FamilyKind::Marked,
            "marked2" => FamilyKind::Marked2,
            other => return Err(SweepError::InvalidFamily(format!("unknown family {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignFilter {
    Positive,
    Negative,
    #[default]
    Any,
}

impl SignFilter {
    fn accepts(self, disc: i128) -> bool {
        match self {
            SignFilter::Positive => disc > 0,
            SignFilter::Negative => disc < 0,
            SignFilter::Any => true,
        }
    }
}

impl FromStr for SignFilter {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "positive" | "+" => Ok(SignFilter::Positive),
            "negative" | "-" => Ok(SignFilter::Negative),
            "any" => Ok(SignFilter::Any),
            other => Err(SweepError::InvalidFamily(format!("unknown sign filter {other:?}"))),
        }
    }
}

/// `(A mod m, B mod m)` must lie in `residues`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Congruence {
    pub modulus: u64,
    pub residues: BTreeSet<(u64, u64)>,
}

impl Congruence {
    fn accepts(&self, a: i64, b: i64) -> bool {
        let m = self.modulus as i64;
        self.residues.contains(&(a.rem_euclid(m) as u64, b.rem_euclid(m) as u64))
    }
}

/// Parses `m:a/b,a/b,...`.
impl FromStr for Congruence {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::InvalidFamily(format!("invalid congruence {s:?}, expected m:a/b,..."));
        let (m, rest) = s.split_once(':').ok_or_else(bad)?;
        let modulus: u64 = m.trim().parse().map_err(|_| bad())?;
        let mut residues = BTreeSet::new();
        for pair in rest.split(',') {
            let (a, b) = pair.split_once('/').ok_or_else(bad)?;
            residues.insert((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
        }
        Ok(Self { modulus, residues })
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.modulus)?;
        for (i, (a, b)) in self.residues.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}/{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default)]
    pub congruences: Vec<Congruence>,
    #[serde(default)]
    pub sign: SignFilter,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        Self { kind, congruences: Vec::new(), sign: SignFilter::Any }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.kind == FamilyKind::Congruence && self.congruences.is_empty() {
            return Err(SweepError::InvalidFamily("congruence family needs at least one congruence".into()));
        }
        if self.kind.is_marked() && !self.congruences.is_empty() {
            return Err(SweepError::InvalidFamily("congruences apply to (A, B) families only".into()));
        }
        for c in &self.congruences {
            if c.modulus < 2 {
                return Err(SweepError::BadModulus(c.modulus));
            }
            if c.residues.is_empty() || c.residues.iter().any(|&(a, b)| a >= c.modulus || b >= c.modulus) {
                return Err(SweepError::InvalidFamily(format!("bad residue set for modulus {}", c.modulus)));
            }
        }
        Ok(())
    }
}

/// A family member: `(A, B)` or a marked model `(d2, d3, d4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Member {
    Weierstrass { a: i64, b: i64 },
    Marked { d2: i64, d3: i64, d4: i64 },
}

impl Member {
    pub fn disc(&self) -> i128 {
        match *self {
            Member::Weierstrass { a, b } => {
                let (a, b) = (a as i128, b as i128);
                -16 * (4 * a * a * a + 27 * b * b)
            }
            Member::Marked { d2, d3, d4 } => {
                let (d2, d3, d4) = (d2 as i128, d3 as i128, d4 as i128);
                let (b2, b4, b6, b8) = (4 * d2, 2 * d4, d3 * d3, d2 * d3 * d3 - d4 * d4);
                -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
            }
        }
    }

    pub fn height(&self) -> u128 {
        match *self {
            Member::Weierstrass { a, b } => {
                let (a, b) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128);
                (4 * a * a * a).max(27 * b * b)
            }
            Member::Marked { d2, d3, d4 } => {
                let (d2, d3, d4) = (d2.unsigned_abs() as u128, d3.unsigned_abs() as u128, d4.unsigned_abs() as u128);
                d2.pow(6).max(d3.pow(4)).max(d4.pow(3))
            }
        }
    }

    pub fn axis(&self) -> i64 {
        match *self {
            Member::Weierstrass { a, .. } => a,
            Member::Marked { d2, .. } => d2,
        }
    }

    /// Affine integer points with `|x| <= window`.
    pub fn count_points(&self, window: i64) -> u64 {
        match *self {
            Member::Weierstrass { a, b } => curve::count_integral_points(a, b, window),
            Member::Marked { d2, d3, d4 } => curve::count_marked_points(d2, d3, d4, window),
        }
    }

    /// Coefficients in column order.
    pub fn coeffs(&self) -> Vec<i64> {
        match *self {
            Member::Weierstrass { a, b } => vec![a, b],
            Member::Marked { d2, d3, d4 } => vec![d2, d3, d4],
        }
    }
}

/// Inclusive range of the shard axis for `H <= T`.
pub fn axis_range(kind: FamilyKind, height_max: u64) -> (i64, i64) {
    let t = height_max as u128;
    let r = if kind.is_marked() { arith::iroot_u128(t, 6) } else { arith::iroot_u128(t / 4, 3) } as i64;
    (-r, r)
}

/// Calls `emit` on each member with the given axis value, in order.
pub fn for_each_on_axis(spec: &FamilySpec, height_max: u64, axis: i64, mut emit: impl FnMut(Member)) {
    let t = height_max as u128;
    if spec.kind.is_marked() {
        let d3_max = if spec.kind == FamilyKind::Marked2 { 0 } else { arith::iroot_u128(t, 4) as i64 };
        let d4_max = arith::iroot_u128(t, 3) as i64;
        for d3 in -d3_max..=d3_max {
            for d4 in -d4_max..=d4_max {
                let m = Member::Marked { d2: axis, d3, d4 };
                let disc = m.disc();
                if disc != 0 && spec.sign.accepts(disc) {
                    emit(m);
                }
            }
        }
        return;
    }
    let a = axis;
    if 4 * (a.unsigned_abs() as u128).pow(3) > t {
        return;
    }
    let b_max = arith::isqrt_u128(t / 27) as i64;
    for b in -b_max..=b_max {
        let m = Member::Weierstrass { a, b };
        let disc = m.disc();
        if disc == 0 || !spec.sign.accepts(disc) || !spec.congruences.iter().all(|c| c.accepts(a, b)) {
            continue;
        }
        let keep = match spec.kind {
            FamilyKind::Min => curve::is_minimal(a, b).unwrap_or(false),
            FamilyKind::SsApprox => curve::is_semistable_approx(a, b),
            _ => true,
        };
        if keep {
            emit(m);
        }
    }
}

/// Every member with nonzero discriminant and `H <= T`, ordered by the
/// first coefficient then the remaining ones.
pub fn enumerate_family(spec: &FamilySpec, height_max: u64) -> Result<Vec<Member>, SweepError> {
    spec.validate()?;
    let (lo, hi) = axis_range(spec.kind, height_max);
    let mut out = Vec::new();
    for axis in lo..=hi {
        for_each_on_axis(spec, height_max, axis, |m| out.push(m));
    }
    Ok(out)
}

/// Contiguous axis ranges, one per shard, covering the family.
pub fn shard_ranges(kind: FamilyKind, height_max: u64, shards: usize) -> Vec<(i64, i64)> {
    let (lo, hi) = axis_range(kind, height_max);
    let len = (hi - lo + 1) as usize;
    let k = shards.clamp(1, len);
    (0..k)
        .map(|i| (lo + (i * len / k) as i64, lo + ((i + 1) * len / k) as i64 - 1))
        .collect()
}

/// The smoothness exponent `delta = num / den` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Smoothness {
    pub num: u32,
    pub den: u32,
}

impl Smoothness {
    pub fn new(num: u32, den: u32) -> Result<Self, SweepError> {
        if num == 0 || den == 0 || num >= den {
            return Err(SweepError::InvalidSmoothness(format!("{num}/{den} is not in (0, 1)")));
        }
        let g = num_integer::gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }
}

impl Default for Smoothness {
    fn default() -> Self {
        Self { num: 1, den: 12 }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Smoothness {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::InvalidSmoothness(format!("expected p/q, got {s:?}"));
        let (n, d) = s.split_once('/').ok_or_else(bad)?;
        Self::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?)
    }
}

/// `floor(T^(p/q))`.
fn floor_rational_root(t: u64, p: u32, q: u32) -> u64 {
    BigUint::from(t).pow(p).nth_root(q).to_u64().unwrap_or(u64::MAX)
}

/// Integer thresholds derived from `T` and `delta`: the smoothness cutoff
/// `floor(T^delta)` and the divisor window `[ceil(T^(1/6 - delta)), floor(T^(1/6))]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothWindow {
    pub cutoff: u64,
    pub lower: u64,
    pub upper: u64,
}

impl SmoothWindow {
    pub fn new(height_max: u64, delta: Smoothness) -> Self {
        let cutoff = floor_rational_root(height_max, delta.num, delta.den);
        let upper = floor_rational_root(height_max, 1, 6);
        // 1/6 - p/q = (q - 6p) / 6q
        let lower = match delta.den.checked_sub(6 * delta.num) {
            Some(e) if e > 0 => {
                let (p, q) = (e, 6 * delta.den);
                let r = floor_rational_root(height_max, p, q);
                if BigUint::from(r).pow(q) == BigUint::from(height_max).pow(p) {
                    r
                } else {
                    r + 1
                }
            }
            _ => 1,
        };
        Self { cutoff, lower, upper }
    }
}

/// `n = prod p^floor(v_p / 2)` over `p <= cutoff` with `p^2 | disc`, with the
/// full profile of `disc`.
pub fn square_part_profile(disc: i128, cutoff: Option<u64>) -> Result<(Factorization, u64), SweepError> {
    if disc == 0 {
        return Err(SweepError::ZeroDiscriminant);
    }
    let abs = u64::try_from(disc.unsigned_abs()).map_err(|_| SweepError::TooLarge(disc))?;
    let profile: Factorization = arith::factor_u64(abs).into_iter().filter(|&(_, v)| v >= 2).collect();
    let n = profile
        .iter()
        .filter(|&&(p, _)| cutoff.is_none_or(|c| p <= c))
        .fold(1u64, |acc, &(p, v)| acc * p.pow(v / 2));
    Ok((profile, n))
}

/// A divisor of `m` in `[y, x y]`, found by removing the largest prime
/// factor while the current value exceeds `x y`.
pub fn greedy_divisor(m: u64, x: u64, y: u64) -> Result<u64, SweepError> {
    if m == 0 || y == 0 || y > m {
        return Err(SweepError::PreconditionViolated(format!("need 1 <= y <= m, got m = {m}, y = {y}")));
    }
    let factors = arith::factor_u64(m);
    if let Some(&(p, _)) = factors.iter().find(|&&(p, _)| p > x) {
        return Err(SweepError::PreconditionViolated(format!("{m} has prime factor {p} > {x}")));
    }
    let limit = x as u128 * y as u128;
    let mut primes: Vec<u64> = factors.iter().flat_map(|&(p, e)| std::iter::repeat_n(p, e as usize)).collect();
    let mut cur = m;
    while cur as u128 > limit {
        let p = primes.pop().expect("cur > 1 has a prime factor");
        cur /= p;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothStatus {
    Ok,
    /// No divisor in the window; `d` is the largest divisor below the upper end.
    WindowEmpty,
    /// `n / d` has no factorization into three parts below the upper end.
    Undecomposed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothPart {
    pub n: u64,
    pub d: u64,
    pub window: SmoothWindow,
    pub tau_n: u64,
    pub tau_d: u64,
    pub cofactors: [u64; 3],
    pub status: SmoothStatus,
}

impl SmoothPart {
    pub fn tau_bound_holds(&self) -> bool {
        (self.tau_n as u128) <= (self.tau_d as u128).pow(4)
    }

    pub fn factors_within_window(&self) -> bool {
        self.d <= self.window.upper.max(1) && self.cofactors.iter().all(|&c| c <= self.window.upper.max(1))
    }

    pub fn product(&self) -> u128 {
        self.d as u128 * self.cofactors.iter().map(|&c| c as u128).product::<u128>()
    }
}

fn three_factors(m: u64, upper: u64, factors: &Factorization) -> Option<[u64; 3]> {
    let divs = arith::divisors(factors);
    for &d1 in divs.iter().rev().filter(|&&d| d <= upper) {
        let rest = m / d1;
        for &d2 in divs.iter().rev().filter(|&&d| d <= upper && d <= d1) {
            if rest % d2 == 0 && rest / d2 <= upper {
                return Some([d1, d2, rest / d2]);
            }
        }
    }
    None
}

/// Selects `d | n` maximizing `tau` inside the window (smallest on ties) and
/// splits `n / d` into three cofactors bounded by the window's upper end.
pub fn smooth_decomposition_in(n: u64, window: &SmoothWindow) -> Result<SmoothPart, SweepError> {
    if n == 0 {
        return Err(SweepError::PreconditionViolated("n must be positive".into()));
    }
    let factors = arith::factor_u64(n);
    if let Some(&(p, _)) = factors.iter().find(|&&(p, _)| p > window.cutoff) {
        return Err(SweepError::NotSmooth { n, p, cutoff: window.cutoff });
    }
    let tau_n = arith::tau(&factors);
    let upper = window.upper.max(1);
    let divs = arith::divisors(&factors);
    let (d, mut status) = if n <= upper {
        (n, SmoothStatus::Ok)
    } else {
        let best = divs
            .iter()
            .filter(|&&d| d >= window.lower && d <= upper)
            .map(|&d| (arith::tau(&arith::factor_u64(d)), d))
            .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        match best {
            Some((_, d)) => (d, SmoothStatus::Ok),
            None => (*divs.iter().rev().find(|&&d| d <= upper).unwrap_or(&1), SmoothStatus::WindowEmpty),
        }
    };
    let tau_d = arith::tau(&arith::factor_u64(d));

    let mut m = n / d;
    let mut cofactors = [1u64; 3];
    for slot in cofactors.iter_mut() {
        if m <= upper {
            *slot = m;
            m = 1;
            break;
        }
        let x = arith::factor_u64(m).last().map_or(1, |&(p, _)| p);
        let y = upper / x;
        if y == 0 {
            break;
        }
        *slot = greedy_divisor(m, x, y)?;
        m /= *slot;
    }
    if m != 1 {
        let rest = n / d;
        match three_factors(rest, upper, &arith::factor_u64(rest)) {
            Some(found) => cofactors = found,
            None => {
                cofactors = [rest, 1, 1];
                if status == SmoothStatus::Ok {
                    status = SmoothStatus::Undecomposed;
                }
            }
        }
    }
    Ok(SmoothPart { n, d, window: *window, tau_n, tau_d, cofactors, status })
}

pub fn smooth_decomposition(n: u64, height_max: u64, delta: Smoothness) -> Result<SmoothPart, SweepError> {
    smooth_decomposition_in(n, &SmoothWindow::new(height_max, delta))
}

/// Parameters of a record-producing sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepParams {
    pub family: FamilySpec,
    pub height_max: u64,
    /// Point search window `|x| <= window`; `None` skips the search.
    pub window: Option<i64>,
    /// Box for the class partition; `None` skips it.
    pub class_box: Option<u64>,
    pub delta: Smoothness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub member: Member,
    pub disc: i128,
    pub height: u128,
    pub points: Option<u64>,
    pub window: Option<i64>,
    pub class_count: Option<u64>,
    pub n_smooth: u64,
    pub d_selected: u64,
    pub tau_n: u64,
    pub tau_d: u64,
}

pub const WEIERSTRASS_HEADER: &str = "A,B,Delta,H,points,window,classcount,n_smooth,d_selected,tau_n,tau_d";
pub const MARKED_HEADER: &str = "d2,d3,d4,Delta,H,points,window,classcount,n_smooth,d_selected,tau_n,tau_d";

pub fn sweep_header(kind: FamilyKind) -> &'static str {
    if kind.is_marked() {
        MARKED_HEADER
    } else {
        WEIERSTRASS_HEADER
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl fmt::Display for SweepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.member.coeffs() {
            write!(f, "{c},")?;
        }
        write!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            self.disc,
            self.height,
            opt(&self.points),
            opt(&self.window),
            opt(&self.class_count),
            self.n_smooth,
            self.d_selected,
            self.tau_n,
            self.tau_d
        )
    }
}

impl SweepRecord {
    /// Parses a data row; `marked` selects the column layout.
    pub fn parse(line: &str, marked: bool) -> Result<Self, SweepError> {
        let bad = |what: &str| SweepError::PreconditionViolated(format!("bad sweep row {line:?}: {what}"));
        let fields: Vec<&str> = line.split(',').collect();
        let k = if marked { 3 } else { 2 };
        if fields.len() != k + 9 {
            return Err(bad("column count"));
        }
        fn num<T: FromStr>(s: &str) -> Option<T> {
            s.parse().ok()
        }
        fn maybe<T: FromStr>(s: &str) -> Option<Option<T>> {
            if s.is_empty() {
                Some(None)
            } else {
                s.parse().ok().map(Some)
            }
        }
        let c: Vec<i64> = fields[..k].iter().map(|s| num(s)).collect::<Option<_>>().ok_or_else(|| bad("coefficients"))?;
        let member = if marked {
            Member::Marked { d2: c[0], d3: c[1], d4: c[2] }
        } else {
            Member::Weierstrass { a: c[0], b: c[1] }
        };
        let f = &fields[k..];
        Ok(Self {
            member,
            disc: num(f[0]).ok_or_else(|| bad("Delta"))?,
            height: num(f[1]).ok_or_else(|| bad("H"))?,
            points: maybe(f[2]).ok_or_else(|| bad("points"))?,
            window: maybe(f[3]).ok_or_else(|| bad("window"))?,
            class_count: maybe(f[4]).ok_or_else(|| bad("classcount"))?,
            n_smooth: num(f[5]).ok_or_else(|| bad("n_smooth"))?,
            d_selected: num(f[6]).ok_or_else(|| bad("d_selected"))?,
            tau_n: num(f[7]).ok_or_else(|| bad("tau_n"))?,
            tau_d: num(f[8]).ok_or_else(|| bad("tau_d"))?,
        })
    }
}

/// Per-shard tallies; merged by addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub curves: u64,
    pub points: u64,
    pub window_empty: u64,
    pub undecomposed: u64,
    pub tau_violations: u64,
    pub oversized_factors: u64,
    /// Sum of `prod (floor(v_p / 2) + 1)` over the family.
    pub square_divisor_total: u64,
    /// Members whose discriminant is squarefree away from 2.
    pub odd_squarefree: u64,
}

impl SweepSummary {
    pub fn merge(&mut self, other: &Self) {
        self.curves += other.curves;
        self.points += other.points;
        self.window_empty += other.window_empty;
        self.undecomposed += other.undecomposed;
        self.tau_violations += other.tau_violations;
        self.oversized_factors += other.oversized_factors;
        self.square_divisor_total += other.square_divisor_total;
        self.odd_squarefree += other.odd_squarefree;
    }

    fn record(&mut self, profile: &Factorization, part: &SmoothPart) {
        self.curves += 1;
        match part.status {
            SmoothStatus::Ok => {}
            SmoothStatus::WindowEmpty => self.window_empty += 1,
            SmoothStatus::Undecomposed => self.undecomposed += 1,
        }
        if part.status != SmoothStatus::WindowEmpty {
            if !part.tau_bound_holds() {
                self.tau_violations += 1;
            }
            if !part.factors_within_window() || part.product() != part.n as u128 {
                self.oversized_factors += 1;
            }
        }
        self.square_divisor_total += profile.iter().map(|&(_, v)| (v / 2 + 1) as u64).product::<u64>();
        if profile.iter().all(|&(p, _)| p == 2) {
            self.odd_squarefree += 1;
        }
    }

    /// Fraction of members that needed the empty-window fallback.
    pub fn window_empty_rate(&self) -> f64 {
        if self.curves == 0 {
            0.0
        } else {
            self.window_empty as f64 / self.curves as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShardOutput {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

fn analyse(member: Member, window: &SmoothWindow) -> Result<(i128, Factorization, SmoothPart), SweepError> {
    let disc = member.disc();
    let (profile, n) = square_part_profile(disc, Some(window.cutoff))?;
    let part = smooth_decomposition_in(n, window)?;
    Ok((disc, profile, part))
}

/// Processes one shard's axis range.
pub fn sweep_shard(params: &SweepParams, range: (i64, i64)) -> Result<ShardOutput, SweepError> {
    let window = SmoothWindow::new(params.height_max, params.delta);
    let mut members = Vec::new();
    for axis in range.0..=range.1 {
        for_each_on_axis(&params.family, params.height_max, axis, |m| members.push(m));
    }
    let mut out = ShardOutput::default();
    for member in members {
        let (disc, profile, part) = analyse(member, &window)?;
        out.summary.record(&profile, &part);
        let points = params.window.map(|w| member.count_points(w));
        let class_count = match (params.class_box, params.window, member) {
            (Some(bound), Some(w), Member::Weierstrass { a, b }) => {
                let curve = WeierstrassCurve::new(a, b).map_err(curve::CurveError::from)?;
                let pts = curve::search_integral_points(&curve, -w, w)?;
                Some(curve::psi_classes(&curve, &pts, bound)?.len() as u64)
            }
            _ => None,
        };
        out.summary.points += points.unwrap_or(0);
        out.records.push(SweepRecord {
            member,
            disc,
            height: member.height(),
            points,
            window: params.window,
            class_count,
            n_smooth: part.n,
            d_selected: part.d,
            tau_n: part.tau_n,
            tau_d: part.tau_d,
        });
    }
    Ok(out)
}

/// Runs every shard in parallel and concatenates in shard order.
pub fn run_sweep(params: &SweepParams, shards: usize) -> Result<ShardOutput, SweepError> {
    params.family.validate()?;
    let ranges = shard_ranges(params.family.kind, params.height_max, shards);
    let outputs: Vec<ShardOutput> = ranges.par_iter().map(|&r| sweep_shard(params, r)).collect::<Result<_, _>>()?;
    let mut total = ShardOutput::default();
    for o in outputs {
        total.summary.merge(&o.summary);
        total.records.extend(o.records);
    }
    Ok(total)
}

/// Discriminant statistics only: no records, no point search.
pub fn discriminant_statistics(
    family: &FamilySpec,
    height_max: u64,
    delta: Smoothness,
    shards: usize,
) -> Result<SweepSummary, SweepError> {
    family.validate()?;
    let window = SmoothWindow::new(height_max, delta);
    let ranges = shard_ranges(family.kind, height_max, shards.max(rayon::current_num_threads() * 8));
    let parts: Vec<SweepSummary> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut summary = SweepSummary::default();
            let mut err = None;
            for axis in lo..=hi {
                for_each_on_axis(family, height_max, axis, |m| {
                    if err.is_some() {
                        return;
                    }
                    match analyse(m, &window) {
                        Ok((_, profile, part)) => summary.record(&profile, &part),
                        Err(e) => err = Some(e),
                    }
                });
            }
            err.map_or(Ok(summary), Err)
        })
        .collect::<Result<_, _>>()?;
    let mut total = SweepSummary::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentParams {
    pub family: FamilySpec,
    pub heights: Vec<u64>,
    pub s_list: Vec<u32>,
    pub t_list: Vec<u32>,
    pub window: i64,
}

/// Exact sums for one height bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct HeightSums {
    count: u64,
    point_sums: Vec<BigUint>,
    disc_sums: Vec<BigUint>,
    rank_covered: u64,
    rank_sums: Vec<BigUint>,
}

/// Partial moment sums over a set of shards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPartial {
    sums: Vec<HeightSums>,
}

impl MomentPartial {
    fn empty(params: &MomentParams) -> Self {
        let zero = |n: usize| vec![BigUint::zero(); n];
        let h = HeightSums {
            count: 0,
            point_sums: zero(params.s_list.len()),
            disc_sums: zero(params.t_list.len()),
            rank_covered: 0,
            rank_sums: zero(params.s_list.len()),
        };
        Self { sums: vec![h; params.heights.len()] }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.count += b.count;
            a.rank_covered += b.rank_covered;
            for (x, y) in a.point_sums.iter_mut().zip(&b.point_sums) {
                *x += y;
            }
            for (x, y) in a.disc_sums.iter_mut().zip(&b.disc_sums) {
                *x += y;
            }
            for (x, y) in a.rank_sums.iter_mut().zip(&b.rank_sums) {
                *x += y;
            }
        }
    }
}

/// Moment sums for one shard. Each member contributes to every height bound
/// at or above its own height.
pub fn moment_shard(
    params: &MomentParams,
    ranks: Option<&RankTable>,
    range: (i64, i64),
) -> Result<MomentPartial, SweepError> {
    let mut partial = MomentPartial::empty(params);
    let height_max = params.heights.iter().copied().max().unwrap_or(0);
    let mut members = Vec::new();
    for axis in range.0..=range.1 {
        for_each_on_axis(&params.family, height_max, axis, |m| members.push(m));
    }
    for member in members {
        let h = member.height();
        let (profile, _) = square_part_profile(member.disc(), None)?;
        let points = BigUint::from(member.count_points(params.window));
        let rank = match (ranks, member) {
            (Some(table), Member::Weierstrass { a, b }) => table.get(&(a, b)).map(|r| r.rank),
            _ => None,
        };
        for (ti, &t_bound) in params.heights.iter().enumerate() {
            if h > t_bound as u128 {
                continue;
            }
            let sums = &mut partial.sums[ti];
            sums.count += 1;
            for (i, &s) in params.s_list.iter().enumerate() {
                sums.point_sums[i] += points.pow(s);
            }
            for (i, &t) in params.t_list.iter().enumerate() {
                sums.disc_sums[i] +=
                    profile.iter().fold(BigUint::one(), |acc, &(_, v)| acc * BigUint::from(v / 2 + 1).pow(t));
            }
            if let Some(r) = rank {
                sums.rank_covered += 1;
                for (i, &s) in params.s_list.iter().enumerate() {
                    sums.rank_sums[i] += BigUint::one() << (s as u64 * r as u64);
                }
            }
        }
    }
    Ok(partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// `Avg(points^s)`, with `0^0 = 1`.
    Points,
    /// `Avg(prod (floor(v_p / 2) + 1)^t)`.
    Discriminant,
    /// `Avg(2^(s rank))` over members present in the rank table.
    RankPartial,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Points => "points",
            Statistic::Discriminant => "disc",
            Statistic::RankPartial => "rank-partial",
        })
    }
}

impl FromStr for Statistic {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "points" => Ok(Statistic::Points),
            "disc" => Ok(Statistic::Discriminant),
            "rank-partial" => Ok(Statistic::RankPartial),
            _ => Err(SweepError::PreconditionViolated(format!("unknown statistic {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentRow {
    pub height: u64,
    pub statistic: Statistic,
    pub exponent: u32,
    /// Members averaged over.
    pub count: u64,
    pub value: BigRational,
}

pub const MOMENT_HEADER: &str = "T,statistic,exponent,count,value";

impl fmt::Display for MomentRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.height, self.statistic, self.exponent, self.count, self.value)
    }
}

impl FromStr for MomentRow {
    type Err = SweepError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::PreconditionViolated(format!("bad moment row {line:?}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad());
        }
        Ok(Self {
            height: f[0].parse().map_err(|_| bad())?,
            statistic: f[1].parse()?,
            exponent: f[2].parse().map_err(|_| bad())?,
            count: f[3].parse().map_err(|_| bad())?,
            value: crate::quartic::parse_rational(f[4]).map_err(|_| bad())?,
        })
    }
}

fn average(sum: &BigUint, count: u64) -> BigRational {
    if count == 0 {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(sum.clone()), BigInt::from(count))
}

/// Turns merged sums into rows ordered by height, statistic, exponent.
pub fn moment_rows(params: &MomentParams, merged: &MomentPartial, with_ranks: bool) -> Vec<MomentRow> {
    let mut rows = Vec::new();
    for (ti, &height) in params.heights.iter().enumerate() {
        let sums = &merged.sums[ti];
        for (i, &s) in params.s_list.iter().enumerate() {
            let value = average(&sums.point_sums[i], sums.count);
            rows.push(MomentRow { height, statistic: Statistic::Points, exponent: s, count: sums.count, value });
        }
        for (i, &t) in params.t_list.iter().enumerate() {
            let value = average(&sums.disc_sums[i], sums.count);
            rows.push(MomentRow { height, statistic: Statistic::Discriminant, exponent: t, count: sums.count, value });
        }
        if with_ranks {
            for (i, &s) in params.s_list.iter().enumerate() {
                let count = sums.rank_covered;
                let value = average(&sums.rank_sums[i], count);
                rows.push(MomentRow { height, statistic: Statistic::RankPartial, exponent: s, count, value });
            }
        }
    }
    rows
}

/// Computes the moment table, merging shard sums in the given order.
pub fn moment_report_ordered(
    params: &MomentParams,
    ranks: Option<&RankTable>,
    shards: usize,
    order: &[usize],
) -> Result<Vec<MomentRow>, SweepError> {
    params.family.validate()?;
    if params.heights.is_empty() {
        return Err(SweepError::PreconditionViolated("empty height grid".into()));
    }
    let height_max = params.heights.iter().copied().max().unwrap_or(1);
    let ranges = shard_ranges(params.family.kind, height_max, shards);
    let partials: Vec<MomentPartial> =
        ranges.par_iter().map(|&r| moment_shard(params, ranks, r)).collect::<Result<_, _>>()?;
    let mut merged = MomentPartial::empty(params);
    if order.is_empty() {
        partials.iter().for_each(|p| merged.merge(p));
    } else {
        if order.len() != partials.len() || order.iter().collect::<BTreeSet<_>>().len() != order.len() {
            return Err(SweepError::PreconditionViolated("merge order is not a permutation of the shards".into()));
        }
        for &i in order {
            merged.merge(partials.get(i).ok_or_else(|| {
                SweepError::PreconditionViolated("merge order is not a permutation of the shards".into())
            })?);
        }
    }
    Ok(moment_rows(params, &merged, ranks.is_some()))
}

pub fn moment_report(
    params: &MomentParams,
    ranks: Option<&RankTable>,
    shards: usize,
) -> Result<Vec<MomentRow>, SweepError> {
    moment_report_ordered(params, ranks, shards, &[])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub height: u64,
    pub modulus: u64,
    pub count: u64,
    pub total: u64,
}

impl CensusRow {
    pub fn ratio(&self) -> BigRational {
        if self.total == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.count), BigInt::from(self.total))
    }

    /// Displayed reference value `1/m`.
    pub fn reference(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.modulus))
    }
}

pub const CENSUS_HEADER: &str = "T,m,count,total,ratio,reference";

impl fmt::Display for CensusRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.height, self.modulus, self.count, self.total, self.ratio(), self.reference())
    }
}

impl FromStr for CensusRow {
    type Err = SweepError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::PreconditionViolated(format!("bad census row {line:?}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad());
        }
        let row = Self {
            height: f[0].parse().map_err(|_| bad())?,
            modulus: f[1].parse().map_err(|_| bad())?,
            count: f[2].parse().map_err(|_| bad())?,
            total: f[3].parse().map_err(|_| bad())?,
        };
        let ratio = crate::quartic::parse_rational(f[4]).map_err(|_| bad())?;
        if ratio != row.ratio() {
            return Err(bad());
        }
        Ok(row)
    }
}

/// Counts members with `m | disc` for each modulus.
pub fn divisibility_census(
    spec: &FamilySpec,
    height_max: u64,
    moduli: &[u64],
    shards: usize,
) -> Result<Vec<CensusRow>, SweepError> {
    spec.validate()?;
    if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
        return Err(SweepError::BadModulus(m));
    }
    let ranges = shard_ranges(spec.kind, height_max, shards);
    let parts: Vec<(u64, Vec<u64>)> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut total = 0u64;
            let mut counts = vec![0u64; moduli.len()];
            for axis in lo..=hi {
                for_each_on_axis(spec, height_max, axis, |m| {
                    total += 1;
                    let disc = m.disc();
                    for (c, &modulus) in counts.iter_mut().zip(moduli) {
                        if disc % modulus as i128 == 0 {
                            *c += 1;
                        }
                    }
                });
            }
            (total, counts)
        })
        .collect();
    let total: u64 = parts.iter().map(|p| p.0).sum();
    Ok(moduli
        .iter()
        .enumerate()
        .map(|(i, &modulus)| CensusRow {
            height: height_max,
            modulus,
            count: parts.iter().map(|p| p.1[i]).sum(),
            total,
        })
        .collect())
}

/// First pair `(m, m')` with `m | m'` but `count(m) < count(m')`.
pub fn census_monotonicity_violation(rows: &[CensusRow]) -> Option<(u64, u64)> {
    for r in rows {
        for s in rows {
            if r.height == s.height && r.modulus != s.modulus && s.modulus % r.modulus == 0 && r.count < s.count {
                return Some((r.modulus, s.modulus));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn univ() -> FamilySpec {
        FamilySpec::new(FamilyKind::Univ)
    }

    fn pairs(members: &[Member]) -> Vec<(i64, i64)> {
        members
            .iter()
            .map(|m| match *m {
                Member::Weierstrass { a, b } => (a, b),
                _ => unreachable!(),
            })
            .collect()
    }

    fn brute_univ(t: u64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for a in -100i64..=100 {
            for b in -100i64..=100 {
                let h = (4 * a.abs().pow(3)).max(27 * b * b) as u64;
                if h <= t && 4 * a.pow(3) + 27 * b * b != 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn family_examples() {
        let fam = enumerate_family(&univ(), 108).unwrap();
        assert_eq!(fam.len(), 32);
        assert_eq!(pairs(&fam), brute_univ(108));
        assert!(!pairs(&fam).contains(&(-3, 2)));
        assert_eq!(pairs(&enumerate_family(&univ(), 4).unwrap()), vec![(-1, 0), (1, 0)]);
        let min = enumerate_family(&FamilySpec::new(FamilyKind::Min), 108).unwrap();
        assert_eq!(min.len(), 32);
        for t in [1, 27, 100, 500, 2000] {
            assert_eq!(pairs(&enumerate_family(&univ(), t).unwrap()), brute_univ(t), "T = {t}");
        }
    }

    #[test]
    fn family_filters() {
        let mut spec = univ();
        spec.sign = SignFilter::Positive;
        let pos = enumerate_family(&spec, 500).unwrap();
        assert!(pos.iter().all(|m| m.disc() > 0));
        spec.sign = SignFilter::Negative;
        let neg = enumerate_family(&spec, 500).unwrap();
        assert_eq!(pos.len() + neg.len(), enumerate_family(&univ(), 500).unwrap().len());

        let cong: Congruence = "2:0/1,1/1".parse().unwrap();
        assert_eq!(cong.to_string(), "2:0/1,1/1");
        let spec = FamilySpec { kind: FamilyKind::Congruence, congruences: vec![cong], sign: SignFilter::Any };
        let fam = pairs(&enumerate_family(&spec, 500).unwrap());
        assert!(fam.iter().all(|&(_, b)| b % 2 != 0));
        assert!(FamilySpec::new(FamilyKind::Congruence).validate().is_err());

        let m2 = enumerate_family(&FamilySpec::new(FamilyKind::Marked2), 4096).unwrap();
        assert!(m2.iter().all(|m| matches!(m, Member::Marked { d3: 0, .. }) && m.height() <= 4096));
        let m1 = enumerate_family(&FamilySpec::new(FamilyKind::Marked), 64).unwrap();
        let mut brute = 0;
        for d2 in -3i64..=3 {
            for d3 in -3i64..=3 {
                for d4 in -5i64..=5 {
                    let m = Member::Marked { d2, d3, d4 };
                    if m.height() <= 64 && curve::marked_discriminant(d2, d3, d4) != BigInt::zero() {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(m1.len(), brute);
    }

    #[test]
    fn member_discriminants_agree() {
        for m in enumerate_family(&FamilySpec::new(FamilyKind::Marked), 4096).unwrap() {
            let Member::Marked { d2, d3, d4 } = m else { unreachable!() };
            assert_eq!(BigInt::from(m.disc()), curve::marked_discriminant(d2, d3, d4));
        }
        for m in enumerate_family(&univ(), 1000).unwrap() {
            let Member::Weierstrass { a, b } = m else { unreachable!() };
            assert_eq!(BigInt::from(m.disc()), crate::mordell::discriminant(a, b));
        }
    }

    #[test]
    fn square_part_examples() {
        assert_eq!(square_part_profile(-432, None).unwrap().1, 12);
        assert_eq!(square_part_profile(-30, None).unwrap().1, 1);
        assert_eq!(square_part_profile(-432, Some(2)).unwrap().1, 4);
        assert!(matches!(square_part_profile(0, None), Err(SweepError::ZeroDiscriminant)));
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_divisor(12, 3, 5).unwrap(), 12);
        assert_eq!(greedy_divisor(16, 2, 3).unwrap(), 4);
        assert_eq!(greedy_divisor(1, 7, 1).unwrap(), 1);
        assert!(greedy_divisor(10, 3, 2).is_err());
        assert!(greedy_divisor(4, 2, 5).is_err());
    }

    #[test]
    fn window_thresholds() {
        let w = SmoothWindow::new(1_000_000, Smoothness::default());
        assert_eq!((w.cutoff, w.lower, w.upper), (3, 4, 10));
        let w = SmoothWindow::new(1 << 24, Smoothness::new(1, 12).unwrap());
        assert_eq!((w.cutoff, w.lower, w.upper), (4, 4, 16));
        let w = SmoothWindow::new(1 << 24, Smoothness::new(1, 4).unwrap());
        assert_eq!((w.cutoff, w.lower, w.upper), (64, 1, 16));
    }

    #[test]
    fn smooth_examples() {
        let one = smooth_decomposition(1, 1000, Smoothness::default()).unwrap();
        assert_eq!((one.d, one.cofactors, one.tau_bound_holds()), (1, [1, 1, 1], true));

        let p = smooth_decomposition(12, 12u64.pow(6), Smoothness::new(1, 2).unwrap()).unwrap();
        assert_eq!(p.d, 12);

        let p = smooth_decomposition(1 << 10, 1 << 24, Smoothness::new(1, 4).unwrap()).unwrap();
        assert_eq!(p.d, 16);
        assert_eq!(p.tau_d, 5);
        assert_eq!(p.tau_n, 11);
        assert_eq!(p.cofactors, [16, 4, 1]);
        assert_eq!(p.status, SmoothStatus::Ok);
        assert!(p.tau_bound_holds());

        assert!(matches!(
            smooth_decomposition(5, 1_000_000, Smoothness::default()),
            Err(SweepError::NotSmooth { p: 5, .. })
        ));
    }

    #[test]
    fn record_round_trip() {
        let params = SweepParams {
            family: univ(),
            height_max: 108,
            window: Some(100),
            class_box: Some(20),
            delta: Smoothness::default(),
        };
        let out = run_sweep(&params, 3).unwrap();
        assert_eq!(out.records.len(), 32);
        for r in &out.records {
            assert_eq!(SweepRecord::parse(&r.to_string(), false).unwrap(), *r);
        }
        let single = run_sweep(&params, 1).unwrap();
        assert_eq!(single, out);
    }

    #[test]
    fn moments_small() {
        let params = MomentParams {
            family: univ(),
            heights: vec![27, 108],
            s_list: vec![0, 1],
            t_list: vec![0, 1],
            window: 100,
        };
        let rows = moment_report(&params, None, 4).unwrap();
        let fam = enumerate_family(&univ(), 108).unwrap();
        let total: u64 = fam.iter().map(|m| m.count_points(100)).sum();
        let find = |h, s, e| rows.iter().find(|r| r.height == h && r.statistic == s && r.exponent == e).unwrap();
        assert_eq!(find(108, Statistic::Points, 1).value, BigRational::new(total.into(), 32.into()));
        assert_eq!(find(108, Statistic::Points, 0).value, BigRational::one());
        assert_eq!(find(108, Statistic::Discriminant, 0).value, BigRational::one());
        for r in &rows {
            assert_eq!(r.to_string().parse::<MomentRow>().unwrap(), *r);
        }
        let reversed = moment_report_ordered(&params, None, 4, &[3, 1, 0, 2]).unwrap();
        assert_eq!(reversed, rows);
    }

    #[test]
    fn census_small() {
        let rows = divisibility_census(&univ(), 108, &[2, 4, 3, 9, 1000000], 2).unwrap();
        let fam = enumerate_family(&univ(), 108).unwrap();
        for r in &rows {
            let brute = fam.iter().filter(|m| m.disc() % r.modulus as i128 == 0).count() as u64;
            assert_eq!(r.count, brute);
            assert_eq!(r.total, 32);
            assert_eq!(r.to_string().parse::<CensusRow>().unwrap(), *r);
        }
        assert_eq!(rows[0].count, 32);
        assert_eq!(rows[4].count, 0);
        assert_eq!(census_monotonicity_violation(&rows), None);
    }
}
