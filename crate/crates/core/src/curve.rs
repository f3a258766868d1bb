//! Curve-level services: discriminant and height, exhaustive integral-point
//! search inside an explicit window, minimality, the marked-point models
//! `y^2 + d3 y = x^3 + d2 x^2 + d4 x`, rank-table ingestion, and the
//! partition of integral points by the projective class of their quartics.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::fibre::{flattening_transforms, FibreError};
use crate::mordell::{self, point_to_quartic, IntegralPoint, MordellError, WeierstrassCurve};

/// Largest `|x|` accepted by the point searches; keeps `x^3` and `y` in range.
pub const MAX_WINDOW: i64 = 1_000_000_000_000;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("singular curve")]
    SingularCurve,
    #[error("search window [{lo}, {hi}] is empty or exceeds |x| <= {MAX_WINDOW}")]
    BadWindow { lo: i64, hi: i64 },
    #[error("rank table line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("rank table line {line}: duplicate curve ({a}, {b})")]
    DuplicateCurve { line: usize, a: i64, b: i64 },
    #[error("marked 2-torsion model requires d3 = 0")]
    NotTwoTorsionModel,
    #[error(transparent)]
    Mordell(#[from] MordellError),
    #[error(transparent)]
    Fibre(#[from] FibreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `(disc, naive height)` of `y^2 = x^3 + Ax + B`.
pub fn curve_invariants(a: i64, b: i64) -> Result<(BigInt, BigInt), CurveError> {
    let disc = mordell::discriminant(a, b);
    if disc.is_zero() {
        return Err(CurveError::SingularCurve);
    }
    Ok((disc, mordell::naive_height(a, b)))
}

fn check_window(lo: i64, hi: i64) -> Result<(), CurveError> {
    if lo > hi || lo < -MAX_WINDOW || hi > MAX_WINDOW {
        return Err(CurveError::BadWindow { lo, hi });
    }
    Ok(())
}

/// All integral points with `lo <= x <= hi`, sorted by `x` then `y`.
pub fn search_integral_points(
    curve: &WeierstrassCurve,
    lo: i64,
    hi: i64,
) -> Result<Vec<IntegralPoint>, CurveError> {
    check_window(lo, hi)?;
    let (a, b) = (curve.a() as i128, curve.b() as i128);
    let mut out = Vec::new();
    for x in lo..=hi {
        let xx = x as i128;
        let rhs = xx * xx * xx + a * xx + b;
        if let Some(r) = arith::exact_sqrt_i128(rhs) {
            let y = i64::try_from(r).map_err(|_| MordellError::Overflow)?;
            if y > 0 {
                out.push(IntegralPoint::new(x, -y));
            }
            out.push(IntegralPoint::new(x, y));
        }
    }
    Ok(out)
}

/// Number of affine integral points with `|x| <= window`.
pub fn count_integral_points(a: i64, b: i64, window: i64) -> u64 {
    let (a, b) = (a as i128, b as i128);
    let mut count = 0;
    for x in -window..=window {
        let xx = x as i128;
        if let Some(r) = arith::exact_sqrt_i128(xx * xx * xx + a * xx + b) {
            count += if r == 0 { 1 } else { 2 };
        }
    }
    count
}

fn factor_abs(n: i64) -> arith::Factorization {
    arith::factor_u64(n.unsigned_abs())
}

/// No prime `p` with `p^4 | A` and `p^6 | B`.
pub fn is_minimal(a: i64, b: i64) -> Result<bool, CurveError> {
    if mordell::discriminant(a, b).is_zero() {
        return Err(CurveError::SingularCurve);
    }
    let ok = if a == 0 {
        factor_abs(b).iter().all(|&(_, v)| v < 6)
    } else if b == 0 {
        factor_abs(a).iter().all(|&(_, v)| v < 4)
    } else {
        let g = num_integer::gcd(a.unsigned_abs(), b.unsigned_abs());
        arith::factor_u64(g).iter().all(|&(p, _)| {
            arith::valuation(a.unsigned_abs() as u128, p) < 4 || arith::valuation(b.unsigned_abs() as u128, p) < 6
        })
    };
    Ok(ok)
}

/// Congruence approximation of semistability: every prime `p >= 5` dividing
/// the discriminant leaves `A` a unit. Conditions at 2 and 3 are not checked.
pub fn is_semistable_approx(a: i64, b: i64) -> bool {
    let core = 4 * (a as i128).pow(3) + 27 * (b as i128).pow(2);
    let Some(n) = core.unsigned_abs().to_u64() else {
        return false;
    };
    if n == 0 {
        return false;
    }
    arith::factor_u64(n).iter().filter(|&&(p, _)| p >= 5).all(|&(p, _)| a % p as i64 != 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MarkedVariant {
    /// Marked rational point at `(0, 0)`.
    Point,
    /// Marked 2-torsion point at `(0, 0)`; `d3 = 0`.
    TwoTorsion,
}

/// `y^2 + d3 y = x^3 + d2 x^2 + d4 x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedCurve {
    pub d2: i64,
    pub d3: i64,
    pub d4: i64,
    pub variant: MarkedVariant,
}

/// Discriminant of `y^2 + d3 y = x^3 + d2 x^2 + d4 x` via `b2, b4, b6, b8`.
pub fn marked_discriminant(d2: i64, d3: i64, d4: i64) -> BigInt {
    let (d2, d3, d4) = (BigInt::from(d2), BigInt::from(d3), BigInt::from(d4));
    let b2 = BigInt::from(4) * &d2;
    let b4 = BigInt::from(2) * &d4;
    let b6 = &d3 * &d3;
    let b8 = &d2 * &d3 * &d3 - &d4 * &d4;
    -(&b2 * &b2 * &b8) - BigInt::from(8) * &b4 * &b4 * &b4 - BigInt::from(27) * &b6 * &b6
        + BigInt::from(9) * &b2 * &b4 * &b6
}

impl MarkedCurve {
    pub fn new(d2: i64, d3: i64, d4: i64, variant: MarkedVariant) -> Result<Self, CurveError> {
        if variant == MarkedVariant::TwoTorsion && d3 != 0 {
            return Err(CurveError::NotTwoTorsionModel);
        }
        if marked_discriminant(d2, d3, d4).is_zero() {
            return Err(CurveError::SingularCurve);
        }
        Ok(Self { d2, d3, d4, variant })
    }

    pub fn discriminant(&self) -> BigInt {
        marked_discriminant(self.d2, self.d3, self.d4)
    }

    /// `max(|d2|^6, |d3|^4, |d4|^3)`.
    pub fn height(&self) -> BigInt {
        let p = |v: i64, k: u32| BigInt::from(v).abs().pow(k);
        p(self.d2, 6).max(p(self.d3, 4)).max(p(self.d4, 3))
    }
}

impl fmt::Display for MarkedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.d2, self.d3, self.d4)
    }
}

/// Integer points on a marked model with `lo <= x <= hi`, sorted by `x`
/// then `y`. Uses `(2y + d3)^2 = 4(x^3 + d2 x^2 + d4 x) + d3^2`.
pub fn search_marked_points(curve: &MarkedCurve, lo: i64, hi: i64) -> Result<Vec<(i64, i64)>, CurveError> {
    check_window(lo, hi)?;
    let (d2, d3, d4) = (curve.d2 as i128, curve.d3 as i128, curve.d4 as i128);
    let mut out = Vec::new();
    for x in lo..=hi {
        let xx = x as i128;
        let rhs = xx * xx * xx + d2 * xx * xx + d4 * xx;
        let Some(disc) = rhs.checked_mul(4).and_then(|v| v.checked_add(d3 * d3)) else {
            return Err(CurveError::BadWindow { lo, hi });
        };
        if let Some(s) = arith::exact_sqrt_i128(disc) {
            let s = s as i128;
            if (s - d3).rem_euclid(2) != 0 {
                continue;
            }
            let mut ys = vec![(s - d3) / 2, (-s - d3) / 2];
            ys.sort_unstable();
            ys.dedup();
            for y in ys {
                out.push((x, i64::try_from(y).map_err(|_| MordellError::Overflow)?));
            }
        }
    }
    Ok(out)
}

/// Number of integer points on a marked model with `|x| <= window`.
pub fn count_marked_points(d2: i64, d3: i64, d4: i64, window: i64) -> u64 {
    let (d2, d3, d4) = (d2 as i128, d3 as i128, d4 as i128);
    let mut count = 0;
    for x in -window..=window {
        let xx = x as i128;
        let disc = 4 * (xx * xx * xx + d2 * xx * xx + d4 * xx) + d3 * d3;
        if let Some(s) = arith::exact_sqrt_i128(disc) {
            count += if s == 0 { 1 } else { 2 };
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub a: i64,
    pub b: i64,
    pub rank: u32,
    pub provenance: String,
}

pub type RankTable = BTreeMap<(i64, i64), RankRecord>;

/// Reads `A,B,rank[,provenance]` records; `#` starts a comment.
pub fn load_rank_table<R: BufRead>(reader: R) -> Result<RankTable, CurveError> {
    let mut table = RankTable::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: &str| CurveError::ParseError { line: line_no, msg: msg.to_string() };
        let fields: Vec<&str> = body.splitn(4, ',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(err("expected A,B,rank[,provenance]"));
        }
        let a: i64 = fields[0].parse().map_err(|_| err("invalid A"))?;
        let b: i64 = fields[1].parse().map_err(|_| err("invalid B"))?;
        let rank: u32 = fields[2].parse().map_err(|_| err("invalid rank"))?;
        if mordell::discriminant(a, b).is_zero() {
            return Err(err("singular curve"));
        }
        let provenance = fields.get(3).map(|s| s.to_string()).unwrap_or_default();
        match table.entry((a, b)) {
            Entry::Occupied(_) => return Err(CurveError::DuplicateCurve { line: line_no, a, b }),
            Entry::Vacant(slot) => {
                slot.insert(RankRecord { a, b, rank, provenance });
            }
        }
    }
    Ok(table)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.0[ri.max(rj)] = ri.min(rj);
        }
    }
}

/// Partitions points by box-relative PGL2(Q)-equivalence of their quartics.
/// Classes are sorted internally and ordered by their least point.
pub fn psi_classes(
    curve: &WeierstrassCurve,
    points: &[IntegralPoint],
    bound: u64,
) -> Result<Vec<Vec<IntegralPoint>>, CurveError> {
    let pts: Vec<IntegralPoint> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let forms = pts
        .iter()
        .map(|&p| point_to_quartic(curve, p))
        .collect::<Result<Vec<_>, _>>()?;
    let index: BTreeMap<_, usize> = forms.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let mut uf = UnionFind((0..pts.len()).collect());
    for (i, f) in forms.iter().enumerate() {
        for t in flattening_transforms(f, bound)? {
            if let Some(&j) = index.get(&t.image) {
                uf.union(i, j);
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<IntegralPoint>> = BTreeMap::new();
    for (i, &p) in pts.iter().enumerate() {
        classes.entry(uf.find(i)).or_default().push(p);
    }
    Ok(classes.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<IntegralPoint> {
        v.iter().map(|&(x, y)| IntegralPoint::new(x, y)).collect()
    }

    fn curve(a: i64, b: i64) -> WeierstrassCurve {
        WeierstrassCurve::new(a, b).unwrap()
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(curve_invariants(0, 1).unwrap(), (BigInt::from(-432), BigInt::from(27)));
        assert_eq!(curve_invariants(-1, 0).unwrap(), (BigInt::from(64), BigInt::from(4)));
        assert!(matches!(curve_invariants(0, 0), Err(CurveError::SingularCurve)));
    }

    #[test]
    fn point_search_examples() {
        assert_eq!(search_integral_points(&curve(0, -2), -10, 10).unwrap(), pts(&[(3, -5), (3, 5)]));
        assert_eq!(
            search_integral_points(&curve(0, 1), -10, 10).unwrap(),
            pts(&[(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)])
        );
        assert_eq!(search_integral_points(&curve(-1, 0), -10, 10).unwrap(), pts(&[(-1, 0), (0, 0), (1, 0)]));
        assert_eq!(count_integral_points(0, 1, 10), 5);
        assert!(matches!(search_integral_points(&curve(0, 1), 5, 4), Err(CurveError::BadWindow { .. })));
    }

    #[test]
    fn minimality_examples() {
        assert!(is_minimal(0, 1).unwrap());
        assert!(!is_minimal(16, 64).unwrap());
        assert!(is_minimal(-1, 0).unwrap());
        assert!(!is_minimal(0, 64).unwrap());
        assert!(!is_minimal(81, 0).unwrap());
        assert!(is_minimal(16, 32).unwrap());
        assert!(matches!(is_minimal(0, 0), Err(CurveError::SingularCurve)));
    }

    #[test]
    fn marked_examples() {
        assert!(matches!(MarkedCurve::new(0, 0, 0, MarkedVariant::Point), Err(CurveError::SingularCurve)));
        assert!(matches!(MarkedCurve::new(0, 1, 0, MarkedVariant::TwoTorsion), Err(CurveError::NotTwoTorsionModel)));
        let c = MarkedCurve::new(0, 0, 1, MarkedVariant::TwoTorsion).unwrap();
        assert_eq!(c.discriminant(), BigInt::from(-64));
        assert_eq!(search_marked_points(&c, -5, 5).unwrap(), vec![(0, 0)]);
        // y^2 + y = x^3 - x, brute force over a generous y range
        let c = MarkedCurve::new(0, 1, -1, MarkedVariant::Point).unwrap();
        assert_eq!(c.discriminant(), BigInt::from(37));
        let mut brute = Vec::new();
        for x in -5i64..=5 {
            for y in -400i64..=400 {
                if y * y + y == x * x * x - x {
                    brute.push((x, y));
                }
            }
        }
        assert_eq!(search_marked_points(&c, -5, 5).unwrap(), brute);
        assert_eq!(count_marked_points(0, 1, -1, 5), brute.len() as u64);
        assert_eq!(c.height(), BigInt::from(1));
    }

    #[test]
    fn rank_table() {
        let text = "# fixtures\n0,-2,1,tables\n0,1,0\n\n0,17,2 # comment\n";
        let t = load_rank_table(text.as_bytes()).unwrap();
        assert_eq!(t[&(0, -2)].rank, 1);
        assert_eq!(t[&(0, -2)].provenance, "tables");
        assert_eq!(t[&(0, 1)].rank, 0);
        assert_eq!(t[&(0, 17)].rank, 2);
        assert!(matches!(
            load_rank_table("0,1,0\n0,1,1\n".as_bytes()),
            Err(CurveError::DuplicateCurve { line: 2, .. })
        ));
        assert!(matches!(load_rank_table("0,1\n".as_bytes()), Err(CurveError::ParseError { line: 1, .. })));
        assert!(matches!(load_rank_table("\n0,0,1\n".as_bytes()), Err(CurveError::ParseError { line: 2, .. })));
    }

    #[test]
    fn psi_class_examples() {
        let c = curve(0, -2);
        let classes = psi_classes(&c, &pts(&[(3, 5), (3, -5)]), 50).unwrap();
        assert_eq!(classes, vec![pts(&[(3, -5), (3, 5)])]);
        let c = curve(0, 1);
        let all = search_integral_points(&c, -10, 10).unwrap();
        let classes = psi_classes(&c, &all, 50).unwrap();
        assert!(classes.len() <= 4);
        for class in &classes {
            for p in class {
                assert!(class.contains(&p.negate()));
            }
        }
        assert_eq!(psi_classes(&c, &pts(&[(2, 3)]), 50).unwrap().len(), 1);
    }

    #[test]
    fn semistable_filter() {
        // y^2 = x^3 + 5x + 5: 4*125 + 27*25 = 1175 = 5^2 * 47, 5 | A
        assert!(!is_semistable_approx(5, 5));
        assert!(is_semistable_approx(-1, 0));
    }
}
