//! Projective transforms between flattened quartics.
//!
//! For a flattened `f`, every `gamma` in PGL2(Q) with `gamma . f` flattened
//! has a primitive integer representative whose first row `(a, b)` is
//! coprime with `f(a, b) = det(gamma)^2` dividing `disc(f)`. Conversely each
//! such `(a, b)` determines at most one `gamma`: extend `(a, b)` to
//! `g in SL2(Z)`, then the only candidates are `[[1, 0], [lambda, mu]] g`
//! with `mu = +-delta` and `lambda = -a1 / (4 mu)`, where `a1` is the
//! `X^3 Y` coefficient of `g . f`.
//!
//! Representation searches are exhaustive inside an explicit box
//! `|a|, |b| <= box` and claim nothing outside it.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, Factorization};
use crate::mordell::completion;
use crate::quartic::{BinaryQuartic, ProjectiveTransform};

/// Per-prime factor cap from the Thue-equation count.
pub const EVERTSE_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibreError {
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("discriminant {0} exceeds the 64-bit factorization range")]
    TooLarge(BigInt),
    #[error("quartic is not flattened")]
    NotFlattened,
    #[error("invariants differ, forms are inequivalent")]
    InvariantMismatch,
}

/// Primes whose square divides a discriminant, with valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareDivisorProfile {
    disc: BigInt,
    /// `(p, v_p)` for every prime with `v_p >= 2`, ascending.
    factors: Factorization,
    /// Primes where `4 floor(v_p / 2) + 1 >= EVERTSE_CAP`.
    capped: Vec<u64>,
    /// Product of `p^v_p` over non-capped primes with `p^2 | disc`.
    d_part: BigInt,
}

impl SquareDivisorProfile {
    pub fn new(disc: &BigInt) -> Result<Self, FibreError> {
        if disc.is_zero() {
            return Err(FibreError::ZeroDiscriminant);
        }
        let n = disc.abs().to_u64().ok_or_else(|| FibreError::TooLarge(disc.clone()))?;
        Ok(Self::from_factorization(disc.clone(), &arith::factor_u64(n)))
    }

    /// Builds the profile from a full factorization of `|disc|`.
    pub fn from_factorization(disc: BigInt, full: &[(u64, u32)]) -> Self {
        let factors: Factorization = full.iter().copied().filter(|&(_, v)| v >= 2).collect();
        let capped: Vec<u64> = factors
            .iter()
            .filter(|&&(_, v)| per_prime_factor(v) >= EVERTSE_CAP)
            .map(|&(p, _)| p)
            .collect();
        let d_part = factors
            .iter()
            .filter(|(p, _)| !capped.contains(p))
            .fold(BigInt::one(), |acc, &(p, v)| acc * BigInt::from(p).pow(v));
        Self { disc, factors, capped, d_part }
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn capped_primes(&self) -> &[u64] {
        &self.capped
    }

    pub fn d_part(&self) -> &BigInt {
        &self.d_part
    }

    /// Splits `delta` (with `delta^2 | disc`) as `nu * mu`, `nu = gcd(delta, D)`.
    pub fn split(&self, delta: &BigInt) -> (BigInt, BigInt) {
        let nu = delta.gcd(&self.d_part);
        let mu = delta / &nu;
        (nu, mu)
    }

    /// Every positive `delta` with `delta^2 | disc`, ascending.
    pub fn square_divisors(&self) -> Vec<u64> {
        let halves: Factorization = self.factors.iter().map(|&(p, v)| (p, v / 2)).collect();
        arith::divisors(&halves)
    }

    /// `prod (floor(v_p / 2) + 1)^t`.
    pub fn moment_weight(&self, t: u32) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, &(_, v)| acc * BigUint::from(v / 2 + 1).pow(t))
    }
}

fn per_prime_factor(v: u32) -> u64 {
    4 * (v as u64 / 2) + 1
}

/// Positive `delta` with `delta^2 | disc`, ascending.
pub fn square_divisors(disc: &BigInt) -> Result<Vec<u64>, FibreError> {
    Ok(SquareDivisorProfile::new(disc)?.square_divisors())
}

/// `prod min(4 floor(v_p / 2) + 1, 2 * 10^7)` over the profile. With
/// `refined`, primes with `v_p` in `{2, 3}` contribute 4 instead of 5.
pub fn fibre_bound(profile: &SquareDivisorProfile, refined: bool) -> BigUint {
    profile.factors.iter().fold(BigUint::one(), |acc, &(_, v)| {
        let factor = if refined && (v == 2 || v == 3) { 4 } else { per_prime_factor(v).min(EVERTSE_CAP) };
        acc * BigUint::from(factor)
    })
}

/// Evaluates an integral quartic at integer points, in `i128` when it fits.
struct Evaluator<'a> {
    form: &'a BinaryQuartic,
    small: Option<[i128; 5]>,
}

impl<'a> Evaluator<'a> {
    fn new(form: &'a BinaryQuartic) -> Self {
        Self { form, small: form.i128_coeffs() }
    }

    /// `c_k b^k`, the coefficients of the univariate polynomial in `a`.
    fn column(&self, b: i64) -> Option<[i128; 5]> {
        let c = self.small?;
        let mut out = [0i128; 5];
        let mut bp: i128 = 1;
        for k in 0..5 {
            out[k] = c[k].checked_mul(bp)?;
            if k < 4 {
                bp = bp.checked_mul(b as i128)?;
            }
        }
        Some(out)
    }

    fn horner(col: &[i128; 5], a: i64) -> Option<i128> {
        let a = a as i128;
        let mut acc = col[0];
        for &ck in &col[1..] {
            acc = acc.checked_mul(a)?.checked_add(ck)?;
        }
        Some(acc)
    }

    fn exact(&self, a: i64, b: i64) -> BigRational {
        self.form.eval_int(a, b)
    }
}

/// All coprime `(a, b)` with `|a|, |b| <= bound` and `f(a, b) = m`.
pub fn coprime_representations(f: &BinaryQuartic, m: &BigInt, bound: u64) -> BTreeSet<(i64, i64)> {
    let bound = bound as i64;
    let target = BigRational::from_integer(m.clone());
    let small_target = m.to_i128();
    let ev = Evaluator::new(f);
    let mut out = BTreeSet::new();
    for b in -bound..=bound {
        let col = ev.column(b);
        for a in -bound..=bound {
            if arith::gcd_i128(a as i128, b as i128) != 1 {
                continue;
            }
            let hit = match (col.as_ref().and_then(|c| Evaluator::horner(c, a)), small_target) {
                (Some(v), Some(t)) => v == t,
                (Some(_), None) => false,
                (None, _) => ev.exact(a, b) == target,
            };
            if hit {
                out.insert((a, b));
            }
        }
    }
    out
}

/// A transform carrying a flattened form to a flattened form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatteningTransform {
    pub gamma: ProjectiveTransform,
    /// First row of the primitive representative, with its overall sign
    /// chosen as `sign(det)` times the canonical one. Both representatives
    /// share a determinant, so this is what separates `gamma` from
    /// `diag(1, -1) gamma` when they share a first row up to sign.
    pub top_row: (i64, i64),
    /// `f(top_row) = det(gamma)^2`.
    pub det_sq: BigInt,
    pub image: BinaryQuartic,
}

/// Coprime `(a, b, delta)` in the box with `f(a, b) = delta^2` and `delta^2 | disc(f)`.
pub fn square_representations(f: &BinaryQuartic, disc: &BigInt, bound: u64) -> Vec<(i64, i64, u64)> {
    let bound = bound as i64;
    let ev = Evaluator::new(f);
    let small_disc = disc.to_i128();
    let mut out = Vec::new();
    for b in -bound..=bound {
        let col = ev.column(b);
        for a in -bound..=bound {
            let value: BigInt = match (col.as_ref().and_then(|c| Evaluator::horner(c, a)), small_disc) {
                (Some(v), Some(d)) => {
                    if v <= 0 || d % v != 0 {
                        continue;
                    }
                    if arith::exact_sqrt_i128(v).is_none() {
                        continue;
                    }
                    BigInt::from(v)
                }
                _ => {
                    let v = ev.exact(a, b);
                    if !v.is_integer() || !v.is_positive() {
                        continue;
                    }
                    let v = v.to_integer();
                    if !(disc % &v).is_zero() {
                        continue;
                    }
                    v
                }
            };
            if arith::gcd_i128(a as i128, b as i128) != 1 {
                continue;
            }
            let root = value.sqrt();
            if &root * &root != value {
                continue;
            }
            if let Some(delta) = root.to_u64() {
                out.push((a, b, delta));
            }
        }
    }
    out
}

/// Sign-normalized first row of the canonical representative.
pub fn phi(gamma: &ProjectiveTransform) -> Option<(i64, i64)> {
    let [a, b, _, _] = gamma.entries();
    let (a, b) = if gamma.det().is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    Some((a.to_i64()?, b.to_i64()?))
}

/// Transforms with first row `(a, b)` and flattened image, one per working
/// sign of `mu`. Requires `gcd(a, b) = 1` and `f(a, b) = delta^2`.
pub fn sign_candidates(f: &BinaryQuartic, a: i64, b: i64, delta: u64) -> Vec<(ProjectiveTransform, BinaryQuartic)> {
    let (ab, bb) = (BigInt::from(a), BigInt::from(b));
    let g = completion(&ab, &bb).expect("coprime");
    let moved = f.substitute(&g);
    let a0 = moved.coeffs()[0].clone();
    let a1 = moved.coeffs()[1].clone();
    debug_assert_eq!(a0, BigRational::from_integer(BigInt::from(delta) * BigInt::from(delta)));
    let [_, _, gc, gd] = g.entries().clone().map(BigRational::from_integer);
    let (ar, br) = (BigRational::from_integer(ab), BigRational::from_integer(bb));
    let mut out = Vec::with_capacity(2);
    for mu in [BigInt::from(delta), -BigInt::from(delta)] {
        let mu = BigRational::from_integer(mu);
        let lambda = -(&a1 / (BigRational::from_integer(4.into()) * &mu));
        let gamma = ProjectiveTransform::from_rationals([
            ar.clone(),
            br.clone(),
            &lambda * &ar + &mu * &gc,
            &lambda * &br + &mu * &gd,
        ])
        .expect("det = mu != 0");
        let image = f.act_twisted(&gamma);
        if image.is_flattened() {
            out.push((gamma, image));
        }
    }
    out
}

/// Every PGL2(Q) element arising from a coprime square representation of a
/// divisor of `disc(f)` inside the box whose image is again flattened.
/// Sorted by `top_row`; distinct transforms have distinct `top_row`.
pub fn flattening_transforms(f: &BinaryQuartic, bound: u64) -> Result<Vec<FlatteningTransform>, FibreError> {
    if !f.is_flattened() {
        return Err(FibreError::NotFlattened);
    }
    let disc = f.invariants().disc.to_integer();
    if disc.is_zero() {
        return Err(FibreError::ZeroDiscriminant);
    }
    let mut found: BTreeMap<ProjectiveTransform, BinaryQuartic> = BTreeMap::new();
    for (a, b, delta) in square_representations(f, &disc, bound) {
        for (gamma, image) in sign_candidates(f, a, b, delta) {
            found.entry(gamma).or_insert(image);
        }
    }
    let mut out: Vec<FlatteningTransform> = found
        .into_iter()
        .filter_map(|(gamma, image)| {
            let top_row = phi(&gamma)?;
            let det_sq = gamma.det() * gamma.det();
            Some(FlatteningTransform { gamma, top_row, det_sq, image })
        })
        .collect();
    out.sort_by(|x, y| x.top_row.cmp(&y.top_row));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// A transform carrying the first form to the second was found.
    WithinBox(ProjectiveTransform),
    /// Inconclusive: no transform with first row inside the box.
    NotFoundWithinBox,
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::WithinBox(_))
    }
}

/// Box-relative PGL2(Q)-equivalence test for flattened forms.
pub fn pgl2_flattened_equivalent(
    f1: &BinaryQuartic,
    f2: &BinaryQuartic,
    bound: u64,
) -> Result<Equivalence, FibreError> {
    let (i1, i2) = (f1.invariants(), f2.invariants());
    if i1.i != i2.i || i1.j != i2.j {
        return Err(FibreError::InvariantMismatch);
    }
    if !f2.is_flattened() {
        return Err(FibreError::NotFlattened);
    }
    Ok(flattening_transforms(f1, bound)?
        .into_iter()
        .find(|t| &t.image == f2)
        .map_or(Equivalence::NotFoundWithinBox, |t| Equivalence::WithinBox(t.gamma)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: [i64; 5]) -> BinaryQuartic {
        BinaryQuartic::from_ints(c)
    }

    fn brute_square_divisors(n: i64) -> Vec<u64> {
        let n = n.unsigned_abs();
        (1..).take_while(|d| d * d <= n).filter(|d| n % (d * d) == 0).collect()
    }

    #[test]
    fn square_divisor_examples() {
        assert_eq!(square_divisors(&BigInt::from(64)).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(square_divisors(&BigInt::from(-30)).unwrap(), vec![1]);
        let d = square_divisors(&BigInt::from(-442368)).unwrap();
        assert_eq!(d, brute_square_divisors(-442368));
        assert_eq!(d, vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 384]);
        assert_eq!(square_divisors(&BigInt::zero()), Err(FibreError::ZeroDiscriminant));
        for n in 1..3000i64 {
            assert_eq!(square_divisors(&BigInt::from(n)).unwrap(), brute_square_divisors(n));
        }
    }

    #[test]
    fn profile_split() {
        let p = SquareDivisorProfile::new(&BigInt::from(-442368)).unwrap();
        assert_eq!(p.factors(), &[(2, 14), (3, 3)]);
        assert!(p.capped_primes().is_empty());
        assert_eq!(p.d_part(), &BigInt::from(442368));
        for delta in p.square_divisors() {
            let (nu, mu) = p.split(&BigInt::from(delta));
            assert_eq!(&nu * &mu, BigInt::from(delta));
        }
        // capped primes leave D
        let huge = SquareDivisorProfile::from_factorization(BigInt::from(1), &[(2, 10_000_000), (3, 2)]);
        assert_eq!(huge.capped_primes(), &[2]);
        assert_eq!(huge.d_part(), &BigInt::from(9));
        assert_eq!(fibre_bound(&huge, false), BigUint::from(EVERTSE_CAP * 5));
    }

    #[test]
    fn representation_examples() {
        let f = q([1, 0, -6, 0, 1]);
        let reps = coprime_representations(&f, &BigInt::one(), 100);
        assert_eq!(reps, BTreeSet::from([(-1, 0), (0, -1), (0, 1), (1, 0)]));
        let x4 = q([1, 0, 0, 0, 0]);
        let reps = coprime_representations(&x4, &BigInt::one(), 10);
        let expect: BTreeSet<_> = (-10..=10).flat_map(|b| [(1, b), (-1, b)]).collect();
        assert_eq!(reps, expect);
        // X^4 + Y^4 has no nontrivial zeros
        assert!(coprime_representations(&q([1, 0, 0, 0, 1]), &BigInt::zero(), 20).is_empty());
    }

    #[test]
    fn identity_always_present() {
        for f in [q([1, 0, -6, 0, 1]), q([1, 0, -18, 40, -27]), q([1, 0, 0, 8, 0])] {
            let ts = flattening_transforms(&f, 1).unwrap();
            let id = ts.iter().find(|t| t.gamma == ProjectiveTransform::identity()).unwrap();
            assert_eq!(id.top_row, (1, 0));
            assert_eq!(id.image, f);
        }
    }

    #[test]
    fn reflection_is_distinct() {
        let f = q([1, 0, -18, 40, -27]);
        let ts = flattening_transforms(&f, 50).unwrap();
        let flip = ProjectiveTransform::from_ints([1, 0, 0, -1]).unwrap();
        let t = ts.iter().find(|t| t.gamma == flip).unwrap();
        assert_eq!(t.image, q([1, 0, -18, -40, -27]));
        assert_eq!(t.top_row, (-1, 0));
        assert!(ts.iter().any(|t| t.gamma == ProjectiveTransform::identity()));
    }

    #[test]
    fn symmetric_form_has_four() {
        let f = q([1, 0, -6, 0, 1]);
        let ts = flattening_transforms(&f, 100).unwrap();
        assert!(ts.len() <= 4, "{ts:?}");
        assert!(ts.iter().all(|t| t.gamma.is_unimodular()));
        let rows: BTreeSet<_> = ts.iter().map(|t| t.top_row).collect();
        assert_eq!(rows.len(), ts.len());
        // the four signed axes are all realised
        assert_eq!(rows, BTreeSet::from([(-1, 0), (0, -1), (0, 1), (1, 0)]));
    }

    #[test]
    fn lemma_structure_on_small_forms() {
        for c in -4..=4 {
            for d in -4..=4 {
                for e in -6..=6 {
                    let f = q([1, 0, c, d, e]);
                    let disc = f.invariants().disc.to_integer();
                    if disc.is_zero() {
                        continue;
                    }
                    let ts = flattening_transforms(&f, 12).unwrap();
                    let mut rows = BTreeSet::new();
                    for t in &ts {
                        let (a, b) = t.top_row;
                        assert_eq!(num_integer::gcd(a, b), 1);
                        assert_eq!(f.eval_int(a, b), BigRational::from_integer(t.det_sq.clone()));
                        assert!((&disc % &t.det_sq).is_zero());
                        assert_eq!(f.act_twisted(&t.gamma), t.image);
                        assert!(t.image.is_flattened());
                        assert!(rows.insert(t.top_row));
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let f = q([1, 0, -18, 40, -27]);
        assert!(pgl2_flattened_equivalent(&f, &f, 1).unwrap().is_equivalent());
        let g = q([1, 0, -18, -40, -27]);
        assert!(pgl2_flattened_equivalent(&f, &g, 50).unwrap().is_equivalent());
        assert_eq!(
            pgl2_flattened_equivalent(&q([1, 0, -6, 0, 1]), &q([1, 0, 0, 0, 1]), 10),
            Err(FibreError::InvariantMismatch)
        );
    }

    #[test]
    fn fibre_bound_examples() {
        let squarefree = SquareDivisorProfile::new(&BigInt::from(-30)).unwrap();
        assert_eq!(fibre_bound(&squarefree, false), BigUint::one());
        let p4 = SquareDivisorProfile::new(&BigInt::from(3i64.pow(4) * 7)).unwrap();
        assert_eq!(fibre_bound(&p4, false), BigUint::from(9u32));
        let p2 = SquareDivisorProfile::new(&BigInt::from(25 * 3)).unwrap();
        assert_eq!(fibre_bound(&p2, true), BigUint::from(4u32));
        assert_eq!(fibre_bound(&p2, false), BigUint::from(5u32));
        let mixed = SquareDivisorProfile::new(&BigInt::from(8 * 81 * 11)).unwrap();
        assert_eq!(fibre_bound(&mixed, false), BigUint::from(5u32 * 9));
        assert_eq!(fibre_bound(&mixed, true), BigUint::from(4u32 * 9));
    }
}
