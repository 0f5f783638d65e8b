//! Covering a set of small doubling by translates of a low-dimensional
//! progression.
//!
//! The pipeline maps `A` into a box through a 2-proper progression
//! containing it, orders the box sides decreasingly, cuts the box into
//! copies of its first `l` sides with `l = ⌊log₂K + ε⌋`, and halves sides of
//! the resulting progression until its size is at most `|A|`. The fibre
//! inequality that bounds the discarded sides is checked along the way.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compress::{box_remainder, pow2, GridBox};
use crate::error::{Error, Result};
use crate::par;
use crate::progression::{box_isomorphism, bounding_box_progression, Progression};
use crate::report::{params, ParamValue, Relation, VerificationReport};
use crate::sets::{doubling_constant, minkowski_sum, sumset_size, LatticePoint, PointSet, Rational};
use crate::Budget;

/// `max{n ≥ 0 : 2^n ≤ 2^ε K}` for `K ≥ 1` and `ε > 0`, i.e. `⌊log₂K + ε⌋`.
///
/// With `K = a/b` and `ε = p/q` the test `2^{nq} b^q ≤ 2^p a^q` is decided
/// in integers.
pub fn cover_dimension(k: &Rational, epsilon: &Rational) -> Result<usize> {
    if *k < Rational::one() {
        return Err(Error::InvalidArgument(format!("doubling constant {k} is below 1")));
    }
    if *epsilon <= Rational::zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let (a, b) = (k.numer(), k.denom());
    let (p, q) = (epsilon.numer(), epsilon.denom());
    let p = p.to_usize().ok_or_else(|| Error::InvalidArgument("epsilon numerator too large".into()))?;
    let q = q.to_u32().ok_or_else(|| Error::InvalidArgument("epsilon denominator too large".into()))?;
    let right = (BigInt::one() << p) * a.pow(q);
    let bq = b.pow(q);
    let mut n = 0usize;
    while (&bq << ((n + 1) * q as usize)) <= right {
        n += 1;
    }
    Ok(n)
}

fn require_sorted(bx: &GridBox) -> Result<()> {
    if bx.lengths().windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!("box sides {bx} are not in non-increasing order")));
    }
    Ok(())
}

fn require_in_box(a: &PointSet, bx: &GridBox) -> Result<()> {
    if a.dim() != bx.dim() {
        return Err(Error::DimensionMismatch { expected: bx.dim(), found: a.dim() });
    }
    match bx.first_outside(a) {
        Some(p) => Err(Error::NotContained { point: p.to_string(), container: format!("box {bx}") }),
        None => Ok(()),
    }
}

/// Splits `φ(A)` into fibres `φ(A) ∩ ([L₁] × … × [L_{l+1}] × {x})`, keyed by
/// the trailing coordinates `x` in lexicographic order. Empty fibres are
/// omitted.
pub fn fibre_decomposition(phi_a: &PointSet, bx: &GridBox, l: usize) -> Result<Vec<(LatticePoint, PointSet)>> {
    require_sorted(bx)?;
    require_in_box(phi_a, bx)?;
    let d = bx.dim();
    if l + 1 > d {
        return Err(Error::InvalidArgument(format!("fibre split needs l + 1 <= d, got l = {l}, d = {d}")));
    }
    let mut fibres: BTreeMap<LatticePoint, Vec<LatticePoint>> = BTreeMap::new();
    for p in phi_a {
        let key = LatticePoint::new(p.coords()[l + 1..].to_vec());
        fibres.entry(key).or_default().push(p.clone());
    }
    fibres.into_iter().map(|(x, pts)| Ok((x, PointSet::new(d, pts)?))).collect()
}

fn product(lengths: &[u64]) -> BigInt {
    lengths.iter().map(|&l| BigInt::from(l)).product()
}

/// Checks the fibre inequality for `φ(A)` in a box with sides sorted
/// decreasingly:
///
/// * the fibre self-sums are pairwise disjoint and their sizes add up to at
///   most `|φ(A) + φ(A)|`;
/// * every fibre obeys `|F + F| ≥ 2^{l+1}|F| − d 2^d L₁⋯L_l`, and the exact
///   box bound in its own `l + 1` sides;
/// * summing, `|φ(A) + φ(A)| ≥ 2^{l+1}|φ(A)| − d 2^d L₁⋯L_l L_{l+2}⋯L_d`,
///   which is the compared statement.
pub fn verify_fibre_inequality(phi_a: &PointSet, bx: &GridBox, l: usize) -> Result<VerificationReport> {
    phi_a.require_nonempty()?;
    let fibres = fibre_decomposition(phi_a, bx, l)?;
    let d = bx.dim();
    let lengths = bx.lengths();
    let sums: Vec<PointSet> = par::map_slice(&fibres, |(_, f)| minkowski_sum(f, f).expect("same dimension"));
    let fibre_total: usize = sums.iter().map(PointSet::len).sum();
    let mut union: Vec<&LatticePoint> = sums.iter().flat_map(PointSet::iter).collect();
    union.sort_unstable();
    union.dedup();
    let disjoint = union.len() == fibre_total;
    let whole = sumset_size(phi_a, phi_a)?;

    let coarse = BigInt::from(d) * pow2(d) * product(&lengths[..l]);
    let exact = box_remainder(&lengths[..=l]);
    let grow = pow2(l + 1);
    let mut coarse_ok = true;
    let mut exact_ok = true;
    for ((_, f), s) in fibres.iter().zip(&sums) {
        let lower = &grow * BigInt::from(f.len());
        let s = BigInt::from(s.len());
        coarse_ok &= s >= &lower - &coarse;
        exact_ok &= s >= &lower + &exact;
    }
    let trailing = product(&lengths[l + 1..]);
    let rhs = &grow * BigInt::from(phi_a.len()) - &coarse * &trailing;
    Ok(VerificationReport::compare("fibre-inequality", BigInt::from(whole), Relation::Ge, rhs)
        .param("d", d)
        .param("l", l)
        .param("box", ParamValue::ints(lengths.iter().copied()))
        .param("fibres", fibres.len())
        .param("fibre-sum-total", fibre_total)
        .require("fibre-sums-disjoint", disjoint)
        .require("fibre-sum-total-bounded", fibre_total <= whole)
        .require("per-fibre-coarse-bound", coarse_ok)
        .require("per-fibre-exact-bound", exact_ok))
}

/// Offsets `{0}^l × [L_{l+1}] × … × [L_d]` whose translates of
/// `[L₁] × … × [L_l] × {0}` tile the box, in lexicographic order.
pub fn cover_box(bx: &GridBox, l: usize) -> Result<Vec<LatticePoint>> {
    let d = bx.dim();
    if l > d {
        return Err(Error::InvalidArgument(format!("cover dimension {l} exceeds box dimension {d}")));
    }
    if l == d {
        return Ok(vec![LatticePoint::zero(d)]);
    }
    let tail = GridBox::new(bx.lengths()[l..].to_vec())?.points();
    Ok(tail
        .iter()
        .map(|t| {
            let mut c = vec![BigInt::zero(); l];
            c.extend_from_slice(t.coords());
            LatticePoint::new(c)
        })
        .collect())
}

/// Translates `base + o` of one progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub base: Progression,
    pub offsets: Vec<LatticePoint>,
}

impl Cover {
    pub fn count(&self) -> usize {
        self.offsets.len()
    }

    /// Points of `a` lying in no translate.
    pub fn uncovered(&self, a: &PointSet, budget: &Budget) -> Result<Vec<LatticePoint>> {
        let base = self.base.enumerate(budget)?;
        Ok(a.iter().filter(|p| !self.offsets.iter().any(|o| base.contains(&(*p - o)))).cloned().collect())
    }
}

/// A cover together with its parameters and the checks run on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverOutcome {
    pub cover: Cover,
    pub parameters: Vec<(String, ParamValue)>,
    pub checks: Vec<VerificationReport>,
}

impl CoverOutcome {
    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(VerificationReport::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cover serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("cover serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[derive(Serialize, Deserialize)]
struct RawOutcome {
    base: Progression,
    offsets: Vec<LatticePoint>,
    count: usize,
    #[serde(with = "params")]
    parameters: Vec<(String, ParamValue)>,
    checks: Vec<VerificationReport>,
}

impl Serialize for CoverOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawOutcome {
            base: self.cover.base.clone(),
            offsets: self.cover.offsets.clone(),
            count: self.cover.count(),
            parameters: self.parameters.clone(),
            checks: self.checks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoverOutcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawOutcome::deserialize(d)?;
        if raw.count != raw.offsets.len() {
            return Err(serde::de::Error::custom("count does not match the number of offsets"));
        }
        Ok(CoverOutcome {
            cover: Cover { base: raw.base, offsets: raw.offsets },
            parameters: raw.parameters,
            checks: raw.checks,
        })
    }
}

/// Covers `A` by translates of a progression of dimension at most
/// `⌊log₂K + ε⌋` and size at most `|A|`, given a 2-proper progression `P`
/// containing `A`.
pub fn freiman_bilu_cover(a: &PointSet, p: &Progression, epsilon: &Rational, budget: &Budget) -> Result<CoverOutcome> {
    cover_with(a, p, epsilon, budget, "supplied")
}

/// [`freiman_bilu_cover`] with the bounding box of `A` as the container.
pub fn freiman_bilu_cover_bounding_box(a: &PointSet, epsilon: &Rational, budget: &Budget) -> Result<CoverOutcome> {
    let p = bounding_box_progression(a)?;
    cover_with(a, &p, epsilon, budget, "bounding-box")
}

fn cover_with(a: &PointSet, p: &Progression, epsilon: &Rational, budget: &Budget, container: &str) -> Result<CoverOutcome> {
    if *epsilon <= Rational::zero() || *epsilon > Rational::one() {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    a.require_nonempty()?;
    let k = doubling_constant(a)?;
    let l = cover_dimension(&k, epsilon)?;
    let n = a.len();

    let (sorted_p, phi_a) = if p.dim() == 0 {
        // a zero-dimensional container holds a single point
        if a.len() != 1 || a.points()[0] != *p.base() {
            return Err(Error::NotContained { point: a.points()[0].to_string(), container: "the progression".into() });
        }
        (p.clone(), None)
    } else {
        let phi = box_isomorphism(p, a, budget)?;
        let d = p.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(p.lengths()[i]));
        let gens = order.iter().map(|&i| p.generators()[i].clone()).collect();
        let lengths = order.iter().map(|&i| p.lengths()[i]).collect();
        let sorted = Progression::new(p.base().clone(), gens, lengths)?;
        let phi = PointSet::new(d, phi.iter().map(|q| LatticePoint::new(order.iter().map(|&i| q.coords()[i].clone()).collect())))?;
        (sorted, Some(phi))
    };
    let d = sorted_p.dim();
    let lengths = sorted_p.lengths().to_vec();
    let dim = l.min(d);

    // offsets in coefficient space, then halve the longest base side until
    // the base has size at most |A|
    let bx = if d == 0 { None } else { Some(GridBox::new(lengths.clone())?) };
    let mut offsets: Vec<Vec<u64>> = match &bx {
        None => vec![Vec::new()],
        Some(bx) => cover_box(bx, dim)?.iter().map(|o| o.to_usizes().expect("box offset").iter().map(|&c| c as u64).collect()).collect(),
    };
    let mut base_lengths = lengths[..dim].to_vec();
    let mut halvings = 0u32;
    while product(&base_lengths) > BigInt::from(n) {
        let (axis, &longest) = base_lengths.iter().enumerate().max_by_key(|&(i, &len)| (len, std::cmp::Reverse(i))).expect("non-empty base");
        let keep = longest.div_ceil(2);
        if BigInt::from(offsets.len()) * 2 > BigInt::from(budget.max_enum) {
            return Err(Error::budget("cover translates", format!("> {}", offsets.len() * 2), budget.max_enum.to_string()));
        }
        let shifted: Vec<Vec<u64>> = offsets
            .iter()
            .map(|o| {
                let mut o = o.clone();
                o[axis] += keep;
                o
            })
            .collect();
        offsets.extend(shifted);
        base_lengths[axis] = keep;
        halvings += 1;
    }

    let gens = sorted_p.generators();
    let base = Progression::new(sorted_p.base().clone(), gens[..dim].to_vec(), base_lengths.clone())?;
    let ambient = a.dim();
    let mut mapped: Vec<LatticePoint> = offsets
        .iter()
        .map(|o| {
            o.iter().zip(gens).fold(LatticePoint::zero(ambient), |acc, (&c, g)| &acc + &g.scale(&BigInt::from(c)))
        })
        .collect();
    mapped.sort();
    mapped.dedup();
    let cover = Cover { base, offsets: mapped };

    let uncovered = cover.uncovered(a, budget)?;
    let mut containment = VerificationReport::compare(
        "cover-containment",
        BigInt::from(n - uncovered.len()),
        Relation::Eq,
        BigInt::from(n),
    )
    .param("translates", cover.count());
    if !uncovered.is_empty() {
        containment.witness = Some(uncovered);
    }
    let base_size = cover.base.size();
    let mut checks = vec![
        containment,
        VerificationReport::compare("cover-dimension", BigInt::from(dim), Relation::Le, BigInt::from(l)),
        VerificationReport::compare("cover-size", base_size.clone(), Relation::Le, BigInt::from(n)),
    ];
    if let (Some(bx), Some(phi)) = (&bx, &phi_a) {
        let top = l.min(d - 1);
        checks.push(verify_fibre_inequality(phi, bx, top)?);
        // fibres cut by the cover translates themselves
        if dim >= 1 && dim - 1 != top {
            checks.push(verify_fibre_inequality(phi, bx, dim - 1)?);
        }
    }

    let mut parameters: Vec<(String, ParamValue)> = vec![
        ("K".into(), k.into()),
        ("epsilon".into(), epsilon.clone().into()),
        ("l".into(), l.into()),
        ("container".into(), container.into()),
        ("container-lengths".into(), ParamValue::ints(lengths.iter().copied())),
        ("|A|".into(), n.into()),
        ("base-size".into(), base_size.into()),
        ("halvings".into(), halvings.into()),
    ];
    if l < d {
        parameters.push(("L_(l+1)".into(), lengths[l].into()));
    }
    Ok(CoverOutcome { cover, parameters, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int_param(o: &CoverOutcome, key: &str) -> BigInt {
        o.get(key).and_then(ParamValue::as_integer).cloned().unwrap()
    }

    #[test]
    fn dimension_is_floor_of_log_plus_epsilon() {
        assert_eq!(cover_dimension(&r(5, 2), &r(1, 1)).unwrap(), 2);
        assert_eq!(cover_dimension(&r(21, 8), &r(1, 2)).unwrap(), 1);
        assert_eq!(cover_dimension(&r(11, 6), &r(1, 1)).unwrap(), 1);
        // exact tie: log₂4 + 1 = 3
        assert_eq!(cover_dimension(&r(4, 1), &r(1, 1)).unwrap(), 3);
        assert_eq!(cover_dimension(&r(1, 1), &r(1, 3)).unwrap(), 0);
        assert!(cover_dimension(&r(1, 2), &r(1, 1)).is_err());
    }

    #[test]
    fn fibre_examples() {
        let cube = GridBox::cube(2, 3).unwrap();
        let fibres = fibre_decomposition(&cube.points(), &cube, 1).unwrap();
        assert_eq!(fibres.len(), 2);
        assert!(fibres.iter().all(|(_, f)| f.len() == 4));
        assert_eq!(fibres[1].0, LatticePoint::from_i64s(&[1]));

        let whole = fibre_decomposition(&cube.points(), &cube, 2).unwrap();
        assert_eq!(whole.len(), 1);
        let origin = PointSet::from_rows([[0, 0, 0]]).unwrap();
        assert_eq!(fibre_decomposition(&origin, &cube, 0).unwrap().len(), 1);

        assert!(fibre_decomposition(&cube.points(), &cube, 3).is_err());
        let unsorted = GridBox::new(vec![2, 3]).unwrap();
        assert!(fibre_decomposition(&PointSet::from_rows([[0, 0]]).unwrap(), &unsorted, 0).is_err());
    }

    #[test]
    fn fibre_inequality_on_cube() {
        let cube = GridBox::cube(2, 3).unwrap();
        let rep = verify_fibre_inequality(&cube.points(), &cube, 1).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.lhs, r(27, 1));
        assert_eq!(rep.rhs, r(4 * 8 - 3 * 8 * 2 * 2, 1));
        assert_eq!(rep.get("fibre-sum-total").and_then(ParamValue::as_integer), Some(&BigInt::from(18)));

        let flat = GridBox::new(vec![4, 2]).unwrap();
        let rep = verify_fibre_inequality(&flat.points(), &flat, 1).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.get("fibres").and_then(ParamValue::as_integer), Some(&BigInt::one()));
    }

    #[test]
    fn box_cover_examples() {
        let b = GridBox::new(vec![5, 4, 3]).unwrap();
        let offs = cover_box(&b, 2).unwrap();
        assert_eq!(offs, (0..3).map(|z| LatticePoint::from_i64s(&[0, 0, z])).collect::<Vec<_>>());
        assert_eq!(cover_box(&b, 3).unwrap(), vec![LatticePoint::zero(3)]);
        assert!(cover_box(&b, 4).is_err());

        let b = GridBox::new(vec![4, 2]).unwrap();
        let offs = cover_box(&b, 1).unwrap();
        let strip = GridBox::new(vec![4, 1]).unwrap().points();
        let union = offs.iter().fold(PointSet::empty(2), |acc, o| acc.union(&strip.translate(o)).unwrap());
        assert_eq!(union, b.points());
    }

    #[test]
    fn cover_examples() {
        let budget = Budget::default();
        let a = PointSet::from_ints([0, 1, 10, 11, 20, 21]);
        let p = Progression::in_z(0, &[(1, 2), (10, 3)]);
        let out = freiman_bilu_cover(&a, &p, &r(1, 1), &budget).unwrap();
        assert!(out.passed());
        assert_eq!((out.cover.count(), int_param(&out, "l")), (1, BigInt::from(2)));
        assert_eq!(out.get("K"), Some(&ParamValue::Rational(r(5, 2))));
        assert_eq!(out.cover.base.size(), BigInt::from(6));

        let a = PointSet::from_ints([0, 1, 2, 3, 100, 101, 102, 103]);
        let p = Progression::in_z(0, &[(1, 4), (100, 2)]);
        let out = freiman_bilu_cover(&a, &p, &r(1, 2), &budget).unwrap();
        assert!(out.passed());
        assert_eq!((out.cover.count(), int_param(&out, "l")), (2, BigInt::one()));
        assert_eq!(out.cover.offsets, vec![LatticePoint::from_i64s(&[0]), LatticePoint::from_i64s(&[100])]);
        assert_eq!(out.cover.base, Progression::in_z(0, &[(1, 4)]));
        // translate fibres [4]×{0}, [4]×{1}: 7 + 7 ≤ 21
        let slabs = out.checks.iter().find(|c| c.get("l") == Some(&ParamValue::Integer(BigInt::zero()))).unwrap();
        assert_eq!(slabs.get("fibre-sum-total"), Some(&ParamValue::Integer(BigInt::from(14))));
        assert_eq!(slabs.lhs, r(21, 1));

        let a = PointSet::from_ints(0..6);
        let p = Progression::in_z(0, &[(1, 6)]);
        let out = freiman_bilu_cover(&a, &p, &r(1, 1), &budget).unwrap();
        assert!(out.passed());
        assert_eq!((out.cover.count(), int_param(&out, "l")), (1, BigInt::one()));
        assert_eq!(out.get("K"), Some(&ParamValue::Rational(r(11, 6))));
    }

    #[test]
    fn cover_trims_oversized_base() {
        // A sparse in a long progression: base [20]·1 is halved down to size ≤ 3
        let a = PointSet::from_ints([0, 7, 19]);
        let p = Progression::in_z(0, &[(1, 20)]);
        let out = freiman_bilu_cover(&a, &p, &r(1, 1), &Budget::default()).unwrap();
        assert!(out.passed());
        assert!(out.cover.base.size() <= BigInt::from(3));
        assert_eq!(out.cover.base.dim(), 1);
    }

    #[test]
    fn cover_rejects_bad_input() {
        let budget = Budget::default();
        let a = PointSet::from_ints([0, 1]);
        let p = Progression::in_z(0, &[(1, 2)]);
        assert!(freiman_bilu_cover(&a, &p, &r(0, 1), &budget).is_err());
        assert!(freiman_bilu_cover(&a, &p, &r(3, 2), &budget).is_err());
        let improper = Progression::in_z(0, &[(1, 2), (1, 2)]);
        assert!(matches!(freiman_bilu_cover(&a, &improper, &r(1, 1), &budget), Err(Error::NotProper { t: 2 })));
        let short = Progression::in_z(5, &[(1, 2)]);
        assert!(matches!(freiman_bilu_cover(&a, &short, &r(1, 1), &budget), Err(Error::NotContained { .. })));
    }

    #[test]
    fn bounding_box_fallback_records_container() {
        let a = PointSet::from_rows([[0, 0], [1, 0], [0, 1], [3, 2]]).unwrap();
        let out = freiman_bilu_cover_bounding_box(&a, &r(1, 1), &Budget::default()).unwrap();
        assert!(out.passed());
        assert_eq!(out.get("container"), Some(&ParamValue::Text("bounding-box".into())));
    }

    #[test]
    fn cover_json_round_trips() {
        let a = PointSet::from_ints([0, 1, 2, 3, 100, 101, 102, 103]);
        let p = Progression::in_z(0, &[(1, 4), (100, 2)]);
        let out = freiman_bilu_cover(&a, &p, &r(1, 2), &Budget::default()).unwrap();
        let json = out.to_json();
        assert!(json.starts_with(r#"{"base":{"base":[0],"generators":[[1]],"lengths":[4]},"offsets":[[0],[100]],"count":2,"parameters":{"K":"21/8","epsilon":"1/2","l":"1""#));
        assert_eq!(CoverOutcome::from_json(&json).unwrap(), out);
    }
}
