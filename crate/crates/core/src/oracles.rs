//! Brute-force and constructive oracles: parallelepiped search, extremal
//! minimal-doubling search, the lacunary block construction, and an
//! independent Freiman-dimension search used to cross-check the relation
//! lattice.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::compress::GridBox;
use crate::error::{Error, Result};
use crate::linalg::IntegerEchelon;
use crate::par;
use crate::sets::{affine_dimension, LatticePoint, PointSet, Rational};
use crate::Budget;

/// `v₀ + {0,1}·v₁ + … + {0,1}·v_d` with linearly independent `v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelepipedWitness {
    pub v0: LatticePoint,
    pub directions: Vec<LatticePoint>,
}

impl ParallelepipedWitness {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// All `2^d` vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<LatticePoint> {
        let mut out = vec![self.v0.clone()];
        for v in &self.directions {
            let shifted: Vec<LatticePoint> = out.iter().map(|p| p + v).collect();
            out.extend(shifted);
        }
        out.sort();
        out
    }

    /// Re-checks vertex membership in `host` and independence of the directions.
    pub fn validate(&self, host: &PointSet) -> bool {
        let dim = self.v0.dim();
        let mut ech = IntegerEchelon::new(dim);
        let independent = self.directions.iter().all(|v| v.dim() == dim && ech.insert(v.coords().to_vec()));
        independent && self.vertices().iter().all(|p| host.contains(p))
    }
}

struct Search<'a> {
    host: &'a PointSet,
    target: usize,
    steps: u64,
    max_steps: u64,
}

impl Search<'_> {
    /// Depth-first extension over endpoints in increasing index order.
    fn extend(
        &mut self,
        v0: usize,
        start: usize,
        dirs: &mut Vec<LatticePoint>,
        verts: &mut Vec<LatticePoint>,
        ech: &IntegerEchelon,
    ) -> Result<bool> {
        if dirs.len() == self.target {
            return Ok(true);
        }
        let pts = self.host.points();
        let needed = self.target - dirs.len();
        for j in start..pts.len() {
            if pts.len() - j < needed {
                break;
            }
            if j == v0 {
                continue;
            }
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(Error::budget("parallelepiped search", format!("> {}", self.max_steps), self.max_steps.to_string()));
            }
            let dir = &pts[j] - &pts[v0];
            let shifted: Vec<LatticePoint> = verts.iter().map(|p| p + &dir).collect();
            if !shifted.iter().all(|p| self.host.contains(p)) {
                continue;
            }
            let mut next = ech.clone();
            if !next.insert(dir.coords().to_vec()) {
                continue;
            }
            let keep = verts.len();
            verts.extend(shifted);
            dirs.push(dir);
            if self.extend(v0, j + 1, dirs, verts, &next)? {
                return Ok(true);
            }
            dirs.pop();
            verts.truncate(keep);
        }
        Ok(false)
    }
}

fn check_parallelepiped_budget(a: &PointSet, d: usize, budget: &Budget) -> Result<()> {
    if a.len() > budget.max_parallelepiped_points {
        return Err(Error::budget(
            "parallelepiped search host size",
            a.len().to_string(),
            budget.max_parallelepiped_points.to_string(),
        ));
    }
    if d > budget.max_parallelepiped_dim {
        return Err(Error::budget("parallelepiped dimension", d.to_string(), budget.max_parallelepiped_dim.to_string()));
    }
    Ok(())
}

/// A non-degenerate `d`-dimensional parallelepiped inside `a`, if any.
///
/// The search tries base points in lexicographic order and endpoints
/// `v₀ + v_i` in increasing order, so the first witness found is canonical.
pub fn find_parallelepiped(a: &PointSet, d: usize, budget: &Budget) -> Result<Option<ParallelepipedWitness>> {
    a.require_nonempty()?;
    check_parallelepiped_budget(a, d, budget)?;
    if d >= usize::BITS as usize - 1 || (1usize << d) > a.len() || d > a.dim() {
        return Ok(None);
    }
    let mut search = Search { host: a, target: d, steps: 0, max_steps: budget.max_enum };
    for v0 in 0..a.len() {
        let mut dirs = Vec::with_capacity(d);
        let mut verts = vec![a.points()[v0].clone()];
        if search.extend(v0, 0, &mut dirs, &mut verts, &IntegerEchelon::new(a.dim()))? {
            return Ok(Some(ParallelepipedWitness { v0: a.points()[v0].clone(), directions: dirs }));
        }
    }
    Ok(None)
}

/// Largest `d` admitting a witness in `a`, with that witness.
///
/// Fails with a budget error when the dimension cap is reached but the
/// affine dimension of `a` would allow more.
pub fn max_parallelepiped_dimension(a: &PointSet, budget: &Budget) -> Result<(usize, ParallelepipedWitness)> {
    a.require_nonempty()?;
    check_parallelepiped_budget(a, 0, budget)?;
    let upper = affine_dimension(a)?.min(a.len().ilog2() as usize);
    let mut best = (0, ParallelepipedWitness { v0: a.points()[0].clone(), directions: Vec::new() });
    for d in 1..=upper {
        if d > budget.max_parallelepiped_dim {
            return Err(Error::budget("parallelepiped dimension", format!("> {}", d - 1), budget.max_parallelepiped_dim.to_string()));
        }
        match find_parallelepiped(a, d, budget)? {
            Some(w) => best = (d, w),
            None => break,
        }
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Box symmetries as cell permutations: axis permutations that preserve side
/// lengths, combined with reflections `c ↦ L − 1 − c`.
fn box_symmetries(lengths: &[usize], cells: &[Vec<usize>], strides: &[usize]) -> Vec<Vec<usize>> {
    let d = lengths.len();
    let mut perms = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn rec(lengths: &[usize], cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == lengths.len() {
            out.push(cur.clone());
            return;
        }
        for src in 0..lengths.len() {
            if !used[src] && lengths[src] == lengths[cur.len()] {
                used[src] = true;
                cur.push(src);
                rec(lengths, cur, used, out);
                cur.pop();
                used[src] = false;
            }
        }
    }
    rec(lengths, &mut cur, &mut vec![false; d], &mut perms);
    let mut out = Vec::new();
    for perm in &perms {
        for flips in 0..1u32 << d {
            let table = cells
                .iter()
                .map(|c| {
                    (0..d)
                        .map(|k| {
                            let v = c[perm[k]];
                            let v = if flips >> k & 1 == 1 { lengths[k] - 1 - v } else { v };
                            v * strides[k]
                        })
                        .sum()
                })
                .collect();
            out.push(table);
        }
    }
    out
}

/// Visits every `k`-subset of `lo..n` in lexicographic order.
fn for_each_combination(lo: usize, n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n.saturating_sub(lo) {
        return;
    }
    let mut idx: Vec<usize> = (lo..lo + k).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else { return };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// A size-`n` subset of the box minimizing `|A + A|`, with that minimum.
///
/// Only orbit representatives under the box symmetry group are evaluated.
/// Among minimizers the lexicographically smallest representative wins.
pub fn min_doubling_search(bx: &GridBox, n: usize, budget: &Budget) -> Result<(PointSet, usize)> {
    let cells_set = bx.points();
    let total = cells_set.len();
    if n == 0 || n > total {
        return Err(Error::InvalidArgument(format!("subset size {n} must be in 1..={total}")));
    }
    let count = binomial(total, n);
    if count > BigInt::from(budget.max_enum) {
        return Err(Error::budget("subset enumeration", count.to_string(), budget.max_enum.to_string()));
    }
    let lengths: Vec<usize> = bx.lengths().iter().map(|&l| l as usize).collect();
    let d = lengths.len();
    let cells: Vec<Vec<usize>> = cells_set.iter().map(|p| p.to_usizes().expect("box cell")).collect();
    let strides: Vec<usize> = (0..d).map(|k| lengths[k + 1..].iter().product()).collect();
    let doubled: Vec<usize> = lengths.iter().map(|&l| 2 * l - 1).collect();
    let doubled_volume: usize = doubled.iter().product();
    let doubled_index: Vec<usize> = cells
        .iter()
        .map(|c| c.iter().enumerate().map(|(k, &v)| v * doubled[k + 1..].iter().product::<usize>()).sum())
        .collect();
    let group = box_symmetries(&lengths, &cells, &strides);

    let best = par::min_range(total - n + 1, |first| {
        let mut marks = vec![0u32; doubled_volume];
        let mut stamp = 0u32;
        let mut subset = vec![first; n];
        let mut image = vec![0usize; n];
        let mut best: Option<(usize, Vec<usize>)> = None;
        for_each_combination(first + 1, total, n - 1, |rest| {
            subset[1..].copy_from_slice(rest);
            let canonical = group.iter().all(|table| {
                image.iter_mut().zip(&subset).for_each(|(x, &c)| *x = table[c]);
                image.sort_unstable();
                image.as_slice() >= subset.as_slice()
            });
            if !canonical {
                return;
            }
            stamp += 1;
            let mut size = 0;
            for (i, &x) in subset.iter().enumerate() {
                for &y in &subset[i..] {
                    let s = doubled_index[x] + doubled_index[y];
                    if marks[s] != stamp {
                        marks[s] = stamp;
                        size += 1;
                    }
                }
            }
            if best.as_ref().is_none_or(|(v, s)| (size, subset.as_slice()) < (*v, s.as_slice())) {
                best = Some((size, subset.clone()));
            }
        });
        best
    })
    .expect("at least one subset");

    let (value, subset) = best;
    let points = subset.iter().map(|&i| cells_set.points()[i].clone());
    Ok((PointSet::new(d, points)?, value))
}

/// `A = ∪_{i=1}^K (x_i + {1, …, m})` with `x_i = M^i`, `M = 4Km`.
///
/// Panics if two block sums `x_i + x_j + {2, …, 2m}` overlap, which the
/// choice of `M` rules out.
pub fn lacunary_example(k: u32, m: u32) -> Result<PointSet> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidArgument("K and m must be positive".into()));
    }
    let base = BigInt::from(4u64 * u64::from(k) * u64::from(m));
    let xs: Vec<BigInt> = (1..=k).map(|i| base.pow(i)).collect();
    let mut blocks: Vec<(BigInt, BigInt)> = Vec::new();
    for i in 0..xs.len() {
        for j in i..xs.len() {
            let s = &xs[i] + &xs[j];
            blocks.push((&s + 2, &s + 2 * m));
        }
    }
    blocks.sort();
    assert!(blocks.windows(2).all(|w| w[0].1 < w[1].0), "lacunary block sums overlap");
    let points = xs.iter().flat_map(|x| (1..=m).map(move |t| LatticePoint::new(vec![x + t])));
    PointSet::new(1, points)
}

/// Echelon basis over `Q` with unit pivots.
struct RationalBasis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RationalBasis {
    fn insert(&mut self, v: &[i64]) -> bool {
        let mut v: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        for (col, row) in &self.rows {
            if !v[*col].is_zero() {
                let f = v[*col].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &f * r;
                }
            }
        }
        let Some(col) = v.iter().position(|x| !x.is_zero()) else { return false };
        let p = v[col].clone();
        v.iter_mut().for_each(|x| *x /= &p);
        self.rows.push((col, v));
        true
    }
}

/// Freiman dimension from below, by searching homomorphisms `f : A → Z` with
/// `f(a₀) = 0` and values in `[-bound, bound]`.
///
/// Such maps span a subspace of all homomorphisms modulo constants; the rank
/// of what is found is at most the Freiman dimension and equals it once
/// `bound` is large enough. Additive quadruples come from a direct `|A|⁴`
/// scan and the rank from rational elimination, so nothing is shared with
/// [`crate::progression::freiman_dimension`].
pub fn freiman_dimension_by_hom_search(a: &PointSet, bound: i64, budget: &Budget) -> Result<usize> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument("Freiman dimension needs at least two points".into()));
    }
    let quads = (n as u128).pow(4);
    if quads > u128::from(budget.max_enum) {
        return Err(Error::budget("quadruple scan", quads.to_string(), budget.max_enum.to_string()));
    }
    let pts = a.points();
    let mut by_last: Vec<Vec<[usize; 4]>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            let s = &pts[i] + &pts[j];
            for k in 0..n {
                for l in 0..n {
                    if &pts[k] + &pts[l] == s {
                        by_last[i.max(j).max(k).max(l)].push([i, j, k, l]);
                    }
                }
            }
        }
    }
    let mut values = vec![0i64; n];
    let mut basis = RationalBasis { rows: Vec::new() };
    let mut steps = 0u64;
    hom_search(1, bound, &by_last, &mut values, &mut basis, &mut steps, budget.max_enum)?;
    Ok(basis.rows.len())
}

fn hom_search(
    at: usize,
    bound: i64,
    by_last: &[Vec<[usize; 4]>],
    values: &mut [i64],
    basis: &mut RationalBasis,
    steps: &mut u64,
    max_steps: u64,
) -> Result<()> {
    let n = values.len();
    if basis.rows.len() == n - 1 {
        return Ok(());
    }
    if at == n {
        basis.insert(&values[1..]);
        return Ok(());
    }
    for v in -bound..=bound {
        *steps += 1;
        if *steps > max_steps {
            return Err(Error::budget("homomorphism search", format!("> {max_steps}"), max_steps.to_string()));
        }
        values[at] = v;
        if by_last[at].iter().all(|q| values[q[0]] + values[q[1]] == values[q[2]] + values[q[3]]) {
            hom_search(at + 1, bound, by_last, values, basis, steps, max_steps)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progression::freiman_dimension;
    use crate::sets::sumset_size;

    fn set(rows: &[&[i64]]) -> PointSet {
        PointSet::from_rows(rows.iter().copied()).unwrap()
    }

    #[test]
    fn parallelepiped_examples() {
        let b = Budget::default();
        let cube = GridBox::cube(2, 3).unwrap().points();
        let w = find_parallelepiped(&cube, 3, &b).unwrap().unwrap();
        assert_eq!(w.v0, LatticePoint::from_i64s(&[0, 0, 0]));
        // endpoints in increasing order: (0,0,1), (0,1,0), (1,0,0)
        let expected: Vec<LatticePoint> = [[0, 0, 1], [0, 1, 0], [1, 0, 0]].iter().map(|c| LatticePoint::from_i64s(c)).collect();
        assert_eq!(w.directions, expected);
        assert!(w.validate(&cube));

        assert_eq!(find_parallelepiped(&set(&[&[0, 0], &[1, 1], &[2, 2]]), 2, &b).unwrap(), None);
        let w = find_parallelepiped(&PointSet::from_ints([0, 1, 2]), 1, &b).unwrap().unwrap();
        assert_eq!((w.v0, w.directions), (LatticePoint::from_i64s(&[0]), vec![LatticePoint::from_i64s(&[1])]));
    }

    #[test]
    fn max_dimension_examples() {
        let b = Budget::default();
        assert_eq!(max_parallelepiped_dimension(&GridBox::cube(2, 2).unwrap().points(), &b).unwrap().0, 2);
        assert_eq!(max_parallelepiped_dimension(&PointSet::from_ints([0, 1, 2, 4]), &b).unwrap().0, 1);
        let five = set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[5, 7]]);
        assert_eq!(max_parallelepiped_dimension(&five, &b).unwrap().0, 2);
        assert_eq!(max_parallelepiped_dimension(&PointSet::from_ints([3]), &b).unwrap().0, 0);
    }

    #[test]
    fn parallelepiped_budget() {
        let tight = Budget { max_parallelepiped_dim: 2, ..Budget::default() };
        let cube = GridBox::cube(2, 3).unwrap().points();
        assert!(max_parallelepiped_dimension(&cube, &tight).unwrap_err().is_budget());
        let few = Budget { max_parallelepiped_points: 4, ..Budget::default() };
        assert!(find_parallelepiped(&cube, 1, &few).unwrap_err().is_budget());
    }

    #[test]
    fn min_doubling_examples() {
        let b = Budget::default();
        let (a, v) = min_doubling_search(&GridBox::new(vec![3]).unwrap(), 3, &b).unwrap();
        assert_eq!((a, v), (PointSet::from_ints([0, 1, 2]), 5));
        let sq = GridBox::cube(2, 2).unwrap();
        assert_eq!(min_doubling_search(&sq, 4, &b).unwrap(), (sq.points(), 9));
        let (a, v) = min_doubling_search(&sq, 3, &b).unwrap();
        assert_eq!((a, v), (set(&[&[0, 0], &[0, 1], &[1, 0]]), 6));
        let tiny = Budget { max_enum: 3, ..Budget::default() };
        assert!(min_doubling_search(&GridBox::new(vec![5]).unwrap(), 2, &tiny).unwrap_err().is_budget());
    }

    #[test]
    fn min_doubling_matches_unreduced_search() {
        let b = Budget::default();
        let bx = GridBox::new(vec![3, 2]).unwrap();
        let cells = bx.points();
        for n in 1..=cells.len() {
            let brute = (0u64..1 << cells.len())
                .filter(|m| m.count_ones() as usize == n)
                .map(|m| sumset_size(&cells.subset_by_mask(m), &cells.subset_by_mask(m)).unwrap())
                .min()
                .unwrap();
            assert_eq!(min_doubling_search(&bx, n, &b).unwrap().1, brute, "n = {n}");
        }
    }

    #[test]
    fn lacunary_examples() {
        let a = lacunary_example(1, 4).unwrap();
        assert_eq!(a, PointSet::from_ints([17, 18, 19, 20]));
        let a = lacunary_example(2, 3).unwrap();
        assert_eq!((a.len(), sumset_size(&a, &a).unwrap()), (6, 15));
        let a = lacunary_example(2, 2).unwrap();
        assert_eq!(freiman_dimension(&a, &Budget::default()).unwrap(), 2);
        assert!(lacunary_example(0, 2).is_err());
    }

    #[test]
    fn hom_search_small_cases() {
        let b = Budget::default();
        assert_eq!(freiman_dimension_by_hom_search(&PointSet::from_ints([0, 1, 2]), 2, &b).unwrap(), 1);
        assert_eq!(freiman_dimension_by_hom_search(&PointSet::from_ints([0, 1, 3]), 2, &b).unwrap(), 2);
        assert_eq!(freiman_dimension_by_hom_search(&GridBox::cube(2, 2).unwrap().points(), 2, &b).unwrap(), 2);
        assert_eq!(freiman_dimension_by_hom_search(&PointSet::from_ints([1, 2, 101, 102]), 2, &b).unwrap(), 2);
    }
}
