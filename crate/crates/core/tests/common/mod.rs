//! Naive reference implementations over `i64`, written without reusing any
//! library algorithm. Quadratic and worse; only for small inputs.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lattice_sumsets::{LatticePoint, PointSet};

pub type Pt = Vec<i64>;
pub type Set = BTreeSet<Pt>;

pub fn set(rows: &[&[i64]]) -> Set {
    rows.iter().map(|r| r.to_vec()).collect()
}

pub fn ints(v: &[i64]) -> Set {
    v.iter().map(|&x| vec![x]).collect()
}

pub fn to_lib(s: &Set) -> PointSet {
    let dim = s.iter().next().map_or(1, Vec::len);
    PointSet::new(dim, s.iter().map(|p| LatticePoint::from_i64s(p))).unwrap()
}

pub fn from_lib(s: &PointSet) -> Set {
    s.iter().map(|p| p.coords().iter().map(|c| i64::try_from(c).unwrap()).collect()).collect()
}

pub fn add(p: &[i64], q: &[i64]) -> Pt {
    p.iter().zip(q).map(|(a, b)| a + b).collect()
}

pub fn sumset(a: &Set, b: &Set) -> Set {
    let mut out = Set::new();
    for p in a {
        for q in b {
            out.insert(add(p, q));
        }
    }
    out
}

/// Every point of the box `[L₁] × … × [L_d]`, by counting in mixed radix.
pub fn box_points(lengths: &[i64]) -> Set {
    let volume: i64 = lengths.iter().product();
    (0..volume)
        .map(|mut k| {
            let mut p = vec![0; lengths.len()];
            for i in (0..lengths.len()).rev() {
                p[i] = k % lengths[i];
                k /= lengths[i];
            }
            p
        })
        .collect()
}

pub fn subsets(cells: &Set) -> Vec<Set> {
    let cells: Vec<&Pt> = cells.iter().collect();
    (1u64..1 << cells.len())
        .map(|m| cells.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, p)| (*p).clone()).collect())
        .collect()
}

/// Keeps coordinates whose 0-based index is in `axes`.
pub fn project(x: &Set, axes: &[usize]) -> Set {
    x.iter().map(|p| p.iter().enumerate().map(|(i, &c)| if axes.contains(&i) { c } else { 0 }).collect()).collect()
}

/// Each point moves to its rank among the points of `a` on the same line
/// parallel to axis `i`.
pub fn compress(a: &Set, i: usize) -> Set {
    a.iter()
        .map(|p| {
            let rank = a
                .iter()
                .filter(|q| q[i] < p[i] && q.iter().enumerate().all(|(k, c)| k == i || *c == p[k]))
                .count();
            let mut r = p.clone();
            r[i] = rank as i64;
            r
        })
        .collect()
}

pub fn is_down_set(b: &Set) -> bool {
    b.iter().all(|p| {
        (0..p.len()).all(|i| {
            (0..p[i]).all(|t| {
                let mut q = p.clone();
                q[i] = t;
                b.contains(&q)
            })
        })
    })
}

pub fn unit_cube(dim: usize, d: usize) -> Set {
    let mut lengths = vec![2; d];
    lengths.resize(dim, 1);
    box_points(&lengths)
}

/// Rank over `Q` by Gaussian elimination on exact fractions `(num, den)`
/// kept in `i128`.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else { return 0 };
    let mut m: Vec<Vec<(i128, i128)>> = rows.iter().map(|r| r.iter().map(|&x| (x as i128, 1)).collect()).collect();
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    fn red((n, d): (i128, i128)) -> (i128, i128) {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        (s * n / g, s * d / g)
    }
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..m.len()).find(|&i| m[i][c].0 != 0) else { continue };
        m.swap(r, p);
        let (pn, pd) = m[r][c];
        for i in 0..m.len() {
            if i != r && m[i][c].0 != 0 {
                // row_i -= (m[i][c] / pivot) * row_r
                let (fn_, fd) = red((m[i][c].0 * pd, m[i][c].1 * pn));
                let pivot = m[r].clone();
                for (cell, &(x, y)) in m[i].iter_mut().zip(&pivot) {
                    let (a, b) = *cell;
                    *cell = red((a * fd * y - fn_ * x * b, b * fd * y));
                }
            }
        }
        r += 1;
    }
    r
}

pub fn affine_dimension(a: &Set) -> usize {
    let base = a.iter().next().unwrap();
    let rows: Vec<Vec<i64>> = a.iter().map(|p| p.iter().zip(base).map(|(x, y)| x - y).collect()).collect();
    rank(&rows)
}

/// Freiman dimension from every additive quadruple, found by a full `n⁴`
/// scan, with one relation row per quadruple.
pub fn freiman_dimension(a: &Set) -> usize {
    let pts: Vec<&Pt> = a.iter().collect();
    let n = pts.len();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if add(pts[i], pts[j]) == add(pts[k], pts[l]) {
                        let mut r = vec![0i64; n];
                        r[i] += 1;
                        r[j] += 1;
                        r[k] -= 1;
                        r[l] -= 1;
                        if r.iter().any(|&x| x != 0) {
                            rows.push(r);
                        }
                    }
                }
            }
        }
    }
    n - rank(&rows) - 1
}

/// All sums `x₀ + Σ μ_i x_i` with `μ_i < t L_i`, with repetitions.
pub fn progression_sums(base: i64, gens: &[(i64, i64)], t: i64) -> Vec<i64> {
    let mut sums = vec![base];
    for &(g, l) in gens {
        sums = sums.iter().flat_map(|s| (0..t * l).map(move |m| s + m * g)).collect();
    }
    sums
}

pub fn is_t_proper(base: i64, gens: &[(i64, i64)], t: i64) -> bool {
    let sums = progression_sums(base, gens, t);
    sums.iter().collect::<BTreeSet<_>>().len() == sums.len()
}

/// Minimum of `|B + A + A| / |B|` over non-empty `B ⊆ A`, as `(num, den)`,
/// with the smallest-by-cross-multiplication ratio kept.
pub fn plunnecke_min(a: &Set) -> (usize, usize) {
    let aa = sumset(a, a);
    let mut best = (usize::MAX, 1);
    for b in subsets(a) {
        let r = (sumset(&b, &aa).len(), b.len());
        if r.0 * best.1 < best.0 * r.1 {
            best = r;
        }
    }
    best
}

/// Whether `a` holds a non-degenerate `d`-parallelepiped, by trying every
/// base point and every `d`-set of endpoints.
pub fn has_parallelepiped(a: &Set, d: usize) -> bool {
    let pts: Vec<&Pt> = a.iter().collect();
    let n = pts.len();
    for v0 in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != v0).collect();
        for mask in 0u64..1 << others.len() {
            if mask.count_ones() as usize != d {
                continue;
            }
            let dirs: Vec<Pt> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &j)| pts[j].iter().zip(pts[v0]).map(|(x, y)| x - y).collect())
                .collect();
            if rank(&dirs) != d {
                continue;
            }
            let all_in = (0u64..1 << d).all(|s| {
                let mut v = pts[v0].clone();
                for (k, dir) in dirs.iter().enumerate() {
                    if s >> k & 1 == 1 {
                        v = add(&v, dir);
                    }
                }
                a.contains(&v)
            });
            if all_in {
                return true;
            }
        }
    }
    false
}

pub fn min_doubling(cells: &Set, n: usize) -> usize {
    subsets(cells).iter().filter(|s| s.len() == n).map(|s| sumset(s, s).len()).min().unwrap()
}
