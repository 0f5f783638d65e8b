//! Finite sets of integer lattice points and the primitive operations on them.
//!
//! A [`PointSet`] is an immutable, lexicographically sorted, duplicate-free
//! list of [`LatticePoint`]s sharing one ambient dimension. Sorted storage
//! gives canonical serialization for free and `O(log n)` membership.

mod grid;
mod io;

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntegerEchelon;

pub use grid::GridSet;
pub use io::{parse_point_list, parse_point_set};
pub(crate) use io::parse_ints as io_parse_ints;

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// A point of `Z^m` with arbitrary-precision coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LatticePoint(Vec<BigInt>);

impl LatticePoint {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticePoint(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        LatticePoint(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticePoint(vec![BigInt::zero(); dim])
    }

    /// Standard basis vector `e_axis` (0-based).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut p = Self::zero(dim);
        p.0[axis] = BigInt::from(1);
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticePoint(self.0.iter().map(|c| c * k).collect())
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(Signed::is_negative)
    }

    /// Coordinates as `usize`, if all are non-negative and fit.
    pub fn to_usizes(&self) -> Option<Vec<usize>> {
        self.0.iter().map(|c| usize::try_from(c).ok()).collect()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Add for &LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|c| -c).collect())
    }
}

/// A finite set of lattice points in a fixed ambient dimension.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointSet {
    dim: usize,
    points: Vec<LatticePoint>,
}

impl PointSet {
    pub fn empty(dim: usize) -> Self {
        assert!(dim >= 1, "ambient dimension must be positive");
        PointSet { dim, points: Vec::new() }
    }

    /// Builds a set from arbitrary points, sorting and deduplicating.
    pub fn new(dim: usize, points: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be positive".into()));
        }
        let mut points: Vec<LatticePoint> = points.into_iter().collect();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        points.sort_unstable();
        points.dedup();
        Ok(PointSet { dim, points })
    }

    /// Builds a set from rows of small integers; dimension is taken from the
    /// first row.
    pub fn from_rows<R: AsRef<[i64]>>(rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let pts: Vec<LatticePoint> = rows.into_iter().map(|r| LatticePoint::from_i64s(r.as_ref())).collect();
        let dim = pts.first().map(LatticePoint::dim).ok_or(Error::EmptySet)?;
        Self::new(dim, pts)
    }

    /// One-dimensional set from integers.
    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> Self {
        let pts = values.into_iter().map(|v| LatticePoint::from_i64s(&[v]));
        Self::new(1, pts).expect("one-dimensional points")
    }

    /// `{0,1}^d` embedded in the first `d` coordinates of `Z^ambient`.
    pub fn unit_cube(ambient: usize, d: usize) -> Self {
        assert!(d <= ambient && d < 64);
        let pts = (0..1u64 << d).map(|m| {
            LatticePoint((0..ambient).map(|i| BigInt::from(u64::from(i < d && m >> i & 1 == 1))).collect())
        });
        Self::new(ambient, pts).expect("cube dimension")
    }

    /// Caller guarantees sorted, unique, and of dimension `dim`.
    pub(crate) fn from_sorted_unchecked(dim: usize, points: Vec<LatticePoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(points.iter().all(|p| p.dim() == dim));
        PointSet { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LatticePoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.dim == other.dim && self.points.iter().all(|p| other.contains(p))
    }

    pub fn translate(&self, t: &LatticePoint) -> PointSet {
        assert_eq!(t.dim(), self.dim);
        // translation is order-preserving
        PointSet::from_sorted_unchecked(self.dim, self.points.iter().map(|p| p + t).collect())
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        check_dims(self, other)?;
        PointSet::new(self.dim, self.points.iter().chain(&other.points).cloned())
    }

    /// The subset selected by `mask`, bit `i` choosing the `i`-th point.
    pub fn subset_by_mask(&self, mask: u64) -> PointSet {
        let pts = self.points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone());
        PointSet::from_sorted_unchecked(self.dim, pts.collect())
    }

    /// Coordinate-wise minimum and maximum.
    pub fn bounds(&self) -> Option<(LatticePoint, LatticePoint)> {
        let first = self.points.first()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for p in &self.points[1..] {
            for (k, c) in p.0.iter().enumerate() {
                if *c < lo[k] {
                    lo[k] = c.clone();
                }
                if *c > hi[k] {
                    hi[k] = c.clone();
                }
            }
        }
        Some((LatticePoint(lo), LatticePoint(hi)))
    }

    /// Fails unless every coordinate is non-negative.
    pub fn require_nonnegative(&self) -> Result<()> {
        match self.points.iter().find(|p| p.has_negative()) {
            Some(p) => Err(Error::NegativeCoordinate { point: p.to_string() }),
            None => Ok(()),
        }
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a LatticePoint;
    type IntoIter = std::slice::Iter<'a, LatticePoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

pub(crate) fn check_dims(a: &PointSet, b: &PointSet) -> Result<()> {
    if a.dim != b.dim {
        Err(Error::DimensionMismatch { expected: a.dim, found: b.dim })
    } else {
        Ok(())
    }
}

/// Sumset implementation. Every backend returns the same set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Hash accumulation of all pairwise sums; no bound on coordinates.
    Sparse,
    /// Shift-and-or over a dense bit grid covering the bounding boxes.
    Grid,
    /// Grid when the bounding box is small relative to `|A||B|`.
    #[default]
    Auto,
}

const GRID_MAX_BITS: u128 = 1 << 26;

fn prefer_grid(a: &PointSet, b: &PointSet) -> bool {
    match grid::sum_volume(a, b) {
        Some(vol) => vol <= GRID_MAX_BITS && vol <= 64 * (a.len() as u128) * (b.len() as u128) + 4096,
        None => false,
    }
}

/// `A + B = {a + b : a ∈ A, b ∈ B}`.
pub fn minkowski_sum(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    minkowski_sum_with(a, b, Backend::Auto)
}

pub fn minkowski_sum_with(a: &PointSet, b: &PointSet, backend: Backend) -> Result<PointSet> {
    check_dims(a, b)?;
    a.require_nonempty()?;
    b.require_nonempty()?;
    let use_grid = match backend {
        Backend::Sparse => false,
        Backend::Grid => true,
        Backend::Auto => prefer_grid(a, b),
    };
    if use_grid {
        if backend == Backend::Grid && !grid::sum_volume(a, b).is_some_and(|v| v <= GRID_MAX_BITS) {
            return Err(Error::budget("dense sumset grid", "more than 2^26", GRID_MAX_BITS));
        }
        let ga = GridSet::bounding(a);
        let gb = GridSet::bounding(b);
        return Ok(ga.sumset(&gb).to_point_set());
    }
    let mut acc: HashSet<LatticePoint> = HashSet::with_capacity(a.len() * b.len() / 2 + 1);
    for x in &a.points {
        for y in &b.points {
            acc.insert(x + y);
        }
    }
    let mut points: Vec<LatticePoint> = acc.into_iter().collect();
    points.sort_unstable();
    Ok(PointSet::from_sorted_unchecked(a.dim, points))
}

/// `|A + B|` without materializing big-integer points on the grid path.
pub fn sumset_size(a: &PointSet, b: &PointSet) -> Result<usize> {
    check_dims(a, b)?;
    a.require_nonempty()?;
    b.require_nonempty()?;
    if prefer_grid(a, b) {
        Ok(GridSet::bounding(a).sumset(&GridSet::bounding(b)).len())
    } else {
        minkowski_sum_with(a, b, Backend::Sparse).map(|s| s.len())
    }
}

/// `σ[A] = |A + A| / |A|`.
pub fn doubling_constant(a: &PointSet) -> Result<Rational> {
    let n = a.len();
    let s = sumset_size(a, a)?;
    Ok(Rational::new(BigInt::from(s), BigInt::from(n)))
}

/// Orthogonal projection keeping the (0-based) `axes` and zeroing the rest.
/// The ambient dimension is unchanged.
pub fn project(x: &PointSet, axes: &[usize]) -> Result<PointSet> {
    let mut keep = vec![false; x.dim];
    for &i in axes {
        if i >= x.dim {
            return Err(Error::AxisOutOfRange { index: i, dim: x.dim });
        }
        keep[i] = true;
    }
    let pts = x.points.iter().map(|p| {
        LatticePoint(p.0.iter().zip(&keep).map(|(c, &k)| if k { c.clone() } else { BigInt::zero() }).collect())
    });
    PointSet::new(x.dim, pts)
}

/// Projection onto the axes whose bits are set in `mask`.
pub(crate) fn project_mask(x: &PointSet, mask: u64) -> PointSet {
    let axes: Vec<usize> = (0..x.dim).filter(|i| mask >> i & 1 == 1).collect();
    project(x, &axes).expect("mask within dimension")
}

/// Rank over the rationals of `{a − a₀ : a ∈ A}`.
pub fn affine_dimension(a: &PointSet) -> Result<usize> {
    a.require_nonempty()?;
    let base = &a.points[0];
    let mut ech = IntegerEchelon::new(a.dim);
    for p in &a.points[1..] {
        ech.insert((p - base).0);
        if ech.rank() == a.dim {
            break;
        }
    }
    Ok(ech.rank())
}

/// Image of `A` under `x ↦ Mx + shift`, with `M` given by rows.
///
/// Returns the image and whether the map was injective on `A`.
pub fn affine_map(a: &PointSet, matrix: &[Vec<BigInt>], shift: &LatticePoint) -> Result<(PointSet, bool)> {
    let out_dim = matrix.len();
    if out_dim == 0 || out_dim != shift.dim() {
        return Err(Error::InvalidArgument(format!(
            "matrix has {out_dim} rows but shift has dimension {}",
            shift.dim()
        )));
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != a.dim) {
        return Err(Error::DimensionMismatch { expected: a.dim, found: row.len() });
    }
    let image = a.points.iter().map(|p| {
        LatticePoint(
            matrix
                .iter()
                .zip(&shift.0)
                .map(|(row, s)| row.iter().zip(&p.0).fold(s.clone(), |acc, (m, c)| acc + m * c))
                .collect(),
        )
    });
    let image = PointSet::new(out_dim, image)?;
    let injective = image.len() == a.len();
    Ok((image, injective))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[i64]]) -> PointSet {
        PointSet::from_rows(rows.iter().copied()).unwrap()
    }

    #[test]
    fn sum_of_origins() {
        let z = PointSet::from_ints([0]);
        assert_eq!(minkowski_sum(&z, &z).unwrap(), z);
    }

    #[test]
    fn l_shape_sumset() {
        // all nine pairs enumerated by hand: (0,2) (1,1) (2,1) (1,1) (2,0) (3,0) (2,1) (3,0) (4,0)
        let a = set(&[&[0, 1], &[1, 0], &[2, 0]]);
        let expect = set(&[&[0, 2], &[1, 1], &[2, 1], &[2, 0], &[3, 0], &[4, 0]]);
        for backend in [Backend::Sparse, Backend::Grid, Backend::Auto] {
            assert_eq!(minkowski_sum_with(&a, &a, backend).unwrap(), expect);
        }
    }

    #[test]
    fn square_sums_to_dilated_square() {
        let sq = set(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let s = minkowski_sum(&sq, &sq).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.iter().all(|p| p.coords().iter().all(|c| *c >= 0.into() && *c <= 2.into())));
    }

    #[test]
    fn sumset_errors() {
        let a = PointSet::from_ints([0]);
        let b = set(&[&[0, 0]]);
        assert_eq!(minkowski_sum(&a, &b), Err(Error::DimensionMismatch { expected: 1, found: 2 }));
        assert_eq!(minkowski_sum(&a, &PointSet::empty(1)), Err(Error::EmptySet));
        assert_eq!(doubling_constant(&PointSet::empty(1)), Err(Error::EmptySet));
    }

    #[test]
    fn doubling_examples() {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(doubling_constant(&PointSet::from_ints([0])).unwrap(), r(1, 1));
        let cube = set(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(doubling_constant(&cube).unwrap(), r(9, 4));
        assert_eq!(doubling_constant(&PointSet::from_ints(0..4)).unwrap(), r(7, 4));
    }

    #[test]
    fn projections() {
        let sq = set(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(project(&sq, &[0]).unwrap(), set(&[&[0, 0], &[1, 0]]));
        assert_eq!(project(&sq, &[]).unwrap(), set(&[&[0, 0]]));
        let x = set(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(project(&x, &[1]).unwrap(), set(&[&[0, 0], &[0, 1]]));
        assert_eq!(project(&x, &[2]), Err(Error::AxisOutOfRange { index: 2, dim: 2 }));
    }

    #[test]
    fn affine_dimensions() {
        assert_eq!(affine_dimension(&set(&[&[3, 4]])).unwrap(), 0);
        assert_eq!(affine_dimension(&set(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap(), 1);
        let cube: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|i| (m >> i) & 1).collect()).collect();
        assert_eq!(affine_dimension(&PointSet::from_rows(cube).unwrap()).unwrap(), 3);
        assert_eq!(affine_dimension(&PointSet::empty(2)), Err(Error::EmptySet));
    }

    #[test]
    fn affine_maps() {
        let a = set(&[&[2, 5], &[3, 7]]);
        let id = vec![vec![1.into(), 0.into()], vec![0.into(), 1.into()]];
        assert_eq!(affine_map(&a, &id, &LatticePoint::zero(2)).unwrap(), (a.clone(), true));
        let (img, inj) = affine_map(&a, &id, &LatticePoint::from_i64s(&[-2, -5])).unwrap();
        assert_eq!(img, set(&[&[0, 0], &[1, 2]]));
        assert!(inj);
        let line = PointSet::from_ints([0, 1, 2]);
        let (img, inj) = affine_map(&line, &[vec![0.into()]], &LatticePoint::zero(1)).unwrap();
        assert_eq!(img, PointSet::from_ints([0]));
        assert!(!inj);
        assert!(affine_map(&line, &[vec![1.into(), 1.into()]], &LatticePoint::zero(1)).is_err());
    }
}
