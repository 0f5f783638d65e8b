use num_bigint::BigInt;

use super::{LatticePoint, PointSet};

/// Dense bitmap over a box `origin + [s₁] × … × [s_m]`.
///
/// Cells are stored row-major with the last axis fastest, so increasing bit
/// index is increasing lexicographic order of points. Sumsets are computed by
/// embedding one operand into the strides of the result box and OR-ing copies
/// of it shifted by the flattened offset of every point of the other operand;
/// since the result box is exactly the sum of the operand boxes no shift can
/// carry into a neighbouring row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSet {
    origin: Vec<BigInt>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    bits: Vec<u64>,
}

fn strides_for(shape: &[usize]) -> (Vec<usize>, usize) {
    let mut strides = vec![0; shape.len()];
    let mut acc: usize = 1;
    for k in (0..shape.len()).rev() {
        strides[k] = acc;
        acc = acc.checked_mul(shape[k]).expect("grid volume overflows usize");
    }
    (strides, acc)
}

/// Volume of the box spanned by `A + B`, if it fits in `u128`.
pub(super) fn sum_volume(a: &PointSet, b: &PointSet) -> Option<u128> {
    let (alo, ahi) = a.bounds()?;
    let (blo, bhi) = b.bounds()?;
    let mut vol: u128 = 1;
    for k in 0..a.dim() {
        let ext = (&ahi.0[k] - &alo.0[k]) + (&bhi.0[k] - &blo.0[k]) + 1;
        vol = vol.checked_mul(u128::try_from(ext).ok()?)?;
    }
    Some(vol)
}

impl GridSet {
    /// Empty grid over `origin + [shape]`.
    pub fn new(origin: Vec<BigInt>, shape: Vec<usize>) -> Self {
        assert_eq!(origin.len(), shape.len());
        assert!(shape.iter().all(|&s| s >= 1), "grid sides must be positive");
        let (strides, vol) = strides_for(&shape);
        GridSet { origin, shape, strides, bits: vec![0; vol.div_ceil(64)] }
    }

    /// Empty grid over `[shape]` anchored at the origin.
    pub fn with_shape(shape: &[usize]) -> Self {
        Self::new(vec![BigInt::from(0); shape.len()], shape.to_vec())
    }

    /// Smallest grid holding `set`. Panics if the set is empty or its
    /// bounding box does not fit in memory addressing.
    pub fn bounding(set: &PointSet) -> Self {
        let (lo, hi) = set.bounds().expect("bounding grid of an empty set");
        let shape = lo
            .0
            .iter()
            .zip(&hi.0)
            .map(|(l, h)| usize::try_from(h - l + 1).expect("grid side fits usize"))
            .collect();
        let mut g = Self::new(lo.0.clone(), shape);
        for p in set {
            let local: Vec<usize> = p.0.iter().zip(&lo.0).map(|(c, l)| usize::try_from(c - l).unwrap()).collect();
            g.insert(&local);
        }
        g
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn volume(&self) -> usize {
        self.shape.iter().product()
    }

    fn flatten(&self, local: &[usize]) -> usize {
        debug_assert!(local.iter().zip(&self.shape).all(|(c, s)| c < s));
        local.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for (o, s) in out.iter_mut().zip(&self.strides) {
            *o = idx / s;
            idx %= s;
        }
    }

    /// Inserts a point given in coordinates relative to the origin.
    pub fn insert(&mut self, local: &[usize]) {
        let i = self.flatten(local);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn insert_index(&mut self, i: usize) {
        assert!(i < self.volume());
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, local: &[usize]) -> bool {
        if local.len() != self.shape.len() || local.iter().zip(&self.shape).any(|(c, s)| c >= s) {
            return false;
        }
        let i = self.flatten(local);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Flattened indices of occupied cells, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + tz)
            })
        })
    }

    /// `A + B` as a grid over the sum of the two boxes.
    pub fn sumset(&self, other: &GridSet) -> GridSet {
        assert_eq!(self.shape.len(), other.shape.len());
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let shape: Vec<usize> = big.shape.iter().zip(&small.shape).map(|(a, b)| a + b - 1).collect();
        let origin: Vec<BigInt> = big.origin.iter().zip(&small.origin).map(|(a, b)| a + b).collect();
        let mut out = GridSet::new(origin, shape);

        let mut embedded = vec![0u64; out.bits.len()];
        let mut local = vec![0; big.shape.len()];
        for i in big.indices() {
            big.unflatten(i, &mut local);
            let j = out.flatten(&local);
            embedded[j / 64] |= 1 << (j % 64);
        }
        let last_nonzero = embedded.iter().rposition(|&w| w != 0).map_or(0, |p| p + 1);
        let embedded = &embedded[..last_nonzero];

        for i in small.indices() {
            small.unflatten(i, &mut local);
            let shift = out.flatten(&local);
            or_shifted(&mut out.bits, embedded, shift);
        }
        out
    }

    /// Converts back to a [`PointSet`]; already in canonical order.
    pub fn to_point_set(&self) -> PointSet {
        let mut local = vec![0; self.shape.len()];
        let points = self
            .indices()
            .map(|i| {
                self.unflatten(i, &mut local);
                LatticePoint(self.origin.iter().zip(&local).map(|(o, &c)| o + BigInt::from(c)).collect())
            })
            .collect();
        PointSet::from_sorted_unchecked(self.shape.len(), points)
    }
}

fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (word, bit) = (shift / 64, shift % 64);
    for (i, &v) in src.iter().enumerate() {
        if v == 0 {
            continue;
        }
        dst[i + word] |= v << bit;
        if bit != 0 {
            let hi = v >> (64 - bit);
            if hi != 0 {
                dst[i + word + 1] |= hi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_crosses_word_boundary() {
        let mut g = GridSet::with_shape(&[100]);
        g.insert(&[0]);
        g.insert(&[63]);
        let mut h = GridSet::with_shape(&[40]);
        h.insert(&[1]);
        h.insert(&[37]);
        let s = g.sumset(&h);
        assert_eq!(s.shape(), &[139]);
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![1, 37, 64, 100]);
    }

    #[test]
    fn bounding_round_trip_with_negative_coordinates() {
        let a = PointSet::from_rows([[-3, 2], [5, -1], [0, 0]]).unwrap();
        let g = GridSet::bounding(&a);
        assert_eq!(g.shape(), &[9, 4]);
        assert_eq!(g.len(), 3);
        assert_eq!(g.to_point_set(), a);
    }
}
