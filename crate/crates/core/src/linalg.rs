//! Fraction-free integer row reduction.
//!
//! Rows are reduced against an echelon basis by cross-multiplication
//! (`r ← p·r − r_c·pivot`) and then divided by their content, so entries stay
//! integral and small. Rank over `Z` equals rank over `Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Incrementally built echelon basis of a row space in `Z^n`.
#[derive(Debug, Clone)]
pub struct IntegerEchelon {
    width: usize,
    /// Basis rows ordered by pivot column; each is zero before its pivot.
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntegerEchelon {
    pub fn new(width: usize) -> Self {
        IntegerEchelon { width, rows: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis; the remainder is zero iff `row` lies
    /// in the rational span.
    pub fn reduce(&self, mut row: Vec<BigInt>) -> Vec<BigInt> {
        assert_eq!(row.len(), self.width, "row width");
        for (col, basis) in &self.rows {
            if row[*col].is_zero() {
                continue;
            }
            let g = row[*col].gcd(&basis[*col]);
            let scale_row = &basis[*col] / &g;
            let scale_basis = &row[*col] / &g;
            // the basis row vanishes before its pivot but `row` need not
            for (r, b) in row.iter_mut().zip(basis) {
                *r = &*r * &scale_row - b * &scale_basis;
            }
            normalize(&mut row);
        }
        row
    }

    /// Adds `row` to the basis. Returns whether the rank grew.
    pub fn insert(&mut self, row: Vec<BigInt>) -> bool {
        let row = self.reduce(row);
        match row.iter().position(|c| !c.is_zero()) {
            None => false,
            Some(col) => {
                let at = self.rows.partition_point(|(c, _)| *c < col);
                self.rows.insert(at, (col, row));
                true
            }
        }
    }

    pub fn contains(&self, row: Vec<BigInt>) -> bool {
        self.reduce(row).iter().all(Zero::is_zero)
    }
}

/// Divides by the content and makes the leading entry positive.
fn normalize(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in row.iter() {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        return;
    }
    let lead_negative = row.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for c in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Rank over `Q` of the given rows.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut ech = IntegerEchelon::new(first.len());
    for r in rows {
        ech.insert(r.clone());
        if ech.rank() == ech.width() {
            break;
        }
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&rows(&[&[1, 0, -2, 1]])), 1);
        assert_eq!(rank(&rows(&[&[2, 4], &[3, 6]])), 1);
        assert_eq!(rank(&rows(&[&[2, 4], &[3, 7]])), 2);
        assert_eq!(rank(&rows(&[&[0, 0, 0]])), 0);
        assert_eq!(rank(&[]), 0);
        // third row = first + second
        assert_eq!(rank(&rows(&[&[1, 2, 3], &[4, 5, 6], &[5, 7, 9]])), 2);
    }

    #[test]
    fn membership_after_insertions() {
        let mut e = IntegerEchelon::new(3);
        assert!(e.insert(rows(&[&[0, 3, 6]]).remove(0)));
        assert!(e.insert(rows(&[&[2, 1, 0]]).remove(0)));
        assert!(e.contains(rows(&[&[4, 5, 6]]).remove(0)));
        assert!(!e.contains(rows(&[&[0, 0, 1]]).remove(0)));
        assert!(!e.insert(rows(&[&[-6, -1, 4]]).remove(0)));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn large_entries_stay_exact() {
        let big = BigInt::from(10).pow(40);
        let r1 = vec![big.clone(), BigInt::from(1)];
        let r2 = vec![&big * 3 + 1, BigInt::from(3)];
        assert_eq!(rank(&[r1.clone(), r1.iter().map(|c| c * 7).collect()]), 1);
        assert_eq!(rank(&[r1, r2]), 2);
    }
}
