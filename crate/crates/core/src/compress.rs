//! Down-sets, coordinate compressions and the cube-sum projection identity.
//!
//! Everything here lives in the non-negative orthant `N₀^d`; inputs with a
//! negative coordinate are rejected rather than translated.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::report::{Relation, VerificationReport};
use crate::sets::{minkowski_sum, project_mask, LatticePoint, PointSet};

/// The box `[L₁] × … × [L_d]` with `[n] = {0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridBox {
    lengths: Vec<u64>,
}

impl GridBox {
    pub fn new(lengths: Vec<u64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidArgument("box needs at least one side".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidArgument("box sides must be positive".into()));
        }
        Ok(GridBox { lengths })
    }

    /// `[k]^d`.
    pub fn cube(k: u64, d: usize) -> Result<Self> {
        Self::new(vec![k; d])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn volume(&self) -> BigInt {
        self.lengths.iter().map(|&l| BigInt::from(l)).product()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        p.dim() == self.dim()
            && p.coords().iter().zip(&self.lengths).all(|(c, &l)| *c >= BigInt::zero() && *c < BigInt::from(l))
    }

    /// First point of `set` outside the box, if any.
    pub fn first_outside<'a>(&self, set: &'a PointSet) -> Option<&'a LatticePoint> {
        set.iter().find(|p| !self.contains(p))
    }

    /// All lattice points of the box, in lexicographic order.
    pub fn points(&self) -> PointSet {
        let d = self.dim();
        let mut out = Vec::new();
        let mut cur = vec![0u64; d];
        loop {
            out.push(LatticePoint::new(cur.iter().map(|&c| BigInt::from(c)).collect()));
            let mut k = d;
            loop {
                if k == 0 {
                    return PointSet::new(d, out).expect("box points");
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < self.lengths[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lengths.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for GridBox {
    type Err = Error;
    /// Comma-separated side lengths, e.g. `4,2`.
    fn from_str(s: &str) -> Result<Self> {
        let lengths = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad box side {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        GridBox::new(lengths)
    }
}

fn check_axis(b: &PointSet, i: usize) -> Result<()> {
    if i >= b.dim() {
        Err(Error::AxisOutOfRange { index: i, dim: b.dim() })
    } else {
        Ok(())
    }
}

fn lowered(p: &LatticePoint, i: usize) -> LatticePoint {
    let mut c = p.coords().to_vec();
    c[i] -= 1;
    LatticePoint::new(c)
}

/// First point whose lowering along axis `i` is missing from `b`.
fn missing_below(b: &PointSet, i: usize) -> Option<LatticePoint> {
    // closure under single steps implies closure under all lowerings
    b.iter().filter(|p| p.coords()[i] > BigInt::zero()).map(|p| lowered(p, i)).find(|q| !b.contains(q))
}

/// Whether `b` is closed under lowering coordinate `i` (0-based) to any value ≥ 0.
pub fn is_i_down_set(b: &PointSet, i: usize) -> Result<bool> {
    b.require_nonnegative()?;
    check_axis(b, i)?;
    Ok(missing_below(b, i).is_none())
}

/// Whether `b` is an `i`-down-set for every axis.
pub fn is_down_set(b: &PointSet) -> Result<bool> {
    b.require_nonnegative()?;
    Ok((0..b.dim()).all(|i| missing_below(b, i).is_none()))
}

pub(crate) fn require_down_set(b: &PointSet) -> Result<()> {
    b.require_nonnegative()?;
    match (0..b.dim()).find_map(|i| missing_below(b, i)) {
        Some(q) => Err(Error::NotDownSet { missing: q.to_string() }),
        None => Ok(()),
    }
}

/// The `i`-compression `C_i(A)`: every line parallel to axis `i` keeps its
/// number of points, packed down onto `{0, …, count−1}`.
pub fn compress(a: &PointSet, i: usize) -> Result<PointSet> {
    a.require_nonnegative()?;
    check_axis(a, i)?;
    let mut fibres: BTreeMap<LatticePoint, u64> = BTreeMap::new();
    for p in a {
        let mut key = p.coords().to_vec();
        key[i] = BigInt::zero();
        *fibres.entry(LatticePoint::new(key)).or_default() += 1;
    }
    let mut out = Vec::with_capacity(a.len());
    for (key, count) in fibres {
        let mut c = key.into_coords();
        for t in 0..count {
            c[i] = BigInt::from(t);
            out.push(LatticePoint::new(c.clone()));
        }
    }
    PointSet::new(a.dim(), out)
}

/// `C_d(…C₁(A)…)`, applied once per axis in ascending order.
pub fn down_closure(a: &PointSet) -> Result<PointSet> {
    a.require_nonnegative()?;
    (0..a.dim()).try_fold(a.clone(), |acc, i| compress(&acc, i))
}

/// For a down-set `X ⊆ N₀^d`, checks
/// `|X + {0,1}^d| = |X − {0,1}^d| = Σ_{I ⊆ [d]} |π_I(X)|`.
///
/// The identity always holds, so a failed verdict means a bug here; the
/// report then carries `X` as its witness.
pub fn cube_sum_identity(x: &PointSet) -> Result<VerificationReport> {
    x.require_nonempty()?;
    require_down_set(x)?;
    let d = x.dim();
    if d >= 63 {
        return Err(Error::budget("projection sum", format!("2^{d} subsets"), "2^62"));
    }
    let cube = PointSet::unit_cube(d, d);
    let neg_cube = PointSet::new(d, cube.iter().map(|p| -p))?;
    let plus = minkowski_sum(x, &cube)?.len();
    let minus = minkowski_sum(x, &neg_cube)?.len();
    let projections: usize = (0..1u64 << d).map(|mask| project_mask(x, mask).len()).sum();
    let rep = VerificationReport::compare("cube-sum-identity", BigInt::from(plus), Relation::Eq, BigInt::from(projections))
        .param("d", d)
        .param("|X|", x.len())
        .param("|X-{0,1}^d|", minus)
        .require("minus-side-agrees", minus == plus);
    Ok(if rep.passed() { rep } else { rep.with_witness(x) })
}

/// `Σ_{I ⊊ [d]} |π_I(S)|` for `S ⊆ N₀^d`.
pub fn proper_projection_sum(s: &PointSet) -> BigInt {
    let d = s.dim();
    assert!(d < 63);
    let full = (1u64 << d) - 1;
    (0..full).map(|mask| BigInt::from(project_mask(s, mask).len())).sum()
}

/// `Π (2L_i − 1) − Π 2L_i`, the remainder in the box doubling bound.
pub fn box_remainder(lengths: &[u64]) -> BigInt {
    let odd: BigInt = lengths.iter().map(|&l| BigInt::from(2 * l - 1)).product();
    let even: BigInt = lengths.iter().map(|&l| BigInt::from(2 * l)).product();
    odd - even
}

pub(crate) fn pow2(d: usize) -> BigInt {
    BigInt::one() << d
}
