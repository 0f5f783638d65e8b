//! Generalized arithmetic progressions and Freiman maps.
//!
//! A progression `x₀ + [L₁]·x₁ + … + [L_d]·x_d` is the set of sums
//! `x₀ + Σ μ_i x_i` with `0 ≤ μ_i < L_i`. It is `t`-proper when the sums
//! with `0 ≤ μ_i < t·L_i` are pairwise distinct. For a 2-proper progression
//! the coefficient map `x₀ + Σ μ_i x_i ↦ (μ₁, …, μ_d)` is a Freiman
//! isomorphism onto a subset of the box `[L₁] × … × [L_d]`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::compress::GridBox;
use crate::error::{Error, Result};
use crate::linalg::IntegerEchelon;
use crate::par;
use crate::report::{Relation, VerificationReport};
use crate::sets::{sumset_size, LatticePoint, PointSet};
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProgression", into = "RawProgression")]
pub struct Progression {
    base: LatticePoint,
    generators: Vec<LatticePoint>,
    lengths: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawProgression {
    base: LatticePoint,
    generators: Vec<LatticePoint>,
    lengths: Vec<u64>,
}

impl TryFrom<RawProgression> for Progression {
    type Error = Error;
    fn try_from(r: RawProgression) -> Result<Self> {
        Progression::new(r.base, r.generators, r.lengths)
    }
}

impl From<Progression> for RawProgression {
    fn from(p: Progression) -> Self {
        RawProgression { base: p.base, generators: p.generators, lengths: p.lengths }
    }
}

impl Progression {
    pub fn new(base: LatticePoint, generators: Vec<LatticePoint>, lengths: Vec<u64>) -> Result<Self> {
        if base.dim() == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be positive".into()));
        }
        if generators.len() != lengths.len() {
            return Err(Error::InvalidArgument(format!(
                "{} generators but {} lengths",
                generators.len(),
                lengths.len()
            )));
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != base.dim()) {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: g.dim() });
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidArgument("progression lengths must be positive".into()));
        }
        Ok(Progression { base, generators, lengths })
    }

    /// Integer progression `base + [L₁]·g₁ + …` in `Z`.
    pub fn in_z(base: i64, terms: &[(i64, u64)]) -> Self {
        let gens = terms.iter().map(|&(g, _)| LatticePoint::from_i64s(&[g])).collect();
        let lens = terms.iter().map(|&(_, l)| l).collect();
        Self::new(LatticePoint::from_i64s(&[base]), gens, lens).expect("valid progression")
    }

    pub fn base(&self) -> &LatticePoint {
        &self.base
    }

    pub fn generators(&self) -> &[LatticePoint] {
        &self.generators
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// Number of generators `d`.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    /// `L₁ ⋯ L_d`; 1 when `d = 0`.
    pub fn size(&self) -> BigInt {
        self.lengths.iter().map(|&l| BigInt::from(l)).product()
    }

    pub fn coefficient_box(&self) -> Option<GridBox> {
        GridBox::new(self.lengths.clone()).ok()
    }

    /// `x₀ + Σ μ_i x_i`.
    pub fn point(&self, mu: &[u64]) -> LatticePoint {
        assert_eq!(mu.len(), self.dim());
        let mut acc = self.base.clone();
        for (g, &m) in self.generators.iter().zip(mu) {
            if m != 0 {
                acc = &acc + &g.scale(&BigInt::from(m));
            }
        }
        acc
    }

    /// Same generators with lengths `t·L_i`.
    pub fn dilate(&self, t: u64) -> Result<Progression> {
        let lengths = self
            .lengths
            .iter()
            .map(|&l| l.checked_mul(t).ok_or_else(|| Error::InvalidArgument("dilated length overflows".into())))
            .collect::<Result<Vec<_>>>()?;
        Progression::new(self.base.clone(), self.generators.clone(), lengths)
    }

    /// Whether the generators are distinct standard basis vectors, in which
    /// case every dilate is proper.
    pub fn is_coordinate_aligned(&self) -> bool {
        let mut seen = vec![false; self.ambient_dim()];
        self.generators.iter().all(|g| {
            let nz: Vec<usize> = (0..g.dim()).filter(|&k| !g.coords()[k].is_zero()).collect();
            match nz.as_slice() {
                [k] if g.coords()[*k].is_one() && !seen[*k] => {
                    seen[*k] = true;
                    true
                }
                _ => false,
            }
        })
    }

    fn check_budget(&self, budget: &Budget) -> Result<usize> {
        let size = self.size();
        if size > BigInt::from(budget.max_enum) {
            return Err(Error::budget("progression enumeration", size, budget.max_enum));
        }
        Ok(usize::try_from(&size).expect("within budget"))
    }

    fn decode(&self, mut idx: usize, mu: &mut [u64]) {
        for k in (0..mu.len()).rev() {
            let l = self.lengths[k] as usize;
            mu[k] = (idx % l) as u64;
            idx /= l;
        }
    }

    /// Every sum with its coefficient vector, in mixed-radix order of `μ`.
    fn sums(&self, budget: &Budget) -> Result<Vec<LatticePoint>> {
        let n = self.check_budget(budget)?;
        Ok(par::map_range(n, |idx| {
            let mut mu = vec![0; self.dim()];
            self.decode(idx, &mut mu);
            self.point(&mu)
        }))
    }

    /// The represented set.
    pub fn enumerate(&self, budget: &Budget) -> Result<PointSet> {
        PointSet::new(self.ambient_dim(), self.sums(budget)?)
    }

    /// Whether all sums of `tP` are distinct.
    pub fn is_t_proper(&self, t: u64, budget: &Budget) -> Result<bool> {
        if t == 0 {
            return Err(Error::InvalidArgument("t must be positive".into()));
        }
        if self.is_coordinate_aligned() {
            return Ok(true);
        }
        let mut sums = self.dilate(t)?.sums(budget)?;
        let n = sums.len();
        sums.sort_unstable();
        sums.dedup();
        Ok(sums.len() == n)
    }

    pub fn is_proper(&self, budget: &Budget) -> Result<bool> {
        self.is_t_proper(1, budget)
    }

    /// Coefficient lookup `point ↦ μ`. Requires a proper progression.
    fn coefficient_index(&self, budget: &Budget) -> Result<HashMap<LatticePoint, Vec<u64>>> {
        let sums = self.sums(budget)?;
        let mut map = HashMap::with_capacity(sums.len());
        let mut mu = vec![0; self.dim()];
        for (idx, p) in sums.into_iter().enumerate() {
            self.decode(idx, &mut mu);
            map.insert(p, mu.clone());
        }
        Ok(map)
    }

    /// Coefficients of `p` in a coordinate-aligned progression.
    fn aligned_coefficients(&self, p: &LatticePoint) -> Option<Vec<u64>> {
        let diff = p - &self.base;
        let mut used = vec![false; self.ambient_dim()];
        let mut mu = Vec::with_capacity(self.dim());
        for (g, &l) in self.generators.iter().zip(&self.lengths) {
            let k = g.coords().iter().position(|c| !c.is_zero()).expect("unit generator");
            used[k] = true;
            let m = u64::try_from(&diff.coords()[k]).ok().filter(|&m| m < l)?;
            mu.push(m);
        }
        let off_axis_zero = diff.coords().iter().zip(&used).all(|(c, &u)| u || c.is_zero());
        off_axis_zero.then_some(mu)
    }

    /// Parses the text form: `base <ints>` then one `gen <ints> len <L>` line
    /// per generator. `#` comments and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut base = None;
        let mut gens = Vec::new();
        let mut lens = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: n + 1, message };
            if let Some(rest) = line.strip_prefix("base") {
                if base.is_some() {
                    return Err(err("duplicate base line".into()));
                }
                base = Some(LatticePoint::new(crate::sets::io_parse_ints(rest).map_err(err)?));
            } else if let Some(rest) = line.strip_prefix("gen") {
                let (vec, len) = rest.rsplit_once("len").ok_or_else(|| err("expected `gen <ints> len <L>`".into()))?;
                gens.push(LatticePoint::new(crate::sets::io_parse_ints(vec).map_err(err)?));
                lens.push(len.trim().parse::<u64>().map_err(|_| err(format!("bad length {:?}", len.trim())))?);
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        let base = base.ok_or(Error::Parse { line: 0, message: "missing base line".into() })?;
        Progression::new(base, gens, lens)
    }
}

impl FromStr for Progression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Progression::parse(s)
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {}", self.base)?;
        for (g, l) in self.generators.iter().zip(&self.lengths) {
            writeln!(f, "gen {g} len {l}")?;
        }
        Ok(())
    }
}

/// Coordinate-aligned progression spanning the bounding box of `a`:
/// base at the coordinate-wise minimum, unit generators, lengths equal to
/// the coordinate ranges plus one. Proper to every order.
pub fn bounding_box_progression(a: &PointSet) -> Result<Progression> {
    let (lo, hi) = a.bounds().ok_or(Error::EmptySet)?;
    let lengths = lo
        .coords()
        .iter()
        .zip(hi.coords())
        .map(|(l, h)| u64::try_from(h - l + 1).map_err(|_| Error::InvalidArgument("coordinate range exceeds u64".into())))
        .collect::<Result<Vec<_>>>()?;
    let gens = (0..a.dim()).map(|k| LatticePoint::unit(a.dim(), k)).collect();
    Progression::new(lo, gens, lengths)
}

/// Coefficient vectors of the points of `a`, in the order of `a`.
fn coefficients(p: &Progression, a: &PointSet, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    a.require_nonempty()?;
    if a.dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: p.ambient_dim(), found: a.dim() });
    }
    if p.dim() == 0 {
        return Err(Error::InvalidArgument("a zero-dimensional progression has no box image".into()));
    }
    if !p.is_t_proper(2, budget)? {
        return Err(Error::NotProper { t: 2 });
    }
    let not_in = |x: &LatticePoint| Error::NotContained { point: x.to_string(), container: "the progression".into() };
    if p.is_coordinate_aligned() {
        a.iter().map(|x| p.aligned_coefficients(x).ok_or_else(|| not_in(x))).collect()
    } else {
        let index = p.coefficient_index(budget)?;
        a.iter().map(|x| index.get(x).cloned().ok_or_else(|| not_in(x))).collect()
    }
}

fn coeff_point(mu: Vec<u64>) -> LatticePoint {
    LatticePoint::new(mu.into_iter().map(BigInt::from).collect())
}

/// `φ(A)`: the coefficient vectors of the points of `A` in the 2-proper
/// progression `P`, as a subset of `[L₁] × … × [L_d]`.
pub fn box_isomorphism(p: &Progression, a: &PointSet, budget: &Budget) -> Result<PointSet> {
    let image = PointSet::new(p.dim(), coefficients(p, a, budget)?.into_iter().map(coeff_point))?;
    assert_eq!(image.len(), a.len(), "coefficient map must be injective on a 2-proper progression");
    assert_eq!(
        sumset_size(&image, &image)?,
        sumset_size(a, a)?,
        "coefficient map must preserve |A+A| on a 2-proper progression"
    );
    Ok(image)
}

/// The box isomorphism as explicit pairs `a ↦ φ(a)`.
pub fn box_isomorphism_correspondence(p: &Progression, a: &PointSet, budget: &Budget) -> Result<Correspondence> {
    let mus = coefficients(p, a, budget)?;
    Correspondence::new(a.iter().cloned().zip(mus.into_iter().map(coeff_point)).collect())
}

/// A bijection between two point sets, given as ordered pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(LatticePoint, LatticePoint)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(LatticePoint, LatticePoint)>) -> Result<Self> {
        let (first_l, first_r) = match pairs.first() {
            Some((l, r)) => (l.dim(), r.dim()),
            None => return Err(Error::EmptySet),
        };
        for (l, r) in &pairs {
            if l.dim() != first_l {
                return Err(Error::DimensionMismatch { expected: first_l, found: l.dim() });
            }
            if r.dim() != first_r {
                return Err(Error::DimensionMismatch { expected: first_r, found: r.dim() });
            }
        }
        let left = PointSet::new(first_l, pairs.iter().map(|(l, _)| l.clone()))?;
        let right = PointSet::new(first_r, pairs.iter().map(|(_, r)| r.clone()))?;
        if left.len() != pairs.len() || right.len() != pairs.len() {
            return Err(Error::InvalidArgument("correspondence is not a bijection".into()));
        }
        Ok(Correspondence { pairs })
    }

    /// Pairs `from[i] ↦ to[i]`.
    pub fn zip(from: &[LatticePoint], to: &[LatticePoint]) -> Result<Self> {
        if from.len() != to.len() {
            return Err(Error::InvalidArgument(format!("{} sources but {} targets", from.len(), to.len())));
        }
        Self::new(from.iter().cloned().zip(to.iter().cloned()).collect())
    }

    pub fn identity(a: &PointSet) -> Self {
        Correspondence { pairs: a.iter().map(|p| (p.clone(), p.clone())).collect() }
    }

    pub fn pairs(&self) -> &[(LatticePoint, LatticePoint)] {
        &self.pairs
    }

    pub fn inverse(&self) -> Correspondence {
        Correspondence { pairs: self.pairs.iter().map(|(l, r)| (r.clone(), l.clone())).collect() }
    }
}

struct QuadrupleCheck {
    quadruples: u64,
    preserved: u64,
    first_violation: Option<[usize; 4]>,
}

/// Counts additive quadruples `a₁+a₂ = a₃+a₄` among the sources and how many
/// of them map to additive quadruples.
fn check_quadruples(src: &[LatticePoint], dst: &[LatticePoint]) -> QuadrupleCheck {
    let index: HashMap<&LatticePoint, usize> = src.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = src.len();
    let per_first = par::map_range(n, |i| {
        let mut q = 0u64;
        let mut ok = 0u64;
        let mut bad = None;
        for j in 0..n {
            let s = &src[i] + &src[j];
            let t = &dst[i] + &dst[j];
            for k in 0..n {
                let rest = &s - &src[k];
                if let Some(&l) = index.get(&rest) {
                    q += 1;
                    if &dst[k] + &dst[l] == t {
                        ok += 1;
                    } else if bad.is_none() {
                        bad = Some([i, j, k, l]);
                    }
                }
            }
        }
        (q, ok, bad)
    });
    let mut out = QuadrupleCheck { quadruples: 0, preserved: 0, first_violation: None };
    for (q, ok, bad) in per_first {
        out.quadruples += q;
        out.preserved += ok;
        if out.first_violation.is_none() {
            out.first_violation = bad;
        }
    }
    out
}

/// Checks that the correspondence is a Freiman homomorphism, and reports
/// whether its inverse is one too (making it a Freiman isomorphism).
///
/// `lhs` counts the source quadruples preserved and `rhs` all source
/// quadruples (ordered); they agree exactly for a homomorphism.
pub fn verify_freiman_hom(c: &Correspondence) -> Result<VerificationReport> {
    let src: Vec<LatticePoint> = c.pairs.iter().map(|(l, _)| l.clone()).collect();
    let dst: Vec<LatticePoint> = c.pairs.iter().map(|(_, r)| r.clone()).collect();
    let fwd = check_quadruples(&src, &dst);
    let back = check_quadruples(&dst, &src);
    let hom = fwd.preserved == fwd.quadruples;
    let inverse_hom = back.preserved == back.quadruples;
    let mut rep = VerificationReport::compare(
        "freiman-homomorphism",
        BigInt::from(fwd.preserved),
        Relation::Eq,
        BigInt::from(fwd.quadruples),
    )
    .param("pairs", c.pairs.len())
    .param("inverse-quadruples", back.quadruples)
    .param("inverse-preserved", back.preserved)
    .param("isomorphism", hom && inverse_hom);
    if let Some(q) = fwd.first_violation {
        rep.witness = Some(q.iter().map(|&i| src[i].clone()).collect());
    }
    Ok(rep)
}

/// Freiman dimension of `A`: the rank of the universal model minus one.
///
/// The universal model is the free abelian group on symbols `e_a`, `a ∈ A`,
/// modulo `e_{a₁} + e_{a₂} − e_{a₃} − e_{a₄}` for every additive quadruple
/// in `A`. Relations with a common pair sum `s` are spanned by the
/// differences between the first pair summing to `s` and each later one, so
/// only those rows are reduced.
pub fn freiman_dimension(a: &PointSet, budget: &Budget) -> Result<usize> {
    if a.len() < 2 {
        return Err(Error::InvalidArgument("Freiman dimension needs at least two points".into()));
    }
    let n = a.len();
    let pairs = (n as u64) * (n as u64 + 1) / 2;
    if pairs > budget.max_enum {
        return Err(Error::budget("pair-sum enumeration", pairs, budget.max_enum));
    }
    let pts = a.points();
    let sums: Vec<Vec<LatticePoint>> = par::map_range(n, |i| (i..n).map(|j| &pts[i] + &pts[j]).collect());

    let mut first_pair: HashMap<&LatticePoint, (usize, usize)> = HashMap::new();
    let mut ech = IntegerEchelon::new(n);
    // every relation has coefficient sum zero, so rank ≤ n − 1
    'outer: for (i, row) in sums.iter().enumerate() {
        for (off, s) in row.iter().enumerate() {
            let j = i + off;
            match first_pair.get(s) {
                None => {
                    first_pair.insert(s, (i, j));
                }
                Some(&(k, l)) => {
                    let mut rel = vec![BigInt::zero(); n];
                    rel[k] += 1;
                    rel[l] += 1;
                    rel[i] -= 1;
                    rel[j] -= 1;
                    ech.insert(rel);
                    if ech.rank() == n - 1 {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(n - ech.rank() - 1)
}
