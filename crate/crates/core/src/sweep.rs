//! Named exhaustive and random property sweeps.
//!
//! Random instances are drawn sequentially from a ChaCha8 generator seeded
//! with the configured seed, then checked in parallel. Violations are
//! counted and the first one in instance order is kept, so a summary is a
//! function of the sweep id, seed and trial counts only.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compress::{compress, cube_sum_identity, down_closure, is_down_set, GridBox};
use crate::cover::verify_fibre_inequality;
use crate::error::{Error, Result};
use crate::oracles::{freiman_dimension_by_hom_search, lacunary_example, min_doubling_search};
use crate::par;
use crate::progression::freiman_dimension;
use crate::report::{params, ParamValue, Relation, VerificationReport};
use crate::sets::{sumset_size, LatticePoint, PointSet, Rational};
use crate::verify::{
    plunnecke_witness, verify_box_doubling, verify_compressed_sum_bound, verify_discrete_bm, verify_freiman_lemma,
    verify_parallelepiped_doubling,
};
use crate::Budget;

/// Seed and size knobs; `None` selects the sweep's default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepConfig {
    pub seed: u64,
    pub trials: Option<usize>,
    pub max_size: Option<usize>,
}


/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub sweep: String,
    pub seed: u64,
    pub instances: u64,
    pub violations: u64,
    #[serde(with = "params")]
    pub parameters: Vec<(String, ParamValue)>,
    pub first_violation: Option<VerificationReport>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

/// Registered sweeps with one-line descriptions.
pub const SWEEPS: &[(&str, &str)] = &[
    ("box-doubling-exhaustive-3x3", "box doubling bound on every non-empty A in [3]^2"),
    ("box-doubling-exhaustive-2x2x2x2", "box doubling bound on every non-empty A in [2]^4"),
    ("box-doubling-full-boxes", "box doubling equality on every full box with sides <= 4, d <= 3"),
    ("compression-property", "|C_i(A)+C_i(B)| <= |A+B| and |C_i(A)| = |A| for random A, B in [4]^3"),
    ("cube-identity", "projection identity on down-closures of all A in [3]^2 and random A in [4]^3"),
    ("discrete-bm", "discrete Brunn-Minkowski for random X, Y in [3]^3 and d in 1..=3"),
    ("discrete-bm-sharp", "discrete Brunn-Minkowski equality for X = Y = [k]^d, k, d <= 3"),
    ("compressed-sum-downsets-3x3", "down-set sum bound for every pair of down-sets in [3]^2"),
    ("fibre-inequality", "fibre inequality and fibre-sum disjointness for random subsets of [3]^3"),
    ("plunnecke", "Plunnecke witness ratio <= sigma^2 for random A in Z"),
    ("freiman-lemma", "Freiman's lemma and its equality cases; dimension cross-checked by homomorphism search"),
    ("lacunary", "lacunary block sets: |A+A| = K(K+1)(2m-1)/2 and Freiman dimension K"),
    ("parallelepiped-cubes", "{0,1}^d for d <= 4: |A+A| = 3^d and the parallelepiped doubling bound"),
    ("min-doubling-1d", "minimal doubling in [k] is 2n-1"),
];

pub fn sweep_ids() -> impl Iterator<Item = &'static str> {
    SWEEPS.iter().map(|(id, _)| *id)
}

type Outcome = Result<Option<VerificationReport>>;

struct Tally {
    instances: u64,
    violations: u64,
    first: Option<VerificationReport>,
}

fn tally<T: Sync>(items: &[T], check: impl Fn(&T) -> Outcome + Sync + Send) -> Result<Tally> {
    let outcomes = par::map_slice(items, check);
    let mut t = Tally { instances: items.len() as u64, violations: 0, first: None };
    for o in outcomes {
        if let Some(rep) = o? {
            t.violations += 1;
            t.first.get_or_insert(rep);
        }
    }
    Ok(t)
}

fn failed(rep: VerificationReport) -> Option<VerificationReport> {
    (!rep.passed()).then_some(rep)
}

fn equality(rep: VerificationReport) -> Option<VerificationReport> {
    (!rep.passed() || rep.lhs != rep.rhs).then_some(rep)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random non-empty subset of `cells` (as a bit mask).
fn random_nonempty(rng: &mut ChaCha8Rng, cells: &PointSet) -> PointSet {
    let n = cells.len();
    loop {
        let mask = if n == 64 { rng.random::<u64>() } else { rng.random::<u64>() & ((1 << n) - 1) };
        if mask != 0 {
            return cells.subset_by_mask(mask);
        }
    }
}

fn all_nonempty(cells: &PointSet) -> Vec<PointSet> {
    (1u64..1 << cells.len()).map(|m| cells.subset_by_mask(m)).collect()
}

fn boxes(max_side: u64, max_dim: usize) -> Vec<GridBox> {
    let mut out = Vec::new();
    for d in 1..=max_dim {
        let sides = GridBox::cube(max_side, d).expect("box").points();
        for s in &sides {
            let lengths = s.to_usizes().expect("side").iter().map(|&c| c as u64 + 1).collect();
            out.push(GridBox::new(lengths).expect("box"));
        }
    }
    out
}

/// Runs the named sweep.
pub fn run_sweep(id: &str, config: &SweepConfig, budget: &Budget) -> Result<SweepSummary> {
    let seed = config.seed;
    let mut parameters: Vec<(String, ParamValue)> = Vec::new();
    fn random(parameters: &mut Vec<(String, ParamValue)>, seed: u64, trials: usize) -> ChaCha8Rng {
        parameters.push(("generator".into(), "chacha8".into()));
        parameters.push(("trials".into(), trials.into()));
        rng(seed)
    }
    let t = match id {
        "box-doubling-exhaustive-3x3" | "box-doubling-exhaustive-2x2x2x2" => {
            let bx = if id.ends_with("3x3") { GridBox::cube(3, 2)? } else { GridBox::cube(2, 4)? };
            let sets = all_nonempty(&bx.points());
            tally(&sets, |a| Ok(failed(verify_box_doubling(a, &bx)?)))?
        }
        "box-doubling-full-boxes" => {
            let bs = boxes(4, 3);
            tally(&bs, |b| Ok(equality(verify_box_doubling(&b.points(), b)?)))?
        }
        "compression-property" => {
            let trials = config.trials.unwrap_or(10_000);
            let mut r = random(&mut parameters, seed, trials);
            let cells = GridBox::cube(4, 3)?.points();
            let pairs: Vec<(PointSet, PointSet)> =
                (0..trials).map(|_| (random_nonempty(&mut r, &cells), random_nonempty(&mut r, &cells))).collect();
            tally(&pairs, |(a, b)| compression_check(a, b))?
        }
        "cube-identity" => {
            let trials = config.trials.unwrap_or(1000);
            let mut r = random(&mut parameters, seed, trials);
            let mut sets = all_nonempty(&GridBox::cube(3, 2)?.points());
            let cells = GridBox::cube(4, 3)?.points();
            sets.extend((0..trials).map(|_| random_nonempty(&mut r, &cells)));
            tally(&sets, |a| {
                let x = down_closure(a)?;
                let rep = cube_sum_identity(&x)?
                    .require("closure-is-down-set", is_down_set(&x)?)
                    .require("closure-keeps-size", x.len() == a.len());
                Ok(failed(rep))
            })?
        }
        "discrete-bm" => {
            let trials = config.trials.unwrap_or(1000);
            let mut r = random(&mut parameters, seed, trials);
            let cells = GridBox::cube(3, 3)?.points();
            let cases: Vec<(PointSet, PointSet, usize)> = (0..trials)
                .map(|_| {
                    let x = random_nonempty(&mut r, &cells);
                    let y = random_nonempty(&mut r, &cells);
                    (x, y, r.random_range(1..=3))
                })
                .collect();
            tally(&cases, |(x, y, d)| Ok(failed(verify_discrete_bm(x, y, *d)?)))?
        }
        "discrete-bm-sharp" => {
            let cases: Vec<(u64, usize)> = (1..=3).flat_map(|k| (1..=3).map(move |d| (k, d))).collect();
            tally(&cases, |&(k, d)| {
                let x = GridBox::cube(k, d)?.points();
                let rep = verify_discrete_bm(&x, &x, d)?;
                let expected = Rational::from_integer(BigInt::from(2 * k).pow(d as u32));
                Ok((rep.lhs != expected || rep.rhs != expected).then_some(rep))
            })?
        }
        "compressed-sum-downsets-3x3" => {
            let downs: Vec<PointSet> =
                all_nonempty(&GridBox::cube(3, 2)?.points()).into_iter().filter(|s| is_down_set(s).unwrap_or(false)).collect();
            parameters.push(("down-sets".into(), downs.len().into()));
            let pairs: Vec<(&PointSet, &PointSet)> = downs.iter().flat_map(|x| downs.iter().map(move |y| (x, y))).collect();
            tally(&pairs, |(x, y)| Ok(failed(verify_compressed_sum_bound(x, y, x, y)?)))?
        }
        "fibre-inequality" => {
            let trials = config.trials.unwrap_or(1000);
            let mut r = random(&mut parameters, seed, trials);
            let bx = GridBox::cube(3, 3)?;
            let cells = bx.points();
            let sets: Vec<PointSet> = (0..trials).map(|_| random_nonempty(&mut r, &cells)).collect();
            tally(&sets, |a| Ok(failed(verify_fibre_inequality(a, &bx, 1)?)))?
        }
        "plunnecke" => {
            let trials = config.trials.unwrap_or(200);
            let max_size = config.max_size.unwrap_or(10).max(1);
            parameters.push(("max-size".into(), max_size.into()));
            let mut r = random(&mut parameters, seed, trials);
            let range = 4 * max_size;
            let sets: Vec<PointSet> = (0..trials)
                .map(|_| {
                    let n = r.random_range(1..=max_size);
                    PointSet::from_ints(sample(&mut r, range, n).into_iter().map(|v| v as i64))
                })
                .collect();
            tally(&sets, |a| Ok(failed(plunnecke_witness(a, budget)?.2)))?
        }
        "freiman-lemma" => {
            let trials = config.trials.unwrap_or(500);
            let mut r = random(&mut parameters, seed, trials);
            let cells = GridBox::cube(3, 2)?.points();
            let mut cases: Vec<(PointSet, Option<usize>)> = vec![(PointSet::from_ints([0, 1, 3]), Some(2))];
            cases.extend((2..=8).map(|k| (PointSet::from_ints(0..k), Some(1))));
            cases.extend((0..trials).map(|_| {
                let n = r.random_range(2..=8);
                let idx = sample(&mut r, cells.len(), n);
                (PointSet::new(2, idx.into_iter().map(|i| cells.points()[i].clone())).expect("cells"), None)
            }));
            tally(&cases, |(a, expected_dim)| freiman_check(a, *expected_dim, budget))?
        }
        "lacunary" => {
            let cases: Vec<(u32, u32)> = (1..=4).flat_map(|k| (1..=6).map(move |m| (k, m))).collect();
            tally(&cases, |&(k, m)| lacunary_check(k, m, budget))?
        }
        "parallelepiped-cubes" => {
            let dims: Vec<usize> = (1..=4).collect();
            tally(&dims, |&d| {
                let a = GridBox::cube(2, d)?.points();
                let rep = verify_parallelepiped_doubling(&a, budget)?;
                let full = rep.get("|A+A|").and_then(ParamValue::as_integer) == Some(&BigInt::from(3).pow(d as u32))
                    && rep.get("d").and_then(ParamValue::as_integer) == Some(&BigInt::from(d));
                Ok((!rep.passed() || !full).then_some(rep))
            })?
        }
        "min-doubling-1d" => {
            let cases: Vec<(u64, usize)> = (1..=8).flat_map(|k| (1..=k as usize).map(move |n| (k, n))).collect();
            tally(&cases, |&(k, n)| {
                let (a, v) = min_doubling_search(&GridBox::new(vec![k])?, n, budget)?;
                let rep = VerificationReport::compare("min-doubling-1d", BigInt::from(v), Relation::Eq, BigInt::from(2 * n - 1))
                    .param("k", k)
                    .param("n", n);
                Ok(if rep.passed() { None } else { Some(rep.with_witness(&a)) })
            })?
        }
        other => return Err(Error::InvalidArgument(format!("unknown sweep {other:?}"))),
    };
    Ok(SweepSummary {
        sweep: id.to_string(),
        seed,
        instances: t.instances,
        violations: t.violations,
        parameters,
        first_violation: t.first,
    })
}

fn compression_check(a: &PointSet, b: &PointSet) -> Outcome {
    let whole = sumset_size(a, b)?;
    for i in 0..a.dim() {
        let (ca, cb) = (compress(a, i)?, compress(b, i)?);
        let compressed = sumset_size(&ca, &cb)?;
        let rep = VerificationReport::compare("compression-property", BigInt::from(compressed), Relation::Le, BigInt::from(whole))
            .param("axis", i)
            .require("size-preserved", ca.len() == a.len() && cb.len() == b.len())
            .require("idempotent", compress(&ca, i)? == ca);
        if !rep.passed() {
            return Ok(Some(rep.with_witness(&a.union(b)?)));
        }
    }
    Ok(None)
}

fn freiman_check(a: &PointSet, expected_dim: Option<usize>, budget: &Budget) -> Outcome {
    let rep = verify_freiman_lemma(a, &Rational::from_integer(1.into()), budget)?;
    let d = freiman_dimension(a, budget)?;
    // coordinate maps already need values up to the widest coordinate range
    let (lo, hi) = a.bounds().expect("non-empty");
    let span = lo.coords().iter().zip(hi.coords()).map(|(l, h)| h - l).max().expect("dimension >= 1");
    let bound = i64::try_from(span).map_err(|_| Error::InvalidArgument("coordinate range too wide".into()))?.max(1);
    let oracle = freiman_dimension_by_hom_search(a, bound, budget)?;
    let mut rep = rep.param("oracle-d", oracle).require("oracle-agrees", oracle == d);
    if let Some(e) = expected_dim {
        let tight = rep.lhs == rep.rhs;
        rep = rep.require("expected-dimension", d == e).require("equality", tight);
    }
    Ok(failed(rep))
}

fn lacunary_check(k: u32, m: u32, budget: &Budget) -> Outcome {
    let a = lacunary_example(k, m)?;
    let (k64, m64) = (u64::from(k), u64::from(m));
    let expected = k64 * (k64 + 1) * (2 * m64 - 1) / 2;
    let mut rep = VerificationReport::compare(
        "lacunary-sumset",
        BigInt::from(sumset_size(&a, &a)?),
        Relation::Eq,
        BigInt::from(expected),
    )
    .param("K", k)
    .param("m", m)
    .require("size", a.len() as u64 == k64 * m64);
    // blocks of one point are K lacunary singletons, a Sidon set of
    // dimension K - 1; a single point has no dimension to compare
    if k <= 3 && a.len() >= 2 {
        let d = freiman_dimension(&a, budget)?;
        let expected = if m >= 2 { k as usize } else { k as usize - 1 };
        rep = rep.param("freiman-dimension", d).require("dimension-matches", d == expected);
    }
    Ok(failed(rep))
}

/// Canonical text rendering used by the CLI table mode.
pub fn summary_lines(s: &SweepSummary) -> Vec<String> {
    let mut lines = vec![
        format!("sweep       {}", s.sweep),
        format!("seed        {}", s.seed),
        format!("instances   {}", s.instances),
        format!("violations  {}", s.violations),
    ];
    lines.extend(s.parameters.iter().map(|(k, v)| format!("{k:<11} {v}")));
    if let Some(rep) = &s.first_violation {
        lines.push(format!("first violation: {}", rep.statement_id));
        if let Some(w) = &rep.witness {
            let pts: Vec<String> = w.iter().map(LatticePoint::to_string).collect();
            lines.push(format!("witness     {}", pts.join("; ")));
        }
    }
    lines
}
