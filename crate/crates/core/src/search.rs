//! Searches over bijection-induced isomorphisms between two groups of equal
//! order: minimal distortion, level-2 norm scans, and the empirical bound on
//! the distortion threshold.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ascent::Effort;
use crate::error::{Error, Result};
use crate::group::{are_isomorphic, automorphisms, FiniteGroup, GroupBijection};
use crate::homspace::{hom_norm_report, InducedHom};
use crate::repr::irreps_of;
use crate::seeds::derive_seed;

/// Largest order searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 8;
pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;

pub const SQRT_3_2: f64 = 1.224_744_871_391_589;
pub const SQRT5_OVER_2: f64 = 1.118_033_988_749_895;
/// Tolerance on computed lower bounds when testing thresholds.
pub const THRESHOLD_TOL: f64 = 1e-3;
/// Half-width of the band around 1 treated as "isometric".
pub const UNIT_BAND: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BijectionSet {
    pub bijections: Vec<GroupBijection>,
    pub exhaustive: bool,
    /// Declared sample size when the search is not exhaustive.
    pub sample_size: Option<usize>,
}

/// Bijections `t: H → G`; with `canonical` only those with `t(e_H) = e_G`.
///
/// Orders above [`EXHAUSTIVE_LIMIT`] fall back to `sample_size` seeded
/// random bijections.
pub fn enumerate_bijections(
    g: &FiniteGroup,
    h: &FiniteGroup,
    canonical: bool,
    sample_size: usize,
    seed: u64,
) -> Result<BijectionSet> {
    let n = g.order();
    if n != h.order() {
        return Err(Error::InvalidBijection(format!(
            "orders differ: |{}| = {n}, |{}| = {}",
            g.label(),
            h.label(),
            h.order()
        )));
    }
    if n > EXHAUSTIVE_LIMIT {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let start = usize::from(canonical);
        let mut attempts = 0;
        while out.len() < sample_size && attempts < 20 * sample_size {
            attempts += 1;
            let mut map: Vec<usize> = (0..n).collect();
            map[start..].shuffle(&mut rng);
            if seen.insert(map.clone()) {
                out.push(GroupBijection::new(h.clone(), g.clone(), map)?);
            }
        }
        return Ok(BijectionSet { bijections: out, exhaustive: false, sample_size: Some(sample_size) });
    }
    let fixed = usize::from(canonical);
    let mut out = Vec::new();
    let mut map: Vec<usize> = (0..n).collect();
    permute(&mut map, fixed, &mut |m| out.push(m.to_vec()));
    out.sort();
    let bijections = out
        .into_iter()
        .map(|m| GroupBijection::new(h.clone(), g.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    Ok(BijectionSet { bijections, exhaustive: true, sample_size: None })
}

fn permute(v: &mut [usize], start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start + 1 >= v.len() {
        visit(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, visit);
        v.swap(start, i);
    }
}

/// One representative (lexicographically smallest map) per orbit of
/// `t ↦ α ∘ t ∘ β` for `α ∈ Aut(G)`, `β ∈ Aut(H)`.
pub fn aut_reduce(bijections: &[GroupBijection]) -> Vec<GroupBijection> {
    let Some(first) = bijections.first() else { return Vec::new() };
    let aut_g = automorphisms(first.target());
    let aut_h = automorphisms(first.source());
    let mut reps = BTreeMap::new();
    for t in bijections {
        let mut best: Option<Vec<usize>> = None;
        for a in &aut_g {
            for b in &aut_h {
                let m: Vec<usize> = (0..t.map().len()).map(|x| a[t.apply(b[x])]).collect();
                if best.as_ref().is_none_or(|cur| m < *cur) {
                    best = Some(m);
                }
            }
        }
        let key = best.unwrap();
        reps.entry(key.clone()).or_insert_with(|| {
            GroupBijection::new(t.source().clone(), t.target().clone(), key).expect("orbit element is a bijection")
        });
    }
    reps.into_values().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRecord {
    pub bijection: Vec<usize>,
    pub norm_t: f64,
    pub norm_tinv: f64,
    pub level2_t: Option<f64>,
    pub level2_tinv: Option<f64>,
    pub distortion: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArgMin {
    pub value: f64,
    pub bijection: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// Advisory verdicts never fail a run.
    pub advisory: bool,
    /// Smallest slack of the tested inequality (negative on failure).
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    /// `G`, the domain group of each `T`.
    pub source: String,
    /// `H`.
    pub target: String,
    pub isomorphic: bool,
    pub exhaustive: bool,
    pub sample_size: Option<usize>,
    pub records: Vec<SearchRecord>,
    pub min_distortion: Option<ArgMin>,
    pub min_level2: Option<ArgMin>,
    pub threshold_verdicts: BTreeMap<String, Verdict>,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub effort: Effort,
    pub seed: u64,
    pub sample_size: usize,
    /// Tolerance below `√5/2` for the advisory gap verdict.
    pub delta_gap: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { effort: Effort::DEFAULT, seed: 0, sample_size: DEFAULT_SAMPLE_SIZE, delta_gap: THRESHOLD_TOL }
    }
}

fn map_seed(seed: u64, map: &[usize]) -> u64 {
    map.iter().fold(seed, |acc, &x| derive_seed(acc, x as u64))
}

fn argmin(records: &[SearchRecord], key: impl Fn(&SearchRecord) -> Option<f64>) -> Option<ArgMin> {
    records
        .iter()
        .filter_map(|r| key(r).map(|v| (v, &r.bijection)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .map(|(value, b)| ArgMin { value, bijection: b.clone() })
}

fn run_scan(g: &FiniteGroup, h: &FiniteGroup, level: Option<usize>, opts: &SearchOptions) -> Result<SearchResult> {
    let set = enumerate_bijections(g, h, true, opts.sample_size, opts.seed)?;
    let isomorphic = are_isomorphic(h, g)?.is_some();
    let tab_g = irreps_of(g, opts.seed)?;
    let tab_h = irreps_of(h, opts.seed)?;
    let levels: Vec<usize> = level.into_iter().collect();
    let records: Vec<SearchRecord> = set
        .bijections
        .par_iter()
        .map(|t| -> Result<SearchRecord> {
            let hom = InducedHom::new(t.clone(), tab_g.clone(), tab_h.clone())?;
            let rep = hom_norm_report(&hom, &levels, &opts.effort, map_seed(opts.seed, t.map()))?;
            let lk = level.and_then(|k| rep.level(k));
            Ok(SearchRecord {
                bijection: t.map().to_vec(),
                norm_t: rep.norm_t,
                norm_tinv: rep.norm_tinv,
                level2_t: lk.map(|p| p.norm_t),
                level2_tinv: lk.map(|p| p.norm_tinv),
                distortion: rep.distortion,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_distortion = argmin(&records, |r| Some(r.distortion));
    let min_level2 = argmin(&records, |r| r.level2_t);
    let mut threshold_verdicts = BTreeMap::new();
    if isomorphic {
        let ok = min_distortion.as_ref().is_some_and(|m| {
            let t = GroupBijection::new(h.clone(), g.clone(), m.bijection.clone());
            (m.value - 1.0).abs() <= UNIT_BAND && t.is_ok_and(|t| t.is_homomorphism() || t.is_anti_homomorphism())
        });
        threshold_verdicts.insert(
            "isomorphic_min_distortion_one".into(),
            Verdict {
                pass: ok,
                advisory: false,
                margin: min_distortion.as_ref().map_or(f64::NAN, |m| UNIT_BAND - (m.value - 1.0).abs()),
                detail: "isomorphic groups: minimal distortion 1, attained by an isomorphism".into(),
            },
        );
    }
    if level.is_some() {
        let pairs: Vec<(f64, f64)> = records.iter().filter_map(|r| Some((r.level2_t?, r.level2_tinv?))).collect();
        if !isomorphic {
            let margin = pairs.iter().map(|(a, b)| a.max(*b) - SQRT_3_2).fold(f64::INFINITY, f64::min);
            threshold_verdicts.insert(
                "contrapositive_sqrt_3_2".into(),
                Verdict {
                    pass: margin >= -THRESHOLD_TOL,
                    advisory: false,
                    margin,
                    detail: "non-isomorphic groups: max(level-2 of T, level-2 of T^-1) >= sqrt(3/2)".into(),
                },
            );
        }
        let values: Vec<f64> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let lo = 1.0 + THRESHOLD_TOL;
        let hi = SQRT_3_2 - THRESHOLD_TOL;
        let in_window = values.iter().filter(|&&v| v > lo && v < hi).count();
        let window_margin = values
            .iter()
            .map(|&v| if v > lo && v < hi { -(v - lo).min(hi - v) } else { (lo - v).max(v - hi) })
            .fold(f64::INFINITY, f64::min);
        threshold_verdicts.insert(
            "window_1_sqrt_3_2_empty".into(),
            Verdict {
                pass: in_window == 0,
                advisory: false,
                margin: window_margin,
                detail: format!("{in_window} level-2 values in (1 + {THRESHOLD_TOL}, sqrt(3/2) - {THRESHOLD_TOL})"),
            },
        );
        let gap_lo = SQRT5_OVER_2 - opts.delta_gap;
        let gap_margin = values
            .iter()
            .map(|&v| if (v - 1.0).abs() <= UNIT_BAND { UNIT_BAND - (v - 1.0).abs() } else { v - gap_lo })
            .fold(f64::INFINITY, f64::min);
        threshold_verdicts.insert(
            "norm_gap_sqrt5_2".into(),
            Verdict {
                pass: gap_margin >= 0.0,
                advisory: true,
                margin: gap_margin,
                detail: "level-2 values in {1} or >= sqrt(5)/2 (lower bounds only)".into(),
            },
        );
    }
    Ok(SearchResult {
        source: g.label().to_string(),
        target: h.label().to_string(),
        isomorphic,
        exhaustive: set.exhaustive,
        sample_size: set.sample_size,
        records,
        min_distortion,
        min_level2,
        threshold_verdicts,
    })
}

/// Operator norms both ways and distortion for every canonical bijection.
pub fn min_distortion(g: &FiniteGroup, h: &FiniteGroup, opts: &SearchOptions) -> Result<SearchResult> {
    run_scan(g, h, None, opts)
}

/// Level-`level` norms of `T` and `T⁻¹` for every canonical bijection.
pub fn norm_gap_scan(g: &FiniteGroup, h: &FiniteGroup, level: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if level < 2 {
        return Err(Error::Parse("norm-gap scan needs level >= 2".into()));
    }
    run_scan(g, h, Some(level), opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairMinimum {
    pub source: String,
    pub target: String,
    pub min_distortion: f64,
    pub bijection: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonBound {
    /// `min (min_distortion − 1)` over the corpus.
    pub bound: f64,
    pub pairs: Vec<PairMinimum>,
}

/// Empirical upper bound for the distortion threshold of the
/// nearly-isometric rigidity statement.
pub fn epsilon_zero_bound(corpus: &[(FiniteGroup, FiniteGroup)], opts: &SearchOptions) -> Result<EpsilonBound> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for (g, h) in corpus {
        if g.order() == h.order() && are_isomorphic(g, h)?.is_some() {
            return Err(Error::IsomorphicPair(g.label().into(), h.label().into()));
        }
    }
    let mut pairs = Vec::new();
    for (g, h) in corpus {
        let res = min_distortion(g, h, opts)?;
        let m = res.min_distortion.ok_or(Error::EmptyCorpus)?;
        pairs.push(PairMinimum {
            source: g.label().into(),
            target: h.label().into(),
            min_distortion: m.value,
            bijection: m.bijection,
        });
    }
    let bound = pairs.iter().map(|p| p.min_distortion - 1.0).fold(f64::INFINITY, f64::min);
    Ok(EpsilonBound { bound, pairs })
}

impl SearchResult {
    /// CSV with columns `bijection, norm_T, norm_Tinv, level2_T, level2_Tinv, distortion`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["bijection", "norm_T", "norm_Tinv", "level2_T", "level2_Tinv", "distortion"]).map_err(io)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let b = r.bijection.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            w.write_record([
                b,
                r.norm_t.to_string(),
                r.norm_tinv.to_string(),
                opt(r.level2_t),
                opt(r.level2_tinv),
                r.distortion.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_cyclic, make_symmetric, parse_group};

    fn quick() -> SearchOptions {
        SearchOptions { effort: Effort::LOW.with_samples(500), ..Default::default() }
    }

    #[test]
    fn canonical_counts() {
        let z4 = make_cyclic(4).unwrap();
        let v4 = parse_group("Z2xZ2").unwrap();
        let set = enumerate_bijections(&z4, &v4, true, 10, 0).unwrap();
        assert_eq!(set.bijections.len(), 6);
        assert!(set.bijections.iter().all(|b| b.fixes_identity()));
        let all = enumerate_bijections(&z4, &v4, false, 10, 0).unwrap();
        assert_eq!(all.bijections.len(), 24);
        let z6 = make_cyclic(6).unwrap();
        let s3 = make_symmetric(3).unwrap();
        assert_eq!(enumerate_bijections(&z6, &s3, true, 10, 0).unwrap().bijections.len(), 120);
        assert!(enumerate_bijections(&z6, &z4, true, 10, 0).is_err());
    }

    #[test]
    fn aut_reduction_counts() {
        let z4 = make_cyclic(4).unwrap();
        let v4 = parse_group("Z2xZ2").unwrap();
        let set = enumerate_bijections(&z4, &v4, true, 10, 0).unwrap();
        let reduced = aut_reduce(&set.bijections);
        assert!(reduced.len() <= 6);
        // Aut(Z2×Z2) ≅ S3 permutes the three involutions simply transitively
        assert_eq!(reduced.len(), 1);
    }

    #[test]
    fn sampling_fallback_above_limit() {
        let z9 = make_cyclic(9).unwrap();
        let z3z3 = parse_group("Z3xZ3").unwrap();
        let set = enumerate_bijections(&z9, &z3z3, true, 25, 1).unwrap();
        assert!(!set.exhaustive);
        assert_eq!(set.sample_size, Some(25));
        assert_eq!(set.bijections.len(), 25);
        assert!(set.bijections.iter().all(|b| b.fixes_identity()));
    }

    #[test]
    fn z6_self_min_distortion_is_one() {
        let z6 = make_cyclic(6).unwrap();
        let res = min_distortion(&z6, &z6, &quick()).unwrap();
        let m = res.min_distortion.unwrap();
        assert!((m.value - 1.0).abs() < 1e-9);
        assert!(res.threshold_verdicts["isomorphic_min_distortion_one"].pass);
    }

    #[test]
    fn epsilon_bound_rejects_bad_corpora() {
        assert!(matches!(epsilon_zero_bound(&[], &quick()), Err(Error::EmptyCorpus)));
        let z4 = make_cyclic(4).unwrap();
        let d2 = parse_group("D2").unwrap();
        let v4 = parse_group("Z2xZ2").unwrap();
        assert!(matches!(epsilon_zero_bound(&[(d2, v4)], &quick()), Err(Error::IsomorphicPair(..))));
        let _ = z4;
    }

    #[test]
    fn csv_has_expected_columns() {
        let z4 = make_cyclic(4).unwrap();
        let v4 = parse_group("Z2xZ2").unwrap();
        let res = norm_gap_scan(&z4, &v4, 2, &quick()).unwrap();
        let csv = res.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "bijection,norm_T,norm_Tinv,level2_T,level2_Tinv,distortion");
        assert_eq!(lines.count(), 6);
    }
}
