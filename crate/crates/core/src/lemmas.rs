//! Falsification runs for the block-matrix lemmas, the four-term norm gap
//! in group von Neumann algebras, and an empirical window on the Jordan
//! defect threshold.
//!
//! Every verifier has lower-bound semantics: a report states the number of
//! trials and the smallest slack seen, never a proof.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ascent::Effort;
use crate::error::{Error, Result};
use crate::fourier::{vn_norm, GroupAlgebraElement};
use crate::homspace::{hom_norm_report, jordan_defect, InducedHom};
use crate::linalg::{self, CMat, C64, ONE};
use crate::repr::IrrepTable;
use crate::seeds::derive_seed;

/// Slack allowed by the block-matrix verifiers.
pub const BLOCK_TOL: f64 = 1e-9;
/// Slack allowed by the norm-gap verifier.
pub const GAP_TOL: f64 = 1e-10;
pub const MAX_LEMMA_DIM: usize = 8;
pub const ADVERSARIAL_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Invmult,
    Unitmult,
    NormGap,
    JordanRho,
}

impl LemmaId {
    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Invmult => "invmult",
            LemmaId::Unitmult => "unitmult",
            LemmaId::NormGap => "norm_gap",
            LemmaId::JordanRho => "jordan_rho",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    /// Group or corpus the run was made on, if any.
    pub subject: Option<String>,
    pub trials: usize,
    /// Smallest slack `bound − lhs` seen.
    pub worst_margin: f64,
    /// Present iff `worst_margin < −tolerance`.
    pub counterexample: Option<Value>,
    pub tolerance: f64,
    pub details: BTreeMap<String, f64>,
}

fn matrix_json(m: &CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    json!(rows)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_LEMMA_DIM {
        return Err(Error::SizeLimit(format!("lemma dimension must lie in 1..={MAX_LEMMA_DIM}, got {dim}")));
    }
    Ok(())
}

fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Gradient of the spectral norm (real Frobenius inner product): `u vᴴ`.
fn norm_gradient(m: &CMat) -> CMat {
    let (_, u, v) = linalg::top_singular_pair(m);
    CMat::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// One block-matrix configuration: `[[u, 1], [−1, x]]`, or `[[u, x], [−1, v]]`
/// when `v` is present.
#[derive(Clone)]
struct BlockCase {
    /// `u`, the upper-left block.
    u: CMat,
    /// `v` for unitmult, unused for invmult.
    v: Option<CMat>,
    x: CMat,
}

impl BlockCase {
    fn block(&self) -> CMat {
        let id = linalg::identity(self.u.nrows());
        let neg = -&id;
        match &self.v {
            None => block2(&self.u, &id, &neg, &self.x),
            Some(v) => block2(&self.u, &self.x, &neg, v),
        }
    }

    /// `u*` for invmult, `uv` for unitmult.
    fn target(&self) -> CMat {
        match &self.v {
            None => self.u.adjoint(),
            Some(v) => &self.u * v,
        }
    }

    /// `(c, bound, lhs)`.
    fn evaluate(&self) -> (f64, f64, f64) {
        let c = linalg::spectral_norm(&self.block()) / std::f64::consts::SQRT_2;
        let bound = 2.0 * (c * c - 1.0).max(0.0).sqrt();
        let lhs = linalg::spectral_norm(&(&self.x - self.target()));
        (c, bound, lhs)
    }

    fn margin(&self) -> f64 {
        let (_, bound, lhs) = self.evaluate();
        bound - lhs
    }

    /// Gradient in `x` of `lhs − bound`.
    fn violation_gradient(&self) -> CMat {
        let d = self.u.nrows();
        let (c, _, _) = self.evaluate();
        let g_lhs = norm_gradient(&(&self.x - self.target()));
        let g_block = norm_gradient(&self.block());
        let g_x = match &self.v {
            None => g_block.view((d, d), (d, d)).into_owned(),
            Some(_) => g_block.view((0, d), (d, d)).into_owned(),
        };
        let slope = 2.0 * c / ((c * c - 1.0).max(1e-30).sqrt()) / std::f64::consts::SQRT_2;
        g_lhs - g_x * C64::new(slope, 0.0)
    }

    fn witness(&self, margin: f64) -> Value {
        let (c, bound, lhs) = self.evaluate();
        let mut w = json!({
            "u": matrix_json(&self.u),
            "x": matrix_json(&self.x),
            "c": c,
            "bound": bound,
            "lhs": lhs,
            "margin": margin,
        });
        if let Some(v) = &self.v {
            w["v"] = matrix_json(v);
        }
        w
    }
}

/// Random trial near the equality configuration: `x = target + ε g` with
/// `ε` log-uniform in `[1e-4, 10]`; every tenth trial draws `x` freely.
fn random_case(dim: usize, two_unitaries: bool, seed: u64, index: usize) -> (BlockCase, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
    let u = linalg::haar_unitary(dim, &mut rng);
    let v = two_unitaries.then(|| linalg::haar_unitary(dim, &mut rng));
    let id = linalg::identity(dim);
    let mut defect = linalg::spectral_norm(&(&u * u.adjoint() - &id));
    if let Some(v) = &v {
        defect = defect.max(linalg::spectral_norm(&(v * v.adjoint() - &id)));
    }
    let mut case = BlockCase { u, v, x: CMat::zeros(dim, dim) };
    let g = linalg::gaussian(dim, dim, &mut rng);
    case.x = if index % 10 == 9 {
        g
    } else {
        let eps = 10f64.powf(rng.random_range(-4.0..1.0));
        let gn = linalg::spectral_norm(&g).max(f64::MIN_POSITIVE);
        case.target() + g * C64::new(eps / gn, 0.0)
    };
    (case, defect)
}

/// Gradient ascent in `x` on `lhs − bound` with step doubling and backtracking.
fn adversarial(start: &BlockCase, steps: usize) -> BlockCase {
    let mut best = start.clone();
    let mut best_m = best.margin();
    let mut step = 0.1 * linalg::spectral_norm(&(&best.x - best.target())).max(1e-3);
    for _ in 0..steps {
        let g = best.violation_gradient();
        let gn = linalg::frobenius_norm(&g);
        if !gn.is_finite() || gn == 0.0 {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut cand = best.clone();
            cand.x = &best.x + &g * C64::new(step / gn, 0.0);
            let m = cand.margin();
            if m < best_m {
                best = cand;
                best_m = m;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    best
}

fn verify_block(lemma_id: LemmaId, dim: usize, trials: usize, seed: u64) -> Result<LemmaReport> {
    check_dim(dim)?;
    let two = lemma_id == LemmaId::Unitmult;
    let results: Vec<(f64, f64, f64, usize)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (case, defect) = random_case(dim, two, seed, i);
            let (c, bound, lhs) = case.evaluate();
            (bound - lhs, c, defect, i)
        })
        .collect();
    let discarded = results.iter().filter(|r| r.1 < 1.0).count();
    let haar_defect = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let worst = results
        .iter()
        .filter(|r| r.1 >= 1.0)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.3.cmp(&b.3)))
        .copied();
    let mut details = BTreeMap::new();
    details.insert("dim".into(), dim as f64);
    details.insert("discarded".into(), discarded as f64);
    details.insert("haar_max_unitarity_defect".into(), haar_defect);
    let Some((random_worst, _, _, idx)) = worst else {
        return Ok(LemmaReport {
            lemma_id,
            subject: None,
            trials,
            worst_margin: f64::INFINITY,
            counterexample: None,
            tolerance: BLOCK_TOL,
            details,
        });
    };
    details.insert("random_worst_margin".into(), random_worst);
    let (start, _) = random_case(dim, two, seed, idx);
    let adv = adversarial(&start, ADVERSARIAL_STEPS);
    let adv_margin = adv.margin().min(random_worst);
    details.insert("adversarial_margin".into(), adv_margin);
    let counterexample = (adv_margin < -BLOCK_TOL).then(|| adv.witness(adv_margin));
    Ok(LemmaReport { lemma_id, subject: None, trials, worst_margin: adv_margin, counterexample, tolerance: BLOCK_TOL, details })
}

/// `‖[[u, 1], [−1, x]]‖ ≤ c√2 ⇒ ‖x − u*‖ ≤ 2√(c² − 1)` on Haar-random `u`.
pub fn verify_invmult(dim: usize, trials: usize, seed: u64) -> Result<LemmaReport> {
    verify_block(LemmaId::Invmult, dim, trials, seed)
}

/// `‖[[u, x], [−1, v]]‖ ≤ c√2 ⇒ ‖x − uv‖ ≤ 2√(c² − 1)` on Haar-random `u, v`.
pub fn verify_unitmult(dim: usize, trials: usize, seed: u64) -> Result<LemmaReport> {
    verify_block(LemmaId::Unitmult, dim, trials, seed)
}

/// Margin of the block inequality at an explicit configuration.
pub fn block_margin(u: &CMat, v: Option<&CMat>, x: &CMat) -> f64 {
    BlockCase { u: u.clone(), v: v.cloned(), x: x.clone() }.margin()
}

/// `‖Σ c_j λ_{g_j}‖ ≥ (Σ|c_j|²)^{1/2}` for distinct `g_j`: every quadruple
/// `λ_{g₁} + λ_{g₂} − λ_{g₃} − λ_{g₄}` exhaustively, then `random_trials`
/// random supports and coefficients.
pub fn verify_norm_gap(t: &IrrepTable, random_trials: usize, seed: u64) -> Result<LemmaReport> {
    let g = t.group();
    let n = g.order();
    let quads: Vec<[usize; 4]> = (0..n.pow(4)).map(|i| [i % n, (i / n) % n, (i / n / n) % n, i / n / n / n]).collect();
    let four: Vec<(f64, f64, bool, [usize; 4])> = quads
        .par_iter()
        .map(|&q| -> Result<_> {
            let mut coeffs = vec![C64::new(0.0, 0.0); n];
            coeffs[q[0]] += ONE;
            coeffs[q[1]] += ONE;
            coeffs[q[2]] -= ONE;
            coeffs[q[3]] -= ONE;
            let l2 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let zero = (q[0] == q[2] && q[1] == q[3]) || (q[0] == q[3] && q[1] == q[2]);
            let v = vn_norm(&GroupAlgebraElement::new(g, coeffs)?, t)?;
            Ok((v, l2, zero, q))
        })
        .collect::<Result<_>>()?;
    let mut worst = f64::INFINITY;
    let mut witness: Option<Value> = None;
    let mut min_nonzero = f64::INFINITY;
    let mut zero_max = 0.0f64;
    for &(v, l2, zero, q) in &four {
        let margin = if zero {
            zero_max = zero_max.max(v);
            -v
        } else {
            min_nonzero = min_nonzero.min(v);
            (v - l2).min(v - std::f64::consts::SQRT_2)
        };
        if margin < worst {
            worst = margin;
            witness = Some(json!({ "quadruple": q, "value": v, "l2": l2 }));
        }
    }
    let random: Vec<(f64, Value)> = (0..random_trials)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let k = rng.random_range(1..=n);
            let mut support: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(support.as_mut_slice(), &mut rng);
            support.truncate(k);
            let cs = linalg::gaussian(k, 1, &mut rng);
            let mut coeffs = vec![C64::new(0.0, 0.0); n];
            for (j, &s) in support.iter().enumerate() {
                coeffs[s] = cs[(j, 0)];
            }
            let l2 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let v = vn_norm(&GroupAlgebraElement::new(g, coeffs.clone())?, t)?;
            let cj: Vec<[f64; 2]> = coeffs.iter().map(|c| [c.re, c.im]).collect();
            Ok((v - l2, json!({ "coefficients": cj, "value": v, "l2": l2 })))
        })
        .collect::<Result<_>>()?;
    let mut random_worst = f64::INFINITY;
    for (m, w) in random {
        random_worst = random_worst.min(m);
        if m < worst {
            worst = m;
            witness = Some(w);
        }
    }
    let mut details = BTreeMap::new();
    details.insert("four_term_cases".into(), four.len() as f64);
    details.insert("four_term_min_nonzero".into(), min_nonzero);
    details.insert("four_term_max_zero".into(), zero_max);
    details.insert("random_worst_margin".into(), random_worst);
    Ok(LemmaReport {
        lemma_id: LemmaId::NormGap,
        subject: Some(g.label().to_string()),
        trials: four.len() + random_trials,
        worst_margin: worst,
        counterexample: if worst < -GAP_TOL { witness } else { None },
        tolerance: GAP_TOL,
        details,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoPoint {
    pub source: String,
    pub target: String,
    pub bijection: Vec<usize>,
    pub norm_t: f64,
    pub norm_tinv: f64,
    pub distortion_excess: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoRow {
    pub eta: f64,
    /// Homs with defect `≥ η`.
    pub count: usize,
    /// Largest distortion excess among them; nonincreasing in `η`.
    pub max_excess: Option<f64>,
    /// Smallest distortion excess among them; an upper bound for any
    /// admissible `ρ(η)`.
    pub min_excess: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanRhoTable {
    pub points: Vec<RhoPoint>,
    pub rows: Vec<RhoRow>,
}

/// Scatter of (distortion excess, Jordan defect) over `corpus`, summarised
/// per `η`. Exploratory only.
pub fn estimate_jordan_rho(
    eta_grid: &[f64],
    corpus: &[InducedHom],
    effort: &Effort,
    defect_samples: usize,
    seed: u64,
) -> Result<JordanRhoTable> {
    let points: Vec<RhoPoint> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, hom)| -> Result<RhoPoint> {
            let s = derive_seed(seed, i as u64);
            let rep = hom_norm_report(hom, &[], effort, s)?;
            let jd = jordan_defect(hom, defect_samples, derive_seed(s, 1))?;
            Ok(RhoPoint {
                source: rep.source.clone(),
                target: rep.target.clone(),
                bijection: hom.bijection().map().to_vec(),
                norm_t: rep.norm_t,
                norm_tinv: rep.norm_tinv,
                distortion_excess: rep.distortion - 1.0,
                defect: jd.value,
            })
        })
        .collect::<Result<_>>()?;
    let mut etas = eta_grid.to_vec();
    etas.sort_by(f64::total_cmp);
    let rows = etas
        .into_iter()
        .map(|eta| {
            let sel: Vec<f64> = points.iter().filter(|p| p.defect >= eta).map(|p| p.distortion_excess).collect();
            RhoRow {
                eta,
                count: sel.len(),
                max_excess: sel.iter().copied().reduce(f64::max),
                min_excess: sel.iter().copied().reduce(f64::min),
            }
        })
        .collect();
    Ok(JordanRhoTable { points, rows })
}

impl JordanRhoTable {
    /// Summary as a report; `worst_margin` is the smallest excess among homs
    /// with nonzero defect (no pass/fail is implied).
    pub fn to_report(&self) -> LemmaReport {
        let mut details = BTreeMap::new();
        for r in &self.rows {
            if let Some(v) = r.max_excess {
                details.insert(format!("max_excess_eta_{}", r.eta), v);
            }
            if let Some(v) = r.min_excess {
                details.insert(format!("min_excess_eta_{}", r.eta), v);
            }
        }
        let worst = self
            .points
            .iter()
            .filter(|p| p.defect > 1e-8)
            .map(|p| p.distortion_excess)
            .fold(f64::INFINITY, f64::min);
        LemmaReport {
            lemma_id: LemmaId::JordanRho,
            subject: None,
            trials: self.points.len(),
            worst_margin: worst,
            counterexample: None,
            tolerance: 0.0,
            details,
        }
    }
}
