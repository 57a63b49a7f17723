//! Maximization of `x ↦ ‖L x‖` over the unit ball of a block-diagonal
//! C*-algebra, at any matrix level.
//!
//! Domain and codomain are direct sums of full matrix blocks `⊕ M_d`. A
//! linear map between them is stored as one dense complex matrix acting on
//! the concatenated row-major block coordinates. At level `k` the map acts
//! entrywise on `k×k` matrices over the algebra (`id_{M_k} ⊗ L`): an element
//! is a list of `kd×kd` blocks whose `(a, b)` sub-block of size `d×d` is the
//! `(a, b)` matrix entry.
//!
//! The objective `max_π ‖(L x)_π‖_∞` is convex, so every reported value is a
//! lower bound of the true supremum, achieved by the returned witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{self, CMat, C64, ZERO};
use crate::seeds::derive_seed;

/// Optimizer budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Effort {
    pub restarts: usize,
    pub iterations: usize,
    /// Random extreme-point samples for the coarse oracle.
    pub samples: usize,
    /// Initial step of projected gradient ascent.
    pub step: f64,
}

impl Effort {
    pub const LOW: Effort = Effort { restarts: 8, iterations: 200, samples: 2_000, step: 0.1 };
    pub const DEFAULT: Effort = Effort { restarts: 64, iterations: 500, samples: 100_000, step: 0.1 };
    pub const HIGH: Effort = Effort { restarts: 256, iterations: 1_000, samples: 1_000_000, step: 0.1 };

    pub fn from_name(name: &str) -> Option<Effort> {
        match name.to_ascii_lowercase().as_str() {
            "low" => Some(Self::LOW),
            "default" => Some(Self::DEFAULT),
            "high" => Some(Self::HIGH),
            _ => None,
        }
    }

    /// Same optimizer, different sampling budget.
    pub fn with_samples(self, samples: usize) -> Effort {
        Effort { samples, ..self }
    }

    pub fn with_restarts(self, restarts: usize) -> Effort {
        Effort { restarts, ..self }
    }
}

impl Default for Effort {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone)]
pub struct BlockLinearMap {
    domain_dims: Vec<usize>,
    codomain_dims: Vec<usize>,
    domain_offsets: Vec<usize>,
    codomain_offsets: Vec<usize>,
    matrix: CMat,
    adjoint: CMat,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|d| {
            let o = acc;
            acc += d * d;
            o
        })
        .collect()
}

impl BlockLinearMap {
    /// `matrix` has `Σ e²` rows (codomain) and `Σ d²` columns (domain).
    pub fn new(domain_dims: Vec<usize>, codomain_dims: Vec<usize>, matrix: CMat) -> Self {
        let dom: usize = domain_dims.iter().map(|d| d * d).sum();
        let cod: usize = codomain_dims.iter().map(|d| d * d).sum();
        assert_eq!(matrix.shape(), (cod, dom), "block map matrix has the wrong shape");
        Self {
            domain_offsets: offsets(&domain_dims),
            codomain_offsets: offsets(&codomain_dims),
            adjoint: matrix.adjoint(),
            domain_dims,
            codomain_dims,
            matrix,
        }
    }

    pub fn domain_dims(&self) -> &[usize] {
        &self.domain_dims
    }

    pub fn codomain_dims(&self) -> &[usize] {
        &self.codomain_dims
    }

    fn transfer(
        m: &CMat,
        from_dims: &[usize],
        from_off: &[usize],
        to_dims: &[usize],
        to_off: &[usize],
        blocks: &[CMat],
        k: usize,
    ) -> Vec<CMat> {
        let mut out: Vec<CMat> = to_dims.iter().map(|&d| CMat::zeros(k * d, k * d)).collect();
        let len_in = m.ncols();
        let mut xin = vec![ZERO; len_in];
        for a in 0..k {
            for b in 0..k {
                for ((blk, &d), &o) in blocks.iter().zip(from_dims).zip(from_off) {
                    for i in 0..d {
                        for j in 0..d {
                            xin[o + i * d + j] = blk[(a * d + i, b * d + j)];
                        }
                    }
                }
                for ((blk, &d), &o) in out.iter_mut().zip(to_dims).zip(to_off) {
                    for i in 0..d {
                        for j in 0..d {
                            let row = o + i * d + j;
                            let mut acc = ZERO;
                            for (c, x) in m.row(row).iter().zip(&xin) {
                                acc += c * x;
                            }
                            blk[(a * d + i, b * d + j)] = acc;
                        }
                    }
                }
            }
        }
        out
    }

    /// `(id_{M_k} ⊗ L)(x)`.
    pub fn apply(&self, blocks: &[CMat], k: usize) -> Vec<CMat> {
        Self::transfer(
            &self.matrix,
            &self.domain_dims,
            &self.domain_offsets,
            &self.codomain_dims,
            &self.codomain_offsets,
            blocks,
            k,
        )
    }

    /// `(id_{M_k} ⊗ L*)(y)` for the Hilbert–Schmidt adjoint on coordinates.
    pub fn apply_adjoint(&self, blocks: &[CMat], k: usize) -> Vec<CMat> {
        Self::transfer(
            &self.adjoint,
            &self.codomain_dims,
            &self.codomain_offsets,
            &self.domain_dims,
            &self.domain_offsets,
            blocks,
            k,
        )
    }
}

pub fn block_norm(blocks: &[CMat]) -> f64 {
    blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
}

/// Embeds a level-`k` element at level `k + 1` by padding with zeros.
pub fn pad_level(blocks: &[CMat], dims: &[usize], k: usize) -> Vec<CMat> {
    blocks
        .iter()
        .zip(dims)
        .map(|(blk, &d)| {
            let mut out = CMat::zeros((k + 1) * d, (k + 1) * d);
            out.view_mut((0, 0), (k * d, k * d)).copy_from(blk);
            out
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerMeta {
    pub restarts: usize,
    pub iterations: usize,
    pub converged_restarts: usize,
    pub samples: usize,
    /// Best value reached by gradient ascent alone.
    pub ascent_value: f64,
    /// Best value reached by random sampling alone.
    pub sampled_value: f64,
}

#[derive(Debug, Clone)]
pub struct Maximum {
    /// `‖L x‖ / ‖x‖` at the witness.
    pub value: f64,
    /// Level-`k` domain blocks.
    pub witness: Vec<CMat>,
    pub meta: OptimizerMeta,
}

/// Certified ratio `‖(id⊗L) x‖ / ‖x‖`.
pub fn ratio(map: &BlockLinearMap, x: &[CMat], k: usize) -> f64 {
    let nx = block_norm(x);
    if nx == 0.0 {
        return 0.0;
    }
    block_norm(&map.apply(x, k)) / nx
}

fn objective_and_gradient(map: &BlockLinearMap, x: &[CMat], k: usize) -> (f64, Vec<CMat>) {
    let y = map.apply(x, k);
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
    for (i, b) in y.iter().enumerate() {
        let s = linalg::spectral_norm(b);
        if s > best {
            best = s;
            arg = i;
        }
    }
    let (_, u, v) = linalg::top_singular_pair(&y[arg]);
    let mut gy: Vec<CMat> = y.iter().map(|b| CMat::zeros(b.nrows(), b.ncols())).collect();
    gy[arg] = CMat::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj());
    (best, map.apply_adjoint(&gy, k))
}

fn project(x: &[CMat], g: &[CMat], step: f64) -> Vec<CMat> {
    x.iter()
        .zip(g)
        .map(|(a, b)| linalg::clip_to_unit_ball(&(a + b * C64::new(step, 0.0))))
        .collect()
}

struct RestartOutcome {
    value: f64,
    x: Vec<CMat>,
    iterations: usize,
    converged: bool,
}

fn ascend(map: &BlockLinearMap, mut x: Vec<CMat>, k: usize, effort: &Effort) -> RestartOutcome {
    let mut step = effort.step;
    let mut converged = false;
    let mut iterations = 0;
    let (mut fx, mut g) = objective_and_gradient(map, &x, k);
    for _ in 0..effort.iterations {
        iterations += 1;
        let mut accepted = None;
        let mut s = step;
        for _ in 0..40 {
            let cand = project(&x, &g, s);
            let fc = block_norm(&map.apply(&cand, k));
            if fc > fx {
                accepted = Some((cand, fc, s));
                break;
            }
            s *= 0.5;
        }
        match accepted {
            Some((cand, fc, s)) => {
                let gain = fc - fx;
                x = cand;
                step = (2.0 * s).min(1e6);
                let (f_new, g_new) = objective_and_gradient(map, &x, k);
                fx = f_new;
                g = g_new;
                if gain <= 1e-13 * fx.max(1.0) {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    RestartOutcome { value: fx, x, iterations, converged }
}

fn random_extreme_point(dims: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
    dims.iter().map(|&d| linalg::haar_unitary(k * d, rng)).collect()
}

fn random_ball_point(dims: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
    dims.iter()
        .map(|&d| linalg::clip_to_unit_ball(&linalg::gaussian(k * d, k * d, rng)))
        .collect()
}

const SAMPLE_BATCH: usize = 1024;

/// Multi-start projected gradient ascent plus a random-sampling oracle;
/// returns whichever witness gives the larger certified ratio.
pub fn maximize(
    map: &BlockLinearMap,
    k: usize,
    effort: &Effort,
    seed: u64,
    warm_starts: &[Vec<CMat>],
) -> Maximum {
    let dims = map.domain_dims().to_vec();
    let n_starts = effort.restarts + warm_starts.len();
    let outcomes: Vec<RestartOutcome> = (0..n_starts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r < warm_starts.len() {
                warm_starts[r].clone()
            } else {
                let idx = (r - warm_starts.len()) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, idx));
                if idx.is_multiple_of(2) {
                    random_extreme_point(&dims, k, &mut rng)
                } else {
                    random_ball_point(&dims, k, &mut rng)
                }
            };
            ascend(map, x0, k, effort)
        })
        .collect();

    let batches = effort.samples.div_ceil(SAMPLE_BATCH);
    let sampled: Vec<(f64, Vec<CMat>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0x5A5A_5A5A, b as u64));
            let count = SAMPLE_BATCH.min(effort.samples - b * SAMPLE_BATCH);
            let mut best: (f64, Vec<CMat>) = (f64::NEG_INFINITY, Vec::new());
            for _ in 0..count {
                let x = random_extreme_point(&dims, k, &mut rng);
                let v = block_norm(&map.apply(&x, k));
                if v > best.0 {
                    best = (v, x);
                }
            }
            best
        })
        .collect();

    let mut ascent_value: f64 = 0.0;
    let mut total_iterations = 0;
    let mut converged_restarts = 0;
    for o in &outcomes {
        ascent_value = ascent_value.max(o.value);
        total_iterations += o.iterations;
        converged_restarts += usize::from(o.converged);
    }
    // pick by certified ratio, first index wins ties
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_x = Vec::new();
    for o in outcomes {
        let r = ratio(map, &o.x, k);
        if r > best_ratio {
            best_ratio = r;
            best_x = o.x;
        }
    }
    let mut sampled_value: f64 = 0.0;
    for (v, x) in sampled {
        if x.is_empty() {
            continue;
        }
        sampled_value = sampled_value.max(v);
        let r = ratio(map, &x, k);
        if r > best_ratio {
            best_ratio = r;
            best_x = x;
        }
    }
    Maximum {
        value: best_ratio,
        witness: best_x,
        meta: OptimizerMeta {
            restarts: n_starts,
            iterations: total_iterations,
            converged_restarts,
            samples: effort.samples,
            ascent_value,
            sampled_value,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_map_has_norm_one_at_every_level() {
        let map = BlockLinearMap::new(vec![1, 2], vec![1, 2], CMat::identity(5, 5));
        for k in 1..=3 {
            let m = maximize(&map, k, &Effort::LOW, 1, &[]);
            assert!((m.value - 1.0).abs() < 1e-10, "level {k}: {}", m.value);
        }
    }

    #[test]
    fn transpose_on_m2_amplifies() {
        // x ↦ xᵀ on M₂: norm 1, level-2 norm 2
        let mut t = CMat::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                t[(j * 2 + i, i * 2 + j)] = c(1.0);
            }
        }
        let map = BlockLinearMap::new(vec![2], vec![2], t);
        let m1 = maximize(&map, 1, &Effort::LOW, 2, &[]);
        assert!((m1.value - 1.0).abs() < 1e-8);
        let m2 = maximize(&map, 2, &Effort::LOW, 3, &[]);
        assert!((m2.value - 2.0).abs() < 1e-6, "{}", m2.value);
    }

    #[test]
    fn commutative_norm_is_max_row_sum() {
        // ℓ∞ → ℓ∞ norm of a matrix equals its maximal absolute row sum
        let m = CMat::from_row_slice(
            3,
            3,
            &[c(1.0), c(-2.0), C64::new(0.0, 1.0), c(0.5), c(0.5), c(0.5), c(0.0), c(3.0), c(-0.1)],
        );
        let map = BlockLinearMap::new(vec![1; 3], vec![1; 3], m.clone());
        let oracle = (0..3).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        let got = maximize(&map, 1, &Effort::LOW, 4, &[]);
        assert!((got.value - oracle).abs() < 1e-9, "{} vs {oracle}", got.value);
        assert!(got.value <= oracle + 1e-12);
    }

    #[test]
    fn adjoint_is_hilbert_schmidt_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = vec![1, 2];
        let m = linalg::gaussian(5, 5, &mut rng);
        let map = BlockLinearMap::new(dims.clone(), dims.clone(), m);
        let k = 2;
        let x: Vec<CMat> = dims.iter().map(|&d| linalg::gaussian(k * d, k * d, &mut rng)).collect();
        let y: Vec<CMat> = dims.iter().map(|&d| linalg::gaussian(k * d, k * d, &mut rng)).collect();
        let inner = |a: &[CMat], b: &[CMat]| -> C64 { a.iter().zip(b).map(|(p, q)| (p.adjoint() * q).trace()).sum() };
        let lhs = inner(&y, &map.apply(&x, k));
        let rhs = inner(&map.apply_adjoint(&y, k), &x);
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn padding_preserves_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let dims = vec![1, 2];
        let map = BlockLinearMap::new(dims.clone(), dims.clone(), linalg::gaussian(5, 5, &mut rng));
        let x = random_ball_point(&dims, 1, &mut rng);
        let p = pad_level(&x, &dims, 1);
        assert!((ratio(&map, &x, 1) - ratio(&map, &p, 2)).abs() < 1e-12);
    }
}
