//! Algebra isomorphisms `T: A(G) → A(H)`, `T f = f ∘ t`, induced by a
//! bijection `t: H → G`, and their (amplified) norms.
//!
//! All norms are computed on the dual side. The adjoint `T*: VN(H) → VN(G)`
//! sends `λ_h` to `λ_{t(h)}`, so `‖id_{M_k} ⊗ T‖ = ‖id_{M_k} ⊗ T*‖` is the
//! supremum of `max_π ‖Σ_h C_h ⊗ π(t(h))‖` over coefficient matrices with
//! `max_σ ‖Σ_h C_h ⊗ σ(h)‖ ≤ 1`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ascent::{self, BlockLinearMap, Effort, OptimizerMeta};
use crate::error::{Error, Result};
use crate::fourier::{self, AFunction, GroupAlgebraElement};
use crate::group::{FiniteGroup, GroupBijection};
use crate::linalg::{self, CMat, C64, ZERO};
use crate::repr::{irreps_of, IrrepTable};
use crate::seeds::derive_seed;

/// Largest block side `k · d_π` accepted by the level-k optimizer.
pub const MAX_AMPLIFIED_BLOCK: usize = 64;
/// Largest matrix level used for the completely bounded norm.
pub const MAX_CB_LEVEL: usize = 8;

#[derive(Debug, Clone)]
pub struct InducedHom {
    bijection: GroupBijection,
    source_table: IrrepTable,
    target_table: IrrepTable,
}

/// Level-`k` element `Σ_h C_h ⊗ λ_h`, one `k×k` matrix per group element.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCoefficients {
    pub level: usize,
    pub coeffs: Vec<CMat>,
}

impl Serialize for MatrixCoefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let nested: Vec<Vec<Vec<[f64; 2]>>> = self
            .coeffs
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        #[derive(Serialize)]
        struct Repr<'a> {
            level: usize,
            coeffs: &'a Vec<Vec<Vec<[f64; 2]>>>,
        }
        Repr { level: self.level, coeffs: &nested }.serialize(s)
    }
}

impl MatrixCoefficients {
    /// Recovers `C_h = (1/n) Σ_σ d_σ (id ⊗ tr)[(I_k ⊗ σ(h)*) X_σ]`.
    pub fn from_blocks(blocks: &[CMat], table: &IrrepTable, level: usize) -> Self {
        let n = table.group().order();
        let coeffs = (0..n)
            .map(|h| {
                let mut c = CMat::zeros(level, level);
                for (p, x) in table.irreps().iter().zip(blocks) {
                    let d = p.dimension;
                    let s = &p.matrices[h];
                    let w = d as f64 / n as f64;
                    for a in 0..level {
                        for b in 0..level {
                            let mut acc = ZERO;
                            for i in 0..d {
                                for j in 0..d {
                                    acc += s[(i, j)].conj() * x[(a * d + i, b * d + j)];
                                }
                            }
                            c[(a, b)] += acc * w;
                        }
                    }
                }
                c
            })
            .collect();
        Self { level, coeffs }
    }

    /// Blocks `Σ_h C_h ⊗ σ(h)` for every irrep, with `σ(h)` read through `relabel`.
    pub fn blocks(&self, table: &IrrepTable, relabel: &[usize]) -> Vec<CMat> {
        table
            .irreps()
            .iter()
            .map(|p| {
                let d = p.dimension;
                let mut acc = CMat::zeros(self.level * d, self.level * d);
                for (h, c) in self.coeffs.iter().enumerate() {
                    acc += linalg::kron(c, &p.matrices[relabel[h]]);
                }
                acc
            })
            .collect()
    }
}

/// `‖Σ_h C_h ⊗ λ_{relabel(h)}‖` computed in the `kn`-dimensional regular
/// representation, independent of any irrep table.
pub fn regular_amplified_norm(group: &FiniteGroup, coeffs: &MatrixCoefficients, relabel: &[usize]) -> f64 {
    let n = group.order();
    let k = coeffs.level;
    let mut big = CMat::zeros(k * n, k * n);
    for (h, c) in coeffs.coeffs.iter().enumerate() {
        let g = relabel[h];
        for x in 0..n {
            let gx = group.mul(g, x);
            for a in 0..k {
                for b in 0..k {
                    big[(a * n + gx, b * n + x)] += c[(a, b)];
                }
            }
        }
    }
    linalg::spectral_norm(&big)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub level: usize,
    /// Certified lower bound `‖(id⊗T*) x‖ / ‖x‖` at the witness.
    pub value: f64,
    pub witness: MatrixCoefficients,
    pub meta: OptimizerMeta,
}

#[derive(Debug, Clone, Serialize)]
pub struct CbNorm {
    pub level: usize,
    pub value: f64,
    /// Level-k values for `k = 1..=level`.
    pub sequence: Vec<f64>,
    pub witness: MatrixCoefficients,
}

impl InducedHom {
    /// `bijection` is `t: H → G`; `source_table` belongs to `G`,
    /// `target_table` to `H`.
    pub fn new(bijection: GroupBijection, source_table: IrrepTable, target_table: IrrepTable) -> Result<Self> {
        if source_table.group().table() != bijection.target().table() {
            return Err(Error::GroupMismatch("source irrep table is not for the bijection target".into()));
        }
        if target_table.group().table() != bijection.source().table() {
            return Err(Error::GroupMismatch("target irrep table is not for the bijection source".into()));
        }
        Ok(Self { bijection, source_table, target_table })
    }

    /// Computes both irrep tables from `seed`.
    pub fn from_bijection(bijection: GroupBijection, seed: u64) -> Result<Self> {
        let g = irreps_of(bijection.target(), seed)?;
        let h = irreps_of(bijection.source(), seed)?;
        Self::new(bijection, g, h)
    }

    pub fn bijection(&self) -> &GroupBijection {
        &self.bijection
    }

    /// Irreps of `G`, the domain group of `T`.
    pub fn source_table(&self) -> &IrrepTable {
        &self.source_table
    }

    /// Irreps of `H`.
    pub fn target_table(&self) -> &IrrepTable {
        &self.target_table
    }

    pub fn with_bijection(&self, bijection: GroupBijection) -> Result<Self> {
        Self::new(bijection, self.source_table.clone(), self.target_table.clone())
    }

    /// `T⁻¹: A(H) → A(G)`, induced by `t⁻¹`.
    pub fn inverse(&self) -> Self {
        Self {
            bijection: self.bijection.inverse(),
            source_table: self.target_table.clone(),
            target_table: self.source_table.clone(),
        }
    }

    pub fn is_group_isomorphism(&self) -> bool {
        self.bijection.is_homomorphism()
    }

    pub fn is_anti_isomorphism(&self) -> bool {
        self.bijection.is_anti_homomorphism()
    }

    /// `T f = f ∘ t`.
    pub fn apply(&self, f: &AFunction) -> Result<AFunction> {
        if f.group().table() != self.bijection.target().table() {
            return Err(Error::GroupMismatch("function is not on the source group".into()));
        }
        Ok(f.compose(self.bijection.source(), self.bijection.map()))
    }

    /// `T*(Σ c_h λ_h) = Σ c_h λ_{t(h)}`.
    pub fn adjoint_image(&self, x: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
        if x.group().table() != self.bijection.source().table() {
            return Err(Error::GroupMismatch("element is not over the target group".into()));
        }
        let mut coeffs = vec![ZERO; x.coeffs.len()];
        for (h, c) in x.coeffs.iter().enumerate() {
            coeffs[self.bijection.apply(h)] = *c;
        }
        GroupAlgebraElement::new(self.bijection.target(), coeffs)
    }

    /// `T*` as a map from the Fourier blocks of `VN(H)` to those of `VN(G)`.
    pub fn adjoint_block_map(&self) -> BlockLinearMap {
        let n = self.bijection.source().order();
        let dom = &self.target_table;
        let cod = &self.source_table;
        // coordinates of VN(H) blocks → coefficients c_h
        let dom_len: usize = dom.dims().iter().map(|d| d * d).sum();
        let mut to_coeffs = CMat::zeros(n, dom_len);
        let mut off = 0;
        for p in dom.irreps() {
            let d = p.dimension;
            let w = d as f64 / n as f64;
            for h in 0..n {
                for i in 0..d {
                    for j in 0..d {
                        to_coeffs[(h, off + i * d + j)] = p.matrices[h][(i, j)].conj() * w;
                    }
                }
            }
            off += d * d;
        }
        // coefficients c_h → coordinates of Σ c_h π(t(h))
        let cod_len: usize = cod.dims().iter().map(|d| d * d).sum();
        let mut from_coeffs = CMat::zeros(cod_len, n);
        let mut off = 0;
        for p in cod.irreps() {
            let d = p.dimension;
            for h in 0..n {
                let m = &p.matrices[self.bijection.apply(h)];
                for i in 0..d {
                    for j in 0..d {
                        from_coeffs[(off + i * d + j, h)] = m[(i, j)];
                    }
                }
            }
            off += d * d;
        }
        BlockLinearMap::new(dom.dims(), cod.dims(), from_coeffs * to_coeffs)
    }

    fn max_dim(&self) -> usize {
        self.source_table.dims().into_iter().chain(self.target_table.dims()).max().unwrap_or(1)
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::Parse("matrix level must be at least 1".into()));
        }
        if k * self.max_dim() > MAX_AMPLIFIED_BLOCK {
            return Err(Error::SizeLimit(format!(
                "level {k} with irreps of dimension {} exceeds block size {MAX_AMPLIFIED_BLOCK}",
                self.max_dim()
            )));
        }
        Ok(())
    }

    /// Re-evaluates a witness through the regular representations of both
    /// groups.
    pub fn evaluate_witness(&self, w: &MatrixCoefficients) -> f64 {
        let h = self.bijection.source();
        let g = self.bijection.target();
        let id: Vec<usize> = (0..h.order()).collect();
        let denom = regular_amplified_norm(h, w, &id);
        if denom == 0.0 {
            return 0.0;
        }
        regular_amplified_norm(g, w, self.bijection.map()) / denom
    }
}

fn estimate_from(hom: &InducedHom, k: usize, m: ascent::Maximum) -> NormEstimate {
    let witness = MatrixCoefficients::from_blocks(&m.witness, hom.target_table(), k);
    NormEstimate { level: k, value: m.value, witness, meta: m.meta }
}

/// `‖T‖ = ‖T*‖`, as a certified lower bound with witness.
pub fn op_norm(hom: &InducedHom, effort: &Effort, seed: u64) -> Result<NormEstimate> {
    level_k_norm(hom, 1, effort, seed)
}

/// `‖id_{M_k} ⊗ T‖`.
pub fn level_k_norm(hom: &InducedHom, k: usize, effort: &Effort, seed: u64) -> Result<NormEstimate> {
    level_k_norm_warm(hom, k, effort, seed, None)
}

/// As [`level_k_norm`], additionally starting from a lower-level witness
/// embedded at level `k`, so the result is never below that witness.
pub fn level_k_norm_warm(
    hom: &InducedHom,
    k: usize,
    effort: &Effort,
    seed: u64,
    previous: Option<&NormEstimate>,
) -> Result<NormEstimate> {
    hom.check_level(k)?;
    let map = hom.adjoint_block_map();
    let dims = hom.target_table().dims();
    let mut warm = Vec::new();
    if let Some(prev) = previous {
        if prev.level <= k {
            let id: Vec<usize> = (0..hom.bijection().source().order()).collect();
            let mut blocks = prev.witness.blocks(hom.target_table(), &id);
            for lvl in prev.level..k {
                blocks = ascent::pad_level(&blocks, &dims, lvl);
            }
            warm.push(blocks);
        }
    }
    let m = ascent::maximize(&map, k, effort, derive_seed(seed, k as u64), &warm);
    Ok(estimate_from(hom, k, m))
}

/// Completely bounded norm, attained at level `m = Σ_π d_π(G)` because the
/// range of `T*` sits in `M_m`.
pub fn cb_norm(hom: &InducedHom, effort: &Effort, seed: u64) -> Result<CbNorm> {
    let m: usize = hom.source_table().dims().iter().sum();
    if m > MAX_CB_LEVEL {
        return Err(Error::SizeLimit(format!(
            "cb-norm needs level {m}, above the limit {MAX_CB_LEVEL}"
        )));
    }
    hom.check_level(m)?;
    let mut sequence = Vec::with_capacity(m);
    let mut prev: Option<NormEstimate> = None;
    for k in 1..=m {
        let est = level_k_norm_warm(hom, k, effort, seed, prev.as_ref())?;
        sequence.push(est.value);
        prev = Some(est);
    }
    let last = prev.expect("level sequence is non-empty");
    Ok(CbNorm { level: m, value: last.value, sequence, witness: last.witness })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelPair {
    pub norm_t: f64,
    pub norm_tinv: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRecord {
    pub direction: &'static str,
    pub level: usize,
    pub value: f64,
    pub witness: MatrixCoefficients,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetaRecord {
    pub direction: &'static str,
    pub level: usize,
    #[serde(flatten)]
    pub meta: OptimizerMeta,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomNormReport {
    pub source: String,
    pub target: String,
    pub bijection: Vec<usize>,
    pub norm_t: f64,
    pub norm_tinv: f64,
    pub level_k_norms: BTreeMap<usize, LevelPair>,
    pub distortion: f64,
    pub witnesses: Vec<WitnessRecord>,
    pub optimizer_meta: Vec<MetaRecord>,
}

impl HomNormReport {
    pub fn level(&self, k: usize) -> Option<&LevelPair> {
        self.level_k_norms.get(&k)
    }
}

/// Norms of `T` and `T⁻¹` at every requested level (level 1 always
/// included), computed in increasing order with warm starts so each
/// sequence is nondecreasing.
pub fn hom_norm_report(hom: &InducedHom, levels: &[usize], effort: &Effort, seed: u64) -> Result<HomNormReport> {
    let mut lv: Vec<usize> = levels.iter().copied().chain(std::iter::once(1)).collect();
    lv.sort_unstable();
    lv.dedup();
    let inv = hom.inverse();
    let mut level_k_norms = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut optimizer_meta = Vec::new();
    let mut per_direction = Vec::new();
    for (dir, h, dseed) in [("T", hom, derive_seed(seed, 0)), ("Tinv", &inv, derive_seed(seed, 1))] {
        let mut prev: Option<NormEstimate> = None;
        let mut values = Vec::new();
        for &k in &lv {
            let est = level_k_norm_warm(h, k, effort, dseed, prev.as_ref())?;
            values.push(est.value);
            witnesses.push(WitnessRecord { direction: dir, level: k, value: est.value, witness: est.witness.clone() });
            optimizer_meta.push(MetaRecord { direction: dir, level: k, meta: est.meta.clone() });
            prev = Some(est);
        }
        per_direction.push(values);
    }
    for (i, &k) in lv.iter().enumerate() {
        level_k_norms.insert(k, LevelPair { norm_t: per_direction[0][i], norm_tinv: per_direction[1][i] });
    }
    let norm_t = per_direction[0][0];
    let norm_tinv = per_direction[1][0];
    Ok(HomNormReport {
        source: hom.bijection().target().label().to_string(),
        target: hom.bijection().source().label().to_string(),
        bijection: hom.bijection().map().to_vec(),
        norm_t,
        norm_tinv,
        level_k_norms,
        distortion: norm_t * norm_tinv,
        witnesses,
        optimizer_meta,
    })
}

/// `T*(aa') + T*(a'a) − T*(a)T*(a') − T*(a')T*(a)`.
pub fn jordan_term(hom: &InducedHom, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    let ab = hom.adjoint_image(&a.mul(b)?)?;
    let ba = hom.adjoint_image(&b.mul(a)?)?;
    let ta = hom.adjoint_image(a)?;
    let tb = hom.adjoint_image(b)?;
    ab.add(&ba)?.sub(&ta.mul(&tb)?)?.sub(&tb.mul(&ta)?)
}

/// Defect norms on every λ-basis pair `(h, h')`.
pub fn basis_pair_defects(hom: &InducedHom) -> Result<Vec<((usize, usize), f64)>> {
    let h = hom.bijection().source();
    let n = h.order();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let term = jordan_term(hom, &GroupAlgebraElement::basis(h, a), &GroupAlgebraElement::basis(h, b))?;
            out.push(((a, b), fourier::vn_norm(&term, hom.source_table())?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanDefect {
    /// Lower bound of `sup ‖T^J(a, a')‖` over the unit ball.
    pub value: f64,
    pub basis_max: f64,
    pub basis_argmax: (usize, usize),
    pub witness_a: GroupAlgebraElement,
    pub witness_b: GroupAlgebraElement,
}

fn defect_ratio(hom: &InducedHom, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<f64> {
    let na = fourier::vn_norm(a, hom.target_table())?;
    let nb = fourier::vn_norm(b, hom.target_table())?;
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(fourier::vn_norm(&jordan_term(hom, a, b)?, hom.source_table())? / (na * nb))
}

/// `a ↦ T^J(a, fixed)` as a block map `VN(H) → VN(G)`.
fn jordan_slice_map(hom: &InducedHom, fixed: &GroupAlgebraElement) -> Result<BlockLinearMap> {
    let tab_h = hom.target_table();
    let dims = tab_h.dims();
    let dom_len: usize = dims.iter().map(|d| d * d).sum();
    let cod_dims = hom.source_table().dims();
    let cod_len: usize = cod_dims.iter().map(|d| d * d).sum();
    let mut m = CMat::zeros(cod_len, dom_len);
    let mut col = 0;
    for (bi, &d) in dims.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                let blocks: Vec<CMat> = dims
                    .iter()
                    .enumerate()
                    .map(|(bj, &e)| {
                        let mut z = CMat::zeros(e, e);
                        if bj == bi {
                            z[(i, j)] = C64::new(1.0, 0.0);
                        }
                        z
                    })
                    .collect();
                let a = fourier::element_from_vn_blocks(&blocks, tab_h)?;
                let img = fourier::vn_blocks(&jordan_term(hom, &a, fixed)?, hom.source_table())?;
                let mut row = 0;
                for (blk, &e) in img.iter().zip(&cod_dims) {
                    for r in 0..e {
                        for c in 0..e {
                            m[(row + r * e + c, col)] = blk[(r, c)];
                        }
                    }
                    row += e * e;
                }
                col += 1;
            }
        }
    }
    Ok(BlockLinearMap::new(dims, cod_dims, m))
}

/// Lower bound of the Jordan defect of `T*` from λ-basis pairs, random
/// unitary pairs, and alternating maximization over each argument.
pub fn jordan_defect(hom: &InducedHom, samples: usize, seed: u64) -> Result<JordanDefect> {
    let h = hom.bijection().source();
    let tab_h = hom.target_table();
    let basis = basis_pair_defects(hom)?;
    let (basis_argmax, basis_max) = basis
        .iter()
        .copied()
        .fold(((0, 0), f64::NEG_INFINITY), |acc, (p, v)| if v > acc.1 { (p, v) } else { acc });
    let mut best = (
        basis_max,
        GroupAlgebraElement::basis(h, basis_argmax.0),
        GroupAlgebraElement::basis(h, basis_argmax.1),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_unitary = |rng: &mut ChaCha8Rng| -> Result<GroupAlgebraElement> {
        let blocks: Vec<CMat> = tab_h.dims().iter().map(|&d| linalg::haar_unitary(d, rng)).collect();
        fourier::element_from_vn_blocks(&blocks, tab_h)
    };
    for _ in 0..samples {
        let a = random_unitary(&mut rng)?;
        let b = random_unitary(&mut rng)?;
        let v = defect_ratio(hom, &a, &b)?;
        if v > best.0 {
            best = (v, a, b);
        }
    }
    // alternating refinement; the defect is symmetric in its arguments
    let refine = Effort { restarts: 2, iterations: 200, samples: 0, step: 0.1 };
    for round in 0..3u64 {
        for swap in [false, true] {
            let (fixed, free) = if swap { (&best.1, &best.2) } else { (&best.2, &best.1) };
            let map = jordan_slice_map(hom, fixed)?;
            let start = fourier::vn_blocks(free, tab_h)?;
            let m = ascent::maximize(&map, 1, &refine, derive_seed(seed, round * 2 + u64::from(swap)), &[start]);
            let cand = fourier::element_from_vn_blocks(&m.witness, tab_h)?;
            let (a, b) = if swap { (best.1.clone(), cand) } else { (cand, best.2.clone()) };
            let v = defect_ratio(hom, &a, &b)?;
            if v > best.0 {
                best = (v, a, b);
            }
        }
    }
    Ok(JordanDefect { value: best.0, basis_max, basis_argmax, witness_a: best.1, witness_b: best.2 })
}
