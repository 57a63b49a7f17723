//! Recomputation of the reference examples: expected value, computed
//! value and tolerance per row.

use serde::Serialize;

use crate::ascent::Effort;
use crate::error::Result;
use crate::fourier::{a_norm, fourier_transform, AFunction};
use crate::group::{make_cyclic, make_symmetric, parse_group, GroupBijection};
use crate::homspace::{hom_norm_report, InducedHom};
use crate::linalg::{self, CMat, C64, ONE, ZERO};
use crate::repr::{irreps_of, IrrepTable};
use crate::search::{epsilon_zero_bound, min_distortion, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed − expected| ≤ tolerance`.
    Eq,
    /// `computed ≤ expected + tolerance`.
    Le,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproRow {
    pub id: String,
    pub module: String,
    pub description: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub rows: Vec<ReproRow>,
    pub all_pass: bool,
}

/// Tables consumed by the fourier rows; `None` computes them afresh.
#[derive(Debug, Clone, Default)]
pub struct ReproTables {
    pub z6: Option<IrrepTable>,
    pub s3: Option<IrrepTable>,
}

fn row(id: &str, module: &str, description: &str, expected: f64, computed: f64, tolerance: f64, relation: Relation) -> ReproRow {
    let pass = computed.is_finite()
        && match relation {
            Relation::Eq => (computed - expected).abs() <= tolerance,
            Relation::Le => computed <= expected + tolerance,
        };
    ReproRow {
        id: id.into(),
        module: module.into(),
        description: description.into(),
        expected,
        computed,
        tolerance,
        relation,
        pass,
    }
}

fn real(xs: &[f64]) -> Vec<C64> {
    xs.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Explicit 2-dimensional irrep of `S3` on `{id, s, r, sr, r², sr²}` with
/// `π(s)` the swap and `π(r) = diag(ω, ω̄)`, `ω = e^{2πi/3}`.
pub fn explicit_s3_pi() -> Vec<CMat> {
    let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let s = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let r = CMat::from_row_slice(2, 2, &[w, ZERO, ZERO, w.conj()]);
    let id = linalg::identity(2);
    let r2 = &r * &r;
    vec![id, s.clone(), r.clone(), &s * &r, r2.clone(), &s * &r2]
}

/// `π(f)` from expansion coefficients `f̂` in the closed form for `S3`.
pub fn closed_form_pi(fh: &[C64]) -> CMat {
    let e = |t: f64| C64::from_polar(1.0, t);
    let pi = std::f64::consts::PI;
    CMat::from_row_slice(
        2,
        2,
        &[
            (fh[1] + fh[4]) * 0.5,
            e(-2.0 * pi / 3.0) * (fh[2] - fh[5]) * 0.5,
            e(-pi / 3.0) * (fh[1] - fh[4]) * 0.5,
            (fh[2] + fh[5]) * 0.5,
        ],
    )
}

/// Max over the closed form's singular values of the distance to those of
/// the computed 2-dimensional block, scaled by `1/|S3|`.
fn closed_form_discrepancy(fh: &[C64], table: &IrrepTable) -> Result<f64> {
    let s3 = table.group();
    let fz = AFunction::from_cyclic_expansion(&make_cyclic(6)?, fh)?;
    let f = AFunction::new(s3, fz.values.clone())?;
    let blocks = fourier_transform(&f, table)?;
    let Some(k) = table.dims().iter().position(|&d| d == 2) else { return Ok(f64::INFINITY) };
    let ours: Vec<f64> = linalg::singular_values(&blocks.blocks[k]).iter().map(|s| s / 6.0).collect();
    let theirs = linalg::singular_values(&closed_form_pi(fh));
    Ok(ours.iter().zip(&theirs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

pub fn reproduce(effort: &Effort, seed: u64) -> Result<ReproReport> {
    reproduce_with_tables(effort, seed, &ReproTables::default())
}

pub fn reproduce_with_tables(effort: &Effort, seed: u64, tables: &ReproTables) -> Result<ReproReport> {
    let z6 = make_cyclic(6)?;
    let s3 = make_symmetric(3)?;
    let tz_own = irreps_of(&z6, seed)?;
    let ts_own = irreps_of(&s3, seed)?;
    let tz = tables.z6.clone().unwrap_or_else(|| tz_own.clone());
    let ts = tables.s3.clone().unwrap_or_else(|| ts_own.clone());
    let mut rows = Vec::new();

    let dims = ts_own.dims();
    rows.push(row("s3_irrep_count", "repr", "S3 has three irreps", 3.0, dims.len() as f64, 0.0, Relation::Eq));
    rows.push(row("s3_max_dim", "repr", "largest irrep of S3 has dimension 2", 2.0, dims.iter().copied().max().unwrap_or(0) as f64, 0.0, Relation::Eq));
    let pi = explicit_s3_pi();
    let hom_err = (0..6)
        .flat_map(|a| (0..6).map(move |b| (a, b)))
        .map(|(a, b)| linalg::max_abs_diff(&(&pi[a] * &pi[b]), &pi[s3.mul(a, b)]))
        .fold(0.0, f64::max);
    rows.push(row("s3_explicit_pi_homomorphism", "repr", "pi(s), pi(r) define a representation on {id,s,r,sr,r^2,sr^2}", 0.0, hom_err, 1e-12, Relation::Eq));

    let witness_f = real(&[0.0, 1.0, 1.0, 0.0, 1.0, -1.0]);
    let e1 = real(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let fz = AFunction::from_cyclic_expansion(&z6, &witness_f)?;
    let fs = AFunction::new(&s3, fz.values.clone())?;
    let gz = AFunction::from_cyclic_expansion(&z6, &e1)?;
    let gs = AFunction::new(&s3, gz.values.clone())?;
    rows.push(row("a_norm_z6_witness_f", "fourier", "‖f‖_{A(Z6)} = 4 for f̂=(0,1,1,0,1,−1)", 4.0, a_norm(&fz, &tz)?, 1e-8, Relation::Eq));
    rows.push(row("a_norm_s3_witness_f", "fourier", "‖f‖_{A(S3)} = 2√2 for f̂=(0,1,1,0,1,−1)", 2.0 * std::f64::consts::SQRT_2, a_norm(&fs, &ts)?, 1e-8, Relation::Eq));
    rows.push(row("a_norm_z6_e1", "fourier", "‖f‖_{A(Z6)} = 1 for f̂=e₁", 1.0, a_norm(&gz, &tz)?, 1e-8, Relation::Eq));
    rows.push(row("a_norm_s3_e1", "fourier", "‖f‖_{A(S3)} = √2 for f̂=e₁", std::f64::consts::SQRT_2, a_norm(&gs, &ts)?, 1e-8, Relation::Eq));
    let mut disc = closed_form_discrepancy(&witness_f, &ts)?;
    for k in 0..6 {
        let mut fh = vec![ZERO; 6];
        for (j, v) in fh.iter_mut().enumerate() {
            *v = C64::from_polar(1.0 + j as f64, (k * j) as f64 * 0.7);
        }
        disc = disc.max(closed_form_discrepancy(&fh, &ts)?);
    }
    rows.push(row("s3_pi_f_singular_values", "fourier", "closed-form pi(f) has the singular values of the computed 2-dim block", 0.0, disc, 1e-10, Relation::Eq));

    let phi_bij = GroupBijection::new(s3.clone(), z6.clone(), (0..6).collect())?;
    let phi = InducedHom::new(phi_bij, tz_own.clone(), ts_own.clone())?;
    let rep = hom_norm_report(&phi, &[], effort, seed)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    rows.push(row("phi_norm", "homspace", "‖Φ‖ = √2 for Φ: A(Z6) → A(S3)", sqrt2, rep.norm_t, 1e-4, Relation::Eq));
    rows.push(row("phi_inverse_norm", "homspace", "‖Φ⁻¹‖ = √2", sqrt2, rep.norm_tinv, 1e-4, Relation::Eq));
    rows.push(row("phi_distortion", "homspace", "distortion of Φ is 2", 2.0, rep.distortion, 2e-4, Relation::Eq));

    let z4 = make_cyclic(4)?;
    let v4 = parse_group("Z2xZ2")?;
    let opts = SearchOptions { effort: *effort, seed, ..Default::default() };
    let z4v4 = min_distortion(&z4, &v4, &opts)?;
    let z4v4_min = z4v4.min_distortion.as_ref().map_or(f64::NAN, |m| m.value);
    let z4v4_sqrt2 = z4v4
        .records
        .iter()
        .map(|r| r.norm_t)
        .min_by(|a, b| (a - sqrt2).abs().total_cmp(&(b - sqrt2).abs()))
        .unwrap_or(f64::NAN);
    rows.push(row("z4_v4_min_distortion", "search", "min distortion over canonical bijections Z4 ↔ Z2×Z2 is 2", 2.0, z4v4_min, 1e-3, Relation::Eq));
    rows.push(row("z4_v4_norm_sqrt2", "search", "some bijection Z4 ↔ Z2×Z2 induces T with ‖T‖ = √2", sqrt2, z4v4_sqrt2, 1e-4, Relation::Eq));
    let eps = epsilon_zero_bound(&[(z4, v4)], &opts)?;
    rows.push(row("epsilon_zero_bound", "search", "ε₀ ≤ 1", 1.0, eps.bound, 1e-3, Relation::Le));

    let all_pass = rows.iter().all(|r| r.pass);
    Ok(ReproReport { rows, all_pass })
}
