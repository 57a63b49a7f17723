//! Fourier transform on a finite group, the norms of `A(G)` and `VN(G)`, and
//! Schatten norms of small matrices.
//!
//! Conventions: for `f: G → ℂ` the Fourier block at an irrep `π` is
//! `F_π = Σ_g f(g) π(g)*`, and
//!
//! ```text
//! ‖f‖_A = Σ_π (d_π / |G|) ‖F_π‖₁,     f(g) = (1/|G|) Σ_π d_π tr(π(g) F_π).
//! ```
//!
//! An element `x = Σ_g c_g λ_g` of the group von Neumann algebra has blocks
//! `X_π = Σ_g c_g π(g)` and `‖x‖_VN = max_π ‖X_π‖_∞`. The pairing
//! `⟨x, f⟩ = Σ_g c_g f(g)` makes `A(G)` the predual of `VN(G)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, CMat, C64, ZERO};
use crate::repr::IrrepTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SchattenP {
    One,
    Two,
    Infinity,
}

pub fn schatten_norm(x: &CMat, p: SchattenP) -> Result<f64> {
    if !linalg::is_finite(x) {
        return Err(Error::NumericInput);
    }
    Ok(match p {
        SchattenP::One => linalg::trace_norm(x),
        SchattenP::Two => linalg::frobenius_norm(x),
        SchattenP::Infinity => linalg::spectral_norm(x),
    })
}

/// A function on a finite group, i.e. an element of `A(G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AFunction {
    #[serde(skip)]
    group: FiniteGroup,
    pub values: Vec<C64>,
}

impl AFunction {
    pub fn new(group: &FiniteGroup, values: Vec<C64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericInput);
        }
        Ok(Self { group: group.clone(), values })
    }

    /// Point mass at element `g`.
    pub fn delta(group: &FiniteGroup, g: usize) -> Self {
        let mut values = vec![ZERO; group.order()];
        values[g] = C64::new(1.0, 0.0);
        Self { group: group.clone(), values }
    }

    /// `f(k) = Σ_j a_j e^{2πi jk/n}`, with `k` the element index.
    ///
    /// On a cyclic group these are the coefficients of the character
    /// expansion; on any other group of the same order it transports that
    /// function by element index.
    pub fn from_cyclic_expansion(group: &FiniteGroup, coeffs: &[C64]) -> Result<Self> {
        let n = group.order();
        if coeffs.len() != n {
            return Err(Error::ShapeMismatch(format!("{} coefficients for order {n}", coeffs.len())));
        }
        let values = (0..n)
            .map(|k| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * C64::from_polar(1.0, std::f64::consts::TAU * (j * k % n) as f64 / n as f64))
                    .sum()
            })
            .collect();
        Self::new(group, values)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn pointwise_mul(&self, other: &AFunction) -> Result<AFunction> {
        same_group(&self.group, &other.group)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { group: self.group.clone(), values })
    }

    /// `(g·f)(x) = f(g⁻¹x)`.
    pub fn left_translate(&self, g: usize) -> AFunction {
        let gi = self.group.inv(g);
        let values = (0..self.group.order()).map(|x| self.values[self.group.mul(gi, x)]).collect();
        Self { group: self.group.clone(), values }
    }

    /// `f ∘ t` for a map `t` from another group's elements into this group.
    pub fn compose(&self, target: &FiniteGroup, t: &[usize]) -> AFunction {
        Self { group: target.clone(), values: t.iter().map(|&g| self.values[g]).collect() }
    }
}

/// `x = Σ_g c_g λ_g` in the group von Neumann algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAlgebraElement {
    #[serde(skip)]
    group: FiniteGroup,
    pub coeffs: Vec<C64>,
}

impl GroupAlgebraElement {
    pub fn new(group: &FiniteGroup, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        Ok(Self { group: group.clone(), coeffs })
    }

    pub fn basis(group: &FiniteGroup, g: usize) -> Self {
        let mut coeffs = vec![ZERO; group.order()];
        coeffs[g] = C64::new(1.0, 0.0);
        Self { group: group.clone(), coeffs }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Product in `VN(G)`: `λ_a λ_b = λ_{ab}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let n = self.group.order();
        let mut coeffs = vec![ZERO; n];
        for a in 0..n {
            if self.coeffs[a] == ZERO {
                continue;
            }
            for b in 0..n {
                coeffs[self.group.mul(a, b)] += self.coeffs[a] * other.coeffs[b];
            }
        }
        Ok(Self { group: self.group.clone(), coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lincomb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lincomb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn lincomb(&self, alpha: C64, other: &Self, beta: C64) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Self { group: self.group.clone(), coeffs })
    }

    /// `⟨x, f⟩ = Σ_g c_g f(g)`.
    pub fn pair(&self, f: &AFunction) -> Result<C64> {
        same_group(&self.group, &f.group)?;
        Ok(self.coeffs.iter().zip(&f.values).map(|(c, v)| c * v).sum())
    }
}

#[derive(Debug, Clone)]
pub struct FourierBlocks {
    pub table: IrrepTable,
    pub blocks: Vec<CMat>,
}

fn same_group(a: &FiniteGroup, b: &FiniteGroup) -> Result<()> {
    if a.table() != b.table() {
        return Err(Error::GroupMismatch(format!("{} vs {}", a.label(), b.label())));
    }
    Ok(())
}

pub fn fourier_transform(f: &AFunction, t: &IrrepTable) -> Result<FourierBlocks> {
    same_group(&f.group, t.group())?;
    let blocks = t
        .irreps()
        .iter()
        .map(|p| {
            let d = p.dimension;
            let mut acc = CMat::zeros(d, d);
            for (v, m) in f.values.iter().zip(&p.matrices) {
                acc += m.adjoint() * *v;
            }
            acc
        })
        .collect();
    Ok(FourierBlocks { table: t.clone(), blocks })
}

pub fn fourier_inverse(b: &FourierBlocks) -> Result<AFunction> {
    let t = &b.table;
    if b.blocks.len() != t.irreps().len()
        || b.blocks.iter().zip(t.irreps()).any(|(m, p)| m.shape() != (p.dimension, p.dimension))
    {
        return Err(Error::ShapeMismatch("Fourier blocks do not match irrep dimensions".into()));
    }
    let n = t.group().order();
    let values = (0..n)
        .map(|g| {
            t.irreps()
                .iter()
                .zip(&b.blocks)
                .map(|(p, fb)| (&p.matrices[g] * fb).trace() * p.dimension as f64)
                .sum::<C64>()
                / n as f64
        })
        .collect();
    AFunction::new(t.group(), values)
}

/// Per-irrep contributions `(d_π/|G|) ‖F_π‖₁` to the Fourier-algebra norm.
pub fn a_norm_contributions(f: &AFunction, t: &IrrepTable) -> Result<Vec<f64>> {
    let fb = fourier_transform(f, t)?;
    let n = t.group().order() as f64;
    t.irreps()
        .iter()
        .zip(&fb.blocks)
        .map(|(p, b)| Ok(p.dimension as f64 / n * schatten_norm(b, SchattenP::One)?))
        .collect()
}

pub fn a_norm(f: &AFunction, t: &IrrepTable) -> Result<f64> {
    Ok(a_norm_contributions(f, t)?.iter().sum())
}

/// Blocks `X_π = Σ_g c_g π(g)`.
pub fn vn_blocks(x: &GroupAlgebraElement, t: &IrrepTable) -> Result<Vec<CMat>> {
    same_group(&x.group, t.group())?;
    Ok(t.irreps()
        .iter()
        .map(|p| {
            let d = p.dimension;
            let mut acc = CMat::zeros(d, d);
            for (c, m) in x.coeffs.iter().zip(&p.matrices) {
                if *c != ZERO {
                    acc += m * *c;
                }
            }
            acc
        })
        .collect())
}

pub fn vn_norm(x: &GroupAlgebraElement, t: &IrrepTable) -> Result<f64> {
    Ok(vn_blocks(x, t)?.iter().map(linalg::spectral_norm).fold(0.0, f64::max))
}

/// Inverse of [`vn_blocks`]: `c_g = (1/|G|) Σ_π d_π tr(π(g)* X_π)`.
pub fn element_from_vn_blocks(blocks: &[CMat], t: &IrrepTable) -> Result<GroupAlgebraElement> {
    if blocks.len() != t.irreps().len() {
        return Err(Error::ShapeMismatch("block count does not match irreps".into()));
    }
    let n = t.group().order();
    let coeffs = (0..n)
        .map(|g| {
            t.irreps()
                .iter()
                .zip(blocks)
                .map(|(p, x)| (p.matrices[g].adjoint() * x).trace() * p.dimension as f64)
                .sum::<C64>()
                / n as f64
        })
        .collect();
    GroupAlgebraElement::new(t.group(), coeffs)
}

#[derive(Debug, Clone)]
pub struct DualAscent {
    /// `|⟨x, f⟩|` at the final iterate.
    pub value: f64,
    pub witness: GroupAlgebraElement,
    /// Objective value after each iteration.
    pub trace: Vec<f64>,
}

/// Maximizes `Re ⟨x, f⟩` over the unit ball of `VN(G)` by projected gradient
/// ascent on the Fourier blocks, with singular-value clipping as projection.
pub fn dual_norm_ascent(
    f: &AFunction,
    t: &IrrepTable,
    iterations: usize,
    step: f64,
    seed: u64,
) -> Result<DualAscent> {
    let fb = fourier_transform(f, t)?;
    let n = t.group().order() as f64;
    let grads: Vec<CMat> = t
        .irreps()
        .iter()
        .zip(&fb.blocks)
        .map(|(p, b)| b.adjoint() * C64::new(p.dimension as f64 / n, 0.0))
        .collect();
    let objective = |xs: &[CMat]| -> f64 {
        xs.iter().zip(&grads).map(|(x, g)| (g.adjoint() * x).trace().re).sum()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<CMat> = t
        .irreps()
        .iter()
        .map(|p| linalg::clip_to_unit_ball(&linalg::gaussian(p.dimension, p.dimension, &mut rng).scale(0.1)))
        .collect();
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        xs = xs.iter().zip(&grads).map(|(x, g)| linalg::clip_to_unit_ball(&(x + g * C64::new(step, 0.0)))).collect();
        trace.push(objective(&xs));
    }
    let witness = element_from_vn_blocks(&xs, t)?;
    let value = witness.pair(f)?.norm();
    Ok(DualAscent { value, witness, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_cyclic, make_symmetric};
    use crate::repr::irreps_of;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schatten_examples() {
        let i2 = linalg::identity(2);
        assert!((schatten_norm(&i2, SchattenP::One).unwrap() - 2.0).abs() < 1e-14);
        assert!((schatten_norm(&i2, SchattenP::Two).unwrap() - SQRT_2).abs() < 1e-14);
        assert!((schatten_norm(&i2, SchattenP::Infinity).unwrap() - 1.0).abs() < 1e-14);
        // 2π(f) for f̂ = e₁
        let x = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, C64::from_polar(1.0, -PI / 3.0), ZERO]);
        assert!((schatten_norm(&x, SchattenP::One).unwrap() - SQRT_2).abs() < 1e-12);
        let bad = CMat::from_element(1, 1, c(f64::NAN, 0.0));
        assert_eq!(schatten_norm(&bad, SchattenP::One), Err(Error::NumericInput));
    }

    #[test]
    fn delta_has_identity_blocks_and_unit_norm() {
        let s3 = make_symmetric(3).unwrap();
        let t = irreps_of(&s3, 0).unwrap();
        let d = AFunction::delta(&s3, 0);
        let fb = fourier_transform(&d, &t).unwrap();
        for (b, p) in fb.blocks.iter().zip(t.irreps()) {
            assert!(linalg::max_abs_diff(b, &linalg::identity(p.dimension)) < 1e-12);
        }
        assert!((a_norm(&d, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z6_character_transform() {
        let z6 = make_cyclic(6).unwrap();
        let t = irreps_of(&z6, 0).unwrap();
        let chi1 = AFunction::new(&z6, (0..6).map(|k| C64::from_polar(1.0, PI * k as f64 / 3.0)).collect()).unwrap();
        let fb = fourier_transform(&chi1, &t).unwrap();
        // exactly one block equals 6, namely the irrep whose character is χ₁
        let mut hits = 0;
        for (b, p) in fb.blocks.iter().zip(t.irreps()) {
            let is_chi1 = (p.matrices[1][(0, 0)] - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-9;
            let expect = if is_chi1 { 6.0 } else { 0.0 };
            assert!((b[(0, 0)] - c(expect, 0.0)).norm() < 1e-9);
            hits += usize::from(is_chi1);
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn a_norm_witnesses() {
        let z6 = make_cyclic(6).unwrap();
        let s3 = make_symmetric(3).unwrap();
        let tz = irreps_of(&z6, 0).unwrap();
        let ts = irreps_of(&s3, 0).unwrap();
        let a: Vec<C64> = [0.0, 1.0, 1.0, 0.0, 1.0, -1.0].iter().map(|&x| c(x, 0.0)).collect();
        let fz = AFunction::from_cyclic_expansion(&z6, &a).unwrap();
        let fs = AFunction::new(&s3, fz.values.clone()).unwrap();
        assert!((a_norm(&fz, &tz).unwrap() - 4.0).abs() < 1e-8);
        assert!((a_norm(&fs, &ts).unwrap() - 2.0 * SQRT_2).abs() < 1e-8);
        let mut e1 = vec![ZERO; 6];
        e1[1] = c(1.0, 0.0);
        let gz = AFunction::from_cyclic_expansion(&z6, &e1).unwrap();
        let gs = AFunction::new(&s3, gz.values.clone()).unwrap();
        assert!((a_norm(&gz, &tz).unwrap() - 1.0).abs() < 1e-8);
        assert!((a_norm(&gs, &ts).unwrap() - SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn round_trip_and_vn_examples() {
        let s3 = make_symmetric(3).unwrap();
        let t = irreps_of(&s3, 0).unwrap();
        let d = AFunction::delta(&s3, 0);
        let back = fourier_inverse(&fourier_transform(&d, &t).unwrap()).unwrap();
        for (a, b) in back.values.iter().zip(&d.values) {
            assert!((a - b).norm() < 1e-12);
        }
        for g in 0..6 {
            let x = GroupAlgebraElement::basis(&s3, g);
            assert!((vn_norm(&x, &t).unwrap() - 1.0).abs() < 1e-12);
        }
        let bad = FourierBlocks { table: t.clone(), blocks: vec![CMat::zeros(1, 1); 3] };
        assert!(matches!(fourier_inverse(&bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn four_term_on_z6_by_scalar_sums() {
        let z6 = make_cyclic(6).unwrap();
        let t = irreps_of(&z6, 0).unwrap();
        let mut coeffs = vec![ZERO; 6];
        coeffs[0] += 1.0;
        coeffs[1] += 1.0;
        coeffs[2] -= 1.0;
        coeffs[3] -= 1.0;
        let x = GroupAlgebraElement::new(&z6, coeffs).unwrap();
        // oracle: max over j of |1 + w^j − w^{2j} − w^{3j}|, w = e^{iπ/3}
        let oracle = (0..6)
            .map(|j| {
                let w = |k: usize| C64::from_polar(1.0, PI * (j * k) as f64 / 3.0);
                (w(0) + w(1) - w(2) - w(3)).norm()
            })
            .fold(0.0, f64::max);
        let v = vn_norm(&x, &t).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!(v >= 2.0);
    }

    #[test]
    fn group_mismatch_is_reported() {
        let z6 = make_cyclic(6).unwrap();
        let t = irreps_of(&make_symmetric(3).unwrap(), 0).unwrap();
        let f = AFunction::delta(&z6, 0);
        assert!(matches!(a_norm(&f, &t), Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn dual_ascent_reaches_norm() {
        let s3 = make_symmetric(3).unwrap();
        let t = irreps_of(&s3, 0).unwrap();
        let f = AFunction::new(&s3, (0..6).map(|k| c(k as f64 - 2.0, 0.5 * k as f64)).collect()).unwrap();
        let res = dual_norm_ascent(&f, &t, 200, 0.5, 1).unwrap();
        let target = a_norm(&f, &t).unwrap();
        assert!(vn_norm(&res.witness, &t).unwrap() <= 1.0 + 1e-9);
        assert!((res.value - target).abs() < 1e-6, "{} vs {target}", res.value);
        assert!(res.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
