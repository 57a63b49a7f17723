//! Small dense complex matrix helpers built on nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return vec![m[(0, 0)].norm()];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 2 && m.ncols() == 2 {
        // σ₁² = λ_max([[p, q], [q̄, r]]) for mᴴm, free of cancellation near σ₁ = σ₂
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let p = a.norm_sqr() + c.norm_sqr();
        let r = b.norm_sqr() + d.norm_sqr();
        let q = a.conj() * b + c.conj() * d;
        let half = 0.5 * (p - r);
        return (0.5 * (p + r) + (half * half + q.norm_sqr()).sqrt()).sqrt();
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value with left/right singular vectors (`m v = σ u`).
pub fn top_singular_pair(m: &CMat) -> (f64, Vec<C64>, Vec<C64>) {
    if m.nrows() == 1 && m.ncols() == 1 {
        let z = m[(0, 0)];
        let r = z.norm();
        let phase = if r > 0.0 { z / r } else { ONE };
        return (r, vec![phase], vec![ONE]);
    }
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let (k, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    let left = u.column(k).iter().copied().collect();
    let right = vt.row(k).iter().map(|z| z.conj()).collect();
    (sigma, left, right)
}

/// Nearest point of the operator-norm unit ball (singular values clipped at 1).
pub fn clip_to_unit_ball(m: &CMat) -> CMat {
    if m.nrows() == 1 && m.ncols() == 1 {
        let z = m[(0, 0)];
        let r = z.norm();
        return if r > 1.0 { CMat::from_element(1, 1, z / r) } else { m.clone() };
    }
    let svd = m.clone().svd(true, true);
    if svd.singular_values.iter().all(|&s| s <= 1.0) {
        return m.clone();
    }
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut us = u;
    for (j, &s) in svd.singular_values.iter().enumerate() {
        let c = s.min(1.0);
        us.column_mut(j).scale_mut(c);
    }
    us * vt
}

/// Unitary factor of the polar decomposition, `U Vᴴ` from the SVD.
pub fn polar_unitary(m: &CMat) -> CMat {
    if m.nrows() == 1 && m.ncols() == 1 {
        let z = m[(0, 0)];
        let r = z.norm();
        return CMat::from_element(1, 1, if r > 0.0 { z / r } else { ONE });
    }
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = gaussian(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = gaussian(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        for z in q.column_mut(j).iter_mut() {
            *z *= ph;
        }
    }
    q
}

/// Max-abs entrywise distance.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Characteristic polynomial coefficients `det(zI − m)`, leading coefficient
/// first, via the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    let mut coeffs = vec![ONE];
    let mut mk = CMat::zeros(n, n);
    let id = identity(n);
    for k in 1..=n {
        mk = m * (&mk + &id * coeffs[k - 1]);
        let c = -mk.trace() / (k as f64);
        coeffs.push(c);
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1, 2, 3, 8] {
            let u = haar_unitary(d, &mut rng);
            assert!(max_abs_diff(&(&u * u.adjoint()), &identity(d)) < 1e-12);
        }
    }

    #[test]
    fn clip_and_polar() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = gaussian(4, 4, &mut rng).scale(3.0);
        let c = clip_to_unit_ball(&m);
        assert!(spectral_norm(&c) <= 1.0 + 1e-12);
        let p = polar_unitary(&m);
        assert!(max_abs_diff(&(&p * p.adjoint()), &identity(4)) < 1e-12);
        // Re tr(Pᴴ M) = ‖M‖₁
        let val = (p.adjoint() * &m).trace().re;
        assert!((val - trace_norm(&m)).abs() < 1e-10);
    }

    #[test]
    fn top_pair_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1, 2, 5] {
            let m = gaussian(d, d, &mut rng);
            let (s, u, v) = top_singular_pair(&m);
            let mv = &m * nalgebra::DVector::from_vec(v);
            for i in 0..d {
                assert!((mv[i] - u[i] * s).norm() < 1e-10);
            }
            assert!((s - spectral_norm(&m)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_2x2_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let m = gaussian(2, 2, &mut rng);
            assert!((spectral_norm(&m) - singular_values(&m)[0]).abs() < 1e-12);
        }
        assert!((spectral_norm(&identity(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, C64::new(2.0, 0.0)]));
        let p = char_poly(&m);
        let expect = [1.0, -3.0, 2.0];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-12);
        }
    }
}
