//! Irreducible unitary representations of finite groups.
//!
//! A random Hermitian matrix is averaged over conjugation by the left regular
//! representation. The result lies in the commutant of `λ`, and for a generic
//! draw each of its eigenspaces is an irreducible invariant subspace. The
//! restriction of `λ` to one eigenspace per character class gives a complete
//! set of pairwise-inequivalent irreps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, CMat, C64, ONE, ZERO};
use crate::seeds::derive_seed;

/// Tolerance for representation invariants after re-unitarization.
pub const TAU_REP: f64 = 1e-8;
/// Relative gap below which commutant eigenvalues are merged.
pub const CLUSTER_TOL: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub dimension: usize,
    /// One unitary `d×d` matrix per group element, in group index order.
    pub matrices: Vec<CMat>,
}

impl Irrep {
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepTable {
    group: FiniteGroup,
    irreps: Vec<Irrep>,
}

/// Left regular representation, `(λ_g)_{gh, h} = 1`.
pub fn regular_representation(g: &FiniteGroup) -> Vec<CMat> {
    let n = g.order();
    (0..n)
        .map(|a| {
            let mut m = CMat::zeros(n, n);
            for h in 0..n {
                m[(g.mul(a, h), h)] = ONE;
            }
            m
        })
        .collect()
}

/// Computes a complete, validated irrep table. Deterministic in `seed`.
pub fn irreps_of(g: &FiniteGroup, seed: u64) -> Result<IrrepTable> {
    let mut diagnostic = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        match attempt_split(g, &mut rng) {
            Ok(table) => return Ok(table),
            Err(msg) => diagnostic = msg,
        }
    }
    Err(Error::DegenerateSpectrum { attempts: MAX_ATTEMPTS, diagnostic })
}

fn attempt_split(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> std::result::Result<IrrepTable, String> {
    let n = g.order();
    let r = linalg::random_hermitian(n, rng);
    // X = (1/n) Σ_g λ_g R λ_g*, entrywise X[a,b] = (1/n) Σ_g R[g⁻¹a, g⁻¹b]
    let mut x = CMat::zeros(n, n);
    for el in 0..n {
        let gi = g.inv(el);
        for a in 0..n {
            let ga = g.mul(gi, a);
            for b in 0..n {
                x[(a, b)] += r[(ga, g.mul(gi, b))];
            }
        }
    }
    x.scale_mut(1.0 / n as f64);

    let eig = x.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let spread = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (pos, &idx) in order.iter().enumerate() {
        if pos > 0 {
            let gap = vals[pos] - vals[pos - 1];
            if gap > CLUSTER_TOL * spread {
                min_gap = min_gap.min(gap);
                clusters.push(Vec::new());
            }
        } else {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(idx);
    }

    let lambda_inv: Vec<usize> = g.inverses().to_vec();
    let mut reps: Vec<(Irrep, Vec<C64>, usize)> = Vec::new();
    for cluster in &clusters {
        let m = cluster.len();
        let v = CMat::from_fn(n, m, |row, col| eig.eigenvectors[(row, cluster[col])]);
        let vh = v.adjoint();
        let matrices: Vec<CMat> = (0..n)
            .map(|el| {
                // (λ_g V)[a, :] = V[g⁻¹a, :]
                let lv = CMat::from_fn(n, m, |a, c| v[(g.mul(lambda_inv[el], a), c)]);
                linalg::polar_unitary(&(&vh * lv))
            })
            .collect();
        let irrep = Irrep { dimension: m, matrices };
        let chi = irrep.character();
        let norm = chi.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        if (norm - 1.0).abs() > 1e-6 {
            return Err(format!(
                "eigenspace of dimension {m} is reducible (character norm {norm:.6}); \
                 smallest separated eigenvalue gap {min_gap:.3e}, {} clusters",
                clusters.len()
            ));
        }
        match reps.iter_mut().find(|(_, c, _)| chars_close(c, &chi, 1e-6)) {
            Some(entry) => entry.2 += 1,
            None => reps.push((irrep, chi, 1)),
        }
    }
    for (irrep, _, mult) in &reps {
        if *mult != irrep.dimension {
            return Err(format!(
                "irrep of dimension {} found with multiplicity {mult}",
                irrep.dimension
            ));
        }
    }
    let mut irreps: Vec<(Vec<(i64, i64)>, Irrep)> = reps
        .into_iter()
        .map(|(irrep, chi, _)| (rounded_key(&chi), irrep))
        .collect();
    irreps.sort_by(|a, b| (a.1.dimension, &a.0).cmp(&(b.1.dimension, &b.0)));
    let table = IrrepTable { group: g.clone(), irreps: irreps.into_iter().map(|p| p.1).collect() };
    table.validate(TAU_REP).map_err(|e| e.to_string())?;
    Ok(table)
}

fn chars_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

fn rounded_key(chi: &[C64]) -> Vec<(i64, i64)> {
    chi.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

#[derive(Serialize, Deserialize)]
struct IrrepJson {
    schema: u32,
    group: String,
    order: usize,
    dims: Vec<usize>,
    matrices: Vec<Vec<[f64; 2]>>,
}

impl IrrepTable {
    /// Wraps irreps without validation; see [`IrrepTable::validate`].
    pub fn from_parts(group: FiniteGroup, irreps: Vec<Irrep>) -> Self {
        Self { group, irreps }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|p| p.dimension).collect()
    }

    /// Checks homomorphism, unitarity, irreducibility, inequivalence and
    /// completeness to within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        let fail = |msg: String| Err(Error::InvalidGroup(msg));
        let mut sum_sq = 0;
        for (k, p) in self.irreps.iter().enumerate() {
            let d = p.dimension;
            sum_sq += d * d;
            if p.matrices.len() != n || p.matrices.iter().any(|m| m.shape() != (d, d)) {
                return fail(format!("irrep {k} has inconsistent shape"));
            }
            let id = linalg::identity(d);
            for a in 0..n {
                let ma = &p.matrices[a];
                if linalg::max_abs_diff(&(ma * ma.adjoint()), &id) > tol {
                    return fail(format!("irrep {k} is not unitary at element {a}"));
                }
                for b in 0..n {
                    let prod = ma * &p.matrices[b];
                    if linalg::max_abs_diff(&prod, &p.matrices[g.mul(a, b)]) > tol {
                        return fail(format!("irrep {k} is not a homomorphism at ({a}, {b})"));
                    }
                }
            }
        }
        if sum_sq != n {
            return fail(format!("sum of squared dimensions {sum_sq} != {n}"));
        }
        let chars: Vec<Vec<C64>> = self.irreps.iter().map(Irrep::character).collect();
        for (i, ci) in chars.iter().enumerate() {
            for (j, cj) in chars.iter().enumerate() {
                let ip: C64 = ci.iter().zip(cj).map(|(a, b)| a * b.conj()).sum::<C64>() / n as f64;
                let expect = if i == j { ONE } else { ZERO };
                if (ip - expect).norm() > tol {
                    return fail(format!("character inner product <{i},{j}> = {ip}"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = IrrepJson {
            schema: 1,
            group: self.group.label().to_string(),
            order: self.group.order(),
            dims: self.dims(),
            matrices: self
                .irreps
                .iter()
                .map(|p| {
                    p.matrices
                        .iter()
                        .flat_map(|m| {
                            // row-major
                            (0..m.nrows())
                                .flat_map(move |r| (0..m.ncols()).map(move |c| [m[(r, c)].re, m[(r, c)].im]))
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("irrep serialization is infallible")
    }

    /// Reads the `irreps` export format back against a known group.
    pub fn from_json(group: &FiniteGroup, s: &str) -> Result<Self> {
        let doc: IrrepJson = serde_json::from_str(s)?;
        let n = group.order();
        if doc.order != n || doc.dims.len() != doc.matrices.len() {
            return Err(Error::ShapeMismatch("irrep JSON does not match group".into()));
        }
        let mut irreps = Vec::new();
        for (&d, flat) in doc.dims.iter().zip(&doc.matrices) {
            if flat.len() != n * d * d {
                return Err(Error::ShapeMismatch(format!("expected {} entries", n * d * d)));
            }
            let matrices = (0..n)
                .map(|el| CMat::from_fn(d, d, |r, c| {
                    let [re, im] = flat[el * d * d + r * d + c];
                    C64::new(re, im)
                }))
                .collect();
            irreps.push(Irrep { dimension: d, matrices });
        }
        let table = Self { group: group.clone(), irreps };
        table.validate(1e-6)?;
        Ok(table)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterTable {
    /// Conjugacy classes, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// `values[π][c]` = character of irrep `π` on class `c`.
    pub values: Vec<Vec<C64>>,
}

pub fn character_table(t: &IrrepTable) -> CharacterTable {
    let classes = t.group.conjugacy_classes();
    let values = t
        .irreps
        .iter()
        .map(|p| classes.iter().map(|c| p.matrices[c[0]].trace()).collect())
        .collect();
    CharacterTable { classes, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_cyclic, make_symmetric, parse_group};

    #[test]
    fn regular_rep_examples() {
        let z2 = make_cyclic(2).unwrap();
        let l = regular_representation(&z2);
        assert_eq!(l[0], linalg::identity(2));
        assert_eq!(l[1], CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let s3 = make_symmetric(3).unwrap();
        let l = regular_representation(&s3);
        for g in 0..6 {
            assert_eq!(&l[g] * &l[s3.inv(g)], linalg::identity(6));
        }
    }

    #[test]
    fn z6_characters_are_roots_of_unity() {
        let z6 = make_cyclic(6).unwrap();
        let t = irreps_of(&z6, 0).unwrap();
        assert_eq!(t.dims(), vec![1; 6]);
        // each character is k ↦ e^{iπjk/3} for a distinct j
        let mut js: Vec<usize> = t
            .irreps()
            .iter()
            .map(|p| {
                (0..6)
                    .find(|&j| {
                        (0..6).all(|k| {
                            let w = C64::from_polar(1.0, std::f64::consts::PI * (j * k) as f64 / 3.0);
                            (p.matrices[k][(0, 0)] - w).norm() < 1e-9
                        })
                    })
                    .expect("character is not of the form e^{iπjk/3}")
            })
            .collect();
        js.sort_unstable();
        assert_eq!(js, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn s3_dims() {
        let t = irreps_of(&make_symmetric(3).unwrap(), 11).unwrap();
        assert_eq!(t.dims(), vec![1, 1, 2]);
    }

    #[test]
    fn klein_characters_are_signs() {
        let t = irreps_of(&parse_group("Z2xZ2").unwrap(), 5).unwrap();
        assert_eq!(t.dims(), vec![1; 4]);
        // brute force: every ±1 assignment that is a homomorphism
        let g = t.group().clone();
        let mut homs = Vec::new();
        for mask in 0..16u32 {
            let chi: Vec<f64> = (0..4).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let ok = (0..4).all(|a| (0..4).all(|b| chi[g.mul(a, b)] == chi[a] * chi[b]));
            if ok {
                homs.push(chi);
            }
        }
        assert_eq!(homs.len(), 4);
        for p in t.irreps() {
            let chi: Vec<f64> = p.character().iter().map(|z| z.re).collect();
            assert!(p.character().iter().all(|z| z.im.abs() < 1e-9));
            assert!(homs.iter().any(|h| h.iter().zip(&chi).all(|(a, b)| (a - b).abs() < 1e-9)));
        }
    }

    #[test]
    fn character_table_examples() {
        let t1 = irreps_of(&make_cyclic(1).unwrap(), 0).unwrap();
        let ct = character_table(&t1);
        assert_eq!(ct.values.len(), 1);
        assert!((ct.values[0][0] - ONE).norm() < 1e-12);

        let t2 = irreps_of(&make_cyclic(2).unwrap(), 0).unwrap();
        let mut rows: Vec<Vec<i64>> = character_table(&t2)
            .values
            .iter()
            .map(|r| r.iter().map(|z| z.re.round() as i64).collect())
            .collect();
        rows.sort();
        assert_eq!(rows, vec![vec![1, -1], vec![1, 1]]);

        let t3 = irreps_of(&make_symmetric(3).unwrap(), 0).unwrap();
        let ct = character_table(&t3);
        assert_eq!(ct.values.len(), 3);
        let degrees: Vec<f64> = ct.values.iter().map(|r| r[0].re).collect();
        assert_eq!(degrees.iter().map(|d| d.round() as usize).collect::<Vec<_>>(), vec![1, 1, 2]);
    }

    #[test]
    fn json_round_trip() {
        let s3 = make_symmetric(3).unwrap();
        let t = irreps_of(&s3, 3).unwrap();
        let back = IrrepTable::from_json(&s3, &t.to_json()).unwrap();
        assert_eq!(back.dims(), t.dims());
        for (a, b) in back.irreps().iter().zip(t.irreps()) {
            for (x, y) in a.matrices.iter().zip(&b.matrices) {
                assert!(linalg::max_abs_diff(x, y) == 0.0);
            }
        }
    }

    #[test]
    fn validation_catches_corruption() {
        let s3 = make_symmetric(3).unwrap();
        let t = irreps_of(&s3, 3).unwrap();
        let mut irreps = t.irreps().to_vec();
        irreps[2].matrices[1][(0, 0)] += C64::new(0.1, 0.0);
        assert!(IrrepTable::from_parts(s3, irreps).validate(TAU_REP).is_err());
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let d4 = parse_group("D4").unwrap();
        assert_eq!(irreps_of(&d4, 9).unwrap(), irreps_of(&d4, 9).unwrap());
    }
}
