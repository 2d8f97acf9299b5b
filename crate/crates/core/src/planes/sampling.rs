//! Samplers for special Lagrangian 4-planes in C^4 and lifted 3-planes of
//! R^7 with `φ| = 0`.

use num::complex::Complex64;

use super::{gram_schmidt, Plane};
use crate::exterior::{KForm, Vec8};
use crate::rng::{gaussian, gaussian_vec8, trial_rng};
use crate::{Error, Result};

/// Rotating the real 4-plane by `e^{iπ/8}` multiplies `Ω|` by `e^{iπ/2}`.
pub const SL_PHASE: f64 = std::f64::consts::PI / 8.0;

const HL3_ATTEMPTS: usize = 100;

/// The plane spanned by the columns of `e^{iπ/8}·U`, with
/// `z_j = x_{2j-1} + i x_{2j}`.
pub fn sl_plane_from_unitary(u: &[[Complex64; 4]; 4]) -> Result<Plane> {
    let phase = Complex64::from_polar(1.0, SL_PHASE);
    let rows = (0..4)
        .map(|col| {
            let mut x = [0.0; 8];
            for j in 0..4 {
                let z = phase * u[j][col];
                x[2 * j] = z.re;
                x[2 * j + 1] = z.im;
            }
            Vec8(x)
        })
        .collect();
    Plane::new(rows)
}

/// A random special Lagrangian plane of phase π/2: complex Gaussian
/// columns, complex Gram–Schmidt, then one column rescaled so `det U = 1`.
pub fn sample_sl_plane(seed: u64) -> Plane {
    let mut rng = trial_rng(seed, 0);
    loop {
        let mut cols: Vec<[Complex64; 4]> = Vec::with_capacity(4);
        let mut ok = true;
        for _ in 0..4 {
            let mut c: [Complex64; 4] =
                std::array::from_fn(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)));
            for _ in 0..2 {
                for q in &cols {
                    let proj: Complex64 = (0..4).map(|k| q[k].conj() * c[k]).sum();
                    for k in 0..4 {
                        c[k] -= proj * q[k];
                    }
                }
            }
            let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            cols.push(c.map(|z| z / n));
        }
        if !ok {
            continue;
        }
        let mut u: [[Complex64; 4]; 4] = std::array::from_fn(|j| std::array::from_fn(|col| cols[col][j]));
        let det = complex_det(&u);
        let fix = det.conj() / det.norm();
        for row in u.iter_mut() {
            row[0] *= fix;
        }
        if let Ok(p) = sl_plane_from_unitary(&u) {
            return p;
        }
    }
}

fn complex_det(m: &[[Complex64; 4]; 4]) -> Complex64 {
    let mut a = *m;
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..4 {
        let pivot = (col..4).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).expect("nonempty");
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for k in col..4 {
                let sub = f * a[col][k];
                a[r][k] -= sub;
            }
        }
    }
    det
}

/// Largest `|form(x_{i1}, …, x_{ik})|` over increasing row tuples of the
/// plane's orthonormal rows.
pub fn restricted_max(form: &KForm<f64>, plane: &Plane) -> f64 {
    let k = form.degree();
    let rows = plane.rows();
    if k > rows.len() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1 << rows.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let picked: Vec<Vec8> = (0..rows.len()).filter(|i| mask >> i & 1 == 1).map(|i| rows[i].clone()).collect();
        best = best.max(form.eval(&picked).expect("matching degree").abs());
    }
    best
}

fn in_r7(mut x: Vec8) -> Vec8 {
    x.0[7] = 0.0;
    x
}

/// A 3-plane of R^7 with `φ(p1, p2, p3) = 0` from Gaussian `p1, p2`.
pub fn sample_hl3_plane(phi: &KForm<f64>, seed: u64) -> Result<Plane> {
    let mut rng = trial_rng(seed, 0);
    for attempt in 0..HL3_ATTEMPTS {
        let (a, b) = (in_r7(gaussian_vec8(&mut rng)), in_r7(gaussian_vec8(&mut rng)));
        if gram_schmidt(&[a.clone(), b.clone()]).is_none() {
            continue;
        }
        match sample_hl3_plane_from(phi, &a, &b, crate::rng::trial_seed(seed, attempt as u64 + 1)) {
            Ok(p) => return Ok(p),
            Err(Error::SamplingExhausted(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(HL3_ATTEMPTS))
}

/// Completes the orthonormalized `p1, p2` with a unit `p3` orthogonal to
/// `p1`, `p2` and the dual of `φ(p1, p2, ·)`.
pub fn sample_hl3_plane_from(phi: &KForm<f64>, p1: &Vec8, p2: &Vec8, seed: u64) -> Result<Plane> {
    if phi.degree() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, found: phi.degree() });
    }
    if phi.terms().any(|(k, _)| k.contains(8)) || p1.0[7] != 0.0 || p2.0[7] != 0.0 {
        return Err(Error::NotSevenDimensional("inputs must avoid index 8".into()));
    }
    let base = gram_schmidt(&[p1.clone(), p2.clone()]).ok_or(Error::Degenerate(0.0))?;
    let contracted = phi.interior(&base[0])?.interior(&base[1])?;
    let dual = Vec8(std::array::from_fn(|i| contracted.coeff_of(&[i as u8 + 1])));
    let mut avoid = base.clone();
    if let Some(d) = dual.normalized() {
        let d = avoid.iter().fold(d, |acc, q| acc.axpy(-q.dot(&acc), q));
        if let Some(d) = d.normalized().filter(|_| d.norm() > 1e-9) {
            avoid.push(d);
        }
    }
    let mut rng = trial_rng(seed, 0);
    for _ in 0..HL3_ATTEMPTS {
        let x = in_r7(gaussian_vec8(&mut rng));
        let mut p = x.clone();
        for _ in 0..2 {
            p = avoid.iter().fold(p, |acc, q| acc.axpy(-q.dot(&acc), q));
        }
        if p.norm() > 1e-6 * x.norm() {
            let p3 = p.normalized().expect("nonzero");
            return Plane::new(vec![base[0].clone(), base[1].clone(), p3]);
        }
    }
    Err(Error::SamplingExhausted(HL3_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planes::{classify, classify_with, Label};
    use crate::spin7forms::{build_psi_from_cy, build_psi_from_g2, holomorphic_volume, kahler_form};

    fn identity() -> [[Complex64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)))
    }

    #[test]
    fn identity_unitary_gives_rotated_real_plane() {
        let p = sl_plane_from_unitary(&identity()).unwrap();
        let (c, s) = (SL_PHASE.cos(), SL_PHASE.sin());
        assert!((p.rows()[0].0[0] - c).abs() < 1e-15);
        assert!((p.rows()[0].0[1] - s).abs() < 1e-15);
        let (re, im) = holomorphic_volume();
        assert!(restricted_max(&kahler_form().to_float(), &p) < 1e-15);
        assert!(restricted_max(&re.to_float(), &p) < 1e-15);
        // Ω| = e^{iπ/2}: the imaginary part carries unit mass
        assert!((restricted_max(&im.to_float(), &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sl_samples_satisfy_construction_invariants() {
        let omega = kahler_form().to_float();
        let re = holomorphic_volume().0.to_float();
        let psi_cy = build_psi_from_cy(0, 0).0.to_float();
        for seed in 0..200 {
            let p = sample_sl_plane(seed);
            assert!(restricted_max(&omega, &p) <= 1e-12);
            assert!(restricted_max(&re, &p) <= 1e-12);
            assert!(restricted_max(&psi_cy, &p) <= 1e-12);
            assert_eq!(classify_with(&psi_cy, &p).unwrap().label, Label::L);
        }
    }

    #[test]
    fn complex_det_of_identity() {
        assert_eq!(complex_det(&identity()), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn hl3_samples_lift_to_l_planes() {
        let phi = build_psi_from_g2().phi.to_float();
        for seed in 0..200 {
            let p = sample_hl3_plane(&phi, seed).unwrap();
            assert_eq!(p.dim(), 3);
            assert!(phi.eval(p.rows()).unwrap().abs() <= 1e-12);
            let lifted = p.extended(&Vec8::basis(8)).unwrap();
            assert_eq!(classify(&lifted).unwrap().label, Label::L);
        }
    }

    #[test]
    fn p3_avoids_the_dual_direction() {
        let phi = build_psi_from_g2().phi.to_float();
        let (e1, e2) = (Vec8::basis(1), Vec8::basis(2));
        let dual = phi.interior(&e1).unwrap().interior(&e2).unwrap();
        let d = Vec8(std::array::from_fn(|i| dual.coeff_of(&[i as u8 + 1])));
        assert!(d.norm() > 0.5);
        for seed in 0..20 {
            let p = sample_hl3_plane_from(&phi, &e1, &e2, seed).unwrap();
            assert!(p.rows()[2].dot(&d).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_phi_with_index_eight() {
        let bad = KForm::term(&[1, 2, 8], 1.0).unwrap();
        assert!(sample_hl3_plane(&bad, 0).is_err());
    }
}
