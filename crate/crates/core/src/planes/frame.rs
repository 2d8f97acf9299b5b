use super::gram_schmidt;
use crate::exterior::Vec8;
use crate::report::VerificationReport;
use crate::rng::{gaussian_vec8, trial_rng};
use crate::spin7forms::{canonical_tau, psi_f64};
use crate::{Error, Result};

pub const LEMMA_TOLERANCE: f64 = 1e-9;

/// An orthonormal L-quadruple `(u, v, w, z)` with its four triple products.
#[derive(Clone, Debug, PartialEq)]
pub struct LFrame {
    pub u: Vec8,
    pub v: Vec8,
    pub w: Vec8,
    pub z: Vec8,
    pub r_uvw: Vec8,
    pub r_uvz: Vec8,
    pub r_uwz: Vec8,
    pub r_vwz: Vec8,
}

impl LFrame {
    /// Computes the r-fields of an arbitrary quadruple without checking
    /// orthonormality or the L condition. Used to build fixtures.
    pub fn from_quadruple_unchecked(u: Vec8, v: Vec8, w: Vec8, z: Vec8) -> Self {
        let psi = psi_f64();
        LFrame {
            r_uvw: canonical_tau(psi, &u, &v, &w),
            r_uvz: canonical_tau(psi, &u, &v, &z),
            r_uwz: canonical_tau(psi, &u, &w, &z),
            r_vwz: canonical_tau(psi, &v, &w, &z),
            u,
            v,
            w,
            z,
        }
    }

    pub fn tangent(&self) -> [Vec8; 4] {
        [self.u.clone(), self.v.clone(), self.w.clone(), self.z.clone()]
    }

    pub fn normals(&self) -> [Vec8; 4] {
        [self.r_uvw.clone(), self.r_uvz.clone(), self.r_uwz.clone(), self.r_vwz.clone()]
    }

    /// `{u, v, w, z, R_uvw, R_uvz, R_uwz, R_vwz}`.
    pub fn vectors(&self) -> [Vec8; 8] {
        let [a, b, c, d] = self.tangent();
        let [e, f, g, h] = self.normals();
        [a, b, c, d, e, f, g, h]
    }
}

/// How to pick the fourth tangent vector.
#[derive(Clone, Debug)]
pub enum ZChoice {
    Given(Vec8),
    Seed(u64),
}

/// Completes an orthonormalized `(u, v, w)` to an L-frame.
///
/// `z` lies in the orthogonal complement of `span{u, v, w, τ(u, v, w)}`,
/// which forces `Ψ(u, v, w, z) = ⟨τ(u, v, w), z⟩ = 0`.
pub fn build_l_frame(u: &Vec8, v: &Vec8, w: &Vec8, z: ZChoice) -> Result<LFrame> {
    let base = gram_schmidt(&[u.clone(), v.clone(), w.clone()]).ok_or(Error::Degenerate(0.0))?;
    let (u, v, w) = (base[0].clone(), base[1].clone(), base[2].clone());
    let r = canonical_tau(psi_f64(), &u, &v, &w);
    let span = [u.clone(), v.clone(), w.clone(), r.clone()];
    let project = |x: &Vec8| span.iter().fold(x.clone(), |acc, q| acc.axpy(-q.dot(&acc), q));

    let z = match z {
        ZChoice::Given(z) => {
            let n = z.norm();
            if !(n > 0.0) {
                return Err(Error::Degenerate(n));
            }
            let along = r.dot(&z) / n;
            if along.abs() > 1e-9 {
                return Err(Error::NotLPlane(along));
            }
            let p = project(&z);
            p.normalized().filter(|_| p.norm() > 1e-8 * n).ok_or(Error::Degenerate(p.norm()))?
        }
        ZChoice::Seed(seed) => {
            let mut rng = trial_rng(seed, 0);
            loop {
                let p = project(&project(&gaussian_vec8(&mut rng)));
                if p.norm() > 1e-6 {
                    break p.normalized().expect("nonzero");
                }
            }
        }
    };
    Ok(LFrame::from_quadruple_unchecked(u, v, w, z))
}

/// A random L-frame: Gaussian `(u, v, w)` and a seeded `z`.
pub fn random_l_frame(seed: u64, index: u64) -> LFrame {
    let mut rng = trial_rng(seed, index);
    loop {
        let (u, v, w) = (gaussian_vec8(&mut rng), gaussian_vec8(&mut rng), gaussian_vec8(&mut rng));
        let z_seed = crate::rng::trial_seed(seed ^ 0x5a5a, index);
        if let Ok(frame) = build_l_frame(&u, &v, &w, ZChoice::Seed(z_seed)) {
            return frame;
        }
    }
}

/// Checks the three frame properties:
/// (a) the r-quadruple spans an L-plane, (b) it is orthogonal to
/// `span{u, v, w, z}`, (c) all eight vectors are orthonormal.
pub fn verify_lemma(frame: &LFrame) -> VerificationReport {
    let mut report = VerificationReport::new("l-frame-lemma");
    report.trials = 1;
    let psi = psi_f64();

    let a = psi.eval(&frame.normals()).expect("degree 4");
    let b = frame
        .tangent()
        .iter()
        .flat_map(|t| frame.normals().into_iter().map(move |n| t.dot(&n).abs()))
        .fold(0.0, f64::max);
    let all = frame.vectors();
    let mut c = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            let target = if i == j { 1.0 } else { 0.0 };
            c = c.max((all[i].dot(&all[j]) - target).abs());
        }
    }
    report.check("(a) Psi(R_uvw, R_uvz, R_uwz, R_vwz)", a, LEMMA_TOLERANCE);
    report.check("(b) max |<tangent, normal>|", b, LEMMA_TOLERANCE);
    report.check("(c) max |Gram - I|", c, LEMMA_TOLERANCE);
    report.metric("lemma_a", a.abs());
    report.metric("lemma_b", b);
    report.metric("lemma_c", c);
    report.metric("psi_uvwz", psi.eval(&frame.tangent()).expect("degree 4"));
    report.residual = crate::report::Residual::from_samples(&[a, b, c]);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vec8 {
        Vec8::basis(i)
    }

    #[test]
    fn coordinate_frame() {
        let f = build_l_frame(&e(1), &e(2), &e(5), ZChoice::Given(e(7))).unwrap();
        assert_eq!(f.r_uvw, e(6));
        assert_eq!(f.r_uvz, e(8).scale(&-1.0));
        assert_eq!(f.r_uwz, e(3));
        assert_eq!(f.r_vwz, e(4));
        assert_eq!(psi_f64().eval(&f.tangent()).unwrap(), 0.0);
        let r = verify_lemma(&f);
        assert!(r.passed());
        assert_eq!(r.metrics["lemma_a"], 0.0);
        assert_eq!(r.metrics["lemma_b"], 0.0);
        assert_eq!(r.metrics["lemma_c"], 0.0);
    }

    #[test]
    fn z_along_tau_is_rejected() {
        let err = build_l_frame(&e(1), &e(2), &e(3), ZChoice::Given(e(4))).unwrap_err();
        assert!(matches!(err, Error::NotLPlane(_)));
    }

    #[test]
    fn random_frames_satisfy_l_condition() {
        for i in 0..200 {
            let f = random_l_frame(17, i);
            assert!(psi_f64().eval(&f.tangent()).unwrap().abs() <= 1e-10);
            // <r_uvw, z> = Ψ(u, v, w, z)
            assert!(f.r_uvw.dot(&f.z).abs() <= 1e-10);
            assert!(verify_lemma(&f).passed());
        }
    }

    #[test]
    fn perturbed_frame_fails_orthogonality_check() {
        let f = random_l_frame(3, 0);
        let z = f.z.axpy(1e-3, &f.r_uvw).normalized().unwrap();
        let bad = LFrame::from_quadruple_unchecked(f.u.clone(), f.v.clone(), f.w.clone(), z);
        let r = verify_lemma(&bad);
        assert!(!r.passed());
        let b = r.metrics["lemma_b"];
        assert!(b > 1e-4 && b < 1e-2, "residual {b}");
    }
}
