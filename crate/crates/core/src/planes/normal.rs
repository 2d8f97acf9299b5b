//! The pointwise map `V ↦ (i_V Ψ)|_L` from normal vectors to 3-forms on a
//! 4-plane, in a chosen normal frame.

use serde::{Deserialize, Serialize};

use super::{gram_schmidt, Plane};
use crate::exterior::Vec8;
use crate::spin7forms::psi_f64;
use crate::{Error, Result};

/// Increasing tangent triples, in the row order used by [`Matrix4`]:
/// `(123), (124), (134), (234)` in 1-based tangent labels.
pub const TANGENT_TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub fn identity() -> Self {
        Matrix4(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })))
    }

    pub fn det(&self) -> f64 {
        crate::exterior::determinant(self.0.iter().map(|r| r.to_vec()).collect())
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix4> {
        let mut a = self.0;
        let mut inv = Matrix4::identity().0;
        for col in 0..4 {
            let pivot = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
            if a[pivot][col].abs() < 1e-300 {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for j in 0..4 {
                a[col][j] /= p;
                inv[col][j] /= p;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    for j in 0..4 {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
        Some(Matrix4(inv))
    }

    pub fn mul(&self, other: &Matrix4) -> Matrix4 {
        Matrix4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum())
        }))
    }

    pub fn apply(&self, x: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| (0..4).map(|k| self.0[i][k] * x[k]).sum())
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        (0..16).map(|k| (self.0[k / 4][k % 4] - other.0[k / 4][k % 4]).abs()).fold(0.0, f64::max)
    }
}

/// `M[t][j] = Ψ(n_j, x_a, x_b, x_c)` for tangent triple `t = (a, b, c)`;
/// no orthogonality checks.
pub fn triple_matrix(tangent: &[Vec8; 4], normals: &[Vec8; 4]) -> Matrix4 {
    let psi = psi_f64();
    Matrix4(std::array::from_fn(|t| {
        let [a, b, c] = TANGENT_TRIPLES[t];
        std::array::from_fn(|j| {
            psi.eval(&[normals[j].clone(), tangent[a].clone(), tangent[b].clone(), tangent[c].clone()])
                .expect("degree 4")
        })
    }))
}

/// The matrix of `V ↦ (i_V Ψ)|_p` from coordinates in `normal_frame` to
/// 3-form components on the plane's orthonormal rows.
pub fn normal_to_3form_matrix(plane: &Plane, normal_frame: &[Vec8; 4]) -> Result<Matrix4> {
    if plane.dim() != 4 {
        return Err(Error::Arity { degree: 4, given: plane.dim() });
    }
    let mut ortho = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((normal_frame[i].dot(&normal_frame[j]) - target).abs());
        }
    }
    if ortho > 1e-9 {
        return Err(Error::NotOrthonormal(ortho));
    }
    let leak = normal_frame
        .iter()
        .flat_map(|n| plane.rows().iter().map(move |t| t.dot(n).abs()))
        .fold(0.0, f64::max);
    if leak > 1e-9 {
        return Err(Error::NotNormal(leak));
    }
    let rows = plane.rows();
    let tangent = [rows[0].clone(), rows[1].clone(), rows[2].clone(), rows[3].clone()];
    Ok(triple_matrix(&tangent, normal_frame))
}

/// Orthonormal basis of the orthogonal complement of a plane, by
/// Gram–Schmidt against the standard basis.
pub fn complement_basis(plane: &Plane) -> Vec<Vec8> {
    let mut basis: Vec<Vec8> = plane.rows().to_vec();
    for i in 1..=8 {
        if basis.len() == 8 {
            break;
        }
        let mut candidate = basis.clone();
        candidate.push(Vec8::basis(i));
        let Some(q) = gram_schmidt(&candidate) else { continue };
        let last = q.last().expect("nonempty").clone();
        // reject nearly dependent directions
        let residual = basis.iter().fold(Vec8::basis(i), |acc, b| acc.axpy(-b.dot(&acc), b));
        if residual.norm() > 1e-6 {
            basis.push(last);
        }
    }
    basis.split_off(plane.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planes::random_l_frame;

    fn e(i: usize) -> Vec8 {
        Vec8::basis(i)
    }

    #[test]
    fn coordinate_l_plane_gives_signed_permutation() {
        let p = Plane::new(vec![e(1), e(2), e(5), e(7)]).unwrap();
        let m = normal_to_3form_matrix(&p, &[e(3), e(4), e(6), e(8)]).unwrap();
        assert_eq!(m.det().abs(), 1.0);
        for row in m.0 {
            assert_eq!(row.iter().filter(|x| **x != 0.0).count(), 1);
        }
        // Ψ(e3, e1, e5, e7) = -Ψ(e1, e3, e5, e7)
        assert_eq!(m.0[2][0], -1.0);
    }

    #[test]
    fn rejects_non_normal_frames() {
        let p = Plane::new(vec![e(1), e(2), e(5), e(7)]).unwrap();
        assert!(matches!(normal_to_3form_matrix(&p, &[e(1), e(4), e(6), e(8)]), Err(Error::NotNormal(_))));
        let skew = e(3).axpy(1.0, &e(4));
        assert!(matches!(
            normal_to_3form_matrix(&p, &[skew, e(4), e(6), e(8)]),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn det_invariant_under_normal_frame_rotation() {
        let f = random_l_frame(6, 0);
        let p = Plane::new(f.tangent().to_vec()).unwrap();
        let n = f.normals();
        let d0 = normal_to_3form_matrix(&p, &n).unwrap().det();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rotated = [n[0].scale(&c).axpy(s, &n[1]), n[1].scale(&c).axpy(-s, &n[0]), n[2].clone(), n[3].clone()];
        let d1 = normal_to_3form_matrix(&p, &rotated).unwrap().det();
        assert!((d0.abs() - d1.abs()).abs() < 1e-12);
        let comp = complement_basis(&p);
        let comp: [Vec8; 4] = std::array::from_fn(|i| comp[i].clone());
        let d2 = normal_to_3form_matrix(&p, &comp).unwrap().det();
        assert!((d0.abs() - d2.abs()).abs() < 1e-10);
    }

    #[test]
    fn inverse_round_trip() {
        let f = random_l_frame(8, 3);
        let p = Plane::new(f.tangent().to_vec()).unwrap();
        let m = normal_to_3form_matrix(&p, &f.normals()).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).max_abs_diff(&Matrix4::identity()) < 1e-12);
    }
}
