//! Thin SVD by one-sided (Hestenes) Jacobi orthogonalization.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::eigh::PlaneRotation;
use super::CMatrix;
use crate::error::{Error, Result};
use crate::fmath;

const MAX_SWEEPS: usize = 100;

/// `A = U·diag(s)·Vᴴ` with `r = min(rows, cols)` columns in `U` and `V`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

fn column_dot(w: &CMatrix, p: usize, q: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..w.rows() {
        acc += w[(k, p)].conj() * w[(k, q)];
    }
    acc
}

fn column_norm_sqr(w: &CMatrix, p: usize) -> f64 {
    (0..w.rows()).map(|k| w[(k, p)].norm_sqr()).sum()
}

fn svd_tall(a: &CMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if a.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("SVD input has non-finite entries".into()));
    }
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);

    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = column_norm_sqr(&w, p);
                let beta = column_norm_sqr(&w, q);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = column_dot(&w, p, q);
                if gamma.norm() <= f64::EPSILON * fmath::sqrt(alpha * beta) {
                    continue;
                }
                if let Some(rot) = PlaneRotation::annihilating(alpha, beta, gamma) {
                    rot.apply_right(&mut w, p, q);
                    rot.apply_right(&mut v, p, q);
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi SVD did not converge for a {m}x{n} matrix after {MAX_SWEEPS} sweeps"
            )));
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| fmath::sqrt(column_norm_sqr(&w, j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = CMatrix::zeros(m, n);
    let mut v_sorted = CMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        singular_values.push(s);
        if s > 0.0 {
            let col: Vec<Complex64> = w.column(src).iter().map(|&z| z / s).collect();
            u.set_column(dst, &col);
        }
        v_sorted.set_column(dst, &v.column(src));
    }
    Ok(Svd {
        u,
        singular_values,
        v: v_sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_values_sorted() {
        let s = svd(&CMatrix::from_real_diag(&[3.0, -4.0, 0.5])).unwrap();
        assert_eq!(s.singular_values, vec![4.0, 3.0, 0.5]);
    }

    #[test]
    fn reconstructs_wide_matrix() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)],
            vec![c(-2.0, 0.0), c(1.0, 1.0), c(0.25, -0.75)],
        ])
        .unwrap();
        let s = svd(&a).unwrap();
        assert_eq!(s.u.rows(), 2);
        assert_eq!(s.v.rows(), 3);
        let sig = CMatrix::from_real_diag(&s.singular_values);
        let back = s.u.matmul(&sig).unwrap().matmul(&s.v.adjoint()).unwrap();
        assert!(back.sub(&a).unwrap().frobenius_norm() < 1e-13);
    }

    #[test]
    fn rank_deficient_has_zero_value() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 5.0).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
    }
}
