//! Eigenvalues of small general complex matrices: Householder reduction to
//! Hessenberg form followed by single-shift QR with deflation.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::fmath;

/// Sized for the ESPRIT rotation matrix.
pub const MAX_GENERAL_DIM: usize = 64;

const ITERS_PER_EIGENVALUE: usize = 60;

fn to_hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm = fmath::sqrt(((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum());
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = fmath::sqrt(v.iter().map(Complex64::norm_sqr).sum());
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // left: rows k+1.., P = I − 2vvᴴ
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + t, j)];
            }
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * dot * 2.0;
            }
        }
        // right: columns k+1..
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + t)] * *vi;
            }
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5) * ((a - d) * 0.5) + b * c;
    let root = disc.sqrt();
    let e1 = half_tr + root;
    let e2 = half_tr - root;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit shifted QR step on the window `lo..=hi` of a Hessenberg matrix.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots: Vec<(Complex64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = fmath::hypot(x.norm(), y.norm());
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (x / r, y / r)
        };
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        let last = (k + 2).min(hi);
        for i in lo..=last {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -(a * s.conj()) + b * c.conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// All eigenvalues of a square complex matrix, in no particular order.
pub fn eig_general(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eig_general needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n > MAX_GENERAL_DIM {
        return Err(Error::Dimension(format!(
            "eig_general supports at most {MAX_GENERAL_DIM} rows, got {n}"
        )));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("eig_general input has non-finite entries".into()));
    }
    let mut h = m.clone();
    to_hessenberg(&mut h);

    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = ITERS_PER_EIGENVALUE * n;
    loop {
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::Numerical(format!(
                "shifted QR did not converge for a {n}x{n} matrix"
            )));
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift breaks rare cycles
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
        set.iter().any(|w| (w - z).norm() < tol)
    }

    #[test]
    fn diagonal() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 2.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]])
            .unwrap();
        let e = eig_general(&m).unwrap();
        assert!(contains(&e, c(0.0, 2.0), 1e-14) && contains(&e, c(3.0, 0.0), 1e-14));
    }

    #[test]
    fn swap_matrix() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = eig_general(&m).unwrap();
        assert!(contains(&e, c(1.0, 0.0), 1e-14) && contains(&e, c(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn rotation_matrix_complex_pair() {
        // real rotation by 0.3 rad has eigenvalues e^{±0.3i}
        let (s, co) = (fmath::sin(0.3), fmath::cos(0.3));
        let m = CMatrix::from_rows(&[vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]])
            .unwrap();
        let e = eig_general(&m).unwrap();
        assert!(contains(&e, c(co, s), 1e-13) && contains(&e, c(co, -s), 1e-13));
    }

    #[test]
    fn nilpotent_shift_gives_zeros() {
        let m = CMatrix::from_fn(4, 4, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let e = eig_general(&m).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn too_large_rejected() {
        assert!(eig_general(&CMatrix::identity(65)).is_err());
    }
}
