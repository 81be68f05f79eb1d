//! Dense linear algebra helpers for the small matrices that occur here
//! (g x g with g <= 3, and 2g x 2g homology work).

use num_complex::Complex64;

use crate::{Error, Result};

pub type CMat = Vec<Vec<Complex64>>;

pub fn czero(n: usize, m: usize) -> CMat {
    vec![vec![Complex64::new(0.0, 0.0); m]; n]
}

pub fn cident(n: usize) -> CMat {
    let mut a = czero(n, n);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    a
}

pub fn cmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = czero(n, m);
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

pub fn cmat_vec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn ctranspose(a: &CMat) -> CMat {
    let n = a.len();
    let m = a[0].len();
    let mut out = czero(m, n);
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn cadd(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn cscale(a: &CMat, s: Complex64) -> CMat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn csub(a: &CMat, b: &CMat) -> CMat {
    cadd(a, &cscale(b, Complex64::new(-1.0, 0.0)))
}

pub fn cmax_abs(a: &CMat) -> f64 {
    a.iter()
        .flat_map(|r| r.iter().map(|x| x.norm()))
        .fold(0.0, f64::max)
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn cinvert(a: &CMat, what: &'static str) -> Result<CMat> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.iter().map(|r| r.clone()).collect();
    let mut inv = cident(n);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[piv][col].norm() < 1e-300 {
            return Err(Error::SingularMatrix(what));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                let mj = m[col][j];
                let ij = inv[col][j];
                m[r][j] -= f * mj;
                inv[r][j] -= f * ij;
            }
        }
    }
    Ok(inv)
}

pub fn cdet(a: &CMat) -> Complex64 {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        let d = m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / d;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[col][j];
                m[r][j] -= f * v;
            }
        }
    }
    det
}

/// Max-norm of `A - A^T`.
pub fn symmetry_residual(a: &CMat) -> f64 {
    cmax_abs(&csub(a, &ctranspose(a)))
}

/// Smallest eigenvalue of a small real symmetric matrix via Jacobi
/// rotations; the input is the real part of a (nearly real) matrix.
pub fn min_eig_sym_real(a: &CMat) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|c| c.re).collect())
        .collect();
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[i][j].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * m[p][q]).atan2(m[q][q] - m[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}
