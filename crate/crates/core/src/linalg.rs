//! Dense complex linear algebra helpers shared by the superoperator code.
//!
//! Everything here works on `Array2<C64>`; LAPACK does the heavy lifting
//! (eigensolvers, SVD, inversion). The matrix exponential is a
//! scaling-and-squaring Padé implementation.

use ndarray::{s, Array1, Array2, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{AdiaError, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn eye(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            let mut blk = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            blk.zip_mut_with(b, |o, &bv| *o = aij * bv);
        }
    }
    out
}

pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Largest absolute entry.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn norm1(a: &Array2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn singular_values(a: &Array2<C64>) -> Result<Array1<f64>> {
    if a.is_empty() {
        return Ok(Array1::zeros(0));
    }
    let (_, s, _) = a.svd(false, false)?;
    Ok(s)
}

/// Spectral norm (largest singular value).
pub fn norm2(a: &Array2<C64>) -> f64 {
    if a.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    singular_values(a)
        .map(|s| s.iter().cloned().fold(0.0, f64::max))
        .unwrap_or(f64::NAN)
}

/// Schatten-1 norm (sum of singular values).
pub fn trace_norm(a: &Array2<C64>) -> f64 {
    if a.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    singular_values(a).map(|s| s.sum()).unwrap_or(f64::NAN)
}

pub fn hermitian_part(a: &Array2<C64>) -> Array2<C64> {
    (a + &dagger(a)).mapv(|z| z * 0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let h = hermitian_part(a);
    let mut f = Array2::<C64>::zeros(h.raw_dim().f());
    f.assign(&h);
    Ok(f.eigh(UPLO::Upper)?)
}

/// General eigen-decomposition: eigenvalues and right eigenvectors (columns).
pub fn eig(a: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(AdiaError::Linalg("non-finite matrix entry".into()));
    }
    Ok(a.eig()?)
}

pub fn eigvals(a: &Array2<C64>) -> Result<Array1<C64>> {
    Ok(eig(a)?.0)
}

pub fn inv(a: &Array2<C64>) -> Result<Array2<C64>> {
    Ok(a.inv()?)
}

/// Ratio of smallest to largest singular value; 0 for a singular matrix.
pub fn inverse_condition(a: &Array2<C64>) -> Result<f64> {
    let s = singular_values(a)?;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if max == 0.0 { 0.0 } else { min / max })
}

/// Orthonormal basis (columns) for the `k`-dimensional approximate null
/// space of `a`, i.e. the right singular vectors of the `k` smallest
/// singular values.
pub fn null_space(a: &Array2<C64>, k: usize) -> Result<Array2<C64>> {
    let n = a.ncols();
    let (_, _, vt) = a.svd(false, true)?;
    let vt = vt.ok_or_else(|| AdiaError::Linalg("SVD returned no right vectors".into()))?;
    // rows of vt are right singular vectors, ordered by decreasing singular value
    let rows = vt.slice(s![n - k.., ..]);
    Ok(dagger(&rows.to_owned()))
}

pub fn max_hermiticity_defect(a: &Array2<C64>) -> f64 {
    max_abs(&(a - &dagger(a)))
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

fn axpy_into(acc: &mut Array2<C64>, alpha: f64, x: &Array2<C64>) {
    acc.zip_mut_with(x, |a, &b| *a += b * alpha);
}

fn pade_low(a: &Array2<C64>, b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let a2 = a.dot(a);
    let mut u_inner = eye(n).mapv(|z| z * b[1]);
    let mut v = eye(n).mapv(|z| z * b[0]);
    let mut pow = a2.clone();
    let m = b.len() - 1;
    let mut k = 2;
    while k <= m {
        axpy_into(&mut v, b[k], &pow);
        if k + 1 <= m {
            axpy_into(&mut u_inner, b[k + 1], &pow);
        }
        k += 2;
        if k <= m {
            pow = pow.dot(&a2);
        }
    }
    (a.dot(&u_inner), v)
}

fn pade13(a: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let b = &PADE13;
    let n = a.nrows();
    let id = eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let mut t = a6.mapv(|z| z * b[13]);
    axpy_into(&mut t, b[11], &a4);
    axpy_into(&mut t, b[9], &a2);
    let mut u_inner = a6.dot(&t);
    axpy_into(&mut u_inner, b[7], &a6);
    axpy_into(&mut u_inner, b[5], &a4);
    axpy_into(&mut u_inner, b[3], &a2);
    axpy_into(&mut u_inner, b[1], &id);
    let mut t = a6.mapv(|z| z * b[12]);
    axpy_into(&mut t, b[10], &a4);
    axpy_into(&mut t, b[8], &a2);
    let mut v = a6.dot(&t);
    axpy_into(&mut v, b[6], &a6);
    axpy_into(&mut v, b[4], &a4);
    axpy_into(&mut v, b[2], &a2);
    axpy_into(&mut v, b[0], &id);
    (a.dot(&u_inner), v)
}

/// Matrix exponential by scaling and squaring with a degree-adaptive Padé
/// approximant (Higham 2005). Backward error is bounded by unit roundoff
/// for the selected degree.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    let nrm = norm1(a);
    for &(m, theta) in THETA.iter() {
        if nrm <= theta {
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(a, b);
            return pade_solve(&u, &v);
        }
    }
    let squarings = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));
    let (u, v) = pade13(&scaled);
    let mut r = pade_solve(&u, &v);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

fn pade_solve(u: &Array2<C64>, v: &Array2<C64>) -> Array2<C64> {
    let p = v + u;
    let q = v - u;
    let qi = q.inv().expect("Padé denominator is singular");
    qi.dot(&p)
}

/// Copy of a view as an owned matrix; small convenience for slicing code.
pub fn owned(a: ArrayView2<C64>) -> Array2<C64> {
    a.to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn expm_of_diagonal() {
        let a = array![[c(1.0), ZERO], [ZERO, c(-2.0)]];
        let e = expm(&a);
        assert!((e[[0, 0]].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[[1, 1]].re - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn expm_rotation_with_squaring() {
        // exp(-i t σx) = cos t − i sin t σx
        let t = 37.3;
        let a = array![[ZERO, -I * t], [-I * t, ZERO]];
        let e = expm(&a);
        assert!((e[[0, 0]] - c(t.cos())).norm() < 1e-12);
        assert!((e[[0, 1]] - (-I * t.sin())).norm() < 1e-12);
    }

    #[test]
    fn expm_nilpotent_all_degrees() {
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let a = array![[ZERO, c(scale)], [ZERO, ZERO]];
            let e = expm(&a);
            assert!((e[[0, 1]] - c(scale)).norm() < 1e-13 * scale.max(1.0));
            assert!((e[[0, 0]] - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn kron_matches_definition() {
        let a = array![[c(1.0), c(2.0)], [c(3.0), c(4.0)]];
        let b = array![[ZERO, ONE], [ONE, ZERO]];
        let k = kron(&a, &b);
        assert_eq!(k[[0, 1]], c(1.0));
        assert_eq!(k[[2, 1]], c(3.0));
        assert_eq!(k[[3, 2]], c(4.0));
        assert_eq!(k[[1, 2]], c(2.0));
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let a = array![[c(1.0), c(1.0)], [c(1.0), c(1.0)]];
        let ns = null_space(&a, 1).unwrap();
        let r = a.dot(&ns);
        assert!(max_abs(&r) < 1e-12);
    }

    #[test]
    fn eigh_vectors_of_complex_hermitian() {
        let a = array![[c(-0.4), C64::new(0.0, 0.3)], [C64::new(0.0, -0.3), c(0.5)]];
        let (w, v) = eigh(&a).unwrap();
        for k in 0..2 {
            let col = v.column(k).to_owned();
            let r = a.dot(&col) - col.mapv(|z| z * w[k]);
            assert!(r.iter().all(|z| z.norm() < 1e-12));
        }
    }
}
