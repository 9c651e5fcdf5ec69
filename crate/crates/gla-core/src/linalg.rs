//! Dense Hermitian eigensolvers and linear solves, bound directly to the
//! system LAPACK (libopenblas).
//!
//! LAPACK is column-major. A row-major buffer of a real symmetric matrix can
//! be handed over as-is (Aᵀ = A); for a Hermitian complex matrix the same
//! reinterpretation yields conj(A), whose eigenvalues coincide with A's and
//! whose eigenvectors are the conjugates of A's, so we conjugate on
//! extraction. The divide-and-conquer drivers (`dsyevd`/`zheevd`) are used
//! throughout: they are 4–8× faster than the simple drivers at n ≈ 2000.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::too_many_arguments)]
#[link(name = "openblas")]
extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn zheevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        w: *mut f64,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn zgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut Complex64,
        ldb: *const i32,
        info: *mut i32,
    );
}

fn check_info(routine: &str, info: i32) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack(format!("{routine} returned info = {info}")))
    }
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Returns ascending eigenvalues and a matrix whose column `m` is the
/// eigenvector for eigenvalue `m`.
pub fn eigh_real(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("eigh_real: matrix not square".into()));
    }
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let mut buf: Vec<f64> = a.iter().copied().collect();
    let mut w = vec![0.0f64; n];
    let nn = n as i32;
    let (jobz, uplo) = (b'V', b'L');
    let mut info = 0i32;

    // workspace query
    let mut wkopt = 0.0f64;
    let mut iwkopt = 0i32;
    let m1 = -1i32;
    unsafe {
        dsyevd_(
            &jobz, &uplo, &nn, buf.as_mut_ptr(), &nn, w.as_mut_ptr(), &mut wkopt, &m1,
            &mut iwkopt, &m1, &mut info,
        );
    }
    check_info("dsyevd (query)", info)?;
    let lwork = wkopt as i32;
    let liwork = iwkopt;
    let mut work = vec![0.0f64; lwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    unsafe {
        dsyevd_(
            &jobz, &uplo, &nn, buf.as_mut_ptr(), &nn, w.as_mut_ptr(), work.as_mut_ptr(),
            &lwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    check_info("dsyevd", info)?;

    // LAPACK eigenvector m lives at buf[i + m*n]; expose it as column m.
    let vecs = Array2::from_shape_fn((n, n), |(i, m)| buf[i + m * n]);
    Ok((Array1::from_vec(w), vecs))
}

/// Eigendecomposition of a complex Hermitian matrix; columns are eigenvectors.
pub fn eigh_complex(a: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("eigh_complex: matrix not square".into()));
    }
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    // Row-major Hermitian buffer reinterpreted as column-major is conj(A).
    let mut buf: Vec<Complex64> = a.iter().copied().collect();
    let mut w = vec![0.0f64; n];
    let nn = n as i32;
    let (jobz, uplo) = (b'V', b'L');
    let mut info = 0i32;

    let mut wkopt = Complex64::new(0.0, 0.0);
    let mut rwkopt = 0.0f64;
    let mut iwkopt = 0i32;
    let m1 = -1i32;
    unsafe {
        zheevd_(
            &jobz, &uplo, &nn, buf.as_mut_ptr(), &nn, w.as_mut_ptr(), &mut wkopt, &m1,
            &mut rwkopt, &m1, &mut iwkopt, &m1, &mut info,
        );
    }
    check_info("zheevd (query)", info)?;
    let lwork = wkopt.re as i32;
    let lrwork = rwkopt as i32;
    let liwork = iwkopt;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    let mut rwork = vec![0.0f64; lrwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    unsafe {
        zheevd_(
            &jobz, &uplo, &nn, buf.as_mut_ptr(), &nn, w.as_mut_ptr(), work.as_mut_ptr(),
            &lwork, rwork.as_mut_ptr(), &lrwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    check_info("zheevd", info)?;

    // Eigenvectors of conj(A) → conjugate to recover eigenvectors of A.
    let vecs = Array2::from_shape_fn((n, n), |(i, m)| buf[i + m * n].conj());
    Ok((Array1::from_vec(w), vecs))
}

/// Dense inverse of a general complex matrix (LU via `zgesv`).
///
/// Only intended for oracle-sized problems (resolvent-identity checks); the
/// physics paths never invert large matrices.
pub fn invert_complex(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("invert_complex: matrix not square".into()));
    }
    let nn = n as i32;
    // Explicit column-major copy: zgesv solves for A itself, not a transpose.
    let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            buf[i + j * n] = a[[i, j]];
        }
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        b[i + i * n] = Complex64::new(1.0, 0.0);
    }
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgesv_(
            &nn, &nn, buf.as_mut_ptr(), &nn, ipiv.as_mut_ptr(), b.as_mut_ptr(), &nn, &mut info,
        );
    }
    check_info("zgesv", info)?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| b[i + j * n]))
}

/// Householder reflector completing a unit vector χ to an orthonormal basis.
///
/// `H_w = I − 2ww†` satisfies `H_w χ = β e₀` with |β| = 1, hence its columns
/// 1..n form an orthonormal basis of the orthogonal complement of χ and its
/// column 0 is β̄χ. Applying the reflector costs O(n) per vector, so the
/// χ-projected bath is assembled as a rank-2 update instead of a dense
/// basis-change product.
#[derive(Clone, Debug)]
pub struct Reflector {
    w: Array1<Complex64>,
    /// `H_w χ = beta e₀`.
    pub beta: Complex64,
}

impl Reflector {
    pub fn new(chi: &Array1<Complex64>) -> Result<Self> {
        let norm: f64 = chi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "Reflector: input not normalized (‖χ‖ = {norm})"
            )));
        }
        let c0 = chi[0];
        // β opposite in phase to χ₀ avoids cancellation in u = χ − βe₀.
        let beta = if c0.norm() > 0.0 { -c0 / c0.norm() } else { Complex64::new(1.0, 0.0) };
        let mut u = chi.clone();
        u[0] -= beta;
        let un: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if un < 1e-14 {
            return Err(Error::Internal("Reflector: degenerate construction".into()));
        }
        Ok(Reflector { w: u.mapv(|c| c / un), beta })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `H_w x` (involution: also the inverse).
    pub fn apply(&self, x: &Array1<Complex64>) -> Array1<Complex64> {
        let dot: Complex64 = self.w.iter().zip(x.iter()).map(|(w, x)| w.conj() * x).sum();
        let mut out = x.clone();
        for (o, w) in out.iter_mut().zip(self.w.iter()) {
            *o -= 2.0 * w * dot;
        }
        out
    }

    /// `H_w H H_w` as a rank-2 update of `h`.
    pub fn transform(&self, h: &Array2<Complex64>) -> Array2<Complex64> {
        let n = h.nrows();
        let hw = h.dot(&self.w); // H w
        let whw: Complex64 = self.w.iter().zip(hw.iter()).map(|(w, y)| w.conj() * y).sum();
        // For Hermitian H: w†H = (Hw)† elementwise.
        let mut out = h.clone();
        for i in 0..n {
            for j in 0..n {
                let wi = self.w[i];
                let wj = self.w[j].conj();
                out[[i, j]] = h[[i, j]] - 2.0 * wi * hw[j].conj() - 2.0 * hw[i] * wj
                    + 4.0 * wi * whw * wj;
            }
        }
        out
    }

    /// Lift a vector living on the complement (indices 1..n of the reflected
    /// basis) back to the original basis.
    pub fn lift(&self, reduced: &[Complex64]) -> Array1<Complex64> {
        let n = self.w.len();
        let mut emb = Array1::zeros(n);
        for (i, v) in reduced.iter().enumerate() {
            emb[i + 1] = *v;
        }
        self.apply(&emb)
    }
}

/// Gram–Schmidt orthonormalization of a small set of complex vectors,
/// keeping the input order. Vectors that become numerically null are dropped.
pub fn gram_schmidt(vectors: &[Array1<Complex64>]) -> Vec<Array1<Complex64>> {
    let mut basis: Vec<Array1<Complex64>> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for b in &basis {
            let proj: Complex64 = b.iter().zip(u.iter()).map(|(b, u)| b.conj() * u).sum();
            for (ui, bi) in u.iter_mut().zip(b.iter()) {
                *ui -= proj * bi;
            }
        }
        let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            basis.push(u.mapv(|c| c / norm));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn real_symmetric_small() {
        // chain(3): eigenvalues {-√2, 0, √2}
        let mut a = Array2::zeros((3, 3));
        a[[0, 1]] = -1.0;
        a[[1, 0]] = -1.0;
        a[[1, 2]] = -1.0;
        a[[2, 1]] = -1.0;
        let (w, v) = eigh_real(&a).unwrap();
        assert_abs_diff_eq!(w[0], -(2.0f64).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], (2.0f64).sqrt(), epsilon = 1e-12);
        // residual of each pair
        for m in 0..3 {
            let col = v.column(m);
            for i in 0..3 {
                let hv: f64 = (0..3).map(|j| a[[i, j]] * col[j]).sum();
                assert_abs_diff_eq!(hv, w[m] * col[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn complex_hermitian_small() {
        let i = Complex64::new(0.0, 1.0);
        let mut a = Array2::zeros((2, 2));
        a[[0, 1]] = 2.0 * i;
        a[[1, 0]] = -2.0 * i;
        let (w, v) = eigh_complex(&a).unwrap();
        assert_abs_diff_eq!(w[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 2.0, epsilon = 1e-12);
        for m in 0..2 {
            for r in 0..2 {
                let hv: Complex64 = (0..2).map(|c| a[[r, c]] * v[[c, m]]).sum();
                assert!((hv - w[m] * v[[r, m]]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let n = 7;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            Complex64::new((i as f64 - 0.3 * j as f64).sin(), (i * j) as f64 * 0.01)
                + if i == j { Complex64::new(4.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let inv = invert_complex(&a).unwrap();
        let prod = a.dot(&inv);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[[i, j]] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn reflector_completes_chi() {
        let n = 6;
        let mut chi = Array1::from_elem(n, Complex64::new(0.0, 0.0));
        chi[1] = Complex64::new(0.6, 0.0);
        chi[3] = Complex64::new(0.0, 0.8);
        let r = Reflector::new(&chi).unwrap();
        // H_w χ = β e₀
        let e0 = r.apply(&chi);
        assert!((e0[0] - r.beta).norm() < 1e-12);
        for i in 1..n {
            assert!(e0[i].norm() < 1e-12);
        }
        // lift of a complement unit vector is orthogonal to chi and normalized
        let mut red = vec![Complex64::new(0.0, 0.0); n - 1];
        red[2] = Complex64::new(1.0, 0.0);
        let lifted = r.lift(&red);
        let ov: Complex64 = chi.iter().zip(lifted.iter()).map(|(c, l)| c.conj() * l).sum();
        assert!(ov.norm() < 1e-12);
        let nrm: f64 = lifted.iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(nrm, 1.0, epsilon = 1e-12);
    }
}
