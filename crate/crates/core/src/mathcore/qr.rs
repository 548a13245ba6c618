//! Householder QR and the zero-forcing left pseudo-inverse built on it.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::MathError;

/// Largest admissible `max|r_kk| / min|r_kk|` before a matrix is treated as
/// rank deficient.
pub const MAX_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Thin QR factorization `A = Q₁R` of a tall matrix (`rows ≥ cols`).
#[derive(Clone, Debug)]
pub struct QrFactorization {
    rows: usize,
    cols: usize,
    /// Unit Householder vectors; reflector `k` acts on entries `k..rows`.
    reflectors: Vec<Vec<Complex64>>,
    /// Upper-triangular `R`, column-major `cols × cols`.
    r: Vec<Complex64>,
}

impl QrFactorization {
    pub fn new(a: &ComplexMatrix) -> Result<Self, MathError> {
        let (m, n) = (a.rows(), a.cols());
        if m < n || n == 0 {
            return Err(MathError::DimensionMismatch {
                expected: (n.max(1), n),
                found: (m, n),
            });
        }
        if !a.is_finite() {
            return Err(MathError::InvalidArgument("matrix has non-finite entries".into()));
        }
        // Column-major working copy keeps reflector application contiguous.
        let mut work = vec![ZERO; m * n];
        for r in 0..m {
            for (c, &x) in a.row(r).iter().enumerate() {
                work[c * m + r] = x;
            }
        }

        let mut reflectors = Vec::with_capacity(n);
        let mut r = vec![ZERO; n * n];
        for k in 0..n {
            let (done, rest) = work.split_at_mut((k + 1) * m);
            let x = &done[k * m + k..(k + 1) * m];
            let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * xnorm;
            let mut v = x.to_vec();
            v[0] -= alpha;
            let vnorm = v.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                for t in &mut v {
                    *t /= vnorm;
                }
                for col in rest.chunks_exact_mut(m) {
                    let seg = &mut col[k..];
                    let s: Complex64 = v.iter().zip(seg.iter()).map(|(a, b)| a.conj() * b).sum();
                    let s = s * 2.0;
                    for (t, &vi) in seg.iter_mut().zip(&v) {
                        *t -= s * vi;
                    }
                }
            }
            r[k * n + k] = if xnorm > 0.0 { alpha } else { ZERO };
            for (j, col) in rest.chunks_exact(m).enumerate() {
                r[(k + 1 + j) * n + k] = col[k];
            }
            reflectors.push(v);
        }

        let qr = Self {
            rows: m,
            cols: n,
            reflectors,
            r,
        };
        let cond = qr.condition_estimate();
        if !(cond <= MAX_CONDITION) {
            return Err(MathError::RankDeficient { condition: cond });
        }
        Ok(qr)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `max|r_kk| / min|r_kk|`; infinite when some pivot vanishes.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.cols;
        let diag: Vec<f64> = (0..n).map(|k| self.r[k * n + k].norm()).collect();
        let max = diag.iter().copied().fold(0.0, f64::max);
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Applies `Qᴴ` in place to a vector of length `rows`.
    pub fn apply_qh(&self, y: &mut [Complex64]) {
        assert_eq!(y.len(), self.rows);
        for (k, v) in self.reflectors.iter().enumerate() {
            let seg = &mut y[k..];
            let s: Complex64 = v.iter().zip(seg.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * 2.0;
            for (t, &vi) in seg.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }

    /// Solves `R x = b` in place.
    pub fn back_substitute(&self, b: &mut [Complex64]) {
        let n = self.cols;
        assert_eq!(b.len(), n);
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= self.r[j * n + i] * b[j];
            }
            b[i] = acc / self.r[i * n + i];
        }
    }

    /// Least-squares solution `R⁻¹Q₁ᴴy`, i.e. `A⁺y`.
    pub fn solve(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut w = y.to_vec();
        self.apply_qh(&mut w);
        w.truncate(self.cols);
        self.back_substitute(&mut w);
        w
    }

    /// `R⁻¹` as a row-major `cols × cols` upper-triangular matrix.
    pub fn r_inverse(&self) -> ComplexMatrix {
        let n = self.cols;
        let mut inv = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            // Column j of R⁻¹ solves R x = e_j and vanishes below row j.
            let mut x = vec![ZERO; j + 1];
            x[j] = Complex64::new(1.0, 0.0) / self.r[j * n + j];
            for i in (0..j).rev() {
                let mut acc = ZERO;
                for k in i + 1..=j {
                    acc -= self.r[k * n + i] * x[k];
                }
                x[i] = acc / self.r[i * n + i];
            }
            for (i, v) in x.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    /// Explicit `A⁺ = R⁻¹Q₁ᴴ` (`cols × rows`).
    pub fn pseudo_inverse(&self) -> ComplexMatrix {
        let (m, n) = (self.rows, self.cols);
        let mut u = ComplexMatrix::zeros(n, m);
        let mut e = vec![ZERO; m];
        for i in 0..m {
            e.iter_mut().for_each(|t| *t = ZERO);
            e[i] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            for (r, v) in col.into_iter().enumerate() {
                u[(r, i)] = v;
            }
        }
        u
    }
}

/// Zero-forcing equalizer `U = (VᴴV)⁻¹Vᴴ`, kept in factored form.
#[derive(Clone, Debug)]
pub struct ZeroForcing {
    qr: QrFactorization,
    /// `[UUᴴ]_ll`: squared row norms of `R⁻¹`.
    gains: Vec<f64>,
}

impl ZeroForcing {
    pub fn new(v: &ComplexMatrix) -> Result<Self, MathError> {
        let qr = QrFactorization::new(v)?;
        let rinv = qr.r_inverse();
        let gains = (0..rinv.rows())
            .map(|l| rinv.row(l).iter().map(|x| x.norm_sqr()).sum())
            .collect();
        Ok(Self { qr, gains })
    }

    /// `U·y`
    pub fn equalize(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.qr.solve(y)
    }

    /// Diagonal of `UUᴴ`, one entry per column of `V`.
    pub fn noise_gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.qr.pseudo_inverse()
    }

    pub fn inputs(&self) -> usize {
        self.qr.rows()
    }

    pub fn outputs(&self) -> usize {
        self.qr.cols()
    }
}

/// Left pseudo-inverse `U` of a full-column-rank `V`, so that `U·V = I`.
///
/// Computed from a Householder QR of `V` rather than by inverting `VᴴV`.
pub fn left_pseudo_inverse(v: &ComplexMatrix) -> Result<ComplexMatrix, MathError> {
    Ok(QrFactorization::new(v)?.pseudo_inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RandomStream;
    use proptest::prelude::*;

    fn random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut s = RandomStream::new(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| s.complex_gaussian(1.0))
    }

    #[test]
    fn identity_and_scalar() {
        let u = left_pseudo_inverse(&ComplexMatrix::identity(4)).unwrap();
        assert!(u.identity_defect() < 1e-15);
        let two = ComplexMatrix::identity(4).scale(Complex64::new(2.0, 0.0));
        let u = left_pseudo_inverse(&two).unwrap();
        assert!(u.sub(&ComplexMatrix::identity(4).scale(Complex64::new(0.5, 0.0))).max_abs() < 1e-15);
    }

    #[test]
    fn tall_random() {
        let v = random(16, 8, 1);
        let u = left_pseudo_inverse(&v).unwrap();
        assert_eq!((u.rows(), u.cols()), (8, 16));
        assert!((&u * &v).identity_defect() <= 1e-9);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let mut v = random(6, 3, 2);
        for r in 0..6 {
            v[(r, 2)] = v[(r, 0)] * 3.0;
        }
        assert!(matches!(left_pseudo_inverse(&v), Err(MathError::RankDeficient { .. })));
        assert!(left_pseudo_inverse(&ComplexMatrix::zeros(3, 3)).is_err());
        assert!(left_pseudo_inverse(&random(2, 3, 3)).is_err());
    }

    #[test]
    fn factored_and_explicit_agree() {
        let v = random(12, 9, 4);
        let zf = ZeroForcing::new(&v).unwrap();
        let u = zf.matrix();
        let y: Vec<Complex64> = random(12, 1, 5).column(0);
        let a = zf.equalize(&y);
        let b = u.mul_vec(&y).unwrap();
        for (x, z) in a.iter().zip(&b) {
            assert!((x - z).norm() < 1e-12);
        }
        let uuh = &u * &u.adjoint();
        for (l, g) in zf.noise_gains().iter().enumerate() {
            assert!((uuh[(l, l)].re - g).abs() < 1e-10 * g);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn left_inverse_property(cols in 1usize..12, extra in 0usize..8, seed in any::<u64>()) {
            let v = random(cols + extra, cols, seed);
            let u = left_pseudo_inverse(&v).unwrap();
            prop_assert!((&u * &v).identity_defect() <= 1e-9);
        }
    }
}
