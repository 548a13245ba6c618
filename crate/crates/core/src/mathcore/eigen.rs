use num_complex::Complex64;

use super::matrix::{dot, norm, ComplexMatrix};
use super::MathError;

const HERMITIAN_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 10_000;

/// Dominant eigenpair of a Hermitian positive semidefinite matrix by power
/// iteration.
///
/// Iterates until `‖Av − λv‖ ≤ 1e-8·λ` with λ the Rayleigh quotient. The
/// returned vector has unit norm and its largest-magnitude entry (first one on
/// ties) is real and positive.
pub fn principal_eigenvector(a: &ComplexMatrix) -> Result<(Vec<Complex64>, f64), MathError> {
    if !a.is_square() {
        return Err(MathError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_hermitian(HERMITIAN_TOL) {
        return Err(MathError::NotHermitian);
    }
    let n = a.rows();
    if n == 0 {
        return Err(MathError::InvalidArgument("empty matrix".into()));
    }

    // Start from the largest column: it lies in the range of A, so it cannot be
    // orthogonal to the dominant eigenvector unless A is zero.
    let start = (0..n)
        .map(|c| (c, norm(&a.column(c))))
        .max_by(|x, y| x.1.total_cmp(&y.1).then(y.0.cmp(&x.0)))
        .expect("n > 0");
    if start.1 == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[0] = Complex64::new(1.0, 0.0);
        return Ok((v, 0.0));
    }
    let mut v: Vec<Complex64> = a.column(start.0).iter().map(|x| x / start.1).collect();

    for _ in 0..MAX_ITERATIONS {
        let av = a.mul_vec(&v)?;
        let lambda = dot(&v, &av).re;
        let residual = av
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - x * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= RESIDUAL_TOL * lambda.abs() {
            let v = fix_phase(v);
            let lambda = dot(&v, &a.mul_vec(&v)?).re.max(0.0);
            return Ok((v, lambda));
        }
        let len = norm(&av);
        v = av.into_iter().map(|x| x / len).collect();
    }
    Err(MathError::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() > 0.0 {
        let rot = pivot.conj() / pivot.norm();
        for x in &mut v {
            *x *= rot;
        }
        v[best] = Complex64::new(v[best].norm(), 0.0);
    }
    v
}
