//! Floating singular values, used only to cross-check exact ranks.
//!
//! One-sided (Hestenes) Jacobi on complex matrices, generic over [`Real`]
//! so the same code runs in `f64` and in double-double precision.

use num_complex::Complex;

use crate::linalg::Matrix;
use crate::scalar::{Real, StarField};

/// Singular values of a complex `rows × cols` matrix given column-major.
pub fn singular_values<R: Real>(rows: usize, mut columns: Vec<Vec<Complex<R>>>) -> Vec<R> {
    let n = columns.len();
    let eps = R::epsilon();
    // columns below eps·‖M‖_F are numerically zero; rotating them only underflows
    let frobenius: R = columns.iter().flatten().fold(R::zero(), |acc, z| acc + z.norm_sqr());
    let negligible = eps * eps * frobenius;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (a, b) = (&columns[p], &columns[q]);
                    let mut alpha = R::zero();
                    let mut beta = R::zero();
                    let mut gamma = Complex::new(R::zero(), R::zero());
                    for i in 0..rows {
                        alpha = alpha + a[i].norm_sqr();
                        beta = beta + b[i].norm_sqr();
                        gamma = gamma + a[i].conj() * b[i];
                    }
                    (alpha, beta, gamma)
                };
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let g = gamma.norm_sqr().sqrt();
                if g == R::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate q's phase so that <a_p, a_q> is real and positive
                let phase = Complex::new(gamma.re / g, gamma.im / g);
                let two = R::one() + R::one();
                let zeta = (beta - alpha) / (two * g);
                let sign = if zeta < R::zero() { -R::one() } else { R::one() };
                let t = sign / (zeta.abs() + (R::one() + zeta * zeta).sqrt());
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = c * t;
                let cc = Complex::new(c, R::zero());
                let sc = Complex::new(s, R::zero());
                for i in 0..rows {
                    let ap = columns[p][i];
                    let bq = columns[q][i] * phase.conj();
                    columns[p][i] = cc * ap - sc * bq;
                    columns[q][i] = sc * ap + cc * bq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<R> =
        columns.iter().map(|col| col.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical nullity (number of columns minus numerical rank) of an exact
/// matrix embedded into `C` with scalar type `R`.
///
/// A singular value counts as zero when it is below `rel_tol · σ_max`.
pub fn numerical_nullity<F: StarField, R: Real>(m: &Matrix<F>, rel_tol: R) -> usize {
    let columns: Vec<Vec<Complex<R>>> =
        (0..m.cols()).map(|c| (0..m.rows()).map(|r| m.get(r, c).to_complex::<R>()).collect()).collect();
    let sv = singular_values(m.rows(), columns);
    let max = sv.first().copied().unwrap_or_else(R::zero);
    if max == R::zero() {
        return m.cols();
    }
    let rank = sv.iter().filter(|&&s| s > rel_tol * max).count();
    m.cols() - rank
}
