//! Regular representations and exact kernel projections.

use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::idempotents::center_valued_trace;
use crate::linalg::Matrix;
use crate::numeric::numerical_nullity;
use crate::scalar::{DoubleDouble, Field, StarField};

/// `ρ(A)` as a `(|G|·n) × (|G|·m)` matrix; row `(i, g)` is `i·|G| + g`
/// and the entry at `((i, g), (j, h))` is the coefficient of `A_ij` at `gh⁻¹`.
pub fn regular_representation<F: Field>(a: &GroupRingMatrix<F>) -> Matrix<F> {
    let group = a.group();
    let n = group.size();
    let mut rho = Matrix::zeros(a.rows() * n, a.cols() * n);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for (x, c) in a.get(i, j).terms() {
                // x = g h⁻¹, so g = x h
                for h in 0..n {
                    rho.set(i * n + group.mul(x, h), j * n + h, c.clone());
                }
            }
        }
    }
    rho
}

/// Exact nullity of `ρ(A)`.
pub fn nullity<F: Field>(a: &GroupRingMatrix<F>) -> usize {
    let rho = regular_representation(a);
    rho.cols() - rho.rank()
}

/// Nullity of `ρ(A)` from double-double singular values.
pub fn float_nullity<F: StarField>(a: &GroupRingMatrix<F>) -> usize {
    numerical_nullity(&regular_representation(a), DoubleDouble::from(1e-20))
}

/// Kernel projection together with its center-valued and canonical traces.
#[derive(Clone, Debug)]
pub struct KernelProjection<F = crate::cyclotomic::Cyclotomic> {
    pub projection: GroupRingMatrix<F>,
    pub dim_u: GroupRingElement<F>,
    pub canonical_trace: F,
    pub nullity: usize,
}

/// `pr_ker(A)` as an `m × m` matrix over `F[G]`.
///
/// With `V` an exact kernel basis of `ρ(A)`, the projection is
/// `V (V*V)⁻¹ V*`; only the columns at `(k, e)` are formed, since they
/// already hold every group-ring coefficient. The result is certified by
/// `P = P² = P*`, `AP = 0` and `|G|·tr(P) = nullity ρ(A)`, which together
/// force the range of `ρ(P)` to be exactly `ker ρ(A)`.
pub fn kernel_projection<F: StarField>(a: &GroupRingMatrix<F>) -> Result<KernelProjection<F>> {
    let group = a.group().clone();
    let n = group.size();
    let m = a.cols();
    let rho = regular_representation(a);
    let v = rho.nullspace();
    let d = v.cols();
    let projection = if d == 0 {
        GroupRingMatrix::zeros(&group, m, m)
    } else if d == rho.cols() {
        GroupRingMatrix::identity(&group, m)
    } else {
        let vt = v.adjoint();
        let gram = vt.mul(&v)?;
        let rhs = Matrix::from_fn(d, m, |r, k| v.get(k * n, r).conj());
        let y = gram.solve(&rhs)?;
        let cols = v.mul(&y)?;
        GroupRingMatrix::from_fn(&group, m, m, |j, k| {
            GroupRingElement::from_terms(&group, (0..n).map(|g| (g, cols.get(j * n + g, k).clone())))
        })
    };
    certify(a, &projection, d)?;
    let dim_u = center_valued_trace(&projection)?;
    let canonical_trace = projection.canonical_trace()?;
    Ok(KernelProjection { projection, dim_u, canonical_trace, nullity: d })
}

fn certify<F: StarField>(a: &GroupRingMatrix<F>, p: &GroupRingMatrix<F>, nullity: usize) -> Result<()> {
    if p.star() != *p {
        return Err(Error::Verification("kernel projection is not self-adjoint".into()));
    }
    if p.checked_mul(p)? != *p {
        return Err(Error::Verification("kernel projection is not idempotent".into()));
    }
    if !a.checked_mul(p)?.is_zero() {
        return Err(Error::Verification("A·P is not zero".into()));
    }
    let trace = p.canonical_trace()? * F::from_int(a.group().size() as i64);
    if trace != F::from_int(nullity as i64) {
        return Err(Error::Verification(format!("|G|·tr(P) = {trace:?} but the nullity is {nullity}")));
    }
    Ok(())
}

/// `τ^u(pr_ker A)`.
pub fn center_valued_kernel_dimension<F: StarField>(a: &GroupRingMatrix<F>) -> Result<GroupRingElement<F>> {
    Ok(kernel_projection(a)?.dim_u)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use crate::group::FiniteGroup;
    use crate::scalar::{rat, Rational};

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn one_plus_s() {
        let g = z2();
        let a = GroupRingMatrix::scalar(GroupRingElement::<Rational>::from_terms(&g, [(0, rat(1, 1)), (1, rat(1, 1))]));
        assert_eq!(regular_representation(&a), Matrix::from_rows(vec![vec![rat(1, 1); 2]; 2]).unwrap());
        let k = kernel_projection(&a).unwrap();
        let expected = GroupRingElement::from_terms(&g, [(0, rat(1, 2)), (1, rat(-1, 2))]);
        assert_eq!(k.projection, GroupRingMatrix::scalar(expected.clone()));
        assert_eq!(k.dim_u, expected);
    }

    #[test]
    fn trivial_and_full_kernels() {
        let g = z2();
        let two = GroupRingMatrix::scalar(GroupRingElement::<Cyclotomic>::monomial(&g, 0, Cyclotomic::from(2)));
        assert!(kernel_projection(&two).unwrap().projection.is_zero());
        let zero = GroupRingMatrix::<Cyclotomic>::zeros(&g, 2, 2);
        assert_eq!(kernel_projection(&zero).unwrap().projection, GroupRingMatrix::identity(&g, 2));
    }

    #[test]
    fn subgroup_projection_in_s3() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let c = (1..6).find(|&x| s3.element_order(x) == 3).unwrap();
        let h = s3.closure(&[c]);
        let a = GroupRingMatrix::scalar(GroupRingElement::<Rational>::averaging(&s3, &h));
        let k = kernel_projection(&a).unwrap();
        assert_eq!(k.nullity, 4);
        assert_eq!(k.canonical_trace, rat(2, 3));
        assert_eq!(float_nullity(&a), 4);
    }

    #[test]
    fn regular_representation_is_multiplicative() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let x = GroupRingElement::<Rational>::from_terms(&s3, [(1, rat(2, 1)), (3, rat(-1, 3))]);
        let y = GroupRingElement::<Rational>::from_terms(&s3, [(0, rat(1, 1)), (4, rat(5, 1)), (2, rat(1, 2))]);
        let (a, b) = (GroupRingMatrix::scalar(x), GroupRingMatrix::scalar(y));
        let lhs = regular_representation(&a.checked_mul(&b).unwrap());
        let rhs = regular_representation(&a).mul(&regular_representation(&b)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(regular_representation(&a.star()), regular_representation(&a).adjoint());
    }
}
