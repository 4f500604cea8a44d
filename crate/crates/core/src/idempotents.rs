//! Primitive central idempotents, their orbit sums, and the
//! center-valued trace of a finite group ring.

use std::sync::Arc;

use crate::characters::{character_table, CharacterTable};
use crate::cyclotomic::{Cyclotomic, FieldSpec};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::scalar::{Field, Rational};

/// `u_i`, their orbit sums `U^i` under an automorphism group, and the
/// Galois-orbit sums `P^i = Σ_{j∈N_i} U^j`.
#[derive(Clone, Debug)]
pub struct CentralIdempotentSet {
    pub field: FieldSpec,
    pub u: Vec<GroupRingElement>,
    /// Indices into `u` summed by each `U^i`.
    pub u_orbits: Vec<Vec<usize>>,
    pub big_u: Vec<GroupRingElement>,
    /// `N_i`: indices into `big_u` summed by each `P^i`.
    pub p_orbits: Vec<Vec<usize>>,
    pub p: Vec<GroupRingElement>,
}

impl CentralIdempotentSet {
    /// `c_G`, the number of orbit sums `U^i`.
    pub fn c_g(&self) -> usize {
        self.big_u.len()
    }

    /// `C_K`, the number of Galois-orbit sums `P^i`.
    pub fn c_k(&self) -> usize {
        self.p.len()
    }

    /// The `P`-block containing `U^j`.
    pub fn block_of_u(&self, j: usize) -> usize {
        self.p_orbits.iter().position(|o| o.contains(&j)).expect("orbits partition the U indices")
    }

    /// `u`-indices making up the block `P^i`.
    pub fn u_indices_of_block(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.p_orbits[i].iter().flat_map(|&j| self.u_orbits[j].iter().copied()).collect();
        out.sort_unstable();
        out
    }
}

/// `u_i = (n_i/|G|) Σ_s χ_i(s⁻¹) s`.
pub fn primitive_central_idempotents(group: &Arc<FiniteGroup>, table: &CharacterTable) -> Vec<GroupRingElement> {
    let order = Rational::from_integer((group.size() as i64).into());
    table
        .characters
        .iter()
        .map(|chi| {
            let scale = Cyclotomic::from(chi[0].as_rational().expect("degree") / &order);
            GroupRingElement::from_terms(
                group,
                (0..group.size()).map(|s| (s, &chi[group.class_of(group.inv(s))] * &scale)),
            )
        })
        .collect()
}

/// Orbits of a permutation action given by generator images, ordered by
/// smallest member.
fn orbits(n: usize, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for p in perms {
                let y = p[x];
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

fn sum_of(group: &Arc<FiniteGroup>, xs: &[GroupRingElement], idx: &[usize]) -> GroupRingElement {
    idx.iter().fold(GroupRingElement::zero(group), |acc, &i| &acc + &xs[i])
}

/// Groups the `u_i` into orbits under the automorphisms `automorphisms`
/// (each an image vector on group elements). Returns the orbits and the
/// orbit sums.
pub fn g_orbit_idempotents(
    group: &Arc<FiniteGroup>,
    u: &[GroupRingElement],
    automorphisms: &[Vec<usize>],
) -> Result<(Vec<Vec<usize>>, Vec<GroupRingElement>)> {
    let mut perms = Vec::with_capacity(automorphisms.len());
    for (a, phi) in automorphisms.iter().enumerate() {
        if !group.is_automorphism(phi) {
            return Err(Error::InvalidAutomorphism(format!("map {a} is not an automorphism")));
        }
        let mut perm = Vec::with_capacity(u.len());
        for ui in u {
            let image = ui.push_forward(group, phi);
            let k = u.iter().position(|uk| *uk == image).ok_or_else(|| {
                Error::InvalidAutomorphism(format!("map {a} does not permute the primitive central idempotents"))
            })?;
            perm.push(k);
        }
        perms.push(perm);
    }
    let orbits = orbits(u.len(), &perms);
    let sums = orbits.iter().map(|o| sum_of(group, u, o)).collect();
    Ok((orbits, sums))
}

/// Groups the `U^i` into `Gal(L/K)`-orbits.
pub fn galois_orbit_idempotents(
    group: &Arc<FiniteGroup>,
    big_u: &[GroupRingElement],
    field: &FieldSpec,
) -> Result<(Vec<Vec<usize>>, Vec<GroupRingElement>)> {
    if !field.ambient_order.is_multiple_of(group.exponent()) {
        return Err(Error::InvalidInput(format!(
            "ambient order {} is not a multiple of the exponent {}",
            field.ambient_order,
            group.exponent()
        )));
    }
    let mut perms = Vec::new();
    for j in field.galois_group() {
        let mut perm = Vec::with_capacity(big_u.len());
        for x in big_u {
            let image = x.galois_apply(j)?;
            let k = big_u.iter().position(|y| *y == image).ok_or_else(|| {
                Error::Verification(format!("Galois element {j} does not permute the orbit sums"))
            })?;
            perm.push(k);
        }
        perms.push(perm);
    }
    let orbits = orbits(big_u.len(), &perms);
    let sums: Vec<GroupRingElement> = orbits.iter().map(|o| sum_of(group, big_u, o)).collect();
    for (i, p) in sums.iter().enumerate() {
        if p.terms().any(|(_, c)| !field.contains(c)) {
            return Err(Error::Verification(format!("P^{i} has coefficients outside the base field")));
        }
    }
    Ok((orbits, sums))
}

/// Builds `u`, `U` and `P` for `group` under the given conjugation action.
pub fn central_idempotents(
    group: &Arc<FiniteGroup>,
    automorphisms: &[Vec<usize>],
    field: &FieldSpec,
) -> Result<CentralIdempotentSet> {
    let table = character_table(group)?;
    let u = primitive_central_idempotents(group, &table);
    let (u_orbits, big_u) = g_orbit_idempotents(group, &u, automorphisms)?;
    let (p_orbits, p) = galois_orbit_idempotents(group, &big_u, field)?;
    Ok(CentralIdempotentSet { field: field.clone(), u, u_orbits, big_u, p_orbits, p })
}

/// Replaces each coefficient by its average over the conjugacy class.
pub fn class_average<F: Field>(x: &GroupRingElement<F>) -> GroupRingElement<F> {
    let group = x.group().clone();
    let mut terms = Vec::new();
    for class in group.classes() {
        let total = class.iter().fold(F::zero(), |acc, &g| acc + x.coeff(g));
        if total.is_zero() {
            continue;
        }
        let avg = total / F::from_int(class.len() as i64);
        terms.extend(class.iter().map(|&g| (g, avg.clone())));
    }
    GroupRingElement::from_terms(&group, terms)
}

/// Center-valued trace `Σ_i avg(A_ii)` of a square matrix over a finite group.
pub fn center_valued_trace<F: Field>(a: &GroupRingMatrix<F>) -> Result<GroupRingElement<F>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("trace of a {}x{} matrix", a.rows(), a.cols())));
    }
    let diag = (0..a.rows()).fold(GroupRingElement::zero(a.group()), |acc, i| &acc + a.get(i, i));
    Ok(class_average(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w3(k: u64) -> Cyclotomic {
        Cyclotomic::root_of_unity(3, k)
    }

    fn third(c: Cyclotomic) -> Cyclotomic {
        c * Cyclotomic::from(crate::scalar::rat(1, 3))
    }

    #[test]
    fn z2_idempotents() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let set = central_idempotents(&g, &[], &FieldSpec::new(1, 2).unwrap()).unwrap();
        let half = Cyclotomic::from(crate::scalar::rat(1, 2));
        assert_eq!(set.u[0], GroupRingElement::from_terms(&g, [(0, half.clone()), (1, half.clone())]));
        assert_eq!(set.u[1], GroupRingElement::from_terms(&g, [(0, half.clone()), (1, -half)]));
    }

    #[test]
    fn z3_idempotents_match_formula() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let set = central_idempotents(&g, &[], &FieldSpec::new(3, 3).unwrap()).unwrap();
        let u2 = GroupRingElement::from_terms(&g, [(0, third(1.into())), (1, third(w3(2))), (2, third(w3(1)))]);
        let u3 = GroupRingElement::from_terms(&g, [(0, third(1.into())), (1, third(w3(1))), (2, third(w3(2)))]);
        assert_eq!(set.u[1], u2);
        assert_eq!(set.u[2], u3);
        assert_eq!(set.p.len(), 3);
    }

    #[test]
    fn z3_orbits_under_inversion_and_galois() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let inversion = vec![0, 2, 1];
        let set = central_idempotents(&g, &[inversion], &FieldSpec::new(3, 3).unwrap()).unwrap();
        assert_eq!(set.u_orbits, vec![vec![0], vec![1, 2]]);
        let over_q = central_idempotents(&g, &[], &FieldSpec::new(1, 3).unwrap()).unwrap();
        assert_eq!(over_q.p_orbits, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn z5_over_q_has_two_blocks() {
        let g = Arc::new(FiniteGroup::cyclic(5));
        let set = central_idempotents(&g, &[], &FieldSpec::new(1, 5).unwrap()).unwrap();
        assert_eq!(set.p_orbits, vec![vec![0], vec![1, 2, 3, 4]]);
    }

    #[test]
    fn klein_four_with_cyclic_action() {
        let v4 = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)));
        // elements 1, 2, 3 are the involutions; cycle them
        let phi = vec![0, 2, 3, 1];
        let set = central_idempotents(&v4, &[phi], &FieldSpec::new(1, 2).unwrap()).unwrap();
        assert_eq!(set.c_g(), 2);
    }

    #[test]
    fn bad_automorphism_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        assert!(matches!(
            central_idempotents(&g, &[vec![0, 2, 1, 3]], &FieldSpec::new(1, 4).unwrap()),
            Err(Error::InvalidAutomorphism(_))
        ));
    }

    #[test]
    fn class_average_of_a_transposition() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = (1..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let avg = class_average(&GroupRingElement::<Rational>::basis(&s3, t));
        let class = &s3.classes()[s3.class_of(t)];
        assert_eq!(avg, GroupRingElement::averaging(&s3, class));
    }
}
