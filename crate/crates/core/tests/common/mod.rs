#![allow(dead_code)]

use std::sync::Arc;

use atiyah_core::group::{perm_from_cycles, DEFAULT_GROUP_CAP};
use atiyah_core::scalar::rat;
use atiyah_core::{Cyclotomic, FiniteGroup, GroupRingElement, GroupRingMatrix, Rational};
use rand::Rng;

pub fn d4_from_permutations() -> FiniteGroup {
    let r = perm_from_cycles(4, &[&[1, 2, 3, 4]]);
    let s = perm_from_cycles(4, &[&[1, 3]]);
    FiniteGroup::from_permutations(4, &[r, s], DEFAULT_GROUP_CAP).unwrap()
}

/// The small groups every trace and kernel property is run over.
pub fn catalog() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    vec![
        ("Z/2", Arc::new(FiniteGroup::cyclic(2))),
        ("Z/3", Arc::new(FiniteGroup::cyclic(3))),
        ("Z/4", Arc::new(FiniteGroup::cyclic(4))),
        ("Z/6", Arc::new(FiniteGroup::cyclic(6))),
        ("S3", Arc::new(FiniteGroup::symmetric(3))),
        ("D4", Arc::new(d4_from_permutations())),
        ("Q8", Arc::new(FiniteGroup::quaternion())),
    ]
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

/// A sparse random element of `Q(ω_order)`.
pub fn random_cyclotomic(rng: &mut impl Rng, order: u64) -> Cyclotomic {
    let terms: Vec<(u64, Rational)> =
        (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(0..order), small_rational(rng))).collect();
    Cyclotomic::from_exponents(order, terms)
}

pub fn random_element(rng: &mut impl Rng, group: &Arc<FiniteGroup>, order: u64) -> GroupRingElement {
    let n = group.size();
    let terms: Vec<(usize, Cyclotomic)> =
        (0..rng.gen_range(0..=3)).map(|_| (rng.gen_range(0..n), random_cyclotomic(rng, order))).collect();
    GroupRingElement::from_terms(group, terms)
}

pub fn random_rational_element(rng: &mut impl Rng, group: &Arc<FiniteGroup>) -> GroupRingElement<Rational> {
    let n = group.size();
    let terms: Vec<(usize, Rational)> = (0..rng.gen_range(0..=4)).map(|_| (rng.gen_range(0..n), small_rational(rng))).collect();
    GroupRingElement::from_terms(group, terms)
}

pub fn random_matrix(rng: &mut impl Rng, group: &Arc<FiniteGroup>, rows: usize, cols: usize, order: u64) -> GroupRingMatrix {
    GroupRingMatrix::from_fn(group, rows, cols, |_, _| random_element(rng, group, order))
}

/// A random matrix whose kernel is usually nontrivial: rows are combinations
/// of a few random rows, and entries are often projections like `1 ± g`.
pub fn random_singular_matrix(rng: &mut impl Rng, group: &Arc<FiniteGroup>, dim: usize, order: u64) -> GroupRingMatrix {
    let g = rng.gen_range(0..group.size());
    let one = GroupRingElement::one(group);
    let basis = GroupRingElement::basis(group, g);
    let seed = if rng.gen_bool(0.5) { &one + &basis } else { &one - &basis };
    let base = random_matrix(rng, group, 1, dim, order);
    GroupRingMatrix::from_fn(group, dim, dim, |i, j| {
        let factor = if i == 0 { seed.clone() } else { random_element(rng, group, order) };
        &factor * base.get(0, j)
    })
}

/// Permutation matrix of right translation by `k` on `F[G]^m`.
pub fn right_translation<F: atiyah_core::Field>(group: &FiniteGroup, m: usize, k: usize) -> atiyah_core::Matrix<F> {
    let n = group.size();
    let kinv = group.inv(k);
    atiyah_core::Matrix::from_fn(m * n, m * n, |r, c| {
        let (i, g) = (r / n, r % n);
        let (j, h) = (c / n, c % n);
        // (v·k)(g) = v(g k⁻¹)
        F::from_int((i == j && h == group.mul(g, kinv)) as i64)
    })
}
