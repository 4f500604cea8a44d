//! Brute-force oracle for primitive central idempotents.
//!
//! Over `F_p` with `p ≡ 1 (mod exp G)` and `p ∤ |G|`, the center of `F_p[G]`
//! splits, so its primitive idempotents can be found by enumerating every
//! class function. None of this touches character tables.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use atiyah_core::idempotents::central_idempotents;
use atiyah_core::{Cyclotomic, FieldSpec, FiniteGroup};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn element_of_order(order: u64, p: u64) -> u64 {
    (2..p)
        .map(|g| pow_mod(g, (p - 1) / order, p))
        .find(|&z| (1..order).all(|k| !order.is_multiple_of(k) || pow_mod(z, k, p) != 1))
        .expect("p ≡ 1 mod order")
}

fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    (((x % &m) + &m) % &m).to_u64().unwrap()
}

/// Image of a cyclotomic number under `ω_M ↦ ζ`, `ζ` of order `M` in `F_p`.
fn reduce(c: &Cyclotomic, p: u64) -> u64 {
    let zeta = element_of_order(c.order(), p);
    c.coeffs().iter().enumerate().fold(0, |acc, (k, q)| {
        let num = reduce_int(q.numer(), p);
        let den = reduce_int(q.denom(), p);
        let term = num * pow_mod(den, p - 2, p) % p * pow_mod(zeta, k as u64, p) % p;
        (acc + term) % p
    })
}

fn multiply(g: &FiniteGroup, a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; g.size()];
    for (x, &ax) in a.iter().enumerate().filter(|(_, v)| **v != 0) {
        for (y, &by) in b.iter().enumerate().filter(|(_, v)| **v != 0) {
            let z = g.mul(x, y);
            out[z] = (out[z] + ax * by) % p;
        }
    }
    out
}

fn brute_force_primitive(g: &FiniteGroup, p: u64) -> BTreeSet<Vec<u64>> {
    let classes = g.classes();
    let total = (p as usize).pow(classes.len() as u32);
    let mut idempotents = Vec::new();
    for code in 1..total {
        let mut rest = code;
        let mut x = vec![0; g.size()];
        for class in classes {
            let c = (rest % p as usize) as u64;
            rest /= p as usize;
            for &s in class {
                x[s] = c;
            }
        }
        if multiply(g, &x, &x, p) == x {
            idempotents.push(x);
        }
    }
    let zero = vec![0; g.size()];
    idempotents
        .iter()
        .filter(|e| idempotents.iter().all(|f| {
            let ef = multiply(g, e, f, p);
            ef == zero || ef == **e
        }))
        .cloned()
        .collect()
}

#[test]
fn primitive_idempotents_match_brute_force_over_finite_fields() {
    let cases: Vec<(&str, FiniteGroup, u64)> = vec![
        ("Z/2", FiniteGroup::cyclic(2), 3),
        ("Z/3", FiniteGroup::cyclic(3), 7),
        ("Z/4", FiniteGroup::cyclic(4), 5),
        ("Z/5", FiniteGroup::cyclic(5), 11),
        ("Z/6", FiniteGroup::cyclic(6), 7),
        ("S3", FiniteGroup::symmetric(3), 7),
        ("D4", common::d4_from_permutations(), 5),
        ("Q8", FiniteGroup::quaternion(), 5),
        ("A4", FiniteGroup::alternating(4), 7),
    ];
    for (name, group, p) in cases {
        let group = Arc::new(group);
        let oracle = brute_force_primitive(&group, p);
        let set = central_idempotents(&group, &[], &FieldSpec::new(1, group.exponent()).unwrap()).unwrap();
        let ours: BTreeSet<Vec<u64>> =
            set.u.iter().map(|u| u.dense().iter().map(|c| reduce(c, p)).collect()).collect();
        assert_eq!(oracle.len(), group.num_classes(), "{name}: oracle count");
        assert_eq!(ours, oracle, "{name} over F_{p}");
    }
}
