//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Randomness comes from fixed ChaCha seeds, so every run checks the same
//! instances.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use atiyah_core::atiyah::{minimal_projection, Irreducibility, SubgroupBlocks};
use atiyah_core::cyclotomic::lcm;
use atiyah_core::idempotents::{center_valued_trace, central_idempotents, class_average};
use atiyah_core::kernel::{float_nullity, kernel_projection};
use atiyah_core::lattice::hermite_normal_form;
use atiyah_core::residual::{dimension_sequence, parse_word, stabilization_index};
use atiyah_core::scalar::{rat, rational_to_string};
use atiyah_core::{
    approximate, build_lattice, verify_atiyah_formula, AtiyahContext, Cyclotomic, FieldSpec, GroupRingElement,
    GroupRingMatrix, Rational, ResidualChain, SymbolicMatrix, Verdict, VirtualGroup,
};
use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Distinct items, in first-seen order. Cyclotomic numbers have no total order.
fn distinct<T: PartialEq>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn same_set<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x)) && b.iter().all(|x| a.contains(x))
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// Each catalog model over `Q` and over the field generated by its exponent.
fn model_fields() -> Vec<(VirtualGroup, FieldSpec)> {
    let mut out = Vec::new();
    for vg in VirtualGroup::catalog() {
        let mut bases = vec![1, vg.exponent()];
        bases.dedup();
        for base in bases {
            out.push((vg.clone(), vg.field(base)));
        }
    }
    out
}

fn field_label(f: &FieldSpec) -> String {
    if f.base_order <= 2 {
        "Q".into()
    } else {
        format!("Q(w{})", f.base_order)
    }
}

fn three_routes() -> Outcome {
    let mut checked = 0;
    for (vg, field) in model_fields() {
        let ctx = ok(AtiyahContext::new(&vg, &field), &vg.name)?;
        for entry in &vg.subgroups {
            let blocks = ok(SubgroupBlocks::new(&ctx, entry), &entry.name)?;
            let h = &blocks.group;
            for o in 0..blocks.idempotents.c_k() {
                let q = ok(minimal_projection(&ctx, &blocks, o), "minimal projection")?
                    .ok_or_else(|| format!("{} over {}: no irreducible projection in block {o} of {}", vg.name, field_label(&field), entry.name))?;
                // every conjugate h·Q·h⁻¹ is again irreducible in the same block
                let conjugates = distinct((0..h.size()).map(|x| q.left_translate(x).right_translate(h.inv(x))));
                for qc in conjugates {
                    let r = ok(verify_atiyah_formula(&ctx, &entry.name, &qc, false), "verify")?;
                    ensure!(
                        r.agree && r.irreducibility == Irreducibility::Certified,
                        "{} over {}, {} block {o}: routes {} / {} / {}",
                        vg.name,
                        field_label(&field),
                        entry.name,
                        rational_to_string(&r.route_projection),
                        rational_to_string(&r.route_dimension),
                        rational_to_string(&r.route_von_neumann)
                    );
                    checked += 1;
                }
            }
            // the averaging projection p_H always lies in the trivial block
            let p_h = GroupRingElement::averaging(h, &(0..h.size()).collect::<Vec<_>>());
            let r = ok(verify_atiyah_formula(&ctx, &entry.name, &p_h, false), "p_H")?;
            ensure!(r.agree, "{} p_H routes disagree", entry.name);
            checked += 1;
        }
    }
    Ok(format!("{checked} projections"))
}

fn trace_axioms() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for (name, g) in catalog() {
        let order = lcm(4, g.exponent());
        let u = ok(central_idempotents(&g, &[], &FieldSpec::new(order, order).unwrap()), "idempotents")?.u;
        for _ in 0..100 {
            let (n, m) = (r.gen_range(1..=2), r.gen_range(1..=3));
            let a = random_matrix(&mut r, &g, n, m, 4);
            let b = random_matrix(&mut r, &g, m, n, 4);
            let ab = a.checked_mul(&b).unwrap();
            let tab = center_valued_trace(&ab).unwrap();
            let tba = center_valued_trace(&b.checked_mul(&a).unwrap()).unwrap();
            ensure!(tab == tba, "{name}: τ^u(AB) ≠ τ^u(BA)");
            ensure!(tab.is_central(), "{name}: τ^u(AB) is not central");
            ensure!(tab.trace() == ab.canonical_trace().unwrap(), "{name}: tr ≠ tr∘τ^u");

            // fixity and center-linearity
            let z = class_average(&random_element(&mut r, &g, 4));
            ensure!(center_valued_trace(&GroupRingMatrix::scalar(z.clone())).unwrap() == z, "{name}: τ^u(z) ≠ z");
            let z_ab = GroupRingMatrix::from_fn(&g, n, n, |i, j| &z * ab.get(i, j));
            ensure!(center_valued_trace(&z_ab).unwrap() == &z * &tab, "{name}: τ^u(zM) ≠ z·τ^u(M)");

            // positivity: ⟨τ^u(A*A), u_i⟩ = Σ |(A u_i)_{jk}(g)|², a sum of norms
            let t = center_valued_trace(&a.star().checked_mul(&a).unwrap()).unwrap();
            for ui in &u {
                let w = t.inner(ui).unwrap();
                let au = GroupRingMatrix::from_fn(&g, n, m, |i, j| a.get(i, j) * ui);
                let norms = au.entries().iter().fold(Cyclotomic::zero(), |acc, e| acc + e.inner(e).unwrap());
                ensure!(w == norms, "{name}: ⟨τ^u(A*A), u⟩ is not a sum of norms");
                ensure!(w.is_zero() == au.is_zero(), "{name}: positivity fails to be strict");
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} matrix pairs"))
}

fn kernel_identities() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut singular = 0;
    for (name, g) in catalog() {
        for k in 0..50 {
            let dim = 1 + k % 3;
            let a = if k % 2 == 0 { random_singular_matrix(&mut r, &g, dim, 4) } else { random_matrix(&mut r, &g, dim, dim, 4) };
            let kp = ok(kernel_projection(&a), name)?;
            let p = &kp.projection;
            ensure!(p.checked_mul(p).unwrap() == *p, "{name}: P² ≠ P");
            ensure!(p.star() == *p, "{name}: P* ≠ P");
            ensure!(a.checked_mul(p).unwrap().is_zero(), "{name}: AP ≠ 0");
            let fl = float_nullity(&a);
            ensure!(fl == kp.nullity, "{name}: exact nullity {} but floating {fl}", kp.nullity);
            let lcm_g = Cyclotomic::from(g.size() as i64);
            let scaled = (kp.canonical_trace.clone() * lcm_g).as_rational();
            ensure!(scaled.is_some_and(|x| x.is_integer()), "{name}: canonical trace outside (1/lcm)Z");
            ensure!(kp.dim_u.trace() == kp.canonical_trace, "{name}: tr(dim^u) ≠ canonical trace");
            singular += (kp.nullity > 0) as usize;
            checked += 1;
        }
    }
    Ok(format!("{checked} matrices, {singular} singular"))
}

fn galois_descent() -> Outcome {
    let mut sizes = Vec::new();
    for p in [5usize, 7] {
        let g = Arc::new(atiyah_core::FiniteGroup::cyclic(p));
        let set = ok(central_idempotents(&g, &[], &FieldSpec::new(1, p as u64).unwrap()), "idempotents")?;
        let units: Vec<u64> = (1..p as u64).collect();
        // Galois orbits of the ℚ(ω)-primitive idempotents, computed directly
        let mut orbits: Vec<Vec<GroupRingElement>> = Vec::new();
        for u in &set.u {
            let orbit = distinct(units.iter().map(|&j| u.galois_apply(j).unwrap()));
            for &j in &units {
                ensure!(u.galois_apply(j).unwrap().trace() == u.trace(), "Z/{p}: ⟨u,1⟩ not Galois invariant");
            }
            ensure!(u.trace().as_rational().is_some(), "Z/{p}: ⟨u,1⟩ not rational");
            if !orbits.iter().any(|o| same_set(o, &orbit)) {
                orbits.push(orbit);
            }
        }
        let orbit_sums: Vec<GroupRingElement> =
            orbits.iter().map(|o| o.iter().fold(GroupRingElement::zero(&g), |acc, x| &acc + x)).collect();
        ensure!(same_set(&set.p, &orbit_sums), "Z/{p}: Q-primitive idempotents are not the Galois orbit sums");
        let mut s: Vec<usize> = orbits.iter().map(Vec::len).collect();
        s.sort_unstable();
        let expected = vec![1, p - 1];
        ensure!(s == expected, "Z/{p}: orbit sizes {s:?}, expected {expected:?}");
        sizes.push(format!("Z/{p}: {s:?}"));
    }
    Ok(sizes.join(", "))
}

fn lj_two_routes() -> Outcome {
    let mut checked = 0;
    for (vg, field) in model_fields() {
        let lattice = ok(build_lattice(&vg, &field, false), &vg.name)?;
        let reports = ok(lattice.all_l(), "L_j")?;
        for rep in &reports {
            ensure!(rep.agree(), "{} over {}: block {} formula {} vs lattice {}", vg.name, field_label(&field), rep.block, rep.formula, rep.from_lattice);
            checked += 1;
        }
        if vg.name == "infinite-dihedral" {
            ensure!(reports.len() == 1 && reports[0].formula == 2, "infinite dihedral: L = {:?}", reports);
        }
    }
    Ok(format!("{checked} blocks, infinite dihedral L = 2"))
}

fn discreteness() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for (vg, field) in model_fields() {
        let lattice = ok(build_lattice(&vg, &field, false), &vg.name)?;
        let cert = ok(lattice.discreteness_certificate(), "certificate")?;
        ensure!(cert.certified(), "{} over {}: {:?}", vg.name, field_label(&field), cert);
        let rows: Vec<Vec<BigInt>> = lattice
            .generators
            .iter()
            .map(|g| {
                let mut row = vec![BigInt::zero(); lattice.rank()];
                row[g.block] = (&g.q * Rational::from_integer(lattice.scaling[g.block].clone())).to_integer();
                row
            })
            .collect();
        for _ in 0..10 {
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut r);
            ensure!(hermite_normal_form(shuffled, lattice.rank()) == lattice.basis_hnf, "{}: HNF depends on row order", vg.name);
            let mut permuted = vg.clone();
            permuted.subgroups.shuffle(&mut r);
            let again = ok(build_lattice(&permuted, &field, false), "rebuild")?;
            ensure!(again.basis_hnf == lattice.basis_hnf, "{}: HNF depends on subgroup order", vg.name);
        }
        checked += 1;
    }
    Ok(format!("{checked} lattices"))
}

fn approximation() -> Outcome {
    let tol = rat(1, 10);
    let z = VirtualGroup::torsion_free();
    let chain = z.chain.clone().unwrap();
    let z_lattice = ok(build_lattice(&z, &z.field(1), false), "Z lattice")?;

    let one_minus_t = SymbolicMatrix::polynomial(&["t"], &[(1.into(), "1"), ((-1).into(), "t")]).unwrap();
    let run = ok(approximate(&one_minus_t, &chain, &z, &z_lattice, &tol, 2, None), "1 - t")?;
    let got: Vec<Rational> = run.levels.iter().map(|l| l.canonical_trace.clone()).collect();
    let expected: Vec<Rational> = [2, 3, 4, 6, 12].iter().map(|&n| rat(1, n)).collect();
    ensure!(got == expected, "1 - t: {:?}", got.iter().map(rational_to_string).collect::<Vec<_>>());
    ensure!(run.quantization.verdict == Verdict::Snap && run.quantization.nearest == vec![Rational::zero()], "1 - t: no snap to 0");

    let two_minus_t = SymbolicMatrix::polynomial(&["t"], &[(2.into(), "1"), ((-1).into(), "t")]).unwrap();
    let seq = ok(dimension_sequence(&two_minus_t, &chain, &[], None), "2 - t")?;
    ensure!(seq.iter().all(|l| l.dim_u.is_zero()), "2 - t: nonzero dimension");

    // 1 - u₂·t on Z/3 × Z, with u₂ written through the words for Δ⁺
    let vg = VirtualGroup::cyclic_times_z(3);
    let field = vg.field(3);
    let lattice = ok(build_lattice(&vg, &field, false), "Z/3 x Z lattice")?;
    let chain = vg.chain.clone().unwrap();
    let u2 = &ok(vg.idempotents(&field), "idempotents")?.u[1];
    let words: Vec<String> = vg.delta_words.clone().unwrap().iter().map(|w| format!("{w} t")).collect();
    let mut terms: Vec<(Cyclotomic, &str)> = vec![(1.into(), "1")];
    terms.extend(words.iter().enumerate().map(|(d, w)| (-u2.coeff(d), w.as_str())));
    let a = SymbolicMatrix::polynomial(&["s", "t"], &terms).unwrap();
    let run = ok(approximate(&a, &chain, &vg, &lattice, &tol, 2, None), "1 - u2 t")?;
    let block = lattice.blocks.p.iter().position(|p| p == u2).ok_or("u2 is not a block of the lattice")?;
    for (coords, lvl) in run.coordinates.iter().zip(&run.levels[run.stabilization_index..]) {
        let n = (lvl.order / 3) as i64;
        for (i, c) in coords.iter().enumerate() {
            let want = if i == block { rat(1, n) } else { Rational::zero() };
            ensure!(*c == want, "1 - u2 t at {}: coordinate {i} is {}", lvl.label, rational_to_string(c));
        }
    }
    let d = &run.quantization.distance;
    ensure!(*d < rat(1, 12), "1 - u2 t: final distance {} is not below 1/12", rational_to_string(d));
    ensure!(run.quantization.verdict == Verdict::Snap, "1 - u2 t: verdict {:?}", run.quantization.verdict);
    Ok(format!("1/N exact, 2 - t zero, u2 distance {}", rational_to_string(d)))
}

fn stabilization() -> Outcome {
    let chain = VirtualGroup::torsion_free().chain.unwrap();
    let witness: Vec<_> = ["1", "t", "t^2", "t^3"].iter().map(|w| parse_word(w, &chain.generators).unwrap()).collect();
    let got = ok(stabilization_index(&chain, std::slice::from_ref(&witness)), "stabilization")?;
    let expected = chain.levels.iter().position(|l| l.group.size() > 3).unwrap();
    ensure!(got == expected, "stabilization index {got}, first level with |Q| > 3 is {expected}");
    let longer = ResidualChain::cyclic(&[2, 4, 8]);
    let got = ok(stabilization_index(&longer, &[witness]), "stabilization")?;
    ensure!(got == 1, "Z/2, Z/4, Z/8: stabilization index {got}");
    Ok(format!("index {expected} ({})", chain.levels[expected].label))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("three-route trace formula", three_routes, Some(Duration::from_secs(60))),
        ("center-valued trace axioms", trace_axioms, None),
        ("kernel projections", kernel_identities, None),
        ("Galois descent", galois_descent, None),
        ("L_j two routes", lj_two_routes, None),
        ("discreteness and HNF invariance", discreteness, None),
        ("residual approximation", approximation, Some(Duration::from_secs(120))),
        ("stabilization index", stabilization, None),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failures += 1;
                ("FAIL", e)
            }
        };
        println!("criterion {}: {tag} [{name}] {detail} ({elapsed:.2?})", k + 1);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
