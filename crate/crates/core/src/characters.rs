//! Irreducible character tables by Dixon's method.
//!
//! The class-sum structure constants are reduced modulo a prime
//! `p ≡ 1 (mod exponent)`, the class matrices are simultaneously
//! diagonalized over `F_p` by brute-force eigenvalue search, and each
//! character value is lifted to `Q(ω_e)` through the eigenvalue
//! multiplicities of the element it is evaluated on. The lifted table is
//! then checked against the orthogonality relations exactly.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_GROUP_CAP};
use crate::scalar::Rational;

/// Characters as class functions; `characters[i][c]` is `χ_i` on class `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterTable {
    /// Cyclotomic order the values live in (the group exponent).
    pub exponent: u64,
    pub classes: Vec<Vec<usize>>,
    pub characters: Vec<Vec<Cyclotomic>>,
}

impl CharacterTable {
    pub fn degrees(&self) -> Vec<u64> {
        self.characters
            .iter()
            .map(|chi| {
                let d = chi[0].as_rational().expect("degree is rational");
                u64::try_from(d.to_integer()).expect("degree is a positive integer")
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// `χ_i(g)`, using the group's class labels.
    pub fn value(&self, group: &FiniteGroup, i: usize, g: usize) -> &Cyclotomic {
        &self.characters[i][group.class_of(g)]
    }

    /// Checks that the table belongs to `group` and satisfies the
    /// orthogonality relations and `Σ n_i² = |G|` exactly.
    pub fn verify(&self, group: &FiniteGroup) -> Result<()> {
        if self.classes.as_slice() != group.classes() {
            return Err(Error::CharacterTable("class list does not match the group".into()));
        }
        let k = self.classes.len();
        if self.characters.len() != k || self.characters.iter().any(|c| c.len() != k) {
            return Err(Error::CharacterTable("table is not square in the number of classes".into()));
        }
        let order = Rational::from_integer((group.size() as i64).into());
        let sizes: Vec<Cyclotomic> = self.classes.iter().map(|c| Cyclotomic::from(c.len() as i64)).collect();
        for i in 0..k {
            for j in i..k {
                let mut s = Cyclotomic::zero();
                for c in 0..k {
                    s = s + &sizes[c] * &self.characters[i][c] * self.characters[j][c].conjugate();
                }
                let expected = if i == j { Cyclotomic::from(order.clone()) } else { Cyclotomic::zero() };
                if s != expected {
                    return Err(Error::CharacterTable(format!("characters {i} and {j} are not orthonormal")));
                }
            }
        }
        let sum_sq: u64 = self.degrees().iter().map(|n| n * n).sum();
        if sum_sq != group.size() as u64 {
            return Err(Error::CharacterTable(format!("degree squares sum to {sum_sq}, not {}", group.size())));
        }
        Ok(())
    }

    /// Moves the table along a relabeling `old -> new` onto `target`, whose
    /// class order may differ.
    pub fn relabeled(&self, perm: &[usize], target: &FiniteGroup) -> Result<Self> {
        let k = self.classes.len();
        if target.num_classes() != k {
            return Err(Error::CharacterTable("class count differs after relabeling".into()));
        }
        // position in the old table of each target class
        let mut source_of = vec![usize::MAX; k];
        for (c, class) in self.classes.iter().enumerate() {
            let tc = target.class_of(perm[class[0]]);
            source_of[tc] = c;
        }
        if source_of.contains(&usize::MAX) {
            return Err(Error::CharacterTable("relabeling does not map classes to classes".into()));
        }
        let mut characters: Vec<Vec<Cyclotomic>> =
            self.characters.iter().map(|chi| source_of.iter().map(|&c| chi[c].clone()).collect()).collect();
        sort_characters(&mut characters, self.exponent);
        let table = Self { exponent: self.exponent, classes: target.classes().to_vec(), characters };
        table.verify(target)?;
        Ok(table)
    }
}

static CACHE: LazyLock<RwLock<HashMap<String, Arc<CharacterTable>>>> = LazyLock::new(Default::default);

/// Character table with an in-process cache keyed by the exact table hash.
pub fn character_table(group: &FiniteGroup) -> Result<Arc<CharacterTable>> {
    let key = group.content_hash();
    if let Some(t) = CACHE.read().expect("cache lock").get(&key) {
        return Ok(t.clone());
    }
    let table = Arc::new(compute_character_table(group, DEFAULT_GROUP_CAP)?);
    CACHE.write().expect("cache lock").insert(key, table.clone());
    Ok(table)
}

/// Seeds the in-process cache, e.g. with a table loaded from disk.
///
/// Characters are put in the same order a fresh computation would use.
pub fn insert_cached(group: &FiniteGroup, mut table: CharacterTable) -> Result<Arc<CharacterTable>> {
    table.verify(group)?;
    sort_characters(&mut table.characters, table.exponent);
    let table = Arc::new(table);
    CACHE.write().expect("cache lock").insert(group.content_hash(), table.clone());
    Ok(table)
}

pub fn compute_character_table(group: &FiniteGroup, cap: usize) -> Result<CharacterTable> {
    if group.size() > cap {
        return Err(Error::CapExceeded { cap });
    }
    let n = group.size() as u64;
    let e = group.exponent();
    let constants = structure_constants(group);
    let mut p = first_prime_above(n, e);
    let mut last_err = None;
    for _attempt in 0..8 {
        match dixon_mod_p(group, &constants, p) {
            Ok(table) => match table.verify(group) {
                Ok(()) => return Ok(table),
                Err(err) => last_err = Some(err),
            },
            Err(err) => last_err = Some(err),
        }
        p = next_prime_congruent(p, e);
    }
    Err(last_err.unwrap_or_else(|| Error::CharacterTable("no usable prime".into())))
}

/// `a[j][k][l]` = number of `x ∈ C_j` with `x⁻¹ g_l ∈ C_k`.
fn structure_constants(group: &FiniteGroup) -> Vec<Vec<Vec<u64>>> {
    let classes = group.classes();
    let k = classes.len();
    classes
        .par_iter()
        .map(|cj| {
            let mut a = vec![vec![0u64; k]; k];
            for (l, cl) in classes.iter().enumerate() {
                let rep = cl[0];
                for &x in cj {
                    a[group.class_of(group.mul(group.inv(x), rep))][l] += 1;
                }
            }
            a
        })
        .collect()
}

fn dixon_mod_p(group: &FiniteGroup, a: &[Vec<Vec<u64>>], p: u64) -> Result<CharacterTable> {
    let k = a.len();
    let classes = group.classes();
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k).map(|i| unit_vector(k, i)).collect()];
    for mj in a.iter().skip(1) {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let images: Vec<Vec<u64>> = basis.iter().map(|v| mat_vec(mj, v, p)).collect();
            let mut found = 0;
            for lambda in 0..p {
                // columns M b - λ b, solve for combinations c
                let cols: Vec<Vec<u64>> = images
                    .iter()
                    .zip(&basis)
                    .map(|(mb, b)| mb.iter().zip(b).map(|(&x, &y)| (x + p - lambda * y % p) % p).collect())
                    .collect();
                let kernel = nullspace_mod(&cols, k, p);
                if kernel.is_empty() {
                    continue;
                }
                found += kernel.len();
                let sub: Vec<Vec<u64>> = kernel
                    .iter()
                    .map(|c| {
                        let mut v = vec![0u64; k];
                        for (ci, b) in c.iter().zip(&basis) {
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi = (*vi + ci * bi) % p;
                            }
                        }
                        v
                    })
                    .collect();
                next.push(sub);
                if found == basis.len() {
                    break;
                }
            }
            if found != basis.len() {
                return Err(Error::CharacterTable(format!("class matrix does not split modulo {p}")));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(Error::CharacterTable(format!("degenerate eigenspaces modulo {p}")));
    }
    let n = group.size() as u64;
    let e = group.exponent();
    let z = pow_mod(primitive_root(p), (p - 1) / e, p);
    let inverse_class: Vec<usize> = classes.iter().map(|c| group.class_of(group.inv(c[0]))).collect();
    let mut characters = Vec::with_capacity(k);
    for space in &spaces {
        let w0 = space[0][0];
        if w0 == 0 {
            return Err(Error::CharacterTable(format!("eigenvector vanishes at the identity modulo {p}")));
        }
        let inv0 = inv_mod(w0, p);
        let w: Vec<u64> = space[0].iter().map(|&x| x * inv0 % p).collect();
        // n² = |G| / Σ_j w_j w_{j*} / |C_j|
        let mut s = 0;
        for j in 0..k {
            let hj = classes[j].len() as u64 % p;
            s = (s + w[j] * w[inverse_class[j]] % p * inv_mod(hj, p)) % p;
        }
        if s == 0 {
            return Err(Error::CharacterTable(format!("degenerate degree equation modulo {p}")));
        }
        let n_sq = n % p * inv_mod(s, p) % p;
        let degree = (1..=n).take_while(|d| d * d <= n).find(|d| d * d % p == n_sq).ok_or_else(|| {
            Error::CharacterTable(format!("no admissible degree modulo {p}"))
        })?;
        let chi_mod: Vec<u64> =
            (0..k).map(|j| w[j] * degree % p * inv_mod(classes[j].len() as u64 % p, p) % p).collect();
        let mut values = Vec::with_capacity(k);
        for class in classes {
            values.push(lift_value(group, class[0], &chi_mod, degree, z, e, p)?);
        }
        characters.push(values);
    }
    sort_characters(&mut characters, e);
    Ok(CharacterTable { exponent: e, classes: classes.to_vec(), characters })
}

/// Lifts `χ(g)` from its residues on the powers of `g`.
fn lift_value(group: &FiniteGroup, g: usize, chi: &[u64], degree: u64, z: u64, e: u64, p: u64) -> Result<Cyclotomic> {
    let o = group.element_order(g);
    let zo = pow_mod(z, e / o, p);
    let inv_o = inv_mod(o % p, p);
    let mut powers = Vec::with_capacity(o as usize);
    let mut x = 0;
    for _ in 0..o {
        powers.push(chi[group.class_of(x)]);
        x = group.mul(x, g);
    }
    let mut terms = Vec::new();
    let mut total = 0;
    for kk in 0..o {
        let mut m = 0;
        for (l, &v) in powers.iter().enumerate() {
            let exp = (o - kk * l as u64 % o) % o;
            m = (m + v * pow_mod(zo, exp, p)) % p;
        }
        m = m * inv_o % p;
        if m > degree {
            return Err(Error::CharacterTable(format!("eigenvalue multiplicity does not lift modulo {p}")));
        }
        total += m;
        if m > 0 {
            terms.push((kk * (e / o), Rational::from_integer((m as i64).into())));
        }
    }
    if total != degree {
        return Err(Error::CharacterTable(format!("multiplicities do not sum to the degree modulo {p}")));
    }
    Ok(Cyclotomic::from_exponents(e, terms))
}

/// Trivial character first, then by degree, then by value coordinates in
/// decreasing lexicographic order.
fn sort_characters(characters: &mut [Vec<Cyclotomic>], e: u64) {
    let key = |chi: &Vec<Cyclotomic>| -> (bool, Rational, std::cmp::Reverse<Vec<Vec<Rational>>>) {
        let trivial = chi.iter().all(|v| *v == Cyclotomic::one());
        let coords = chi.iter().map(|v| v.lift(e).coeffs().to_vec()).collect();
        (!trivial, chi[0].as_rational().unwrap_or_default(), std::cmp::Reverse(coords))
    };
    characters.sort_by_cached_key(key);
}

fn unit_vector(k: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

/// `(M v)_r = Σ_c M[r][c] v_c` where `M[r][c] = a_j[r][c]`.
fn mat_vec(m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    m.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&x, &y)| (acc + x % p * y) % p)).collect()
}

/// Kernel of the `rows × cols.len()` matrix given by its columns.
fn nullspace_mod(cols: &[Vec<u64>], rows: usize, p: u64) -> Vec<Vec<u64>> {
    let d = cols.len();
    let mut m: Vec<Vec<u64>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(pr) = (row..rows).find(|&r| m[r][col] != 0) else { continue };
        m.swap(pr, row);
        let inv = inv_mod(m[row][col], p);
        for x in m[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..d {
                    m[r][c] = (m[r][c] + p - f * m[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; d];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][free]) % p;
            }
            v
        })
        .collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Smallest prime `p ≡ 1 (mod e)` with `p > 2√n`.
fn first_prime_above(n: u64, e: u64) -> u64 {
    let mut p = 1;
    while !(is_prime(p) && p * p > 4 * n) {
        p += e;
    }
    p
}

fn next_prime_congruent(p: u64, e: u64) -> u64 {
    let mut q = p + e;
    while !is_prime(q) {
        q += e;
    }
    q
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).unwrap_or(1)
}
