//! Finite groups as explicit multiplication tables.
//!
//! Element `0` is always the identity. Conjugacy classes are ordered by
//! their smallest element, so the identity class comes first.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomic::lcm;
use crate::error::{Error, Result};

pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    size: usize,
    table: Vec<u32>,
    inverses: Vec<usize>,
    orders: Vec<u64>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    exponent: u64,
}

/// Conjugacy classes with their sizes and the group exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyData {
    pub classes: Vec<Vec<usize>>,
    pub class_sizes: Vec<usize>,
    pub exponent: u64,
}

impl FiniteGroup {
    /// Validates and wraps a multiplication table.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidTable(format!("entry {x} out of range in row {i}")));
                }
                table.push(x as u32);
            }
        }
        for a in 0..n {
            if table[a] as usize != a || table[a * n] as usize != a {
                return Err(Error::InvalidTable("element 0 is not the identity".into()));
            }
        }
        // Latin square: every row and column is a permutation
        for a in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for b in 0..n {
                let r = table[a * n + b] as usize;
                let c = table[b * n + a] as usize;
                if row_seen[r] || col_seen[c] {
                    return Err(Error::InvalidTable(format!("element {a} has no inverse")));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }
        let group = Self::from_raw(n, table);
        group.check_associative()?;
        Ok(group)
    }

    fn from_raw(size: usize, table: Vec<u32>) -> Self {
        let mut inverses = vec![0; size];
        for a in 0..size {
            inverses[a] = (0..size).find(|&b| table[a * size + b] == 0).expect("inverse exists");
        }
        let mut orders = vec![1u64; size];
        for a in 1..size {
            let mut x = a;
            let mut k = 1;
            while x != 0 {
                x = table[x * size + a] as usize;
                k += 1;
            }
            orders[a] = k;
        }
        let exponent = orders.iter().copied().fold(1, lcm);
        let mut group = Self { size, table, inverses, orders, classes: Vec::new(), class_of: vec![usize::MAX; size], exponent };
        group.compute_classes();
        group
    }

    fn compute_classes(&mut self) {
        let n = self.size;
        let mut classes = Vec::new();
        for x in 0..n {
            if self.class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut class: Vec<usize> = Vec::new();
            for g in 0..n {
                let y = self.mul(self.mul(g, x), self.inverses[g]);
                if self.class_of[y] == usize::MAX {
                    self.class_of[y] = id;
                    class.push(y);
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        self.classes = classes;
    }

    /// Light's associativity test over a greedy generating set.
    fn check_associative(&self) -> Result<()> {
        for s in self.generating_set() {
            for x in 0..self.size {
                let xs = self.mul(x, s);
                for y in 0..self.size {
                    if self.mul(xs, y) != self.mul(x, self.mul(s, y)) {
                        return Err(Error::InvalidTable(format!("not associative at ({x}, {s}, {y})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// A small generating set, chosen greedily by index.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: HashSet<usize> = HashSet::from([0]);
        for g in 1..self.size {
            if !span.contains(&g) {
                gens.push(g);
                span = self.closure(&gens).into_iter().collect();
            }
        }
        gens
    }

    /// Builds the group generated by permutations of `{1..degree}` given by
    /// their 1-based image lists.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>], cap: usize) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.len() != degree {
                return Err(Error::InvalidPermutation(format!("generator {i} has {} images, degree is {degree}", g.len())));
            }
            let mut seen = vec![false; degree];
            let mut zero_based = Vec::with_capacity(degree);
            for &img in g {
                if img == 0 || img > degree || seen[img - 1] {
                    return Err(Error::InvalidPermutation(format!("generator {i} is not a bijection of 1..{degree}")));
                }
                seen[img - 1] = true;
                zero_based.push((img - 1) as u32);
            }
            gens.push(zero_based);
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for s in &gens {
                let prod = compose(&elements[e], s);
                if !index.contains_key(&prod) {
                    if elements.len() == cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    index.insert(prod.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elements[a], &elements[b])] as u32;
            }
        }
        Ok(Self::from_raw(n, table))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % self.orders[a];
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.orders[a]
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.size).map(|a| (0..self.size).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn conjugacy_data(&self) -> ConjugacyData {
        ConjugacyData {
            classes: self.classes.clone(),
            class_sizes: self.classes.iter().map(Vec::len).collect(),
            exponent: self.exponent,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.size
    }

    /// Closure of a subset under multiplication, as a sorted element list.
    pub fn closure(&self, subset: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut elems = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for &s in subset {
                let p = self.mul(e, s);
                if !seen[p] {
                    seen[p] = true;
                    elems.push(p);
                    queue.push_back(p);
                }
            }
        }
        elems.sort_unstable();
        elems
    }

    /// The subgroup generated by `subset`, with its embedding into `self`.
    pub fn subgroup_from_subset(&self, subset: &[usize]) -> (FiniteGroup, Vec<usize>) {
        let elems = self.closure(subset);
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                table[i * n + j] = pos[&self.mul(a, b)] as u32;
            }
        }
        (Self::from_raw(n, table), elems)
    }

    /// Applies a relabeling `old index -> new index` (which must fix 0).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size;
        if perm.len() != n || perm[0] != 0 {
            return Err(Error::InvalidInput("relabeling must be a permutation fixing the identity".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidInput("relabeling is not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a] * n + perm[b]] = perm[self.mul(a, b)] as u32;
            }
        }
        Ok(Self::from_raw(n, table))
    }

    /// Whether `map` is an automorphism of this group.
    pub fn is_automorphism(&self, map: &[usize]) -> bool {
        if map.len() != self.size || map[0] != 0 {
            return false;
        }
        let mut seen = vec![false; self.size];
        for &x in map {
            if x >= self.size || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        (0..self.size).all(|a| (0..self.size).all(|b| map[self.mul(a, b)] == self.mul(map[a], map[b])))
    }

    /// Inner automorphism `x ↦ g x g⁻¹`.
    pub fn inner_automorphism(&self, g: usize) -> Vec<usize> {
        (0..self.size).map(|x| self.mul(self.mul(g, x), self.inv(g))).collect()
    }

    /// Hash of the exact table, sensitive to labeling.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.size as u64).to_le_bytes());
        for &x in &self.table {
            h.update(x.to_le_bytes());
        }
        format!("{:x}", h.finalize())
    }

    /// Relabeling-invariant cache key.
    ///
    /// Groups of order at most 8 get the hash of their lexicographically
    /// minimal relabeled table together with the relabeling that reaches
    /// it. Larger groups fall back to a hash of invariants (order, sorted
    /// class sizes, exponent, sorted element orders); callers must compare
    /// full tables on a hit.
    pub fn canonical_form(&self) -> CanonicalForm {
        if self.size <= 8 {
            let (table, relabeling) = self.minimal_relabeling();
            let mut h = Sha256::new();
            h.update(b"min");
            h.update((self.size as u64).to_le_bytes());
            for x in &table {
                h.update(x.to_le_bytes());
            }
            CanonicalForm { key: format!("min-{:x}", h.finalize()), relabeling: Some(relabeling) }
        } else {
            let mut sizes: Vec<usize> = self.classes.iter().map(Vec::len).collect();
            sizes.sort_unstable();
            let mut orders = self.orders.clone();
            orders.sort_unstable();
            let mut h = Sha256::new();
            h.update(b"inv");
            h.update((self.size as u64).to_le_bytes());
            h.update(self.exponent.to_le_bytes());
            for s in sizes {
                h.update((s as u64).to_le_bytes());
            }
            for o in orders {
                h.update(o.to_le_bytes());
            }
            CanonicalForm { key: format!("inv-{:x}", h.finalize()), relabeling: None }
        }
    }

    fn minimal_relabeling(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.size;
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        let mut rest: Vec<usize> = (1..n).collect();
        let mut consider = |order: &[usize]| {
            // order[k] is the old element that gets new label k + 1
            let mut perm = vec![0usize; n];
            for (k, &old) in order.iter().enumerate() {
                perm[old] = k + 1;
            }
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[perm[a] * n + perm[b]] = perm[self.mul(a, b)] as u32;
                }
            }
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, perm));
            }
        };
        heap_permutations(&mut rest, &mut consider);
        best.expect("at least one relabeling")
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        Self::from_raw(n, table)
    }

    /// Dihedral group of order `2n`: elements `r^k` at `k`, `r^k s` at `n + k`.
    pub fn dihedral(n: usize) -> Self {
        let size = 2 * n;
        let decode = |x: usize| (x % n, x >= n);
        let encode = |k: usize, refl: bool| if refl { n + k } else { k };
        let mut table = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                let (ka, ra) = decode(a);
                let (kb, rb) = decode(b);
                // r^ka s^ra · r^kb s^rb = r^(ka ± kb) s^(ra xor rb)
                let k = if ra { (ka + n - kb) % n } else { (ka + kb) % n };
                table[a * size + b] = encode(k, ra ^ rb) as u32;
            }
        }
        Self::from_raw(size, table)
    }

    pub fn quaternion() -> Self {
        // ±1, ±i, ±j, ±k as signed unit quaternions
        let units = [(0, 1i8), (0, -1), (1, 1), (1, -1), (2, 1), (2, -1), (3, 1), (3, -1)];
        let prod = |a: usize, b: usize| -> (usize, i8) {
            const T: [[(usize, i8); 4]; 4] = [
                [(0, 1), (1, 1), (2, 1), (3, 1)],
                [(1, 1), (0, -1), (3, 1), (2, -1)],
                [(2, 1), (3, -1), (0, -1), (1, 1)],
                [(3, 1), (2, 1), (1, -1), (0, -1)],
            ];
            T[a][b]
        };
        let idx = |(u, s): (usize, i8)| units.iter().position(|&x| x == (u, s)).unwrap();
        let mut table = vec![0u32; 64];
        for (i, &(ua, sa)) in units.iter().enumerate() {
            for (j, &(ub, sb)) in units.iter().enumerate() {
                let (u, s) = prod(ua, ub);
                table[i * 8 + j] = idx((u, s * sa * sb)) as u32;
            }
        }
        Self::from_raw(8, table)
    }

    pub fn symmetric(n: usize) -> Self {
        if n <= 1 {
            return Self::cyclic(1);
        }
        let transposition = perm_from_cycles(n, &[&[1, 2]]);
        let cycle: Vec<usize> = (1..=n).map(|i| i % n + 1).collect();
        Self::from_permutations(n, &[transposition, cycle], usize::MAX).expect("valid generators")
    }

    pub fn alternating(n: usize) -> Self {
        let gens: Vec<Vec<usize>> = (3..=n).map(|k| perm_from_cycles(n, &[&[1, 2, k]])).collect();
        if gens.is_empty() {
            return Self::cyclic(1);
        }
        Self::from_permutations(n, &gens, usize::MAX).expect("valid generators")
    }

    /// Direct product; element `(a, b)` sits at index `a * |H| + b`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.size, h.size);
        let size = m * n;
        let mut table = vec![0u32; size * size];
        for x in 0..size {
            for y in 0..size {
                let a = g.mul(x / n, y / n);
                let b = h.mul(x % n, y % n);
                table[x * size + y] = (a * n + b) as u32;
            }
        }
        Self::from_raw(size, table)
    }
}

/// Cache key produced by [`FiniteGroup::canonical_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: String,
    /// `relabeling[old] = canonical index`, when a minimal relabeling was searched.
    pub relabeling: Option<Vec<usize>>,
}

fn heap_permutations(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `(g∘h)(x) = g(h(x))` on 0-based image vectors.
fn compose(g: &[u32], h: &[u32]) -> Vec<u32> {
    h.iter().map(|&x| g[x as usize]).collect()
}

/// 1-based image list of a product of disjoint cycles.
pub fn perm_from_cycles(degree: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut images: Vec<usize> = (1..=degree).collect();
    for cycle in cycles {
        for (i, &x) in cycle.iter().enumerate() {
            images[x - 1] = cycle[(i + 1) % cycle.len()];
        }
    }
    images
}

/// A map between finite groups, not yet known to be a homomorphism.
#[derive(Clone, Debug)]
pub struct GroupHomomorphism {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomomorphismCheck {
    Valid { kernel: Vec<usize> },
    /// `map(x·y) ≠ map(x)·map(y)` for this pair, or a malformed map.
    Invalid { x: usize, y: usize },
}

impl HomomorphismCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, HomomorphismCheck::Valid { .. })
    }
}

impl GroupHomomorphism {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, map: Vec<usize>) -> Self {
        Self { source, target, map }
    }

    pub fn validate(&self) -> HomomorphismCheck {
        let (s, t) = (&self.source, &self.target);
        if self.map.len() != s.size() || self.map.iter().any(|&x| x >= t.size()) || self.map[0] != 0 {
            return HomomorphismCheck::Invalid { x: 0, y: 0 };
        }
        for x in 0..s.size() {
            for y in 0..s.size() {
                if self.map[s.mul(x, y)] != t.mul(self.map[x], self.map[y]) {
                    return HomomorphismCheck::Invalid { x, y };
                }
            }
        }
        HomomorphismCheck::Valid { kernel: (0..s.size()).filter(|&x| self.map[x] == 0).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }
}

/// Wire form of a finite group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupSpec {
    Permutation { degree: usize, generators: Vec<Vec<usize>> },
    Table { size: usize, table: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self, cap: usize) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Permutation { degree, generators } => FiniteGroup::from_permutations(*degree, generators, cap),
            GroupSpec::Table { size, table } => {
                if table.len() != *size {
                    return Err(Error::InvalidTable(format!("declared size {size}, got {} rows", table.len())));
                }
                if *size > cap {
                    return Err(Error::CapExceeded { cap });
                }
                FiniteGroup::from_table(table.clone())
            }
        }
    }

    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupSpec::Table { size: g.size(), table: g.table_rows() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_sizes(g: &FiniteGroup) -> Vec<usize> {
        let mut s = g.conjugacy_data().class_sizes;
        s.sort_unstable();
        s
    }

    #[test]
    fn s3_from_permutations() {
        let g = FiniteGroup::from_permutations(3, &[perm_from_cycles(3, &[&[1, 2]]), perm_from_cycles(3, &[&[1, 2, 3]])], 100)
            .unwrap();
        assert_eq!(g.size(), 6);
        let data = g.conjugacy_data();
        assert_eq!(data.class_sizes.iter().sum::<usize>(), 6);
        assert_eq!(sorted_sizes(&g), vec![1, 2, 3]);
        assert_eq!(data.exponent, 6);
        assert_eq!(data.classes[0], vec![0]);
    }

    #[test]
    fn klein_four() {
        let g = FiniteGroup::from_permutations(
            4,
            &[perm_from_cycles(4, &[&[1, 2], &[3, 4]]), perm_from_cycles(4, &[&[1, 3], &[2, 4]])],
            100,
        )
        .unwrap();
        assert_eq!(g.size(), 4);
        assert!((0..4).all(|x| g.mul(x, x) == 0));
    }

    #[test]
    fn cap_and_bad_permutations() {
        let s4 = [perm_from_cycles(4, &[&[1, 2]]), perm_from_cycles(4, &[&[1, 2, 3, 4]])];
        assert_eq!(FiniteGroup::from_permutations(4, &s4, 10), Err(Error::CapExceeded { cap: 10 }));
        assert!(matches!(
            FiniteGroup::from_permutations(3, &[vec![1, 1, 2]], 10),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(FiniteGroup::from_permutations(3, &[vec![1, 2]], 10).is_err());
    }

    #[test]
    fn cyclic_and_quaternion_classes() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.conjugacy_data().class_sizes, vec![1, 1, 1, 1]);
        assert_eq!(z4.exponent(), 4);
        let q8 = FiniteGroup::quaternion();
        assert_eq!(sorted_sizes(&q8), vec![1, 1, 2, 2, 2]);
        assert_eq!(q8.exponent(), 4);
        assert_eq!(FiniteGroup::dihedral(4).num_classes(), 5);
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(FiniteGroup::cyclic(5).table_rows()).is_ok());
        // identity not at 0
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).is_err());
        // Latin square with identity that is not associative (order-5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(loop5), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn homomorphism_examples() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let red = GroupHomomorphism::new(z4.clone(), z2, vec![0, 1, 0, 1]);
        assert_eq!(red.validate(), HomomorphismCheck::Valid { kernel: vec![0, 2] });
        let sq = GroupHomomorphism::new(z4.clone(), z4, vec![0, 2, 0, 2]);
        assert_eq!(sq.validate(), HomomorphismCheck::Valid { kernel: vec![0, 2] });
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let z3 = Arc::new(FiniteGroup::cyclic(3));
        // send some transposition to the generator of Z/3
        let t = (1..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let mut map = vec![0; 6];
        map[t] = 1;
        assert!(!GroupHomomorphism::new(s3, z3, map).validate().is_valid());
    }

    #[test]
    fn subgroups_by_closure() {
        let s3 = FiniteGroup::symmetric(3);
        let t = (1..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let c = (1..6).find(|&x| s3.element_order(x) == 3).unwrap();
        assert_eq!(s3.subgroup_from_subset(&[0, t]).0.size(), 2);
        assert_eq!(s3.subgroup_from_subset(&[c]).0.size(), 3);
        let d4 = FiniteGroup::dihedral(4);
        let (z, emb) = d4.subgroup_from_subset(&[2]);
        assert_eq!(z.size(), 2);
        assert!(emb.iter().all(|&x| d4.classes()[d4.class_of(x)].len() == 1));
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let z4 = FiniteGroup::cyclic(4);
        let shuffled = z4.relabel(&[0, 3, 1, 2]).unwrap();
        assert_ne!(z4.content_hash(), shuffled.content_hash());
        assert_eq!(z4.canonical_form().key, shuffled.canonical_form().key);
        assert_ne!(z4.canonical_form().key, FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)).canonical_form().key);
    }
}
