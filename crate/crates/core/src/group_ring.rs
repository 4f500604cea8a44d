//! Elements and matrices over the group ring `F[G]` of a finite group.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::scalar::{Field, StarField};

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A sparse element `Σ x_g g`; zero coefficients are never stored.
#[derive(Clone)]
pub struct GroupRingElement<F = Cyclotomic> {
    group: Arc<FiniteGroup>,
    coeffs: BTreeMap<usize, F>,
}

impl<F: Field> PartialEq for GroupRingElement<F> {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.coeffs == other.coeffs
    }
}

impl<F: fmt::Debug> fmt::Debug for GroupRingElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl<F: Field> GroupRingElement<F> {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        Self { group: group.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(group: &Arc<FiniteGroup>) -> Self {
        Self::basis(group, 0)
    }

    /// The group element `g` itself.
    pub fn basis(group: &Arc<FiniteGroup>, g: usize) -> Self {
        Self::monomial(group, g, F::one())
    }

    pub fn monomial(group: &Arc<FiniteGroup>, g: usize, c: F) -> Self {
        assert!(g < group.size(), "element {g} out of range");
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(g, c);
        }
        Self { group: group.clone(), coeffs }
    }

    /// Sums the given terms, combining repeated elements.
    pub fn from_terms(group: &Arc<FiniteGroup>, terms: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut x = Self::zero(group);
        for (g, c) in terms {
            assert!(g < group.size(), "element {g} out of range");
            x.add_term(g, c);
        }
        x
    }

    pub fn from_dense(group: &Arc<FiniteGroup>, dense: Vec<F>) -> Self {
        Self::from_terms(group, dense.into_iter().enumerate())
    }

    /// `(1/|S|) Σ_{s∈S} s` for a subset of (typically a subgroup of) `G`.
    pub fn averaging(group: &Arc<FiniteGroup>, subset: &[usize]) -> Self {
        let w = F::one() / F::from_int(subset.len() as i64);
        Self::from_terms(group, subset.iter().map(|&g| (g, w.clone())))
    }

    fn add_term(&mut self, g: usize, c: F) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&g) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.coeffs.insert(g, s);
                }
            }
            None => {
                self.coeffs.insert(g, c);
            }
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeff(&self, g: usize) -> F {
        self.coeffs.get(&g).cloned().unwrap_or_else(F::zero)
    }

    /// Nonzero terms in increasing element order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &F)> {
        self.coeffs.iter().map(|(&g, c)| (g, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dense(&self) -> Vec<F> {
        (0..self.group.size()).map(|g| self.coeff(g)).collect()
    }

    /// Coefficient of the identity, i.e. the canonical trace.
    pub fn trace(&self) -> F {
        self.coeff(0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&g, c) in &other.coeffs {
            out.add_term(g, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&g, c) in &other.coeffs {
            out.add_term(g, -c.clone());
        }
        Ok(out)
    }

    /// Convolution `(xy)_g = Σ_{ab=g} x_a y_b`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.group);
        for (&a, x) in &self.coeffs {
            for (&b, y) in &other.coeffs {
                out.add_term(self.group.mul(a, b), x.clone() * y);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.group);
        }
        let coeffs = self.coeffs.iter().map(|(&g, x)| (g, x.clone() * c)).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// `x · g`.
    pub fn right_translate(&self, g: usize) -> Self {
        let coeffs = self.coeffs.iter().map(|(&a, c)| (self.group.mul(a, g), c.clone())).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// `g · x`.
    pub fn left_translate(&self, g: usize) -> Self {
        let coeffs = self.coeffs.iter().map(|(&a, c)| (self.group.mul(g, a), c.clone())).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// Whether the coefficients are constant on conjugacy classes.
    pub fn is_central(&self) -> bool {
        self.group.classes().iter().all(|class| {
            let c = self.coeff(class[0]);
            class[1..].iter().all(|&g| self.coeff(g) == c)
        })
    }

    pub fn is_idempotent(&self) -> bool {
        self.checked_mul(self).map(|sq| sq == *self).unwrap_or(false)
    }

    /// Transports the element along an injective map of groups.
    pub fn push_forward(&self, target: &Arc<FiniteGroup>, map: &[usize]) -> Self {
        Self::from_terms(target, self.coeffs.iter().map(|(&g, c)| (map[g], c.clone())))
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> GroupRingElement<G> {
        GroupRingElement::from_terms(&self.group, self.coeffs.iter().map(|(&g, c)| (g, f(c))))
    }
}

impl<F: StarField> GroupRingElement<F> {
    /// `(x*)_g = conj(x_{g⁻¹})`.
    pub fn star(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&g, c)| (self.group.inv(g), c.conj())).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// `⟨x, y⟩ = Σ_g x_g conj(y_g)`.
    pub fn inner(&self, other: &Self) -> Result<F> {
        self.check(other)?;
        let mut acc = F::zero();
        for (g, x) in &self.coeffs {
            if let Some(y) = other.coeffs.get(g) {
                acc = acc + x.clone() * y.conj();
            }
        }
        Ok(acc)
    }

    pub fn is_projection(&self) -> bool {
        self.is_idempotent() && self.star() == *self
    }
}

impl GroupRingElement<Cyclotomic> {
    /// Applies `ω ↦ ω^j` to every coefficient.
    pub fn galois_apply(&self, j: u64) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (&g, c) in &self.coeffs {
            coeffs.insert(g, c.galois_apply(j)?);
        }
        Ok(Self { group: self.group.clone(), coeffs })
    }
}

impl<F: Field> Add for &GroupRingElement<F> {
    type Output = GroupRingElement<F>;
    fn add(self, o: Self) -> GroupRingElement<F> {
        self.checked_add(o).expect("group ring operands over different groups")
    }
}

impl<F: Field> Sub for &GroupRingElement<F> {
    type Output = GroupRingElement<F>;
    fn sub(self, o: Self) -> GroupRingElement<F> {
        self.checked_sub(o).expect("group ring operands over different groups")
    }
}

impl<F: Field> Mul for &GroupRingElement<F> {
    type Output = GroupRingElement<F>;
    fn mul(self, o: Self) -> GroupRingElement<F> {
        self.checked_mul(o).expect("group ring operands over different groups")
    }
}

impl<F: Field> Neg for &GroupRingElement<F> {
    type Output = GroupRingElement<F>;
    fn neg(self) -> GroupRingElement<F> {
        let coeffs = self.coeffs.iter().map(|(&g, c)| (g, -c.clone())).collect();
        GroupRingElement { group: self.group.clone(), coeffs }
    }
}

/// An `n × m` matrix over `F[G]`.
#[derive(Clone)]
pub struct GroupRingMatrix<F = Cyclotomic> {
    group: Arc<FiniteGroup>,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement<F>>,
}

impl<F: Field> PartialEq for GroupRingMatrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && same_group(&self.group, &other.group)
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.coeffs == b.coeffs)
    }
}

impl<F: fmt::Debug> fmt::Debug for GroupRingMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GroupRingMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.entries[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F: Field> GroupRingMatrix<F> {
    pub fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        Self { group: group.clone(), rows, cols, entries: vec![GroupRingElement::zero(group); rows * cols] }
    }

    pub fn identity(group: &Arc<FiniteGroup>, n: usize) -> Self {
        let mut m = Self::zeros(group, n, n);
        for i in 0..n {
            m.entries[i * n + i] = GroupRingElement::one(group);
        }
        m
    }

    /// The `1 × 1` matrix `[x]`.
    pub fn scalar(x: GroupRingElement<F>) -> Self {
        Self { group: x.group.clone(), rows: 1, cols: 1, entries: vec![x] }
    }

    pub fn from_rows(group: &Arc<FiniteGroup>, rows: Vec<Vec<GroupRingElement<F>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let entries: Vec<_> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !same_group(&e.group, group)) {
            return Err(Error::GroupMismatch);
        }
        Ok(Self { group: group.clone(), rows: r, cols: c, entries })
    }

    pub fn from_fn(
        group: &Arc<FiniteGroup>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> GroupRingElement<F>,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let e = f(r, c);
                assert!(same_group(&e.group, group), "entry over a different group");
                entries.push(e);
            }
        }
        Self { group: group.clone(), rows, cols, entries }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GroupRingElement<F> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: GroupRingElement<F>) {
        assert!(same_group(&x.group, &self.group), "entry over a different group");
        self.entries[r * self.cols + c] = x;
    }

    pub fn entries(&self) -> &[GroupRingElement<F>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GroupRingElement::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.group, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = GroupRingElement::zero(&self.group);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        let entries = self.entries.iter().map(|e| e.scale(c)).collect();
        Self { group: self.group.clone(), rows: self.rows, cols: self.cols, entries }
    }

    /// `Σ_i (A_ii)_e`, the non-normalized canonical trace.
    pub fn canonical_trace(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("trace of a {}x{} matrix", self.rows, self.cols)));
        }
        Ok((0..self.rows).fold(F::zero(), |acc, i| acc + self.get(i, i).trace()))
    }

    pub fn is_idempotent(&self) -> bool {
        self.checked_mul(self).map(|sq| sq == *self).unwrap_or(false)
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> GroupRingMatrix<G> {
        GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.map_coeffs(&f)).collect(),
        }
    }
}

impl<F: StarField> GroupRingMatrix<F> {
    /// `(A*)_{ij} = (A_{ji})*`.
    pub fn star(&self) -> Self {
        Self::from_fn(&self.group, self.cols, self.rows, |r, c| self.get(c, r).star())
    }

    pub fn is_projection(&self) -> bool {
        self.is_square() && self.is_idempotent() && self.star() == *self
    }
}

impl GroupRingMatrix<Cyclotomic> {
    pub fn galois_apply(&self, j: u64) -> Result<Self> {
        let entries = self.entries.iter().map(|e| e.galois_apply(j)).collect::<Result<Vec<_>>>()?;
        Ok(Self { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }
}

/// Wire form of one term of a group-ring element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermWire {
    pub coeff: Cyclotomic,
    pub elem: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementWire {
    pub terms: Vec<TermWire>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixWire {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ElementWire>>,
}

impl ElementWire {
    pub fn from_element(x: &GroupRingElement) -> Self {
        Self { terms: x.terms().map(|(elem, c)| TermWire { coeff: c.clone(), elem }).collect() }
    }

    pub fn to_element(&self, group: &Arc<FiniteGroup>) -> Result<GroupRingElement> {
        if let Some(t) = self.terms.iter().find(|t| t.elem >= group.size()) {
            return Err(Error::InvalidInput(format!("element index {} outside a group of order {}", t.elem, group.size())));
        }
        Ok(GroupRingElement::from_terms(group, self.terms.iter().map(|t| (t.elem, t.coeff.clone()))))
    }
}

impl MatrixWire {
    pub fn from_matrix(m: &GroupRingMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows()).map(|r| (0..m.cols()).map(|c| ElementWire::from_element(m.get(r, c))).collect()).collect(),
        }
    }

    pub fn to_matrix(&self, group: &Arc<FiniteGroup>) -> Result<GroupRingMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::ShapeMismatch(format!("declared {}x{} does not match entries", self.rows, self.cols)));
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.to_element(group)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if self.rows == 0 || self.cols == 0 {
            return Ok(GroupRingMatrix::zeros(group, self.rows, self.cols));
        }
        GroupRingMatrix::from_rows(group, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n))
    }

    #[test]
    fn zero_divisors_in_z2() {
        let g = z(2);
        let one = GroupRingElement::<Rational>::one(&g);
        let s = GroupRingElement::basis(&g, 1);
        assert!((&(&one + &s) * &(&one - &s)).is_zero());
    }

    #[test]
    fn averaging_projection_is_idempotent() {
        let g = z(3);
        let p = GroupRingElement::<Rational>::averaging(&g, &[0, 1, 2]);
        assert_eq!(&p * &p, p);
        assert_eq!(p.star(), p);
        assert_eq!(p.inner(&GroupRingElement::one(&g)).unwrap(), rat(1, 3));
    }

    #[test]
    fn inner_product_examples() {
        let g = z(4);
        let e1 = GroupRingElement::<Cyclotomic>::basis(&g, 1);
        let e2 = GroupRingElement::<Cyclotomic>::basis(&g, 2);
        assert!(e1.inner(&e2).unwrap().is_zero());
        assert_eq!(e1.inner(&e1).unwrap(), Cyclotomic::from(1));
        let x = GroupRingElement::from_terms(&g, [(0, Cyclotomic::from(1)), (1, Cyclotomic::root_of_unity(4, 1))]);
        assert_eq!(x.inner(&x).unwrap(), Cyclotomic::from(2));
    }

    #[test]
    fn single_term_involution() {
        let g = z(5);
        let w = Cyclotomic::root_of_unity(5, 2);
        let x = GroupRingElement::monomial(&g, 2, w.clone());
        assert_eq!(x.star(), GroupRingElement::monomial(&g, 3, w.conjugate()));
    }

    #[test]
    fn trace_of_subgroup_projection_in_s3() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = (1..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let p = GroupRingElement::<Rational>::averaging(&s3, &[0, t]);
        let m = GroupRingMatrix::scalar(p);
        assert_eq!(m.canonical_trace().unwrap(), rat(1, 2));
        assert_eq!(GroupRingMatrix::<Rational>::identity(&s3, 3).canonical_trace().unwrap(), rat(3, 1));
        assert!(GroupRingMatrix::<Rational>::zeros(&s3, 2, 3).canonical_trace().is_err());
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = GroupRingElement::<Rational>::one(&z(2));
        let b = GroupRingElement::<Rational>::one(&z(3));
        assert_eq!(a.checked_mul(&b), Err(Error::GroupMismatch));
        // structurally equal groups behind different pointers are compatible
        assert!(a.checked_add(&GroupRingElement::one(&z(2))).is_ok());
    }

    #[test]
    fn wire_roundtrip() {
        let g = z(3);
        let x = GroupRingElement::from_terms(&g, [(0, Cyclotomic::from(1)), (2, Cyclotomic::root_of_unity(3, 1))]);
        let m = GroupRingMatrix::from_rows(&g, vec![vec![x.clone(), x.star()]]).unwrap();
        let json = serde_json::to_string(&MatrixWire::from_matrix(&m)).unwrap();
        let back: MatrixWire = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix(&g).unwrap(), m);
        let bad = ElementWire { terms: vec![TermWire { coeff: Cyclotomic::from(1), elem: 7 }] };
        assert!(bad.to_element(&g).is_err());
    }
}
