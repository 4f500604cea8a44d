//! The lattice `L_K(G)` in the `P^i` coordinates, membership, discreteness
//! bounds and the matrix sizes `L_j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::atiyah::{minimal_projection, verify_with_blocks, AtiyahContext, SubgroupBlocks};
use crate::cyclotomic::FieldSpec;
use crate::error::{Error, Result};
use crate::group_ring::GroupRingElement;
use crate::idempotents::CentralIdempotentSet;
use crate::scalar::{rational_to_string, Rational};
use crate::virtual_group::VirtualGroup;

/// Row-style Hermite normal form: upper triangular, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`, zero rows dropped.
pub fn hermite_normal_form(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut r = 0;
    for c in 0..ncols {
        loop {
            let pivot = (r..rows.len()).filter(|&k| !rows[k][c].is_zero()).min_by_key(|&k| rows[k][c].abs());
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut clean = true;
            for k in (r + 1)..rows.len() {
                if rows[k][c].is_zero() {
                    continue;
                }
                let q = rows[k][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[k].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                clean &= rows[k][c].is_zero();
            }
            if clean {
                break;
            }
        }
        if r == rows.len() || rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
        }
        for k in 0..r {
            let q = rows[k][c].div_floor(&rows[r][c]);
            if q.is_zero() {
                continue;
            }
            let pivot_row = rows[r].clone();
            for (x, y) in rows[k].iter_mut().zip(&pivot_row) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// One `τ^u(Q_α) = q·P^block` together with where it came from.
#[derive(Clone, Debug)]
pub struct LatticeGenerator {
    pub subgroup: String,
    pub subgroup_order: usize,
    pub block: usize,
    pub h_block: usize,
    pub q: Rational,
    pub rank: usize,
    /// No projection was constructed; the rank `n·|O|` was assumed.
    pub assumed: bool,
}

#[derive(Clone, Debug)]
pub struct AtiyahLattice {
    pub model: String,
    pub field: FieldSpec,
    pub lcm: u64,
    pub delta_order: usize,
    /// `dim_C(P^i·C[Δ⁺])`.
    pub dims: Vec<usize>,
    /// `lcm·dims[i]`; coordinate `i` is multiplied by this before the HNF.
    pub scaling: Vec<BigInt>,
    pub basis_hnf: Vec<Vec<BigInt>>,
    pub generators: Vec<LatticeGenerator>,
    pub superlattice: bool,
    pub blocks: CentralIdempotentSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LjReport {
    pub block: usize,
    /// Closed gcd formula over the generators of the block.
    pub formula: u64,
    /// Common denominator of the block's lattice gap.
    pub from_lattice: u64,
}

impl LjReport {
    pub fn agree(&self) -> bool {
        self.formula == self.from_lattice
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockBound {
    pub block: usize,
    pub min_denominator: BigInt,
    pub bound: BigInt,
    pub divides: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretenessCertificate {
    pub blocks: Vec<BlockBound>,
    /// Every generator has canonical trace in `(1/lcm)Z`.
    pub strong_atiyah: bool,
}

impl DiscretenessCertificate {
    pub fn certified(&self) -> bool {
        self.strong_atiyah && self.blocks.iter().all(|b| b.divides)
    }

    /// lcm of the block denominators.
    pub fn min_denominator(&self) -> BigInt {
        self.blocks.iter().map(|b| b.min_denominator.clone()).fold(BigInt::one(), |a, b| a.lcm(&b))
    }
}

const SCHUR_CAVEAT: &str = "its Schur index over K may exceed 1, and the exact lattice would need Schur indices; \
rerun in superlattice mode for an upper approximation with every Schur index taken to be 1";

fn generator(
    ctx: &AtiyahContext,
    model: &VirtualGroup,
    a: usize,
    blocks: &SubgroupBlocks,
    o: usize,
    superlattice: bool,
) -> Result<LatticeGenerator> {
    let entry = &model.subgroups[a];
    match minimal_projection(ctx, blocks, o)? {
        Some(q) => {
            let r = verify_with_blocks(ctx, entry, blocks, &q, false)?;
            if !r.agree {
                return Err(Error::Verification(format!(
                    "trace routes disagree for block {o} of {}: {} / {} / {}",
                    entry.name,
                    rational_to_string(&r.route_projection),
                    rational_to_string(&r.route_dimension),
                    rational_to_string(&r.route_von_neumann)
                )));
            }
            Ok(LatticeGenerator {
                subgroup: entry.name.clone(),
                subgroup_order: entry.group.size(),
                block: r.block,
                h_block: o,
                q: r.route_projection,
                rank: r.rank,
                assumed: false,
            })
        }
        None if superlattice => {
            let rank = blocks.minimal_rank(o);
            let i = blocks.parent[o];
            let q = Rational::new(
                BigInt::from(rank * model.delta_plus.size()),
                BigInt::from(entry.group.size() * ctx.delta_ranks[i]),
            );
            Ok(LatticeGenerator {
                subgroup: entry.name.clone(),
                subgroup_order: entry.group.size(),
                block: i,
                h_block: o,
                q,
                rank,
                assumed: true,
            })
        }
        None => Err(Error::NonSplit(format!("no minimal projection found for block {o} of K[{}]; {SCHUR_CAVEAT}", entry.name))),
    }
}

/// Builds `L_K(G)` from one irreducible projection per block per catalog subgroup.
pub fn build_lattice(model: &VirtualGroup, field: &FieldSpec, superlattice: bool) -> Result<AtiyahLattice> {
    let ctx = AtiyahContext::new(model, field)?;
    let blocks: Vec<SubgroupBlocks> =
        model.subgroups.par_iter().map(|e| SubgroupBlocks::new(&ctx, e)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        blocks.iter().enumerate().flat_map(|(a, b)| (0..b.idempotents.c_k()).map(move |o| (a, o))).collect();
    let generators = jobs
        .par_iter()
        .map(|&(a, o)| generator(&ctx, model, a, &blocks[a], o, superlattice))
        .collect::<Result<Vec<_>>>()?;

    let c = ctx.delta.c_k();
    let scaling: Vec<BigInt> = ctx.delta_ranks.iter().map(|&d| BigInt::from(model.lcm) * BigInt::from(d)).collect();
    let mut rows = Vec::with_capacity(generators.len());
    for g in &generators {
        let scaled = &g.q * Rational::from_integer(scaling[g.block].clone());
        if !scaled.is_integer() {
            return Err(Error::Verification(format!(
                "q = {} from {} is not a multiple of 1/(lcm·dim P^{})",
                rational_to_string(&g.q),
                g.subgroup,
                g.block
            )));
        }
        let mut row = vec![BigInt::zero(); c];
        row[g.block] = scaled.to_integer();
        rows.push(row);
    }
    Ok(AtiyahLattice {
        model: model.name.clone(),
        field: field.clone(),
        lcm: model.lcm,
        delta_order: model.delta_plus.size(),
        dims: ctx.delta_ranks.clone(),
        scaling,
        basis_hnf: hermite_normal_form(rows, c),
        generators,
        superlattice,
        blocks: ctx.delta,
    })
}

impl AtiyahLattice {
    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// True when some generator was assumed rather than constructed.
    pub fn is_upper_approximation(&self) -> bool {
        self.generators.iter().any(|g| g.assumed)
    }

    fn check_len(&self, coords: &[Rational]) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!("{} coordinates for {} blocks", coords.len(), self.rank())));
        }
        Ok(())
    }

    /// Exact membership of `Σ coords_i P^i`.
    pub fn contains(&self, coords: &[Rational]) -> Result<bool> {
        self.check_len(coords)?;
        let mut v = Vec::with_capacity(coords.len());
        for (x, s) in coords.iter().zip(&self.scaling) {
            let y = x * Rational::from_integer(s.clone());
            if !y.is_integer() {
                return Ok(false);
            }
            v.push(y.to_integer());
        }
        for row in &self.basis_hnf {
            let c = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return Ok(false);
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        Ok(v.iter().all(Zero::is_zero))
    }

    /// `P`-coordinates of a central element of `K[Δ⁺]` in the span of the `P^i`.
    pub fn coordinates(&self, x: &GroupRingElement) -> Result<Vec<Rational>> {
        let coords = self
            .blocks
            .p
            .iter()
            .map(|p| {
                (x.inner(p)? / p.inner(p)?)
                    .as_rational()
                    .ok_or_else(|| Error::InvalidInput("element has irrational P-coordinates".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.element(&coords)? != *x {
            return Err(Error::InvalidInput("element is not in the span of the P^i".into()));
        }
        Ok(coords)
    }

    pub fn element(&self, coords: &[Rational]) -> Result<GroupRingElement> {
        self.check_len(coords)?;
        let group = self.blocks.p[0].group().clone();
        Ok(coords
            .iter()
            .zip(&self.blocks.p)
            .fold(GroupRingElement::zero(&group), |acc, (c, p)| &acc + &p.scale(&c.clone().into())))
    }

    /// Smallest positive coefficient of each `P^i` in the lattice.
    ///
    /// Every generator is a multiple of a single `P^i`, so the lattice is the
    /// direct sum of these one-dimensional pieces.
    pub fn block_gaps(&self) -> Result<Vec<Rational>> {
        (0..self.rank())
            .map(|i| {
                let g = self.basis_hnf.iter().fold(BigInt::zero(), |acc, row| acc.gcd(&row[i]));
                if g.is_zero() {
                    return Err(Error::IncompleteCatalog(format!("no generator lies in block {i}")));
                }
                Ok(Rational::new(g, self.scaling[i].clone()))
            })
            .collect()
    }

    /// `L_j` by the closed formula and from the lattice gap.
    pub fn l_j(&self, j: usize) -> Result<LjReport> {
        if j >= self.rank() {
            return Err(Error::InvalidInput(format!("block {j} out of range (have {})", self.rank())));
        }
        let gens: Vec<&LatticeGenerator> = self.generators.iter().filter(|g| g.block == j).collect();
        if gens.is_empty() {
            return Err(Error::IncompleteCatalog(format!("no irreducible projection Q with QP^{j} = Q")));
        }
        let top = self.lcm * self.dims[j] as u64;
        let g = gens.iter().fold(top, |acc, a| {
            acc.gcd(&(a.rank as u64 * (self.lcm / a.subgroup_order as u64) * self.delta_order as u64))
        });
        let gap = &self.block_gaps()?[j];
        let from_lattice = gap.denom().to_u64().ok_or_else(|| Error::InvalidInput("denominator overflow".into()))?;
        Ok(LjReport { block: j, formula: top / g, from_lattice })
    }

    pub fn all_l(&self) -> Result<Vec<LjReport>> {
        (0..self.rank()).map(|j| self.l_j(j)).collect()
    }

    pub fn discreteness_certificate(&self) -> Result<DiscretenessCertificate> {
        let gaps = self.block_gaps()?;
        let blocks = gaps
            .iter()
            .enumerate()
            .map(|(i, gap)| {
                let bound = BigInt::from(self.lcm) * BigInt::from(self.dims[i]);
                BlockBound { block: i, min_denominator: gap.denom().clone(), divides: (&bound % gap.denom()).is_zero(), bound }
            })
            .collect();
        let lcm = Rational::from_integer(self.lcm.into());
        let strong_atiyah = self.generators.iter().all(|g| {
            let trace = &g.q * Rational::new(self.dims[g.block].into(), self.delta_order.into());
            (trace * &lcm).is_integer()
        });
        Ok(DiscretenessCertificate { blocks, strong_atiyah })
    }

    /// Whether `coarse`, a lattice of the same model over a smaller field,
    /// lies inside this one. Each coarse `P` is a sum of fine `P`.
    pub fn contains_lattice(&self, coarse: &AtiyahLattice) -> Result<bool> {
        let over: Vec<Vec<usize>> = coarse
            .blocks
            .p
            .iter()
            .map(|pc| (0..self.rank()).filter(|&k| (&self.blocks.p[k] * pc) == self.blocks.p[k]).collect())
            .collect();
        let covered: usize = over.iter().map(Vec::len).sum();
        if covered != self.rank() {
            return Err(Error::InvalidInput("blocks of the two lattices are not nested".into()));
        }
        for row in &coarse.basis_hnf {
            let mut fine = vec![Rational::zero(); self.rank()];
            for (c, x) in row.iter().enumerate() {
                let coord = Rational::new(x.clone(), coarse.scaling[c].clone());
                for &k in &over[c] {
                    fine[k] = coord.clone();
                }
            }
            if !self.contains(&fine)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The lattice report as JSON.
    pub fn report_json(&self) -> Result<Value> {
        let l = self.all_l()?;
        let cert = self.discreteness_certificate()?;
        Ok(json!({
            "model": self.model,
            "field": self.field,
            "lcm": self.lcm,
            "dims": self.dims,
            "basis_hnf": self.basis_hnf.iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "scaling": self.scaling.iter().map(int_json).collect::<Vec<_>>(),
            "gaps": self.block_gaps()?.iter().map(rational_to_string).collect::<Vec<_>>(),
            "generators": self.generators.iter().map(|g| json!({
                "subgroup": g.subgroup,
                "block": g.block,
                "q": rational_to_string(&g.q),
                "rank": g.rank,
                "assumed": g.assumed,
            })).collect::<Vec<_>>(),
            "L": l.iter().map(|r| r.formula).collect::<Vec<_>>(),
            "upper_approximation": self.is_upper_approximation(),
            "discreteness": {
                "certified": cert.certified(),
                "strong_atiyah": cert.strong_atiyah,
                "blocks": cert.blocks.iter().map(|b| json!({
                    "block": b.block,
                    "min_denominator": int_json(&b.min_denominator),
                    "bound": int_json(&b.bound),
                    "divides": b.divides,
                })).collect::<Vec<_>>(),
            },
        }))
    }
}

/// JSON integer when it fits, decimal string otherwise.
fn int_json(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_small_examples() {
        assert_eq!(hermite_normal_form(big(&[&[4], &[6]]), 1), big(&[&[2]]));
        assert_eq!(hermite_normal_form(big(&[&[2, 3], &[4, 5]]), 2), big(&[&[2, 0], &[0, 1]]));
        assert_eq!(hermite_normal_form(big(&[&[2, 4], &[0, -3]]), 2), big(&[&[2, 1], &[0, 3]]));
        assert_eq!(hermite_normal_form(big(&[&[0, 0], &[0, -3]]), 2), big(&[&[0, 3]]));
    }

    #[test]
    fn torsion_free_lattice_is_z() {
        let vg = VirtualGroup::torsion_free();
        let l = build_lattice(&vg, &vg.field(1), false).unwrap();
        assert_eq!(l.basis_hnf, big(&[&[1]]));
        assert!(l.contains(&[rat(3, 1)]).unwrap());
        assert!(!l.contains(&[rat(1, 2)]).unwrap());
        assert_eq!(l.discreteness_certificate().unwrap().min_denominator(), BigInt::one());
    }

    #[test]
    fn infinite_dihedral_lattice() {
        let vg = VirtualGroup::infinite_dihedral();
        let l = build_lattice(&vg, &vg.field(1), false).unwrap();
        assert_eq!(l.block_gaps().unwrap(), vec![rat(1, 2)]);
        assert!(l.contains(&[rat(1, 2)]).unwrap());
        assert!(!l.contains(&[rat(1, 3)]).unwrap());
        assert!(l.contains(&[rat(0, 1)]).unwrap());
        assert_eq!(l.l_j(0).unwrap(), LjReport { block: 0, formula: 2, from_lattice: 2 });
        let cert = l.discreteness_certificate().unwrap();
        assert!(cert.certified());
        assert_eq!(cert.min_denominator(), BigInt::from(2));
    }

    #[test]
    fn z3_times_z_over_q() {
        let vg = VirtualGroup::cyclic_times_z(3);
        let l = build_lattice(&vg, &vg.field(1), false).unwrap();
        assert_eq!(l.dims, vec![1, 2]);
        assert_eq!(l.block_gaps().unwrap(), vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(l.l_j(1).unwrap().formula, 1);
        assert!(l.contains(&[rat(2, 1), rat(-1, 1)]).unwrap());
        assert!(!l.contains(&[rat(0, 1), rat(1, 2)]).unwrap());
        assert!(l.contains(&[rat(1, 1)]).is_err());
    }

    #[test]
    fn abelian_finite_model_has_unit_l() {
        use crate::group::FiniteGroup;
        for g in [FiniteGroup::cyclic(6), FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))] {
            let vg = VirtualGroup::finite("G", g);
            for base in [1, vg.exponent()] {
                let l = build_lattice(&vg, &vg.field(base), false).unwrap();
                for r in l.all_l().unwrap() {
                    assert_eq!((r.formula, r.from_lattice), (1, 1));
                }
            }
        }
    }

    #[test]
    fn nonabelian_finite_model_has_l_equal_to_degree() {
        use crate::group::FiniteGroup;
        for g in [FiniteGroup::symmetric(3), FiniteGroup::quaternion()] {
            let vg = VirtualGroup::finite("G", g);
            let l = build_lattice(&vg, &vg.field(vg.exponent()), false).unwrap();
            let mut got: Vec<u64> = l.all_l().unwrap().iter().map(|r| { assert!(r.agree()); r.formula }).collect();
            got.sort_unstable();
            let mut want: Vec<u64> = crate::characters::character_table(&vg.delta_plus).unwrap().degrees();
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn larger_field_gives_superlattice() {
        let vg = VirtualGroup::cyclic_times_z(5);
        let coarse = build_lattice(&vg, &vg.field(1), false).unwrap();
        let fine = build_lattice(&vg, &vg.field(5), false).unwrap();
        assert_eq!((coarse.rank(), fine.rank()), (2, 5));
        assert!(fine.contains_lattice(&coarse).unwrap());
    }

    #[test]
    fn quaternions_over_q_are_non_split() {
        let vg = VirtualGroup::finite("Q8", crate::group::FiniteGroup::quaternion());
        let err = build_lattice(&vg, &vg.field(1), false).unwrap_err();
        assert!(matches!(err, Error::NonSplit(ref m) if m.contains("Schur")));
        let upper = build_lattice(&vg, &vg.field(1), true).unwrap();
        assert!(upper.is_upper_approximation());
    }

    #[test]
    fn report_shape() {
        let vg = VirtualGroup::infinite_dihedral();
        let v = build_lattice(&vg, &vg.field(1), false).unwrap().report_json().unwrap();
        assert_eq!(v["basis_hnf"], json!([[1]]));
        assert_eq!(v["L"], json!([2]));
        assert_eq!(v["scaling"], json!([2]));
    }
}
