//! Center-valued traces of irreducible projections over finite subgroups
//! `H ⊇ Δ⁺`, computed three independent ways.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::characters::character_table;
use crate::cyclotomic::{Cyclotomic, FieldSpec};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::idempotents::{central_idempotents, CentralIdempotentSet};
use crate::kernel::nullity;
use crate::scalar::{serialize_rational, Rational};
use crate::virtual_group::{SubgroupEntry, VirtualGroup};

/// `dim_C(x·C[E])` for an idempotent `x`, by exact rank of left multiplication.
pub fn idempotent_rank(x: &GroupRingElement) -> usize {
    x.group().size() - nullity(&GroupRingMatrix::scalar(x.clone()))
}

/// `Δ⁺`-side data shared by every verification for one model and field.
#[derive(Clone, Debug)]
pub struct AtiyahContext {
    pub model: VirtualGroup,
    pub field: FieldSpec,
    pub delta: CentralIdempotentSet,
    /// `dim_C(P^i·C[Δ⁺])`.
    pub delta_ranks: Vec<usize>,
}

impl AtiyahContext {
    pub fn new(model: &VirtualGroup, field: &FieldSpec) -> Result<Self> {
        model.validate()?;
        if !field.ambient_order.is_multiple_of(model.exponent()) {
            return Err(Error::InvalidInput(format!(
                "ambient order {} does not cover the subgroup exponent {}",
                field.ambient_order,
                model.exponent()
            )));
        }
        let delta = model.idempotents(field)?;
        let delta_ranks = delta.p.iter().map(idempotent_rank).collect();
        Ok(Self { model: model.clone(), field: field.clone(), delta, delta_ranks })
    }

    pub fn subgroup(&self, name: &str) -> Result<&SubgroupEntry> {
        self.model
            .subgroups
            .iter()
            .find(|h| h.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("model {} has no subgroup {name:?}", self.model.name)))
    }
}

/// Central idempotents of `K[H]` and how they sit over the `P^i`.
#[derive(Clone, Debug)]
pub struct SubgroupBlocks {
    pub group: Arc<FiniteGroup>,
    pub idempotents: CentralIdempotentSet,
    /// Character degree `n` of each `K[H]`-block.
    pub degrees: Vec<usize>,
    /// The `P^i` lying over each `K[H]`-block.
    pub parent: Vec<usize>,
    /// `P^i` transported into `K[H]`.
    pub pushed_p: Vec<GroupRingElement>,
}

impl SubgroupBlocks {
    pub fn new(ctx: &AtiyahContext, entry: &SubgroupEntry) -> Result<Self> {
        let h = entry.group.clone();
        let pushed_p: Vec<GroupRingElement> = ctx.delta.p.iter().map(|p| p.push_forward(&h, &entry.embedding)).collect();
        if let Some(i) = pushed_p.iter().position(|p| !p.is_central()) {
            return Err(Error::InvalidInput(format!(
                "P^{i} is not central in {}; the conjugation data does not cover the action of the ambient group on it",
                entry.name
            )));
        }
        let idempotents = central_idempotents(&h, &[], &ctx.field)?;
        let table = character_table(&h)?;
        let degrees = (0..idempotents.c_k())
            .map(|o| table.characters[idempotents.u_indices_of_block(o)[0]][0].as_rational().expect("degree"))
            .map(|d| d.to_integer().try_into().expect("small degree"))
            .collect();
        let parent = idempotents
            .p
            .iter()
            .map(|po| {
                let hits: Vec<usize> = (0..pushed_p.len()).filter(|&i| &(po * &pushed_p[i]) == po).collect();
                match hits.as_slice() {
                    [i] => Ok(*i),
                    _ => Err(Error::Verification(format!("an {} block lies over {} of the P^i", entry.name, hits.len()))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { group: h, idempotents, degrees, parent, pushed_p })
    }

    /// `n·|O|`, the smallest possible rank of a nonzero projection in block `o`.
    pub fn minimal_rank(&self, o: usize) -> usize {
        self.degrees[o] * self.idempotents.u_indices_of_block(o).len()
    }
}

/// Abelian subgroups of `h` given by at most two generators, smallest first.
fn small_abelian_subgroups(h: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut push = |gs: Vec<usize>, seen: &mut BTreeSet<Vec<usize>>| {
        if seen.insert(h.closure(&gs)) {
            gens.push(gs);
        }
    };
    push(vec![], &mut seen);
    for x in 1..h.size() {
        push(vec![x], &mut seen);
    }
    for x in 1..h.size() {
        for y in (x + 1)..h.size() {
            if h.mul(x, y) == h.mul(y, x) {
                push(vec![x, y], &mut seen);
            }
        }
    }
    gens.sort_by_key(|gs| h.closure(gs).len());
    gens
}

/// A projection of rank `n·|O|` in the block `o` of `K[H]`, built as
/// `P_O · Σ_{λ∈Λ} e_λ` for a Galois orbit `Λ` of linear characters of an
/// abelian subgroup `S` meeting the block's character exactly once.
///
/// Returns `None` when no abelian subgroup on at most two generators works;
/// for a Schur index above one no such projection exists at all.
pub fn minimal_projection(ctx: &AtiyahContext, blocks: &SubgroupBlocks, o: usize) -> Result<Option<GroupRingElement>> {
    let h = &blocks.group;
    let table = character_table(h)?;
    let chi = blocks.idempotents.u_indices_of_block(o)[0];
    let p_o = &blocks.idempotents.p[o];
    if blocks.degrees[o] == 1 {
        return Ok(Some(p_o.clone()));
    }
    let galois = ctx.field.galois_group();
    for gens in small_abelian_subgroups(h) {
        let (s, emb) = h.subgroup_from_subset(&gens);
        let s = Arc::new(s);
        let s_table = character_table(&s)?;
        let order = Cyclotomic::from(s.size() as i64);
        let mult: Vec<Cyclotomic> = s_table
            .characters
            .iter()
            .map(|lam| {
                let sum = (0..s.size()).fold(Cyclotomic::zero(), |acc, x| {
                    acc + table.value(h, chi, emb[x]) * lam[s.class_of(x)].conjugate()
                });
                sum / &order
            })
            .collect();
        let images = |k: usize| -> Result<Vec<usize>> {
            galois
                .iter()
                .map(|&j| {
                    let img = s_table.characters[k].iter().map(|v| v.galois_apply(j)).collect::<Result<Vec<_>>>()?;
                    s_table
                        .characters
                        .iter()
                        .position(|c| *c == img)
                        .ok_or_else(|| Error::Verification("Galois action does not permute linear characters".into()))
                })
                .collect()
        };
        let mut done = vec![false; s_table.len()];
        for k in 0..s_table.len() {
            if done[k] {
                continue;
            }
            let orbit: BTreeSet<usize> = images(k)?.into_iter().collect();
            for &m in &orbit {
                done[m] = true;
            }
            let total = orbit.iter().fold(Cyclotomic::zero(), |acc, &m| acc + &mult[m]);
            if total != Cyclotomic::from(1) {
                continue;
            }
            let e = orbit.iter().fold(GroupRingElement::zero(h), |acc, &m| {
                let lam = &s_table.characters[m];
                let e_lam = GroupRingElement::from_terms(h, (0..s.size()).map(|x| (emb[x], lam[s.class_of(x)].conjugate() / &order)));
                &acc + &e_lam
            });
            return Ok(Some(p_o * &e));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Irreducibility {
    /// Rank equals `n·|O|`, the least rank of a nonzero projection in the block.
    Certified,
    /// The caller vouched for irreducibility; not checked.
    Asserted,
}

/// Three computations of `τ^u(Q) = q·P^i`.
#[derive(Clone, Debug, Serialize)]
pub struct AtiyahReport {
    pub subgroup: String,
    /// Index `i` of the unique `P^i` with `QP^i = Q`.
    pub block: usize,
    pub h_block: usize,
    pub degree: usize,
    pub orbit_size: usize,
    pub rank: usize,
    pub subgroup_order: usize,
    /// `⟨Q,U^j⟩ / ⟨U^j,U^j⟩`, constant over `j ∈ N_i`.
    #[serde(serialize_with = "serialize_rational")]
    pub route_projection: Rational,
    /// `dim_C(Q·C[H])·|Δ⁺| / (|H|·dim_C(P^i·C[Δ⁺]))`.
    #[serde(serialize_with = "serialize_rational")]
    pub route_dimension: Rational,
    /// `dim_N(G)(Q·l²G) / dim_N(G)(P^i·l²G)`, the ratio of identity coefficients.
    #[serde(serialize_with = "serialize_rational")]
    pub route_von_neumann: Rational,
    pub agree: bool,
    pub irreducibility: Irreducibility,
    #[serde(skip)]
    pub center_valued_trace: GroupRingElement,
}

impl AtiyahReport {
    pub fn q(&self) -> &Rational {
        &self.route_projection
    }
}

/// Verifies the trace formula for a projection `q_elem ∈ K[H]` where `H` is the
/// catalog subgroup named `subgroup`.
pub fn verify_atiyah_formula(
    ctx: &AtiyahContext,
    subgroup: &str,
    q_elem: &GroupRingElement,
    assert_irreducible: bool,
) -> Result<AtiyahReport> {
    let entry = ctx.subgroup(subgroup)?;
    let blocks = SubgroupBlocks::new(ctx, entry)?;
    verify_with_blocks(ctx, entry, &blocks, q_elem, assert_irreducible)
}

pub(crate) fn verify_with_blocks(
    ctx: &AtiyahContext,
    entry: &SubgroupEntry,
    blocks: &SubgroupBlocks,
    q_elem: &GroupRingElement,
    assert_irreducible: bool,
) -> Result<AtiyahReport> {
    let h = &blocks.group;
    if !crate::group_ring::same_group(q_elem.group(), h) {
        return Err(Error::GroupMismatch);
    }
    if q_elem.is_zero() || !q_elem.is_projection() {
        return Err(Error::InvalidInput("Q must be a nonzero projection".into()));
    }
    if let Some((g, _)) = q_elem.terms().find(|(_, c)| !ctx.field.contains(c)) {
        return Err(Error::InvalidInput(format!("coefficient of Q at element {g} lies outside K")));
    }
    let fixed: Vec<usize> = (0..blocks.pushed_p.len()).filter(|&i| &(q_elem * &blocks.pushed_p[i]) == q_elem).collect();
    let block = match fixed.as_slice() {
        [i] => *i,
        [] => return Err(Error::NotIrreducible("no P^i satisfies QP^i = Q".into())),
        _ => return Err(Error::Verification("several P^i satisfy QP^i = Q".into())),
    };
    let h_fixed: Vec<usize> =
        (0..blocks.idempotents.c_k()).filter(|&o| &(q_elem * &blocks.idempotents.p[o]) == q_elem).collect();
    let rank = idempotent_rank(q_elem);
    let (h_block, irreducibility) = match (h_fixed.as_slice(), assert_irreducible) {
        ([o], _) if rank == blocks.minimal_rank(*o) => (*o, Irreducibility::Certified),
        ([o], true) => (*o, Irreducibility::Asserted),
        ([o], false) => {
            return Err(Error::NotIrreducible(format!(
                "rank {rank} exceeds the minimal rank {} of its block",
                blocks.minimal_rank(*o)
            )))
        }
        _ => return Err(Error::NotIrreducible(format!("Q meets {} blocks of K[{}]", h_fixed.len(), entry.name))),
    };

    // projection formula
    let delta = &ctx.delta;
    let mut coeffs = Vec::with_capacity(delta.c_g());
    for u in &delta.big_u {
        let pushed = u.push_forward(h, &entry.embedding);
        coeffs.push(q_elem.inner(&pushed)? / u.inner(u)?);
    }
    let n_i = &delta.p_orbits[block];
    let first = &coeffs[n_i[0]];
    let constant = n_i.iter().all(|&j| coeffs[j] == *first);
    let off_block_zero = (0..coeffs.len()).filter(|j| !n_i.contains(j)).all(|j| coeffs[j].is_zero());
    let route_projection = match (constant, first.as_rational()) {
        (true, Some(q)) => q,
        _ => return Err(Error::Verification(format!("⟨Q,U^j⟩/⟨U^j,U^j⟩ is not a single rational on N_{block}"))),
    };
    let center_valued_trace = coeffs
        .iter()
        .zip(&delta.big_u)
        .fold(GroupRingElement::zero(&ctx.model.delta_plus), |acc, (c, u)| &acc + &u.scale(c));

    let d = ctx.model.delta_plus.size() as i64;
    let route_dimension = Rational::from_integer((rank as i64 * d).into())
        / Rational::from_integer((h.size() as i64 * ctx.delta_ranks[block] as i64).into());

    let route_von_neumann = (q_elem.trace() / delta.p[block].trace())
        .as_rational()
        .ok_or_else(|| Error::Verification("identity coefficients of projections must be rational".into()))?;

    let agree = off_block_zero && route_projection == route_dimension && route_dimension == route_von_neumann;
    Ok(AtiyahReport {
        subgroup: entry.name.clone(),
        block,
        h_block,
        degree: blocks.degrees[h_block],
        orbit_size: blocks.idempotents.u_indices_of_block(h_block).len(),
        rank,
        subgroup_order: h.size(),
        route_projection,
        route_dimension,
        route_von_neumann,
        agree,
        irreducibility,
        center_valued_trace,
    })
}
