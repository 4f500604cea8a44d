//! Finite data standing in for an infinite group `G`: the maximal finite
//! normal subgroup `Δ⁺`, the conjugation action of `G` on it, a catalog of
//! finite subgroups containing `Δ⁺`, and `lcm(G)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{lcm, FieldSpec};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHomomorphism, GroupSpec, DEFAULT_GROUP_CAP};
use crate::idempotents::{central_idempotents, CentralIdempotentSet};
use crate::residual::{ChainSpec, ResidualChain};

/// Quotient orders `N` of the built-in chains.
pub const DEFAULT_LEVELS: [usize; 5] = [2, 3, 4, 6, 12];
pub const PRODUCT_LEVELS: [usize; 6] = [2, 3, 4, 6, 12, 24];

#[derive(Clone, Debug)]
pub struct SubgroupEntry {
    pub name: String,
    pub group: Arc<FiniteGroup>,
    /// Image in `group` of each element of `Δ⁺`.
    pub embedding: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct VirtualGroup {
    pub name: String,
    pub delta_plus: Arc<FiniteGroup>,
    /// Automorphisms of `Δ⁺` generating the conjugation action of `G`.
    pub conjugation: Vec<Vec<usize>>,
    pub subgroups: Vec<SubgroupEntry>,
    pub lcm: u64,
    /// A word in the chain generators for each element of `Δ⁺`.
    pub delta_words: Option<Vec<String>>,
    pub chain: Option<ResidualChain>,
}

impl VirtualGroup {
    pub fn validate(&self) -> Result<()> {
        let d = self.delta_plus.size();
        for (a, phi) in self.conjugation.iter().enumerate() {
            if !self.delta_plus.is_automorphism(phi) {
                return Err(Error::InvalidAutomorphism(format!("conjugation generator {a} of {}", self.name)));
            }
        }
        if self.lcm == 0 {
            return Err(Error::InvalidInput("lcm must be positive".into()));
        }
        for h in &self.subgroups {
            let hom = GroupHomomorphism::new(self.delta_plus.clone(), h.group.clone(), h.embedding.clone());
            let mut image = h.embedding.clone();
            image.sort_unstable();
            image.dedup();
            if !hom.validate().is_valid() || image.len() != d {
                return Err(Error::InvalidInput(format!("embedding into {} is not an injective homomorphism", h.name)));
            }
            if h.group.size() % d != 0 || !self.lcm.is_multiple_of(h.group.size() as u64) {
                return Err(Error::InvalidInput(format!(
                    "orders must satisfy |Δ⁺| | |{}| | lcm (got {}, {}, {})",
                    h.name,
                    d,
                    h.group.size(),
                    self.lcm
                )));
            }
        }
        if let (Some(chain), Some(words)) = (&self.chain, &self.delta_words) {
            for w in words {
                chain.parse_word(w)?;
            }
        }
        if let Some(words) = &self.delta_words {
            if words.len() != d {
                return Err(Error::InvalidInput(format!("{} delta words for a Δ⁺ of order {d}", words.len())));
            }
        }
        Ok(())
    }

    /// lcm of the exponents of `Δ⁺` and every catalog subgroup.
    pub fn exponent(&self) -> u64 {
        self.subgroups.iter().map(|h| h.group.exponent()).fold(self.delta_plus.exponent(), lcm)
    }

    /// `K = Q(ω_base)` inside the smallest ambient field splitting every subgroup.
    pub fn field(&self, base_order: u64) -> FieldSpec {
        FieldSpec::covering(base_order, [self.exponent()])
    }

    pub fn idempotents(&self, field: &FieldSpec) -> Result<CentralIdempotentSet> {
        central_idempotents(&self.delta_plus, &self.conjugation, field)
    }

    /// Torsion-free `G`: `Δ⁺` trivial, only the trivial finite subgroup.
    pub fn torsion_free() -> Self {
        let trivial = Arc::new(FiniteGroup::cyclic(1));
        Self {
            name: "torsion-free".into(),
            delta_plus: trivial.clone(),
            conjugation: vec![],
            subgroups: vec![SubgroupEntry { name: "1".into(), group: trivial, embedding: vec![0] }],
            lcm: 1,
            delta_words: Some(vec![String::new()]),
            chain: Some(ResidualChain::cyclic(&DEFAULT_LEVELS)),
        }
    }

    /// `Z/2 * Z/2`: `Δ⁺` trivial, two conjugacy classes of subgroups of order 2.
    pub fn infinite_dihedral() -> Self {
        let trivial = Arc::new(FiniteGroup::cyclic(1));
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        Self {
            name: "infinite-dihedral".into(),
            delta_plus: trivial.clone(),
            conjugation: vec![],
            subgroups: vec![
                SubgroupEntry { name: "1".into(), group: trivial, embedding: vec![0] },
                SubgroupEntry { name: "<s>".into(), group: z2.clone(), embedding: vec![0] },
                SubgroupEntry { name: "<st>".into(), group: z2, embedding: vec![0] },
            ],
            lcm: 2,
            delta_words: Some(vec![String::new()]),
            chain: Some(ResidualChain::dihedral(&DEFAULT_LEVELS)),
        }
    }

    /// `Z/k × Z`: `Δ⁺ = Z/k` central, which is also the only maximal finite subgroup.
    pub fn cyclic_times_z(k: usize) -> Self {
        let zk = Arc::new(FiniteGroup::cyclic(k));
        let words = (0..k).map(|i| if i == 0 { String::new() } else { format!("s^{i}") }).collect();
        Self {
            name: format!("Z/{k} x Z"),
            delta_plus: zk.clone(),
            conjugation: vec![],
            subgroups: vec![SubgroupEntry { name: format!("Z/{k}"), group: zk, embedding: (0..k).collect() }],
            lcm: k as u64,
            delta_words: Some(words),
            chain: Some(ResidualChain::product(k, &PRODUCT_LEVELS)),
        }
    }

    /// `Z/3 ⋊ D_∞` with both involutions inverting: `Δ⁺ = A₃`, maximal finite
    /// subgroups isomorphic to `S₃`.
    pub fn a3_in_s3() -> Self {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let c = (1..6).find(|&x| s3.element_order(x) == 3).expect("S3 has a 3-cycle");
        let (a3, embedding) = s3.subgroup_from_subset(&[c]);
        let a3 = Arc::new(a3);
        let inversion: Vec<usize> = (0..3).map(|x| a3.inv(x)).collect();
        Self {
            name: "A3 in S3".into(),
            delta_plus: a3.clone(),
            conjugation: vec![inversion],
            subgroups: vec![
                SubgroupEntry { name: "A3".into(), group: a3, embedding: vec![0, 1, 2] },
                SubgroupEntry { name: "S3".into(), group: s3, embedding },
            ],
            lcm: 6,
            delta_words: None,
            chain: None,
        }
    }

    /// A finite group viewed as its own model: `Δ⁺ = H = G`.
    pub fn finite(name: &str, group: FiniteGroup) -> Self {
        let group = Arc::new(group);
        let conjugation = group.generating_set().into_iter().map(|g| group.inner_automorphism(g)).collect();
        Self {
            name: name.into(),
            delta_plus: group.clone(),
            conjugation,
            subgroups: vec![SubgroupEntry { name: name.into(), group: group.clone(), embedding: (0..group.size()).collect() }],
            lcm: group.size() as u64,
            delta_words: None,
            chain: None,
        }
    }

    pub fn catalog() -> Vec<Self> {
        vec![Self::torsion_free(), Self::infinite_dihedral(), Self::cyclic_times_z(3), Self::cyclic_times_z(5), Self::a3_in_s3()]
    }

    /// Looks up a built-in model by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "torsion-free" | "z" => Some(Self::torsion_free()),
            "infinite-dihedral" | "d-infinity" => Some(Self::infinite_dihedral()),
            "a3-in-s3" => Some(Self::a3_in_s3()),
            _ => {
                let k = name.strip_prefix("z")?.strip_suffix("-times-z")?.parse().ok()?;
                (k >= 1).then(|| Self::cyclic_times_z(k))
            }
        }
    }
}

/// Wire form of a [`VirtualGroup`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VirtualGroupSpec {
    pub name: String,
    pub delta_plus: GroupSpec,
    #[serde(default)]
    pub conjugation: Vec<Vec<usize>>,
    pub subgroups: Vec<SubgroupSpec>,
    pub lcm: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_words: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub name: String,
    pub group: GroupSpec,
    pub embedding: Vec<usize>,
}

impl VirtualGroupSpec {
    pub fn build(&self, cap: usize) -> Result<VirtualGroup> {
        let delta_plus = Arc::new(self.delta_plus.build(cap)?);
        let subgroups = self
            .subgroups
            .iter()
            .map(|s| {
                Ok(SubgroupEntry { name: s.name.clone(), group: Arc::new(s.group.build(cap)?), embedding: s.embedding.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = self.chain.as_ref().map(|c| c.build(cap)).transpose()?;
        let vg = VirtualGroup {
            name: self.name.clone(),
            delta_plus,
            conjugation: self.conjugation.clone(),
            subgroups,
            lcm: self.lcm,
            delta_words: self.delta_words.clone(),
            chain,
        };
        vg.validate()?;
        Ok(vg)
    }

    pub fn from_model(vg: &VirtualGroup) -> Self {
        Self {
            name: vg.name.clone(),
            delta_plus: GroupSpec::from_group(&vg.delta_plus),
            conjugation: vg.conjugation.clone(),
            subgroups: vg
                .subgroups
                .iter()
                .map(|s| SubgroupSpec { name: s.name.clone(), group: GroupSpec::from_group(&s.group), embedding: s.embedding.clone() })
                .collect(),
            lcm: vg.lcm,
            delta_words: vg.delta_words.clone(),
            chain: vg.chain.as_ref().map(ChainSpec::from_chain),
        }
    }
}

pub fn load_model(json: &str) -> Result<VirtualGroup> {
    let spec: VirtualGroupSpec = serde_json::from_str(json)?;
    spec.build(DEFAULT_GROUP_CAP)
}
