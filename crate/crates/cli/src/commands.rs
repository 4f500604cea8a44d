//! One function per subcommand. Each returns the report and, for
//! verification commands, the identity that failed if any.

use std::path::Path;
use std::sync::Arc;

use atiyah_core::atiyah::{minimal_projection, SubgroupBlocks};
use atiyah_core::group_ring::{ElementWire, MatrixWire};
use atiyah_core::idempotents::{center_valued_trace, central_idempotents};
use atiyah_core::residual::approximate;
use atiyah_core::scalar::{rational_to_decimal, rational_to_string};
use atiyah_core::{
    build_lattice, kernel_projection, verify_atiyah_formula, AtiyahContext, AtiyahLattice, CharacterTable, Cyclotomic,
    FieldSpec, FiniteGroup, GroupRingElement, GroupSpec, Rational, ResidualChain, VirtualGroup,
};
use serde_json::{json, Value};

use crate::cache::{Lookup, TableCache};
use crate::config::SessionConfig;
use crate::CliError;

pub struct Report {
    pub value: Value,
    /// Set when a verification command found a broken identity.
    pub failure: Option<String>,
}

impl Report {
    fn ok(value: Value) -> Self {
        Self { value, failure: None }
    }
}

fn element(x: &GroupRingElement) -> Value {
    serde_json::to_value(ElementWire::from_element(x)).expect("serializable")
}

fn elements(xs: &[GroupRingElement]) -> Value {
    Value::Array(xs.iter().map(element).collect())
}

fn cyclotomic(c: &Cyclotomic) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn rational(q: &Rational, cfg: &SessionConfig) -> Value {
    match cfg.decimals {
        None => json!(rational_to_string(q)),
        Some(d) => json!({ "exact": rational_to_string(q), "decimal": rational_to_decimal(q, d as usize) }),
    }
}

fn field_json(f: &FieldSpec) -> Value {
    json!({ "base_order": f.base_order, "ambient_order": f.ambient_order })
}

/// Context for commands that need character tables of on-disk cached groups.
pub struct Session {
    pub cfg: SessionConfig,
    cache: Option<TableCache>,
}

impl Session {
    pub fn new(cfg: SessionConfig) -> Result<Self, CliError> {
        let cache = cfg.cache_dir.as_deref().map(TableCache::new).transpose()?;
        Ok(Self { cfg, cache })
    }

    /// Loads or computes the character table, warning about repaired entries.
    pub fn warm(&self, group: &FiniteGroup) -> Result<Arc<CharacterTable>, CliError> {
        match &self.cache {
            Some(cache) => {
                let (table, lookup) = cache.table(group)?;
                if let Lookup::Repaired(reason) = lookup {
                    eprintln!("warning: character-table cache entry was damaged ({reason}); recomputed and rewritten");
                }
                Ok(table)
            }
            None => Ok(atiyah_core::character_table(group)?),
        }
    }

    fn warm_model(&self, vg: &VirtualGroup) -> Result<(), CliError> {
        self.warm(&vg.delta_plus)?;
        for h in &vg.subgroups {
            self.warm(&h.group)?;
        }
        Ok(())
    }

    fn group_field(&self, group: &FiniteGroup) -> FieldSpec {
        FieldSpec::covering(self.cfg.field, [group.exponent()])
    }
}

pub fn group_inspect(s: &Session, g: &Arc<FiniteGroup>) -> Result<Report, CliError> {
    let table = s.warm(g)?;
    let data = g.conjugacy_data();
    let class_orders: Vec<u64> = data.classes.iter().map(|c| g.element_order(c[0])).collect();
    Ok(Report::ok(json!({
        "order": g.size(),
        "exponent": data.exponent,
        "abelian": g.is_abelian(),
        "classes": data.classes,
        "class_sizes": data.class_sizes,
        "class_orders": class_orders,
        "character_degrees": table.degrees(),
        "canonical_key": g.canonical_form().key,
    })))
}

pub fn idempotents(s: &Session, g: &Arc<FiniteGroup>, conjugation: &[Vec<usize>]) -> Result<Report, CliError> {
    s.warm(g)?;
    let field = s.group_field(g);
    let set = central_idempotents(g, conjugation, &field)?;
    Ok(Report::ok(json!({
        "group_order": g.size(),
        "field": field_json(&field),
        "u": elements(&set.u),
        "u_orbits": set.u_orbits,
        "U": elements(&set.big_u),
        "p_orbits": set.p_orbits,
        "P": elements(&set.p),
    })))
}

pub fn model_idempotents(s: &Session, vg: &VirtualGroup) -> Result<Report, CliError> {
    vg.validate()?;
    s.warm(&vg.delta_plus)?;
    let field = vg.field(s.cfg.field);
    let set = vg.idempotents(&field)?;
    Ok(Report::ok(json!({
        "group_order": vg.delta_plus.size(),
        "field": field_json(&field),
        "u": elements(&set.u),
        "u_orbits": set.u_orbits,
        "U": elements(&set.big_u),
        "p_orbits": set.p_orbits,
        "P": elements(&set.p),
    })))
}

pub fn trace(s: &Session, g: &Arc<FiniteGroup>, matrix: &Path) -> Result<Report, CliError> {
    let a = crate::input::matrix(matrix, g, &s.cfg)?;
    let t = center_valued_trace(&a)?;
    let canonical = a.canonical_trace()?;
    let canonical = match canonical.as_rational() {
        Some(q) => rational(&q, &s.cfg),
        None => cyclotomic(&canonical),
    };
    Ok(Report::ok(json!({
        "rows": a.rows(),
        "center_valued_trace": element(&t),
        "canonical_trace": canonical,
    })))
}

pub fn kernel(s: &Session, g: &Arc<FiniteGroup>, matrix: &Path) -> Result<Report, CliError> {
    let a = crate::input::matrix(matrix, g, &s.cfg)?;
    let k = kernel_projection(&a)?;
    let canonical = k
        .canonical_trace
        .as_rational()
        .ok_or_else(|| CliError::verification("canonical trace of a projection is not rational"))?;
    Ok(Report::ok(json!({
        "projection": serde_json::to_value(MatrixWire::from_matrix(&k.projection)).expect("serializable"),
        "dim_u": element(&k.dim_u),
        "canonical_trace": rational(&canonical, &s.cfg),
        "nullity": k.nullity,
    })))
}

pub struct VerifyArgs<'a> {
    pub subgroup: Option<&'a str>,
    pub projection: Option<&'a Path>,
    pub assert_irreducible: bool,
}

pub fn atiyah_verify(s: &Session, vg: &VirtualGroup, args: VerifyArgs) -> Result<Report, CliError> {
    s.warm_model(vg)?;
    let field = vg.field(s.cfg.field);
    let ctx = AtiyahContext::new(vg, &field)?;
    let mut reports = Vec::new();
    match (args.subgroup, args.projection) {
        (Some(name), Some(path)) => {
            let entry = ctx.subgroup(name)?;
            let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let wire: ElementWire =
                serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let q = wire.to_element(&entry.group)?;
            reports.push(verify_atiyah_formula(&ctx, name, &q, args.assert_irreducible)?);
        }
        (None, Some(_)) => return Err(CliError::input("--projection needs --subgroup")),
        (only, None) => {
            // one minimal projection per block of each selected subgroup
            for entry in vg.subgroups.iter().filter(|e| only.is_none_or(|n| n == e.name)) {
                let blocks = SubgroupBlocks::new(&ctx, entry)?;
                for o in 0..blocks.idempotents.c_k() {
                    let q = minimal_projection(&ctx, &blocks, o)?.ok_or_else(|| {
                        CliError::from(atiyah_core::Error::NonSplit(format!(
                            "no minimal projection for block {o} of {}; pass --projection with --assert-irreducible",
                            entry.name
                        )))
                    })?;
                    reports.push(verify_atiyah_formula(&ctx, &entry.name, &q, false)?);
                }
            }
            if reports.is_empty() {
                return Err(CliError::input(format!("model {} has no subgroup {:?}", vg.name, only.unwrap_or(""))));
            }
        }
    }
    let failure = reports.iter().find(|r| !r.agree).map(|r| {
        format!(
            "τ^u(Q) routes disagree on {} block {}: {} / {} / {}",
            r.subgroup,
            r.block,
            rational_to_string(&r.route_projection),
            rational_to_string(&r.route_dimension),
            rational_to_string(&r.route_von_neumann)
        )
    });
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["center_valued_trace"] = element(&r.center_valued_trace);
            v
        })
        .collect();
    Ok(Report {
        value: json!({ "model": vg.name, "field": field_json(&field), "reports": rows, "all_agree": failure.is_none() }),
        failure,
    })
}

fn lattice_for(s: &Session, vg: &VirtualGroup, superlattice: bool) -> Result<AtiyahLattice, CliError> {
    s.warm_model(vg)?;
    Ok(build_lattice(vg, &vg.field(s.cfg.field), superlattice)?)
}

pub fn lattice(s: &Session, vg: &VirtualGroup, superlattice: bool) -> Result<Report, CliError> {
    let l = lattice_for(s, vg, superlattice)?;
    let mut value = l.report_json()?;
    let cert = l.discreteness_certificate()?;
    value["superlattice"] = json!(superlattice);
    value["certified"] = json!(cert.certified());
    let failure = (!cert.certified()).then(|| {
        let bad: Vec<String> = cert
            .blocks
            .iter()
            .filter(|b| !b.divides)
            .map(|b| format!("block {}: denominator {} does not divide {}", b.block, b.min_denominator, b.bound))
            .collect();
        if bad.is_empty() {
            "some generator has canonical trace outside (1/lcm)Z".to_string()
        } else {
            bad.join("; ")
        }
    });
    Ok(Report { value, failure })
}

pub fn lj(s: &Session, vg: &VirtualGroup, superlattice: bool) -> Result<Report, CliError> {
    let l = lattice_for(s, vg, superlattice)?;
    let reports = l.all_l()?;
    let failure = reports
        .iter()
        .find(|r| !r.agree())
        .map(|r| format!("L_{} by formula is {} but the lattice gives {}", r.block, r.formula, r.from_lattice));
    let blocks: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "block": r.block, "formula": r.formula, "from_lattice": r.from_lattice, "agree": r.agree() }))
        .collect();
    Ok(Report {
        value: json!({ "model": vg.name, "field": field_json(&l.field), "superlattice": superlattice, "blocks": blocks }),
        failure,
    })
}

pub struct ApproximateArgs<'a> {
    pub chain: Option<&'a Path>,
    pub matrix: &'a Path,
    pub levels: Option<usize>,
    pub model: Option<&'a VirtualGroup>,
    pub track: &'a [String],
    pub window: usize,
    pub checkpoint: Option<&'a Path>,
}

pub fn approximate_cmd(s: &Session, args: ApproximateArgs) -> Result<Report, CliError> {
    let default_model = VirtualGroup::torsion_free();
    let vg = args.model.unwrap_or(&default_model);
    let chain: ResidualChain = match (args.chain, &vg.chain) {
        (Some(path), _) => crate::input::chain(path, &s.cfg)?,
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(CliError::input(format!("model {} has no built-in chain; pass --chain", vg.name))),
    };
    let chain = match args.levels {
        Some(0) => return Err(CliError::input("--levels must be positive")),
        Some(n) if n > chain.len() => {
            return Err(CliError::input(format!("asked for {n} levels but the chain has {}", chain.len())))
        }
        Some(n) => chain.truncated(n),
        None => chain,
    };
    if chain.len() > s.cfg.caps.chain_levels {
        return Err(CliError::input(format!("{} levels exceed the cap {}", chain.len(), s.cfg.caps.chain_levels)));
    }
    let a = crate::input::symbolic_matrix(args.matrix, &s.cfg)?;
    s.warm_model(vg)?;
    let lattice = build_lattice(vg, &vg.field(s.cfg.field), false)?;
    let run = approximate(&a, &chain, vg, &lattice, &s.cfg.tolerance, args.window, args.checkpoint)?;

    let tracked = args.track.iter().map(|w| chain.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
    let levels: Vec<Value> = run
        .levels
        .iter()
        .map(|l| {
            let tracked: Vec<Value> = tracked.iter().map(|w| cyclotomic(&l.dim_u.coeff(chain.evaluate_word(l.level, w)))).collect();
            json!({
                "level": l.level,
                "label": l.label,
                "order": l.order,
                "canonical_trace": rational(&l.canonical_trace, &s.cfg),
                "dim_u": element(&l.dim_u),
                "tracked": tracked,
            })
        })
        .collect();
    let coords = |v: &[Rational]| -> Value { Value::Array(v.iter().map(|q| rational(q, &s.cfg)).collect()) };
    let qz = &run.quantization;
    Ok(Report::ok(json!({
        "model": vg.name,
        "field": field_json(&lattice.field),
        "tolerance": rational_to_string(&s.cfg.tolerance),
        "levels": levels,
        "tracked_words": args.track,
        "stabilization_index": run.stabilization_index,
        "coordinates": run.coordinates.iter().map(|c| coords(c)).collect::<Vec<_>>(),
        "gaps": coords(&lattice.block_gaps()?),
        "quantization": {
            "nearest": coords(&qz.nearest),
            "distance": rational(&qz.distance, &s.cfg),
            "oscillation": rational(&qz.oscillation, &s.cfg),
            "verdict": serde_json::to_value(qz.verdict).expect("serializable"),
        },
    })))
}

pub fn table_export(s: &Session, g: &Arc<FiniteGroup>) -> Result<Report, CliError> {
    let table = s.warm(g)?;
    Ok(Report::ok(json!({
        "canonical_key": g.canonical_form().key,
        "group": serde_json::to_value(GroupSpec::from_group(g)).expect("serializable"),
        "table": serde_json::to_value(&*table).expect("serializable"),
    })))
}

pub fn table_import(s: &Session, g: &Arc<FiniteGroup>, path: &Path) -> Result<Report, CliError> {
    let cache = s.cache.as_ref().ok_or_else(|| {
        CliError::input(format!("no cache directory; set cache_dir in the config or {}", crate::config::CACHE_ENV))
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    // accept either an export report or a bare table
    let table_value = value.get("table").cloned().unwrap_or(value);
    let table: CharacterTable =
        serde_json::from_value(table_value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let key = cache.import(g, table)?;
    Ok(Report::ok(json!({ "stored": key, "order": g.size() })))
}
