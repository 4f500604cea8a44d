//! Evaluating symbolic group-ring matrices along a chain of finite
//! quotients, and reading the resulting center-valued dimensions back on
//! `Δ⁺`.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupSpec};
use crate::group_ring::{ElementWire, GroupRingElement, GroupRingMatrix};
use crate::idempotents::CentralIdempotentSet;
use crate::kernel::kernel_projection;
use crate::lattice::AtiyahLattice;
use crate::scalar::{parse_rational, rational_to_string, Rational};
use crate::virtual_group::VirtualGroup;

/// A freely reduced word: `(generator, exponent)` pairs, no zero exponents,
/// no two adjacent pairs on the same generator.
pub type Word = Vec<(usize, i64)>;

pub fn reduce_word(letters: impl IntoIterator<Item = (usize, i64)>) -> Word {
    let mut out: Word = Vec::new();
    for (g, e) in letters {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

/// Parses words such as `t^-1 s`, `s*t^2` or `1` over named generators.
pub fn parse_word(text: &str, generators: &[String]) -> Result<Word> {
    let mut letters = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == '*' || c == '·').filter(|t| !t.is_empty()) {
        if token == "1" || token == "e" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => {
                let e = e.trim_start_matches('(').trim_end_matches(')');
                (n, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?)
            }
            None => (token, 1),
        };
        let g = generators
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator {name:?} in word {text:?}")))?;
        letters.push((g, exp));
    }
    Ok(reduce_word(letters))
}

pub fn format_word(word: &Word, generators: &[String]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|&(g, e)| if e == 1 { generators[g].clone() } else { format!("{}^{e}", generators[g]) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// An `n × m` matrix whose entries are finite sums `Σ c_w w` of words.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicMatrix {
    generators: Vec<String>,
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<Word, Cyclotomic>>,
}

impl SymbolicMatrix {
    pub fn new(generators: Vec<String>, rows: usize, cols: usize, entries: Vec<Vec<(Cyclotomic, Word)>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let entries = entries
            .into_iter()
            .map(|terms| {
                let mut map: BTreeMap<Word, Cyclotomic> = BTreeMap::new();
                for (c, w) in terms {
                    if w.iter().any(|&(g, _)| g >= generators.len()) {
                        return Err(Error::InvalidInput("word uses an undeclared generator".into()));
                    }
                    let w = reduce_word(w);
                    let s = map.remove(&w).map_or(c.clone(), |old| old + c);
                    if !s.is_zero() {
                        map.insert(w, s);
                    }
                }
                Ok(map)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { generators, rows, cols, entries })
    }

    /// A `1 × 1` matrix from `(coefficient, word text)` terms.
    pub fn polynomial(generators: &[&str], terms: &[(Cyclotomic, &str)]) -> Result<Self> {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let terms = terms.iter().map(|(c, w)| Ok((c.clone(), parse_word(w, &gens)?))).collect::<Result<Vec<_>>>()?;
        Self::new(gens, 1, 1, vec![terms])
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &BTreeMap<Word, Cyclotomic> {
        &self.entries[r * self.cols + c]
    }

    /// Image of the matrix in the group ring of a chain level.
    pub fn evaluate(&self, chain: &ResidualChain, level: usize) -> Result<GroupRingMatrix> {
        let images = chain.images_for(&self.generators, level)?;
        let lvl = &chain.levels[level];
        let group = &lvl.group;
        Ok(GroupRingMatrix::from_fn(group, self.rows, self.cols, |r, c| {
            GroupRingElement::from_terms(group, self.entry(r, c).iter().map(|(w, x)| (eval_word(group, &images, w), x.clone())))
        }))
    }

    pub fn to_wire(&self) -> SymbolicMatrixWire {
        SymbolicMatrixWire {
            generators: self.generators.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|r| {
                    (0..self.cols)
                        .map(|c| SymbolicEntryWire {
                            terms: self
                                .entry(r, c)
                                .iter()
                                .map(|(w, x)| SymbolicTermWire { coeff: x.clone(), word: format_word(w, &self.generators) })
                                .collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

fn eval_word(group: &FiniteGroup, images: &[usize], word: &Word) -> usize {
    word.iter().fold(0, |acc, &(g, e)| {
        let x = images[g];
        let o = group.element_order(x) as i64;
        group.mul(acc, group.pow(x, e.rem_euclid(o) as u64))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicTermWire {
    pub coeff: Cyclotomic,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicEntryWire {
    pub terms: Vec<SymbolicTermWire>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicMatrixWire {
    pub generators: Vec<String>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<SymbolicEntryWire>>,
}

impl SymbolicMatrixWire {
    pub fn build(&self) -> Result<SymbolicMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::ShapeMismatch(format!("declared {}x{} does not match entries", self.rows, self.cols)));
        }
        let entries = self
            .entries
            .iter()
            .flatten()
            .map(|e| e.terms.iter().map(|t| Ok((t.coeff.clone(), parse_word(&t.word, &self.generators)?))).collect())
            .collect::<Result<Vec<_>>>()?;
        SymbolicMatrix::new(self.generators.clone(), self.rows, self.cols, entries)
    }
}

/// One finite quotient `Q_i` with the images of the abstract generators.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub label: String,
    pub group: Arc<FiniteGroup>,
    pub images: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ResidualChain {
    pub generators: Vec<String>,
    pub levels: Vec<ChainLevel>,
}

impl ResidualChain {
    pub fn new(generators: Vec<String>, levels: Vec<ChainLevel>) -> Result<Self> {
        for lvl in &levels {
            if lvl.images.len() != generators.len() {
                return Err(Error::InvalidInput(format!("level {} lacks generator images", lvl.label)));
            }
            if lvl.images.iter().any(|&x| x >= lvl.group.size()) {
                return Err(Error::InvalidInput(format!("generator image out of range at level {}", lvl.label)));
            }
            if lvl.group.closure(&lvl.images).len() != lvl.group.size() {
                return Err(Error::InvalidInput(format!("generator images do not generate level {}", lvl.label)));
            }
        }
        Ok(Self { generators, levels })
    }

    /// `Z/N` quotients of `Z = <t>`.
    pub fn cyclic(ns: &[usize]) -> Self {
        let levels = ns
            .iter()
            .map(|&n| ChainLevel { label: format!("Z/{n}"), group: Arc::new(FiniteGroup::cyclic(n)), images: vec![1 % n] })
            .collect();
        Self { generators: vec!["t".into()], levels }
    }

    /// `Z/k × Z/N` quotients of `Z/k × Z = <s> × <t>`.
    pub fn product(k: usize, ns: &[usize]) -> Self {
        let zk = FiniteGroup::cyclic(k);
        let levels = ns
            .iter()
            .map(|&n| ChainLevel {
                label: format!("Z/{k} x Z/{n}"),
                group: Arc::new(FiniteGroup::direct_product(&zk, &FiniteGroup::cyclic(n))),
                images: vec![(1 % k) * n, 1 % n],
            })
            .collect();
        Self { generators: vec!["s".into(), "t".into()], levels }
    }

    /// Dihedral quotients `D_2N` of the infinite dihedral group, `t` a
    /// translation and `s` a reflection.
    pub fn dihedral(ns: &[usize]) -> Self {
        let levels = ns
            .iter()
            .map(|&n| ChainLevel { label: format!("D_{}", 2 * n), group: Arc::new(FiniteGroup::dihedral(n)), images: vec![1 % n, n] })
            .collect();
        Self { generators: vec!["t".into(), "s".into()], levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn truncated(&self, levels: usize) -> Self {
        Self { generators: self.generators.clone(), levels: self.levels.iter().take(levels).cloned().collect() }
    }

    /// Images of the named generators at a level.
    fn images_for(&self, names: &[String], level: usize) -> Result<Vec<usize>> {
        let lvl = self.levels.get(level).ok_or_else(|| Error::InvalidInput(format!("no level {level}")))?;
        names
            .iter()
            .map(|n| {
                let g = self
                    .generators
                    .iter()
                    .position(|x| x == n)
                    .ok_or_else(|| Error::InvalidInput(format!("generator {n:?} has no image in the chain")))?;
                Ok(lvl.images[g])
            })
            .collect()
    }

    pub fn evaluate_word(&self, level: usize, word: &Word) -> usize {
        let lvl = &self.levels[level];
        eval_word(&lvl.group, &lvl.images, word)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.generators)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainLevelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub group: GroupSpec,
    pub images: BTreeMap<String, usize>,
}

/// Wire form of a [`ResidualChain`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainSpec {
    pub generators: Vec<String>,
    pub levels: Vec<ChainLevelSpec>,
}

impl ChainSpec {
    pub fn build(&self, cap: usize) -> Result<ResidualChain> {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let group = Arc::new(l.group.build(cap)?);
                let images = self
                    .generators
                    .iter()
                    .map(|g| {
                        l.images.get(g).copied().ok_or_else(|| Error::InvalidInput(format!("level {i} has no image for {g:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ChainLevel { label: l.label.clone().unwrap_or_else(|| format!("level {i}")), group, images })
            })
            .collect::<Result<Vec<_>>>()?;
        ResidualChain::new(self.generators.clone(), levels)
    }

    pub fn from_chain(chain: &ResidualChain) -> Self {
        Self {
            generators: chain.generators.clone(),
            levels: chain
                .levels
                .iter()
                .map(|l| ChainLevelSpec {
                    label: Some(l.label.clone()),
                    group: GroupSpec::from_group(&l.group),
                    images: chain.generators.iter().cloned().zip(l.images.iter().copied()).collect(),
                })
                .collect(),
        }
    }
}

/// Center-valued kernel dimension at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelDimension {
    pub level: usize,
    pub label: String,
    pub order: usize,
    pub dim_u: GroupRingElement,
    pub canonical_trace: Rational,
    /// Coefficients of `dim_u` at the images of the tracked words.
    pub tracked: Vec<Cyclotomic>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointRecord {
    key: String,
    level: usize,
    label: String,
    order: usize,
    dim_u: ElementWire,
    canonical_trace: String,
    tracked: Vec<Cyclotomic>,
}

fn level_key(a: &SymbolicMatrix, chain: &ResidualChain, level: usize, tracked: &[Word]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&a.to_wire()).expect("serializable"));
    let lvl = &chain.levels[level];
    h.update(lvl.group.content_hash().as_bytes());
    for &x in &lvl.images {
        h.update((x as u64).to_le_bytes());
    }
    for w in tracked {
        h.update(format_word(w, &chain.generators).as_bytes());
        h.update(b"|");
    }
    format!("{:x}", h.finalize())
}

fn read_checkpoint(path: &Path) -> Vec<CheckpointRecord> {
    let Ok(file) = File::open(path) else { return Vec::new() };
    // an interrupted write can leave a partial last line; skip anything unparsable
    BufReader::new(file).lines().map_while(|l| l.ok()).filter_map(|l| serde_json::from_str(&l).ok()).collect()
}

/// `τ^u(pr_ker A[i])` at every level, in level order.
///
/// Levels run in parallel. With a checkpoint path, each finished level is
/// appended as one JSON line and levels already present are not recomputed.
pub fn dimension_sequence(
    a: &SymbolicMatrix,
    chain: &ResidualChain,
    tracked: &[Word],
    checkpoint: Option<&Path>,
) -> Result<Vec<LevelDimension>> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch("kernel dimensions need a square matrix".into()));
    }
    let keys: Vec<String> = (0..chain.len()).map(|i| level_key(a, chain, i, tracked)).collect();
    let mut done: BTreeMap<usize, LevelDimension> = BTreeMap::new();
    if let Some(path) = checkpoint {
        for rec in read_checkpoint(path) {
            if rec.level < chain.len() && rec.key == keys[rec.level] {
                let group = &chain.levels[rec.level].group;
                done.insert(
                    rec.level,
                    LevelDimension {
                        level: rec.level,
                        label: rec.label,
                        order: rec.order,
                        dim_u: rec.dim_u.to_element(group)?,
                        canonical_trace: parse_rational(&rec.canonical_trace)?,
                        tracked: rec.tracked,
                    },
                );
            }
        }
    }
    let sink = match checkpoint {
        Some(path) => {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            let text = std::fs::read(path)?;
            if text.last().is_some_and(|&b| b != b'\n') {
                f.write_all(b"\n")?;
            }
            Some(Mutex::new(f))
        }
        None => None,
    };
    let todo: Vec<usize> = (0..chain.len()).filter(|i| !done.contains_key(i)).collect();
    let fresh = todo
        .par_iter()
        .map(|&i| {
            let lvl = &chain.levels[i];
            let k = kernel_projection(&a.evaluate(chain, i)?)?;
            let canonical_trace = k
                .canonical_trace
                .as_rational()
                .ok_or_else(|| Error::Verification("canonical trace of a projection is not rational".into()))?;
            let tracked = tracked.iter().map(|w| k.dim_u.coeff(chain.evaluate_word(i, w))).collect();
            let dim = LevelDimension { level: i, label: lvl.label.clone(), order: lvl.group.size(), dim_u: k.dim_u, canonical_trace, tracked };
            if let Some(sink) = &sink {
                let rec = CheckpointRecord {
                    key: keys[i].clone(),
                    level: i,
                    label: dim.label.clone(),
                    order: dim.order,
                    dim_u: ElementWire::from_element(&dim.dim_u),
                    canonical_trace: rational_to_string(&dim.canonical_trace),
                    tracked: dim.tracked.clone(),
                };
                let mut line = serde_json::to_string(&rec)?;
                line.push('\n');
                let mut f = sink.lock().expect("checkpoint lock");
                f.write_all(line.as_bytes())?;
                f.flush()?;
            }
            Ok(dim)
        })
        .collect::<Result<Vec<_>>>()?;
    done.extend(fresh.into_iter().map(|d| (d.level, d)));
    Ok(done.into_values().collect())
}

/// Smallest level `r` such that every witness set maps injectively into
/// `Q_i` for all `i ≥ r`.
pub fn stabilization_index(chain: &ResidualChain, witnesses: &[Vec<Word>]) -> Result<usize> {
    let injective = |i: usize| {
        witnesses.iter().all(|set| {
            let images: HashSet<usize> = set.iter().map(|w| chain.evaluate_word(i, w)).collect();
            images.len() == set.len()
        })
    };
    let mut r = chain.len();
    while r > 0 && injective(r - 1) {
        r -= 1;
    }
    if r == chain.len() {
        return Err(Error::ChainTooShort("no level maps every witness set injectively".into()));
    }
    Ok(r)
}

/// Coordinates `⟨x, P^i⟩ / ⟨P^i, P^i⟩` of the part of `dim_u` supported on
/// the image of `Δ⁺`, pulled back along `delta_images`.
pub fn delta_coordinates(
    dim_u: &GroupRingElement,
    delta: &Arc<FiniteGroup>,
    delta_images: &[usize],
    blocks: &CentralIdempotentSet,
) -> Result<Vec<Rational>> {
    let x = GroupRingElement::from_terms(delta, delta_images.iter().enumerate().map(|(d, &img)| (d, dim_u.coeff(img))));
    blocks
        .p
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let c = x.inner(p)? / p.inner(p)?;
            c.as_rational().ok_or_else(|| Error::Verification(format!("coordinate on block {i} is not rational: {c}")))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Snap,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quantization {
    pub tail: Vec<Vec<Rational>>,
    pub nearest: Vec<Rational>,
    pub distance: Rational,
    pub oscillation: Rational,
    pub verdict: Verdict,
}

fn max_abs_diff(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or_else(Rational::zero)
}

/// Nearest point of `⊕ gap_i·Z` by rounding each coordinate.
pub fn nearest_point(x: &[Rational], gaps: &[Rational]) -> Vec<Rational> {
    x.iter()
        .zip(gaps)
        .map(|(v, g)| {
            let half = Rational::new(1.into(), 2.into());
            (v / g + half).floor() * g
        })
        .collect()
}

/// Compares the tail of a coordinate sequence with the lattice `⊕ gap_i·Z`.
///
/// The verdict is DIVERGENT when consecutive tail values differ by more
/// than `tolerance`, SNAP when the final value lies within `tolerance` and
/// within half the smallest gap of a lattice point, and INCONCLUSIVE
/// otherwise.
pub fn quantization_check(
    sequence: &[Vec<Rational>],
    gaps: &[Rational],
    tolerance: &Rational,
    window: usize,
) -> Result<Quantization> {
    let last = sequence.last().ok_or_else(|| Error::InvalidInput("empty sequence".into()))?;
    if last.len() != gaps.len() {
        return Err(Error::ShapeMismatch("sequence and lattice have different block counts".into()));
    }
    let tail: Vec<Vec<Rational>> = sequence[sequence.len().saturating_sub(window.max(1))..].to_vec();
    let oscillation = tail.windows(2).map(|w| max_abs_diff(&w[0], &w[1])).max().unwrap_or_else(Rational::zero);
    let nearest = nearest_point(last, gaps);
    let distance = max_abs_diff(last, &nearest);
    let min_gap = gaps.iter().min().cloned().unwrap_or_else(Rational::zero);
    let half_gap = min_gap / Rational::from_integer(2.into());
    let verdict = if oscillation > *tolerance {
        Verdict::Divergent
    } else if distance < *tolerance && distance < half_gap {
        Verdict::Snap
    } else {
        Verdict::Inconclusive
    };
    Ok(Quantization { tail, nearest, distance, oscillation, verdict })
}

/// Everything `approximate` reports.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub levels: Vec<LevelDimension>,
    pub stabilization_index: usize,
    /// `P`-coordinates on `Δ⁺` for each level from the stabilization index on.
    pub coordinates: Vec<Vec<Rational>>,
    pub quantization: Quantization,
}

/// Runs the whole harness: dimensions per level, `Δ⁺` stabilization,
/// coordinates in the `P` basis, and the snap verdict against `lattice`.
pub fn approximate(
    a: &SymbolicMatrix,
    chain: &ResidualChain,
    vg: &VirtualGroup,
    lattice: &AtiyahLattice,
    tolerance: &Rational,
    window: usize,
    checkpoint: Option<&Path>,
) -> Result<Approximation> {
    let words_text = vg
        .delta_words
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("model {} has no words for Δ⁺", vg.name)))?;
    let delta_words = words_text.iter().map(|w| chain.parse_word(w)).collect::<Result<Vec<_>>>()?;
    let levels = dimension_sequence(a, chain, &delta_words, checkpoint)?;
    let r = stabilization_index(chain, std::slice::from_ref(&delta_words))?;
    let blocks = &lattice.blocks;
    let mut coordinates = Vec::new();
    for lvl in &levels[r..] {
        let images: Vec<usize> = delta_words.iter().map(|w| chain.evaluate_word(lvl.level, w)).collect();
        let check = lift_is_homomorphism(&vg.delta_plus, &chain.levels[lvl.level].group, &images);
        if !check {
            return Err(Error::InvalidInput(format!("Δ⁺ words do not embed Δ⁺ at level {}", lvl.label)));
        }
        coordinates.push(delta_coordinates(&lvl.dim_u, &vg.delta_plus, &images, blocks)?);
    }
    let quantization = quantization_check(&coordinates, &lattice.block_gaps()?, tolerance, window)?;
    Ok(Approximation { levels, stabilization_index: r, coordinates, quantization })
}

fn lift_is_homomorphism(delta: &FiniteGroup, target: &FiniteGroup, images: &[usize]) -> bool {
    (0..delta.size()).all(|x| (0..delta.size()).all(|y| images[delta.mul(x, y)] == target.mul(images[x], images[y])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn gens(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn word_parsing_and_reduction() {
        let g = gens(&["s", "t"]);
        assert_eq!(parse_word("t t^-1", &g).unwrap(), vec![]);
        assert_eq!(parse_word("t^-1 s", &g).unwrap(), vec![(1, -1), (0, 1)]);
        assert_eq!(parse_word("s*s^2", &g).unwrap(), vec![(0, 3)]);
        assert_eq!(format_word(&parse_word("t^-1 s", &g).unwrap(), &g), "t^-1 s");
        assert!(parse_word("x", &g).is_err());
    }

    #[test]
    fn one_minus_t_sequence() {
        let chain = ResidualChain::cyclic(&[2, 3, 4, 6, 12]);
        let a = SymbolicMatrix::polynomial(&["t"], &[(1.into(), "1"), ((-1).into(), "t")]).unwrap();
        let seq = dimension_sequence(&a, &chain, &[vec![]], None).unwrap();
        let traces: Vec<Rational> = seq.iter().map(|l| l.canonical_trace.clone()).collect();
        assert_eq!(traces, vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 6), rat(1, 12)]);
    }

    #[test]
    fn t_times_inverse_is_one() {
        let chain = ResidualChain::cyclic(&[2, 5]);
        let a = SymbolicMatrix::polynomial(&["t"], &[(1.into(), "t t^-1")]).unwrap();
        for i in 0..2 {
            assert_eq!(a.evaluate(&chain, i).unwrap(), GroupRingMatrix::identity(&chain.levels[i].group, 1));
        }
    }

    #[test]
    fn missing_generator_image() {
        let chain = ResidualChain::cyclic(&[2]);
        let a = SymbolicMatrix::polynomial(&["u"], &[(1.into(), "u")]).unwrap();
        assert!(a.evaluate(&chain, 0).is_err());
    }

    #[test]
    fn stabilization_examples() {
        let chain = ResidualChain::cyclic(&[2, 4, 8]);
        let g = &chain.generators;
        let witness: Vec<Word> = ["1", "t", "t^2", "t^3"].iter().map(|w| parse_word(w, g).unwrap()).collect();
        assert_eq!(stabilization_index(&chain, &[witness]).unwrap(), 1);
        assert_eq!(stabilization_index(&chain, &[vec![vec![]]]).unwrap(), 0);
        let short = ResidualChain::cyclic(&[2, 3]);
        let witness: Vec<Word> = ["1", "t", "t^2", "t^3"].iter().map(|w| parse_word(w, g).unwrap()).collect();
        assert!(matches!(stabilization_index(&short, &[witness]), Err(Error::ChainTooShort(_))));
    }

    #[test]
    fn quantization_verdicts() {
        let seq: Vec<Vec<Rational>> = [rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 6), rat(1, 12)].into_iter().map(|x| vec![x]).collect();
        let q = quantization_check(&seq, &[rat(1, 1)], &rat(1, 10), 2).unwrap();
        assert_eq!(q.verdict, Verdict::Snap);
        assert_eq!(q.nearest, vec![rat(0, 1)]);
        assert_eq!(q.distance, rat(1, 12));
        let alt: Vec<Vec<Rational>> = [0, 1, 0, 1].iter().map(|&k| vec![rat(k, 2)]).collect();
        assert_eq!(quantization_check(&alt, &[rat(1, 1)], &rat(1, 10), 2).unwrap().verdict, Verdict::Divergent);
        assert!(quantization_check(&[], &[rat(1, 1)], &rat(1, 10), 2).is_err());
    }

    #[test]
    fn approximate_on_the_integers() {
        let vg = VirtualGroup::torsion_free();
        let lattice = crate::lattice::build_lattice(&vg, &vg.field(1), false).unwrap();
        let a = SymbolicMatrix::polynomial(&["t"], &[(1.into(), "1"), ((-1).into(), "t")]).unwrap();
        let r = approximate(&a, vg.chain.as_ref().unwrap(), &vg, &lattice, &rat(1, 10), 2, None).unwrap();
        assert_eq!(r.stabilization_index, 0);
        assert_eq!(r.coordinates.last().unwrap(), &vec![rat(1, 12)]);
        assert_eq!(r.quantization.verdict, Verdict::Snap);
        assert_eq!(r.quantization.nearest, vec![rat(0, 1)]);
    }

    #[test]
    fn approximate_on_z3_times_z() {
        let vg = VirtualGroup::cyclic_times_z(3);
        let lattice = crate::lattice::build_lattice(&vg, &vg.field(3), false).unwrap();
        let third = |c: Cyclotomic| c * Cyclotomic::from(rat(-1, 3));
        let w = |k| Cyclotomic::root_of_unity(3, k);
        let a = SymbolicMatrix::polynomial(
            &["s", "t"],
            &[(1.into(), "1"), (third(1.into()), "t"), (third(w(2)), "s t"), (third(w(1)), "s^2 t")],
        )
        .unwrap();
        let r = approximate(&a, vg.chain.as_ref().unwrap(), &vg, &lattice, &rat(1, 10), 2, None).unwrap();
        assert_eq!(r.coordinates.last().unwrap(), &vec![rat(0, 1), rat(1, 24), rat(0, 1)]);
        assert_eq!(r.quantization.verdict, Verdict::Snap);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = std::env::temp_dir().join(format!("atiyah-ckpt-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let chain = ResidualChain::cyclic(&[2, 3, 4]);
        let a = SymbolicMatrix::polynomial(&["t"], &[(1.into(), "1"), ((-1).into(), "t")]).unwrap();
        let first = dimension_sequence(&a, &chain.truncated(2), &[], Some(&dir)).unwrap();
        std::fs::OpenOptions::new().append(true).open(&dir).unwrap().write_all(b"{\"truncated").unwrap();
        let again = dimension_sequence(&a, &chain, &[], Some(&dir)).unwrap();
        assert_eq!(first[..], again[..2]);
        assert_eq!(again[2].canonical_trace, rat(1, 4));
        // two original records, the torn line, and the new level
        assert_eq!(std::fs::read_to_string(&dir).unwrap().lines().count(), 4);
        assert_eq!(read_checkpoint(&dir).len(), 3);
        std::fs::remove_file(&dir).unwrap();
    }
}
