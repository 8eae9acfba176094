//! The tails extension: every defining relation gets a new central
//! generator, and relations among those generators are read off from
//! overlaps and from lifted commutators of commuting pairs.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::collector::consistency::overlaps;
use crate::collector::{Collector, Element, Engine, GenWord, State, Subgroup, TailMap, DEFAULT_STEP_BUDGET};
use crate::error::{Error, Result};
use crate::presentation::Presentation;

/// Element of the extension: base exponents plus an integer tail vector.
pub type ExtElement = State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    /// Tails on power relations and on nontrivial commutator relations.
    Reduced,
    /// Tails on every power and every commutator relation.
    Full,
}

impl TailMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TailMode::Reduced => "reduced",
            TailMode::Full => "full",
        }
    }
}

impl fmt::Display for TailMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    Power(usize),
    /// `(i, j)` with `i > j`.
    Commutator(usize, usize),
}

#[derive(Clone, Debug)]
pub struct TailLabel {
    pub kind: TailKind,
    /// `t1`, `t2`, ...
    pub symbol: String,
    /// Left side of the relation, `[d,a]` or `c^p`.
    pub relator: String,
    /// Word whose value in the extension is the tail, e.g. `[d,a] e^-1`.
    pub defining: String,
}

/// A presentation with tails attached, and a collector for it.
#[derive(Clone, Debug)]
pub struct ExtendedPresentation {
    base: Collector,
    mode: TailMode,
    labels: Vec<TailLabel>,
    engine: Engine,
}

fn defining_expression(pres: &Presentation, relator: String, rhs: Option<&crate::presentation::NormalWord>) -> String {
    let Some(w) = rhs.filter(|w| !w.is_empty()) else { return relator };
    let inv: Vec<String> = w
        .letters()
        .iter()
        .rev()
        .map(|&(g, e)| format!("{}^-{}", pres.generators[g], e))
        .collect();
    format!("{relator} {}", inv.join(" "))
}

pub fn attach_tails(pres: &Presentation, mode: TailMode) -> Result<ExtendedPresentation> {
    attach_tails_with_budget(pres, mode, DEFAULT_STEP_BUDGET)
}

pub fn attach_tails_with_budget(pres: &Presentation, mode: TailMode, budget: u64) -> Result<ExtendedPresentation> {
    let base = Collector::with_budget(pres, budget)?;
    let n = pres.n();
    let mut map = TailMap::none(n);
    let mut labels = Vec::new();
    for i in 0..n {
        map.power[i] = Some(labels.len());
        let relator = format!("{}^p", pres.generators[i]);
        labels.push(TailLabel {
            kind: TailKind::Power(i),
            symbol: format!("t{}", labels.len() + 1),
            defining: defining_expression(pres, relator.clone(), Some(&pres.power_rhs[i])),
            relator,
        });
    }
    for i in 0..n {
        for j in 0..i {
            let rhs = pres.commutator_word(i, j);
            if mode == TailMode::Reduced && rhs.is_none() {
                continue;
            }
            map.comm[i][j] = Some(labels.len());
            let relator = format!("[{},{}]", pres.generators[i], pres.generators[j]);
            labels.push(TailLabel {
                kind: TailKind::Commutator(i, j),
                symbol: format!("t{}", labels.len() + 1),
                defining: defining_expression(pres, relator.clone(), rhs),
                relator,
            });
        }
    }
    map.count = labels.len();
    let engine = Engine::new(pres, map, budget)?;
    Ok(ExtendedPresentation { base, mode, labels, engine })
}

impl ExtendedPresentation {
    pub fn base(&self) -> &Presentation {
        self.base.presentation()
    }

    pub fn collector(&self) -> &Collector {
        &self.base
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    /// Number of tails.
    pub fn l(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[TailLabel] {
        &self.labels
    }

    /// Lifts a normal form with zero tail vector.
    pub fn lift(&self, x: &Element) -> ExtElement {
        State { exps: x.exponents().to_vec(), tails: vec![0; self.l()] }
    }

    /// Tail vector of `[x~, y~]`; `x` and `y` must commute in the base group.
    pub fn commuting_pair_tail(&self, x: &Element, y: &Element) -> Result<Vec<i64>> {
        let c = self.engine.commutator(&self.lift(x), &self.lift(y))?;
        if !c.is_trivial_exps() {
            return Err(Error::Defect(format!("elements {x} and {y} do not commute")));
        }
        Ok(c.tails)
    }
}

/// Collects a word in the extension.
pub fn ext_normalize(word: &GenWord, ext: &ExtendedPresentation) -> Result<ExtElement> {
    let mut s = ext.engine.identity();
    for &(g, e) in &word.0 {
        if g >= ext.base.n() {
            return Err(Error::Invalid(format!("generator index {} out of range", g + 1)));
        }
        ext.engine.mul_signed(&mut s, g, e)?;
    }
    Ok(s)
}

/// Integer rows of length `l`, each with a provenance string.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationMatrix {
    l: usize,
    rows: Vec<Vec<i64>>,
    provenance: Vec<String>,
}

impl RelationMatrix {
    pub fn new(l: usize) -> Self {
        RelationMatrix { l, rows: Vec::new(), provenance: Vec::new() }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn push(&mut self, row: Vec<i64>, provenance: String) {
        assert_eq!(row.len(), self.l, "row length must equal l");
        self.rows.push(row);
        self.provenance.push(provenance);
    }

    pub fn append(&mut self, other: RelationMatrix) {
        assert_eq!(self.l, other.l);
        self.rows.extend(other.rows);
        self.provenance.extend(other.provenance);
    }

    /// Drops zero rows, sorts by row then provenance and keeps the first of
    /// each group of equal rows.
    pub fn canonicalize(&mut self) {
        let mut pairs: Vec<(Vec<i64>, String)> = self
            .rows
            .drain(..)
            .zip(self.provenance.drain(..))
            .filter(|(r, _)| r.iter().any(|&x| x != 0))
            .collect();
        pairs.sort();
        pairs.dedup_by(|a, b| a.0 == b.0);
        for (r, p) in pairs {
            self.rows.push(r);
            self.provenance.push(p);
        }
    }

    /// One line per row, `provenance: c1 c2 ... cl`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (r, p) in self.rows.iter().zip(&self.provenance) {
            let cells: Vec<String> = r.iter().map(i64::to_string).collect();
            out.push_str(&format!("{p}: {}\n", cells.join(" ")));
        }
        out
    }

    pub fn to_int_matrix(&self) -> crate::intlattice::IntMatrix {
        crate::intlattice::IntMatrix::from_rows(&self.rows, self.l)
    }
}

fn names(pres: &Presentation, idx: &[usize]) -> String {
    idx.iter().map(|&i| pres.generators[i].as_str()).collect::<Vec<_>>().join(",")
}

/// Tail differences of the two sides of every overlap; zero rows dropped.
pub fn overlap_relations(ext: &ExtendedPresentation) -> Result<RelationMatrix> {
    let pres = ext.base();
    let mut m = RelationMatrix::new(ext.l());
    for o in overlaps(&ext.engine)? {
        if o.left.exps != o.right.exps {
            return Err(Error::Inconsistent(format!(
                "{} overlap at ({}) collects to {:?} and {:?}",
                o.family.tag(),
                names(pres, &o.indices),
                o.left.exps,
                o.right.exps
            )));
        }
        let row: Vec<i64> = o
            .left
            .tails
            .iter()
            .zip(&o.right.tails)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::TailOverflow))
            .collect::<Result<_>>()?;
        if row.iter().any(|&x| x != 0) {
            m.push(row, format!("{}({})", o.family.tag(), names(pres, &o.indices)));
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PairStrategy {
    /// Every unordered commuting pair, via per-element centralizers.
    Full,
    /// Orbit representatives of `G/Z(G)` against their centralizers, plus
    /// center generators against group generators.
    CenterReduced,
    /// Random commuting pairs; exploration only.
    Sampled { seed: u64, count: usize },
}

impl PairStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PairStrategy::Full => "full",
            PairStrategy::CenterReduced => "center-reduced",
            PairStrategy::Sampled { .. } => "sampled",
        }
    }
}

impl fmt::Display for PairStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Largest group order the full strategy will enumerate.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000;

#[derive(Clone, Copy, Debug)]
pub struct PairOptions {
    pub enumeration_limit: u64,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions { enumeration_limit: DEFAULT_ENUMERATION_LIMIT }
    }
}

fn pair_label(x: &Element, y: &Element) -> String {
    format!("pair({x},{y})")
}

/// Lifted commutators of commuting pairs, canonically sorted and
/// deduplicated. The row set does not depend on the number of workers.
pub fn commuting_pair_relations(
    ext: &ExtendedPresentation,
    strategy: PairStrategy,
    opts: PairOptions,
) -> Result<RelationMatrix> {
    let col = ext.collector();
    let pairs: Vec<(Vec<i64>, String)> = match strategy {
        PairStrategy::Full => full_pairs(ext, opts)?,
        PairStrategy::CenterReduced => center_reduced_pairs(ext)?,
        PairStrategy::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = col.prime();
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let x = Element::from_exponents((0..col.n()).map(|_| rng.gen_range(0..p)).collect());
                let c = col.centralizer(&x);
                let mut y = col.identity();
                for u in c.gens() {
                    y = col.multiply(&y, &col.power(u, rng.gen_range(0..p) as u64));
                }
                out.push((ext.commuting_pair_tail(&x, &y)?, pair_label(&x, &y)));
            }
            out
        }
    };
    let mut m = RelationMatrix::new(ext.l());
    for (r, p) in pairs {
        m.push(r, p);
    }
    m.canonicalize();
    Ok(m)
}

fn dedup_local(rows: Vec<(Vec<i64>, String)>) -> Vec<(Vec<i64>, String)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (r, p) in rows {
        if r.iter().all(|&x| x == 0) {
            continue;
        }
        if seen.insert(r.clone()) {
            out.push((r, p));
        }
    }
    out
}

fn full_pairs(ext: &ExtendedPresentation, opts: PairOptions) -> Result<Vec<(Vec<i64>, String)>> {
    let col = ext.collector();
    let order = col.order();
    if order > opts.enumeration_limit as u128 {
        return Err(Error::EnumerationBudget {
            needed: order.min(u64::MAX as u128) as u64,
            limit: opts.enumeration_limit,
        });
    }
    let shards: Vec<Vec<(Vec<i64>, String)>> = (1..order as u64)
        .into_par_iter()
        .map(|idx| {
            let x = col.element_from_index(idx);
            let mut rows = Vec::new();
            // Each unordered pair once: the reversed pair gives the negated row.
            for y in col.centralizer(&x).elements(col) {
                if col.index_of(&y) <= idx {
                    continue;
                }
                rows.push((ext.commuting_pair_tail(&x, &y)?, pair_label(&x, &y)));
            }
            Ok(dedup_local(rows))
        })
        .collect::<Result<_>>()?;
    Ok(shards.into_iter().flatten().collect())
}

/// Cosets of the center, indexed by the exponents at non-central depths.
struct CenterCosets<'a> {
    col: &'a Collector,
    center: Subgroup,
    free_depths: Vec<usize>,
}

impl<'a> CenterCosets<'a> {
    fn new(col: &'a Collector) -> Self {
        let center = col.center();
        let zd = center.depths();
        let free_depths = (0..col.n()).filter(|d| !zd.contains(d)).collect();
        CenterCosets { col, center, free_depths }
    }

    fn count(&self) -> u64 {
        (self.col.prime() as u64).pow(self.free_depths.len() as u32)
    }

    fn rep(&self, mut idx: u64) -> Element {
        let p = self.col.prime() as u64;
        let mut exps = vec![0; self.col.n()];
        for &d in self.free_depths.iter().rev() {
            exps[d] = (idx % p) as u32;
            idx /= p;
        }
        Element::from_exponents(exps)
    }

    fn index(&self, x: &Element) -> u64 {
        let s = self.center.sift(self.col, x);
        let p = self.col.prime() as u64;
        self.free_depths.iter().fold(0, |acc, &d| acc * p + s.exponents()[d] as u64)
    }
}

fn primitive_root(p: u32) -> u32 {
    let phi = p - 1;
    let factors: Vec<u32> = (2..=phi).filter(|q| phi.is_multiple_of(*q) && (2..*q).all(|r| q % r != 0)).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, phi / q, p) != 1))
        .unwrap_or(1)
}

fn pow_mod(b: u32, mut e: u32, m: u32) -> u32 {
    let (mut r, mut b, m) = (1u64, b as u64 % m as u64, m as u64);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

fn find(parent: &mut [u64], mut x: u64) -> u64 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

/// Smallest coset index of each orbit of `G/Z` under conjugation by the
/// generators and the power map `x -> x^r`, `r` a primitive root mod `p`.
fn orbit_representatives(cosets: &CenterCosets<'_>) -> Vec<u64> {
    let col = cosets.col;
    let m = cosets.count();
    let gens = col.generators();
    let inv: Vec<Element> = gens.iter().map(|g| col.invert(g)).collect();
    let r = primitive_root(col.prime()) as u64;
    let maps: Vec<Vec<u64>> = (0..=gens.len())
        .map(|k| {
            (0..m)
                .into_par_iter()
                .map(|idx| {
                    let x = cosets.rep(idx);
                    let y = if k < gens.len() {
                        col.multiply(&col.multiply(&inv[k], &x), &gens[k])
                    } else {
                        col.power(&x, r)
                    };
                    cosets.index(&y)
                })
                .collect()
        })
        .collect();
    let mut parent: Vec<u64> = (0..m).collect();
    for map in &maps {
        for (a, &b) in map.iter().enumerate() {
            let (ra, rb) = (find(&mut parent, a as u64), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..m).filter(|&i| find(&mut parent, i) == i).collect()
}

fn center_reduced_pairs(ext: &ExtendedPresentation) -> Result<Vec<(Vec<i64>, String)>> {
    let col = ext.collector();
    let cosets = CenterCosets::new(col);
    let mut rows = Vec::new();
    for z in cosets.center.gens() {
        for g in col.generators() {
            rows.push((ext.commuting_pair_tail(z, &g)?, pair_label(z, &g)));
        }
    }
    let reps: Vec<u64> = orbit_representatives(&cosets).into_iter().filter(|&i| i != 0).collect();
    let shards: Vec<Vec<(Vec<i64>, String)>> = reps
        .par_iter()
        .map(|&idx| {
            let x = cosets.rep(idx);
            let mut out = Vec::new();
            for u in col.centralizer(&x).gens() {
                out.push((ext.commuting_pair_tail(&x, u)?, pair_label(&x, u)));
            }
            Ok(dedup_local(out))
        })
        .collect::<Result<_>>()?;
    rows.extend(shards.into_iter().flatten());
    Ok(dedup_local(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn g9(p: u32) -> Presentation {
        parse_presentation(&format!(
            "group G9\nprime {p}\ngenerators a b c d e f g\n\
             comm [b,a] = c\ncomm [c,a] = d\ncomm [c,b] = e\ncomm [d,a] = e\n"
        ))
        .unwrap()
    }

    fn unit(l: usize, k: usize) -> Vec<i64> {
        let mut v = vec![0; l];
        v[k] = 1;
        v
    }

    #[test]
    fn tail_counts() {
        assert_eq!(attach_tails(&g9(5), TailMode::Reduced).unwrap().l(), 11);
        assert_eq!(attach_tails(&g9(5), TailMode::Full).unwrap().l(), 28);
        let g2 = parse_presentation("group G2\nprime 7\ngenerators a b c d e f g\ncomm [b,a] = c\n").unwrap();
        assert_eq!(attach_tails(&g2, TailMode::Reduced).unwrap().l(), 8);
    }

    #[test]
    fn labels_follow_relation_order() {
        let ext = attach_tails(&g9(5), TailMode::Reduced).unwrap();
        let rel: Vec<&str> = ext.labels()[7..].iter().map(|t| t.relator.as_str()).collect();
        assert_eq!(rel, ["[b,a]", "[c,a]", "[c,b]", "[d,a]"]);
        assert_eq!(ext.labels()[10].defining, "[d,a] e^-1");
        assert_eq!(ext.labels()[10].symbol, "t11");
    }

    #[test]
    fn normalize_in_extension() {
        let ext = attach_tails(&g9(5), TailMode::Reduced).unwrap();
        let bp = ext_normalize(&GenWord::new(vec![(1, 5)]), &ext).unwrap();
        assert!(bp.is_trivial_exps());
        assert_eq!(bp.tails, unit(11, 1));
        let w = GenWord::new(vec![(1, 1), (0, 1)]).concat(&GenWord::new(vec![(0, 1), (1, 1), (2, 1)]).inverse());
        let s = ext_normalize(&w, &ext).unwrap();
        assert!(s.is_trivial_exps());
        assert_eq!(s.tails, unit(11, 7));
        assert_eq!(ext_normalize(&GenWord::default(), &ext).unwrap(), ext.engine().identity());
    }

    #[test]
    fn central_pair_gives_zero_row() {
        let ext = attach_tails(&g9(5), TailMode::Reduced).unwrap();
        let col = ext.collector();
        let t = ext.commuting_pair_tail(&col.generator(4), &col.generator(0)).unwrap();
        assert!(t.iter().all(|&x| x == 0));
    }

    #[test]
    fn overlap_rows_are_nonzero() {
        for mode in [TailMode::Reduced, TailMode::Full] {
            let ext = attach_tails(&g9(5), mode).unwrap();
            let m = overlap_relations(&ext).unwrap();
            assert!(!m.is_empty());
            assert!(m.rows().iter().all(|r| r.iter().any(|&x| x != 0)));
        }
    }

    #[test]
    fn inconsistent_base_is_reported() {
        let ext = attach_tails(&g9(3), TailMode::Reduced).unwrap();
        assert!(matches!(overlap_relations(&ext), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn dump_format() {
        let mut m = RelationMatrix::new(2);
        m.push(vec![0, 0], "z".into());
        m.push(vec![1, -5], "b".into());
        m.push(vec![1, -5], "a".into());
        m.canonicalize();
        assert_eq!(m.dump(), "a: 1 -5\n");
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
    }
}
