//! Lower central series, center and exponent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Collector, Element, Subgroup};
use crate::presentation::Presentation;

/// Above this order the exponent test samples instead of enumerating.
const EXPONENT_ENUMERATION_LIMIT: u128 = 100_000;
const EXPONENT_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMethod {
    /// Class below `p`: the group is regular and generators of order `p` suffice.
    Regular,
    Enumerated,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub prime: u32,
    /// `log_p |G|`.
    pub order_log: usize,
    pub class: usize,
    /// Generator indices of each term of the lower central series, starting
    /// with the whole group and ending with the first trivial term.
    pub lower_central_series: Vec<Vec<usize>>,
    pub center: Vec<usize>,
    pub exponent_p: bool,
    pub exponent_method: ExponentMethod,
    #[serde(skip)]
    pub center_gens: Vec<Element>,
}

/// `[H, G]` for normal `H`.
fn commutator_with_group(col: &Collector, h: &Subgroup) -> Subgroup {
    let gens = col.generators();
    let mut xs = Vec::new();
    for u in h.gens() {
        for x in &gens {
            let c = col.commutator(u, x);
            if !c.is_identity() {
                xs.push(c);
            }
        }
    }
    Subgroup::normal_closure(col, &xs)
}

pub fn lower_central_series(col: &Collector) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(col)];
    while series.last().map(|s| s.rank() > 0).unwrap_or(false) {
        let next = commutator_with_group(col, series.last().unwrap());
        series.push(next);
    }
    series
}

fn has_order_p(col: &Collector, x: &Element) -> bool {
    col.power(x, col.prime() as u64).is_identity()
}

pub fn exponent_is_p(col: &Collector, class: usize) -> (bool, ExponentMethod) {
    let gens_ok = col.generators().iter().all(|x| has_order_p(col, x));
    if class < col.prime() as usize {
        return (gens_ok, ExponentMethod::Regular);
    }
    if col.order() <= EXPONENT_ENUMERATION_LIMIT {
        let ok = (0..col.order() as u64).all(|i| has_order_p(col, &col.element_from_index(i)));
        return (ok, ExponentMethod::Enumerated);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let p = col.prime();
    let ok = gens_ok
        && (0..EXPONENT_SAMPLES).all(|_| {
            let exps = (0..col.n()).map(|_| rng.gen_range(0..p)).collect();
            has_order_p(col, &Element::from_exponents(exps))
        });
    (ok, ExponentMethod::Sampled)
}

pub fn structure(col: &Collector) -> StructureReport {
    let lcs = lower_central_series(col);
    let class = lcs.len() - 1;
    let center = col.center();
    let (exponent_p, exponent_method) = exponent_is_p(col, class);
    StructureReport {
        prime: col.prime(),
        order_log: col.n(),
        class,
        lower_central_series: lcs.iter().map(Subgroup::depths).collect(),
        center: center.depths(),
        exponent_p,
        exponent_method,
        center_gens: center.gens().to_vec(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict", content = "reason")]
pub enum FastPathVerdict {
    /// The multiplier is known to be trivial without any computation.
    Trivial,
    NotApplicable(String),
}

/// Shortcut for exponent-`p` groups of class at most 3 and `p > 3` whose
/// nontrivial commutator relations have pairwise distinct single-generator
/// right-hand sides.
pub fn prop27_fast_path(pres: &Presentation, class: usize) -> FastPathVerdict {
    if pres.prime <= 3 {
        return FastPathVerdict::NotApplicable("prime is at most 3".into());
    }
    if class > 3 {
        return FastPathVerdict::NotApplicable(format!("class {class} exceeds 3"));
    }
    if pres.power_rhs.iter().any(|w| !w.is_empty()) {
        return FastPathVerdict::NotApplicable("nontrivial power relation".into());
    }
    let mut seen = Vec::new();
    for (&(i, j), w) in pres.nontrivial_commutators() {
        let single = match w.letters() {
            [(g, 1)] => Some(*g),
            _ => None,
        };
        match single {
            Some(g) if !seen.contains(&g) => seen.push(g),
            Some(_) => {
                return FastPathVerdict::NotApplicable(format!(
                    "[{},{}] repeats a right-hand side",
                    pres.generators[i], pres.generators[j]
                ))
            }
            None => {
                return FastPathVerdict::NotApplicable(format!(
                    "[{},{}] is not a single generator",
                    pres.generators[i], pres.generators[j]
                ))
            }
        }
    }
    FastPathVerdict::Trivial
}
