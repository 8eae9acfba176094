//! Overlap tests and an independent relator-action check.

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{Engine, State};
use super::{Collector, Element};
use crate::error::Result;
use crate::presentation::Presentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapFamily {
    /// `x_k (x_j x_i)` against `(x_k x_j) x_i`, `k > j > i`.
    Triple,
    /// `(x_j^p) x_i` against `x_j^{p-1} (x_j x_i)`, `j > i`.
    PowerLeft,
    /// `x_j (x_i^p)` against `(x_j x_i) x_i^{p-1}`, `j > i`.
    PowerRight,
    /// `(x_i^p) x_i` against `x_i (x_i^p)`.
    PowerSelf,
}

impl OverlapFamily {
    pub fn tag(self) -> &'static str {
        match self {
            OverlapFamily::Triple => "triple",
            OverlapFamily::PowerLeft => "power-left",
            OverlapFamily::PowerRight => "power-right",
            OverlapFamily::PowerSelf => "power-self",
        }
    }
}

/// Both sides of one overlap, collected with the stack collector.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub family: OverlapFamily,
    /// Generator indices, largest first.
    pub indices: Vec<usize>,
    pub left: State,
    pub right: State,
}

fn word(engine: &Engine, letters: &[(usize, u32)]) -> Result<State> {
    engine.collect_word(letters)
}

fn then(engine: &Engine, mut s: State, letters: &[(usize, u32)]) -> Result<State> {
    engine.collect(&mut s, letters)?;
    Ok(s)
}

fn then_state(engine: &Engine, mut s: State, other: &State) -> Result<State> {
    engine.collect_state(&mut s, other)?;
    Ok(s)
}

/// Evaluates every overlap, in the order: triples by `(k, j, i)`, then the
/// power families by index.
pub fn overlaps(engine: &Engine) -> Result<Vec<Overlap>> {
    let n = engine.n();
    let p = engine.prime();
    let mut out = Vec::new();
    for k in 0..n {
        for j in 0..k {
            for i in 0..j {
                let ji = word(engine, &[(j, 1), (i, 1)])?;
                let left = then_state(engine, word(engine, &[(k, 1)])?, &ji)?;
                let right = then(engine, word(engine, &[(k, 1), (j, 1)])?, &[(i, 1)])?;
                out.push(Overlap { family: OverlapFamily::Triple, indices: vec![k, j, i], left, right });
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            let left = then(engine, word(engine, &[(j, p)])?, &[(i, 1)])?;
            let ji = word(engine, &[(j, 1), (i, 1)])?;
            let right = then_state(engine, word(engine, &[(j, p - 1)])?, &ji)?;
            out.push(Overlap { family: OverlapFamily::PowerLeft, indices: vec![j, i], left, right });
        }
    }
    for j in 0..n {
        for i in 0..j {
            let ip = word(engine, &[(i, p)])?;
            let left = then_state(engine, word(engine, &[(j, 1)])?, &ip)?;
            let right = then(engine, word(engine, &[(j, 1), (i, 1)])?, &[(i, p - 1)])?;
            out.push(Overlap { family: OverlapFamily::PowerRight, indices: vec![j, i], left, right });
        }
    }
    for i in 0..n {
        let ip = word(engine, &[(i, p)])?;
        let left = then(engine, ip.clone(), &[(i, 1)])?;
        let right = then_state(engine, word(engine, &[(i, 1)])?, &ip)?;
        out.push(Overlap { family: OverlapFamily::PowerSelf, indices: vec![i], left, right });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailedOverlap {
    pub family: OverlapFamily,
    pub indices: Vec<usize>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

/// Result of letting each generator act on the `p^n` normal words by right
/// multiplication and testing every defining relator on every word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationCheck {
    pub elements: u64,
    pub relator_failures: u64,
    /// All relators act trivially, so the group has exactly `p^n` elements.
    pub order_confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub overlaps_checked: usize,
    pub failures: Vec<FailedOverlap>,
    pub enumeration: Option<EnumerationCheck>,
}

#[derive(Clone, Copy, Debug)]
pub struct ConsistencyOptions {
    pub step_budget: u64,
    /// Run the relator-action check when `p^n` is at most this.
    pub enumerate_up_to: u64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions { step_budget: super::DEFAULT_STEP_BUDGET, enumerate_up_to: 0 }
    }
}

pub fn check_consistency(pres: &Presentation, opts: ConsistencyOptions) -> Result<ConsistencyReport> {
    let col = Collector::with_budget(pres, opts.step_budget)?;
    let all = overlaps(col.engine())?;
    let overlaps_checked = all.len();
    let failures: Vec<FailedOverlap> = all
        .into_iter()
        .filter(|o| o.left.exps != o.right.exps)
        .map(|o| FailedOverlap { family: o.family, indices: o.indices, left: o.left.exps, right: o.right.exps })
        .collect();
    let enumeration = if col.order() <= opts.enumerate_up_to as u128 { Some(relator_action(&col)) } else { None };
    Ok(ConsistencyReport { consistent: failures.is_empty(), overlaps_checked, failures, enumeration })
}

/// Counts (word, relator) pairs on which the relator acts nontrivially.
pub fn relator_action(col: &Collector) -> EnumerationCheck {
    let engine = col.engine();
    let n = col.n();
    let p = col.prime();
    let order = col.order() as u64;
    let act = |s: &mut State, letters: &[(usize, u32)]| {
        for &(g, a) in letters {
            for _ in 0..a {
                engine.mul_gen_pow(s, g, 1).expect("no tails");
            }
        }
    };
    let pres = col.presentation();
    let relators: Vec<(Vec<(usize, u32)>, Vec<(usize, u32)>)> = {
        let mut r = Vec::new();
        for i in 0..n {
            r.push((vec![(i, p)], pres.power_rhs[i].0.clone()));
        }
        for i in 0..n {
            for j in 0..i {
                let mut rhs = vec![(j, 1), (i, 1)];
                if let Some(w) = pres.commutator_word(i, j) {
                    rhs.extend(w.0.iter().copied());
                }
                r.push((vec![(i, 1), (j, 1)], rhs));
            }
        }
        r
    };
    let failures: u64 = (0..order)
        .into_par_iter()
        .map(|idx| {
            let g = State { exps: col.element_from_index(idx).into_exponents(), tails: Vec::new() };
            let mut bad = 0u64;
            for (lhs, rhs) in &relators {
                let mut a = g.clone();
                act(&mut a, lhs);
                let mut b = g.clone();
                act(&mut b, rhs);
                if a.exps != b.exps {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    EnumerationCheck { elements: order, relator_failures: failures, order_confirmed: failures == 0 }
}

/// Brute-force check of the group axioms the collector relies on:
/// associativity on the given triples.
pub fn associativity_failures(col: &Collector, triples: &[(Element, Element, Element)]) -> usize {
    triples
        .iter()
        .filter(|(x, y, z)| col.multiply(&col.multiply(x, y), z) != col.multiply(x, &col.multiply(y, z)))
        .count()
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

    #[test]
    fn overlap_count() {
        let col = Collector::new(&g9(5)).unwrap();
        // C(7,3) + 2 C(7,2) + 7
        assert_eq!(overlaps(col.engine()).unwrap().len(), 35 + 42 + 7);
    }

    #[test]
    fn g9_consistency_depends_on_prime() {
        let opts = ConsistencyOptions { enumerate_up_to: 100_000, ..Default::default() };
        let r3 = check_consistency(&g9(3), opts).unwrap();
        assert!(!r3.consistent);
        assert!(!r3.enumeration.unwrap().order_confirmed);
        let r5 = check_consistency(&g9(5), opts).unwrap();
        assert!(r5.consistent);
        assert!(r5.enumeration.unwrap().order_confirmed);
    }

    #[test]
    fn broken_power_relation_is_caught() {
        // a^p = b with [b,a] = c makes c trivial.
        let pres = parse_presentation("group X\nprime 3\ngenerators a b c\npow a = b\ncomm [b,a] = c\n").unwrap();
        let r = check_consistency(&pres, ConsistencyOptions { enumerate_up_to: 1000, ..Default::default() }).unwrap();
        assert!(!r.consistent);
        assert!(!r.failures.is_empty());
        assert!(r.enumeration.unwrap().relator_failures > 0);
    }
}
