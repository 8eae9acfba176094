//! Arithmetic in the group defined by a polycyclic presentation.

pub mod consistency;
pub mod engine;
pub mod structure;
pub mod subgroup;

use std::fmt;

pub use consistency::{check_consistency, ConsistencyReport, EnumerationCheck, FailedOverlap, OverlapFamily};
pub use engine::{Engine, State, TailMap, DEFAULT_STEP_BUDGET};
pub use structure::{prop27_fast_path, structure, FastPathVerdict, StructureReport};
pub use subgroup::Subgroup;

use crate::error::{Error, Result};
use crate::presentation::{validate_polycyclic, Presentation};

/// A group element in normal form `x_1^{e_1} ... x_n^{e_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<u32>);

impl Element {
    pub fn identity(n: usize) -> Self {
        Element(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Element(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn into_exponents(self) -> Vec<u32> {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first nonzero exponent.
    pub fn depth(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    fn state(self) -> State {
        State { exps: self.0, tails: Vec::new() }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A word over the generators with arbitrary integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenWord(pub Vec<(usize, i64)>);

impl GenWord {
    pub fn new(letters: Vec<(usize, i64)>) -> Self {
        GenWord(letters)
    }

    pub fn generator(g: usize) -> Self {
        GenWord(vec![(g, 1)])
    }

    pub fn concat(mut self, other: &GenWord) -> Self {
        self.0.extend_from_slice(&other.0);
        self
    }

    pub fn inverse(&self) -> Self {
        GenWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn from_element(x: &Element) -> Self {
        GenWord(
            x.exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(g, &e)| (g, e as i64))
                .collect(),
        )
    }
}

fn infallible<T>(r: Result<T>) -> T {
    // Without tails no tail arithmetic can overflow.
    r.expect("tail-free collection cannot fail")
}

/// Collector for a validated presentation.
#[derive(Clone, Debug)]
pub struct Collector {
    pres: Presentation,
    engine: Engine,
}

impl Collector {
    pub fn new(pres: &Presentation) -> Result<Self> {
        Self::with_budget(pres, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(pres: &Presentation, budget: u64) -> Result<Self> {
        let report = validate_polycyclic(pres);
        if !report.ok() {
            let msgs: Vec<String> =
                report.violations.iter().map(|v| format!("{}: {}", v.location, v.message)).collect();
            return Err(Error::Invalid(msgs.join("; ")));
        }
        let engine = Engine::new(pres, TailMap::none(pres.n()), budget)?;
        Ok(Collector { pres: pres.clone(), engine })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn n(&self) -> usize {
        self.pres.n()
    }

    pub fn prime(&self) -> u32 {
        self.pres.prime
    }

    /// `p^n`, the order of the group when the presentation is consistent.
    pub fn order(&self) -> u128 {
        (self.prime() as u128).pow(self.n() as u32)
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n())
    }

    pub fn generator(&self, g: usize) -> Element {
        let mut e = self.identity();
        e.0[g] = 1;
        e
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.n()).map(|g| self.generator(g)).collect()
    }

    /// Collects an arbitrary word to normal form.
    pub fn normalize(&self, word: &GenWord) -> Result<Element> {
        let mut s = self.engine.identity();
        for &(g, e) in &word.0 {
            if g >= self.n() {
                return Err(Error::Invalid(format!("generator index {} out of range", g + 1)));
            }
            self.engine.mul_signed(&mut s, g, e)?;
        }
        Ok(Element(s.exps))
    }

    /// Collects a word with the letter-by-letter stack collector.
    pub fn normalize_stack(&self, word: &GenWord) -> Result<Element> {
        let mut s = self.engine.identity();
        for &(g, e) in &word.0 {
            if g >= self.n() {
                return Err(Error::Invalid(format!("generator index {} out of range", g + 1)));
            }
            if e >= 0 {
                self.engine.collect(&mut s, &[(g, e as u32)])?;
            } else {
                let inv = self.engine.inverse_generator(g).letters();
                for _ in 0..e.unsigned_abs() {
                    self.engine.collect(&mut s, &inv)?;
                }
            }
        }
        Ok(Element(s.exps))
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let mut s = x.clone().state();
        infallible(self.engine.mul_state(&mut s, &y.clone().state()));
        Element(s.exps)
    }

    pub fn invert(&self, x: &Element) -> Element {
        Element(infallible(self.engine.inverse(&x.clone().state())).exps)
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Element {
        Element(infallible(self.engine.commutator(&x.clone().state(), &y.clone().state())).exps)
    }

    /// Left-normed `[x_1, x_2, ..., x_k]`.
    pub fn left_normed(&self, xs: &[Element]) -> Element {
        let mut it = xs.iter();
        let mut acc = match it.next() {
            Some(x) => x.clone(),
            None => return self.identity(),
        };
        for y in it {
            acc = self.commutator(&acc, y);
        }
        acc
    }

    /// `y^-1 x y`.
    pub fn conjugate(&self, x: &Element, y: &Element) -> Element {
        let yi = self.invert(y);
        self.multiply(&self.multiply(&yi, x), y)
    }

    pub fn power(&self, x: &Element, k: u64) -> Element {
        Element(infallible(self.engine.power(&x.clone().state(), k)).exps)
    }

    pub fn power_signed(&self, x: &Element, k: i64) -> Element {
        if k >= 0 {
            self.power(x, k as u64)
        } else {
            self.invert(&self.power(x, k.unsigned_abs()))
        }
    }

    pub fn element_from_index(&self, mut index: u64) -> Element {
        let p = self.prime() as u64;
        let mut exps = vec![0; self.n()];
        for e in exps.iter_mut().rev() {
            *e = (index % p) as u32;
            index /= p;
        }
        Element(exps)
    }

    pub fn index_of(&self, x: &Element) -> u64 {
        let p = self.prime() as u64;
        x.0.iter().fold(0, |acc, &e| acc * p + e as u64)
    }

    /// All `p^n` normal forms, refusing when that exceeds `limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<Element>> {
        let order = self.order();
        if order > limit as u128 {
            return Err(Error::EnumerationBudget { needed: order.min(u64::MAX as u128) as u64, limit });
        }
        Ok((0..order as u64).map(|i| self.element_from_index(i)).collect())
    }

    /// Brute-force centralizer by enumeration.
    pub fn centralizer_elements(&self, x: &Element, limit: u64) -> Result<Vec<Element>> {
        Ok(self
            .elements(limit)?
            .into_iter()
            .filter(|y| self.multiply(x, y) == self.multiply(y, x))
            .collect())
    }

    pub fn centralizer(&self, x: &Element) -> Subgroup {
        Subgroup::centralizer_of_set(self, std::slice::from_ref(x))
    }

    pub fn center(&self) -> Subgroup {
        Subgroup::centralizer_of_set(self, &self.generators())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    pub(crate) fn g9(p: u32) -> Collector {
        let text = format!(
            "group G9\nprime {p}\ngenerators a b c d e f g\n\
             comm [b,a] = c\ncomm [c,a] = d\ncomm [c,b] = e\ncomm [d,a] = e\n"
        );
        Collector::new(&parse_presentation(&text).unwrap()).unwrap()
    }

    pub(crate) fn g17b() -> Collector {
        let text = "group G17b\nprime 3\ngenerators a b c d e f g\n\
             comm [b,a] = d\ncomm [c,a] = e\ncomm [c,b] = f\ncomm [d,c] = g\n\
             comm [e,b] = g^-1\ncomm [f,a] = g\n";
        Collector::new(&parse_presentation(text).unwrap()).unwrap()
    }

    fn el(v: &[u32]) -> Element {
        Element::from_exponents(v.to_vec())
    }

    #[test]
    fn normalize_examples() {
        let c = g9(5);
        assert_eq!(c.normalize(&GenWord::default()).unwrap(), c.identity());
        let ba = GenWord::new(vec![(1, 1), (0, 1)]);
        assert_eq!(c.normalize(&ba).unwrap(), el(&[1, 1, 1, 0, 0, 0, 0]));
        assert_eq!(c.normalize_stack(&ba).unwrap(), el(&[1, 1, 1, 0, 0, 0, 0]));
        assert_eq!(c.normalize(&GenWord::new(vec![(0, 5)])).unwrap(), c.identity());
        assert!(c.normalize(&GenWord::new(vec![(9, 1)])).is_err());
    }

    #[test]
    fn multiply_and_invert() {
        let c = g9(5);
        let a = c.generator(0);
        assert_eq!(c.multiply(&a, &el(&[4, 0, 0, 0, 0, 0, 0])), c.identity());
        assert_eq!(c.multiply(&c.generator(1), &a), el(&[1, 1, 1, 0, 0, 0, 0]));
        assert_eq!(c.invert(&c.identity()), c.identity());
        assert_eq!(c.invert(&a), el(&[4, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn commutator_examples() {
        let c = g9(5);
        let gens = c.generators();
        assert_eq!(c.commutator(&gens[1], &gens[0]), gens[2]);
        assert_eq!(c.commutator(&gens[4], &gens[0]), c.identity());
        let x = el(&[1, 2, 3, 4, 0, 1, 2]);
        assert_eq!(c.commutator(&x, &x), c.identity());
    }

    #[test]
    fn table_and_stack_collectors_agree() {
        let c = g9(7);
        let words = [
            vec![(6, 3), (1, 2), (0, 5), (3, 1), (2, 6), (0, 1)],
            vec![(3, 6), (2, 6), (1, 6), (0, 6), (3, 6), (2, 6), (1, 6), (0, 6)],
            vec![(1, -1), (0, -2), (2, 3)],
        ];
        for w in words {
            let w = GenWord::new(w);
            assert_eq!(c.normalize(&w).unwrap(), c.normalize_stack(&w).unwrap());
        }
    }

    #[test]
    fn index_round_trip() {
        let c = g17b();
        for i in [0u64, 1, 17, 2186] {
            assert_eq!(c.index_of(&c.element_from_index(i)), i);
        }
    }
}
