//! Subgroups given by induced polycyclic sequences.
//!
//! An induced sequence holds one element per depth in the subgroup's depth
//! set, each with leading exponent 1. Any such choice sifts correctly.

use super::{Collector, Element};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    gens: Vec<Element>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { gens: Vec::new() }
    }

    pub fn whole(col: &Collector) -> Self {
        Subgroup { gens: col.generators() }
    }

    /// Smallest subgroup containing `xs`.
    pub fn generated_by(col: &Collector, xs: &[Element]) -> Self {
        let mut s = Subgroup::trivial();
        s.extend(col, xs);
        s
    }

    /// Smallest normal subgroup containing `xs`.
    pub fn normal_closure(col: &Collector, xs: &[Element]) -> Self {
        let mut s = Subgroup::generated_by(col, xs);
        let gens = col.generators();
        loop {
            let mut extra = Vec::new();
            for v in &s.gens {
                for x in &gens {
                    let c = col.commutator(v, x);
                    if !s.contains(col, &c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return s;
            }
            s.extend(col, &extra);
        }
    }

    pub fn gens(&self) -> &[Element] {
        &self.gens
    }

    /// `log_p` of the order.
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn order(&self, p: u32) -> u128 {
        (p as u128).pow(self.gens.len() as u32)
    }

    pub fn depths(&self) -> Vec<usize> {
        self.gens.iter().map(|g| g.depth().expect("nontrivial generator")).collect()
    }

    /// Zeroes the exponents of `x` at this subgroup's depths by right
    /// multiplication. The result is the canonical representative of `xU`.
    pub fn sift(&self, col: &Collector, x: &Element) -> Element {
        let p = col.prime();
        let mut g = x.clone();
        for u in &self.gens {
            let d = u.depth().expect("nontrivial generator");
            let e = g.exponents()[d];
            if e != 0 {
                g = col.multiply(&g, &col.power(u, (p - e) as u64));
            }
        }
        g
    }

    pub fn contains(&self, col: &Collector, x: &Element) -> bool {
        self.sift(col, x).is_identity()
    }

    /// Adds elements and closes under products.
    pub fn extend(&mut self, col: &Collector, xs: &[Element]) {
        let n = col.n();
        let p = col.prime();
        let mut slots: Vec<Option<Element>> = vec![None; n];
        for u in self.gens.drain(..) {
            let d = u.depth().expect("nontrivial generator");
            slots[d] = Some(u);
        }
        let mut queue: Vec<Element> = xs.to_vec();
        while let Some(x) = queue.pop() {
            let mut g = x;
            let mut new_depth = None;
            for (d, slot) in slots.iter().enumerate() {
                let e = g.exponents()[d];
                if e == 0 {
                    continue;
                }
                match slot {
                    Some(u) => g = col.multiply(&g, &col.power(u, (p - e) as u64)),
                    None => {
                        new_depth = Some(d);
                        break;
                    }
                }
            }
            let Some(d) = new_depth else { continue };
            let lead = g.exponents()[d];
            let g = col.power(&g, inverse_mod(lead, p) as u64);
            queue.push(col.power(&g, p as u64));
            for u in slots.iter().flatten() {
                queue.push(col.commutator(&g, u));
            }
            slots[d] = Some(g);
        }
        self.gens = slots.into_iter().flatten().collect();
    }

    /// All elements, in the order `u_1^{a_1} ... u_m^{a_m}` with the
    /// exponent tuple increasing lexicographically.
    pub fn elements(&self, col: &Collector) -> Vec<Element> {
        let p = col.prime();
        let mut out = vec![col.identity()];
        for u in self.gens.iter().rev() {
            let powers: Vec<Element> = (0..p).map(|a| col.power(u, a as u64)).collect();
            let mut next = Vec::with_capacity(out.len() * p as usize);
            for pw in &powers {
                for y in &out {
                    next.push(col.multiply(pw, y));
                }
            }
            out = next;
        }
        out
    }

    /// Common centralizer of `xs`, found one layer of the series at a time.
    ///
    /// At layer `k` every element `y` of the current subgroup has `[x, y]`
    /// in `G_k`, and `y -> exponent_k([x, y])` is a homomorphism onto `F_p`
    /// whose kernel is the next subgroup. If `u_s` is the last sequence
    /// element with nonzero image, the kernel has the induced sequence
    /// `u_i u_s^{-phi(u_i)/phi(u_s)}` for `i < s` together with `u_i`, `i > s`.
    pub fn centralizer_of_set(col: &Collector, xs: &[Element]) -> Self {
        let n = col.n();
        let p = col.prime();
        let mut gens = col.generators();
        for layer in 1..n {
            for x in xs {
                let phi: Vec<u32> = gens.iter().map(|u| col.commutator(x, u).exponents()[layer]).collect();
                let Some(s) = phi.iter().rposition(|&v| v != 0) else { continue };
                let inv = inverse_mod(phi[s], p);
                let hpow: Vec<Element> = (0..p).map(|a| col.power(&gens[s], a as u64)).collect();
                let mut next = Vec::with_capacity(gens.len());
                for (i, u) in gens.iter().enumerate() {
                    if i < s {
                        let c = (phi[i] as u64 * inv as u64) % p as u64;
                        let back = ((p as u64 - c) % p as u64) as usize;
                        next.push(col.multiply(u, &hpow[back]));
                    } else if i > s {
                        next.push(u.clone());
                    }
                }
                gens = normalize_sequence(col, next);
            }
        }
        Subgroup { gens }
    }
}

/// Reorders by depth and scales leading exponents to 1. The input must have
/// pairwise distinct depths.
fn normalize_sequence(col: &Collector, mut xs: Vec<Element>) -> Vec<Element> {
    let p = col.prime();
    xs.retain(|x| !x.is_identity());
    let mut with_depth: Vec<(usize, Element)> = xs
        .into_iter()
        .map(|x| {
            let d = x.depth().expect("nontrivial");
            let lead = x.exponents()[d];
            let x = if lead == 1 { x } else { col.power(&x, inverse_mod(lead, p) as u64) };
            (d, x)
        })
        .collect();
    with_depth.sort_by_key(|(d, _)| *d);
    debug_assert!(with_depth.windows(2).all(|w| w[0].0 < w[1].0));
    with_depth.into_iter().map(|(_, x)| x).collect()
}

pub(crate) fn inverse_mod(a: u32, p: u32) -> u32 {
    let (a, p) = (a as u64 % p as u64, p as u64);
    let mut r = 1u64;
    let mut b = a;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collector::tests::{g17b, g9};

    #[test]
    fn inverse_mod_small() {
        for p in [3u32, 5, 7] {
            for a in 1..p {
                assert_eq!(a * inverse_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn generated_subgroup_orders() {
        let c = g9(5);
        let gens = c.generators();
        let ab = Subgroup::generated_by(&c, &[gens[0].clone(), gens[1].clone()]);
        assert_eq!(ab.depths(), vec![0, 1, 2, 3, 4]);
        let f = Subgroup::generated_by(&c, &[gens[5].clone()]);
        assert_eq!(f.rank(), 1);
        assert!(f.contains(&c, &c.power(&gens[5], 3)));
        assert!(!f.contains(&c, &gens[6]));
    }

    #[test]
    fn centralizer_matches_brute_force() {
        let c = g17b();
        let limit = 10_000;
        for idx in [1u64, 5, 40, 300, 1000, 2186] {
            let x = c.element_from_index(idx);
            let fast = c.centralizer(&x);
            let brute = c.centralizer_elements(&x, limit).unwrap();
            assert_eq!(fast.order(3), brute.len() as u128, "x = {x}");
            assert!(brute.iter().all(|y| fast.contains(&c, y)));
        }
    }

    #[test]
    fn center_of_g9() {
        let c = g9(5);
        assert_eq!(c.center().depths(), vec![4, 5, 6]);
        assert_eq!(c.centralizer(&c.generator(0)).rank(), 4);
    }

    #[test]
    fn elements_enumerates_subgroup() {
        let c = g9(3);
        let z = c.center();
        let els = z.elements(&c);
        assert_eq!(els.len(), 27);
        let mut sorted = els.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 27);
    }
}
