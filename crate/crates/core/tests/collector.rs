mod common;

use bogomolov::catalog;
use bogomolov::collector::consistency::{associativity_failures, relator_action};
use bogomolov::collector::{check_consistency, Collector, Element, GenWord};
use bogomolov::extension::{attach_tails, ext_normalize, overlap_relations, TailKind, TailMode};
use bogomolov::intlattice::Lattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{g9, heisenberg, heisenberg_commutator, load};

fn random_element(rng: &mut ChaCha8Rng, n: usize, p: u32) -> Element {
    Element::from_exponents((0..n).map(|_| rng.gen_range(0..p)).collect())
}

#[test]
fn associativity_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for id in catalog::set("exp3").unwrap() {
        let col = Collector::new(&load(id, 3).unwrap()).unwrap();
        let triples: Vec<_> = (0..1000)
            .map(|_| (random_element(&mut rng, 7, 3), random_element(&mut rng, 7, 3), random_element(&mut rng, 7, 3)))
            .collect();
        assert_eq!(associativity_failures(&col, &triples), 0, "{id}");
    }
}

#[test]
fn heisenberg_commutators_match_closed_form() {
    for p in [3u32, 5, 7] {
        let col = Collector::new(&heisenberg(p)).unwrap();
        let all = col.elements(1000).unwrap();
        for x in &all {
            for y in all.iter().step_by(7) {
                let c = col.commutator(x, y);
                assert_eq!(c.exponents(), &[0, 0, heisenberg_commutator(p, x.exponents(), y.exponents())]);
            }
        }
    }
}

#[test]
fn inverse_and_identity() {
    let col = Collector::new(&g9(5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let x = random_element(&mut rng, 7, 5);
        assert!(col.multiply(&x, &col.invert(&x)).is_identity());
        assert_eq!(col.power(&x, 5), col.identity());
        let w = GenWord::from_element(&x).concat(&GenWord::from_element(&x).inverse());
        assert!(col.normalize(&w).unwrap().is_identity());
    }
}

#[test]
fn centralizers_match_brute_force() {
    for (id, p) in [("G9", 5u64), ("G37", 3), ("G110", 3), ("G12", 3)] {
        let pres = if id == "G9" { g9(5) } else { load(id, p).unwrap() };
        let col = Collector::new(&pres).unwrap();
        let all = col.elements(100_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..12 {
            let x = &all[rng.gen_range(0..all.len())];
            let brute: Vec<&Element> = all.iter().filter(|y| col.multiply(x, y) == col.multiply(y, x)).collect();
            let c = col.centralizer(x);
            assert_eq!(c.order(col.prime()), brute.len() as u128, "{id} {x}");
            assert!(brute.iter().all(|y| c.contains(&col, y)));
        }
        let center: Vec<&Element> =
            all.iter().filter(|z| col.generators().iter().all(|g| col.multiply(z, g) == col.multiply(g, z))).collect();
        assert_eq!(col.center().order(col.prime()), center.len() as u128, "{id}");
    }
}

/// Every defining relator, evaluated in the tailed group, is its own tail
/// up to the overlap relations.
#[test]
fn relators_evaluate_to_their_tails() {
    for pres in [g9(5), g9(7), load("G110", 5).unwrap(), load("G37", 5).unwrap()] {
        for mode in [TailMode::Reduced, TailMode::Full] {
            let ext = attach_tails(&pres, mode).unwrap();
            let mut lat = Lattice::new(ext.l());
            for r in overlap_relations(&ext).unwrap().rows() {
                lat.insert(r).unwrap();
            }
            for (k, label) in ext.labels().iter().enumerate() {
                let rhs_inv = |w: &bogomolov::presentation::NormalWord| {
                    GenWord::new(w.letters().iter().map(|&(g, e)| (g, e as i64)).collect()).inverse()
                };
                let word = match label.kind {
                    TailKind::Power(i) => GenWord::new(vec![(i, pres.prime as i64)]).concat(&rhs_inv(&pres.power_rhs[i])),
                    TailKind::Commutator(i, j) => {
                        let w = pres.commutator_word(i, j).cloned().unwrap_or_default();
                        GenWord::new(vec![(i, -1), (j, -1), (i, 1), (j, 1)]).concat(&rhs_inv(&w))
                    }
                };
                let v = ext_normalize(&word, &ext).unwrap();
                assert!(v.exps.iter().all(|&e| e == 0), "{} {}", pres.name, label.symbol);
                let mut diff = v.tails.clone();
                diff[k] -= 1;
                assert!(lat.contains(&diff).unwrap(), "{} {}", pres.name, label.symbol);
            }
        }
    }
}

/// Normalization is a homomorphism modulo the overlap relations.
#[test]
fn products_agree_modulo_overlaps() {
    let pres = g9(5);
    let ext = attach_tails(&pres, TailMode::Full).unwrap();
    let mut lat = Lattice::new(ext.l());
    for r in overlap_relations(&ext).unwrap().rows() {
        lat.insert(r).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let word = |rng: &mut ChaCha8Rng| GenWord::new((0..6).map(|_| (rng.gen_range(0..7), rng.gen_range(-6i64..=6))).collect());
    for _ in 0..300 {
        let (u, v) = (word(&mut rng), word(&mut rng));
        let whole = ext_normalize(&u.clone().concat(&v), &ext).unwrap();
        let a = ext_normalize(&u, &ext).unwrap();
        let b = ext_normalize(&v, &ext).unwrap();
        let prod = ext.engine().product(&a, &b).unwrap();
        assert_eq!(whole.exps, prod.exps);
        let diff: Vec<i64> = whole.tails.iter().zip(&prod.tails).map(|(x, y)| x - y).collect();
        assert!(lat.contains(&diff).unwrap());
    }
}

#[test]
fn mutants_are_flagged() {
    let mut pres = load("G2", 3).unwrap();
    assert!(check_consistency(&pres, Default::default()).unwrap().consistent);
    // a^p = b while [b,a] is nontrivial cannot hold.
    let (i, j) = *pres.comm_rhs.keys().next().unwrap();
    pres.power_rhs[j] = bogomolov::presentation::NormalWord(vec![(i, 1)]);
    let r = check_consistency(&pres, Default::default()).unwrap();
    assert!(!r.consistent);
    assert!(!relator_action(&Collector::new(&pres).unwrap()).order_confirmed);
}
