mod common;

use std::time::Instant;

use bogomolov::catalog;
use bogomolov::extension::{attach_tails, commuting_pair_relations, overlap_relations, PairOptions, PairStrategy, TailMode};
use bogomolov::intlattice::{quotient_invariants, IntMatrix, Lattice};
use bogomolov::multiplier::{bogomolov_multiplier, compute, cp_extension, schur_multiplier, MultiplierOptions};
use bogomolov::Error;

use common::{abelian2, cp_certificate, cyclic, g9, heisenberg, load};

#[test]
fn g9_certificate() {
    for p in [5, 7] {
        let checked = cp_certificate(&g9(p), false).unwrap();
        assert!(checked > 0);
    }
}

#[test]
fn g37_nontrivial_by_brute_force_at_three() {
    let pres = load("G37", 3).unwrap();
    let r = bogomolov_multiplier(&pres, &MultiplierOptions::default()).unwrap();
    assert_eq!(r.bogomolov.invariants, vec![3]);
    cp_certificate(&pres, true).unwrap();
}

#[test]
fn g37_and_g141_nontrivial_at_five() {
    for id in ["G37", "G141"] {
        let t = Instant::now();
        let pres = load(id, 5).unwrap();
        let r = bogomolov_multiplier(&pres, &MultiplierOptions::default()).unwrap();
        assert_eq!(r.bogomolov.invariants, vec![5], "{id}");
        cp_certificate(&pres, false).unwrap_or_else(|e| panic!("{id}: {e}"));
        eprintln!("{id}: {:?}", t.elapsed());
    }
}

#[test]
fn trivial_groups_have_unchanged_extension() {
    let opts = MultiplierOptions::default();
    for pres in [abelian2(5), load("G2", 7).unwrap()] {
        let text = cp_extension(&pres, &opts).unwrap();
        let back = bogomolov::presentation::parse_presentation(&text).unwrap();
        assert_eq!(back.n(), pres.n());
        assert_eq!(back.comm_rhs, pres.comm_rhs);
    }
}

#[test]
fn schur_values() {
    for p in [3u32, 5, 7] {
        assert!(schur_multiplier(&cyclic(p)).unwrap().torsion_u64().unwrap().is_empty());
        assert_eq!(schur_multiplier(&abelian2(p)).unwrap().torsion_u64().unwrap(), vec![p as u64]);
        assert_eq!(schur_multiplier(&heisenberg(p)).unwrap().torsion_u64().unwrap(), vec![p as u64, p as u64]);
    }
}

#[test]
fn bogomolov_order_divides_schur_order() {
    for (id, p) in [("G9", 5u64), ("G37", 5), ("G2", 5), ("G110", 5), ("G12", 3), ("G43", 3)] {
        let pres = if id == "G9" { g9(5) } else { load(id, p).unwrap() };
        let opts = MultiplierOptions { mode: TailMode::Full, schur: true, ..Default::default() };
        let r = bogomolov_multiplier(&pres, &opts).unwrap();
        let m: u64 = r.schur.unwrap().iter().product();
        let b: u64 = r.bogomolov.invariants.iter().product();
        assert_eq!(m % b, 0, "{id}");
    }
}

/// Commuting pairs found by direct search already lie in the lattice, so
/// adding them changes nothing.
#[test]
fn redundant_rows_are_a_no_op() {
    let pres = g9(5);
    let comp = compute(&pres, &MultiplierOptions::default()).unwrap();
    let ext = attach_tails(&pres, TailMode::Reduced).unwrap();
    let l = ext.l();
    let mut rows = overlap_relations(&ext).unwrap();
    rows.append(commuting_pair_relations(&ext, PairStrategy::CenterReduced, PairOptions::default()).unwrap());
    let sampled = commuting_pair_relations(&ext, PairStrategy::Sampled { seed: 9, count: 400 }, PairOptions::default()).unwrap();
    let mut lat = Lattice::new(l);
    for r in rows.rows() {
        lat.insert(r).unwrap();
    }
    for r in sampled.rows() {
        assert!(lat.contains(r).unwrap());
    }
    rows.append(sampled);
    let inv = quotient_invariants(&IntMatrix::from_rows(rows.rows(), l), l);
    assert_eq!(inv.torsion_u64().unwrap(), comp.report.bogomolov.invariants);
    assert_eq!(inv.free_rank, 7);
}

#[test]
fn fast_path_agrees_with_pipeline() {
    for id in catalog::set("prop3.1").unwrap() {
        let pres = load(id, 7).unwrap();
        let slow = bogomolov_multiplier(&pres, &MultiplierOptions::default()).unwrap();
        let fast = bogomolov_multiplier(&pres, &MultiplierOptions { use_fast_path: true, ..Default::default() }).unwrap();
        // G8 has class 4: [b,a,a,a] = e.
        assert_eq!(fast.fast_path_taken, id != "G8", "{id}");
        assert!(slow.is_trivial() && fast.is_trivial(), "{id}");
    }
}

#[test]
fn refusals() {
    let sampled = MultiplierOptions { strategy: PairStrategy::Sampled { seed: 1, count: 10 }, ..Default::default() };
    assert!(matches!(bogomolov_multiplier(&g9(5), &sampled), Err(Error::SampledStrategy)));
    assert!(matches!(bogomolov_multiplier(&g9(3), &MultiplierOptions::default()), Err(Error::Inconsistent(_))));
    assert!(matches!(
        bogomolov_multiplier(&load("G122", 7).unwrap(), &MultiplierOptions::default()),
        Err(Error::Inconsistent(_))
    ));
    let full = MultiplierOptions { strategy: PairStrategy::Full, ..Default::default() };
    assert!(matches!(bogomolov_multiplier(&g9(5), &full), Err(Error::EnumerationBudget { .. })));
}

#[test]
fn json_is_stable() {
    let run = || {
        let mut r = bogomolov_multiplier(&g9(7), &MultiplierOptions::default()).unwrap();
        r.timings_ms = None;
        serde_json::to_string(&r).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let pos = |k: &str| a.find(&format!("\"{k}\":")).unwrap();
    let order = ["group", "prime", "mode", "strategy", "schur", "bogomolov", "free_rank", "fast_path", "timings_ms"];
    assert!(order.windows(2).all(|w| pos(w[0]) < pos(w[1])));
    assert_eq!(v["bogomolov"]["invariants"], serde_json::json!([7]));
    assert_eq!(v["free_rank"], 7);
}
