//! Schur and Bogomolov multipliers from tail relations, the
//! commutativity-preserving extension, and the power-commutator check.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::collector::consistency::{check_consistency, ConsistencyOptions};
use crate::collector::{prop27_fast_path, structure, Collector, Element, FastPathVerdict};
use crate::error::{Error, Result};
use crate::extension::{
    attach_tails_with_budget, commuting_pair_relations, overlap_relations, ExtendedPresentation, PairOptions,
    PairStrategy, TailKind, TailMode,
};
use crate::intlattice::{invariants_of, smith_normal_form, AbelianType, IntMatrix, Lattice, SmithDecomposition};
use crate::presentation::Presentation;

#[derive(Clone, Debug)]
pub struct MultiplierOptions {
    pub mode: TailMode,
    pub strategy: PairStrategy,
    /// Return early when the class-3 criterion applies.
    pub use_fast_path: bool,
    /// Also compute the Schur multiplier.
    pub schur: bool,
    pub enumeration_limit: u64,
    pub step_budget: u64,
    /// Extra key/value pairs echoed in the report, such as catalog parameters.
    pub parameters: Vec<(String, i64)>,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        MultiplierOptions {
            mode: TailMode::Reduced,
            strategy: PairStrategy::CenterReduced,
            use_fast_path: false,
            schur: false,
            enumeration_limit: crate::extension::DEFAULT_ENUMERATION_LIMIT,
            step_budget: crate::collector::DEFAULT_STEP_BUDGET,
            parameters: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SurvivingGenerator {
    /// Order of the generator.
    pub order: u64,
    /// Integer combination of tails, e.g. `t10 t11^-1`.
    pub tails: String,
    /// The same combination written with relators, e.g. `[c,b][d,a]^-1`.
    pub relators: String,
    /// Coefficient per tail.
    #[serde(skip)]
    pub coefficients: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BogomolovPart {
    pub invariants: Vec<u64>,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Timings {
    pub consistency: u64,
    pub structure: u64,
    pub overlaps: u64,
    pub commuting_pairs: u64,
    pub smith: u64,
    pub schur: u64,
    pub total: u64,
}

/// Field order here is the JSON key order.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierReport {
    pub group: String,
    pub prime: u32,
    pub parameters: std::collections::BTreeMap<String, i64>,
    pub mode: TailMode,
    pub strategy: String,
    pub tails: usize,
    pub schur: Option<Vec<u64>>,
    pub bogomolov: BogomolovPart,
    pub free_rank: Option<usize>,
    pub fast_path: FastPathVerdict,
    pub fast_path_taken: bool,
    pub class: usize,
    pub overlap_rows: usize,
    pub pair_rows: usize,
    #[serde(skip)]
    pub surviving: Vec<SurvivingGenerator>,
    pub timings_ms: Option<Timings>,
}

impl MultiplierReport {
    pub fn is_trivial(&self) -> bool {
        self.bogomolov.invariants.is_empty()
    }
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn require_consistent(pres: &Presentation, budget: u64) -> Result<()> {
    let report = check_consistency(pres, ConsistencyOptions { step_budget: budget, enumerate_up_to: 0 })?;
    if report.consistent {
        return Ok(());
    }
    let f = &report.failures[0];
    let names: Vec<&str> = f.indices.iter().map(|&i| pres.generators[i].as_str()).collect();
    Err(Error::Inconsistent(format!(
        "{} overlap at ({}) fails; {} of {} overlaps fail",
        f.family.tag(),
        names.join(","),
        report.failures.len(),
        report.overlaps_checked
    )))
}

/// `M(G)`: all relations tailed, overlap relations only.
pub fn schur_multiplier(pres: &Presentation) -> Result<AbelianType> {
    schur_multiplier_with_budget(pres, crate::collector::DEFAULT_STEP_BUDGET)
}

pub fn schur_multiplier_with_budget(pres: &Presentation, budget: u64) -> Result<AbelianType> {
    require_consistent(pres, budget)?;
    let ext = attach_tails_with_budget(pres, TailMode::Full, budget)?;
    let rows = overlap_relations(&ext)?;
    let mut lat = Lattice::new(ext.l());
    for r in rows.rows() {
        lat.insert(r)?;
    }
    let ty = invariants_of(&smith_normal_form(&lat.to_matrix()));
    if ty.free_rank != pres.n() {
        return Err(Error::FreeRankMismatch { expected: pres.n(), found: ty.free_rank });
    }
    Ok(ty)
}

/// Everything the pipeline produces, including the lattice data the
/// extension text is built from.
#[derive(Clone, Debug)]
pub struct BogomolovComputation {
    pub report: MultiplierReport,
    pub ext: Option<ExtendedPresentation>,
    pub lattice: Option<Lattice>,
    pub smith: Option<SmithDecomposition>,
}

pub fn bogomolov_multiplier(pres: &Presentation, opts: &MultiplierOptions) -> Result<MultiplierReport> {
    Ok(compute(pres, opts)?.report)
}

pub fn compute(pres: &Presentation, opts: &MultiplierOptions) -> Result<BogomolovComputation> {
    if matches!(opts.strategy, PairStrategy::Sampled { .. }) {
        return Err(Error::SampledStrategy);
    }
    let start = Instant::now();
    let t = Instant::now();
    require_consistent(pres, opts.step_budget)?;
    let t_cons = ms(t);

    let t = Instant::now();
    let col = Collector::with_budget(pres, opts.step_budget)?;
    let st = structure(&col);
    if !st.exponent_p {
        return Err(Error::Invalid(format!("group {} does not have exponent {}", pres.name, pres.prime)));
    }
    let fast = prop27_fast_path(pres, st.class);
    let t_struct = ms(t);

    let mut report = MultiplierReport {
        group: pres.name.clone(),
        prime: pres.prime,
        parameters: opts.parameters.iter().cloned().collect(),
        mode: opts.mode,
        strategy: opts.strategy.name().to_string(),
        tails: 0,
        schur: None,
        bogomolov: BogomolovPart { invariants: Vec::new(), generators: Vec::new() },
        free_rank: None,
        fast_path: fast.clone(),
        fast_path_taken: false,
        class: st.class,
        overlap_rows: 0,
        pair_rows: 0,
        surviving: Vec::new(),
        timings_ms: None,
    };

    let t = Instant::now();
    if opts.schur {
        report.schur = Some(schur_multiplier_with_budget(pres, opts.step_budget)?.torsion_u64()?);
    }
    let t_schur = ms(t);

    if opts.use_fast_path && fast == FastPathVerdict::Trivial {
        report.fast_path_taken = true;
        report.timings_ms = Some(Timings {
            consistency: t_cons,
            structure: t_struct,
            overlaps: 0,
            commuting_pairs: 0,
            smith: 0,
            schur: t_schur,
            total: ms(start),
        });
        return Ok(BogomolovComputation { report, ext: None, lattice: None, smith: None });
    }

    let t = Instant::now();
    let ext = attach_tails_with_budget(pres, opts.mode, opts.step_budget)?;
    let l = ext.l();
    report.tails = l;
    let overlap = overlap_relations(&ext)?;
    report.overlap_rows = overlap.len();
    let mut lat = Lattice::new(l);
    for r in overlap.rows() {
        lat.insert(r)?;
    }
    let t_over = ms(t);

    let t = Instant::now();
    let pairs = commuting_pair_relations(&ext, opts.strategy, PairOptions { enumeration_limit: opts.enumeration_limit })?;
    report.pair_rows = pairs.len();
    for r in pairs.rows() {
        lat.insert(r)?;
    }
    let t_pairs = ms(t);

    let t = Instant::now();
    let smith = smith_normal_form(&lat.to_matrix());
    let ty = invariants_of(&smith);
    report.free_rank = Some(ty.free_rank);
    if ty.free_rank != pres.n() {
        return Err(Error::FreeRankMismatch { expected: pres.n(), found: ty.free_rank });
    }
    report.surviving = surviving_generators(&ext, &lat, &smith)?;
    report.bogomolov = BogomolovPart {
        invariants: ty.torsion_u64()?,
        generators: report.surviving.iter().map(|g| g.relators.clone()).collect(),
    };
    let t_smith = ms(t);
    report.timings_ms = Some(Timings {
        consistency: t_cons,
        structure: t_struct,
        overlaps: t_over,
        commuting_pairs: t_pairs,
        smith: t_smith,
        schur: t_schur,
        total: ms(start),
    });
    Ok(BogomolovComputation { report, ext: Some(ext), lattice: Some(lat), smith: Some(smith) })
}

/// Indices of diagonal entries greater than 1.
fn torsion_positions(smith: &SmithDecomposition) -> Vec<usize> {
    smith.diagonal().iter().enumerate().filter(|(_, d)| **d > BigInt::one()).map(|(k, _)| k).collect()
}

/// Representative of `v` modulo the lattice, reduced with power-tail
/// columns eliminated first, sign-normalized.
fn simplest_representative(ext: &ExtendedPresentation, lat: &Lattice, v: &[i64]) -> Result<Vec<i64>> {
    let l = ext.l();
    // Column order: commutator tails first in the permuted lattice would keep
    // them; we want power tails eliminated, so they lead.
    let order: Vec<usize> = (0..l)
        .filter(|&j| matches!(ext.labels()[j].kind, TailKind::Power(_)))
        .chain((0..l).filter(|&j| matches!(ext.labels()[j].kind, TailKind::Commutator(..))))
        .collect();
    let permute = |row: &[i128]| -> Result<Vec<i64>> {
        order.iter().map(|&j| i64::try_from(row[j]).map_err(|_| Error::TailOverflow)).collect()
    };
    let mut plat = Lattice::new(l);
    for row in lat.basis_rows() {
        plat.insert(&permute(&row)?)?;
    }
    let pv: Vec<i64> = order.iter().map(|&j| v[j]).collect();
    let reduced = plat.reduce(&pv)?;
    let mut out = vec![0i64; l];
    for (k, &j) in order.iter().enumerate() {
        out[j] = i64::try_from(reduced[k]).map_err(|_| Error::TailOverflow)?;
    }
    if out.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(out)
}

fn power_suffix(e: i64) -> String {
    if e == 1 {
        String::new()
    } else {
        format!("^{e}")
    }
}

pub fn format_tail_combination(ext: &ExtendedPresentation, coeffs: &[i64]) -> (String, String) {
    let mut tails = Vec::new();
    let mut rel = String::new();
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let lab = &ext.labels()[j];
        tails.push(format!("{}{}", lab.symbol, power_suffix(c)));
        rel.push_str(&format!("{}{}", lab.relator, power_suffix(c)));
    }
    (tails.join(" "), rel)
}

fn surviving_generators(
    ext: &ExtendedPresentation,
    lat: &Lattice,
    smith: &SmithDecomposition,
) -> Result<Vec<SurvivingGenerator>> {
    let diag = smith.diagonal();
    torsion_positions(smith)
        .into_iter()
        .map(|k| {
            let row: Vec<i64> = smith
                .q_inv
                .row(k)
                .iter()
                .map(|x| x.to_i64().ok_or(Error::TailOverflow))
                .collect::<Result<_>>()?;
            let coeffs = simplest_representative(ext, lat, &row)?;
            let (tails, relators) = format_tail_combination(ext, &coeffs);
            let order = diag[k].to_u64().ok_or(Error::TailOverflow)?;
            Ok(SurvivingGenerator { order, tails, relators, coefficients: coeffs })
        })
        .collect()
}

/// A homomorphism from the tail group onto `Z_d` for one torsion factor,
/// as the image of each tail.
fn projection(lat: &Lattice, smith: &SmithDecomposition, k: usize, d: &BigInt, g: &[i64]) -> Vec<BigInt> {
    let l = lat.dim();
    let basis = lat.basis_rows();
    let unit = |x: &BigInt| num_integer::Integer::gcd(x, d).is_one();
    // Prefer a single tail: column j vanishes mod d on the lattice and the
    // generator has a unit coefficient there, so the coordinate is onto.
    for j in (0..l).rev() {
        let kills = basis.iter().all(|r| (BigInt::from(r[j]) % d).is_zero());
        if kills && unit(&BigInt::from(g[j])) {
            let mut v = vec![BigInt::zero(); l];
            v[j] = BigInt::one();
            return v;
        }
    }
    (0..l).map(|j| smith.q.get(j, k).mod_floor_big(d)).collect()
}

trait ModFloor {
    fn mod_floor_big(&self, d: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, d: &BigInt) -> BigInt {
        num_integer::Integer::mod_floor(self, d)
    }
}

/// Text of a commutativity-preserving central extension: the tail group
/// modulo all relations, projected onto each torsion factor.
pub fn cp_extension(pres: &Presentation, opts: &MultiplierOptions) -> Result<String> {
    let comp = compute(pres, &MultiplierOptions { use_fast_path: false, ..opts.clone() })?;
    cp_extension_text(&comp)
}

pub fn cp_extension_text(comp: &BogomolovComputation) -> Result<String> {
    let (Some(ext), Some(lat), Some(smith)) = (&comp.ext, &comp.lattice, &comp.smith) else {
        return Err(Error::Defect("no lattice data; the fast path was taken".into()));
    };
    let pres = ext.base();
    let diag = smith.diagonal();
    let p = BigInt::from(pres.prime);

    // Extra generators: a chain per torsion factor of order p^a.
    let mut extra: Vec<String> = Vec::new();
    let mut chain_power: Vec<String> = Vec::new();
    // Per tail, the contributions (generator name, exponent) in the extension.
    let mut images: Vec<Vec<(usize, u32)>> = vec![Vec::new(); ext.l()];
    for (idx, k) in torsion_positions(smith).into_iter().enumerate() {
        let d = &diag[k];
        let mut a = 0u32;
        let mut rest = d.clone();
        while (&rest % &p).is_zero() {
            rest /= &p;
            a += 1;
        }
        if !rest.is_one() {
            return Err(Error::Defect(format!("torsion invariant {d} is not a power of {p}")));
        }
        let base_index = extra.len();
        for s in 0..a {
            extra.push(if a == 1 { format!("T{}", idx + 1) } else { format!("T{}_{}", idx + 1, s + 1) });
        }
        for s in 0..a {
            if s + 1 < a {
                chain_power.push(format!("pow {} = {}", extra[base_index + s as usize], extra[base_index + s as usize + 1]));
            } else {
                chain_power.push(format!("pow {} = 1", extra[base_index + s as usize]));
            }
        }
        let g = &comp.report.surviving[idx].coefficients;
        let proj = projection(lat, smith, k, d, g);
        for (j, c) in proj.iter().enumerate() {
            // Write c in base p across the chain.
            let mut c = c.clone();
            for s in 0..a {
                let digit = (&c % &p).to_u32().expect("digit below p");
                c /= &p;
                if digit != 0 {
                    images[j].push((base_index + s as usize, digit));
                }
            }
        }
    }

    let word = |w: &crate::presentation::NormalWord, extra_letters: &[(usize, u32)]| -> String {
        let mut parts: Vec<String> = w
            .letters()
            .iter()
            .map(|&(g, e)| if e == 1 { pres.generators[g].clone() } else { format!("{}^{e}", pres.generators[g]) })
            .collect();
        for &(t, e) in extra_letters {
            parts.push(if e == 1 { extra[t].clone() } else { format!("{}^{e}", extra[t]) });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    };

    let mut out = String::new();
    out.push_str(&format!("group {}_cp\n", pres.name));
    out.push_str(&format!("prime {}\n", pres.prime));
    let mut gens = pres.generators.clone();
    gens.extend(extra.iter().cloned());
    out.push_str(&format!("generators {}\n", gens.join(" ")));
    for (j, lab) in ext.labels().iter().enumerate() {
        if let TailKind::Power(i) = lab.kind {
            if !pres.power_rhs[i].is_empty() || !images[j].is_empty() {
                out.push_str(&format!("pow {} = {}\n", pres.generators[i], word(&pres.power_rhs[i], &images[j])));
            }
        }
    }
    for line in &chain_power {
        if !line.ends_with("= 1") {
            out.push_str(line);
            out.push('\n');
        }
    }
    let empty = crate::presentation::NormalWord::empty();
    for i in 0..pres.n() {
        for jj in 0..i {
            let rhs = pres.commutator_word(i, jj);
            let tail = ext.labels().iter().position(|t| t.kind == TailKind::Commutator(i, jj));
            let extra_letters: &[(usize, u32)] = tail.map(|t| images[t].as_slice()).unwrap_or(&[]);
            if rhs.is_none() && extra_letters.is_empty() {
                continue;
            }
            out.push_str(&format!(
                "comm [{},{}] = {}\n",
                pres.generators[i],
                pres.generators[jj],
                word(rhs.unwrap_or(&empty), extra_letters)
            ));
        }
    }
    for line in &chain_power {
        if line.ends_with("= 1") {
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckFailure {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub n: u32,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub trials: usize,
    pub failures: Vec<CheckFailure>,
    pub seed: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Both sides of the expansion of `[x^n, y]` in a group of class at most 6.
pub fn lemma24_sides(col: &Collector, x: &Element, y: &Element, n: u64) -> (Element, Element) {
    let left = col.commutator(&col.power(x, n), y);
    let xy = col.commutator(x, y);
    let xyx = col.commutator(&xy, x);
    let xyxx = col.commutator(&xyx, x);
    let xyxxx = col.commutator(&xyxx, x);
    let xyxxxx = col.commutator(&xyxxx, x);
    let xyx_xy = col.commutator(&xyx, &xy);
    let xyx_xy_x = col.commutator(&xyx_xy, x);
    let xyxx_xy = col.commutator(&xyxx, &xy);
    let a = n * (n.saturating_sub(1)) * (2 * n).saturating_sub(1) / 6;
    let (c2, c3, c4, c5) = (binom(n, 2), binom(n, 3), binom(n, 4), binom(n, 5));
    let terms = [
        (&xy, n),
        (&xyx, c2),
        (&xyxx, c3),
        (&xyxxx, c4),
        (&xyx_xy, a),
        (&xyxxxx, c5),
        (&xyx_xy_x, c3 + 2 * c4),
        (&xyxx_xy, c3 + c4),
    ];
    let mut right = col.identity();
    for (t, e) in terms {
        right = col.multiply(&right, &col.power(t, e));
    }
    (left, right)
}

/// Random trials of the expansion with `1 <= n <= 2p`.
pub fn lemma24_property_check(pres: &Presentation, seed: u64, trials: usize) -> Result<CheckReport> {
    require_consistent(pres, crate::collector::DEFAULT_STEP_BUDGET)?;
    let col = Collector::new(pres)?;
    let class = structure(&col).class;
    if class > 6 {
        return Err(Error::ClassTooLarge(class));
    }
    let p = col.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let x = Element::from_exponents((0..col.n()).map(|_| rng.gen_range(0..p)).collect());
        let y = Element::from_exponents((0..col.n()).map(|_| rng.gen_range(0..p)).collect());
        let n = rng.gen_range(1..=2 * p) as u64;
        let (left, right) = lemma24_sides(&col, &x, &y, n);
        if left != right {
            failures.push(CheckFailure {
                x: x.into_exponents(),
                y: y.into_exponents(),
                n: n as u32,
                left: left.into_exponents(),
                right: right.into_exponents(),
            });
        }
    }
    Ok(CheckReport { trials, failures, seed })
}

/// Invariants of `Z^l` modulo explicit rows, with the accumulated transforms.
pub fn smith_of_rows(rows: &[Vec<i64>], l: usize) -> SmithDecomposition {
    smith_normal_form(&IntMatrix::from_rows(rows, l))
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
    fn g9_at_five() {
        let r = bogomolov_multiplier(&g9(5), &MultiplierOptions::default()).unwrap();
        assert_eq!(r.bogomolov.invariants, vec![5]);
        assert_eq!(r.free_rank, Some(7));
        assert_eq!(r.bogomolov.generators, vec!["[c,b][d,a]^-1".to_string()]);
    }

    #[test]
    fn schur_small() {
        for p in [3u32, 5, 7] {
            let z = parse_presentation(&format!("group C\nprime {p}\ngenerators a\n")).unwrap();
            assert!(schur_multiplier(&z).unwrap().torsion.is_empty());
            let z2 = parse_presentation(&format!("group E\nprime {p}\ngenerators a b\n")).unwrap();
            assert_eq!(schur_multiplier(&z2).unwrap().torsion_u64().unwrap(), vec![p as u64]);
            let h = parse_presentation(&format!("group H\nprime {p}\ngenerators a b c\ncomm [b,a] = c\n")).unwrap();
            assert_eq!(schur_multiplier(&h).unwrap().torsion_u64().unwrap(), vec![p as u64, p as u64]);
        }
    }

    #[test]
    fn sampled_is_refused() {
        let opts = MultiplierOptions { strategy: PairStrategy::Sampled { seed: 1, count: 5 }, ..Default::default() };
        assert!(matches!(bogomolov_multiplier(&g9(5), &opts), Err(Error::SampledStrategy)));
    }

    #[test]
    fn cp_extension_of_g9() {
        let text = cp_extension(&g9(5), &MultiplierOptions::default()).unwrap();
        assert!(text.contains("comm [d,a] = e T1\n"), "{text}");
        assert!(text.contains("pow T1 = 1\n"), "{text}");
        let back = parse_presentation(&text).unwrap();
        assert_eq!(back.n(), 8);
    }

    #[test]
    fn lemma24_small_cases() {
        let col = Collector::new(&g9(7)).unwrap();
        let x = col.element_from_index(12345);
        let y = col.element_from_index(777);
        let (l, r) = lemma24_sides(&col, &x, &y, 1);
        assert_eq!(l, r);
        assert_eq!(l, col.commutator(&x, &y));
    }
}
