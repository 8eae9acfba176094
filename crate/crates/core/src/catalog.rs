//! Embedded presentations of groups of order `p^7` and exponent `p`, with
//! the multiplier verdicts expected for them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::{Presentation, PresentationTemplate};

const ENTRIES: &[(&str, &str)] = &[
    ("G1", include_str!("../catalog/G1.pc")),
    ("G2", include_str!("../catalog/G2.pc")),
    ("G3", include_str!("../catalog/G3.pc")),
    ("G4", include_str!("../catalog/G4.pc")),
    ("G5", include_str!("../catalog/G5.pc")),
    ("G6", include_str!("../catalog/G6.pc")),
    ("G7", include_str!("../catalog/G7.pc")),
    ("G8", include_str!("../catalog/G8.pc")),
    ("G9", include_str!("../catalog/G9.pc")),
    ("G10", include_str!("../catalog/G10.pc")),
    ("G11", include_str!("../catalog/G11.pc")),
    ("G12", include_str!("../catalog/G12.pc")),
    ("G15", include_str!("../catalog/G15.pc")),
    ("G16", include_str!("../catalog/G16.pc")),
    ("G17", include_str!("../catalog/G17.pc")),
    ("G17b", include_str!("../catalog/G17b.pc")),
    ("G20", include_str!("../catalog/G20.pc")),
    ("G21", include_str!("../catalog/G21.pc")),
    ("G22", include_str!("../catalog/G22.pc")),
    ("G24", include_str!("../catalog/G24.pc")),
    ("G25", include_str!("../catalog/G25.pc")),
    ("G26", include_str!("../catalog/G26.pc")),
    ("G28", include_str!("../catalog/G28.pc")),
    ("G30", include_str!("../catalog/G30.pc")),
    ("G32", include_str!("../catalog/G32.pc")),
    ("G35", include_str!("../catalog/G35.pc")),
    ("G36", include_str!("../catalog/G36.pc")),
    ("G37", include_str!("../catalog/G37.pc")),
    ("G39", include_str!("../catalog/G39.pc")),
    ("G40", include_str!("../catalog/G40.pc")),
    ("G41", include_str!("../catalog/G41.pc")),
    ("G43", include_str!("../catalog/G43.pc")),
    ("G45", include_str!("../catalog/G45.pc")),
    ("G46", include_str!("../catalog/G46.pc")),
    ("G47", include_str!("../catalog/G47.pc")),
    ("G48", include_str!("../catalog/G48.pc")),
    ("G49", include_str!("../catalog/G49.pc")),
    ("G50", include_str!("../catalog/G50.pc")),
    ("G52", include_str!("../catalog/G52.pc")),
    ("G54", include_str!("../catalog/G54.pc")),
    ("G55", include_str!("../catalog/G55.pc")),
    ("G57", include_str!("../catalog/G57.pc")),
    ("G59", include_str!("../catalog/G59.pc")),
    ("G60", include_str!("../catalog/G60.pc")),
    ("G62", include_str!("../catalog/G62.pc")),
    ("G64", include_str!("../catalog/G64.pc")),
    ("G70", include_str!("../catalog/G70.pc")),
    ("G71", include_str!("../catalog/G71.pc")),
    ("G73", include_str!("../catalog/G73.pc")),
    ("G74", include_str!("../catalog/G74.pc")),
    ("G75", include_str!("../catalog/G75.pc")),
    ("G76", include_str!("../catalog/G76.pc")),
    ("G81", include_str!("../catalog/G81.pc")),
    ("G85", include_str!("../catalog/G85.pc")),
    ("G89", include_str!("../catalog/G89.pc")),
    ("G91", include_str!("../catalog/G91.pc")),
    ("G95", include_str!("../catalog/G95.pc")),
    ("G100", include_str!("../catalog/G100.pc")),
    ("G103", include_str!("../catalog/G103.pc")),
    ("G105", include_str!("../catalog/G105.pc")),
    ("G110", include_str!("../catalog/G110.pc")),
    ("G111", include_str!("../catalog/G111.pc")),
    ("G112", include_str!("../catalog/G112.pc")),
    ("G114", include_str!("../catalog/G114.pc")),
    ("G117", include_str!("../catalog/G117.pc")),
    ("G118", include_str!("../catalog/G118.pc")),
    ("G120", include_str!("../catalog/G120.pc")),
    ("G121", include_str!("../catalog/G121.pc")),
    ("G122", include_str!("../catalog/G122.pc")),
    ("G123", include_str!("../catalog/G123.pc")),
    ("G131", include_str!("../catalog/G131.pc")),
    ("G132", include_str!("../catalog/G132.pc")),
    ("G140", include_str!("../catalog/G140.pc")),
    ("G141", include_str!("../catalog/G141.pc")),
    ("G142", include_str!("../catalog/G142.pc")),
    ("G143", include_str!("../catalog/G143.pc")),
    ("G144", include_str!("../catalog/G144.pc")),
    ("G149", include_str!("../catalog/G149.pc")),
    ("G152", include_str!("../catalog/G152.pc")),
    ("G162", include_str!("../catalog/G162.pc")),
    ("G163", include_str!("../catalog/G163.pc")),
    ("G164", include_str!("../catalog/G164.pc")),
    ("G168", include_str!("../catalog/G168.pc")),
    ("G190", include_str!("../catalog/G190.pc")),
];

const EXPECTED: &str = include_str!("../catalog/expected.txt");
const SETS: &str = include_str!("../catalog/sets.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Trivial => "trivial",
            Verdict::Nontrivial => "nontrivial",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedMultiplier {
    pub id: String,
    pub prime: u32,
    pub verdict: Verdict,
    /// Torsion invariants when they are known, empty otherwise.
    pub invariants: Vec<u64>,
    pub low_confidence: bool,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub source: &'static str,
    pub template: PresentationTemplate,
    /// Comment lines of the source file.
    pub notes: Vec<String>,
}

/// Sort key: numeric part, then suffix.
fn id_key(id: &str) -> (u64, String) {
    let digits: String = id.chars().skip(1).take_while(|c| c.is_ascii_digit()).collect();
    let rest: String = id.chars().skip(1 + digits.len()).collect();
    (digits.parse().unwrap_or(u64::MAX), rest)
}

/// Ids with a loadable presentation, sorted by index.
pub fn list_entries() -> Vec<&'static str> {
    let mut ids: Vec<&'static str> = ENTRIES.iter().map(|(id, _)| *id).collect();
    ids.sort_by_key(|id| id_key(id));
    ids
}

fn find(id: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(e, _)| e.eq_ignore_ascii_case(id)).map(|(_, src)| *src)
}

/// Ids that only carry expected verdicts.
pub fn stubs() -> Vec<String> {
    let mut ids: Vec<String> =
        expected_table().into_iter().map(|e| e.id).filter(|id| find(id).is_none()).collect();
    ids.sort_by_key(|id| id_key(id));
    ids.dedup();
    ids
}

pub fn entry(id: &str) -> Result<CatalogEntry> {
    let Some(source) = find(id) else {
        return Err(if stubs().iter().any(|s| s.eq_ignore_ascii_case(id)) {
            Error::NotLoadable(id.to_string())
        } else {
            Error::UnknownEntry(id.to_string())
        });
    };
    let template = PresentationTemplate::parse(source)?;
    let id = ENTRIES.iter().find(|(e, _)| e.eq_ignore_ascii_case(id)).map(|(e, _)| *e).unwrap();
    let notes = source
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    Ok(CatalogEntry { id, source, template, notes })
}

/// Smallest quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: u32) -> u32 {
    let p = p as u64;
    (2..p).find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1).unwrap_or(1) as u32
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Values for every parameter of the entry: `overrides` first, otherwise
/// the smallest quadratic non-residue mod `prime`.
pub fn resolve_params(id: &str, prime: u32, overrides: &BTreeMap<String, i64>) -> Result<BTreeMap<String, i64>> {
    let entry = entry(id)?;
    let mut out = BTreeMap::new();
    for name in &entry.template.params {
        let v = overrides.get(name).copied().unwrap_or(smallest_nonresidue(prime) as i64);
        out.insert(name.clone(), v);
    }
    Ok(out)
}

/// Instantiates an entry at `prime`. Every parameter must be supplied.
pub fn load_entry(id: &str, prime: u64, params: &BTreeMap<String, i64>) -> Result<Presentation> {
    let entry = entry(id)?;
    if !crate::presentation::is_odd_prime(prime) {
        return Err(Error::InvalidPrime(prime));
    }
    let pres = entry.template.instantiate(prime, params)?;
    let report = crate::presentation::validate_polycyclic(&pres);
    if !report.ok() {
        return Err(Error::Invalid(format!("{} violates {}", id, report.violations[0].rule)));
    }
    Ok(pres)
}

/// Like [`load_entry`], filling absent parameters with their defaults.
pub fn load_entry_with_defaults(
    id: &str,
    prime: u64,
    overrides: &BTreeMap<String, i64>,
) -> Result<(Presentation, BTreeMap<String, i64>)> {
    if !crate::presentation::is_odd_prime(prime) || prime > u32::MAX as u64 {
        return Err(Error::InvalidPrime(prime));
    }
    let params = resolve_params(id, prime as u32, overrides)?;
    Ok((load_entry(id, prime, &params)?, params))
}

#[derive(Clone, Debug)]
struct TableRow {
    id: String,
    prime: Option<u32>,
    verdict: Verdict,
    invariants: Vec<u64>,
    low_confidence: bool,
}

fn table_rows() -> Vec<TableRow> {
    let mut rows = Vec::new();
    for line in EXPECTED.lines() {
        let (body, comment) = match line.split_once('#') {
            Some((b, c)) => (b, c),
            None => (line, ""),
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 3 {
            continue;
        }
        let prime = if toks[1] == "*" { None } else { toks[1].parse().ok() };
        let verdict = match toks[2] {
            "trivial" => Verdict::Trivial,
            "nontrivial" => Verdict::Nontrivial,
            _ => Verdict::Unknown,
        };
        let invariants = toks[3..].iter().filter_map(|t| t.parse().ok()).collect();
        rows.push(TableRow {
            id: toks[0].to_string(),
            prime,
            verdict,
            invariants,
            low_confidence: comment.contains("low-confidence"),
        });
    }
    rows
}

/// Every row of the expected-results table, with wildcard primes left as 0.
pub fn expected_table() -> Vec<ExpectedMultiplier> {
    table_rows()
        .into_iter()
        .map(|r| ExpectedMultiplier {
            id: r.id,
            prime: r.prime.unwrap_or(0),
            verdict: r.verdict,
            invariants: r.invariants,
            low_confidence: r.low_confidence,
        })
        .collect()
}

pub fn expected_result(id: &str, prime: u32) -> Result<ExpectedMultiplier> {
    let known = find(id).is_some() || stubs().iter().any(|s| s.eq_ignore_ascii_case(id));
    if !known {
        return Err(Error::UnknownEntry(id.to_string()));
    }
    let row = table_rows()
        .into_iter()
        .find(|r| r.id.eq_ignore_ascii_case(id) && r.prime.is_none_or(|q| q == prime));
    Ok(match row {
        Some(r) => ExpectedMultiplier {
            id: r.id,
            prime,
            verdict: r.verdict,
            invariants: r.invariants,
            low_confidence: r.low_confidence,
        },
        None => ExpectedMultiplier {
            id: id.to_string(),
            prime,
            verdict: Verdict::Unknown,
            invariants: Vec::new(),
            low_confidence: false,
        },
    })
}

/// Names of the predefined entry sets.
pub fn set_names() -> Vec<&'static str> {
    SETS.lines().filter_map(|l| l.split_whitespace().next()).collect()
}

/// Members of a named set; `all` is every loadable entry.
pub fn set(name: &str) -> Result<Vec<&'static str>> {
    if name == "all" {
        return Ok(list_entries());
    }
    SETS.lines()
        .find_map(|l| {
            let mut toks = l.split_whitespace();
            (toks.next() == Some(name)).then(|| toks.collect())
        })
        .ok_or_else(|| Error::UnknownEntry(format!("set {name}")))
}
