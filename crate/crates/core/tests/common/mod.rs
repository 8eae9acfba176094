#![allow(dead_code)]

use std::collections::BTreeMap;

use bogomolov::catalog;
use bogomolov::presentation::{parse_presentation, Presentation};

pub fn parse(text: &str) -> Presentation {
    parse_presentation(text).expect("test presentation parses")
}

pub fn cyclic(p: u32) -> Presentation {
    parse(&format!("group Zp\nprime {p}\ngenerators a\n"))
}

pub fn abelian2(p: u32) -> Presentation {
    parse(&format!("group Zp2\nprime {p}\ngenerators a b\n"))
}

pub fn heisenberg(p: u32) -> Presentation {
    parse(&format!("group H\nprime {p}\ngenerators a b c\ncomm [b,a] = c\n"))
}

pub fn g9(p: u32) -> Presentation {
    parse(&format!(
        "group G9\nprime {p}\ngenerators a b c d e f g\n\
         comm [b,a] = c\ncomm [c,a] = d\ncomm [c,b] = e\ncomm [d,a] = e\n"
    ))
}

pub fn load(id: &str, p: u64) -> bogomolov::Result<Presentation> {
    catalog::load_entry_with_defaults(id, p, &BTreeMap::new()).map(|(pres, _)| pres)
}

/// Determinant by fraction-free elimination; exact for small entries.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gcd of all `k x k` minors.
pub fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> i128 {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut g = 0i128;
    let cs = subsets(cols, k);
    for rs in subsets(rows, k) {
        for c in &cs {
            let minor: Vec<Vec<i128>> = rs.iter().map(|&r| c.iter().map(|&j| m[r][j] as i128).collect()).collect();
            g = gcd(g, det_i128(&minor));
            if g == 1 {
                return 1;
            }
        }
    }
    g
}

/// Nonzero Smith invariants `d_k / d_{k-1}`, independent of any reducer.
pub fn smith_invariants_oracle(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let d = determinantal_divisor(m, k);
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

/// Closed form of `[x, y]` in the Heisenberg group `[b,a] = c`, as an
/// exponent of `c`.
pub fn heisenberg_commutator(p: u32, x: &[u32], y: &[u32]) -> u32 {
    let p = p as i64;
    let v = x[1] as i64 * y[0] as i64 - x[0] as i64 * y[1] as i64;
    v.rem_euclid(p) as u32
}

/// Independent check that `cp_extension` describes a commutativity
/// preserving central extension `E` of `G` by a nontrivial `T <= [E,E]`.
/// Such an `E` exists only when the Bogomolov multiplier is nontrivial.
/// With `brute` every pair of `G` is tested; otherwise every element is
/// tested against a generating set of its centralizer.
pub fn cp_certificate(pres: &Presentation, brute: bool) -> Result<usize, String> {
    use bogomolov::collector::{check_consistency, Collector, Element, Subgroup};
    use bogomolov::multiplier::{cp_extension, MultiplierOptions};

    let text = cp_extension(pres, &MultiplierOptions::default()).map_err(|e| e.to_string())?;
    let ext = parse_presentation(&text).map_err(|e| e.to_string())?;
    let n = pres.n();
    let k = ext.n() - n;
    if k == 0 {
        return Err("no tail generators".into());
    }
    if !check_consistency(&ext, Default::default()).map_err(|e| e.to_string())?.consistent {
        return Err("extension is inconsistent".into());
    }
    let g = Collector::new(pres).map_err(|e| e.to_string())?;
    let e = Collector::new(&ext).map_err(|e| e.to_string())?;
    let lift = |x: &Element| {
        let mut v = x.exponents().to_vec();
        v.resize(n + k, 0);
        Element::from_exponents(v)
    };
    let project = |x: &Element| Element::from_exponents(x.exponents()[..n].to_vec());
    let tails: Vec<Element> = (n..n + k).map(|t| e.generator(t)).collect();
    for t in &tails {
        if e.generators().iter().any(|y| e.multiply(t, y) != e.multiply(y, t)) {
            return Err("tail generator is not central".into());
        }
        if tails.iter().any(|s| e.multiply(t, s) != e.multiply(s, t)) {
            return Err("tails do not commute".into());
        }
    }
    for i in 0..n {
        let (xi, gi) = (e.generator(i), g.generator(i));
        if project(&e.power(&xi, pres.prime as u64)) != g.power(&gi, pres.prime as u64) {
            return Err(format!("power relation of generator {i} changed"));
        }
        for j in 0..i {
            if project(&e.commutator(&xi, &e.generator(j))) != g.commutator(&gi, &g.generator(j)) {
                return Err(format!("commutator ({i},{j}) changed"));
            }
        }
    }
    let mut comms = Vec::new();
    for i in 0..n + k {
        for j in 0..i {
            comms.push(e.commutator(&e.generator(i), &e.generator(j)));
        }
    }
    let derived = Subgroup::normal_closure(&e, &comms);
    if tails.iter().any(|t| !derived.contains(&e, t)) {
        return Err("tails are not in the derived subgroup".into());
    }
    let all = g.elements(u64::MAX).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for x in &all {
        let partners: Vec<Element> = if brute {
            all.iter().filter(|y| g.multiply(x, y) == g.multiply(y, x)).cloned().collect()
        } else {
            g.centralizer(x).gens().to_vec()
        };
        let lx = lift(x);
        for y in &partners {
            let ly = lift(y);
            if e.multiply(&lx, &ly) != e.multiply(&ly, &lx) {
                return Err(format!("commuting pair {x}, {y} does not lift"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Solves `v = x H` over the integers for an echelon `H`, if possible.
pub fn in_row_span_of_echelon(h: &[Vec<i64>], v: &[i64]) -> bool {
    let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in h {
        let Some(piv) = row.iter().position(|&x| x != 0) else { continue };
        if v[..piv].iter().any(|&x| x != 0) {
            return false;
        }
        let a = row[piv] as i128;
        if v[piv] % a != 0 {
            return false;
        }
        let q = v[piv] / a;
        for (vj, &hj) in v.iter_mut().zip(row) {
            *vj -= q * hj as i128;
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Checks that `h` is the reduced row echelon form of the lattice spanned
/// by `rows`: shape, containment, and equal covolume.
pub fn hermite_check(rows: &[Vec<i64>], h: &[Vec<i64>]) -> Result<(), String> {
    let cols = rows[0].len();
    let nonzero: Vec<Vec<i64>> = h.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    if h[nonzero.len()..].iter().any(|r| r.iter().any(|&x| x != 0)) {
        return Err("zero rows are not last".into());
    }
    let mut last = None;
    for (i, r) in nonzero.iter().enumerate() {
        let piv = r.iter().position(|&x| x != 0).unwrap();
        if last.is_some_and(|l| piv <= l) || r[piv] <= 0 {
            return Err(format!("row {i} breaks echelon shape"));
        }
        if nonzero[..i].iter().any(|above| above[piv] < 0 || above[piv] >= r[piv]) {
            return Err(format!("column {piv} is not reduced"));
        }
        last = Some(piv);
    }
    if let Some(r) = rows.iter().find(|r| !in_row_span_of_echelon(&nonzero, r)) {
        return Err(format!("row {r:?} is outside the span"));
    }
    let k = nonzero.len();
    if k > 0 && determinantal_divisor(rows, k) != determinantal_divisor(&nonzero, k) {
        return Err("covolumes differ".into());
    }
    if k < rows.len().min(cols) && determinantal_divisor(rows, k + 1) != 0 {
        return Err("rank differs".into());
    }
    Ok(())
}
