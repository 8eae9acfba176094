//! Polycyclic presentations of groups of prime-power order.
//!
//! Generators are indexed from zero internally and ordered by declaration.
//! Every relative order equals the prime `p`. A presentation stores
//!
//! * `x_i^p = w_i` for each generator (`w_i` empty means `x_i^p = 1`), and
//! * `[x_i, x_j] = w_ij` for `i > j`, with absent pairs meaning a trivial
//!   commutator.
//!
//! Both kinds of right-hand side are normal words in generators of index
//! strictly greater than `i`.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! group G9
//! prime p                 # or a number; a name means "supplied at load time"
//! param t                 # optional symbolic exponents
//! generators a b c d e f g
//! pow a = 1
//! comm [b,a] = c
//! comm [e,c] = f^t
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};

/// A normal word `x_{i1}^{e1} ... x_{ik}^{ek}` with strictly increasing
/// indices and exponents in `1..p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord(pub Vec<(usize, u32)>);

impl NormalWord {
    pub fn empty() -> Self {
        NormalWord(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        NormalWord(vec![(index, 1)])
    }

    pub fn letters(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g).min()
    }

    /// Dense exponent vector of length `n`.
    pub fn to_exponents(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for &(g, e) in &self.0 {
            v[g] = e;
        }
        v
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        NormalWord(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(g, &e)| (g, e))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub prime: u32,
    pub generators: Vec<String>,
    /// `power_rhs[i]` is the word `w` in `x_i^p = w`.
    pub power_rhs: Vec<NormalWord>,
    /// Keyed by `(i, j)` with `i > j`; the word `w` in `[x_i, x_j] = w`.
    pub comm_rhs: BTreeMap<(usize, usize), NormalWord>,
}

impl Presentation {
    /// Presentation of the elementary abelian group with the given generators.
    pub fn elementary_abelian(name: &str, prime: u32, generators: &[&str]) -> Self {
        Presentation {
            name: name.to_string(),
            prime,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            power_rhs: vec![NormalWord::empty(); generators.len()],
            comm_rhs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Right-hand side of `[x_i, x_j]` for `i > j`, if nontrivial.
    pub fn commutator_word(&self, i: usize, j: usize) -> Option<&NormalWord> {
        self.comm_rhs.get(&(i, j)).filter(|w| !w.is_empty())
    }

    /// Nontrivial commutator relations in `(i, j)` order.
    pub fn nontrivial_commutators(&self) -> impl Iterator<Item = (&(usize, usize), &NormalWord)> {
        self.comm_rhs.iter().filter(|(_, w)| !w.is_empty())
    }

    pub fn format_word(&self, word: &NormalWord) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = word
            .0
            .iter()
            .map(|&(g, e)| {
                let name = self.generators.get(g).map(String::as_str).unwrap_or("?");
                if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        parts.join(" ")
    }

    /// Serializes to the text format. Relations are emitted sorted by `(i, j)`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("group {}\n", self.name));
        out.push_str(&format!("prime {}\n", self.prime));
        out.push_str(&format!("generators {}\n", self.generators.join(" ")));
        for (i, w) in self.power_rhs.iter().enumerate() {
            if !w.is_empty() {
                out.push_str(&format!("pow {} = {}\n", self.generators[i], self.format_word(w)));
            }
        }
        for (&(i, j), w) in &self.comm_rhs {
            if w.is_empty() {
                continue;
            }
            out.push_str(&format!(
                "comm [{},{}] = {}\n",
                self.generators[i],
                self.generators[j],
                self.format_word(w)
            ));
        }
        out
    }

    /// Removes explicitly stored trivial commutators.
    pub fn canonicalize(&mut self) {
        self.comm_rhs.retain(|_, w| !w.is_empty());
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n != 2 && is_prime(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &'static str, location: String, message: &str) {
        self.violations.push(Violation { rule, location, message: message.to_string() });
    }
}

/// Checks every structural invariant and reports all violations found.
pub fn validate_polycyclic(pres: &Presentation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = pres.n();
    let p = pres.prime;

    if !is_odd_prime(p as u64) {
        report.push("prime", format!("prime {p}"), "prime required");
    }
    if pres.power_rhs.len() != n {
        report.push(
            "power-count",
            "pow".to_string(),
            "one power relation per generator required",
        );
    }
    let names: BTreeSet<&String> = pres.generators.iter().collect();
    if names.len() != n {
        report.push("generators", "generators".to_string(), "generator names must be distinct");
    }

    let check_word = |report: &mut ValidationReport, lhs: usize, word: &NormalWord, loc: String| {
        let mut prev: Option<usize> = None;
        for &(g, e) in &word.0 {
            if g >= n {
                report.push("generator-range", loc.clone(), "generator index out of range");
                continue;
            }
            if g <= lhs {
                report.push("rhs-order", loc.clone(), "RHS index must exceed LHS index");
            }
            if let Some(q) = prev {
                if g <= q {
                    report.push("normal-word", loc.clone(), "word indices must be strictly increasing");
                }
            }
            if e == 0 || e >= p.max(1) {
                report.push("exponent-range", loc.clone(), "exponents must lie in 1..p");
            }
            prev = Some(g);
        }
    };

    for (i, w) in pres.power_rhs.iter().enumerate() {
        check_word(&mut report, i, w, format!("pow {}", i + 1));
    }
    for (&(i, j), w) in &pres.comm_rhs {
        let loc = format!("comm ({},{})", i + 1, j + 1);
        if i <= j {
            report.push("key-order", loc.clone(), "commutator key requires i > j");
        }
        if i >= n || j >= n {
            report.push("generator-range", loc.clone(), "generator index out of range");
            continue;
        }
        check_word(&mut report, i, w, loc);
    }
    report
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("right-hand side uses `{rhs}`, which does not come after `{lhs}`")]
    RhsOrder { lhs: String, rhs: String },
    #[error("duplicate relation for {0}")]
    DuplicateRelation(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("missing `{0}` declaration")]
    MissingDeclaration(&'static str),
}

/// Exponent as written in a source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Int(i64),
    Param { name: String, negate: bool },
}

pub type TemplateWord = Vec<(usize, Exponent)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSpec {
    Fixed(u64),
    Symbolic(String),
}

/// A parsed presentation whose prime and symbolic exponents may still be open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationTemplate {
    pub name: String,
    pub prime: PrimeSpec,
    pub params: Vec<String>,
    pub generators: Vec<String>,
    pub power_rhs: BTreeMap<usize, TemplateWord>,
    pub comm_rhs: BTreeMap<(usize, usize), TemplateWord>,
}

impl PresentationTemplate {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::default().run(text)
    }

    /// Substitutes the prime and parameter values, reducing exponents mod p.
    pub fn instantiate(&self, prime: u64, params: &BTreeMap<String, i64>) -> Result<Presentation> {
        if !is_odd_prime(prime) || prime > u32::MAX as u64 {
            return Err(Error::InvalidPrime(prime));
        }
        let p = prime as i64;
        let resolve = |word: &TemplateWord| -> Result<NormalWord> {
            let mut out = Vec::with_capacity(word.len());
            for (g, e) in word {
                let value = match e {
                    Exponent::Int(v) => *v,
                    Exponent::Param { name, negate } => {
                        let v = *params
                            .get(name)
                            .ok_or_else(|| Error::MissingParameter(name.clone()))?;
                        if *negate {
                            -v
                        } else {
                            v
                        }
                    }
                };
                let r = value.rem_euclid(p) as u32;
                if r != 0 {
                    out.push((*g, r));
                }
            }
            Ok(NormalWord(out))
        };
        let n = self.generators.len();
        let mut power_rhs = vec![NormalWord::empty(); n];
        for (&i, w) in &self.power_rhs {
            power_rhs[i] = resolve(w)?;
        }
        let mut comm_rhs = BTreeMap::new();
        for (&key, w) in &self.comm_rhs {
            let word = resolve(w)?;
            if !word.is_empty() {
                comm_rhs.insert(key, word);
            }
        }
        Ok(Presentation {
            name: self.name.clone(),
            prime: prime as u32,
            generators: self.generators.clone(),
            power_rhs,
            comm_rhs,
        })
    }
}

/// Parses a presentation whose prime is fixed in the text.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let template = PresentationTemplate::parse(text)?;
    match template.prime {
        PrimeSpec::Fixed(p) => template.instantiate(p, &BTreeMap::new()),
        PrimeSpec::Symbolic(_) => Err(Error::PrimeNotFixed),
    }
}

/// Parses a presentation and instantiates it at `prime`, which overrides any
/// prime fixed in the text.
pub fn parse_presentation_at(
    text: &str,
    prime: u64,
    params: &BTreeMap<String, i64>,
) -> Result<Presentation> {
    PresentationTemplate::parse(text)?.instantiate(prime, params)
}

#[derive(Default)]
struct Parser {
    name: Option<String>,
    prime: Option<PrimeSpec>,
    params: Vec<String>,
    generators: Option<Vec<String>>,
    power_rhs: BTreeMap<usize, TemplateWord>,
    comm_rhs: BTreeMap<(usize, usize), TemplateWord>,
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column, kind }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("`{c}`")).unwrap_or_else(|| "end of line".into());
            Err(self.err(self.col(), ParseErrorKind::Syntax(format!("expected `{c}`, found {found}"))))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let col = self.col();
        let start = self.pos;
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || c == '_' };
            if !ok {
                break;
            }
            first = false;
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.err(col, ParseErrorKind::Syntax("expected a name".into())));
        }
        Ok((self.text[start..self.pos].to_string(), col))
    }

    fn token(&mut self) -> Option<(&'a str, usize)> {
        self.skip_ws();
        if self.pos >= self.text.len() {
            return None;
        }
        let col = self.col();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        Some((&self.text[start..self.pos], col))
    }
}

impl Parser {
    fn run(mut self, text: &str) -> Result<PresentationTemplate, ParseError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut cur = Cursor { line: idx + 1, text: line, pos: 0 };
            if cur.at_end() {
                continue;
            }
            let (kw, col) = cur.ident()?;
            match kw.as_str() {
                "group" => {
                    let (name, _) = cur
                        .token()
                        .ok_or_else(|| cur.err(cur.col(), ParseErrorKind::Syntax("expected group name".into())))?;
                    self.name = Some(name.to_string());
                }
                "prime" => {
                    let (tok, c) = cur
                        .token()
                        .ok_or_else(|| cur.err(cur.col(), ParseErrorKind::Syntax("expected prime".into())))?;
                    let spec = if let Ok(v) = tok.parse::<u64>() {
                        PrimeSpec::Fixed(v)
                    } else if tok.chars().all(|c| c.is_alphanumeric() || c == '_')
                        && tok.chars().next().is_some_and(|c| c.is_alphabetic())
                    {
                        PrimeSpec::Symbolic(tok.to_string())
                    } else {
                        return Err(cur.err(c, ParseErrorKind::Syntax(format!("bad prime `{tok}`"))));
                    };
                    self.prime = Some(spec);
                }
                "param" => {
                    while !cur.at_end() {
                        let (name, _) = cur.ident()?;
                        self.params.push(name);
                    }
                }
                "generators" => {
                    if self.generators.is_some() {
                        return Err(cur.err(col, ParseErrorKind::DuplicateRelation("generators".into())));
                    }
                    let mut gens: Vec<String> = Vec::new();
                    while !cur.at_end() {
                        let (name, c) = cur.ident()?;
                        if gens.contains(&name) {
                            return Err(cur.err(c, ParseErrorKind::Syntax(format!("generator `{name}` declared twice"))));
                        }
                        gens.push(name);
                    }
                    if gens.is_empty() {
                        return Err(cur.err(cur.col(), ParseErrorKind::Syntax("no generators".into())));
                    }
                    self.generators = Some(gens);
                }
                "pow" => {
                    let (name, c) = cur.ident()?;
                    let i = self.gen(&cur, &name, c)?;
                    cur.expect('=')?;
                    let word = self.word(&mut cur, i)?;
                    if self.power_rhs.insert(i, word).is_some() {
                        return Err(cur.err(col, ParseErrorKind::DuplicateRelation(format!("{name}^p"))));
                    }
                }
                "comm" => {
                    cur.expect('[')?;
                    let (a, ca) = cur.ident()?;
                    cur.expect(',')?;
                    let (b, cb) = cur.ident()?;
                    cur.expect(']')?;
                    let i = self.gen(&cur, &a, ca)?;
                    let j = self.gen(&cur, &b, cb)?;
                    if i <= j {
                        return Err(cur.err(
                            ca,
                            ParseErrorKind::Syntax(format!(
                                "commutator [{a},{b}] must name the later generator first"
                            )),
                        ));
                    }
                    cur.expect('=')?;
                    let word = self.word(&mut cur, i)?;
                    if self.comm_rhs.insert((i, j), word).is_some() {
                        return Err(cur.err(col, ParseErrorKind::DuplicateRelation(format!("[{a},{b}]"))));
                    }
                }
                other => {
                    return Err(cur.err(col, ParseErrorKind::Syntax(format!("unknown directive `{other}`"))));
                }
            }
            if !cur.at_end() {
                let c = cur.col();
                return Err(cur.err(c, ParseErrorKind::Syntax("trailing input".into())));
            }
        }
        let last = text.lines().count().max(1);
        let missing = |what| ParseError { line: last, column: 1, kind: ParseErrorKind::MissingDeclaration(what) };
        Ok(PresentationTemplate {
            name: self.name.ok_or_else(|| missing("group"))?,
            prime: self.prime.ok_or_else(|| missing("prime"))?,
            params: self.params,
            generators: self.generators.ok_or_else(|| missing("generators"))?,
            power_rhs: self.power_rhs,
            comm_rhs: self.comm_rhs,
        })
    }

    fn gens(&self, cur: &Cursor) -> Result<&Vec<String>, ParseError> {
        self.generators
            .as_ref()
            .ok_or_else(|| cur.err(1, ParseErrorKind::MissingDeclaration("generators")))
    }

    fn gen(&self, cur: &Cursor, name: &str, col: usize) -> Result<usize, ParseError> {
        self.gens(cur)?
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| cur.err(col, ParseErrorKind::UnknownGenerator(name.to_string())))
    }

    /// Parses a right-hand side for the relation whose left side is led by `lhs`.
    fn word(&self, cur: &mut Cursor, lhs: usize) -> Result<TemplateWord, ParseError> {
        let gens = self.gens(cur)?.clone();
        let mut out: TemplateWord = Vec::new();
        let mut tokens = Vec::new();
        while let Some(t) = cur.token() {
            tokens.push(t);
        }
        if tokens.is_empty() {
            return Err(cur.err(cur.col(), ParseErrorKind::Syntax("expected a word or `1`".into())));
        }
        if tokens.len() == 1 && tokens[0].0 == "1" {
            return Ok(out);
        }
        for (tok, col) in tokens {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, Some(e)),
                None => (tok, None),
            };
            let exponent = match exp {
                None => Exponent::Int(1),
                Some(e) => self.exponent(cur, e, col)?,
            };
            // Either a declared name, or a run of single-letter generators such as `eg`.
            let letters: Vec<usize> = if let Some(g) = gens.iter().position(|g| g == base) {
                vec![g]
            } else {
                let mut v = Vec::new();
                for ch in base.chars() {
                    let s = ch.to_string();
                    match gens.iter().position(|g| *g == s) {
                        Some(g) => v.push(g),
                        None => return Err(cur.err(col, ParseErrorKind::UnknownGenerator(base.to_string()))),
                    }
                }
                if v.is_empty() {
                    return Err(cur.err(col, ParseErrorKind::Syntax("empty word token".into())));
                }
                v
            };
            let last = letters.len() - 1;
            for (k, g) in letters.into_iter().enumerate() {
                if g <= lhs {
                    return Err(cur.err(
                        col,
                        ParseErrorKind::RhsOrder { lhs: gens[lhs].clone(), rhs: gens[g].clone() },
                    ));
                }
                if let Some(&(prev, _)) = out.last() {
                    if g <= prev {
                        return Err(cur.err(
                            col,
                            ParseErrorKind::Syntax("word must list generators in increasing order".into()),
                        ));
                    }
                }
                let e = if k == last { exponent.clone() } else { Exponent::Int(1) };
                out.push((g, e));
            }
        }
        Ok(out)
    }

    fn exponent(&self, cur: &Cursor, text: &str, col: usize) -> Result<Exponent, ParseError> {
        if let Ok(v) = text.parse::<i64>() {
            return Ok(Exponent::Int(v));
        }
        let (negate, name) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        if self.params.iter().any(|p| p == name) {
            Ok(Exponent::Param { name: name.to_string(), negate })
        } else if name.chars().all(|c| c.is_alphanumeric() || c == '_') && !name.is_empty() {
            Err(cur.err(col, ParseErrorKind::UnknownParameter(name.to_string())))
        } else {
            Err(cur.err(col, ParseErrorKind::Syntax(format!("bad exponent `{text}`"))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G9: &str = "group G9\nprime 5\ngenerators a b c d e f g\n\
        comm [b,a] = c\ncomm [c,a] = d\ncomm [c,b] = e\ncomm [d,a] = e\n";

    #[test]
    fn parses_g9() {
        let p = parse_presentation(G9).unwrap();
        assert_eq!(p.n(), 7);
        assert_eq!(p.comm_rhs.len(), 4);
        assert!(p.power_rhs.iter().all(NormalWord::is_empty));
        assert_eq!(p.comm_rhs[&(1, 0)], NormalWord::generator(2));
        assert!(validate_polycyclic(&p).ok());
    }

    #[test]
    fn no_relations_is_elementary_abelian() {
        let p = parse_presentation("group G1\nprime 7\ngenerators a b c d e f g\n").unwrap();
        assert!(p.comm_rhs.is_empty());
        assert_eq!(p, Presentation::elementary_abelian("G1", 7, &["a", "b", "c", "d", "e", "f", "g"]));
    }

    #[test]
    fn concatenated_word() {
        let p = parse_presentation("group X\nprime 7\ngenerators a b c d e f g\ncomm [d,b] = eg\n").unwrap();
        assert_eq!(p.comm_rhs[&(3, 1)], NormalWord(vec![(4, 1), (6, 1)]));
    }

    #[test]
    fn negative_exponents_reduce_mod_p() {
        let p = parse_presentation("group X\nprime 5\ngenerators a b c d e f g\ncomm [d,c] = f^-1\n").unwrap();
        assert_eq!(p.comm_rhs[&(3, 2)], NormalWord(vec![(5, 4)]));
    }

    #[test]
    fn symbolic_prime_and_param() {
        let text = "group G25\nprime p\nparam t\ngenerators a b c d e f g\ncomm [e,c] = f^t\n";
        assert!(matches!(parse_presentation(text), Err(Error::PrimeNotFixed)));
        let t = PresentationTemplate::parse(text).unwrap();
        let mut params = BTreeMap::new();
        assert!(matches!(t.instantiate(7, &params), Err(Error::MissingParameter(_))));
        params.insert("t".to_string(), 3);
        let p = t.instantiate(7, &params).unwrap();
        assert_eq!(p.comm_rhs[&(4, 2)], NormalWord(vec![(5, 3)]));
        assert!(matches!(t.instantiate(9, &params), Err(Error::InvalidPrime(9))));
    }

    #[test]
    fn located_errors() {
        let e = PresentationTemplate::parse("group X\nprime 5\ngenerators a b c\ncomm [b,a] = z\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 14));
        assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("z".into()));

        let e = PresentationTemplate::parse("group X\nprime 5\ngenerators a b c\ncomm [c,a] = b\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::RhsOrder { .. }));

        let e = PresentationTemplate::parse("group X\nprime 5\ngenerators a b c\ncomm [b,a] = c\ncomm [b,a] = c^2\n")
            .unwrap_err();
        assert_eq!(e.line, 5);
        assert!(matches!(e.kind, ParseErrorKind::DuplicateRelation(_)));

        let e = PresentationTemplate::parse("group X\nprime 5\ngenerators a b c\ncomm [b,a = c\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = PresentationTemplate::parse("group X\ngenerators a\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingDeclaration("prime"));
    }

    #[test]
    fn validation_collects_all_violations() {
        let mut p = parse_presentation(G9).unwrap();
        p.comm_rhs.insert((1, 0), NormalWord(vec![(1, 1)]));
        p.prime = 4;
        let r = validate_polycyclic(&p);
        assert!(!r.ok());
        assert!(r.violations.iter().any(|v| v.message == "RHS index must exceed LHS index"));
        assert!(r.violations.iter().any(|v| v.message == "prime required"));
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn render_sorted() {
        let p = parse_presentation(
            "group X\nprime 5\ngenerators a b c d e f g\ncomm [d,a] = e\ncomm [b,a] = c\npow a = g^2\n",
        )
        .unwrap();
        let text = p.render();
        assert_eq!(
            text,
            "group X\nprime 5\ngenerators a b c d e f g\npow a = g^2\ncomm [b,a] = c\ncomm [d,a] = e\n"
        );
        assert_eq!(parse_presentation(&text).unwrap(), p);
    }
}
