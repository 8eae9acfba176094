//! Collection in a polycyclic presentation, optionally with central tails.
//!
//! Two collectors share one relation table. The stack collector rewrites a
//! word letter by letter with the swap rule `x_j x_i -> x_i x_j [x_j, x_i]`
//! (`j > i`) and the power rule `x_i^p -> w_i`. It is used for the overlap
//! tests and to build the conjugation tables. The table collector multiplies
//! normal forms by moving a whole power `x_j^e` across each block
//! `x_k^f` (`k > j`) at once using `x_k^f x_j^e = x_j^e N(k, f, j, e)`.
//!
//! With tails, every application of a tailed relation adds the tail's unit
//! vector to the element's tail vector. Tails are central, so the tail vector
//! can be kept apart from the exponent vector.

use crate::error::{Error, Result};
use crate::presentation::Presentation;

/// Default rewrite-step budget per collected word.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

pub type Letters = Vec<(usize, u32)>;

/// Exponent vector plus tail vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub exps: Vec<u32>,
    pub tails: Vec<i64>,
}

impl State {
    pub fn identity(n: usize, l: usize) -> Self {
        State { exps: vec![0; n], tails: vec![0; l] }
    }

    pub fn letters(&self) -> Letters {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(g, &e)| (g, e))
            .collect()
    }

    pub fn is_trivial_exps(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

pub(crate) fn add_tail(tails: &mut [i64], t: usize, c: i64) -> Result<()> {
    tails[t] = tails[t].checked_add(c).ok_or(Error::TailOverflow)?;
    Ok(())
}

pub(crate) fn add_tails(tails: &mut [i64], other: &[i64], mult: i64) -> Result<()> {
    for (a, &b) in tails.iter_mut().zip(other) {
        if b != 0 {
            let d = b.checked_mul(mult).ok_or(Error::TailOverflow)?;
            *a = a.checked_add(d).ok_or(Error::TailOverflow)?;
        }
    }
    Ok(())
}

/// Which tail (if any) each relation carries.
#[derive(Clone, Debug, Default)]
pub struct TailMap {
    pub count: usize,
    pub power: Vec<Option<usize>>,
    /// `comm[i][j]` for `i > j`.
    pub comm: Vec<Vec<Option<usize>>>,
}

impl TailMap {
    pub fn none(n: usize) -> Self {
        TailMap { count: 0, power: vec![None; n], comm: vec![vec![None; n]; n] }
    }
}

#[derive(Clone, Debug)]
struct ConjEntry {
    /// Normal word in generators after `j`.
    word: Letters,
    tails: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct Engine {
    n: usize,
    p: u32,
    power: Vec<Letters>,
    /// `comm[i][j]` (`i > j`): word of `[x_i, x_j]`, empty when trivial.
    comm: Vec<Vec<Letters>>,
    tails: TailMap,
    budget: u64,
    /// `conj[j][k][(e-1)*(p-1) + (f-1)]` for `k > j`.
    conj: Vec<Vec<Vec<ConjEntry>>>,
    inv_gen: Vec<State>,
}

impl Engine {
    pub fn new(pres: &Presentation, tails: TailMap, budget: u64) -> Result<Self> {
        let n = pres.n();
        let p = pres.prime;
        let mut comm = vec![vec![Vec::new(); n]; n];
        for (&(i, j), w) in &pres.comm_rhs {
            comm[i][j] = w.0.clone();
        }
        let mut engine = Engine {
            n,
            p,
            power: pres.power_rhs.iter().map(|w| w.0.clone()).collect(),
            comm,
            tails,
            budget,
            conj: Vec::new(),
            inv_gen: Vec::new(),
        };
        engine.build_conjugation_tables()?;
        engine.build_inverses()?;
        Ok(engine)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn tail_count(&self) -> usize {
        self.tails.count
    }

    pub fn tail_map(&self) -> &TailMap {
        &self.tails
    }

    pub fn identity(&self) -> State {
        State::identity(self.n, self.tails.count)
    }

    // -- stack collector ----------------------------------------------------

    /// Multiplies `state` on the right by `letters`, collecting from the left.
    pub fn collect(&self, state: &mut State, letters: &[(usize, u32)]) -> Result<()> {
        let n = self.n;
        let p = self.p;
        let mut stack: Vec<(usize, u32)> = letters.iter().rev().copied().collect();
        let mut steps: u64 = 0;
        while let Some((g, k)) = stack.pop() {
            if k == 0 {
                continue;
            }
            steps += 1;
            if steps > self.budget {
                return Err(Error::CollectionBudget(steps));
            }
            let suffix_zero = state.exps[g + 1..n].iter().all(|&e| e == 0);
            if suffix_zero {
                let s = state.exps[g] + k;
                state.exps[g] = s % p;
                let carries = s / p;
                if carries > 0 {
                    if let Some(t) = self.tails.power[g] {
                        add_tail(&mut state.tails, t, carries as i64)?;
                    }
                    for _ in 0..carries {
                        stack.extend(self.power[g].iter().rev().copied());
                    }
                }
                continue;
            }
            // state = prefix x_g^r S with S != 1; S x_g = x_g S^{x_g}.
            if k > 1 {
                stack.push((g, k - 1));
            }
            for j in (g + 1..n).rev() {
                let s = state.exps[j];
                if s == 0 {
                    continue;
                }
                state.exps[j] = 0;
                if let Some(t) = self.tails.comm[j][g] {
                    add_tail(&mut state.tails, t, s as i64)?;
                }
                let w = &self.comm[j][g];
                if w.is_empty() {
                    stack.push((j, s));
                } else {
                    for _ in 0..s {
                        stack.extend(w.iter().rev().copied());
                        stack.push((j, 1));
                    }
                }
            }
            let s = state.exps[g] + 1;
            if s == p {
                state.exps[g] = 0;
                if let Some(t) = self.tails.power[g] {
                    add_tail(&mut state.tails, t, 1)?;
                }
                stack.extend(self.power[g].iter().rev().copied());
            } else {
                state.exps[g] = s;
            }
        }
        Ok(())
    }

    pub fn collect_word(&self, letters: &[(usize, u32)]) -> Result<State> {
        let mut s = self.identity();
        self.collect(&mut s, letters)?;
        Ok(s)
    }

    /// Right-multiplies by a collected element using the stack collector.
    pub fn collect_state(&self, state: &mut State, other: &State) -> Result<()> {
        self.collect(state, &other.letters())?;
        add_tails(&mut state.tails, &other.tails, 1)
    }

    // -- table collector ----------------------------------------------------

    fn build_conjugation_tables(&mut self) -> Result<()> {
        let n = self.n;
        let q = (self.p - 1) as usize;
        let mut conj = vec![vec![Vec::new(); n]; n];
        for j in 0..n {
            for k in j + 1..n {
                let mut entries = Vec::with_capacity(q * q);
                for e in 1..self.p {
                    for f in 1..self.p {
                        let s = self.collect_word(&[(k, f), (j, e)])?;
                        if s.exps[..j].iter().any(|&x| x != 0) || s.exps[j] != e {
                            return Err(Error::Invalid(format!(
                                "conjugating generator {} by generator {} leaves the series",
                                k + 1,
                                j + 1
                            )));
                        }
                        let word = s.exps[j + 1..]
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x != 0)
                            .map(|(o, &x)| (j + 1 + o, x))
                            .collect();
                        let tails =
                            s.tails.iter().enumerate().filter(|(_, &c)| c != 0).map(|(t, &c)| (t, c)).collect();
                        entries.push(ConjEntry { word, tails });
                    }
                }
                conj[j][k] = entries;
            }
        }
        self.conj = conj;
        Ok(())
    }

    fn build_inverses(&mut self) -> Result<()> {
        let n = self.n;
        let mut inv = vec![self.identity(); n];
        for i in (0..n).rev() {
            let mut s = self.identity();
            s.exps[i] = self.p - 1;
            for &(k, a) in self.power[i].iter().rev() {
                for _ in 0..a {
                    self.mul_state(&mut s, &inv[k])?;
                }
            }
            if let Some(t) = self.tails.power[i] {
                add_tail(&mut s.tails, t, -1)?;
            }
            inv[i] = s;
        }
        self.inv_gen = inv;
        Ok(())
    }

    /// Right-multiplies `state` by `x_j^e`, `0 <= e < p`.
    pub fn mul_gen_pow(&self, state: &mut State, j: usize, e: u32) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        let n = self.n;
        let p = self.p;
        let q = (p - 1) as usize;
        let mut pending: Vec<&ConjEntry> = Vec::new();
        for k in j + 1..n {
            let f = state.exps[k];
            if f != 0 {
                state.exps[k] = 0;
                let entry = &self.conj[j][k][(e as usize - 1) * q + (f as usize - 1)];
                for &(t, c) in &entry.tails {
                    add_tail(&mut state.tails, t, c)?;
                }
                pending.push(entry);
            }
        }
        let s = state.exps[j] + e;
        state.exps[j] = s % p;
        if s >= p {
            if let Some(t) = self.tails.power[j] {
                add_tail(&mut state.tails, t, 1)?;
            }
            for &(g, a) in &self.power[j] {
                self.mul_gen_pow(state, g, a)?;
            }
        }
        for entry in pending {
            for &(g, a) in &entry.word {
                self.mul_gen_pow(state, g, a)?;
            }
        }
        Ok(())
    }

    pub fn mul_letters(&self, state: &mut State, letters: &[(usize, u32)]) -> Result<()> {
        for &(g, e) in letters {
            self.mul_raw(state, g, e as u64)?;
        }
        Ok(())
    }

    /// Right-multiplies by the letters of a word whose exponents may reach or
    /// exceed `p`.
    pub fn mul_raw(&self, state: &mut State, g: usize, e: u64) -> Result<()> {
        let p = self.p as u64;
        let (full, rest) = (e / p, (e % p) as u32);
        for _ in 0..full {
            // x_g^p = x_g^{p-1} x_g
            self.mul_gen_pow(state, g, self.p - 1)?;
            self.mul_gen_pow(state, g, 1)?;
        }
        self.mul_gen_pow(state, g, rest)
    }

    pub fn mul_state(&self, state: &mut State, other: &State) -> Result<()> {
        for (g, &e) in other.exps.iter().enumerate() {
            if e != 0 {
                self.mul_gen_pow(state, g, e)?;
            }
        }
        add_tails(&mut state.tails, &other.tails, 1)
    }

    pub fn product(&self, a: &State, b: &State) -> Result<State> {
        let mut s = a.clone();
        self.mul_state(&mut s, b)?;
        Ok(s)
    }

    pub fn inverse_generator(&self, g: usize) -> &State {
        &self.inv_gen[g]
    }

    /// Solves `a z = 1` layer by layer.
    pub fn inverse(&self, a: &State) -> Result<State> {
        let mut c = a.clone();
        let mut z = self.identity();
        for g in 0..self.n {
            let e = c.exps[g];
            if e != 0 {
                self.mul_gen_pow(&mut c, g, self.p - e)?;
                self.mul_gen_pow(&mut z, g, self.p - e)?;
            }
        }
        add_tails(&mut z.tails, &c.tails, -1)?;
        Ok(z)
    }

    /// `a^-1 b^-1 a b`, found as the solution of `(b a) z = a b`.
    pub fn commutator(&self, a: &State, b: &State) -> Result<State> {
        let ab = self.product(a, b)?;
        let mut c = self.product(b, a)?;
        let mut z = self.identity();
        for g in 0..self.n {
            let e = (ab.exps[g] + self.p - c.exps[g]) % self.p;
            if e != 0 {
                self.mul_gen_pow(&mut c, g, e)?;
                self.mul_gen_pow(&mut z, g, e)?;
            }
        }
        add_tails(&mut z.tails, &ab.tails, 1)?;
        add_tails(&mut z.tails, &c.tails, -1)?;
        Ok(z)
    }

    pub fn power(&self, a: &State, k: u64) -> Result<State> {
        let mut result = self.identity();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                self.mul_state(&mut result, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.product(&base, &base)?;
            }
        }
        Ok(result)
    }

    /// Multiplies by `x_g^e` for any integer `e`.
    pub fn mul_signed(&self, state: &mut State, g: usize, e: i64) -> Result<()> {
        if e >= 0 {
            self.mul_raw(state, g, e as u64)
        } else {
            for _ in 0..e.unsigned_abs() {
                self.mul_state(state, &self.inv_gen[g])?;
            }
            Ok(())
        }
    }
}
