//! Exact integer matrices: Hermite and Smith normal forms and the abelian
//! invariants of `Z^l` modulo a row lattice.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length `cols`.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>], cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| r.iter().cloned().map(Into::into).collect()).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.data {
            row.swap(a, b);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            let parts: Vec<String> = row.iter().map(BigInt::to_string).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

fn row_sub_mul(a: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_sub_mul(a: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[src].is_zero() {
            let d = q * &row[src];
            row[target] -= d;
        }
    }
}

/// Row-style Hermite normal form of the same shape: pivots positive and
/// strictly moving right, entries above a pivot reduced into `[0, pivot)`,
/// zero rows last.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut a = m.data.clone();
    let rows = m.rows;
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows {
            break;
        }
        let mut has_pivot = false;
        loop {
            let k = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by(|&i, &j| {
                a[i][c].abs().cmp(&a[j][c].abs()).then(i.cmp(&j))
            });
            let Some(k) = k else { break };
            has_pivot = true;
            a.swap(r, k);
            let mut done = true;
            for i in r + 1..rows {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_sub_mul(&mut a, i, r, &q);
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !has_pivot {
            continue;
        }
        if a[r][c].is_negative() {
            for x in &mut a[r] {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            row_sub_mul(&mut a, i, r, &q);
        }
        r += 1;
    }
    IntMatrix { rows, cols: m.cols, data: a }
}

/// `S = P * T * Q` with `S` diagonal, `P`, `Q` unimodular, and the nonzero
/// diagonal entries positive and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub q_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.data[i][i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with accumulated transforms. Pivots are chosen by
/// smallest absolute value, ties going to the lowest row and then column.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    let mut qi = IntMatrix::identity(cols);

    let swap_rows = |s: &mut IntMatrix, p: &mut IntMatrix, a: usize, b: usize| {
        s.data.swap(a, b);
        p.data.swap(a, b);
    };
    let swap_cols = |s: &mut IntMatrix, q: &mut IntMatrix, qi: &mut IntMatrix, a: usize, b: usize| {
        s.swap_cols(a, b);
        q.swap_cols(a, b);
        qi.data.swap(a, b);
    };

    for t in 0..rows.min(cols) {
        let pick = |s: &IntMatrix| {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = &s.data[i][j];
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.abs() < s.data[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = pick(&s) else { break };
        swap_rows(&mut s, &mut p, t, pi);
        swap_cols(&mut s, &mut q, &mut qi, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !s.data[i][t].is_zero() {
                    let qt = s.data[i][t].div_floor(&s.data[t][t]);
                    row_sub_mul(&mut s.data, i, t, &qt);
                    row_sub_mul(&mut p.data, i, t, &qt);
                    clean &= s.data[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !s.data[t][j].is_zero() {
                    let qt = s.data[t][j].div_floor(&s.data[t][t]);
                    col_sub_mul(&mut s.data, j, t, &qt);
                    col_sub_mul(&mut q.data, j, t, &qt);
                    // Q' = Q E with E = I - qt e_t e_j^T, so Q'^-1 = (I + qt e_t e_j^T) Q^-1.
                    row_sub_mul(&mut qi.data, t, j, &(-&qt));
                    clean &= s.data[t][j].is_zero();
                }
            }
            if !clean {
                // Move the smallest remaining entry of row/column t to the pivot.
                let mut best = (t, t);
                for i in t + 1..rows {
                    let v = &s.data[i][t];
                    if !v.is_zero() && v.abs() < s.data[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let v = &s.data[t][j];
                    if !v.is_zero() && v.abs() < s.data[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    swap_rows(&mut s, &mut p, t, best.0);
                } else if best.1 != t {
                    swap_cols(&mut s, &mut q, &mut qi, t, best.1);
                }
                continue;
            }
            let d = s.data[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.data[i][j].is_multiple_of(&d)));
            match bad {
                Some(i) => {
                    // Add row i to row t and redo the elimination.
                    let minus_one = -BigInt::one();
                    row_sub_mul(&mut s.data, t, i, &minus_one);
                    row_sub_mul(&mut p.data, t, i, &minus_one);
                }
                None => break,
            }
        }
        if s.data[t][t].is_negative() {
            for x in &mut s.data[t] {
                *x = -std::mem::take(x);
            }
            for x in &mut p.data[t] {
                *x = -std::mem::take(x);
            }
        }
    }
    SmithDecomposition { s, p, q, q_inv: qi }
}

/// Finitely generated abelian group `Z_{d_1} x ... x Z_{d_k} x Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianType {
    /// Each greater than 1 and dividing the next.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianType {
    pub fn is_trivial_torsion(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn torsion_u64(&self) -> Result<Vec<u64>> {
        self.torsion
            .iter()
            .map(|d| d.to_u64().ok_or_else(|| Error::Defect(format!("invariant {d} exceeds 64 bits"))))
            .collect()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    fn from_diagonal(diag: &[BigInt], l: usize) -> Self {
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        AbelianType {
            torsion: diag.iter().filter(|d| **d > BigInt::one()).cloned().collect(),
            free_rank: l - nonzero,
        }
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z_{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

impl Serialize for AbelianType {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let torsion: Vec<String> = self.torsion.iter().map(BigInt::to_string).collect();
        let mut st = ser.serialize_struct("AbelianType", 2)?;
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.end()
    }
}

/// Invariants of `Z^l` modulo the row lattice of `rows`.
pub fn quotient_invariants(rows: &IntMatrix, l: usize) -> AbelianType {
    assert_eq!(rows.ncols(), l, "row length must equal l");
    if rows.nrows() == 0 {
        return AbelianType { torsion: Vec::new(), free_rank: l };
    }
    AbelianType::from_diagonal(&smith_normal_form(rows).diagonal(), l)
}

/// Invariants read off an existing decomposition.
pub fn invariants_of(decomp: &SmithDecomposition) -> AbelianType {
    AbelianType::from_diagonal(&decomp.diagonal(), decomp.s.ncols())
}

/// Row lattice in `Z^l` kept in echelon form, built one row at a time with
/// checked 128-bit arithmetic.
#[derive(Clone, Debug)]
pub struct Lattice {
    l: usize,
    /// `basis[c]` has its first nonzero entry, positive, at column `c`.
    basis: Vec<Option<Vec<i128>>>,
}

fn checked_combine(a: &[i128], x: i128, b: &[i128], y: i128) -> Result<Vec<i128>> {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| {
            u.checked_mul(x)
                .and_then(|s| v.checked_mul(y).and_then(|t| s.checked_add(t)))
                .ok_or(Error::TailOverflow)
        })
        .collect()
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl Lattice {
    pub fn new(l: usize) -> Self {
        Lattice { l, basis: vec![None; l] }
    }

    pub fn dim(&self) -> usize {
        self.l
    }

    pub fn rank(&self) -> usize {
        self.basis.iter().flatten().count()
    }

    /// Adds a row; returns whether the lattice grew.
    pub fn insert(&mut self, row: &[i64]) -> Result<bool> {
        let mut v: Vec<i128> = row.iter().map(|&x| x as i128).collect();
        let mut grew = false;
        for c in 0..self.l {
            if v[c] == 0 {
                continue;
            }
            match self.basis[c].take() {
                None => {
                    if v[c] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.basis[c] = Some(v);
                    grew = true;
                    break;
                }
                Some(b) => {
                    if v[c] % b[c] == 0 {
                        let q = v[c] / b[c];
                        v = checked_combine(&v, 1, &b, -q)?;
                        self.basis[c] = Some(b);
                    } else {
                        let (g, s, t) = ext_gcd(b[c], v[c]);
                        let nb = checked_combine(&b, s, &v, t)?;
                        v = checked_combine(&v, b[c] / g, &b, -(v[c] / g))?;
                        self.basis[c] = Some(if nb[c] < 0 { nb.iter().map(|x| -x).collect() } else { nb });
                        grew = true;
                    }
                }
            }
        }
        if grew {
            self.reduce_basis()?;
        }
        Ok(grew)
    }

    /// Brings the basis to the unique reduced Hermite form, which keeps the
    /// entries bounded independently of the insertion history.
    fn reduce_basis(&mut self) -> Result<()> {
        for k in 0..self.l {
            let Some(pivot_row) = self.basis[k].clone() else { continue };
            for r in 0..k {
                if let Some(row) = &self.basis[r] {
                    let q = row[k].div_euclid(pivot_row[k]);
                    if q != 0 {
                        self.basis[r] = Some(checked_combine(row, 1, &pivot_row, -q)?);
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical remainder of `v` modulo the lattice.
    pub fn reduce(&self, v: &[i64]) -> Result<Vec<i128>> {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for c in 0..self.l {
            if let Some(b) = &self.basis[c] {
                let q = v[c].div_euclid(b[c]);
                if q != 0 {
                    v = checked_combine(&v, 1, b, -q)?;
                }
            }
        }
        Ok(v)
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|&x| x == 0))
    }

    /// Basis rows in pivot order.
    pub fn basis_rows(&self) -> Vec<Vec<i128>> {
        self.basis.iter().flatten().cloned().collect()
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> =
            self.basis_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        IntMatrix { rows: rows.len(), cols: self.l, data: rows }
    }
}
