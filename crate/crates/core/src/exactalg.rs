//! Exact linear algebra over the integers and over prime fields.
//!
//! Integer work is done on [`BigInt`] entries so determinants and invariant
//! factors are never truncated. Modular work reduces entries into `u64`
//! residues; moduli are restricted to odd primes below 2^32 so products of two
//! residues fit in a `u64`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("not invertible: {value} mod {modulus}")]
    NotInvertible { value: i64, modulus: u64 },
    #[error("invalid modulus {0}: expected an odd prime below 2^32")]
    InvalidModulus(u64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_modulus(p: u64) -> Result<(), AlgebraError> {
    if p < (1 << 32) && is_odd_prime(p) {
        Ok(())
    } else {
        Err(AlgebraError::InvalidModulus(p))
    }
}

/// Reduces a signed integer into `[0, p)`.
pub fn residue(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

fn residue_big(a: &BigInt, p: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

pub fn inv_mod_p(a: i64, p: u64) -> Result<u64, AlgebraError> {
    check_modulus(p)?;
    let r = residue(a, p);
    if r == 0 {
        return Err(AlgebraError::NotInvertible { value: a, modulus: p });
    }
    // extended Euclid on (r, p)
    let (mut old_r, mut cur_r) = (r as i64, p as i64);
    let (mut old_s, mut cur_s) = (1i64, 0i64);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    debug_assert_eq!(old_r, 1);
    Ok(residue(old_s, p))
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have the
    /// same length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.data[i * self.cols + j] = v.into();
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, panicking if any entry does not fit.
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64().expect("entry fits in i64")).collect())
            .collect()
    }

    /// Appends a row at the bottom.
    pub fn push_row(&mut self, row: &[i64]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend(row.iter().map(|&x| BigInt::from(x)));
        self.rows += 1;
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Multiplies by a residue vector modulo `p`.
    pub fn mul_vec_mod(&self, v: &[u64], p: u64) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(0u64, |acc, (a, &x)| (acc + residue_big(a, p) * x) % p)
            })
            .collect()
    }

    fn reduced_mod(&self, p: u64) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| residue_big(a, p)).collect()).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join(" "))?;
        }
        Ok(())
    }
}

/// A vector of residues modulo an odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModVector {
    pub modulus: u64,
    pub entries: Vec<u64>,
}

impl ModVector {
    pub fn new(modulus: u64, entries: Vec<u64>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < modulus));
        Self { modulus, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reduced row echelon form over Z_p in place; returns the pivot columns.
fn rref_mod(m: &mut [Vec<u64>], cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, k);
        let inv = inv_mod_p(m[r][c] as i64, p).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for k in 0..m.len() {
            if k != r && m[k][c] != 0 {
                let f = m[k][c];
                for j in 0..cols {
                    m[k][j] = (m[k][j] + (p - f) * m[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize, AlgebraError> {
    check_modulus(p)?;
    let mut rows = m.reduced_mod(p);
    Ok(rref_mod(&mut rows, m.cols, p).len())
}

/// Basis of `{x : M x = 0 mod p}`, one vector per free column, each with a 1
/// in its free column and zeros in the other free columns.
pub fn nullspace_mod_p(m: &IntMatrix, p: u64) -> Result<Vec<ModVector>, AlgebraError> {
    check_modulus(p)?;
    let mut rows = m.reduced_mod(p);
    let pivots = rref_mod(&mut rows, m.cols, p);
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let basis = (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0u64; m.cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[r][f]) % p;
            }
            ModVector::new(p, v)
        })
        .collect();
    Ok(basis)
}

/// Bareiss elimination. Returns the rank and, for square input, the
/// determinant.
fn bareiss(m: &IntMatrix) -> (usize, BigInt) {
    let mut a = m.row_vecs();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| !a[k][c].is_zero()) else { continue };
        if k != r {
            a.swap(k, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    let det = if rows == cols && r == rows {
        if rows == 0 { BigInt::one() } else { a[rows - 1][cols - 1].clone() * sign }
    } else {
        BigInt::zero()
    };
    (r, det)
}

/// Rank over the rationals.
pub fn rank_int(m: &IntMatrix) -> usize {
    bareiss(m).0
}

pub fn det_int(m: &IntMatrix) -> Result<BigInt, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok(bareiss(m).1)
}

/// Invariant factors `d1 | d2 | ...` of the Smith normal form, one per
/// diagonal position (so `min(rows, cols)` values, trailing zeros included).
pub fn smith_invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.row_vecs();
    let (rows, cols) = (m.rows, m.cols);
    let diag_len = rows.min(cols);
    let mut diag = Vec::with_capacity(diag_len);

    for t in 0..diag_len {
        // pivot: smallest nonzero |entry| in the trailing block
        let pick = |a: &Vec<Vec<BigInt>>| {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        };
        let Some(_) = pick(&a) else {
            diag.extend(std::iter::repeat_n(BigInt::zero(), diag_len - t));
            break;
        };
        loop {
            let (pi, pj) = pick(&a).expect("block is nonzero");
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}
