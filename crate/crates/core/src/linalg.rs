//! Dense matrices over a [`Field`], Kronecker powers, and kernels.
//!
//! Exact kernels use fraction-free elimination on integer rows (each row is
//! cleared of denominators and kept primitive), so intermediate growth stays
//! bounded by the minors of the input. Approximate kernels use complete
//! pivoting with a threshold relative to the largest pivot.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{Complex64, Field, Rational, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (r, c): (usize, usize)) -> &F {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<F> Matrix<F> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn into_entries(self) -> Vec<F> {
        self.data
    }
}

impl<F: Field> Matrix<F> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<F>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::Dimension("ragged columns".into()));
        }
        Ok(Matrix::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn diagonal(d: &[F]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |r, c| if r == c { d[r].clone() } else { F::zero() })
    }

    /// Column vector.
    pub fn column(v: &[F]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn col(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        self.map(Field::to_complex)
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(self.zip(other, |a, b| a.clone() + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(self.zip(other, |a, b| a.clone() - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Matrix product; skips zero entries of the left factor.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b;
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = std::mem::replace(slot, F::zero()) + prod;
                }
            }
        }
        Ok(out)
    }

    /// Product of square matrices known to be compatible.
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("matrix dimensions must agree")
    }

    pub fn apply(&self, v: &[F]) -> Result<Vec<F>> {
        Ok(self.try_mul(&Matrix::column(v))?.data)
    }

    pub fn powu(&self, k: u32) -> Self {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() || self.rows != other.rows || !other.is_square() {
            return Err(Error::Dimension("commutator needs equal square matrices".into()));
        }
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = &other[(k, l)];
                        if !b.is_zero() {
                            out[(i * other.rows + k, j * other.cols + l)] = a.clone() * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// `g ⊗ ... ⊗ g` (r factors); `r = 0` gives the 1x1 identity.
    pub fn kron_power(&self, r: usize) -> Self {
        let mut acc = Matrix::identity(1);
        for _ in 0..r {
            acc = acc.kron(self);
        }
        acc
    }

    /// Places `block` with its top-left corner at `(at, at)` inside an identity of size `n`.
    pub fn embed_block(n: usize, at: usize, block: &Self, fill_identity: bool) -> Self {
        let mut m = if fill_identity { Matrix::identity(n) } else { Matrix::zeros(n, n) };
        for r in 0..block.rows {
            for c in 0..block.cols {
                m[(at + r, at + c)] = block[(r, c)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    /// Entrywise comparison within the field's tolerance.
    pub fn close(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.close(b, tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_negligible(tol)))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.close(&self.transpose(), tol)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    /// Determinant by elimination over the field.
    pub fn determinant(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&r| !a[(r, k)].is_zero())
                .max_by(|&x, &y| a[(x, k)].magnitude().total_cmp(&a[(y, k)].magnitude()));
            let Some(p) = pivot else { return Ok(F::zero()) };
            if p != k {
                for c in 0..n {
                    a.data.swap(p * n + c, k * n + c);
                }
                det = -det;
            }
            let pv = a[(k, k)].clone();
            det = det * &pv;
            for r in k + 1..n {
                let f = a[(r, k)].clone() / &pv;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = a[(k, c)].clone() * &f;
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan; `None` when singular (exactly, or below `tol` relative).
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv: Matrix<F> = Matrix::identity(n);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].magnitude().total_cmp(&a[(y, k)].magnitude()))?;
            if a[(p, k)].is_zero() || (!F::EXACT && a[(p, k)].magnitude() <= tol * scale) {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(p * n + c, k * n + c);
                    inv.data.swap(p * n + c, k * n + c);
                }
            }
            let pv = a[(k, k)].clone();
            for c in 0..n {
                a[(k, c)] = a[(k, c)].clone() / &pv;
                inv[(k, c)] = inv[(k, c)].clone() / &pv;
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..n {
                    let va = a[(k, c)].clone() * &f;
                    a[(r, c)] = a[(r, c)].clone() - va;
                    let vi = inv[(k, c)].clone() * &f;
                    inv[(r, c)] = inv[(r, c)].clone() - vi;
                }
            }
        }
        Some(inv)
    }

    /// `self⁻¹ · m · self` style conjugation: returns `p⁻¹ m p`.
    pub fn conjugate_by(m: &Self, p: &Self, p_inv: &Self) -> Self {
        p_inv.mul(m).mul(p)
    }
}

/// Kernel of a linear map.
#[derive(Clone, Debug, PartialEq)]
pub struct Nullspace<F> {
    pub rank: usize,
    pub dimension: usize,
    /// Empty when only the dimension was requested.
    pub basis: Vec<Vec<F>>,
}

pub fn nullspace<F: Field>(m: &Matrix<F>, tol: f64) -> Nullspace<F> {
    F::nullspace(m, tol)
}

pub fn rank<F: Field>(m: &Matrix<F>, tol: f64) -> usize {
    if F::EXACT {
        let rows = dense_to_sparse(m);
        F::sparse_nullspace(rows, m.cols(), tol).rank
    } else {
        F::nullspace(m, tol).rank
    }
}

/// Rank of the matrix whose rows are the flattened inputs.
pub fn span_dimension<F: Field>(mats: &[Matrix<F>], tol: f64) -> Result<usize> {
    let Some(first) = mats.first() else { return Ok(0) };
    if mats.iter().any(|m| m.rows() != first.rows() || m.cols() != first.cols()) {
        return Err(Error::Dimension("span_dimension: shape mismatch".into()));
    }
    let width = first.rows() * first.cols();
    if F::EXACT {
        let rows = mats
            .iter()
            .map(|m| m.entries().iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
            .collect();
        Ok(F::sparse_nullspace(rows, width, tol).rank)
    } else {
        let data = mats.iter().flat_map(|m| m.entries().iter().cloned()).collect();
        let stacked = Matrix::from_vec(mats.len(), width, data)?;
        Ok(rank(&stacked, tol))
    }
}

pub(crate) fn dense_to_sparse<F: Field>(m: &Matrix<F>) -> Vec<Vec<(usize, F)>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(c, x)| (c, x.clone()))
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// exact kernels

type IntRow = Vec<(usize, BigInt)>;

fn to_primitive_int_row(row: &[(usize, Rational)]) -> IntRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (*c, x.numer() * (&lcm / x.denom())))
        .collect();
    out.sort_by_key(|(c, _)| *c);
    // merge duplicate columns
    let mut merged: IntRow = Vec::with_capacity(out.len());
    for (c, v) in out {
        match merged.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|(_, v)| !v.is_zero());
    make_primitive(&mut merged);
    merged
}

fn make_primitive(row: &mut IntRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// `a·row - b·other`, sparse merge; result made primitive.
fn combine(row: &IntRow, a: &BigInt, other: &IntRow, b: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        let take_row = j >= other.len() || (i < row.len() && row[i].0 < other[j].0);
        let take_other = i >= row.len() || (j < other.len() && other[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, a * &row[i].1));
            i += 1;
        } else if take_other {
            out.push((other[j].0, -(b * &other[j].1)));
            j += 1;
        } else {
            let v = a * &row[i].1 - b * &other[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    out
}

fn lookup(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// Echelon form by fraction-free elimination; pivot column -> row.
fn exact_echelon(rows: Vec<Vec<(usize, Rational)>>) -> BTreeMap<usize, IntRow> {
    let mut pivots: BTreeMap<usize, IntRow> = BTreeMap::new();
    for raw in rows {
        let mut row = to_primitive_int_row(&raw);
        while let Some((lead, lv)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => {
                    let pv = &p[0].1;
                    let g = pv.gcd(&lv);
                    row = combine(&row, &(pv / &g), p, &(&lv / &g));
                }
                None => {
                    if lv.is_negative() {
                        for (_, v) in row.iter_mut() {
                            *v = -std::mem::take(v);
                        }
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots
}

/// Kernel of a sparse rational system by fraction-free elimination.
pub fn exact_sparse_nullspace(rows: Vec<Vec<(usize, Rational)>>, cols: usize) -> Nullspace<Rational> {
    exact_sparse_kernel(rows, cols, true)
}

pub fn exact_sparse_kernel(rows: Vec<Vec<(usize, Rational)>>, cols: usize, with_basis: bool) -> Nullspace<Rational> {
    let mut pivots = exact_echelon(rows);
    let rank = pivots.len();
    let dimension = cols - rank;
    if !with_basis || dimension == 0 {
        return Nullspace { rank, dimension, basis: Vec::new() };
    }
    // back-substitution to reduced echelon form, last pivot first
    let pivot_cols: Vec<usize> = pivots.keys().copied().collect();
    for (idx, &c) in pivot_cols.iter().enumerate().rev() {
        let mut row = pivots.remove(&c).expect("pivot present");
        for &later in &pivot_cols[idx + 1..] {
            if let Some(v) = lookup(&row, later).cloned() {
                let p = &pivots[&later];
                let pv = &p[0].1;
                let g = pv.gcd(&v);
                row = combine(&row, &(pv / &g), p, &(&v / &g));
            }
        }
        pivots.insert(c, row);
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains_key(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (&c, row) in &pivots {
                if let Some(x) = lookup(row, f) {
                    v[c] = -Rational::new(x.clone(), row[0].1.clone());
                }
            }
            v
        })
        .collect();
    Nullspace { rank, dimension, basis }
}

pub fn exact_nullspace(m: &Matrix<Rational>) -> Nullspace<Rational> {
    exact_sparse_nullspace(dense_to_sparse(m), m.cols())
}

// ---------------------------------------------------------------------------
// approximate kernels

/// Complete-pivoting Gauss-Jordan on a dense row-major buffer.
fn approx_eliminate(mut a: Vec<Complex64>, rows: usize, cols: usize, tol: f64, with_basis: bool) -> Nullspace<Complex64> {
    let reference = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    if reference > 0.0 {
        let threshold = tol * reference;
        while rank < rows.min(cols) {
            let (mut best, mut br, mut bc) = (0.0, rank, rank);
            for r in rank..rows {
                let row = &a[r * cols..(r + 1) * cols];
                for (c, x) in row.iter().enumerate().skip(rank) {
                    let m = x.norm();
                    if m > best {
                        best = m;
                        br = r;
                        bc = c;
                    }
                }
            }
            if best <= threshold {
                break;
            }
            let k = rank;
            if br != k {
                for c in 0..cols {
                    a.swap(br * cols + c, k * cols + c);
                }
            }
            if bc != k {
                for r in 0..rows {
                    a.swap(r * cols + bc, r * cols + k);
                }
                perm.swap(bc, k);
            }
            let inv = Complex64::new(1.0, 0.0) / a[k * cols + k];
            for c in k..cols {
                a[k * cols + c] *= inv;
            }
            let (head, tail) = a.split_at_mut(k * cols);
            let (pivot_row, rest) = tail.split_at_mut(cols);
            let update = |row: &mut [Complex64]| {
                let f = row[k];
                if f.norm() == 0.0 {
                    return;
                }
                for c in k..cols {
                    row[c] -= f * pivot_row[c];
                }
            };
            if with_basis {
                head.chunks_mut(cols).for_each(update);
            }
            rest.chunks_mut(cols).for_each(update);
            rank += 1;
        }
    }
    let dimension = cols - rank;
    let basis = if with_basis {
        (rank..cols)
            .map(|j| {
                let mut v = vec![Complex64::new(0.0, 0.0); cols];
                v[perm[j]] = Complex64::new(1.0, 0.0);
                for i in 0..rank {
                    v[perm[i]] = -a[i * cols + j];
                }
                v
            })
            .collect()
    } else {
        Vec::new()
    };
    Nullspace { rank, dimension, basis }
}

pub fn approx_nullspace(m: &Matrix<Complex64>, tol: f64) -> Nullspace<Complex64> {
    approx_eliminate(m.entries().to_vec(), m.rows(), m.cols(), tol, true)
}

pub fn approx_rank(m: &Matrix<Complex64>, tol: f64) -> usize {
    approx_eliminate(m.entries().to_vec(), m.rows(), m.cols(), tol, false).rank
}

/// Kernel of a tall sparse system; very tall systems go through `AᴴA`.
pub fn approx_sparse_nullspace(rows: Vec<Vec<(usize, Complex64)>>, cols: usize, tol: f64) -> Nullspace<Complex64> {
    let rows: Vec<_> = rows.into_iter().filter(|r| r.iter().any(|(_, x)| x.norm() != 0.0)).collect();
    if rows.len() <= 2 * cols || cols <= 64 {
        let mut dense = vec![Complex64::new(0.0, 0.0); rows.len() * cols];
        for (i, row) in rows.iter().enumerate() {
            for (c, x) in row {
                dense[i * cols + c] += x;
            }
        }
        return approx_eliminate(dense, rows.len(), cols, tol, true);
    }
    let mut normal = vec![Complex64::new(0.0, 0.0); cols * cols];
    for row in &rows {
        for (j, x) in row {
            let xc = x.conj();
            for (k, y) in row {
                normal[j * cols + k] += xc * y;
            }
        }
    }
    approx_eliminate(normal, cols, cols, tol, true)
}

// ---------------------------------------------------------------------------
// JSON

impl<F: Field> Serialize for Matrix<F> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            entries: &'a [Scalar],
        }
        let entries: Vec<Scalar> = self.data.iter().map(Field::to_scalar).collect();
        Repr { rows: self.rows, cols: self.cols, entries: &entries }.serialize(serializer)
    }
}

impl<'de, F: Field> Deserialize<'de> for Matrix<F> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Scalar>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let data = repr
            .entries
            .iter()
            .map(|s| F::from_scalar(s).ok_or_else(|| serde::de::Error::custom("scalar mode mismatch")))
            .collect::<std::result::Result<Vec<F>, _>>()?;
        Matrix::from_vec(repr.rows, repr.cols, data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational;

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    fn mat(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(q).collect()).collect()).unwrap()
    }

    fn unit(n: usize, i: usize, j: usize) -> Matrix<Rational> {
        Matrix::from_fn(n, n, |r, c| if (r, c) == (i, j) { q(1) } else { q(0) })
    }

    #[test]
    fn identity_product() {
        let a = mat(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        assert_eq!(Matrix::identity(3).mul(&a), a);
        assert!(a.try_mul(&mat(vec![vec![1, 2]])).is_err());
    }

    #[test]
    fn kron_identities_and_shape() {
        let i2: Matrix<Rational> = Matrix::identity(2);
        let i3: Matrix<Rational> = Matrix::identity(3);
        assert_eq!(i2.kron(&i3), Matrix::identity(6));
        let a = mat(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.kron(&a).rows(), 4);
        assert_eq!(a.kron_power(3).cols(), 8);
    }

    #[test]
    fn kron_acts_on_pure_tensors() {
        let g = mat(vec![vec![1, -2, 0], vec![3, 1, 1], vec![0, 5, 2]]);
        let u = vec![q(1), q(2), q(-1)];
        let v = vec![q(0), q(3), q(1)];
        let uv: Vec<Rational> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let gu = g.apply(&u).unwrap();
        let gv = g.apply(&v).unwrap();
        let expected: Vec<Rational> = gu.iter().flat_map(|a| gv.iter().map(move |b| a * b)).collect();
        assert_eq!(g.kron(&g).apply(&uv).unwrap(), expected);
    }

    #[test]
    fn commutator_examples() {
        let a = mat(vec![vec![1, 2, 0], vec![0, 1, 5], vec![2, 2, 2]]);
        assert!(a.commutator(&a).unwrap().is_zero_within(0.0));
        assert!(Matrix::identity(3).commutator(&a).unwrap().is_zero_within(0.0));
        let x = unit(3, 0, 1).try_sub(&unit(3, 1, 0)).unwrap();
        let y = unit(3, 1, 2).try_sub(&unit(3, 2, 1)).unwrap();
        let z = unit(3, 0, 2).try_sub(&unit(3, 2, 0)).unwrap();
        assert_eq!(x.commutator(&y).unwrap(), z);
        assert!(x.commutator(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn nullspace_examples() {
        let z: Matrix<Rational> = Matrix::zeros(3, 3);
        assert_eq!(nullspace(&z, 0.0).dimension, 3);
        let inv = mat(vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(nullspace(&inv, 0.0).dimension, 0);
        let row = mat(vec![vec![1, -1]]);
        let ns = nullspace(&row, 0.0);
        assert_eq!(ns.dimension, 1);
        assert_eq!(ns.basis, vec![vec![q(1), q(1)]]);
    }

    #[test]
    fn approx_nullspace_examples() {
        let row = mat(vec![vec![1, -1]]).to_complex();
        let ns = nullspace(&row, 1e-9);
        assert_eq!(ns.dimension, 1);
        let v = &ns.basis[0];
        assert!((v[0] - v[1]).norm() < 1e-12);
        let z: Matrix<Complex64> = Matrix::zeros(4, 4);
        assert_eq!(nullspace(&z, 1e-9).dimension, 4);
    }

    #[test]
    fn span_dimension_examples() {
        let i: Matrix<Rational> = Matrix::identity(3);
        assert_eq!(span_dimension(&[i.clone(), i.scale(&q(2))], 0.0).unwrap(), 1);
        let units: Vec<_> = (0..2).flat_map(|i| (0..2).map(move |j| unit(2, i, j))).collect();
        assert_eq!(span_dimension(&units, 0.0).unwrap(), 4);
        let c: Vec<_> = units.iter().map(Matrix::to_complex).collect();
        assert_eq!(span_dimension(&c, 1e-9).unwrap(), 4);
        assert!(span_dimension(&[i, Matrix::identity(2)], 0.0).is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = mat(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(a.determinant().unwrap(), q(4));
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(inv.mul(&a), Matrix::identity(3));
        assert!(mat(vec![vec![1, 2], vec![2, 4]]).inverse(0.0).is_none());
    }

    #[test]
    fn json_shape() {
        let a = mat(vec![vec![1, 2]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":["1/1","2/1"]}"#);
        let back: Matrix<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
