//! Exact integer and rational linear algebra over lattices.
//!
//! Matrices are row-major with arbitrary-precision entries. Sublattices of
//! `Z^n` are spanned by rows, and every normal form here is row-style.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("sublattice is not saturated (torsion {torsion:?})")]
    NotSaturated { torsion: Vec<BigInt> },
}

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, ExactError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(ExactError::Ragged {
                    row: i,
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: r,
            cols,
            data,
        })
    }

    /// Convenience constructor for small literal matrices.
    ///
    /// Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let big = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(big, cols).expect("ragged literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>, ExactError> {
        if v.len() != self.rows {
            return Err(ExactError::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * &self[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Keeps the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        IntMatrix::from_rows(rows, self.cols).expect("rows share a width")
    }

    pub fn stack(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.cols != other.cols {
            return Err(ExactError::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, p*a + q*b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for j in 0..self.cols {
            let x = self.data[a * self.cols + j].clone();
            let y = self.data[b * self.cols + j].clone();
            self.data[a * self.cols + j] = s * &x + t * &y;
            self.data[b * self.cols + j] = p * &x + q * &y;
        }
    }

    /// Replaces columns (a, b) by (s*a + t*b, p*a + q*b).
    fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for i in 0..self.rows {
            let x = self.data[i * self.cols + a].clone();
            let y = self.data[i * self.cols + b].clone();
            self.data[i * self.cols + a] = s * &x + t * &y;
            self.data[i * self.cols + b] = p * &x + q * &y;
        }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    /// Drops every all-zero row.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| !self.is_zero_row(i)).collect();
        self.select_rows(&keep)
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hnf(self);
        (0..h.rows).filter(|&i| !h.is_zero_row(i)).count()
    }

    /// Determinant of a square matrix by fraction-free elimination.
    pub fn det(&self) -> Result<BigInt, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Extended gcd with `g >= 0` and `s*a + t*b = g`.
fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Row Hermite normal form: returns `(h, u)` with `u` unimodular and `u * m = h`.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero rows
/// trail.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for j in 0..m.cols {
        if r == m.rows {
            break;
        }
        for i in r + 1..m.rows {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(r, j)].clone();
            let b = h[(i, j)].clone();
            let (g, s, t) = egcd(&a, &b);
            let p = -(&b / &g);
            let q = &a / &g;
            h.combine_rows(r, i, &s, &t, &p, &q);
            u.combine_rows(r, i, &s, &t, &p, &q);
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let piv = h[(r, j)].clone();
        for k in 0..r {
            let q = h[(k, j)].div_floor(&piv);
            if !q.is_zero() {
                let nq = -q;
                h.add_row(k, r, &nq);
                u.add_row(k, r, &nq);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Smith form data of a matrix: `u * m * v = diag(diagonal)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionProfile {
    /// Diagonal entries larger than one, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    /// All nonzero diagonal entries (leading ones included).
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl TorsionProfile {
    /// Order of the torsion group, the product of the invariant factors.
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

/// Unimodular `[[s, t], [p, q]]` sending `(a, b)` to `(gcd, 0)`; plain
/// elimination when `a` divides `b`.
fn reducer(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if b.is_multiple_of(a) {
        return (BigInt::one(), BigInt::zero(), -(b / a), BigInt::one());
    }
    let (g, s, t) = egcd(a, b);
    (s, t, -(b / &g), a / &g)
}

/// Smith normal form with both transforms and the inverse of the right one.
pub fn snf(m: &IntMatrix) -> TorsionProfile {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut vi = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap_rows(t, bi);
        u.swap_rows(t, bi);
        d.swap_cols(t, bj);
        v.swap_cols(t, bj);
        vi.swap_rows(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (s, tt, p, q) = reducer(&d[(t, t)], &d[(i, t)]);
                d.combine_rows(t, i, &s, &tt, &p, &q);
                u.combine_rows(t, i, &s, &tt, &p, &q);
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (s, tt, p, q) = reducer(&d[(t, t)], &d[(t, j)]);
                d.combine_cols(t, j, &s, &tt, &p, &q);
                v.combine_cols(t, j, &s, &tt, &p, &q);
                // inverse of [[s, p], [tt, q]] acting on rows of vi
                let (is, it, ip, iq) = (q.clone(), -p.clone(), -tt.clone(), s.clone());
                vi.combine_rows(t, j, &is, &it, &ip, &iq);
                dirty = true;
            }
            if dirty && (t + 1..rows).any(|i| !d[(i, t)].is_zero()) {
                continue;
            }
            // divisibility: fold an offending row into row t and redo
            let piv = d[(t, t)].clone();
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let diagonal: Vec<BigInt> = (0..rows.min(cols))
        .map(|i| d[(i, i)].clone())
        .filter(|x| !x.is_zero())
        .collect();
    let invariant_factors = diagonal.iter().filter(|x| !x.is_one()).cloned().collect();
    TorsionProfile {
        invariant_factors,
        rank: diagonal.len(),
        diagonal,
        u,
        v,
        v_inv: vi,
    }
}

/// A sublattice of `Z^n` stored by its canonical row HNF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeBasis {
    pub ambient_dim: usize,
    pub basis: IntMatrix,
}

impl LatticeBasis {
    /// Lattice spanned by the rows of `m`; no saturation.
    pub fn span(m: &IntMatrix) -> Self {
        let (h, _) = hnf(m);
        LatticeBasis {
            ambient_dim: m.cols,
            basis: h.nonzero_rows(),
        }
    }

    pub fn zero(n: usize) -> Self {
        LatticeBasis {
            ambient_dim: n,
            basis: IntMatrix::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Self {
        LatticeBasis {
            ambient_dim: n,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        matches!(member(v, self), Ok(Some(_)))
    }

    /// Coordinates of each row of `self` in the basis of `other`, if contained.
    pub fn coords_in(&self, other: &LatticeBasis) -> Option<IntMatrix> {
        let mut rows = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            rows.push(member(self.basis.row(i), other).ok()??);
        }
        IntMatrix::from_rows(rows, other.rank()).ok()
    }

    pub fn is_sublattice_of(&self, other: &LatticeBasis) -> bool {
        self.rank() <= other.rank() && (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }
}

/// Smallest direct summand containing the row span, with the torsion of
/// `sat / rowspan`.
pub fn saturate(rows: &IntMatrix) -> (LatticeBasis, TorsionProfile) {
    let t = snf(rows);
    let keep: Vec<usize> = (0..t.rank).collect();
    let sat = LatticeBasis::span(&t.v_inv.select_rows(&keep));
    (sat, t)
}

/// Integer coordinates of `v` in the basis of `b`, or `None` when `v` lies
/// outside the lattice.
pub fn member(v: &[BigInt], b: &LatticeBasis) -> Result<Option<Vec<BigInt>>, ExactError> {
    if v.len() != b.ambient_dim {
        return Err(ExactError::DimensionMismatch {
            expected: b.ambient_dim,
            got: v.len(),
        });
    }
    let mut res = v.to_vec();
    let mut coords = Vec::with_capacity(b.rank());
    for i in 0..b.rank() {
        let row = b.basis.row(i);
        let p = row
            .iter()
            .position(|x| !x.is_zero())
            .expect("basis rows are nonzero");
        if res[..p].iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        let (q, r) = res[p].div_rem(&row[p]);
        if !r.is_zero() {
            return Ok(None);
        }
        for (x, y) in res.iter_mut().zip(row) {
            *x -= &q * y;
        }
        coords.push(q);
    }
    if res.iter().all(Zero::is_zero) {
        Ok(Some(coords))
    } else {
        Ok(None)
    }
}

/// Unimodular `n x n` matrix whose leading rows are the basis of `b`.
pub fn complete_unimodular(b: &LatticeBasis) -> Result<IntMatrix, ExactError> {
    let n = b.ambient_dim;
    let t = snf(&b.basis);
    if !t.invariant_factors.is_empty() {
        return Err(ExactError::NotSaturated {
            torsion: t.invariant_factors,
        });
    }
    let rest: Vec<usize> = (t.rank..n).collect();
    let (comp, _) = hnf(&t.v_inv.select_rows(&rest));
    let mut out = b.basis.stack(&comp)?;
    // reduce complement rows modulo the pivots of b
    for i in 0..comp.rows {
        for k in 0..b.rank() {
            let row = b.basis.row(k);
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let q = out[(b.rank() + i, p)].div_floor(&row[p]);
            if !q.is_zero() {
                out.add_row(b.rank() + i, k, &-q);
            }
        }
    }
    Ok(out)
}

/// Exact inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix, ExactError> {
    let n = m.rows;
    if m.cols != n {
        return Err(ExactError::DimensionMismatch {
            expected: n,
            got: m.cols,
        });
    }
    let (h, u) = hnf(m);
    if h != IntMatrix::identity(n) {
        return Err(ExactError::NotSaturated {
            torsion: vec![h.det().unwrap_or_default().abs()],
        });
    }
    Ok(u)
}

/// Reduced row echelon form over the rationals, zero rows removed.
pub fn rref(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][j].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][j].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][j].is_zero() {
                let f = m[i][j].clone();
                for k in 0..cols {
                    let s = &f * &m[r][k];
                    m[i][k] -= s;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Reduces a rational into `[0, 1)`.
pub fn frac_mod1(q: &BigRational) -> BigRational {
    q - q.floor()
}
