//! Exact linear algebra over ℚ, prime fields F_p, and quadratic extensions
//! F_{p²}: the computational substrate for every colimit, rank, and homology
//! decision in the crate.
//!
//! All elimination is deterministic: the pivot is always the first nonzero
//! entry in column order, and quotient complements are the standard
//! coordinates outside the pivot set, so bases are reproducible across runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0:?} vs {1:?}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The exact base field of a computation.
///
/// `Fp2` is the quadratic extension F_p[x]/(x² − c) for a quadratic
/// nonresidue c; it exists to give the scalar-extension adjunction in
/// `basechange` genuine content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Fp(u64),
    Fp2 { p: u64, nonresidue: u64 },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<FieldSpec, LinAlgError> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(LinAlgError::NotPrime(p));
        }
        Ok(FieldSpec::Fp(p))
    }

    /// The quadratic extension of F_p, for odd p.  The nonresidue is chosen
    /// as the smallest one, so the field is determined by p.
    pub fn prime_square(p: u64) -> Result<FieldSpec, LinAlgError> {
        if !is_prime(p) || p == 2 || p >= (1 << 31) {
            return Err(LinAlgError::NotPrime(p));
        }
        let nonresidue = (2..p)
            .find(|&c| !(1..p).any(|x| x * x % p == c))
            .expect("odd prime fields have quadratic nonresidues");
        Ok(FieldSpec::Fp2 { p, nonresidue })
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::Fp(_) => Scalar::Mod(0),
            FieldSpec::Fp2 { .. } => Scalar::Ext(0, 0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::one()),
            FieldSpec::Fp(_) => Scalar::Mod(1),
            FieldSpec::Fp2 { .. } => Scalar::Ext(1, 0),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Fp(p) | FieldSpec::Fp2 { p, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                match self {
                    FieldSpec::Fp(_) => Scalar::Mod(r),
                    _ => Scalar::Ext(r, 0),
                }
            }
        }
    }

    fn modulus(&self) -> u64 {
        match self {
            FieldSpec::Rationals => panic!("rationals have no modulus"),
            FieldSpec::Fp(p) | FieldSpec::Fp2 { p, .. } => *p,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % self.modulus()),
            (Scalar::Ext(x0, x1), Scalar::Ext(y0, y1)) => {
                let p = self.modulus();
                Scalar::Ext((x0 + y0) % p, (x1 + y1) % p)
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Rat(x) => Scalar::Rat(-x),
            Scalar::Mod(x) => {
                let p = self.modulus();
                Scalar::Mod((p - x % p) % p)
            }
            Scalar::Ext(x0, x1) => {
                let p = self.modulus();
                Scalar::Ext((p - x0 % p) % p, (p - x1 % p) % p)
            }
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(x * y % self.modulus()),
            (Scalar::Ext(x0, x1), Scalar::Ext(y0, y1)) => {
                let (p, c) = match self {
                    FieldSpec::Fp2 { p, nonresidue } => (*p, *nonresidue),
                    _ => panic!("scalar kind mismatch"),
                };
                // (x0 + x1 α)(y0 + y1 α) with α² = c
                let a0 = (x0 * y0 + x1 * y1 % p * c) % p;
                let a1 = (x0 * y1 + x1 * y0) % p;
                Scalar::Ext(a0, a1)
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Scalar {
        assert!(!a.is_zero(), "division by zero");
        match a {
            Scalar::Rat(x) => Scalar::Rat(x.recip()),
            Scalar::Mod(x) => Scalar::Mod(mod_inv(*x, self.modulus())),
            Scalar::Ext(x0, x1) => {
                let (p, c) = match self {
                    FieldSpec::Fp2 { p, nonresidue } => (*p, *nonresidue),
                    _ => panic!("scalar kind mismatch"),
                };
                // 1/(x0 + x1 α) = (x0 − x1 α)/(x0² − c x1²); the norm is
                // nonzero because c is a nonresidue.
                let norm = ((x0 * x0 % p) + p - (c * (x1 * x1 % p) % p)) % p;
                let ninv = mod_inv(norm, p);
                Scalar::Ext(x0 * ninv % p, (p - x1 % p) * ninv % p)
            }
        }
    }

    /// Frobenius x ↦ x^p: the identity on F_p, conjugation on F_{p²}.
    pub fn frobenius(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Fp2 { p, .. }, Scalar::Ext(x0, x1)) => {
                Scalar::Ext(*x0, (*p - *x1 % *p) % *p)
            }
            _ => a.clone(),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, LinAlgError> {
        let bad = || LinAlgError::Parse(s.to_string());
        match self {
            FieldSpec::Rationals => {
                let mut it = s.splitn(2, '/');
                let num: BigInt = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let den: BigInt = match it.next() {
                    Some(d) => d.parse().map_err(|_| bad())?,
                    None => BigInt::one(),
                };
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Rat(BigRational::new(num, den)))
            }
            FieldSpec::Fp(_) => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Ok(self.from_i64(n))
            }
            FieldSpec::Fp2 { .. } => {
                let mut it = s.splitn(2, '+');
                let a: i64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let b: i64 = match it.next() {
                    Some(t) => t
                        .strip_suffix('a')
                        .ok_or_else(bad)?
                        .parse()
                        .map_err(|_| bad())?,
                    None => 0,
                };
                let p = self.modulus() as i64;
                Ok(Scalar::Ext(
                    a.rem_euclid(p) as u64,
                    b.rem_euclid(p) as u64,
                ))
            }
        }
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat: a^(p−2) mod p.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// One field element.  The variant must match the matrix's `FieldSpec`; all
/// arithmetic goes through `FieldSpec` so reduction is never forgotten.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(u64),
    Ext(u64, u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Mod(x) => *x == 0,
            Scalar::Ext(a, b) => *a == 0 && *b == 0,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Mod(x) => x.to_string(),
            Scalar::Ext(a, b) => {
                if *b == 0 {
                    a.to_string()
                } else {
                    format!("{a}+{b}a")
                }
            }
        }
    }
}

/// A dense row-major matrix over an exact field.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Matrix {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Matrix {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            field,
            entries,
        }
    }

    pub fn from_i64_rows(field: FieldSpec, data: &[&[i64]]) -> Matrix {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        Matrix::from_fn(rows, cols, field, |i, j| field.from_i64(data[i][j]))
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        assert_eq!(self.field, other.field, "matmul field mismatch");
        let f = self.field;
        Matrix::from_fn(self.rows, other.cols, f, |i, j| {
            let mut acc = f.zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = f.add(&acc, &f.mul(a, other.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.add(self.get(i, j), other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.sub(self.get(i, j), other.get(i, j))
        })
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.mul(s, self.get(i, j))
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.neg(self.get(i, j))
        })
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, self.field, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        Matrix::from_fn(self.rows + other.rows, self.cols, self.field, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(blocks: &[&Matrix], field: FieldSpec) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zero(rows, cols, field);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Kronecker product: (A⊗B)[(i·Br + k), (j·Bc + l)] = A[i,j]·B[k,l].
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        Matrix::from_fn(
            self.rows * other.rows,
            self.cols * other.cols,
            f,
            |i, j| {
                let (ia, ib) = (i / other.rows, i % other.rows);
                let (ja, jb) = (j / other.cols, j % other.cols);
                f.mul(self.get(ia, ja), other.get(ib, jb))
            },
        )
    }

    pub fn column(&self, j: usize) -> Matrix {
        Matrix::from_fn(self.rows, 1, self.field, |i, _| self.get(i, j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), self.field, |i, j| {
            self.get(i, idx[j]).clone()
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), self.cols, self.field, |i, j| {
            self.get(idx[i], j).clone()
        })
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    /// Pivot choice is the first nonzero entry scanning rows top-down in each
    /// column left-to-right, so the result is deterministic.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if piv != row {
                for j in 0..m.cols {
                    let a = m.get(row, j).clone();
                    let b = m.get(piv, j).clone();
                    m.set(row, j, b);
                    m.set(piv, j, a);
                }
            }
            let inv = f.inv(m.get(row, col));
            for j in col..m.cols {
                let v = f.mul(&inv, m.get(row, j));
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    for j in col..m.cols {
                        let v = f.sub(m.get(r, j), &f.mul(&factor, m.get(row, j)));
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the (right) nullspace, as columns.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = self.field;
        let mut basis = Matrix::zero(self.cols, free.len(), f);
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, f.one());
            for (prow, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(r.get(prow, fc)));
            }
        }
        basis
    }

    /// Solve self · x = b for each column of b.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Solution>, LinAlgError> {
        if b.rows != self.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "solve: {} rows vs rhs {} rows",
                self.rows, b.rows
            )));
        }
        if self.field != b.field {
            return Err(LinAlgError::FieldMismatch(self.field, b.field));
        }
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        // Inconsistent iff a pivot lands in the rhs block.
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let f = self.field;
        let mut particular = Matrix::zero(self.cols, b.cols, f);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                particular.set(pc, j, r.get(prow, self.cols + j).clone());
            }
        }
        Ok(Some(Solution {
            particular,
            nullspace: self.nullspace(),
        }))
    }

    /// Basis of the column space, as the pivot columns of self.
    pub fn column_space_basis(&self) -> Matrix {
        let (_, pivots) = self.transpose().rref();
        // pivots of the transpose's rref are row indices; simpler: use rref of
        // self and take pivot columns of the original.
        let _ = pivots;
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    pub fn render_entries(&self) -> Vec<String> {
        self.entries.iter().map(Scalar::render).collect()
    }

    pub fn from_rendered(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        data: &[String],
    ) -> Result<Matrix, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let mut entries = Vec::with_capacity(data.len());
        for s in data {
            entries.push(field.parse(s)?);
        }
        Ok(Matrix {
            rows,
            cols,
            field,
            entries,
        })
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).render()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of a successful linear solve: one particular solution per rhs
/// column and a basis of the homogeneous solutions.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: Matrix,
    pub nullspace: Matrix,
}

/// A chosen presentation of ambient/im(sub): `projection` maps ambient
/// coordinates onto the quotient, `complement` lists the standard coordinates
/// retained as the quotient basis, and `section` re-embeds them.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub projection: Matrix,
    pub complement: Vec<usize>,
    pub section: Matrix,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }
}

/// Quotient of the standard ambient space by the column span of `sub`.
///
/// The complement basis is the set of standard coordinates outside the pivot
/// set of the column-reduced span, which makes the choice deterministic.
pub fn quotient_basis(sub: &Matrix, ambient_dim: usize) -> Quotient {
    assert_eq!(sub.rows, ambient_dim, "subspace lives in the wrong ambient");
    let f = sub.field;
    // Row-reduce the transpose: rows of the rref are an echelon basis of the
    // span, with pivot coordinates leading.
    let (r, pivots) = sub.transpose().rref();
    let complement: Vec<usize> = (0..ambient_dim).filter(|c| !pivots.contains(c)).collect();
    let mut projection = Matrix::zero(complement.len(), ambient_dim, f);
    for (qi, &c) in complement.iter().enumerate() {
        projection.set(qi, c, f.one());
    }
    // A pivot coordinate e_j is congruent to e_j − (echelon row with leading
    // entry j), whose support is in the complement.
    for (prow, &pc) in pivots.iter().enumerate() {
        for (qi, &c) in complement.iter().enumerate() {
            projection.set(qi, pc, f.neg(r.get(prow, c)));
        }
    }
    let mut section = Matrix::zero(ambient_dim, complement.len(), f);
    for (qi, &c) in complement.iter().enumerate() {
        section.set(c, qi, f.one());
    }
    Quotient {
        projection,
        complement,
        section,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn rank_identity() {
        assert_eq!(Matrix::identity(2, q()).rank(), 2);
    }

    #[test]
    fn rank_zero() {
        assert_eq!(Matrix::zero(3, 4, q()).rank(), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.rank(), m.transpose().rank());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_identity() {
        let m = Matrix::identity(3, q());
        let b = Matrix::from_i64_rows(q(), &[&[5], &[-1], &[7]]);
        let s = m.solve(&b).unwrap().unwrap();
        assert_eq!(s.particular, b);
        assert_eq!(s.nullspace.cols, 0);
    }

    #[test]
    fn solve_zero_system() {
        let m = Matrix::zero(2, 2, q());
        let b = Matrix::zero(2, 1, q());
        let s = m.solve(&b).unwrap().unwrap();
        assert!(s.particular.is_zero());
        assert_eq!(s.nullspace.cols, 2);
    }

    #[test]
    fn solve_underdetermined() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 1]]);
        let b = Matrix::from_i64_rows(q(), &[&[2]]);
        let s = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.matmul(&s.particular), b);
        assert_eq!(s.nullspace.cols, 1);
    }

    #[test]
    fn solve_inconsistent() {
        let m = Matrix::from_i64_rows(q(), &[&[1], &[0]]);
        let b = Matrix::from_i64_rows(q(), &[&[0], &[1]]);
        assert!(m.solve(&b).unwrap().is_none());
    }

    #[test]
    fn quotient_full_span() {
        let sub = Matrix::identity(3, q());
        assert_eq!(quotient_basis(&sub, 3).dim(), 0);
    }

    #[test]
    fn quotient_by_zero() {
        let sub = Matrix::zero(3, 0, q());
        let quo = quotient_basis(&sub, 3);
        assert_eq!(quo.dim(), 3);
        assert_eq!(quo.projection, Matrix::identity(3, q()));
    }

    #[test]
    fn quotient_codim_one() {
        let sub = Matrix::from_i64_rows(q(), &[&[1, 0], &[0, 1], &[0, 0]]);
        let quo = quotient_basis(&sub, 3);
        assert_eq!(quo.dim(), 1);
        assert!(quo.projection.matmul(&sub).is_zero());
    }

    #[test]
    fn quotient_dim_plus_rank() {
        let sub = Matrix::from_i64_rows(q(), &[&[1, 2], &[2, 4], &[3, 6], &[0, 1]]);
        let quo = quotient_basis(&sub, 4);
        assert_eq!(quo.dim() + sub.rank(), 4);
        assert!(quo.projection.matmul(&sub).is_zero());
        assert_eq!(quo.projection.rank(), quo.dim());
        // projection ∘ section = identity on the quotient
        assert_eq!(
            quo.projection.matmul(&quo.section),
            Matrix::identity(quo.dim(), q())
        );
    }

    #[test]
    fn fp_fermat() {
        let f = FieldSpec::prime(7).unwrap();
        for a in 0..7i64 {
            let mut acc = f.one();
            let x = f.from_i64(a);
            for _ in 0..7 {
                acc = f.mul(&acc, &x);
            }
            assert_eq!(acc, x);
        }
    }

    #[test]
    fn fp2_is_a_field() {
        let f = FieldSpec::prime_square(3).unwrap();
        // all 8 nonzero elements invert
        for a in 0..3u64 {
            for b in 0..3u64 {
                let x = Scalar::Ext(a, b);
                if x.is_zero() {
                    continue;
                }
                let inv = f.inv(&x);
                assert_eq!(f.mul(&x, &inv), f.one());
            }
        }
        // Frobenius is a ring hom of order 2
        let x = Scalar::Ext(1, 2);
        assert_eq!(f.frobenius(&f.frobenius(&x)), x);
    }

    #[test]
    fn rank_over_fp() {
        let f = FieldSpec::prime(5).unwrap();
        let m = Matrix::from_i64_rows(f, &[&[1, 2], &[3, 7]]);
        assert_eq!(m.rank(), 2);
        // rows dependent mod 5 but not over the integers
        let m2 = Matrix::from_i64_rows(f, &[&[1, 2], &[6, 12]]);
        assert_eq!(m2.rank(), 1);
    }

    #[test]
    fn render_parse_roundtrip() {
        let m = Matrix::from_fn(2, 2, q(), |i, j| {
            Scalar::Rat(BigRational::new(BigInt::from(i as i64 + 1), BigInt::from(j as i64 + 2)))
        });
        let rendered = m.render_entries();
        let back = Matrix::from_rendered(2, 2, q(), &rendered).unwrap();
        assert_eq!(m, back);
    }
}
