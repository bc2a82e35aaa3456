//! Residues modulo `n` and small dense matrices over `𝔽_p`.
//!
//! [`ZModScalar`] works for any modulus. Matrices carry a [`Prime`] modulus so that
//! determinant and inverse can run Gaussian elimination over a field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Largest accepted prime; keeps every product of two residues inside `u64`.
    pub const MAX: u64 = (1 << 31) - 1;

    pub fn new(p: u64) -> Result<Self> {
        if p > Self::MAX || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduce an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
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

/// An element of `ℤ_n`, stored as the canonical residue in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZModScalar {
    value: u64,
    modulus: u64,
}

impl ZModScalar {
    pub fn new(value: i64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        ZModScalar {
            value: value.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Self::new(1, modulus)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Representative in `(-n/2, n/2]`, handy for printing signs.
    pub fn signed(self) -> i64 {
        let v = self.value as i64;
        let n = self.modulus as i64;
        if 2 * v > n {
            v - n
        } else {
            v
        }
    }

    fn check(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    /// Multiplicative inverse; exists iff `gcd(value, n) = 1`.
    pub fn inverse(self) -> Result<Self> {
        let (g, x) = ext_gcd(self.value as i64, self.modulus as i64);
        if g != 1 || self.modulus == 1 {
            return Err(Error::NotInvertible);
        }
        Ok(Self::new(x, self.modulus))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

/// Returns `(g, x)` with `a·x ≡ g (mod b)`, `g = gcd(a, b)`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r, old_s)
}

impl Add for ZModScalar {
    type Output = ZModScalar;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        ZModScalar {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Sub for ZModScalar {
    type Output = ZModScalar;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ZModScalar {
    type Output = ZModScalar;
    fn neg(self) -> Self {
        ZModScalar {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for ZModScalar {
    type Output = ZModScalar;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        ZModScalar {
            value: ((self.value as u128 * rhs.value as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for ZModScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense row-major matrix over `𝔽_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZModMatrix {
    modulus: Prime,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ZModMatrix {
    /// Build from arbitrary integers, reducing each mod `p`.
    pub fn new(p: Prime, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ZModMatrix {
            modulus: p,
            rows,
            cols,
            entries: entries.iter().map(|&x| p.reduce(x)).collect(),
        })
    }

    /// Convenience constructor from fixed-size rows.
    pub fn from_rows<const C: usize>(p: Prime, rows: &[[i64; C]]) -> Self {
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(p, rows.len(), C, &flat).expect("row lengths are fixed by the type")
    }

    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        ZModMatrix {
            modulus: p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % p.get();
        }
        m
    }

    pub fn diagonal(p: Prime, diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(p, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = p.reduce(d);
        }
        m
    }

    #[inline]
    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major residues.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn scalar(&self, r: usize, c: usize) -> ZModScalar {
        ZModScalar::new(self.get(r, c) as i64, self.modulus.get())
    }

    pub fn set(&mut self, r: usize, c: usize, value: i64) {
        self.entries[r * self.cols + c] = self.modulus.reduce(value);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.modulus, self.rows)
    }

    fn p(&self) -> u64 {
        self.modulus.get()
    }

    fn check_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.p(), other.p()));
        }
        Ok(())
    }

    /// Matrix product with entries reduced mod `p`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p();
        let mut out = Self::zeros(self.modulus, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: u64 = 0;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) * other.get(k, j)) % p;
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("addition of different shapes".into()));
        }
        let p = self.p();
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = (*a + b) % p;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let p = self.p();
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = (p - *a) % p;
        }
        out
    }

    pub fn scale(&self, s: i64) -> Self {
        let p = self.p();
        let s = self.modulus.reduce(s);
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = (*a * s) % p;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.modulus, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// The `h×w` sub-matrix with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        assert!(r0 + h <= self.rows && c0 + w <= self.cols, "block out of range");
        let mut out = Self::zeros(self.modulus, h, w);
        for r in 0..h {
            for c in 0..w {
                out.entries[r * w + c] = self.get(r0 + r, c0 + c);
            }
        }
        out
    }

    /// Assemble `(a b; c d)` from four equally sized square blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let k = a.rows;
        for m in [a, b, c, d] {
            assert_eq!((m.rows, m.cols), (k, k), "blocks must share a square shape");
            assert_eq!(m.modulus, a.modulus, "blocks must share a modulus");
        }
        let mut out = Self::zeros(a.modulus, 2 * k, 2 * k);
        for (blk, (r0, c0)) in [(a, (0, 0)), (b, (0, k)), (c, (k, 0)), (d, (k, k))] {
            for r in 0..k {
                for col in 0..k {
                    out.entries[(r0 + r) * 2 * k + c0 + col] = blk.get(r, col);
                }
            }
        }
        out
    }

    /// Block-diagonal `a ⊕ b`.
    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let z = Self::zeros(a.modulus, a.rows, a.cols);
        Self::from_blocks(a, &z, &z, b)
    }

    /// Forward elimination over `𝔽_p`, returning the row-echelon form, the sign-adjusted
    /// product of pivots, and the rank.
    fn echelon(&self) -> (Vec<u64>, u64, usize) {
        let p = self.p();
        let n = self.cols;
        let mut m = self.entries.clone();
        let mut det = 1 % p;
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..self.rows).find(|&r| m[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for c in 0..n {
                    m.swap(piv * n + c, rank * n + c);
                }
                det = (p - det) % p;
            }
            let pv = m[rank * n + col];
            det = det * pv % p;
            let inv = inv_mod(pv, p);
            for r in rank + 1..self.rows {
                let f = m[r * n + col] * inv % p;
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    let sub = f * m[rank * n + c] % p;
                    m[r * n + c] = (m[r * n + c] + p - sub) % p;
                }
            }
            rank += 1;
        }
        (m, det, rank)
    }

    pub fn det(&self) -> Result<ZModScalar> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let (_, det, _) = self.echelon();
        Ok(ZModScalar::new(det as i64, self.p()))
    }

    pub fn rank(&self) -> usize {
        self.echelon().2
    }

    /// Gauss–Jordan inverse over `𝔽_p` with first-nonzero pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let p = self.p();
        let n = self.rows;
        let w = 2 * n;
        let mut m = vec![0u64; n * w];
        for r in 0..n {
            for c in 0..n {
                m[r * w + c] = self.get(r, c);
            }
            m[r * w + n + r] = 1 % p;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * w + col] != 0).ok_or(Error::NotInvertible)?;
            if piv != col {
                for c in 0..w {
                    m.swap(piv * w + c, col * w + c);
                }
            }
            let inv = inv_mod(m[col * w + col], p);
            for c in 0..w {
                m[col * w + c] = m[col * w + c] * inv % p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m[r * w + col];
                if f == 0 {
                    continue;
                }
                for c in 0..w {
                    let sub = f * m[col * w + c] % p;
                    m[r * w + c] = (m[r * w + c] + p - sub) % p;
                }
            }
        }
        let mut out = Self::zeros(self.modulus, n, n);
        for r in 0..n {
            out.entries[r * n..(r + 1) * n].copy_from_slice(&m[r * w + n..(r + 1) * w]);
        }
        Ok(out)
    }

    /// `self^e` by repeated squaring; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::identity(self.modulus, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "vector length");
        let p = self.p();
        (0..self.rows)
            .map(|r| (0..self.cols).fold(0, |acc, c| (acc + self.get(r, c) * (v[c] % p)) % p))
            .collect()
    }

    /// Parse the text format: a `p <prime>` line followed by rows of integers.
    ///
    /// Blank lines and `#` comments are skipped; entries are reduced mod `p`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let mut it = header.split_whitespace();
        if it.next() != Some("p") {
            return Err(Error::Parse(format!("expected `p <prime>` header, got `{header}`")));
        }
        let p: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in header `{header}`")));
        }
        let p = Prime::new(p)?;
        let mut rows = 0;
        let mut cols = None;
        let mut entries = Vec::new();
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::Parse(format!(
                        "row {} has {} entries, expected {c}",
                        rows + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            entries.extend(row);
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::Parse("matrix has no rows".into()))?;
        Self::new(p, rows, cols, &entries)
    }

    /// Canonical text form; `parse(to_text(m)) == m` and the text is stable.
    pub fn to_text(&self) -> String {
        let mut s = format!("p {}\n", self.modulus);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl Mul for &ZModMatrix {
    type Output = ZModMatrix;

    /// Panics on shape or modulus mismatch; use [`ZModMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ZModMatrix) -> ZModMatrix {
        self.matmul(rhs).expect("matrix product shapes")
    }
}

impl fmt::Display for ZModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:>width$}", self.get(r, c))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (_, x) = ext_gcd(a as i64, p as i64);
    x.rem_euclid(p as i64) as u64
}
