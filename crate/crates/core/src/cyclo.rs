//! Exact arithmetic in the cyclotomic field `ℚ(ω_m)` and dense square matrices over it.
//!
//! An element is a vector of `φ(m)` rationals, the coefficients of its canonical
//! representative modulo the cyclotomic polynomial `Φ_m` in the power basis
//! `1, ω, …, ω^{φ(m)-1}`. Every ring operation reduces eagerly, so structural
//! equality is field equality.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::zmod::{inv_mod, is_prime};

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u32, Rc<[i64]>>> = RefCell::new(HashMap::new());
}

/// Coefficients of `Φ_m`, lowest degree first (monic, length `φ(m) + 1`).
pub fn cyclotomic_polynomial(m: u32) -> Rc<[i64]> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(hit) = PHI_CACHE.with(|c| c.borrow().get(&m).cloned()) {
        return hit;
    }
    // Φ_m = (x^m - 1) / ∏_{d | m, d < m} Φ_d
    let mut poly = vec![0i64; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        poly = div_monic(&poly, &cyclotomic_polynomial(d));
    }
    let phi: Rc<[i64]> = poly.into();
    PHI_CACHE.with(|c| c.borrow_mut().insert(m, phi.clone()));
    phi
}

/// Exact quotient of integer polynomials by a monic divisor.
fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "division is exact");
    q
}

/// Degree of `Φ_m`, i.e. Euler's totient of `m`.
pub fn totient(m: u32) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// An exact element of `ℚ(ω_m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNumber {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero(m: u32) -> Self {
        CycloNumber {
            conductor: m,
            coeffs: vec![BigRational::zero(); totient(m)],
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_int(m: u32, x: i64) -> Self {
        Self::from_rational(m, BigRational::from_integer(x.into()))
    }

    pub fn from_rational(m: u32, x: BigRational) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = x;
        z
    }

    /// `ω_m^k`, the exponent taken mod `m`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        let mut buf = vec![BigRational::zero(); m as usize];
        buf[k.rem_euclid(m as i64) as usize] = BigRational::one();
        Self::reduce(m, buf)
    }

    /// Build from coefficients in the power basis; the input need not be reduced,
    /// any length is accepted.
    pub fn from_coeffs(m: u32, coeffs: Vec<BigRational>) -> Self {
        let mut buf = vec![BigRational::zero(); m as usize];
        for (i, c) in coeffs.into_iter().enumerate() {
            buf[i % m as usize] += c;
        }
        Self::reduce(m, buf)
    }

    /// Reduce a length-`m` vector (a polynomial modulo `x^m - 1`) modulo `Φ_m`.
    fn reduce(m: u32, mut buf: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        for i in (deg..buf.len()).rev() {
            if buf[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut buf[i]);
            for (j, &f) in phi[..deg].iter().enumerate() {
                match f {
                    0 => {}
                    1 => buf[i - deg + j] -= &c,
                    -1 => buf[i - deg + j] += &c,
                    f => buf[i - deg + j] -= &c * BigRational::from_integer(f.into()),
                }
            }
        }
        buf.truncate(deg);
        CycloNumber {
            conductor: m,
            coeffs: buf,
        }
    }

    #[inline]
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    /// Accumulate `a·b` into a length-`m` buffer without reducing.
    fn mul_acc(buf: &mut [BigRational], a: &Self, b: &Self) {
        let m = buf.len();
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % m;
                if x.is_one() {
                    buf[k] += y;
                } else if y.is_one() {
                    buf[k] += x;
                } else {
                    buf[k] += x * y;
                }
            }
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_m`.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.conductor;
        let mut support = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let (k, c) = support.next().ok_or(Error::DivisionByZero)?;
        if support.next().is_none() {
            // c·ω^k has inverse c⁻¹·ω^{-k}
            return Ok(Self::root_of_unity(m, -(k as i64)).scale(&c.recip()));
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(m)
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        let (g, s) = poly_ext_gcd(phi, trim(self.coeffs.clone()));
        // Φ_m is irreducible, so a nonzero element is coprime to it.
        debug_assert_eq!(g.len(), 1, "gcd with Φ_m must be constant");
        let ginv = g[0].recip();
        Ok(Self::from_coeffs(m, s.into_iter().map(|x| x * &ginv).collect()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation `ω ↦ ω⁻¹`.
    pub fn conjugate(&self) -> Self {
        let m = self.conductor as usize;
        let mut buf = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[(m - i) % m] += c;
        }
        Self::reduce(self.conductor, buf)
    }

    /// If `self = ω_m^k` for some `k`, return the smallest such `k`.
    pub fn root_exponent(&self) -> Option<u32> {
        (0..self.conductor).find(|&k| *self == Self::root_of_unity(self.conductor, k as i64))
    }

    /// Coefficients as `num/den` strings joined by commas.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        parts.join(",")
    }

    /// Inverse of [`CycloNumber::to_text`]; a bare integer `a` is read as `a/1`.
    pub fn parse(m: u32, text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|t| parse_rational(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() != totient(m) {
            return Err(Error::Parse(format!(
                "entry `{text}` has {} coefficients, expected {}",
                coeffs.len(),
                totient(m)
            )));
        }
        Ok(Self::from_coeffs(m, coeffs))
    }
}

fn parse_rational(t: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{t}`"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_is_zero(p: &[BigRational]) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Quotient and remainder over `ℚ[x]`; `d` must be trimmed and nonzero.
fn poly_divmod(n: &[BigRational], d: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = n.to_vec();
    let dd = d.len() - 1;
    if rem.len() <= dd {
        return (vec![BigRational::zero()], trim(rem));
    }
    let lead_inv = d[dd].recip();
    let mut q = vec![BigRational::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = &rem[i + dd] * &lead_inv;
        if !c.is_zero() {
            for (j, dj) in d.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
        q[i] = c;
    }
    rem.truncate(dd.max(1));
    (trim(q), trim(rem))
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Returns `(g, s)` with `s·a ≡ g (mod modulus)`, where `g = gcd(modulus, a)`.
fn poly_ext_gcd(modulus: Vec<BigRational>, a: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (modulus, a);
    let (mut s0, mut s1) = (vec![BigRational::zero()], vec![BigRational::one()]);
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
    }
    (r0, s0)
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        assert_eq!(self.conductor, rhs.conductor, "conductor mismatch");
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        assert_eq!(self.conductor, rhs.conductor, "conductor mismatch");
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        assert_eq!(self.conductor, rhs.conductor, "conductor mismatch");
        let mut buf = vec![BigRational::zero(); self.conductor as usize];
        CycloNumber::mul_acc(&mut buf, self, rhs);
        CycloNumber::reduce(self.conductor, buf)
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let term = match (i, abs.is_one()) {
                (0, _) => abs.to_string(),
                (1, true) => "w".to_string(),
                (1, false) => format!("{abs}*w"),
                (_, true) => format!("w^{i}"),
                (_, false) => format!("{abs}*w^{i}"),
            };
            write!(f, "{sign}{term}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A prime `q ≡ 1 (mod m)` below `2³¹` and an element `ζ` of exact order `m` in `F_q`.
fn splitting_prime(m: u32) -> (u64, u64) {
    let m64 = m as u64;
    let q = (1..=(1u64 << 31) / m64)
        .rev()
        .map(|t| 1 + m64 * t)
        .find(|&q| q < (1 << 31) && is_prime(q))
        .expect("Dirichlet: primes ≡ 1 mod m exist below 2^31 for small m");
    let prime_factors: Vec<u64> = (2..=m64).filter(|r| m64.is_multiple_of(*r) && is_prime(*r)).collect();
    let zeta = (2..q)
        .map(|x| pow_mod(x, (q - 1) / m64, q))
        .find(|&y| prime_factors.iter().all(|r| pow_mod(y, m64 / r, q) != 1))
        .expect("F_q* is cyclic of order divisible by m");
    (q, zeta)
}

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

fn reduce_mod_q(x: &CycloNumber, q: u64, zeta: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let mut acc = 0u64;
    let mut power = 1u64;
    for c in &x.coeffs {
        if !c.is_zero() {
            let num = (c.numer() % &qb + &qb) % &qb;
            let den = (c.denom() % &qb + &qb) % &qb;
            let (num, den) = (u64::try_from(num).ok()?, u64::try_from(den).ok()?);
            if den == 0 {
                return None;
            }
            acc = (acc + num * inv_mod(den, q) % q * power) % q;
        }
        power = power * zeta % q;
    }
    Some(acc)
}

/// Dense square matrix over `ℚ(ω_m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloMatrix {
    dim: usize,
    conductor: u32,
    entries: Vec<CycloNumber>,
}

impl CycloMatrix {
    pub fn zeros(dim: usize, m: u32) -> Self {
        CycloMatrix {
            dim,
            conductor: m,
            entries: vec![CycloNumber::zero(m); dim * dim],
        }
    }

    pub fn identity(dim: usize, m: u32) -> Self {
        Self::from_fn(dim, m, |r, c| {
            if r == c {
                CycloNumber::one(m)
            } else {
                CycloNumber::zero(m)
            }
        })
    }

    pub fn from_fn(dim: usize, m: u32, mut f: impl FnMut(usize, usize) -> CycloNumber) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let e = f(r, c);
                assert_eq!(e.conductor, m, "entry conductor");
                entries.push(e);
            }
        }
        CycloMatrix {
            dim,
            conductor: m,
            entries,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &CycloNumber {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: CycloNumber) {
        assert_eq!(value.conductor, self.conductor, "entry conductor");
        self.entries[r * self.dim + c] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycloNumber::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                let e = self.get(r, c);
                if r == c {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    /// Exact product. Zero entries of either factor are skipped and each output entry
    /// is reduced once, so sparse left factors (permutations, diagonals) are cheap.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.dim;
        let m = self.conductor as usize;
        let mut entries = Vec::with_capacity(n * n);
        let mut bufs = vec![vec![BigRational::zero(); m]; n];
        for i in 0..n {
            let mut touched = vec![false; n];
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    CycloNumber::mul_acc(&mut bufs[j], a, b);
                    touched[j] = true;
                }
            }
            for (j, buf) in bufs.iter_mut().enumerate() {
                if touched[j] {
                    let full = std::mem::replace(buf, vec![BigRational::zero(); m]);
                    entries.push(CycloNumber::reduce(self.conductor, full));
                } else {
                    entries.push(CycloNumber::zero(self.conductor));
                }
            }
        }
        Ok(CycloMatrix {
            dim: n,
            conductor: self.conductor,
            entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycloMatrix {
            dim: self.dim,
            conductor: self.conductor,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: &CycloNumber) -> Self {
        assert_eq!(s.conductor, self.conductor, "conductor mismatch");
        CycloMatrix {
            dim: self.dim,
            conductor: self.conductor,
            entries: self
                .entries
                .iter()
                .map(|e| if e.is_zero() { e.clone() } else { e * s })
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycloMatrix {
            dim: self.dim,
            conductor: self.conductor,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, self.conductor, |r, c| self.get(c, r).clone())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.dim, self.conductor, |r, c| self.get(c, r).conjugate())
    }

    /// Kronecker product with the row index `I = i₁·dim(b) + j₁`.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        if a.conductor != b.conductor {
            return Err(Error::ConductorMismatch(a.conductor, b.conductor));
        }
        let nb = b.dim;
        Ok(Self::from_fn(a.dim * nb, a.conductor, |r, c| {
            let x = a.get(r / nb, c / nb);
            let y = b.get(r % nb, c % nb);
            if x.is_zero() || y.is_zero() {
                CycloNumber::zero(a.conductor)
            } else {
                x * y
            }
        }))
    }

    /// Row-reduce `[self | rhs]` in place; returns `None` when singular.
    fn gauss_jordan(&self, mut rhs: Option<&mut Vec<CycloNumber>>) -> Option<()> {
        let n = self.dim;
        let mut a = self.entries.clone();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                if let Some(b) = rhs.as_deref_mut() {
                    for c in 0..n {
                        b.swap(piv * n + c, col * n + c);
                    }
                }
            }
            let inv = a[col * n + col].inverse().ok()?;
            for c in 0..n {
                if !a[col * n + c].is_zero() {
                    a[col * n + c] = &a[col * n + c] * &inv;
                }
            }
            if let Some(b) = rhs.as_deref_mut() {
                for c in 0..n {
                    if !b[col * n + c].is_zero() {
                        b[col * n + c] = &b[col * n + c] * &inv;
                    }
                }
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for c in col..n {
                    if !a[col * n + c].is_zero() {
                        a[r * n + c] = &a[r * n + c] - &(&f * &a[col * n + c]);
                    }
                }
                if let Some(b) = rhs.as_deref_mut() {
                    for c in 0..n {
                        if !b[col * n + c].is_zero() {
                            b[r * n + c] = &b[r * n + c] - &(&f * &b[col * n + c]);
                        }
                    }
                }
            }
        }
        Some(())
    }

    pub fn inverse(&self) -> Result<Self> {
        let mut inv = Self::identity(self.dim, self.conductor).entries;
        self.gauss_jordan(Some(&mut inv)).ok_or(Error::NotInvertible)?;
        Ok(CycloMatrix {
            dim: self.dim,
            conductor: self.conductor,
            entries: inv,
        })
    }

    /// Exact invertibility test. Full rank of the image in `F_q`, for a prime
    /// `q ≡ 1 (mod m)` where `Φ_m` splits, already certifies a nonzero determinant;
    /// otherwise fall back to elimination over `ℚ(ω_m)`.
    pub fn is_invertible(&self) -> bool {
        if self.modular_full_rank() == Some(true) {
            return true;
        }
        self.gauss_jordan(None).is_some()
    }

    /// Rank test of the image under `ω ↦ ζ ∈ F_q`; `None` if some denominator vanishes.
    fn modular_full_rank(&self) -> Option<bool> {
        let (q, zeta) = splitting_prime(self.conductor);
        let n = self.dim;
        let mut a = self
            .entries
            .iter()
            .map(|e| reduce_mod_q(e, q, zeta))
            .collect::<Option<Vec<u64>>>()?;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return Some(false);
            };
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            let inv = inv_mod(a[col * n + col], q);
            for r in col + 1..n {
                let f = a[r * n + col] * inv % q;
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] = (a[r * n + c] + (q - f) * a[col * n + c]) % q;
                }
            }
        }
        Some(true)
    }

    /// One line per row, entries separated by spaces, coefficients by commas.
    pub fn rows_to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).to_text()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl Mul for &CycloMatrix {
    type Output = CycloMatrix;

    /// Panics on conductor or dimension mismatch; see [`CycloMatrix::matmul`].
    fn mul(self, rhs: &CycloMatrix) -> CycloMatrix {
        self.matmul(rhs).expect("cyclotomic matrix product shapes")
    }
}

impl fmt::Debug for CycloMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycloMatrix(dim={}, m={})", self.dim, self.conductor)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A cyclotomic matrix file: `key: value` header lines followed by the rows.
///
/// ```text
/// n: 3
/// m: 3
/// dim: 9
/// 1/1,0/1 0/1,0/1 ...
/// ```
///
/// `n`, `m` and `dim` are required; any other headers are kept in `extra` in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub n: u64,
    pub matrix: CycloMatrix,
    pub extra: Vec<(String, String)>,
}

impl MatrixFile {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "n: {}\nm: {}\ndim: {}\n",
            self.n,
            self.matrix.conductor(),
            self.matrix.dim()
        );
        for (k, v) in &self.extra {
            s.push_str(&format!("{k}: {v}\n"));
        }
        s.push_str(&self.matrix.rows_to_text());
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        let mut dim = None;
        let mut extra = Vec::new();
        let mut rows = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            match line.split_once(':') {
                Some((k, v)) if rows.is_empty() => {
                    let (k, v) = (k.trim(), v.trim());
                    let num = || {
                        v.parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad `{k}` value `{v}`")))
                    };
                    match k {
                        "n" => n = Some(num()?),
                        "m" => m = Some(num()?),
                        "dim" => dim = Some(num()?),
                        _ => extra.push((k.to_string(), v.to_string())),
                    }
                }
                Some(_) => return Err(Error::Parse(format!("header after matrix rows: `{line}`"))),
                None => rows.push(line),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing `{k}` header"));
        let n = n.ok_or_else(|| missing("n"))?;
        let m = m.ok_or_else(|| missing("m"))?;
        let dim = dim.ok_or_else(|| missing("dim"))? as usize;
        if m == 0 || m > u32::MAX as u64 {
            return Err(Error::Parse(format!("bad conductor {m}")));
        }
        let m = m as u32;
        if rows.len() != dim {
            return Err(Error::Parse(format!("{} rows, expected {dim}", rows.len())));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (r, line) in rows.iter().enumerate() {
            let row = line
                .split_whitespace()
                .map(|t| CycloNumber::parse(m, t))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != dim {
                return Err(Error::Parse(format!(
                    "row {r} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(MatrixFile {
            n,
            matrix: CycloMatrix {
                dim,
                conductor: m,
                entries,
            },
            extra,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(&*cyclotomic_polynomial(1), &[-1, 1]);
        assert_eq!(&*cyclotomic_polynomial(2), &[1, 1]);
        assert_eq!(&*cyclotomic_polynomial(4), &[1, 0, 1]);
        assert_eq!(&*cyclotomic_polynomial(5), &[1, 1, 1, 1, 1]);
        assert_eq!(&*cyclotomic_polynomial(6), &[1, -1, 1]);
        assert_eq!(&*cyclotomic_polynomial(12), &[1, 0, -1, 0, 1]);
        assert_eq!(totient(4), 2);
        assert_eq!(totient(11), 10);
    }

    #[test]
    fn roots_of_unity() {
        assert!(CycloNumber::root_of_unity(5, 0).is_one());
        assert!(CycloNumber::root_of_unity(5, 5).is_one());
        let w4 = CycloNumber::root_of_unity(5, 4);
        assert_eq!(w4.coeffs(), &[q(-1, 1), q(-1, 1), q(-1, 1), q(-1, 1)]);
        // i² = -1 in ℚ(ω₄)
        let i = CycloNumber::root_of_unity(4, 1);
        assert_eq!(&i * &i, CycloNumber::from_int(4, -1));
    }

    #[test]
    fn root_identities_for_primes() {
        for m in [2u32, 3, 5, 7, 11, 13] {
            let w = CycloNumber::root_of_unity(m, 1);
            assert!(w.pow(m as i64).unwrap().is_one(), "ω^{m} = 1");
            let sum = (0..m as i64).fold(CycloNumber::zero(m), |acc, k| &acc + &CycloNumber::root_of_unity(m, k));
            assert!(sum.is_zero(), "1 + ω + … + ω^{} = 0", m - 1);
        }
    }

    #[test]
    fn field_operations() {
        let m = 5;
        let w1 = CycloNumber::root_of_unity(m, 1);
        assert!((&w1 * &CycloNumber::root_of_unity(m, 4)).is_one());
        assert_eq!(
            CycloNumber::root_of_unity(m, 2).inverse().unwrap(),
            CycloNumber::root_of_unity(m, 3)
        );
        assert_eq!(CycloNumber::zero(m).inverse(), Err(Error::DivisionByZero));
        // (1 + ω) has a non-monomial inverse
        let a = &CycloNumber::one(m) + &w1;
        assert!((&a * &a.inverse().unwrap()).is_one());
        assert_eq!(
            CycloNumber::one(3).checked_add(&CycloNumber::one(5)),
            Err(Error::ConductorMismatch(3, 5))
        );
    }

    #[test]
    fn conjugation_and_root_exponent() {
        let w = CycloNumber::root_of_unity(7, 3);
        assert_eq!(w.conjugate(), CycloNumber::root_of_unity(7, 4));
        assert_eq!(w.root_exponent(), Some(3));
        assert_eq!(CycloNumber::from_int(7, 2).root_exponent(), None);
        assert_eq!(CycloNumber::from_int(4, -1).root_exponent(), Some(2));
    }

    #[test]
    fn display() {
        let x = CycloNumber::from_coeffs(5, vec![q(1, 2), q(-1, 1), q(0, 1), q(3, 1)]);
        assert_eq!(x.to_string(), "1/2 - w + 3*w^3");
        assert_eq!(CycloNumber::zero(3).to_string(), "0");
    }

    #[test]
    fn entry_text_round_trip() {
        let x = CycloNumber::from_coeffs(5, vec![q(1, 2), q(-4, 6), q(0, 1), q(3, 1)]);
        let t = x.to_text();
        assert_eq!(t, "1/2,-2/3,0/1,3/1");
        assert_eq!(CycloNumber::parse(5, &t).unwrap(), x);
        assert!(CycloNumber::parse(5, "1,2").is_err());
        assert!(CycloNumber::parse(5, "1/0,0,0,0").is_err());
    }

    #[test]
    fn matrix_inverse_and_tensor() {
        let m = 3;
        let w = |k| CycloNumber::root_of_unity(m, k);
        let a = CycloMatrix::from_fn(3, m, |r, c| w((r * c) as i64));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!((&inv * &a).is_identity());
        assert_eq!(inv.inverse().unwrap(), a);
        // (1/n)·conj(F)ᵀ·F = I for the Fourier matrix F = (ω^{ij})
        let scaled = a.conjugate_transpose().scale(&CycloNumber::from_rational(m, q(1, 3)));
        assert!((&scaled * &a).is_identity());
        assert_eq!(CycloMatrix::zeros(3, m).inverse(), Err(Error::NotInvertible));
        let i2 = CycloMatrix::identity(2, m);
        assert!(CycloMatrix::tensor(&i2, &i2).unwrap().is_identity());
        assert_eq!(
            CycloMatrix::tensor(&i2, &CycloMatrix::identity(2, 5)),
            Err(Error::ConductorMismatch(3, 5))
        );
    }

    #[test]
    fn invertibility_certificate() {
        for m in [3u32, 4, 5, 11] {
            let (q, zeta) = splitting_prime(m);
            assert_eq!(q % m as u64, 1);
            assert_eq!(pow_mod(zeta, m as u64, q), 1);
            let w = |k| CycloNumber::root_of_unity(m, k);
            let fourier = CycloMatrix::from_fn(m as usize, m, |r, c| w((r * c) as i64));
            assert_eq!(fourier.modular_full_rank(), Some(true));
            assert!(fourier.is_invertible());
            // two equal rows
            let singular = CycloMatrix::from_fn(3, m, |r, c| w((r.min(1) * c) as i64));
            assert!(!singular.is_invertible());
        }
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = 4;
        let a = CycloMatrix::from_fn(2, m, |r, c| CycloNumber::root_of_unity(m, (r + 3 * c) as i64));
        let file = MatrixFile {
            n: 2,
            matrix: a,
            extra: vec![("outer".into(), "true".into())],
        };
        let text = file.to_text();
        assert!(text.starts_with("n: 2\nm: 4\ndim: 2\nouter: true\n"));
        let back = MatrixFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_text(), text);
        assert!(MatrixFile::parse("n: 2\nm: 4\ndim: 2\n1,0 0,0\n").is_err());
        assert!(MatrixFile::parse("m: 4\ndim: 1\n1,0\n").is_err());
    }

    fn small_int_matrix(dim: usize, m: u32) -> impl Strategy<Value = CycloMatrix> {
        let deg = totient(m);
        prop::collection::vec(prop::collection::vec(-2i64..=2, deg), dim * dim).prop_map(move |cells| {
            let mut it = cells.into_iter();
            CycloMatrix::from_fn(dim, m, |_, _| {
                let c = it.next().unwrap();
                CycloNumber::from_coeffs(m, c.into_iter().map(|x| q(x, 1)).collect())
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mixed_product_property(
            (a, b, c, d) in prop::sample::select(vec![(2usize, 4u32), (3, 3), (5, 5)])
                .prop_flat_map(|(n, m)| {
                    let k = if n == 5 { 1 } else { n };
                    (small_int_matrix(n, m), small_int_matrix(k, m), small_int_matrix(n, m), small_int_matrix(k, m))
                })
        ) {
            let lhs = &CycloMatrix::tensor(&a, &b).unwrap() * &CycloMatrix::tensor(&c, &d).unwrap();
            let rhs = CycloMatrix::tensor(&(&a * &c), &(&b * &d)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_is_an_involution(a in small_int_matrix(3, 5)) {
            if let Ok(inv) = a.inverse() {
                prop_assert!((&a * &inv).is_identity());
                prop_assert_eq!(inv.inverse().unwrap(), a);
            } else {
                prop_assert!(!a.is_invertible());
            }
        }

        #[test]
        fn multiplication_commutes_and_inverts(
            x in prop::collection::vec(-5i64..=5, 6),
            y in prop::collection::vec(-5i64..=5, 6),
        ) {
            let m = 7;
            let a = CycloNumber::from_coeffs(m, x.into_iter().map(|v| q(v, 1)).collect());
            let b = CycloNumber::from_coeffs(m, y.into_iter().map(|v| q(v, 2)).collect());
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
            }
        }
    }
}
