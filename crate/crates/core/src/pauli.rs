//! Generalized Pauli matrices, the generators `A₁..A₄` of the MAD-group, and
//! Pauli monomials `α·(P^iQ^j ⊗ P^kQ^l)`.
//!
//! `P = diag(1, ω, …, ω^{n-1})` and `Q` is the cyclic shift with `Q_{r,r+1} = 1`, so
//! `QP = ωPQ`. Tensor indices follow `I = i₁·n + j₁`.

use std::fmt;

use crate::cyclo::{CycloMatrix, CycloNumber};
use crate::error::{Error, Result};
use crate::zmod::Prime;

/// Conductor of the coefficient field used for Pauli order `n`: `n` itself for odd
/// primes, 4 for `n = 2` so that a square root of `ω₂⁻¹` exists.
pub fn conductor_for(n: Prime) -> u32 {
    if n.get() == 2 {
        4
    } else {
        n.get() as u32
    }
}

/// `ω_n^k` inside `ℚ(ω_m)`, `m = conductor_for(n)`.
pub fn omega(n: Prime, k: i64) -> CycloNumber {
    let m = conductor_for(n);
    let step = (m as u64 / n.get()) as i64;
    CycloNumber::root_of_unity(m, k.rem_euclid(n.get() as i64) * step)
}

/// If `x = ω_n^a`, return `a` in `[0, n)`.
pub fn omega_exponent(n: Prime, x: &CycloNumber) -> Option<u64> {
    (0..n.get()).find(|&a| *x == omega(n, a as i64))
}

/// The clock matrix `P = diag(ω^r)`.
pub fn build_p(n: Prime) -> CycloMatrix {
    let m = conductor_for(n);
    CycloMatrix::from_fn(n.get() as usize, m, |r, c| {
        if r == c {
            omega(n, r as i64)
        } else {
            CycloNumber::zero(m)
        }
    })
}

/// The shift matrix `Q` with `Q_{r,c} = δ_{r, c-1}`.
pub fn build_q(n: Prime) -> CycloMatrix {
    let m = conductor_for(n);
    let d = n.get() as usize;
    CycloMatrix::from_fn(d, m, |r, c| {
        if (r + 1) % d == c {
            CycloNumber::one(m)
        } else {
            CycloNumber::zero(m)
        }
    })
}

/// `[P⊗I, Q⊗I, I⊗P, I⊗Q]`.
pub fn generators(n: Prime) -> [CycloMatrix; 4] {
    let i = CycloMatrix::identity(n.get() as usize, conductor_for(n));
    let (p, q) = (build_p(n), build_q(n));
    let t = |a: &CycloMatrix, b: &CycloMatrix| CycloMatrix::tensor(a, b).expect("same conductor");
    [t(&p, &i), t(&q, &i), t(&i, &p), t(&i, &q)]
}

/// `phase · (P^i Q^j ⊗ P^k Q^l)` with exponents `[i, j, k, l]` reduced mod `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliMonomial {
    n: Prime,
    phase: CycloNumber,
    exponents: [u64; 4],
}

impl PauliMonomial {
    pub fn new(n: Prime, phase: CycloNumber, exponents: [i64; 4]) -> Result<Self> {
        let m = conductor_for(n);
        if phase.conductor() != m {
            return Err(Error::ConductorMismatch(phase.conductor(), m));
        }
        if phase.is_zero() {
            return Err(Error::NotAMonomial("zero phase".into()));
        }
        Ok(PauliMonomial {
            n,
            phase,
            exponents: exponents.map(|e| n.reduce(e)),
        })
    }

    /// `ω^a · (P^i Q^j ⊗ P^k Q^l)`.
    pub fn with_omega(n: Prime, a: i64, exponents: [i64; 4]) -> Self {
        Self::new(n, omega(n, a), exponents).expect("roots of unity are nonzero")
    }

    pub fn identity(n: Prime) -> Self {
        Self::with_omega(n, 0, [0; 4])
    }

    /// The generator `A_p`, `p ∈ 1..=4`.
    pub fn generator(n: Prime, p: usize) -> Self {
        assert!((1..=4).contains(&p), "generator index {p}");
        let mut e = [0; 4];
        e[p - 1] = 1;
        Self::with_omega(n, 0, e)
    }

    pub fn order(&self) -> Prime {
        self.n
    }

    pub fn phase(&self) -> &CycloNumber {
        &self.phase
    }

    pub fn exponents(&self) -> [u64; 4] {
        self.exponents
    }

    /// `ω^{j_a·i_b + l_a·k_b}` from moving `Q`-powers of `self` past `P`-powers of `rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::ModulusMismatch(self.n.get(), rhs.n.get()));
        }
        let [i1, j1, k1, l1] = self.exponents.map(|e| e as i64);
        let [i2, j2, k2, l2] = rhs.exponents.map(|e| e as i64);
        let phase = &(&self.phase * &rhs.phase) * &omega(self.n, j1 * i2 + l1 * k2);
        Self::new(self.n, phase, [i1 + i2, j1 + j2, k1 + k2, l1 + l2])
    }

    /// `(P^iQ^j)⁻¹ = ω^{ij} P^{-i}Q^{-j}` in each slot.
    pub fn inverse(&self) -> Self {
        let [i, j, k, l] = self.exponents.map(|e| e as i64);
        let phase = &self.phase.inverse().expect("phase is nonzero") * &omega(self.n, i * j + k * l);
        Self::new(self.n, phase, [-i, -j, -k, -l]).expect("nonzero phase")
    }

    /// The monomial with matrix `(self)^{-⊤}`. A generalized permutation matrix has
    /// inverse transpose equal to its entrywise reciprocal, so this is
    /// `α⁻¹·(P^{-i}Q^j ⊗ P^{-k}Q^l)`.
    pub fn inverse_transpose(&self) -> Self {
        let [i, j, k, l] = self.exponents.map(|e| e as i64);
        let phase = self.phase.inverse().expect("phase is nonzero");
        Self::new(self.n, phase, [-i, j, -k, l]).expect("nonzero phase")
    }

    /// Row `(r₁, r₂)` has its single nonzero entry in column `(r₁+j, r₂+l)`, with value
    /// `phase · ω^{i·r₁ + k·r₂}`.
    pub fn to_matrix(&self) -> CycloMatrix {
        let n = self.n.get() as usize;
        let m = conductor_for(self.n);
        let [i, j, k, l] = self.exponents.map(|e| e as usize);
        let mut out = CycloMatrix::zeros(n * n, m);
        for r1 in 0..n {
            for r2 in 0..n {
                let col = ((r1 + j) % n) * n + (r2 + l) % n;
                let value = &self.phase * &omega(self.n, (i * r1 + k * r2) as i64);
                out.set(r1 * n + r2, col, value);
            }
        }
        out
    }

    /// Recognize `matrix` as `α·(P^iQ^j ⊗ P^kQ^l)`.
    pub fn from_matrix(n: Prime, matrix: &CycloMatrix) -> Result<Self> {
        let d = n.get() as usize;
        let m = conductor_for(n);
        if matrix.dim() != d * d {
            return Err(Error::DimensionMismatch(format!("{} vs {}", matrix.dim(), d * d)));
        }
        if matrix.conductor() != m {
            return Err(Error::ConductorMismatch(matrix.conductor(), m));
        }
        let single = |row: usize| -> Result<(usize, &CycloNumber)> {
            let mut nz = (0..d * d).filter(|&c| !matrix.get(row, c).is_zero());
            match (nz.next(), nz.next()) {
                (Some(c), None) => Ok((c, matrix.get(row, c))),
                (None, _) => Err(Error::NotAMonomial(format!("row {row} is zero"))),
                _ => Err(Error::NotAMonomial(format!("row {row} has several nonzero entries"))),
            }
        };
        let (c0, alpha) = single(0)?;
        let (j, l) = (c0 / d, c0 % d);
        let twists: Vec<CycloNumber> = (0..d).map(|t| alpha * &omega(n, t as i64)).collect();
        let find_twist = |row: usize| -> Result<usize> {
            let (_, v) = single(row)?;
            twists
                .iter()
                .position(|t| t == v)
                .ok_or_else(|| Error::NotAMonomial(format!("row {row} phase is not α·ω^t")))
        };
        let i = if d > 1 { find_twist(d)? } else { 0 };
        let k = if d > 1 { find_twist(1)? } else { 0 };
        let candidate = PauliMonomial::new(n, alpha.clone(), [i, j, k, l].map(|e| e as i64))?;
        for r1 in 0..d {
            for r2 in 0..d {
                let row = r1 * d + r2;
                let (c, v) = single(row)?;
                let expect_col = ((r1 + j) % d) * d + (r2 + l) % d;
                if c != expect_col || *v != twists[(i * r1 + k * r2) % d] {
                    return Err(Error::NotAMonomial(format!("row {row} breaks the pattern")));
                }
            }
        }
        Ok(candidate)
    }

    /// Parse `w^a P^i Q^j x P^k Q^l`, optionally with a leading `-` on the phase. The
    /// phase token and any `P`/`Q` token may be omitted (exponent 0); a bare `P` or `Q`
    /// means exponent 1 and `I` is an empty slot.
    pub fn parse(n: Prime, text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("monomial `{text}`: {msg}"));
        let exp = |tok: &str, prefix: &str| -> Result<i64> {
            match tok.strip_prefix(prefix) {
                Some("") => Ok(1),
                Some(rest) => rest
                    .strip_prefix('^')
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(|| bad(&format!("bad token `{tok}`"))),
                None => Err(bad(&format!("expected {prefix}, got `{tok}`"))),
            }
        };
        let mut tokens: Vec<&str> = text.split_whitespace().collect();
        let mut a = 0;
        let mut negate = false;
        if let Some(first) = tokens.first() {
            let (neg, rest) = match first.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, *first),
            };
            if rest.starts_with('w') {
                a = exp(rest, "w")?;
                negate = neg;
                tokens.remove(0);
            }
        }
        let slots: Vec<&[&str]> = tokens.split(|t| *t == "x").collect();
        if slots.len() != 2 {
            return Err(bad("expected exactly one `x` separating the tensor slots"));
        }
        let mut e = [0i64; 4];
        for (s, slot) in slots.iter().enumerate() {
            let mut seen_q = false;
            for tok in slot.iter() {
                match tok.chars().next() {
                    Some('I') if *tok == "I" => {}
                    Some('P') if !seen_q => e[2 * s] += exp(tok, "P")?,
                    Some('Q') => {
                        e[2 * s + 1] += exp(tok, "Q")?;
                        seen_q = true;
                    }
                    _ => return Err(bad(&format!("unexpected token `{tok}`"))),
                }
            }
        }
        let m = Self::with_omega(n, a, e);
        if negate {
            return Self::new(n, -&m.phase, e);
        }
        Ok(m)
    }
}

impl fmt::Debug for PauliMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (
            omega_exponent(self.n, &self.phase),
            omega_exponent(self.n, &-&self.phase),
        ) {
            (Some(a), _) => write!(f, "w^{a}")?,
            (None, Some(a)) => write!(f, "-w^{a}")?,
            (None, None) => write!(f, "[{}]", self.phase.to_text())?,
        }
        let [i, j, k, l] = self.exponents;
        write!(f, " P^{i} Q^{j} x P^{k} Q^{l}")
    }
}

/// A nonzero exponent quadruple `(i, j, k, l)` labelling a component of the grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradingIndex {
    n: Prime,
    v: [u64; 4],
}

impl GradingIndex {
    pub fn new(n: Prime, v: [i64; 4]) -> Result<Self> {
        let v = v.map(|x| n.reduce(x));
        if v == [0; 4] {
            return Err(Error::Unsupported("the zero index is not part of the grading".into()));
        }
        Ok(GradingIndex { n, v })
    }

    pub fn order(&self) -> Prime {
        self.n
    }

    pub fn values(&self) -> [u64; 4] {
        self.v
    }

    /// All `n⁴ - 1` nonzero indices in lexicographic order.
    pub fn all(n: Prime) -> impl Iterator<Item = GradingIndex> {
        let p = n.get();
        (1..p.pow(4)).map(move |x| GradingIndex {
            n,
            v: [x / (p * p * p), (x / (p * p)) % p, (x / p) % p, x % p],
        })
    }

    pub fn monomial(&self) -> PauliMonomial {
        PauliMonomial::with_omega(self.n, 0, self.v.map(|x| x as i64))
    }
}

impl fmt::Display for GradingIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k, l] = self.v;
        write!(f, "({i},{j},{k},{l})")
    }
}
