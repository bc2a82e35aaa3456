use std::fmt;

use rand::Rng;

use super::{build_d_pow, delta, generator_order};
use crate::error::{Error, Result};
use crate::zmod::{Prime, ZModMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    D1,
    D2,
    D3,
    D4,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::D1, Generator::D2, Generator::D3, Generator::D4];

    /// 1-based index, matching `D₁..D₄`.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i.checked_sub(1)?).copied()
    }

    pub fn order(self, p: Prime) -> u64 {
        generator_order(self.index(), p)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index())
    }
}

/// `generator^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub generator: Generator,
    pub exponent: i64,
}

impl Token {
    pub fn new(generator: Generator, exponent: i64) -> Self {
        Token { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Token::new(self.generator, -self.exponent)
    }

    /// `Δ·g^e·Δ` where `Δ = diag(-1,1,-1,1)`: inverts `D₁`, `D₂` and fixes `D₃`, `D₄`.
    fn conjugated_by_delta(self) -> Self {
        match self.generator {
            Generator::D1 | Generator::D2 => self.inverse(),
            Generator::D3 | Generator::D4 => self,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.generator)
        } else {
            write!(f, "{}^{}", self.generator, self.exponent)
        }
    }
}

/// A product `Δ^outer · g₁^{e₁} ⋯ g_r^{e_r}` over `F_p`, written `OUT D1 D2^-1 …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorWord {
    modulus: Prime,
    outer: bool,
    tokens: Vec<Token>,
}

impl GeneratorWord {
    pub fn empty(p: Prime) -> Self {
        GeneratorWord {
            modulus: p,
            outer: false,
            tokens: Vec::new(),
        }
    }

    pub fn from_tokens(p: Prime, outer: bool, tokens: Vec<Token>) -> Self {
        GeneratorWord {
            modulus: p,
            outer,
            tokens,
        }
    }

    /// The single token `OUT`.
    pub fn out(p: Prime) -> Self {
        Self::from_tokens(p, true, Vec::new())
    }

    pub fn single(p: Prime, g: Generator, e: i64) -> Self {
        Self::from_tokens(p, false, vec![Token::new(g, e)])
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn is_outer(&self) -> bool {
        self.outer
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        !self.outer && self.tokens.is_empty()
    }

    /// Number of `D`-tokens once every power is written out as repeated letters.
    pub fn expanded_len(&self) -> u64 {
        self.expanded().tokens.len() as u64
    }

    pub fn push(&mut self, g: Generator, e: i64) {
        self.tokens.push(Token::new(g, e));
    }

    /// The matrix `Δ^outer · ∏ D_{g}^{e}`.
    pub fn evaluate(&self) -> ZModMatrix {
        let p = self.modulus;
        let start = if self.outer {
            delta(p)
        } else {
            ZModMatrix::identity(p, 4)
        };
        self.tokens
            .iter()
            .fold(start, |acc, t| &acc * &build_d_pow(t.generator.index(), p, t.exponent))
    }

    /// `self · other`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.get(), other.modulus.get()));
        }
        // w·Δ·v = Δ·(Δ w Δ)·v
        let mut tokens: Vec<Token> = if other.outer {
            self.tokens.iter().map(|t| t.conjugated_by_delta()).collect()
        } else {
            self.tokens.clone()
        };
        tokens.extend_from_slice(&other.tokens);
        Ok(Self::from_tokens(self.modulus, self.outer ^ other.outer, tokens))
    }

    /// Concatenate a sequence of words over the same modulus.
    pub fn concat<'a>(p: Prime, words: impl IntoIterator<Item = &'a GeneratorWord>) -> Result<Self> {
        words.into_iter().try_fold(Self::empty(p), |acc, w| acc.then(w))
    }

    pub fn inverse(&self) -> Self {
        let rev = self.tokens.iter().rev().map(|t| t.inverse());
        // (Δ·u)⁻¹ = u⁻¹·Δ = Δ·(Δ u⁻¹ Δ)
        let tokens = if self.outer {
            rev.map(Token::conjugated_by_delta).collect()
        } else {
            rev.collect()
        };
        Self::from_tokens(self.modulus, self.outer, tokens)
    }

    /// Reduce exponents into `(-ord/2, ord/2]`, merge equal neighbours and drop
    /// identities until nothing changes. The evaluated matrix is unchanged.
    pub fn simplify(&self) -> Self {
        let p = self.modulus;
        let normal = |t: Token| -> Option<Token> {
            let ord = t.generator.order(p) as i64;
            let mut e = t.exponent.rem_euclid(ord);
            if 2 * e > ord {
                e -= ord;
            }
            (e != 0).then(|| Token::new(t.generator, e))
        };
        let mut out: Vec<Token> = Vec::with_capacity(self.tokens.len());
        for &t in &self.tokens {
            let Some(t) = normal(t) else { continue };
            match out.last() {
                Some(last) if last.generator == t.generator => {
                    let merged = Token::new(t.generator, last.exponent + t.exponent);
                    out.pop();
                    if let Some(m) = normal(merged) {
                        out.push(m);
                    }
                }
                _ => out.push(t),
            }
        }
        Self::from_tokens(p, self.outer, out)
    }

    /// Every power written as repeated `g` or `g^-1` letters.
    pub fn expanded(&self) -> Self {
        let mut tokens = Vec::new();
        for t in &self.simplify().tokens {
            let unit = t.exponent.signum();
            tokens.extend(std::iter::repeat_n(Token::new(t.generator, unit), t.exponent.unsigned_abs() as usize));
        }
        Self::from_tokens(self.modulus, self.outer, tokens)
    }

    /// A uniformly drawn word of `len` tokens with exponents in `1..order`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, p: Prime, len: usize, outer: bool) -> Self {
        let tokens = (0..len)
            .map(|_| {
                let g = Generator::ALL[rng.gen_range(0..4)];
                let e = rng.gen_range(1..g.order(p) as i64);
                Token::new(g, e)
            })
            .collect();
        Self::from_tokens(p, outer, tokens)
    }

    /// Parse whitespace separated tokens: an optional leading `OUT`, then `D1`..`D4`
    /// with optional `^e` (e may be negative).
    pub fn parse(p: Prime, text: &str) -> Result<Self> {
        let mut word = Self::empty(p);
        for (pos, tok) in text.split_whitespace().enumerate() {
            if tok == "OUT" {
                if pos != 0 {
                    return Err(Error::Parse("OUT may only appear as the first token".into()));
                }
                word.outer = true;
                continue;
            }
            let bad = || Error::Parse(format!("bad word token `{tok}`"));
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let g = name
                .strip_prefix('D')
                .and_then(|i| i.parse::<usize>().ok())
                .and_then(Generator::from_index)
                .ok_or_else(bad)?;
            word.push(g, exp);
        }
        Ok(word)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.outer {
            parts.push("OUT".into());
        }
        parts.extend(self.tokens.iter().map(Token::to_string));
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let p = prime(5);
        let w = GeneratorWord::parse(p, "OUT D1 D2^-1 D4^3").unwrap();
        assert!(w.is_outer());
        assert_eq!(w.tokens().len(), 3);
        assert_eq!(w.to_string(), "OUT D1 D2^-1 D4^3");
        assert_eq!(GeneratorWord::parse(p, "").unwrap(), GeneratorWord::empty(p));
        assert_eq!(GeneratorWord::empty(p).to_string(), "");
        assert!(GeneratorWord::parse(p, "D1 OUT").is_err());
        assert!(GeneratorWord::parse(p, "D5").is_err());
        assert!(GeneratorWord::parse(p, "D1^x").is_err());
    }

    #[test]
    fn evaluation_and_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3, 5, 7] {
            let p = prime(p);
            for len in [0, 1, 5, 12] {
                for outer in [false, true] {
                    let w = GeneratorWord::random(&mut rng, p, len, outer);
                    let v = GeneratorWord::random(&mut rng, p, len + 1, !outer);
                    let m = w.evaluate();
                    assert_eq!(w.simplify().evaluate(), m);
                    assert_eq!(w.expanded().evaluate(), m);
                    assert!((&w.inverse().evaluate() * &m).is_identity());
                    assert_eq!(w.then(&v).unwrap().evaluate(), &m * &v.evaluate());
                    let text = w.to_string();
                    assert_eq!(GeneratorWord::parse(p, &text).unwrap(), w);
                }
            }
        }
    }

    #[test]
    fn simplify_merges_and_cancels() {
        let p = prime(5);
        let w = GeneratorWord::parse(p, "D1 D1^4 D2^3 D3 D3 D4^7").unwrap();
        assert_eq!(w.simplify().to_string(), "D2^-1 D4^2");
        assert_eq!(
            GeneratorWord::parse(p, "D4^-1").unwrap().expanded().to_string(),
            "D4^-1"
        );
        assert_eq!(GeneratorWord::parse(p, "D1^2").unwrap().expanded().to_string(), "D1 D1");
    }
}
