use super::sl2::{s_matrix, sl2_word, Sl2Gen};
use super::{build_s, delta, is_symplectic, lemma_bcde, Generator, GeneratorWord, Side, Sign, Token};
use crate::error::{Error, Result};
use crate::zmod::{Prime, ZModMatrix, ZModScalar};

fn sl2_tokens(a: &ZModMatrix) -> Result<Vec<Token>> {
    Ok(sl2_word(a)?
        .into_iter()
        .map(|t| {
            let g = match t.generator {
                Sl2Gen::T => Generator::D1,
                Sl2Gen::S => Generator::D2,
            };
            Token::new(g, t.exponent)
        })
        .collect())
}

/// A word over `D₁, D₂, D₃` evaluating to `A ⊕ B`, or to `(A ⊕ B)·D₃ = (0 A; B 0)`
/// when `swapped`.
///
/// `D₁ = T ⊕ I` and `D₂ = S ⊕ I` realize the top block; conjugating by `D₃` moves
/// them to the bottom block.
pub fn h_word(a: &ZModMatrix, b: &ZModMatrix, swapped: bool) -> Result<GeneratorWord> {
    let p = a.modulus();
    let mut tokens = sl2_tokens(a)?;
    let bottom = sl2_tokens(b)?;
    if !bottom.is_empty() {
        tokens.push(Token::new(Generator::D3, 1));
        tokens.extend(bottom);
        tokens.push(Token::new(Generator::D3, 1));
    }
    if swapped {
        tokens.push(Token::new(Generator::D3, 1));
    }
    Ok(GeneratorWord::from_tokens(p, false, tokens).simplify())
}

/// The output of [`step1_reduce`]: `eval(g1)·M·eval(g2) = S(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step1 {
    pub g1: GeneratorWord,
    pub g2: GeneratorWord,
    pub k: ZModScalar,
}

/// Reduce `M ∈ Sp(4, F_p)` outside the block subgroup to `S(k)`, `k = det M₂₂`.
///
/// Block-triangular `M` (`M₁₂ = 0` or `M₂₂ = 0`) lies in `⟨D₁, D₂, D₃⟩` and is
/// rejected with [`Error::InSubgroupH`]; [`decompose`] handles it with [`h_word`].
pub fn step1_reduce(m: &ZModMatrix) -> Result<Step1> {
    if is_symplectic(m)? != Some(Sign::Plus) {
        return Err(Error::NotSymplectic);
    }
    let p = m.modulus();
    let m12 = m.block(0, 2, 2, 2);
    let m22 = m.block(2, 2, 2, 2);
    if m12.is_zero() || m22.is_zero() {
        return Err(Error::InSubgroupH);
    }
    let k = m22.det()?;
    let (b, d, r) = if !k.is_zero() {
        let (b, c) = lemma_bcde(&m12, Side::I)?;
        let (d, _) = lemma_bcde(&(&m22 * &c), Side::Ii)?;
        (b, d, c)
    } else {
        let (d, e) = lemma_bcde(&m22, Side::Ii)?;
        // det(M₁₂E) = 1 - k = 1, so the right factor is I₂
        let (b, _) = lemma_bcde(&(&m12 * &e), Side::I)?;
        (b, d, e)
    };
    let i2 = ZModMatrix::identity(p, 2);
    let g1 = ZModMatrix::direct_sum(&b, &d);
    let tilde = &(&g1 * m) * &ZModMatrix::direct_sum(&i2, &r);
    let n = ZModMatrix::from_rows(
        p,
        &[
            [tilde.scalar(0, 0).signed(), tilde.scalar(0, 1).signed()],
            [(-tilde.scalar(3, 0)).signed(), (-tilde.scalar(3, 1)).signed()],
        ],
    );
    debug_assert_eq!(n.det()?.value(), 1);
    let n_inv = n.inverse()?;
    debug_assert_eq!(&(&g1 * m) * &ZModMatrix::direct_sum(&n_inv, &r), build_s(k));
    Ok(Step1 {
        g1: h_word(&b, &d, false)?,
        g2: h_word(&n_inv, &r, false)?,
        k,
    })
}

/// `J = (S ⊕ S)` as the word `D₂ · D₃D₂D₃`.
fn j_word(p: Prime) -> GeneratorWord {
    let s = s_matrix(p);
    h_word(&s, &s, false).expect("S is in SL(2)")
}

/// A word evaluating to `S(k) = Jᵀ(D₄^{1-k})ᵀ J D₄ᵀ`, using `Jᵀ = J⁻¹` and
/// `(D₄^e)ᵀ = D₃D₄^eD₃`.
pub fn step2_sk_word(k: ZModScalar) -> GeneratorWord {
    let p = Prime::new(k.modulus()).expect("prime modulus");
    let j = j_word(p);
    let d3 = Token::new(Generator::D3, 1);
    let d4_t = |e: i64| GeneratorWord::from_tokens(p, false, vec![d3, Token::new(Generator::D4, e), d3]);
    let one_minus_k = (ZModScalar::one(p.get()) - k).signed();
    GeneratorWord::concat(p, [&j.inverse(), &d4_t(one_minus_k), &j, &d4_t(1)])
        .expect("same modulus")
        .simplify()
}

fn decompose_plus(m: &ZModMatrix) -> Result<GeneratorWord> {
    let m11 = m.block(0, 0, 2, 2);
    let m12 = m.block(0, 2, 2, 2);
    let m21 = m.block(2, 0, 2, 2);
    let m22 = m.block(2, 2, 2, 2);
    if m12.is_zero() {
        return h_word(&m11, &m22, false);
    }
    if m22.is_zero() {
        return h_word(&m12, &m21, true);
    }
    let Step1 { g1, g2, k } = step1_reduce(m)?;
    // M = G₁⁻¹ S(k) G₂⁻¹
    let w = GeneratorWord::concat(m.modulus(), [&g1.inverse(), &step2_sk_word(k), &g2.inverse()])?;
    Ok(w.simplify())
}

/// A word evaluating to `M` for any `M` with `MᵀJM = ±J`. The `-J` coset is written
/// `OUT` followed by a word for `Δ·M`, `Δ = diag(-1, 1, -1, 1)`.
pub fn decompose(m: &ZModMatrix) -> Result<GeneratorWord> {
    match is_symplectic(m)? {
        None => Err(Error::NotInGroup),
        Some(sign) => decompose_with_sign(m, sign),
    }
}

/// As [`decompose`] but with the coset chosen by the caller. This matters for `p = 2`,
/// where `-J = J` and the `OUT` coset cannot be read off the matrix.
pub fn decompose_with_sign(m: &ZModMatrix, sign: Sign) -> Result<GeneratorWord> {
    let p = m.modulus();
    let expected = if p.get() == 2 { Sign::Plus } else { sign };
    if is_symplectic(m)? != Some(expected) {
        return Err(Error::NotInGroup);
    }
    match sign {
        Sign::Plus => decompose_plus(m),
        Sign::Minus => GeneratorWord::out(p).then(&decompose_plus(&(&delta(p) * m))?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::build_d;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn h_word_examples() {
        let p = prime(7);
        let i2 = ZModMatrix::identity(p, 2);
        assert!(h_word(&i2, &i2, false).unwrap().is_empty());
        let t = ZModMatrix::from_rows(p, &[[1, 1], [0, 1]]);
        let w = h_word(&t, &i2, false).unwrap();
        assert_eq!(w.to_string(), "D1");
        assert_eq!(w.evaluate(), build_d(1, p));
        assert_eq!(j_word(p).to_string(), "D2 D3 D2 D3");
        assert!(matches!(
            h_word(&ZModMatrix::diagonal(p, &[2, 2]), &i2, false),
            Err(Error::NotInSl2(4))
        ));
    }

    #[test]
    fn step2_all_k() {
        for p in [2, 3, 5, 7, 11, 13] {
            for k in 0..p as i64 {
                let k = ZModScalar::new(k, p);
                assert_eq!(step2_sk_word(k).evaluate(), build_s(k), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn step1_examples() {
        let p = prime(5);
        let s2 = build_s(ZModScalar::new(2, 5));
        let r = step1_reduce(&s2).unwrap();
        assert_eq!(r.k.value(), 2);
        assert_eq!(&(&r.g1.evaluate() * &s2) * &r.g2.evaluate(), s2);

        let p3 = prime(3);
        let d4 = build_d(4, p3);
        let r = step1_reduce(&d4).unwrap();
        assert_eq!(r.k.value(), 1);
        assert_eq!(&(&r.g1.evaluate() * &d4) * &r.g2.evaluate(), build_s(r.k));

        assert_eq!(step1_reduce(&build_d(1, p)), Err(Error::InSubgroupH));
        assert_eq!(step1_reduce(&delta(p)), Err(Error::NotSymplectic));
    }

    #[test]
    fn step1_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = prime(5);
        let mut reduced = 0;
        while reduced < 200 {
            let m = GeneratorWord::random(&mut rng, p, 10, false).evaluate();
            match step1_reduce(&m) {
                Ok(r) => {
                    assert_eq!(&(&r.g1.evaluate() * &m) * &r.g2.evaluate(), build_s(r.k));
                    assert_eq!(r.k, m.block(2, 2, 2, 2).det().unwrap());
                    reduced += 1;
                }
                Err(Error::InSubgroupH) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let p = prime(5);
        let m = &(&build_d(1, p) * &build_d(3, p)) * &build_d(4, p);
        assert_eq!(decompose(&m).unwrap().evaluate(), m);
        assert!(decompose(&ZModMatrix::identity(p, 4)).unwrap().is_empty());

        let p3 = prime(3);
        let w = decompose(&delta(p3)).unwrap();
        assert!(w.is_outer());
        assert_eq!(w.evaluate(), delta(p3));
        assert_eq!(
            decompose(&ZModMatrix::diagonal(p, &[2, 1, 1, 1])),
            Err(Error::NotInGroup)
        );
    }

    #[test]
    fn decompose_random_extended() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [3, 5, 7, 11] {
            let p = prime(p);
            for i in 0..60 {
                let m = GeneratorWord::random(&mut rng, p, 4 + i % 9, i % 2 == 1).evaluate();
                let w = decompose(&m).unwrap();
                assert_eq!(w.evaluate(), m);
                assert_eq!(w.is_outer(), i % 2 == 1);
            }
        }
    }
}
