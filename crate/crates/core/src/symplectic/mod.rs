//! `Sp(4, F_p)` for the form `J = I₂ ⊗ (0 1; -1 0)`, its extension by
//! `XᵀJX = -J`, the generators `D₁..D₄`, and constructive decomposition into words.

mod decompose;
mod sl2;
mod word;

pub use decompose::{decompose, decompose_with_sign, h_word, step1_reduce, step2_sk_word, Step1};
pub use sl2::{eval_sl2, lemma_bcde, sl2_word, Side, Sl2Gen, Sl2Token};
pub use word::{Generator, GeneratorWord, Token};

use crate::error::{Error, Result};
use crate::zmod::{Prime, ZModMatrix, ZModScalar};

/// Which side of `XᵀJX = ±J` a matrix satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// `J = (0 1; -1 0) ⊕ (0 1; -1 0)`.
pub fn form(p: Prime) -> ZModMatrix {
    ZModMatrix::from_rows(p, &[[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
}

/// `Δ = diag(-1, 1, -1, 1)`, the coefficient matrix of `Out_I`.
pub fn delta(p: Prime) -> ZModMatrix {
    ZModMatrix::diagonal(p, &[-1, 1, -1, 1])
}

fn check_4x4(m: &ZModMatrix) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "expected 4x4, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `Some(Plus)` if `MᵀJM = J`, `Some(Minus)` if `MᵀJM = -J`, `None` otherwise.
///
/// For `p = 2` the two cases coincide and `Plus` is reported.
pub fn is_symplectic(m: &ZModMatrix) -> Result<Option<Sign>> {
    check_4x4(m)?;
    let j = form(m.modulus());
    let g = &(&m.transpose() * &j) * m;
    Ok(if g == j {
        Some(Sign::Plus)
    } else if g == j.neg() {
        Some(Sign::Minus)
    } else {
        None
    })
}

/// `c_aᵀ J c_b` for columns `a`, `b` (zero based), written out in entries.
fn pairing(m: &ZModMatrix, a: usize, b: usize) -> ZModScalar {
    let s = |r, c| m.scalar(r, c);
    s(0, a) * s(1, b) - s(1, a) * s(0, b) + s(2, a) * s(3, b) - s(3, a) * s(2, b)
}

/// The left-minus-right residuals of congruences (I)–(VI), in that order.
///
/// (I) `1 = a₁₁a₂₂ - a₂₁a₁₂ + a₃₁a₄₂ - a₄₁a₃₂`, (II) the same for columns 3, 4, and
/// (III)–(VI) the vanishing pairings of columns (1,3), (1,4), (2,3), (2,4).
pub fn six_residuals(m: &ZModMatrix) -> Result<[ZModScalar; 6]> {
    check_4x4(m)?;
    let one = ZModScalar::one(m.modulus().get());
    Ok([
        pairing(m, 0, 1) - one,
        pairing(m, 2, 3) - one,
        pairing(m, 0, 2),
        pairing(m, 0, 3),
        pairing(m, 1, 2),
        pairing(m, 1, 3),
    ])
}

/// True iff all six congruences hold.
pub fn six_equations(m: &ZModMatrix) -> Result<bool> {
    Ok(six_residuals(m)?.iter().all(|r| r.is_zero()))
}

/// `D₁..D₄` for `index ∈ 1..=4`.
pub fn build_d(index: usize, p: Prime) -> ZModMatrix {
    let rows = match index {
        1 => [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        2 => [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        3 => [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
        4 => [[1, 0, 0, 0], [0, 1, 0, -1], [1, 0, 1, 0], [0, 0, 0, 1]],
        _ => panic!("generator index {index} out of range 1..=4"),
    };
    ZModMatrix::from_rows(p, &rows)
}

/// `D_index^e` in closed form (negative exponents allowed).
pub fn build_d_pow(index: usize, p: Prime, e: i64) -> ZModMatrix {
    let d = build_d(index, p);
    match index {
        1 => ZModMatrix::from_rows(p, &[[1, e, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
        4 => ZModMatrix::from_rows(p, &[[1, 0, 0, 0], [0, 1, 0, -e], [e, 0, 1, 0], [0, 0, 0, 1]]),
        3 if e.rem_euclid(2) == 0 => ZModMatrix::identity(p, 4),
        3 => d,
        _ => d.pow(e.rem_euclid(4)).expect("square"),
    }
}

/// The Step-1 normal form `S(k)`.
pub fn build_s(k: ZModScalar) -> ZModMatrix {
    let p = Prime::new(k.modulus()).expect("S(k) needs a prime modulus");
    let k = k.value() as i64;
    ZModMatrix::from_rows(p, &[[1, 0, 1, 0], [0, k, 0, 1 - k], [k - 1, 0, k, 0], [0, -1, 0, 1]])
}

/// Multiplicative order of `D_index` over `F_p`.
pub fn generator_order(index: usize, p: Prime) -> u64 {
    match index {
        1 | 4 => p.get(),
        2 if p.get() == 2 => 2,
        2 => 4,
        3 => 2,
        _ => panic!("generator index {index} out of range 1..=4"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn generators_are_symplectic() {
        for p in [2, 3, 5, 7, 11] {
            let p = prime(p);
            for i in 1..=4 {
                assert_eq!(is_symplectic(&build_d(i, p)).unwrap(), Some(Sign::Plus));
                let d = build_d(i, p);
                let ord = generator_order(i, p);
                assert!(d.pow(ord as i64).unwrap().is_identity());
                for e in 1..ord {
                    assert!(!d.pow(e as i64).unwrap().is_identity());
                }
                for e in -7..7 {
                    assert_eq!(build_d_pow(i, p, e), d.pow(e).unwrap(), "D{i}^{e}");
                }
            }
            for k in 0..p.get() {
                let s = build_s(ZModScalar::new(k as i64, p.get()));
                assert_eq!(is_symplectic(&s).unwrap(), Some(Sign::Plus));
            }
        }
    }

    #[test]
    fn form_properties() {
        let p = prime(5);
        let j = form(p);
        assert_eq!(j.transpose(), j.neg());
        assert_eq!(&j * &j, ZModMatrix::identity(p, 4).neg());
    }

    #[test]
    fn signs() {
        assert_eq!(is_symplectic(&delta(prime(3))).unwrap(), Some(Sign::Minus));
        assert_eq!(is_symplectic(&delta(prime(2))).unwrap(), Some(Sign::Plus));
        assert_eq!(
            is_symplectic(&ZModMatrix::diagonal(prime(5), &[2, 1, 1, 1])).unwrap(),
            None
        );
        assert!(is_symplectic(&ZModMatrix::identity(prime(5), 2)).is_err());
    }

    #[test]
    fn residuals() {
        let p = prime(5);
        let r = six_residuals(&ZModMatrix::diagonal(p, &[2, 1, 1, 1])).unwrap();
        assert_eq!(r.map(|x| x.value()), [1, 0, 0, 0, 0, 0]);
        assert!(six_equations(&ZModMatrix::identity(p, 4)).unwrap());
        assert!(!six_equations(&ZModMatrix::zeros(p, 4, 4)).unwrap());
    }

    #[test]
    fn six_equations_exhaustive_p2() {
        let p = prime(2);
        for bits in 0u32..1 << 16 {
            let e: Vec<i64> = (0..16).map(|b| ((bits >> b) & 1) as i64).collect();
            let m = ZModMatrix::new(p, 4, 4, &e).unwrap();
            let plus = is_symplectic(&m).unwrap() == Some(Sign::Plus);
            assert_eq!(six_equations(&m).unwrap(), plus);
        }
    }

    #[test]
    fn s1_literal_and_d4_transpose() {
        let p = prime(7);
        let s1 = build_s(ZModScalar::new(1, 7));
        assert_eq!(
            s1,
            ZModMatrix::from_rows(p, &[[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, -1, 0, 1]])
        );
        let (d3, d4) = (build_d(3, p), build_d(4, p));
        assert_eq!(d4.transpose(), &(&d3 * &d4) * &d3);
    }
}
