use std::fmt;

use crate::error::{Error, Result};
use crate::zmod::{Prime, ZModMatrix, ZModScalar};

/// `T = (1 1; 0 1)` or `S = (0 1; -1 0)`, the generators of `SL(2, F_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sl2Gen {
    T,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2Token {
    pub generator: Sl2Gen,
    pub exponent: i64,
}

impl Sl2Token {
    fn new(generator: Sl2Gen, exponent: i64) -> Self {
        Sl2Token { generator, exponent }
    }

    pub fn matrix(self, p: Prime) -> ZModMatrix {
        match self.generator {
            Sl2Gen::T => ZModMatrix::from_rows(p, &[[1, self.exponent], [0, 1]]),
            Sl2Gen::S => s_matrix(p).pow(self.exponent.rem_euclid(4)).expect("square"),
        }
    }
}

impl fmt::Display for Sl2Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.generator {
            Sl2Gen::T => "T",
            Sl2Gen::S => "S",
        };
        if self.exponent == 1 {
            write!(f, "{g}")
        } else {
            write!(f, "{g}^{}", self.exponent)
        }
    }
}

pub(crate) fn s_matrix(p: Prime) -> ZModMatrix {
    ZModMatrix::from_rows(p, &[[0, 1], [-1, 0]])
}

fn check_2x2(a: &ZModMatrix) -> Result<()> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected 2x2, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Product of the tokens in order.
pub fn eval_sl2(p: Prime, word: &[Sl2Token]) -> ZModMatrix {
    word.iter()
        .fold(ZModMatrix::identity(p, 2), |acc, t| &acc * &t.matrix(p))
}

/// A word in `T^x`, `S^e` whose product is `a`.
///
/// `a` is reduced to the identity by left multiplications: an `S` when `c = 0`, then
/// `T^x` to make the top-left entry 1, `S·T^c·S⁻¹ = (1 0; -c 1)` to clear `c`, and
/// `T^{-b}` to clear `b`. The word is the inverses of those steps in order.
pub fn sl2_word(a: &ZModMatrix) -> Result<Vec<Sl2Token>> {
    check_2x2(a)?;
    let p = a.modulus();
    let det = a.det()?;
    if det.value() != 1 {
        return Err(Error::NotInSl2(det.value()));
    }
    if a.is_identity() {
        return Ok(Vec::new());
    }
    if a.get(1, 0) == 0 && a.get(0, 0) == 1 {
        return Ok(vec![Sl2Token::new(Sl2Gen::T, a.scalar(0, 1).signed())]);
    }
    for e in [1, -1, 2] {
        let t = Sl2Token::new(Sl2Gen::S, e);
        if t.matrix(p) == *a {
            return Ok(vec![t]);
        }
    }
    let mut cur = a.clone();
    let mut ops = Vec::new();
    let mut apply = |cur: &mut ZModMatrix, t: Sl2Token| {
        *cur = &t.matrix(p) * cur;
        ops.push(t);
    };
    if cur.get(1, 0) == 0 {
        apply(&mut cur, Sl2Token::new(Sl2Gen::S, 1));
    }
    let c = cur.scalar(1, 0);
    let x = (ZModScalar::one(p.get()) - cur.scalar(0, 0)) * c.inverse()?;
    if !x.is_zero() {
        apply(&mut cur, Sl2Token::new(Sl2Gen::T, x.signed()));
    }
    let c = cur.scalar(1, 0).signed();
    apply(&mut cur, Sl2Token::new(Sl2Gen::S, -1));
    apply(&mut cur, Sl2Token::new(Sl2Gen::T, c));
    apply(&mut cur, Sl2Token::new(Sl2Gen::S, 1));
    let b = cur.scalar(0, 1).signed();
    if b != 0 {
        apply(&mut cur, Sl2Token::new(Sl2Gen::T, -b));
    }
    debug_assert!(cur.is_identity());
    Ok(ops
        .into_iter()
        .map(|t| Sl2Token::new(t.generator, -t.exponent))
        .collect())
}

/// Target shape of [`lemma_bcde`]: side `I` gives `diag(1, k)`, side `Ii` gives `diag(k, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    I,
    Ii,
}

fn diag2(p: Prime, x: ZModScalar, y: ZModScalar) -> ZModMatrix {
    ZModMatrix::diagonal(p, &[x.signed(), y.signed()])
}

fn entries(a: &ZModMatrix) -> [ZModScalar; 4] {
    [a.scalar(0, 0), a.scalar(0, 1), a.scalar(1, 0), a.scalar(1, 1)]
}

/// Side (i) with `a ≠ 0`.
fn side_i_direct(m: &ZModMatrix) -> (ZModMatrix, ZModMatrix) {
    let p = m.modulus();
    let [a, b, c, _] = entries(m);
    let k = m.det().expect("2x2");
    let ai = a.inverse().expect("pivot a is nonzero");
    let b1 = diag2(p, ai, a);
    let b2 = ZModMatrix::from_rows(p, &[[1, 0], [(-(a * c)).signed(), 1]]);
    let b21 = &b2 * &b1;
    if k.is_zero() {
        let c_mat = ZModMatrix::from_rows(p, &[[1, (-(ai * b)).signed()], [0, 1]]);
        (b21, c_mat)
    } else {
        let ki = k.inverse().expect("k is nonzero");
        let b3 = ZModMatrix::from_rows(p, &[[1, (-(b * ai * ki)).signed()], [0, 1]]);
        (&b3 * &b21, ZModMatrix::identity(p, 2))
    }
}

/// Side (ii) with `det = 0` and `d ≠ 0`.
fn side_ii_direct_singular(m: &ZModMatrix) -> (ZModMatrix, ZModMatrix) {
    let p = m.modulus();
    let [_, b, c, d] = entries(m);
    let di = d.inverse().expect("pivot d is nonzero");
    let d2 = ZModMatrix::from_rows(p, &[[1, (-(b * d)).signed()], [0, 1]]);
    let e = ZModMatrix::from_rows(p, &[[1, 0], [(-(c * di)).signed(), 1]]);
    (&d2 * &diag2(p, d, di), e)
}

/// Try `A·S`, `S·A`, `S·A·S` in that order and run `direct` on the first whose pivot is
/// nonzero, folding the `S` factors back into the returned pair.
fn with_fallback(
    m: &ZModMatrix,
    pivot: (usize, usize),
    direct: fn(&ZModMatrix) -> (ZModMatrix, ZModMatrix),
) -> (ZModMatrix, ZModMatrix) {
    if m.get(pivot.0, pivot.1) != 0 {
        return direct(m);
    }
    let s = s_matrix(m.modulus());
    for (pre, post) in [(false, true), (true, false), (true, true)] {
        let mut t = m.clone();
        if pre {
            t = &s * &t;
        }
        if post {
            t = &t * &s;
        }
        if t.get(pivot.0, pivot.1) != 0 {
            let (mut l, mut r) = direct(&t);
            if pre {
                l = &l * &s;
            }
            if post {
                r = &s * &r;
            }
            return (l, r);
        }
    }
    unreachable!("a nonzero 2x2 matrix has a nonzero entry reachable by S-moves")
}

/// Side (i) when `det ≠ 0`: keep the right factor at `I₂`. If `a = 0` then `c ≠ 0`
/// and `S·A` has top-left entry `c`.
fn side_i_nonsingular(m: &ZModMatrix) -> ZModMatrix {
    if m.get(0, 0) != 0 {
        return side_i_direct(m).0;
    }
    let s = s_matrix(m.modulus());
    let (b, _) = side_i_direct(&(&s * m));
    &b * &s
}

/// `(L, R)` in `SL(2, F_p)` with `L·A·R = diag(1, k)` (side `I`) or `diag(k, 1)`
/// (side `Ii`), `k = det A`. When `k ≠ 0`, `R = I₂`.
pub fn lemma_bcde(a: &ZModMatrix, side: Side) -> Result<(ZModMatrix, ZModMatrix)> {
    check_2x2(a)?;
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let p = a.modulus();
    let k = a.det()?;
    let out = match (side, k.is_zero()) {
        (Side::I, false) => (side_i_nonsingular(a), ZModMatrix::identity(p, 2)),
        (Side::I, true) => with_fallback(a, (0, 0), side_i_direct),
        (Side::Ii, false) => {
            let scale = diag2(p, k, k.inverse()?);
            (&scale * &side_i_nonsingular(a), ZModMatrix::identity(p, 2))
        }
        (Side::Ii, true) => with_fallback(a, (1, 1), side_ii_direct_singular),
    };
    debug_assert_eq!(&(&out.0 * a) * &out.1, {
        let one = ZModScalar::one(p.get());
        match side {
            Side::I => diag2(p, one, k),
            Side::Ii => diag2(p, k, one),
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn all_2x2(p: Prime) -> impl Iterator<Item = ZModMatrix> {
        let q = p.get() as i64;
        (0..q.pow(4)).map(move |x| ZModMatrix::from_rows(p, &[[x % q, (x / q) % q], [(x / q / q) % q, x / q / q / q]]))
    }

    #[test]
    fn sl2_examples() {
        let p = prime(7);
        let t = ZModMatrix::from_rows(p, &[[1, 1], [0, 1]]);
        assert_eq!(sl2_word(&t).unwrap(), vec![Sl2Token::new(Sl2Gen::T, 1)]);
        assert!(sl2_word(&ZModMatrix::identity(p, 2)).unwrap().is_empty());
        assert_eq!(sl2_word(&ZModMatrix::diagonal(p, &[2, 1])), Err(Error::NotInSl2(2)));
    }

    #[test]
    fn sl2_exhaustive_small_primes() {
        for p in [2, 3, 5, 7] {
            let p = prime(p);
            let mut count = 0;
            for a in all_2x2(p).filter(|a| a.det().unwrap().value() == 1) {
                let w = sl2_word(&a).unwrap();
                assert_eq!(eval_sl2(p, &w), a);
                assert!(w.len() <= 6);
                count += 1;
            }
            let q = p.get() as usize;
            assert_eq!(count, q * (q * q - 1));
        }
    }

    #[test]
    fn lemma_examples() {
        let p = prime(5);
        let i2 = ZModMatrix::identity(p, 2);
        assert_eq!(lemma_bcde(&i2, Side::I).unwrap(), (i2.clone(), i2.clone()));

        let s = s_matrix(p);
        let (b, c) = lemma_bcde(&s, Side::I).unwrap();
        assert_eq!(&(&b * &s) * &c, i2);
        assert!(c.is_identity());

        let p3 = prime(3);
        let a = ZModMatrix::from_rows(p3, &[[1, 1], [1, 1]]);
        let (b, c) = lemma_bcde(&a, Side::I).unwrap();
        assert_eq!(&(&b * &a) * &c, ZModMatrix::diagonal(p3, &[1, 0]));

        assert_eq!(
            lemma_bcde(&ZModMatrix::zeros(p, 2, 2), Side::Ii),
            Err(Error::ZeroMatrix)
        );
    }

    #[test]
    fn lemma_exhaustive() {
        for p in [2, 3, 5] {
            let p = prime(p);
            for a in all_2x2(p).filter(|a| !a.is_zero()) {
                let k = a.det().unwrap().signed();
                for (side, target) in [(Side::I, [1, k]), (Side::Ii, [k, 1])] {
                    let (l, r) = lemma_bcde(&a, side).unwrap();
                    assert_eq!(l.det().unwrap().value(), 1);
                    assert_eq!(r.det().unwrap().value(), 1);
                    assert_eq!(&(&l * &a) * &r, ZModMatrix::diagonal(p, &target), "{a:?} {side:?}");
                    if k != 0 {
                        assert!(r.is_identity());
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn sl2_round_trip_p7(x in 0i64..7, y in 0i64..7, z in 0i64..7, flip in any::<bool>()) {
            let p = prime(7);
            // (x y; z w) with w solved from det = 1 when x ≠ 0, otherwise (0 y; -y⁻¹ z)
            let a = if x != 0 && !flip {
                let xi = ZModScalar::new(x, 7).inverse().unwrap();
                let w = (ZModScalar::new(1 + y * z, 7) * xi).signed();
                ZModMatrix::from_rows(p, &[[x, y], [z, w]])
            } else {
                let y = if y == 0 { 1 } else { y };
                let yi = ZModScalar::new(y, 7).inverse().unwrap().signed();
                ZModMatrix::from_rows(p, &[[0, y], [-yi, z]])
            };
            prop_assert_eq!(eval_sl2(p, &sl2_word(&a).unwrap()), a);
        }
    }
}
