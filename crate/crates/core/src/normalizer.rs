//! Automorphisms `Ad_B : X ↦ B⁻¹XB` and `Out_I ∘ Ad_B : X ↦ -(B⁻¹XB)ᵀ` of
//! `sl(p², ℂ)`, their coefficient matrices, and the lift of generator words to
//! explicit matrices `B` built from `B₁..B₄`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cyclo::{CycloMatrix, CycloNumber, MatrixFile};
use crate::error::{Error, Result};
use crate::pauli::{conductor_for, omega, GradingIndex, PauliMonomial};
use crate::symplectic::{decompose, decompose_with_sign, Generator, GeneratorWord, Sign};
use crate::zmod::{Prime, ZModMatrix};

/// Exponent of `ε` in `ℚ(ω_m)`: `ε = ω_n^{-(n-1)/2}` for odd `n`, `ε = i` for `n = 2`.
fn epsilon_exponent(n: Prime) -> i64 {
    if n.get() == 2 {
        1
    } else {
        -((n.get() as i64 - 1) / 2)
    }
}

/// `b_j = ε^j ω^{j(j-1)/2}` as a power of `ω_m`.
fn b1_exponent(n: Prime, j: i64) -> i64 {
    let step = (conductor_for(n) as u64 / n.get()) as i64;
    j * epsilon_exponent(n) + j * (j - 1) / 2 * step
}

/// `(row, col)` of the permutation matrices `B₃`, `B₄` after splitting the row index
/// `r = r₁·n + r₂` into digits.
fn permutation(n: Prime, f: impl Fn(i64, i64) -> (i64, i64)) -> CycloMatrix {
    let d = n.get() as usize;
    let m = conductor_for(n);
    let mut out = CycloMatrix::zeros(d * d, m);
    for r1 in 0..d {
        for r2 in 0..d {
            let (c1, c2) = f(r1 as i64, r2 as i64);
            let col = n.reduce(c1) as usize * d + n.reduce(c2) as usize;
            out.set(r1 * d + r2, col, CycloNumber::one(m));
        }
    }
    out
}

fn kron_identity(n: Prime, small: CycloMatrix) -> CycloMatrix {
    let i = CycloMatrix::identity(n.get() as usize, conductor_for(n));
    CycloMatrix::tensor(&small, &i).expect("same conductor")
}

/// `B₁..B₄` for `index ∈ 1..=4`.
pub fn build_b(index: usize, n: Prime) -> CycloMatrix {
    build_b_pow(index, n, 1)
}

/// `B_index^e` in closed form; negative `e` gives powers of the inverse.
///
/// `B̃₂² = n·R` with `R` the permutation `j ↦ -j`, so `B̃₂^{2q+r} = n^q R^q B̃₂^r`.
pub fn build_b_pow(index: usize, n: Prime, e: i64) -> CycloMatrix {
    let d = n.get() as usize;
    let m = conductor_for(n);
    match index {
        1 => kron_identity(
            n,
            CycloMatrix::from_fn(d, m, |r, c| {
                if r == c {
                    CycloNumber::root_of_unity(m, e * b1_exponent(n, r as i64))
                } else {
                    CycloNumber::zero(m)
                }
            }),
        ),
        2 => {
            let (q, r) = (e.div_euclid(2), e.rem_euclid(2));
            let sign = if q.rem_euclid(2) == 1 { -1 } else { 1 };
            let scale = BigRational::from_integer(BigInt::from(n.get())).pow(q as i32);
            let small = CycloMatrix::from_fn(d, m, |a, b| {
                let (a, b) = (a as i64, b as i64);
                let x = if r == 1 {
                    omega(n, sign * a * b)
                } else if n.reduce(a - sign * b) == 0 {
                    // R^q: identity for even q, j ↦ -j for odd q
                    CycloNumber::one(m)
                } else {
                    CycloNumber::zero(m)
                };
                x.scale(&scale)
            });
            kron_identity(n, small)
        }
        3 if e.rem_euclid(2) == 0 => CycloMatrix::identity(d * d, m),
        3 => permutation(n, |p1, p2| (p2, p1)),
        4 => permutation(n, |p1, p2| (p1 - e * p2, p2)),
        _ => panic!("B index {index} out of range 1..=4"),
    }
}

/// `Ad_B` (`outer = false`) or `Out_I ∘ Ad_B` (`outer = true`) on `sl(n², ℂ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismRep {
    n: Prime,
    matrix: CycloMatrix,
    outer: bool,
}

impl AutomorphismRep {
    /// Checks shape, conductor and invertibility of `matrix`.
    pub fn new(n: Prime, matrix: CycloMatrix, outer: bool) -> Result<Self> {
        let d = n.get() as usize;
        if matrix.dim() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "automorphism matrix has dim {}, expected {}",
                matrix.dim(),
                d * d
            )));
        }
        if matrix.conductor() != conductor_for(n) {
            return Err(Error::ConductorMismatch(matrix.conductor(), conductor_for(n)));
        }
        if !matrix.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(AutomorphismRep { n, matrix, outer })
    }

    fn from_parts(n: Prime, matrix: CycloMatrix, outer: bool) -> Self {
        AutomorphismRep { n, matrix, outer }
    }

    pub fn identity(n: Prime) -> Self {
        let d = n.get() as usize;
        Self::from_parts(n, CycloMatrix::identity(d * d, conductor_for(n)), false)
    }

    /// `Out_I : X ↦ -Xᵀ`.
    pub fn out_i(n: Prime) -> Self {
        AutomorphismRep {
            outer: true,
            ..Self::identity(n)
        }
    }

    pub fn order(&self) -> Prime {
        self.n
    }

    pub fn matrix(&self) -> &CycloMatrix {
        &self.matrix
    }

    pub fn is_outer(&self) -> bool {
        self.outer
    }

    /// `self ∘ other`. With `Ad_X ∘ Out_I = Out_I ∘ Ad_{X^{-⊤}}` and
    /// `Ad_X ∘ Ad_Y = Ad_{YX}`, `(Out^a Ad_X) ∘ (Out^b Ad_Y) = Out^{a+b} Ad_{Y X'}` where
    /// `X' = X^{-⊤}` if `b` is set and `X` otherwise.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch(self.n.get(), other.n.get()));
        }
        let x = if other.outer {
            self.matrix.inverse()?.transpose()
        } else {
            self.matrix.clone()
        };
        Ok(Self::from_parts(
            self.n,
            other.matrix.matmul(&x)?,
            self.outer ^ other.outer,
        ))
    }

    /// The image of `z`: `B⁻¹zB`, negated and transposed for outer automorphisms.
    pub fn apply(&self, z: &CycloMatrix) -> Result<CycloMatrix> {
        let conj = self.matrix.inverse()?.matmul(z)?.matmul(&self.matrix)?;
        Ok(if self.outer { conj.transpose().neg() } else { conj })
    }

    /// Serialize as a cyclotomic matrix file with an `outer` header.
    pub fn to_text(&self) -> String {
        MatrixFile {
            n: self.n.get(),
            matrix: self.matrix.clone(),
            extra: vec![("outer".into(), self.outer.to_string())],
        }
        .to_text()
    }

    /// Parse a cyclotomic matrix file. A missing `outer` header means inner.
    pub fn from_text(text: &str) -> Result<Self> {
        let file = MatrixFile::parse(text)?;
        let n = Prime::new(file.n)?;
        if file.matrix.conductor() != conductor_for(n) {
            return Err(Error::Parse(format!(
                "conductor {} does not match n = {} (expected {})",
                file.matrix.conductor(),
                n,
                conductor_for(n)
            )));
        }
        let mut outer = false;
        for (k, v) in &file.extra {
            match (k.as_str(), v.as_str()) {
                ("outer", "true") => outer = true,
                ("outer", "false") => outer = false,
                ("outer", _) => return Err(Error::Parse(format!("bad outer flag `{v}`"))),
                _ => return Err(Error::Parse(format!("unknown header `{k}`"))),
            }
        }
        Self::new(n, file.matrix, outer)
    }
}

/// Columns of an invertible matrix, keyed by their scaling class, for solving
/// `B·X = Y` when `X` is a generalized permutation matrix.
struct ColumnIndex<'a> {
    b: &'a CycloMatrix,
    classes: HashMap<Vec<CycloNumber>, usize>,
}

/// `(first nonzero row, column scaled so that entry is 1)`.
fn normalized_column(m: &CycloMatrix, c: usize) -> Option<(usize, Vec<CycloNumber>)> {
    let dim = m.dim();
    let f = (0..dim).find(|&r| !m.get(r, c).is_zero())?;
    let inv = m.get(f, c).inverse().expect("nonzero");
    let col = (0..dim)
        .map(|r| {
            let x = m.get(r, c);
            if x.is_zero() {
                x.clone()
            } else {
                x * &inv
            }
        })
        .collect();
    Some((f, col))
}

impl<'a> ColumnIndex<'a> {
    fn new(b: &'a CycloMatrix) -> Result<Self> {
        let mut classes = HashMap::with_capacity(b.dim());
        for s in 0..b.dim() {
            let (_, key) = normalized_column(b, s).ok_or(Error::NotInvertible)?;
            if classes.insert(key, s).is_some() {
                return Err(Error::NotInvertible);
            }
        }
        Ok(ColumnIndex { b, classes })
    }

    /// The generalized permutation `X` with `B·X = Y`: every column of `Y` must be a
    /// multiple of a column of `B`.
    fn solve(&self, y: &CycloMatrix) -> Result<CycloMatrix> {
        let dim = y.dim();
        let mut x = CycloMatrix::zeros(dim, y.conductor());
        for c in 0..dim {
            let (f, key) = normalized_column(y, c)
                .ok_or_else(|| Error::NotInNormalizer(format!("column {c} of the image is zero")))?;
            let s = *self
                .classes
                .get(&key)
                .ok_or_else(|| Error::NotInNormalizer(format!("column {c} of the image is not a monomial column")))?;
            let factor = y.get(f, c) * &self.b.get(f, s).inverse()?;
            x.set(s, c, factor);
        }
        Ok(x)
    }
}

/// `A·B` for a monomial `A`, by scaling and permuting rows of `B`.
fn monomial_times(a: &PauliMonomial, b: &CycloMatrix) -> CycloMatrix {
    let am = a.to_matrix();
    let dim = b.dim();
    let src: Vec<(usize, &CycloNumber)> = (0..dim)
        .map(|r| {
            let c = (0..dim)
                .find(|&c| !am.get(r, c).is_zero())
                .expect("monomial rows are nonzero");
            (c, am.get(r, c))
        })
        .collect();
    let mut rows = vec![Vec::new(); dim];
    for (r, (s, v)) in src.iter().enumerate() {
        rows[r] = (0..dim)
            .map(|c| {
                let x = b.get(*s, c);
                if x.is_zero() {
                    x.clone()
                } else {
                    *v * x
                }
            })
            .collect();
    }
    CycloMatrix::from_fn(dim, b.conductor(), |r, c| {
        std::mem::replace(&mut rows[r][c], CycloNumber::zero(b.conductor()))
    })
}

/// The images `φ Ad_{A_p} φ⁻¹ = Ad_{M_p}` for `p = 1..4`, recognized as monomials.
pub fn conjugated_generators(rep: &AutomorphismRep) -> Result<[PauliMonomial; 4]> {
    let n = rep.n;
    let index = ColumnIndex::new(&rep.matrix)?;
    let mut out = Vec::with_capacity(4);
    for p in 1..=4 {
        let a = PauliMonomial::generator(n, p);
        // B⁻¹ A_p B is the X with B·X = A_p·B
        let x = index.solve(&monomial_times(&a, &rep.matrix))?;
        let mono = PauliMonomial::from_matrix(n, &x).map_err(|e| match e {
            Error::NotAMonomial(msg) => Error::NotInNormalizer(format!("image of A{p}: {msg}")),
            other => other,
        })?;
        // Out_I Ad_M Out_I⁻¹ = Ad_{M^{-⊤}}
        out.push(if rep.outer { mono.inverse_transpose() } else { mono });
    }
    Ok(out.try_into().expect("four generators"))
}

/// `C(φ)`: column `p` holds the exponents of the monomial `M_p` with
/// `φ Ad_{A_p} φ⁻¹ = Ad_{M_p}`.
pub fn coeff_matrix(rep: &AutomorphismRep) -> Result<ZModMatrix> {
    let images = conjugated_generators(rep)?;
    let mut c = ZModMatrix::zeros(rep.n, 4, 4);
    for (p, mono) in images.iter().enumerate() {
        for (r, e) in mono.exponents().iter().enumerate() {
            c.set(r, p, *e as i64);
        }
    }
    Ok(c)
}

/// An automorphism whose coefficient matrix is `eval(word)`.
///
/// `C` is multiplicative and `Ad_X ∘ Ad_Y = Ad_{YX}`, so the word `g₁ ⋯ g_r` lifts
/// to `B_{g_r} ⋯ B_{g₁}`.
pub fn lift(word: &GeneratorWord) -> AutomorphismRep {
    let n = word.modulus();
    let d = n.get() as usize;
    let mut acc = CycloMatrix::identity(d * d, conductor_for(n));
    for t in word.tokens() {
        let b = build_b_pow(t.generator.index(), n, t.exponent);
        acc = &b * &acc;
    }
    AutomorphismRep::from_parts(n, acc, word.is_outer())
}

/// The lift of a single generator, `Ad_{B_g}`.
pub fn lift_generator(n: Prime, g: Generator) -> AutomorphismRep {
    AutomorphismRep::from_parts(n, build_b(g.index(), n), false)
}

/// A representative of the coset of automorphisms with coefficient matrix `m`.
pub fn realize(m: &ZModMatrix) -> Result<AutomorphismRep> {
    Ok(lift(&decompose(m)?))
}

/// As [`realize`] with the inner/outer coset chosen explicitly (needed for `p = 2`).
pub fn realize_with_sign(m: &ZModMatrix, sign: Sign) -> Result<AutomorphismRep> {
    Ok(lift(&decompose_with_sign(m, sign)?))
}

/// The index of the grading component that `rep` maps component `v` onto.
///
/// Inner: `C·v`. Outer: the transpose turns `P^iQ^j` into a multiple of `P^iQ^{-j}`,
/// and combined with `C = Δ·C(Ad_B)` this gives `-C·v`.
pub fn grading_action(rep: &AutomorphismRep, v: &GradingIndex) -> Result<GradingIndex> {
    if v.order() != rep.n {
        return Err(Error::ModulusMismatch(v.order().get(), rep.n.get()));
    }
    let c = coeff_matrix(rep)?;
    let w = c.apply(&v.values());
    let sign = if rep.outer { -1 } else { 1 };
    GradingIndex::new(rep.n, [0, 1, 2, 3].map(|i| sign * w[i] as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::generators;
    use crate::symplectic::{build_d, delta};

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    /// Coefficient matrix through explicit `B⁻¹ A_p B` and recognition.
    fn dense_coeff(rep: &AutomorphismRep) -> ZModMatrix {
        let n = rep.order();
        let mut c = ZModMatrix::zeros(n, 4, 4);
        let inner = AutomorphismRep::from_parts(n, rep.matrix().clone(), false);
        for (p, a) in generators(n).iter().enumerate() {
            let img = inner.apply(a).unwrap();
            let mut mono = PauliMonomial::from_matrix(n, &img).unwrap();
            if rep.is_outer() {
                let t = img.inverse().unwrap().transpose();
                mono = PauliMonomial::from_matrix(n, &t).unwrap();
            }
            for (r, e) in mono.exponents().iter().enumerate() {
                c.set(r, p, *e as i64);
            }
        }
        c
    }

    #[test]
    fn generator_images() {
        for p in [2, 3, 5] {
            let n = prime(p);
            for i in 1..=4 {
                let rep = lift_generator(n, Generator::from_index(i).unwrap());
                assert_eq!(coeff_matrix(&rep).unwrap(), build_d(i, n), "p={p} B{i}");
                assert_eq!(dense_coeff(&rep), build_d(i, n));
            }
        }
    }

    #[test]
    fn b_powers_close_form() {
        for p in [2, 3, 5] {
            let n = prime(p);
            for i in 1..=4 {
                let b = build_b(i, n);
                let inv = b.inverse().unwrap();
                for e in -3..=5i64 {
                    let base = if e < 0 { &inv } else { &b };
                    let expect = (0..e.abs()).fold(CycloMatrix::identity(b.dim(), b.conductor()), |acc, _| &acc * base);
                    assert_eq!(build_b_pow(i, n, e), expect, "p={p} B{i}^{e}");
                }
            }
        }
    }

    #[test]
    fn conjugation_identities() {
        let n = prime(3);
        let [a1, a2, _, _] = generators(n);
        let b2 = build_b(2, n);
        assert_eq!(&(&b2.inverse().unwrap() * &a2) * &b2, a1);

        let n5 = prime(5);
        let [_, a2, _, a4] = generators(n5);
        let b4 = build_b(4, n5);
        let q_inv_q = &a2.inverse().unwrap() * &a4;
        assert_eq!(&(&b4.inverse().unwrap() * &a4) * &b4, q_inv_q);
    }

    #[test]
    fn out_i_and_group_elements() {
        for p in [2, 3, 5] {
            let n = prime(p);
            assert_eq!(coeff_matrix(&AutomorphismRep::out_i(n)).unwrap(), delta(n));
            let [_, _, a3, _] = generators(n);
            let rep = AutomorphismRep::new(n, a3, false).unwrap();
            assert!(coeff_matrix(&rep).unwrap().is_identity());
        }
    }

    #[test]
    fn lift_examples() {
        let n = prime(3);
        let rep = lift(&GeneratorWord::parse(n, "D1").unwrap());
        assert_eq!(rep.matrix(), &build_b(1, n));
        assert!(coeff_matrix(&lift(&GeneratorWord::empty(n))).unwrap().is_identity());
        let out = lift(&GeneratorWord::parse(n, "OUT").unwrap());
        assert!(out.is_outer());
        assert_eq!(coeff_matrix(&out).unwrap(), delta(n));
    }

    #[test]
    fn lift_matches_evaluation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [2, 3, 5] {
            let n = prime(p);
            for i in 0..8 {
                let w = GeneratorWord::random(&mut rng, n, 3 + i, i % 2 == 0);
                let rep = lift(&w);
                assert_eq!(coeff_matrix(&rep).unwrap(), w.evaluate());
                if p <= 3 {
                    assert_eq!(dense_coeff(&rep), w.evaluate());
                }
            }
        }
    }

    #[test]
    fn compose_parity_and_homomorphism() {
        let n = prime(3);
        let reps = [
            lift(&GeneratorWord::parse(n, "D1 D2").unwrap()),
            lift(&GeneratorWord::parse(n, "OUT D4 D3").unwrap()),
            lift(&GeneratorWord::parse(n, "OUT D2^-1").unwrap()),
            lift(&GeneratorWord::parse(n, "D4^2 D1").unwrap()),
        ];
        for a in &reps {
            for b in &reps {
                let ab = a.compose(b).unwrap();
                assert_eq!(ab.is_outer(), a.is_outer() ^ b.is_outer());
                let lhs = coeff_matrix(&ab).unwrap();
                assert_eq!(lhs, &coeff_matrix(a).unwrap() * &coeff_matrix(b).unwrap());
                // composition of the maps themselves
                let z = generators(n)[1].clone();
                assert_eq!(ab.apply(&z).unwrap(), a.apply(&b.apply(&z).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn non_normalizer_rejected() {
        let n = prime(3);
        let m = CycloMatrix::from_fn(9, 3, |r, c| {
            CycloNumber::from_int(3, if r == c { 2 } else { (r * c % 3) as i64 })
        });
        let rep = AutomorphismRep::new(n, m, false).unwrap();
        assert!(matches!(coeff_matrix(&rep), Err(Error::NotInNormalizer(_))));
        let singular = CycloMatrix::zeros(9, 3);
        assert_eq!(AutomorphismRep::new(n, singular, false), Err(Error::NotInvertible));
    }

    #[test]
    fn realize_round_trip() {
        let n = prime(3);
        let d2 = build_d(2, n);
        assert_eq!(coeff_matrix(&realize(&d2).unwrap()).unwrap(), d2);
        let id = realize(&ZModMatrix::identity(n, 4)).unwrap();
        assert!(id.matrix().is_identity());
        let p2 = prime(2);
        let out = realize_with_sign(&ZModMatrix::identity(p2, 4), Sign::Minus).unwrap();
        assert!(out.is_outer());
    }

    #[test]
    fn grading_action_examples() {
        let n = prime(3);
        let v = GradingIndex::new(n, [1, 0, 0, 0]).unwrap();
        assert_eq!(grading_action(&AutomorphismRep::identity(n), &v).unwrap(), v);
        let b3 = lift_generator(n, Generator::D3);
        assert_eq!(grading_action(&b3, &v).unwrap().values(), [0, 0, 1, 0]);
        for rep in [
            lift(&GeneratorWord::parse(n, "OUT D1 D4").unwrap()),
            lift(&GeneratorWord::parse(n, "D2 D4^2").unwrap()),
        ] {
            for v in GradingIndex::all(n).step_by(7) {
                let img = rep.apply(&v.monomial().to_matrix()).unwrap();
                let mono = PauliMonomial::from_matrix(n, &img).unwrap();
                assert_eq!(mono.exponents(), grading_action(&rep, &v).unwrap().values());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let n = prime(2);
        let rep = lift(&GeneratorWord::parse(n, "OUT D1 D2").unwrap());
        let text = rep.to_text();
        let back = AutomorphismRep::from_text(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_text(), text);
        assert!(AutomorphismRep::from_text("n: 4\nm: 4\ndim: 1\n1,0\n").is_err());
        assert!(AutomorphismRep::from_text("n: 3\nm: 5\ndim: 1\n1,0,0,0\n").is_err());
    }
}
