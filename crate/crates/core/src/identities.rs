//! A named suite of exact identities relating `P`, `Q`, `A₁..A₄`, `B₁..B₄`,
//! `D₁..D₄`, `Out_I` and `S(k)` for one prime.

use crate::cyclo::{CycloMatrix, CycloNumber};
use crate::error::{Error, Result};
use crate::normalizer::{build_b, build_b_pow, coeff_matrix, lift_generator, AutomorphismRep};
use crate::pauli::{build_p, build_q, conductor_for, generators, omega};
use crate::symplectic::{build_d, build_d_pow, build_s, delta, form, is_symplectic, step2_sk_word, Generator, Sign};
use crate::zmod::{Prime, ZModMatrix, ZModScalar};

/// Largest prime accepted by [`run`].
pub const MAX_PRIME: u64 = 11;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn check(&mut self, name: impl Into<String>, outcome: Result<bool>) {
        self.checks.push(Check {
            name: name.into(),
            passed: outcome.unwrap_or(false),
        });
    }
}

fn mat_pow(a: &CycloMatrix, e: u64) -> CycloMatrix {
    (0..e).fold(CycloMatrix::identity(a.dim(), a.conductor()), |acc, _| &acc * a)
}

/// `B⁻¹·x·B` using the closed-form inverse of `B_index`.
fn conj_b(index: usize, n: Prime, x: &CycloMatrix) -> CycloMatrix {
    &(&build_b_pow(index, n, -1) * x) * &build_b(index, n)
}

fn tensor(a: &CycloMatrix, b: &CycloMatrix) -> CycloMatrix {
    CycloMatrix::tensor(a, b).expect("same conductor")
}

/// Run every identity for `p ≤ 11`.
pub fn run(p: Prime) -> Result<Vec<Check>> {
    if p.get() > MAX_PRIME {
        return Err(Error::Unsupported(format!(
            "identity suite supports p <= {MAX_PRIME}, got {p}"
        )));
    }
    let n = p.get();
    let m = conductor_for(p);
    let mut s = Suite { checks: Vec::new() };

    let (pm, qm) = (build_p(p), build_q(p));
    let i1 = CycloMatrix::identity(n as usize, m);
    s.check("P^n = I", Ok(mat_pow(&pm, n).is_identity()));
    s.check("Q^n = I", Ok(mat_pow(&qm, n).is_identity()));
    s.check("QP = w PQ", Ok(&qm * &pm == (&pm * &qm).scale(&omega(p, 1))));

    let a = generators(p);
    let w_inv = omega(p, -1);
    let comm = |x: usize, y: usize| &a[x] * &a[y];
    s.check("(1) A1 A2 = w^-1 A2 A1", Ok(comm(0, 1) == comm(1, 0).scale(&w_inv)));
    s.check("(2) A3 A4 = w^-1 A4 A3", Ok(comm(2, 3) == comm(3, 2).scale(&w_inv)));
    for (label, x, y) in [("(3)", 0, 2), ("(4)", 0, 3), ("(5)", 1, 2), ("(6)", 1, 3)] {
        s.check(
            format!("{label} A{} A{} = A{} A{}", x + 1, y + 1, y + 1, x + 1),
            Ok(comm(x, y) == comm(y, x)),
        );
    }

    let q_inv = qm.inverse()?;
    let eps_pq = (&pm * &qm).scale(&CycloNumber::root_of_unity(
        m,
        if n == 2 { 1 } else { -((n as i64 - 1) / 2) },
    ));
    s.check(
        "B1^-1 (Q x I) B1 = eps PQ x I",
        Ok(conj_b(1, p, &a[1]) == tensor(&eps_pq, &i1)),
    );
    s.check(
        "B2^-1 (P x I) B2 = Q^-1 x I",
        Ok(conj_b(2, p, &a[0]) == tensor(&q_inv, &i1)),
    );
    s.check("B2^-1 (Q x I) B2 = P x I", Ok(conj_b(2, p, &a[1]) == a[0]));
    s.check("B3 B3 = I", Ok((&build_b(3, p) * &build_b(3, p)).is_identity()));
    s.check(
        "B3^-1 (K x L) B3 = L x K",
        Ok(conj_b(3, p, &tensor(&(&pm * &qm), &q_inv)) == tensor(&q_inv, &(&pm * &qm))),
    );
    s.check("B4^-1 (P x I) B4 = P x P", Ok(conj_b(4, p, &a[0]) == tensor(&pm, &pm)));
    s.check(
        "B4^-1 (I x Q) B4 = Q^-1 x Q",
        Ok(conj_b(4, p, &a[3]) == tensor(&q_inv, &qm)),
    );

    for g in Generator::ALL {
        let i = g.index();
        s.check(
            format!("C(Ad_B{i}) = D{i}"),
            coeff_matrix(&lift_generator(p, g)).map(|c| c == build_d(i, p)),
        );
    }
    s.check(
        "C(Out_I) = diag(-1,1,-1,1)",
        coeff_matrix(&AutomorphismRep::out_i(p)).map(|c| c == delta(p)),
    );
    let d = delta(p);
    let j = form(p);
    s.check(
        "diag(-1,1,-1,1)^T J diag(-1,1,-1,1) = -J",
        Ok(&(&d.transpose() * &j) * &d == j.neg()),
    );

    for i in 1..=4 {
        s.check(
            format!("D{i} in Sp(4)"),
            is_symplectic(&build_d(i, p)).map(|x| x == Some(Sign::Plus)),
        );
    }
    let (d3, d4) = (build_d(3, p), build_d(4, p));
    s.check("D4^T = D3 D4 D3", Ok(d4.transpose() == &(&d3 * &d4) * &d3));
    s.check(
        "D4^j closed form",
        Ok((0..n as i64).all(|e| d4.pow(e).map(|x| x == build_d_pow(4, p, e)).unwrap_or(false))),
    );
    let step2 = (0..n as i64).all(|k| {
        let ks = ZModScalar::new(k, n);
        let lhs = &(&(&j.transpose() * &d4.pow(1 - k).expect("square").transpose()) * &j) * &d4.transpose();
        lhs == build_s(ks)
    });
    s.check("J^T (D4^(1-k))^T J D4^T = S(k) for all k", Ok(step2));
    let words = (0..n as i64).all(|k| {
        let ks = ZModScalar::new(k, n);
        step2_sk_word(ks).evaluate() == build_s(ks)
    });
    s.check("step-2 word evaluates to S(k) for all k", Ok(words));
    s.check(
        "S(k) in Sp(4) for all k",
        Ok((0..n as i64).all(|k| is_symplectic(&build_s(ZModScalar::new(k, n))).ok() == Some(Some(Sign::Plus)))),
    );
    s.check("J^2 = -I", Ok(&j * &j == ZModMatrix::identity(p, 4).neg()));
    Ok(s.checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_small_primes() {
        for p in [2, 3, 5] {
            let checks = run(Prime::new(p).unwrap()).unwrap();
            assert!(checks.len() >= 25);
            for c in &checks {
                assert!(c.passed, "p={p}: {}", c.name);
            }
        }
    }

    #[test]
    fn rejects_large_primes() {
        assert!(matches!(run(Prime::new(13).unwrap()), Err(Error::Unsupported(_))));
    }
}
