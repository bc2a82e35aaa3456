//! Brute-force ground truth for small primes: enumeration of `{X : XᵀJX = ±J}` by
//! column extension, breadth-first closure of generating sets, and the order formula.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symplectic::{build_d, delta, Sign};
use crate::zmod::{Prime, ZModMatrix};

/// Which cosets a table covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignSet {
    Plus,
    Minus,
    Both,
}

impl SignSet {
    fn signs(self) -> &'static [Sign] {
        match self {
            SignSet::Plus => &[Sign::Plus],
            SignSet::Minus => &[Sign::Minus],
            SignSet::Both => &[Sign::Plus, Sign::Minus],
        }
    }
}

/// A finite set of 4×4 matrices, each tagged with its coset.
///
/// The tag matters only for `p = 2`, where `-J = J` and the two cosets contain the
/// same matrices; elsewhere it agrees with [`crate::symplectic::is_symplectic`].
#[derive(Debug, Clone)]
pub struct GroupTable {
    p: Prime,
    sign: SignSet,
    elements: HashSet<(Sign, ZModMatrix)>,
}

impl GroupTable {
    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn sign(&self) -> SignSet {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, sign: Sign, m: &ZModMatrix) -> bool {
        self.elements.contains(&(sign, m.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Sign, ZModMatrix)> {
        self.elements.iter()
    }

    /// Matrices only, forgetting the coset tag.
    pub fn matrices(&self) -> HashSet<ZModMatrix> {
        self.elements.iter().map(|(_, m)| m.clone()).collect()
    }

    /// `p <p>` and `count <N>` header lines, then one `<+1|-1> <16 entries>` line per
    /// element in sorted order.
    pub fn dump(&self) -> String {
        let sorted: BTreeSet<_> = self.elements.iter().collect();
        let mut s = format!("p {}\ncount {}\n", self.p, self.len());
        for (sign, m) in sorted {
            let entries: Vec<String> = m.entries().iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{sign} {}", entries.join(" "));
        }
        s
    }
}

/// `c_aᵀ J c_b` for two column vectors.
fn pairing(p: u64, x: &[u64; 4], y: &[u64; 4]) -> u64 {
    (x[0] * y[1] + (p - x[1]) * y[0] + x[2] * y[3] + (p - x[3]) * y[2]) % p
}

/// Every `M` with `MᵀJM = ±J` for `p ∈ {2, 3}`, found by extending column tuples
/// `(c₁, c₂, c₃, c₄)` one column at a time under the pairing constraints
/// `⟨c₁,c₂⟩ = ⟨c₃,c₄⟩ = ±1` and all cross pairings zero.
pub fn enumerate_by_form(p: Prime, sign: SignSet) -> Result<GroupTable> {
    let q = p.get();
    if q > 3 {
        return Err(Error::Unsupported(format!(
            "exhaustive enumeration needs p <= 3, got {q}"
        )));
    }
    let vectors: Vec<[u64; 4]> = (0..q.pow(4))
        .map(|x| [x / (q * q * q), (x / (q * q)) % q, (x / q) % q, x % q])
        .collect();
    let mut elements = HashSet::new();
    for &s in sign.signs() {
        let target = if s == Sign::Plus { 1 } else { q - 1 };
        for c1 in &vectors {
            for c2 in vectors.iter().filter(|c2| pairing(q, c1, c2) == target) {
                for c3 in vectors
                    .iter()
                    .filter(|c3| pairing(q, c1, c3) == 0 && pairing(q, c2, c3) == 0)
                {
                    for c4 in vectors
                        .iter()
                        .filter(|c4| pairing(q, c1, c4) == 0 && pairing(q, c2, c4) == 0 && pairing(q, c3, c4) == target)
                    {
                        let mut m = ZModMatrix::zeros(p, 4, 4);
                        for (c, col) in [c1, c2, c3, c4].iter().enumerate() {
                            for r in 0..4 {
                                m.set(r, c, col[r] as i64);
                            }
                        }
                        elements.insert((s, m));
                    }
                }
            }
        }
    }
    Ok(GroupTable { p, sign, elements })
}

/// Closure of tagged generators under left multiplication, starting from `(+, I)`.
fn closure(p: Prime, gens: &[(Sign, ZModMatrix)], sign: SignSet) -> GroupTable {
    let start = (Sign::Plus, ZModMatrix::identity(p, 4));
    let mut elements = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, x)) = queue.pop_front() {
        for (gs, g) in gens {
            let next = (gs.times(s), g * &x);
            if elements.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    GroupTable { p, sign, elements }
}

/// The subgroup generated by `generators`, by breadth-first left multiplication.
/// All generators must be invertible 4×4 matrices over the same field.
pub fn closure_bfs(generators: &[ZModMatrix]) -> Result<GroupTable> {
    let p = generators
        .first()
        .map(ZModMatrix::modulus)
        .ok_or_else(|| Error::Unsupported("empty generating set".into()))?;
    for g in generators {
        if g.modulus() != p {
            return Err(Error::ModulusMismatch(g.modulus().get(), p.get()));
        }
        if g.rows() != 4 || g.cols() != 4 {
            return Err(Error::DimensionMismatch("generators must be 4x4".into()));
        }
        g.inverse()?;
    }
    let tagged: Vec<_> = generators.iter().map(|g| (Sign::Plus, g.clone())).collect();
    Ok(closure(p, &tagged, SignSet::Plus))
}

/// Closure of `D₁..D₄` together with `Δ = diag(-1,1,-1,1)` tagged as the `-J` coset.
pub fn closure_extended(p: Prime) -> GroupTable {
    let mut gens: Vec<_> = (1..=4).map(|i| (Sign::Plus, build_d(i, p))).collect();
    gens.push((Sign::Minus, delta(p)));
    closure(p, &gens, SignSet::Both)
}

/// `|Sp(4, F_p)| = p⁴(p²-1)(p⁴-1)`.
pub fn order_formula(p: Prime) -> u128 {
    let p = p.get() as u128;
    p.pow(4) * (p * p - 1) * (p.pow(4) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::is_symplectic;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn generators(p: Prime) -> Vec<ZModMatrix> {
        (1..=4).map(|i| build_d(i, p)).collect()
    }

    #[test]
    fn order_values() {
        assert_eq!(order_formula(prime(2)), 720);
        assert_eq!(order_formula(prime(3)), 51840);
        assert_eq!(order_formula(prime(5)), 625 * 24 * 624);
    }

    #[test]
    fn p2_tables() {
        let p = prime(2);
        let plus = enumerate_by_form(p, SignSet::Plus).unwrap();
        assert_eq!(plus.len(), 720);
        // independent predicate scan over all 2^16 matrices
        let scanned = (0u32..1 << 16)
            .filter(|bits| {
                let e: Vec<i64> = (0..16).map(|b| ((bits >> b) & 1) as i64).collect();
                is_symplectic(&ZModMatrix::new(p, 4, 4, &e).unwrap()).unwrap() == Some(Sign::Plus)
            })
            .count();
        assert_eq!(scanned, 720);
        assert_eq!(enumerate_by_form(p, SignSet::Both).unwrap().len(), 1440);
        let bfs = closure_bfs(&generators(p)).unwrap();
        assert_eq!(bfs.matrices(), plus.matrices());
        assert_eq!(closure_extended(p).len(), 1440);
    }

    #[test]
    fn right_closure_agrees_p2() {
        let p = prime(2);
        let gens = generators(p);
        let mut seen = HashSet::from([ZModMatrix::identity(p, 4)]);
        let mut queue = VecDeque::from([ZModMatrix::identity(p, 4)]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = &x * g;
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        assert_eq!(seen, closure_bfs(&gens).unwrap().matrices());
    }

    #[test]
    fn small_closures() {
        let p = prime(2);
        assert_eq!(closure_bfs(&[build_d(1, p), build_d(2, p)]).unwrap().len(), 6);
        assert_eq!(closure_bfs(&[ZModMatrix::identity(p, 4)]).unwrap().len(), 1);
        assert!(closure_bfs(&[ZModMatrix::zeros(p, 4, 4)]).is_err());
        assert!(matches!(
            enumerate_by_form(prime(5), SignSet::Plus),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn minus_coset_is_delta_translate_p3() {
        let p = prime(3);
        let plus = enumerate_by_form(p, SignSet::Plus).unwrap();
        let minus = enumerate_by_form(p, SignSet::Minus).unwrap();
        assert_eq!(plus.len(), 51840);
        let d = delta(p);
        let translated: HashSet<_> = plus.matrices().iter().map(|m| &d * m).collect();
        assert_eq!(translated, minus.matrices());
    }

    #[test]
    fn dump_format() {
        let t = closure_bfs(&[build_d(3, prime(2))]).unwrap();
        let text = t.dump();
        assert!(text.starts_with("p 2\ncount 2\n"));
        assert!(text.contains("+1 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1\n"));
        assert!(text.contains("+1 0 0 1 0 0 0 0 1 1 0 0 0 0 1 0 0\n"));
    }
}
