//! Symmetries of the fine grading of `sl(p², ℂ)` generated by tensor products of
//! generalized Pauli matrices.
//!
//! The MAD-group `G = { Ad_A : A ∈ P_p ⊗ P_p }` is generated by conjugation with
//! `A₁ = P⊗I`, `A₂ = Q⊗I`, `A₃ = I⊗P`, `A₄ = I⊗Q`. An automorphism `φ` normalizing
//! `G` permutes these generators up to phase, and the exponents of the images form a
//! 4×4 coefficient matrix `C(φ)` over `ℤ_p`. `C` is a homomorphism onto the group
//! `{ X : XᵀJX = ±J }`, with kernel `G`.
//!
//! The crate covers each stage of that correspondence with exact arithmetic:
//!
//! - [`zmod`]: residues and small dense matrices over `ℤ_p`.
//! - [`cyclo`]: the cyclotomic field `ℚ(ω_m)` and dense matrices over it.
//! - [`pauli`]: `P`, `Q`, the generators `A₁..A₄` and Pauli monomials.
//! - [`symplectic`]: membership, the generators `D₁..D₄`, and constructive
//!   decomposition of any (extended) symplectic matrix into a generator word.
//! - [`normalizer`]: the matrices `B₁..B₄`, coefficient extraction, lifting words to
//!   explicit `p²×p²` matrices, and the action on grading indices.
//! - [`oracle`]: brute-force enumeration for `p ∈ {2, 3}`.
//! - [`identities`]: a named suite of exact identities checked for a given prime.
//!
//! ```
//! use pauli_normalizer::{normalizer, symplectic, zmod::Prime};
//!
//! let p = Prime::new(3).unwrap();
//! let m = symplectic::build_d(4, p).matmul(&symplectic::build_d(2, p)).unwrap();
//! let rep = normalizer::realize(&m).unwrap();
//! assert_eq!(normalizer::coeff_matrix(&rep).unwrap(), m);
//! ```

pub mod cyclo;
pub mod error;
pub mod identities;
pub mod normalizer;
pub mod oracle;
pub mod pauli;
pub mod symplectic;
pub mod zmod;

pub use error::{Error, Result};
