//! Exact arithmetic in Q(ζ_r) and its real subfield K⁺.

pub mod context;
pub mod element;
pub mod prime;
pub mod residue;

pub use context::FieldContext;
pub use element::{field_arith, galois_apply, ArithOp, FieldElement};
pub use prime::{reduce_mod, split_prime, valuation, PrimeIdeal, PrimeLevel, DEFAULT_GENERATOR_BOUND};
pub use residue::{Fe, ResidueField};

use num_rational::BigRational;

/// Norm to Q over the full cyclotomic field.
pub fn norm_to_q(x: &FieldElement) -> BigRational {
    x.norm()
}

/// Norm to Q over K⁺ (x must be totally real).
pub fn norm_kplus_to_q(x: &FieldElement) -> crate::error::Result<BigRational> {
    x.norm_kplus()
}
