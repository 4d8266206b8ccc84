//! Exact computations in the tensor algebra of a free module over ℚ, ℤ or F_p:
//! random-to-top operators, their interior-product factorizations, graded
//! spans of subalgebras, and extensional checks of the kernel descriptions.

pub mod error;
pub mod operators;
pub mod scalars;
pub mod spans;
pub mod tensor;
pub mod verify;

pub(crate) mod linalg;

pub use error::{Error, Result};
pub use operators::{
    apply_cg, apply_partial, apply_partial_prime, apply_t, apply_t_prime, apply_tn_prime, comm,
    scomm, Functional,
};
pub use scalars::{ring_parse, Prime, RingSpec, Scalar};
pub use tensor::{format_tensor, parse_tensor, Tensor, Word};
