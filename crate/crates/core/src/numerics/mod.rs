//! Dense kernels, activations, the loss, and a finite-difference gradient
//! checker used to validate every hand-written backward pass.

mod activation;
mod gradcheck;
mod real;
mod tensor;

pub use activation::{cross_entropy, dsigmoid_from_output, dtanh_from_output, sigmoid, softmax, PROB_FLOOR};
pub use gradcheck::{finite_diff_grad, relative_error, DEFAULT_EPS};
pub use real::Real;
pub use tensor::Tensor2;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value at index {index} of {what}")]
    NonFinite { what: String, index: usize },
    #[error("class index {index} out of range for {len} classes")]
    IndexOutOfRange { index: usize, len: usize },
}
