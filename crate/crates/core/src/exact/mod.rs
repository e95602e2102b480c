//! Exact cyclotomic arithmetic, exact linear algebra, and a differentiable
//! expression DAG with randomized polynomial-identity testing.

pub mod cyclo;
pub mod expr;
pub mod matrix;

pub use cyclo::{euler_phi, rat_frac, rat_i64, Cyclo, Rat};
pub use expr::{expr_equal_randomized, expr_is_zero, EvalError, Expr, PitError};
pub use matrix::Mat;
