//! Instance parsing and command dispatch for the adjoint-kernel
//! binary; kept as a library so integration and acceptance tests can
//! drive the exact same code paths.

pub mod commands;
pub mod instance;

/// Exit code for a mathematical check that ran and failed; usage and
/// parse errors exit 1, success 0.
pub const EXIT_MATH_FAIL: i32 = 2;
