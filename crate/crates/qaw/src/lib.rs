//! Arbitrary-precision evaluation and verification of two q-orthogonal
//! polynomial families, one with four parameters orthogonal on the real
//! line for finitely many degrees, and a three-parameter family arising in
//! an indeterminate moment problem. The crate provides the underlying
//! q-series machinery, continuous and discrete orthogonality measures,
//! divided-difference operator identities, and asymptotic regimes, each
//! with numeric verification entry points.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod families;
pub mod measures;
pub mod numctx;
pub mod qoperators;
pub mod qseries;

pub use error::{QawError, Result};
pub use numctx::{Complex, PrecisionContext};

/// Command-line entry point; returns the process exit code.
pub fn cli_main() -> i32 {
    cli::main()
}
