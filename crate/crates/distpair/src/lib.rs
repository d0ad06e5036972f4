//! distpair: a numerical laboratory for distribution pairings against
//! singular hyperbolic kernels.
//!
//! The objects of study are pairings `<T, phi>` where `T` is one of
//! `coth y`, `csch^2 y`, `1/y`, `1/y^2`, `coth(y + i eps)` or `delta`, and
//! `phi` is a smooth rapidly decaying test function.  None of the singular
//! kernels is locally integrable, so each pairing only means something
//! *under a stated regularization*: principal value for the odd `1/y`-type
//! singularities, Hadamard finite part for the even `1/y^2` type, or an
//! `eps -> 0` limit of complex-shifted kernels.  This crate makes those
//! readings executable and then machine-checks the calculus that relates
//! them:
//!
//! * the weak derivative of `coth` is `-(csch^2)_st` — exactly, with **no**
//!   extra `2 delta(y)` term; the sign-convention residual of that check
//!   lands at `-2 phi(0)` when the spurious term is (incorrectly) assumed;
//! * `coth y = 1/y + sum_k 2y/(y^2 + k^2 pi^2)` and its termwise
//!   derivative, with quantified truncation tails;
//! * `lim_{eps->0} coth(y + i eps) = P(1/y) + (coth y - 1/y) - i pi delta`;
//! * even moments of `(csch^2)_st` against `y^{2m} e^{i eps y}`-type
//!   windows reproduce Bernoulli-polynomial closed forms (`mu_0 = -2`!),
//!   which in turn drive small-`eps` delta-comb expansions;
//! * a quantum noise kernel `(pi kT/hbar)^2 csch^2(pi kT tau/hbar)` splits
//!   into exactly this standardized part plus a classical white-noise term
//!   `2 kT zeta delta(tau)`, and collapses to it in the classical limit.
//!
//! Numerical policy, uniform across modules: singular integrands are never
//! evaluated raw.  They are folded to half-line integrals of smooth
//! differences, given analytic Taylor heads near the origin and closed-form
//! tails at truncation radii, and only then handed to an adaptive
//! Gauss-Kronrod engine that reports an error estimate alongside every
//! value.  Results carry `converged` flags, and every end-user check
//! aggregates to an explicit PASS / FAIL / INDETERMINATE verdict.

pub mod config;
pub mod experiments;
pub mod moments;
pub mod noise;
pub mod outcome;
pub mod pairing;
pub mod probes;
pub mod quad;
pub mod report;
pub mod special;

pub use config::{ConfigError, Experiment, RunConfig};
pub use experiments::{run, run_experiment, ExperimentError};
pub use outcome::{aggregate_verdict, exit_code, CheckOutcome, DetailRow, Verdict};
pub use pairing::{
    check_derivative_identity, coth_eps_decomposition_check, extrapolate_limit, pair,
    weak_derivative_pair, KernelKind, KernelSpec, LadderSpec, PairingError, PairingResult,
};
pub use probes::{Family, FamilySeed, Probe, TestFunction};
pub use special::SeriesTruncation;
