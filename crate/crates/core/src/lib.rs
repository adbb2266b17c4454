//! Hidden subgroup problem on `Z_N x| Z_p`.
//!
//! Exact group arithmetic, subgroup classification and a state-vector
//! simulation of the quantum procedure that finds a subgroup hidden by a
//! coset-labelling oracle.
//!
//! * [`modmath`]: factorization, orders, inverses and CRT.
//! * [`group`]: normal-form arithmetic `x^a y^b`.
//! * [`subgroups`]: classification, closure, cosets and the `Psi_i` isomorphisms.
//! * [`decomposition`]: `Z_N x| Z_p = Z_{M0} x (Z_{p^r} x| Z_p)` and subgroup splitting.
//! * [`oracle`]: hiding functions with query counting.
//! * [`qsim`]: registers, the Fourier transform over `Z_p` and the solvers.
//! * [`experiments`]: success bounds and seeded Monte-Carlo reports.
//! * [`traceability`]: the claim-to-test table shipped in `docs/`.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory; the
//! `hsp` binary exposes the same operations as JSON-emitting subcommands.

pub mod decomposition;
pub mod error;
pub mod experiments;
pub mod group;
pub mod modmath;
pub mod oracle;
pub mod qsim;
pub mod subgroups;
pub mod traceability;

pub use error::{Error, Result};
pub use group::{Element, Family, GroupSpec};
pub use subgroups::{CosetLabel, SubgroupDesc};
