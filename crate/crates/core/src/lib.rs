//! Discrete-time quantum walks on Fock-state lattices generated by Lie
//! algebras.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! core: truncated generator representations, initial states, the coin and
//! conditional-shift machinery, observables, and analytic reference results.
//! File formats, configuration, and parallel ensemble drivers live in the
//! `fslwalk` companion crate.
//!
//! Walker states are stored coin-major: amplitude `(coin c, site s)` lives at
//! index `c * site_count + s`, so every coin block is a contiguous slice that
//! the conditional shift can exponentiate in place.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod numerics;
pub mod observables;
pub mod oracles;
pub mod states;
pub mod walk;

pub use num_complex::Complex64 as C64;

pub use algebra::{AlgebraKind, AlgebraParams, AlgebraRep, Su11Sector};
pub use numerics::{ComplexVector, SparseOperator};
pub use observables::{Distribution, SpreadReport};
pub use states::{CoinInit, StateSpec};
pub use walk::{CoinSpec, NoiseSpec, WalkConfig, WalkOptions, WalkerState};
