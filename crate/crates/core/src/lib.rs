//! Topological phases of extended Kitaev chains, their Majorana edge modes and
//! the multipartite-entanglement witnesses that detect them.

pub mod bdg;
pub mod chain;
pub mod correlators;
pub mod ed;
pub mod error;
pub mod honeycomb;
pub mod majorana;
pub mod pauli;
pub mod qfi;
pub mod reproduce;
pub mod roots;
pub mod toeplitz;
pub mod winding;

pub use chain::{bloch_vector, energy_spectrum, is_gapless, BlochVector, ChainSpec, MomentumGrid};
pub use error::{Error, Result};
pub use winding::{
    characteristic_poly, critical_coupling_values, critical_mu_values, find_roots, winding_number,
    CharacteristicPoly, RootProfile, Warning, WindingResult,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/chain.md")]
    mod chain {}
    #[doc = include_str!("../../../book/src/winding.md")]
    mod winding {}
    #[doc = include_str!("../../../book/src/majorana.md")]
    mod majorana {}
    #[doc = include_str!("../../../book/src/strings.md")]
    mod strings {}
    #[doc = include_str!("../../../book/src/qfi.md")]
    mod qfi {}
    #[doc = include_str!("../../../book/src/duality.md")]
    mod duality {}
    #[doc = include_str!("../../../book/src/honeycomb.md")]
    mod honeycomb {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
