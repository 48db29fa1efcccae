//! Exact combinatorics of flag Bott manifolds and generalized Bott manifolds.

pub mod fan;
pub mod gkm;
pub mod io;
pub mod lattice;
pub mod orbit;
pub mod tower;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/towers.md")]
    mod towers {}
    #[doc = include_str!("../../../book/src/gkm.md")]
    mod gkm {}
    #[doc = include_str!("../../../book/src/fans.md")]
    mod fans {}
    #[doc = include_str!("../../../book/src/orbit.md")]
    mod orbit {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
