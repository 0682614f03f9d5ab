pub mod boundarylab;
pub mod conedisc;
pub mod corepoly;
mod error;
pub mod levigeom;
pub mod liftengine;
pub mod tubedisc;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corepoly.md")]
    mod corepoly {}
    #[doc = include_str!("../../../book/src/levigeom.md")]
    mod levigeom {}
    #[doc = include_str!("../../../book/src/liftengine.md")]
    mod liftengine {}
    #[doc = include_str!("../../../book/src/conedisc.md")]
    mod conedisc {}
    #[doc = include_str!("../../../book/src/tubedisc.md")]
    mod tubedisc {}
    #[doc = include_str!("../../../book/src/boundarylab.md")]
    mod boundarylab {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
