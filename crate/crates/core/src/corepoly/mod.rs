//! Polynomial maps, boundary grids, Fourier and Laurent approximation on the
//! circle, and certified conformal maps of planar domains.

mod c2;
mod conformal;
mod domain;
pub mod fourier;
mod laurent;
mod poly;
mod roots;

pub use c2::{Cx, C2};
pub use conformal::{riemann_map, riemann_map_with, ConformalCertificate, RiemannMap, RiemannOptions};
pub use domain::{first_crossing, segment_distance, winding_number, PlanarDomain};
pub use laurent::{sample_disc, taylor_truncate, trig_approx, LaurentCoeffs};
pub use poly::{eval_and_sample, BoundaryGrid, PolyMap};
pub use roots::{deflate, horner, poly_roots};
