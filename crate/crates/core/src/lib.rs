pub mod estimators;
pub mod geometry;
pub mod hamiltonian;
pub mod interaction;
pub mod oracles;
pub mod sampler;
pub mod snapshot;
pub mod spatial;

pub use geometry::{GeometryError, Point2, Rect, Tile};
pub use hamiltonian::{BoundaryCondition, Configuration, HamiltonianError, Window};
pub use interaction::{EdgePotential, HardCore, TrianglePotential};
pub use sampler::{GibbsModel, SamplerConfig, SamplerError};
