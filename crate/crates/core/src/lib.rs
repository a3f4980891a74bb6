//! Voronoi diagrams in arbitrary dimension by exhaustive graph traversal,
//! plus cell-wise volume, interface and integral estimation.
//!
//! ```
//! use voronoi_graph::{voronoi_graph, NodeSet};
//!
//! let nodes = NodeSet::new(&[
//!     vec![0.0, 0.0],
//!     vec![2.0, 0.0],
//!     vec![0.0, 2.0],
//!     vec![2.0, 2.1],
//! ])?;
//! let mesh = voronoi_graph(&nodes, 42)?;
//! assert_eq!(mesh.vertices().len(), 2);
//! # Ok::<(), voronoi_graph::Error>(())
//! ```

pub mod analysis;
pub mod bench;
pub mod error;
pub mod graph;
pub mod integrate;
pub mod io;
pub mod kdtree;
pub mod linalg;
pub mod mesh;
pub mod nodes;
pub mod oracle;
pub mod raycast;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{verify_mesh, voronoi_graph, voronoi_graph_with, GraphOptions, GraphStats, MeshReport};
pub use integrate::{Builtin, CellIntegrals, Integrand, IntegrationMethod};
pub use mesh::{BoundaryRay, EdgeKey, Mesh, VertexRecord};
pub use nodes::{NodeSet, Scope};
pub use raycast::{Method, RayCaster, RayHit, RayQuery, RaycastStats};
