//! Combinatorial topology toolkit: finite simplicial complexes, contiguity
//! classes of simplicial maps, Vietoris–Rips constructions, homology over
//! prime fields, and Monte Carlo estimation of contiguity class counts.
//!
//! The crate is organized around one invariant: a [`SimplicialComplex`] is
//! immutable after construction. Every derived structure (subdivisions,
//! map complexes, filtrations, walk contexts) holds `Arc` references to the
//! complexes it was built from, so all read paths are shareable across
//! threads without locking.

pub mod complex;
pub mod contiguity;
pub mod error;
pub mod homology;
pub mod maps;
pub mod persistence;
pub mod rips;
pub mod subdivision;
pub mod unionfind;
pub mod walk;

pub use complex::{product_vertex, ComplexData, Simplex, SimplicialComplex, StandardComplex};
pub use contiguity::{
    approximate_subdivision, build_contiguity_complex, contiguous, exact_class_count,
    mutually_contiguous, ClassPartition, ContiguityComplex, Tiebreak,
};
pub use error::Error;
pub use homology::{betti_numbers, PrimeField};
pub use maps::{enumerate_maps, MapData, SimplicialMap};
pub use persistence::{
    circle_doubling_collapse, circle_step_collapse, h0_barcode, persistent_contiguity_h0,
    persistent_homology, persistent_subdivision_h0, rips_h0_barcode, Bar, Barcode, BarcodeData,
};
pub use rips::{
    parse_distance_csv, parse_point_csv, rips_complex, FiniteMetricSpace, RipsComplex,
    RipsFiltration, DEFAULT_RIPS_DIM,
};
pub use subdivision::{barycentric_subdivision, iterated_subdivision, GeometricVertex, Subdivision};
pub use walk::{
    closed_walk_count, estimate_class_count, map_distance, same_class_walk, uniform_closed_walk,
    DistanceTable, EstimatorState, StepRule, WalkCertificate, WalkConfig, WalkOutcome,
};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
