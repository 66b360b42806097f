//! Quadratic orbital networks over `Z_n`.
//!
//! A family of generators `x -> x^2 + a_i (mod n)` induces a functional digraph on the
//! residues and, after dropping loops and merging parallel edges, a finite simple graph.
//! This crate builds those graphs, computes their invariants (clique counts, Euler
//! characteristic, diameter, inductive dimension, planarity, branch structure) and runs
//! exhaustive surveys over whole parameter spaces.

pub mod branch;
pub mod error;
pub mod graph;
pub mod invariants;
pub mod planarity;
pub mod ring;
pub mod scalar;
pub mod survey;

pub use branch::{branch_cover_number, branch_graph, positively_connected, BranchStats};
pub use error::{Error, Result};
pub use graph::{build_orbital_graph, unit_sphere, ExportFormat, InducedSubgraph, OrbitalGraph, SimpleGraph};
pub use invariants::{
    analyze, clique_counts, connected_components, cycle_rank, degree_histogram, diameter,
    euler_characteristic, inductive_dimension, inductive_dimension_in, CliqueVector, Diameter,
    InvariantReport,
};
pub use planarity::{certify_planarity, is_planar, PlanarityVerdict};
pub use ring::{apply_map, FunctionalDigraph, Modulus, QuadraticFamily};
pub use scalar::DimensionScalar;

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Exact inductive dimension.
pub type Dimension = Rational;

/// Floating-point inductive dimension, for quick estimates.
pub type ApproxDimension = f64;

/// Residues of `Z_n` and graph vertices.
pub type Vertex = u32;
