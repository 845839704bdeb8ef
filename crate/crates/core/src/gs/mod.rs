//! Gerstenhaber–Schack cohomology of presheaves of algebras on finite posets.
//!
//! `C^{i,j} = ∏_{σ ∈ N^i} C^j(𝒜(max σ), ℳ(min σ))` with the simplicial
//! differential horizontally and the Hochschild differential vertically.

mod cech;
mod complex;
pub mod laurent;
mod poset;
mod presheaf;
mod scenario;

pub use cech::{cech_complex, nerve_complex, nerve_vs_cech, CechComparison};
pub use complex::{build_gs_complex, check_leibniz, gs_cup, point_complex, GSCochain, GSComplex, MAX_GS_DEGREE};
pub use poset::{NerveSimplex, Poset, MAX_NERVE_DIM, MAX_POSET_SIZE};
pub use presheaf::{AlgebraPresheaf, BimodulePresheaf, CoefficientPresheaf, Restrictions};
pub use scenario::{
    gs_for_subalgebra_scenario, ChartKind, CoverModel, EdgeReport, SubalgebraModel, SubalgebraReport, WeightBlock,
};

#[cfg(test)]
mod tests;
