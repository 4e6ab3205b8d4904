//! Piecewise-linear links in the unit cube: separation certificates built
//! from cubical homology, Milnor invariants of link diagrams, growth bounds
//! for the ambient invariant groups, and packing density experiments.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: points, polygonal curves, links, segment distances,
//!   rigid motions, and the canonical Hopf pair configurations.
//! * [`grid`]: cubical tessellations of the unit cube and cell colorings
//!   induced by a link.
//! * [`z2`]: bit vectors and matrices over GF(2).
//! * [`homology`]: cubical complexes of colored regions, mod-2 first
//!   homology bases, and snapping of curves to edge cycles.
//! * [`certify`]: linking numbers, linking matrices between region bases,
//!   and the separation certificate pipeline.
//! * [`magnus`]: group words, the non-repeating power series ring, and
//!   lower-central-series filtration checks.
//! * [`diagrams`]: planar diagram codes, Wirtinger presentations,
//!   longitudes, and Milnor mu-bar invariants.
//! * [`burnside`]: Burnside group orders, the two-generator exponent-3
//!   model group, and growth bound calculators.
//! * [`packing`]: lattice packings of split Hopf pairs across shrinking
//!   generations, verification, and density fits.

pub mod burnside;
pub mod certify;
pub mod cli;
pub mod diagrams;
pub mod geometry;
pub mod grid;
pub mod homology;
pub mod magnus;
pub mod packing;
pub mod z2;
