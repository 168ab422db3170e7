//! Integral quadratic lattices over non-archimedean local fields: square
//! classes, good BONGs, spinor norm groups, representation, lifting along
//! finite extensions and n-universality.

pub mod error;
pub mod ext;
pub mod padic;
pub mod square_classes;
pub mod bong;

pub use error::{Error, Result};
pub use bong::{Lattice, LatticeForm};
pub use ext::Dx;
pub use padic::{catalog, Field, PadicElement, TowerSpec};
pub use square_classes::{ClassOrd, ClassSet, ClassTable, SquareClass, Subgroup};
pub mod spinor;
pub mod representation;
pub mod oracle;
pub mod corpus;
pub mod lift;
pub mod universality;
