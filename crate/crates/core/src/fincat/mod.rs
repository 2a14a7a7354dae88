//! Finite regular base categories: finite sets, finite abelian groups and
//! finite groups.
//!
//! In all three instances regular epimorphisms are the surjections and
//! monomorphisms are the injections. Plain groups have no finite
//! coproducts; [`joint_image`] and copairing-free constructions stand in
//! for them.

mod hom;
mod limits;
mod morphism;
mod object;
mod sub;
mod table;

pub use hom::{find_iso, hom_count, hom_set, MAX_HOM};
pub use limits::{copair, coproduct, coproduct_many, equalizer, pair, product, pullback, Coproduct, Product};
pub use morphism::{compose, FinMor};
pub use object::{FinObj, Kind};
pub use sub::{factor_through_mono, image_factor, joint_image, Subobject};
pub use table::{Factor, GroupTable, MAX_ENUMERATION, MAX_GROUP_ORDER};
