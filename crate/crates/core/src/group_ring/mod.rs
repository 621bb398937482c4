//! Group rings Z[G], augmentation filtrations and characters.

pub mod character;
pub mod element;
pub mod filtration;
pub mod group;
pub mod lattice;

pub use character::Character;
pub use element::{minus_one, GroupRingElement, IntegralElement, RationalElement};
pub use filtration::{ord_aug, ord_aug_p, AugOrder, LeadingImage};
pub use group::{AbelianGroup, CyclicFactor};
