pub mod algebra;
pub mod knotio;
pub mod genus;
pub mod homology;
pub mod skein;
