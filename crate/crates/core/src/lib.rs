pub mod contfrac;
pub mod exact;
pub mod modsym;
pub mod pseudolattice;
pub mod quadorder;
pub mod pipeline;
