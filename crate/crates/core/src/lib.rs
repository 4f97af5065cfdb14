pub mod scalars;
pub mod linalg;
pub mod root_datum;
pub mod characters;
pub mod kac_kazhdan;
pub mod quantum_algebra;
pub mod quantum_modules;
pub mod cohomology;
pub mod semiinf_brst;
pub mod kl_bookkeeping;
pub mod cli;
