pub mod error;
pub mod modmath;
pub mod expsums;
pub mod oscint;
pub mod report;
pub mod deltasym;
pub mod lfun;
pub mod voronoi;
pub mod sieve;
pub mod suites;
