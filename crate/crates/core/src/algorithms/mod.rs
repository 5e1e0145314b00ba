//! Algorithm kernels implementing [`crate::gas::GasKernel`].

pub mod bfs;
pub mod pagerank;
pub mod wcc;

pub use bfs::BfsKernel;
pub use pagerank::PageRankKernel;
pub use wcc::WccKernel;
