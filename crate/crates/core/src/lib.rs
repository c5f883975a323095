pub mod census;
pub mod cli;
pub mod constants;
pub mod error;
pub mod measure;
pub mod poly;
pub mod quad;
pub mod report;
pub mod sum;
