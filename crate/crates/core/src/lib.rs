pub mod bounds;
pub mod chains;
mod exact;
pub mod gridcolor;
pub mod nervecontract;
pub mod search;
mod unionfind;

pub use exact::Exact;
