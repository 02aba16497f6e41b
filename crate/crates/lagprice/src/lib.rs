pub mod fixtures;
pub mod lp;
pub mod market;
pub mod primal;
pub mod scalar;
