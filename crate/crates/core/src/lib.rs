pub mod bench;
pub mod cli;
pub mod expr;
pub mod funcspace;
pub mod green;
pub mod ham;
pub mod tuner;
