pub mod cli;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod pointer;
pub mod readability;
pub mod scenarios;
pub mod spin;
