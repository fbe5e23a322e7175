pub mod arith;
pub mod graphs;
pub mod decorated;
pub mod classes;
pub mod engine;
