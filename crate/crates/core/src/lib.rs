pub mod ball;
pub mod cli;
pub mod coloring;
pub mod constructions;
pub mod gens;
pub mod graph;
pub mod kernel;
pub mod rng;
pub mod sofic;
pub mod urs;
