pub mod drs;
pub mod grammar;
pub mod lexicon;
pub mod model;
pub mod render;
pub mod resolution;
mod sat;
pub mod syntax;
pub mod term;
