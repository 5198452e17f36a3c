pub mod acoustics;
pub mod analogy;
pub mod cli;
pub mod corpus;
pub mod features;
pub mod io;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod vectors;
