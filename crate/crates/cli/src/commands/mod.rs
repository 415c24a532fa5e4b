pub mod decompose;
pub mod evaluate;
pub mod generate;
pub mod losses;
pub mod rank;
pub mod synth;

mod common;
