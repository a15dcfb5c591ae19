pub mod cluster;
pub mod eval;
pub mod outliers;
pub mod plot;
pub mod sample;
pub mod synth;
pub mod train;
