//! Term-coding instances and the dispersion of term-defined maps.
//!
//! * [`term`]: the instance language, its parser and printer, and evaluation.
//! * [`normalize`]: flattening, quotienting and diversification.
//! * [`depgraph`]: dependency graphs and guessing games.
//! * [`flownet`]: the max-flow computation of the dispersion exponent.
//! * [`oracle`]: exhaustive small-alphabet search for exact values.
//! * [`corpus`]: bundled example instances.

pub mod corpus;
pub mod depgraph;
pub mod flownet;
pub mod normalize;
pub mod oracle;
pub mod term;
