//! File formats: Pajek NET, GEXF, CSV tables, and the pipeline config.

pub mod config;
pub mod csvio;
pub mod gexf;
pub mod pajek;
