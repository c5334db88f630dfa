//! Webometric indicator collection and analysis.
//!
//! The crate covers the full path from a roster of institutions to a laid
//! out, exportable mention network: query-plan generation ([`queryplan`]),
//! polite plan execution against pluggable engines ([`collector`]), sample
//! organization and quality checks ([`ingest`]), descriptive and
//! multivariate statistics ([`stats`]), network construction and analysis
//! ([`network`]), force-directed layout and visual encoding ([`layout`]).

pub mod collector;
pub mod ingest;
pub mod io;
pub mod layout;
pub mod model;
pub mod network;
pub mod pipeline;
pub mod queryplan;
pub mod stats;
