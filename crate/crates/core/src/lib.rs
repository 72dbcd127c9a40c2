//! Exact counting, uniform sampling and component statistics of chord
//! diagrams graded by crossing number.

pub mod analytics;
pub mod asymptotics;
pub mod diagram;
pub mod dsu;
pub mod error;
pub mod exact;
pub mod experiments;
mod fenwick;
pub mod manifest;
pub mod sampler;
pub mod table;
pub mod weight;

pub use analytics::{component_summary, components, giant_stats, is_monolithic, ComponentSummary};
pub use diagram::{decode, is_compatible, ChordDiagram, CutStats, IntersectionGraph, SequencePair};
pub use error::{Error, Result};
pub use sampler::{Method, SampleBatch, SamplerConfig};
pub use table::{dp_count, CountTable, DpMode};
