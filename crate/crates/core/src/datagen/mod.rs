//! Instance generation: synthetic point sets, partitioners, adversarial
//! instances and CSV ingestion.

mod adversarial;
mod ingest;
mod partition;
mod synthetic;

pub use adversarial::{
    expand_bits, gen_one_round_hard, gen_staircase, gen_staircase_family, gen_vertical_disj, DISJ_DELTA,
};
pub use ingest::{ingest_csv, CsvSpec, Ingested};
pub use partition::{partition, PartitionScheme};
pub use synthetic::{gen_synthetic, Distribution, GenSpec};
