//! Instance sources: the bin-packing reduction and seeded random generation.

pub mod random;
pub mod reduction;

pub use random::{random_instance, suite_instance, GenerateError, Style};
pub use reduction::{
    reduce_bin_packing, reduction_schedule, verify_reduction, ReductionError, ReductionOutput, ReductionReport,
};
