//! Persistent bank of pseudo ground-truth objects.
//!
//! Dense colored sources are axis-aligned, scaled to a jittered class size,
//! observed at every (heading, range) placement through the sensor model,
//! given intensities, and stored in the box frame. Sparse observations are
//! dropped.

mod align;
mod generate;
mod mix;
mod size;
mod store;

pub use align::pca_align;
pub use generate::{
    default_headings_deg, default_ranges_m, fit_to_size, generate_bank, BankParams, BankSource,
    GenerationReport, ObjectBank, ObjectBankEntry, MIN_ENTRY_POINTS,
};
pub use mix::{sample_mixed, MixRatio, MixedPick, PickSource};
pub use size::{determine_size, SizeJitterConfig};
pub use store::{read_bank, write_bank, CALIBRATION_FILE, ENTRIES_DIR, MANIFEST_FILE};
