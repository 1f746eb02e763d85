//! Grid environments: map parsing, tier labelling and presets.

mod grid;
mod presets;
mod tiers;

pub use grid::{ActionSet, Cell, Dynamics, GridSpec, GridState, GridWorld};
pub use presets::{make_preset, make_preset_k, preset_names, Preset, PRESET_NAMES};
pub use tiers::{TierAssignment, TierRule};
