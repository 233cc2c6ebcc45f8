//! Node behaviors for the engine.
//!
//! - [`BlindMatch`]: coin-flip senders propose to a uniform neighbor, no tags.
//! - [`SharedBit`]: one-bit tags derived from a shared random string steer
//!   proposals toward neighbors whose token sets differ.
//! - [`SimSharedBit`]: SharedBit with the string agreed on by min-UID
//!   flooding in alternate rounds.
//! - [`Ppush`]: single-rumor push to uninformed neighbors.
//! - [`CrowdedBin`]: tag dissemination in binned instances with PPUSH
//!   token delivery, for unknown `k`.

mod blindmatch;
pub mod crowdedbin;
mod ppush;
mod sharedbit;
mod simsharedbit;

pub use blindmatch::BlindMatch;
pub use crowdedbin::{CrowdedBin, CrowdedBinParams, CrowdedBinState};
pub use ppush::{Ppush, PpushState};
pub use sharedbit::{sharedbit_tag, SharedBit, SharedBitState};
pub use simsharedbit::{SimSharedBit, SimSharedBitState};
