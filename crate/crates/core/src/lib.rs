//! Two-photon absorption through a fine-structure doublet: angular algebra,
//! atom model, random and entangled cross sections, and the rate law.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod angular;
pub mod atom;
pub mod rate;
pub mod reference;
pub mod rtpa;
pub mod error;
pub mod etpa;
pub mod units;

pub use error::{Error, Result};
