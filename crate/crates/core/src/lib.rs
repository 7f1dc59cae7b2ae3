//! AES-128 and the algebra of its XOR equivalence classes.
//!
//! A 4-byte column belongs to the class `E(q)` when its four bytes XOR to
//! `q`. MixColumns and InvMixColumns preserve that XOR, which lets a 128-bit
//! state be summarised by four class values (one per *logical* column) and
//! pushed through the linear layers with a fixed 4x4 matrix over GF(2^8).
//!
//! Modules:
//!
//! * [`gf256`]: field arithmetic, 4-vectors and 4x4 matrices over GF(2^8).
//! * [`aes`]: the reference AES-128 engine.
//! * [`class_algebra`]: class vectors, shift phases and the propagation matrices.
//! * [`sbox_distribution`]: exact class-transition counts through an S-box layer.
//! * [`keyschedule_classes`]: class recurrences of the key schedule.
//!
//! Paper-style indices (`A11..A44`, `Q1..Q4`) are 1-based; everything here is
//! 0-based, so `Q1` is `ClassVector[0]` and `A_{r+1,c+1}` is `State::get(r, c)`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aes;
pub mod class_algebra;
mod error;
pub mod gf256;
pub mod keyschedule_classes;
pub mod sbox_distribution;

pub use aes::{Block, RoundKeySchedule, State};
pub use class_algebra::{ClassMatrix, ClassVector, ShiftPhase};
pub use error::Error;
pub use gf256::GfByte;

pub type Result<T, E = Error> = core::result::Result<T, E>;
