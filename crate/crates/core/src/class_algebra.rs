//! Equivalence-class vectors and their propagation through the linear layers.
//!
//! After `k` ShiftRows the four bytes that started in one physical column
//! (a *logical* column) sit on a diagonal: row `r` holds its byte in physical
//! column `(j - k*r) mod 4`. The XOR of a logical column is its class value.
//! One ShiftRows+MixColumns step maps the class vector at phase `k` to the
//! class vector at phase `k + 1` through a fixed matrix that depends only on
//! `k mod 4`; the backward step uses the inverse matrix.

use alloc::vec::Vec;
use core::fmt;

use crate::aes::{self, Block, State, ROUNDS};
use crate::gf256::{gf_matrix_mul, GfByte};
pub use crate::gf256::{ClassMatrix, ClassVector};
use crate::{Error, Result};

/// Cumulative number of ShiftRows applied, modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ShiftPhase(u8);

impl ShiftPhase {
    pub const ZERO: ShiftPhase = ShiftPhase(0);

    pub fn new(k: usize) -> Result<Self> {
        if k < 4 {
            Ok(ShiftPhase(k as u8))
        } else {
            Err(Error::PhaseOutOfRange(k))
        }
    }

    /// Phase after `count` further shifts, wrapping mod 4.
    pub const fn wrapping(count: usize) -> Self {
        ShiftPhase((count % 4) as u8)
    }

    pub const fn get(self) -> usize {
        self.0 as usize
    }

    pub const fn advance(self, steps: usize) -> Self {
        ShiftPhase(((self.0 as usize + steps) % 4) as u8)
    }

    pub const fn retreat(self, steps: usize) -> Self {
        ShiftPhase(((self.0 as usize + 4 - steps % 4) % 4) as u8)
    }

    pub fn all() -> impl Iterator<Item = ShiftPhase> {
        (0..4u8).map(ShiftPhase)
    }
}

impl fmt::Display for ShiftPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const FORWARD: [ClassMatrix; 4] = [
    ClassMatrix::circulant([2, 3, 1, 1]),
    ClassMatrix::from_rows([[3, 0, 2, 0], [0, 3, 0, 2], [2, 0, 3, 0], [0, 2, 0, 3]]),
    ClassMatrix::circulant([2, 1, 1, 3]),
    ClassMatrix::IDENTITY,
];

const BACKWARD: [ClassMatrix; 4] = [
    ClassMatrix::circulant([14, 11, 13, 9]),
    ClassMatrix::from_rows([[3, 0, 2, 0], [0, 3, 0, 2], [2, 0, 3, 0], [0, 2, 0, 3]]),
    ClassMatrix::circulant([14, 9, 13, 11]),
    ClassMatrix::IDENTITY,
];

/// Class vector of `s`, reading logical columns at `phase`.
pub fn logical_class(s: &State, phase: ShiftPhase) -> ClassVector {
    let k = phase.get();
    let mut v = ClassVector::ZERO;
    for j in 0..4 {
        let mut acc = 0u8;
        for r in 0..4 {
            acc ^= s.get(r, (j + 12 - k * r) % 4);
        }
        v[j] = GfByte(acc);
    }
    v
}

/// Matrix for ShiftRows then MixColumns taken from `phase` to `phase + 1`.
pub fn forward_step_matrix(phase: ShiftPhase) -> ClassMatrix {
    FORWARD[phase.get()]
}

/// Matrix for InvMixColumns then InvShiftRows taken from `phase + 1` back
/// to `phase`. `phase` names the phase *before* the forward step.
pub fn backward_step_matrix(phase: ShiftPhase) -> ClassMatrix {
    BACKWARD[phase.get()]
}

/// Run `steps` forward steps starting at `phase`. The final phase is
/// `phase.advance(steps)`.
pub fn propagate_forward(mut v: ClassVector, phase: ShiftPhase, steps: usize) -> ClassVector {
    let mut k = phase;
    for _ in 0..steps {
        v = gf_matrix_mul(&forward_step_matrix(k), v);
        k = k.advance(1);
    }
    v
}

/// Run `steps` backward steps starting from a vector observed at `phase`.
/// The final phase is `phase.retreat(steps)`.
pub fn propagate_backward(mut v: ClassVector, phase: ShiftPhase, steps: usize) -> ClassVector {
    let mut k = phase;
    for _ in 0..steps {
        k = k.retreat(1);
        v = gf_matrix_mul(&backward_step_matrix(k), v);
    }
    v
}

/// Class effect of AddRoundKey: the key's logical classes XOR in.
pub fn add_round_key_class(v: ClassVector, key: &State, phase: ShiftPhase) -> ClassVector {
    v + logical_class(key, phase)
}

/// One round of the linearized trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearizedRound {
    pub round: usize,
    /// Phase after this round's ShiftRows.
    pub phase: ShiftPhase,
    /// Class measured on the real state after the round's linear layer.
    pub observed: ClassVector,
    /// Class predicted from the plaintext and round-key classes alone.
    pub predicted: ClassVector,
}

impl LinearizedRound {
    pub fn matches(&self) -> bool {
        self.observed == self.predicted
    }
}

fn check_rounds(rounds: usize) -> Result<()> {
    if (1..=ROUNDS).contains(&rounds) {
        Ok(())
    } else {
        Err(Error::RoundOutOfRange {
            round: rounds,
            max: ROUNDS,
        })
    }
}

/// Class trajectory predicted for AES with SubBytes replaced by the identity,
/// computed from the class of `p` and the key schedule's classes only.
///
/// Entry `r - 1` is the class after round `r`'s linear layer (before its
/// AddRoundKey). Round 10 has no MixColumns; ShiftRows on its own leaves the
/// logical classes unchanged.
pub fn predict_linearized(p: &Block, key: &Block, rounds: usize) -> Result<Vec<ClassVector>> {
    check_rounds(rounds)?;
    let ks = aes::expand_key(key);
    let mut phase = ShiftPhase::ZERO;
    let mut v = add_round_key_class(
        logical_class(&State::from_block(*p), phase),
        ks.round_key(0),
        phase,
    );
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        if round != ROUNDS {
            v = propagate_forward(v, phase, 1);
        }
        phase = phase.advance(1);
        out.push(v);
        v = add_round_key_class(v, ks.round_key(round), phase);
    }
    Ok(out)
}

/// Run linearized AES on the real state and compare each round's class
/// against [`predict_linearized`].
pub fn trace_linearized(p: &Block, key: &Block, rounds: usize) -> Result<Vec<LinearizedRound>> {
    let predicted = predict_linearized(p, key, rounds)?;
    let ks = aes::expand_key(key);
    let mut s = aes::add_round_key(State::from_block(*p), ks.round_key(0));
    let mut phase = ShiftPhase::ZERO;
    let mut out = Vec::with_capacity(rounds);
    for (round, predicted) in (1..=rounds).zip(predicted) {
        s = aes::shift_rows(s);
        if round != ROUNDS {
            s = aes::mix_columns(s);
        }
        phase = phase.advance(1);
        out.push(LinearizedRound {
            round,
            phase,
            observed: logical_class(&s, phase),
            predicted,
        });
        s = aes::add_round_key(s, ks.round_key(round));
    }
    Ok(out)
}

/// Point in the cipher at which a trace entry was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Input,
    SubBytesIn,
    SubBytesOut,
    /// ShiftRows without MixColumns (final round only).
    ShiftRows,
    /// ShiftRows followed by MixColumns.
    MixColumns,
    AddRoundKey,
}

impl Stage {
    pub const fn label(self) -> &'static str {
        match self {
            Stage::Input => "input",
            Stage::SubBytesIn => "sub_bytes_in",
            Stage::SubBytesOut => "sub_bytes_out",
            Stage::ShiftRows => "shift_rows",
            Stage::MixColumns => "mix_columns",
            Stage::AddRoundKey => "add_round_key",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: usize,
    pub stage: Stage,
    pub phase: ShiftPhase,
    pub state: State,
    pub class: ClassVector,
}

/// Full AES-128 encryption, recording the logical class vector around every
/// SubBytes layer and after every linear layer and key addition.
pub fn trace_full(p: &Block, key: &Block) -> Vec<TraceEntry> {
    let ks = aes::expand_key(key);
    let mut out = Vec::with_capacity(2 + 4 * ROUNDS);
    let mut phase = ShiftPhase::ZERO;
    let mut record = |round, stage, phase, state: State| {
        out.push(TraceEntry {
            round,
            stage,
            phase,
            state,
            class: logical_class(&state, phase),
        })
    };

    let mut s = State::from_block(*p);
    record(0, Stage::Input, phase, s);
    s = aes::add_round_key(s, ks.round_key(0));
    record(0, Stage::AddRoundKey, phase, s);
    for round in 1..=ROUNDS {
        record(round, Stage::SubBytesIn, phase, s);
        s = aes::sub_bytes(s);
        record(round, Stage::SubBytesOut, phase, s);
        s = aes::shift_rows(s);
        phase = phase.advance(1);
        if round == ROUNDS {
            record(round, Stage::ShiftRows, phase, s);
        } else {
            s = aes::mix_columns(s);
            record(round, Stage::MixColumns, phase, s);
        }
        s = aes::add_round_key(s, ks.round_key(round));
        record(round, Stage::AddRoundKey, phase, s);
    }
    out
}
