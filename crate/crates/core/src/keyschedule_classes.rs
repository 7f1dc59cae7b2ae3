//! Column classes of the AES-128 round keys.
//!
//! `ek[j]` is the XOR of column `j` of a round key and `eg` is the XOR of
//! the key-schedule transform G (RotWord, SubWord, round constant) applied
//! to the key's last column. Because every later column is a chained XOR,
//! the next round's classes follow from the current ones and `eg` alone:
//!
//! ```text
//! ek0' = ek0 ^ eg
//! ek1' = ek0' ^ ek1
//! ek2' = ek1' ^ ek2
//! ek3' = ek2' ^ ek3
//! ```

use crate::aes::{self, Block, RoundKeySchedule, ROUNDS};
use crate::gf256::GfByte;
use crate::{Error, Result};

fn fold(word: [u8; 4]) -> GfByte {
    GfByte(word[0] ^ word[1] ^ word[2] ^ word[3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyClassRecord {
    pub round: usize,
    pub ek: [GfByte; 4],
    /// `None` for round 10, which has no successor.
    pub eg: Option<GfByte>,
}

/// Class of G applied to `last_column` for the transition `round -> round + 1`.
pub fn g_class(last_column: [u8; 4], round: usize) -> GfByte {
    fold(aes::key_g(last_column, round))
}

pub fn key_class_record(schedule: &RoundKeySchedule, round: usize) -> Result<KeyClassRecord> {
    if round > ROUNDS {
        return Err(Error::RoundOutOfRange { round, max: ROUNDS });
    }
    let key = schedule.round_key(round);
    let ek = [0, 1, 2, 3].map(|c| fold(key.column(c)));
    let eg = (round < ROUNDS).then(|| g_class(key.column(3), round));
    Ok(KeyClassRecord { round, ek, eg })
}

/// Predicted column classes of round `r.round + 1`.
pub fn predict_next_classes(r: &KeyClassRecord) -> Result<[GfByte; 4]> {
    let eg = match r.eg {
        Some(eg) if r.round < ROUNDS => eg,
        _ => {
            return Err(Error::RoundOutOfRange {
                round: r.round,
                max: ROUNDS - 1,
            })
        }
    };
    let ek0 = r.ek[0] + eg;
    let ek1 = ek0 + r.ek[1];
    let ek2 = ek1 + r.ek[2];
    let ek3 = ek2 + r.ek[3];
    Ok([ek0, ek1, ek2, ek3])
}

/// One `round -> round + 1` comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionCheck {
    pub round: usize,
    pub predicted: [GfByte; 4],
    pub actual: [GfByte; 4],
}

impl TransitionCheck {
    pub fn pass(&self) -> bool {
        self.predicted == self.actual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleAudit {
    pub key: Block,
    pub transitions: [TransitionCheck; ROUNDS],
}

impl ScheduleAudit {
    pub fn pass(&self) -> bool {
        self.transitions.iter().all(TransitionCheck::pass)
    }

    pub fn passed(&self) -> usize {
        self.transitions.iter().filter(|t| t.pass()).count()
    }
}

/// Expand `key` and check the class recurrences on all ten transitions.
pub fn audit_schedule_classes(key: &Block) -> ScheduleAudit {
    let schedule = aes::expand_key(key);
    let transitions = core::array::from_fn(|round| {
        let current = key_class_record(&schedule, round).expect("round < 10");
        let next = key_class_record(&schedule, round + 1).expect("round + 1 <= 10");
        TransitionCheck {
            round,
            predicted: predict_next_classes(&current).expect("round < 10"),
            actual: next.ek,
        }
    });
    ScheduleAudit {
        key: *key,
        transitions,
    }
}
