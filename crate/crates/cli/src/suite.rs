//! Randomized invariant suite behind `verify-properties`.
//!
//! Randomness: ChaCha8 (`rand_chacha` 0.3), keyed with
//! `ChaCha8Rng::seed_from_u64(seed)` and switched to stream `i` for the
//! `i`-th property in [`PROPERTY_NAMES`] order. Each property therefore sees
//! the same inputs for a given seed regardless of which other properties run.

use std::fmt;

use aes_eqclass::aes::{self, Block, State};
use aes_eqclass::class_algebra::{
    backward_step_matrix, forward_step_matrix, logical_class, propagate_backward,
    propagate_forward, trace_linearized,
};
use aes_eqclass::gf256::gf_matrix_compose;
use aes_eqclass::keyschedule_classes::audit_schedule_classes;
use aes_eqclass::{ClassMatrix, ClassVector, ShiftPhase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hexblock::format_block;

/// Step matrices under test; [`StepMatrices::corrupted`] is a negative control.
#[derive(Debug, Clone, Copy)]
pub struct StepMatrices {
    pub forward: [ClassMatrix; 4],
    pub backward: [ClassMatrix; 4],
}

impl StepMatrices {
    pub fn standard() -> Self {
        let phases = [0, 1, 2, 3].map(ShiftPhase::wrapping);
        StepMatrices {
            forward: phases.map(forward_step_matrix),
            backward: phases.map(backward_step_matrix),
        }
    }

    /// Standard matrices with one forward coefficient flipped.
    pub fn corrupted() -> Self {
        let mut m = Self::standard();
        m.forward[0].0[0][0].0 ^= 1;
        m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: u64,
    pub matrices: StepMatrices,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub checks: u64,
    pub passed: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: u64,
    pub properties: Vec<PropertyResult>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: String,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "counterexample: property={} {}",
            self.property, self.detail
        )
    }
}

pub const PROPERTY_NAMES: [&str; 19] = [
    "mix_columns_xor",
    "inv_mix_columns_xor",
    "forward_step_k0",
    "forward_step_k1",
    "forward_step_k2",
    "forward_step_k3",
    "backward_step_k0",
    "backward_step_k1",
    "backward_step_k2",
    "backward_step_k3",
    "matrix_algebra",
    "sub_bytes_round_trip",
    "shift_rows_round_trip",
    "mix_columns_round_trip",
    "encrypt_decrypt_round_trip",
    "fips_known_answer",
    "class_propagation_round_trip",
    "linearized_trace",
    "key_schedule_recurrences",
];

type Check<'a> = Box<dyn FnMut(&mut ChaCha8Rng) -> Result<(), String> + 'a>;

enum Kind<'a> {
    Randomized(Check<'a>),
    /// Fixed list of checks, run once each whatever `trials` is.
    Exact(Vec<Box<dyn Fn() -> Result<(), String> + 'a>>),
}

fn fold(c: [u8; 4]) -> u8 {
    c[0] ^ c[1] ^ c[2] ^ c[3]
}

fn mismatch(
    what: impl fmt::Display,
    expected: impl fmt::Display,
    actual: impl fmt::Display,
) -> String {
    format!("{what} expected={expected} actual={actual}")
}

fn state_hex(s: &State) -> String {
    format_block(s.as_block())
}

fn properties(m: StepMatrices) -> Vec<Kind<'static>> {
    let mut out: Vec<Kind> = Vec::new();

    out.push(Kind::Randomized(Box::new(|rng| {
        let c: [u8; 4] = rng.gen();
        let y = aes::mix_column(c);
        (fold(y) == fold(c)).then_some(()).ok_or_else(|| {
            mismatch(
                format!("column={}", hex::encode(c)),
                format!("{:02x}", fold(c)),
                format!("{:02x}", fold(y)),
            )
        })
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let c: [u8; 4] = rng.gen();
        let y = aes::inv_mix_column(c);
        (fold(y) == fold(c)).then_some(()).ok_or_else(|| {
            mismatch(
                format!("column={}", hex::encode(c)),
                format!("{:02x}", fold(c)),
                format!("{:02x}", fold(y)),
            )
        })
    })));

    for k in 0..4 {
        let phase = ShiftPhase::wrapping(k);
        let matrix = m.forward[k];
        out.push(Kind::Randomized(Box::new(move |rng| {
            let s = State::from_block(rng.gen());
            let expected = matrix.apply(logical_class(&s, phase));
            let actual = logical_class(&aes::mix_columns(aes::shift_rows(s)), phase.advance(1));
            (expected == actual).then_some(()).ok_or_else(|| {
                mismatch(
                    format!("state={} phase={phase}", state_hex(&s)),
                    expected,
                    actual,
                )
            })
        })));
    }
    for k in 0..4 {
        let phase = ShiftPhase::wrapping(k);
        let matrix = m.backward[k];
        out.push(Kind::Randomized(Box::new(move |rng| {
            let s = State::from_block(rng.gen());
            let expected = matrix.apply(logical_class(&s, phase.advance(1)));
            let actual = logical_class(&aes::inv_shift_rows(aes::inv_mix_columns(s)), phase);
            (expected == actual).then_some(()).ok_or_else(|| {
                mismatch(
                    format!("state={} phase={}", state_hex(&s), phase.advance(1)),
                    expected,
                    actual,
                )
            })
        })));
    }

    let mut algebra: Vec<Box<dyn Fn() -> Result<(), String>>> = Vec::new();
    for k in 0..4 {
        algebra.push(Box::new(move || {
            let product = gf_matrix_compose(&m.forward[k], &m.backward[k]);
            (product == ClassMatrix::IDENTITY)
                .then_some(())
                .ok_or_else(|| format!("phase={k} forward*backward={:?}", product.rows()))
        }));
    }
    algebra.push(Box::new(move || {
        let sq = gf_matrix_compose(&m.forward[1], &m.forward[1]);
        (sq == ClassMatrix::IDENTITY)
            .then_some(())
            .ok_or_else(|| format!("phase=1 forward^2={:?}", sq.rows()))
    }));
    algebra.push(Box::new(move || {
        (m.forward[3] == ClassMatrix::IDENTITY)
            .then_some(())
            .ok_or_else(|| format!("phase=3 forward={:?}", m.forward[3].rows()))
    }));
    out.push(Kind::Exact(algebra));

    out.push(Kind::Randomized(Box::new(|rng| {
        let s = State::from_block(rng.gen());
        let back = aes::inv_sub_bytes(aes::sub_bytes(s));
        (back == s).then_some(()).ok_or_else(|| {
            mismatch(
                format!("state={}", state_hex(&s)),
                state_hex(&s),
                state_hex(&back),
            )
        })
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let s = State::from_block(rng.gen());
        let back = aes::inv_shift_rows(aes::shift_rows(s));
        (back == s).then_some(()).ok_or_else(|| {
            mismatch(
                format!("state={}", state_hex(&s)),
                state_hex(&s),
                state_hex(&back),
            )
        })
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let s = State::from_block(rng.gen());
        let back = aes::inv_mix_columns(aes::mix_columns(s));
        (back == s).then_some(()).ok_or_else(|| {
            mismatch(
                format!("state={}", state_hex(&s)),
                state_hex(&s),
                state_hex(&back),
            )
        })
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let p: Block = rng.gen();
        let key: Block = rng.gen();
        let back = aes::decrypt_block(&aes::encrypt_block(&p, &key), &key);
        (back == p).then_some(()).ok_or_else(|| {
            mismatch(
                format!("plaintext={} key={}", format_block(&p), format_block(&key)),
                format_block(&p),
                format_block(&back),
            )
        })
    })));
    out.push(Kind::Exact(vec![Box::new(|| {
        let key = std::array::from_fn(|i| i as u8);
        let p = std::array::from_fn(|i| (i as u8) * 0x11);
        let ct = format_block(&aes::encrypt_block(&p, &key));
        let want = "69c4e0d86a7b0430d8cdb78070b4c55a";
        (ct == want)
            .then_some(())
            .ok_or_else(|| mismatch("fips-197 c.1", want, ct))
    })]));
    out.push(Kind::Randomized(Box::new(|rng| {
        let v = ClassVector::from_u32(rng.gen());
        let phase = ShiftPhase::wrapping(rng.gen_range(0..4));
        let back = propagate_backward(propagate_forward(v, phase, 4), phase, 4);
        (back == v)
            .then_some(())
            .ok_or_else(|| mismatch(format!("vector={v} phase={phase}"), v, back))
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let p: Block = rng.gen();
        let key: Block = rng.gen();
        let trace = trace_linearized(&p, &key, 10).map_err(|e| e.to_string())?;
        match trace.iter().find(|r| !r.matches()) {
            None => Ok(()),
            Some(r) => Err(mismatch(
                format!(
                    "plaintext={} key={} round={} phase={}",
                    format_block(&p),
                    format_block(&key),
                    r.round,
                    r.phase
                ),
                r.predicted,
                r.observed,
            )),
        }
    })));
    out.push(Kind::Randomized(Box::new(|rng| {
        let key: Block = rng.gen();
        let audit = audit_schedule_classes(&key);
        match audit.transitions.iter().find(|t| !t.pass()) {
            None => Ok(()),
            Some(t) => Err(mismatch(
                format!("key={} round={}", format_block(&key), t.round),
                hex::encode(t.predicted.map(|b| b.value())),
                hex::encode(t.actual.map(|b| b.value())),
            )),
        }
    })));
    out
}

/// Run every property; returns the report and the first failure seen.
pub fn run_suite(opts: &SuiteOptions) -> (SuiteReport, Option<Counterexample>) {
    let mut results = Vec::with_capacity(PROPERTY_NAMES.len());
    let mut first_failure = None;
    for (index, (name, kind)) in PROPERTY_NAMES
        .iter()
        .zip(properties(opts.matrices))
        .enumerate()
    {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(index as u64);
        let mut checks = 0u64;
        let mut passed = 0u64;
        let mut record = |outcome: Result<(), String>| {
            checks += 1;
            match outcome {
                Ok(()) => passed += 1,
                Err(detail) => {
                    if first_failure.is_none() {
                        first_failure = Some(Counterexample {
                            property: name.to_string(),
                            detail,
                        });
                    }
                }
            }
        };
        match kind {
            Kind::Randomized(mut check) => {
                for _ in 0..opts.trials {
                    record(check(&mut rng));
                }
            }
            Kind::Exact(list) => list.iter().for_each(|check| record(check())),
        }
        results.push(PropertyResult {
            name: name.to_string(),
            checks,
            passed,
            pass: checks == passed,
        });
    }
    let pass = results.iter().all(|r| r.pass);
    (
        SuiteReport {
            seed: opts.seed,
            trials: opts.trials,
            properties: results,
            pass,
        },
        first_failure,
    )
}
