//! Reference AES-128.
//!
//! The state is a 4x4 byte grid loaded column-major from the 16-byte block:
//! block byte `i` lands at row `i % 4`, column `i / 4`. Nothing here is
//! constant-time.

use crate::gf256::{mul_u8, xtime};
use core::fmt;

/// A 16-byte block in FIPS byte order.
pub type Block = [u8; 16];

pub const ROUNDS: usize = 10;

/// Round constants for the ten key-schedule transitions.
pub const RCON: [u8; ROUNDS] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36];

const fn gf_inverse(a: u8) -> u8 {
    // a^254 = a^-1 for a != 0, and maps 0 to 0.
    let mut result = 1u8;
    let mut base = a;
    let mut e = 254u32;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_u8(result, base);
        }
        base = mul_u8(base, base);
        e >>= 1;
    }
    if a == 0 {
        0
    } else {
        result
    }
}

const fn affine(b: u8) -> u8 {
    b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63
}

const fn build_sbox() -> [u8; 256] {
    let mut t = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        t[i] = affine(gf_inverse(i as u8));
        i += 1;
    }
    t
}

const fn invert_table(t: &[u8; 256]) -> [u8; 256] {
    let mut inv = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        inv[t[i] as usize] = i as u8;
        i += 1;
    }
    inv
}

/// The AES S-box, derived from the field inverse and the affine map.
pub const SBOX: [u8; 256] = build_sbox();
pub const INV_SBOX: [u8; 256] = invert_table(&SBOX);

/// The AES working state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct State {
    bytes: Block,
}

impl State {
    pub const ZERO: State = State { bytes: [0; 16] };

    pub const fn from_block(bytes: Block) -> Self {
        State { bytes }
    }

    pub const fn to_block(self) -> Block {
        self.bytes
    }

    pub const fn as_block(&self) -> &Block {
        &self.bytes
    }

    #[inline]
    pub const fn get(&self, row: usize, col: usize) -> u8 {
        self.bytes[row + 4 * col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: u8) {
        self.bytes[row + 4 * col] = v;
    }

    pub fn column(&self, col: usize) -> [u8; 4] {
        let mut c = [0u8; 4];
        c.copy_from_slice(&self.bytes[4 * col..4 * col + 4]);
        c
    }

    pub fn set_column(&mut self, col: usize, c: [u8; 4]) {
        self.bytes[4 * col..4 * col + 4].copy_from_slice(&c);
    }

    /// Build a state from row-major entries, `rows[r][c]`.
    pub fn from_rows(rows: [[u8; 4]; 4]) -> Self {
        let mut s = State::ZERO;
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                s.set(r, c, v);
            }
        }
        s
    }
}

impl From<Block> for State {
    fn from(b: Block) -> Self {
        State::from_block(b)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State(")?;
        for b in self.bytes {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

fn map_bytes(mut s: State, table: &[u8; 256]) -> State {
    for b in s.bytes.iter_mut() {
        *b = table[*b as usize];
    }
    s
}

pub fn sub_bytes(s: State) -> State {
    map_bytes(s, &SBOX)
}

pub fn inv_sub_bytes(s: State) -> State {
    map_bytes(s, &INV_SBOX)
}

/// Rotate row `r` left by `r * amount` positions.
fn rotate_rows(s: State, amount: usize) -> State {
    let mut out = State::ZERO;
    for r in 0..4 {
        for c in 0..4 {
            out.set(r, c, s.get(r, (c + r * amount) % 4));
        }
    }
    out
}

/// Row `r` rotated left by `r`.
pub fn shift_rows(s: State) -> State {
    rotate_rows(s, 1)
}

/// Row `r` rotated right by `r`.
pub fn inv_shift_rows(s: State) -> State {
    rotate_rows(s, 3)
}

/// One column through the `(2, 3, 1, 1)` circulant.
pub fn mix_column(c: [u8; 4]) -> [u8; 4] {
    let [a0, a1, a2, a3] = c;
    [
        xtime(a0) ^ xtime(a1) ^ a1 ^ a2 ^ a3,
        a0 ^ xtime(a1) ^ xtime(a2) ^ a2 ^ a3,
        a0 ^ a1 ^ xtime(a2) ^ xtime(a3) ^ a3,
        xtime(a0) ^ a0 ^ a1 ^ a2 ^ xtime(a3),
    ]
}

/// One column through the `(14, 11, 13, 9)` circulant.
pub fn inv_mix_column(c: [u8; 4]) -> [u8; 4] {
    let m = |x, k| mul_u8(x, k);
    let [a0, a1, a2, a3] = c;
    [
        m(a0, 14) ^ m(a1, 11) ^ m(a2, 13) ^ m(a3, 9),
        m(a0, 9) ^ m(a1, 14) ^ m(a2, 11) ^ m(a3, 13),
        m(a0, 13) ^ m(a1, 9) ^ m(a2, 14) ^ m(a3, 11),
        m(a0, 11) ^ m(a1, 13) ^ m(a2, 9) ^ m(a3, 14),
    ]
}

pub fn mix_columns(mut s: State) -> State {
    for c in 0..4 {
        s.set_column(c, mix_column(s.column(c)));
    }
    s
}

pub fn inv_mix_columns(mut s: State) -> State {
    for c in 0..4 {
        s.set_column(c, inv_mix_column(s.column(c)));
    }
    s
}

pub fn add_round_key(mut s: State, k: &State) -> State {
    for (b, kb) in s.bytes.iter_mut().zip(k.bytes) {
        *b ^= kb;
    }
    s
}

/// The key-schedule column transform for transition `round -> round + 1`:
/// RotWord, SubWord, then the round constant into byte 0.
///
/// Panics if `round >= 10`.
pub fn key_g(word: [u8; 4], round: usize) -> [u8; 4] {
    let rotated = [word[1], word[2], word[3], word[0]];
    let mut out = rotated.map(|b| SBOX[b as usize]);
    out[0] ^= RCON[round];
    out
}

/// The eleven round keys of AES-128.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RoundKeySchedule {
    keys: [State; ROUNDS + 1],
}

impl RoundKeySchedule {
    pub fn round_key(&self, round: usize) -> &State {
        &self.keys[round]
    }

    pub fn keys(&self) -> &[State; ROUNDS + 1] {
        &self.keys
    }
}

/// Expand a cipher key into its schedule.
pub fn expand_key(key: &Block) -> RoundKeySchedule {
    let mut keys = [State::ZERO; ROUNDS + 1];
    keys[0] = State::from_block(*key);
    for i in 0..ROUNDS {
        let prev = keys[i];
        let mut next = State::ZERO;
        let g = key_g(prev.column(3), i);
        let mut col = xor4(prev.column(0), g);
        next.set_column(0, col);
        for c in 1..4 {
            col = xor4(col, prev.column(c));
            next.set_column(c, col);
        }
        keys[i + 1] = next;
    }
    RoundKeySchedule { keys }
}

fn xor4(a: [u8; 4], b: [u8; 4]) -> [u8; 4] {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]]
}

pub fn encrypt_with_schedule(p: &Block, ks: &RoundKeySchedule) -> Block {
    let mut s = add_round_key(State::from_block(*p), ks.round_key(0));
    for round in 1..=ROUNDS {
        s = shift_rows(sub_bytes(s));
        if round != ROUNDS {
            s = mix_columns(s);
        }
        s = add_round_key(s, ks.round_key(round));
    }
    s.to_block()
}

pub fn decrypt_with_schedule(c: &Block, ks: &RoundKeySchedule) -> Block {
    let mut s = State::from_block(*c);
    for round in (1..=ROUNDS).rev() {
        s = add_round_key(s, ks.round_key(round));
        if round != ROUNDS {
            s = inv_mix_columns(s);
        }
        s = inv_sub_bytes(inv_shift_rows(s));
    }
    add_round_key(s, ks.round_key(0)).to_block()
}

pub fn encrypt_block(p: &Block, key: &Block) -> Block {
    encrypt_with_schedule(p, &expand_key(key))
}

pub fn decrypt_block(c: &Block, key: &Block) -> Block {
    decrypt_with_schedule(c, &expand_key(key))
}
