use core::fmt;

/// Errors raised by the class-algebra and distribution routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A shift phase outside `0..4`.
    PhaseOutOfRange(usize),
    /// A round index outside the permitted range.
    RoundOutOfRange { round: usize, max: usize },
    /// S-box table length is not `2^bits` or `bits` is unsupported.
    BadTableSize { bits: u32, len: usize },
    /// S-box is not a permutation; `value` is the first output seen twice.
    NotBijective { value: u8 },
    /// Count matrix row does not sum to the expected total.
    RowSum { row: usize, sum: u64, expected: u64 },
    /// The Walsh-Hadamard convolution produced a value that is not a
    /// nonnegative multiple of the normalisation factor.
    Convolution { index: usize, raw: i64 },
    /// Two matrices of different dimension were combined.
    DimensionMismatch { left: usize, right: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PhaseOutOfRange(k) => write!(f, "shift phase {k} is outside 0..=3"),
            Error::RoundOutOfRange { round, max } => {
                write!(f, "round {round} is outside 0..={max}")
            }
            Error::BadTableSize { bits, len } => {
                write!(
                    f,
                    "S-box table of length {len} does not match a {bits}-bit S-box"
                )
            }
            Error::NotBijective { value } => {
                write!(f, "S-box is not a bijection: output {value:#04x} repeats")
            }
            Error::RowSum { row, sum, expected } => {
                write!(f, "row {row} sums to {sum}, expected {expected}")
            }
            Error::Convolution { index, raw } => write!(
                f,
                "XOR convolution produced non-integral or negative value {raw} at index {index}"
            ),
            Error::DimensionMismatch { left, right } => {
                write!(f, "matrix dimensions differ: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for Error {}
