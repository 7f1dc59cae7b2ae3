//! 32-digit hex blocks, byte 0 first.

use aes_eqclass::Block;

use crate::CliError;

/// Parse a 16-byte block. Upper-case digits are accepted; output is always lower-case.
pub fn parse_block(s: &str) -> Result<Block, CliError> {
    let bad = |reason: &str| CliError::BadHex {
        input: s.to_owned(),
        reason: reason.to_owned(),
    };
    if s.len() != 32 {
        return Err(bad("expected exactly 32 hex digits"));
    }
    let mut out = [0u8; 16];
    hex::decode_to_slice(s, &mut out).map_err(|e| bad(&e.to_string()))?;
    Ok(out)
}

pub fn format_block(b: &Block) -> String {
    hex::encode(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let s = "000102030405060708090a0b0c0d0e0f";
        let b = parse_block(s).unwrap();
        assert_eq!(b[15], 0x0f);
        assert_eq!(format_block(&b), s);
        assert_eq!(format_block(&parse_block(&s.to_uppercase()).unwrap()), s);
        assert!(parse_block("00").is_err());
        assert!(parse_block("zz0102030405060708090a0b0c0d0e0f").is_err());
        assert!(parse_block(&format!("{s}00")).is_err());
    }
}
