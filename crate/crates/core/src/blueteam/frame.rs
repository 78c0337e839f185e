//! 16-bit broadcast frame codec.
//!
//! Layout, most significant bit first:
//!
//! ```text
//!  15      11 10    7   6   5   4       0
//! +----------+-------+---+---+---------+
//! | whistle  | 0000  | o | 0 | canary  |
//! +----------+-------+---+---+---------+
//! ```
//!
//! Canary and whistle are 5-bit UIDs, `o` is the overheard bit. Bits 5 and
//! 7..=10 are always zero when encoded.

const UID_LIMIT: u8 = 32;

/// Packs a canary UID, overheard bit and whistle UID.
///
/// Panics if a UID does not fit in five bits or `overheard > 1`.
pub fn pad(canary: u8, overheard: u8, whistle: u8) -> u16 {
    assert!(canary < UID_LIMIT, "canary {canary} does not fit in 5 bits");
    assert!(whistle < UID_LIMIT, "whistle {whistle} does not fit in 5 bits");
    assert!(overheard <= 1, "overheard must be a single bit");
    ((whistle as u16) << 11) | ((overheard as u16) << 6) | canary as u16
}

/// Recovers `(canary, overheard, whistle)`. The canary and whistle masks are
/// six bits wide, so a malformed frame with bit 5 set yields a canary >= 32.
pub fn unpad(m: u16) -> (u8, u8, u8) {
    let canary = (m & 0x3F) as u8;
    let overheard = ((m >> 6) & 0x1) as u8;
    let whistle = ((m >> 11) & 0x3F) as u8;
    (canary, overheard, whistle)
}

/// Bits that a well-formed frame never sets.
pub const UNUSED_MASK: u16 = (1 << 5) | (0b1111 << 7);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CwFrame {
    pub raw: u16,
}

impl CwFrame {
    pub fn new(canary: u8, overheard: bool, whistle: u8) -> Self {
        Self { raw: pad(canary, overheard as u8, whistle) }
    }

    pub fn canary(&self) -> u8 {
        unpad(self.raw).0
    }

    pub fn overheard(&self) -> bool {
        unpad(self.raw).1 == 1
    }

    pub fn whistle(&self) -> u8 {
        unpad(self.raw).2
    }
}

impl From<u16> for CwFrame {
    fn from(raw: u16) -> Self {
        Self { raw }
    }
}
