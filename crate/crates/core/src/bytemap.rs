//! Lossless byte <-> printable-character mapping for token text in files.
//!
//! Vocabulary and merge files store token text as printable strings even
//! though tokens are arbitrary byte sequences. Bytes that are printable and
//! non-space keep their Latin-1 code point; everything else (controls, space,
//! DEL, soft hyphen, ...) is shifted into the U+0100 range in byte order.
//! This is the conventional byte-level BPE serialization, so a space-prefixed
//! token like " def" appears as "Ġdef" and never contains a literal space.

/// True for bytes that keep their own code point in the display form.
fn keeps_identity(b: u8) -> bool {
    (0x21..=0x7e).contains(&b) || (0xa1..=0xac).contains(&b) || (0xae..=0xff).contains(&b)
}

fn tables() -> (&'static [char; 256], &'static [Option<u8>; 0x200]) {
    use std::sync::OnceLock;
    static TABLES: OnceLock<([char; 256], [Option<u8>; 0x200])> = OnceLock::new();
    let (fwd, rev) = TABLES.get_or_init(|| {
        let mut fwd = ['\0'; 256];
        let mut rev = [None; 0x200];
        let mut shifted = 0u32;
        for b in 0u32..256 {
            let ch = if keeps_identity(b as u8) {
                char::from_u32(b).unwrap()
            } else {
                let ch = char::from_u32(0x100 + shifted).unwrap();
                shifted += 1;
                ch
            };
            fwd[b as usize] = ch;
            rev[ch as usize] = Some(b as u8);
        }
        (fwd, rev)
    });
    (fwd, rev)
}

pub fn byte_to_char(b: u8) -> char {
    tables().0[b as usize]
}

pub fn char_to_byte(c: char) -> Option<u8> {
    let idx = c as usize;
    if idx < 0x200 {
        tables().1[idx]
    } else {
        None
    }
}

/// Render raw token bytes as the printable display form.
pub fn bytes_to_display(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_char(b)).collect()
}

/// Parse a display-form string back into raw bytes.
///
/// Fails on characters outside the 256-entry table.
pub fn display_to_bytes(s: &str) -> Result<Vec<u8>, char> {
    s.chars().map(|c| char_to_byte(c).ok_or(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bijective_over_all_bytes() {
        for b in 0u8..=255 {
            let c = byte_to_char(b);
            assert_eq!(char_to_byte(c), Some(b), "byte 0x{b:02x} via {c:?}");
        }
    }

    #[test]
    fn space_and_newline_take_shifted_forms() {
        assert_eq!(bytes_to_display(b" def"), "\u{120}def");
        assert_eq!(bytes_to_display(b"\n"), "\u{10a}");
        assert_eq!(display_to_bytes("\u{120}def").unwrap(), b" def".to_vec());
    }

    #[test]
    fn rejects_unmapped_characters() {
        assert_eq!(display_to_bytes("a b"), Err(' '));
    }
}
