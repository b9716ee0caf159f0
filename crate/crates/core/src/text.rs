//! Canonical text form shared by every comparison in the crate.

use alloc::string::String;

/// Lowercases, trims, and collapses internal whitespace runs to one space.
///
/// Total and idempotent.
pub fn canonicalize(text: &str) -> String {
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Byte offsets of every (possibly overlapping) occurrence of `needle` in `haystack`.
pub(crate) fn match_offsets<'a>(haystack: &'a str, needle: &'a str) -> impl Iterator<Item = usize> + 'a {
    let mut from = 0;
    core::iter::from_fn(move || {
        if needle.is_empty() || from > haystack.len() {
            return None;
        }
        let found = haystack[from..].find(needle)? + from;
        // advance by one char so overlapping matches are still seen
        from = found + haystack[found..].chars().next().map_or(1, char::len_utf8);
        Some(found)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn lowercases_and_trims() {
        assert_eq!(canonicalize("Over-Cooked "), "over-cooked");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(canonicalize("food   quality"), "food quality");
        assert_eq!(canonicalize("\tfood \n quality\r\n"), "food quality");
    }

    #[test]
    fn empty_is_preserved() {
        assert_eq!(canonicalize(""), "");
        assert_eq!(canonicalize("   "), "");
    }

    #[test]
    fn offsets_overlap() {
        let found: Vec<usize> = match_offsets("x is is y", " is ").collect();
        assert_eq!(found, [1, 4]);
        let found: Vec<usize> = match_offsets("a is b is c", " is ").collect();
        assert_eq!(found, [1, 6]);
        let found: Vec<usize> = match_offsets("aaa", "aa").collect();
        assert_eq!(found, [0, 1]);
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC*") {
            let once = canonicalize(&s);
            prop_assert_eq!(canonicalize(&once), once);
        }
    }
}
