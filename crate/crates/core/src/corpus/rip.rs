//! Detection of the upper-case `RIP` keyword.
//!
//! A token boundary is the start or end of the text or any character that is
//! not a letter. `R.I.P.`, `rip` and `GRIP` are therefore not keyword hits,
//! while `#RIP`, `RIP:` and `RIP2Pac` are.

const KEYWORD: &str = "RIP";

/// Byte offsets just past every standalone `RIP` token in `text`.
pub fn rip_token_ends(text: &str) -> impl Iterator<Item = usize> + '_ {
    text.match_indices(KEYWORD).filter_map(move |(start, _)| {
        let end = start + KEYWORD.len();
        let before_ok = text[..start].chars().next_back().is_none_or(|c| !c.is_alphabetic());
        let after_ok = text[end..].chars().next().is_none_or(|c| !c.is_alphabetic());
        (before_ok && after_ok).then_some(end)
    })
}

/// True iff the text contains the keyword fully upper-cased as a standalone token.
pub fn keep_uppercase_rip(text: &str) -> bool {
    rip_token_ends(text).next().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(keep_uppercase_rip("RIP Nelson Mandela"));
        assert!(!keep_uppercase_rip("rip my phone"));
        assert!(!keep_uppercase_rip("GRIP of fear"));
        assert!(!keep_uppercase_rip("R.I.P. Madiba"));
        assert!(!keep_uppercase_rip("Rip Madiba"));
        assert!(!keep_uppercase_rip("RIPs everywhere"));
        assert!(keep_uppercase_rip("#RIP Madiba"));
        assert!(keep_uppercase_rip("so sad. RIP"));
        assert!(keep_uppercase_rip("RIP, Madiba"));
        assert!(keep_uppercase_rip("ÉRIP RIP"));
        assert!(!keep_uppercase_rip("éRIP"));
        assert!(!keep_uppercase_rip(""));
    }

    #[test]
    fn offsets() {
        let text = "RIP a, RIP b GRIP";
        let ends: Vec<_> = rip_token_ends(text).collect();
        assert_eq!(ends, vec![3, 10]);
    }
}
