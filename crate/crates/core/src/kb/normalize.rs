use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Text normalization applied identically to names and tweet text before
/// matching: lower-casing, optional diacritic removal, whitespace collapse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalizer {
    pub strip_diacritics: bool,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer { strip_diacritics: true }
    }
}

impl Normalizer {
    pub fn normalize(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut pending_space = false;
        let mut push = |c: char, out: &mut String| {
            if c.is_whitespace() {
                pending_space = !out.is_empty();
                return;
            }
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        };
        for c in text.chars().flat_map(char::to_lowercase) {
            if self.strip_diacritics {
                for d in std::iter::once(c).nfd().filter(|d| !is_combining_mark(*d)) {
                    push(d, &mut out);
                }
            } else {
                push(c, &mut out);
            }
        }
        out
    }
}
