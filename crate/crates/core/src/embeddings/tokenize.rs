use unicode_normalization::char::is_combining_mark;

pub const URL_TOKEN: &str = "<url>";
pub const USER_TOKEN: &str = "<user>";
pub const NUM_TOKEN: &str = "<num>";

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || is_combining_mark(c)
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Split tweet text into lower-cased tokens. URLs become `<url>`, user
/// mentions `<user>` and digit-only words `<num>`; hashtags keep their `#`.
/// Other punctuation separates tokens and is dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if matches!(chunk, URL_TOKEN | USER_TOKEN | NUM_TOKEN) {
            out.push(chunk.to_string());
            continue;
        }
        if is_url(chunk) {
            out.push(URL_TOKEN.to_string());
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if !is_word_char(chars[i]) {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect::<String>().to_lowercase();
            let sigil = start.checked_sub(1).map(|p| chars[p]);
            let token = match sigil {
                Some('@') => USER_TOKEN.to_string(),
                Some('#') => format!("#{word}"),
                _ if word.chars().all(|c| c.is_ascii_digit()) => NUM_TOKEN.to_string(),
                _ => word,
            };
            out.push(token);
        }
    }
    out
}
