use std::collections::HashMap;

/// Token table with dense indices, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    min_count: u64,
}

impl Vocabulary {
    /// Count tokens and keep those seen at least `min_count` times. Ties in
    /// frequency are broken by token text so indices are reproducible.
    pub fn build<'a, S, I>(sentences: I, min_count: u64) -> Vocabulary
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for sentence in sentences {
            for tok in sentence {
                *counts.entry(tok.as_ref()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|(_, c)| *c >= min_count).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        Self::from_counts(kept.into_iter().map(|(t, c)| (t.to_string(), c)), min_count)
    }

    /// Build from `(token, count)` pairs in index order.
    pub fn from_counts(pairs: impl IntoIterator<Item = (String, u64)>, min_count: u64) -> Vocabulary {
        let mut tokens = Vec::new();
        let mut counts = Vec::new();
        let mut index = HashMap::new();
        for (t, c) in pairs {
            index.insert(t.clone(), tokens.len() as u32);
            tokens.push(t);
            counts.push(c);
        }
        Vocabulary {
            tokens,
            counts,
            index,
            min_count,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, idx: u32) -> &str {
        &self.tokens[idx as usize]
    }

    pub fn count(&self, idx: u32) -> u64 {
        self.counts[idx as usize]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.tokens.iter().map(String::as_str).zip(self.counts.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prunes_and_orders() {
        let s: Vec<Vec<&str>> = vec![vec!["b", "a", "c"], vec!["a", "b", "d"], vec!["a"]];
        let v = Vocabulary::build(s.iter().map(Vec::as_slice), 2);
        assert_eq!(v.len(), 2);
        assert_eq!(v.get("a"), Some(0));
        assert_eq!(v.get("b"), Some(1));
        assert_eq!(v.count(0), 3);
        assert!(!v.contains("c"));
        assert!(v.iter().all(|(_, c)| c >= v.min_count()));
    }
}
