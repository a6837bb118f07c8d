//! Name index and anchored mention matching.
//!
//! Matching is anchored: names are only looked for directly after a `RIP`
//! token (separated by optional whitespace or punctuation). Because every
//! search starts at a known position, the automaton is a character trie over
//! normalized names and needs no failure links. A scan costs time linear in
//! the text following each keyword.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::rip_token_ends;

use super::entry::{PersonEntry, PersonId};
use super::normalize::Normalizer;

const ROOT: u32 = 0;

#[derive(Debug, Default, Clone)]
struct Node {
    /// Sorted by character.
    children: Vec<(char, u32)>,
    /// Index into `NameIndex::id_sets` when a pattern ends here.
    terminal: Option<u32>,
}

/// Mapping from normalized names and aliases to the people carrying them.
#[derive(Debug, Clone)]
pub struct NameIndex {
    normalizer: Normalizer,
    patterns: BTreeMap<String, BTreeSet<PersonId>>,
    nodes: Vec<Node>,
    id_sets: Vec<BTreeSet<PersonId>>,
}

impl NameIndex {
    pub fn build<'a>(entries: impl IntoIterator<Item = &'a PersonEntry>) -> NameIndex {
        Self::with_normalizer(entries, Normalizer::default())
    }

    pub fn with_normalizer<'a>(
        entries: impl IntoIterator<Item = &'a PersonEntry>,
        normalizer: Normalizer,
    ) -> NameIndex {
        let mut patterns: BTreeMap<String, BTreeSet<PersonId>> = BTreeMap::new();
        for entry in entries {
            for name in entry.names() {
                let key = normalizer.normalize(name);
                if !key.is_empty() {
                    patterns.entry(key).or_default().insert(entry.id.clone());
                }
            }
        }

        let mut nodes = vec![Node::default()];
        let mut id_sets = Vec::with_capacity(patterns.len());
        for (pattern, ids) in &patterns {
            let mut at = ROOT;
            for c in pattern.chars() {
                let children = &nodes[at as usize].children;
                at = match children.binary_search_by_key(&c, |&(k, _)| k) {
                    Ok(i) => children[i].1,
                    Err(i) => {
                        let id = nodes.len() as u32;
                        nodes[at as usize].children.insert(i, (c, id));
                        nodes.push(Node::default());
                        id
                    }
                };
            }
            nodes[at as usize].terminal = Some(id_sets.len() as u32);
            id_sets.push(ids.clone());
        }

        NameIndex {
            normalizer,
            patterns,
            nodes,
            id_sets,
        }
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn patterns(&self) -> impl Iterator<Item = (&str, &BTreeSet<PersonId>)> {
        self.patterns.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Exact lookup of a name after normalization.
    pub fn lookup(&self, name: &str) -> Option<&BTreeSet<PersonId>> {
        self.patterns.get(&self.normalizer.normalize(name))
    }

    /// People whose name or alias directly follows a `RIP` token in `text`.
    ///
    /// At each keyword position the longest name ending on a word boundary
    /// wins; all people sharing that name are returned.
    pub fn match_mentions(&self, text: &str) -> BTreeSet<PersonId> {
        let mut found = BTreeSet::new();
        for end in rip_token_ends(text) {
            let rest = text[end..].trim_start_matches(|c: char| !c.is_alphanumeric());
            if rest.is_empty() {
                continue;
            }
            if let Some(set) = self.longest_at_start(&self.normalizer.normalize(rest)) {
                found.extend(self.id_sets[set as usize].iter().cloned());
            }
        }
        found
    }

    fn longest_at_start(&self, normalized: &str) -> Option<u32> {
        let mut best = None;
        let mut at = ROOT;
        let mut chars = normalized.chars().peekable();
        while let Some(c) = chars.next() {
            let children = &self.nodes[at as usize].children;
            match children.binary_search_by_key(&c, |&(k, _)| k) {
                Ok(i) => at = children[i].1,
                Err(_) => break,
            }
            if let Some(t) = self.nodes[at as usize].terminal {
                if chars.peek().is_none_or(|n| !n.is_alphanumeric()) {
                    best = Some(t);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::entry::{parse_person_entry, KbDate};

    fn person(id: &str, name: &str, aliases: &[&str]) -> PersonEntry {
        PersonEntry {
            id: id.into(),
            name: name.into(),
            aliases: aliases.iter().map(|s| s.to_string()).collect(),
            birth: KbDate::parse("1950-01-01", 11).unwrap(),
            death: None,
            description: String::new(),
        }
    }

    fn mandela_index() -> NameIndex {
        let e = parse_person_entry(
            r#"{"id":"8023","name":"Nelson Mandela","birth":{"date":"1918-07-18","precision":11},"death":{"date":"2013-12-05","precision":11},"description":"x","aliases":["Nelson Rolihlahla Mandela","Mandela","Madiba"]}"#,
            1,
        )
        .unwrap()
        .unwrap();
        NameIndex::build([&e])
    }

    fn ids(v: &[&str]) -> BTreeSet<PersonId> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_patterns() {
        assert_eq!(mandela_index().pattern_count(), 4);
        let dup = person("1", "Cher", &["Cher", "CHER", "Cherilyn"]);
        assert_eq!(NameIndex::build([&dup]).pattern_count(), 2);
    }

    #[test]
    fn shared_names_map_to_all_people() {
        let a = person("1", "John Smith", &[]);
        let b = person("2", "John  smith", &["Smithy"]);
        let idx = NameIndex::build([&a, &b]);
        assert_eq!(idx.lookup("JOHN SMITH"), Some(&ids(&["1", "2"])));
        assert_eq!(idx.match_mentions("RIP John Smith"), ids(&["1", "2"]));
    }

    #[test]
    fn mandela_mentions() {
        let idx = mandela_index();
        assert_eq!(idx.match_mentions("RIP Nelson Mandela, a great man"), ids(&["8023"]));
        assert_eq!(idx.match_mentions("RIP Madiba"), ids(&["8023"]));
        assert_eq!(idx.match_mentions("RIP my car"), ids(&[]));
        assert_eq!(idx.match_mentions("rip Madiba"), ids(&[]));
        assert_eq!(idx.match_mentions("Madiba RIP"), ids(&[]));
        assert_eq!(idx.match_mentions("RIP... #Madiba!"), ids(&["8023"]));
        assert_eq!(idx.match_mentions("RIP Madibas"), ids(&[]));
        assert_eq!(idx.match_mentions("RIP MANDELA"), ids(&["8023"]));
    }

    #[test]
    fn longest_match_wins() {
        let a = person("1", "Paul", &[]);
        let b = person("2", "Paul Walker", &[]);
        let idx = NameIndex::build([&a, &b]);
        assert_eq!(idx.match_mentions("RIP Paul Walker"), ids(&["2"]));
        assert_eq!(idx.match_mentions("RIP Paul Walk"), ids(&["1"]));
        assert_eq!(idx.match_mentions("RIP Paul, RIP Paul Walker"), ids(&["1", "2"]));
    }

    #[test]
    fn diacritics_are_optional_in_tweets() {
        let a = person("1", "Gabriel García Márquez", &[]);
        let idx = NameIndex::build([&a]);
        assert_eq!(idx.match_mentions("RIP Gabriel Garcia Marquez"), ids(&["1"]));
        assert_eq!(idx.match_mentions("RIP GABRIEL GARCÍA MÁRQUEZ"), ids(&["1"]));
    }
}
