use std::collections::HashMap;

use crate::error::{Error, Result};

/// Integer arc label.
pub type Label = u32;

/// The empty string.
pub const EPSILON: Label = 0;
/// Placeholder emitted by the NMT system for out-of-vocabulary words.
pub const UNK: Label = 1;

pub const EPSILON_SYMBOL: &str = "<eps>";
pub const UNK_SYMBOL: &str = "UNK";

/// Bidirectional word ↔ label map.
///
/// Labels 0 and 1 are always present and always mean ε and UNK, whatever
/// surface form a table file gives them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    words: Vec<String>,
    labels: HashMap<String, Label>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut table = SymbolTable {
            words: Vec::new(),
            labels: HashMap::new(),
        };
        table.push(EPSILON_SYMBOL.to_string());
        table.push(UNK_SYMBOL.to_string());
        table
    }

    fn push(&mut self, word: String) -> Label {
        let label = self.words.len() as Label;
        self.labels.insert(word.clone(), label);
        self.words.push(word);
        label
    }

    /// Label of `word`, registering it if new.
    pub fn add(&mut self, word: &str) -> Label {
        match self.labels.get(word) {
            Some(&l) => l,
            None => self.push(word.to_string()),
        }
    }

    /// Register `word` under an explicit label (used when loading tables).
    ///
    /// Labels may be sparse; gaps are filled with unnamed placeholders that
    /// cannot be looked up by word.
    pub fn insert(&mut self, word: &str, label: Label) -> Result<()> {
        if word.is_empty() {
            return Err(Error::contract("empty symbol"));
        }
        if let Some(&existing) = self.labels.get(word) {
            if existing == label {
                return Ok(());
            }
            return Err(Error::contract(format!(
                "symbol {word:?} already has label {existing}, cannot also map to {label}"
            )));
        }
        let idx = label as usize;
        if idx < self.words.len() {
            let current = &self.words[idx];
            if label == EPSILON || label == UNK {
                // reserved ids keep their meaning but accept a custom spelling
                let old = current.clone();
                self.labels.remove(&old);
            } else if !current.is_empty() {
                return Err(Error::contract(format!(
                    "label {label} already names {current:?}, cannot also name {word:?}"
                )));
            }
            self.words[idx] = word.to_string();
        } else {
            self.words.resize(idx, String::new());
            self.words.push(word.to_string());
        }
        self.labels.insert(word.to_string(), label);
        Ok(())
    }

    pub fn label(&self, word: &str) -> Option<Label> {
        self.labels.get(word).copied()
    }

    pub fn word(&self, label: Label) -> Option<&str> {
        self.words
            .get(label as usize)
            .map(String::as_str)
            .filter(|w| !w.is_empty())
    }

    /// Number of label slots (including ε and UNK).
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(label, word)` pairs in label order, skipping unnamed gaps.
    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> {
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_empty())
            .map(|(i, w)| (i as Label, w.as_str()))
    }

    /// Render labels as a space-separated string; unknown labels print as `#id`.
    pub fn render(&self, labels: &[Label]) -> String {
        labels
            .iter()
            .map(|&l| match self.word(l) {
                Some(w) => w.to_string(),
                None => format!("#{l}"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Map whitespace-separated words to labels, registering unseen ones.
    pub fn encode(&mut self, text: &str) -> Vec<Label> {
        text.split_whitespace().map(|w| self.add(w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_labels() {
        let t = SymbolTable::new();
        assert_eq!(t.label("<eps>"), Some(EPSILON));
        assert_eq!(t.label("UNK"), Some(UNK));
        assert_eq!(t.word(UNK), Some("UNK"));
    }

    #[test]
    fn add_is_idempotent_and_bijective() {
        let mut t = SymbolTable::new();
        let a = t.add("die");
        let b = t.add("Politik");
        assert_eq!(a, 2);
        assert_eq!(t.add("die"), a);
        assert_ne!(a, b);
        assert_eq!(t.word(b), Some("Politik"));
        assert_eq!(t.render(&[a, UNK, b]), "die UNK Politik");
    }

    #[test]
    fn explicit_insert_rejects_conflicts() {
        let mut t = SymbolTable::new();
        t.insert("a", 5).unwrap();
        assert_eq!(t.word(3), None);
        assert!(t.insert("b", 5).is_err());
        assert!(t.insert("a", 6).is_err());
        t.insert("<unk>", UNK).unwrap();
        assert_eq!(t.label("<unk>"), Some(UNK));
        assert_eq!(t.label("UNK"), None);
    }
}
