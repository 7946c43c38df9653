use super::{Decision, StageReports};
use crate::parse::CanonicalText;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub const DEFAULT_HISTORY_DEPTH: usize = 4;

/// One past tick rendered as a single conditioning string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub t: f64,
    pub tokens: String,
}

impl HistoryEntry {
    pub fn from_tick(t: f64, reports: &StageReports, decision: &Decision) -> Self {
        let flat = |s: String| s.split_whitespace().collect::<Vec<_>>().join(" ");
        let tokens = format!(
            "t={:.1} | objects: {} | light: {} | signs: {} | lane: {} | decision: {}",
            t,
            flat(reports.objects.to_text()),
            flat(reports.light.to_text()),
            flat(reports.signs.to_text()),
            flat(reports.lane.to_text()),
            decision.filled_text
        );
        HistoryEntry { t, tokens }
    }
}

/// Fixed-capacity ring of past ticks, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    capacity: usize,
    entries: VecDeque<HistoryEntry>,
}

impl Default for HistoryBuffer {
    fn default() -> Self {
        Self::new(DEFAULT_HISTORY_DEPTH)
    }
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        Self { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: HistoryEntry) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    pub fn entries(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }

    /// Token strings, oldest first.
    pub fn tokens(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.tokens.clone()).collect()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Functional form of [`HistoryBuffer::push`].
pub fn update_history(buffer: &HistoryBuffer, entry: HistoryEntry) -> HistoryBuffer {
    let mut next = buffer.clone();
    next.push(entry);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(t: f64) -> HistoryEntry {
        HistoryEntry { t, tokens: format!("tick {t}") }
    }

    #[test]
    fn first_insert() {
        let b = update_history(&HistoryBuffer::default(), entry(1.0));
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn full_buffer_drops_oldest() {
        let mut b = HistoryBuffer::default();
        for t in 1..=4 {
            b.push(entry(t as f64));
        }
        let b = update_history(&b, entry(5.0));
        assert_eq!(b.len(), 4);
        assert_eq!(b.entries().next().unwrap().t, 2.0);
    }

    #[test]
    fn five_inserts_keep_last_four_in_order() {
        let mut b = HistoryBuffer::default();
        for t in 1..=5 {
            b = update_history(&b, entry(t as f64));
        }
        let ts: Vec<f64> = b.entries().map(|e| e.t).collect();
        assert_eq!(ts, vec![2.0, 3.0, 4.0, 5.0]);
    }
}
