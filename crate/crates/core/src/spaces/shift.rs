use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::{MetricSpace, PairSample, SampleRng};
use crate::{Error, Result};

/// A word over `{0, …, A−1}` indexed by `n ∈ [−W, W]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShiftWord {
    symbols: Vec<u8>,
    alphabet: u8,
}

impl ShiftWord {
    /// `symbols[i]` is the symbol at index `n = i − W`.
    pub fn new(symbols: Vec<u8>, alphabet: u8) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidParameter(format!("alphabet size must be at least 2, got {alphabet}")));
        }
        if symbols.len() < 3 || symbols.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!("a word needs odd length 2W+1 with W >= 1, got {}", symbols.len())));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::InvalidParameter(format!("symbol {s} outside alphabet of size {alphabet}")));
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn constant(window: usize, alphabet: u8, symbol: u8) -> Result<Self> {
        Self::new(vec![symbol; 2 * window + 1], alphabet)
    }

    pub fn window(&self) -> usize {
        self.symbols.len() / 2
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Symbol at index `n`; panics when `|n| > W`.
    pub fn get(&self, n: i64) -> u8 {
        self.symbols[self.offset(n)]
    }

    pub fn set(&mut self, n: i64, symbol: u8) {
        assert!(symbol < self.alphabet, "symbol {symbol} outside alphabet");
        let i = self.offset(n);
        self.symbols[i] = symbol;
    }

    /// Smallest `|n|` at which the words differ, or `None` if they agree.
    /// Both words must share the window.
    pub fn disagreement_level(&self, other: &ShiftWord) -> Option<usize> {
        let w = self.window();
        debug_assert_eq!(w, other.window());
        let (a, b) = (&self.symbols, &other.symbols);
        let right = a[w..].iter().zip(&b[w..]);
        let left = a[..=w].iter().rev().zip(b[..=w].iter().rev());
        right.zip(left).position(|((p, q), (r, s))| p != q || r != s)
    }

    fn offset(&self, n: i64) -> usize {
        let w = self.window() as i64;
        assert!(n.abs() <= w, "index {n} outside window {w}");
        (n + w) as usize
    }
}

fn level_distance(level: Option<usize>) -> f64 {
    match level {
        Some(k) => 0.5f64.powi(k as i32),
        None => 0.0,
    }
}

/// `2^−k` for the smallest `|k|` where the words differ, `0` if they agree
/// on the whole window.
pub fn shift_distance(x: &ShiftWord, y: &ShiftWord) -> Result<f64> {
    if x.window() != y.window() || x.alphabet != y.alphabet {
        return Err(Error::ShiftMismatch(format!(
            "window {} alphabet {} vs window {} alphabet {}",
            x.window(),
            x.alphabet,
            y.window(),
            y.alphabet
        )));
    }
    Ok(level_distance(x.disagreement_level(y)))
}

/// The full shift on `A` symbols truncated to the window `[−W, W]`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftSpace {
    window: usize,
    alphabet: u8,
}

/// Exhaustive enumeration is refused above this many pairs.
pub const MAX_EXHAUSTIVE_PAIRS: usize = 1 << 23;

impl ShiftSpace {
    pub fn new(window: usize, alphabet: u8) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidParameter("shift window must be positive".into()));
        }
        if alphabet < 2 {
            return Err(Error::InvalidParameter(format!("alphabet size must be at least 2, got {alphabet}")));
        }
        Ok(Self { window, alphabet })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    fn word_count(&self) -> Option<usize> {
        (self.alphabet as usize).checked_pow(2 * self.window as u32 + 1)
    }

    /// Every word of the window, in lexicographic order.
    pub fn all_words(&self) -> Result<Vec<ShiftWord>> {
        let count = self
            .word_count()
            .filter(|&c| c <= MAX_EXHAUSTIVE_PAIRS)
            .ok_or_else(|| Error::InvalidParameter(format!("too many words for window {} alphabet {}", self.window, self.alphabet)))?;
        let len = 2 * self.window + 1;
        let a = self.alphabet as usize;
        Ok((0..count)
            .map(|mut c| {
                let mut symbols = vec![0u8; len];
                for s in symbols.iter_mut().rev() {
                    *s = (c % a) as u8;
                    c /= a;
                }
                ShiftWord { symbols, alphabet: self.alphabet }
            })
            .collect())
    }

    /// All unordered pairs of distinct words whose disagreement level lies in
    /// `[min_level, max_level]`, i.e. distances in `[2^−max_level, 2^−min_level]`.
    pub fn exhaustive_pairs(&self, min_level: usize, max_level: usize) -> Result<PairSample<ShiftWord>> {
        if min_level > max_level || max_level > self.window {
            return Err(Error::InvalidParameter(format!(
                "level range [{min_level}, {max_level}] not inside [0, {}]",
                self.window
            )));
        }
        let words = self.all_words()?;
        let w = self.window;
        // words sharing the block of levels < min_level
        let mut groups: BTreeMap<&[u8], Vec<u32>> = BTreeMap::new();
        for (i, word) in words.iter().enumerate() {
            let key = if min_level == 0 { &word.symbols[..0] } else { &word.symbols[w + 1 - min_level..w + min_level] };
            groups.entry(key).or_default().push(i as u32);
        }
        let total: usize = groups.values().map(|g| g.len() * (g.len() - 1) / 2).sum();
        if total > MAX_EXHAUSTIVE_PAIRS {
            return Err(Error::InvalidParameter(format!(
                "{total} pairs exceed the exhaustive limit {MAX_EXHAUSTIVE_PAIRS}"
            )));
        }
        let mut index = Vec::with_capacity(total);
        for members in groups.values() {
            for (k, &i) in members.iter().enumerate() {
                for &j in &members[k + 1..] {
                    let level = words[i as usize].disagreement_level(&words[j as usize]);
                    if matches!(level, Some(l) if l <= max_level) {
                        index.push([i, j]);
                    }
                }
            }
        }
        index.sort_unstable();
        PairSample::from_indexed(words, index)
    }
}

impl MetricSpace for ShiftSpace {
    type Point = ShiftWord;

    fn distance(&self, p: &ShiftWord, q: &ShiftWord) -> f64 {
        level_distance(p.disagreement_level(q))
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn random_point(&self, rng: &mut SampleRng) -> ShiftWord {
        let symbols = (0..2 * self.window + 1).map(|_| rng.gen_range(0..self.alphabet)).collect();
        ShiftWord { symbols, alphabet: self.alphabet }
    }

    fn random_near(&self, p: &ShiftWord, radius: f64, rng: &mut SampleRng) -> Option<ShiftWord> {
        if radius >= 1.0 {
            return Some(self.random_point(rng));
        }
        if !(radius > 0.0) {
            return None;
        }
        let k = (-radius.log2()).ceil() as usize;
        if k > self.window {
            return None;
        }
        let mut q = p.clone();
        let w = self.window;
        for level in k..=w {
            q.symbols[w + level] = rng.gen_range(0..self.alphabet);
            q.symbols[w - level] = rng.gen_range(0..self.alphabet);
        }
        Some(q)
    }
}
