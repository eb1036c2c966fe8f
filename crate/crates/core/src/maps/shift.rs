use rand::seq::SliceRandom;

use super::{Direction, MapSystem};
use crate::spaces::{sample_rng, SampleRng, ShiftWord};
use crate::{Error, Result};

/// The left shift `(σx)_n = x_{n+1}` or its inverse. The vacated boundary
/// slot repeats the edge symbol, so only `|n| ≤ W − 1` is trustworthy.
pub fn shift_map(x: &ShiftWord, direction: Direction) -> ShiftWord {
    let s = x.symbols();
    let len = s.len();
    let mut out = Vec::with_capacity(len);
    match direction {
        Direction::Forward => {
            out.extend_from_slice(&s[1..]);
            out.push(s[len - 1]);
        }
        Direction::Inverse => {
            out.push(s[0]);
            out.extend_from_slice(&s[..len - 1]);
        }
    }
    ShiftWord::new(out, x.alphabet()).expect("shifted word keeps length and alphabet")
}

pub fn shift_system() -> MapSystem<ShiftWord> {
    MapSystem::exact("shift", |x| shift_map(x, Direction::Forward), |x| shift_map(x, Direction::Inverse))
}

/// Independent permutations of the alphabet at each index `|n| ≥ min_level`.
/// It preserves every disagreement position, hence is an isometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPermutation {
    forward: Vec<Vec<u8>>,
    inverse: Vec<Vec<u8>>,
}

impl SymbolPermutation {
    pub fn random(window: usize, alphabet: u8, min_level: usize, rng: &mut SampleRng) -> Self {
        let w = window as i64;
        let identity: Vec<u8> = (0..alphabet).collect();
        let forward: Vec<Vec<u8>> = (-w..=w)
            .map(|n| {
                let mut p = identity.clone();
                if n.unsigned_abs() as usize >= min_level {
                    p.shuffle(rng);
                }
                p
            })
            .collect();
        let inverse = forward
            .iter()
            .map(|p| {
                let mut q = vec![0u8; p.len()];
                for (i, &v) in p.iter().enumerate() {
                    q[v as usize] = i as u8;
                }
                q
            })
            .collect();
        Self { forward, inverse }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|p| p.iter().enumerate().all(|(i, &v)| i == v as usize))
    }

    fn permute(table: &[Vec<u8>], x: &ShiftWord) -> ShiftWord {
        let symbols = x.symbols().iter().zip(table).map(|(&s, p)| p[s as usize]).collect();
        ShiftWord::new(symbols, x.alphabet()).expect("permutation stays in the alphabet")
    }

    pub fn apply(&self, x: &ShiftWord) -> ShiftWord {
        Self::permute(&self.forward, x)
    }

    pub fn apply_inverse(&self, x: &ShiftWord) -> ShiftWord {
        Self::permute(&self.inverse, x)
    }
}

/// `g = τ₁∘σ∘τ₂` with `τ₁` permuting symbols at levels `≥ outer_level` and `τ₂`
/// at levels `≥ inner_level`, both drawn from `seed`.
///
/// Since `τ₁` and `τ₂` are isometries, `d_W′(σ, g) = 0`; the uniform distance
/// is at most `2^−(outer_level−1) + 2^−(inner_level−1)` on each side.
pub fn walters_perturbation(
    window: usize,
    alphabet: u8,
    seed: u64,
    outer_level: usize,
    inner_level: usize,
) -> Result<MapSystem<ShiftWord>> {
    if outer_level == 0 || inner_level == 0 || outer_level > window || inner_level > window {
        return Err(Error::InvalidParameter(format!(
            "permutation levels ({outer_level}, {inner_level}) must lie in [1, {window}]"
        )));
    }
    let mut rng = sample_rng(seed, 2);
    let outer = SymbolPermutation::random(window, alphabet, outer_level, &mut rng);
    let inner = SymbolPermutation::random(window, alphabet, inner_level, &mut rng);
    let (o, i) = (outer.clone(), inner.clone());
    Ok(MapSystem::exact(
        format!("walters:{seed}:{outer_level}:{inner_level}"),
        move |x| outer.apply(&shift_map(&inner.apply(x), Direction::Forward)),
        move |x| i.apply_inverse(&shift_map(&o.apply_inverse(x), Direction::Inverse)),
    ))
}
