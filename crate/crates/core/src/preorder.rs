//! Total preorders over valuations, used as epistemic states.
//!
//! A state is stored as a rank per valuation. Ranks are always contiguous
//! (`0..=k`, every level nonempty), so two states describe the same preorder
//! iff their rank vectors are equal.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lang::{Language, ModelSet, Valuation};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TotalPreorder {
    atoms: u8,
    rank: Vec<u32>,
    levels: u32,
}

impl TotalPreorder {
    /// The single-level state in which every valuation is equally plausible.
    pub fn uniform(atoms: usize) -> Self {
        let size = ModelSet::empty(atoms).universe_size();
        Self {
            atoms: atoms as u8,
            rank: vec![0; size],
            levels: 1,
        }
    }

    /// Builds a state from levels listed most plausible first.
    pub fn from_levels(lang: &Language, levels: &[ModelSet]) -> Result<Self> {
        Self::from_level_sets(lang.num_atoms(), levels)
    }

    pub(crate) fn from_level_sets(atoms: usize, levels: &[ModelSet]) -> Result<Self> {
        let size = 1usize << atoms;
        let mut rank = vec![u32::MAX; size];
        for (i, level) in levels.iter().enumerate() {
            if level.num_atoms() != atoms {
                return Err(Error::LanguageMismatch {
                    left: atoms,
                    right: level.num_atoms(),
                });
            }
            if level.is_empty() {
                return Err(Error::EmptyLevel(i));
            }
            for v in level.iter() {
                if rank[v.index()] != u32::MAX {
                    return Err(Error::NotAPartition(format!(
                        "{} appears in more than one level",
                        v.to_bitstring(atoms)
                    )));
                }
                rank[v.index()] = i as u32;
            }
        }
        let missing: Vec<String> = rank
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == u32::MAX)
            .map(|(i, _)| Valuation(i as u32).to_bitstring(atoms))
            .collect();
        if !missing.is_empty() {
            return Err(Error::NotAPartition(format!(
                "unranked valuations: {}",
                missing.join(" ")
            )));
        }
        Ok(Self {
            atoms: atoms as u8,
            rank,
            levels: levels.len() as u32,
        })
    }

    /// Parses the canonical text form, e.g. `{11 10} {01 00}`.
    pub fn parse(lang: &Language, text: &str) -> Result<Self> {
        let mut levels = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('{') else {
                return Err(Error::NotAPartition(format!("expected `{{` at `{rest}`")));
            };
            let Some(end) = body.find('}') else {
                return Err(Error::NotAPartition("unterminated level".into()));
            };
            levels.push(lang.parse_model_set(&body[..end])?);
            rest = body[end + 1..].trim_start();
        }
        Self::from_levels(lang, &levels)
    }

    /// Two-level faithful state: `kb` at the bottom, everything else above it.
    pub fn faithful_from_kb(kb: &ModelSet) -> Result<Self> {
        if kb.is_empty() {
            return Err(Error::EmptyInput);
        }
        let rest = kb.complement();
        if rest.is_empty() {
            Ok(Self::uniform(kb.num_atoms()))
        } else {
            Self::from_level_sets(kb.num_atoms(), &[kb.clone(), rest])
        }
    }

    /// Compresses an arbitrary total rank map (indexed by valuation) to
    /// contiguous levels, preserving the induced order.
    pub fn normalize(atoms: usize, ranks: &[u64]) -> Self {
        assert_eq!(ranks.len(), 1usize << atoms, "rank map must be total");
        let mut distinct: Vec<u64> = ranks.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let rank = ranks
            .iter()
            .map(|r| distinct.binary_search(r).unwrap() as u32)
            .collect();
        Self {
            atoms: atoms as u8,
            rank,
            levels: distinct.len() as u32,
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms as usize
    }

    pub fn num_levels(&self) -> usize {
        self.levels as usize
    }

    pub fn rank(&self, v: Valuation) -> u32 {
        self.rank[v.index()]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// `v ⪯ w`
    pub fn le(&self, v: Valuation, w: Valuation) -> bool {
        self.rank(v) <= self.rank(w)
    }

    /// `v ≺ w`
    pub fn lt(&self, v: Valuation, w: Valuation) -> bool {
        self.rank(v) < self.rank(w)
    }

    pub fn level(&self, i: usize) -> ModelSet {
        ModelSet::from_valuations(
            self.num_atoms(),
            (0..self.rank.len())
                .filter(|&v| self.rank[v] as usize == i)
                .map(|v| Valuation(v as u32)),
        )
    }

    pub fn levels(&self) -> Vec<ModelSet> {
        let mut out = vec![ModelSet::empty(self.num_atoms()); self.num_levels()];
        for (v, &r) in self.rank.iter().enumerate() {
            out[r as usize].insert(Valuation(v as u32));
        }
        out
    }

    fn check_lang(&self, a: &ModelSet) -> Result<()> {
        if a.num_atoms() != self.num_atoms() {
            return Err(Error::LanguageMismatch {
                left: self.num_atoms(),
                right: a.num_atoms(),
            });
        }
        Ok(())
    }

    /// `min(a, ⪯)`: the most plausible members of `a`.
    pub fn min_models(&self, a: &ModelSet) -> Result<ModelSet> {
        self.check_lang(a)?;
        let Some(best) = a.iter().map(|v| self.rank(v)).min() else {
            return Err(Error::EmptyInput);
        };
        Ok(ModelSet::from_valuations(
            self.num_atoms(),
            a.iter().filter(|&v| self.rank(v) == best),
        ))
    }

    /// `[B(E)]`, the level-0 valuations.
    pub fn belief_set(&self) -> ModelSet {
        self.level(0)
    }

    /// Whether the sentence with models `a` belongs to `B(E)`.
    pub fn believes(&self, a: &ModelSet) -> Result<bool> {
        self.check_lang(a)?;
        Ok(self.belief_set().is_subset(a))
    }

    /// Levels as bitstring lists, most plausible first.
    pub fn to_bitstring_levels(&self) -> Vec<Vec<String>> {
        self.levels().iter().map(ModelSet::to_bitstrings).collect()
    }
}

impl fmt::Display for TotalPreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels().iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for TotalPreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TotalPreorder[{self}]")
    }
}

/// A nonempty sequence of consistent inputs `γ1, ..., γn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSequence {
    inputs: Vec<ModelSet>,
}

impl InputSequence {
    pub fn new(inputs: Vec<ModelSet>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(index) = inputs.iter().position(ModelSet::is_empty) {
            return Err(Error::EmptyInputAt { index });
        }
        let n = inputs[0].num_atoms();
        if let Some(bad) = inputs.iter().find(|m| m.num_atoms() != n) {
            return Err(Error::LanguageMismatch {
                left: n,
                right: bad.num_atoms(),
            });
        }
        Ok(Self { inputs })
    }

    pub fn inputs(&self) -> &[ModelSet] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Largest atom count [`enumerate_preorders`] accepts (`|V| <= 64`).
pub const MAX_ENUM_ATOMS: usize = 6;

/// Streams every total preorder over an `n`-atom language exactly once.
///
/// The order is canonical: a preorder is an ordered set partition of `V`,
/// chosen bottom level first; at each depth the candidate block runs over the
/// nonempty subsets of the still-unranked valuations in ascending bitmask
/// order. The first state yielded is therefore `{00..0} {0..01} ...`, one
/// valuation per level in ascending index order, and the last is the uniform
/// state.
pub fn enumerate_preorders(lang: &Language) -> PreorderIter {
    PreorderIter::new(lang.num_atoms())
}

pub struct PreorderIter {
    atoms: usize,
    // (unranked valuations at this depth, current block)
    frames: Vec<(u64, u64)>,
    started: bool,
}

impl PreorderIter {
    pub fn new(atoms: usize) -> Self {
        assert!(
            (1..=MAX_ENUM_ATOMS).contains(&atoms),
            "preorder enumeration supports 1..=6 atoms"
        );
        Self {
            atoms,
            frames: Vec::new(),
            started: false,
        }
    }

    fn full(&self) -> u64 {
        let size = 1u32 << self.atoms;
        if size == 64 {
            u64::MAX
        } else {
            (1u64 << size) - 1
        }
    }

    /// Advances to the next ordered partition, returning its blocks as masks.
    pub fn next_masks(&mut self) -> Option<Vec<u64>> {
        if !self.started {
            self.started = true;
            self.frames.push((self.full(), 0));
        }
        loop {
            let (remaining, sub) = self.frames.last_mut()?;
            *sub = sub.wrapping_sub(*remaining) & *remaining;
            if *sub == 0 {
                self.frames.pop();
                continue;
            }
            let rest = *remaining & !*sub;
            if rest == 0 {
                return Some(self.frames.iter().map(|&(_, s)| s).collect());
            }
            self.frames.push((rest, 0));
        }
    }

    /// Exhausts the stream, returning how many states remained.
    pub fn count_remaining(mut self) -> u64 {
        let mut n = 0;
        while self.next_masks().is_some() {
            n += 1;
        }
        n
    }
}

impl Iterator for PreorderIter {
    type Item = TotalPreorder;

    fn next(&mut self) -> Option<TotalPreorder> {
        let blocks = self.next_masks()?;
        let mut rank = vec![0u32; 1 << self.atoms];
        for (level, mask) in blocks.iter().enumerate() {
            let mut m = *mask;
            while m != 0 {
                rank[m.trailing_zeros() as usize] = level as u32;
                m &= m - 1;
            }
        }
        Some(TotalPreorder {
            atoms: self.atoms as u8,
            rank,
            levels: blocks.len() as u32,
        })
    }
}

const SURJECTION_ATTEMPTS: usize = 10_000;

/// A pseudo-random state that depends only on `(lang, seed)`.
///
/// Draws a level count `k` uniformly from `1..=|V|`, then assigns every
/// valuation to a uniformly chosen level, redrawing until every level is hit.
/// After 10,000 failed redraws the last assignment is normalized instead,
/// which can only happen for large `k` on universes beyond 8 valuations.
pub fn sample_preorder(lang: &Language, seed: u64) -> TotalPreorder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_preorder_with(lang.num_atoms(), &mut rng)
}

pub(crate) fn sample_preorder_with<R: Rng>(atoms: usize, rng: &mut R) -> TotalPreorder {
    let size = 1usize << atoms;
    let k = rng.gen_range(1..=size);
    let mut ranks = vec![0u64; size];
    let mut hit = vec![false; k];
    for _ in 0..SURJECTION_ATTEMPTS {
        hit.iter_mut().for_each(|h| *h = false);
        for r in ranks.iter_mut() {
            *r = rng.gen_range(0..k) as u64;
            hit[*r as usize] = true;
        }
        if hit.iter().all(|&h| h) {
            break;
        }
    }
    TotalPreorder::normalize(atoms, &ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::models_of;

    fn pq() -> Language {
        Language::new(["p", "q"]).unwrap()
    }

    fn st(l: &Language, t: &str) -> TotalPreorder {
        TotalPreorder::parse(l, t).unwrap()
    }

    fn set(l: &Language, t: &str) -> ModelSet {
        l.parse_model_set(t).unwrap()
    }

    #[test]
    fn min_models_examples() {
        let l = pq();
        let s = st(&l, "{11 10} {01 00}");
        assert_eq!(s.min_models(&set(&l, "01 00")).unwrap(), set(&l, "01 00"));
        assert_eq!(s.min_models(&set(&l, "11 01")).unwrap(), set(&l, "11"));
        assert_eq!(s.min_models(&l.bottom()).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn belief_examples() {
        let l = pq();
        let s = st(&l, "{11 10} {01 00}");
        assert_eq!(s.belief_set(), models_of("p", &l).unwrap());
        assert_eq!(TotalPreorder::uniform(2).belief_set(), l.top());
        let jm = st(&l, "{10 01} {11 00}");
        assert_eq!(jm.belief_set(), set(&l, "10 01"));
        assert!(s.believes(&models_of("p", &l).unwrap()).unwrap());
        assert!(!s.believes(&models_of("q", &l).unwrap()).unwrap());
        assert!(jm.believes(&l.top()).unwrap());
    }

    #[test]
    fn from_levels_validation() {
        let l = pq();
        let four = [set(&l, "11"), set(&l, "10"), set(&l, "01"), set(&l, "00")];
        assert_eq!(
            TotalPreorder::from_levels(&l, &four).unwrap().num_levels(),
            4
        );
        assert!(matches!(
            TotalPreorder::from_levels(&l, &[set(&l, "11"), set(&l, "01")]),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            TotalPreorder::from_levels(&l, &[set(&l, "11 10 01 00"), l.bottom()]),
            Err(Error::EmptyLevel(1))
        ));
        assert!(matches!(
            TotalPreorder::from_levels(&l, &[set(&l, "11 10"), set(&l, "10 01 00")]),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn faithful_examples() {
        let l = Language::new(["b", "r"]).unwrap();
        let s = TotalPreorder::faithful_from_kb(&models_of("b", &l).unwrap()).unwrap();
        assert_eq!(s.to_string(), "{11 10} {01 00}");
        assert_eq!(
            TotalPreorder::faithful_from_kb(&l.top())
                .unwrap()
                .num_levels(),
            1
        );
        assert_eq!(
            TotalPreorder::faithful_from_kb(&l.bottom()).unwrap_err(),
            Error::EmptyInput
        );
    }

    #[test]
    fn normalize_examples() {
        let l = pq();
        // index order 00, 01, 10, 11
        let s = TotalPreorder::normalize(2, &[9, 5, 5, 0]);
        assert_eq!(s, st(&l, "{11} {10 01} {00}"));
        let again = TotalPreorder::normalize(2, &[2, 1, 1, 0]);
        assert_eq!(again, s);
        assert_eq!(TotalPreorder::normalize(2, &[7, 7, 7, 7]).num_levels(), 1);
    }

    #[test]
    fn canonical_text_round_trip() {
        let l = pq();
        let s = st(&l, "{11 10} {01 00}");
        assert_eq!(s.to_string(), "{11 10} {01 00}");
        assert_eq!(
            s.to_bitstring_levels(),
            vec![vec!["11", "10"], vec!["01", "00"]]
        );
        assert!(TotalPreorder::parse(&l, "{11 10} 01 00").is_err());
    }

    #[test]
    fn enumeration_order_is_canonical() {
        let l = Language::new(["p"]).unwrap();
        let all: Vec<String> = enumerate_preorders(&l).map(|s| s.to_string()).collect();
        assert_eq!(all, vec!["{0} {1}", "{1} {0}", "{1 0}"]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let l = Language::new(["p", "q", "r"]).unwrap();
        assert_eq!(sample_preorder(&l, 42), sample_preorder(&l, 42));
        let distinct: std::collections::HashSet<_> =
            (0..100).map(|s| sample_preorder(&l, s)).collect();
        assert!(distinct.len() >= 2);
    }

    #[test]
    fn input_sequence_validation() {
        let l = pq();
        assert_eq!(
            InputSequence::new(vec![]).unwrap_err(),
            Error::EmptySequence
        );
        assert_eq!(
            InputSequence::new(vec![l.top(), l.bottom()]).unwrap_err(),
            Error::EmptyInputAt { index: 1 }
        );
    }
}
