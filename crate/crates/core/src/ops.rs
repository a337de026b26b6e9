//! Revision operators as pure maps `(TotalPreorder, ModelSet) -> TotalPreorder`.
//!
//! Every operator builds a numeric key per valuation and normalizes, so the
//! results are always contiguous and comparable with `==`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lang::{ModelSet, Valuation};
use crate::preorder::{InputSequence, TotalPreorder};

/// A black-box revision operator. The postulate checker works against this trait.
pub trait Revision: Sync {
    fn name(&self) -> &str;

    fn revise(&self, state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder>;
}

impl<T: Revision + ?Sized> Revision for &T {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn revise(&self, state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
        (**self).revise(state, input)
    }
}

/// The shipped operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Natural,
    Lexicographic,
    Restrained,
    Backwards,
    Composite,
}

impl Operator {
    pub const ALL: [Operator; 5] = [
        Operator::Natural,
        Operator::Lexicographic,
        Operator::Restrained,
        Operator::Backwards,
        Operator::Composite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Natural => "natural",
            Operator::Lexicographic => "lexicographic",
            Operator::Restrained => "restrained",
            Operator::Backwards => "backwards",
            Operator::Composite => "composite",
        }
    }

    /// Whether the result's bottom level is always `min(input, ⪯)`.
    pub fn anchors_beliefs(self) -> bool {
        self != Operator::Backwards
    }

    pub fn apply(self, state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
        match self {
            Operator::Natural => natural(state, input),
            Operator::Lexicographic => lexicographic(state, input),
            Operator::Restrained => restrained(state, input),
            Operator::Backwards => backwards(state, input),
            Operator::Composite => composite(state, input),
        }
    }
}

impl Revision for Operator {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn revise(&self, state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
        self.apply(state, input)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

fn check_input(state: &TotalPreorder, input: &ModelSet) -> Result<()> {
    if input.num_atoms() != state.num_atoms() {
        return Err(Error::LanguageMismatch {
            left: state.num_atoms(),
            right: input.num_atoms(),
        });
    }
    if input.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

fn rekey(state: &TotalPreorder, key: impl Fn(Valuation, u64) -> u64) -> TotalPreorder {
    let keys: Vec<u64> = state
        .ranks()
        .iter()
        .enumerate()
        .map(|(v, &r)| key(Valuation(v as u32), u64::from(r)))
        .collect();
    TotalPreorder::normalize(state.num_atoms(), &keys)
}

/// Natural revision: `min(input, ⪯)` becomes the new bottom level, all other
/// valuations keep their old relative order.
pub fn natural(state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
    check_input(state, input)?;
    let best = state.min_models(input)?;
    if best == state.belief_set() {
        return Ok(state.clone());
    }
    Ok(rekey(
        state,
        |v, r| if best.contains(v) { 0 } else { r + 1 },
    ))
}

/// Lexicographic revision: all input valuations strictly below all others,
/// old order kept inside each block.
pub fn lexicographic(state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
    check_input(state, input)?;
    let width = state.num_levels() as u64;
    Ok(rekey(
        state,
        |v, r| {
            if input.contains(v) {
                r
            } else {
                width + r
            }
        },
    ))
}

/// Restrained revision: `min(input, ⪯)` goes to the bottom; elsewhere the old
/// order is kept except that each old level splits with its input valuations
/// strictly below its non-input valuations.
pub fn restrained(state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
    check_input(state, input)?;
    let best = state.min_models(input)?;
    Ok(rekey(state, |v, r| {
        if best.contains(v) {
            0
        } else {
            1 + 2 * r + u64::from(!input.contains(v))
        }
    }))
}

/// Backwards revision: the lexicographic refinement of the state by the
/// two-level order `input ≺ ¬input`. Strict comparisons survive; ties split.
/// The input need not be believed afterwards.
pub fn backwards(state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
    check_input(state, input)?;
    Ok(rekey(state, |v, r| 2 * r + u64::from(!input.contains(v))))
}

/// Backwards revision followed by natural revision by the same input.
pub fn composite(state: &TotalPreorder, input: &ModelSet) -> Result<TotalPreorder> {
    natural(&backwards(state, input)?, input)
}

/// Left-associative fold of `op` over `seq`.
pub fn revise_sequence<R: Revision + ?Sized>(
    op: &R,
    state: &TotalPreorder,
    seq: &InputSequence,
) -> Result<TotalPreorder> {
    let mut cur = state.clone();
    for (index, input) in seq.inputs().iter().enumerate() {
        cur = op.revise(&cur, input).map_err(|e| match e {
            Error::EmptyInput => Error::EmptyInputAt { index },
            other => other,
        })?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::models_of;
    use crate::lang::Language;

    fn lang(atoms: &[&str]) -> Language {
        Language::new(atoms.iter().copied()).unwrap()
    }

    fn st(l: &Language, t: &str) -> TotalPreorder {
        TotalPreorder::parse(l, t).unwrap()
    }

    fn m(l: &Language, f: &str) -> ModelSet {
        models_of(f, l).unwrap()
    }

    #[test]
    fn natural_red_bird() {
        let l = lang(&["b", "r"]);
        let s = st(&l, "{11 10} {01 00}");
        let s1 = natural(&s, &m(&l, "r")).unwrap();
        assert_eq!(s1, st(&l, "{11} {10} {01 00}"));
        let s2 = natural(&s1, &m(&l, "~b")).unwrap();
        assert_eq!(s2, st(&l, "{01 00} {11} {10}"));
        assert!(s2.believes(&m(&l, "~b")).unwrap());
        assert!(!s2.believes(&m(&l, "r")).unwrap());
        assert_eq!(natural(&s, &l.top()).unwrap(), s);
    }

    #[test]
    fn natural_keeps_state_when_minimum_is_bottom() {
        let l = lang(&["p", "q"]);
        let s = st(&l, "{11 10} {01} {00}");
        assert_eq!(natural(&s, &m(&l, "p")).unwrap(), s);
    }

    #[test]
    fn lexicographic_examples() {
        let l = lang(&["p", "q"]);
        let s = st(&l, "{11 10} {01 00}");
        assert_eq!(
            lexicographic(&s, &m(&l, "q")).unwrap(),
            st(&l, "{11} {01} {10} {00}")
        );
        assert_eq!(lexicographic(&s, &l.top()).unwrap(), s);

        let l = lang(&["b", "r"]);
        let s = TotalPreorder::faithful_from_kb(&m(&l, "b")).unwrap();
        let s = lexicographic(&s, &m(&l, "r")).unwrap();
        let s = lexicographic(&s, &m(&l, "~b")).unwrap();
        assert!(s.believes(&m(&l, "r")).unwrap());
        assert!(s.believes(&m(&l, "~b")).unwrap());
    }

    #[test]
    fn restrained_red_bird_and_john_mary() {
        let l = lang(&["b", "r"]);
        let s = st(&l, "{11 10} {01 00}");
        let s1 = restrained(&s, &m(&l, "r")).unwrap();
        assert_eq!(s1, st(&l, "{11} {10} {01} {00}"));
        let s2 = restrained(&s1, &m(&l, "~b")).unwrap();
        assert_eq!(s2, st(&l, "{01} {11} {10} {00}"));
        assert_eq!(s2.belief_set(), m(&l, "~b & r"));

        let l = lang(&["j", "m"]);
        let s = st(&l, "{10 01} {11 00}");
        let s1 = restrained(&s, &m(&l, "j")).unwrap();
        assert_eq!(s1, st(&l, "{10} {01} {11} {00}"));
        let s2 = restrained(&s1, &m(&l, "m")).unwrap();
        assert_eq!(s2.belief_set(), m(&l, "~j & m"));
    }

    #[test]
    fn backwards_examples() {
        let l = lang(&["p", "q"]);
        let s = st(&l, "{11 10} {01 00}");
        assert_eq!(
            backwards(&s, &m(&l, "q")).unwrap(),
            st(&l, "{11} {10} {01} {00}")
        );
        let s = st(&l, "{10} {11 01 00}");
        let b = backwards(&s, &m(&l, "q")).unwrap();
        assert_eq!(b, st(&l, "{10} {11 01} {00}"));
        assert!(!b.believes(&m(&l, "q")).unwrap());
        assert_eq!(backwards(&s, &l.top()).unwrap(), s);
    }

    #[test]
    fn composite_matches_restrained_on_examples() {
        let l = lang(&["p", "q"]);
        let s = st(&l, "{11 10} {01 00}");
        let q = m(&l, "q");
        assert_eq!(composite(&s, &q).unwrap(), st(&l, "{11} {10} {01} {00}"));
        assert_eq!(composite(&s, &q).unwrap(), restrained(&s, &q).unwrap());
        assert_eq!(composite(&s, &l.top()).unwrap(), s);

        let l = lang(&["j", "m"]);
        let mut a = st(&l, "{10 01} {11 00}");
        let mut b = a.clone();
        for f in ["j", "m"] {
            a = composite(&a, &m(&l, f)).unwrap();
            b = restrained(&b, &m(&l, f)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sequence_fold() {
        let l = lang(&["p", "q"]);
        let seq = InputSequence::new(vec![m(&l, "p"), m(&l, "p -> q"), m(&l, "~q")]).unwrap();
        let s = TotalPreorder::uniform(2);
        let r = revise_sequence(&Operator::Restrained, &s, &seq).unwrap();
        assert_eq!(r, st(&l, "{10} {11} {00} {01}"));
        assert_eq!(r.belief_set(), m(&l, "p & ~q"));
        let n = revise_sequence(&Operator::Natural, &s, &seq).unwrap();
        assert_eq!(n.belief_set(), m(&l, "p & ~q"));
        let x = revise_sequence(&Operator::Lexicographic, &s, &seq).unwrap();
        assert_eq!(x.belief_set(), m(&l, "~p & ~q"));
    }

    #[test]
    fn sequence_reports_failing_index() {
        struct Refuses;
        impl Revision for Refuses {
            fn name(&self) -> &str {
                "refuses"
            }
            fn revise(&self, s: &TotalPreorder, a: &ModelSet) -> Result<TotalPreorder> {
                if a.len() == 1 {
                    Err(Error::EmptyInput)
                } else {
                    Ok(s.clone())
                }
            }
        }
        let l = lang(&["p", "q"]);
        let seq = InputSequence::new(vec![m(&l, "p"), m(&l, "p & q")]).unwrap();
        assert_eq!(
            revise_sequence(&Refuses, &TotalPreorder::uniform(2), &seq).unwrap_err(),
            Error::EmptyInputAt { index: 1 }
        );
    }

    #[test]
    fn empty_input_is_rejected() {
        let s = TotalPreorder::uniform(2);
        for op in Operator::ALL {
            assert_eq!(
                op.apply(&s, &ModelSet::empty(2)).unwrap_err(),
                Error::EmptyInput
            );
        }
    }

    #[test]
    fn operator_names_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.as_str().parse::<Operator>().unwrap(), op);
        }
        assert!("dp".parse::<Operator>().is_err());
    }
}
