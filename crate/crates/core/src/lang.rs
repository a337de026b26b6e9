//! Propositional languages, valuations and model sets.
//!
//! A valuation over `n` atoms is stored as an index in `0..2^n` whose binary
//! expansion, read most-significant bit first, is the valuation's bitstring in
//! atom-declaration order. With atoms `(p, q)` the valuation `01` assigns
//! `p := 0, q := 1` and has index 1.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported number of atoms.
pub const MAX_ATOMS: usize = 16;

/// An ordered list of distinct atom names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Language {
    atoms: Vec<String>,
}

fn valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "true" && name != "false"
}

impl Language {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() || atoms.len() > MAX_ATOMS {
            return Err(Error::AtomCount(atoms.len()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !valid_atom_name(a) {
                return Err(Error::InvalidAtomName(a.clone()));
            }
            if atoms[..i].contains(a) {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        Ok(Self { atoms })
    }

    /// A language with `n` default atom names `p, q, r, s, ...`.
    pub fn with_default_atoms(n: usize) -> Result<Self> {
        const NAMES: [&str; MAX_ATOMS] = [
            "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z", "a", "b", "c", "d", "e",
        ];
        if n == 0 || n > MAX_ATOMS {
            return Err(Error::AtomCount(n));
        }
        Self::new(NAMES[..n].iter().copied())
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Number of valuations, `2^n`.
    pub fn universe_size(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn valuations(&self) -> impl Iterator<Item = Valuation> {
        (0..self.universe_size() as u32).map(Valuation)
    }

    /// The full universe `V`, i.e. the models of `true`.
    pub fn top(&self) -> ModelSet {
        ModelSet::full(self.num_atoms())
    }

    pub fn bottom(&self) -> ModelSet {
        ModelSet::empty(self.num_atoms())
    }

    pub fn parse_valuation(&self, text: &str) -> Result<Valuation> {
        let n = self.num_atoms();
        if text.len() != n || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::BadValuation {
                text: text.to_string(),
                atoms: n,
            });
        }
        let bits = text
            .bytes()
            .fold(0u32, |acc, b| (acc << 1) | u32::from(b == b'1'));
        Ok(Valuation(bits))
    }

    /// Parses a whitespace separated list of bitstrings, with or without
    /// surrounding braces: `{11 10}` or `11 10`.
    pub fn parse_model_set(&self, text: &str) -> Result<ModelSet> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(inner);
        let mut set = self.bottom();
        for tok in inner.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            set.insert(self.parse_valuation(tok)?);
        }
        Ok(set)
    }

    pub fn fmt_valuation(&self, v: Valuation) -> String {
        v.to_bitstring(self.num_atoms())
    }
}

/// One truth assignment, identified by its index in `0..2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub u32);

impl Valuation {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Truth value of the atom at declaration position `atom` in an `n`-atom language.
    pub fn get(self, atom: usize, n: usize) -> bool {
        (self.0 >> (n - 1 - atom)) & 1 == 1
    }

    pub fn to_bitstring(self, n: usize) -> String {
        (0..n)
            .map(|i| if self.get(i, n) { '1' } else { '0' })
            .collect()
    }
}

type Words = SmallVec<[u64; 1]>;

/// A set of valuations over an `n`-atom language, stored as a bitmask over `2^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModelSet {
    atoms: u8,
    words: Words,
}

fn word_count(atoms: usize) -> usize {
    (1usize << atoms).div_ceil(64)
}

fn tail_mask(atoms: usize) -> u64 {
    let size = 1usize << atoms;
    if size.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

impl ModelSet {
    pub fn empty(atoms: usize) -> Self {
        assert!((1..=MAX_ATOMS).contains(&atoms), "atom count out of range");
        Self {
            atoms: atoms as u8,
            words: SmallVec::from_elem(0, word_count(atoms)),
        }
    }

    pub fn full(atoms: usize) -> Self {
        let mut s = Self::empty(atoms);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        *s.words.last_mut().unwrap() &= tail_mask(atoms);
        s
    }

    /// Builds a set from the low `2^n` bits of `mask` (requires `n <= 6`).
    pub fn from_mask(atoms: usize, mask: u64) -> Self {
        assert!(atoms <= 6, "from_mask supports at most 6 atoms");
        let mut s = Self::empty(atoms);
        s.words[0] = mask & tail_mask(atoms);
        s
    }

    /// The low word of the bitmask; the whole set when `n <= 6`.
    pub fn mask(&self) -> u64 {
        self.words[0]
    }

    pub fn from_valuations<I: IntoIterator<Item = Valuation>>(atoms: usize, vals: I) -> Self {
        let mut s = Self::empty(atoms);
        for v in vals {
            s.insert(v);
        }
        s
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms as usize
    }

    pub fn universe_size(&self) -> usize {
        1 << self.atoms
    }

    pub fn insert(&mut self, v: Valuation) {
        let i = v.index();
        assert!(i < self.universe_size(), "valuation outside universe");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, v: Valuation) -> bool {
        let i = v.index();
        i < self.universe_size() && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some(Valuation((wi * 64) as u32 + bit))
            })
        })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::LanguageMismatch {
                left: self.num_atoms(),
                right: other.num_atoms(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.atoms, other.atoms);
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            atoms: self.atoms,
            words,
        }
    }

    /// Intersection. Panics on a language mismatch; see [`ModelSet::try_intersection`].
    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(
            self.atoms, other.atoms,
            "model sets over different languages"
        );
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(
            self.atoms, other.atoms,
            "model sets over different languages"
        );
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        assert_eq!(
            self.atoms, other.atoms,
            "model sets over different languages"
        );
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn try_intersection(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.intersection(other))
    }

    pub fn complement(&self) -> Self {
        let mut words: Words = self.words.iter().map(|w| !w).collect();
        *words.last_mut().unwrap() &= tail_mask(self.num_atoms());
        Self {
            atoms: self.atoms,
            words,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.atoms, other.atoms);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        debug_assert_eq!(self.atoms, other.atoms);
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(&a, &b)| a & b != 0)
    }

    /// Members as bitstrings in descending order (`11 10 01 00`).
    pub fn to_bitstrings(&self) -> Vec<String> {
        let n = self.num_atoms();
        let mut vals: Vec<Valuation> = self.iter().collect();
        vals.reverse();
        vals.into_iter().map(|v| v.to_bitstring(n)).collect()
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_bitstrings().join(" "))
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `a ⊨ b`: every model of `a` is a model of `b`.
pub fn entails(a: &ModelSet, b: &ModelSet) -> Result<bool> {
    a.check_same(b)?;
    Ok(a.is_subset(b))
}

pub fn equivalent(a: &ModelSet, b: &ModelSet) -> Result<bool> {
    a.check_same(b)?;
    Ok(a == b)
}

/// All nonempty model sets over an `n`-atom language (`n <= 6`), in ascending
/// bitmask order.
pub fn nonempty_model_sets(atoms: usize) -> impl Iterator<Item = ModelSet> + Clone {
    assert!(atoms <= 6, "model set enumeration supports at most 6 atoms");
    let top = if (1usize << atoms) == 64 {
        u64::MAX
    } else {
        (1u64 << (1usize << atoms)) - 1
    };
    (1..=top).map(move |m| ModelSet::from_mask(atoms, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> Language {
        Language::new(["p", "q"]).unwrap()
    }

    #[test]
    fn bitstring_convention() {
        let l = pq();
        let v = l.parse_valuation("01").unwrap();
        assert!(!v.get(0, 2));
        assert!(v.get(1, 2));
        assert_eq!(v, Valuation(1));
        assert_eq!(l.fmt_valuation(Valuation(2)), "10");
    }

    #[test]
    fn language_validation() {
        assert!(matches!(
            Language::new(["p", "p"]),
            Err(Error::DuplicateAtom(_))
        ));
        assert!(matches!(
            Language::new(["1p"]),
            Err(Error::InvalidAtomName(_))
        ));
        assert!(matches!(
            Language::new(["true"]),
            Err(Error::InvalidAtomName(_))
        ));
        assert!(matches!(
            Language::new(Vec::<String>::new()),
            Err(Error::AtomCount(0))
        ));
        let many: Vec<String> = (0..17).map(|i| format!("a{i}")).collect();
        assert!(matches!(Language::new(many), Err(Error::AtomCount(17))));
        assert_eq!(
            Language::with_default_atoms(16).unwrap().universe_size(),
            65536
        );
    }

    #[test]
    fn large_universe_sets() {
        let full = ModelSet::full(16);
        assert_eq!(full.len(), 65536);
        assert!(full.complement().is_empty());
        let mut s = ModelSet::empty(16);
        s.insert(Valuation(65535));
        s.insert(Valuation(64));
        assert_eq!(
            s.iter().collect::<Vec<_>>(),
            vec![Valuation(64), Valuation(65535)]
        );
        assert_eq!(s.complement().len(), 65534);
    }

    #[test]
    fn entailment_examples() {
        let l = pq();
        let s = |t: &str| l.parse_model_set(t).unwrap();
        assert!(entails(&s("{11}"), &s("{11 10}")).unwrap());
        assert!(entails(&s("{}"), &s("{01}")).unwrap());
        assert!(!entails(&s("{11 01}"), &s("{11 10}")).unwrap());
        let other = ModelSet::full(3);
        assert!(matches!(
            entails(&s("{11}"), &other),
            Err(Error::LanguageMismatch { .. })
        ));
        assert!(equivalent(&s("{11 10}"), &s("10 11")).unwrap());
    }

    #[test]
    fn display_is_descending() {
        let l = pq();
        assert_eq!(l.top().to_string(), "{11 10 01 00}");
        assert_eq!(nonempty_model_sets(2).count(), 15);
    }
}
