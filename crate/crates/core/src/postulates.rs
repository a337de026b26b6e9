//! Executable postulates for iterated revision.
//!
//! Every belief-set statement is evaluated on model sets: `φ ∈ B(X)` iff
//! `[B(X)] ⊆ [φ]`, `¬φ ∉ B(X)` iff `[B(X)] ∩ [φ] ≠ ∅`, and equality of
//! knowledge bases is equality of model sets. Formula quantification becomes
//! quantification over nonempty model sets.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lang::ModelSet;
use crate::ops::{revise_sequence, Revision};
use crate::preorder::{InputSequence, TotalPreorder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PostulateId {
    Ragm,
    C1,
    C2,
    C3,
    C4,
    P,
    D,
    CB,
    Rec,
    C1P,
    C2D,
    T,
    U,
    O,
    Q,
    S,
    Disj1,
    Disj2,
    CR1,
    CR2,
    CR3,
    CR4,
    PR,
    DR,
    RR,
    UR,
    CBR,
    R,
}

/// How many inputs a postulate quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    One,
    Two,
    Three,
    /// A nonempty input sequence `Γ`.
    Sequence,
    /// One input `α` followed by a nonempty sequence `Γ`.
    OneThenSequence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Belief-level conditions over one or more revision steps.
    Syntactic,
    /// Pointwise conditions on the revised preorder.
    Semantic,
    Sequence,
}

impl PostulateId {
    pub const ALL: [PostulateId; 28] = [
        PostulateId::Ragm,
        PostulateId::C1,
        PostulateId::C2,
        PostulateId::C3,
        PostulateId::C4,
        PostulateId::P,
        PostulateId::D,
        PostulateId::CB,
        PostulateId::Rec,
        PostulateId::C1P,
        PostulateId::C2D,
        PostulateId::T,
        PostulateId::U,
        PostulateId::O,
        PostulateId::Q,
        PostulateId::S,
        PostulateId::Disj1,
        PostulateId::Disj2,
        PostulateId::CR1,
        PostulateId::CR2,
        PostulateId::CR3,
        PostulateId::CR4,
        PostulateId::PR,
        PostulateId::DR,
        PostulateId::RR,
        PostulateId::UR,
        PostulateId::CBR,
        PostulateId::R,
    ];

    pub fn as_str(self) -> &'static str {
        use PostulateId::*;
        match self {
            Ragm => "RAGM",
            C1 => "C1",
            C2 => "C2",
            C3 => "C3",
            C4 => "C4",
            P => "P",
            D => "D",
            CB => "CB",
            Rec => "REC",
            C1P => "C1P",
            C2D => "C2D",
            T => "T",
            U => "U",
            O => "O",
            Q => "Q",
            S => "S",
            Disj1 => "DISJ1",
            Disj2 => "DISJ2",
            CR1 => "CR1",
            CR2 => "CR2",
            CR3 => "CR3",
            CR4 => "CR4",
            PR => "PR",
            DR => "DR",
            RR => "RR",
            UR => "UR",
            CBR => "CBR",
            R => "R",
        }
    }

    pub fn kind(self) -> Kind {
        use PostulateId::*;
        match self {
            Ragm | C1 | C2 | C3 | C4 | P | D | CB | Rec | C1P | C2D | T | U | S | Disj1 | Disj2 => {
                Kind::Syntactic
            }
            O | Q => Kind::Sequence,
            CR1 | CR2 | CR3 | CR4 | PR | DR | RR | UR | CBR | R => Kind::Semantic,
        }
    }

    pub fn arity(self) -> Arity {
        use PostulateId::*;
        match self {
            Ragm => Arity::One,
            C1 | C2 | C3 | C4 | P | D | CB | Rec | C1P | C2D | T | U | S => Arity::Two,
            Disj1 | Disj2 => Arity::Three,
            O => Arity::Sequence,
            Q => Arity::OneThenSequence,
            _ => Arity::One,
        }
    }

    /// Number of inputs for fixed-arity postulates.
    pub fn fixed_arity(self) -> Option<usize> {
        match self.arity() {
            Arity::One => Some(1),
            Arity::Two => Some(2),
            Arity::Three => Some(3),
            Arity::Sequence | Arity::OneThenSequence => None,
        }
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PostulateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        PostulateId::ALL
            .into_iter()
            .find(|p| p.as_str() == upper)
            .ok_or_else(|| Error::UnknownPostulate(s.to_string()))
    }
}

impl Serialize for PostulateId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One point of the quantified input space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub state: TotalPreorder,
    /// `[α, β]`, `[α, β, γ]`, `Γ`, or `[α, γ1, ..., γn]` depending on the arity.
    pub inputs: Vec<ModelSet>,
}

/// Outcome of checking one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The antecedent failed, or the postulate does not apply to these inputs.
    Vacuous,
    Violated,
}

impl Verdict {
    pub fn ok(self) -> bool {
        self != Verdict::Violated
    }

    fn implies(antecedent: bool, consequent: bool) -> Self {
        match (antecedent, consequent) {
            (false, _) => Verdict::Vacuous,
            (true, true) => Verdict::Holds,
            (true, false) => Verdict::Violated,
        }
    }

    fn of(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// Source of revisions of one fixed state. Lets the exhaustive driver cache
/// results while single-instance checks compute them directly.
pub(crate) trait Revisions {
    fn state(&self) -> &TotalPreorder;
    /// `E ∗ a`
    fn once(&self, a: &ModelSet) -> Result<TotalPreorder>;
    /// `[B(E ∗ a)]`
    fn b1(&self, a: &ModelSet) -> Result<ModelSet>;
    /// `[B(E ∗ a ∗ b)]`
    fn b2(&self, a: &ModelSet, b: &ModelSet) -> Result<ModelSet>;
    /// `[B(E ∗ a ∗ b ∗ c)]`
    fn b3(&self, a: &ModelSet, b: &ModelSet, c: &ModelSet) -> Result<ModelSet>;

    /// Counteracts in revision form, under the operator being checked.
    fn counteract(&self, a: &ModelSet, b: &ModelSet) -> Result<bool> {
        Ok(!self.b1(a)?.intersects(b) && !self.b1(b)?.intersects(a))
    }
}

pub(crate) struct Direct<'a, R: Revision + ?Sized> {
    pub op: &'a R,
    pub state: &'a TotalPreorder,
}

impl<R: Revision + ?Sized> Revisions for Direct<'_, R> {
    fn state(&self) -> &TotalPreorder {
        self.state
    }

    fn once(&self, a: &ModelSet) -> Result<TotalPreorder> {
        self.op.revise(self.state, a)
    }

    fn b1(&self, a: &ModelSet) -> Result<ModelSet> {
        Ok(self.once(a)?.belief_set())
    }

    fn b2(&self, a: &ModelSet, b: &ModelSet) -> Result<ModelSet> {
        Ok(self.op.revise(&self.once(a)?, b)?.belief_set())
    }

    fn b3(&self, a: &ModelSet, b: &ModelSet, c: &ModelSet) -> Result<ModelSet> {
        let ab = self.op.revise(&self.once(a)?, b)?;
        Ok(self.op.revise(&ab, c)?.belief_set())
    }
}

/// Memoizes one- and two-step revisions of a state, keyed by bitmask.
/// Only for languages of at most 6 atoms.
pub(crate) struct Cached<'a, R: Revision + ?Sized> {
    op: &'a R,
    state: &'a TotalPreorder,
    singles: Vec<OnceCell<Result<TotalPreorder>>>,
    doubles: Vec<OnceCell<Result<ModelSet>>>,
    size: usize,
}

impl<'a, R: Revision + ?Sized> Cached<'a, R> {
    pub fn new(op: &'a R, state: &'a TotalPreorder) -> Self {
        let n = state.num_atoms();
        assert!(n <= 3, "cached revisions support at most 3 atoms");
        let size = 1usize << (1usize << n);
        Self {
            op,
            state,
            singles: (0..size).map(|_| OnceCell::new()).collect(),
            doubles: (0..size * size).map(|_| OnceCell::new()).collect(),
            size,
        }
    }

    fn single(&self, a: &ModelSet) -> Result<&TotalPreorder> {
        self.singles[a.mask() as usize]
            .get_or_init(|| self.op.revise(self.state, a))
            .as_ref()
            .map_err(Clone::clone)
    }
}

impl<R: Revision + ?Sized> Revisions for Cached<'_, R> {
    fn state(&self) -> &TotalPreorder {
        self.state
    }

    fn once(&self, a: &ModelSet) -> Result<TotalPreorder> {
        self.single(a).cloned()
    }

    fn b1(&self, a: &ModelSet) -> Result<ModelSet> {
        Ok(self.single(a)?.belief_set())
    }

    fn b2(&self, a: &ModelSet, b: &ModelSet) -> Result<ModelSet> {
        let idx = a.mask() as usize * self.size + b.mask() as usize;
        self.doubles[idx]
            .get_or_init(|| Ok(self.op.revise(self.single(a)?, b)?.belief_set()))
            .clone()
    }

    fn b3(&self, a: &ModelSet, b: &ModelSet, c: &ModelSet) -> Result<ModelSet> {
        let ab = self.op.revise(self.single(a)?, b)?;
        Ok(self.op.revise(&ab, c)?.belief_set())
    }
}

pub(crate) fn eval_fixed<X: Revisions>(
    p: PostulateId,
    x: &X,
    inputs: &[ModelSet],
) -> Result<Verdict> {
    use PostulateId::*;
    let s = x.state();
    match p {
        Ragm => {
            let a = &inputs[0];
            Ok(Verdict::of(x.b1(a)? == s.min_models(a)?))
        }
        C1 => {
            let (a, b) = (&inputs[0], &inputs[1]);
            if !b.is_subset(a) {
                return Ok(Verdict::Vacuous);
            }
            Ok(Verdict::of(x.b2(a, b)? == x.b1(b)?))
        }
        C2 => {
            let (a, b) = (&inputs[0], &inputs[1]);
            if b.intersects(a) {
                return Ok(Verdict::Vacuous);
            }
            Ok(Verdict::of(x.b2(a, b)? == x.b1(b)?))
        }
        C3 => {
            let (a, b) = (&inputs[0], &inputs[1]);
            if !x.b1(b)?.is_subset(a) {
                return Ok(Verdict::Vacuous);
            }
            Ok(Verdict::of(x.b2(a, b)?.is_subset(a)))
        }
        C4 => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = x.b1(b)?.intersects(a);
            Ok(Verdict::implies(ante, ante && x.b2(a, b)?.intersects(a)))
        }
        P => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = x.b1(b)?.intersects(a);
            Ok(Verdict::implies(ante, ante && x.b2(a, b)?.is_subset(a)))
        }
        D => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = x.counteract(a, b)?;
            Ok(Verdict::implies(ante, ante && !x.b2(a, b)?.intersects(a)))
        }
        CB => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = !x.b1(a)?.intersects(b);
            Ok(Verdict::implies(ante, ante && x.b2(a, b)? == x.b1(b)?))
        }
        Rec => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = a.intersects(b);
            Ok(Verdict::implies(ante, ante && x.b2(a, b)?.is_subset(a)))
        }
        C1P => {
            let (a, b) = (&inputs[0], &inputs[1]);
            if !x.b1(b)?.intersects(a) {
                return Ok(Verdict::Vacuous);
            }
            let both = a.intersection(b);
            // As for (T): reachable only when beliefs escape the input.
            if both.is_empty() {
                return Ok(Verdict::Violated);
            }
            Ok(Verdict::of(x.b2(a, b)? == x.b1(&both)?))
        }
        C2D => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let ante = x.counteract(a, b)?;
            Ok(Verdict::implies(ante, ante && x.b2(a, b)? == x.b1(b)?))
        }
        T => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let lhs = x.b2(a, b)?;
            if x.counteract(a, b)? {
                return Ok(Verdict::of(lhs == x.b1(b)?));
            }
            let both = a.intersection(b);
            // Not counteracting yet jointly inconsistent: only possible for an
            // operator whose beliefs escape its input, and (T) is then undefined.
            if both.is_empty() {
                return Ok(Verdict::Violated);
            }
            Ok(Verdict::of(lhs == x.b1(&both)?))
        }
        U => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let after = x.b2(a, b)?;
            let ante = after.intersects(a);
            Ok(Verdict::implies(ante, after.is_subset(a)))
        }
        S => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let not_a = a.complement();
            if not_a.is_empty() {
                return Ok(Verdict::Vacuous);
            }
            let ante = !x.b1(a)?.intersects(b) && !x.b1(&not_a)?.intersects(b);
            Ok(Verdict::implies(
                ante,
                ante && x.b3(a, &not_a, b)? == x.b2(a, b)?,
            ))
        }
        Disj1 | Disj2 => {
            let (a, b, g) = (&inputs[0], &inputs[1], &inputs[2]);
            let ab = x.b2(a, b)?;
            let gb = x.b2(g, b)?;
            let either = x.b2(&a.union(g), b)?;
            // Th(X) ∩ Th(Y) ⊆ Th(Z) iff Z ⊆ X ∪ Y.
            // Th(Z) ⊆ Th(X) ∪ Th(Y) iff X ⊆ Z or Y ⊆ Z (every set is definable).
            Ok(Verdict::of(if p == Disj1 {
                either.is_subset(&ab.union(&gb))
            } else {
                ab.is_subset(&either) || gb.is_subset(&either)
            }))
        }
        _ if p.kind() == Kind::Semantic => {
            let a = &inputs[0];
            let after = x.once(a)?;
            Ok(Verdict::of(pointwise(p, s, &after, a)))
        }
        _ => unreachable!("{p} is not a fixed-arity postulate"),
    }
}

/// Whether the pairwise condition `p` holds for every valuation pair.
fn pointwise(p: PostulateId, before: &TotalPreorder, after: &TotalPreorder, a: &ModelSet) -> bool {
    use PostulateId::*;
    let bel = after.belief_set();
    let n = before.ranks().len() as u32;
    let vals = || (0..n).map(crate::lang::Valuation);
    for v in vals() {
        let va = a.contains(v);
        for w in vals() {
            let wa = a.contains(w);
            let ok = match p {
                CR1 => !(va && wa) || before.le(v, w) == after.le(v, w),
                CR2 => va || wa || before.le(v, w) == after.le(v, w),
                CR3 => !(va && !wa) || !before.lt(v, w) || after.lt(v, w),
                CR4 => !(va && !wa) || !before.le(v, w) || after.le(v, w),
                PR => !(va && !wa) || !before.le(v, w) || after.lt(v, w),
                DR => !(!va && wa && !bel.contains(w)) || !before.lt(v, w) || after.lt(v, w),
                RR => {
                    bel.contains(v)
                        || bel.contains(w)
                        || after.le(v, w) == (before.lt(v, w) || (before.le(v, w) && (va || !wa)))
                }
                UR => !(va && !wa) || after.lt(v, w) || after.lt(w, v),
                CBR => bel.contains(v) || bel.contains(w) || after.le(v, w) == before.le(v, w),
                R => !(va && !wa) || after.lt(v, w),
                _ => unreachable!(),
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn check_kind(p: PostulateId, inst: &Instance) -> Result<()> {
    let Some(expected) = p.fixed_arity() else {
        return Err(Error::Arity {
            postulate: p.to_string(),
            expected: 0,
            got: inst.inputs.len(),
        });
    };
    if inst.inputs.len() != expected {
        return Err(Error::Arity {
            postulate: p.to_string(),
            expected,
            got: inst.inputs.len(),
        });
    }
    for m in &inst.inputs {
        if m.num_atoms() != inst.state.num_atoms() {
            return Err(Error::LanguageMismatch {
                left: inst.state.num_atoms(),
                right: m.num_atoms(),
            });
        }
        if m.is_empty() {
            return Err(Error::EmptyInput);
        }
    }
    Ok(())
}

/// Checks one fixed-arity postulate on one instance, returning the full verdict.
pub fn evaluate<R: Revision + ?Sized>(p: PostulateId, op: &R, inst: &Instance) -> Result<Verdict> {
    check_kind(p, inst)?;
    eval_fixed(
        p,
        &Direct {
            op,
            state: &inst.state,
        },
        &inst.inputs,
    )
}

/// Whether a belief-level postulate holds (vacuously or not) on `inst`.
pub fn check_syntactic<R: Revision + ?Sized>(
    p: PostulateId,
    op: &R,
    inst: &Instance,
) -> Result<bool> {
    Ok(evaluate(p, op, inst)?.ok())
}

/// Whether a pointwise postulate holds on every valuation pair for `(state, input)`.
pub fn check_semantic<R: Revision + ?Sized>(
    p: PostulateId,
    op: &R,
    state: &TotalPreorder,
    input: &ModelSet,
) -> Result<bool> {
    if p.kind() != Kind::Semantic && p != PostulateId::Ragm {
        return Err(Error::Arity {
            postulate: p.to_string(),
            expected: 1,
            got: 1,
        });
    }
    let inst = Instance {
        state: state.clone(),
        inputs: vec![input.clone()],
    };
    Ok(evaluate(p, op, &inst)?.ok())
}

fn compatible(base: &ModelSet, seq: &[ModelSet]) -> bool {
    seq.iter().all(|g| base.intersects(g))
}

/// Full verdict for (O) or (Q).
pub fn evaluate_sequence<R: Revision + ?Sized>(
    p: PostulateId,
    op: &R,
    state: &TotalPreorder,
    seq: &InputSequence,
    alpha: Option<&ModelSet>,
) -> Result<Verdict> {
    let b0 = state.belief_set();
    match (p, alpha) {
        (PostulateId::O, None) => {
            if !compatible(&b0, seq.inputs()) {
                return Ok(Verdict::Vacuous);
            }
            let end = revise_sequence(op, state, seq)?.belief_set();
            Ok(Verdict::of(end.is_subset(&b0)))
        }
        (PostulateId::Q, Some(alpha)) => {
            let after = op.revise(state, alpha)?;
            let b1 = after.belief_set();
            if b0.intersects(&b1)
                || !compatible(&b0, seq.inputs())
                || !compatible(&b1, seq.inputs())
            {
                return Ok(Verdict::Vacuous);
            }
            let end = revise_sequence(op, &after, seq)?.belief_set();
            Ok(Verdict::of(end.is_subset(&b1) && !end.is_subset(&b0)))
        }
        _ => Err(Error::Arity {
            postulate: p.to_string(),
            expected: usize::from(p == PostulateId::Q),
            got: usize::from(alpha.is_some()),
        }),
    }
}

/// Checks (O) (`alpha = None`) or (Q) (`alpha = Some(α)`) on one sequence.
pub fn check_sequence<R: Revision + ?Sized>(
    p: PostulateId,
    op: &R,
    state: &TotalPreorder,
    seq: &InputSequence,
    alpha: Option<&ModelSet>,
) -> Result<bool> {
    Ok(evaluate_sequence(p, op, state, seq, alpha)?.ok())
}
