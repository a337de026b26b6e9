//! Exhaustive and sampled postulate verification with canonical counterexamples.
//!
//! Exhaustive order: states in [`enumerate_preorders`] order, then input
//! tuples with the first input varying slowest, each input running over the
//! nonempty model sets in ascending bitmask order. Sequences are visited
//! depth-first (`[a]`, `[a, a]`, `[a, a, a]`, `[a, a, b]`, ...), so a
//! sequence always precedes its extensions. Sampled mode draws instance `i`
//! from a generator seeded by `seed` on stream `i`.
//!
//! States are checked in parallel; tallies are summed and the reported
//! counterexample is the first in canonical order, so output does not depend
//! on scheduling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::lang::{nonempty_model_sets, Language, ModelSet};
use crate::ops::{Operator, Revision};
use crate::postulates::{eval_fixed, Arity, Cached, Direct, Instance, PostulateId, Verdict};
use crate::preorder::{sample_preorder_with, PreorderIter, TotalPreorder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sample,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample => "sample",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sample" => Ok(Mode::Sample),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Instances per postulate in sampled mode.
    pub samples: u64,
    pub seed: u64,
    /// Longest `Γ` for (O) and (Q).
    pub max_seq_len: usize,
    /// Hard cap on instances per postulate.
    pub max_instances: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            max_seq_len: 3,
            max_instances: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub state: Vec<Vec<String>>,
    pub inputs: Vec<Vec<String>>,
}

impl Counterexample {
    fn new(state: &TotalPreorder, inputs: &[ModelSet]) -> Self {
        Self {
            state: state.to_bitstring_levels(),
            inputs: inputs.iter().map(ModelSet::to_bitstrings).collect(),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state: Vec<String> = self
            .state
            .iter()
            .map(|l| format!("{{{}}}", l.join(" ")))
            .collect();
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|l| format!("{{{}}}", l.join(" ")))
            .collect();
        write!(f, "state {} inputs {}", state.join(" "), inputs.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostulateReport {
    pub operator: String,
    pub postulate: PostulateId,
    pub mode: Mode,
    pub instances_checked: u64,
    pub vacuous_count: u64,
    pub violations: u64,
    pub first_counterexample: Option<Counterexample>,
}

impl PostulateReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for PostulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} {:<6} {:<10} checked={:<8} vacuous={:<8} violations={:<8} {}",
            self.operator,
            self.postulate.as_str(),
            self.mode,
            self.instances_checked,
            self.vacuous_count,
            self.violations,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        if let Some(cx) = &self.first_counterexample {
            write!(f, "\n    first counterexample: {cx}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("exhaustive {postulate} needs at most {max} atoms, got {atoms}")]
    TooLarge {
        postulate: PostulateId,
        atoms: usize,
        max: usize,
    },

    #[error("budget of {limit} instances exceeded; partial reports returned")]
    BudgetExceeded {
        limit: u64,
        partial: Vec<PostulateReport>,
    },

    #[error(transparent)]
    Revision(#[from] Error),
}

#[derive(Default)]
struct Tally {
    checked: u64,
    vacuous: u64,
    violations: u64,
    // (canonical position, counterexample)
    first: Option<(u64, Counterexample)>,
}

impl Tally {
    fn record(&mut self, pos: u64, v: Verdict, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        match v {
            Verdict::Holds => {}
            Verdict::Vacuous => self.vacuous += 1,
            Verdict::Violated => {
                self.violations += 1;
                if self.first.is_none() {
                    self.first = Some((pos, cx()));
                }
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.vacuous += other.vacuous;
        self.violations += other.violations;
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn max_exhaustive_atoms(p: PostulateId) -> usize {
    match p.arity() {
        Arity::One => 3,
        _ => 2,
    }
}

/// Instances per state for exhaustive mode over `sets` nonempty inputs.
fn per_state(p: PostulateId, sets: u64, max_seq_len: usize) -> u64 {
    let seqs: u64 = (1..=max_seq_len as u32).map(|k| sets.pow(k)).sum();
    match p.arity() {
        Arity::One => sets,
        Arity::Two => sets * sets,
        Arity::Three => sets * sets * sets,
        Arity::Sequence => seqs,
        Arity::OneThenSequence => sets * seqs,
    }
}

/// Verifies each postulate for `op` over `lang`.
pub fn verify<R: Revision + ?Sized>(
    op: &R,
    postulates: &[PostulateId],
    lang: &Language,
    mode: Mode,
    budget: &Budget,
) -> Result<Vec<PostulateReport>, VerifyError> {
    let mut reports = Vec::with_capacity(postulates.len());
    let mut exceeded = false;
    for &p in postulates {
        let (report, cut) = match mode {
            Mode::Exhaustive => exhaustive(op, p, lang, budget)?,
            Mode::Sample => sampled(op, p, lang, budget)?,
        };
        reports.push(report);
        exceeded |= cut;
    }
    if exceeded {
        return Err(VerifyError::BudgetExceeded {
            limit: budget.max_instances.unwrap_or(0),
            partial: reports,
        });
    }
    Ok(reports)
}

fn report<R: Revision + ?Sized>(op: &R, p: PostulateId, mode: Mode, t: Tally) -> PostulateReport {
    PostulateReport {
        operator: op.name().to_string(),
        postulate: p,
        mode,
        instances_checked: t.checked,
        vacuous_count: t.vacuous,
        violations: t.violations,
        first_counterexample: t.first.map(|(_, cx)| cx),
    }
}

fn exhaustive<R: Revision + ?Sized>(
    op: &R,
    p: PostulateId,
    lang: &Language,
    budget: &Budget,
) -> Result<(PostulateReport, bool), VerifyError> {
    let atoms = lang.num_atoms();
    let max = max_exhaustive_atoms(p);
    if atoms > max {
        return Err(VerifyError::TooLarge {
            postulate: p,
            atoms,
            max,
        });
    }
    let sets: Vec<ModelSet> = nonempty_model_sets(atoms).collect();
    let each = per_state(p, sets.len() as u64, budget.max_seq_len);
    let mut states: Vec<TotalPreorder> = PreorderIter::new(atoms).collect();
    let mut cut = false;
    if let Some(limit) = budget.max_instances {
        let allowed = (limit / each.max(1)) as usize;
        if allowed < states.len() {
            states.truncate(allowed);
            cut = true;
        }
    }
    let tally = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| check_state(op, p, s, &sets, budget.max_seq_len, i as u64 * each))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok((report(op, p, Mode::Exhaustive, tally), cut))
}

fn check_state<R: Revision + ?Sized>(
    op: &R,
    p: PostulateId,
    s: &TotalPreorder,
    sets: &[ModelSet],
    max_seq_len: usize,
    base: u64,
) -> Result<Tally, Error> {
    let mut t = Tally::default();
    if p.arity() == Arity::One {
        // Nothing to share between inputs; skip the memo tables.
        let direct = Direct { op, state: s };
        for (pos, a) in (base..).zip(sets) {
            let v = eval_fixed(p, &direct, std::slice::from_ref(a))?;
            t.record(pos, v, || Counterexample::new(s, std::slice::from_ref(a)));
        }
        return Ok(t);
    }
    let cache = Cached::new(op, s);
    let mut pos = base;
    let mut visit = |inputs: &[ModelSet], t: &mut Tally| -> Result<(), Error> {
        let v = eval_fixed(p, &cache, inputs)?;
        t.record(pos, v, || Counterexample::new(s, inputs));
        pos += 1;
        Ok(())
    };
    match p.arity() {
        Arity::One => unreachable!(),
        Arity::Two => {
            for a in sets {
                for b in sets {
                    visit(&[a.clone(), b.clone()], &mut t)?;
                }
            }
        }
        Arity::Three => {
            for a in sets {
                for b in sets {
                    for g in sets {
                        visit(&[a.clone(), b.clone(), g.clone()], &mut t)?;
                    }
                }
            }
        }
        Arity::Sequence => {
            let b0 = s.belief_set();
            let mut walk = SeqWalk {
                op,
                sets,
                max_len: max_seq_len,
                state: s,
                pos: base,
                tally: &mut t,
                prefix: Vec::new(),
            };
            walk.run(
                s,
                &|end: &ModelSet, compat: bool| {
                    if !compat {
                        Verdict::Vacuous
                    } else if end.is_subset(&b0) {
                        Verdict::Holds
                    } else {
                        Verdict::Violated
                    }
                },
                &[&b0],
                None,
            )?;
        }
        Arity::OneThenSequence => {
            let b0 = s.belief_set();
            let seqs = per_state(PostulateId::O, sets.len() as u64, max_seq_len);
            let mut pos = base;
            for a in sets {
                let after = op.revise(s, a)?;
                let b1 = after.belief_set();
                if b0.intersects(&b1) {
                    // Antecedent fails for every Γ.
                    t.checked += seqs;
                    t.vacuous += seqs;
                } else {
                    let mut walk = SeqWalk {
                        op,
                        sets,
                        max_len: max_seq_len,
                        state: s,
                        pos,
                        tally: &mut t,
                        prefix: Vec::new(),
                    };
                    walk.run(
                        &after,
                        &|end: &ModelSet, compat: bool| {
                            if !compat {
                                Verdict::Vacuous
                            } else if end.is_subset(&b1) && !end.is_subset(&b0) {
                                Verdict::Holds
                            } else {
                                Verdict::Violated
                            }
                        },
                        &[&b0, &b1],
                        Some(a),
                    )?;
                }
                pos += seqs;
            }
        }
    }
    Ok(t)
}

/// Depth-first walk over all sequences up to `max_len`, sharing prefixes.
struct SeqWalk<'a, R: Revision + ?Sized> {
    op: &'a R,
    sets: &'a [ModelSet],
    max_len: usize,
    state: &'a TotalPreorder,
    pos: u64,
    tally: &'a mut Tally,
    prefix: Vec<ModelSet>,
}

impl<R: Revision + ?Sized> SeqWalk<'_, R> {
    fn run(
        &mut self,
        start: &TotalPreorder,
        judge: &dyn Fn(&ModelSet, bool) -> Verdict,
        bases: &[&ModelSet],
        lead: Option<&ModelSet>,
    ) -> Result<(), Error> {
        self.descend(start, true, judge, bases, lead)
    }

    fn descend(
        &mut self,
        cur: &TotalPreorder,
        compat: bool,
        judge: &dyn Fn(&ModelSet, bool) -> Verdict,
        bases: &[&ModelSet],
        lead: Option<&ModelSet>,
    ) -> Result<(), Error> {
        for g in self.sets {
            let next = self.op.revise(cur, g)?;
            let ok = compat && bases.iter().all(|b| b.intersects(g));
            self.prefix.push(g.clone());
            let v = judge(&next.belief_set(), ok);
            let (state, prefix) = (self.state, &self.prefix);
            self.tally.record(self.pos, v, || {
                let mut inputs: Vec<ModelSet> = lead.into_iter().cloned().collect();
                inputs.extend(prefix.iter().cloned());
                Counterexample::new(state, &inputs)
            });
            self.pos += 1;
            if self.prefix.len() < self.max_len {
                self.descend(&next, ok, judge, bases, lead)?;
            }
            self.prefix.pop();
        }
        Ok(())
    }
}

fn random_set<G: Rng>(atoms: usize, rng: &mut G) -> ModelSet {
    let lang_size = 1usize << atoms;
    loop {
        let mut m = ModelSet::empty(atoms);
        for v in 0..lang_size {
            if rng.gen::<bool>() {
                m.insert(crate::lang::Valuation(v as u32));
            }
        }
        if !m.is_empty() {
            return m;
        }
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws sample `index` of a run: a state and `count` inputs.
pub fn sample_instance(atoms: usize, seed: u64, index: u64, count: usize) -> Instance {
    let mut rng = sample_rng(seed, index);
    let state = sample_preorder_with(atoms, &mut rng);
    let inputs = (0..count).map(|_| random_set(atoms, &mut rng)).collect();
    Instance { state, inputs }
}

fn sampled<R: Revision + ?Sized>(
    op: &R,
    p: PostulateId,
    lang: &Language,
    budget: &Budget,
) -> Result<(PostulateReport, bool), VerifyError> {
    let atoms = lang.num_atoms();
    let mut n = budget.samples;
    let mut cut = false;
    if let Some(limit) = budget.max_instances {
        if limit < n {
            n = limit;
            cut = true;
        }
    }
    let tally = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Tally, Error> {
            let mut t = Tally::default();
            let inst = match p.arity() {
                Arity::One => sample_instance(atoms, budget.seed, i, 1),
                Arity::Two => sample_instance(atoms, budget.seed, i, 2),
                Arity::Three => sample_instance(atoms, budget.seed, i, 3),
                Arity::Sequence | Arity::OneThenSequence => {
                    let mut rng = sample_rng(budget.seed, i);
                    let len = rng.gen_range(1..=budget.max_seq_len.max(1));
                    let lead = usize::from(p.arity() == Arity::OneThenSequence);
                    sample_instance(atoms, budget.seed, i, len + lead)
                }
            };
            let v = match p.arity() {
                Arity::Sequence => {
                    let seq = crate::preorder::InputSequence::new(inst.inputs.clone())?;
                    crate::postulates::evaluate_sequence(p, op, &inst.state, &seq, None)?
                }
                Arity::OneThenSequence => {
                    let seq = crate::preorder::InputSequence::new(inst.inputs[1..].to_vec())?;
                    crate::postulates::evaluate_sequence(
                        p,
                        op,
                        &inst.state,
                        &seq,
                        Some(&inst.inputs[0]),
                    )?
                }
                _ => eval_fixed(
                    p,
                    &Direct {
                        op,
                        state: &inst.state,
                    },
                    &inst.inputs,
                )?,
            };
            t.record(i, v, || Counterexample::new(&inst.state, &inst.inputs));
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok((report(op, p, Mode::Sample, tally), cut))
}

/// Bit-exact agreement of two operators on single revisions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub operator: String,
    pub oracle: String,
    pub mode: Mode,
    pub instances_checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<Counterexample>,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} vs {:<14} {:<10} checked={:<8} mismatches={:<8} {}",
            self.operator,
            self.oracle,
            self.mode,
            self.instances_checked,
            self.mismatches,
            if self.mismatches == 0 { "PASS" } else { "FAIL" }
        )?;
        if let Some(cx) = &self.first_mismatch {
            write!(f, "\n    first mismatch: {cx}")?;
        }
        Ok(())
    }
}

/// Compares `op(s, a)` with `oracle(s, a)` over all (exhaustive, up to 3
/// atoms) or sampled `(s, a)` pairs.
pub fn compare_with_oracle<R: Revision + ?Sized, O: Revision + ?Sized>(
    op: &R,
    oracle: &O,
    lang: &Language,
    mode: Mode,
    budget: &Budget,
) -> Result<OracleReport, VerifyError> {
    let atoms = lang.num_atoms();
    let check = |pos: u64, s: &TotalPreorder, a: &ModelSet| -> Result<Tally, Error> {
        let mut t = Tally::default();
        let same = op.revise(s, a)? == oracle.revise(s, a)?;
        t.record(pos, Verdict::of_bool(same), || {
            Counterexample::new(s, std::slice::from_ref(a))
        });
        Ok(t)
    };
    let tally = match mode {
        Mode::Exhaustive => {
            if atoms > 3 {
                return Err(VerifyError::TooLarge {
                    postulate: PostulateId::Ragm,
                    atoms,
                    max: 3,
                });
            }
            let sets: Vec<ModelSet> = nonempty_model_sets(atoms).collect();
            let states: Vec<TotalPreorder> = PreorderIter::new(atoms).collect();
            let each = sets.len() as u64;
            states
                .par_iter()
                .enumerate()
                .map(|(i, s)| {
                    sets.iter()
                        .enumerate()
                        .try_fold(Tally::default(), |acc, (j, a)| {
                            Ok::<_, Error>(acc.merge(check(i as u64 * each + j as u64, s, a)?))
                        })
                })
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?
        }
        Mode::Sample => (0..budget.samples)
            .into_par_iter()
            .map(|i| {
                let inst = sample_instance(atoms, budget.seed, i, 1);
                check(i, &inst.state, &inst.inputs[0])
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?,
    };
    Ok(OracleReport {
        operator: op.name().to_string(),
        oracle: oracle.name().to_string(),
        mode,
        instances_checked: tally.checked,
        mismatches: tally.violations,
        first_mismatch: tally.first.map(|(_, cx)| cx),
    })
}

impl Verdict {
    fn of_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// A syntactic postulate paired with its pointwise counterpart.
pub const SEMANTIC_PAIRS: [(PostulateId, PostulateId); 9] = [
    (PostulateId::C1, PostulateId::CR1),
    (PostulateId::C2, PostulateId::CR2),
    (PostulateId::C3, PostulateId::CR3),
    (PostulateId::C4, PostulateId::CR4),
    (PostulateId::P, PostulateId::PR),
    (PostulateId::D, PostulateId::DR),
    (PostulateId::U, PostulateId::UR),
    (PostulateId::CB, PostulateId::CBR),
    (PostulateId::Rec, PostulateId::R),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub syntactic: PostulateId,
    pub semantic: PostulateId,
    pub syntactic_pass: bool,
    pub semantic_pass: bool,
}

impl PairVerdict {
    pub fn agree(&self) -> bool {
        self.syntactic_pass == self.semantic_pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetaReport {
    pub operator: String,
    pub ragm: bool,
    pub pairs: Vec<PairVerdict>,
    /// CR1, CR2, PR and DR all pass.
    pub pointwise_premises: bool,
    pub rr: bool,
    /// Agrees with restrained revision on every single revision.
    pub equals_restrained: bool,
}

impl MetaReport {
    /// Every pairing agrees, and the four pointwise premises pass exactly when (RR) does.
    pub fn consistent(&self) -> bool {
        self.pairs.iter().all(PairVerdict::agree) && self.pointwise_premises == self.rr
    }

    pub fn pair(&self, syntactic: PostulateId) -> Option<&PairVerdict> {
        self.pairs.iter().find(|p| p.syntactic == syntactic)
    }
}

impl fmt::Display for MetaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "pass" } else { "fail" };
        writeln!(f, "operator {} (RAGM {})", self.operator, yn(self.ragm))?;
        for p in &self.pairs {
            writeln!(
                f,
                "  {:<4} {}  {:<4} {}  {}",
                p.syntactic.as_str(),
                yn(p.syntactic_pass),
                p.semantic.as_str(),
                yn(p.semantic_pass),
                if p.agree() { "agree" } else { "DISAGREE" }
            )?;
        }
        writeln!(
            f,
            "  CR1+CR2+PR+DR {}  RR {}  equals restrained: {}",
            yn(self.pointwise_premises),
            yn(self.rr),
            self.equals_restrained
        )
    }
}

/// Exhaustive verdicts for each syntactic/pointwise pairing at `lang` (2 atoms).
pub fn cross_check_meta<R: Revision + ?Sized>(
    op: &R,
    lang: &Language,
) -> Result<MetaReport, VerifyError> {
    let budget = Budget::default();
    let pass = |p: PostulateId| -> Result<bool, VerifyError> {
        Ok(verify(op, &[p], lang, Mode::Exhaustive, &budget)?[0].passed())
    };
    let mut pairs = Vec::new();
    for (syn, sem) in SEMANTIC_PAIRS {
        pairs.push(PairVerdict {
            syntactic: syn,
            semantic: sem,
            syntactic_pass: pass(syn)?,
            semantic_pass: pass(sem)?,
        });
    }
    let premise = |p: PostulateId| {
        pairs
            .iter()
            .find(|x| x.semantic == p)
            .unwrap()
            .semantic_pass
    };
    let pointwise_premises = [
        PostulateId::CR1,
        PostulateId::CR2,
        PostulateId::PR,
        PostulateId::DR,
    ]
    .into_iter()
    .all(premise);
    let oracle = compare_with_oracle(op, &Operator::Restrained, lang, Mode::Exhaustive, &budget)?;
    Ok(MetaReport {
        operator: op.name().to_string(),
        ragm: pass(PostulateId::Ragm)?,
        pairs,
        pointwise_premises,
        rr: pass(PostulateId::RR)?,
        equals_restrained: oracle.mismatches == 0,
    })
}
