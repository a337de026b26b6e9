//! The counteracts relation: `α` and `β` counteract w.r.t. a state when
//! revising by either rules out the other.

use crate::error::{Error, Result};
use crate::lang::ModelSet;
use crate::ops::Revision;
use crate::preorder::TotalPreorder;

/// A validated `(state, α, β)` triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounteractQuery {
    pub state: TotalPreorder,
    pub alpha: ModelSet,
    pub beta: ModelSet,
}

impl CounteractQuery {
    pub fn new(state: TotalPreorder, alpha: ModelSet, beta: ModelSet) -> Result<Self> {
        for m in [&alpha, &beta] {
            if m.num_atoms() != state.num_atoms() {
                return Err(Error::LanguageMismatch {
                    left: state.num_atoms(),
                    right: m.num_atoms(),
                });
            }
            if m.is_empty() {
                return Err(Error::EmptyInput);
            }
        }
        Ok(Self { state, alpha, beta })
    }

    pub fn holds(&self) -> bool {
        counteracts_in(&self.state, &self.alpha, &self.beta)
    }

    pub fn holds_via_witnesses(&self) -> bool {
        witnesses_in(&self.state, &self.alpha, &self.beta)
    }
}

// Inputs already validated as nonempty.
fn counteracts_in(order: &TotalPreorder, alpha: &ModelSet, beta: &ModelSet) -> bool {
    let ma = order.min_models(alpha).expect("nonempty alpha");
    let mb = order.min_models(beta).expect("nonempty beta");
    !ma.intersects(beta) && !mb.intersects(alpha)
}

fn witnesses_in(order: &TotalPreorder, alpha: &ModelSet, beta: &ModelSet) -> bool {
    let both = alpha.intersection(beta);
    let Ok(floor) = order.min_models(&both) else {
        // α ∧ β unsatisfiable
        return true;
    };
    let floor_rank = order.rank(floor.iter().next().unwrap());
    let below = |m: &ModelSet| m.iter().any(|v| order.rank(v) < floor_rank);
    below(alpha) && below(beta)
}

/// Preorder form: `min(α, ⪯) ⊆ [¬β]` and `min(β, ⪯) ⊆ [¬α]`.
pub fn counteracts(q: &CounteractQuery) -> bool {
    q.holds()
}

/// Witness form: some `α`-world and some `β`-world lie strictly below every
/// most plausible `(α ∧ β)`-world. Vacuously true when `α ∧ β` has no models.
pub fn counteracts_via_witnesses(q: &CounteractQuery) -> bool {
    q.holds_via_witnesses()
}

/// The preorder-form test against an arbitrary supplied preorder.
pub fn counteracts_wrt(order: &TotalPreorder, alpha: &ModelSet, beta: &ModelSet) -> Result<bool> {
    let q = CounteractQuery::new(order.clone(), alpha.clone(), beta.clone())?;
    Ok(q.holds())
}

/// Revision form: `¬β ∈ B(E ∗ α)` and `¬α ∈ B(E ∗ β)` under the given operator.
pub fn counteracts_by_revision<R: Revision + ?Sized>(
    op: &R,
    state: &TotalPreorder,
    alpha: &ModelSet,
    beta: &ModelSet,
) -> Result<bool> {
    let ra = op.revise(state, alpha)?.belief_set();
    let rb = op.revise(state, beta)?.belief_set();
    Ok(!ra.intersects(beta) && !rb.intersects(alpha))
}
