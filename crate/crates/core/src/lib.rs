//! Iterated belief revision over total preorders on propositional valuations.
//!
//! A belief state is a [`TotalPreorder`] over the valuations of a small
//! [`Language`]; the believed formulas are those true in its minimal level.
//! Revision operators live in [`ops`], the postulates in [`postulates`], and
//! exhaustive or sampled verification in [`verify`].

pub mod counteracts;
pub mod error;
pub mod formula;
pub mod lang;
pub mod ops;
pub mod postulates;
pub mod preorder;
pub mod verify;

pub use counteracts::{
    counteracts, counteracts_by_revision, counteracts_via_witnesses, counteracts_wrt,
    CounteractQuery,
};
pub use error::{Error, Result};
pub use formula::{models, models_of, parse, Formula};
pub use lang::{entails, equivalent, nonempty_model_sets, Language, ModelSet, Valuation};
pub use ops::{revise_sequence, Operator, Revision};
pub use postulates::{Instance, PostulateId, Verdict};
pub use preorder::{enumerate_preorders, sample_preorder, InputSequence, TotalPreorder};
pub use verify::{verify, Budget, Mode, PostulateReport};
