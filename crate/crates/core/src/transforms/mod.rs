//! The alpha-MMS-preserving transformations: ordering, normalization and
//! valid reductions, each with a way back to the input instance.

mod checks;
mod normalize;
mod ordering;
mod reduce;

pub use checks::{check_irreducible, check_normalized, is_totally_irreducible, Property, Violation};
pub use normalize::{is_normalized, normalize};
pub use ordering::{is_ordered, lift_ordered, to_ordered, OrderingMap};
pub use reduce::{
    apply_reduction, apply_reduction_labeled, lift_reductions, reduce, rule_goods, rule_target, AgentValue, DummyGood,
    ReductionLog, ReductionRecord, Rule,
};
