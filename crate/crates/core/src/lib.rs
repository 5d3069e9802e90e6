//! Approximate maximin-share (MMS) allocations of indivisible goods with exact
//! rational arithmetic.
//!
//! [`pipeline::approx_mms`] returns an allocation that gives every agent at
//! least `alpha` times their maximin share, for any
//! `alpha <= 3/4 + min(1/36, 3/(16n - 4))`. The pieces it is built from are
//! public as well: the exact MMS [`oracle`], the instance [`transforms`]
//! (ordering, normalization, valid reductions) and [`bagfill`].
//!
//! ```
//! use mmsfair::{alpha_for, approx_mms, AlphaMode, Instance, Oracle};
//!
//! let inst = Instance::from_int_rows(&[&[6, 5, 4, 3, 2, 1], &[1, 2, 3, 4, 5, 6]]).unwrap();
//! let choice = alpha_for(inst.n(), &AlphaMode::Improved).unwrap();
//! let report = approx_mms(&Oracle::default(), &inst, &choice).unwrap();
//! assert!(report.score.unwrap() >= choice.alpha);
//! ```

pub mod bagfill;
pub mod error;
pub mod harness;
pub mod json;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod transforms;
pub mod value;

pub use error::{Error, Result};
pub use model::{Allocation, Bundle, GoodId, Instance};
pub use oracle::{mms_naive, mms_score, MmsResult, Oracle};
pub use pipeline::{alpha_for, approx_mms, approx_mms_traced, AlphaChoice, AlphaMode, SolveReport};
pub use value::Value;
