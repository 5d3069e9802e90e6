//! The end-to-end approximation: order, reduce, normalize, reorder, fill bags,
//! complete, and lift the result back to the input instance.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bagfill::{bag_fill, complete_allocation, BagEvent, BagFill};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};
use crate::oracle::{score_against, Oracle};
use crate::transforms::{
    check_irreducible, is_normalized, is_ordered, lift_ordered, lift_reductions, normalize, reduce, to_ordered,
    OrderingMap, ReductionLog, ReductionRecord,
};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    Classic,
    Improved,
    Explicit(Value),
}

impl FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "classic" => Ok(AlphaMode::Classic),
            "improved" => Ok(AlphaMode::Improved),
            other => other
                .parse::<Value>()
                .map(AlphaMode::Explicit)
                .map_err(|e| Error::validation("alpha", format!("expected classic, improved or P/Q: {e}"))),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Classic => f.write_str("classic"),
            AlphaMode::Improved => f.write_str("improved"),
            AlphaMode::Explicit(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaChoice {
    pub n_original: usize,
    pub alpha: Value,
    /// `alpha - 3/4`; dummy goods appear only when this is positive.
    pub delta: Value,
}

/// `3/4 + min(1/36, 3/(16n - 4))`.
pub fn improved_bound(n: usize) -> Value {
    let a = Value::ratio(1, 36);
    let b = Value::ratio(3, 16 * n as i64 - 4);
    Value::ratio(3, 4) + a.min(b)
}

/// The threshold for an instance with `n` agents. `n` is the agent count of the
/// input and is never recomputed after reductions.
pub fn alpha_for(n: usize, mode: &AlphaMode) -> Result<AlphaChoice> {
    if n == 0 {
        return Err(Error::validation("agents", "at least one agent required"));
    }
    let bound = improved_bound(n);
    let alpha = match mode {
        AlphaMode::Classic => Value::ratio(3, 4),
        AlphaMode::Improved => bound,
        AlphaMode::Explicit(a) => {
            if !a.is_positive() {
                return Err(Error::validation("alpha", format!("{a} must be positive")));
            }
            if *a > bound {
                return Err(Error::validation(
                    "alpha",
                    format!(
                        "{a} exceeds {bound}, the largest threshold guaranteed for {n} agents; \
                         use `improved` or a smaller value"
                    ),
                ));
            }
            a.clone()
        }
    };
    let delta = &alpha - Value::ratio(3, 4);
    Ok(AlphaChoice {
        n_original: n,
        alpha,
        delta,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgentReport {
    pub agent: usize,
    pub bundle_value: Value,
    pub mms: Value,
    /// `None` when the agent's MMS is zero.
    pub ratio: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BagFillSummary {
    pub ran: bool,
    pub agents: usize,
    pub fills: usize,
    pub events: Vec<BagEvent>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub allocation: Allocation,
    /// `None` when every agent's MMS is zero.
    pub score: Option<Value>,
    pub alpha: AlphaChoice,
    pub reductions: Vec<ReductionRecord>,
    pub bagfill: BagFillSummary,
    pub agents: Vec<AgentReport>,
}

/// Every intermediate object of one solve, for auditing and tests.
#[derive(Clone, Debug)]
pub struct SolveTrace {
    pub ordered: Instance,
    pub first_map: OrderingMap,
    pub log: ReductionLog,
    /// Present when two or more agents survive the reductions.
    pub stages: Option<BagStages>,
    /// The allocation of `log.final_instance` before the reduction lift.
    pub reduced_allocation: Allocation,
    /// The allocation of `ordered` before the last ordering lift.
    pub ordered_allocation: Allocation,
}

#[derive(Clone, Debug)]
pub struct BagStages {
    pub normalized: Instance,
    /// Ordered, normalized and totally irreducible.
    pub oni: Instance,
    pub second_map: OrderingMap,
    pub bag_fill: BagFill,
    /// Completed bag-filling allocation of `oni`.
    pub oni_allocation: Allocation,
}

pub fn approx_mms(oracle: &Oracle, instance: &Instance, choice: &AlphaChoice) -> Result<SolveReport> {
    approx_mms_traced(oracle, instance, choice).map(|(report, _)| report)
}

pub fn approx_mms_traced(
    oracle: &Oracle,
    instance: &Instance,
    choice: &AlphaChoice,
) -> Result<(SolveReport, SolveTrace)> {
    instance.validate()?;
    if choice.n_original != instance.n() {
        return Err(Error::contract(format!(
            "alpha chosen for {} agents, instance has {}",
            choice.n_original,
            instance.n()
        )));
    }
    let alpha = &choice.alpha;
    let (ordered, first_map) = to_ordered(instance)?;
    let log = reduce(oracle, &ordered, alpha)?;
    let reduced = &log.final_instance;

    let (reduced_allocation, stages) = if reduced.n() == 1 {
        let everything: Bundle = reduced.goods().iter().cloned().collect();
        (Allocation::new(vec![everything]), None)
    } else {
        let normalized = normalize(oracle, reduced)?;
        let (oni, second_map) = to_ordered(&normalized)?;
        assert_oni(oracle, &oni, alpha, &log)?;
        let fill = bag_fill(&oni, alpha)?;
        let Some(partial) = fill.allocation.clone() else {
            return Err(Error::InternalInvariant {
                message: format!("bag filling ran out of goods at alpha = {alpha}"),
                trace: trace_dump(&log, &fill.trace),
            });
        };
        let oni_allocation = complete_allocation(&oni, &partial)?;
        let lifted = lift_ordered(&second_map, &normalized, &oni_allocation)?;
        (
            lifted,
            Some(BagStages {
                normalized,
                oni,
                second_map,
                bag_fill: fill,
                oni_allocation,
            }),
        )
    };

    let ordered_allocation = lift_reductions(&log, &reduced_allocation)?;
    let allocation = lift_ordered(&first_map, instance, &ordered_allocation)?;

    let mms = oracle.instance_values(instance)?;
    let score = score_against(instance, &allocation, &mms)?;
    let agents = allocation
        .bundles
        .iter()
        .zip(&mms)
        .enumerate()
        .map(|(agent, (bundle, m))| {
            let bundle_value = instance.bundle_value(agent, bundle)?;
            let ratio = (!m.is_zero()).then(|| &bundle_value / m);
            Ok(AgentReport {
                agent,
                bundle_value,
                mms: m.clone(),
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let bagfill = match &stages {
        Some(s) => BagFillSummary {
            ran: true,
            agents: s.oni.n(),
            fills: s
                .bag_fill
                .trace
                .iter()
                .filter(|e| matches!(e, BagEvent::Fill { .. }))
                .count(),
            events: s.bag_fill.trace.clone(),
        },
        None => BagFillSummary {
            ran: false,
            agents: 0,
            fills: 0,
            events: Vec::new(),
        },
    };
    let report = SolveReport {
        allocation,
        score,
        alpha: choice.clone(),
        reductions: log.records.clone(),
        bagfill,
        agents,
    };
    let trace = SolveTrace {
        ordered,
        first_map,
        log,
        stages,
        reduced_allocation,
        ordered_allocation,
    };
    Ok((report, trace))
}

fn assert_oni(oracle: &Oracle, oni: &Instance, alpha: &Value, log: &ReductionLog) -> Result<()> {
    let fail = |message: String| Error::InternalInvariant {
        message,
        trace: trace_dump(log, &[]),
    };
    if !is_ordered(oni) {
        return Err(fail("reordered instance is not ordered".into()));
    }
    if !is_normalized(oracle, oni)? {
        return Err(fail("reordered instance is not normalized".into()));
    }
    let ones = vec![Value::one(); oni.n()];
    let violations = check_irreducible(oni, alpha, &ones)?;
    if let Some(v) = violations.first() {
        return Err(fail(format!("instance handed to bag filling is not irreducible: {v}")));
    }
    Ok(())
}

fn trace_dump(log: &ReductionLog, events: &[BagEvent]) -> String {
    serde_json::json!({ "reductions": log.records, "bagfill": events }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen_tight_example;

    #[test]
    fn improved_alpha_small_n() {
        let c = alpha_for(3, &AlphaMode::Improved).unwrap();
        assert_eq!(c.alpha, Value::ratio(7, 9));
        assert_eq!(c.delta, Value::ratio(1, 36));
        // 1/36 < 3/44
        assert!(Value::ratio(1, 36) < Value::ratio(3, 44));
    }

    #[test]
    fn improved_alpha_large_n() {
        let c = alpha_for(9, &AlphaMode::Improved).unwrap();
        assert_eq!(c.alpha, Value::ratio(3, 4) + Value::ratio(3, 140));
        // the two terms cross between n = 7 and n = 8
        assert_eq!(improved_bound(7), Value::ratio(7, 9));
        assert!(improved_bound(8) < Value::ratio(7, 9));
    }

    #[test]
    fn classic_and_explicit() {
        assert_eq!(alpha_for(5, &AlphaMode::Classic).unwrap().alpha, Value::ratio(3, 4));
        let c = alpha_for(2, &AlphaMode::Explicit(Value::ratio(1, 2))).unwrap();
        assert_eq!(c.delta, Value::ratio(-1, 4));
        assert!(alpha_for(2, &AlphaMode::Explicit(Value::ratio(4, 5))).is_err());
        assert!(alpha_for(2, &AlphaMode::Explicit(Value::zero())).is_err());
        assert!(alpha_for(0, &AlphaMode::Classic).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("classic".parse::<AlphaMode>().unwrap(), AlphaMode::Classic);
        assert_eq!("improved".parse::<AlphaMode>().unwrap(), AlphaMode::Improved);
        assert_eq!(
            "3/4".parse::<AlphaMode>().unwrap(),
            AlphaMode::Explicit(Value::ratio(3, 4))
        );
        assert!("fast".parse::<AlphaMode>().is_err());
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::from_int_rows(&[&[3, 1, 4]]).unwrap();
        let oracle = Oracle::default();
        let choice = alpha_for(1, &AlphaMode::Improved).unwrap();
        let report = approx_mms(&oracle, &inst, &choice).unwrap();
        assert_eq!(report.allocation.bundles[0].len(), 3);
        assert_eq!(report.score, Some(Value::one()));
        assert!(!report.bagfill.ran);
    }

    #[test]
    fn tight_example_three_agents() {
        let inst = gen_tight_example(3).unwrap().instance;
        let oracle = Oracle::default();
        let choice = alpha_for(3, &AlphaMode::Improved).unwrap();
        let report = approx_mms(&oracle, &inst, &choice).unwrap();
        let score = report.score.unwrap();
        assert!(score >= choice.alpha);
        assert!(score <= Value::ratio(9, 10));
        assert!(report.allocation.is_complete_for(&inst));
    }

    #[test]
    fn all_zero_instance() {
        let inst = Instance::from_int_rows(&[&[0, 0, 0], &[0, 0, 0]]).unwrap();
        let oracle = Oracle::default();
        let choice = alpha_for(2, &AlphaMode::Improved).unwrap();
        let (report, trace) = approx_mms_traced(&oracle, &inst, &choice).unwrap();
        assert_eq!(report.score, None);
        assert!(report.allocation.is_complete_for(&inst));
        assert_eq!(trace.log.records.len(), 1);
    }

    #[test]
    fn irreducible_instance_goes_through_bag_filling() {
        let inst = Instance::from_int_rows(&[&[1; 10], &[1; 10]]).unwrap();
        let oracle = Oracle::default();
        let choice = alpha_for(2, &AlphaMode::Improved).unwrap();
        let (report, trace) = approx_mms_traced(&oracle, &inst, &choice).unwrap();
        assert!(report.bagfill.ran);
        assert!(trace.log.records.is_empty());
        assert!(report.score.unwrap() >= choice.alpha);
    }

    #[test]
    fn mismatched_choice_is_rejected() {
        let inst = Instance::from_int_rows(&[&[1, 1], &[1, 1]]).unwrap();
        let choice = alpha_for(3, &AlphaMode::Classic).unwrap();
        assert!(approx_mms(&Oracle::default(), &inst, &choice).is_err());
    }
}
