//! Bag filling on ordered instances.
//!
//! Bag `k` (0-based) starts as the goods ranked `k` and `2n-1-k`; the goods
//! ranked `2n..m` wait in a queue. While some agent is unsatisfied, the first
//! (agent, bag) pair in ascending order with `v_i(bag) >= alpha` is matched;
//! otherwise the next queued good goes into the lowest-indexed open bag. Running
//! out of goods with agents still waiting is reported as `None`. Dummy goods
//! play no part.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, GoodId, Instance};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum BagEvent {
    Fill { good: GoodId, bag: usize },
    Assign { agent: usize, bag: usize, value: Value },
}

/// Bags, queues and matches while the loop runs.
#[derive(Clone, Debug)]
pub struct BagState {
    /// Columns per bag, in insertion order.
    pub bags: Vec<Vec<usize>>,
    pub unassigned_goods: VecDeque<usize>,
    pub unsatisfied_agents: BTreeSet<usize>,
    pub unassigned_bags: BTreeSet<usize>,
    /// `assignments[agent]` is the bag matched to that agent.
    pub assignments: Vec<Option<usize>>,
}

impl BagState {
    fn new(n: usize, m: usize) -> Self {
        BagState {
            bags: (0..n).map(|k| vec![k, 2 * n - 1 - k]).collect(),
            unassigned_goods: (2 * n..m).collect(),
            unsatisfied_agents: (0..n).collect(),
            unassigned_bags: (0..n).collect(),
            assignments: vec![None; n],
        }
    }
}

#[derive(Clone, Debug)]
pub struct BagFill {
    /// Partial allocation on success, `None` when the goods ran out.
    pub allocation: Option<Allocation>,
    pub trace: Vec<BagEvent>,
    pub state: BagState,
}

pub fn bag_fill(instance: &Instance, alpha: &Value) -> Result<BagFill> {
    let (n, m) = (instance.n(), instance.m());
    if m < 2 * n {
        return Err(Error::contract(format!(
            "bag filling needs m >= 2n, got m = {m}, n = {n}"
        )));
    }
    let mut state = BagState::new(n, m);
    // bag_values[agent][bag]
    let mut bag_values: Vec<Vec<Value>> = (0..n)
        .map(|a| state.bags.iter().map(|b| instance.cols_value(a, b)).collect())
        .collect();
    let mut trace = Vec::new();

    while !state.unsatisfied_agents.is_empty() {
        debug_assert_eq!(state.unsatisfied_agents.len(), state.unassigned_bags.len());
        let hit = state.unsatisfied_agents.iter().find_map(|&a| {
            state
                .unassigned_bags
                .iter()
                .find(|&&k| bag_values[a][k] >= *alpha)
                .map(|&k| (a, k))
        });
        if let Some((agent, bag)) = hit {
            state.assignments[agent] = Some(bag);
            state.unsatisfied_agents.remove(&agent);
            state.unassigned_bags.remove(&bag);
            trace.push(BagEvent::Assign {
                agent,
                bag,
                value: bag_values[agent][bag].clone(),
            });
        } else if let Some(good) = state.unassigned_goods.pop_front() {
            let bag = *state.unassigned_bags.first().expect("as many open bags as agents");
            state.bags[bag].push(good);
            for (a, values) in bag_values.iter_mut().enumerate() {
                values[bag] += instance.value(a, good);
            }
            trace.push(BagEvent::Fill {
                good: instance.id(good).clone(),
                bag,
            });
        } else {
            return Ok(BagFill {
                allocation: None,
                trace,
                state,
            });
        }
    }

    let bundles = state
        .assignments
        .iter()
        .map(|b| instance.bundle_of(&state.bags[b.expect("every agent matched")]))
        .collect();
    Ok(BagFill {
        allocation: Some(Allocation::new(bundles)),
        trace,
        state,
    })
}

/// Hands every unallocated real good to the agent valuing it most (lowest
/// index on ties). Nobody's value decreases.
pub fn complete_allocation(instance: &Instance, partial: &Allocation) -> Result<Allocation> {
    partial.validate_for(instance, false)?;
    let mut allocated = vec![false; instance.m()];
    for id in partial.bundles.iter().flatten() {
        allocated[instance.column_of(id).expect("validated")] = true;
    }
    let mut bundles: Vec<Bundle> = partial.bundles.clone();
    for col in (0..instance.m()).filter(|&c| !allocated[c]) {
        let best = (0..instance.n())
            .reduce(|best, a| {
                if instance.value(a, col) > instance.value(best, col) {
                    a
                } else {
                    best
                }
            })
            .expect("at least one agent");
        bundles[best].insert(instance.id(col).clone());
    }
    Ok(Allocation::new(bundles))
}

/// Replays a trace and reports every step that breaks the filling discipline:
/// a match below `alpha`, or a fill while some open pair already met `alpha`.
/// For every matched bag of more than two goods this also means that without
/// its last good the bag was worth less than `alpha` to every agent still
/// waiting at that time.
pub fn check_trace(instance: &Instance, alpha: &Value, trace: &[BagEvent]) -> Vec<String> {
    let n = instance.n();
    let mut bags: Vec<Vec<usize>> = (0..n).map(|k| vec![k, 2 * n - 1 - k]).collect();
    let mut waiting: BTreeSet<usize> = (0..n).collect();
    let mut open: BTreeSet<usize> = (0..n).collect();
    let mut problems = Vec::new();
    for (step, event) in trace.iter().enumerate() {
        match event {
            BagEvent::Assign { agent, bag, .. } => {
                let v = instance.cols_value(*agent, &bags[*bag]);
                if v < *alpha {
                    problems.push(format!("step {step}: agent {agent} matched bag {bag} worth {v}"));
                }
                if !waiting.remove(agent) || !open.remove(bag) {
                    problems.push(format!("step {step}: agent {agent} or bag {bag} matched twice"));
                }
            }
            BagEvent::Fill { good, bag } => {
                for &a in &waiting {
                    for &k in &open {
                        let v = instance.cols_value(a, &bags[k]);
                        if v >= *alpha {
                            problems.push(format!(
                                "step {step}: filled bag {bag} although agent {a} accepts bag {k} ({v})"
                            ));
                        }
                    }
                }
                match instance.column_of(good) {
                    Some(c) => bags[*bag].push(c),
                    None => problems.push(format!("step {step}: unknown good {good}")),
                }
            }
        }
    }
    problems
}
