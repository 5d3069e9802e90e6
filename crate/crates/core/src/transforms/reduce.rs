//! Reduction rules R1-R4 and the `reduce` fixpoint.
//!
//! On an ordered instance with `n` agents and real goods `g_1 >= g_2 >= ...`:
//!
//! | rule | bundle `S_k`                       | needs       |
//! |------|------------------------------------|-------------|
//! | R1   | `{g_1}`                            | `m >= 1`    |
//! | R2   | `{g_n, g_{n+1}}`                   | `m >= n+1`  |
//! | R3   | `{g_{2n-1}, g_{2n}, g_{2n+1}}`     | `m >= 2n+1` |
//! | R4   | `{g_1, g_{2n+1}}`                  | `m >= 2n+1` |
//!
//! `R_k(alpha)` gives `S_k` to an agent with `v_i(S_k) >= alpha * MMS_i`. When
//! `alpha > 3/4`, R4 also creates a dummy good worth `max(0, v_j(S_4) - MMS_j)`
//! to each remaining agent `j`. Dummy goods count towards MMS but are never
//! allocated and never enter any `S_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ordering::is_ordered;
use crate::error::{Error, Result};
use crate::model::{fresh_id, Allocation, Bundle, GoodId, Instance};
use crate::oracle::Oracle;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    /// Removes an agent whose MMS is zero, giving them nothing.
    ZeroMms,
}

impl Rule {
    pub fn from_index(k: usize) -> Result<Rule> {
        match k {
            1 => Ok(Rule::R1),
            2 => Ok(Rule::R2),
            3 => Ok(Rule::R3),
            4 => Ok(Rule::R4),
            _ => Err(Error::contract(format!("reduction rule index must be 1..=4, got {k}"))),
        }
    }

    pub fn index(self) -> Option<usize> {
        match self {
            Rule::R1 => Some(1),
            Rule::R2 => Some(2),
            Rule::R3 => Some(3),
            Rule::R4 => Some(4),
            Rule::ZeroMms => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(k) => write!(f, "R{k}"),
            None => f.write_str("ZeroMms"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentValue {
    pub agent: usize,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DummyGood {
    pub id: GoodId,
    /// Value to each agent remaining after the reduction.
    pub values: Vec<AgentValue>,
}

/// One applied reduction. Agents are named by their index in the instance the
/// whole log started from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub rule: Rule,
    pub agent: usize,
    pub removed_goods: Bundle,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dummy_created: Option<DummyGood>,
    /// MMS of every agent present just before the reduction.
    pub pre_mms: Vec<AgentValue>,
}

impl ReductionRecord {
    pub fn pre_mms_of(&self, agent: usize) -> Option<&Value> {
        self.pre_mms.iter().find(|a| a.agent == agent).map(|a| &a.value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionLog {
    /// Agent count of the instance the log started from.
    pub input_agents: usize,
    pub records: Vec<ReductionRecord>,
    /// `survivors[p]` is the starting index of the final instance's agent `p`.
    pub survivors: Vec<usize>,
    #[serde(skip)]
    pub final_instance: Instance,
}

/// Columns of `S_k` in an ordered instance; empty when there are too few goods.
pub fn rule_goods(instance: &Instance, k: usize) -> Result<Vec<usize>> {
    let (n, m) = (instance.n(), instance.m());
    let cols = match Rule::from_index(k)? {
        Rule::R1 if m >= 1 => vec![0],
        Rule::R2 if m > n => vec![n - 1, n],
        Rule::R3 if m > 2 * n => vec![2 * n - 2, 2 * n - 1, 2 * n],
        Rule::R4 if m > 2 * n => vec![0, 2 * n],
        _ => Vec::new(),
    };
    Ok(cols)
}

/// Lowest agent with `v_i(S_k) >= alpha * mms[i]`, or `None` when the instance
/// is `R_k(alpha)`-irreducible. An empty `S_k` never applies.
pub fn rule_target(instance: &Instance, alpha: &Value, k: usize, mms: &[Value]) -> Result<Option<usize>> {
    if mms.len() != instance.n() {
        return Err(Error::contract("one MMS value per agent required"));
    }
    let cols = rule_goods(instance, k)?;
    if cols.is_empty() {
        return Ok(None);
    }
    Ok((0..instance.n()).find(|&i| instance.cols_value(i, &cols) >= alpha * &mms[i]))
}

/// Gives `S_k` to `agent` and removes both. See [`apply_reduction_labeled`].
pub fn apply_reduction(
    instance: &Instance,
    alpha: &Value,
    k: usize,
    agent: usize,
    mms: &[Value],
) -> Result<(Instance, ReductionRecord)> {
    let labels: Vec<usize> = (0..instance.n()).collect();
    apply_reduction_labeled(instance, &labels, alpha, Rule::from_index(k)?, agent, mms)
}

/// Applies `rule` for the agent at position `agent`. `labels[p]` names the
/// agent at position `p` in the returned record.
pub fn apply_reduction_labeled(
    instance: &Instance,
    labels: &[usize],
    alpha: &Value,
    rule: Rule,
    agent: usize,
    mms: &[Value],
) -> Result<(Instance, ReductionRecord)> {
    let n = instance.n();
    if agent >= n || labels.len() != n || mms.len() != n {
        return Err(Error::contract("agent, labels and MMS values must match the instance"));
    }
    if n < 2 {
        return Err(Error::contract("cannot reduce the last agent away"));
    }
    let removed: Vec<usize> = match rule.index() {
        None => {
            if !mms[agent].is_zero() {
                return Err(Error::contract(format!(
                    "agent {agent} has positive MMS {}",
                    mms[agent]
                )));
            }
            Vec::new()
        }
        Some(k) => {
            let cols = rule_goods(instance, k)?;
            if cols.is_empty() || instance.cols_value(agent, &cols) < alpha * &mms[agent] {
                return Err(Error::contract(format!("{rule} does not apply to agent {agent}")));
            }
            if rule == Rule::R4
                && (rule_target(instance, alpha, 1, mms)?.is_some() || rule_target(instance, alpha, 3, mms)?.is_some())
            {
                return Err(Error::contract("R4 applies only once R1 and R3 are exhausted"));
            }
            cols
        }
    };

    let three_quarters = Value::ratio(3, 4);
    let make_dummy = rule == Rule::R4 && *alpha > three_quarters;
    let survivors: Vec<usize> = (0..n).filter(|&p| p != agent).collect();

    let dummy_values: Option<Vec<Value>> = make_dummy.then(|| {
        survivors
            .iter()
            .map(|&j| (instance.cols_value(j, &removed) - &mms[j]).max(Value::zero()))
            .collect()
    });

    let keep: Vec<usize> = (0..instance.columns()).filter(|c| !removed.contains(c)).collect();
    let goods: Vec<GoodId> = keep
        .iter()
        .filter(|&&c| !instance.is_dummy_column(c))
        .map(|&c| instance.id(c).clone())
        .collect();
    let mut dummies = instance.dummies().to_vec();
    let dummy_id = make_dummy.then(|| fresh_id("d", dummies.len() + 1, |id| instance.contains(id)));
    if let Some(id) = &dummy_id {
        dummies.push(id.clone());
    }
    let rows: Vec<Vec<Value>> = survivors
        .iter()
        .enumerate()
        .map(|(pos, &j)| {
            let mut row: Vec<Value> = keep.iter().map(|&c| instance.value(j, c).clone()).collect();
            if let Some(values) = &dummy_values {
                row.push(values[pos].clone());
            }
            row
        })
        .collect();
    let next = Instance::new(goods, dummies, rows)?;

    let record = ReductionRecord {
        rule,
        agent: labels[agent],
        removed_goods: instance.bundle_of(&removed),
        dummy_created: dummy_id.map(|id| DummyGood {
            id,
            values: survivors
                .iter()
                .zip(dummy_values.unwrap_or_default())
                .map(|(&j, value)| AgentValue {
                    agent: labels[j],
                    value,
                })
                .collect(),
        }),
        pre_mms: (0..n)
            .map(|p| AgentValue {
                agent: labels[p],
                value: mms[p].clone(),
            })
            .collect(),
    };
    Ok((next, record))
}

/// Upper end of the admissible `alpha` range over all agent counts.
fn max_alpha() -> Value {
    Value::ratio(3, 4) + Value::ratio(1, 36)
}

/// Applies reductions until the instance is totally-`alpha`-irreducible or a
/// single agent is left.
///
/// Each round recomputes every MMS exactly, peels an agent with zero MMS if
/// there is one, then probes R1, R2, R3 and finally R4, applying the first hit
/// and restarting. After every step the new MMS values are compared with the
/// previous ones; a survivor whose MMS dropped is reported as an internal
/// invariant failure.
pub fn reduce(oracle: &Oracle, instance: &Instance, alpha: &Value) -> Result<ReductionLog> {
    if !alpha.is_positive() || *alpha > max_alpha() {
        return Err(Error::contract(format!("alpha {alpha} outside (0, 7/9]")));
    }
    if !is_ordered(instance) {
        return Err(Error::contract("reduce needs an ordered instance"));
    }
    let mut labels: Vec<usize> = (0..instance.n()).collect();
    let mut current = instance.clone();
    let mut mms = oracle.instance_values(&current)?;
    let mut records = Vec::new();

    while current.n() > 1 {
        let choice = match mms.iter().position(Value::is_zero) {
            Some(agent) => Some((Rule::ZeroMms, agent)),
            None => probe(&current, alpha, &mms)?,
        };
        let Some((rule, agent)) = choice else { break };
        let (next, record) = apply_reduction_labeled(&current, &labels, alpha, rule, agent, &mms)?;
        let next_mms = oracle.instance_values(&next)?;
        labels.remove(agent);
        for (pos, &label) in labels.iter().enumerate() {
            let before = record.pre_mms_of(label).expect("survivor was present");
            if next_mms[pos] < *before {
                return Err(Error::InternalInvariant {
                    message: format!(
                        "{rule} for agent {} lowered agent {label}'s MMS from {before} to {}",
                        record.agent, next_mms[pos]
                    ),
                    trace: serde_json::to_string(&records).unwrap_or_default(),
                });
            }
        }
        records.push(record);
        current = next;
        mms = next_mms;
    }

    Ok(ReductionLog {
        input_agents: instance.n(),
        records,
        survivors: labels,
        final_instance: current,
    })
}

fn probe(instance: &Instance, alpha: &Value, mms: &[Value]) -> Result<Option<(Rule, usize)>> {
    // R4 is reached only after R1 and R3 reported nothing in this round.
    for k in 1..=4 {
        if let Some(agent) = rule_target(instance, alpha, k, mms)? {
            return Ok(Some((Rule::from_index(k)?, agent)));
        }
    }
    Ok(None)
}

/// Reinstates every reduced agent with the goods they were given. `sub_alloc`
/// must be a complete allocation of the log's final instance.
pub fn lift_reductions(log: &ReductionLog, sub_alloc: &Allocation) -> Result<Allocation> {
    if sub_alloc.n() != log.survivors.len() {
        return Err(Error::contract(format!(
            "sub-allocation has {} agents, the reduced instance {}",
            sub_alloc.n(),
            log.survivors.len()
        )));
    }
    sub_alloc
        .validate_for(&log.final_instance, true)
        .map_err(|e| Error::contract(format!("sub-allocation is not complete: {e}")))?;
    let mut bundles = vec![Bundle::new(); log.input_agents];
    for (pos, &label) in log.survivors.iter().enumerate() {
        bundles[label] = sub_alloc.bundles[pos].clone();
    }
    for record in log.records.iter().rev() {
        bundles[record.agent] = record.removed_goods.clone();
    }
    Ok(Allocation::new(bundles))
}

impl ReductionLog {
    /// Re-applies the records to `start`, returning every intermediate
    /// instance (first is `start`, last equals `final_instance`).
    pub fn replay(&self, start: &Instance) -> Result<Vec<Instance>> {
        let mut labels: Vec<usize> = (0..start.n()).collect();
        let mut out = vec![start.clone()];
        for record in &self.records {
            let current = out.last().expect("non-empty");
            let pos = labels
                .iter()
                .position(|&l| l == record.agent)
                .ok_or_else(|| Error::contract(format!("agent {} already removed", record.agent)))?;
            let removed = current.bundle_columns(&record.removed_goods)?;
            let keep: Vec<usize> = (0..current.columns()).filter(|c| !removed.contains(c)).collect();
            let goods = keep
                .iter()
                .filter(|&&c| !current.is_dummy_column(c))
                .map(|&c| current.id(c).clone())
                .collect();
            let mut dummies = current.dummies().to_vec();
            labels.remove(pos);
            let mut rows: Vec<Vec<Value>> = (0..current.n())
                .filter(|&p| p != pos)
                .map(|p| keep.iter().map(|&c| current.value(p, c).clone()).collect())
                .collect();
            if let Some(dummy) = &record.dummy_created {
                dummies.push(dummy.id.clone());
                for (row, label) in rows.iter_mut().zip(&labels) {
                    let v = dummy
                        .values
                        .iter()
                        .find(|a| a.agent == *label)
                        .ok_or_else(|| Error::contract(format!("dummy has no value for agent {label}")))?;
                    row.push(v.value.clone());
                }
            }
            out.push(Instance::new(goods, dummies, rows)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen_tight_example;
    use crate::oracle::mms_naive;

    fn ints(rows: &[&[i64]]) -> Instance {
        Instance::from_int_rows(rows).unwrap()
    }

    #[test]
    fn rule_bundles_follow_the_table() {
        let inst = ints(&[&[9, 8, 7, 6, 5, 4, 3], &[9, 8, 7, 6, 5, 4, 3]]);
        assert_eq!(rule_goods(&inst, 1).unwrap(), vec![0]);
        assert_eq!(rule_goods(&inst, 2).unwrap(), vec![1, 2]);
        assert_eq!(rule_goods(&inst, 3).unwrap(), vec![2, 3, 4]);
        assert_eq!(rule_goods(&inst, 4).unwrap(), vec![0, 4]);
        let small = ints(&[&[3, 2, 1], &[3, 2, 1]]);
        assert!(rule_goods(&small, 3).unwrap().is_empty());
        assert!(rule_goods(&small, 4).unwrap().is_empty());
        assert!(matches!(rule_goods(&small, 5), Err(Error::Contract(_))));
    }

    #[test]
    fn tight_example_rule_targets() {
        let inst = gen_tight_example(3).unwrap().instance;
        let mms = vec![Value::one(); 3];
        let alpha = Value::ratio(3, 4);
        // u(S_2) = (3n-1)/(4n-2) = 8/10 at n = 3
        assert_eq!(inst.cols_value(0, &rule_goods(&inst, 2).unwrap()), Value::ratio(8, 10));
        assert_eq!(rule_target(&inst, &alpha, 2, &mms).unwrap(), Some(0));
        assert_eq!(inst.cols_value(0, &[0]), Value::ratio(1, 2));
        assert_eq!(rule_target(&inst, &alpha, 1, &mms).unwrap(), None);
    }

    #[test]
    fn empty_rule_bundle_never_applies() {
        let inst = ints(&[&[3, 2, 1], &[3, 2, 1]]);
        let mms = vec![Value::from_int(3); 2];
        assert_eq!(rule_target(&inst, &Value::ratio(3, 4), 3, &mms).unwrap(), None);
        assert!(matches!(
            rule_target(&inst, &Value::ratio(3, 4), 0, &mms),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn r1_on_ten_one_one_one() {
        let inst = ints(&[&[10, 1, 1, 1], &[10, 1, 1, 1]]);
        let mms: Vec<Value> = (0..2).map(|a| mms_naive(inst.row(a), 2).unwrap().value).collect();
        assert_eq!(mms, vec![Value::from_int(3); 2]);
        let alpha = Value::ratio(3, 4);
        assert_eq!(rule_target(&inst, &alpha, 1, &mms).unwrap(), Some(0));
        let (next, record) = apply_reduction(&inst, &alpha, 1, 0, &mms).unwrap();
        assert_eq!(record.rule, Rule::R1);
        assert_eq!(record.removed_goods, ["g1"].into_iter().collect());
        assert_eq!(next.n(), 1);
        assert!(mms_naive(next.row(0), 1).unwrap().value >= Value::from_int(3));

        let log = ReductionLog {
            input_agents: 2,
            records: vec![record],
            survivors: vec![1],
            final_instance: next.clone(),
        };
        let sub = Allocation::new(vec![next.goods().iter().cloned().collect()]);
        let lifted = lift_reductions(&log, &sub).unwrap();
        assert!(lifted.is_complete_for(&inst));
        let v = inst.bundle_value(0, &lifted.bundles[0]).unwrap();
        assert_eq!(v, Value::from_int(10));
        assert!(v >= &alpha * &Value::from_int(3));
    }

    #[test]
    fn r4_creates_dummies_only_above_three_quarters() {
        // n = 2, MMS 10 ({7,3} / {7,3,1}); R1: 7, R3: 3+3+1 = 7, R4: 7+1 = 8
        let inst = ints(&[&[7, 7, 3, 3, 1], &[7, 7, 3, 3, 1]]);
        let mms: Vec<Value> = (0..2).map(|a| mms_naive(inst.row(a), 2).unwrap().value).collect();
        assert_eq!(mms, vec![Value::from_int(10); 2]);
        let classic = Value::ratio(3, 4);
        assert_eq!(rule_target(&inst, &classic, 1, &mms).unwrap(), None);
        assert_eq!(rule_target(&inst, &classic, 3, &mms).unwrap(), None);
        assert_eq!(rule_target(&inst, &classic, 4, &mms).unwrap(), Some(0));
        let (next, rec) = apply_reduction(&inst, &classic, 4, 0, &mms).unwrap();
        assert!(rec.dummy_created.is_none());
        assert!(next.dummies().is_empty());

        let improved = Value::ratio(3, 4) + Value::ratio(1, 36);
        let (next, rec) = apply_reduction(&inst, &improved, 4, 0, &mms).unwrap();
        let dummy = rec.dummy_created.expect("dummy for alpha > 3/4");
        // max(0, 8 - 10) = 0
        assert_eq!(
            dummy.values,
            vec![AgentValue {
                agent: 1,
                value: Value::zero()
            }]
        );
        assert_eq!(next.dummies().len(), 1);
        assert_eq!(next.m(), 3);
    }

    #[test]
    fn r4_dummy_value_is_excess_over_mms() {
        // R1: 77 < 7/9 * 100, R3: 26+26+25 = 77 < 7/9 * 100, R4: 77+25 = 102
        let inst = ints(&[&[77, 50, 26, 26, 25], &[77, 50, 26, 26, 25]]);
        let mms = vec![Value::from_int(100); 2];
        let alpha = Value::ratio(7, 9);
        let (_, rec) = apply_reduction(&inst, &alpha, 4, 0, &mms).unwrap();
        assert_eq!(rec.dummy_created.unwrap().values[0].value, Value::from_int(2));
    }

    #[test]
    fn r4_requires_r1_and_r3_exhausted() {
        let inst = ints(&[&[9, 1, 1, 1, 1], &[9, 1, 1, 1, 1]]);
        let mms = vec![Value::from_int(4); 2];
        assert!(matches!(
            apply_reduction(&inst, &Value::ratio(3, 4), 4, 0, &mms),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn inapplicable_rule_is_a_contract_error() {
        let inst = gen_tight_example(3).unwrap().instance;
        let mms = vec![Value::one(); 3];
        assert!(matches!(
            apply_reduction(&inst, &Value::ratio(3, 4), 1, 0, &mms),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn irreducible_input_yields_empty_log() {
        // MMS 5: S_1 = 1, S_2 = 2, S_3 = 3, S_4 = 2, all below 15/4
        let fine = ints(&[&[1; 10], &[1; 10]]);
        let log = reduce(&Oracle::default(), &fine, &Value::ratio(3, 4)).unwrap();
        assert!(log.records.is_empty());
        assert_eq!(log.final_instance, fine);
        assert_eq!(log.survivors, vec![0, 1]);
        // MMS 4, S_1 = 2 < 3 but S_2 = 4 >= 3
        let coarse = ints(&[&[2, 2, 2, 2], &[2, 2, 2, 2]]);
        let log = reduce(&Oracle::default(), &coarse, &Value::ratio(3, 4)).unwrap();
        assert_eq!(log.records[0].rule, Rule::R2);
    }

    #[test]
    fn tight_example_reduces_with_r2_first() {
        let inst = gen_tight_example(3).unwrap().instance;
        let log = reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)).unwrap();
        let first = &log.records[0];
        assert_eq!((first.rule, first.agent), (Rule::R2, 0));
        assert_eq!(inst.bundle_value(0, &first.removed_goods).unwrap(), Value::ratio(8, 10));
        assert!(log.records.len() < 3);
        let replayed = log.replay(&inst).unwrap();
        assert_eq!(replayed.last().unwrap(), &log.final_instance);
    }

    #[test]
    fn zero_mms_agents_are_peeled() {
        let inst = ints(&[&[5, 0, 0], &[3, 2, 1]]);
        let log = reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)).unwrap();
        assert_eq!(log.records[0].rule, Rule::ZeroMms);
        assert_eq!(log.records[0].agent, 0);
        assert!(log.records[0].removed_goods.is_empty());
        assert_eq!(log.survivors, vec![1]);
    }

    #[test]
    fn unordered_input_is_rejected() {
        let inst = ints(&[&[1, 2], &[2, 1]]);
        assert!(matches!(
            reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn lift_rejects_agent_mismatch() {
        let inst = ints(&[&[1; 10], &[1; 10]]);
        let log = reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)).unwrap();
        assert!(matches!(
            lift_reductions(&log, &Allocation::empty(1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn empty_log_lift_is_identity() {
        let inst = ints(&[&[1; 10], &[1; 10]]);
        let log = reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)).unwrap();
        let goods = inst.goods();
        let sub = Allocation::new(vec![
            goods[..5].iter().cloned().collect(),
            goods[5..].iter().cloned().collect(),
        ]);
        assert_eq!(lift_reductions(&log, &sub).unwrap(), sub);
    }

    #[test]
    fn full_log_leaves_one_agent() {
        let inst = ints(&[&[10, 9, 1], &[10, 9, 1], &[10, 9, 1]]);
        let log = reduce(&Oracle::default(), &inst, &Value::ratio(3, 4)).unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.final_instance.n(), 1);
        let sub = Allocation::new(vec![log.final_instance.goods().iter().cloned().collect()]);
        assert!(lift_reductions(&log, &sub).unwrap().is_complete_for(&inst));
    }
}
