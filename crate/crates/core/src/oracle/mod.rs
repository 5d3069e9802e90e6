//! Exact maximin-share values and partitions.
//!
//! `MMS^k_u(S)` is the largest minimum cell value over all partitions of `S`
//! into `k` cells. Computing it is NP-hard, so the [`Oracle`] runs an exact
//! search behind an explicit size limit and reports [`Error::Capacity`] instead
//! of approximating. [`mms_naive`] enumerates every assignment and serves as
//! the independent check in tests.

mod search;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};
use crate::value::Value;

/// Size limit for the exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capacity {
    pub max_goods: usize,
    pub max_parts: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity {
            max_goods: 20,
            max_parts: 8,
        }
    }
}

/// A max-min partition of a value slice. Cells hold positions into the slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub value: Value,
    pub cells: Vec<Vec<usize>>,
}

impl Partition {
    fn from_assignment(value: Value, assign: &[usize], parts: usize) -> Self {
        let mut cells = vec![Vec::new(); parts];
        for (g, &c) in assign.iter().enumerate() {
            cells[c].push(g);
        }
        Partition { value, cells }
    }

    /// Smallest cell value under `values`.
    pub fn min_cell(&self, values: &[Value]) -> Value {
        self.cells
            .iter()
            .map(|cell| cell.iter().map(|&g| &values[g]).sum::<Value>())
            .min()
            .unwrap_or_else(Value::zero)
    }
}

/// MMS value together with a witnessing partition of the good set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsResult {
    pub value: Value,
    pub partition: Vec<Bundle>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Oracle {
    pub capacity: Capacity,
}

impl Oracle {
    pub fn new(capacity: Capacity) -> Self {
        Oracle { capacity }
    }

    pub fn with_limits(max_goods: usize, max_parts: usize) -> Self {
        Oracle::new(Capacity { max_goods, max_parts })
    }

    fn check(&self, goods: usize, parts: usize) -> Result<()> {
        if parts == 0 {
            return Err(Error::contract("MMS needs at least one part"));
        }
        if goods > self.capacity.max_goods || parts > self.capacity.max_parts {
            return Err(Error::Capacity {
                goods,
                parts,
                max_goods: self.capacity.max_goods,
                max_parts: self.capacity.max_parts,
            });
        }
        Ok(())
    }

    /// Exact `MMS^parts` of a list of non-negative values.
    pub fn partition(&self, values: &[Value], parts: usize) -> Result<Partition> {
        self.check(values.len(), parts)?;
        if values.iter().any(Value::is_negative) {
            return Err(Error::contract("MMS values must be non-negative"));
        }
        Ok(exact_partition(values, parts))
    }

    /// `MMS^parts_{v_agent}(good_set)` with the witnessing partition as bundles.
    pub fn mms(&self, instance: &Instance, agent: usize, parts: usize, good_set: &Bundle) -> Result<MmsResult> {
        if agent >= instance.n() {
            return Err(Error::InvalidReference(format!("agent {agent} out of range")));
        }
        let cols = instance.bundle_columns(good_set)?;
        let values: Vec<Value> = cols.iter().map(|&c| instance.value(agent, c).clone()).collect();
        let p = self.partition(&values, parts)?;
        Ok(MmsResult {
            value: p.value,
            partition: p
                .cells
                .iter()
                .map(|cell| cell.iter().map(|&g| instance.id(cols[g]).clone()).collect())
                .collect(),
        })
    }

    /// Every agent's `MMS^n` over all columns (real and dummy goods), as column
    /// partitions. Agents with identical rows share one search.
    pub fn instance_partitions(&self, instance: &Instance) -> Result<Vec<Partition>> {
        self.instance_partitions_with_parts(instance, instance.n())
    }

    pub fn instance_partitions_with_parts(&self, instance: &Instance, parts: usize) -> Result<Vec<Partition>> {
        let mut cache: HashMap<&[Value], Partition> = HashMap::new();
        let mut out = Vec::with_capacity(instance.n());
        for agent in 0..instance.n() {
            let row = instance.row(agent);
            let p = match cache.get(row) {
                Some(p) => p.clone(),
                None => {
                    let p = self.partition(row, parts)?;
                    cache.insert(row, p.clone());
                    p
                }
            };
            out.push(p);
        }
        Ok(out)
    }

    /// Every agent's MMS value over real and dummy goods.
    pub fn instance_values(&self, instance: &Instance) -> Result<Vec<Value>> {
        Ok(self
            .instance_partitions(instance)?
            .into_iter()
            .map(|p| p.value)
            .collect())
    }
}

fn lcm_of_denominators(values: &[Value]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn exact_partition(values: &[Value], parts: usize) -> Partition {
    let scale = lcm_of_denominators(values);
    let ints: Vec<BigInt> = values.iter().map(|v| v.numer() * (&scale / v.denom())).collect();
    let total: BigInt = ints.iter().sum();
    let (best, assign) = if total.bits() < 127 {
        let small: Vec<u128> = ints
            .iter()
            .map(|x| x.to_u128().expect("fits: total is below 2^127"))
            .collect();
        let (best, assign) = search::max_min_partition(&small, parts);
        (BigInt::from(best), assign)
    } else {
        search::max_min_partition(&ints, parts)
    };
    Partition::from_assignment(Value::from_big(best, scale), &assign, parts)
}

/// Reference MMS by enumerating all `parts^|values|` assignments, no pruning.
/// Limited to 10 goods and 4 parts.
pub fn mms_naive(values: &[Value], parts: usize) -> Result<Partition> {
    if parts == 0 {
        return Err(Error::contract("MMS needs at least one part"));
    }
    if values.len() > 10 || parts > 4 {
        return Err(Error::Capacity {
            goods: values.len(),
            parts,
            max_goods: 10,
            max_parts: 4,
        });
    }
    let m = values.len();
    let mut assign = vec![0usize; m];
    let mut best: Option<(Value, Vec<usize>)> = None;
    loop {
        let mut sums = vec![Value::zero(); parts];
        for (g, &c) in assign.iter().enumerate() {
            sums[c] += &values[g];
        }
        let low = sums.into_iter().min().expect("parts >= 1");
        if best.as_ref().is_none_or(|(b, _)| low > *b) {
            best = Some((low, assign.clone()));
        }
        // odometer step
        let mut i = 0;
        while i < m {
            assign[i] += 1;
            if assign[i] < parts {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    let (value, assign) = best.expect("at least one assignment");
    Ok(Partition::from_assignment(value, &assign, parts))
}

/// Verifies a claimed MMS partition without search: a partition whose smallest
/// cell equals `total / parts` is optimal, because no cell minimum can exceed
/// the average. Not subject to the oracle's capacity.
pub fn certified_partition(values: &[Value], parts: usize, cells: &[Vec<usize>]) -> Result<Partition> {
    if cells.len() != parts || parts == 0 {
        return Err(Error::contract(format!(
            "certificate has {} cells, expected {parts}",
            cells.len()
        )));
    }
    let mut seen = vec![false; values.len()];
    for &g in cells.iter().flatten() {
        if g >= values.len() || std::mem::replace(&mut seen[g], true) {
            return Err(Error::contract("certificate cells must partition the good set"));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::contract("certificate cells must cover the good set"));
    }
    let p = Partition {
        value: Value::zero(),
        cells: cells.to_vec(),
    };
    let low = p.min_cell(values);
    let average = values.iter().sum::<Value>() / Value::from_int(parts as i64);
    if low != average {
        return Err(Error::contract(format!(
            "certificate minimum {low} does not reach the average {average}; optimality unproven"
        )));
    }
    Ok(Partition { value: low, ..p })
}

/// `min_i v_i(A_i) / MMS_i` over agents with positive MMS (over real and dummy
/// goods). `None` when every agent's MMS is zero, in which case every
/// allocation is `alpha`-MMS for all `alpha`.
pub fn mms_score(oracle: &Oracle, instance: &Instance, allocation: &Allocation) -> Result<Option<Value>> {
    allocation.validate_for(instance, true)?;
    let mms = oracle.instance_values(instance)?;
    score_against(instance, allocation, &mms)
}

/// [`mms_score`] with externally supplied MMS values.
pub fn score_against(instance: &Instance, allocation: &Allocation, mms: &[Value]) -> Result<Option<Value>> {
    let mut score: Option<Value> = None;
    for (agent, bundle) in allocation.bundles.iter().enumerate() {
        let m = &mms[agent];
        if m.is_zero() {
            continue;
        }
        let ratio = instance.bundle_value(agent, bundle)? / m;
        score = Some(match score {
            Some(s) => s.min(ratio),
            None => ratio,
        });
    }
    Ok(score)
}
