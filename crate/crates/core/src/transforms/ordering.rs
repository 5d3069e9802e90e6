//! Ordered instances and the picking-sequence lift back to the original goods.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{fresh_id, Allocation, Bundle, GoodId, Instance};

/// Links the goods of an ordered instance (one per rank) to each agent's
/// original goods. Dummy goods are not part of the map; they pass through
/// `to_ordered` untouched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingMap {
    /// Id of the ordered instance's real good at each rank.
    pub rank_ids: Vec<GoodId>,
    /// `perm[agent][rank]` is the original real-good column holding that
    /// agent's `rank`-th largest value.
    pub perm: Vec<Vec<usize>>,
}

impl OrderingMap {
    pub fn len(&self) -> usize {
        self.rank_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_ids.is_empty()
    }
}

/// True when every agent's real-good values are non-increasing by column.
pub fn is_ordered(instance: &Instance) -> bool {
    (0..instance.n()).all(|a| instance.real_row(a).windows(2).all(|w| w[0] >= w[1]))
}

/// Sorts every agent's real-good values in non-increasing order (ties by
/// original column), naming rank `j` as good `r{j}`.
pub fn to_ordered(instance: &Instance) -> Result<(Instance, OrderingMap)> {
    instance.validate()?;
    let m = instance.m();
    let rank_ids: Vec<GoodId> = (1..=m)
        .map(|j| fresh_id("r", j, |id| instance.dummies().contains(id)))
        .collect();

    let mut perm = Vec::with_capacity(instance.n());
    let mut rows = Vec::with_capacity(instance.n());
    for agent in 0..instance.n() {
        let real = instance.real_row(agent);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| real[b].cmp(&real[a]).then(a.cmp(&b)));
        let mut row: Vec<_> = order.iter().map(|&c| real[c].clone()).collect();
        row.extend_from_slice(&instance.row(agent)[m..]);
        rows.push(row);
        perm.push(order);
    }
    let ordered = Instance::new(rank_ids.clone(), instance.dummies().to_vec(), rows)?;
    Ok((ordered, OrderingMap { rank_ids, perm }))
}

/// Turns a complete allocation of the ordered instance into one of `original`.
///
/// Ranks are visited in increasing order; the owner of rank `t` picks their
/// most valuable original good still available. At that point at most `t - 1`
/// goods are gone, so the pick is worth at least the owner's `t`-th largest
/// value, and every agent ends with at least their ordered bundle value.
pub fn lift_ordered(map: &OrderingMap, original: &Instance, ordered_alloc: &Allocation) -> Result<Allocation> {
    let m = map.len();
    if original.m() != m || map.perm.len() != original.n() {
        return Err(Error::contract("ordering map does not belong to this instance"));
    }
    if ordered_alloc.n() != original.n() {
        return Err(Error::contract(format!(
            "ordered allocation has {} bundles for {} agents",
            ordered_alloc.n(),
            original.n()
        )));
    }
    let rank_of: HashMap<&GoodId, usize> = map.rank_ids.iter().enumerate().map(|(r, id)| (id, r)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (agent, bundle) in ordered_alloc.bundles.iter().enumerate() {
        for id in bundle {
            let rank = *rank_of
                .get(id)
                .ok_or_else(|| Error::contract(format!("{id} is not a rank of the ordered instance")))?;
            if owner[rank].replace(agent).is_some() {
                return Err(Error::contract(format!("rank good {id} allocated twice")));
            }
        }
    }
    if let Some(rank) = owner.iter().position(Option::is_none) {
        return Err(Error::contract(format!(
            "ordered allocation is incomplete: {} unallocated",
            map.rank_ids[rank]
        )));
    }

    let mut taken = vec![false; m];
    let mut cursor = vec![0usize; original.n()];
    let mut bundles = vec![Bundle::new(); original.n()];
    for agent in owner.into_iter().flatten() {
        let prefs = &map.perm[agent];
        while taken[prefs[cursor[agent]]] {
            cursor[agent] += 1;
        }
        let col = prefs[cursor[agent]];
        taken[col] = true;
        bundles[agent].insert(original.id(col).clone());
    }
    Ok(Allocation::new(bundles))
}
