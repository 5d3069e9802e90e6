//! Instances, bundles and allocations.
//!
//! Goods are addressed two ways: by their stable [`GoodId`], which survives
//! ordering and reduction, and by *column*, their position inside one
//! particular [`Instance`]. Real goods occupy columns `0..m`, dummy goods the
//! columns `m..m + |D|`. Algorithms work on columns; everything crossing an
//! instance boundary uses ids.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoodId(String);

impl GoodId {
    pub fn new(id: impl Into<String>) -> Self {
        GoodId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GoodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for GoodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for GoodId {
    fn from(s: &str) -> Self {
        GoodId(s.to_string())
    }
}

/// A set of good ids.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(BTreeSet<GoodId>);

impl Bundle {
    pub fn new() -> Self {
        Bundle::default()
    }

    pub fn insert(&mut self, id: GoodId) -> bool {
        self.0.insert(id)
    }

    pub fn contains(&self, id: &GoodId) -> bool {
        self.0.contains(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GoodId> {
        self.0.iter()
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.union(&other.0).cloned().collect())
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<GoodId> for Bundle {
    fn from_iter<T: IntoIterator<Item = GoodId>>(iter: T) -> Self {
        Bundle(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for Bundle {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        Bundle(iter.into_iter().map(GoodId::from).collect())
    }
}

impl IntoIterator for Bundle {
    type Item = GoodId;
    type IntoIter = std::collections::btree_set::IntoIter<GoodId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a Bundle {
    type Item = &'a GoodId;
    type IntoIter = std::collections::btree_set::Iter<'a, GoodId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A fair division instance `(N, M, v, D)` with additive valuations.
///
/// Immutable once built; every transform returns a new instance.
#[derive(Clone, PartialEq, Eq)]
pub struct Instance {
    goods: Vec<GoodId>,
    dummies: Vec<GoodId>,
    /// `values[agent][column]`
    values: Vec<Vec<Value>>,
    index: HashMap<GoodId, usize>,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("goods", &self.goods)
            .field("dummies", &self.dummies)
            .field("values", &self.values)
            .finish()
    }
}

impl Instance {
    /// Builds and validates an instance. `values[i]` lists agent `i`'s values for
    /// `goods` followed by `dummies`.
    pub fn new(goods: Vec<GoodId>, dummies: Vec<GoodId>, values: Vec<Vec<Value>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(goods.len() + dummies.len());
        for (col, id) in goods.iter().chain(dummies.iter()).enumerate() {
            if index.insert(id.clone(), col).is_some() {
                let field = if col < goods.len() { "goods" } else { "dummies" };
                return Err(Error::validation(field, format!("duplicate good id {id}")));
            }
        }
        let inst = Instance {
            goods,
            dummies,
            values,
            index,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Instance with real goods `g1..gm` and no dummies.
    pub fn from_rows(rows: Vec<Vec<Value>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let goods = (1..=m).map(|j| GoodId::new(format!("g{j}"))).collect();
        Instance::new(goods, Vec::new(), rows)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Instance::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Value::from_int(x)).collect())
                .collect(),
        )
    }

    /// Checks every structural invariant: at least one agent, unique ids, a full
    /// rectangular valuation table, non-negative values.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::validation("agents", "instance must have at least one agent"));
        }
        let cols = self.columns();
        if self.index.len() != cols {
            return Err(Error::validation("goods", "duplicate good id"));
        }
        for (agent, row) in self.values.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::validation(
                    format!("valuations[{agent}]"),
                    format!("expected {cols} entries, found {}", row.len()),
                ));
            }
            if let Some(col) = row.iter().position(Value::is_negative) {
                return Err(Error::validation(
                    format!("valuations[{agent}][{}]", self.id(col)),
                    format!("negative value {}", row[col]),
                ));
            }
        }
        Ok(())
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of real goods.
    pub fn m(&self) -> usize {
        self.goods.len()
    }

    /// Real plus dummy goods.
    pub fn columns(&self) -> usize {
        self.goods.len() + self.dummies.len()
    }

    pub fn goods(&self) -> &[GoodId] {
        &self.goods
    }

    pub fn dummies(&self) -> &[GoodId] {
        &self.dummies
    }

    pub fn id(&self, col: usize) -> &GoodId {
        if col < self.goods.len() {
            &self.goods[col]
        } else {
            &self.dummies[col - self.goods.len()]
        }
    }

    pub fn column_of(&self, id: &GoodId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &GoodId) -> bool {
        self.index.contains_key(id)
    }

    pub fn is_dummy_column(&self, col: usize) -> bool {
        col >= self.goods.len()
    }

    /// Agent `agent`'s values over all columns.
    pub fn row(&self, agent: usize) -> &[Value] {
        &self.values[agent]
    }

    /// Agent `agent`'s values over the real goods only.
    pub fn real_row(&self, agent: usize) -> &[Value] {
        &self.values[agent][..self.goods.len()]
    }

    pub fn value(&self, agent: usize, col: usize) -> &Value {
        &self.values[agent][col]
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.values
    }

    /// Sum of an agent's values over a set of columns.
    pub fn cols_value(&self, agent: usize, cols: &[usize]) -> Value {
        cols.iter().map(|&c| &self.values[agent][c]).sum()
    }

    /// `v_i(M ∪ D)`
    pub fn total_value(&self, agent: usize) -> Value {
        self.values[agent].iter().sum()
    }

    pub fn bundle_columns(&self, bundle: &Bundle) -> Result<Vec<usize>> {
        bundle
            .iter()
            .map(|id| {
                self.column_of(id)
                    .ok_or_else(|| Error::InvalidReference(format!("unknown good id {id}")))
            })
            .collect()
    }

    pub fn bundle_of(&self, cols: &[usize]) -> Bundle {
        cols.iter().map(|&c| self.id(c).clone()).collect()
    }

    fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.n() {
            return Err(Error::InvalidReference(format!(
                "agent {agent} out of range (n = {})",
                self.n()
            )));
        }
        Ok(())
    }

    /// Exact `v_i(S)`; the empty bundle is worth zero.
    pub fn bundle_value(&self, agent: usize, bundle: &Bundle) -> Result<Value> {
        self.check_agent(agent)?;
        let cols = self.bundle_columns(bundle)?;
        Ok(self.cols_value(agent, &cols))
    }

    pub(crate) fn into_parts(self) -> (Vec<GoodId>, Vec<GoodId>, Vec<Vec<Value>>) {
        (self.goods, self.dummies, self.values)
    }
}

/// Returns an id with the given prefix that is not taken in `taken`.
pub(crate) fn fresh_id(prefix: &str, counter: usize, taken: impl Fn(&GoodId) -> bool) -> GoodId {
    let mut id = GoodId::new(format!("{prefix}{counter}"));
    while taken(&id) {
        id = GoodId::new(format!("{}'", id.as_str()));
    }
    id
}

/// Per-agent bundles of real goods. Agent `i` holds `bundles[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    pub fn empty(n: usize) -> Self {
        Allocation {
            bundles: vec![Bundle::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    /// Bundles are pairwise disjoint, one per agent, and only hold real goods of
    /// `instance`. With `require_complete` they must also cover every real good.
    pub fn validate_for(&self, instance: &Instance, require_complete: bool) -> Result<()> {
        if self.bundles.len() != instance.n() {
            return Err(Error::validation(
                "allocation",
                format!("{} bundles for {} agents", self.bundles.len(), instance.n()),
            ));
        }
        let mut seen = vec![false; instance.m()];
        for (agent, bundle) in self.bundles.iter().enumerate() {
            for id in bundle {
                let col = instance
                    .column_of(id)
                    .ok_or_else(|| Error::InvalidReference(format!("unknown good id {id}")))?;
                if instance.is_dummy_column(col) {
                    return Err(Error::validation(
                        format!("allocation[{agent}]"),
                        format!("dummy good {id} cannot be allocated"),
                    ));
                }
                if std::mem::replace(&mut seen[col], true) {
                    return Err(Error::validation(
                        format!("allocation[{agent}]"),
                        format!("good {id} allocated twice"),
                    ));
                }
            }
        }
        if require_complete {
            if let Some(col) = seen.iter().position(|s| !s) {
                return Err(Error::validation(
                    "allocation",
                    format!("good {} is not allocated", instance.id(col)),
                ));
            }
        }
        Ok(())
    }

    /// True when the bundles exactly partition the real goods of `instance`.
    pub fn is_complete_for(&self, instance: &Instance) -> bool {
        self.validate_for(instance, true).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Bundle {
        xs.iter().copied().collect()
    }

    #[test]
    fn empty_bundle_is_zero() {
        let inst = Instance::from_int_rows(&[&[7, 5, 4, 3, 2]]).unwrap();
        assert_eq!(inst.bundle_value(0, &Bundle::new()).unwrap(), Value::zero());
    }

    #[test]
    fn bundle_value_sums_exactly() {
        let inst = Instance::from_int_rows(&[&[7, 5, 4, 3, 2]]).unwrap();
        let b = ids(&["g1", "g3", "g5"]);
        let naive: i64 = [7, 4, 2].iter().sum();
        assert_eq!(inst.bundle_value(0, &b).unwrap(), Value::from_int(naive));
        assert_eq!(naive, 13);
    }

    #[test]
    fn bundle_value_rejects_unknown_references() {
        let inst = Instance::from_int_rows(&[&[1, 2]]).unwrap();
        assert!(matches!(
            inst.bundle_value(1, &Bundle::new()),
            Err(Error::InvalidReference(_))
        ));
        assert!(matches!(
            inst.bundle_value(0, &ids(&["g9"])),
            Err(Error::InvalidReference(_))
        ));
    }

    #[test]
    fn well_formed_instance_validates() {
        let inst = Instance::from_int_rows(&[&[1, 2, 3], &[3, 2, 1]]).unwrap();
        assert!(inst.validate().is_ok());
        assert_eq!((inst.n(), inst.m()), (2, 3));
    }

    #[test]
    fn negative_value_is_rejected() {
        let err = Instance::from_int_rows(&[&[1, -1]]).unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "valuations[0][g2]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_rejected() {
        let goods = vec![GoodId::from("a"), GoodId::from("b")];
        let rows = vec![vec![Value::one(), Value::one()], vec![Value::one()]];
        match Instance::new(goods, vec![], rows).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "valuations[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let goods = vec![GoodId::from("a"), GoodId::from("b")];
        let dummies = vec![GoodId::from("a")];
        let rows = vec![vec![Value::one(); 3]];
        match Instance::new(goods, dummies, rows).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "dummies"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn allocation_checks() {
        let goods = vec![GoodId::from("a"), GoodId::from("b")];
        let dummies = vec![GoodId::from("d")];
        let inst = Instance::new(goods, dummies, vec![vec![Value::one(); 3]; 2]).unwrap();
        let ok = Allocation::new(vec![ids(&["a"]), ids(&["b"])]);
        assert!(ok.is_complete_for(&inst));
        let partial = Allocation::new(vec![ids(&["a"]), Bundle::new()]);
        assert!(partial.validate_for(&inst, false).is_ok());
        assert!(!partial.is_complete_for(&inst));
        let twice = Allocation::new(vec![ids(&["a"]), ids(&["a", "b"])]);
        assert!(twice.validate_for(&inst, false).is_err());
        let dummy = Allocation::new(vec![ids(&["a", "d"]), ids(&["b"])]);
        assert!(dummy.validate_for(&inst, false).is_err());
    }
}
