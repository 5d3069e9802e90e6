//! JSON forms of instances and allocations.
//!
//! ```json
//! {"agents": 2, "goods": ["a", "b"], "dummies": [],
//!  "valuations": {"0": {"a": 3, "b": "1/2"}, "1": {"a": "2/3", "b": 0}}}
//! ```
//!
//! Values are read as integers or `"p/q"` strings and always written as
//! `"p/q"`. Allocations are objects from agent index to a list of good ids.

use indexmap::IndexMap;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, GoodId, Instance};
use crate::value::Value;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    agents: usize,
    goods: Vec<GoodId>,
    #[serde(default)]
    dummies: Vec<GoodId>,
    valuations: IndexMap<String, IndexMap<GoodId, Value>>,
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.valuations.len() != doc.agents {
        return Err(Error::validation(
            "valuations",
            format!("{} rows for {} agents", doc.valuations.len(), doc.agents),
        ));
    }
    let columns: Vec<&GoodId> = doc.goods.iter().chain(&doc.dummies).collect();
    let mut rows = Vec::with_capacity(doc.agents);
    for agent in 0..doc.agents {
        let field = format!("valuations[{agent}]");
        let entry = doc
            .valuations
            .get(&agent.to_string())
            .ok_or_else(|| Error::validation(&field, "missing agent"))?;
        let mut row = Vec::with_capacity(columns.len());
        for id in &columns {
            let v = entry
                .get(*id)
                .ok_or_else(|| Error::validation(format!("{field}[{id}]"), "missing value"))?;
            row.push(v.clone());
        }
        if let Some(extra) = entry.keys().find(|k| !columns.contains(k)) {
            return Err(Error::validation(format!("{field}[{extra}]"), "unknown good"));
        }
        rows.push(row);
    }
    Instance::new(doc.goods, doc.dummies, rows)
}

pub fn instance_to_json(instance: &Instance) -> String {
    let doc = InstanceDoc {
        agents: instance.n(),
        goods: instance.goods().to_vec(),
        dummies: instance.dummies().to_vec(),
        valuations: (0..instance.n())
            .map(|a| {
                let row = (0..instance.columns())
                    .map(|c| (instance.id(c).clone(), instance.value(a, c).clone()))
                    .collect();
                (a.to_string(), row)
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}

impl Serialize for Allocation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_map(self.bundles.iter().enumerate().map(|(a, b)| (a.to_string(), b)))
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = IndexMap::<String, Bundle>::deserialize(deserializer)?;
        let mut bundles = vec![None; map.len()];
        for (key, bundle) in map {
            let agent: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("agent key `{key}` is not an index")))?;
            let slot = bundles
                .get_mut(agent)
                .ok_or_else(|| D::Error::custom(format!("agent {agent} out of range")))?;
            *slot = Some(bundle);
        }
        Ok(Allocation::new(
            bundles.into_iter().map(Option::unwrap_or_default).collect(),
        ))
    }
}

pub fn allocation_from_json(text: &str) -> Result<Allocation> {
    Ok(serde_json::from_str(text)?)
}

pub fn allocation_to_json(allocation: &Allocation) -> String {
    serde_json::to_string_pretty(allocation).expect("allocations always serialize")
}
