//! Executable versions of the structural guarantees on reduced and normalized
//! instances. Each check returns the list of violations it found; an empty
//! list means the property holds.

use std::fmt;

use serde::Serialize;

use super::ordering::is_ordered;
use super::reduce::rule_goods;
use crate::error::Result;
use crate::model::Instance;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Property {
    Ordered,
    /// `v_i(S_k) < alpha * MMS_i` for every agent and rule.
    Irreducible,
    /// In an `R_k`-irreducible instance, every good ranked after `(k-1)n` is
    /// worth less than `alpha * MMS_i / k`.
    RankUpperBound,
    /// An `R_1`-irreducible instance has at least `2n` real goods.
    EnoughGoods,
    /// Ordered and normalized: `v_k + v_{2n-k+1} > 1` forces
    /// `v_{2n-k+1} <= 1/3` and `v_k > 2/3`.
    PairBound,
    /// After normalizing, every dummy is worth less than `4 delta / 3`.
    DummyBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: Property,
    pub agent: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (agent {}): {}", self.property, self.agent, self.detail)
    }
}

/// Not reducible by any of R1-R4 at `alpha`.
pub fn is_totally_irreducible(instance: &Instance, alpha: &Value, mms: &[Value]) -> Result<bool> {
    Ok(irreducibility_violations(instance, alpha, mms)?.is_empty())
}

fn irreducibility_violations(instance: &Instance, alpha: &Value, mms: &[Value]) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for k in 1..=4 {
        let cols = rule_goods(instance, k)?;
        for (agent, m) in mms.iter().enumerate() {
            let v = instance.cols_value(agent, &cols);
            let threshold = alpha * m;
            if v >= threshold {
                out.push(Violation {
                    property: Property::Irreducible,
                    agent,
                    detail: format!("v(S_{k}) = {v} >= {threshold}"),
                });
            }
        }
    }
    Ok(out)
}

/// Properties of a totally-`alpha`-irreducible ordered instance with MMS values
/// `mms`: irreducibility itself, the per-rank upper bounds and `m >= 2n`.
pub fn check_irreducible(instance: &Instance, alpha: &Value, mms: &[Value]) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    if !is_ordered(instance) {
        out.push(Violation {
            property: Property::Ordered,
            agent: 0,
            detail: "real goods are not in non-increasing order".into(),
        });
        return Ok(out);
    }
    out.extend(irreducibility_violations(instance, alpha, mms)?);

    let n = instance.n();
    for (agent, m) in mms.iter().enumerate() {
        let row = instance.real_row(agent);
        for k in 1..=3usize {
            let bound = alpha * m / Value::from_int(k as i64);
            for (j, v) in row.iter().enumerate().skip((k - 1) * n) {
                if *v >= bound {
                    out.push(Violation {
                        property: Property::RankUpperBound,
                        agent,
                        detail: format!("rank {} value {v} >= alpha*MMS/{k} = {bound}", j + 1),
                    });
                }
            }
        }
    }

    if instance.m() < 2 * n {
        out.push(Violation {
            property: Property::EnoughGoods,
            agent: 0,
            detail: format!("m = {} < 2n = {}", instance.m(), 2 * n),
        });
    }
    Ok(out)
}

/// Properties of an ordered, normalized instance: the pair bound on the
/// initial bag goods, and `v(dummy) < 4 delta / 3` for `delta = alpha - 3/4`.
pub fn check_normalized(instance: &Instance, alpha: &Value) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.n();
    let one = Value::one();
    let third = Value::ratio(1, 3);
    let two_thirds = Value::ratio(2, 3);
    if instance.m() >= 2 * n {
        for agent in 0..n {
            let row = instance.real_row(agent);
            for k in 1..=n {
                let (hi, lo) = (&row[k - 1], &row[2 * n - k]);
                if hi + lo > one && !(*lo <= third && *hi > two_thirds) {
                    out.push(Violation {
                        property: Property::PairBound,
                        agent,
                        detail: format!("v_{k} = {hi}, v_{} = {lo}", 2 * n - k + 1),
                    });
                }
            }
        }
    }

    let delta = alpha - Value::ratio(3, 4);
    let bound = delta.scale(4) / Value::from_int(3);
    for agent in 0..n {
        for (d, v) in instance.row(agent)[instance.m()..].iter().enumerate() {
            if *v >= bound {
                out.push(Violation {
                    property: Property::DummyBound,
                    agent,
                    detail: format!("dummy {} worth {v} >= 4*delta/3 = {bound}", instance.dummies()[d]),
                });
            }
        }
    }
    out
}
