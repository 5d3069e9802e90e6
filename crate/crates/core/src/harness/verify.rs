use serde::Serialize;

use crate::error::Result;
use crate::model::{Allocation, Bundle, Instance};
use crate::oracle::{certified_partition, Oracle};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgentVerdict {
    pub agent: usize,
    pub mms: Value,
    pub bundle_value: Value,
    pub ratio: Option<Value>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub alpha: Value,
    pub agents: Vec<AgentVerdict>,
    /// Smallest ratio over agents with positive MMS.
    pub score: Option<Value>,
    pub pass: bool,
}

/// Checks that `allocation` gives every agent at least `alpha` times their MMS.
///
/// MMS values come from the oracle. A `certificate` (one partition shared by
/// all agents, every cell worth `total / n`) is tried first and replaces the
/// search for any agent it certifies, which is how instances beyond the
/// oracle's capacity are verified.
pub fn verify(
    oracle: &Oracle,
    instance: &Instance,
    allocation: &Allocation,
    alpha: &Value,
    certificate: Option<&[Bundle]>,
) -> Result<VerdictReport> {
    allocation.validate_for(instance, true)?;
    let cells = match certificate {
        Some(c) => Some(
            c.iter()
                .map(|b| instance.bundle_columns(b))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    let mut agents = Vec::with_capacity(instance.n());
    for (agent, bundle) in allocation.bundles.iter().enumerate() {
        let row = instance.row(agent);
        let certified = cells
            .as_ref()
            .and_then(|cells| certified_partition(row, instance.n(), cells).ok());
        let mms = match certified {
            Some(p) => p.value,
            None => oracle.partition(row, instance.n())?.value,
        };
        let bundle_value = instance.bundle_value(agent, bundle)?;
        let ratio = (!mms.is_zero()).then(|| &bundle_value / &mms);
        let pass = bundle_value >= alpha * &mms;
        agents.push(AgentVerdict {
            agent,
            mms,
            bundle_value,
            ratio,
            pass,
        });
    }
    let score = agents.iter().filter_map(|a| a.ratio.clone()).min();
    let pass = agents.iter().all(|a| a.pass);
    Ok(VerdictReport {
        alpha: alpha.clone(),
        agents,
        score,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bagfill::{bag_fill, complete_allocation};
    use crate::error::Error;
    use crate::harness::gen_tight_example;

    #[test]
    fn tight_bags_score_tau() {
        let t = gen_tight_example(3).unwrap();
        let partial = bag_fill(&t.instance, &Value::ratio(8, 10)).unwrap().allocation.unwrap();
        let alloc = complete_allocation(&t.instance, &partial).unwrap();
        let oracle = Oracle::default();
        let r = verify(&oracle, &t.instance, &alloc, &Value::ratio(3, 4), Some(&t.certificate)).unwrap();
        assert!(r.pass);
        assert_eq!(r.score, Some(Value::ratio(8, 10)));
        let r2 = verify(&oracle, &t.instance, &alloc, &Value::ratio(3, 4), None).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn everything_to_one_agent_fails() {
        let inst = Instance::from_int_rows(&[&[1, 2, 3], &[3, 2, 1]]).unwrap();
        let alloc = Allocation::new(vec![["g1", "g2", "g3"].into_iter().collect(), Bundle::new()]);
        let r = verify(&Oracle::default(), &inst, &alloc, &Value::ratio(3, 4), None).unwrap();
        assert!(!r.pass);
        assert!(r.agents[0].pass);
        assert!(!r.agents[1].pass);
        assert_eq!(r.score, Some(Value::zero()));
    }

    #[test]
    fn certificate_beats_capacity() {
        let t = gen_tight_example(8).unwrap();
        let oracle = Oracle::with_limits(10, 8);
        let alloc = Allocation::new(t.certificate.clone());
        let r = verify(&oracle, &t.instance, &alloc, &Value::one(), Some(&t.certificate)).unwrap();
        assert!(r.pass);
        assert!(matches!(
            verify(&oracle, &t.instance, &alloc, &Value::one(), None),
            Err(Error::Capacity { .. })
        ));
    }
}
