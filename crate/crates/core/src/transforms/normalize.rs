use crate::error::{Error, Result};
use crate::model::Instance;
use crate::oracle::Oracle;
use crate::value::Value;

/// Rescales every agent so that each cell of their MMS partition (over real and
/// dummy goods) is worth exactly 1. Afterwards every MMS is 1 and every agent's
/// total is `n`.
pub fn normalize(oracle: &Oracle, instance: &Instance) -> Result<Instance> {
    let partitions = oracle.instance_partitions(instance)?;
    let mut rows = Vec::with_capacity(instance.n());
    for (agent, partition) in partitions.iter().enumerate() {
        let row = instance.row(agent);
        let mut scaled = vec![Value::zero(); row.len()];
        for cell in &partition.cells {
            let cell_value: Value = cell.iter().map(|&c| &row[c]).sum();
            if !cell_value.is_positive() {
                return Err(Error::contract(format!(
                    "agent {agent} has a zero-value MMS cell; normalize needs positive MMS"
                )));
            }
            for &c in cell {
                scaled[c] = &row[c] / &cell_value;
            }
        }
        rows.push(scaled);
    }
    let (goods, dummies, _) = instance.clone().into_parts();
    Instance::new(goods, dummies, rows)
}

/// Every agent's MMS is exactly 1 and their total value is exactly `n`, which
/// together mean each MMS partition has all cells worth 1.
pub fn is_normalized(oracle: &Oracle, instance: &Instance) -> Result<bool> {
    let n = Value::from_int(instance.n() as i64);
    let mms = oracle.instance_values(instance)?;
    Ok((0..instance.n()).all(|a| mms[a] == Value::one() && instance.total_value(a) == n))
}
