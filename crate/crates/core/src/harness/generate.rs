use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bundle, Instance};
use crate::value::Value;

/// The identical-valuation instance with `3n - 1` goods on which bag filling
/// after the rule-based reductions reaches exactly `3n / (4n - 2)`.
#[derive(Clone, Debug)]
pub struct TightExample {
    pub instance: Instance,
    /// A partition into `n` cells of value 1 each, proving MMS = 1.
    pub certificate: Vec<Bundle>,
}

/// Value of the initial bags in the tight example: `(3n - 1) / (4n - 2)`.
pub fn tight_tau(n: usize) -> Value {
    let n = n as i64;
    Value::ratio(3 * n - 1, 4 * n - 2)
}

/// The score cap for the tight example: `3n / (4n - 2)`.
pub fn tight_cap(n: usize) -> Value {
    let n = n as i64;
    Value::ratio(3 * n, 4 * n - 2)
}

pub fn gen_tight_example(n: usize) -> Result<TightExample> {
    if n < 2 {
        return Err(Error::contract(format!("tight example needs n >= 2, got {n}")));
    }
    let m = 3 * n - 1;
    let den = 4 * n as i64 - 2;
    let row: Vec<Value> = (1..=m)
        .map(|j| {
            let num = if j <= 2 * n {
                (2 * n - 1 - (j - 1) / 2) as i64
            } else {
                n as i64
            };
            Value::ratio(num, den)
        })
        .collect();
    let instance = Instance::from_rows(vec![row; n])?;

    // 1-based goods: M_1 = {1, 2}, M_{i+1} = {i + 2, 2n + 1 - i, 2n + i}
    let good = |j: usize| instance.id(j - 1).clone();
    let mut certificate = vec![[good(1), good(2)].into_iter().collect::<Bundle>()];
    for i in 1..n {
        certificate.push(
            [good(i + 2), good(2 * n + 1 - i), good(2 * n + i)]
                .into_iter()
                .collect(),
        );
    }
    Ok(TightExample { instance, certificate })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Tight,
    UniformInt,
    UniformRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    /// Ignored for the tight kind, which always has `3n - 1` goods.
    pub m: usize,
    pub value_bound: u64,
    pub seed: u64,
}

/// Deterministic instance for `spec`. Integer values are uniform on
/// `[0, value_bound]`; rational values are `p/q` with `p` uniform on
/// `[0, value_bound]` and `q` on `[1, value_bound]`.
pub fn gen_random(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::validation("n", "at least one agent required"));
    }
    let bound = i64::try_from(spec.value_bound).map_err(|_| Error::validation("bound", "too large"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows = match spec.kind {
        GeneratorKind::Tight => return gen_tight_example(spec.n).map(|t| t.instance),
        GeneratorKind::UniformInt => (0..spec.n)
            .map(|_| (0..spec.m).map(|_| Value::from_int(rng.gen_range(0..=bound))).collect())
            .collect(),
        GeneratorKind::UniformRational => (0..spec.n)
            .map(|_| {
                (0..spec.m)
                    .map(|_| {
                        let p = rng.gen_range(0..=bound);
                        let q = rng.gen_range(1..=bound.max(1));
                        Value::ratio(p, q)
                    })
                    .collect()
            })
            .collect(),
    };
    Instance::from_rows(rows)
}

/// A named instance in a generated suite.
#[derive(Clone, Debug)]
pub struct SuiteEntry {
    pub id: String,
    pub spec: GeneratorSpec,
    pub instance: Instance,
}

/// `count` integer instances with `n` in {2, 3, 4}, `m` in `n..=12` and values
/// up to 100, all derived from `seed`.
pub fn random_suite(count: usize, seed: u64) -> Result<Vec<SuiteEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = rng.gen_range(2..=4usize);
            let spec = GeneratorSpec {
                kind: GeneratorKind::UniformInt,
                n,
                m: rng.gen_range(n..=12),
                value_bound: 100,
                seed: rng.gen(),
            };
            let instance = gen_random(&spec)?;
            Ok(SuiteEntry {
                id: format!("random-{k:05}"),
                spec,
                instance,
            })
        })
        .collect()
}
