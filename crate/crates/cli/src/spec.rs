//! Sweep descriptions.
//!
//! A spec is either `key = value` lines (`#` starts a comment) or a flat
//! JSON object with the same keys. Lists are comma-separated or JSON arrays.
//!
//! | key         | meaning                                              |
//! |-------------|------------------------------------------------------|
//! | scheme      | mc, pea, bpea, abpea, mlae or qcoin                  |
//! | ladder      | values of T (QFT schemes), nshot (mc) or t (mlae, qcoin) |
//! | n_truths    | ground truths per ladder entry (default 10000)       |
//! | seed        | overrides the global seed                            |
//! | thresholds  | pba thresholds (default 0.1, 0.01, 0.001)            |
//! | error_space | fraction (default) or phase                          |
//! | T, t, nshot, alpha, nmin, nmax, mass | fixed scheme parameters     |

use std::collections::BTreeMap;
use std::str::FromStr;

use qss_core::harness::{ErrorSpace, DEFAULT_N_TRUTHS, DEFAULT_THRESHOLDS};
use qss_core::SchemeConfig;
use serde_json::Value;

use crate::args::{SchemeFlags, SchemeName, SweepArgs};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub scheme: SchemeName,
    pub ladder: Vec<u64>,
    pub flags: SchemeFlags,
    pub n_truths: usize,
    pub seed: Option<u64>,
    pub thresholds: Vec<f64>,
    pub error_space: ErrorSpace,
}

impl SweepPlan {
    pub fn from_args(a: &SweepArgs) -> Result<Self, CliError> {
        let scheme = a.scheme.ok_or_else(|| {
            CliError::Usage("sweep needs --spec or --scheme with --ladder".into())
        })?;
        Ok(Self {
            scheme,
            ladder: a.ladder.clone(),
            flags: a.flags.clone(),
            n_truths: a.n_truths.unwrap_or(DEFAULT_N_TRUTHS),
            seed: None,
            thresholds: a
                .thresholds
                .clone()
                .unwrap_or_else(|| DEFAULT_THRESHOLDS.to_vec()),
            error_space: if a.phase_errors {
                ErrorSpace::Phase
            } else {
                ErrorSpace::Fraction
            },
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let map = if text.trim_start().starts_with('{') {
            json_pairs(text)?
        } else {
            kv_pairs(text)?
        };
        Self::from_map(map)
    }

    fn from_map(mut map: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut take = |k: &str| map.remove(k);
        let scheme_text = take("scheme").ok_or_else(|| bad("missing key `scheme`"))?;
        let scheme = SchemeName::parse(&scheme_text)
            .ok_or_else(|| bad(format!("unknown scheme `{scheme_text}`")))?;
        let ladder = list(
            &take("ladder").ok_or_else(|| bad("missing key `ladder`"))?,
            "ladder",
        )?;
        let flags = SchemeFlags {
            big_t: opt(take("T"), "T")?,
            stages: opt(take("t"), "t")?,
            nshot: opt(take("nshot"), "nshot")?,
            alpha: opt(take("alpha"), "alpha")?,
            nmin: opt(take("nmin"), "nmin")?,
            nmax: opt(take("nmax"), "nmax")?,
            mass: opt(take("mass"), "mass")?,
        };
        let n_truths = opt(take("n_truths"), "n_truths")?.unwrap_or(DEFAULT_N_TRUTHS);
        let seed = opt(take("seed"), "seed")?;
        let thresholds = match take("thresholds") {
            Some(t) => list(&t, "thresholds")?,
            None => DEFAULT_THRESHOLDS.to_vec(),
        };
        let error_space = match take("error_space").as_deref() {
            None | Some("fraction") => ErrorSpace::Fraction,
            Some("phase") => ErrorSpace::Phase,
            Some(other) => return Err(bad(format!("error_space `{other}` is not fraction|phase"))),
        };
        if let Some(k) = map.keys().next() {
            return Err(bad(format!("unknown key `{k}`")));
        }
        Ok(Self {
            scheme,
            ladder,
            flags,
            n_truths,
            seed,
            thresholds,
            error_space,
        })
    }

    /// One configuration per ladder value.
    pub fn configs(&self) -> Result<Vec<SchemeConfig>, CliError> {
        if self.ladder.is_empty() {
            return Err(CliError::Usage("ladder is empty".into()));
        }
        self.ladder
            .iter()
            .map(|&v| {
                let mut f = self.flags.clone();
                match self.scheme {
                    SchemeName::Mc => f.nshot = Some(v),
                    SchemeName::Pea | SchemeName::Bpea | SchemeName::Abpea => f.big_t = Some(v),
                    SchemeName::Mlae | SchemeName::Qcoin => {
                        f.stages = Some(
                            u32::try_from(v)
                                .map_err(|_| bad(format!("stage count {v} too large")))?,
                        )
                    }
                }
                f.build(self.scheme)
            })
            .collect()
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("malformed sweep spec: {}", msg.into()))
}

fn opt<T: FromStr>(v: Option<String>, key: &str) -> Result<Option<T>, CliError> {
    v.map(|s| {
        s.parse()
            .map_err(|_| bad(format!("`{key}` has invalid value `{s}`")))
    })
    .transpose()
}

fn list<T: FromStr>(s: &str, key: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| bad(format!("`{key}` has invalid entry `{x}`")))
        })
        .collect()
}

fn insert(map: &mut BTreeMap<String, String>, k: String, v: String) -> Result<(), CliError> {
    if map.contains_key(&k) {
        return Err(bad(format!("duplicate key `{k}`")));
    }
    map.insert(k, v);
    Ok(())
}

fn kv_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {} has no `=`", n + 1)))?;
        insert(&mut map, k.trim().to_string(), v.trim().to_string())?;
    }
    Ok(map)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn json_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(bad("top level must be an object"));
    };
    let mut map = BTreeMap::new();
    for (k, v) in obj {
        let s = match &v {
            Value::Array(items) => items
                .iter()
                .map(scalar)
                .collect::<Option<Vec<_>>>()
                .map(|xs| xs.join(",")),
            other => scalar(other),
        }
        .ok_or_else(|| bad(format!("`{k}` must be a scalar or a list of scalars")))?;
        insert(&mut map, k, s)?;
    }
    Ok(map)
}
