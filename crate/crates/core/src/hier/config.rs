//! Hierarchical code parameters and their `key = value` text form.
//!
//! ```text
//! m = 4
//! prim_poly = 0x13
//! p = 2
//! block.1.k = 3
//! block.1.r = 3
//! block.1.delta = 1
//! block.1.rows = 1 2 3 4
//! block.1.cols = 8 9 10 11
//! ...
//! ```
//!
//! Points are discrete logs of nonzero field elements. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gf::default_prim_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    pub k: usize,
    pub r: usize,
    pub delta: usize,
    /// Discrete logs of the `k + δ_i` row points of `T_i`.
    pub rows: Vec<u32>,
    /// Discrete logs of the `r + δ - δ_i` column points of `T_i`.
    pub cols: Vec<u32>,
}

impl BlockSpec {
    pub fn n(&self) -> usize {
        self.k + self.r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierConfig {
    pub m: u32,
    pub prim_poly: u32,
    pub blocks: Vec<BlockSpec>,
}

impl HierConfig {
    /// Builds a config from `(k_i, r_i, δ_i)` triples with consecutive points
    /// `β^0, β^1, ...` per block, rows first.
    pub fn with_default_points(
        m: u32,
        prim_poly: Option<u32>,
        blocks: &[(usize, usize, usize)],
    ) -> Result<HierConfig, ConfigError> {
        let prim_poly = match prim_poly {
            Some(p) => p,
            None => default_prim_poly(m)
                .ok_or_else(|| ConfigError::Invalid(format!("unsupported field degree {m}")))?,
        };
        let delta: usize = blocks.iter().map(|b| b.2).sum();
        let blocks = blocks
            .iter()
            .map(|&(k, r, d)| {
                let nrows = (k + d) as u32;
                let ncols = (r + delta).saturating_sub(d) as u32;
                BlockSpec {
                    k,
                    r,
                    delta: d,
                    rows: (0..nrows).collect(),
                    cols: (nrows..nrows + ncols).collect(),
                }
            })
            .collect();
        let cfg = HierConfig {
            m,
            prim_poly,
            blocks,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn delta(&self) -> usize {
        self.blocks.iter().map(|b| b.delta).sum()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |s: String| Err(ConfigError::Invalid(s));
        if !(1..=16).contains(&self.m) {
            return invalid(format!("field degree {} outside 1..=16", self.m));
        }
        if self.blocks.is_empty() {
            return invalid("at least one block is required".into());
        }
        let q = 1usize << self.m;
        let delta = self.delta();
        for (i, b) in self.blocks.iter().enumerate() {
            let id = i + 1;
            if !(b.r > b.delta && b.delta > 0) {
                return invalid(format!(
                    "block {id}: need r > delta > 0 (r = {}, delta = {})",
                    b.r, b.delta
                ));
            }
            if b.k == 0 {
                return invalid(format!("block {id}: k must be positive"));
            }
            if b.k <= delta - b.delta {
                return invalid(format!(
                    "block {id}: k = {} must exceed the sibling coupling width {}",
                    b.k,
                    delta - b.delta
                ));
            }
            if q < b.n() + delta {
                return invalid(format!(
                    "block {id}: field order {q} is below n + delta = {}",
                    b.n() + delta
                ));
            }
            if b.rows.len() != b.k + b.delta {
                return invalid(format!(
                    "block {id}: expected {} row points, got {}",
                    b.k + b.delta,
                    b.rows.len()
                ));
            }
            if b.cols.len() != b.r + delta - b.delta {
                return invalid(format!(
                    "block {id}: expected {} column points, got {}",
                    b.r + delta - b.delta,
                    b.cols.len()
                ));
            }
            let mut all: Vec<u32> = b.rows.iter().chain(&b.cols).copied().collect();
            if let Some(&l) = all.iter().find(|&&l| l as usize >= q - 1) {
                return invalid(format!(
                    "block {id}: point log {l} is not below q - 1 = {}",
                    q - 1
                ));
            }
            all.sort_unstable();
            if all.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("block {id}: points are not pairwise distinct"));
            }
        }
        Ok(())
    }

    /// Canonical text form; [`HierConfig::parse`] inverts it exactly.
    pub fn to_text(&self) -> String {
        let join = |v: &[u32]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        writeln!(out, "m = {}", self.m).unwrap();
        writeln!(out, "prim_poly = {:#x}", self.prim_poly).unwrap();
        writeln!(out, "p = {}", self.p()).unwrap();
        for (i, b) in self.blocks.iter().enumerate() {
            let id = i + 1;
            writeln!(out, "block.{id}.k = {}", b.k).unwrap();
            writeln!(out, "block.{id}.r = {}", b.r).unwrap();
            writeln!(out, "block.{id}.delta = {}", b.delta).unwrap();
            writeln!(out, "block.{id}.rows = {}", join(&b.rows)).unwrap();
            writeln!(out, "block.{id}.cols = {}", join(&b.cols)).unwrap();
        }
        out
    }

    /// Parses the text form. Omitted point lists fall back to the defaults
    /// of [`HierConfig::with_default_points`]; `prim_poly` defaults likewise.
    pub fn parse(text: &str) -> Result<HierConfig, ConfigError> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: ln + 1,
                msg: "expected `key = value`".into(),
            })?;
            let key = k.trim().to_string();
            if kv.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ConfigError::Syntax {
                    line: ln + 1,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }

        let take = |kv: &mut BTreeMap<String, String>, key: &str| {
            kv.remove(key)
                .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
        };
        let bad = |key: &str, value: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        let num = |kv: &mut BTreeMap<String, String>, key: &str| -> Result<usize, ConfigError> {
            let v = take(kv, key)?;
            v.parse().map_err(|_| bad(key, &v))
        };

        let m = num(&mut kv, "m")? as u32;
        let prim_poly = match kv.remove("prim_poly") {
            Some(v) => {
                let digits = v.strip_prefix("0x").or_else(|| v.strip_prefix("0X"));
                match digits {
                    Some(h) => u32::from_str_radix(h, 16),
                    None => v.parse(),
                }
                .map_err(|_| bad("prim_poly", &v))?
            }
            None => default_prim_poly(m)
                .ok_or_else(|| ConfigError::Invalid(format!("unsupported field degree {m}")))?,
        };
        let p = num(&mut kv, "p")?;

        let mut triples = Vec::with_capacity(p);
        for id in 1..=p {
            triples.push((
                num(&mut kv, &format!("block.{id}.k"))?,
                num(&mut kv, &format!("block.{id}.r"))?,
                num(&mut kv, &format!("block.{id}.delta"))?,
            ));
        }
        let delta: usize = triples.iter().map(|t| t.2).sum();
        let mut blocks = Vec::with_capacity(p);
        for (i, &(k, r, d)) in triples.iter().enumerate() {
            let id = i + 1;
            let nrows = (k + d) as u32;
            let ncols = (r + delta).saturating_sub(d) as u32;
            let mut list = |name: &str, default: Vec<u32>| -> Result<Vec<u32>, ConfigError> {
                let key = format!("block.{id}.{name}");
                match kv.remove(&key) {
                    Some(v) => v
                        .split_whitespace()
                        .map(|x| x.parse().map_err(|_| bad(&key, &v)))
                        .collect(),
                    None => Ok(default),
                }
            };
            let rows = list("rows", (0..nrows).collect())?;
            let cols = list("cols", (nrows..nrows + ncols).collect())?;
            blocks.push(BlockSpec {
                k,
                r,
                delta: d,
                rows,
                cols,
            });
        }
        if let Some(key) = kv.into_keys().next() {
            return Err(ConfigError::UnknownKey(key));
        }
        let cfg = HierConfig {
            m,
            prim_poly,
            blocks,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
