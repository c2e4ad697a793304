//! Deterministic error and erasure injection, and the erasure sidecar.
//!
//! A corruption spec is a comma-separated list of items:
//!
//! * `B:J` symbol `J` of block `B` in stripe 1,
//! * `S:B:J` the same in stripe `S`,
//! * `rand:N` `N` random symbols in every stripe, inside one block drawn
//!   per stripe,
//! * `rand:N@B` `N` random symbols of block `B` in every stripe.
//!
//! Indices are one-based.

use std::collections::{BTreeMap, BTreeSet};

use hecc_core::Elem;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::{Archive, ArchiveHeader};
use crate::engine::ErasureSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorruptError {
    #[error("bad corruption spec `{0}`")]
    BadSpec(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    /// Zero-based stripe, block, symbol.
    At(usize, usize, usize),
    Random {
        count: usize,
        block: Option<usize>,
    },
}

pub fn parse_spec(spec: &str) -> Result<Vec<Item>, CorruptError> {
    let bad = || CorruptError::BadSpec(spec.to_string());
    let one_based = |s: &str| -> Result<usize, CorruptError> {
        match s.trim().parse::<usize>() {
            Ok(x) if x > 0 => Ok(x - 1),
            _ => Err(bad()),
        }
    };
    let mut items = Vec::new();
    for raw in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(rest) = raw.strip_prefix("rand:") {
            let (count, block) = match rest.split_once('@') {
                Some((c, b)) => (c, Some(one_based(b)?)),
                None => (rest, None),
            };
            let count = count.trim().parse().map_err(|_| bad())?;
            items.push(Item::Random { count, block });
            continue;
        }
        let parts: Vec<&str> = raw.split(':').collect();
        let item = match parts.as_slice() {
            [b, j] => Item::At(0, one_based(b)?, one_based(j)?),
            [s, b, j] => Item::At(one_based(s)?, one_based(b)?, one_based(j)?),
            _ => return Err(bad()),
        };
        items.push(item);
    }
    Ok(items)
}

/// Positions chosen for corruption, zero-based `(stripe, block, symbol)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    pub errors: BTreeSet<(usize, usize, usize)>,
    pub erasures: BTreeSet<(usize, usize, usize)>,
}

pub fn plan(
    header: &ArchiveHeader,
    errors: &[Item],
    erasures: &[Item],
    rng: &mut ChaCha8Rng,
) -> Result<Plan, CorruptError> {
    let blocks = &header.config.blocks;
    let stripes = header.stripe_count as usize;
    let mut out = Plan::default();
    for (items, is_err) in [(errors, true), (erasures, false)] {
        for it in items {
            if let &Item::At(s, b, j) = it {
                if s >= stripes || b >= blocks.len() || j >= blocks[b].n() {
                    return Err(CorruptError::OutOfRange(format!(
                        "stripe {} block {} symbol {}",
                        s + 1,
                        b + 1,
                        j + 1
                    )));
                }
                let set = if is_err {
                    &mut out.errors
                } else {
                    &mut out.erasures
                };
                set.insert((s, b, j));
            }
        }
    }
    let randoms: Vec<(usize, Option<usize>, bool)> = errors
        .iter()
        .map(|i| (i, true))
        .chain(erasures.iter().map(|i| (i, false)))
        .filter_map(|(i, e)| match *i {
            Item::Random { count, block } => Some((count, block, e)),
            Item::At(..) => None,
        })
        .collect();
    if let Some(&(_, Some(b), _)) = randoms
        .iter()
        .find(|r| r.1.is_some_and(|b| b >= blocks.len()))
    {
        return Err(CorruptError::OutOfRange(format!("block {}", b + 1)));
    }
    if randoms.is_empty() {
        return Ok(out);
    }
    for s in 0..stripes {
        let target = rng.gen_range(0..blocks.len());
        let mut free: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(count, block, is_err) in &randoms {
            let b = block.unwrap_or(target);
            let pool = free.entry(b).or_insert_with(|| {
                let mut v: Vec<usize> = (0..blocks[b].n())
                    .filter(|&j| {
                        !out.errors.contains(&(s, b, j)) && !out.erasures.contains(&(s, b, j))
                    })
                    .collect();
                v.shuffle(rng);
                v
            });
            if count > pool.len() {
                return Err(CorruptError::OutOfRange(format!(
                    "{count} random positions requested in block {} of length {}",
                    b + 1,
                    blocks[b].n()
                )));
            }
            for j in pool.drain(..count) {
                let set = if is_err {
                    &mut out.errors
                } else {
                    &mut out.erasures
                };
                set.insert((s, b, j));
            }
        }
    }
    Ok(out)
}

/// Checks that every stripe is decodable: all blocks within their local
/// budget `2s + t <= r_i - δ_i`, except at most one within its global budget
/// `2s + t <= r_i + δ - δ_i`.
pub fn check_budget(header: &ArchiveHeader, plan: &Plan) -> Result<(), CorruptError> {
    let blocks = &header.config.blocks;
    let delta = header.config.delta();
    let mut load: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(s, b, _) in &plan.erasures {
        *load.entry((s, b)).or_default() += 1;
    }
    for &(s, b, j) in &plan.errors {
        if !plan.erasures.contains(&(s, b, j)) {
            *load.entry((s, b)).or_default() += 2;
        }
    }
    let mut over: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(s, b), &w) in &load {
        let blk = &blocks[b];
        if w <= blk.r - blk.delta {
            continue;
        }
        if w > blk.r + delta - blk.delta {
            return Err(CorruptError::OutOfRange(format!(
                "stripe {} block {}: 2s + t = {w} exceeds the global budget {}",
                s + 1,
                b + 1,
                blk.r + delta - blk.delta
            )));
        }
        let n = over.entry(s).or_default();
        *n += 1;
        if *n > 1 {
            return Err(CorruptError::OutOfRange(format!(
                "stripe {}: more than one block exceeds its local budget",
                s + 1
            )));
        }
    }
    Ok(())
}

/// Adds a random nonzero offset at each error and zeroes each erasure.
pub fn apply(archive: &mut Archive, plan: &Plan, rng: &mut ChaCha8Rng) {
    let q = 1u32 << archive.header.config.m;
    for &(s, b, j) in &plan.errors {
        let i = archive.index(s, b, j);
        archive.symbols[i] += Elem::from_raw(rng.gen_range(1..q) as u16);
    }
    for &(s, b, j) in &plan.erasures {
        let i = archive.index(s, b, j);
        archive.symbols[i] = Elem::ZERO;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureEntry {
    pub stripe: usize,
    pub block: usize,
    pub symbol: usize,
}

/// Sidecar listing erased symbols, one-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureMap {
    pub erasures: Vec<ErasureEntry>,
}

impl ErasureMap {
    pub fn from_plan(plan: &Plan) -> ErasureMap {
        ErasureMap {
            erasures: plan
                .erasures
                .iter()
                .map(|&(s, b, j)| ErasureEntry {
                    stripe: s + 1,
                    block: b + 1,
                    symbol: j + 1,
                })
                .collect(),
        }
    }

    /// Converts to zero-based positions, checking them against the layout.
    pub fn to_set(&self, header: &ArchiveHeader) -> Result<ErasureSet, CorruptError> {
        let blocks = &header.config.blocks;
        let mut set = ErasureSet::new();
        for e in &self.erasures {
            let ok = (1..=header.stripe_count as usize).contains(&e.stripe)
                && (1..=blocks.len()).contains(&e.block)
                && (1..=blocks[e.block - 1].n()).contains(&e.symbol);
            if !ok {
                return Err(CorruptError::OutOfRange(format!(
                    "erasure at stripe {} block {} symbol {}",
                    e.stripe, e.block, e.symbol
                )));
            }
            set.entry((e.stripe - 1, e.block - 1))
                .or_default()
                .push(e.symbol - 1);
        }
        for v in set.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Ok(set)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hecc_core::HierConfig;

    fn header() -> ArchiveHeader {
        let cfg = HierConfig::with_default_points(4, None, &[(3, 3, 1), (3, 3, 1)]).unwrap();
        ArchiveHeader::for_payload(cfg, 9)
    }

    #[test]
    fn spec_grammar() {
        assert_eq!(parse_spec("1:4").unwrap(), vec![Item::At(0, 0, 3)]);
        assert_eq!(
            parse_spec("2:1:6, rand:3@2,rand:1").unwrap(),
            vec![
                Item::At(1, 0, 5),
                Item::Random {
                    count: 3,
                    block: Some(1)
                },
                Item::Random {
                    count: 1,
                    block: None
                }
            ]
        );
        assert_eq!(parse_spec("").unwrap(), vec![]);
        for bad in ["0:1", "1", "a:b", "1:2:3:4", "rand:x", "rand:1@0"] {
            assert!(parse_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn plan_is_deterministic_and_disjoint() {
        let h = header();
        let errs = parse_spec("rand:2").unwrap();
        let eras = parse_spec("rand:2,1:1").unwrap();
        let a = plan(&h, &errs, &eras, &mut rng(5)).unwrap();
        let b = plan(&h, &errs, &eras, &mut rng(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.errors.is_disjoint(&a.erasures));
        assert_eq!(a.errors.len(), 2 * h.stripe_count as usize);
        assert!(a.erasures.contains(&(0, 0, 0)));
    }

    #[test]
    fn out_of_range() {
        let h = header();
        let none: Vec<Item> = Vec::new();
        assert!(plan(&h, &parse_spec("1:7").unwrap(), &none, &mut rng(1)).is_err());
        assert!(plan(&h, &parse_spec("3:1").unwrap(), &none, &mut rng(1)).is_err());
        assert!(plan(&h, &parse_spec("9:1:1").unwrap(), &none, &mut rng(1)).is_err());
        assert!(plan(&h, &parse_spec("rand:7").unwrap(), &none, &mut rng(1)).is_err());
        assert!(plan(&h, &parse_spec("rand:1@3").unwrap(), &none, &mut rng(1)).is_err());
    }

    #[test]
    fn budget_rules() {
        let h = header();
        let p = |e: &str, x: &str| {
            plan(
                &h,
                &parse_spec(e).unwrap(),
                &parse_spec(x).unwrap(),
                &mut rng(0),
            )
            .unwrap()
        };
        // local budget r - delta = 2, global budget r + delta - delta_i = 4
        assert!(check_budget(&h, &p("1:1", "")).is_ok());
        assert!(check_budget(&h, &p("1:1,1:2", "")).is_ok());
        assert!(check_budget(&h, &p("1:1,1:2", "2:1")).is_ok());
        assert!(check_budget(&h, &p("", "1:1,1:2,1:3,1:4,2:1,2:2")).is_ok());
        assert!(check_budget(&h, &p("1:1,1:2", "1:3")).is_err());
        assert!(check_budget(&h, &p("1:1,1:2", "2:1,2:2,2:3")).is_err());
        assert!(check_budget(&h, &p("1:1,2:1", "1:2,2:2")).is_err());
        // an erased error counts once, as an erasure
        assert!(check_budget(&h, &p("1:1", "1:1,1:2,1:3,1:4")).is_ok());
    }

    #[test]
    fn sidecar_round_trip() {
        let h = header();
        let pl = plan(&h, &[], &parse_spec("1:4,2:2:1").unwrap(), &mut rng(0)).unwrap();
        let map = ErasureMap::from_plan(&pl);
        assert_eq!(
            map.erasures[0],
            ErasureEntry {
                stripe: 1,
                block: 1,
                symbol: 4
            }
        );
        let json = serde_json::to_string(&map).unwrap();
        let back: ErasureMap = serde_json::from_str(&json).unwrap();
        let set = back.to_set(&h).unwrap();
        assert_eq!(set[&(0, 0)], vec![3]);
        assert_eq!(set[&(1, 1)], vec![0]);
        let bad = ErasureMap {
            erasures: vec![ErasureEntry {
                stripe: 1,
                block: 1,
                symbol: 7,
            }],
        };
        assert!(bad.to_set(&h).is_err());
    }
}
