//! Stripe-level encoding and decoding of whole payloads.

use std::collections::BTreeMap;

use hecc_core::hier::{BlockStatus, GlobalOptions};
use hecc_core::{BlockOutcome, Elem, HierCode, HierConfig, HierError, StripeDecoded, Symbol};
use rayon::prelude::*;
use serde::Serialize;

use crate::archive::{Archive, ArchiveHeader};
use crate::symbols;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Local decoding, with a global fallback for one block per stripe.
    Auto,
    /// Local decoding only.
    Local,
    /// Global decoding of the one damaged block per stripe.
    Global,
}

/// Erased positions as `(stripe, block, symbol)`, all zero-based.
pub type ErasureSet = BTreeMap<(usize, usize), Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    /// One-based stripe index.
    pub stripe: usize,
    /// One-based block index.
    pub block: usize,
    pub status: &'static str,
    /// One-based symbol positions that changed or were filled in.
    pub positions: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub stripes: u64,
    pub blocks: u64,
    pub clean: u64,
    pub corrected_local: u64,
    pub corrected_global: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeReport {
    pub mode: String,
    pub ok: bool,
    pub summary: Summary,
    /// Every block that was not clean.
    pub blocks: Vec<BlockReport>,
}

pub fn encode_payload(config: &HierConfig, data: &[u8]) -> Result<Archive, HierError> {
    let code = HierCode::build(config)?;
    let header = ArchiveHeader::for_payload(config.clone(), data.len() as u64);
    let mut msg = symbols::bytes_to_symbols(data, config.m);
    let per = header.stripe_message_symbols();
    msg.resize(header.stripe_count as usize * per, Elem::ZERO);
    let ks: Vec<usize> = config.blocks.iter().map(|b| b.k).collect();
    let stripes: Vec<Vec<Elem>> = msg
        .par_chunks(per.max(1))
        .map(|chunk| {
            let mut rest = chunk;
            let msgs: Vec<Vec<Elem>> = ks
                .iter()
                .map(|&k| {
                    let (head, tail) = rest.split_at(k);
                    rest = tail;
                    head.to_vec()
                })
                .collect();
            code.encode(&msgs).map(|c| c.concat())
        })
        .collect::<Result<_, _>>()?;
    Ok(Archive {
        header,
        symbols: stripes.concat(),
    })
}

/// Decodes every stripe; returns the payload when all stripes succeed.
pub fn decode_archive(
    archive: &Archive,
    erasures: &ErasureSet,
    mode: Mode,
) -> (Option<Vec<u8>>, DecodeReport) {
    let header = &archive.header;
    let code = HierCode::build(&header.config).expect("header was validated");
    let offsets = header.block_offsets();
    let count = header.stripe_count as usize;

    let results: Vec<Result<StripeDecoded, Vec<BlockReport>>> = (0..count)
        .into_par_iter()
        .map(|s| {
            let stripe = archive.stripe(s);
            let words: Vec<Vec<Symbol>> = code
                .blocks()
                .iter()
                .enumerate()
                .map(|(b, blk)| {
                    let mut w: Vec<Symbol> = stripe[offsets[b]..offsets[b] + blk.n()]
                        .iter()
                        .map(|&x| Some(x))
                        .collect();
                    if let Some(es) = erasures.get(&(s, b)) {
                        for &j in es {
                            w[j] = None;
                        }
                    }
                    w
                })
                .collect();
            decode_stripe(&code, &words, mode).map_err(|e| failure_reports(&code, s, &e))
        })
        .collect();

    let mut summary = Summary {
        stripes: count as u64,
        blocks: (count * code.p()) as u64,
        ..Summary::default()
    };
    let mut blocks = Vec::new();
    let mut message = Vec::with_capacity(count * header.stripe_message_symbols());
    let mut ok = true;
    for (s, r) in results.into_iter().enumerate() {
        match r {
            Ok(stripe) => {
                for (blk, c) in code.blocks().iter().zip(&stripe.codewords) {
                    message.extend_from_slice(&c[..blk.k()]);
                }
                for (b, o) in stripe.outcomes.into_iter().enumerate() {
                    match o.status {
                        BlockStatus::Clean => summary.clean += 1,
                        BlockStatus::CorrectedLocal => summary.corrected_local += 1,
                        BlockStatus::CorrectedGlobal => summary.corrected_global += 1,
                    }
                    if o.status != BlockStatus::Clean || !o.corrected.is_empty() {
                        blocks.push(BlockReport {
                            stripe: s + 1,
                            block: b + 1,
                            status: o.status.as_str(),
                            positions: o.corrected.iter().map(|j| j + 1).collect(),
                            error: None,
                        });
                    }
                }
            }
            Err(reports) => {
                ok = false;
                summary.failed += reports.iter().filter(|r| r.status == "failed").count() as u64;
                blocks.extend(reports);
            }
        }
    }
    let report = DecodeReport {
        mode: format!("{mode:?}").to_lowercase(),
        ok,
        summary,
        blocks,
    };
    let payload = ok
        .then(|| symbols::symbols_to_bytes(&message, header.config.m, header.payload_len as usize));
    (payload, report)
}

fn decode_stripe(
    code: &HierCode,
    words: &[Vec<Symbol>],
    mode: Mode,
) -> Result<StripeDecoded, HierError> {
    match mode {
        Mode::Auto => code.decode_stripe(words),
        Mode::Local => {
            let mut codewords = Vec::with_capacity(words.len());
            let mut outcomes = Vec::with_capacity(words.len());
            for (i, w) in words.iter().enumerate() {
                let d = code.local_decode(i, w)?;
                outcomes.push(BlockOutcome {
                    status: if d.corrected.is_empty() {
                        BlockStatus::Clean
                    } else {
                        BlockStatus::CorrectedLocal
                    },
                    corrected: d.corrected,
                });
                codewords.push(d.codeword);
            }
            if !code.is_codeword(&codewords) {
                return Err(HierError::DecodeFailed {
                    failed: (0..words.len()).collect(),
                });
            }
            Ok(StripeDecoded {
                codewords,
                outcomes,
            })
        }
        Mode::Global => {
            // Siblings come from local decoding; the single block that is not
            // clean as received is decoded globally.
            let plain: Vec<Vec<Elem>> = words
                .iter()
                .map(|w| hecc_core::codec::zero_filled(w))
                .collect();
            let local: Vec<Option<Vec<Elem>>> = words
                .iter()
                .enumerate()
                .map(|(i, w)| code.local_decode(i, w).ok().map(|d| d.codeword))
                .collect();
            let dirty: Vec<usize> = (0..words.len())
                .filter(|&i| {
                    words[i].iter().any(|s| s.is_none()) || local[i].as_ref() != Some(&plain[i])
                })
                .collect();
            let mut codewords: Vec<Vec<Elem>> = local
                .into_iter()
                .zip(&plain)
                .map(|(l, p)| l.unwrap_or_else(|| p.clone()))
                .collect();
            let mut outcomes = vec![
                BlockOutcome {
                    status: BlockStatus::Clean,
                    corrected: Vec::new(),
                };
                words.len()
            ];
            match dirty.as_slice() {
                [] => {}
                &[i] => {
                    let g =
                        code.global_decode(i, &words[i], &codewords, &GlobalOptions::default())?;
                    outcomes[i] = BlockOutcome {
                        status: BlockStatus::CorrectedGlobal,
                        corrected: g.corrected,
                    };
                    codewords[i] = g.codeword;
                }
                _ => return Err(HierError::DecodeFailed { failed: dirty }),
            }
            if !code.is_codeword(&codewords) {
                return Err(HierError::DecodeFailed {
                    failed: (0..words.len()).collect(),
                });
            }
            Ok(StripeDecoded {
                codewords,
                outcomes,
            })
        }
    }
}

fn failure_reports(code: &HierCode, s: usize, err: &HierError) -> Vec<BlockReport> {
    let failed: Vec<usize> = match err {
        HierError::DecodeFailed { failed } => failed.clone(),
        HierError::LocalFailure { block, .. }
        | HierError::GlobalFailure { block, .. }
        | HierError::InconsistentSiblings { block, .. } => vec![*block],
        _ => (0..code.p()).collect(),
    };
    failed
        .into_iter()
        .map(|b| BlockReport {
            stripe: s + 1,
            block: b + 1,
            status: "failed",
            positions: Vec::new(),
            error: Some(err.to_string()),
        })
        .collect()
}
