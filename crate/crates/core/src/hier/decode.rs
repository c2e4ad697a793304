//! Local and global decoding of hierarchical blocks, plus a stripe-level
//! orchestrator that tries local decoding first.

use super::{HierCode, HierError};
use crate::codec::{self, decode_with_syndrome, DecodeOptions, Decoded, Symbol};
use crate::gf::Elem;
use crate::matrix::LinearSolution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecoded {
    pub message: Vec<Elem>,
    /// Corrected block `(m_i, s_i)`.
    pub codeword: Vec<Elem>,
    /// Recovered coupling vector `p_i`.
    pub coupling: Vec<Elem>,
    /// Block positions changed by decoding, erasures included.
    pub corrected: Vec<usize>,
    /// Decoder output on the local word `(m_i, p_i, s_i)`.
    pub inner: Decoded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDecoded {
    pub message: Vec<Elem>,
    pub codeword: Vec<Elem>,
    /// `[S_i, S_k for k != i ascending]`.
    pub syndrome: Vec<Elem>,
    pub corrected: Vec<usize>,
    pub inner: Decoded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GlobalOptions {
    /// Ignore erasure marks and treat them as zero-valued errors with the
    /// full budget `⌊(r_i + δ - δ_i)/2⌋`.
    pub literal_t0: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    Clean,
    CorrectedLocal,
    CorrectedGlobal,
}

impl BlockStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockStatus::Clean => "clean",
            BlockStatus::CorrectedLocal => "corrected-local",
            BlockStatus::CorrectedGlobal => "corrected-global",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOutcome {
    pub status: BlockStatus,
    /// Block positions whose symbol changed or was filled in.
    pub corrected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeDecoded {
    pub codewords: Vec<Vec<Elem>>,
    pub outcomes: Vec<BlockOutcome>,
}

impl StripeDecoded {
    pub fn messages(&self, code: &HierCode) -> Vec<Vec<Elem>> {
        self.codewords
            .iter()
            .zip(code.blocks())
            .map(|(c, b)| c[..b.k()].to_vec())
            .collect()
    }
}

fn changed(word: &[Symbol], codeword: &[Elem]) -> Vec<usize> {
    word.iter()
        .zip(codeword)
        .enumerate()
        .filter(|(_, (w, c))| **w != Some(**c))
        .map(|(i, _)| i)
        .collect()
}

impl HierCode {
    fn check_block(&self, i: usize, len: usize) -> Result<(), HierError> {
        if i >= self.p() {
            return Err(HierError::BlockCount {
                expected: self.p(),
                got: i + 1,
            });
        }
        let n = self.block(i).n();
        if len != n {
            return Err(HierError::LengthMismatch {
                block: i,
                expected: n,
                got: len,
            });
        }
        Ok(())
    }

    /// Decodes block `i` alone, treating `p_i` as `δ_i` erasures.
    pub fn local_decode(&self, i: usize, word: &[Symbol]) -> Result<LocalDecoded, HierError> {
        self.check_block(i, word.len())?;
        let blk = self.block(i);
        let (k, d) = (blk.k(), blk.delta());
        let mut local: Vec<Symbol> = Vec::with_capacity(word.len() + d);
        local.extend_from_slice(&word[..k]);
        local.extend(std::iter::repeat_n(None, d));
        local.extend_from_slice(&word[k..]);
        let inner = codec::decode(blk.local_code(), &local, &DecodeOptions::default())
            .map_err(|source| HierError::LocalFailure { block: i, source })?;
        let c = &inner.codeword;
        let mut codeword = c[..k].to_vec();
        codeword.extend_from_slice(&c[k + d..]);
        Ok(LocalDecoded {
            message: c[..k].to_vec(),
            coupling: c[k..k + d].to_vec(),
            corrected: changed(word, &codeword),
            codeword,
            inner,
        })
    }

    /// Syndrome `[S_i, S_k...]` of block `i`'s error under `H_i^G`, given
    /// corrected siblings. `received` has erasures zero-filled.
    pub fn global_syndrome(
        &self,
        i: usize,
        received: &[Elem],
        others: &[Vec<Elem>],
    ) -> Result<Vec<Elem>, HierError> {
        self.check_block(i, received.len())?;
        if others.len() != self.p() {
            return Err(HierError::BlockCount {
                expected: self.p(),
                got: others.len(),
            });
        }
        for (j, c) in others.iter().enumerate() {
            if j != i {
                self.check_block(j, c.len())?;
            }
        }
        let f = self.field();
        let blk = self.block(i);
        let msg = |j: usize| -> &[Elem] {
            if j == i {
                &received[..blk.k()]
            } else {
                &others[j][..self.block(j).k()]
            }
        };
        let add = |acc: &mut Vec<Elem>, x: Vec<Elem>| {
            for (a, b) in acc.iter_mut().zip(x) {
                *a += b;
            }
        };

        // S_i = m'_i A_ii + s'_i + Σ_(j != i) m_j A_j,i
        let mut s_i = blk.a_ii().left_mul(f, msg(i));
        add(&mut s_i, received[blk.k()..].to_vec());
        let mut p_i = vec![Elem::ZERO; blk.delta()];
        for j in (0..self.p()).filter(|&j| j != i) {
            add(&mut p_i, self.block(j).b(i).left_mul(f, msg(j)));
        }
        add(&mut s_i, blk.u().left_mul(f, &p_i));

        let mut syndrome = s_i;
        for k in (0..self.p()).filter(|&k| k != i) {
            let bk = self.block(k);
            // S~_k = m_k A_kk + s_k + Σ_(j != k) m'_j B_j,k U_k = S_k U_k
            let mut p_k = vec![Elem::ZERO; bk.delta()];
            for j in (0..self.p()).filter(|&j| j != k) {
                add(&mut p_k, self.block(j).b(k).left_mul(f, msg(j)));
            }
            let mut tilde = bk.a_ii().left_mul(f, msg(k));
            add(&mut tilde, others[k][bk.k()..].to_vec());
            add(&mut tilde, bk.u().left_mul(f, &p_k));
            match bk.u().transpose().solve(f, &tilde) {
                Ok(LinearSolution::Unique(x)) => syndrome.extend(x),
                _ => {
                    return Err(HierError::InconsistentSiblings {
                        block: i,
                        sibling: k,
                    })
                }
            }
        }
        Ok(syndrome)
    }

    /// Decodes block `i` using corrected sibling codewords (`others[i]` is
    /// ignored).
    pub fn global_decode(
        &self,
        i: usize,
        word: &[Symbol],
        others: &[Vec<Elem>],
        opts: &GlobalOptions,
    ) -> Result<GlobalDecoded, HierError> {
        self.check_block(i, word.len())?;
        let received = codec::zero_filled(word);
        let erased = if opts.literal_t0 {
            Vec::new()
        } else {
            codec::erased_positions(word)
        };
        let syndrome = self.global_syndrome(i, &received, others)?;
        let code = self.block(i).global_code();
        let inner = decode_with_syndrome(
            code,
            &received,
            &erased,
            &syndrome,
            &DecodeOptions::default(),
        )
        .map_err(|source| HierError::GlobalFailure { block: i, source })?;
        let codeword = inner.codeword.clone();
        Ok(GlobalDecoded {
            message: codeword[..self.block(i).k()].to_vec(),
            corrected: changed(word, &codeword),
            codeword,
            syndrome,
            inner,
        })
    }

    /// Decodes a whole stripe: local decoding per block, then global decoding
    /// of a single block that failed locally or left the stripe inconsistent.
    pub fn decode_stripe(&self, words: &[Vec<Symbol>]) -> Result<StripeDecoded, HierError> {
        self.check_messages(words, |b| b.n())?;
        if words.iter().flatten().all(|s| s.is_some()) {
            let plain: Vec<Vec<Elem>> = words.iter().map(|w| codec::zero_filled(w)).collect();
            if self.is_codeword(&plain) {
                let outcomes = vec![
                    BlockOutcome {
                        status: BlockStatus::Clean,
                        corrected: Vec::new(),
                    };
                    self.p()
                ];
                return Ok(StripeDecoded {
                    codewords: plain,
                    outcomes,
                });
            }
        }

        let local: Vec<Result<LocalDecoded, HierError>> = words
            .iter()
            .enumerate()
            .map(|(i, w)| self.local_decode(i, w))
            .collect();
        let failed: Vec<usize> = (0..self.p()).filter(|&i| local[i].is_err()).collect();
        if failed.len() > 1 {
            return Err(HierError::DecodeFailed { failed });
        }
        let status = |d: &LocalDecoded| BlockOutcome {
            status: if d.corrected.is_empty() {
                BlockStatus::Clean
            } else {
                BlockStatus::CorrectedLocal
            },
            corrected: d.corrected.clone(),
        };
        if failed.is_empty() {
            let codewords: Vec<Vec<Elem>> = local
                .iter()
                .map(|d| d.as_ref().unwrap().codeword.clone())
                .collect();
            if self.is_codeword(&codewords) {
                let outcomes = local.iter().map(|d| status(d.as_ref().unwrap())).collect();
                return Ok(StripeDecoded {
                    codewords,
                    outcomes,
                });
            }
        }

        // A block that decoded locally may still be a miscorrection; every
        // block is a candidate once no local failure singles one out, and the
        // consistent result changing the fewest symbols wins.
        let candidates: Vec<usize> = if failed.is_empty() {
            (0..self.p()).collect()
        } else {
            failed.clone()
        };
        let mut best: Option<(usize, StripeDecoded)> = None;
        for &i in &candidates {
            let mut codewords: Vec<Vec<Elem>> = local
                .iter()
                .map(|d| d.as_ref().map(|d| d.codeword.clone()).unwrap_or_default())
                .collect();
            codewords[i] = vec![Elem::ZERO; self.block(i).n()];
            let Ok(g) = self.global_decode(i, &words[i], &codewords, &GlobalOptions::default())
            else {
                continue;
            };
            codewords[i] = g.codeword.clone();
            if !self.is_codeword(&codewords) {
                continue;
            }
            let outcomes: Vec<BlockOutcome> = (0..self.p())
                .map(|j| {
                    if j == i {
                        BlockOutcome {
                            status: BlockStatus::CorrectedGlobal,
                            corrected: g.corrected.clone(),
                        }
                    } else {
                        status(local[j].as_ref().unwrap())
                    }
                })
                .collect();
            let cost = outcomes.iter().map(|o| o.corrected.len()).sum();
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((
                    cost,
                    StripeDecoded {
                        codewords,
                        outcomes,
                    },
                ));
            }
        }
        best.map(|(_, d)| d).ok_or(HierError::DecodeFailed {
            failed: if failed.is_empty() {
                candidates
            } else {
                failed
            },
        })
    }
}
