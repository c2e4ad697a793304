//! Double-level hierarchical codes assembled from per-block Cauchy matrices.
//!
//! Block `i` carries `k_i` message symbols and `r_i` parities. Its Cauchy
//! matrix `T_i` has `k_i + δ_i` rows and `r_i + δ - δ_i` columns and splits as
//!
//! ```text
//! T_i = [ A_ii | B_i,j (j != i, ascending) ]
//!       [ U_i  | Z_i                       ]
//! ```
//!
//! Parities are `s_i = m_i A_ii + Σ_(j != i) m_j B_j,i U_i`, so each block is
//! decodable on its own (local code) and, once its siblings are known, with
//! `δ - δ_i` extra syndromes (global code).

mod config;
mod decode;

pub use config::{BlockSpec, ConfigError, HierConfig};
pub use decode::{
    BlockOutcome, BlockStatus, GlobalDecoded, GlobalOptions, LocalDecoded, StripeDecoded,
};

use thiserror::Error;

use crate::cauchy::{build_cauchy, CauchyParams, CodeError, EcCode};
use crate::codec::DecodeError;
use crate::gf::{Elem, Field, FieldError};
use crate::matrix::Matrix;

/// Block indices in fields are zero-based; messages print them one-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("block {}: expected {expected} symbols, got {got}", .block + 1)]
    LengthMismatch {
        block: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} blocks, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("block {}: local decoding failed: {source}", .block + 1)]
    LocalFailure { block: usize, source: DecodeError },
    #[error("block {}: global decoding failed: {source}", .block + 1)]
    GlobalFailure { block: usize, source: DecodeError },
    #[error("block {}: sibling block {} is not a corrected codeword", .block + 1, .sibling + 1)]
    InconsistentSiblings { block: usize, sibling: usize },
    #[error("stripe could not be decoded (blocks {})", one_based(.failed))]
    DecodeFailed { failed: Vec<usize> },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn one_based(blocks: &[usize]) -> String {
    blocks
        .iter()
        .map(|b| (b + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<ConfigError> for HierError {
    fn from(e: ConfigError) -> Self {
        HierError::ConfigInvalid(e.to_string())
    }
}

/// Matrices of one block.
#[derive(Debug, Clone)]
pub struct BlockCode {
    k: usize,
    r: usize,
    delta: usize,
    t: Matrix,
    a_ii: Matrix,
    u: Matrix,
    z: Matrix,
    /// `B_i,j` for every `j`; empty `k_i x 0` at `j = i`.
    b: Vec<Matrix>,
    local: EcCode,
    global: EcCode,
}

impl BlockCode {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.k + self.r
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// `T_i`, `(k_i + δ_i) x (r_i + δ - δ_i)`.
    pub fn cauchy(&self) -> &Matrix {
        &self.t
    }

    pub fn a_ii(&self) -> &Matrix {
        &self.a_ii
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn z(&self) -> &Matrix {
        &self.z
    }

    /// `B_i,j`; `k_i x 0` when `j == i`.
    pub fn b(&self, j: usize) -> &Matrix {
        &self.b[j]
    }

    /// EC code of `(m_i, p_i, s_i)` with `H_i^L = [A_ii; U_i; I]^T`.
    pub fn local_code(&self) -> &EcCode {
        &self.local
    }

    /// EC code of `c_i` with `H_i^G = [[A_ii, B_i,·]; [I, 0]]^T`.
    pub fn global_code(&self) -> &EcCode {
        &self.global
    }

    /// Maps block position `j` to its index in the local word
    /// `(m_i, p_i, s_i)`.
    pub fn local_index(&self, j: usize) -> usize {
        if j < self.k {
            j
        } else {
            j + self.delta
        }
    }
}

#[derive(Debug, Clone)]
pub struct HierCode {
    field: Field,
    config: HierConfig,
    blocks: Vec<BlockCode>,
    delta: usize,
}

impl HierCode {
    pub fn build(config: &HierConfig) -> Result<HierCode, HierError> {
        config.validate()?;
        let field = Field::new(config.m, config.prim_poly)?;
        let p = config.blocks.len();
        let delta: usize = config.blocks.iter().map(|b| b.delta).sum();
        let mut blocks = Vec::with_capacity(p);
        for (i, spec) in config.blocks.iter().enumerate() {
            let rows: Vec<Elem> = spec.rows.iter().map(|&l| field.exp(l as i64)).collect();
            let cols: Vec<Elem> = spec.cols.iter().map(|&l| field.exp(l as i64)).collect();
            let t = build_cauchy(&field, &CauchyParams::new(rows.clone(), cols.clone())?)?;
            let (k, r, d) = (spec.k, spec.r, spec.delta);
            let a_ii = t.block(0, 0, k, r);
            let u = t.block(k, 0, d, r);
            let z = t.block(k, r, d, delta - d);
            let mut b = Vec::with_capacity(p);
            let mut off = r;
            for (j, other) in config.blocks.iter().enumerate() {
                if j == i {
                    b.push(Matrix::zeros(k, 0));
                } else {
                    b.push(t.block(0, off, k, other.delta));
                    off += other.delta;
                }
            }
            let local = EcCode::new(
                &field,
                CauchyParams::new(rows.clone(), cols[..r].to_vec())?,
                r,
            )?;
            let global = EcCode::new(&field, CauchyParams::new(rows[..k].to_vec(), cols)?, r)?;
            blocks.push(BlockCode {
                k,
                r,
                delta: d,
                t,
                a_ii,
                u,
                z,
                b,
                local,
                global,
            });
        }
        Ok(HierCode {
            field,
            config: config.clone(),
            blocks,
            delta,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn config(&self) -> &HierConfig {
        &self.config
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    /// `δ = Σ δ_i`.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn block(&self, i: usize) -> &BlockCode {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[BlockCode] {
        &self.blocks
    }

    /// Total message symbols `Σ k_i`.
    pub fn message_len(&self) -> usize {
        self.blocks.iter().map(|b| b.k).sum()
    }

    /// Total coded symbols `Σ n_i`.
    pub fn codeword_len(&self) -> usize {
        self.blocks.iter().map(|b| b.n()).sum()
    }

    /// `A_i,j`: `A_ii` on the diagonal, `B_i,j U_j` elsewhere.
    pub fn a(&self, i: usize, j: usize) -> Matrix {
        if i == j {
            self.blocks[i].a_ii.clone()
        } else {
            self.blocks[i].b[j].mul(&self.field, &self.blocks[j].u)
        }
    }

    /// The joint generator, `Σ k_i x Σ n_i`, with block `j`'s columns laid out
    /// as `(m_j, s_j)`.
    pub fn generator(&self) -> Matrix {
        let mut g = Matrix::zeros(self.message_len(), self.codeword_len());
        let mut row0 = 0;
        for (i, bi) in self.blocks.iter().enumerate() {
            let mut col0 = 0;
            for (j, bj) in self.blocks.iter().enumerate() {
                if i == j {
                    for x in 0..bi.k {
                        g[(row0 + x, col0 + x)] = Elem::ONE;
                    }
                }
                let a = self.a(i, j);
                for x in 0..bi.k {
                    for y in 0..bj.r {
                        g[(row0 + x, col0 + bj.k + y)] = a[(x, y)];
                    }
                }
                col0 += bj.n();
            }
            row0 += bi.k;
        }
        g
    }

    /// `H_i^L`, `r_i x (n_i + δ_i)`.
    pub fn local_parity_check(&self, i: usize) -> &Matrix {
        self.blocks[i].local.parity_check()
    }

    /// `H_i^G`, `(r_i + δ - δ_i) x n_i`.
    pub fn global_parity_check(&self, i: usize) -> &Matrix {
        self.blocks[i].global.parity_check()
    }

    fn check_messages<T>(
        &self,
        items: &[Vec<T>],
        len: impl Fn(&BlockCode) -> usize,
    ) -> Result<(), HierError> {
        if items.len() != self.p() {
            return Err(HierError::BlockCount {
                expected: self.p(),
                got: items.len(),
            });
        }
        for (i, (m, b)) in items.iter().zip(&self.blocks).enumerate() {
            if m.len() != len(b) {
                return Err(HierError::LengthMismatch {
                    block: i,
                    expected: len(b),
                    got: m.len(),
                });
            }
        }
        Ok(())
    }

    /// `p_i = Σ_(j != i) m_j B_j,i`, length `δ_i`.
    pub fn coupling(&self, i: usize, messages: &[&[Elem]]) -> Vec<Elem> {
        let mut p = vec![Elem::ZERO; self.blocks[i].delta];
        for (j, m) in messages.iter().enumerate() {
            if j == i {
                continue;
            }
            for (acc, x) in p
                .iter_mut()
                .zip(self.blocks[j].b[i].left_mul(&self.field, m))
            {
                *acc += x;
            }
        }
        p
    }

    /// `s_i = m_i A_ii + p_i U_i`.
    fn parity(&self, i: usize, m_i: &[Elem], p_i: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let b = &self.blocks[i];
        let mut s = b.a_ii.left_mul(f, m_i);
        for (acc, x) in s.iter_mut().zip(b.u.left_mul(f, p_i)) {
            *acc += x;
        }
        s
    }

    /// Jointly encodes one message per block into `c_i = (m_i, s_i)`.
    pub fn encode(&self, messages: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>, HierError> {
        self.check_messages(messages, |b| b.k)?;
        let views: Vec<&[Elem]> = messages.iter().map(|m| m.as_slice()).collect();
        Ok((0..self.p())
            .map(|i| {
                let p_i = self.coupling(i, &views);
                let mut c = messages[i].clone();
                c.extend(self.parity(i, &messages[i], &p_i));
                c
            })
            .collect())
    }

    /// True when the blocks jointly form a codeword of the generator.
    pub fn is_codeword(&self, codewords: &[Vec<Elem>]) -> bool {
        if self.check_messages(codewords, |b| b.n()).is_err() {
            return false;
        }
        let msgs: Vec<Vec<Elem>> = codewords
            .iter()
            .zip(&self.blocks)
            .map(|(c, b)| c[..b.k].to_vec())
            .collect();
        match self.encode(&msgs) {
            Ok(enc) => enc == codewords,
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn example_config() -> HierConfig {
        HierConfig::parse(
            "m = 4\nprim_poly = 0x13\np = 2\n\
             block.1.k = 3\nblock.1.r = 3\nblock.1.delta = 1\n\
             block.1.rows = 1 2 3 4\nblock.1.cols = 8 9 10 11\n\
             block.2.k = 3\nblock.2.r = 3\nblock.2.delta = 1\n\
             block.2.rows = 1 2 3 4\nblock.2.cols = 8 9 10 11\n",
        )
        .unwrap()
    }

    fn mat(f: &Field, rows: &[&[Option<i64>]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|e| e.map_or(Elem::ZERO, |l| f.exp(l)))
                        .collect()
                })
                .collect(),
        )
    }

    const O: Option<i64> = None;
    const I: Option<i64> = Some(0);
    fn b(l: i64) -> Option<i64> {
        Some(l)
    }

    #[test]
    fn example_generator() {
        let code = HierCode::build(&example_config()).unwrap();
        let f = code.field();
        let want = mat(
            f,
            &[
                &[I, O, O, b(5), b(12), b(7), O, O, O, b(4), b(10), b(7)],
                &[O, I, O, I, b(4), b(11), O, O, O, b(1), b(7), b(4)],
                &[O, O, I, b(2), b(14), b(3), O, O, O, b(5), b(11), b(8)],
                &[O, O, O, b(4), b(10), b(7), I, O, O, b(5), b(12), b(7)],
                &[O, O, O, b(1), b(7), b(4), O, I, O, I, b(4), b(11)],
                &[O, O, O, b(5), b(11), b(8), O, O, I, b(2), b(14), b(3)],
            ],
        );
        assert_eq!(code.generator(), want);
    }

    #[test]
    fn example_parity_checks() {
        let code = HierCode::build(&example_config()).unwrap();
        let f = code.field();
        let hg = mat(
            f,
            &[
                &[b(5), b(12), b(7), b(9)],
                &[I, b(4), b(11), b(6)],
                &[b(2), b(14), b(3), b(10)],
                &[I, O, O, O],
                &[O, I, O, O],
                &[O, O, I, O],
            ],
        )
        .transpose();
        let hl = mat(
            f,
            &[
                &[b(5), b(12), b(7)],
                &[I, b(4), b(11)],
                &[b(2), b(14), b(3)],
                &[b(10), b(1), b(13)],
                &[I, O, O],
                &[O, I, O],
                &[O, O, I],
            ],
        )
        .transpose();
        assert_eq!(code.global_parity_check(0), &hg);
        assert_eq!(code.local_parity_check(0), &hl);
    }

    #[test]
    fn example_encoding() {
        let code = HierCode::build(&example_config()).unwrap();
        let f = code.field();
        let m1 = vec![f.exp(1), Elem::ZERO, f.exp(4)];
        let m2 = vec![Elem::ZERO, Elem::ONE, Elem::ZERO];
        let c = code.encode(&[m1, m2]).unwrap();
        assert_eq!(
            c[0],
            vec![
                f.exp(1),
                Elem::ZERO,
                f.exp(4),
                f.exp(1),
                f.exp(11),
                f.exp(13)
            ]
        );
        assert_eq!(
            c[1],
            vec![
                Elem::ZERO,
                Elem::ONE,
                Elem::ZERO,
                f.exp(13),
                f.exp(6),
                f.exp(2)
            ]
        );
        let zero = code
            .encode(&[vec![Elem::ZERO; 3], vec![Elem::ZERO; 3]])
            .unwrap();
        assert!(zero.iter().flatten().all(|e| e.is_zero()));
        assert!(matches!(
            code.encode(&[vec![Elem::ZERO; 2], vec![Elem::ZERO; 3]]),
            Err(HierError::LengthMismatch { block: 0, .. })
        ));
    }

    fn heterogeneous() -> HierConfig {
        HierConfig::with_default_points(6, None, &[(5, 4, 1), (3, 5, 2), (4, 3, 1)]).unwrap()
    }

    #[test]
    fn partition_and_coupling() {
        for cfg in [example_config(), heterogeneous()] {
            let code = HierCode::build(&cfg).unwrap();
            let f = code.field();
            for (i, blk) in code.blocks().iter().enumerate() {
                let spec = &cfg.blocks[i];
                let t = blk.cauchy();
                for x in 0..t.rows() {
                    for y in 0..t.cols() {
                        let a = f.exp(spec.rows[x] as i64);
                        let bb = f.exp(spec.cols[y] as i64);
                        assert_eq!(t[(x, y)], f.inv(a - bb).unwrap());
                    }
                }
                let mut rebuilt = blk.a_ii().clone();
                for j in 0..code.p() {
                    rebuilt = rebuilt.hstack(blk.b(j));
                }
                let bottom = blk.u().hstack(blk.z());
                assert_eq!(rebuilt.vstack(&bottom), *t);
                assert_eq!(blk.u().rank(f), blk.delta());
                for j in 0..code.p() {
                    if j != i {
                        assert_eq!(code.a(i, j), blk.b(j).mul(f, code.block(j).u()));
                    }
                }
            }
        }
    }

    #[test]
    fn clean_syndromes_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for cfg in [example_config(), heterogeneous()] {
            let code = HierCode::build(&cfg).unwrap();
            let f = code.field();
            let q = f.order() as u16;
            for _ in 0..1000 {
                let msgs: Vec<Vec<Elem>> = code
                    .blocks()
                    .iter()
                    .map(|b| {
                        (0..b.k())
                            .map(|_| Elem::from_raw(rng.gen_range(0..q)))
                            .collect()
                    })
                    .collect();
                let cws = code.encode(&msgs).unwrap();
                let views: Vec<&[Elem]> = msgs.iter().map(|m| m.as_slice()).collect();
                let joint: Vec<Elem> = msgs.concat();
                assert_eq!(code.generator().left_mul(f, &joint), cws.concat());
                for (i, blk) in code.blocks().iter().enumerate() {
                    let p_i = code.coupling(i, &views);
                    let mut local = msgs[i].clone();
                    local.extend(&p_i);
                    local.extend(&cws[i][blk.k()..]);
                    assert!(blk.local_code().is_codeword(&local));
                    // H^G c_i = (−Σ m_j A_j,i, m_i B_i,j)
                    let syn = blk.global_code().syndrome_of(&cws[i]);
                    let mut want: Vec<Elem> = (0..blk.r())
                        .map(|y| {
                            (0..code.p())
                                .filter(|&j| j != i)
                                .map(|j| code.a(j, i).left_mul(f, &msgs[j])[y])
                                .sum()
                        })
                        .collect();
                    for j in (0..code.p()).filter(|&j| j != i) {
                        want.extend(blk.b(j).left_mul(f, &msgs[i]));
                    }
                    assert_eq!(syn, want);
                }
            }
        }
    }

    #[test]
    fn single_block_is_plain_ec_code() {
        let cfg = HierConfig::with_default_points(4, None, &[(4, 3, 1)]).unwrap();
        let code = HierCode::build(&cfg).unwrap();
        let blk = code.block(0);
        assert_eq!(blk.z().cols(), 0);
        assert_eq!(blk.global_code().v(), blk.r());
        let f = code.field();
        let m = vec![f.exp(1), f.exp(2), f.exp(3), f.exp(4)];
        let c = code.encode(std::slice::from_ref(&m)).unwrap();
        assert_eq!(c[0][4..], blk.a_ii().left_mul(f, &m)[..]);
    }
}
