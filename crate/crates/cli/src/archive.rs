//! Self-describing archive format.
//!
//! ```text
//! "HECC1"                       5 bytes
//! m                             1 byte
//! primitive polynomial          4 bytes
//! p                             2 bytes
//! per block: k, r, delta        2 bytes each
//! per block: row points, then column points (discrete logs, 2 bytes each)
//! payload length in bytes       8 bytes
//! stripe count                  8 bytes
//! per block: symbol offset within a stripe (4 bytes), length (2 bytes)
//! stripes                       packed m-bit symbols, blocks in order
//! ```
//!
//! Integers are big-endian.

use hecc_core::{BlockSpec, Elem, HierConfig};
use thiserror::Error;

use crate::symbols;

pub const MAGIC: &[u8; 5] = b"HECC1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArchiveError {
    #[error("not an archive (bad magic)")]
    BadMagic,
    #[error("archive truncated")]
    Truncated,
    #[error("{0} trailing bytes after the last stripe")]
    TrailingBytes(usize),
    #[error("inconsistent layout table: {0}")]
    Layout(String),
    #[error("invalid code parameters: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveHeader {
    pub config: HierConfig,
    pub payload_len: u64,
    pub stripe_count: u64,
}

impl ArchiveHeader {
    /// Header for a payload of `payload_len` bytes, with enough stripes to
    /// hold it.
    pub fn for_payload(config: HierConfig, payload_len: u64) -> ArchiveHeader {
        let per_stripe = config.blocks.iter().map(|b| b.k as u64).sum::<u64>();
        let symbols = (payload_len * 8).div_ceil(config.m as u64);
        ArchiveHeader {
            stripe_count: symbols.div_ceil(per_stripe),
            config,
            payload_len,
        }
    }

    /// `Σ n_i`.
    pub fn stripe_symbols(&self) -> usize {
        self.config.blocks.iter().map(|b| b.n()).sum()
    }

    /// `Σ k_i`.
    pub fn stripe_message_symbols(&self) -> usize {
        self.config.blocks.iter().map(|b| b.k).sum()
    }

    /// Symbol offset of each block within a stripe.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.config
            .blocks
            .iter()
            .scan(0, |off, b| {
                let o = *off;
                *off += b.n();
                Some(o)
            })
            .collect()
    }

    /// Zero symbols appended to the payload to fill the last stripe.
    pub fn pad_symbols(&self) -> u64 {
        let used = (self.payload_len * 8).div_ceil(self.config.m as u64);
        self.stripe_count * self.stripe_message_symbols() as u64 - used
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(c.m as u8);
        out.extend_from_slice(&c.prim_poly.to_be_bytes());
        out.extend_from_slice(&(c.p() as u16).to_be_bytes());
        for b in &c.blocks {
            for x in [b.k, b.r, b.delta] {
                out.extend_from_slice(&(x as u16).to_be_bytes());
            }
        }
        for b in &c.blocks {
            for &l in b.rows.iter().chain(&b.cols) {
                out.extend_from_slice(&(l as u16).to_be_bytes());
            }
        }
        out.extend_from_slice(&self.payload_len.to_be_bytes());
        out.extend_from_slice(&self.stripe_count.to_be_bytes());
        for (b, off) in c.blocks.iter().zip(self.block_offsets()) {
            out.extend_from_slice(&(off as u32).to_be_bytes());
            out.extend_from_slice(&(b.n() as u16).to_be_bytes());
        }
        out
    }

    /// Parses a header, returning it with its encoded length.
    pub fn parse(bytes: &[u8]) -> Result<(ArchiveHeader, usize), ArchiveError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(ArchiveError::BadMagic);
        }
        let m = r.u8()? as u32;
        let prim_poly = r.u32()?;
        let p = r.u16()? as usize;
        let mut triples = Vec::with_capacity(p);
        for _ in 0..p {
            triples.push((r.u16()? as usize, r.u16()? as usize, r.u16()? as usize));
        }
        let delta: usize = triples.iter().map(|t| t.2).sum();
        let mut blocks = Vec::with_capacity(p);
        for &(k, rr, d) in &triples {
            let ncols = (rr + delta)
                .checked_sub(d)
                .ok_or_else(|| ArchiveError::Config("delta exceeds r + total delta".into()))?;
            let rows = (0..k + d)
                .map(|_| r.u16().map(u32::from))
                .collect::<Result<_, _>>()?;
            let cols = (0..ncols)
                .map(|_| r.u16().map(u32::from))
                .collect::<Result<_, _>>()?;
            blocks.push(BlockSpec {
                k,
                r: rr,
                delta: d,
                rows,
                cols,
            });
        }
        let config = HierConfig {
            m,
            prim_poly,
            blocks,
        };
        config
            .validate()
            .map_err(|e| ArchiveError::Config(e.to_string()))?;
        let payload_len = r.u64()?;
        let stripe_count = r.u64()?;
        let header = ArchiveHeader {
            config,
            payload_len,
            stripe_count,
        };
        if payload_len.checked_mul(8).is_none()
            || header != Self::for_payload(header.config.clone(), payload_len)
        {
            return Err(ArchiveError::Layout(format!(
                "{stripe_count} stripes cannot hold {payload_len} payload bytes"
            )));
        }
        for (i, (b, off)) in header
            .config
            .blocks
            .iter()
            .zip(header.block_offsets())
            .enumerate()
        {
            let (o, n) = (r.u32()? as usize, r.u16()? as usize);
            if o != off || n != b.n() {
                return Err(ArchiveError::Layout(format!(
                    "block {} recorded at offset {o} length {n}, expected {off} and {}",
                    i + 1,
                    b.n()
                )));
            }
        }
        Ok((header, r.pos))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ArchiveError> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or(ArchiveError::Truncated)?;
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ArchiveError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ArchiveError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ArchiveError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ArchiveError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Header plus all coded symbols, stripe-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    pub header: ArchiveHeader,
    pub symbols: Vec<Elem>,
}

impl Archive {
    pub fn stripe(&self, s: usize) -> &[Elem] {
        let n = self.header.stripe_symbols();
        &self.symbols[s * n..(s + 1) * n]
    }

    /// Index into [`Archive::symbols`] of block `b`'s symbol `j` in stripe `s`.
    pub fn index(&self, s: usize, b: usize, j: usize) -> usize {
        s * self.header.stripe_symbols() + self.header.block_offsets()[b] + j
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.to_bytes();
        out.extend(symbols::pack(&self.symbols, self.header.config.m));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Archive, ArchiveError> {
        let (header, len) = ArchiveHeader::parse(bytes)?;
        let m = header.config.m;
        let count = usize::try_from(header.stripe_count)
            .ok()
            .and_then(|s| s.checked_mul(header.stripe_symbols()))
            .ok_or(ArchiveError::Truncated)?;
        let body = &bytes[len..];
        let need = symbols::packed_len(count, m);
        if body.len() < need {
            return Err(ArchiveError::Truncated);
        }
        if body.len() > need {
            return Err(ArchiveError::TrailingBytes(body.len() - need));
        }
        let syms = symbols::unpack(body, m, count).ok_or(ArchiveError::Truncated)?;
        Ok(Archive {
            header,
            symbols: syms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> HierConfig {
        HierConfig::parse(
            "m = 4\nprim_poly = 0x13\np = 2\n\
             block.1.k = 3\nblock.1.r = 3\nblock.1.delta = 1\n\
             block.1.rows = 1 2 3 4\nblock.1.cols = 8 9 10 11\n\
             block.2.k = 3\nblock.2.r = 3\nblock.2.delta = 1\n\
             block.2.rows = 1 2 3 4\nblock.2.cols = 8 9 10 11\n",
        )
        .unwrap()
    }

    #[test]
    fn header_round_trip() {
        let h = ArchiveHeader::for_payload(example(), 7);
        // 7 bytes = 14 nibbles -> 3 stripes of 6
        assert_eq!(h.stripe_count, 3);
        assert_eq!(h.pad_symbols(), 4);
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..5], b"HECC1");
        assert_eq!(bytes.len(), 5 + 1 + 4 + 2 + 12 + 32 + 8 + 8 + 12);
        let (back, len) = ArchiveHeader::parse(&bytes).unwrap();
        assert_eq!(back, h);
        assert_eq!(len, bytes.len());
    }

    #[test]
    fn rejects_damage() {
        let h = ArchiveHeader::for_payload(example(), 3);
        let a = Archive {
            symbols: vec![Elem::ZERO; 12],
            header: h,
        };
        let bytes = a.to_bytes();
        assert_eq!(Archive::from_bytes(&bytes).unwrap(), a);
        for cut in [0, 4, 10, bytes.len() - 1] {
            assert!(Archive::from_bytes(&bytes[..cut]).is_err());
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(
            Archive::from_bytes(&extra),
            Err(ArchiveError::TrailingBytes(1))
        );
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(Archive::from_bytes(&bad), Err(ArchiveError::BadMagic));
        let mut count = bytes.clone();
        // stripe count is the 8 bytes before the 12-byte layout table
        let pos = a.header.to_bytes().len() - 12 - 1;
        count[pos] += 1;
        assert!(matches!(
            Archive::from_bytes(&count),
            Err(ArchiveError::Layout(_))
        ));
        let mut layout = bytes.clone();
        layout[a.header.to_bytes().len() - 1] += 1;
        assert!(matches!(
            Archive::from_bytes(&layout),
            Err(ArchiveError::Layout(_))
        ));
    }

    #[test]
    fn empty_payload() {
        let h = ArchiveHeader::for_payload(example(), 0);
        assert_eq!(h.stripe_count, 0);
        let a = Archive {
            header: h.clone(),
            symbols: Vec::new(),
        };
        assert_eq!(a.to_bytes(), h.to_bytes());
        assert_eq!(Archive::from_bytes(&a.to_bytes()).unwrap(), a);
    }
}
