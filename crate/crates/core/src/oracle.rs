//! Brute-force ground truth by full codebook enumeration.

use thiserror::Error;

use crate::cauchy::EcCode;
use crate::codec::Symbol;
use crate::gf::{Elem, Field};
use crate::matrix::Matrix;

/// Default bound on the number of enumerated codewords.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("codebook of size q^{dim} exceeds the enumeration cap {cap}")]
    TooLarge { dim: usize, cap: u64 },
    #[error("{} codewords tie at distance {distance}", .nearest.len())]
    Ambiguous {
        distance: usize,
        nearest: Vec<Vec<Elem>>,
    },
    #[error("word has length {got}, code has length {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Iterates every codeword `m G` for `m` over `GF(q)^k`.
pub struct Codebook<'a> {
    field: &'a Field,
    generator: Matrix,
    message: Vec<u16>,
    current: Vec<Elem>,
    done: bool,
}

impl<'a> Codebook<'a> {
    pub fn new(field: &'a Field, generator: Matrix, cap: u64) -> Result<Self, OracleError> {
        let dim = generator.rows();
        let size = (field.order() as u64).checked_pow(dim as u32);
        if size.is_none_or(|s| s > cap) {
            return Err(OracleError::TooLarge { dim, cap });
        }
        let n = generator.cols();
        Ok(Codebook {
            field,
            generator,
            message: vec![0; dim],
            current: vec![Elem::ZERO; n],
            done: false,
        })
    }

    pub fn for_code(code: &'a EcCode, cap: u64) -> Result<Self, OracleError> {
        Codebook::new(code.field(), code.generator(), cap)
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn len(&self) -> u64 {
        (self.field.order() as u64).pow(self.dimension() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Iterator for Codebook<'_> {
    type Item = Vec<Elem>;

    /// Odometer over messages; each digit change adds one scaled generator
    /// row to the running codeword.
    fn next(&mut self) -> Option<Vec<Elem>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let q = self.field.order() as u16;
        let mut i = 0;
        loop {
            if i == self.message.len() {
                self.done = true;
                break;
            }
            let old = Elem::from_raw(self.message[i]);
            self.message[i] = (self.message[i] + 1) % q;
            let new = Elem::from_raw(self.message[i]);
            let delta = old + new;
            for (c, &g) in self.current.iter_mut().zip(self.generator.row(i)) {
                *c += self.field.mul(delta, g);
            }
            if self.message[i] != 0 {
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

pub fn weight(word: &[Elem]) -> usize {
    word.iter().filter(|x| !x.is_zero()).count()
}

/// Hamming distance over non-erased coordinates.
pub fn distance(word: &[Symbol], codeword: &[Elem]) -> usize {
    word.iter()
        .zip(codeword)
        .filter(|(w, c)| w.is_some_and(|w| w != **c))
        .count()
}

/// Minimum nonzero weight of the row space of `generator`.
pub fn min_distance_of(field: &Field, generator: &Matrix, cap: u64) -> Result<usize, OracleError> {
    let book = Codebook::new(field, generator.clone(), cap)?;
    Ok(book
        .map(|c| weight(&c))
        .filter(|&w| w > 0)
        .min()
        .unwrap_or(0))
}

pub fn min_distance(code: &EcCode, cap: u64) -> Result<usize, OracleError> {
    min_distance_of(code.field(), &code.generator(), cap)
}

/// Every codeword at minimum distance from `word`, with that distance.
pub fn nearest_codewords(
    code: &EcCode,
    word: &[Symbol],
    cap: u64,
) -> Result<(usize, Vec<Vec<Elem>>), OracleError> {
    if word.len() != code.n() {
        return Err(OracleError::LengthMismatch {
            expected: code.n(),
            got: word.len(),
        });
    }
    let mut best = usize::MAX;
    let mut nearest = Vec::new();
    for c in Codebook::for_code(code, cap)? {
        let d = distance(word, &c);
        if d < best {
            best = d;
            nearest.clear();
        }
        if d == best {
            nearest.push(c);
        }
    }
    Ok((best, nearest))
}

/// The unique nearest codeword, or `Ambiguous` on a tie.
pub fn brute_force_decode(
    code: &EcCode,
    word: &[Symbol],
    cap: u64,
) -> Result<Vec<Elem>, OracleError> {
    let (distance, mut nearest) = nearest_codewords(code, word, cap)?;
    if nearest.len() == 1 {
        Ok(nearest.pop().unwrap())
    } else {
        Err(OracleError::Ambiguous { distance, nearest })
    }
}
