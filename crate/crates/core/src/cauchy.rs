//! Cauchy matrices, extended Cauchy (EC) codes and GRS classification.
//!
//! An EC code `C(A, k, v, r)` has the `v x n` parity-check matrix
//! `H = [A ; I_r 0]^T` (with `n = k + r`), where `A` is a `k x v` generalized
//! Cauchy matrix with entries `c_i d_j / (a_i - b_j)`. It is an MDS
//! `(n, n - v, v + 1)` code whenever `v - k < r <= v`.

use thiserror::Error;

use crate::gf::{Elem, Field, FieldError};
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("evaluation points collide at {0}")]
    PointCollision(Elem),
    #[error("row/column scalings must be nonzero")]
    ZeroScaling,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid dimensions k={k}, v={v}, r={r} (need v-k < r <= v, r >= 1)")]
    BadDimensions { k: usize, v: usize, r: usize },
    #[error("determinant needs as many row points as column points ({rows} vs {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("parity-check matrix is rank deficient")]
    RankDeficient,
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<MatrixError> for CodeError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NotSquare { rows, cols } => CodeError::NotSquare { rows, cols },
            _ => CodeError::RankDeficient,
        }
    }
}

/// Evaluation points and optional scalings of a generalized Cauchy matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauchyParams {
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub c: Option<Vec<Elem>>,
    pub d: Option<Vec<Elem>>,
}

impl CauchyParams {
    pub fn new(a: Vec<Elem>, b: Vec<Elem>) -> Result<Self, CodeError> {
        let p = CauchyParams {
            a,
            b,
            c: None,
            d: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scalings(mut self, c: Vec<Elem>, d: Vec<Elem>) -> Result<Self, CodeError> {
        self.c = Some(c);
        self.d = Some(d);
        self.validate()?;
        Ok(self)
    }

    /// `a_i = β^i` for `i = 1..=k`, `b_j = β^(k+j)` for `j = 1..=v`.
    pub fn default_points(f: &Field, k: usize, v: usize) -> Result<Self, CodeError> {
        let a = (1..=k).map(|i| f.exp(i as i64)).collect();
        let b = (1..=v).map(|j| f.exp((k + j) as i64)).collect();
        CauchyParams::new(a, b)
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        let mut seen = std::collections::HashSet::new();
        for &x in self.a.iter().chain(&self.b) {
            if !seen.insert(x) {
                return Err(CodeError::PointCollision(x));
            }
        }
        if let Some(c) = &self.c {
            check_len(self.a.len(), c.len())?;
            if c.iter().any(|x| x.is_zero()) {
                return Err(CodeError::ZeroScaling);
            }
        }
        if let Some(d) = &self.d {
            check_len(self.b.len(), d.len())?;
            if d.iter().any(|x| x.is_zero()) {
                return Err(CodeError::ZeroScaling);
            }
        }
        Ok(())
    }

    pub fn row_scale(&self, i: usize) -> Elem {
        self.c.as_ref().map_or(Elem::ONE, |c| c[i])
    }

    pub fn col_scale(&self, j: usize) -> Elem {
        self.d.as_ref().map_or(Elem::ONE, |d| d[j])
    }

    pub fn is_scaled(&self) -> bool {
        self.c.is_some() || self.d.is_some()
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), CodeError> {
    if expected == got {
        Ok(())
    } else {
        Err(CodeError::LengthMismatch { expected, got })
    }
}

/// The (generalized) Cauchy matrix with entries `c_i d_j / (a_i - b_j)`.
pub fn build_cauchy(f: &Field, params: &CauchyParams) -> Result<Matrix, CodeError> {
    params.validate()?;
    let mut m = Matrix::zeros(params.a.len(), params.b.len());
    for (i, &ai) in params.a.iter().enumerate() {
        for (j, &bj) in params.b.iter().enumerate() {
            let num = f.mul(params.row_scale(i), params.col_scale(j));
            m[(i, j)] = f.div(num, ai - bj)?;
        }
    }
    Ok(m)
}

/// Closed-form determinant of the square Cauchy matrix `Y(a; b)`:
/// `∏_{i<i'} (a_i - a_i') ∏_{j<j'} (b_j' - b_j) / ∏_{i,j} (a_i - b_j)`.
pub fn cauchy_determinant(f: &Field, a: &[Elem], b: &[Elem]) -> Result<Elem, CodeError> {
    if a.len() != b.len() {
        return Err(CodeError::NotSquare {
            rows: a.len(),
            cols: b.len(),
        });
    }
    CauchyParams::new(a.to_vec(), b.to_vec())?;
    let mut num = Elem::ONE;
    for i in 0..a.len() {
        for i2 in i + 1..a.len() {
            num = f.mul(num, a[i] - a[i2]);
            num = f.mul(num, b[i2] - b[i]);
        }
    }
    let mut den = Elem::ONE;
    for &ai in a {
        for &bj in b {
            den = f.mul(den, ai - bj);
        }
    }
    Ok(f.div(num, den)?)
}

/// An extended Cauchy code `C(A, k, v, r)` with its parity-check matrix and a
/// systematic generator.
#[derive(Debug, Clone)]
pub struct EcCode {
    field: Field,
    params: CauchyParams,
    k: usize,
    v: usize,
    r: usize,
    cauchy: Matrix,
    parity_check: Matrix,
    redundancy: Matrix,
}

impl EcCode {
    /// Builds the code from Cauchy parameters (`k = |a|`, `v = |b|`) and `r`.
    pub fn new(field: &Field, params: CauchyParams, r: usize) -> Result<EcCode, CodeError> {
        let k = params.a.len();
        let v = params.b.len();
        if r == 0 || r > v || v >= k + r {
            return Err(CodeError::BadDimensions { k, v, r });
        }
        let cauchy = build_cauchy(field, &params)?;
        let n = k + r;
        let mut h = Matrix::zeros(v, n);
        for w in 0..v {
            for i in 0..k {
                h[(w, i)] = cauchy[(i, w)];
            }
        }
        for j in 0..r {
            h[(j, k + j)] = Elem::ONE;
        }
        let redundancy = systematic_redundancy(field, &h)?;
        Ok(EcCode {
            field: field.clone(),
            params,
            k,
            v,
            r,
            cauchy,
            parity_check: h,
            redundancy,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn params(&self) -> &CauchyParams {
        &self.params
    }

    /// Number of Cauchy rows (the `k` in `n = k + r`).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.k + self.r
    }

    /// Code dimension `n - v`.
    pub fn dimension(&self) -> usize {
        self.n() - self.v
    }

    pub fn min_distance_bound(&self) -> usize {
        self.v + 1
    }

    pub fn cauchy(&self) -> &Matrix {
        &self.cauchy
    }

    /// `H`, `v x n`.
    pub fn parity_check(&self) -> &Matrix {
        &self.parity_check
    }

    /// `G = [I_(n-v) | X]`, `(n-v) x n`. Built on demand.
    pub fn generator(&self) -> Matrix {
        Matrix::identity(self.dimension()).hstack(&self.redundancy)
    }

    /// The non-identity block `X` of the systematic generator.
    pub fn redundancy_block(&self) -> &Matrix {
        &self.redundancy
    }

    /// Evaluation point of a codeword position (0-based): `a_i` for message
    /// positions, `b_j` for parity position `k + j`.
    pub fn position_point(&self, pos: usize) -> Elem {
        if pos < self.k {
            self.params.a[pos]
        } else {
            self.params.b[pos - self.k]
        }
    }

    /// Column `pos` of `H` added into `acc`, scaled by `x`.
    pub(crate) fn accumulate_column(&self, acc: &mut [Elem], pos: usize, x: Elem) {
        if x.is_zero() {
            return;
        }
        if pos < self.k {
            for (w, s) in acc.iter_mut().enumerate() {
                *s += self.field.mul(x, self.cauchy[(pos, w)]);
            }
        } else {
            acc[pos - self.k] += x;
        }
    }

    /// `H c^T`.
    pub fn syndrome_of(&self, word: &[Elem]) -> Vec<Elem> {
        assert_eq!(word.len(), self.n(), "word length");
        let mut s = vec![Elem::ZERO; self.v];
        for (pos, &x) in word.iter().enumerate() {
            self.accumulate_column(&mut s, pos, x);
        }
        s
    }

    pub fn is_codeword(&self, word: &[Elem]) -> bool {
        word.len() == self.n() && self.syndrome_of(word).iter().all(|e| e.is_zero())
    }
}

/// Systematic generator `[I_(n-v) | X]` of the code with parity-check matrix
/// `h` (`v x n`, rank `v`).
pub fn ec_systematic_generator(f: &Field, h: &Matrix) -> Result<Matrix, CodeError> {
    let x = systematic_redundancy(f, h)?;
    Ok(Matrix::identity(x.rows()).hstack(&x))
}

/// The block `X` of [`ec_systematic_generator`]. Solves
/// `X = H_I^T (H_R^T)^{-1}` where `H_R` is the last `v` columns of `h`, which
/// is invertible for an MDS code.
pub fn systematic_redundancy(f: &Field, h: &Matrix) -> Result<Matrix, CodeError> {
    let v = h.rows();
    let n = h.cols();
    if v > n {
        return Err(CodeError::RankDeficient);
    }
    let d = n - v;
    let info = h.block(0, 0, v, d);
    let red = h.block(0, d, v, v);
    let red_t_inv = red
        .transpose()
        .inverse(f)
        .map_err(|_| CodeError::RankDeficient)?;
    Ok(info.transpose().mul(f, &red_t_inv))
}

/// Which GRS criterion failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrsCondition {
    /// Some entry of `X` is zero.
    ZeroEntry = 1,
    /// Some 2x2 minor of the entrywise inverse `X^c` vanishes.
    VanishingMinor = 2,
    /// `X^c` does not have rank 2.
    RankNotTwo = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrsVerdict {
    pub is_grs: bool,
    pub failing_condition: Option<GrsCondition>,
}

/// Decides whether the code generated by `[I | X]` is GRS (equivalently GC).
///
/// The three conditions are checked in order on `X^c`, the entrywise inverse
/// of `X`. When `X` has a single row or column, `X^c` cannot reach rank 2 and
/// the rank condition is taken as `rank = min(2, rows, cols)`.
pub fn grs_membership_test(f: &Field, x: &Matrix) -> GrsVerdict {
    let fail = |c| GrsVerdict {
        is_grs: false,
        failing_condition: Some(c),
    };
    if x.iter().any(|e| e.is_zero()) {
        return fail(GrsCondition::ZeroEntry);
    }
    let xc = x.map(|e| f.inv(e).expect("entries are nonzero"));
    for i in 0..xc.rows() {
        for i2 in i + 1..xc.rows() {
            for j in 0..xc.cols() {
                for j2 in j + 1..xc.cols() {
                    let minor = f.mul(xc[(i, j)], xc[(i2, j2)]) - f.mul(xc[(i, j2)], xc[(i2, j)]);
                    if minor.is_zero() {
                        return fail(GrsCondition::VanishingMinor);
                    }
                }
            }
        }
    }
    let want = 2.min(xc.rows()).min(xc.cols());
    if xc.rank(f) != want {
        return fail(GrsCondition::RankNotTwo);
    }
    GrsVerdict {
        is_grs: true,
        failing_condition: None,
    }
}

/// Maps a codeword of the generalized-Cauchy EC code onto the matching code
/// with a plain Cauchy matrix:
/// `(x_1..x_k, x_(k+1)..x_(k+r)) -> (c_1 x_1.., d_1^-1 x_(k+1)..)`.
pub fn gc_to_cauchy_map(
    f: &Field,
    word: &[Elem],
    c: &[Elem],
    d: &[Elem],
) -> Result<Vec<Elem>, CodeError> {
    let k = c.len();
    let r = word.len().checked_sub(k).ok_or(CodeError::LengthMismatch {
        expected: k,
        got: word.len(),
    })?;
    if d.len() < r {
        return Err(CodeError::LengthMismatch {
            expected: r,
            got: d.len(),
        });
    }
    let mut out = Vec::with_capacity(word.len());
    for (i, &x) in word[..k].iter().enumerate() {
        out.push(f.mul(c[i], x));
    }
    for (j, &x) in word[k..].iter().enumerate() {
        out.push(f.div(x, d[j])?);
    }
    Ok(out)
}

/// Inverse of [`gc_to_cauchy_map`].
pub fn cauchy_to_gc_map(
    f: &Field,
    word: &[Elem],
    c: &[Elem],
    d: &[Elem],
) -> Result<Vec<Elem>, CodeError> {
    let inv_c = c.iter().map(|&x| f.inv(x)).collect::<Result<Vec<_>, _>>()?;
    let inv_d = d.iter().map(|&x| f.inv(x)).collect::<Result<Vec<_>, _>>()?;
    gc_to_cauchy_map(f, word, &inv_c, &inv_d)
}
