//! Encoding and hybrid error-and-erasure decoding for EC codes.
//!
//! The decoder recovers a multiple `g(X; σ)` of the error locator from a
//! linear system built on the syndrome (the F-system), finds its roots among
//! the evaluation points of the non-erased positions, then solves for the
//! error magnitudes on the located and erased positions.

use thiserror::Error;

use crate::cauchy::{CodeError, EcCode};
use crate::gf::{Elem, Field, FieldError, Poly};
use crate::matrix::{LinearSolution, Matrix};

/// A received symbol; `None` marks an erasure.
pub type Symbol = Option<Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("budget exceeded: 2*{s} + {t} > {v}")]
    BudgetExceeded { s: usize, t: usize, v: usize },
    #[error("bad index set: {0}")]
    BadIndexSet(String),
    #[error("locator system is inconsistent")]
    InconsistentLocator,
    #[error("no separable locator candidate found")]
    NoSeparableCandidate,
    #[error("located {located} error positions, budget is {budget}")]
    TooManyLocated { located: usize, budget: usize },
    #[error("error magnitudes are not uniquely determined by the syndrome")]
    MagnitudeInconsistent,
    #[error("corrected word still has a nonzero syndrome")]
    ResidualSyndrome,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `c = m G = (m, m X)`.
pub fn encode(code: &EcCode, message: &[Elem]) -> Result<Vec<Elem>, CodeError> {
    let d = code.dimension();
    if message.len() != d {
        return Err(CodeError::LengthMismatch {
            expected: d,
            got: message.len(),
        });
    }
    let mut c = message.to_vec();
    c.extend(code.redundancy_block().left_mul(code.field(), message));
    Ok(c)
}

/// `z(c')`: erasures replaced by zero.
pub fn zero_filled(word: &[Symbol]) -> Vec<Elem> {
    word.iter().map(|s| s.unwrap_or(Elem::ZERO)).collect()
}

pub fn erased_positions(word: &[Symbol]) -> Vec<usize> {
    word.iter()
        .enumerate()
        .filter_map(|(i, s)| s.is_none().then_some(i))
        .collect()
}

/// `S = H z(c')^T`.
pub fn compute_syndrome(code: &EcCode, word: &[Symbol]) -> Result<Vec<Elem>, DecodeError> {
    check_len(code.n(), word.len())?;
    Ok(code.syndrome_of(&zero_filled(word)))
}

/// `e_E(X) = ∏ (X - point(i))` over the erased positions.
pub fn erasure_locator(code: &EcCode, erased: &[usize]) -> Poly {
    Poly::from_roots(code.field(), erased.iter().map(|&i| code.position_point(i)))
}

/// Divides `S_w` by the column scaling `d_w`, which turns every column of a
/// generalized Cauchy `H` into a multiple of its plain Cauchy counterpart.
pub fn normalize_syndrome(code: &EcCode, syndrome: &[Elem]) -> Vec<Elem> {
    let f = code.field();
    syndrome
        .iter()
        .enumerate()
        .map(|(w, &s)| {
            f.div(s, code.params().col_scale(w))
                .expect("scalings are nonzero")
        })
        .collect()
}

/// The augmented locator system `[u | F]`, one row per `W_i = W_0 ∪ {w_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSystem {
    pub u: Vec<Elem>,
    pub f: Matrix,
    pub w0: Vec<usize>,
    /// `w_i` for each row, 0-based syndrome indices.
    pub rows: Vec<usize>,
    /// Degree of `g`, i.e. the number of unknowns.
    pub s: usize,
}

impl FSystem {
    pub fn augmented(&self) -> Matrix {
        Matrix::from_fn(self.u.len(), 1, |r, _| self.u[r]).hstack(&self.f)
    }
}

/// `W_0 = {0, .., s+t-1}`.
pub fn default_w0(s: usize, t: usize) -> Vec<usize> {
    (0..s + t).collect()
}

/// Builds the locator system
/// `F̃_(i,j) = Σ_(w ∈ W_i) S_w e_E(b_w) b_w^(s-j) / ∏_(w' ∈ W_i \ {w}) (b_w - b_w')`
/// for `j = 0..=s`; column 0 is `u`, the rest is `F`. Every index outside
/// `W_0` contributes one row.
pub fn build_f_system(
    f: &Field,
    b: &[Elem],
    syndrome: &[Elem],
    e_e: &Poly,
    s: usize,
    w0: &[usize],
) -> Result<FSystem, DecodeError> {
    let v = b.len();
    check_len(v, syndrome.len())?;
    let t = e_e.degree().unwrap_or(0);
    if w0.len() != s + t {
        return Err(DecodeError::BadIndexSet(format!(
            "|W0| = {}, expected s + t = {}",
            w0.len(),
            s + t
        )));
    }
    let mut in_w0 = vec![false; v];
    for &w in w0 {
        if w >= v || in_w0[w] {
            return Err(DecodeError::BadIndexSet(format!(
                "index {w} repeated or outside 0..{v}"
            )));
        }
        in_w0[w] = true;
    }
    let rows: Vec<usize> = (0..v).filter(|&w| !in_w0[w]).collect();

    // weight(w) = S_w e_E(b_w); powers[w][p] = b_w^p
    let weight: Vec<Elem> = (0..v)
        .map(|w| f.mul(syndrome[w], e_e.eval(f, b[w])))
        .collect();
    let powers = |w: usize| -> Vec<Elem> {
        let mut p = Vec::with_capacity(s + 1);
        let mut x = Elem::ONE;
        for _ in 0..=s {
            p.push(x);
            x = f.mul(x, b[w]);
        }
        p
    };
    let w0_pows: Vec<Vec<Elem>> = w0.iter().map(|&w| powers(w)).collect();
    // ∏_(w' ∈ W0 \ {w}) (b_w - b_w') for w ∈ W0
    let w0_den: Vec<Elem> = w0
        .iter()
        .map(|&w| {
            w0.iter()
                .filter(|&&x| x != w)
                .fold(Elem::ONE, |acc, &x| f.mul(acc, b[w] - b[x]))
        })
        .collect();

    let mut aug = Matrix::zeros(rows.len(), s + 1);
    for (ri, &wi) in rows.iter().enumerate() {
        let mut add_term = |coef: Elem, pows: &[Elem]| {
            if coef.is_zero() {
                return;
            }
            for j in 0..=s {
                aug[(ri, j)] += f.mul(coef, pows[s - j]);
            }
        };
        let den_i = w0
            .iter()
            .fold(Elem::ONE, |acc, &x| f.mul(acc, b[wi] - b[x]));
        add_term(f.div(weight[wi], den_i)?, &powers(wi));
        for (idx, &w) in w0.iter().enumerate() {
            let den = f.mul(w0_den[idx], b[w] - b[wi]);
            add_term(f.div(weight[w], den)?, &w0_pows[idx]);
        }
    }
    let u = aug.column(0);
    let fm = aug.block(0, 1, rows.len(), s);
    Ok(FSystem {
        u,
        f: fm,
        w0: w0.to_vec(),
        rows,
        s,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaSolution {
    Unique(Vec<Elem>),
    /// Affine space `particular + span(kernel)` of positive dimension.
    Ambiguous {
        particular: Vec<Elem>,
        kernel: Vec<Vec<Elem>>,
    },
    Inconsistent,
}

/// Solves `F σ = u` (characteristic 2, so `-u = u`).
pub fn solve_sigma(f: &Field, sys: &FSystem) -> SigmaSolution {
    if sys.s == 0 {
        return if sys.u.iter().all(|e| e.is_zero()) {
            SigmaSolution::Unique(Vec::new())
        } else {
            SigmaSolution::Inconsistent
        };
    }
    match sys.f.solve(f, &sys.u).expect("u has one entry per row") {
        LinearSolution::Unique(x) => SigmaSolution::Unique(x),
        LinearSolution::Underdetermined { particular, kernel } => {
            SigmaSolution::Ambiguous { particular, kernel }
        }
        LinearSolution::Inconsistent => SigmaSolution::Inconsistent,
    }
}

/// The sampling set `Y`: `1, β, β^2, ..`, then 0, truncated to `count`.
/// `γ = 1` yields `σ1` itself.
pub fn gamma_set(f: &Field, count: usize) -> Vec<Elem> {
    (0..f.order() as i64 - 1)
        .map(|i| f.exp(i))
        .chain(std::iter::once(Elem::ZERO))
        .take(count)
        .collect()
}

/// `g` has no repeated roots and no root in common with `e_E`.
pub fn is_admissible(f: &Field, g: &Poly, e_e: &Poly) -> bool {
    g.is_separable(f) && Poly::gcd(f, g, e_e).is_ok_and(|h| h.degree() == Some(0))
}

fn line_point(f: &Field, s1: &[Elem], s2: &[Elem], gamma: Elem) -> Vec<Elem> {
    // γ σ1 + (1 - γ) σ2 = σ2 + γ (σ1 - σ2)
    s1.iter()
        .zip(s2)
        .map(|(&a, &b)| b + f.mul(gamma, a - b))
        .collect()
}

/// Picks `σ_γ = γ σ1 + (1 - γ) σ2` for the first `γ ∈ Y` whose locator is
/// admissible, `|Y| = 2(s + t) + 1`.
pub fn disambiguate_sigma(
    f: &Field,
    sigma1: &[Elem],
    sigma2: &[Elem],
    e_e: &Poly,
) -> Result<Vec<Elem>, DecodeError> {
    let count = 2 * (sigma1.len() + e_e.degree().unwrap_or(0)) + 1;
    gamma_set(f, count)
        .into_iter()
        .map(|g| line_point(f, sigma1, sigma2, g))
        .find(|s| is_admissible(f, &Poly::monic_from_sigma(s), e_e))
        .ok_or(DecodeError::NoSeparableCandidate)
}

/// Non-erased positions whose evaluation point is a root of `g`. Parity rows
/// beyond `r` have no codeword position, so roots there are ignored.
pub fn locate(code: &EcCode, g: &Poly, erased: &[usize]) -> Vec<usize> {
    let f = code.field();
    let mut is_erased = vec![false; code.n()];
    for &i in erased {
        is_erased[i] = true;
    }
    (0..code.n())
        .filter(|&i| !is_erased[i] && g.eval(f, code.position_point(i)).is_zero())
        .collect()
}

/// Solves `Σ_(i ∈ positions) e_i h_i = S`, dropping zero magnitudes.
pub fn solve_magnitudes(
    code: &EcCode,
    syndrome: &[Elem],
    positions: &[usize],
) -> Result<Vec<(usize, Elem)>, DecodeError> {
    check_len(code.v(), syndrome.len())?;
    if positions.is_empty() {
        return if syndrome.iter().all(|e| e.is_zero()) {
            Ok(Vec::new())
        } else {
            Err(DecodeError::MagnitudeInconsistent)
        };
    }
    let h = code.parity_check();
    let cols = h.select(&(0..code.v()).collect::<Vec<_>>(), positions);
    match cols.solve(code.field(), syndrome).expect("shapes agree") {
        LinearSolution::Unique(x) => Ok(positions
            .iter()
            .zip(x)
            .filter(|(_, e)| !e.is_zero())
            .map(|(&p, e)| (p, e))
            .collect()),
        _ => Err(DecodeError::MagnitudeInconsistent),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Known bound `s0` on the number of errors. Defaults to
    /// `⌊(v - t) / 2⌋`. A smaller bound shrinks the locator degree and adds
    /// rows to the F-system.
    pub max_errors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    pub syndrome: Vec<Elem>,
    /// `S_w / d_w`; equal to `syndrome` for plain Cauchy codes.
    pub normalized_syndrome: Vec<Elem>,
    pub erased: Vec<usize>,
    pub erasure_locator: Poly,
    /// Error budget `s` used for the locator degree.
    pub budget: usize,
    pub f_system: Option<FSystem>,
    pub ambiguous: bool,
    pub sigma: Vec<Elem>,
    pub locator: Poly,
    pub located: Vec<usize>,
    pub magnitudes: Vec<(usize, Elem)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub codeword: Vec<Elem>,
    /// `ĉ - z(c')`, nonzero on corrected errors and filled erasures.
    pub error: Vec<Elem>,
    pub trace: DecodeTrace,
}

impl Decoded {
    /// Positions corrected outside the erasure set.
    pub fn error_positions(&self) -> Vec<usize> {
        self.trace
            .magnitudes
            .iter()
            .map(|&(p, _)| p)
            .filter(|p| !self.trace.erased.contains(p))
            .collect()
    }
}

/// Decodes a received word with erasures marked as `None`.
pub fn decode(
    code: &EcCode,
    word: &[Symbol],
    opts: &DecodeOptions,
) -> Result<Decoded, DecodeError> {
    check_len(code.n(), word.len())?;
    let received = zero_filled(word);
    let erased = erased_positions(word);
    let syndrome = code.syndrome_of(&received);
    decode_with_syndrome(code, &received, &erased, &syndrome, opts)
}

/// Decodes given an externally computed syndrome, e.g. one assembled from
/// several hierarchical blocks. `received` has erasures zero-filled.
pub fn decode_with_syndrome(
    code: &EcCode,
    received: &[Elem],
    erased: &[usize],
    syndrome: &[Elem],
    opts: &DecodeOptions,
) -> Result<Decoded, DecodeError> {
    let f = code.field();
    let (n, v) = (code.n(), code.v());
    check_len(n, received.len())?;
    check_len(v, syndrome.len())?;
    let mut erased = erased.to_vec();
    erased.sort_unstable();
    erased.dedup();
    if erased.last().is_some_and(|&i| i >= n) {
        return Err(DecodeError::BadIndexSet("erasure outside the word".into()));
    }
    let t = erased.len();
    if t > v {
        return Err(DecodeError::BudgetExceeded { s: 0, t, v });
    }
    let full = (v - t) / 2;
    let s = opts.max_errors.unwrap_or(full);
    if s > full {
        return Err(DecodeError::BudgetExceeded { s, t, v });
    }

    let e_e = erasure_locator(code, &erased);
    let normalized = normalize_syndrome(code, syndrome);
    let mut trace = DecodeTrace {
        syndrome: syndrome.to_vec(),
        normalized_syndrome: normalized.clone(),
        erased: erased.clone(),
        erasure_locator: e_e.clone(),
        budget: s,
        f_system: None,
        ambiguous: false,
        sigma: Vec::new(),
        locator: Poly::one(),
        located: Vec::new(),
        magnitudes: Vec::new(),
    };
    if syndrome.iter().all(|x| x.is_zero()) {
        // Within the budget the only error explaining S = 0 is e = 0.
        return Ok(Decoded {
            codeword: received.to_vec(),
            error: vec![Elem::ZERO; n],
            trace,
        });
    }

    let sys = build_f_system(f, &code.params().b, &normalized, &e_e, s, &default_w0(s, t))?;
    let solution = solve_sigma(f, &sys);
    trace.f_system = Some(sys);

    let attempt = |sigma: Vec<Elem>, trace: &mut DecodeTrace| {
        let g = Poly::monic_from_sigma(&sigma);
        let located = locate(code, &g, &erased);
        trace.sigma = sigma;
        trace.locator = g;
        trace.located = located.clone();
        finish(code, received, &erased, syndrome, s, located, trace)
    };

    match solution {
        SigmaSolution::Inconsistent => Err(DecodeError::InconsistentLocator),
        SigmaSolution::Unique(sigma) => {
            let (codeword, error) = attempt(sigma, &mut trace)?;
            Ok(Decoded {
                codeword,
                error,
                trace,
            })
        }
        SigmaSolution::Ambiguous { particular, kernel } => {
            trace.ambiguous = true;
            let mut directions = kernel.clone();
            if kernel.len() > 1 {
                directions.push((0..s).map(|j| kernel.iter().map(|k| k[j]).sum()).collect());
            }
            let count = 2 * (s + t) + 1;
            let mut last = DecodeError::NoSeparableCandidate;
            for dir in &directions {
                let sigma1: Vec<Elem> = particular.iter().zip(dir).map(|(&a, &b)| a + b).collect();
                for gamma in gamma_set(f, count) {
                    let sigma = line_point(f, &sigma1, &particular, gamma);
                    if !is_admissible(f, &Poly::monic_from_sigma(&sigma), &e_e) {
                        continue;
                    }
                    match attempt(sigma, &mut trace) {
                        Ok((codeword, error)) => {
                            return Ok(Decoded {
                                codeword,
                                error,
                                trace,
                            })
                        }
                        Err(e) => last = e,
                    }
                }
            }
            Err(last)
        }
    }
}

fn finish(
    code: &EcCode,
    received: &[Elem],
    erased: &[usize],
    syndrome: &[Elem],
    budget: usize,
    located: Vec<usize>,
    trace: &mut DecodeTrace,
) -> Result<(Vec<Elem>, Vec<Elem>), DecodeError> {
    if located.len() > budget {
        return Err(DecodeError::TooManyLocated {
            located: located.len(),
            budget,
        });
    }
    let mut positions = located;
    positions.extend_from_slice(erased);
    positions.sort_unstable();
    let mags = solve_magnitudes(code, syndrome, &positions)?;
    let mut error = vec![Elem::ZERO; code.n()];
    let mut check = vec![Elem::ZERO; code.v()];
    for &(p, e) in &mags {
        error[p] = e;
        code.accumulate_column(&mut check, p, e);
    }
    if check != syndrome {
        return Err(DecodeError::ResidualSyndrome);
    }
    trace.magnitudes = mags;
    let codeword = received.iter().zip(&error).map(|(&c, &e)| c + e).collect();
    Ok((codeword, error))
}

fn check_len(expected: usize, got: usize) -> Result<(), DecodeError> {
    if expected == got {
        Ok(())
    } else {
        Err(DecodeError::LengthMismatch { expected, got })
    }
}
