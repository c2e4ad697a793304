use super::{Elem, Field, FieldError};

/// Polynomial over GF(2^m), coefficients stored low degree first.
///
/// Always trimmed: the last coefficient is nonzero unless the polynomial is
/// zero, in which case the coefficient vector is empty and [`Poly::degree`]
/// returns `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Elem::ONE],
        }
    }

    pub fn constant(c: Elem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// Builds from low-first coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `X - root` (= `X + root` in characteristic 2).
    pub fn linear(root: Elem) -> Self {
        Poly {
            coeffs: vec![root, Elem::ONE],
        }
    }

    /// Monic polynomial `∏ (X - r)` over the given roots.
    pub fn from_roots(f: &Field, roots: impl IntoIterator<Item = Elem>) -> Self {
        roots
            .into_iter()
            .fold(Poly::one(), |acc, r| acc.mul(f, &Poly::linear(r)))
    }

    /// Monic `X^s + σ_1 X^(s-1) + ... + σ_s`.
    pub fn monic_from_sigma(sigma: &[Elem]) -> Self {
        let mut coeffs: Vec<Elem> = sigma.iter().rev().copied().collect();
        coeffs.push(Elem::ONE);
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Elem::ONE
    }

    pub fn eval(&self, f: &Field, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.mul(acc, x) + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_default()
                    + other.coeffs.get(i).copied().unwrap_or_default()
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, f: &Field, c: Elem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += f.mul(a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder of division by a nonzero divisor.
    pub fn div_rem(&self, f: &Field, divisor: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivideByZero)?;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[i - dd] = factor;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= f.mul(factor, d);
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Scales to leading coefficient 1. The zero polynomial stays zero.
    pub fn monic(&self, f: &Field) -> Poly {
        match f.inv(self.leading()) {
            Ok(li) => self.scale(f, li),
            Err(_) => Poly::zero(),
        }
    }

    /// Formal derivative. In characteristic 2 every even-power term vanishes.
    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { Elem::ZERO })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(f: &Field, a: &Poly, b: &Poly) -> Result<Poly, FieldError> {
        if a.is_zero() && b.is_zero() {
            return Err(FieldError::BothZero);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(f, &y)?;
            x = y;
            y = r;
        }
        Ok(x.monic(f))
    }

    /// True when the polynomial has no repeated root in the algebraic closure,
    /// i.e. `gcd(p, p')` is a constant.
    pub fn is_separable(&self, f: &Field) -> bool {
        match Poly::gcd(f, self, &self.derivative()) {
            Ok(g) => g.degree() == Some(0),
            Err(_) => false,
        }
    }

    /// The candidates at which the polynomial vanishes, in candidate order.
    pub fn roots_in(&self, f: &Field, candidates: &[Elem]) -> Result<Vec<Elem>, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        Ok(candidates
            .iter()
            .copied()
            .filter(|&x| self.eval(f, x).is_zero())
            .collect())
    }
}
