//! Arithmetic in GF(2^m) for 1 <= m <= 16.
//!
//! Elements are stored in the polynomial basis: bit `i` of an [`Elem`] is the
//! coefficient of `β^i`, where `β` is a root of the field's primitive
//! polynomial. Multiplication and inversion go through log/antilog tables built
//! once per [`Field`]; a `Field` is a cheap handle around shared immutable
//! tables and can be cloned freely across threads.

mod poly;

pub use poly::Poly;

use std::fmt;
use std::ops::{Add, AddAssign, Sub, SubAssign};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} outside 1..=16")]
    BadDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    PolyDegree { m: u32, poly: u32 },
    #[error("polynomial {poly:#x} is not primitive (root has order {order})")]
    NotPrimitive { poly: u32, order: usize },
    #[error("division by zero")]
    DivideByZero,
    #[error("value {value} is not an element of GF(2^{m})")]
    OutOfRange { value: u32, m: u32 },
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
}

/// A field element in polynomial-basis representation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Wraps a raw value. Range is not checked; use [`Field::elem`] for that.
    #[inline]
    pub const fn from_raw(value: u16) -> Self {
        Elem(value)
    }

    #[inline]
    pub const fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

// Characteristic 2: addition and subtraction are both XOR.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for Elem {
    type Output = Elem;
    #[inline]
    fn add(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for Elem {
    type Output = Elem;
    #[inline]
    fn sub(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for Elem {
    #[inline]
    fn add_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl SubAssign for Elem {
    #[inline]
    fn sub_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for Elem {
    fn sum<I: Iterator<Item = Elem>>(iter: I) -> Elem {
        iter.fold(Elem::ZERO, |a, b| a + b)
    }
}

struct Tables {
    m: u32,
    prim_poly: u32,
    /// `exp[i] = β^i`, doubled in length so `exp[log a + log b]` never wraps.
    exp: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u16>,
}

/// GF(2^m) arithmetic context.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("m", &self.t.m)
            .field("prim_poly", &format_args!("{:#x}", self.t.prim_poly))
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.t.m == other.t.m && self.t.prim_poly == other.t.prim_poly
    }
}

impl Eq for Field {}

/// Default primitive polynomials, indexed by `m - 1`. The m = 4 entry is
/// X^4 + X + 1.
const DEFAULT_POLYS: [u32; 16] = [
    0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x89, 0x11d, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x4443,
    0x8003, 0x1100b,
];

/// The default primitive polynomial for degree `m`, if `m` is supported.
pub fn default_prim_poly(m: u32) -> Option<u32> {
    (1..=MAX_DEGREE)
        .contains(&m)
        .then(|| DEFAULT_POLYS[(m - 1) as usize])
}

impl Field {
    /// Builds GF(2^m) from the bitmask of a degree-`m` polynomial over GF(2)
    /// (bit `i` = coefficient of `X^i`). The polynomial must be primitive.
    pub fn new(m: u32, prim_poly: u32) -> Result<Field, FieldError> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(FieldError::BadDegree(m));
        }
        if prim_poly >> m != 1 {
            return Err(FieldError::PolyDegree { m, poly: prim_poly });
        }
        let q = 1usize << m;
        let mut exp = vec![0u16; 2 * q];
        let mut log = vec![0u16; q];
        let mut x: u32 = 1;
        let mut order = 0usize;
        loop {
            if order >= q - 1 {
                break;
            }
            exp[order] = x as u16;
            log[x as usize] = order as u16;
            order += 1;
            x <<= 1;
            if x & (q as u32) != 0 {
                x ^= prim_poly;
            }
            if x == 1 {
                break;
            }
        }
        if order != q - 1 || x != 1 {
            return Err(FieldError::NotPrimitive {
                poly: prim_poly,
                order,
            });
        }
        for i in (q - 1)..(2 * q) {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(Field {
            t: Arc::new(Tables {
                m,
                prim_poly,
                exp,
                log,
            }),
        })
    }

    /// GF(2^m) with the default primitive polynomial.
    pub fn with_default_poly(m: u32) -> Result<Field, FieldError> {
        let poly = default_prim_poly(m).ok_or(FieldError::BadDegree(m))?;
        Field::new(m, poly)
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.t.m
    }

    /// Field size q = 2^m.
    #[inline]
    pub fn order(&self) -> usize {
        1 << self.t.m
    }

    #[inline]
    pub fn prim_poly(&self) -> u32 {
        self.t.prim_poly
    }

    /// Range-checked element constructor.
    pub fn elem(&self, value: u32) -> Result<Elem, FieldError> {
        if (value as usize) < self.order() {
            Ok(Elem(value as u16))
        } else {
            Err(FieldError::OutOfRange { value, m: self.t.m })
        }
    }

    /// `β^i` for any integer exponent.
    #[inline]
    pub fn exp(&self, i: i64) -> Elem {
        let n = (self.order() - 1) as i64;
        Elem(self.t.exp[i.rem_euclid(n) as usize])
    }

    /// Discrete log base β; `None` for zero.
    #[inline]
    pub fn log(&self, x: Elem) -> Option<u32> {
        (!x.is_zero()).then(|| u32::from(self.t.log[x.0 as usize]))
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        x + y
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x.is_zero() || y.is_zero() {
            return Elem::ZERO;
        }
        let l = self.t.log[x.0 as usize] as usize + self.t.log[y.0 as usize] as usize;
        Elem(self.t.exp[l])
    }

    pub fn inv(&self, x: Elem) -> Result<Elem, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        let n = self.order() - 1;
        Ok(Elem(self.t.exp[n - self.t.log[x.0 as usize] as usize]))
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem, FieldError> {
        if y.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        if x.is_zero() {
            return Ok(Elem::ZERO);
        }
        let n = self.order() - 1;
        let l = self.t.log[x.0 as usize] as usize + n - self.t.log[y.0 as usize] as usize;
        Ok(Elem(self.t.exp[l]))
    }

    /// `x^e`; negative exponents invert. `0^0 = 1`.
    pub fn pow(&self, x: Elem, e: i64) -> Result<Elem, FieldError> {
        if e == 0 {
            return Ok(Elem::ONE);
        }
        if x.is_zero() {
            return if e > 0 {
                Ok(Elem::ZERO)
            } else {
                Err(FieldError::DivideByZero)
            };
        }
        let l = i64::from(self.t.log[x.0 as usize]);
        Ok(self.exp(l * e.rem_euclid((self.order() - 1) as i64)))
    }

    /// All q elements in ascending raw order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order()).map(|v| Elem(v as u16))
    }

    /// Nonzero elements `β^0, β^1, ..., β^(q-2)` in discrete-log order.
    pub fn powers(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order() - 1).map(move |i| Elem(self.t.exp[i]))
    }

    /// Coefficient string of `x` from `β^0` up to `β^(m-1)`; `β^4` in GF(2^4)
    /// with X^4+X+1 is `"1100"`.
    pub fn normal_form(&self, x: Elem) -> String {
        (0..self.t.m)
            .map(|i| if (x.0 >> i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Human-readable power notation: `0`, `1`, `b^k`.
    pub fn display(&self, x: Elem) -> String {
        match self.log(x) {
            None => "0".into(),
            Some(0) => "1".into(),
            Some(k) => format!("b^{k}"),
        }
    }
}
