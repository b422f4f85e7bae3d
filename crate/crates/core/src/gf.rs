//! Arithmetic over GF(2^λ) with precomputed multiplication and inverse tables.
//!
//! Elements are represented in polynomial basis as the integers `0..q`, bit `k`
//! holding the coefficient of `x^k`. The reduction polynomial for each λ is the
//! numerically smallest irreducible polynomial of that degree, so a field is
//! fully determined by λ.

use crate::error::{Error, Result};

/// A field element. Fields are limited to q ≤ 256.
pub type Symbol = u8;

/// The finite field GF(2^λ), 2 ≤ λ ≤ 8.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldGf {
    lambda: u32,
    q: usize,
    poly: u32,
    mul: Vec<Symbol>,
    inv: Vec<Symbol>,
}

impl std::fmt::Debug for FieldGf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldGf")
            .field("lambda", &self.lambda)
            .field("q", &self.q)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

/// Carry-less product of two polynomials over GF(2).
fn clmul(a: u32, b: u32) -> u32 {
    let mut acc = 0;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

/// Remainder of `a` modulo `m` over GF(2)[x].
fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

fn is_irreducible(p: u32) -> bool {
    let d = degree(p);
    // Trial division by every polynomial of degree 1..=d/2.
    (2u32..(1 << (d / 2 + 1))).all(|f| poly_rem(p, f) != 0)
}

/// Numerically smallest irreducible polynomial of degree `lambda`.
pub fn smallest_irreducible(lambda: u32) -> u32 {
    ((1u32 << lambda)..(1u32 << (lambda + 1)))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

impl FieldGf {
    /// Builds GF(2^λ) with the smallest irreducible reduction polynomial.
    pub fn new(lambda: u32) -> Result<Self> {
        if !(1..=8).contains(&lambda) {
            return Err(Error::UnsupportedField(lambda));
        }
        let poly = smallest_irreducible(lambda);
        let q = 1usize << lambda;
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = poly_rem(clmul(a as u32, b as u32), poly) as Symbol;
            }
        }
        let mut inv = vec![0; q];
        for a in 1..q {
            inv[a] = (1..q)
                .find(|&b| mul[a * q + b] == 1)
                .expect("nonzero elements are invertible in a field") as Symbol;
        }
        Ok(Self {
            lambda,
            q,
            poly,
            mul,
            inv,
        })
    }

    /// Field with q elements; q must be a power of two in 2..=256.
    pub fn with_order(q: usize) -> Result<Self> {
        if !q.is_power_of_two() {
            return Err(Error::UnsupportedField(q.trailing_zeros()));
        }
        Self::new(q.trailing_zeros())
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Reduction polynomial as a bitmask including the leading term.
    pub fn poly(&self) -> u32 {
        self.poly
    }

    fn check(&self, a: Symbol) -> Result<()> {
        if (a as usize) < self.q {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                value: a as u32,
                q: self.q as u32,
            })
        }
    }

    pub fn add(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        self.check(a)?;
        self.check(b)?;
        Ok(a ^ b)
    }

    pub fn mul(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    /// Table lookup without range checks. Both operands must be `< q`.
    #[inline]
    pub fn mul_unchecked(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn inv_unchecked(&self, a: Symbol) -> Symbol {
        self.inv[a as usize]
    }

    /// `a / b` for nonzero `b`, unchecked.
    #[inline]
    pub fn div_unchecked(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul_unchecked(a, self.inv[b as usize])
    }

    /// Iterator over the nonzero elements `1..q`.
    pub fn nonzero(&self) -> impl Iterator<Item = Symbol> + Clone {
        (1..self.q).map(|a| a as Symbol)
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Symbol) -> Result<usize> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul_unchecked(x, a);
            k += 1;
        }
        Ok(k)
    }
}
