use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element of Q(ζ_r): `(num[0] + num[1] ζ + … + num[r-2] ζ^{r-2}) / den`.
///
/// Kept normalized: `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    r: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    pub fn zero(r: u32) -> Self {
        FieldElement { r, num: vec![BigInt::zero(); r as usize - 1], den: BigInt::one() }
    }

    pub fn one(r: u32) -> Self {
        Self::from_int(r, 1)
    }

    pub fn from_int(r: u32, n: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(r);
        x.num[0] = n.into();
        x
    }

    pub fn from_rational(r: u32, q: &BigRational) -> Self {
        let mut x = Self::zero(r);
        x.num[0] = q.numer().clone();
        x.den = q.denom().clone();
        x.normalize();
        x
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(r: u32, k: i64) -> Self {
        let mut full = vec![BigInt::zero(); r as usize];
        full[k.rem_euclid(r as i64) as usize] = BigInt::one();
        Self::from_full(r, full, BigInt::one())
    }

    /// ζ^k + ζ^{-k}.
    pub fn trace_unit(r: u32, k: i64) -> Self {
        &Self::zeta_pow(r, k) + &Self::zeta_pow(r, -k)
    }

    /// From power-basis coordinates (length r-1) and a nonzero denominator.
    pub fn from_coeffs(r: u32, num: Vec<BigInt>, den: BigInt) -> Result<Self> {
        if num.len() != r as usize - 1 {
            return Err(Error::InvalidParameter(format!("expected {} coordinates, got {}", r - 1, num.len())));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut x = FieldElement { r, num, den };
        x.normalize();
        Ok(x)
    }

    /// From a length-r vector over 1, ζ, …, ζ^{r-1}; reduces with ζ^{r-1} = -(1 + … + ζ^{r-2}).
    pub fn from_full(r: u32, mut full: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(full.len(), r as usize);
        let top = full.pop().unwrap();
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        let mut x = FieldElement { r, num: full, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in self.num.iter_mut() {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// Integer power-basis coordinates, i.e. membership in Z[ζ].
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Fixed by ζ ↦ ζ^{-1}.
    pub fn is_totally_real(&self) -> bool {
        let r = self.r as usize;
        let e = |i: usize| if i == r - 1 { BigInt::zero() } else { self.num[i].clone() };
        (1..r).all(|i| e(i) == e(r - i))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.r == other.r {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.r, other.r))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            let mut x = FieldElement { r: self.r, num, den: self.den.clone() };
            x.normalize();
            return Ok(x);
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        let mut x = FieldElement { r: self.r, num, den: &self.den * &other.den };
        x.normalize();
        Ok(x)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.r as usize;
        let mut full = vec![BigInt::zero(); r];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % r] += a * b;
                }
            }
        }
        Ok(Self::from_full(self.r, full, &self.den * &other.den))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * k.numer()).collect();
        let mut x = FieldElement { r: self.r, num, den: &self.den * k.denom() };
        x.normalize();
        x
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    /// σ_a : ζ ↦ ζ^a.
    pub fn galois(&self, a: i64) -> Result<Self> {
        let r = self.r as i64;
        let a = a.rem_euclid(r);
        if a == 0 {
            return Err(Error::NotAUnit(a, self.r));
        }
        let mut full = vec![BigInt::zero(); r as usize];
        for (i, c) in self.num.iter().enumerate() {
            full[((a * i as i64) % r) as usize] = c.clone();
        }
        Ok(Self::from_full(self.r, full, self.den.clone()))
    }

    /// Norm from Q(ζ) to Q.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for a in 2..self.r as i64 {
            acc = &acc * &self.galois(a).unwrap();
        }
        acc.to_rational().expect("norm is rational")
    }

    /// Norm from K⁺ to Q; errors unless the element is totally real.
    pub fn norm_kplus(&self) -> Result<BigRational> {
        if !self.is_totally_real() {
            return Err(Error::NotTotallyReal);
        }
        let mut acc = self.clone();
        for a in 2..=(self.r as i64 - 1) / 2 {
            acc = &acc * &self.galois(a)?;
        }
        Ok(acc.to_rational().expect("norm is rational"))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(self.r, &q.recip()));
        }
        let mut rest = Self::one(self.r);
        for a in 2..self.r as i64 {
            rest = &rest * &self.galois(a)?;
        }
        let n = (self * &rest).to_rational().expect("norm is rational");
        Ok(rest.scale(&n.recip()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.r);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Pow(i64),
}

/// Single entry point for the four field operations.
pub fn field_arith(op: ArithOp, x: &FieldElement, y: Option<&FieldElement>) -> Result<FieldElement> {
    let need = || y.ok_or_else(|| Error::InvalidParameter("second operand required".into()));
    match op {
        ArithOp::Add => x.try_add(need()?),
        ArithOp::Mul => x.try_mul(need()?),
        ArithOp::Inv => x.inv(),
        ArithOp::Pow(e) => x.pow(e),
    }
}

pub fn galois_apply(a: i64, x: &FieldElement) -> Result<FieldElement> {
    x.galois(a)
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                self.$try(rhs).expect("field context mismatch")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { r: self.r, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    /// `[c0,c1,…]` or `[c0,c1,…]/den` over the ζ power basis.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.num.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(r: u32, k: i64) -> FieldElement {
        FieldElement::zeta_pow(r, k)
    }

    #[test]
    fn zeta_to_the_r_is_one() {
        assert!(z(7, 1).pow(7).unwrap().is_one());
        assert_eq!(z(7, 3).pow(-1).unwrap(), z(7, 4));
    }

    #[test]
    fn theta_minimal_polynomial_r7() {
        // oracle: expand powers of ζ+ζ^{-1} and reduce mod Φ_7 by hand
        let t = FieldElement::trace_unit(7, 1);
        let t2 = &t * &t;
        let t3 = &t2 * &t;
        let one = FieldElement::one(7);
        let v = t3 + t2 - t.scale_int(&BigInt::from(2)) - one;
        assert!(v.is_zero());
    }

    #[test]
    fn one_minus_zeta_inverse() {
        let x = FieldElement::one(7) - z(7, 1);
        let y = field_arith(ArithOp::Inv, &x, None).unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(x.norm(), BigRational::from_integer(7.into()));
    }

    #[test]
    fn galois_inverse_map() {
        let x = z(7, 1) + z(7, 2);
        assert_eq!(galois_apply(-1, &x).unwrap(), z(7, -1) + z(7, -2));
        assert!(galois_apply(7, &x).is_err());
        let t = FieldElement::trace_unit(13, 1);
        assert_eq!(t.galois(8).unwrap(), FieldElement::trace_unit(13, 5));
    }

    #[test]
    fn errors() {
        assert_eq!(FieldElement::zero(7).inv(), Err(Error::DivisionByZero));
        assert_eq!(z(7, 1).try_add(&z(11, 1)), Err(Error::ContextMismatch(7, 11)));
    }

    #[test]
    fn totally_real_predicate() {
        assert!(FieldElement::trace_unit(11, 3).is_totally_real());
        assert!(!z(11, 3).is_totally_real());
        assert!(FieldElement::from_int(11, 5).is_totally_real());
    }
}
