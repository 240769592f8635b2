//! Binary forms over Q(ζ_r) and Weierstrass invariants over any exact ring.

use crate::numfield::{FieldElement, PrimeIdeal, ResidueField};
use crate::numfield::residue::Fe;
use crate::error::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// Minimal exact-ring interface used by the Weierstrass formulas.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn int_like(&self, n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;

    fn zero_like(&self) -> Self {
        self.int_like(0)
    }
    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }
    fn times(&self, n: i64) -> Self {
        self.mul(&self.int_like(n))
    }
    fn square(&self) -> Self {
        self.mul(self)
    }
}

impl Ring for BigInt {
    fn int_like(&self, n: i64) -> Self {
        BigInt::from(n)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Ring for BigRational {
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Ring for FieldElement {
    fn int_like(&self, n: i64) -> Self {
        FieldElement::from_int(self.r(), n)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
}

/// Homogeneous form Σ c_i x^{n−i} y^i over Q(ζ_r). The zero form has no
/// coefficients and no degree.
#[derive(Clone, PartialEq)]
pub struct BinaryForm {
    r: u32,
    coeffs: Vec<FieldElement>,
}

/// u·x² + v·xy + w·y².
pub type QuadraticForm = BinaryForm;

impl BinaryForm {
    pub fn new(r: u32, coeffs: Vec<FieldElement>) -> Self {
        let mut f = BinaryForm { r, coeffs };
        f.normalize();
        f
    }

    pub fn zero(r: u32) -> Self {
        BinaryForm { r, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        BinaryForm::new(c.r(), vec![c])
    }

    /// x + y.
    pub fn sum_xy(r: u32) -> Self {
        BinaryForm::new(r, vec![FieldElement::one(r), FieldElement::one(r)])
    }

    /// u x² + v xy + w y².
    pub fn quadratic(u: FieldElement, v: FieldElement, w: FieldElement) -> Self {
        let r = u.r();
        BinaryForm::new(r, vec![u, v, w])
    }

    /// f_k = x² + (ζ^k + ζ^{−k}) xy + y².
    pub fn f_k(r: u32, k: i64) -> Self {
        Self::quadratic(FieldElement::one(r), FieldElement::trace_unit(r, k), FieldElement::one(r))
    }

    fn normalize(&mut self) {
        if self.coeffs.iter().all(FieldElement::is_zero) {
            self.coeffs.clear();
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn degree(&self) -> Option<usize> {
        (!self.coeffs.is_empty()).then(|| self.coeffs.len() - 1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn u(&self) -> FieldElement {
        self.coeff(0)
    }
    pub fn v(&self) -> FieldElement {
        self.coeff(1)
    }
    pub fn w(&self) -> FieldElement {
        self.coeff(2)
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FieldElement::zero(self.r))
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        BinaryForm::new(self.r, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> Result<FieldElement>) -> Result<Self> {
        Ok(BinaryForm::new(self.r, self.coeffs.iter().map(f).collect::<Result<_>>()?))
    }

    pub fn galois(&self, a: i64) -> Result<Self> {
        self.map(|c| c.galois(a))
    }

    pub fn eval(&self, a: &BigInt, b: &BigInt) -> FieldElement {
        let n = match self.degree() {
            None => return FieldElement::zero(self.r),
            Some(n) => n,
        };
        let mut acc = FieldElement::zero(self.r);
        let mut apow = vec![BigInt::one()];
        let mut bpow = vec![BigInt::one()];
        for i in 1..=n {
            apow.push(&apow[i - 1] * a);
            bpow.push(&bpow[i - 1] * b);
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = &apow[n - i] * &bpow[i];
            if !Zero::is_zero(&m) && !c.is_zero() {
                acc = &acc + &c.scale_int(&m);
            }
        }
        acc
    }

    /// Rational coefficients, when every coefficient is rational.
    pub fn rational_coeffs(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(FieldElement::to_rational).collect()
    }

    /// Integer coefficients, when every coefficient is a rational integer.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(FieldElement::to_integer).collect()
    }

    /// Coefficients reduced modulo P.
    pub fn reduce(&self, p: &PrimeIdeal) -> Result<ResidueForm> {
        Ok(ResidueForm { coeffs: self.coeffs.iter().map(|c| p.reduce(c)).collect::<Result<_>>()? })
    }
}

impl Ring for BinaryForm {
    fn int_like(&self, n: i64) -> Self {
        if n == 0 {
            BinaryForm::zero(self.r)
        } else {
            BinaryForm::constant(FieldElement::from_int(self.r, n))
        }
    }

    fn add(&self, o: &Self) -> Self {
        match (self.degree(), o.degree()) {
            (None, _) => o.clone(),
            (_, None) => self.clone(),
            (Some(m), Some(n)) => {
                assert_eq!(m, n, "adding binary forms of different degrees");
                BinaryForm::new(self.r, self.coeffs.iter().zip(&o.coeffs).map(|(x, y)| x + y).collect())
            }
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn neg(&self) -> Self {
        BinaryForm { r: self.r, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let (m, n) = match (self.degree(), o.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return BinaryForm::zero(self.r),
        };
        let mut out = vec![FieldElement::zero(self.r); m + n + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] = &out[i + j] + &(x * y);
                }
            }
        }
        BinaryForm::new(self.r, out)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self.degree() {
            None => return write!(f, "0"),
            Some(n) => n,
        };
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            match n - i {
                0 => {}
                1 => write!(f, "*x")?,
                e => write!(f, "*x^{e}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "*y")?,
                e => write!(f, "*y^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A binary form with coefficients in a residue field.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueForm {
    coeffs: Vec<Fe>,
}

impl ResidueForm {
    pub fn eval(&self, k: &ResidueField, x: &Fe, y: &Fe) -> Fe {
        let mut acc = k.zero();
        let n = match self.coeffs.len() {
            0 => return acc,
            l => l - 1,
        };
        // Horner in x with y-powers accumulated from the right
        let mut ypow = k.one();
        let mut terms = Vec::with_capacity(n + 1);
        for i in 0..=n {
            terms.push(ypow);
            if i < n {
                ypow = k.mul(&ypow, y);
            }
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = k.add(&k.mul(&acc, x), &k.mul(c, &terms[i]));
        }
        acc
    }
}

/// Generic long Weierstrass model [a1, a2, a3, a4, a6].
#[derive(Clone, Debug, PartialEq)]
pub struct Weierstrass<S> {
    pub a1: S,
    pub a2: S,
    pub a3: S,
    pub a4: S,
    pub a6: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invariants<S> {
    pub b2: S,
    pub b4: S,
    pub b6: S,
    pub b8: S,
    pub c4: S,
    pub c6: S,
    pub disc: S,
}

impl<S> Weierstrass<S> {
    pub fn new(a1: S, a2: S, a3: S, a4: S, a6: S) -> Self {
        Weierstrass { a1, a2, a3, a4, a6 }
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Weierstrass<T> {
        Weierstrass { a1: f(&self.a1), a2: f(&self.a2), a3: f(&self.a3), a4: f(&self.a4), a6: f(&self.a6) }
    }

    pub fn try_map<T>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Weierstrass<T>> {
        Ok(Weierstrass { a1: f(&self.a1)?, a2: f(&self.a2)?, a3: f(&self.a3)?, a4: f(&self.a4)?, a6: f(&self.a6)? })
    }
}

impl<S: Ring> Weierstrass<S> {
    /// Y² = X³ + a2 X² + a4 X + a6.
    pub fn short(a2: S, a4: S, a6: S) -> Self {
        let z = a2.zero_like();
        Weierstrass { a1: z.clone(), a2, a3: z, a4, a6 }
    }

    pub fn invariants(&self) -> Invariants<S> {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = a1.square().add(&a2.times(4));
        let b4 = a1.mul(a3).add(&a4.times(2));
        let b6 = a3.square().add(&a6.times(4));
        let b8 = a1
            .square()
            .mul(a6)
            .add(&a2.mul(a6).times(4))
            .sub(&a1.mul(a3).mul(a4))
            .add(&a2.mul(&a3.square()))
            .sub(&a4.square());
        let c4 = b2.square().sub(&b4.times(24));
        let c6 = b2.mul(&b4).times(36).sub(&b2.square().mul(&b2)).sub(&b6.times(216));
        let disc = b2
            .mul(&b4)
            .mul(&b6)
            .times(9)
            .sub(&b2.square().mul(&b8))
            .sub(&b4.square().mul(&b4).times(8))
            .sub(&b6.square().times(27));
        Invariants { b2, b4, b6, b8, c4, c6, disc }
    }
}

impl<S: Ring> Invariants<S> {
    /// c4³ − c6² − 1728Δ; zero for every model.
    pub fn syzygy_defect(&self) -> S {
        self.c4.square().mul(&self.c4).sub(&self.c6.square()).sub(&self.disc.times(1728))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_quadratic_factors_r7() {
        let r = 7;
        let prod = (1..=3).map(|k| BinaryForm::f_k(r, k)).reduce(|a, b| a.mul(&b)).unwrap();
        let c = prod.integer_coeffs().unwrap();
        let expect: Vec<BigInt> = [1, -1, 1, -1, 1, -1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(c, expect);
    }

    #[test]
    fn eval_matches_expansion() {
        let f = BinaryForm::f_k(7, 2);
        let (a, b) = (BigInt::from(3), BigInt::from(-5));
        let direct = FieldElement::from_int(7, 9 + 25) + FieldElement::trace_unit(7, 2).scale_int(&BigInt::from(-15));
        assert_eq!(f.eval(&a, &b), direct);
        assert_eq!(BinaryForm::zero(7).eval(&a, &b), FieldElement::zero(7));
    }

    #[test]
    fn syzygy_over_integers() {
        let e = Weierstrass::new(1i64, -1, 1, -3, 5).map(|&x| BigInt::from(x));
        let inv = e.invariants();
        assert!(Ring::is_zero(&inv.syzygy_defect()));
        // 37a1: y² + y = x³ − x has Δ = 37
        let e = Weierstrass::new(0i64, 0, 1, -1, 0).map(|&x| BigInt::from(x));
        assert_eq!(e.invariants().disc, BigInt::from(37));
    }

    #[test]
    fn residue_form_eval() {
        let k = ResidueField::prime(13);
        let f = ResidueForm { coeffs: vec![k.from_int(1), k.from_int(2), k.from_int(3)] };
        // 1·4 + 2·2·5 + 3·25 = 99 ≡ 8
        assert_eq!(f.eval(&k, &k.from_int(2), &k.from_int(5)), k.from_int(8));
    }
}
