use super::element::FieldElement;
use crate::arith;
use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Q(ζ_r) together with its real subfield K⁺ = Q(θ), θ = ζ + ζ^{-1}.
///
/// Immutable after construction; share it freely across threads.
#[derive(Debug, Clone)]
pub struct FieldContext {
    r: u32,
    d: usize,
    g: u64,
    /// Monic minimal polynomial of θ, low degree first (length d + 1).
    theta_minpoly: Vec<BigInt>,
    /// ζ^i + ζ^{-i} written in the θ power basis, i = 0..=d.
    u_theta: Vec<Vec<BigInt>>,
    theta_pows: Vec<FieldElement>,
}

impl FieldContext {
    pub fn new(r: u32) -> Result<Self> {
        if r < 5 || !arith::is_prime(r as u64) {
            return invalid(format!("r = {r} must be a prime >= 5"));
        }
        let d = (r as usize - 1) / 2;
        let g = arith::primitive_root(r as u64);
        let theta = FieldElement::trace_unit(r, 1);

        // Π_k (T − u_k) with field coefficients
        let mut poly = vec![FieldElement::one(r)];
        for k in 1..=d as i64 {
            let u = FieldElement::trace_unit(r, k);
            let mut next = vec![FieldElement::zero(r); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * &u);
            }
            poly = next;
        }
        let theta_minpoly: Vec<BigInt> = poly
            .iter()
            .map(|c| c.to_integer().expect("minimal polynomial of θ has integer coefficients"))
            .collect();

        let mut theta_pows = vec![FieldElement::one(r)];
        for _ in 1..d {
            let next = theta_pows.last().unwrap() * &theta;
            theta_pows.push(next);
        }

        let mut ctx = FieldContext { r, d, g, theta_minpoly, u_theta: Vec::new(), theta_pows };
        let mut u = vec![vec![BigInt::zero(); d], vec![BigInt::zero(); d]];
        u[0][0] = BigInt::from(2);
        if d > 1 {
            u[1][1] = BigInt::one();
        } else {
            u[1] = ctx.theta_reduce(vec![BigInt::zero(), BigInt::one()]);
        }
        for i in 1..d {
            let shifted = {
                let mut s = vec![BigInt::zero()];
                s.extend(u[i].iter().cloned());
                ctx.theta_reduce(s)
            };
            let next = shifted.iter().zip(&u[i - 1]).map(|(a, b)| a - b).collect();
            u.push(next);
        }
        ctx.u_theta = u;
        Ok(ctx)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn degree(&self) -> usize {
        self.r as usize - 1
    }

    /// [K⁺ : Q] = (r − 1)/2.
    pub fn kplus_degree(&self) -> usize {
        self.d
    }

    pub fn has_k0(&self) -> bool {
        self.r % 6 == 1
    }

    pub fn k0_degree(&self) -> Option<usize> {
        self.has_k0().then(|| (self.r as usize - 1) / 6)
    }

    pub fn has_k(&self) -> bool {
        self.r % 4 == 1
    }

    pub fn k_degree(&self) -> Option<usize> {
        self.has_k().then(|| (self.r as usize - 1) / 4)
    }

    /// Fixed primitive root g; σ = σ_g generates the Galois group.
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// g^m mod r.
    pub fn sigma_exponent(&self, m: u64) -> i64 {
        arith::pow_mod(self.g, m, self.r as u64) as i64
    }

    pub fn sigma(&self, x: &FieldElement, m: u64) -> Result<FieldElement> {
        x.galois(self.sigma_exponent(m))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.r)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.r)
    }

    pub fn int(&self, n: impl Into<BigInt>) -> FieldElement {
        FieldElement::from_int(self.r, n)
    }

    pub fn zeta(&self, k: i64) -> FieldElement {
        FieldElement::zeta_pow(self.r, k)
    }

    /// ζ^k + ζ^{-k}.
    pub fn u(&self, k: i64) -> FieldElement {
        FieldElement::trace_unit(self.r, k)
    }

    pub fn theta(&self) -> FieldElement {
        self.u(1)
    }

    /// z = −(ζ + ζ^{-1}); for r = 7 this is a root of z³ − z² − 2z + 1.
    pub fn z(&self) -> FieldElement {
        -self.theta()
    }

    pub fn theta_minpoly(&self) -> &[BigInt] {
        &self.theta_minpoly
    }

    /// Reduce an integer polynomial in θ modulo the minimal polynomial.
    pub fn theta_reduce(&self, mut c: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.d;
        while c.len() > d {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = c.len() - d;
            for i in 0..d {
                c[base + i] -= &top * &self.theta_minpoly[i];
            }
        }
        c.resize(d, BigInt::zero());
        c
    }

    pub fn theta_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        self.theta_reduce(c)
    }

    /// Coordinates in the basis 1, θ, …, θ^{d-1}.
    pub fn to_theta(&self, x: &FieldElement) -> Result<Vec<BigRational>> {
        if x.r() != self.r {
            return Err(Error::ContextMismatch(x.r(), self.r));
        }
        if !x.is_totally_real() {
            return Err(Error::NotTotallyReal);
        }
        let num = x.numerators();
        let mut acc = vec![BigInt::zero(); self.d];
        acc[0] += &num[0];
        for i in 1..=self.d {
            if num[i].is_zero() {
                continue;
            }
            for (a, u) in acc.iter_mut().zip(&self.u_theta[i]) {
                *a += &num[i] * u;
            }
        }
        Ok(acc.into_iter().map(|c| BigRational::new(c, x.denominator().clone())).collect())
    }

    /// Integral θ-coordinates, if the element lies in Z[θ] = O_{K⁺}.
    pub fn to_theta_int(&self, x: &FieldElement) -> Result<Option<Vec<BigInt>>> {
        let c = self.to_theta(x)?;
        Ok(c.iter().all(|q| q.is_integer()).then(|| c.iter().map(|q| q.to_integer()).collect()))
    }

    pub fn from_theta(&self, c: &[BigRational]) -> FieldElement {
        let mut acc = self.zero();
        for (ci, p) in c.iter().zip(&self.theta_pows) {
            if !ci.is_zero() {
                acc = &acc + &p.scale(ci);
            }
        }
        acc
    }

    pub fn from_theta_int(&self, c: &[BigInt]) -> FieldElement {
        let q: Vec<BigRational> = c.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        self.from_theta(&q)
    }

    /// Element given by coordinates in powers of z = −θ.
    pub fn from_z(&self, c: &[BigInt]) -> FieldElement {
        let z = self.z();
        let mut acc = self.zero();
        let mut zp = self.one();
        for ci in c {
            acc = &acc + &zp.scale_int(ci);
            zp = &zp * &z;
        }
        acc
    }

    /// Real embeddings θ ↦ 2cos(2πj/r), j = 1..=d.
    pub fn embeddings(&self) -> Vec<f64> {
        (1..=self.d)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / self.r as f64).cos())
            .collect()
    }

    /// Floating-point norm of an integral θ-coordinate vector.
    pub fn approx_norm(&self, c: &[i64], emb: &[f64]) -> f64 {
        emb.iter()
            .map(|&t| c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci as f64))
            .product()
    }

    /// Subgroup index test: x fixed by σ^{step}.
    fn fixed_by(&self, x: &FieldElement, step: u64) -> bool {
        self.sigma(x, step).map(|y| &y == x).unwrap_or(false)
    }

    pub fn in_kplus(&self, x: &FieldElement) -> bool {
        x.is_totally_real()
    }

    /// K₀: degree (r−1)/6, fixed by σ^{(r−1)/6}.
    pub fn in_k0(&self, x: &FieldElement) -> bool {
        self.has_k0() && self.fixed_by(x, (self.r as u64 - 1) / 6)
    }

    /// k: degree (r−1)/4, fixed by σ^{(r−1)/4}.
    pub fn in_k(&self, x: &FieldElement) -> bool {
        self.has_k() && self.fixed_by(x, (self.r as u64 - 1) / 4)
    }

    pub fn theta_coords_to_i64(c: &[BigInt]) -> Option<Vec<i64>> {
        c.iter().map(|x| x.to_i64()).collect()
    }
}
