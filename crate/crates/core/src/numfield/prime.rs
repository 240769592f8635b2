use super::context::FieldContext;
use super::element::FieldElement;
use super::residue::{Fe, ResidueField};
use crate::arith;
use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub const DEFAULT_GENERATOR_BOUND: i64 = 5;
const FACTOR_SEARCH_LIMIT: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeLevel {
    /// A prime of K⁺.
    KPlus,
    /// A prime of Q(ζ) (only the prime above r is used).
    Cyclotomic,
    /// A rational prime, for curves defined over Q.
    Rational,
}

/// A principal prime ideal with cached reduction data.
#[derive(Clone)]
pub struct PrimeIdeal {
    pub q: u64,
    pub f: u32,
    pub e: u32,
    pub generator: FieldElement,
    pub label: String,
    pub level: PrimeLevel,
    /// g(T) with P = (q, g(θ)).
    residue_poly: Vec<u64>,
    gen_inv: FieldElement,
    field: ResidueField,
    /// Images of ζ^i + ζ^{-i} (index 0 holds 2).
    u_res: Vec<Fe>,
}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeIdeal({} | q={} f={} e={} gen={})", self.label, self.q, self.f, self.e, self.generator)
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.level == other.level && self.residue_poly == other.residue_poly
    }
}

impl PrimeIdeal {
    fn build(
        ctx: &FieldContext,
        q: u64,
        e: u32,
        residue_poly: Vec<u64>,
        generator: FieldElement,
        label: String,
    ) -> Result<Self> {
        let field = ResidueField::new(q, residue_poly.clone())?;
        let theta_bar = if field.degree() == 1 {
            field.from_int((q - residue_poly[0] % q) as i64 % q as i64)
        } else {
            field.from_coeffs(&[0, 1])
        };
        let mut u_res = vec![field.from_int(2), theta_bar];
        for i in 1..ctx.kplus_degree() {
            let next = field.sub(&field.mul(&theta_bar, &u_res[i]), &u_res[i - 1]);
            u_res.push(next);
        }
        let gen_inv = generator.inv()?;
        Ok(PrimeIdeal {
            q,
            f: field.degree() as u32,
            e,
            generator,
            label,
            level: PrimeLevel::KPlus,
            residue_poly,
            gen_inv,
            field,
            u_res,
        })
    }

    /// The prime π_r = (2 − θ) of K⁺ above r; totally ramified.
    pub fn pi_r(ctx: &FieldContext) -> Self {
        let r = ctx.r() as u64;
        let gen = &ctx.int(2) - &ctx.theta();
        Self::build(ctx, r, ctx.kplus_degree() as u32, vec![r - 2, 1], gen, format!("p{r}"))
            .expect("π_r is well formed")
    }

    /// The prime (1 − ζ) of Q(ζ) above r.
    pub fn cyclotomic_r(ctx: &FieldContext) -> Self {
        let r = ctx.r() as u64;
        let gen = &ctx.one() - &ctx.zeta(1);
        let mut p = Self::build(ctx, r, ctx.degree() as u32, vec![r - 2, 1], gen, format!("P{r}"))
            .expect("(1 - ζ) is well formed");
        p.level = PrimeLevel::Cyclotomic;
        p
    }

    /// The rational prime p, acting on rational elements of Q(ζ_r).
    pub fn rational(r: u32, p: u64) -> Self {
        let generator = FieldElement::from_int(r, p);
        let gen_inv = generator.inv().expect("p is nonzero");
        PrimeIdeal {
            q: p,
            f: 1,
            e: 1,
            generator,
            label: p.to_string(),
            level: PrimeLevel::Rational,
            residue_poly: vec![0, 1],
            gen_inv,
            field: ResidueField::prime(p),
            u_res: Vec::new(),
        }
    }

    /// The ideal of K⁺ generated by `gen`, which must have prime-power norm.
    pub fn from_generator(ctx: &FieldContext, gen: &FieldElement, label: &str) -> Result<Self> {
        let theta = ctx
            .to_theta_int(gen)?
            .ok_or_else(|| Error::InvalidParameter("generator must be integral".into()))?;
        let n = gen.norm_kplus()?.to_integer().abs();
        let fac = arith::factor(&n, 1 << 20);
        let (q, f) = match fac.factors.as_slice() {
            [(q, f)] if fac.is_complete() => (*q, *f),
            _ => return invalid(format!("generator norm {n} is not a prime power")),
        };
        if q == ctx.r() as u64 {
            let p = Self::pi_r(ctx);
            if f != 1 {
                return invalid("generator is not a uniformizer at π_r");
            }
            return Self::build(ctx, q, p.e, p.residue_poly, gen.clone(), label.to_string());
        }
        let (fdeg, factors) = factor_minpoly(ctx, q)?;
        if f as usize != fdeg {
            return invalid(format!("norm {q}^{f} does not match residue degree {fdeg}"));
        }
        for g in factors {
            let field = ResidueField::new(q, g.clone())?;
            if reduce_theta(&field, &theta).iter().all(|&c| c == 0) {
                return Self::build(ctx, q, 1, g, gen.clone(), label.to_string());
            }
        }
        invalid("generator does not lie in any prime above its norm")
    }

    /// True when P is the unique prime of K⁺ above its residue characteristic.
    pub fn is_inert(&self, ctx: &FieldContext) -> bool {
        self.level == PrimeLevel::KPlus && self.e == 1 && self.f as usize == ctx.kplus_degree()
    }

    pub fn norm(&self) -> u64 {
        self.q.pow(self.f)
    }

    pub fn residue_poly(&self) -> &[u64] {
        &self.residue_poly
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.field
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Exact P-adic valuation by repeated division by the generator.
    pub fn valuation(&self, x: &FieldElement) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::ZeroValuation);
        }
        if x.r() != self.generator.r() {
            return Err(Error::ContextMismatch(x.r(), self.generator.r()));
        }
        let den_v = if x.denominator().is_one() {
            0
        } else {
            arith::valuation(x.denominator(), self.q) as i64 * self.e as i64
        };
        let y = FieldElement::from_coeffs(x.r(), x.numerators().to_vec(), BigInt::one())?;
        if let Some(g) = self.generator.to_integer() {
            // inert prime (g = q): v_P = min_i v_q(coordinate)
            debug_assert_eq!(g, BigInt::from(self.q));
            let v = y
                .numerators()
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| arith::valuation(c, self.q))
                .min()
                .unwrap();
            return Ok(v as i64 - den_v);
        }
        let mut v = 0i64;
        let mut cur = y;
        loop {
            let next = &cur * &self.gen_inv;
            if !next.is_integral() {
                break;
            }
            cur = next;
            v += 1;
        }
        Ok(v - den_v)
    }

    /// Image in the residue field; the denominator must be prime to q.
    pub fn reduce(&self, x: &FieldElement) -> Result<Fe> {
        let k = &self.field;
        let q = self.q;
        let den = (x.denominator() % BigInt::from(q)).to_u64().unwrap();
        if den % q == 0 {
            return Err(Error::NonIntegral(q));
        }
        let den_inv = k.inv(&k.from_int(den as i64)).unwrap();
        let m = |c: &BigInt| c.mod_floor(&BigInt::from(q)).to_i64().unwrap();
        let num = x.numerators();
        let acc = match self.level {
            PrimeLevel::Rational => {
                if x.to_rational().is_none() {
                    return Err(Error::InvalidParameter(format!("{x} is not rational")));
                }
                k.from_int(m(&num[0]))
            }
            PrimeLevel::Cyclotomic => k.from_int(num.iter().fold(0, |s, c| (s + m(c)) % q as i64)),
            PrimeLevel::KPlus => {
                if !x.is_totally_real() {
                    return Err(Error::NotTotallyReal);
                }
                let mut acc = k.from_int(m(&num[0]));
                for i in 1..self.u_res.len() {
                    let c = m(&num[i]);
                    if c != 0 {
                        acc = k.add(&acc, &k.scale(&self.u_res[i], c));
                    }
                }
                acc
            }
        };
        Ok(k.mul(&acc, &den_inv))
    }

    pub fn contains(&self, x: &FieldElement) -> Result<bool> {
        Ok(self.reduce(x).map(|v| self.field.is_zero(&v)).unwrap_or(false))
    }
}

fn reduce_theta(field: &ResidueField, c: &[BigInt]) -> Fe {
    let q = field.characteristic();
    let t = field.from_coeffs(&[0, 1]);
    let t = if field.degree() == 1 { field.from_int((q - field.modulus()[0]) as i64) } else { t };
    let mut acc = field.zero();
    for ci in c.iter().rev() {
        let v = ci.mod_floor(&BigInt::from(q)).to_i64().unwrap();
        acc = field.add(&field.mul(&acc, &t), &field.from_int(v));
    }
    acc
}

/// Residue degree of q in K⁺: order of q in (Z/r)^* / {±1}.
pub fn residue_degree(r: u32, q: u64) -> u32 {
    let r = r as u64;
    let mut x = q % r;
    let mut f = 1;
    while x != 1 && x != r - 1 {
        x = arith::mul_mod(x, q % r, r);
        f += 1;
    }
    f
}

/// Monic irreducible factors of the minimal polynomial of θ modulo q ≠ r, sorted.
pub fn factor_minpoly(ctx: &FieldContext, q: u64) -> Result<(usize, Vec<Vec<u64>>)> {
    let r = ctx.r();
    if q as u32 as u64 == q && q as u32 == r {
        return invalid("q = r is ramified");
    }
    let d = ctx.kplus_degree();
    let f = residue_degree(r, q) as usize;
    let mbar: Vec<u64> = ctx
        .theta_minpoly()
        .iter()
        .map(|c| c.mod_floor(&BigInt::from(q)).to_u64().unwrap())
        .collect();
    if f == d {
        return Ok((f, vec![mbar]));
    }
    let count = q.checked_pow(f as u32).filter(|&n| n <= FACTOR_SEARCH_LIMIT).ok_or_else(|| {
        Error::Unsupported(format!("factoring modulo {q} needs a search over {q}^{f} candidates"))
    })?;
    let mut out = Vec::new();
    for n in 0..count {
        let mut g: Vec<u64> = (0..f).map(|i| (n / q.pow(i as u32)) % q).collect();
        g.push(1);
        if poly_rem_mod(&mbar, &g, q).iter().all(|&c| c == 0) {
            out.push(g);
            if out.len() == d / f {
                break;
            }
        }
    }
    if out.len() != d / f {
        return Err(Error::Other(format!("found {} of {} factors modulo {q}", out.len(), d / f)));
    }
    Ok((f, out))
}

fn poly_rem_mod(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = arith::mod_inverse(b[db] as i64, q).unwrap();
    while a.len() > db {
        let top = a.pop().unwrap();
        if top == 0 {
            continue;
        }
        let k = arith::mul_mod(top, lead_inv, q);
        let base = a.len() - db;
        for i in 0..db {
            a[base + i] = (a[base + i] + q - arith::mul_mod(k, b[i], q)) % q;
        }
    }
    a
}

/// Primes of K⁺ above q with principal generators.
///
/// Inert primes get the generator q; split primes get the first element of
/// norm ±q^f found in the θ-coordinate box [−B, B]^d, growing the box from 1.
pub fn split_prime(ctx: &FieldContext, q: u64, bound: i64) -> Result<Vec<PrimeIdeal>> {
    if !arith::is_prime(q) {
        return invalid(format!("{q} is not prime"));
    }
    if q == ctx.r() as u64 {
        return Ok(vec![PrimeIdeal::pi_r(ctx)]);
    }
    let d = ctx.kplus_degree();
    let (f, factors) = factor_minpoly(ctx, q)?;
    if f == d {
        let g = factors.into_iter().next().unwrap();
        return Ok(vec![PrimeIdeal::build(ctx, q, 1, g, ctx.int(q), q.to_string())?]);
    }
    let fields: Vec<ResidueField> =
        factors.iter().map(|g| ResidueField::new(q, g.clone())).collect::<Result<_>>()?;
    let target = (q as f64).powi(f as i32);
    let target_int = BigInt::from(q).pow(f as u32);
    let emb = ctx.embeddings();
    let mut gens: Vec<Option<Vec<i64>>> = vec![None; factors.len()];
    'shells: for b in 1..=bound {
        let side = (2 * b + 1) as u64;
        let total = side.pow(d as u32);
        for n in 0..total {
            let c: Vec<i64> = (0..d).map(|i| ((n / side.pow(i as u32)) % side) as i64 - b).collect();
            if c.iter().all(|x| x.abs() < b) {
                continue;
            }
            let approx = ctx.approx_norm(&c, &emb).abs();
            if (approx - target).abs() > 0.5 {
                continue;
            }
            let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let x = ctx.from_theta_int(&big);
            if x.norm_kplus()?.to_integer().abs() != target_int {
                continue;
            }
            for (slot, field) in gens.iter_mut().zip(&fields) {
                if slot.is_none() && field.is_zero(&reduce_theta(field, &big)) {
                    *slot = Some(c.clone());
                }
            }
            if gens.iter().all(Option::is_some) {
                break 'shells;
            }
        }
    }
    let missing = gens.iter().filter(|g| g.is_none()).count();
    if missing > 0 {
        return Err(Error::GeneratorSearchExhausted { q, f: f as u32, count: factors.len(), missing, bound });
    }
    factors
        .into_iter()
        .zip(gens)
        .enumerate()
        .map(|(i, (g, c))| {
            let big: Vec<BigInt> = c.unwrap().into_iter().map(BigInt::from).collect();
            PrimeIdeal::build(ctx, q, 1, g, ctx.from_theta_int(&big), format!("{q}.{}", i + 1))
        })
        .collect()
}

/// Sum of e·f over the primes in `ideals`; equals [K⁺:Q] for a full splitting.
pub fn degree_sum(ideals: &[PrimeIdeal]) -> u32 {
    ideals.iter().map(|p| p.e * p.f).sum()
}

pub fn valuation(x: &FieldElement, p: &PrimeIdeal) -> Result<i64> {
    p.valuation(x)
}

pub fn reduce_mod(x: &FieldElement, p: &PrimeIdeal) -> Result<Fe> {
    p.reduce(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zpoly(ctx: &FieldContext, c: &[i64]) -> FieldElement {
        ctx.from_z(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn r7_splitting_shapes() {
        let k = FieldContext::new(7).unwrap();
        let p2 = split_prime(&k, 2, 5).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!((p2[0].f, p2[0].norm()), (3, 8));
        let p13 = split_prime(&k, 13, 5).unwrap();
        assert_eq!(p13.len(), 3);
        assert!(p13.iter().all(|p| p.f == 1 && p.e == 1));
        assert_eq!(degree_sum(&p13), 3);
        let p3 = split_prime(&k, 3, 5).unwrap();
        assert_eq!(degree_sum(&p3), 3);
    }

    #[test]
    fn r7_known_generators() {
        let k = FieldContext::new(7).unwrap();
        let q1 = zpoly(&k, &[-3, 1, 1]);
        assert_eq!(q1.norm_kplus().unwrap().to_integer().abs(), BigInt::from(13));
        let ideal = PrimeIdeal::from_generator(&k, &q1, "q1").unwrap();
        let p13 = split_prime(&k, 13, 5).unwrap();
        assert!(p13.iter().any(|p| p == &ideal));
        let q41 = PrimeIdeal::from_generator(&k, &zpoly(&k, &[4, -2, -1]), "q1").unwrap();
        assert_eq!(q41.q, 41);
        assert!(split_prime(&k, 41, 5).unwrap().iter().any(|p| p == &q41));
    }

    #[test]
    fn valuations_r7() {
        let k = FieldContext::new(7).unwrap();
        let pi = PrimeIdeal::pi_r(&k);
        assert_eq!(pi.e, 3);
        assert_eq!(pi.valuation(&k.int(7)).unwrap(), 3);
        assert_eq!(pi.valuation(&k.one()).unwrap(), 0);
        let q1 = PrimeIdeal::from_generator(&k, &zpoly(&k, &[-3, 1, 1]), "q1").unwrap();
        assert_eq!(q1.valuation(&k.int(13)).unwrap(), 1);
        assert_eq!(q1.valuation(&k.int(169).scale(&num_rational::BigRational::new(1.into(), 2.into()))).unwrap(), 2);
        let p2 = &split_prime(&k, 2, 5).unwrap()[0];
        assert_eq!(p2.valuation(&k.int(48)).unwrap(), 4);
        assert!(pi.valuation(&k.zero()).is_err());
        let big = PrimeIdeal::cyclotomic_r(&k);
        assert_eq!(big.valuation(&k.int(7)).unwrap(), 6);
        assert_eq!(big.valuation(&(&k.one() - &k.zeta(3))).unwrap(), 1);
    }

    #[test]
    fn reductions() {
        let k = FieldContext::new(7).unwrap();
        let p13 = split_prime(&k, 13, 5).unwrap();
        for p in &p13 {
            assert!(p.field.is_zero(&p.reduce(&k.int(13)).unwrap()));
            assert_eq!(p.reduce(&k.int(20)).unwrap(), p.field.from_int(7));
            assert!(p.contains(&p.generator).unwrap());
        }
        let p2 = &split_prime(&k, 2, 5).unwrap()[0];
        let f = p2.residue_field();
        let t = p2.reduce(&k.theta()).unwrap();
        // θ̄ is a root of T³ + T² + 1 (= minpoly of θ mod 2)
        let v = f.add(&f.add(&f.pow(&t, 3), &f.pow(&t, 2)), &f.one());
        assert!(f.is_zero(&v));
        let half = k.one().scale(&num_rational::BigRational::new(1.into(), 2.into()));
        assert_eq!(p2.reduce(&half), Err(Error::NonIntegral(2)));
    }
}
