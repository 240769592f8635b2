//! Local reduction data: valuations, minimality, Tate's algorithm at inert
//! primes, the residue-characteristic-2 table, Kraus' Φ order, and residual
//! enumeration of conductor exponents.

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::frey::{FreyCurve, FreyFamily};
use crate::numfield::{FieldContext, FieldElement, PrimeIdeal, PrimeLevel, ResidueField};
use crate::numfield::residue::Fe;
use crate::poly::Weierstrass;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Z[T]/(m) localized at an inert rational prime p (uniformizer p).
/// For Q take m = T.
#[derive(Clone, Debug)]
pub struct InertDvr {
    p: u64,
    pb: BigInt,
    m: Vec<BigInt>,
    d: usize,
    field: ResidueField,
}

/// Coordinates in the basis 1, T, …, T^{d−1}.
pub type Elt = Vec<BigInt>;

impl InertDvr {
    pub fn rational(p: u64) -> Self {
        InertDvr { p, pb: BigInt::from(p), m: vec![BigInt::zero(), BigInt::one()], d: 1, field: ResidueField::prime(p) }
    }

    /// O_{K⁺} = Z[θ] at an inert prime.
    pub fn kplus(ctx: &FieldContext, p: &PrimeIdeal) -> Result<Self> {
        if p.level == PrimeLevel::Rational {
            return Ok(Self::rational(p.q));
        }
        if !p.is_inert(ctx) {
            return Err(Error::Unsupported(format!("prime {} is not inert in K+", p.label)));
        }
        Ok(InertDvr {
            p: p.q,
            pb: BigInt::from(p.q),
            m: ctx.theta_minpoly().to_vec(),
            d: ctx.kplus_degree(),
            field: p.residue_field().clone(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.field
    }

    pub fn int(&self, n: i64) -> Elt {
        let mut v = vec![BigInt::zero(); self.d];
        v[0] = BigInt::from(n);
        v
    }

    pub fn from_int(&self, n: BigInt) -> Elt {
        let mut v = vec![BigInt::zero(); self.d];
        v[0] = n;
        v
    }

    fn add(&self, x: &Elt, y: &Elt) -> Elt {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    fn sub(&self, x: &Elt, y: &Elt) -> Elt {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    fn neg(&self, x: &Elt) -> Elt {
        x.iter().map(|a| -a).collect()
    }

    fn scal(&self, x: &Elt, n: i64) -> Elt {
        let n = BigInt::from(n);
        x.iter().map(|a| a * &n).collect()
    }

    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        if self.d == 1 {
            return vec![&x[0] * &y[0]];
        }
        let d = self.d;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] -= &c * &self.m[i];
            }
        }
        prod.truncate(d);
        prod
    }

    /// v_p; `u32::MAX` for zero.
    pub fn val(&self, x: &Elt) -> u32 {
        x.iter().filter(|c| !c.is_zero()).map(|c| arith::valuation(c, self.p)).min().unwrap_or(u32::MAX)
    }

    fn pdiv(&self, x: &Elt) -> bool {
        self.val(x) > 0
    }

    fn div_p(&self, x: &Elt, k: u32) -> Result<Elt> {
        let q = self.pb.pow(k);
        x.iter()
            .map(|c| {
                let (d, r) = c.div_rem(&q);
                if r.is_zero() {
                    Ok(d)
                } else {
                    Err(Error::Other(format!("inexact division by {}^{k}", self.p)))
                }
            })
            .collect()
    }

    fn mul_p(&self, x: &Elt, k: u32) -> Elt {
        let q = self.pb.pow(k);
        x.iter().map(|c| c * &q).collect()
    }

    pub fn red(&self, x: &Elt) -> Fe {
        let c: Vec<u64> = x.iter().map(|c| c.mod_floor(&self.pb).to_u64().unwrap()).collect();
        if self.d == 1 {
            self.field.from_int(c[0] as i64)
        } else {
            self.field.from_coeffs(&c)
        }
    }

    fn lift(&self, f: &Fe) -> Elt {
        (0..self.d).map(|i| BigInt::from(f[i])).collect()
    }

    fn preduce(&self, x: &Elt) -> Elt {
        self.lift(&self.red(x))
    }

    fn pinv(&self, x: &Elt) -> Result<Elt> {
        let inv = self.field.inv(&self.red(x)).ok_or(Error::DivisionByZero)?;
        Ok(self.lift(&inv))
    }

    /// p-th root in the residue field (square root in characteristic 2, cube root in characteristic 3).
    fn proot(&self, x: &Elt) -> Elt {
        self.lift(&self.field.qth_root(&self.red(x)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TateResult {
    pub exponent: u32,
    pub kodaira: Kodaira,
    pub vdisc_min: u32,
    /// Number of times the model was divided by the uniformizer.
    pub rescalings: u32,
    /// An integral model, minimal at p, as [a1, a2, a3, a4, a6].
    pub model: [Elt; 5],
}

struct Model {
    a: [Elt; 5],
}

impl Model {
    fn b(&self, k: &InertDvr) -> (Elt, Elt, Elt, Elt) {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = k.add(&k.mul(a1, a1), &k.scal(a2, 4));
        let b4 = k.add(&k.mul(a1, a3), &k.scal(a4, 2));
        let b6 = k.add(&k.mul(a3, a3), &k.scal(a6, 4));
        let a1sq = k.mul(a1, a1);
        let b8 = k.sub(
            &k.add(
                &k.sub(&k.add(&k.mul(&a1sq, a6), &k.scal(&k.mul(a2, a6), 4)), &k.mul(&k.mul(a1, a3), a4)),
                &k.mul(a2, &k.mul(a3, a3)),
            ),
            &k.mul(a4, a4),
        );
        (b2, b4, b6, b8)
    }

    fn c4_disc(&self, k: &InertDvr) -> (Elt, Elt, Elt) {
        let (b2, b4, b6, b8) = self.b(k);
        let b2sq = k.mul(&b2, &b2);
        let c4 = k.sub(&b2sq, &k.scal(&b4, 24));
        let c6 = k.sub(&k.sub(&k.scal(&k.mul(&b2, &b4), 36), &k.mul(&b2sq, &b2)), &k.scal(&b6, 216));
        let disc = k.sub(
            &k.sub(
                &k.sub(&k.scal(&k.mul(&k.mul(&b2, &b4), &b6), 9), &k.mul(&b2sq, &b8)),
                &k.scal(&k.mul(&k.mul(&b4, &b4), &b4), 8),
            ),
            &k.scal(&k.mul(&b6, &b6), 27),
        );
        (c4, c6, disc)
    }

    fn rst(&mut self, k: &InertDvr, r: &Elt, s: &Elt, t: &Elt) {
        let [a1, a2, a3, a4, a6] = &self.a;
        let rs = k.mul(r, s);
        let n1 = k.add(a1, &k.scal(s, 2));
        let n2 = k.add(&k.sub(&k.sub(a2, &k.mul(s, a1)), &k.mul(s, s)), &k.scal(r, 3));
        let n3 = k.add(&k.add(a3, &k.mul(r, a1)), &k.scal(t, 2));
        let n4 = k.sub(
            &k.add(
                &k.sub(&k.add(&k.sub(a4, &k.mul(s, a3)), &k.scal(&k.mul(r, a2), 2)), &k.mul(&k.add(t, &rs), a1)),
                &k.scal(&k.mul(r, r), 3),
            ),
            &k.scal(&k.mul(s, t), 2),
        );
        let r2 = k.mul(r, r);
        let n6 = k.sub(
            &k.sub(
                &k.sub(&k.add(&k.add(&k.add(a6, &k.mul(r, a4)), &k.mul(&r2, a2)), &k.mul(&r2, r)), &k.mul(t, a3)),
                &k.mul(t, t),
            ),
            &k.mul(&k.mul(r, t), a1),
        );
        self.a = [n1, n2, n3, n4, n6];
    }
}

/// Tate's algorithm at the uniformizer p of an inert DVR. The model must be integral.
pub fn tate(k: &InertDvr, model: [Elt; 5]) -> Result<TateResult> {
    let p = k.p;
    if model.iter().any(|a| a.len() != k.d) {
        return invalid("model coefficients have the wrong length");
    }
    let zero = k.int(0);
    let half = if p == 2 { zero.clone() } else { k.pinv(&k.int(2))? };
    let mut e = Model { a: model };
    let mut rescalings = 0;
    loop {
        let (c4, c6, disc) = e.c4_disc(k);
        let vd = k.val(&disc);
        if vd == u32::MAX {
            return Err(Error::Singular);
        }
        let done = |e: &Model, exponent: u32, kodaira: Kodaira| {
            Ok(TateResult { exponent, kodaira, vdisc_min: vd, rescalings, model: e.a.clone() })
        };
        if vd == 0 {
            return done(&e, 0, Kodaira::I0);
        }
        let (b2, b4, b6, _) = e.b(k);
        let [a1, a2, a3, a4, a6] = e.a.clone();
        let (r, t) = if p == 2 {
            if k.pdiv(&b2) {
                let r = k.proot(&a4);
                let inner = k.add(&k.mul(&k.add(&k.mul(&k.add(&r, &a2), &r), &a4), &r), &a6);
                (r, k.proot(&inner))
            } else {
                let temp = k.pinv(&a1)?;
                let r = k.mul(&temp, &a3);
                let t = k.mul(&temp, &k.add(&a4, &k.mul(&r, &r)));
                (r, t)
            }
        } else if p == 3 {
            let r = if k.pdiv(&b2) { k.proot(&k.neg(&b6)) } else { k.neg(&k.mul(&k.pinv(&b2)?, &b4)) };
            let t = k.add(&k.mul(&a1, &r), &a3);
            (r, t)
        } else {
            let r = if k.pdiv(&c4) {
                k.neg(&k.mul(&k.pinv(&k.int(12))?, &b2))
            } else {
                let inv = k.pinv(&k.scal(&c4, 12))?;
                k.neg(&k.mul(&inv, &k.add(&c6, &k.mul(&b2, &c4))))
            };
            let t = k.neg(&k.mul(&half, &k.add(&k.mul(&a1, &r), &a3)));
            (r, t)
        };
        let (r, t) = (k.preduce(&r), k.preduce(&t));
        e.rst(k, &r, &zero, &t);
        if !k.pdiv(&c4) {
            return done(&e, 1, Kodaira::In(vd));
        }
        let (_, _, b6, b8) = e.b(k);
        if k.val(&e.a[4]) < 2 {
            return done(&e, vd, Kodaira::II);
        }
        if k.val(&b8) < 3 {
            return done(&e, vd - 1, Kodaira::III);
        }
        if k.val(&b6) < 3 {
            return done(&e, vd - 2, Kodaira::IV);
        }
        // p | a1, a2; p² | a3, a4; p³ | a6
        let [a1, a2, a3, _, a6] = e.a.clone();
        let (s, t) = if p == 2 {
            (k.proot(&a2), k.mul_p(&k.proot(&k.div_p(&a6, 2)?), 1))
        } else if p == 3 {
            (a1, a3)
        } else {
            (k.neg(&k.mul(&a1, &half)), k.neg(&k.mul(&a3, &half)))
        };
        e.rst(k, &zero, &s, &t);
        let b = k.div_p(&e.a[1], 1)?;
        let c = k.div_p(&e.a[3], 2)?;
        let d = k.div_p(&e.a[4], 3)?;
        let bb = k.mul(&b, &b);
        let cc = k.mul(&c, &c);
        let w = k.add(
            &k.sub(
                &k.add(&k.sub(&k.scal(&k.mul(&d, &d), 27), &k.mul(&bb, &cc)), &k.scal(&k.mul(&bb, &k.mul(&b, &d)), 4)),
                &k.scal(&k.mul(&k.mul(&b, &c), &d), 18),
            ),
            &k.scal(&k.mul(&cc, &c), 4),
        );
        let x = k.sub(&k.scal(&c, 3), &bb);
        let sw = if k.pdiv(&w) {
            if k.pdiv(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };
        if sw == 1 {
            return done(&e, vd - 4, Kodaira::I0Star);
        }
        if sw == 2 {
            let r = if p == 2 {
                k.proot(&c)
            } else if p == 3 {
                k.mul(&c, &k.pinv(&b)?)
            } else {
                k.mul(&k.sub(&k.mul(&b, &c), &k.scal(&d, 9)), &k.pinv(&k.scal(&x, 2))?)
            };
            let r = k.mul_p(&k.preduce(&r), 1);
            e.rst(k, &r, &zero, &zero);
            let (mut ix, mut iy) = (3u32, 3u32);
            loop {
                // mx = p^{ix−1}, my = p^{iy−1}
                let a3t = k.div_p(&e.a[2], iy - 1)?;
                let a6t = k.div_p(&e.a[4], ix + iy - 2)?;
                if !k.pdiv(&k.add(&k.mul(&a3t, &a3t), &k.scal(&a6t, 4))) {
                    break;
                }
                let t = if p == 2 { k.proot(&a6t) } else { k.preduce(&k.neg(&k.mul(&a3t, &half))) };
                let t = k.mul_p(&t, iy - 1);
                e.rst(k, &zero, &zero, &t);
                iy += 1;
                let a2t = k.div_p(&e.a[1], 1)?;
                let a4t = k.div_p(&e.a[3], ix)?;
                let a6t = k.div_p(&e.a[4], ix + iy - 2)?;
                if !k.pdiv(&k.sub(&k.mul(&a4t, &a4t), &k.scal(&k.mul(&a6t, &a2t), 4))) {
                    break;
                }
                let r = if p == 2 {
                    k.proot(&k.mul(&a6t, &k.pinv(&a2t)?))
                } else {
                    k.preduce(&k.neg(&k.mul(&a4t, &k.pinv(&k.scal(&a2t, 2))?)))
                };
                let r = k.mul_p(&r, ix - 1);
                e.rst(k, &r, &zero, &zero);
                ix += 1;
            }
            return done(&e, vd + 1 - ix - iy, Kodaira::InStar(ix + iy - 5));
        }
        let r = if p == 2 {
            b.clone()
        } else if p == 3 {
            k.proot(&k.neg(&d))
        } else {
            k.neg(&k.mul(&b, &k.pinv(&k.int(3))?))
        };
        let r = k.mul_p(&k.preduce(&r), 1);
        e.rst(k, &r, &zero, &zero);
        let a3t = k.div_p(&e.a[2], 2)?;
        let a6t = k.div_p(&e.a[4], 4)?;
        if !k.pdiv(&k.add(&k.mul(&a3t, &a3t), &k.scal(&a6t, 4))) {
            return done(&e, vd - 6, Kodaira::IVStar);
        }
        let t = if p == 2 { k.neg(&k.proot(&a6t)) } else { k.preduce(&k.neg(&k.mul(&a3t, &half))) };
        let t = k.mul_p(&t, 2);
        e.rst(k, &zero, &zero, &t);
        if k.val(&e.a[3]) < 4 {
            return done(&e, vd - 7, Kodaira::IIIStar);
        }
        if k.val(&e.a[4]) < 6 {
            return done(&e, vd - 8, Kodaira::IIStar);
        }
        // not minimal
        let [a1, a2, a3, a4, a6] = e.a.clone();
        e.a = [k.div_p(&a1, 1)?, k.div_p(&a2, 2)?, k.div_p(&a3, 3)?, k.div_p(&a4, 4)?, k.div_p(&a6, 6)?];
        rescalings += 1;
    }
}

/// Clear denominators: returns (D, [a_i·D^i]) for a list of rational coordinate vectors.
fn integral_model(coords: [Vec<BigRational>; 5]) -> [Elt; 5] {
    let mut den = BigInt::one();
    for v in &coords {
        for c in v {
            den = den.lcm(c.denom());
        }
    }
    let weights = [1u32, 2, 3, 4, 6];
    let mut out: [Elt; 5] = Default::default();
    for (i, v) in coords.iter().enumerate() {
        let s = den.pow(weights[i]);
        out[i] = v.iter().map(|c| (c * BigRational::from_integer(s.clone())).to_integer()).collect();
    }
    out
}

/// Tate's algorithm over Q at p.
pub fn tate_q(model: &Weierstrass<BigRational>, p: u64) -> Result<TateResult> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let k = InertDvr::rational(p);
    let coords = [&model.a1, &model.a2, &model.a3, &model.a4, &model.a6].map(|c| vec![c.clone()]);
    tate(&k, integral_model(coords))
}

/// Tate's algorithm for a Frey curve at a rational prime (curve over Q) or an inert prime of K⁺.
pub fn tate_at(curve: &FreyCurve, p: &PrimeIdeal) -> Result<TateResult> {
    if p.level == PrimeLevel::Rational {
        let m = curve
            .rational_model()
            .ok_or_else(|| Error::InvalidParameter("curve is not defined over Q".into()))?;
        return tate_q(&m, p.q);
    }
    let ctx = FieldContext::new(curve.r)?;
    let k = InertDvr::kplus(&ctx, p)?;
    let m = &curve.model;
    let coords = [&m.a1, &m.a2, &m.a3, &m.a4, &m.a6].map(|c| ctx.to_theta(c));
    let [c1, c2, c3, c4, c6] = coords;
    tate(&k, integral_model([c1?, c2?, c3?, c4?, c6?]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Char2Lookup {
    Candidates(BTreeSet<u32>),
    NonMinimal,
    /// Either non-minimal or one of the candidates.
    CandidatesOrNonMinimal(BTreeSet<u32>),
    OutsideTable,
}

fn set(xs: &[u32]) -> BTreeSet<u32> {
    xs.iter().copied().collect()
}

/// The valuation patterns at an unramified prime above 2 that occur for the
/// Frey families; anything else is reported as outside the table.
/// `None` stands for an infinite valuation.
pub fn char2_table_lookup(vc4: Option<i64>, vc6: Option<i64>, vd: i64) -> Char2Lookup {
    let ge = |v: Option<i64>, n: i64| v.is_none_or(|v| v >= n);
    match (vc4, vc6, vd) {
        (_, Some(5), 4) if ge(vc4, 4) => Char2Lookup::Candidates(set(&[2, 3, 4])),
        (_, Some(11), 16) if ge(vc4, 8) => Char2Lookup::NonMinimal,
        (Some(4), Some(6), 6) => Char2Lookup::Candidates(set(&[5, 6])),
        (Some(4), Some(6), d) if d >= 8 => Char2Lookup::CandidatesOrNonMinimal(set(&[2, 3, 4])),
        _ => Char2Lookup::OutsideTable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good,
    Multiplicative,
    Additive,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Exact(u32),
    Candidates(BTreeSet<u32>),
    Unknown,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(n) => write!(f, "{n}"),
            Exponent::Candidates(s) => {
                let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", v.join(","))
            }
            Exponent::Unknown => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalData {
    pub label: String,
    pub q: u64,
    /// Valuations after rescaling; `None` = ∞ (the invariant vanishes).
    pub vc4: Option<i64>,
    pub vc6: Option<i64>,
    pub vdisc: i64,
    /// Net number of divisions by the uniformizer (negative when the input
    /// model had to be made integral first).
    pub rescale: i64,
    pub reduction: Reduction,
    pub exponent: Exponent,
    pub kodaira: Option<Kodaira>,
    pub table: Option<Char2Lookup>,
}

fn opt_val(p: &PrimeIdeal, x: &FieldElement) -> Result<Option<i64>> {
    if x.is_zero() {
        Ok(None)
    } else {
        p.valuation(x).map(Some)
    }
}

/// Valuation data at P with minimality rescaling and a reduction type.
pub fn local_data(curve: &FreyCurve, p: &PrimeIdeal) -> Result<LocalData> {
    local_data_impl(curve, p, false)
}

/// As [`local_data`], but exact at residue characteristic 2 and 3 whenever
/// P is inert (or rational), via Tate's algorithm.
pub fn local_data_exact(curve: &FreyCurve, p: &PrimeIdeal) -> Result<LocalData> {
    local_data_impl(curve, p, true)
}

fn local_data_impl(curve: &FreyCurve, p: &PrimeIdeal, exact: bool) -> Result<LocalData> {
    if curve.singular {
        return Err(Error::Singular);
    }
    let m = &curve.model;
    let mut shift = 0i64;
    for (c, w) in [(&m.a1, 1i64), (&m.a2, 2), (&m.a3, 3), (&m.a4, 4), (&m.a6, 6)] {
        if let Some(v) = opt_val(p, c)? {
            if v < 0 {
                shift = shift.max((-v + w - 1) / w);
            }
        }
    }
    let mut vc4 = opt_val(p, &curve.c4)?.map(|v| v + 4 * shift);
    let mut vc6 = opt_val(p, &curve.c6)?.map(|v| v + 6 * shift);
    let mut vd = p.valuation(&curve.disc)? + 12 * shift;
    let mut rescale = -shift;
    let ge = |v: Option<i64>, n: i64| v.is_none_or(|v| v >= n);
    while ge(vc4, 4) && ge(vc6, 6) && vd >= 12 {
        vc4 = vc4.map(|v| v - 4);
        vc6 = vc6.map(|v| v - 6);
        vd -= 12;
        rescale += 1;
    }
    let mut ld = LocalData {
        label: p.label.clone(),
        q: p.q,
        vc4,
        vc6,
        vdisc: vd,
        rescale,
        reduction: Reduction::Ambiguous,
        exponent: Exponent::Unknown,
        kodaira: None,
        table: None,
    };
    if vd == 0 {
        ld.reduction = Reduction::Good;
        ld.exponent = Exponent::Exact(0);
        ld.kodaira = Some(Kodaira::I0);
        return Ok(ld);
    }
    if vc4 == Some(0) {
        ld.reduction = Reduction::Multiplicative;
        ld.exponent = Exponent::Exact(1);
        ld.kodaira = Some(Kodaira::In(vd as u32));
        return Ok(ld);
    }
    if p.q >= 5 {
        ld.reduction = Reduction::Additive;
        ld.exponent = Exponent::Exact(2);
        return Ok(ld);
    }
    if p.q == 2 && p.level != PrimeLevel::Rational {
        let t = char2_table_lookup(vc4, vc6, vd);
        ld.exponent = match &t {
            Char2Lookup::Candidates(s) => {
                ld.reduction = Reduction::Additive;
                Exponent::Candidates(s.clone())
            }
            Char2Lookup::CandidatesOrNonMinimal(s) => {
                let mut s = s.clone();
                s.extend([0, 1]);
                Exponent::Candidates(s)
            }
            _ => Exponent::Unknown,
        };
        ld.table = Some(t);
    }
    let can_tate = match p.level {
        PrimeLevel::Rational => true,
        PrimeLevel::KPlus => exact && p.e == 1 && p.generator.to_integer().is_some(),
        PrimeLevel::Cyclotomic => false,
    };
    if can_tate {
        let t = tate_at(curve, p)?;
        ld.vdisc = t.vdisc_min as i64;
        ld.kodaira = Some(t.kodaira);
        ld.exponent = Exponent::Exact(t.exponent);
        ld.reduction = match t.exponent {
            0 => Reduction::Good,
            1 => Reduction::Multiplicative,
            _ => Reduction::Additive,
        };
        if t.rescalings as i64 + shift != ld.rescale + shift {
            // Tate found a different minimal model than the (4,6,12) rule
            ld.rescale = t.rescalings as i64 - shift;
            let inv = curve.invariants();
            let s = t.rescalings as i64 - shift;
            ld.vc4 = opt_val(p, &inv.c4)?.map(|v| v - 4 * s);
            ld.vc6 = opt_val(p, &inv.c6)?.map(|v| v - 6 * s);
        }
    }
    Ok(ld)
}

/// Order of Kraus' group Φ_P: the denominator of v_P(Δ_min)/12.
pub fn phi_group_order(curve: &FreyCurve, p: &PrimeIdeal) -> Result<u32> {
    let ld = local_data_exact(curve, p)?;
    if let Some(v4) = ld.vc4 {
        if 3 * v4 < ld.vdisc {
            return invalid(format!("v(j) < 0 at {}: potentially multiplicative", p.label));
        }
    }
    Ok((12 / ld.vdisc.gcd(&12)) as u32)
}

#[derive(Debug, Clone)]
pub struct ConductorProfile {
    pub entries: Vec<LocalData>,
}

impl ConductorProfile {
    /// Formal product, e.g. `2^{2,3,4} * p7^2 * 43`.
    pub fn formal(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .filter(|d| d.exponent != Exponent::Exact(0))
            .map(|d| match &d.exponent {
                Exponent::Exact(1) => d.label.clone(),
                e => format!("{}^{}", d.label, e),
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" * ")
        }
    }
}

/// Local data at every prime of `support`, exact at inert primes above 2 and 3.
pub fn conductor_profile(curve: &FreyCurve, support: &[PrimeIdeal]) -> Result<ConductorProfile> {
    let entries = support.iter().map(|p| local_data_exact(curve, p)).collect::<Result<_>>()?;
    Ok(ConductorProfile { entries })
}

/// Primes dividing 2·r·Norm(Δ) (trial division up to `bound`), as ideals of
/// the curve's base field.
pub fn default_support(curve: &FreyCurve, bound: u64) -> Result<Vec<PrimeIdeal>> {
    let ctx = FieldContext::new(curve.r)?;
    let rational = curve.base == crate::frey::BaseField::Q;
    let n = if rational {
        curve.disc.to_rational().unwrap()
    } else {
        curve.disc.norm_kplus()?
    };
    let mut primes: BTreeSet<u64> = [2u64, curve.r as u64].into_iter().collect();
    for part in [n.numer(), n.denom()] {
        let f = arith::factor(part, bound);
        if let Some(c) = f.cofactor {
            return Err(Error::Unsupported(format!("unfactored discriminant part {c}")));
        }
        primes.extend(f.factors.iter().map(|x| x.0));
    }
    let mut out = Vec::new();
    for q in primes {
        if rational {
            out.push(PrimeIdeal::rational(curve.r, q));
        } else {
            out.extend(crate::numfield::split_prime(&ctx, q, crate::numfield::DEFAULT_GENERATOR_BOUND)?);
        }
    }
    Ok(out)
}

/// Weierstrass coefficient forms of a family with coordinates in an inert DVR,
/// so that many (a, b) can be evaluated without field arithmetic.
#[derive(Clone, Debug)]
pub struct DvrFamily {
    pub dvr: InertDvr,
    forms: [Vec<Elt>; 5],
}

impl DvrFamily {
    pub fn new(fam: &FreyFamily, p: &PrimeIdeal) -> Result<Self> {
        let dvr = InertDvr::kplus(&fam.ctx, p)?;
        let rational = p.level == PrimeLevel::Rational;
        let m = &fam.model;
        let coords = |f: &crate::poly::BinaryForm| -> Result<Vec<Vec<BigRational>>> {
            f.coeffs()
                .iter()
                .map(|c| {
                    if rational {
                        c.to_rational().map(|q| vec![q]).ok_or_else(|| Error::InvalidParameter("family is not over Q".into()))
                    } else {
                        fam.ctx.to_theta(c)
                    }
                })
                .collect()
        };
        let raw = [coords(&m.a1)?, coords(&m.a2)?, coords(&m.a3)?, coords(&m.a4)?, coords(&m.a6)?];
        let mut den = BigInt::one();
        for f in &raw {
            for c in f.iter().flatten() {
                den = den.lcm(c.denom());
            }
        }
        let weights = [1u32, 2, 3, 4, 6];
        let mut forms: [Vec<Elt>; 5] = Default::default();
        for (i, f) in raw.iter().enumerate() {
            let s = BigRational::from_integer(den.pow(weights[i]));
            forms[i] = f.iter().map(|v| v.iter().map(|c| (c * &s).to_integer()).collect()).collect();
        }
        Ok(DvrFamily { dvr, forms })
    }

    pub fn eval(&self, a: &BigInt, b: &BigInt) -> [Elt; 5] {
        let d = self.dvr.d;
        let ev = |form: &Vec<Elt>| -> Elt {
            let mut acc = vec![BigInt::zero(); d];
            if form.is_empty() {
                return acc;
            }
            let n = form.len() - 1;
            let mut apow = vec![BigInt::one()];
            let mut bpow = vec![BigInt::one()];
            for i in 1..=n {
                apow.push(&apow[i - 1] * a);
                bpow.push(&bpow[i - 1] * b);
            }
            for (i, c) in form.iter().enumerate() {
                let m = &apow[n - i] * &bpow[i];
                for (x, y) in acc.iter_mut().zip(c) {
                    *x += y * &m;
                }
            }
            acc
        };
        [ev(&self.forms[0]), ev(&self.forms[1]), ev(&self.forms[2]), ev(&self.forms[3]), ev(&self.forms[4])]
    }

    pub fn tate(&self, a: &BigInt, b: &BigInt) -> Result<TateResult> {
        tate(&self.dvr, self.eval(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassKey {
    /// 2 ∤ a+b and 4 divides the even one of a, b.
    OddSumEvenDiv4,
    /// 2 ∤ a+b and the even one of a, b is 2 mod 4.
    OddSumEvenNotDiv4,
    /// 2 ‖ a+b.
    SumExactly2,
    /// 4 | a+b.
    SumDiv4,
}

impl ClassKey {
    pub fn of(a: i64, b: i64) -> Self {
        let s = a + b;
        if s.rem_euclid(2) == 1 {
            let even = if a.rem_euclid(2) == 0 { a } else { b };
            if even.rem_euclid(4) == 0 {
                ClassKey::OddSumEvenDiv4
            } else {
                ClassKey::OddSumEvenNotDiv4
            }
        } else if s.rem_euclid(4) == 2 {
            ClassKey::SumExactly2
        } else {
            ClassKey::SumDiv4
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ClassKey::OddSumEvenDiv4 => "2∤a+b, 4|even",
            ClassKey::OddSumEvenNotDiv4 => "2∤a+b, 4∤even",
            ClassKey::SumExactly2 => "2‖a+b",
            ClassKey::SumDiv4 => "4|a+b",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConductorClasses {
    pub p: u64,
    pub k: u32,
    /// ((a, b) representative in [0, p^k)², exponent).
    pub rows: Vec<((i64, i64), u32)>,
    /// Classes whose refinements at p^{k+1} disagree (empty unless checked).
    pub unstable: Vec<(i64, i64)>,
    pub checked_refinement: bool,
}

impl ConductorClasses {
    pub fn summary(&self) -> BTreeMap<ClassKey, BTreeSet<u32>> {
        let mut out: BTreeMap<ClassKey, BTreeSet<u32>> = BTreeMap::new();
        for &((a, b), e) in &self.rows {
            out.entry(ClassKey::of(a, b)).or_default().insert(e);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# conductor exponents at {} over classes mod {}^{}\n", self.p, self.p, self.k);
        for ((a, b), e) in &self.rows {
            s.push_str(&format!("{a:>5} {b:>5} {e:>3}\n"));
        }
        s
    }
}

fn class_rows(fam: &DvrFamily, p: u64, k: u32) -> Result<Vec<((i64, i64), u32)>> {
    let n = p.pow(k) as i64;
    let rows = exec::map_range(n as usize, |a| -> Result<Vec<((i64, i64), u32)>> {
        let a = a as i64;
        let mut out = Vec::new();
        let ab = BigInt::from(a);
        for b in 0..n {
            if a % p as i64 == 0 && b % p as i64 == 0 {
                continue;
            }
            out.push(((a, b), fam.tate(&ab, &BigInt::from(b))?.exponent));
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for r in rows {
        all.extend(r?);
    }
    Ok(all)
}

/// Conductor exponent at P for one representative of each class (a, b) mod p^k
/// with p ∤ gcd(a, b). With `refine`, classes are recomputed mod p^{k+1} and
/// any class whose refinements disagree is flagged.
pub fn enumerate_conductor_classes(fam: &FreyFamily, p: &PrimeIdeal, k: u32, refine: bool) -> Result<ConductorClasses> {
    let dvr = DvrFamily::new(fam, p)?;
    let q = p.q;
    let rows = class_rows(&dvr, q, k)?;
    let mut unstable = Vec::new();
    if refine {
        let fine = class_rows(&dvr, q, k + 1)?;
        let n = q.pow(k) as i64;
        let coarse: BTreeMap<(i64, i64), u32> = rows.iter().copied().collect();
        let mut bad = BTreeSet::new();
        for ((a, b), e) in fine {
            if coarse.get(&(a % n, b % n)) != Some(&e) {
                bad.insert((a % n, b % n));
            }
        }
        unstable = bad.into_iter().collect();
    }
    Ok(ConductorClasses { p: q, k, rows, unstable, checked_refinement: refine })
}
