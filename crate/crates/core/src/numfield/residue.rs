use crate::arith::{mul_mod, pow_mod};
use crate::error::{invalid, Result};
use std::sync::OnceLock;

pub const MAX_F: usize = 12;

/// Element of F_{q^f}: coefficients of a polynomial of degree < f, low first.
pub type Fe = [u64; MAX_F];

/// F_q[T]/(m(T)) for a monic irreducible m of degree f.
#[derive(Debug)]
pub struct ResidueField {
    q: u64,
    f: usize,
    modulus: Vec<u64>,
    chi: OnceLock<Vec<i8>>,
}

impl Clone for ResidueField {
    fn clone(&self) -> Self {
        ResidueField { q: self.q, f: self.f, modulus: self.modulus.clone(), chi: OnceLock::new() }
    }
}

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

const CHI_TABLE_LIMIT: u64 = 1 << 21;

impl ResidueField {
    /// `modulus` is monic of degree f, low degree first; irreducibility is the caller's contract.
    pub fn new(q: u64, modulus: Vec<u64>) -> Result<Self> {
        let f = modulus.len().saturating_sub(1);
        if f == 0 || f > MAX_F {
            return invalid(format!("residue degree {f} outside 1..={MAX_F}"));
        }
        if modulus[f] % q != 1 {
            return invalid("residue field modulus must be monic");
        }
        let modulus = modulus.into_iter().map(|c| c % q).collect();
        Ok(ResidueField { q, f, modulus, chi: OnceLock::new() })
    }

    pub fn prime(q: u64) -> Self {
        ResidueField { q, f: 1, modulus: vec![0, 1], chi: OnceLock::new() }
    }

    pub fn characteristic(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.q.pow(self.f as u32)
    }

    pub fn zero(&self) -> Fe {
        [0; MAX_F]
    }

    pub fn one(&self) -> Fe {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Fe {
        let mut x = [0; MAX_F];
        x[0] = n.rem_euclid(self.q as i64) as u64;
        x
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Fe {
        let mut long = c.iter().map(|x| x % self.q).collect::<Vec<_>>();
        self.reduce(&mut long);
        let mut x = [0; MAX_F];
        x[..self.f].copy_from_slice(&long[..self.f]);
        x
    }

    pub fn is_zero(&self, x: &Fe) -> bool {
        x[..self.f].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let mut c = [0; MAX_F];
        for i in 0..self.f {
            let s = a[i] + b[i];
            c[i] = if s >= self.q { s - self.q } else { s };
        }
        c
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        let mut c = [0; MAX_F];
        for i in 0..self.f {
            c[i] = if a[i] == 0 { 0 } else { self.q - a[i] };
        }
        c
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        self.add(a, &self.neg(b))
    }

    fn reduce(&self, c: &mut Vec<u64>) {
        let f = self.f;
        while c.len() > f {
            let top = c.pop().unwrap();
            if top == 0 {
                continue;
            }
            let base = c.len() - f;
            for i in 0..f {
                let t = mul_mod(top, self.modulus[i], self.q);
                c[base + i] = (c[base + i] + self.q - t) % self.q;
            }
        }
        c.resize(f, 0);
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        if self.f == 1 {
            let mut c = [0; MAX_F];
            c[0] = mul_mod(a[0], b[0], self.q);
            return c;
        }
        let mut long = vec![0u64; 2 * self.f - 1];
        for i in 0..self.f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.f {
                long[i + j] = (long[i + j] + mul_mod(a[i], b[j], self.q)) % self.q;
            }
        }
        self.reduce(&mut long);
        let mut c = [0; MAX_F];
        c[..self.f].copy_from_slice(&long);
        c
    }

    pub fn scale(&self, a: &Fe, k: i64) -> Fe {
        self.mul(a, &self.from_int(k))
    }

    pub fn pow(&self, a: &Fe, mut e: u128) -> Fe {
        if self.f == 1 {
            let mut c = [0; MAX_F];
            c[0] = match (e, a[0]) {
                (0, _) => 1,
                (_, 0) => 0,
                _ => pow_mod(a[0], (e % (self.q as u128 - 1)) as u64, self.q),
            };
            return c;
        }
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.size() as u128 - 2))
    }

    /// The unique q-th root (inverse Frobenius).
    pub fn qth_root(&self, a: &Fe) -> Fe {
        let mut x = *a;
        for _ in 1..self.f {
            x = self.pow(&x, self.q as u128);
        }
        x
    }

    /// Integer index in 0..q^f.
    pub fn encode(&self, a: &Fe) -> u64 {
        a[..self.f].iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }

    pub fn decode(&self, mut n: u64) -> Fe {
        let mut x = [0; MAX_F];
        for c in x.iter_mut().take(self.f) {
            *c = n % self.q;
            n /= self.q;
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.size()).map(move |n| self.decode(n))
    }

    fn chi_table(&self) -> Option<&Vec<i8>> {
        if self.q == 2 || self.size() > CHI_TABLE_LIMIT {
            return None;
        }
        Some(self.chi.get_or_init(|| {
            let mut t = vec![-1i8; self.size() as usize];
            t[0] = 0;
            for x in self.elements().skip(1) {
                t[self.encode(&self.mul(&x, &x)) as usize] = 1;
            }
            t
        }))
    }

    /// Quadratic character (Euler's criterion for odd q; every element is a square in characteristic 2).
    pub fn chi(&self, a: &Fe) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        if self.q == 2 {
            return 1;
        }
        if let Some(t) = self.chi_table() {
            return t[self.encode(a) as usize];
        }
        let e = self.pow(a, (self.size() as u128 - 1) / 2);
        if e == self.one() {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: &Fe) -> bool {
        self.chi(a) >= 0
    }

    /// Evaluate a polynomial (low first) at x.
    pub fn eval(&self, poly: &[Fe], x: &Fe) -> Fe {
        poly.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// Distinct roots by exhaustive search.
    pub fn roots(&self, poly: &[Fe]) -> Vec<Fe> {
        self.elements().filter(|x| self.is_zero(&self.eval(poly, x))).collect()
    }

    pub fn has_root(&self, poly: &[Fe]) -> bool {
        self.elements().any(|x| self.is_zero(&self.eval(poly, &x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f8_arithmetic() {
        let k = ResidueField::new(2, vec![1, 1, 0, 1]).unwrap();
        assert_eq!(k.size(), 8);
        let t = k.from_coeffs(&[0, 1]);
        // t³ = t + 1
        assert_eq!(k.pow(&t, 3), k.from_coeffs(&[1, 1]));
        for x in k.elements().skip(1) {
            assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
            assert_eq!(k.pow(&k.qth_root(&x), 2), x);
        }
    }

    #[test]
    fn chi_matches_euler() {
        let k = ResidueField::new(3, vec![1, 2, 0, 1]).unwrap(); // T³ + 2T + 1 irreducible mod 3
        let squares = k.elements().filter(|x| !k.is_zero(x) && k.chi(x) == 1).count();
        assert_eq!(squares, 13);
        let p = ResidueField::prime(13);
        let sq: Vec<i64> = (1..13).filter(|&n| p.chi(&p.from_int(n)) == 1).collect();
        assert_eq!(sq, vec![1, 3, 4, 9, 10, 12]);
    }

    #[test]
    fn prime_field_pow_edge() {
        let p = ResidueField::prime(13);
        assert_eq!(p.pow(&p.zero(), 0), p.one());
        assert_eq!(p.pow(&p.zero(), 5), p.zero());
        assert_eq!(p.pow(&p.from_int(2), 12), p.one());
    }
}
