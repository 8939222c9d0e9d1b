//! Arithmetic in GF(p^h) via precomputed tables.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{h-1} p^{h-1}`
//! where `c_0 + c_1 x + ... ` is its polynomial representative modulo the
//! field's defining polynomial. Integer order on these codes is the canonical
//! element order (lexicographic on the coefficient vector read from the top
//! coefficient down), and every "smallest element" choice in the crate uses it.

use std::fmt;

use crate::error::{Error, Result};

/// An element of a [`Field`], identified by its integer code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Largest supported field order (3^5).
pub const MAX_ORDER: u32 = 243;

/// Finite field GF(p^h) with full addition and multiplication tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    h: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.h, self.modulus)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Pinned defining polynomials, low coefficient first, monic top coefficient omitted.
fn pinned_modulus(p: u32, h: u32) -> Option<Vec<u32>> {
    match (p, h) {
        (3, 1) => Some(vec![1]),
        (3, 2) => Some(vec![2, 2]),
        (3, 3) => Some(vec![1, 2, 0]),
        (5, 1) => Some(vec![3]),
        (7, 1) => Some(vec![4]),
        _ => None,
    }
}

// Polynomials over GF(p) as coefficient vectors, low degree first.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db], p - 2, p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            let k = dr - db + i;
            r[k] = (r[k] + p - c * bi % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_pow(mut b: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-p digits of `code`.
fn monic_from_code(code: u32, deg: u32, p: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(deg as usize + 1);
    let mut c = code;
    for _ in 0..deg {
        v.push(c % p);
        c /= p;
    }
    v.push(1);
    v
}

/// Irreducibility over GF(p) by trial division with every monic polynomial of degree ≤ h/2.
fn is_irreducible(full: &[u32], p: u32) -> bool {
    let h = full.len() as u32 - 1;
    if h == 1 {
        return true;
    }
    for d in 1..=h / 2 {
        for code in 0..p.pow(d) {
            let f = monic_from_code(code, d, p);
            if poly_rem(full, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// GF(p^h) with the pinned modulus when one exists, otherwise the first
    /// irreducible monic polynomial in canonical order.
    pub fn new(p: u32, h: u32) -> Result<Field> {
        Self::check_params(p, h)?;
        let low = match pinned_modulus(p, h) {
            Some(m) => m,
            None => {
                let mut found = None;
                for code in 0..p.pow(h) {
                    let full = monic_from_code(code, h, p);
                    if is_irreducible(&full, p) {
                        found = Some(full[..h as usize].to_vec());
                        break;
                    }
                }
                found.expect("an irreducible polynomial of every degree exists")
            }
        };
        Self::with_modulus(p, h, &low)
    }

    /// GF(p^h) defined by the monic polynomial `x^h + modulus[h-1] x^{h-1} + ... + modulus[0]`.
    pub fn with_modulus(p: u32, h: u32, modulus: &[u32]) -> Result<Field> {
        Self::check_params(p, h)?;
        if modulus.len() != h as usize || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!("expected {h} coefficients below {p}, got {modulus:?}")));
        }
        let mut full = modulus.to_vec();
        full.push(1);
        if !is_irreducible(&full, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        let q = p.pow(h);
        let digits = |x: u32| -> Vec<u32> {
            let mut v = vec![0; h as usize];
            let mut c = x;
            for d in v.iter_mut() {
                *d = c % p;
                c /= p;
            }
            v
        };
        let encode = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let n = q as usize;
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&s) as u16;
                let mut prod = vec![0u32; 2 * h as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &full, p);
                r.resize(h as usize, 0);
                mul[(a * q + b) as usize] = encode(&r) as u16;
            }
        }
        let mut neg = vec![0u16; n];
        let mut inv = vec![0u16; n];
        for a in 0..n {
            for b in 0..n {
                if add[a * n + b] == 0 {
                    neg[a] = b as u16;
                }
                if mul[a * n + b] == 1 {
                    inv[a] = b as u16;
                }
            }
        }
        Ok(Field { p, h, q, modulus: modulus.to_vec(), add, mul, neg, inv })
    }

    fn check_params(p: u32, h: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h == 0 {
            return Err(Error::ZeroDegree);
        }
        match p.checked_pow(h) {
            Some(q) if q <= MAX_ORDER => Ok(()),
            _ => Err(Error::FieldTooLarge { p, h }),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn h(&self) -> u32 {
        self.h
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn order(&self) -> usize {
        self.q as usize
    }
    /// Lower coefficients of the monic defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q as u16).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q as u16).map(Fe)
    }

    /// The prime-field element `n mod p`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u16)
    }

    /// Element from its coefficient vector, constant term first.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() != self.h as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidElement(format!("{coeffs:?}")));
        }
        Ok(Fe(coeffs.iter().rev().fold(0, |acc, &d| acc * self.p + d) as u16))
    }

    /// Coefficient vector, constant term first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut c = a.0 as u32;
        (0..self.h)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[a.index() * self.q as usize + b.index()])
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[a.index() * self.q as usize + b.index()])
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.index()])
    }
    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (a != Fe::ZERO).then(|| Fe(self.inv[a.index()]))
    }
    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }
    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut r = Fe::ONE;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a == Fe::ZERO || self.elements().any(|y| self.mul(y, y) == a)
    }

    /// A square root when one exists (the smallest).
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|&y| self.mul(y, y) == a)
    }

    /// Smallest nonsquare in canonical order.
    pub fn find_nonsquare(&self) -> Result<Fe> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        Ok(self.nonzero().find(|&a| !self.is_square(a)).expect("odd q has nonsquares"))
    }

    /// The automorphism `x ↦ x^{p^k}`.
    pub fn frobenius_power(&self, k: u32) -> Result<FieldAut> {
        if k >= self.h {
            return Err(Error::FrobeniusRange { k, h: self.h });
        }
        let e = (self.p as u64).pow(k);
        let table = self.elements().map(|x| self.pow(x, e)).collect();
        Ok(FieldAut { k, h: self.h, p: self.p, table })
    }
}

/// Field automorphism `x ↦ x^{p^k}` stored as a lookup table.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldAut {
    k: u32,
    h: u32,
    p: u32,
    table: Vec<Fe>,
}

impl fmt::Debug for FieldAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> x^({}^{})", self.p, self.k)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FieldAut {
    #[inline]
    pub fn apply(&self, x: Fe) -> Fe {
        self.table[x.index()]
    }
    pub fn exponent(&self) -> u32 {
        self.k
    }
    pub fn is_identity(&self) -> bool {
        self.k == 0
    }
    /// Order of the automorphism in Aut(GF(p^h)).
    pub fn order(&self) -> u32 {
        self.h / gcd(self.k, self.h)
    }
    /// `self` followed by `other`.
    pub fn then(&self, other: &FieldAut) -> FieldAut {
        let table = self.table.iter().map(|&x| other.apply(x)).collect();
        FieldAut { k: (self.k + other.k) % self.h, h: self.h, p: self.p, table }
    }
    pub fn inverse(&self) -> FieldAut {
        let mut table = vec![Fe::ZERO; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y.index()] = Fe(x as u16);
        }
        FieldAut { k: (self.h - self.k) % self.h, h: self.h, p: self.p, table }
    }

    /// The subfield fixed elementwise.
    pub fn fixed_subfield(&self) -> Subfield {
        let d = gcd(self.k, self.h);
        let d = if d == 0 { self.h } else { d };
        let elements = (0..self.table.len()).map(|x| Fe(x as u16)).filter(|&x| self.apply(x) == x).collect();
        Subfield { p: self.p, degree: d, elements }
    }
}

/// A subfield GF(p^d) given by its elements inside the parent field.
#[derive(Clone, Debug)]
pub struct Subfield {
    pub p: u32,
    pub degree: u32,
    pub elements: Vec<Fe>,
}

impl Subfield {
    pub fn order(&self) -> u32 {
        self.p.pow(self.degree)
    }
    pub fn multiplicative_order(&self) -> u32 {
        self.order() - 1
    }
    /// The subfield as a standalone field.
    pub fn to_field(&self) -> Result<Field> {
        Field::new(self.p, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<Field> {
        [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (2, 3), (3, 4)]
            .iter()
            .map(|&(p, h)| Field::new(p, h).unwrap())
            .collect()
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in fields() {
            for a in f.elements() {
                assert_eq!(f.add(a, Fe::ZERO), a);
                assert_eq!(f.mul(a, Fe::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if a != Fe::ZERO {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn element_power_q_is_identity() {
        for f in fields() {
            for a in f.elements() {
                assert_eq!(f.pow(a, f.q() as u64), a);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(3, 0), Err(Error::ZeroDegree)));
        assert!(Field::with_modulus(3, 2, &[2, 0]).is_err());
        assert!(Field::with_modulus(3, 2, &[1, 0]).is_ok());
    }

    #[test]
    fn pinned_moduli_are_irreducible() {
        for (p, h) in [(3, 1), (3, 2), (3, 3), (5, 1), (7, 1)] {
            let m = pinned_modulus(p, h).unwrap();
            let mut full = m.clone();
            full.push(1);
            assert!(is_irreducible(&full, p), "({p},{h})");
        }
    }

    #[test]
    fn pinned_generators_are_primitive() {
        // x (code p) generates the multiplicative group for the pinned non-prime fields.
        for (p, h) in [(3, 2), (3, 3)] {
            let f = Field::new(p, h).unwrap();
            let x = Fe(p as u16);
            let ord = (1..f.q() as u64).find(|&e| f.pow(x, e) == Fe::ONE).unwrap();
            assert_eq!(ord, f.q() as u64 - 1);
        }
    }

    #[test]
    fn nonsquares() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.find_nonsquare().unwrap(), Fe(2));
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.find_nonsquare().unwrap(), Fe(2));
        let f9 = Field::new(3, 2).unwrap();
        let squares: Vec<Fe> = f9.elements().map(|y| f9.mul(y, y)).collect();
        let first = f9.elements().find(|a| !squares.contains(a)).unwrap();
        assert_eq!(f9.find_nonsquare().unwrap(), first);
        assert_eq!(f9.elements().filter(|a| !squares.contains(a)).count(), 4);
        assert!(Field::new(2, 2).unwrap().find_nonsquare().is_err());
    }

    #[test]
    fn frobenius() {
        let f9 = Field::new(3, 2).unwrap();
        let id = f9.frobenius_power(0).unwrap();
        assert!(f9.elements().all(|x| id.apply(x) == x));
        let s = f9.frobenius_power(1).unwrap();
        assert!(f9.elements().all(|x| s.apply(s.apply(x)) == x));
        assert!(f9.elements().any(|x| s.apply(x) != x));
        let f27 = Field::new(3, 3).unwrap();
        let s27 = f27.frobenius_power(1).unwrap();
        assert!(f27.elements().any(|x| s27.apply(s27.apply(x)) != x));
        assert!(f9.frobenius_power(2).is_err());
        for f in fields() {
            for k in 0..f.h() {
                let a = f.frobenius_power(k).unwrap();
                let mut y: Vec<Fe> = f.elements().collect();
                for _ in 0..a.order() {
                    y = y.into_iter().map(|x| a.apply(x)).collect();
                }
                assert!(y.into_iter().eq(f.elements()));
                for x in f.elements() {
                    for z in f.elements() {
                        assert_eq!(a.apply(f.mul(x, z)), f.mul(a.apply(x), a.apply(z)));
                        assert_eq!(a.apply(f.add(x, z)), f.add(a.apply(x), a.apply(z)));
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_subfields() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.frobenius_power(0).unwrap().fixed_subfield().order(), 9);
        let sub = f9.frobenius_power(1).unwrap().fixed_subfield();
        assert_eq!(sub.order(), 3);
        assert_eq!(sub.multiplicative_order(), 2);
        assert_eq!(sub.elements.len(), 3);
        let f27 = Field::new(3, 3).unwrap();
        let sub = f27.frobenius_power(1).unwrap().fixed_subfield();
        assert_eq!((sub.order(), sub.elements.len()), (3, 3));
        let f81 = Field::new(3, 4).unwrap();
        let sub = f81.frobenius_power(2).unwrap().fixed_subfield();
        assert_eq!((sub.order(), sub.elements.len()), (9, 9));
    }
}
