//! Kantor–Knuth quadrangles as coset geometries.
//!
//! `G = {(α, c, β) : α, β ∈ F², c ∈ F}` with
//! `(α,c,β)(α',c',β') = (α+α', c+c'+β·α'ᵀ, β+β')`, the clan matrices
//! `K_t = diag(t, −m·t^σ)` and the family
//!
//! * `A(t) = {(α, αK_tαᵀ, 2αK_t)}`, `A(∞) = {(0,0,β)}`,
//! * `A*(t) = A(t)·{(0,c,0)}`, `A*(∞) = {(0,c,β)}`.
//!
//! The coset geometry on elements, starred cosets and `(∞)` has order
//! `(q², q)`. The quadrangle built here is its dual, of order `(q, q²)`:
//!
//! * points: right cosets `A(t)g` ordered by `(t, key)`, then the symbols `[A(t)]`;
//! * lines: group elements in lexicographic `(α, c, β)` order, then starred
//!   cosets `A*(t)g` by `(t, key)`, then the line `[∞]` through all symbols.
//!
//! Parameters are indexed `0..q` for field elements and `q` for `∞`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Fe, Field, FieldAut};
use crate::incidence::{Geometry, ModelTag};

/// An element `(α, c, β)` of the group of order `q⁵`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gel {
    pub a: [Fe; 2],
    pub c: Fe,
    pub b: [Fe; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkPoint {
    /// The coset `A(t)·rep`.
    Coset { t: usize, rep: Gel },
    /// The symbol `[A(t)]`, a point of `[∞]`.
    Symbol { t: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkLine {
    Element(Gel),
    /// The coset `A*(t)·rep`.
    Starred {
        t: usize,
        rep: Gel,
    },
    Infinity,
}

#[derive(Clone, Debug)]
pub struct CosetModel {
    pub field: Field,
    pub sigma: FieldAut,
    pub m: Fe,
    q: usize,
    k1: Vec<Fe>,
    k2: Vec<Fe>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub ok: bool,
    pub k1_checked: u64,
    pub k2_checked: u64,
    pub witness: Option<String>,
}

impl CosetModel {
    /// Model data without any check on `m`; see [`verify_4gonal_family`].
    pub fn new_unchecked(field: &Field, sigma: &FieldAut, m: Fe) -> Result<Self> {
        if field.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let q = field.order();
        let k1 = field.elements().collect();
        let k2 = field.elements().map(|t| field.neg(field.mul(m, sigma.apply(t)))).collect();
        Ok(CosetModel { field: field.clone(), sigma: sigma.clone(), m, q, k1, k2 })
    }

    pub fn q(&self) -> usize {
        self.q
    }
    /// Index of the parameter `∞`.
    pub fn infinity(&self) -> usize {
        self.q
    }
    pub fn params(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.q
    }

    pub fn identity(&self) -> Gel {
        Gel::default()
    }

    pub fn mul(&self, x: &Gel, y: &Gel) -> Gel {
        let f = &self.field;
        let dot = f.add(f.mul(x.b[0], y.a[0]), f.mul(x.b[1], y.a[1]));
        Gel {
            a: [f.add(x.a[0], y.a[0]), f.add(x.a[1], y.a[1])],
            c: f.add(f.add(x.c, y.c), dot),
            b: [f.add(x.b[0], y.b[0]), f.add(x.b[1], y.b[1])],
        }
    }

    pub fn inv(&self, x: &Gel) -> Gel {
        let f = &self.field;
        let dot = f.add(f.mul(x.b[0], x.a[0]), f.mul(x.b[1], x.a[1]));
        Gel { a: [f.neg(x.a[0]), f.neg(x.a[1])], c: f.add(f.neg(x.c), dot), b: [f.neg(x.b[0]), f.neg(x.b[1])] }
    }

    /// `αK_tαᵀ` and `2αK_t` for finite `t`.
    fn clan_terms(&self, t: usize, a: [Fe; 2]) -> (Fe, [Fe; 2]) {
        let f = &self.field;
        let ka = [f.mul(a[0], self.k1[t]), f.mul(a[1], self.k2[t])];
        let quad = f.add(f.mul(ka[0], a[0]), f.mul(ka[1], a[1]));
        (quad, [f.add(ka[0], ka[0]), f.add(ka[1], ka[1])])
    }

    /// The element of `A(t)` with first coordinate `α` (`β` for `t = ∞`).
    pub fn a_element(&self, t: usize, v: [Fe; 2]) -> Gel {
        if t == self.q {
            Gel { a: [Fe::ZERO; 2], c: Fe::ZERO, b: v }
        } else {
            let (c, b) = self.clan_terms(t, v);
            Gel { a: v, c, b }
        }
    }

    pub fn a_elements(&self, t: usize) -> Vec<Gel> {
        self.pairs().map(|v| self.a_element(t, v)).collect()
    }

    pub fn in_a(&self, t: usize, g: &Gel) -> bool {
        if t == self.q {
            g.a == [Fe::ZERO; 2] && g.c == Fe::ZERO
        } else {
            let (c, b) = self.clan_terms(t, g.a);
            g.c == c && g.b == b
        }
    }

    pub fn in_a_star(&self, t: usize, g: &Gel) -> bool {
        if t == self.q {
            g.a == [Fe::ZERO; 2]
        } else {
            self.clan_terms(t, g.a).1 == g.b
        }
    }

    fn pairs(&self) -> impl Iterator<Item = [Fe; 2]> + '_ {
        self.field.elements().flat_map(move |x| self.field.elements().map(move |y| [x, y]))
    }

    pub fn elements(&self) -> impl Iterator<Item = Gel> + '_ {
        (0..self.q.pow(5)).map(move |i| self.element_from_code(i))
    }

    pub fn element_code(&self, g: &Gel) -> usize {
        let q = self.q;
        (((g.a[0].index() * q + g.a[1].index()) * q + g.c.index()) * q + g.b[0].index()) * q + g.b[1].index()
    }

    pub fn element_from_code(&self, mut code: usize) -> Gel {
        let q = self.q;
        let mut d = [Fe::ZERO; 5];
        for x in d.iter_mut().rev() {
            *x = Fe((code % q) as u16);
            code /= q;
        }
        Gel { a: [d[0], d[1]], c: d[2], b: [d[3], d[4]] }
    }

    /// Index of the right coset `A(t)g` among the `q³` cosets of `A(t)`.
    fn coset_key(&self, t: usize, g: &Gel) -> usize {
        let f = &self.field;
        let q = self.q;
        if t == q {
            let dot = f.add(f.mul(g.b[0], g.a[0]), f.mul(g.b[1], g.a[1]));
            let c = f.sub(g.c, dot);
            (g.a[0].index() * q + g.a[1].index()) * q + c.index()
        } else {
            let (quad, two_ak) = self.clan_terms(t, g.a);
            let c = f.sub(g.c, quad);
            let b = [f.sub(g.b[0], two_ak[0]), f.sub(g.b[1], two_ak[1])];
            (c.index() * q + b[0].index()) * q + b[1].index()
        }
    }

    fn coset_rep(&self, t: usize, key: usize) -> Gel {
        let q = self.q;
        let d = [Fe((key / (q * q)) as u16), Fe((key / q % q) as u16), Fe((key % q) as u16)];
        if t == q {
            Gel { a: [d[0], d[1]], c: d[2], b: [Fe::ZERO; 2] }
        } else {
            Gel { a: [Fe::ZERO; 2], c: d[0], b: [d[1], d[2]] }
        }
    }

    fn starred_key(&self, t: usize, g: &Gel) -> usize {
        let f = &self.field;
        let q = self.q;
        if t == q {
            g.a[0].index() * q + g.a[1].index()
        } else {
            let two_ak = self.clan_terms(t, g.a).1;
            f.sub(g.b[0], two_ak[0]).index() * q + f.sub(g.b[1], two_ak[1]).index()
        }
    }

    fn starred_rep(&self, t: usize, key: usize) -> Gel {
        let q = self.q;
        let d = [Fe((key / q) as u16), Fe((key % q) as u16)];
        if t == q {
            Gel { a: d, c: Fe::ZERO, b: [Fe::ZERO; 2] }
        } else {
            Gel { a: [Fe::ZERO; 2], c: Fe::ZERO, b: d }
        }
    }

    pub fn num_points(&self) -> usize {
        (self.q + 1) * self.q.pow(3) + self.q + 1
    }
    pub fn num_lines(&self) -> usize {
        self.q.pow(5) + (self.q + 1) * self.q * self.q + 1
    }

    /// Point id of the coset `A(t)g`.
    pub fn coset_point(&self, t: usize, g: &Gel) -> u32 {
        (t * self.q.pow(3) + self.coset_key(t, g)) as u32
    }
    /// Point id of the symbol `[A(t)]`.
    pub fn symbol_point(&self, t: usize) -> u32 {
        ((self.q + 1) * self.q.pow(3) + t) as u32
    }
    pub fn element_line(&self, g: &Gel) -> u32 {
        self.element_code(g) as u32
    }
    /// Line id of the starred coset `A*(t)g`.
    pub fn starred_line(&self, t: usize, g: &Gel) -> u32 {
        (self.q.pow(5) + t * self.q * self.q + self.starred_key(t, g)) as u32
    }
    /// The line `[∞]` carrying the symbols.
    pub fn infinity_line(&self) -> u32 {
        (self.num_lines() - 1) as u32
    }

    pub fn point_kind(&self, p: u32) -> KkPoint {
        let p = p as usize;
        let q3 = self.q.pow(3);
        if p >= (self.q + 1) * q3 {
            KkPoint::Symbol { t: p - (self.q + 1) * q3 }
        } else {
            let t = p / q3;
            KkPoint::Coset { t, rep: self.coset_rep(t, p % q3) }
        }
    }

    pub fn line_kind(&self, l: u32) -> KkLine {
        let l = l as usize;
        let q5 = self.q.pow(5);
        if l < q5 {
            KkLine::Element(self.element_from_code(l))
        } else if l + 1 == self.num_lines() {
            KkLine::Infinity
        } else {
            let k = l - q5;
            let t = k / (self.q * self.q);
            KkLine::Starred { t, rep: self.starred_rep(t, k % (self.q * self.q)) }
        }
    }

    /// Points of the dual geometry, by the rules of the coset construction.
    fn line_points(&self, l: u32) -> Vec<u32> {
        match self.line_kind(l) {
            KkLine::Element(g) => self.params().map(|t| self.coset_point(t, &g)).collect(),
            KkLine::Starred { t, rep } => {
                let mut v: Vec<u32> = self
                    .field
                    .elements()
                    .map(|c| {
                        let z = Gel { a: [Fe::ZERO; 2], c, b: [Fe::ZERO; 2] };
                        self.coset_point(t, &self.mul(&z, &rep))
                    })
                    .collect();
                v.push(self.symbol_point(t));
                v
            }
            KkLine::Infinity => self.params().map(|t| self.symbol_point(t)).collect(),
        }
    }

    /// Image of a point under right multiplication by `h`.
    pub fn right_mul_point(&self, p: u32, h: &Gel) -> u32 {
        match self.point_kind(p) {
            KkPoint::Coset { t, rep } => self.coset_point(t, &self.mul(&rep, h)),
            KkPoint::Symbol { .. } => p,
        }
    }

    /// Point permutation induced by a group automorphism `phi` of `G` that
    /// permutes the family. The induced permutation `τ` of parameters is
    /// read off from images of nonidentity elements; `None` if `phi` does not
    /// permute the family.
    pub fn family_automorphism(&self, phi: impl Fn(&Gel) -> Gel) -> Option<Vec<u32>> {
        let mut tau = vec![usize::MAX; self.q + 1];
        for t in self.params() {
            let mut v = [Fe::ZERO, Fe::ONE];
            if t == self.q {
                v = [Fe::ONE, Fe::ZERO];
            }
            let img = phi(&self.a_element(t, v));
            tau[t] = self.params().find(|&s| self.in_a(s, &img))?;
            if !self.a_elements(t).iter().all(|g| self.in_a(tau[t], &phi(g))) {
                return None;
            }
        }
        let mut perm = Vec::with_capacity(self.num_points());
        for p in 0..self.num_points() as u32 {
            perm.push(match self.point_kind(p) {
                KkPoint::Coset { t, rep } => self.coset_point(tau[t], &phi(&rep)),
                KkPoint::Symbol { t } => self.symbol_point(tau[t]),
            });
        }
        Some(perm)
    }
}

pub fn verify_4gonal_family(cm: &CosetModel) -> FamilyReport {
    let params: Vec<usize> = cm.params().collect();
    let members: Vec<Vec<Gel>> = params.iter().map(|&t| cm.a_elements(t)).collect();
    let id = cm.identity();
    let mut k1 = 0u64;
    let mut witness = None;
    // Each A(t) is a subgroup of order q².
    for (&t, elems) in params.iter().zip(&members) {
        for x in elems {
            for y in elems {
                if !cm.in_a(t, &cm.mul(x, y)) {
                    witness.get_or_insert_with(|| format!("A({t}) is not closed under multiplication"));
                }
            }
        }
    }
    'outer: for &r in &params {
        for &s in &params {
            if r == s {
                continue;
            }
            for x in &members[r] {
                for y in &members[s] {
                    let z = cm.mul(x, y);
                    if z == id {
                        continue;
                    }
                    for &t in &params {
                        if t != r && t != s {
                            k1 += 1;
                            if cm.in_a(t, &z) {
                                witness.get_or_insert_with(|| format!("K1 fails: A({r})A({s}) meets A({t}) in {z:?}"));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut k2 = 0u64;
    'k2: for &s in &params {
        for a in &members[s] {
            for c in cm.field.elements() {
                let z = cm.mul(a, &Gel { a: [Fe::ZERO; 2], c, b: [Fe::ZERO; 2] });
                if z == id {
                    continue;
                }
                for &t in &params {
                    if t != s {
                        k2 += 1;
                        if cm.in_a(t, &z) {
                            witness.get_or_insert_with(|| format!("K2 fails: A*({s}) meets A({t}) in {z:?}"));
                            break 'k2;
                        }
                    }
                }
            }
        }
    }
    FamilyReport { ok: witness.is_none(), k1_checked: k1, k2_checked: k2, witness }
}

/// The Kantor–Knuth quadrangle `Γ(q,σ)` of order `(q, q²)`.
pub fn build_kantor_knuth(field: &Field, sigma: &FieldAut, m: Fe) -> Result<(Geometry, CosetModel)> {
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if field.is_square(m) {
        return Err(Error::NotNonsquare(m.0));
    }
    let cm = CosetModel::new_unchecked(field, sigma, m)?;
    let report = verify_4gonal_family(&cm);
    if !report.ok {
        return Err(Error::FamilyCheck(report.witness.unwrap_or_default()));
    }
    let g = build_from_model(&cm)?;
    Ok((g, cm))
}

/// Incidence structure of a model regardless of the family conditions.
pub fn build_from_model(cm: &CosetModel) -> Result<Geometry> {
    let lines = (0..cm.num_lines() as u32).map(|l| cm.line_points(l)).collect();
    Ok(Geometry::build(lines, cm.num_points())?.with_tag(ModelTag::Coset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::validate_gq;

    fn model(p: u32, h: u32, k: u32) -> CosetModel {
        let f = Field::new(p, h).unwrap();
        let s = f.frobenius_power(k).unwrap();
        let m = f.find_nonsquare().unwrap();
        CosetModel::new_unchecked(&f, &s, m).unwrap()
    }

    #[test]
    fn group_laws() {
        let cm = model(3, 1, 0);
        let els: Vec<Gel> = cm.elements().collect();
        assert_eq!(els.len(), 243);
        for (i, g) in els.iter().enumerate().step_by(7) {
            assert_eq!(cm.element_code(g), i);
            assert_eq!(cm.mul(g, &cm.inv(g)), cm.identity());
            for h in els.iter().step_by(11) {
                for k in els.iter().step_by(13) {
                    assert_eq!(cm.mul(&cm.mul(g, h), k), cm.mul(g, &cm.mul(h, k)));
                }
            }
        }
    }

    #[test]
    fn coset_keys_are_constant_on_cosets() {
        let cm = model(3, 2, 1);
        let g = cm.element_from_code(12345);
        for t in cm.params() {
            let p = cm.coset_point(t, &g);
            for a in cm.a_elements(t) {
                assert_eq!(cm.coset_point(t, &cm.mul(&a, &g)), p);
            }
            match cm.point_kind(p) {
                KkPoint::Coset { t: t2, rep } => {
                    assert_eq!(t2, t);
                    assert_eq!(cm.coset_point(t, &rep), p);
                }
                KkPoint::Symbol { .. } => panic!("coset decoded as symbol"),
            }
        }
    }

    #[test]
    fn family_conditions() {
        assert!(verify_4gonal_family(&model(3, 1, 0)).ok);
        assert!(verify_4gonal_family(&model(5, 1, 0)).ok);
        let f = Field::new(3, 1).unwrap();
        let bad = CosetModel::new_unchecked(&f, &f.frobenius_power(0).unwrap(), Fe::ONE).unwrap();
        let r = verify_4gonal_family(&bad);
        assert!(!r.ok && r.witness.is_some());
    }

    #[test]
    fn small_kantor_knuth_is_gq() {
        let f = Field::new(3, 1).unwrap();
        let (g, cm) = build_kantor_knuth(&f, &f.frobenius_power(0).unwrap(), Fe(2)).unwrap();
        assert_eq!((g.num_points(), g.num_lines()), (112, 280));
        let r = validate_gq(&g);
        assert!(r.is_gq, "{:?}", r.violations);
        assert_eq!(r.order(), Some((3, 9)));
        assert_eq!(g.points_on(cm.infinity_line()).len(), 4);
        assert!(build_kantor_knuth(&f, &f.frobenius_power(0).unwrap(), Fe::ONE).is_err());
    }

    #[test]
    fn right_multiplication_is_an_automorphism() {
        let f = Field::new(3, 1).unwrap();
        let (g, cm) = build_kantor_knuth(&f, &f.frobenius_power(0).unwrap(), Fe(2)).unwrap();
        let h = cm.element_from_code(100);
        let perm: Vec<u32> = (0..g.num_points() as u32).map(|p| cm.right_mul_point(p, &h)).collect();
        for l in 0..g.num_lines() as u32 {
            let img: Vec<u32> = g.points_on(l).iter().map(|&p| perm[p as usize]).collect();
            let m = g.line_through(img[0], img[1]).unwrap();
            assert!(img.iter().all(|&p| g.incident(p, m)));
        }
    }
}
