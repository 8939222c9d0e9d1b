//! Automorphism groups of geometries: generating sets, stabilizer chains,
//! orbits, and generator families (symmetries, translations, homologies,
//! orthogonal groups).

pub mod bsgs;
pub mod extend;
pub mod factories;
pub mod perm;

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::incidence::{Geometry, Morphism, Subgeometry};

pub use bsgs::Bsgs;
pub use extend::{
    extend_to_automorphism, find_isomorphism, find_isomorphism_regular, rigidity_frame, Extender, SearchOutcome,
};
pub use factories::{
    coset_model_automorphisms, elation_group, induced_action, kernel_homologies, line_symmetries,
    orthogonal_generators, parabolic_group_order, translation_group, InducedAction,
};
pub use perm::{induced_line_perm, GroupElement, Perm};

/// Generators of an automorphism group of a fixed geometry, with a lazily
/// built stabilizer chain on points.
#[derive(Clone, Debug)]
pub struct GenSet {
    n_points: usize,
    n_lines: usize,
    gens: Vec<GroupElement>,
    frame: Option<Vec<u32>>,
    bsgs: OnceLock<Bsgs>,
}

impl GenSet {
    /// Checks every generator is an automorphism of `g`.
    pub fn new(g: &Geometry, gens: Vec<GroupElement>) -> Result<Self> {
        for (i, e) in gens.iter().enumerate() {
            if e.points.len() != g.num_points() || e.lines.len() != g.num_lines() || !e.is_automorphism(g) {
                return Err(Error::NotAutomorphism(format!("generator {i}")));
            }
        }
        Ok(Self::trusted(g, gens))
    }

    /// Generators already known to be automorphisms of `g`.
    pub fn trusted(g: &Geometry, gens: Vec<GroupElement>) -> Self {
        GenSet {
            n_points: g.num_points(),
            n_lines: g.num_lines(),
            gens: gens.into_iter().filter(|e| !e.is_identity()).collect(),
            frame: rigidity_frame(g),
            bsgs: OnceLock::new(),
        }
    }

    fn with_frame(&self, gens: Vec<GroupElement>) -> Self {
        GenSet {
            n_points: self.n_points,
            n_lines: self.n_lines,
            gens: gens.into_iter().filter(|e| !e.is_identity()).collect(),
            frame: self.frame.clone(),
            bsgs: OnceLock::new(),
        }
    }

    pub fn trivial(g: &Geometry) -> Self {
        Self::trusted(g, Vec::new())
    }

    pub fn gens(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn frame(&self) -> Option<&[u32]> {
        self.frame.as_deref()
    }

    pub fn num_points(&self) -> usize {
        self.n_points
    }

    pub fn num_lines(&self) -> usize {
        self.n_lines
    }

    pub fn bsgs(&self) -> &Bsgs {
        self.bsgs.get_or_init(|| {
            let perms: Vec<Perm> = self.gens.iter().map(|e| e.points.clone()).collect();
            Bsgs::new(self.n_points, &perms, &[], self.frame.as_deref())
        })
    }

    pub fn order(&self) -> u128 {
        self.bsgs().order()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.bsgs().contains(&e.points)
    }

    /// Adds generators (already checked automorphisms).
    pub fn with_more(&self, g: &Geometry, more: impl IntoIterator<Item = GroupElement>) -> GenSet {
        debug_assert_eq!(g.num_points(), self.n_points);
        let mut gens = self.gens.clone();
        gens.extend(more);
        self.with_frame(gens)
    }

    /// A sub-list of the generators generating the same group.
    pub fn pruned(&self, g: &Geometry) -> GenSet {
        let mut chain = Bsgs::new(self.n_points, &[], &[], self.frame.as_deref());
        let mut keep = Vec::new();
        for e in &self.gens {
            if chain.extend(&e.points) {
                keep.push(e.clone());
            }
        }
        debug_assert_eq!(g.num_points(), self.n_points);
        let out = self.with_frame(keep);
        let _ = out.bsgs.set(chain);
        out
    }

    /// The group carried to `a` through an isomorphism `iso: a → b` of
    /// `self`'s geometry `b`: each `e` becomes `iso · e · iso⁻¹`.
    pub fn pull_back(&self, a: &Geometry, iso: &Morphism) -> Result<GenSet> {
        if iso.point_map.len() != a.num_points() || a.num_points() != self.n_points || a.num_lines() != self.n_lines {
            return Err(Error::InvalidArgument("isomorphism does not match the geometries".into()));
        }
        let p = Perm::from_vec(iso.point_map.clone())?;
        let l = Perm::from_vec(iso.line_map.clone())?;
        let conj = GroupElement { points: p, lines: l };
        let inv = conj.inverse();
        let gens: Vec<GroupElement> = self.gens.iter().map(|e| conj.then(e).then(&inv)).collect();
        GenSet::new(a, gens)
    }

    fn element(&self, g: &Geometry, points: Perm) -> GroupElement {
        let lines = induced_line_perm(g, &points).expect("group element is an automorphism");
        GroupElement { points, lines }
    }

    /// Pointwise stabilizer of `pts`.
    pub fn pointwise_stabilizer(&self, g: &Geometry, pts: &[u32]) -> GenSet {
        let perms: Vec<Perm> = self.gens.iter().map(|e| e.points.clone()).collect();
        let b = Bsgs::new(self.n_points, &perms, pts, self.frame.as_deref());
        let k = b.base().iter().take_while(|x| pts.contains(x)).count();
        let gens = b.stabilizer_generators(k).into_iter().map(|p| self.element(g, p)).collect();
        self.with_frame(gens)
    }

    pub fn random_element<R: Rng>(&self, g: &Geometry, rng: &mut R) -> GroupElement {
        let p = self.bsgs().random_element(rng);
        self.element(g, p)
    }

    pub fn elements(&self, g: &Geometry, limit: usize) -> Option<Vec<GroupElement>> {
        let ps = self.bsgs().elements(limit)?;
        Some(ps.into_iter().map(|p| self.element(g, p)).collect())
    }
}

/// Objects acted on by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrbitObject {
    Point(u32),
    Line(u32),
    /// A point set, kept sorted.
    PointSet(Vec<u32>),
    /// Sorted point and line id lists.
    Subgeometry(Vec<u32>, Vec<u32>),
}

impl OrbitObject {
    pub fn point_set(points: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = points.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        OrbitObject::PointSet(v)
    }

    pub fn subgeometry(s: &Subgeometry) -> Self {
        OrbitObject::Subgeometry(s.points(), s.lines())
    }

    pub fn image(&self, e: &GroupElement) -> OrbitObject {
        let sorted = |v: &[u32], p: &Perm| {
            let mut w: Vec<u32> = v.iter().map(|&x| p.apply(x)).collect();
            w.sort_unstable();
            w
        };
        match self {
            OrbitObject::Point(p) => OrbitObject::Point(e.points.apply(*p)),
            OrbitObject::Line(l) => OrbitObject::Line(e.lines.apply(*l)),
            OrbitObject::PointSet(v) => OrbitObject::PointSet(sorted(v, &e.points)),
            OrbitObject::Subgeometry(p, l) => OrbitObject::Subgeometry(sorted(p, &e.points), sorted(l, &e.lines)),
        }
    }
}

/// An orbit with a Schreier tree: `parent[i]` and the generator mapping it to `items[i]`.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub items: Vec<OrbitObject>,
    parent: Vec<(u32, u32)>,
    index: HashMap<OrbitObject, u32>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.items.len()
    }
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
    pub fn position(&self, x: &OrbitObject) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }
    pub fn contains(&self, x: &OrbitObject) -> bool {
        self.index.contains_key(x)
    }

    /// Generator indices mapping the seed to item `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while i != 0 {
            let (p, s) = self.parent[i];
            w.push(s as usize);
            i = p as usize;
        }
        w.reverse();
        w
    }
}

/// Breadth-first orbit of `seed` under `gens`, up to `limit` items.
pub fn orbit_with_limit(gens: &[GroupElement], seed: &OrbitObject, limit: usize) -> Option<Orbit> {
    let mut orb = Orbit { items: vec![seed.clone()], parent: vec![(0, 0)], index: HashMap::new() };
    orb.index.insert(seed.clone(), 0);
    let mut k = 0;
    while k < orb.items.len() {
        for (s, e) in gens.iter().enumerate() {
            let y = orb.items[k].image(e);
            if !orb.index.contains_key(&y) {
                if orb.items.len() >= limit {
                    return None;
                }
                orb.index.insert(y.clone(), orb.items.len() as u32);
                orb.items.push(y);
                orb.parent.push((k as u32, s as u32));
            }
        }
        k += 1;
    }
    Some(orb)
}

pub fn orbit(gs: &GenSet, seed: &OrbitObject) -> Orbit {
    orbit_with_limit(gs.gens(), seed, usize::MAX).expect("no limit")
}

/// Orbit of a point under `gens` as a sorted id list.
pub fn point_orbit(gens: &[GroupElement], p: u32, n: usize) -> Vec<u32> {
    let mut seen = BitSet::new(n);
    seen.insert(p as usize);
    let mut queue = vec![p];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        for e in gens {
            let y = e.points.apply(x);
            if seen.insert(y as usize) {
                queue.push(y);
            }
        }
        k += 1;
    }
    queue.sort_unstable();
    queue
}

/// Point orbits of the group generated by `gens`.
pub fn point_orbits(gens: &[GroupElement], n: usize) -> Vec<Vec<u32>> {
    let mut seen = BitSet::new(n);
    let mut out = Vec::new();
    for p in 0..n as u32 {
        if seen.contains(p as usize) {
            continue;
        }
        let o = point_orbit(gens, p, n);
        for &x in &o {
            seen.insert(x as usize);
        }
        out.push(o);
    }
    out
}

/// `|G| / |orbit(obj)|`.
pub fn stabilizer_order(gs: &GenSet, obj: &OrbitObject) -> u128 {
    gs.order() / orbit(gs, obj).len() as u128
}

fn word_element(g: &Geometry, gens: &[GroupElement], word: &[usize]) -> GroupElement {
    word.iter().fold(GroupElement::identity(g), |acc, &s| acc.then(&gens[s]))
}

/// Stabilizer of `obj` from Schreier generators of its orbit (orbit at most `limit`).
pub fn stabilizer_by_orbit(gs: &GenSet, g: &Geometry, obj: &OrbitObject, limit: usize) -> Option<GenSet> {
    let gens = gs.gens();
    let orb = orbit_with_limit(gens, obj, limit)?;
    let mut chain = Bsgs::new(gs.num_points(), &[], &[], gs.frame());
    let mut stab: Vec<GroupElement> = Vec::new();
    let target = gs.order() / orb.len() as u128;
    let reps: Vec<GroupElement> = (0..orb.len()).map(|i| word_element(g, gens, &orb.word(i))).collect();
    'scan: for (i, item) in orb.items.iter().enumerate() {
        for (s, e) in gens.iter().enumerate() {
            let j = orb.position(&item.image(e)).expect("closed orbit");
            if orb.parent[j] == (i as u32, s as u32) && j != 0 {
                continue;
            }
            let h = reps[i].then(e).then(&reps[j].inverse());
            if chain.extend(&h.points) {
                stab.push(h);
                if chain.order() == target {
                    break 'scan;
                }
            }
        }
    }
    let out = gs.with_frame(stab);
    let _ = out.bsgs.set(chain);
    Some(out)
}

/// Setwise stabilizer of a point set. When the orbit of the set exceeds
/// `limit`, the stabilizer of the first point of the set is used first.
pub fn set_stabilizer(gs: &GenSet, g: &Geometry, set: &[u32], limit: usize) -> Result<GenSet> {
    let obj = OrbitObject::point_set(set.iter().copied());
    if let Some(s) = stabilizer_by_orbit(gs, g, &obj, limit) {
        return Ok(s);
    }
    let u = *obj_points(&obj).first().ok_or_else(|| Error::InvalidArgument("empty set".into()))?;
    set_stabilizer_at(gs, g, set, u, limit)
}

fn obj_points(obj: &OrbitObject) -> &[u32] {
    match obj {
        OrbitObject::PointSet(v) => v,
        _ => &[],
    }
}

/// Setwise stabilizer of a point set through the stabilizer of the anchor
/// point `u` of the set. A good anchor has a small orbit under the answer.
pub fn set_stabilizer_at(gs: &GenSet, g: &Geometry, set: &[u32], u: u32, limit: usize) -> Result<GenSet> {
    let obj = OrbitObject::point_set(set.iter().copied());
    let sorted = obj_points(&obj);
    if !sorted.contains(&u) {
        return Err(Error::InvalidArgument(format!("anchor {u} is not in the set")));
    }
    let h = gs.pointwise_stabilizer(g, &[u]);
    let h_orbit = orbit_with_limit(h.gens(), &obj, limit)
        .ok_or_else(|| Error::InvalidArgument(format!("set orbit under a point stabilizer exceeds {limit}")))?;
    let hs = stabilizer_by_orbit(&h, g, &obj, limit).expect("orbit within limit");
    // Coset representatives of G_u in G from a chain based at u.
    let perms: Vec<Perm> = gs.gens().iter().map(|e| e.points.clone()).collect();
    let chain = Bsgs::new(gs.num_points(), &perms, &[u], gs.frame());
    let mut extra = Vec::new();
    let mut reached = 1u128;
    for &w in sorted.iter().filter(|&&w| w != u) {
        let Some(gw) = chain.coset_rep(0, w) else { continue };
        let gw = GroupElement { lines: induced_line_perm(g, &gw).expect("automorphism"), points: gw };
        let back = obj.image(&gw.inverse());
        if let Some(i) = h_orbit.position(&back) {
            let hword = word_element(g, h.gens(), &h_orbit.word(i));
            extra.push(hword.then(&gw));
            reached += 1;
        }
    }
    let out = hs.with_more(g, extra);
    debug_assert_eq!(out.order(), hs.order() * reached);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_group(g: &Geometry) -> GenSet {
        let n = 3;
        let transpose: Vec<u32> = (0..9).map(|p| (p % n) * n + p / n).collect();
        let row_cycle: Vec<u32> = (0..9).map(|p| ((p / n + 1) % n) * n + p % n).collect();
        let row_swap: Vec<u32> = (0..9)
            .map(|p| {
                let r = p / n;
                let r2 = if r == 0 {
                    1
                } else if r == 1 {
                    0
                } else {
                    2
                };
                r2 * n + p % n
            })
            .collect();
        let gens = [transpose, row_cycle, row_swap]
            .into_iter()
            .map(|v| GroupElement::from_point_perm(g, v).unwrap())
            .collect();
        GenSet::new(g, gens).unwrap()
    }

    #[test]
    fn grid_group_orders() {
        let g = Geometry::grid(3, 3);
        let gs = grid_group(&g);
        assert_eq!(gs.order(), 72);
        let o = orbit(&gs, &OrbitObject::Point(0));
        assert_eq!(o.len(), 9);
        assert_eq!(stabilizer_order(&gs, &OrbitObject::Point(0)), 8);
        assert_eq!(stabilizer_order(&gs, &OrbitObject::Line(0)), 12);
        let diag = OrbitObject::point_set([0, 4, 8]);
        assert_eq!(orbit(&gs, &diag).len(), 6);
        let st = set_stabilizer(&gs, &g, &[0, 4, 8], 2).unwrap();
        assert_eq!(st.order(), 12);
        let st2 = set_stabilizer(&gs, &g, &[0, 4, 8], 100).unwrap();
        assert_eq!(st2.order(), 12);
        let ps = gs.pointwise_stabilizer(&g, &[0, 4]);
        assert_eq!(ps.order(), 2);
    }
}
