//! Hyperplane subquadrangles, the ovoids their exterior points subtend, and
//! the analyses built on them.

pub mod lines;
pub mod translation;

use std::collections::HashMap;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::constructions::{build_parabolic, CosetModel};
use crate::error::{Error, Result};
use crate::galois::Field;
use crate::incidence::{line_regulus, validate_gq, Geometry, HullWorkspace, Morphism, Subgeometry};
use crate::permgroups::{find_isomorphism_regular, orthogonal_generators, GenSet};

pub use lines::{
    axis_group, epsilon_classes, hl_kernel, lu_orbit, ovoid_kernel, special_line_analysis, SpecialLineReport,
};
pub use translation::{translation_ovoid_certificate, TranslationCert};

/// Orbit class of an order-`q` subquadrangle, read off from subtension multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OmegaClass {
    /// Every subtended ovoid is subtended by exactly two points.
    Omega1,
    /// Every subtended ovoid is subtended by one point.
    Omega2,
    Unknown,
}

impl OmegaClass {
    pub fn from_multiplicity(theta: usize) -> Self {
        match theta {
            2 => OmegaClass::Omega1,
            1 => OmegaClass::Omega2,
            _ => OmegaClass::Unknown,
        }
    }
}

/// A full subquadrangle of a parent geometry.
#[derive(Clone, Debug)]
pub struct SubGQHandle {
    pub sub: Subgeometry,
    pub order: (usize, usize),
    pub class: OmegaClass,
    /// Subtension multiplicity of the sampled ovoids; 0 before classification.
    pub multiplicity: usize,
    /// The parent's line at infinity, when it lies in the subquadrangle.
    pub infinity: Option<u32>,
}

impl SubGQHandle {
    /// The induced full subgeometry on `points`, checked to be a quadrangle.
    pub fn from_points(g: &Geometry, points: BitSet, infinity: Option<u32>) -> Result<Self> {
        let sub = Subgeometry::induced(g, points);
        if !sub.is_full(g) {
            return Err(Error::Structure("subgeometry is not full".into()));
        }
        let (local, _, _) = sub.to_geometry(g);
        let rep = validate_gq(&local);
        let order = rep
            .order()
            .filter(|_| rep.is_gq)
            .ok_or_else(|| Error::Structure(format!("not a quadrangle: {:?}", rep.violations.first())))?;
        let infinity = infinity.filter(|&l| sub.has_line(l));
        Ok(SubGQHandle { sub, order, class: OmegaClass::Unknown, multiplicity: 0, infinity })
    }

    pub fn contains(&self, p: u32) -> bool {
        self.sub.has_point(p)
    }

    pub fn points(&self) -> Vec<u32> {
        self.sub.points()
    }

    pub fn view(&self, g: &Geometry) -> LocalView {
        LocalView::new(g, &self.sub)
    }

    /// Points of `g` outside the subquadrangle.
    pub fn exterior(&self, g: &Geometry) -> Vec<u32> {
        (0..g.num_points() as u32).filter(|&p| !self.contains(p)).collect()
    }
}

/// A subgeometry as a standalone geometry, with id maps both ways.
#[derive(Clone, Debug)]
pub struct LocalView {
    pub geometry: Geometry,
    pub points: Vec<u32>,
    pub lines: Vec<u32>,
    point_index: Vec<u32>,
    line_index: Vec<u32>,
}

impl LocalView {
    pub fn new(g: &Geometry, sub: &Subgeometry) -> Self {
        let (geometry, points, lines) = sub.to_geometry(g);
        let mut point_index = vec![u32::MAX; g.num_points()];
        let mut line_index = vec![u32::MAX; g.num_lines()];
        for (i, &p) in points.iter().enumerate() {
            point_index[p as usize] = i as u32;
        }
        for (i, &l) in lines.iter().enumerate() {
            line_index[l as usize] = i as u32;
        }
        LocalView { geometry, points, lines, point_index, line_index }
    }

    pub fn local_point(&self, p: u32) -> Option<u32> {
        let i = self.point_index[p as usize];
        (i != u32::MAX).then_some(i)
    }

    pub fn local_line(&self, l: u32) -> Option<u32> {
        let i = self.line_index[l as usize];
        (i != u32::MAX).then_some(i)
    }

    /// Sorted local ids of parent points; `None` if one is outside.
    pub fn local_set(&self, pts: &[u32]) -> Option<Vec<u32>> {
        let mut v = pts.iter().map(|&p| self.local_point(p)).collect::<Option<Vec<u32>>>()?;
        v.sort_unstable();
        Some(v)
    }

    pub fn parent_set(&self, pts: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = pts.iter().map(|&p| self.points[p as usize]).collect();
        v.sort_unstable();
        v
    }
}

/// An ovoid of a subquadrangle, in parent point ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ovoid {
    /// Sorted.
    pub points: Vec<u32>,
    /// Exterior points known to subtend it.
    pub subtenders: Vec<u32>,
    /// Its point on the line at infinity, when that line is in the subquadrangle.
    pub special: Option<u32>,
}

/// The ovoids subtended by the exterior points of a line meeting the
/// subquadrangle in one point.
#[derive(Clone, Debug, Serialize)]
pub struct Rosette {
    pub line: u32,
    pub base_point: u32,
    pub ovoids: Vec<Ovoid>,
}

/// `x⊥ ∩ Q` for an exterior point `x`, checked to meet each line of `Q` once.
pub fn subtended_ovoid(g: &Geometry, q: &SubGQHandle, x: u32) -> Result<Ovoid> {
    if x as usize >= g.num_points() {
        return Err(Error::InvalidArgument(format!("point {x} out of range")));
    }
    if q.contains(x) {
        return Err(Error::InsideSubgeometry(x));
    }
    let mut set = g.row_set(x);
    set.intersect_with(q.sub.point_set().words());
    for l in q.sub.line_set().iter() {
        let k = g.points_on(l as u32).iter().filter(|&&p| set.contains(p as usize)).count();
        if k != 1 {
            return Err(Error::Structure(format!("x⊥ meets line {l} of the subquadrangle in {k} points")));
        }
    }
    let points = set.to_vec();
    let special = q.infinity.and_then(|inf| points.iter().copied().find(|&p| g.incident(p, inf)));
    Ok(Ovoid { points, subtenders: vec![x], special })
}

/// All exterior points whose perp meets `Q` exactly in `o`.
pub fn subtension_multiplicity(g: &Geometry, q: &SubGQHandle, o: &Ovoid) -> (usize, Vec<u32>) {
    let mut cand = BitSet::full(g.num_points());
    for &p in &o.points {
        cand.intersect_with(g.row(p));
    }
    cand.subtract(q.sub.point_set().words());
    let target = BitSet::from_iter(g.num_points(), o.points.iter().copied());
    let subs: Vec<u32> = cand
        .iter()
        .map(|y| y as u32)
        .filter(|&y| {
            let mut s = g.row_set(y);
            s.intersect_with(q.sub.point_set().words());
            s == target
        })
        .collect();
    (subs.len(), subs)
}

/// The rosette of a line meeting `Q` in exactly one point.
pub fn rosette(g: &Geometry, q: &SubGQHandle, line: u32) -> Result<Rosette> {
    if line as usize >= g.num_lines() {
        return Err(Error::InvalidArgument(format!("line {line} out of range")));
    }
    let inside: Vec<u32> = g.points_on(line).iter().copied().filter(|&p| q.contains(p)).collect();
    if inside.len() != 1 {
        return Err(Error::Structure(format!("line {line} meets the subquadrangle in {} points", inside.len())));
    }
    let base_point = inside[0];
    let ovoids = g
        .points_on(line)
        .iter()
        .filter(|&&p| p != base_point)
        .map(|&x| subtended_ovoid(g, q, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Rosette { line, base_point, ovoids })
}

/// Result of the order-`q` subquadrangle census of a Kantor–Knuth quadrangle.
#[derive(Clone, Debug)]
pub struct Census {
    /// Grids of order `(q,1)` through `[∞]` used as seeds.
    pub grids: usize,
    pub subgqs: Vec<SubGQHandle>,
    /// Hulls that did not close to a quadrangle of order `(q,q)`.
    pub escaped: usize,
    pub hull_runs: usize,
    /// Subquadrangles whose sampled ovoids disagreed on multiplicity.
    pub inconsistent: usize,
}

impl Census {
    pub fn count(&self, class: OmegaClass) -> usize {
        self.subgqs.iter().filter(|h| h.class == class).count()
    }
}

/// All subquadrangles of order `(q,q)` containing `[∞]`, found from the grids
/// on two fixed points of `[∞]` and classified by subtension multiplicity of
/// `samples` subtended ovoids each.
pub fn enumerate_order_q_subgqs(g: &Geometry, cm: &CosetModel, samples: usize) -> Result<Census> {
    let q = cm.q();
    let inf = cm.infinity_line();
    let (a, b) = (cm.symbol_point(0), cm.symbol_point(1));
    let through = |p: u32| -> Vec<u32> { g.lines_through(p).iter().copied().filter(|&l| l != inf).collect() };
    let (la, lb) = (through(a), through(b));
    let target = (q + 1) * (q * q + 1);
    let n = g.num_points();

    let mut ws = HullWorkspace::new(g);
    let mut found: Vec<SubGQHandle> = Vec::new();
    let mut by_pair: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let (mut grids, mut escaped, mut hull_runs) = (0, 0, 0);
    for &u in &la {
        for &v in &lb {
            let (perp, reg) = line_regulus(g, u, v)?;
            if perp.len() != q + 1 || reg.len() != q + 1 {
                continue;
            }
            grids += 1;
            let mut grid = BitSet::new(n);
            for &l in &reg {
                for &p in g.points_on(l) {
                    grid.insert(p as usize);
                }
            }
            let mut covered = grid.clone();
            for &i in by_pair.get(&(u, v)).into_iter().flatten() {
                covered.union_with(found[i].sub.point_set().words());
            }
            while let Some(x) = (0..n).find(|&p| !covered.contains(p)) {
                let mut members = grid.clone();
                members.insert(x);
                hull_runs += 1;
                let closed = ws.close(g, &mut members, target);
                if !closed || members.count() != target {
                    escaped += 1;
                    covered.insert(x);
                    continue;
                }
                covered.union_with(members.words());
                let key = members.to_vec();
                if seen.contains_key(&key) {
                    continue;
                }
                let h = SubGQHandle::from_points(g, members, Some(inf))?;
                let idx = found.len();
                for &u2 in la.iter().filter(|&&l| h.sub.has_line(l)) {
                    for &v2 in lb.iter().filter(|&&l| h.sub.has_line(l)) {
                        by_pair.entry((u2, v2)).or_default().push(idx);
                    }
                }
                seen.insert(key, idx);
                found.push(h);
            }
        }
    }
    let mut inconsistent = 0;
    for h in &mut found {
        let ext = h.exterior(g);
        let step = (ext.len() / samples.max(1)).max(1);
        let mut thetas = Vec::new();
        for &x in ext.iter().step_by(step).take(samples.max(1)) {
            let o = subtended_ovoid(g, h, x)?;
            thetas.push(subtension_multiplicity(g, h, &o).0);
        }
        if thetas.windows(2).all(|w| w[0] == w[1]) {
            h.multiplicity = thetas[0];
            h.class = OmegaClass::from_multiplicity(thetas[0]);
        } else {
            inconsistent += 1;
        }
    }
    Ok(Census { grids, subgqs: found, escaped, hull_runs, inconsistent })
}

/// The full collineation group of a quadrangle isomorphic to `Q(4,q)` over
/// `field`, carried over from the quadric model through a found isomorphism.
/// The isomorphism is searched between the duals, whose points are regular.
pub fn classical_automorphisms(q: &Geometry, field: &Field) -> Result<GenSet> {
    let (model_geom, model) = build_parabolic(field)?;
    let dual = find_isomorphism_regular(&q.dual(), &model_geom.dual(), 100_000)
        .ok_or_else(|| Error::Structure("no isomorphism onto the parabolic quadric found".into()))?;
    let iso = Morphism { point_map: dual.line_map, line_map: dual.point_map };
    orthogonal_generators(&model_geom, &model)?.pull_back(q, &iso)
}

/// All ovoids subtended by exterior points of `Q`, deduplicated, with their subtenders.
pub fn all_subtended_ovoids(g: &Geometry, q: &SubGQHandle) -> Result<Vec<Ovoid>> {
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut out: Vec<Ovoid> = Vec::new();
    for x in q.exterior(g) {
        let o = subtended_ovoid(g, q, x)?;
        match index.get(&o.points) {
            Some(&i) => out[i].subtenders.push(x),
            None => {
                index.insert(o.points.clone(), out.len());
                out.push(o);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_kantor_knuth;
    use crate::permgroups::{translation_group, OrbitObject};

    fn classical_q3() -> (Geometry, CosetModel, Census) {
        let f = Field::new(3, 1).unwrap();
        let sigma = f.frobenius_power(0).unwrap();
        let (g, cm) = build_kantor_knuth(&f, &sigma, f.from_int(2)).unwrap();
        let census = enumerate_order_q_subgqs(&g, &cm, 4).unwrap();
        (g, cm, census)
    }

    #[test]
    fn census_of_classical_q3() {
        let (g, cm, c) = classical_q3();
        assert_eq!(c.grids, 81);
        assert_eq!(c.subgqs.len(), 36);
        assert_eq!(c.inconsistent, 0);
        // Every ovoid of Q(4,q) ⊂ Q(5,q) is subtended twice for odd q.
        assert_eq!(c.count(OmegaClass::Omega1), 36);
        for h in &c.subgqs {
            assert_eq!(h.order, (3, 3));
            assert_eq!(h.infinity, Some(cm.infinity_line()));
            assert_eq!(h.points().len(), 40);
        }
        let mut keys: Vec<Vec<u32>> = c.subgqs.iter().map(|h| h.points()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 36);
        assert!(c.subgqs.iter().all(|h| g.points_on(cm.infinity_line()).iter().all(|&p| h.contains(p))));
    }

    #[test]
    fn ovoids_and_rosettes() {
        let (g, cm, c) = classical_q3();
        let q = &c.subgqs[0];
        let ext = q.exterior(&g);
        assert_eq!(ext.len(), 72);
        let o = subtended_ovoid(&g, q, ext[0]).unwrap();
        assert_eq!(o.points.len(), 10);
        assert!(o.special.is_some_and(|u| g.incident(u, cm.infinity_line())));
        let (theta, subs) = subtension_multiplicity(&g, q, &o);
        assert_eq!(theta, 2);
        assert!(subs.contains(&ext[0]));
        assert!(matches!(subtended_ovoid(&g, q, q.points()[0]), Err(Error::InsideSubgeometry(_))));

        let all = all_subtended_ovoids(&g, q).unwrap();
        assert_eq!(all.len(), 36);
        assert!(all.iter().all(|o| o.subtenders.len() == 2));
        let mut specials: Vec<u32> = all.iter().filter_map(|o| o.special).collect();
        specials.sort_unstable();
        specials.dedup();
        let mut inf = g.points_on(cm.infinity_line()).to_vec();
        inf.sort_unstable();
        assert_eq!(specials, inf);

        let line = *g.lines_through(ext[0]).first().unwrap();
        let r = rosette(&g, q, line).unwrap();
        assert_eq!(r.ovoids.len(), 3);
        assert!(r.ovoids.iter().all(|o| o.points.binary_search(&r.base_point).is_ok()));
        assert!(rosette(&g, q, cm.infinity_line()).is_err());
    }

    #[test]
    fn local_analyses_on_q43() {
        let (g, cm, c) = classical_q3();
        let q = &c.subgqs[0];
        let v = q.view(&g);
        let all = all_subtended_ovoids(&g, q).unwrap();
        let o = v.local_set(&all[0].points).unwrap();
        let u = v.local_point(all[0].special.unwrap()).unwrap();
        let inf = v.local_line(cm.infinity_line()).unwrap();
        let lu = axis_group(&v.geometry, inf).unwrap();
        let orbit = lu_orbit(&lu, &o, 10_000).unwrap();
        assert!(orbit.contains(&o));
        assert_eq!(
            orbit.len() as u128,
            lu.order() / crate::permgroups::stabilizer_order(&lu, &OrbitObject::PointSet(o.clone()))
        );

        let w = *o.iter().find(|&&x| x != u).unwrap();
        let k = ovoid_kernel(&v.geometry, &o, u, w).unwrap();
        assert_eq!(k.order(), 2);
        assert!(ovoid_kernel(&v.geometry, &o, u, u).is_err());

        let rep = special_line_analysis(&v.geometry, &o, u).unwrap();
        assert_eq!(rep.classes.values().map(|v| v.len()).sum::<usize>(), 4);

        let pairs: Vec<(Vec<u32>, u32)> = all.iter().take(6).map(|x| (v.local_set(&x.points).unwrap(), inf)).collect();
        let classes = epsilon_classes(&v.geometry, &pairs, 10_000).unwrap();
        let mut seen: Vec<usize> = classes.concat();
        seen.sort_unstable();
        assert_eq!(seen, (0..pairs.len()).collect::<Vec<_>>());
    }

    #[test]
    fn translation_certificate_q3() {
        let (g, cm, c) = classical_q3();
        let q = &c.subgqs[0];
        let all = all_subtended_ovoids(&g, q).unwrap();
        let o = &all[3];
        let e = o.subtenders[0];
        let omega = g.points_on(cm.infinity_line()).iter().copied().find(|&p| g.collinear(p, e)).unwrap();
        let t = translation_group(&g, &cm, omega).unwrap();
        let cert = translation_ovoid_certificate(&g, &cm, q, o, e, &t).unwrap();
        assert!(cert.valid(), "{cert:?}");
        assert_eq!(cert.order, 9);
        assert!(translation_ovoid_certificate(&g, &cm, q, o, q.points()[0], &t).is_err());
    }

    #[test]
    fn classical_group_of_q43() {
        let f = Field::new(3, 1).unwrap();
        let (g, _) = build_parabolic(&f).unwrap();
        let aut = classical_automorphisms(&g, &f).unwrap();
        assert_eq!(aut.order(), 51840);
        assert_eq!(crate::permgroups::stabilizer_order(&aut, &OrbitObject::Line(0)), 51840 / 40);
    }
}
