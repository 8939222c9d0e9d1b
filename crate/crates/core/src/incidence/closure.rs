//! Perps, reguli, hulls, subgeometries and hyperplane types.

use serde::Serialize;

use super::Geometry;
use crate::bitset::{ones, BitSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerpMode {
    Perp,
    DoublePerp,
    /// `cl(u,v)`: points whose perp meets `{u,v}⊥⊥`.
    Cl,
}

pub fn perp(g: &Geometry, set: &[u32], mode: PerpMode) -> Result<BitSet> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("perp of an empty set".into()));
    }
    let single = |s: &[u32]| -> BitSet {
        let mut acc = BitSet::full(g.num_points());
        for &x in s {
            acc.intersect_with(g.row(x));
        }
        acc
    };
    match mode {
        PerpMode::Perp => Ok(single(set)),
        PerpMode::DoublePerp => {
            let p = single(set).to_vec();
            if p.is_empty() {
                return Ok(BitSet::full(g.num_points()));
            }
            Ok(single(&p))
        }
        PerpMode::Cl => {
            if set.len() != 2 || set[0] == set[1] {
                return Err(Error::InvalidArgument("cl needs two distinct points".into()));
            }
            let dp = perp(g, set, PerpMode::DoublePerp)?;
            let mut out = BitSet::new(g.num_points());
            for z in dp.iter() {
                out.union_with(g.row(z as u32));
            }
            Ok(out)
        }
    }
}

/// `({U,V}⊥, {U,V}⊥⊥)` as sorted line-id lists.
pub fn line_regulus(g: &Geometry, u: u32, v: u32) -> Result<(Vec<u32>, Vec<u32>)> {
    if u == v || g.meet(u, v).is_some() {
        return Err(Error::InvalidArgument(format!("lines {u} and {v} are equal or concurrent")));
    }
    let meets_all = |cand: u32, set: &[u32]| set.iter().all(|&w| w == cand || g.meet(cand, w).is_some());
    let mut p: Vec<u32> = Vec::new();
    for &x in g.points_on(u) {
        if let Some(m) = g.line_through_meeting(x, v) {
            if meets_all(m, &[u, v]) {
                p.push(m);
            }
        }
    }
    p.sort_unstable();
    p.dedup();
    let mut pp: Vec<u32> = Vec::new();
    if p.len() >= 2 {
        for &x in g.points_on(p[0]) {
            if let Some(m) = g.line_through_meeting(x, p[1]) {
                if meets_all(m, &p) {
                    pp.push(m);
                }
            }
        }
    } else if p.len() == 1 {
        pp = g.concurrent_lines(p[0]);
    }
    pp.sort_unstable();
    pp.dedup();
    Ok((p, pp))
}

/// A set of points and lines of a parent geometry with induced incidence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgeometry {
    points: BitSet,
    lines: BitSet,
}

impl Subgeometry {
    pub fn new(g: &Geometry, points: &[u32], lines: &[u32]) -> Result<Self> {
        if points.iter().any(|&p| p as usize >= g.num_points()) || lines.iter().any(|&l| l as usize >= g.num_lines()) {
            return Err(Error::InvalidArgument("subgeometry id out of range".into()));
        }
        Ok(Subgeometry {
            points: BitSet::from_iter(g.num_points(), points.iter().copied()),
            lines: BitSet::from_iter(g.num_lines(), lines.iter().copied()),
        })
    }

    /// The points given and every parent line all of whose points are among them.
    pub fn induced(g: &Geometry, points: BitSet) -> Self {
        let mut lines = BitSet::new(g.num_lines());
        for (l, pts) in g.lines().iter().enumerate() {
            if pts.iter().all(|&p| points.contains(p as usize)) {
                lines.insert(l);
            }
        }
        Subgeometry { points, lines }
    }

    pub fn point_set(&self) -> &BitSet {
        &self.points
    }
    pub fn line_set(&self) -> &BitSet {
        &self.lines
    }
    pub fn points(&self) -> Vec<u32> {
        self.points.to_vec()
    }
    pub fn lines(&self) -> Vec<u32> {
        self.lines.to_vec()
    }
    pub fn num_points(&self) -> usize {
        self.points.count()
    }
    pub fn num_lines(&self) -> usize {
        self.lines.count()
    }
    #[inline]
    pub fn has_point(&self, p: u32) -> bool {
        self.points.contains(p as usize)
    }
    #[inline]
    pub fn has_line(&self, l: u32) -> bool {
        self.lines.contains(l as usize)
    }

    /// Full iff every parent point of every listed line is listed.
    pub fn is_full(&self, g: &Geometry) -> bool {
        self.lines.iter().all(|l| g.points_on(l as u32).iter().all(|&p| self.has_point(p)))
    }

    /// Standalone copy with ids renumbered in ascending parent order.
    /// Returns the geometry and the local-to-parent point and line maps.
    pub fn to_geometry(&self, g: &Geometry) -> (Geometry, Vec<u32>, Vec<u32>) {
        let pts = self.points();
        let lns = self.lines();
        let mut local = vec![u32::MAX; g.num_points()];
        for (i, &p) in pts.iter().enumerate() {
            local[p as usize] = i as u32;
        }
        let lines = lns
            .iter()
            .map(|&l| g.points_on(l).iter().filter(|&&p| self.has_point(p)).map(|&p| local[p as usize]).collect())
            .collect();
        let sub = Geometry::build(lines, pts.len()).expect("subgeometry of a partial linear space");
        (sub, pts, lns)
    }
}

/// Reusable scratch space for repeated hull computations on one geometry.
pub struct HullWorkspace {
    line_count: Vec<u16>,
    touched: Vec<u32>,
    queue: Vec<u32>,
}

impl HullWorkspace {
    pub fn new(g: &Geometry) -> Self {
        HullWorkspace { line_count: vec![0; g.num_lines()], touched: Vec::new(), queue: Vec::new() }
    }

    /// Closure of `members` (modified in place) under joining collinear
    /// members. Returns `false` if more than `limit` points accumulate.
    pub fn close(&mut self, g: &Geometry, members: &mut BitSet, limit: usize) -> bool {
        self.queue.clear();
        self.queue.extend(members.iter().map(|p| p as u32));
        let mut size = self.queue.len();
        let mut ok = size <= limit;
        let mut head = 0;
        while ok && head < self.queue.len() {
            let p = self.queue[head];
            head += 1;
            for &l in g.lines_through(p) {
                let c = &mut self.line_count[l as usize];
                if *c == 0 {
                    self.touched.push(l);
                }
                *c += 1;
                if *c == 2 {
                    for &z in g.points_on(l) {
                        if members.insert(z as usize) {
                            self.queue.push(z);
                            size += 1;
                        }
                    }
                    if size > limit {
                        ok = false;
                        break;
                    }
                }
            }
        }
        for &l in &self.touched {
            self.line_count[l as usize] = 0;
        }
        self.touched.clear();
        ok
    }
}

/// Smallest point set containing `seed` closed under joining collinear
/// points, with every line inside it.
pub fn hull(g: &Geometry, seed: &[u32]) -> Subgeometry {
    let mut members = BitSet::from_iter(g.num_points(), seed.iter().copied());
    HullWorkspace::new(g).close(g, &mut members, usize::MAX);
    Subgeometry::induced(g, members)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperplaneType {
    /// An ovoid.
    A,
    /// The perp of a point.
    B {
        center: u32,
    },
    /// A full proper subquadrangle meeting every line.
    C {
        thin: bool,
    },
    NotHyperplane,
}

/// Type of the point set of `h` as a geometrical hyperplane of `g`.
pub fn classify_hyperplane(g: &Geometry, h: &Subgeometry) -> HyperplaneType {
    let pts = h.point_set();
    let mut inside = Vec::new();
    for (l, lp) in g.lines().iter().enumerate() {
        let k = lp.iter().filter(|&&p| pts.contains(p as usize)).count();
        if k == lp.len() {
            inside.push(l as u32);
        } else if k != 1 {
            return HyperplaneType::NotHyperplane;
        }
    }
    if inside.is_empty() {
        return HyperplaneType::A;
    }
    let common = inside.iter().skip(1).try_fold(g.points_on(inside[0]).to_vec(), |acc, &l| {
        let next: Vec<u32> = acc.into_iter().filter(|&p| g.incident(p, l)).collect();
        (!next.is_empty()).then_some(next)
    });
    if let Some(c) = common {
        if c.len() == 1 && *pts == g.row_set(c[0]) {
            return HyperplaneType::B { center: c[0] };
        }
    }
    let thin = pts
        .iter()
        .all(|p| g.lines_through(p as u32).iter().filter(|&&l| inside.binary_search(&l).is_ok()).count() == 2);
    HyperplaneType::C { thin }
}

/// Points collinear with at least one member of `set`.
pub fn shadow(g: &Geometry, set: &BitSet) -> BitSet {
    let mut out = BitSet::new(g.num_points());
    for p in ones(set.words()) {
        out.union_with(g.row(p as u32));
    }
    out
}

/// The quadrangle's lines followed by the spans `{x,y}⊥⊥` of its noncollinear
/// point pairs, each listed once. For `W(q)` this is `PG(3,q)` with the
/// isotropic lines first. Errors unless every span has the size of a line.
pub fn span_closure(g: &Geometry) -> Result<Geometry> {
    let n = g.num_points();
    let size = g.uniform_line_size().ok_or_else(|| Error::Structure("lines of unequal size".into()))?;
    let mut lines: Vec<Vec<u32>> = g.lines().to_vec();
    for x in 0..n as u32 {
        let mut covered = g.row_set(x);
        for y in x + 1..n as u32 {
            if covered.contains(y as usize) {
                continue;
            }
            let span = perp(g, &[x, y], PerpMode::DoublePerp)?.to_vec();
            if span.len() != size {
                return Err(Error::Structure(format!("span of {x} and {y} has {} points", span.len())));
            }
            for &z in &span {
                covered.insert(z as usize);
            }
            if span[0] == x {
                lines.push(span);
            }
        }
    }
    Geometry::build(lines, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_regulus_and_perps() {
        let g = Geometry::grid(4, 4);
        // Rows 0..4 are lines 0..4, columns 4..8.
        let (p, pp) = line_regulus(&g, 0, 1).unwrap();
        assert_eq!(p, vec![4, 5, 6, 7]);
        assert_eq!(pp, vec![0, 1, 2, 3]);
        assert!(line_regulus(&g, 0, 4).is_err());
        let pr = perp(&g, &[0], PerpMode::Perp).unwrap();
        assert_eq!(pr.count(), 7);
        let uv = perp(&g, &[0, 5], PerpMode::Perp).unwrap();
        assert_eq!(uv.to_vec(), vec![1, 4]);
        assert!(perp(&g, &[], PerpMode::Perp).is_err());
        assert!(perp(&g, &[0], PerpMode::Cl).is_err());
    }

    #[test]
    fn hull_basics() {
        let g = Geometry::grid(4, 4);
        let h = hull(&g, &[0, 1]);
        assert_eq!(h.points(), vec![0, 1, 2, 3]);
        assert_eq!(h.lines(), vec![0]);
        assert!(h.is_full(&g));
        let all = hull(&g, &[0, 5]);
        assert_eq!(all.num_points(), 2);
        let cross = hull(&g, &[0, 1, 4]);
        assert_eq!(cross.num_points(), 7);
        assert_eq!(hull(&g, &cross.points()), cross);
        let all: Vec<u32> = (0..16).collect();
        assert_eq!(hull(&g, &all).num_lines(), 8);
    }

    #[test]
    fn grid_hyperplanes() {
        let g = Geometry::grid(3, 3);
        let diag = Subgeometry::induced(&g, BitSet::from_iter(9, [0, 4, 8]));
        assert_eq!(classify_hyperplane(&g, &diag), HyperplaneType::A);
        let cross = Subgeometry::induced(&g, g.row_set(4));
        assert_eq!(classify_hyperplane(&g, &cross), HyperplaneType::B { center: 4 });
        let junk = Subgeometry::induced(&g, BitSet::from_iter(9, [0, 1]));
        assert_eq!(classify_hyperplane(&g, &junk), HyperplaneType::NotHyperplane);
    }

    #[test]
    fn to_geometry_renumbers() {
        let g = Geometry::grid(3, 3);
        let s = Subgeometry::induced(&g, BitSet::from_iter(9, [3, 4, 5]));
        let (sub, pmap, lmap) = s.to_geometry(&g);
        assert_eq!((sub.num_points(), sub.num_lines()), (3, 1));
        assert_eq!(pmap, vec![3, 4, 5]);
        assert_eq!(lmap, vec![1]);
    }
}
