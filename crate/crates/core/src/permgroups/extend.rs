//! Extending partial incidence-preserving bijections by forced deductions.
//!
//! Rules (each only fires when its conclusion is unique in the target):
//!
//! * a line with two mapped points goes to the line joining their images;
//! * a point on two mapped lines goes to the meet of their images;
//! * an unmapped point `z` on a mapped line `K`, collinear with a mapped
//!   point `y ∉ K`, goes to the unique point of `K′` collinear with `y′`;
//! * an unmapped line `L` through a mapped point `p`, meeting a mapped line
//!   `K ∌ p`, goes to the line through `p′` meeting `K′`.
//!
//! When the rules stall, [`Extender::search`] branches on the images of
//! single points.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::incidence::{span_closure, Geometry, Morphism};

use super::perm::{GroupElement, Perm};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
enum Item {
    Point(u32),
    Line(u32),
}

/// Partial bijection between two geometries, closed under the forced rules.
#[derive(Clone)]
pub struct Extender<'a> {
    src: &'a Geometry,
    dst: &'a Geometry,
    pmap: Vec<u32>,
    lmap: Vec<u32>,
    pinv: Vec<u32>,
    linv: Vec<u32>,
    known_on_line: Vec<u16>,
    first_on_line: Vec<u32>,
    known_through_point: Vec<u16>,
    first_through_point: Vec<u32>,
    queue: VecDeque<Item>,
    mapped_points: usize,
    mapped_lines: usize,
    conflict: Option<String>,
    /// Lines below these ids form a class that must map onto itself.
    line_prefix: Option<(u32, u32)>,
}

impl<'a> Extender<'a> {
    pub fn new(src: &'a Geometry, dst: &'a Geometry) -> Self {
        Extender {
            src,
            dst,
            pmap: vec![NONE; src.num_points()],
            lmap: vec![NONE; src.num_lines()],
            pinv: vec![NONE; dst.num_points()],
            linv: vec![NONE; dst.num_lines()],
            known_on_line: vec![0; src.num_lines()],
            first_on_line: vec![NONE; src.num_lines()],
            known_through_point: vec![0; src.num_points()],
            first_through_point: vec![NONE; src.num_points()],
            queue: VecDeque::new(),
            mapped_points: 0,
            mapped_lines: 0,
            conflict: None,
            line_prefix: None,
        }
    }

    /// Restricts to maps sending lines `< src_prefix` exactly onto lines `< dst_prefix`.
    pub fn with_line_prefix(mut self, src_prefix: usize, dst_prefix: usize) -> Self {
        self.line_prefix = Some((src_prefix as u32, dst_prefix as u32));
        self
    }

    pub fn point_image(&self, p: u32) -> Option<u32> {
        let x = self.pmap[p as usize];
        (x != NONE).then_some(x)
    }

    pub fn line_image(&self, l: u32) -> Option<u32> {
        let x = self.lmap[l as usize];
        (x != NONE).then_some(x)
    }

    pub fn mapped_points(&self) -> usize {
        self.mapped_points
    }

    pub fn mapped_lines(&self) -> usize {
        self.mapped_lines
    }

    pub fn is_complete(&self) -> bool {
        self.mapped_points == self.src.num_points() && self.mapped_lines == self.src.num_lines()
    }

    pub fn conflict(&self) -> Option<&str> {
        self.conflict.as_deref()
    }

    fn fail(&mut self, msg: String) -> bool {
        if self.conflict.is_none() {
            self.conflict = Some(msg);
        }
        false
    }

    /// Records `p ↦ img`; false on conflict.
    pub fn set_point(&mut self, p: u32, img: u32) -> bool {
        if self.conflict.is_some() {
            return false;
        }
        let cur = self.pmap[p as usize];
        if cur == img {
            return true;
        }
        if cur != NONE {
            return self.fail(format!("point {p} forced to {img} and {cur}"));
        }
        if self.pinv[img as usize] != NONE {
            return self.fail(format!("points {} and {p} both forced to {img}", self.pinv[img as usize]));
        }
        self.pmap[p as usize] = img;
        self.pinv[img as usize] = p;
        self.mapped_points += 1;
        self.queue.push_back(Item::Point(p));
        true
    }

    /// Records `l ↦ img`; false on conflict.
    pub fn set_line(&mut self, l: u32, img: u32) -> bool {
        if self.conflict.is_some() {
            return false;
        }
        let cur = self.lmap[l as usize];
        if cur == img {
            return true;
        }
        if cur != NONE {
            return self.fail(format!("line {l} forced to {img} and {cur}"));
        }
        if self.linv[img as usize] != NONE {
            return self.fail(format!("lines {} and {l} both forced to {img}", self.linv[img as usize]));
        }
        if self.src.points_on(l).len() != self.dst.points_on(img).len() {
            return self.fail(format!("line {l} and image {img} differ in size"));
        }
        if let Some((sp, dp)) = self.line_prefix {
            if (l < sp) != (img < dp) {
                return self.fail(format!("line {l} and image {img} differ in class"));
            }
        }
        self.lmap[l as usize] = img;
        self.linv[img as usize] = l;
        self.mapped_lines += 1;
        self.queue.push_back(Item::Line(l));
        true
    }

    /// The unique point of target line `k` collinear with target point `y`.
    fn unique_projection(&self, y: u32, k: u32) -> Option<u32> {
        let row = self.dst.row(y);
        let mut found = None;
        for &p in self.dst.points_on(k) {
            if row[p as usize >> 6] >> (p & 63) & 1 == 1 {
                if found.is_some() {
                    return None;
                }
                found = Some(p);
            }
        }
        found
    }

    /// Runs the rules to a fixed point. Returns false on conflict.
    pub fn propagate(&mut self) -> bool {
        while let Some(item) = self.queue.pop_front() {
            if self.conflict.is_some() {
                return false;
            }
            let ok = match item {
                Item::Point(p) => self.process_point(p),
                Item::Line(l) => self.process_line(l),
            };
            if !ok {
                self.queue.clear();
                return false;
            }
        }
        self.conflict.is_none()
    }

    fn process_point(&mut self, p: u32) -> bool {
        let src = self.src;
        let dst = self.dst;
        let img = self.pmap[p as usize];
        for &l in src.lines_through(p) {
            let li = l as usize;
            let limg = self.lmap[li];
            if limg != NONE && !dst.incident(img, limg) {
                return self.fail(format!("point {p} on line {l}, images {img} and {limg} not incident"));
            }
            self.known_on_line[li] += 1;
            if self.first_on_line[li] == NONE {
                self.first_on_line[li] = p;
            }
            if limg != NONE {
                continue;
            }
            if self.known_on_line[li] >= 2 {
                let other = self.pmap[self.first_on_line[li] as usize];
                match dst.line_through(other, img) {
                    Some(m) => {
                        if !self.set_line(l, m) {
                            return false;
                        }
                    }
                    None => return self.fail(format!("images of two points on line {l} are not collinear")),
                }
            } else {
                for &x in src.points_on(l) {
                    let k = self.first_through_point[x as usize];
                    if x == p || k == NONE {
                        continue;
                    }
                    let kimg = self.lmap[k as usize];
                    if dst.incident(img, kimg) {
                        return self.fail(format!("point {p} off line {k} mapped onto its image"));
                    }
                    if let Some(w) = self.unique_projection(img, kimg) {
                        if let Some(m) = dst.line_through(img, w) {
                            if !self.set_line(l, m) {
                                return false;
                            }
                        }
                    }
                    break;
                }
            }
        }
        for &l in src.lines_through(p) {
            for &z in src.points_on(l) {
                if z == p || self.pmap[z as usize] != NONE {
                    continue;
                }
                let k = self.first_through_point[z as usize];
                if k == NONE || k == l {
                    continue;
                }
                let kimg = self.lmap[k as usize];
                if let Some(w) = self.unique_projection(img, kimg) {
                    if !self.set_point(z, w) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn process_line(&mut self, l: u32) -> bool {
        let src = self.src;
        let dst = self.dst;
        let limg = self.lmap[l as usize];
        for &x in src.points_on(l) {
            let xi = x as usize;
            let ximg = self.pmap[xi];
            if ximg != NONE && !dst.incident(ximg, limg) {
                return self.fail(format!("point {x} on line {l}, images {ximg} and {limg} not incident"));
            }
            self.known_through_point[xi] += 1;
            if self.first_through_point[xi] == NONE {
                self.first_through_point[xi] = l;
            }
            if ximg != NONE {
                continue;
            }
            if self.known_through_point[xi] >= 2 {
                let k = self.lmap[self.first_through_point[xi] as usize];
                match dst.meet(k, limg) {
                    Some(w) => {
                        if !self.set_point(x, w) {
                            return false;
                        }
                    }
                    None => return self.fail(format!("images of two lines through point {x} do not meet")),
                }
            } else {
                for &n in src.lines_through(x) {
                    let y = self.first_on_line[n as usize];
                    if n == l || y == NONE {
                        continue;
                    }
                    if let Some(w) = self.unique_projection(self.pmap[y as usize], limg) {
                        if !self.set_point(x, w) {
                            return false;
                        }
                    }
                    break;
                }
            }
        }
        for &x in src.points_on(l) {
            for &m in src.lines_through(x) {
                if m == l || self.lmap[m as usize] != NONE {
                    continue;
                }
                let y = self.first_on_line[m as usize];
                if y == NONE || y == x {
                    continue;
                }
                let yimg = self.pmap[y as usize];
                if let Some(w) = self.unique_projection(yimg, limg) {
                    match dst.line_through(yimg, w) {
                        Some(n) => {
                            if !self.set_line(m, n) {
                                return false;
                            }
                        }
                        None => return self.fail(format!("point {y} maps onto line {limg}")),
                    }
                }
            }
        }
        true
    }

    /// Full incidence check of a complete map.
    pub fn verify(&self) -> bool {
        if !self.is_complete() {
            return false;
        }
        self.src.lines().iter().enumerate().all(|(l, pts)| {
            let img = self.lmap[l];
            pts.iter().all(|&p| self.dst.incident(self.pmap[p as usize], img))
        }) && (0..self.dst.num_lines()).all(|m| {
            let l = self.linv[m];
            l != NONE && self.src.points_on(l).len() == self.dst.points_on(m as u32).len()
        })
    }

    pub fn into_morphism(self) -> Morphism {
        Morphism { point_map: self.pmap, line_map: self.lmap }
    }

    pub fn to_group_element(&self) -> Option<GroupElement> {
        if !self.verify() {
            return None;
        }
        Some(GroupElement {
            points: Perm::from_vec(self.pmap.clone()).ok()?,
            lines: Perm::from_vec(self.lmap.clone()).ok()?,
        })
    }

    /// Candidates for the image of an unmapped point, filtered by known lines and a
    /// sample of mapped points.
    fn candidates(&self, z: u32, sample: &[u32]) -> Vec<u32> {
        let k = self.first_through_point[z as usize];
        let pool: Vec<u32> = if k != NONE {
            self.dst.points_on(self.lmap[k as usize]).to_vec()
        } else {
            (0..self.dst.num_points() as u32).collect()
        };
        pool.into_iter()
            .filter(|&c| self.pinv[c as usize] == NONE)
            .filter(|&c| {
                sample.iter().all(|&y| self.src.collinear(z, y) == self.dst.collinear(c, self.pmap[y as usize]))
            })
            .collect()
    }

    fn branch_point(&self) -> Option<u32> {
        let mut best: Option<(u16, u32)> = None;
        for z in 0..self.src.num_points() as u32 {
            if self.pmap[z as usize] != NONE {
                continue;
            }
            let score = self.known_through_point[z as usize];
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, z));
                if score >= 1 {
                    break;
                }
            }
        }
        best.map(|(_, z)| z)
    }

    /// Depth-first search for complete extensions, stopping after `max_solutions`
    /// or `max_nodes` propagation steps.
    pub fn search(&self, max_solutions: usize, max_nodes: usize) -> SearchOutcome {
        self.search_in_order(&[], max_solutions, max_nodes)
    }

    /// Like [`Extender::search`], branching on the unmapped points of `order`
    /// first.
    pub fn search_in_order(&self, order: &[u32], max_solutions: usize, max_nodes: usize) -> SearchOutcome {
        let mut out = SearchOutcome { solutions: Vec::new(), nodes: 0, exhausted: true };
        let mut root = self.clone();
        if root.propagate() {
            dfs(root, order, max_solutions, max_nodes, &mut out);
        }
        out
    }

    /// Points of the source, in an order where fixing each in turn lets the
    /// rules force as much as possible; fixing all of them fixes everything.
    /// Candidates at each step are every `stride`-th point.
    pub fn greedy_frame(g: &'a Geometry, stride: usize) -> Vec<u32> {
        let mut ext = Extender::new(g, g);
        let mut frame = Vec::new();
        while ext.mapped_points() < g.num_points() {
            let mut best: Option<(usize, u32)> = None;
            for z in (0..g.num_points() as u32).step_by(stride.max(1)) {
                if ext.point_image(z).is_some() {
                    continue;
                }
                let mut e = ext.clone();
                e.set_point(z, z);
                e.propagate();
                if best.is_none_or(|(b, _)| e.mapped_points() > b) {
                    best = Some((e.mapped_points(), z));
                }
            }
            let z = match best {
                Some((_, z)) => z,
                None => (0..g.num_points() as u32).find(|&z| ext.point_image(z).is_none()).expect("unmapped point"),
            };
            frame.push(z);
            ext.set_point(z, z);
            ext.propagate();
        }
        frame
    }
}

pub struct SearchOutcome {
    pub solutions: Vec<Morphism>,
    pub nodes: usize,
    /// False when a limit cut the search short.
    pub exhausted: bool,
}

fn dfs(state: Extender<'_>, order: &[u32], max_solutions: usize, max_nodes: usize, out: &mut SearchOutcome) {
    out.nodes += 1;
    if state.is_complete() {
        if state.verify() {
            out.solutions.push(state.into_morphism());
        }
        return;
    }
    let next_in_order = order.iter().copied().find(|&z| state.pmap[z as usize] == NONE);
    let Some(z) = next_in_order.or_else(|| state.branch_point()) else {
        return;
    };
    let sample: Vec<u32> =
        (0..state.src.num_points() as u32).filter(|&y| state.pmap[y as usize] != NONE).take(48).collect();
    for c in state.candidates(z, &sample) {
        if out.solutions.len() >= max_solutions || out.nodes >= max_nodes {
            out.exhausted = false;
            return;
        }
        let mut next = state.clone();
        if next.set_point(z, c) && next.propagate() {
            dfs(next, order, max_solutions, max_nodes, out);
        }
    }
}

/// Points whose pointwise fixing forces the identity by the rules above, or
/// `None` if identity seeds on every point are needed (non-rigid geometry).
pub fn rigidity_frame(g: &Geometry) -> Option<Vec<u32>> {
    if !g.repeated_pairs().is_empty() {
        return None;
    }
    let mut ext = Extender::new(g, g);
    let mut frame = Vec::new();
    // Start from two opposite lines when available.
    let l0 = 0u32;
    if g.num_lines() > 0 {
        let far = (0..g.num_lines() as u32).find(|&m| m != l0 && g.meet(l0, m).is_none());
        for &p in g.points_on(l0).iter().take(2) {
            frame.push(p);
            ext.set_point(p, p);
        }
        if let Some(m) = far {
            for &p in g.points_on(m).iter().take(2) {
                frame.push(p);
                ext.set_point(p, p);
            }
        }
        ext.propagate();
    }
    while ext.mapped_points() < g.num_points() {
        let mut best = None;
        for z in 0..g.num_points() as u32 {
            if ext.point_image(z).is_some() {
                continue;
            }
            // Prefer points already constrained by a fixed line.
            if ext.known_through_point[z as usize] > 0 {
                best = Some(z);
                break;
            }
            best.get_or_insert(z);
        }
        let z = best?;
        frame.push(z);
        ext.set_point(z, z);
        if !ext.propagate() {
            return None;
        }
    }
    let complete = (0..g.num_lines() as u32).all(|l| ext.line_image(l) == Some(l));
    if !complete {
        // Lines with fewer than two points are never forced.
        return None;
    }
    frame.sort_unstable();
    frame.dedup();
    Some(frame)
}

/// An automorphism from a partial map, closing it under the rules and, if
/// needed, a bounded search. Errors if no extension exists.
pub fn extend_to_automorphism(
    g: &Geometry,
    seeds_points: &[(u32, u32)],
    seeds_lines: &[(u32, u32)],
) -> Result<GroupElement> {
    let mut ext = Extender::new(g, g);
    for &(a, b) in seeds_points {
        ext.set_point(a, b);
    }
    for &(a, b) in seeds_lines {
        ext.set_line(a, b);
    }
    if !ext.propagate() {
        return Err(Error::Contradiction(ext.conflict().unwrap_or("conflict").to_string()));
    }
    if ext.is_complete() {
        return ext.to_group_element().ok_or_else(|| Error::Contradiction("forced map is not an automorphism".into()));
    }
    let out = ext.search(1, 10_000);
    let m = out.solutions.into_iter().next().ok_or_else(|| Error::Contradiction("no extension".into()))?;
    Ok(GroupElement { points: Perm::from_vec(m.point_map)?, lines: Perm::from_vec(m.line_map)? })
}

/// An isomorphism `a → b` found by search, or `None` if none exists within
/// `max_nodes` search steps.
///
/// The search starts from a frame: two opposite lines of `a` and three points
/// on the first go to a fixed such frame of `b`. This finds an isomorphism
/// whenever one exists and `Aut(b)` is transitive on these frames, as for the
/// classical quadrangles.
pub fn find_isomorphism(a: &Geometry, b: &Geometry, max_nodes: usize) -> Option<Morphism> {
    if a.num_points() != b.num_points() || a.num_lines() != b.num_lines() {
        return None;
    }
    let frame = |g: &Geometry| -> Option<(u32, u32)> {
        let l = 0u32;
        let m = (1..g.num_lines() as u32).find(|&m| g.meet(l, m).is_none())?;
        Some((l, m))
    };
    let mut ext = Extender::new(a, b);
    if let (Some((la, ma)), Some((lb, mb))) = (frame(a), frame(b)) {
        let (pa, pb) = (a.points_on(la), b.points_on(lb));
        if pa.len() == pb.len() && pa.len() >= 3 {
            ext.set_line(la, lb);
            ext.set_line(ma, mb);
            for i in 0..3 {
                ext.set_point(pa[i], pb[i]);
            }
        }
    }
    ext.search(1, max_nodes).solutions.into_iter().next()
}

/// An isomorphism between quadrangles whose points are all regular, found by
/// searching on their span closures, where joins and meets of spans pin a map
/// down from a few points.
pub fn find_isomorphism_regular(a: &Geometry, b: &Geometry, max_nodes: usize) -> Option<Morphism> {
    if a.num_points() != b.num_points() || a.num_lines() != b.num_lines() {
        return None;
    }
    let ca = span_closure(a).ok()?;
    let cb = span_closure(b).ok()?;
    if ca.num_lines() != cb.num_lines() {
        return None;
    }
    let order = Extender::greedy_frame(&ca, 7);
    let ext = Extender::new(&ca, &cb).with_line_prefix(a.num_lines(), b.num_lines());
    let m = ext.search_in_order(&order, 1, max_nodes).solutions.into_iter().next()?;
    Some(Morphism { point_map: m.point_map, line_map: m.line_map[..a.num_lines()].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_parabolic;
    use crate::galois::Field;

    #[test]
    fn grid_frame_and_search() {
        let g = Geometry::grid(4, 4);
        let frame = rigidity_frame(&g).unwrap();
        let mut ext = Extender::new(&g, &g);
        for &p in &frame {
            ext.set_point(p, p);
        }
        assert!(ext.propagate());
        assert!(ext.is_complete());
        // Automorphisms of the 4x4 grid fixing point 0: 2·(3!)² = 72.
        let mut e = Extender::new(&g, &g);
        e.set_point(0, 0);
        let out = e.search(usize::MAX, 1_000_000);
        assert!(out.exhausted);
        assert_eq!(out.solutions.len(), 72);
    }

    #[test]
    fn q43_frame_is_small() {
        let f = Field::new(3, 1).unwrap();
        let (g, _) = build_parabolic(&f).unwrap();
        let frame = rigidity_frame(&g).unwrap();
        assert!(frame.len() < 12, "{frame:?}");
        let mut e = Extender::new(&g, &g);
        e.set_point(0, 5);
        assert!(e.propagate());
        assert!(!e.is_complete());
    }

    #[test]
    fn relabelled_copy_is_isomorphic() {
        let f = Field::new(3, 1).unwrap();
        let (g, _) = build_parabolic(&f).unwrap();
        let n = g.num_points() as u32;
        let shuffle: Vec<u32> = (0..n).map(|p| (p * 7 + 3) % n).collect();
        let lines: Vec<Vec<u32>> =
            g.lines().iter().rev().map(|l| l.iter().map(|&p| shuffle[p as usize]).collect()).collect();
        let h = Geometry::build(lines, n as usize).unwrap();
        let m = find_isomorphism(&g, &h, 10_000).unwrap();
        let rep = crate::incidence::validate_morphism(&g, &h, &m);
        assert!(rep.is_morphism && rep.surjective);
        assert!(find_isomorphism(&g, &Geometry::grid(4, 4), 100).is_none());
    }

    #[test]
    fn span_closure_search_on_relabelled_w9() {
        let f = Field::new(3, 2).unwrap();
        let (q, _) = build_parabolic(&f).unwrap();
        let w = q.dual();
        let c = span_closure(&w).unwrap();
        assert_eq!(c.num_lines(), 82 * 91);
        assert!((0..w.num_points() as u32).all(|p| c.row_set(p).count() == w.num_points()));
        let n = w.num_points() as u32;
        let shuffle: Vec<u32> = (0..n).map(|p| (p * 13 + 5) % n).collect();
        let lines: Vec<Vec<u32>> =
            w.lines().iter().rev().map(|l| l.iter().map(|&p| shuffle[p as usize]).collect()).collect();
        let h = Geometry::build(lines, n as usize).unwrap();
        let m = find_isomorphism_regular(&w, &h, 1_000).unwrap();
        let rep = crate::incidence::validate_morphism(&w, &h, &m);
        assert!(rep.is_morphism && rep.surjective);
        // Points of Q(4,q) are not regular for odd q.
        assert!(span_closure(&q).is_err());
    }
}
