//! Permutations and geometry automorphisms.

use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::incidence::Geometry;

/// A permutation of `0..n`, acting on the right: `x ↦ self[x]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u32>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 32 {
            write!(f, "Perm{:?}", self.0)
        } else {
            write!(f, "Perm(n={}, moved={})", self.0.len(), self.support_len())
        }
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_vec(v: Vec<u32>) -> Result<Self> {
        let mut seen = BitSet::new(v.len());
        for &x in &v {
            if x as usize >= v.len() || !seen.insert(x as usize) {
                return Err(Error::InvalidArgument(format!("not a permutation: image {x} repeated or out of range")));
            }
        }
        Ok(Perm(v))
    }

    pub(crate) fn from_vec_unchecked(v: Vec<u32>) -> Self {
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn support_len(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &x)| i as u32 != x).count()
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = BitSet::new(self.0.len());
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen.contains(s) {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while seen.insert(x) {
                len += 1;
                x = self.0[x] as usize;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u128 {
        fn gcd(a: u128, b: u128) -> u128 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let mut lengths = self.cycle_type();
        lengths.dedup();
        lengths.into_iter().fold(1u128, |acc, l| acc / gcd(acc, l as u128) * l as u128)
    }
}

/// An automorphism of a geometry given by its point and line permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub points: Perm,
    pub lines: Perm,
}

/// Line permutation induced by a point permutation, or `None` if some line
/// is not mapped onto a line.
pub fn induced_line_perm(g: &Geometry, points: &Perm) -> Option<Perm> {
    let mut lines = Vec::with_capacity(g.num_lines());
    for pts in g.lines() {
        let (a, b) = (points.apply(pts[0]), points.apply(*pts.get(1)?));
        let img = g.line_through(a, b)?;
        if !pts.iter().all(|&p| g.incident(points.apply(p), img)) {
            return None;
        }
        lines.push(img);
    }
    Perm::from_vec(lines).ok()
}

impl GroupElement {
    pub fn identity(g: &Geometry) -> Self {
        GroupElement { points: Perm::identity(g.num_points()), lines: Perm::identity(g.num_lines()) }
    }

    /// Automorphism determined by a point permutation; lines of size at least 2 required.
    pub fn from_point_perm(g: &Geometry, points: Vec<u32>) -> Result<Self> {
        if points.len() != g.num_points() {
            return Err(Error::NotAutomorphism(format!("{} point images for {} points", points.len(), g.num_points())));
        }
        let points = Perm::from_vec(points).map_err(|e| Error::NotAutomorphism(e.to_string()))?;
        let lines = induced_line_perm(g, &points)
            .ok_or_else(|| Error::NotAutomorphism("a line is not mapped onto a line".into()))?;
        Ok(GroupElement { points, lines })
    }

    /// Checked construction from both permutations.
    pub fn new(g: &Geometry, points: Vec<u32>, lines: Vec<u32>) -> Result<Self> {
        let e = GroupElement {
            points: Perm::from_vec(points).map_err(|e| Error::NotAutomorphism(e.to_string()))?,
            lines: Perm::from_vec(lines).map_err(|e| Error::NotAutomorphism(e.to_string()))?,
        };
        if e.points.len() != g.num_points() || e.lines.len() != g.num_lines() || !e.is_automorphism(g) {
            return Err(Error::NotAutomorphism("incidence not preserved".into()));
        }
        Ok(e)
    }

    pub fn is_automorphism(&self, g: &Geometry) -> bool {
        g.lines().iter().enumerate().all(|(l, pts)| {
            let img = self.lines.apply(l as u32);
            pts.iter().all(|&p| g.incident(self.points.apply(p), img))
        })
    }

    pub fn then(&self, other: &GroupElement) -> GroupElement {
        GroupElement { points: self.points.then(&other.points), lines: self.lines.then(&other.lines) }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { points: self.points.inverse(), lines: self.lines.inverse() }
    }

    pub fn is_identity(&self) -> bool {
        self.points.is_identity() && self.lines.is_identity()
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &GroupElement) -> GroupElement {
        g.inverse().then(self).then(g)
    }

    pub fn fixes_point(&self, p: u32) -> bool {
        self.points.apply(p) == p
    }
    pub fn fixes_line(&self, l: u32) -> bool {
        self.lines.apply(l) == l
    }

    /// Fixes `p` and every line through it.
    pub fn fixes_linewise(&self, g: &Geometry, p: u32) -> bool {
        self.fixes_point(p) && g.lines_through(p).iter().all(|&l| self.fixes_line(l))
    }

    pub fn stabilizes_points(&self, set: &BitSet) -> bool {
        set.iter().all(|p| set.contains(self.points.apply(p as u32) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_algebra() {
        let a = Perm::from_vec(vec![1, 2, 0, 3]).unwrap();
        let b = Perm::from_vec(vec![0, 1, 3, 2]).unwrap();
        assert_eq!(a.then(&a.inverse()), Perm::identity(4));
        assert_eq!(a.order(), 3);
        assert_eq!(a.then(&b).order(), 4);
        assert_eq!(a.cycle_type(), vec![1, 3]);
        assert!(Perm::from_vec(vec![0, 0]).is_err());
    }

    #[test]
    fn grid_automorphisms() {
        let g = Geometry::grid(3, 3);
        // Transpose swaps rows and columns.
        let t: Vec<u32> = (0..9).map(|p| (p % 3) * 3 + p / 3).collect();
        let e = GroupElement::from_point_perm(&g, t).unwrap();
        assert!(e.is_automorphism(&g));
        assert_eq!(e.lines.apply(0), 3);
        let bad: Vec<u32> = vec![1, 0, 2, 3, 4, 5, 6, 7, 8];
        assert!(GroupElement::from_point_perm(&g, bad).is_err());
    }
}
