//! Point-line incidence structures with dense collinearity bitsets.

mod closure;
mod io;
mod morphism;
mod validate;

pub use closure::{
    classify_hyperplane, hull, line_regulus, perp, shadow, span_closure, HullWorkspace, HyperplaneType, PerpMode,
    Subgeometry,
};
pub use io::{read_geometry, write_geometry};
pub use morphism::{validate_morphism, Morphism, MorphismReport};
pub use validate::{validate_gq, validate_gq_with, validate_spg, GqCheckMode, OrderReport, Parameter, SpgReport};

use std::fmt;

use serde::Serialize;

use crate::bitset::{BitMatrix, BitSet};
use crate::error::{Error, Result};

/// Where a geometry came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ModelTag {
    Plain,
    Quadric,
    Coset,
    Tits,
    Derived(String),
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTag::Plain => write!(f, "plain"),
            ModelTag::Quadric => write!(f, "quadric"),
            ModelTag::Coset => write!(f, "coset"),
            ModelTag::Tits => write!(f, "tits"),
            ModelTag::Derived(s) => write!(f, "derived:{s}"),
        }
    }
}

/// Immutable incidence structure. Points and lines are dense ids `0..P`, `0..L`.
#[derive(Clone)]
pub struct Geometry {
    line_points: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    collinear: BitMatrix,
    repeated_pairs: Vec<(u32, u32)>,
    tag: ModelTag,
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Geometry({} points, {} lines, {})", self.num_points(), self.num_lines(), self.tag)
    }
}

impl PartialEq for Geometry {
    fn eq(&self, other: &Self) -> bool {
        self.num_points() == other.num_points() && self.line_points == other.line_points
    }
}

impl Geometry {
    /// Builds a geometry from the point lists of its lines. Fails if two
    /// points share two lines.
    pub fn build(lines: Vec<Vec<u32>>, point_count: usize) -> Result<Geometry> {
        let g = Self::assemble(lines, point_count, true)?;
        Ok(g)
    }

    /// Like [`Geometry::build`] but records pairs of points on two common
    /// lines instead of failing; [`validate_spg`] reports them.
    pub fn build_lenient(lines: Vec<Vec<u32>>, point_count: usize) -> Result<Geometry> {
        Self::assemble(lines, point_count, false)
    }

    fn assemble(mut lines: Vec<Vec<u32>>, point_count: usize, strict: bool) -> Result<Geometry> {
        if point_count > u32::MAX as usize || lines.len() > u32::MAX as usize {
            return Err(Error::Malformed("too many elements".into()));
        }
        let mut point_lines = vec![Vec::new(); point_count];
        for (li, pts) in lines.iter_mut().enumerate() {
            pts.sort_unstable();
            for w in pts.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Malformed(format!("line {li} repeats point {}", w[0])));
                }
            }
            for &p in pts.iter() {
                if p as usize >= point_count {
                    return Err(Error::Malformed(format!("line {li} has point {p} out of range")));
                }
                point_lines[p as usize].push(li as u32);
            }
        }
        let mut collinear = BitMatrix::new(point_count);
        for p in 0..point_count {
            collinear.set(p, p);
        }
        let mut repeated_pairs = Vec::new();
        for pts in &lines {
            for (i, &a) in pts.iter().enumerate() {
                for &b in &pts[i + 1..] {
                    if collinear.set(a as usize, b as usize) {
                        if strict {
                            return Err(Error::DuplicateCollinearity(a, b));
                        }
                        repeated_pairs.push((a, b));
                    }
                    collinear.set(b as usize, a as usize);
                }
            }
        }
        Ok(Geometry { line_points: lines, point_lines, collinear, repeated_pairs, tag: ModelTag::Plain })
    }

    pub fn with_tag(mut self, tag: ModelTag) -> Self {
        self.tag = tag;
        self
    }
    pub fn tag(&self) -> &ModelTag {
        &self.tag
    }

    pub fn num_points(&self) -> usize {
        self.point_lines.len()
    }
    pub fn num_lines(&self) -> usize {
        self.line_points.len()
    }
    #[inline]
    pub fn points_on(&self, line: u32) -> &[u32] {
        &self.line_points[line as usize]
    }
    #[inline]
    pub fn lines_through(&self, point: u32) -> &[u32] {
        &self.point_lines[point as usize]
    }
    pub fn lines(&self) -> &[Vec<u32>] {
        &self.line_points
    }
    #[inline]
    pub fn collinear(&self, a: u32, b: u32) -> bool {
        self.collinear.get(a as usize, b as usize)
    }
    /// Collinearity row of `p` (self included) as raw words.
    #[inline]
    pub fn row(&self, p: u32) -> &[u64] {
        self.collinear.row(p as usize)
    }
    pub fn row_set(&self, p: u32) -> BitSet {
        self.collinear.row_set(p as usize)
    }
    pub fn collinearity(&self) -> &BitMatrix {
        &self.collinear
    }
    /// Point pairs lying on two common lines (only for lenient builds).
    pub fn repeated_pairs(&self) -> &[(u32, u32)] {
        &self.repeated_pairs
    }
    #[inline]
    pub fn incident(&self, p: u32, line: u32) -> bool {
        self.line_points[line as usize].binary_search(&p).is_ok()
    }

    /// The line joining two distinct points, if any.
    pub fn line_through(&self, a: u32, b: u32) -> Option<u32> {
        if a == b {
            return None;
        }
        sorted_common(self.lines_through(a), self.lines_through(b))
    }

    /// The common point of two distinct lines, if any.
    pub fn meet(&self, l: u32, m: u32) -> Option<u32> {
        if l == m {
            return None;
        }
        sorted_common(self.points_on(l), self.points_on(m))
    }

    /// The point of `line` collinear with `x` (`x` itself when incident).
    /// In a generalized quadrangle this exists and is unique.
    pub fn project(&self, x: u32, line: u32) -> Option<u32> {
        let row = self.row(x);
        self.points_on(line).iter().copied().find(|&p| row[p as usize >> 6] >> (p & 63) & 1 == 1)
    }

    /// The line through `p` meeting `line` (for `p` off `line`).
    pub fn line_through_meeting(&self, p: u32, line: u32) -> Option<u32> {
        let z = self.project(p, line)?;
        self.line_through(p, z)
    }

    /// Lines meeting `line` in a point, excluding `line` itself.
    pub fn concurrent_lines(&self, line: u32) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .points_on(line)
            .iter()
            .flat_map(|&p| self.lines_through(p).iter().copied())
            .filter(|&m| m != line)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Points and lines swapped.
    pub fn dual(&self) -> Geometry {
        let lines = self.point_lines.clone();
        Geometry::build(lines, self.num_lines()).expect("dual of a partial linear space is one")
    }

    /// Degree of every line if constant.
    pub fn uniform_line_size(&self) -> Option<usize> {
        let first = self.line_points.first()?.len();
        self.line_points.iter().all(|l| l.len() == first).then_some(first)
    }

    /// Degree of every point if constant.
    pub fn uniform_point_degree(&self) -> Option<usize> {
        let first = self.point_lines.first()?.len();
        self.point_lines.iter().all(|l| l.len() == first).then_some(first)
    }

    /// The (s+1)×(t+1) grid: points `i*(t+1)+j`, horizontal lines first.
    pub fn grid(rows: usize, cols: usize) -> Geometry {
        let mut lines = Vec::new();
        for i in 0..rows {
            lines.push((0..cols).map(|j| (i * cols + j) as u32).collect());
        }
        for j in 0..cols {
            lines.push((0..rows).map(|i| (i * cols + j) as u32).collect());
        }
        Geometry::build(lines, rows * cols).expect("grid is a partial linear space")
    }
}

fn sorted_common(a: &[u32], b: &[u32]) -> Option<u32> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}
