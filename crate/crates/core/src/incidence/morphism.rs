//! Incidence-preserving maps between geometries.

use serde::Serialize;

use super::Geometry;

/// A total map on points and lines. Validity is checked by [`validate_morphism`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub point_map: Vec<u32>,
    pub line_map: Vec<u32>,
}

impl Morphism {
    pub fn identity(g: &Geometry) -> Self {
        Morphism { point_map: (0..g.num_points() as u32).collect(), line_map: (0..g.num_lines() as u32).collect() }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Morphism) -> Morphism {
        Morphism {
            point_map: self.point_map.iter().map(|&p| next.point_map[p as usize]).collect(),
            line_map: self.line_map.iter().map(|&l| next.line_map[l as usize]).collect(),
        }
    }

    pub fn image_points(&self) -> Vec<u32> {
        let mut v = self.point_map.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn image_lines(&self) -> Vec<u32> {
        let mut v = self.line_map.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismReport {
    pub is_morphism: bool,
    pub is_cover: bool,
    /// Common fiber size over all target points and lines, when constant.
    pub theta: Option<usize>,
    pub surjective: bool,
    pub image_points: usize,
    pub image_lines: usize,
    pub violations: Vec<String>,
}

const CAP: usize = 16;

pub fn validate_morphism(src: &Geometry, dst: &Geometry, m: &Morphism) -> MorphismReport {
    let mut violations = Vec::new();
    let note = |s: String, v: &mut Vec<String>| {
        if v.len() < CAP {
            v.push(s);
        }
    };
    let total = m.point_map.len() == src.num_points()
        && m.line_map.len() == src.num_lines()
        && m.point_map.iter().all(|&p| (p as usize) < dst.num_points())
        && m.line_map.iter().all(|&l| (l as usize) < dst.num_lines());
    if !total {
        return MorphismReport {
            is_morphism: false,
            is_cover: false,
            theta: None,
            surjective: false,
            image_points: 0,
            image_lines: 0,
            violations: vec!["map is not total or has out-of-range images".into()],
        };
    }
    let mut is_morphism = true;
    for (l, pts) in src.lines().iter().enumerate() {
        let ml = m.line_map[l];
        for &p in pts {
            if !dst.incident(m.point_map[p as usize], ml) {
                is_morphism = false;
                note(
                    format!("flag ({p},{l}) maps to non-incident ({},{ml})", m.point_map[p as usize]),
                    &mut violations,
                );
            }
        }
    }
    let mut is_cover = is_morphism;
    if is_cover {
        let mut seen: Vec<u32> = Vec::new();
        for x in 0..src.num_points() as u32 {
            seen.clear();
            seen.extend(src.lines_through(x).iter().map(|&l| m.line_map[l as usize]));
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != src.lines_through(x).len()
                || seen.len() != dst.lines_through(m.point_map[x as usize]).len()
            {
                is_cover = false;
                note(format!("pencil of point {x} is not mapped bijectively"), &mut violations);
                break;
            }
        }
        for l in 0..src.num_lines() as u32 {
            if !is_cover {
                break;
            }
            seen.clear();
            seen.extend(src.points_on(l).iter().map(|&p| m.point_map[p as usize]));
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != src.points_on(l).len() || seen.len() != dst.points_on(m.line_map[l as usize]).len() {
                is_cover = false;
                note(format!("point row of line {l} is not mapped bijectively"), &mut violations);
            }
        }
    }
    let mut pf = vec![0usize; dst.num_points()];
    for &p in &m.point_map {
        pf[p as usize] += 1;
    }
    let mut lf = vec![0usize; dst.num_lines()];
    for &l in &m.line_map {
        lf[l as usize] += 1;
    }
    let image_points = pf.iter().filter(|&&c| c > 0).count();
    let image_lines = lf.iter().filter(|&&c| c > 0).count();
    let theta = pf.first().copied().filter(|&t| t > 0 && pf.iter().chain(&lf).all(|&c| c == t));
    MorphismReport {
        is_morphism,
        is_cover,
        theta,
        surjective: image_points == dst.num_points() && image_lines == dst.num_lines(),
        image_points,
        image_lines,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_one_cover() {
        let g = Geometry::grid(3, 3);
        let r = validate_morphism(&g, &g, &Morphism::identity(&g));
        assert!(r.is_morphism && r.is_cover && r.surjective);
        assert_eq!(r.theta, Some(1));
    }

    #[test]
    fn folding_a_grid() {
        // 3x4 grid onto 3x2 grid by folding columns 0,1,2,3 to 0,1,0,1.
        let big = Geometry::grid(3, 4);
        let small = Geometry::grid(3, 2);
        let point_map = (0..12).map(|p| (p / 4) * 2 + (p % 4) % 2).collect();
        let line_map = vec![0, 1, 2, 3, 4, 3, 4];
        let m = Morphism { point_map, line_map };
        let r = validate_morphism(&big, &small, &m);
        assert!(r.is_morphism && !r.is_cover);
        assert_eq!(r.theta, None);
        let bad = Morphism { point_map: vec![0; 12], line_map: vec![2; 7] };
        let r = validate_morphism(&big, &small, &bad);
        assert!(!r.is_morphism && !r.violations.is_empty());
    }
}
