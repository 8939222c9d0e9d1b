//! Tits quadrangles T₂(O) in PG(3,q) and the thin-subquadrangle projection map.
//!
//! The plane δ is `x3 = 0`; an oval is given by coordinates `(x0,x1,x2)` in δ.
//!
//! * points: affine points `(x0,x1,x2,1)` in lexicographic order, then the
//!   planes ≠ δ through a tangent line (by oval index, then the constant
//!   term of the plane equation), then `(∞)`;
//! * lines: lines ≠ δ meeting δ in an oval point (by oval index, then smallest
//!   affine point), then the oval points themselves.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::galois::{Fe, Field};
use crate::incidence::{validate_morphism, Geometry, ModelTag, Morphism, MorphismReport, Subgeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TitsPoint {
    Affine([Fe; 3]),
    /// Plane `tangent_i(x0,x1,x2) + c·x3 = 0`.
    TangentPlane {
        oval_index: usize,
        c: Fe,
    },
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TitsLine {
    /// Line through oval point `oval_index` and affine point `through`.
    Secant {
        oval_index: usize,
        through: [Fe; 3],
    },
    OvalPoint(usize),
}

#[derive(Clone, Debug)]
pub struct TitsModel {
    pub field: Field,
    pub oval: Vec<[Fe; 3]>,
    /// Line coordinates of the tangent at each oval point.
    pub tangents: Vec<[Fe; 3]>,
    secant_first: Vec<u32>,
    secant_reps: Vec<[Fe; 3]>,
}

fn dot3(f: &Field, a: &[Fe; 3], b: &[Fe; 3]) -> Fe {
    (0..3).fold(Fe::ZERO, |acc, i| f.add(acc, f.mul(a[i], b[i])))
}

fn cross(f: &Field, a: &[Fe; 3], b: &[Fe; 3]) -> [Fe; 3] {
    let c = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
    [c(1, 2), c(2, 0), c(0, 1)]
}

fn normalized3(f: &Field, v: [Fe; 3]) -> Option<[Fe; 3]> {
    let lead = v.iter().copied().find(|&x| x != Fe::ZERO)?;
    let inv = f.inv(lead)?;
    Some([f.mul(v[0], inv), f.mul(v[1], inv), f.mul(v[2], inv)])
}

/// Points `(1,t,t²)` for `t = 0`, `(0,0,1)`, then `(1,t,t²)` for `t = 1..q−1`.
pub fn standard_conic(f: &Field) -> Vec<[Fe; 3]> {
    let pt = |t: Fe| [Fe::ONE, t, f.mul(t, t)];
    let mut v = vec![pt(Fe::ZERO), [Fe::ZERO, Fe::ZERO, Fe::ONE]];
    v.extend(f.nonzero().map(pt));
    v
}

impl TitsModel {
    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn affine_id(&self, x: &[Fe; 3]) -> u32 {
        let q = self.q();
        ((x[0].index() * q + x[1].index()) * q + x[2].index()) as u32
    }

    pub fn plane_id(&self, oval_index: usize, c: Fe) -> u32 {
        (self.q().pow(3) + oval_index * self.q() + c.index()) as u32
    }

    pub fn infinity_point(&self) -> u32 {
        (self.q().pow(3) + self.q() * (self.q() + 1)) as u32
    }

    pub fn oval_line(&self, i: usize) -> u32 {
        (self.q() * self.q() * (self.q() + 1) + i) as u32
    }

    pub fn point_kind(&self, p: u32) -> TitsPoint {
        let q = self.q();
        let p = p as usize;
        if p < q.pow(3) {
            TitsPoint::Affine([Fe((p / (q * q)) as u16), Fe((p / q % q) as u16), Fe((p % q) as u16)])
        } else if p < q.pow(3) + q * (q + 1) {
            let k = p - q.pow(3);
            TitsPoint::TangentPlane { oval_index: k / q, c: Fe((k % q) as u16) }
        } else {
            TitsPoint::Infinity
        }
    }

    pub fn line_kind(&self, l: u32) -> TitsLine {
        let q = self.q();
        let l = l as usize;
        if l < q * q * (q + 1) {
            TitsLine::Secant { oval_index: l / (q * q), through: self.secant_reps[l] }
        } else {
            TitsLine::OvalPoint(l - q * q * (q + 1))
        }
    }

    /// Affine points `x + λ·a_i`.
    fn secant_points(&self, i: usize, x: &[Fe; 3]) -> Vec<[Fe; 3]> {
        let f = &self.field;
        let a = &self.oval[i];
        f.elements()
            .map(|l| [f.add(x[0], f.mul(l, a[0])), f.add(x[1], f.mul(l, a[1])), f.add(x[2], f.mul(l, a[2]))])
            .collect()
    }

    /// Whether the plane `tangent_i + c·x3 = 0` contains affine `x`.
    pub fn plane_contains(&self, oval_index: usize, c: Fe, x: &[Fe; 3]) -> bool {
        self.field.add(dot3(&self.field, &self.tangents[oval_index], x), c) == Fe::ZERO
    }

    /// The tangent plane through tangent `i` containing affine `x`.
    pub fn plane_through(&self, i: usize, x: &[Fe; 3]) -> u32 {
        let c = self.field.neg(dot3(&self.field, &self.tangents[i], x));
        self.plane_id(i, c)
    }

    /// The line `(a)` through oval point `i` and affine point `x`.
    pub fn secant_line(&self, i: usize, x: &[Fe; 3]) -> u32 {
        let min = self.secant_points(i, x).iter().map(|y| self.affine_id(y)).min().expect("q ≥ 2");
        let base = i * self.q() * self.q();
        let offset = self.secant_first[base..base + self.q() * self.q()].binary_search(&min).expect("line exists");
        (base + offset) as u32
    }
}

/// T₂(O) for an oval `O` of δ.
pub fn build_tits_t2(field: &Field, oval: &[[Fe; 3]]) -> Result<(Geometry, TitsModel)> {
    let f = field;
    let q = f.order();
    if oval.len() != q + 1 {
        return Err(Error::NotAnOval(format!("{} points, expected {}", oval.len(), q + 1)));
    }
    let mut pts = Vec::with_capacity(oval.len());
    for v in oval {
        let n = normalized3(f, *v).ok_or_else(|| Error::NotAnOval("zero vector".into()))?;
        if pts.contains(&n) {
            return Err(Error::NotAnOval(format!("repeated point {n:?}")));
        }
        pts.push(n);
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let line = cross(f, &pts[i], &pts[j]);
            if let Some(k) = (0..pts.len()).find(|&k| k != i && k != j && dot3(f, &line, &pts[k]) == Fe::ZERO) {
                return Err(Error::NotAnOval(format!("points {i}, {j}, {k} are collinear")));
            }
        }
    }
    let line_coords: Vec<[Fe; 3]> = {
        let mut v = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    if let Some(n) = normalized3(f, [a, b, c]) {
                        if n == [a, b, c] {
                            v.push(n);
                        }
                    }
                }
            }
        }
        v
    };
    let mut tangents = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        let t = line_coords
            .iter()
            .find(|n| {
                dot3(f, n, a) == Fe::ZERO && pts.iter().enumerate().all(|(j, b)| j == i || dot3(f, n, b) != Fe::ZERO)
            })
            .ok_or_else(|| Error::NotAnOval(format!("no tangent at point {i}")))?;
        tangents.push(*t);
    }
    let mut model =
        TitsModel { field: f.clone(), oval: pts, tangents, secant_first: Vec::new(), secant_reps: Vec::new() };
    let affine: Vec<[Fe; 3]> = (0..q.pow(3) as u32)
        .map(|p| match model.point_kind(p) {
            TitsPoint::Affine(x) => x,
            _ => unreachable!(),
        })
        .collect();
    let mut lines: Vec<Vec<u32>> = Vec::new();
    for i in 0..=q {
        for x in &affine {
            let on = model.secant_points(i, x);
            let ids: Vec<u32> = on.iter().map(|y| model.affine_id(y)).collect();
            let min = *ids.iter().min().expect("nonempty");
            if min != model.affine_id(x) {
                continue;
            }
            let c = f.neg(dot3(f, &model.tangents[i], x));
            let mut line = ids;
            line.push(model.plane_id(i, c));
            model.secant_first.push(min);
            model.secant_reps.push(*x);
            lines.push(line);
        }
    }
    for i in 0..=q {
        let mut line: Vec<u32> = f.elements().map(|c| model.plane_id(i, c)).collect();
        line.push(model.infinity_point());
        lines.push(line);
    }
    let n_points = q.pow(3) + q * (q + 1) + 1;
    let g = Geometry::build(lines, n_points)?.with_tag(ModelTag::Tits);
    Ok((g, model))
}

/// The projection scenario in PG(3,3): conic `a1..a4` in δ, a plane ζ through
/// `a1, a2`, and `r = a1a3 ∩ a2a4`.
#[derive(Clone, Debug)]
pub struct ProjectionScenario {
    pub geometry: Geometry,
    pub model: TitsModel,
    /// Plane coordinates of ζ (4-vector).
    pub zeta: [Fe; 4],
    /// The point `r` of δ (4-vector with last coordinate 0).
    pub r: [Fe; 4],
    /// Thin subquadrangle: everything of Δ inside ζ, `(∞)`, and the planes on `t1`, `t2`.
    pub thin: Subgeometry,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub morphism: MorphismReport,
    /// Points of the thin subquadrangle fixed by the map.
    pub fixes_thin: bool,
    pub image_points: usize,
    pub image_lines: usize,
    /// Whether the image is exactly the thin subquadrangle.
    pub image_is_thin: bool,
    /// For each tangent plane through `t3`/`t4`: number of distinct images
    /// obtained over all admissible choices of the auxiliary point.
    pub plane_rule_choices: Vec<usize>,
    /// A point outside the thin subquadrangle that no map fixing it
    /// elementwise and landing inside it can send anywhere.
    pub retraction_obstruction: Option<u32>,
}

fn dot4(f: &Field, a: &[Fe; 4], b: &[Fe; 4]) -> Fe {
    (0..4).fold(Fe::ZERO, |acc, i| f.add(acc, f.mul(a[i], b[i])))
}

/// The q = 3 scenario with the standard conic and ζ: `x1 = 0`.
pub fn projection_scenario() -> Result<ProjectionScenario> {
    let f = Field::new(3, 1)?;
    let (g, model) = build_tits_t2(&f, &standard_conic(&f))?;
    let zeta = [Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO];
    let o = &model.oval;
    let l13 = cross(&f, &o[0], &o[2]);
    let l24 = cross(&f, &o[1], &o[3]);
    let r3 = normalized3(&f, cross(&f, &l13, &l24)).expect("distinct secants meet");
    let r = [r3[0], r3[1], r3[2], Fe::ZERO];
    let zeta_of_oval = |i: usize| dot4(&f, &zeta, &[o[i][0], o[i][1], o[i][2], Fe::ZERO]) == Fe::ZERO;
    if !(zeta_of_oval(0) && zeta_of_oval(1)) {
        return Err(Error::Structure("ζ must contain a1 and a2".into()));
    }
    let mut thin_pts = BitSet::new(g.num_points());
    for p in 0..g.num_points() as u32 {
        let keep = match model.point_kind(p) {
            TitsPoint::Affine(x) => dot4(&f, &zeta, &[x[0], x[1], x[2], Fe::ONE]) == Fe::ZERO,
            TitsPoint::TangentPlane { oval_index, .. } => oval_index < 2,
            TitsPoint::Infinity => true,
        };
        if keep {
            thin_pts.insert(p as usize);
        }
    }
    let thin = Subgeometry::induced(&g, thin_pts);
    Ok(ProjectionScenario { geometry: g, model, zeta, r, thin })
}

/// The scenario together with its prescribed map.
pub fn build_counterexample_morphism() -> Result<(ProjectionScenario, Morphism)> {
    let sc = projection_scenario()?;
    let m = sc.projection_map();
    Ok((sc, m))
}

impl ProjectionScenario {
    fn in_zeta(&self, x: &[Fe; 3]) -> bool {
        dot4(&self.model.field, &self.zeta, &[x[0], x[1], x[2], Fe::ONE]) == Fe::ZERO
    }

    /// `rm ∩ ζ` for an affine point `m`.
    fn project(&self, x: &[Fe; 3]) -> [Fe; 3] {
        let f = &self.model.field;
        let m = [x[0], x[1], x[2], Fe::ONE];
        let lam = f.neg(f.div(dot4(f, &self.zeta, &m), dot4(f, &self.zeta, &self.r)).expect("r is off ζ"));
        [f.add(x[0], f.mul(lam, self.r[0])), f.add(x[1], f.mul(lam, self.r[1])), f.add(x[2], f.mul(lam, self.r[2]))]
    }

    fn point_image(&self, p: u32) -> u32 {
        let m = &self.model;
        match m.point_kind(p) {
            TitsPoint::Affine(x) if !self.in_zeta(&x) => m.affine_id(&self.project(&x)),
            TitsPoint::TangentPlane { oval_index, .. } if oval_index >= 2 => {
                let ell = self.plane_affine_points(p)[0];
                m.plane_through(oval_index - 2, &self.project_or_keep(&ell))
            }
            _ => p,
        }
    }

    fn project_or_keep(&self, x: &[Fe; 3]) -> [Fe; 3] {
        if self.in_zeta(x) {
            *x
        } else {
            self.project(x)
        }
    }

    fn plane_affine_points(&self, p: u32) -> Vec<[Fe; 3]> {
        let m = &self.model;
        let TitsPoint::TangentPlane { oval_index, c } = m.point_kind(p) else {
            return Vec::new();
        };
        (0..m.q().pow(3) as u32)
            .filter_map(|a| match m.point_kind(a) {
                TitsPoint::Affine(x) if m.plane_contains(oval_index, c, &x) => Some(x),
                _ => None,
            })
            .collect()
    }

    /// The map as prescribed: identity on the thin subquadrangle, projection
    /// from `r` onto ζ for affine points off ζ and for lines through oval
    /// points off ζ, `a3 ↦ a1`, `a4 ↦ a2`, and a tangent plane through `t3`
    /// (`t4`) sent to the plane through `t1` (`t2`) and the image of its
    /// smallest affine point.
    pub fn projection_map(&self) -> Morphism {
        let g = &self.geometry;
        let m = &self.model;
        let point_map: Vec<u32> = (0..g.num_points() as u32).map(|p| self.point_image(p)).collect();
        let line_map = (0..g.num_lines() as u32)
            .map(|l| {
                if self.thin.has_line(l) {
                    return l;
                }
                match m.line_kind(l) {
                    TitsLine::OvalPoint(i) => m.oval_line(i - 2),
                    TitsLine::Secant { .. } => {
                        let moved: Vec<u32> = g
                            .points_on(l)
                            .iter()
                            .filter(|&&p| matches!(m.point_kind(p), TitsPoint::Affine(x) if !self.in_zeta(&x)))
                            .map(|&p| point_map[p as usize])
                            .collect();
                        g.line_through(moved[0], moved[1]).unwrap_or(u32::MAX)
                    }
                }
            })
            .collect();
        Morphism { point_map, line_map }
    }

    /// A point x off the thin subquadrangle G such that no point of G is
    /// collinear with (or equal to) every point of `x⊥ ∩ G`. Its existence rules
    /// out any morphism fixing G elementwise with image inside G.
    pub fn retraction_obstruction(&self) -> Option<u32> {
        let g = &self.geometry;
        let thin = self.thin.point_set();
        (0..g.num_points() as u32).filter(|&x| !self.thin.has_point(x)).find(|&x| {
            let shadow: Vec<u32> = g
                .lines_through(x)
                .iter()
                .filter_map(|&l| g.points_on(l).iter().copied().find(|&p| thin.contains(p as usize)))
                .collect();
            !thin.iter().any(|y| shadow.iter().all(|&z| g.collinear(y as u32, z)))
        })
    }

    pub fn report(&self) -> ProjectionReport {
        let g = &self.geometry;
        let m = &self.model;
        let phi = self.projection_map();
        let total = phi.line_map.iter().all(|&l| l != u32::MAX);
        let morphism = if total {
            validate_morphism(g, g, &phi)
        } else {
            let mut r = validate_morphism(
                g,
                g,
                &Morphism { point_map: phi.point_map.clone(), line_map: vec![0; g.num_lines()] },
            );
            r.is_morphism = false;
            r.is_cover = false;
            r.violations.insert(0, "a projected line does not exist in the geometry".into());
            r
        };
        let fixes_thin = self.thin.points().iter().all(|&p| phi.point_map[p as usize] == p)
            && self.thin.lines().iter().all(|&l| phi.line_map[l as usize] == l);
        let img_p = phi.image_points();
        let img_l: Vec<u32> = phi.image_lines().into_iter().filter(|&l| l != u32::MAX).collect();
        let image_is_thin = img_p == self.thin.points() && img_l == self.thin.lines();
        let mut plane_rule_choices = Vec::new();
        for p in 0..g.num_points() as u32 {
            if let TitsPoint::TangentPlane { oval_index, .. } = m.point_kind(p) {
                if oval_index >= 2 {
                    let mut imgs: Vec<u32> = self
                        .plane_affine_points(p)
                        .iter()
                        .map(|x| m.plane_through(oval_index - 2, &self.project_or_keep(x)))
                        .collect();
                    imgs.sort_unstable();
                    imgs.dedup();
                    plane_rule_choices.push(imgs.len());
                }
            }
        }
        ProjectionReport {
            morphism,
            fixes_thin,
            image_points: img_p.len(),
            image_lines: img_l.len(),
            image_is_thin,
            plane_rule_choices,
            retraction_obstruction: self.retraction_obstruction(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{classify_hyperplane, validate_gq, HyperplaneType};

    #[test]
    fn t2_of_conic() {
        for (p, h) in [(3, 1), (5, 1)] {
            let f = Field::new(p, h).unwrap();
            let (g, _) = build_tits_t2(&f, &standard_conic(&f)).unwrap();
            let q = f.order();
            assert_eq!(g.num_points(), (q + 1) * (q * q + 1));
            let r = validate_gq(&g);
            assert!(r.is_gq);
            assert_eq!(r.order(), Some((q, q)));
        }
    }

    #[test]
    fn rejects_non_ovals() {
        let f = Field::new(3, 1).unwrap();
        // The first three points lie on x0 = 0.
        let collinear = [
            [Fe::ZERO, Fe::ONE, Fe::ZERO],
            [Fe::ZERO, Fe::ZERO, Fe::ONE],
            [Fe::ZERO, Fe::ONE, Fe::ONE],
            [Fe::ONE, Fe::ZERO, Fe::ZERO],
        ];
        assert!(build_tits_t2(&f, &collinear).is_err());
        assert!(build_tits_t2(&f, &standard_conic(&f)[..3]).is_err());
    }

    #[test]
    fn thin_subquadrangle_is_type_c() {
        let sc = projection_scenario().unwrap();
        assert_eq!((sc.thin.num_points(), sc.thin.num_lines()), (16, 8));
        let (sub, _, _) = sc.thin.to_geometry(&sc.geometry);
        let r = validate_gq(&sub);
        assert!(r.is_gq);
        assert_eq!(r.order(), Some((3, 1)));
        assert_eq!(classify_hyperplane(&sc.geometry, &sc.thin), HyperplaneType::C { thin: true });
    }

    #[test]
    fn projection_point_rules() {
        let sc = projection_scenario().unwrap();
        let phi = sc.projection_map();
        for p in sc.thin.points() {
            assert_eq!(phi.point_map[p as usize], p);
        }
        assert_eq!(phi.line_map[sc.model.oval_line(2) as usize], sc.model.oval_line(0));
        assert_eq!(phi.line_map[sc.model.oval_line(3) as usize], sc.model.oval_line(1));
        assert!(phi.point_map.iter().all(|&p| sc.thin.has_point(p)));
    }
}
