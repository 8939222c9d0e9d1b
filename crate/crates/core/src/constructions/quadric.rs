//! Parabolic Q(4,q) and elliptic Q(5,q) quadrics.
//!
//! Forms: parabolic `x0² + x1x2 + x3x4`; elliptic `x0² − m x1² + x2x3 + x4x5`
//! with `m` the canonical nonsquare. The elliptic section `x1 = 0` is the
//! parabolic form in coordinates `(x0, x2, x3, x4, x5)`.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::galois::{Fe, Field, FieldAut};
use crate::incidence::{Geometry, ModelTag, Subgeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadricKind {
    Parabolic,
    Elliptic,
}

/// Coordinates and form data behind a quadric geometry.
#[derive(Clone, Debug)]
pub struct QuadricModel {
    pub field: Field,
    pub kind: QuadricKind,
    /// Projective dimension (4 or 5).
    pub dim: usize,
    /// `Q(x) = Σ c·x_i·x_j` over the listed `(i, j, c)` with `i ≤ j`.
    pub form: Vec<(usize, usize, Fe)>,
    pub nonsquare: Option<Fe>,
    coords: Vec<Vec<Fe>>,
    index: Vec<u32>,
}

/// Scales `v` so its first nonzero coordinate is 1. Returns false for the zero vector.
pub fn normalize(f: &Field, v: &mut [Fe]) -> bool {
    let Some(&lead) = v.iter().find(|&&x| x != Fe::ZERO) else {
        return false;
    };
    let inv = f.inv(lead).expect("nonzero");
    for x in v.iter_mut() {
        *x = f.mul(*x, inv);
    }
    true
}

/// Base-q code of a coordinate vector, first coordinate most significant.
pub fn vector_code(f: &Field, v: &[Fe]) -> usize {
    v.iter().fold(0usize, |acc, x| acc * f.order() + x.index())
}

/// Projective points of PG(n,q) as normalized vectors in lexicographic order.
pub fn projective_points(f: &Field, n: usize) -> Vec<Vec<Fe>> {
    let q = f.order();
    let total = q.pow(n as u32 + 1);
    let mut out = Vec::new();
    for code in 1..total {
        let mut v = vec![Fe::ZERO; n + 1];
        let mut c = code;
        for i in (0..=n).rev() {
            v[i] = Fe((c % q) as u16);
            c /= q;
        }
        if v.iter().find(|&&x| x != Fe::ZERO) == Some(&Fe::ONE) {
            out.push(v);
        }
    }
    out
}

impl QuadricModel {
    pub fn eval(&self, x: &[Fe]) -> Fe {
        let f = &self.field;
        self.form.iter().fold(Fe::ZERO, |acc, &(i, j, c)| f.add(acc, f.mul(c, f.mul(x[i], x[j]))))
    }

    /// Polar form `B(x,y) = Q(x+y) − Q(x) − Q(y)`.
    pub fn bilinear(&self, x: &[Fe], y: &[Fe]) -> Fe {
        let f = &self.field;
        self.form.iter().fold(Fe::ZERO, |acc, &(i, j, c)| {
            let term = if i == j {
                f.mul(f.from_int(2), f.mul(x[i], y[i]))
            } else {
                f.add(f.mul(x[i], y[j]), f.mul(x[j], y[i]))
            };
            f.add(acc, f.mul(c, term))
        })
    }

    pub fn num_points(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, point: u32) -> &[Fe] {
        &self.coords[point as usize]
    }

    /// Point id of a (not necessarily normalized) nonzero vector on the quadric.
    pub fn point_id(&self, v: &[Fe]) -> Option<u32> {
        let mut w = v.to_vec();
        if !normalize(&self.field, &mut w) {
            return None;
        }
        let id = self.index[vector_code(&self.field, &w)];
        (id != u32::MAX).then_some(id)
    }

    /// Point permutation induced by the semilinear map `x ↦ φ(x)·M` (row
    /// vectors), or `None` if it does not preserve the quadric.
    pub fn semilinear_perm(&self, matrix: &[Vec<Fe>], phi: Option<&FieldAut>) -> Option<Vec<u32>> {
        let f = &self.field;
        let n = self.dim + 1;
        let mut perm = Vec::with_capacity(self.coords.len());
        let mut y = vec![Fe::ZERO; n];
        for x in &self.coords {
            let xs: Vec<Fe> = match phi {
                Some(a) => x.iter().map(|&c| a.apply(c)).collect(),
                None => x.clone(),
            };
            for (j, yj) in y.iter_mut().enumerate() {
                *yj = (0..n).fold(Fe::ZERO, |acc, i| f.add(acc, f.mul(xs[i], matrix[i][j])));
            }
            perm.push(self.point_id(&y)?);
        }
        let mut seen = BitSet::new(perm.len());
        perm.iter().all(|&p| seen.insert(p as usize)).then_some(perm)
    }

    /// Matrix of the reflection `x ↦ x − (B(x,v)/Q(v))·v` for a nonsingular `v`.
    pub fn reflection_matrix(&self, v: &[Fe]) -> Option<Vec<Vec<Fe>>> {
        let f = &self.field;
        let qv = self.eval(v);
        let qinv = f.inv(qv)?;
        let n = self.dim + 1;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![Fe::ZERO; n];
            e[i] = Fe::ONE;
            let coef = f.mul(self.bilinear(&e, v), qinv);
            let row: Vec<Fe> = (0..n).map(|j| f.sub(e[j], f.mul(coef, v[j]))).collect();
            rows.push(row);
        }
        Some(rows)
    }

    /// The points on the hyperplane `Σ h_i x_i = 0` and the lines inside it.
    pub fn hyperplane_section(&self, g: &Geometry, h: &[Fe]) -> Subgeometry {
        let f = &self.field;
        let pts = BitSet::from_iter(
            self.coords.len(),
            self.coords.iter().enumerate().filter_map(|(i, x)| {
                let s = x.iter().zip(h).fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                (s == Fe::ZERO).then_some(i as u32)
            }),
        );
        Subgeometry::induced(g, pts)
    }
}

fn build_quadric(field: &Field, kind: QuadricKind) -> Result<(Geometry, QuadricModel)> {
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let (dim, form, nonsquare) = match kind {
        QuadricKind::Parabolic => (4, vec![(0, 0, Fe::ONE), (1, 2, Fe::ONE), (3, 4, Fe::ONE)], None),
        QuadricKind::Elliptic => {
            let m = field.find_nonsquare()?;
            (5, vec![(0, 0, Fe::ONE), (1, 1, field.neg(m)), (2, 3, Fe::ONE), (4, 5, Fe::ONE)], Some(m))
        }
    };
    let mut model = QuadricModel {
        field: field.clone(),
        kind,
        dim,
        form,
        nonsquare,
        coords: Vec::new(),
        index: vec![u32::MAX; field.order().pow(dim as u32 + 1)],
    };
    model.coords = projective_points(field, dim).into_iter().filter(|x| model.eval(x) == Fe::ZERO).collect();
    for (i, x) in model.coords.iter().enumerate() {
        model.index[vector_code(field, x)] = i as u32;
    }
    let n = model.coords.len();
    let mut lines = Vec::new();
    let mut v = vec![Fe::ZERO; dim + 1];
    for a in 0..n {
        let xa = &model.coords[a];
        for b in a + 1..n {
            let xb = &model.coords[b];
            if model.bilinear(xa, xb) != Fe::ZERO {
                continue;
            }
            // Points a + λb; keep the line only when a, b are its two smallest ids.
            let mut pts = vec![a as u32, b as u32];
            let mut minimal = true;
            for lam in field.nonzero() {
                for (k, vk) in v.iter_mut().enumerate() {
                    *vk = field.add(xa[k], field.mul(lam, xb[k]));
                }
                let id = model.point_id(&v).expect("totally singular line");
                if id < b as u32 {
                    minimal = false;
                    break;
                }
                pts.push(id);
            }
            if minimal {
                lines.push(pts);
            }
        }
    }
    let g = Geometry::build(lines, n)?.with_tag(ModelTag::Quadric);
    Ok((g, model))
}

pub fn build_parabolic(field: &Field) -> Result<(Geometry, QuadricModel)> {
    build_quadric(field, QuadricKind::Parabolic)
}

pub fn build_elliptic(field: &Field) -> Result<(Geometry, QuadricModel)> {
    build_quadric(field, QuadricKind::Elliptic)
}

/// The section `x1 = 0` of the elliptic quadric: a parabolic subquadrangle.
pub fn parabolic_section(g: &Geometry, model: &QuadricModel) -> Subgeometry {
    let mut h = vec![Fe::ZERO; model.dim + 1];
    h[1] = Fe::ONE;
    model.hyperplane_section(g, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{classify_hyperplane, validate_gq, HyperplaneType};

    #[test]
    fn counts() {
        for (p, h, pts) in [(3, 1, 40), (5, 1, 156)] {
            let f = Field::new(p, h).unwrap();
            let (g, m) = build_parabolic(&f).unwrap();
            assert_eq!((g.num_points(), g.num_lines()), (pts, pts));
            for l in 0..g.num_lines() as u32 {
                for &a in g.points_on(l) {
                    assert_eq!(m.eval(m.coords(a)), Fe::ZERO);
                    for &b in g.points_on(l) {
                        assert_eq!(m.bilinear(m.coords(a), m.coords(b)), Fe::ZERO);
                    }
                }
            }
        }
        let f = Field::new(3, 1).unwrap();
        let (g, _) = build_elliptic(&f).unwrap();
        assert_eq!((g.num_points(), g.num_lines()), (112, 280));
        let r = validate_gq(&g);
        assert!(r.is_gq);
        assert_eq!(r.order(), Some((3, 9)));
    }

    #[test]
    fn elliptic_section_is_type_c() {
        let f = Field::new(3, 1).unwrap();
        let (g, m) = build_elliptic(&f).unwrap();
        let s = parabolic_section(&g, &m);
        assert_eq!((s.num_points(), s.num_lines()), (40, 40));
        assert!(s.is_full(&g));
        assert_eq!(classify_hyperplane(&g, &s), HyperplaneType::C { thin: false });
    }

    #[test]
    fn reflections_preserve_the_quadric() {
        let f = Field::new(3, 1).unwrap();
        let (_, m) = build_parabolic(&f).unwrap();
        let e0 = vec![Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO];
        let r = m.reflection_matrix(&e0).unwrap();
        let perm = m.semilinear_perm(&r, None).unwrap();
        assert!(perm.iter().enumerate().any(|(i, &j)| i as u32 != j));
        let singular = vec![Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO];
        assert!(m.reflection_matrix(&singular).is_none());
    }
}
