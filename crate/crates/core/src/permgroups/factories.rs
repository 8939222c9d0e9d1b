//! Generators for automorphism groups that arise in quadrangle theory.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::extend::Extender;
use super::{point_orbit, GenSet, GroupElement, Perm};
use crate::bitset::BitSet;
use crate::constructions::{CosetModel, Gel, KkPoint, QuadricKind, QuadricModel};
use crate::error::{Error, Result};
use crate::galois::{Fe, Field, FieldAut};
use crate::incidence::{Geometry, Subgeometry};

const NODE_LIMIT: usize = 20_000;
const SOLUTION_LIMIT: usize = 64;

/// Completes a seeded extension to an automorphism accepted by `keep`,
/// branching if propagation alone does not determine it.
fn complete(ext: &Extender<'_>, keep: impl Fn(&GroupElement) -> bool) -> Option<GroupElement> {
    let mut e = ext.clone();
    if !e.propagate() {
        return None;
    }
    if e.is_complete() {
        return e.to_group_element().filter(|x| keep(x));
    }
    let out = e.search(SOLUTION_LIMIT, NODE_LIMIT);
    out.solutions
        .into_iter()
        .filter_map(|m| {
            Some(GroupElement { points: Perm::from_vec(m.point_map).ok()?, lines: Perm::from_vec(m.line_map).ok()? })
        })
        .find(|x| keep(x))
}

/// Generators for the automorphisms fixing `w` pointwise and every line
/// meeting `w`. Errors with [`Error::NotAxis`] if only the identity does.
pub fn line_symmetries(g: &Geometry, w: u32) -> Result<GenSet> {
    if w as usize >= g.num_lines() {
        return Err(Error::InvalidArgument(format!("line {w} out of range")));
    }
    let mut base = Extender::new(g, g);
    for &p in g.points_on(w) {
        base.set_point(p, p);
    }
    for l in g.concurrent_lines(w) {
        base.set_line(l, l);
    }
    base.set_line(w, w);
    let w0 = g.points_on(w)[0];
    let m = *g.lines_through(w0).iter().find(|&&l| l != w).ok_or(Error::NotAxis(w))?;
    let y = *g.points_on(m).iter().find(|&&p| p != w0).ok_or(Error::NotAxis(w))?;
    let mut gens: Vec<GroupElement> = Vec::new();
    let mut reached = vec![y];
    for &y2 in g.points_on(m) {
        if y2 == w0 || reached.contains(&y2) {
            continue;
        }
        let mut ext = base.clone();
        if !ext.set_point(y, y2) {
            continue;
        }
        if let Some(e) = complete(&ext, |_| true) {
            gens.push(e);
            reached = point_orbit(&gens, y, g.num_points());
        }
    }
    if gens.is_empty() {
        return Err(Error::NotAxis(w));
    }
    Ok(GenSet::trusted(g, gens))
}

/// Elations about `p`: automorphisms fixing `p` and every line through it and
/// no point opposite `p`. Generators are added until the group is transitive on
/// opposite points or no further elation is found; whether the generated group
/// is regular is for the caller to check.
pub fn elation_group(g: &Geometry, p: u32) -> Result<GenSet> {
    if p as usize >= g.num_points() {
        return Err(Error::InvalidArgument(format!("point {p} out of range")));
    }
    let n = g.num_points();
    let row = g.row_set(p);
    let opposite: Vec<u32> = (0..n as u32).filter(|&x| x != p && !row.contains(x as usize)).collect();
    let Some(&z) = opposite.first() else {
        return Ok(GenSet::trivial(g));
    };
    let mut base = Extender::new(g, g);
    base.set_point(p, p);
    for &l in g.lines_through(p) {
        base.set_line(l, l);
    }
    let mut gens: Vec<GroupElement> = Vec::new();
    let mut reached = BitSet::new(n);
    reached.insert(z as usize);
    for &z2 in &opposite {
        if reached.len() == opposite.len() {
            break;
        }
        if reached.contains(z2 as usize) {
            continue;
        }
        let mut ext = base.clone();
        if !ext.set_point(z, z2) {
            continue;
        }
        let elation = |e: &GroupElement| opposite.iter().all(|&x| !e.fixes_point(x));
        if let Some(e) = complete(&ext, elation) {
            gens.push(e);
            reached = BitSet::from_iter(n, point_orbit(&gens, z, n));
        }
    }
    Ok(GenSet::trusted(g, gens))
}

/// Translation group about the symbol point `e` on `[∞]` of a coset geometry.
pub fn translation_group(g: &Geometry, cm: &CosetModel, e: u32) -> Result<GenSet> {
    if e as usize >= g.num_points() || !matches!(cm.point_kind(e), KkPoint::Symbol { .. }) {
        return Err(Error::InvalidArgument(format!("point {e} is not on the line at infinity")));
    }
    elation_group(g, e)
}

/// Automorphisms fixing the noncollinear points `u`, `v` and every line
/// through either of them.
pub fn kernel_homologies(g: &Geometry, u: u32, v: u32) -> Result<GenSet> {
    let n = g.num_points() as u32;
    if u >= n || v >= n || u == v || g.collinear(u, v) {
        return Err(Error::InvalidArgument(format!("points {u} and {v} must be distinct and noncollinear")));
    }
    let mut base = Extender::new(g, g);
    base.set_point(u, u);
    base.set_point(v, v);
    for &l in g.lines_through(u).iter().chain(g.lines_through(v)) {
        base.set_line(l, l);
    }
    let l = g.lines_through(u)[0];
    let foot = g.project(v, l).ok_or_else(|| Error::Structure("no projection onto a line through u".into()))?;
    let movable: Vec<u32> = g.points_on(l).iter().copied().filter(|&x| x != u && x != foot).collect();
    let Some(&w) = movable.first() else {
        return Ok(GenSet::trivial(g));
    };
    let mut gens = Vec::new();
    for &w2 in &movable[1..] {
        let mut ext = base.clone();
        if ext.set_point(w, w2) {
            if let Some(e) = complete(&ext, |_| true) {
                gens.push(e);
            }
        }
    }
    Ok(GenSet::trusted(g, gens))
}

/// Generators of the full collineation group of a parabolic quadric `Q(4,q)`.
/// Random reflections from a fixed seed are added until the order stops growing;
/// the Frobenius map is included for non-prime fields.
pub fn orthogonal_generators(g: &Geometry, qm: &QuadricModel) -> Result<GenSet> {
    if qm.kind != QuadricKind::Parabolic {
        return Err(Error::InvalidArgument("orthogonal generators need a parabolic quadric".into()));
    }
    let f = &qm.field;
    let n = qm.dim + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut nonsingular: Vec<Vec<Fe>> =
        crate::constructions::quadric::projective_points(f, n).into_iter().filter(|v| qm.eval(v) != Fe::ZERO).collect();
    nonsingular.shuffle(&mut rng);
    fn perm_of(g: &Geometry, qm: &QuadricModel, m: &[Vec<Fe>], phi: Option<&FieldAut>) -> Result<GroupElement> {
        let p = qm
            .semilinear_perm(m, phi)
            .ok_or_else(|| Error::NotAutomorphism("map does not preserve the quadric".into()))?;
        GroupElement::from_point_perm(g, p)
    }
    let mut gens = Vec::new();
    if f.h() > 1 {
        let ident: Vec<Vec<Fe>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect()).collect();
        let frob = f.frobenius_power(1)?;
        gens.push(perm_of(g, qm, &ident, Some(&frob))?);
    }
    let mut square = true;
    let mut order = 1u128;
    let mut stable = 0;
    let mut it = nonsingular.iter();
    while stable < 2 {
        // Alternate square classes of Q(v) so both kinds of reflection appear.
        let mut added = 0;
        while added < 2 {
            let v = it.next().ok_or_else(|| Error::Structure("ran out of reflection vectors".into()))?;
            if f.is_square(qm.eval(v)) != square {
                continue;
            }
            square = !square;
            let m = qm.reflection_matrix(v).expect("nonsingular vector");
            gens.push(perm_of(g, qm, &m, None)?);
            added += 1;
        }
        let next = GenSet::trusted(g, gens.clone()).order();
        if next == order {
            stable += 1;
        } else {
            stable = 0;
            order = next;
        }
    }
    Ok(GenSet::trusted(g, gens))
}

/// The order `q⁴(q²−1)(q⁴−1)·h` of the collineation group of `Q(4,q)`, `q = p^h` odd.
pub fn parabolic_group_order(f: &Field) -> u128 {
    let q = f.order() as u128;
    q.pow(4) * (q * q - 1) * (q.pow(4) - 1) * f.h() as u128
}

fn primitive_element(f: &Field) -> Fe {
    let m = f.order() as u64 - 1;
    f.nonzero().find(|&x| (1..m).all(|k| m % k != 0 || f.pow(x, k) != Fe::ONE)).expect("multiplicative group is cyclic")
}

/// Standard automorphisms of a Kantor–Knuth coset geometry: right
/// multiplication by generators of the group, the scalings `θ_λ`, the
/// fixed-field scalings, the diagonal maps `ψ_D`, the shears and a Frobenius
/// map, all acting through the 4-gonal family.
pub fn coset_model_automorphisms(g: &Geometry, cm: &CosetModel) -> Result<Vec<GroupElement>> {
    let f = &cm.field;
    let sigma = &cm.sigma;
    let z = Fe::ZERO;
    let mut out = Vec::new();

    let basis: Vec<Fe> = (0..f.h())
        .map(|i| {
            let mut c = vec![0u32; f.h() as usize];
            c[i as usize] = 1;
            f.from_coeffs(&c)
        })
        .collect::<Result<_>>()?;
    for &x in &basis {
        let units = [
            Gel { a: [x, z], c: z, b: [z, z] },
            Gel { a: [z, x], c: z, b: [z, z] },
            Gel { a: [z, z], c: x, b: [z, z] },
            Gel { a: [z, z], c: z, b: [x, z] },
            Gel { a: [z, z], c: z, b: [z, x] },
        ];
        for h in units {
            let perm = (0..g.num_points() as u32).map(|p| cm.right_mul_point(p, &h)).collect();
            out.push(GroupElement::from_point_perm(g, perm)?);
        }
    }

    let family = |phi: &dyn Fn(&Gel) -> Gel, what: &str| -> Result<GroupElement> {
        let perm = cm
            .family_automorphism(phi)
            .ok_or_else(|| Error::NotAutomorphism(format!("{what} does not permute the family")))?;
        GroupElement::from_point_perm(g, perm)
    };

    let lambda = primitive_element(f);
    let l2 = f.mul(lambda, lambda);
    out.push(family(
        &|x: &Gel| Gel {
            a: [f.mul(lambda, x.a[0]), f.mul(lambda, x.a[1])],
            c: f.mul(l2, x.c),
            b: [f.mul(lambda, x.b[0]), f.mul(lambda, x.b[1])],
        },
        "scaling",
    )?);

    let fixed = sigma.fixed_subfield();
    if let Some(&mu) = fixed.elements.iter().find(|&&x| {
        x != z
            && fixed.multiplicative_order() > 1
            && (1..fixed.multiplicative_order() as u64).all(|k| f.pow(x, k) != Fe::ONE)
    }) {
        out.push(family(
            &|x: &Gel| Gel { a: [f.mul(mu, x.a[0]), f.mul(mu, x.a[1])], c: f.mul(mu, x.c), b: x.b },
            "fixed-field scaling",
        )?);
    }

    // ψ_D with D = diag(a, ±a^σ).
    let minus_one = f.neg(Fe::ONE);
    for (a, d) in [(lambda, sigma.apply(lambda)), (Fe::ONE, minus_one)] {
        let (ai, di) = (f.inv(a).expect("nonzero"), f.inv(d).expect("nonzero"));
        out.push(family(
            &|x: &Gel| Gel {
                a: [f.mul(x.a[0], a), f.mul(x.a[1], d)],
                c: x.c,
                b: [f.mul(x.b[0], ai), f.mul(x.b[1], di)],
            },
            "diagonal map",
        )?);
    }

    for &u in &basis {
        let k = [u, f.neg(f.mul(cm.m, sigma.apply(u)))];
        out.push(family(
            &|x: &Gel| {
                let ka = [f.mul(x.a[0], k[0]), f.mul(x.a[1], k[1])];
                let quad = f.add(f.mul(ka[0], x.a[0]), f.mul(ka[1], x.a[1]));
                Gel {
                    a: x.a,
                    c: f.add(x.c, quad),
                    b: [f.add(x.b[0], f.add(ka[0], ka[0])), f.add(x.b[1], f.add(ka[1], ka[1]))],
                }
            },
            "shear",
        )?);
    }

    if f.h() > 1 {
        let phi = f.frobenius_power(1)?;
        let d = f.pow(cm.m, (f.p() as u64 - 1) / 2);
        let di = f.inv(d).expect("nonzero");
        out.push(family(
            &|x: &Gel| Gel {
                a: [phi.apply(x.a[0]), f.mul(phi.apply(x.a[1]), d)],
                c: phi.apply(x.c),
                b: [phi.apply(x.b[0]), f.mul(phi.apply(x.b[1]), di)],
            },
            "Frobenius map",
        )?);
    }
    Ok(out.into_iter().filter(|e| !e.is_identity()).collect())
}

/// A group restricted to a subgeometry it stabilizes.
#[derive(Clone, Debug)]
pub struct InducedAction {
    pub geometry: Geometry,
    /// Local point id to ambient point id.
    pub point_map: Vec<u32>,
    pub line_map: Vec<u32>,
    pub group: GenSet,
    /// Order of the subgroup acting trivially on the subgeometry.
    pub kernel_order: u128,
}

/// Restriction of `gs` to `sub`; every generator must stabilize `sub`.
pub fn induced_action(gs: &GenSet, g: &Geometry, sub: &Subgeometry) -> Result<InducedAction> {
    let (sg, pmap, lmap) = sub.to_geometry(g);
    let mut plocal = vec![u32::MAX; g.num_points()];
    let mut llocal = vec![u32::MAX; g.num_lines()];
    for (i, &p) in pmap.iter().enumerate() {
        plocal[p as usize] = i as u32;
    }
    for (i, &l) in lmap.iter().enumerate() {
        llocal[l as usize] = i as u32;
    }
    let mut gens = Vec::new();
    for (k, e) in gs.gens().iter().enumerate() {
        let pts: Vec<u32> = pmap.iter().map(|&p| plocal[e.points.apply(p) as usize]).collect();
        let lns: Vec<u32> = lmap.iter().map(|&l| llocal[e.lines.apply(l) as usize]).collect();
        if pts.contains(&u32::MAX) || lns.contains(&u32::MAX) {
            return Err(Error::InvalidArgument(format!("generator {k} does not stabilize the subgeometry")));
        }
        gens.push(GroupElement { points: Perm::from_vec_unchecked(pts), lines: Perm::from_vec_unchecked(lns) });
    }
    let group = GenSet::trusted(&sg, gens);
    let kernel_order = gs.order() / group.order();
    Ok(InducedAction { geometry: sg, point_map: pmap, line_map: lmap, group, kernel_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_kantor_knuth, build_parabolic};

    #[test]
    fn q43_group_and_families() {
        let f = Field::new(3, 1).unwrap();
        let (g, qm) = build_parabolic(&f).unwrap();
        let gs = orthogonal_generators(&g, &qm).unwrap();
        assert_eq!(gs.order(), parabolic_group_order(&f));
        assert_eq!(gs.order(), 51840);
        // Q(4,q) has every line regular: symmetry groups of order q.
        assert_eq!(line_symmetries(&g, 0).unwrap().order(), 3);
        assert_eq!(elation_group(&g, 0).unwrap().order(), 27);
        let v = (0..g.num_points() as u32).find(|&x| x != 0 && !g.collinear(0, x)).unwrap();
        assert_eq!(kernel_homologies(&g, 0, v).unwrap().order(), 2);
    }

    #[test]
    fn kantor_knuth_small_group() {
        let f = Field::new(3, 1).unwrap();
        let sigma = f.frobenius_power(0).unwrap();
        let (g, cm) = build_kantor_knuth(&f, &sigma, f.from_int(2)).unwrap();
        let autos = coset_model_automorphisms(&g, &cm).unwrap();
        assert!(autos.iter().all(|e| e.is_automorphism(&g)));
        let gs = GenSet::trusted(&g, autos);
        assert_eq!(gs.order() % 243, 0);
        let t = translation_group(&g, &cm, cm.symbol_point(0)).unwrap();
        assert_eq!(t.order(), 81);
        assert!(translation_group(&g, &cm, 0).is_err());
    }
}
