//! The affine geometry `A = Γ ∖ Q`, the geometry `E` of subtended ovoids and
//! rosettes, the projection `π: A → E`, and factorizations of covers of `E`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::incidence::{validate_morphism, validate_spg, Geometry, Morphism, MorphismReport, SpgReport};
use crate::permgroups::{Extender, GroupElement, Perm};
use crate::subtension::{subtended_ovoid, subtension_multiplicity, LocalView, Ovoid, SubGQHandle};

const NODE_LIMIT: usize = 20_000;

/// Points of `Γ` outside `Q` and the lines of `Γ` not in `Q`, each keeping
/// its points outside `Q`.
#[derive(Clone, Debug)]
pub struct AffineGeometry {
    pub geometry: Geometry,
    /// Parent id of each point.
    pub points: Vec<u32>,
    /// Parent id of each line.
    pub lines: Vec<u32>,
    /// The point of `Q` on each line.
    pub base: Vec<u32>,
    point_index: Vec<u32>,
    line_index: Vec<u32>,
}

impl AffineGeometry {
    pub fn local_point(&self, p: u32) -> Option<u32> {
        let i = *self.point_index.get(p as usize)?;
        (i != u32::MAX).then_some(i)
    }

    pub fn local_line(&self, l: u32) -> Option<u32> {
        let i = *self.line_index.get(l as usize)?;
        (i != u32::MAX).then_some(i)
    }
}

pub fn build_affine(g: &Geometry, q: &SubGQHandle) -> Result<AffineGeometry> {
    let mut point_index = vec![u32::MAX; g.num_points()];
    let mut points = Vec::new();
    for p in 0..g.num_points() as u32 {
        if !q.contains(p) {
            point_index[p as usize] = points.len() as u32;
            points.push(p);
        }
    }
    let mut line_index = vec![u32::MAX; g.num_lines()];
    let (mut lines, mut base, mut rows) = (Vec::new(), Vec::new(), Vec::new());
    for l in 0..g.num_lines() as u32 {
        if q.sub.has_line(l) {
            continue;
        }
        let inside: Vec<u32> = g.points_on(l).iter().copied().filter(|&p| q.contains(p)).collect();
        if inside.len() != 1 {
            return Err(Error::NotHyperplane(format!("line {l} meets the subgeometry in {} points", inside.len())));
        }
        line_index[l as usize] = lines.len() as u32;
        lines.push(l);
        base.push(inside[0]);
        rows.push(g.points_on(l).iter().filter(|&&p| p != inside[0]).map(|&p| point_index[p as usize]).collect());
    }
    let geometry = Geometry::build(rows, points.len())?;
    let s = g.uniform_line_size().map(|k| k - 1);
    if s.is_some_and(|s| geometry.uniform_line_size() != Some(s)) {
        return Err(Error::Structure("an affine line has the wrong number of points".into()));
    }
    if let Some(t1) = g.uniform_point_degree() {
        if geometry.uniform_point_degree().is_some_and(|d| d != t1) {
            return Err(Error::Structure("an affine point has the wrong number of lines".into()));
        }
    }
    Ok(AffineGeometry { geometry, points, lines, base, point_index, line_index })
}

/// Subtended ovoids as points and rosettes as lines.
#[derive(Clone, Debug)]
pub struct OvoidGeometry {
    pub geometry: Geometry,
    /// Ovoid of each point, with all its subtenders.
    pub ovoids: Vec<Ovoid>,
    /// The common point of the ovoids on each line.
    pub rosette_base: Vec<u32>,
}

/// `E` and the projection `π: A → E` taking a point to the ovoid it subtends
/// and a line to its rosette.
pub fn build_ovoid_geometry(g: &Geometry, q: &SubGQHandle, a: &AffineGeometry) -> Result<(OvoidGeometry, Morphism)> {
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut ovoids: Vec<Ovoid> = Vec::new();
    let mut point_map = Vec::with_capacity(a.points.len());
    for &x in &a.points {
        let o = subtended_ovoid(g, q, x)?;
        let id = match index.get(&o.points) {
            Some(&i) => {
                ovoids[i as usize].subtenders.push(x);
                i
            }
            None => {
                let i = ovoids.len() as u32;
                index.insert(o.points.clone(), i);
                ovoids.push(o);
                i
            }
        };
        point_map.push(id);
    }
    let mut rosettes: HashMap<Vec<u32>, u32> = HashMap::new();
    let (mut lines, mut rosette_base) = (Vec::new(), Vec::new());
    let mut line_map = Vec::with_capacity(a.lines.len());
    for (l, pts) in a.geometry.lines().iter().enumerate() {
        let mut key: Vec<u32> = pts.iter().map(|&p| point_map[p as usize]).collect();
        key.sort_unstable();
        let id = *rosettes.entry(key.clone()).or_insert_with(|| {
            lines.push(key);
            rosette_base.push(a.base[l]);
            (lines.len() - 1) as u32
        });
        line_map.push(id);
    }
    let geometry = Geometry::build_lenient(lines, ovoids.len())?;
    Ok((OvoidGeometry { geometry, ovoids, rosette_base }, Morphism { point_map, line_map }))
}

/// `validate_morphism` for `π`; its `theta` is the subtension multiplicity.
pub fn check_projection(a: &AffineGeometry, e: &OvoidGeometry, pi: &Morphism) -> MorphismReport {
    validate_morphism(&a.geometry, &e.geometry, pi)
}

/// Predicted and measured semi partial geometry parameters of `E`.
#[derive(Clone, Debug, Serialize)]
pub struct T3Report {
    pub hypotheses_hold: bool,
    pub hypothesis_failures: Vec<String>,
    /// `(s − 1, t, θ, θ(t − t′))`.
    pub expected: Option<(usize, usize, usize, usize)>,
    pub measured: Option<(usize, usize, u32, u32)>,
    pub spg: Option<SpgReport>,
    pub matches: bool,
}

/// Checks `t = s·t′`, `(θ − 1)t = s²` and `θ > 1`, then compares
/// `validate_spg(E)` with `(s − 1, t, θ, θ(t − t′))`.
pub fn check_t3_parameters(e: &Geometry, s: usize, t: usize, t_prime: usize, theta: usize) -> T3Report {
    let mut fails = Vec::new();
    if t != s * t_prime {
        fails.push(format!("t = {t} is not s·t′ = {}", s * t_prime));
    }
    if theta <= 1 {
        fails.push(format!("θ = {theta} is not greater than 1"));
    } else if (theta - 1) * t != s * s {
        fails.push(format!("(θ − 1)t = {} is not s² = {}", (theta - 1) * t, s * s));
    }
    if !fails.is_empty() {
        return T3Report {
            hypotheses_hold: false,
            hypothesis_failures: fails,
            expected: None,
            measured: None,
            spg: None,
            matches: false,
        };
    }
    let expected = (s - 1, t, theta, theta * (t - t_prime));
    let rep = validate_spg(e);
    let measured = match (rep.s_star.value(), rep.t_star.value(), rep.alpha, rep.mu) {
        (Some(a), Some(b), Some(c), Some(d)) => Some((a, b, c, d)),
        _ => None,
    };
    let matches = rep.is_spg && measured.is_some_and(|(a, b, c, d)| (a, b, c as usize, d as usize) == expected);
    T3Report {
        hypotheses_hold: true,
        hypothesis_failures: fails,
        expected: Some(expected),
        measured,
        spg: Some(rep),
        matches,
    }
}

/// `γ = π ∘ g` restricted to `A`, for an automorphism `g` of `Γ` stabilizing `Q`.
pub fn cover_from_automorphism(a: &AffineGeometry, pi: &Morphism, g: &GroupElement) -> Result<Morphism> {
    let point_map = a
        .points
        .iter()
        .map(|&p| a.local_point(g.points.apply(p)).map(|x| pi.point_map[x as usize]))
        .collect::<Option<Vec<u32>>>()
        .ok_or(Error::NotStabilizing)?;
    let line_map = a
        .lines
        .iter()
        .map(|&l| a.local_line(g.lines.apply(l)).map(|x| pi.line_map[x as usize]))
        .collect::<Option<Vec<u32>>>()
        .ok_or(Error::NotStabilizing)?;
    Ok(Morphism { point_map, line_map })
}

/// The automorphism of `E` induced by an automorphism of `Γ` stabilizing `Q`.
pub fn induced_on_e(a: &AffineGeometry, e: &OvoidGeometry, pi: &Morphism, g: &GroupElement) -> Result<GroupElement> {
    lower_decompose(a, e, pi, &cover_from_automorphism(a, pi, g)?)
}

fn check_cover(a: &AffineGeometry, e: &OvoidGeometry, gamma: &Morphism) -> Result<()> {
    let rep = validate_morphism(&a.geometry, &e.geometry, gamma);
    if !rep.is_cover {
        return Err(Error::InvalidArgument(format!("not a cover: {:?}", rep.violations.first())));
    }
    Ok(())
}

/// The automorphism `α` of `E` with `γ = α ∘ π`, defined by `α(π(x)) = γ(x)`
/// and checked to be well defined on every fiber.
pub fn lower_decompose(a: &AffineGeometry, e: &OvoidGeometry, pi: &Morphism, gamma: &Morphism) -> Result<GroupElement> {
    check_cover(a, e, gamma)?;
    let fill = |n: usize, src: &[u32], dst: &[u32], what: &str| -> Result<Vec<u32>> {
        let mut out = vec![u32::MAX; n];
        for (x, (&p, &g)) in src.iter().zip(dst).enumerate() {
            let slot = &mut out[p as usize];
            if *slot != u32::MAX && *slot != g {
                return Err(Error::Structure(format!("{what} fiber of {p} is sent to {} and {g} (via {x})", *slot)));
            }
            *slot = g;
        }
        if out.contains(&u32::MAX) {
            return Err(Error::Structure(format!("projection misses a {what}")));
        }
        Ok(out)
    };
    let points = fill(e.geometry.num_points(), &pi.point_map, &gamma.point_map, "point")?;
    let lines = fill(e.geometry.num_lines(), &pi.line_map, &gamma.line_map, "line")?;
    let alpha = GroupElement::new(&e.geometry, points, lines)?;
    let agrees = pi.point_map.iter().zip(&gamma.point_map).all(|(&p, &g)| alpha.points.apply(p) == g)
        && pi.line_map.iter().zip(&gamma.line_map).all(|(&l, &g)| alpha.lines.apply(l) == g);
    if !agrees {
        return Err(Error::Structure("γ differs from α ∘ π".into()));
    }
    Ok(alpha)
}

/// An automorphism of `Q` read off a cover, in local ids of `view`.
#[derive(Clone, Debug)]
pub struct BaseAutomorphism {
    pub element: GroupElement,
    /// Whether it fixes the parent's line at infinity, when that line is in `Q`.
    pub fixes_infinity: Option<bool>,
}

/// `ᾱ`: each point `u` of `Q` goes to the common point of the rosettes that
/// `γ` assigns to the lines of `A` through `u`.
pub fn derive_base_automorphism(
    q: &SubGQHandle,
    view: &LocalView,
    a: &AffineGeometry,
    e: &OvoidGeometry,
    gamma: &Morphism,
) -> Result<BaseAutomorphism> {
    check_cover(a, e, gamma)?;
    let n = view.geometry.num_points();
    let mut zeta = vec![u32::MAX; n];
    for (l, &u) in a.base.iter().enumerate() {
        let img = e.rosette_base[gamma.line_map[l] as usize];
        let (lu, limg) = match (view.local_point(u), view.local_point(img)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::Structure(format!("base point {u} or {img} outside the subquadrangle"))),
        };
        let slot = &mut zeta[lu as usize];
        if *slot != u32::MAX && *slot != limg {
            return Err(Error::Structure(format!("point {u} is sent to two points")));
        }
        *slot = limg;
    }
    if zeta.contains(&u32::MAX) {
        return Err(Error::Structure("a point of the subquadrangle is on no affine line".into()));
    }
    let element = GroupElement::from_point_perm(&view.geometry, zeta)?;
    let fixes_infinity = q.infinity.and_then(|l| view.local_line(l)).map(|l| element.fixes_line(l));
    Ok(BaseAutomorphism { element, fixes_infinity })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtensionChoice {
    /// The anchor point goes to the smaller-numbered subtender of its image ovoid.
    First,
    Second,
}

/// An extension of `ᾱ` to an automorphism of `Γ` stabilizing `Q`. The
/// smallest exterior point `z` goes to one of the two subtenders of
/// `ᾱ(O(z))`; everything else is forced by propagation.
pub fn extend_base_automorphism(
    g: &Geometry,
    q: &SubGQHandle,
    view: &LocalView,
    abar: &GroupElement,
    choice: ExtensionChoice,
) -> Result<GroupElement> {
    if let Some(inf) = q.infinity.and_then(|l| view.local_line(l)) {
        if !abar.fixes_line(inf) {
            return Err(Error::InvalidArgument("the base automorphism moves the line at infinity".into()));
        }
    }
    let z = (0..g.num_points() as u32)
        .find(|&p| !q.contains(p))
        .ok_or_else(|| Error::Structure("no exterior point".into()))?;
    let o = subtended_ovoid(g, q, z)?;
    let mut image: Vec<u32> =
        o.points.iter().map(|&p| view.points[abar.points.apply(view.local_point(p).unwrap()) as usize]).collect();
    image.sort_unstable();
    let target = Ovoid { points: image, subtenders: Vec::new(), special: None };
    let (theta, subs) = subtension_multiplicity(g, q, &target);
    if theta != 2 {
        return Err(Error::InvalidArgument(format!("image ovoid is subtended {theta} times, not twice")));
    }
    let z_img = match choice {
        ExtensionChoice::First => subs[0],
        ExtensionChoice::Second => subs[1],
    };
    let mut ext = Extender::new(g, g);
    for (i, &p) in view.points.iter().enumerate() {
        ext.set_point(p, view.points[abar.points.apply(i as u32) as usize]);
    }
    for (i, &l) in view.lines.iter().enumerate() {
        ext.set_line(l, view.lines[abar.lines.apply(i as u32) as usize]);
    }
    ext.set_point(z, z_img);
    let tilde = close(ext)?.ok_or_else(|| Error::Contradiction("the seeded map does not extend".into()))?;
    let restricts = view
        .points
        .iter()
        .enumerate()
        .all(|(i, &p)| tilde.points.apply(p) == view.points[abar.points.apply(i as u32) as usize]);
    if !restricts || !tilde.is_automorphism(g) {
        return Err(Error::Contradiction("extension does not restrict to the base automorphism".into()));
    }
    Ok(tilde)
}

fn close(mut ext: Extender<'_>) -> Result<Option<GroupElement>> {
    if !ext.propagate() {
        return Err(Error::Contradiction(ext.conflict().unwrap_or("conflict").to_string()));
    }
    if ext.is_complete() {
        return Ok(ext.to_group_element());
    }
    let out = ext.search(1, NODE_LIMIT);
    Ok(out.solutions.into_iter().next().and_then(|m| {
        Some(GroupElement { points: Perm::from_vec(m.point_map).ok()?, lines: Perm::from_vec(m.line_map).ok()? })
    }))
}

/// The map fixing `Q` pointwise and exchanging the two subtenders of each
/// ovoid in `ovoids`, which must cover every exterior point.
pub fn swap_involution(g: &Geometry, q: &SubGQHandle, ovoids: &[Ovoid]) -> Result<GroupElement> {
    let mut points: Vec<u32> = (0..g.num_points() as u32).collect();
    let mut moved = 0;
    for o in ovoids {
        let [x, y] = o.subtenders[..] else {
            return Err(Error::InvalidArgument(format!("ovoid has {} subtenders, not 2", o.subtenders.len())));
        };
        points[x as usize] = y;
        points[y as usize] = x;
        moved += 2;
    }
    if moved != g.num_points() - q.sub.point_set().count() {
        return Err(Error::InvalidArgument("ovoids do not cover the exterior".into()));
    }
    let e = GroupElement::from_point_perm(g, points)?;
    if !e.then(&e).is_identity() {
        return Err(Error::Structure("swap is not an involution".into()));
    }
    Ok(e)
}

/// Whether fixing `Q` pointwise and the exterior point `x` forces the identity.
pub fn pointwise_rigidity(g: &Geometry, q: &SubGQHandle, x: u32) -> Result<bool> {
    if q.contains(x) {
        return Err(Error::InsideSubgeometry(x));
    }
    let mut ext = Extender::new(g, g);
    for p in q.points() {
        ext.set_point(p, p);
    }
    ext.set_point(x, x);
    if !ext.propagate() {
        return Ok(false);
    }
    if ext.is_complete() {
        return Ok(ext.to_group_element().is_some_and(|e| e.is_identity()));
    }
    let out = ext.search(2, NODE_LIMIT);
    Ok(out.exhausted && out.solutions.len() == 1)
}

/// `γ = π ∘ α̃` on every point and line of `A`.
pub fn is_higher_decomposition(a: &AffineGeometry, pi: &Morphism, gamma: &Morphism, tilde: &GroupElement) -> bool {
    cover_from_automorphism(a, pi, tilde).is_ok_and(|m| &m == gamma)
}

/// Both factorizations of a cover.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub alpha: GroupElement,
    pub base: BaseAutomorphism,
    pub extensions: [GroupElement; 2],
    pub higher_holds: [bool; 2],
}

pub fn decompose(
    g: &Geometry,
    q: &SubGQHandle,
    view: &LocalView,
    a: &AffineGeometry,
    e: &OvoidGeometry,
    pi: &Morphism,
    gamma: &Morphism,
) -> Result<DecompositionResult> {
    let alpha = lower_decompose(a, e, pi, gamma)?;
    let base = derive_base_automorphism(q, view, a, e, gamma)?;
    let first = extend_base_automorphism(g, q, view, &base.element, ExtensionChoice::First)?;
    let second = extend_base_automorphism(g, q, view, &base.element, ExtensionChoice::Second)?;
    let higher_holds = [is_higher_decomposition(a, pi, gamma, &first), is_higher_decomposition(a, pi, gamma, &second)];
    Ok(DecompositionResult { alpha, base, extensions: [first, second], higher_holds })
}

/// Closed-form automorphism group orders around an order-`s` subquadrangle
/// `S′` of a Kantor–Knuth quadrangle `S` of order `(s, s²)`, `s = p^h`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderAudit {
    pub s: u64,
    pub h: u64,
    /// 4 when `σ² = 1`, else 2.
    pub delta: u64,
    /// `(s + 1)(s − 1)²s⁶hδ`.
    pub aut_s: u64,
    /// `|Aut S| / 2s²`.
    pub aut_a: u64,
    /// `|Aut A| / 2`.
    pub aut_e: u64,
    /// `hs⁴(s − 1)(s² − 1)`.
    pub line_stabilizer_formula: u64,
    pub line_stabilizer_measured: Option<u64>,
    pub measured_matches: Option<bool>,
    pub aut_a_is_twice_aut_e: bool,
    /// `Aut(E)` and `Aut(S′)_L` have equal order.
    pub aut_e_equals_line_stabilizer: bool,
    /// `2|Aut(E)| = |Aut(S′)_L|`.
    pub twice_aut_e_equals_line_stabilizer: bool,
}

pub fn t8_order_audit(
    s: u64,
    h: u64,
    sigma_squared_is_identity: bool,
    measured_line_stabilizer: Option<u64>,
) -> OrderAudit {
    let delta = if sigma_squared_is_identity { 4 } else { 2 };
    let aut_s = (s + 1) * (s - 1) * (s - 1) * s.pow(6) * h * delta;
    let aut_a = aut_s / (2 * s * s);
    let aut_e = aut_a / 2;
    let line_stabilizer_formula = h * s.pow(4) * (s - 1) * (s * s - 1);
    OrderAudit {
        s,
        h,
        delta,
        aut_s,
        aut_a,
        aut_e,
        line_stabilizer_formula,
        line_stabilizer_measured: measured_line_stabilizer,
        measured_matches: measured_line_stabilizer.map(|m| m == line_stabilizer_formula),
        aut_a_is_twice_aut_e: aut_a == 2 * aut_e && aut_a == (s - 1).pow(2) * (s + 1) * s.pow(4) * h * delta / 2,
        aut_e_equals_line_stabilizer: aut_e == line_stabilizer_formula,
        twice_aut_e_equals_line_stabilizer: 2 * aut_e == line_stabilizer_formula,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_elliptic, parabolic_section};
    use crate::galois::Field;
    use crate::subtension::classical_automorphisms;

    struct Pair {
        g: Geometry,
        q: SubGQHandle,
        view: LocalView,
        a: AffineGeometry,
        e: OvoidGeometry,
        pi: Morphism,
    }

    fn q53_pair() -> Pair {
        let f = Field::new(3, 1).unwrap();
        let (g, model) = build_elliptic(&f).unwrap();
        let sec = parabolic_section(&g, &model);
        let q = SubGQHandle::from_points(&g, sec.point_set().clone(), None).unwrap();
        let view = q.view(&g);
        let a = build_affine(&g, &q).unwrap();
        let (e, pi) = build_ovoid_geometry(&g, &q, &a).unwrap();
        Pair { g, q, view, a, e, pi }
    }

    #[test]
    fn classical_pair_geometries() {
        let p = q53_pair();
        assert_eq!(p.a.geometry.num_points(), 72);
        assert_eq!(p.a.geometry.uniform_line_size(), Some(3));
        assert_eq!(p.a.geometry.uniform_point_degree(), Some(10));
        assert_eq!(p.e.geometry.num_points(), 36);
        let rep = check_projection(&p.a, &p.e, &p.pi);
        assert!(rep.is_cover && rep.surjective);
        assert_eq!(rep.theta, Some(2));
        let t3 = check_t3_parameters(&p.e.geometry, 3, 9, 3, 2);
        assert!(t3.hypotheses_hold && t3.matches, "{t3:?}");
        assert_eq!(t3.measured, Some((2, 9, 2, 12)));
        let gated = check_t3_parameters(&p.e.geometry, 3, 9, 3, 1);
        assert!(!gated.hypotheses_hold && gated.spg.is_none());
    }

    #[test]
    fn identity_cover_decomposes_trivially() {
        let p = q53_pair();
        let alpha = lower_decompose(&p.a, &p.e, &p.pi, &p.pi).unwrap();
        assert!(alpha.is_identity());
        let base = derive_base_automorphism(&p.q, &p.view, &p.a, &p.e, &p.pi).unwrap();
        assert!(base.element.is_identity());
        assert_eq!(base.fixes_infinity, None);
        let first = extend_base_automorphism(&p.g, &p.q, &p.view, &base.element, ExtensionChoice::First).unwrap();
        let second = extend_base_automorphism(&p.g, &p.q, &p.view, &base.element, ExtensionChoice::Second).unwrap();
        let swap = swap_involution(&p.g, &p.q, &p.e.ovoids).unwrap();
        assert!(first.is_identity());
        assert_eq!(second, swap);
        assert!(p.q.points().iter().all(|&x| swap.fixes_point(x)));
        assert_eq!(swap.points.cycle_type().iter().filter(|&&c| c == 2).count(), 36);
        assert!(pointwise_rigidity(&p.g, &p.q, p.a.points[5]).unwrap());
    }

    #[test]
    fn covers_from_extended_automorphisms() {
        let p = q53_pair();
        let f = Field::new(3, 1).unwrap();
        let aut = classical_automorphisms(&p.view.geometry, &f).unwrap();
        let swap = swap_involution(&p.g, &p.q, &p.e.ovoids).unwrap();
        for abar in aut.gens().iter().take(4) {
            let first = extend_base_automorphism(&p.g, &p.q, &p.view, abar, ExtensionChoice::First).unwrap();
            let second = extend_base_automorphism(&p.g, &p.q, &p.view, abar, ExtensionChoice::Second).unwrap();
            assert_eq!(second, swap.then(&first));
            let gamma = cover_from_automorphism(&p.a, &p.pi, &first).unwrap();
            let r = decompose(&p.g, &p.q, &p.view, &p.a, &p.e, &p.pi, &gamma).unwrap();
            assert_eq!(&r.base.element, abar);
            assert_eq!(r.higher_holds, [true, true]);
            // α on E from the action on ovoid point sets.
            let index: HashMap<&[u32], u32> =
                p.e.ovoids.iter().enumerate().map(|(i, o)| (o.points.as_slice(), i as u32)).collect();
            for (i, o) in p.e.ovoids.iter().enumerate() {
                let mut img: Vec<u32> = o.points.iter().map(|&x| first.points.apply(x)).collect();
                img.sort_unstable();
                assert_eq!(r.alpha.points.apply(i as u32), index[img.as_slice()]);
            }
        }
    }

    #[test]
    fn non_cover_is_rejected() {
        let p = q53_pair();
        let mut bad = p.pi.clone();
        let other = *p.pi.point_map.iter().find(|&&o| o != p.pi.point_map[0]).unwrap();
        bad.point_map[0] = other;
        assert!(lower_decompose(&p.a, &p.e, &p.pi, &bad).is_err());
    }

    #[test]
    fn order_audit_identities() {
        let a = t8_order_audit(9, 2, true, Some(8_398_080));
        assert_eq!(a.aut_s, 2_720_977_920);
        assert_eq!(a.aut_a, 16_796_160);
        assert_eq!(a.line_stabilizer_formula, 8_398_080);
        assert!(a.aut_e_equals_line_stabilizer && a.aut_a_is_twice_aut_e && a.measured_matches == Some(true));
        let b = t8_order_audit(27, 3, false, None);
        assert!(b.twice_aut_e_equals_line_stabilizer && !b.aut_e_equals_line_stabilizer);
    }
}
