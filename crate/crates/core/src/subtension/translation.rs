//! Translation-ovoid certificates from the translation groups of a
//! Kantor–Knuth quadrangle.

use serde::Serialize;

use super::{Ovoid, SubGQHandle};
use crate::constructions::{CosetModel, KkPoint};
use crate::error::{Error, Result};
use crate::incidence::Geometry;
use crate::permgroups::{GenSet, Perm};

/// Evidence that an ovoid is a translation ovoid with respect to `omega`.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationCert {
    pub ovoid: Vec<u32>,
    pub subtender: u32,
    pub omega: u32,
    /// Order of the certifying group.
    pub order: usize,
    /// Every element fixes `omega` and each line of the subquadrangle through it.
    pub fixes_omega_linewise: bool,
    /// The group stabilizes the ovoid and the orbit of one point is `O ∖ {ω}`
    /// with trivial stabilizer.
    pub sharply_transitive: bool,
    /// `omega` is the only point of the ovoid fixed by the whole group.
    pub omega_unique_fixed: bool,
    #[serde(skip)]
    pub group: Vec<Perm>,
}

impl TranslationCert {
    pub fn valid(&self) -> bool {
        self.fixes_omega_linewise && self.sharply_transitive && self.omega_unique_fixed
    }
}

/// Certificate for the ovoid `o` subtended by `e`, using the translation
/// group `translations` about the point of `[∞]` collinear with `e`. The
/// certifying group is the stabilizer of `e` and of `Q` in that group.
pub fn translation_ovoid_certificate(
    g: &Geometry,
    cm: &CosetModel,
    q: &SubGQHandle,
    o: &Ovoid,
    e: u32,
    translations: &GenSet,
) -> Result<TranslationCert> {
    if q.contains(e) {
        return Err(Error::InsideSubgeometry(e));
    }
    let omega = g
        .points_on(cm.infinity_line())
        .iter()
        .copied()
        .find(|&p| g.collinear(p, e))
        .ok_or_else(|| Error::Structure(format!("no point of [∞] collinear with {e}")))?;
    debug_assert!(matches!(cm.point_kind(omega), KkPoint::Symbol { .. }));
    if o.points.binary_search(&omega).is_err() {
        return Err(Error::Certificate(format!("point {omega} of [∞] is not on the ovoid")));
    }
    if !translations.gens().iter().all(|t| t.fixes_linewise(g, omega)) {
        return Err(Error::InvalidArgument("group does not fix the translation point linewise".into()));
    }
    let stab = translations.pointwise_stabilizer(g, &[e]);
    let elements =
        stab.bsgs().elements(1 << 20).ok_or_else(|| Error::Certificate("stabilizer too large to enumerate".into()))?;
    let qs = q.sub.point_set();
    let group: Vec<Perm> =
        elements.into_iter().filter(|t| qs.iter().all(|p| qs.contains(t.apply(p as u32) as usize))).collect();

    let q_lines_at_omega: Vec<u32> = g.lines_through(omega).iter().copied().filter(|&l| q.sub.has_line(l)).collect();
    let fixes_line = |t: &Perm, l: u32| g.points_on(l).iter().all(|&p| g.incident(t.apply(p), l));
    let fixes_omega_linewise =
        group.iter().all(|t| t.apply(omega) == omega && q_lines_at_omega.iter().all(|&l| fixes_line(t, l)));

    let rest: Vec<u32> = o.points.iter().copied().filter(|&p| p != omega).collect();
    let x0 = rest[0];
    let mut images: Vec<u32> = group.iter().map(|t| t.apply(x0)).collect();
    images.sort_unstable();
    let distinct = images.windows(2).all(|w| w[0] != w[1]);
    let stabilizes = group.iter().all(|t| o.points.iter().all(|&p| o.points.binary_search(&t.apply(p)).is_ok()));
    let sharply_transitive = stabilizes && distinct && images == rest;

    let fixed: Vec<u32> = o.points.iter().copied().filter(|&p| group.iter().all(|t| t.apply(p) == p)).collect();
    let omega_unique_fixed = fixed == [omega];
    Ok(TranslationCert {
        ovoid: o.points.clone(),
        subtender: e,
        omega,
        order: group.len(),
        fixes_omega_linewise,
        sharply_transitive,
        omega_unique_fixed,
        group,
    })
}
