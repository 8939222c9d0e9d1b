//! Intrinsic analyses inside one subquadrangle `Q ≅ Q(4,q)`, all in local
//! ids of `Q`: the groups `L_U`, ovoid orbits under them, special lines,
//! the relation `∼ε` and kernel groups.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::incidence::Geometry;
use crate::permgroups::{kernel_homologies, line_symmetries, orbit_with_limit, GenSet, OrbitObject};

/// `L_U`: the group generated by the symmetries about `U` and every line meeting it.
pub fn axis_group(q: &Geometry, u: u32) -> Result<GenSet> {
    let mut axes = vec![u];
    axes.extend(q.concurrent_lines(u).into_iter().filter(|&l| l != u));
    let mut gens = Vec::new();
    for w in axes {
        gens.extend(line_symmetries(q, w)?.gens().iter().cloned());
    }
    Ok(GenSet::trusted(q, gens).pruned(q))
}

fn sorted(v: &[u32]) -> Vec<u32> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// The orbit `O^{L}` of an ovoid, as sorted point lists; `None` beyond `limit` members.
pub fn lu_orbit(lu: &GenSet, ovoid: &[u32], limit: usize) -> Option<Vec<Vec<u32>>> {
    let orb = orbit_with_limit(lu.gens(), &OrbitObject::PointSet(sorted(ovoid)), limit)?;
    Some(
        orb.items
            .into_iter()
            .map(|o| match o {
                OrbitObject::PointSet(v) => v,
                _ => unreachable!(),
            })
            .collect(),
    )
}

/// Lines through the special point of an ovoid, grouped by the size of the
/// ovoid's orbit under `L_U`.
#[derive(Clone, Debug, Serialize)]
pub struct SpecialLineReport {
    pub special_point: u32,
    /// Orbit size to the lines through the special point giving it.
    pub classes: BTreeMap<usize, Vec<u32>>,
    /// Lines with orbit size `(q+1)q²(q−1)/2`.
    pub u1: Vec<u32>,
    /// Lines with orbit size `(q+1)q²(q−1)`.
    pub u2: Vec<u32>,
    /// Orbit sizes matching neither class.
    pub other_sizes: Vec<usize>,
    pub u1_even: bool,
}

/// Orbit sizes of `ovoid` under `L_U` for every line `U` through `u`.
pub fn special_line_analysis(q: &Geometry, ovoid: &[u32], u: u32) -> Result<SpecialLineReport> {
    if !ovoid.contains(&u) {
        return Err(Error::InvalidArgument(format!("point {u} is not on the ovoid")));
    }
    let s = q.uniform_line_size().ok_or_else(|| Error::Structure("lines of unequal size".into()))? - 1;
    let full = (s + 1) * s * s * (s - 1);
    let half = full / 2;
    let mut classes: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for &l in q.lines_through(u) {
        let lu = axis_group(q, l)?;
        let size = lu_orbit(&lu, ovoid, 2 * full + 1).map_or(usize::MAX, |o| o.len());
        classes.entry(size).or_default().push(l);
    }
    let u1 = classes.get(&half).cloned().unwrap_or_default();
    let u2 = classes.get(&full).cloned().unwrap_or_default();
    let other_sizes = classes.keys().copied().filter(|&k| k != half && k != full).collect();
    Ok(SpecialLineReport { special_point: u, u1_even: u1.len() % 2 == 0, classes, u1, u2, other_sizes })
}

/// Classes of `(ovoid, line)` pairs under `∼ε`: equal lines, and ovoids in
/// one orbit of the line's `L_U`.
pub fn epsilon_classes(q: &Geometry, pairs: &[(Vec<u32>, u32)], limit: usize) -> Result<Vec<Vec<usize>>> {
    let mut groups: HashMap<u32, GenSet> = HashMap::new();
    let mut class_of: Vec<Option<usize>> = vec![None; pairs.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..pairs.len() {
        if class_of[i].is_some() {
            continue;
        }
        let (o, u) = &pairs[i];
        if !groups.contains_key(u) {
            groups.insert(*u, axis_group(q, *u)?);
        }
        let orbit =
            lu_orbit(&groups[u], o, limit).ok_or_else(|| Error::InvalidArgument(format!("orbit exceeds {limit}")))?;
        let members: std::collections::HashSet<Vec<u32>> = orbit.into_iter().collect();
        let k = classes.len();
        let mut class = Vec::new();
        for j in i..pairs.len() {
            if class_of[j].is_none() && pairs[j].1 == *u && members.contains(&sorted(&pairs[j].0)) {
                class_of[j] = Some(k);
                class.push(j);
            }
        }
        classes.push(class);
    }
    Ok(classes)
}

/// `H(u,v)`: automorphisms of `q` stabilizing the ovoid and fixing `u` and `v` linewise.
pub fn ovoid_kernel(q: &Geometry, ovoid: &[u32], u: u32, v: u32) -> Result<GenSet> {
    if !ovoid.contains(&u) || !ovoid.contains(&v) || u == v {
        return Err(Error::InvalidArgument("u and v must be distinct points of the ovoid".into()));
    }
    let o = sorted(ovoid);
    let all = kernel_elements(q, u, v)?;
    let keep = all.into_iter().filter(|e| o.iter().all(|&p| o.binary_search(&e.points.apply(p)).is_ok())).collect();
    Ok(GenSet::trusted(q, keep))
}

/// `H(L_U)`: elements of `lu` fixing `u` and `v` linewise.
pub fn hl_kernel(q: &Geometry, lu: &GenSet, u: u32, v: u32) -> Result<GenSet> {
    let all = kernel_elements(q, u, v)?;
    let keep = all.into_iter().filter(|e| lu.contains(e)).collect();
    Ok(GenSet::trusted(q, keep))
}

fn kernel_elements(q: &Geometry, u: u32, v: u32) -> Result<Vec<crate::permgroups::GroupElement>> {
    let k = kernel_homologies(q, u, v)?;
    k.elements(q, 1 << 16).ok_or_else(|| Error::Structure("kernel group unexpectedly large".into()))
}
