//! Axiom checks for generalized quadrangles and semi partial geometries.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::Geometry;
use crate::bitset::{and_count, ones};

/// Cap on the number of witnesses kept in a report.
pub const WITNESS_CAP: usize = 16;

/// Non-incident pair count above which the axiom (b) scan is sampled by default.
pub const EXHAUSTIVE_PAIR_LIMIT: u64 = 500_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parameter {
    Value(usize),
    Irregular,
}

impl Parameter {
    pub fn value(self) -> Option<usize> {
        match self {
            Parameter::Value(v) => Some(v),
            Parameter::Irregular => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GqCheckMode {
    /// Exhaustive up to [`EXHAUSTIVE_PAIR_LIMIT`] pairs, sampled beyond.
    Auto {
        samples: usize,
        seed: u64,
    },
    Exhaustive,
    Sampled {
        samples: usize,
        seed: u64,
    },
}

impl Default for GqCheckMode {
    fn default() -> Self {
        GqCheckMode::Auto { samples: 2_000_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub is_gq: bool,
    pub s: Parameter,
    pub t: Parameter,
    pub exhaustive: bool,
    pub sample_seed: Option<u64>,
    pub pairs_checked: u64,
    pub violations: Vec<String>,
}

impl OrderReport {
    pub fn order(&self) -> Option<(usize, usize)> {
        Some((self.s.value()?, self.t.value()?))
    }
}

struct Witnesses {
    items: Vec<String>,
    total: u64,
}

impl Witnesses {
    fn new() -> Self {
        Witnesses { items: Vec::new(), total: 0 }
    }
    fn push(&mut self, msg: impl FnOnce() -> String) {
        self.total += 1;
        if self.items.len() < WITNESS_CAP {
            self.items.push(msg());
        }
    }
    fn merge(mut self, other: Witnesses) -> Witnesses {
        self.total += other.total;
        for w in other.items {
            if self.items.len() < WITNESS_CAP {
                self.items.push(w);
            }
        }
        self
    }
}

fn degrees(g: &Geometry, w: &mut Witnesses) -> (Parameter, Parameter) {
    let s = match g.uniform_line_size() {
        Some(k) if k >= 2 => Parameter::Value(k - 1),
        Some(k) => {
            w.push(|| format!("lines have {k} points"));
            Parameter::Irregular
        }
        None => {
            w.push(|| "line sizes are not constant".into());
            Parameter::Irregular
        }
    };
    let t = match g.uniform_point_degree() {
        Some(k) if k >= 2 => Parameter::Value(k - 1),
        Some(k) => {
            w.push(|| format!("points lie on {k} lines"));
            Parameter::Irregular
        }
        None => {
            w.push(|| "point degrees are not constant".into());
            Parameter::Irregular
        }
    };
    (s, t)
}

const THROUGH_X: u16 = 0x8000;

/// For point `x`, fills `cnt[L]` with the number of points of `L` other than
/// `x` that are collinear with `x`; lines through `x` carry the `THROUGH_X` bit.
fn neighbour_line_counts(g: &Geometry, x: u32, cnt: &mut [u16]) {
    for &m in g.lines_through(x) {
        cnt[m as usize] = THROUGH_X;
    }
    for y in ones(g.row(x)) {
        if y as u32 != x {
            for &m in g.lines_through(y as u32) {
                cnt[m as usize] += 1;
            }
        }
    }
}

pub fn validate_gq(g: &Geometry) -> OrderReport {
    validate_gq_with(g, GqCheckMode::default())
}

pub fn validate_gq_with(g: &Geometry, mode: GqCheckMode) -> OrderReport {
    let mut w = Witnesses::new();
    let (s, t) = degrees(g, &mut w);
    for &(a, b) in g.repeated_pairs() {
        w.push(|| format!("points {a} and {b} share two lines"));
    }
    let flags: u64 = g.lines().iter().map(|l| l.len() as u64).sum();
    let nonincident = g.num_points() as u64 * g.num_lines() as u64 - flags;
    let (exhaustive, samples, seed) = match mode {
        GqCheckMode::Exhaustive => (true, 0, None),
        GqCheckMode::Auto { samples, seed } => {
            if nonincident <= EXHAUSTIVE_PAIR_LIMIT {
                (true, 0, None)
            } else {
                (false, samples, Some(seed))
            }
        }
        GqCheckMode::Sampled { samples, seed } => (false, samples, Some(seed)),
    };
    let pairs_checked;
    if exhaustive {
        let nl = g.num_lines();
        let axiom_b = (0..g.num_points() as u32)
            .into_par_iter()
            .fold(
                || (vec![0u16; nl], Witnesses::new()),
                |(mut cnt, mut w), x| {
                    neighbour_line_counts(g, x, &mut cnt);
                    for (m, c) in cnt.iter_mut().enumerate() {
                        let k = *c;
                        *c = 0;
                        if k != 1 && k & THROUGH_X == 0 {
                            w.push(|| format!("point {x} is collinear with {k} points of line {m}"));
                        }
                    }
                    (cnt, w)
                },
            )
            .map(|(_, w)| w)
            .reduce(Witnesses::new, Witnesses::merge);
        w = w.merge(axiom_b);
        pairs_checked = nonincident;
    } else {
        let seed = seed.unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = 0;
        while checked < samples as u64 {
            let x = rng.gen_range(0..g.num_points()) as u32;
            let m = rng.gen_range(0..g.num_lines()) as u32;
            if g.incident(x, m) {
                continue;
            }
            checked += 1;
            let row = g.row(x);
            let k = g.points_on(m).iter().filter(|&&p| row[p as usize >> 6] >> (p & 63) & 1 == 1).count();
            if k != 1 {
                w.push(|| format!("point {x} is collinear with {k} points of line {m}"));
            }
        }
        pairs_checked = checked;
    }
    OrderReport { is_gq: w.total == 0, s, t, exhaustive, sample_seed: seed, pairs_checked, violations: w.items }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpgReport {
    pub is_spg: bool,
    pub s_star: Parameter,
    pub t_star: Parameter,
    pub alpha: Option<u32>,
    pub mu: Option<u32>,
    /// Distinct nonzero values of |L ∩ x⊥| over non-incident pairs.
    pub alpha_values: BTreeSet<u32>,
    /// Distinct common-neighbour counts over non-collinear pairs.
    pub mu_values: BTreeSet<u32>,
    /// Non-collinear pairs without common neighbours (axiom (iv) needs μ* > 0).
    pub zero_mu_pairs: u64,
    pub is_partial_quadrangle: bool,
    pub is_partial_geometry: bool,
    pub is_gq: bool,
    pub noncollinear_pairs: u64,
    pub violations: Vec<String>,
}

pub fn validate_spg(g: &Geometry) -> SpgReport {
    let mut w = Witnesses::new();
    let (s, t) = degrees(g, &mut w);
    for &(a, b) in g.repeated_pairs() {
        w.push(|| format!("points {a} and {b} share two lines"));
    }
    let nl = g.num_lines();
    let (alpha_values, zero_seen) = (0..g.num_points() as u32)
        .into_par_iter()
        .fold(
            || (vec![0u16; nl], BTreeSet::new(), false),
            |(mut cnt, mut vals, mut zero), x| {
                neighbour_line_counts(g, x, &mut cnt);
                for c in cnt.iter_mut() {
                    let k = *c as u32;
                    *c = 0;
                    if k & THROUGH_X as u32 == 0 {
                        if k == 0 {
                            zero = true;
                        } else {
                            vals.insert(k);
                        }
                    }
                }
                (cnt, vals, zero)
            },
        )
        .map(|(_, v, z)| (v, z))
        .reduce(
            || (BTreeSet::new(), false),
            |(mut a, za), (b, zb)| {
                a.extend(b);
                (a, za || zb)
            },
        );
    let alpha = if alpha_values.len() == 1 { alpha_values.first().copied() } else { None };
    if alpha_values.len() > 1 {
        w.push(|| format!("axiom (iii): lines meet point perps in {alpha_values:?} points"));
    }

    let n = g.num_points() as u32;
    let (mu_values, zero_mu_pairs, noncollinear) = (0..n)
        .into_par_iter()
        .fold(
            || (BTreeSet::new(), 0u64, 0u64),
            |(mut vals, mut zeros, mut pairs), x| {
                let rx = g.row(x);
                for y in x + 1..n {
                    if rx[y as usize >> 6] >> (y & 63) & 1 == 1 {
                        continue;
                    }
                    pairs += 1;
                    let c = and_count(rx, g.row(y));
                    if c == 0 {
                        zeros += 1;
                    } else {
                        vals.insert(c);
                    }
                }
                (vals, zeros, pairs)
            },
        )
        .reduce(
            || (BTreeSet::new(), 0, 0),
            |(mut a, za, pa), (b, zb, pb)| {
                a.extend(b);
                (a, za + zb, pa + pb)
            },
        );
    let mu = if mu_values.len() == 1 && zero_mu_pairs == 0 { mu_values.first().copied() } else { None };
    if zero_mu_pairs > 0 {
        w.push(|| format!("axiom (iv): {zero_mu_pairs} non-collinear pairs have no common neighbour"));
    }
    if mu_values.len() > 1 {
        w.push(|| format!("axiom (iv): common-neighbour counts {mu_values:?} are not constant"));
    }
    let is_spg = w.total == 0 && alpha.is_some() && (mu.is_some() || noncollinear == 0);
    let is_partial_geometry = is_spg && !zero_seen;
    SpgReport {
        is_spg,
        s_star: s,
        t_star: t,
        alpha,
        mu,
        alpha_values,
        mu_values,
        zero_mu_pairs,
        is_partial_quadrangle: is_spg && alpha == Some(1),
        is_partial_geometry,
        is_gq: is_partial_geometry && alpha == Some(1),
        noncollinear_pairs: noncollinear,
        violations: w.items,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_thin_gqs() {
        let r = validate_gq(&Geometry::grid(4, 4));
        assert!(r.is_gq);
        assert_eq!(r.order(), Some((3, 1)));
        assert!(r.exhaustive);
    }

    #[test]
    fn non_gq_reports_witness() {
        // In a triangle the vertex opposite a side is collinear with both of its points.
        let tri = Geometry::build(vec![vec![0, 1], vec![1, 2], vec![0, 2]], 3).unwrap();
        let r = validate_gq(&tri);
        assert!(!r.is_gq);
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn sampled_mode_records_seed() {
        let r = validate_gq_with(&Geometry::grid(5, 5), GqCheckMode::Sampled { samples: 200, seed: 7 });
        assert!(r.is_gq && !r.exhaustive);
        assert_eq!(r.sample_seed, Some(7));
        assert_eq!(r.pairs_checked, 200);
    }

    #[test]
    fn spg_of_grid() {
        let r = validate_spg(&Geometry::grid(4, 4));
        assert!(r.is_spg && r.is_gq && r.is_partial_geometry && r.is_partial_quadrangle);
        assert_eq!((r.alpha, r.mu), (Some(1), Some(2)));
    }

    #[test]
    fn spg_rejects_repeated_pair() {
        let g = Geometry::build_lenient(vec![vec![0, 1, 2], vec![0, 1, 3]], 4).unwrap();
        let r = validate_spg(&g);
        assert!(!r.is_spg);
        assert!(r.violations.iter().any(|v| v.contains("share two lines")));
    }
}
