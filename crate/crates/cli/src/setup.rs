use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use gq_core::constructions::{
    build_elliptic, build_kantor_knuth, build_parabolic, build_tits_t2, standard_conic, CosetModel, QuadricModel,
    TitsModel,
};
use gq_core::galois::{Fe, Field};
use gq_core::incidence::Geometry;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Kantor–Knuth quadrangle of order (q, q²) from the coset model.
    Kk,
    /// Q(4,q).
    Parabolic,
    /// Q(5,q).
    Elliptic,
    /// T₂(O) for the standard conic.
    Tits,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value = "kk")]
    pub model: ModelKind,
    /// Field order; overridden by --p/--h.
    #[arg(long, default_value_t = 9)]
    pub q: u32,
    #[arg(long, requires = "h")]
    pub p: Option<u32>,
    #[arg(long, requires = "p")]
    pub h: Option<u32>,
    /// Exponent k of the field automorphism x ↦ x^(p^k) in the Kantor–Knuth model.
    #[arg(long, default_value_t = 1)]
    pub sigma: u32,
    /// Index of the Kantor–Knuth parameter m; defaults to the first nonsquare.
    #[arg(long)]
    pub m: Option<u16>,
}

pub enum Model {
    Kk(CosetModel),
    Quadric(QuadricModel),
    Tits(TitsModel),
}

pub struct Built {
    pub geometry: Geometry,
    pub model: Model,
}

impl GeometryArgs {
    pub fn field(&self) -> Result<Field> {
        let (p, h) = match (self.p, self.h) {
            (Some(p), Some(h)) => (p, h),
            _ => prime_power(self.q).ok_or_else(|| anyhow!("q = {} is not a prime power", self.q))?,
        };
        Ok(Field::new(p, h)?)
    }

    pub fn coset_model(&self) -> Result<CosetModel> {
        let f = self.field()?;
        let sigma = f.frobenius_power(self.sigma % f.h())?;
        let m = match self.m {
            Some(i) if (i as usize) < f.order() => Fe(i),
            Some(i) => bail!("m index {i} outside the field"),
            None => f.find_nonsquare()?,
        };
        Ok(CosetModel::new_unchecked(&f, &sigma, m)?)
    }

    /// Whether σ is the identity; only meaningful for the Kantor–Knuth model.
    pub fn sigma_is_identity(&self) -> Result<bool> {
        let f = self.field()?;
        Ok(self.sigma % f.h() == 0)
    }

    pub fn expected_order(&self) -> Result<(usize, usize)> {
        let q = self.field()?.order();
        Ok(match self.model {
            ModelKind::Parabolic => (q, q),
            ModelKind::Kk | ModelKind::Elliptic | ModelKind::Tits => (q, q * q),
        })
    }

    pub fn build(&self) -> Result<Built> {
        let f = self.field()?;
        let (geometry, model) = match self.model {
            ModelKind::Kk => {
                let cm = self.coset_model()?;
                let (g, cm) = build_kantor_knuth(&cm.field, &cm.sigma, cm.m)?;
                (g, Model::Kk(cm))
            }
            ModelKind::Parabolic => {
                let (g, m) = build_parabolic(&f)?;
                (g, Model::Quadric(m))
            }
            ModelKind::Elliptic => {
                let (g, m) = build_elliptic(&f)?;
                (g, Model::Quadric(m))
            }
            ModelKind::Tits => {
                let (g, m) = build_tits_t2(&f, &standard_conic(&f))?;
                (g, Model::Tits(m))
            }
        };
        Ok(Built { geometry, model })
    }

    pub fn build_kk(&self) -> Result<(Geometry, CosetModel)> {
        if self.model != ModelKind::Kk {
            bail!("this command needs --model kk");
        }
        let cm = self.coset_model()?;
        Ok(build_kantor_knuth(&cm.field, &cm.sigma, cm.m)?)
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut h) = (q, 0);
    while r % p == 0 {
        r /= p;
        h += 1;
    }
    (r == 1).then_some((p, h))
}

fn fe(f: &Field, a: Fe) -> String {
    f.coeffs(a).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Key-value description of the model behind a built geometry. Field
/// elements are written as coefficient lists, lowest degree first;
/// `modulus_low` lists the coefficients of the monic modulus below `x^h`.
pub fn sidecar(built: &Built) -> Result<String> {
    let mut s = String::new();
    let field = match &built.model {
        Model::Kk(cm) => &cm.field,
        Model::Quadric(m) => &m.field,
        Model::Tits(m) => &m.field,
    };
    let modulus = field.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let kind = match &built.model {
        Model::Kk(_) => "kantor-knuth",
        Model::Quadric(m) => match m.dim {
            4 => "parabolic",
            _ => "elliptic",
        },
        Model::Tits(_) => "tits-t2",
    };
    writeln!(s, "model = {kind}")?;
    writeln!(s, "p = {}", field.p())?;
    writeln!(s, "h = {}", field.h())?;
    writeln!(s, "modulus_low = {modulus}")?;
    writeln!(s, "points = {}", built.geometry.num_points())?;
    writeln!(s, "lines = {}", built.geometry.num_lines())?;
    match &built.model {
        Model::Kk(cm) => {
            writeln!(s, "sigma_exponent = {}", cm.sigma.exponent())?;
            writeln!(s, "m = {}", fe(field, cm.m))?;
            writeln!(s, "infinity_line = {}", cm.infinity_line())?;
        }
        Model::Quadric(m) => {
            writeln!(s, "dimension = {}", m.dim)?;
            for &(i, j, c) in &m.form {
                writeln!(s, "form_term = {i} {j} {}", fe(field, c))?;
            }
            if let Some(n) = m.nonsquare {
                writeln!(s, "nonsquare = {}", fe(field, n))?;
            }
        }
        Model::Tits(m) => {
            for x in &m.oval {
                writeln!(s, "oval_point = {}", x.iter().map(|&c| fe(field, c)).collect::<Vec<_>>().join(" , "))?;
            }
            writeln!(s, "infinity_point = {}", m.infinity_point())?;
        }
    }
    Ok(s)
}

pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad generator index {t:?}")))
        .collect()
}

pub fn read_map(path: &std::path::Path) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split_whitespace()
        .map(|t| t.parse::<u32>().with_context(|| format!("{}: bad id {t:?}", path.display())))
        .collect()
}

pub fn write_map(path: &std::path::Path, map: &[u32]) -> Result<()> {
    let mut s = String::with_capacity(map.len() * 6);
    for x in map {
        writeln!(s, "{x}")?;
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn words() {
        assert_eq!(parse_word("0, 3,12").unwrap(), vec![0, 3, 12]);
        assert!(parse_word("1,x").is_err());
    }
}
