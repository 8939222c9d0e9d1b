//! `gqtool`: build quadrangles, run verification suites and write JSON reports.

mod report;
mod setup;
mod suites;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gq_core::coverings::decompose;
use gq_core::incidence::{read_geometry, validate_gq_with, validate_morphism, write_geometry, GqCheckMode, Morphism};
use gq_core::permgroups::translation_group;
use gq_core::subtension::{
    special_line_analysis, subtended_ovoid, subtension_multiplicity, translation_ovoid_certificate, OmegaClass,
};
use serde_json::{json, Value};

use report::Report;
use setup::GeometryArgs;
use suites::{kk_context, run_suite, stabilizing_generators, sub_context, word_element, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "gqtool", version, about = "Generalized quadrangle constructions and checks")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "GQ_WORKERS")]
    workers: Option<usize>,
    /// Seed for every sampled step.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Force full scans where a sampled mode exists.
    #[arg(long, global = true)]
    exhaustive: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a geometry; writes the canonical file and a `.model` sidecar.
    Build {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Number of sampled objects for sampled suites.
        #[arg(long)]
        samples: Option<usize>,
        /// Ovoids sampled per subGQ when classifying the census.
        #[arg(long, default_value_t = 20)]
        census_samples: usize,
    },
    /// List the order-q subquadrangles through the line at infinity.
    EnumerateSubgqs {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Also classify the lines through each sample ovoid's special point.
        #[arg(long)]
        special_lines: bool,
        #[arg(long, default_value_t = 20)]
        census_samples: usize,
    },
    /// Report on the ovoid subtended by an exterior point.
    OvoidReport {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        target: SubTarget,
        /// Exterior point; defaults to the first one.
        #[arg(long)]
        point: Option<u32>,
        /// Also build the translation certificate.
        #[arg(long)]
        translation: bool,
    },
    /// Decompose a cover of E by A.
    Decompose {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        target: SubTarget,
        #[command(flatten)]
        input: CoverInput,
        /// Write the cover used as PREFIX.points and PREFIX.lines.
        #[arg(long)]
        write_cover: Option<PathBuf>,
    },
    /// Write a geometry in the canonical format.
    Export {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a geometry in the canonical format and validate it.
    Import { input: PathBuf },
}

#[derive(Args)]
struct SubTarget {
    /// Census index of the subquadrangle; defaults to the first doubly subtended one.
    #[arg(long)]
    subgq: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct CoverInput {
    /// File of E point ids, one per point of A.
    #[arg(long, requires = "lines", conflicts_with = "word")]
    points: Option<PathBuf>,
    /// File of E line ids, one per line of A.
    #[arg(long, requires = "points", conflicts_with = "word")]
    lines: Option<PathBuf>,
    /// Comma-separated indices into the subGQ-stabilizing coset-model generators; the cover is π ∘ g.
    #[arg(long)]
    word: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn gq_mode(cli: &Cli) -> GqCheckMode {
    if cli.exhaustive {
        GqCheckMode::Exhaustive
    } else {
        GqCheckMode::Auto { samples: 2_000_000, seed: cli.seed }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().context("worker pool")?;
    let (name, suite, config) = match &cli.command {
        Command::Build { geometry, .. } => ("build", None, json!(geometry)),
        Command::Verify { suite, geometry, samples, census_samples } => (
            "verify",
            Some(suite.name()),
            json!({"geometry": geometry, "samples": samples, "census_samples": census_samples}),
        ),
        Command::EnumerateSubgqs { geometry, special_lines, .. } => {
            ("enumerate-subgqs", None, json!({"geometry": geometry, "special_lines": special_lines}))
        }
        Command::OvoidReport { geometry, target, point, translation } => (
            "ovoid-report",
            None,
            json!({"geometry": geometry, "subgq": target.subgq, "point": point, "translation": translation}),
        ),
        Command::Decompose { geometry, target, input, .. } => (
            "decompose",
            None,
            json!({"geometry": geometry, "subgq": target.subgq, "word": input.word, "points": input.points, "lines": input.lines}),
        ),
        Command::Export { geometry, .. } => ("export", None, json!(geometry)),
        Command::Import { input } => ("import", None, json!({"input": input})),
    };
    let mut config = config;
    config["exhaustive"] = json!(cli.exhaustive);
    let mut r = Report::new(name, suite.as_deref(), config, cli.seed, workers);
    match &cli.command {
        Command::Build { geometry, out } => build(geometry, out, &mut r)?,
        Command::Verify { suite, geometry, samples, census_samples } => {
            let cfg = SuiteConfig {
                geometry: geometry.clone(),
                exhaustive: cli.exhaustive,
                seed: cli.seed,
                samples: *samples,
                census_samples: *census_samples,
            };
            run_suite(*suite, &cfg, &mut r)?;
        }
        Command::EnumerateSubgqs { geometry, special_lines, census_samples } => {
            enumerate(geometry, *special_lines, *census_samples, cli.seed, &mut r)?
        }
        Command::OvoidReport { geometry, target, point, translation } => {
            ovoid_report(geometry, target.subgq, *point, *translation, cli.seed, &mut r)?
        }
        Command::Decompose { geometry, target, input, write_cover } => {
            decompose_cmd(geometry, target.subgq, input, write_cover.as_ref(), cli.seed, &mut r)?
        }
        Command::Export { geometry, out } => {
            let built = r.time("build", || geometry.build())?;
            match out {
                Some(path) => {
                    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                    write_geometry(&built.geometry, BufWriter::new(f))?;
                }
                None => {
                    write_geometry(&built.geometry, std::io::stdout().lock())?;
                    return Ok(true);
                }
            }
            r.set("points", json!(built.geometry.num_points()));
            r.set("lines", json!(built.geometry.num_lines()));
        }
        Command::Import { input } => {
            let f = File::open(input).with_context(|| format!("opening {}", input.display()))?;
            let g = r.time("read", || read_geometry(BufReader::new(f)))?;
            let rep = r.time("validate", || validate_gq_with(&g, gq_mode(&cli)));
            r.set("points", json!(g.num_points()));
            r.set("lines", json!(g.num_lines()));
            r.set("is_gq", json!(rep.is_gq));
            r.set("order", json!(rep.order()));
        }
    }
    emit(&r, cli.report.as_ref())?;
    Ok(r.passed)
}

fn emit(r: &Report, path: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(r)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn build(geometry: &GeometryArgs, out: &PathBuf, r: &mut Report) -> Result<()> {
    let built = r.time("build", || geometry.build())?;
    let f = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_geometry(&built.geometry, BufWriter::new(f))?;
    let sidecar = out.with_extension("model");
    std::fs::write(&sidecar, setup::sidecar(&built)?).with_context(|| format!("writing {}", sidecar.display()))?;
    r.set("geometry", json!(out));
    r.set("model", json!(sidecar));
    r.set("points", json!(built.geometry.num_points()));
    r.set("lines", json!(built.geometry.num_lines()));
    Ok(())
}

fn census_config(geometry: &GeometryArgs, census_samples: usize, seed: u64) -> SuiteConfig {
    SuiteConfig { geometry: geometry.clone(), exhaustive: false, seed, samples: None, census_samples }
}

fn enumerate(
    geometry: &GeometryArgs,
    special_lines: bool,
    census_samples: usize,
    seed: u64,
    r: &mut Report,
) -> Result<()> {
    let kk = kk_context(&census_config(geometry, census_samples, seed), r)?;
    let mut rows = Vec::new();
    r.time("sample ovoids", || -> Result<()> {
        for (i, h) in kk.census.subgqs.iter().enumerate() {
            let x = *h.exterior(&kk.g).first().ok_or_else(|| anyhow!("subGQ {i} has no exterior point"))?;
            let o = subtended_ovoid(&kk.g, h, x)?;
            let (mult, _) = subtension_multiplicity(&kk.g, h, &o);
            let classes = if special_lines {
                let view = h.view(&kk.g);
                let ol = view.local_set(&o.points).ok_or_else(|| anyhow!("ovoid leaves subGQ {i}"))?;
                let u = o
                    .special
                    .and_then(|s| view.local_point(s))
                    .ok_or_else(|| anyhow!("no special point in subGQ {i}"))?;
                let rep = special_line_analysis(&view.geometry, &ol, u)?;
                json!(rep.classes.iter().map(|(k, v)| (k.to_string(), v.len())).collect::<BTreeMap<_, _>>())
            } else {
                Value::Null
            };
            rows.push(json!({
                "subgq_id": i,
                "class": h.class,
                "sample_ovoid_size": o.points.len(),
                "multiplicity": mult,
                "special_line_classes": classes,
            }));
        }
        Ok(())
    })?;
    let consistent = rows
        .iter()
        .zip(&kk.census.subgqs)
        .all(|(row, h)| OmegaClass::from_multiplicity(row["multiplicity"].as_u64().unwrap_or(0) as usize) == h.class);
    r.check_true("class_matches_sample", "sample ovoid multiplicity agrees with the census class", consistent);
    r.set("grids", json!(kk.census.grids));
    r.set("subgqs", json!(rows));
    Ok(())
}

fn ovoid_report(
    geometry: &GeometryArgs,
    subgq: Option<usize>,
    point: Option<u32>,
    translation: bool,
    seed: u64,
    r: &mut Report,
) -> Result<()> {
    let kk = kk_context(&census_config(geometry, 20, seed), r)?;
    let sub = sub_context(&kk, subgq, OmegaClass::Omega1, r)?;
    let x = match point {
        Some(x) if !sub.q.contains(x) && (x as usize) < kk.g.num_points() => x,
        Some(x) => bail!("point {x} is not exterior to subGQ {}", sub.index),
        None => sub.a.points[0],
    };
    let o = subtended_ovoid(&kk.g, &sub.q, x)?;
    let (mult, subtenders) = subtension_multiplicity(&kk.g, &sub.q, &o);
    r.check_true("ovoid_size", "subtended ovoid has q²+1 points", o.points.len() == kk.cm.q() * kk.cm.q() + 1);
    r.check(
        "multiplicity_class",
        "multiplicity matches the census class",
        sub.q.class,
        OmegaClass::from_multiplicity(mult),
    );
    r.set("subgq_id", json!(sub.index));
    r.set("point", json!(x));
    r.set("ovoid", json!(o.points));
    r.set("subtenders", json!(subtenders));
    r.set("special_point", json!(o.special));
    if let Some(special) = o.special {
        let ol = sub.view.local_set(&o.points).ok_or_else(|| anyhow!("ovoid leaves the subGQ"))?;
        let u = sub.view.local_point(special).ok_or_else(|| anyhow!("special point outside the subGQ"))?;
        let rep = r.time("special lines", || special_line_analysis(&sub.view.geometry, &ol, u))?;
        let classes: BTreeMap<String, usize> = rep.classes.iter().map(|(k, v)| (k.to_string(), v.len())).collect();
        r.set("special_line_classes", json!(classes));
        r.set("u1", json!(rep.u1.iter().map(|&l| sub.view.lines[l as usize]).collect::<Vec<_>>()));
    }
    if translation {
        let omega = *kk
            .g
            .points_on(kk.cm.infinity_line())
            .iter()
            .find(|&&p| kk.g.collinear(p, x))
            .ok_or_else(|| anyhow!("no point of [∞] collinear with {x}"))?;
        let t = r.time("translation group", || translation_group(&kk.g, &kk.cm, omega))?;
        let cert = translation_ovoid_certificate(&kk.g, &kk.cm, &sub.q, &o, x, &t)?;
        r.check_true("translation", "the ovoid is a translation ovoid", cert.valid());
        r.set("translation", json!(cert));
    }
    Ok(())
}

fn decompose_cmd(
    geometry: &GeometryArgs,
    subgq: Option<usize>,
    input: &CoverInput,
    write_cover: Option<&PathBuf>,
    seed: u64,
    r: &mut Report,
) -> Result<()> {
    let kk = kk_context(&census_config(geometry, 20, seed), r)?;
    let sub = sub_context(&kk, subgq, OmegaClass::Omega1, r)?;
    let gamma = match (&input.points, &input.lines, &input.word) {
        (Some(p), Some(l), None) => Morphism { point_map: setup::read_map(p)?, line_map: setup::read_map(l)? },
        (None, None, Some(w)) => {
            let gens = stabilizing_generators(&kk, &sub.q)?;
            let x = word_element(&kk.g, &gens, &setup::parse_word(w)?)?;
            gq_core::coverings::cover_from_automorphism(&sub.a, &sub.pi, &x)?
        }
        _ => bail!("give either --points and --lines, or --word"),
    };
    if let Some(prefix) = write_cover {
        setup::write_map(&prefix.with_extension("points"), &gamma.point_map)?;
        setup::write_map(&prefix.with_extension("lines"), &gamma.line_map)?;
    }
    let cover = validate_morphism(&sub.a.geometry, &sub.e.geometry, &gamma);
    r.check_true("is_cover", "input is a cover of E by A", cover.is_cover);
    if !cover.is_cover {
        r.set("cover", json!(cover));
        return Ok(());
    }
    let d = r.time("decompose", || decompose(&kk.g, &sub.q, &sub.view, &sub.a, &sub.e, &sub.pi, &gamma))?;
    r.check("higher", "γ = π ∘ α̃ᵢ for both extensions", [true, true], d.higher_holds);
    r.set(
        "decomposition",
        json!({
            "subgq_id": sub.index,
            "alpha": d.alpha.points.as_slice(),
            "base": d.base.element.points.as_slice(),
            "base_fixes_infinity": d.base.fixes_infinity,
            "extensions": [d.extensions[0].points.as_slice(), d.extensions[1].points.as_slice()],
            "higher_holds": d.higher_holds,
        }),
    );
    Ok(())
}
