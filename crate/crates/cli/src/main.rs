use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dessin::catalog::{
    markdown_report, run_catalog, run_series, series_table, CatalogConfig, RenderConfig, Store,
};
use dessin::dynamics::{classify, CriticalOrbitFate, OrbitConfig};
use dessin::fractal::{
    box_dim, pressure_dim, render_basins, render_escape, uniform_cloud, BasinSpec, BoxConfig,
    PressureConfig, Raster, RasterSpec, Viewport,
};
use dessin::plane_tree::enumerate_trees;
use dessin::shabat::{identify_tree, solve_passport, solve_tree, SZSolution, ShabatError, SolveConfig};
use dessin::{Complex64, Passport, PlaneTree, Poly};

#[derive(Parser)]
#[command(name = "dessin", version, about = "Shabat polynomials of plane trees and their Julia sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List plane trees with a given number of edges, one per color swap.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=14))]
        edges: u32,
    },
    /// Shabat polynomial in Zapponi form for a tree, or all of them for a passport.
    Solve {
        #[command(flatten)]
        source: TreeOrPassport,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Fates of +1 and -1, taxonomy and connectedness.
    Classify {
        #[command(flatten)]
        source: PolySource,
        #[arg(long, value_parser = positive_usize)]
        max_iter: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Escape-time or basin image, PPM or PNG by the extension of --out.
    Render {
        #[command(flatten)]
        source: PolySource,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0,0,2,2")]
        viewport: Viewport,
        #[arg(long, default_value = "400x400", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        max_iter: u32,
        #[arg(long, value_enum, default_value_t = RenderKind::Escape)]
        kind: RenderKind,
        /// Radius of the balls around attractor points (basins only).
        #[arg(long, default_value_t = 0.01, value_parser = positive_f64)]
        trap_radius: f64,
        /// Modulus beyond which a point counts as escaped (basins only).
        #[arg(long, value_parser = positive_f64)]
        escape_cutoff: Option<f64>,
    },
    /// Hausdorff dimension estimate of the Julia set.
    Dim {
        #[command(flatten)]
        source: PolySource,
        #[arg(long, value_enum)]
        method: DimMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 400_000, value_parser = positive_usize)]
        points: usize,
        #[arg(long, value_parser = positive_usize)]
        max_period: Option<usize>,
    },
    /// Analyze every tree with a given number of edges into the store.
    Catalog {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        edges: u32,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Analyze the caterpillars <n,m|2,1,...,1> for a range of n.
    Series {
        #[arg(long, value_parser = positive_usize)]
        m: usize,
        #[arg(long, value_parser = positive_usize)]
        from: usize,
        #[arg(long, value_parser = positive_usize)]
        to: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Markdown table of every record in the store.
    Report {
        #[arg(long, env = "DESSIN_STORE", default_value = "store")]
        store: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TreeOrPassport {
    #[arg(long)]
    tree: Option<String>,
    #[arg(long)]
    passport: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PolySource {
    /// Ascending coefficients, comma separated; entries may be `p/q` or complex `x+yi`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Plane code; the tree's polynomial is solved first.
    #[arg(long)]
    tree: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "DESSIN_STORE", default_value = "store")]
    store: PathBuf,
    #[arg(long, value_parser = positive_usize)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also estimate dimensions (slow).
    #[arg(long)]
    dims: bool,
    /// Render escape and basin images of this size into the store.
    #[arg(long, value_parser = parse_size)]
    size: Option<(usize, usize)>,
    #[arg(long, value_parser = positive_usize)]
    max_iter: Option<usize>,
    /// Recompute records already present.
    #[arg(long)]
    force: bool,
    /// Largest edge count accepted by `catalog`.
    #[arg(long, default_value_t = 8, value_parser = positive_usize)]
    max_edges: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderKind {
    Escape,
    Basins,
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMethod {
    Box,
    Pressure,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    Ok((positive_usize(w)?, positive_usize(h)?))
}

/// Bad user input detected after argument parsing; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_tree(code: &str) -> Result<PlaneTree> {
    code.parse().map_err(|e| usage(format!("--tree {code:?}: {e}")))
}

/// Solves `--tree`, swapping colors first when the passport is not normalized.
fn solve_code(code: &str, seed: u64, out: &mut impl Write) -> Result<SZSolution<f64>> {
    let mut tree = parse_tree(code)?;
    if tree.colored_passport() != tree.passport().0 {
        tree = tree.invert_colors();
        writeln!(out, "colors swapped to normalize the passport: {}", tree.plane_code())?;
    }
    let cfg = SolveConfig {
        rng_seed: seed,
        ..SolveConfig::default()
    };
    Ok(solve_tree(&tree, &cfg)?)
}

fn load_poly(source: &PolySource, out: &mut impl Write) -> Result<Poly> {
    match (&source.poly, &source.tree) {
        (Some(text), _) => {
            let p: Poly = text.parse().map_err(|e| usage(format!("--poly: {e}")))?;
            if p.degree() < 2 {
                return Err(usage("--poly needs degree at least two"));
            }
            Ok(p)
        }
        (None, Some(code)) => Ok(solve_code(code, 0, out)?.poly),
        (None, None) => Err(usage("one of --poly or --tree is required")),
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.12} {:+.12}i", z.re, z.im)
}

fn print_solution(out: &mut impl Write, sol: &SZSolution<f64>) -> Result<()> {
    writeln!(out, "degree {}", sol.degree())?;
    for (k, a) in sol.poly.coeffs().iter().enumerate() {
        writeln!(out, "a{k} {}", fmt_c(*a))?;
    }
    for (name, vs) in [("white", &sol.white), ("black", &sol.black)] {
        for v in vs.iter() {
            writeln!(out, "{name} {} mult {}", fmt_c(v.location), v.multiplicity)?;
        }
    }
    writeln!(out, "residual {:.3e}", sol.residual)?;
    Ok(())
}

fn fate_line(name: &str, f: &CriticalOrbitFate<f64>) -> String {
    format!(
        "{name} {} period {} |multiplier| {:.6e} iterations {} confidence {}",
        f.kind,
        f.period,
        f.multiplier.norm(),
        f.iterations_used,
        f.confidence
    )
}

fn write_raster(raster: &Raster, path: &Path) -> Result<()> {
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        image::save_buffer(
            path,
            &raster.to_rgb(),
            raster.spec.width as u32,
            raster.spec.height as u32,
            image::ExtendedColorType::Rgb8,
        )
        .with_context(|| format!("writing {}", path.display()))?;
    } else {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        raster.write_ppm(BufWriter::new(f))?;
    }
    Ok(())
}

fn catalog_config(run: &RunArgs) -> CatalogConfig {
    let mut cfg = CatalogConfig {
        solve: SolveConfig {
            rng_seed: run.seed,
            ..SolveConfig::default()
        },
        dims: run.dims,
        cloud_seed: run.seed,
        force: run.force,
        jobs: run.jobs,
        max_edges: run.max_edges,
        ..CatalogConfig::default()
    };
    if let Some(n) = run.max_iter {
        cfg.orbit.max_iter = n;
    }
    if let Some((width, height)) = run.size {
        cfg.render = Some(RenderConfig {
            width,
            height,
            ..RenderConfig::default()
        });
    }
    cfg
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Enumerate { edges } => {
            eprintln!("seed 0");
            for t in enumerate_trees(edges as usize) {
                let flags = t.symmetry_flags();
                writeln!(
                    out,
                    "{} {} {}",
                    t.plane_code(),
                    t.colored_passport(),
                    if flags.rotational { "symmetric" } else { "-" }
                )?;
            }
        }
        Command::Solve { source, seed, json } => {
            eprintln!("seed {seed}");
            let sols = match (&source.tree, &source.passport) {
                (Some(code), _) => vec![solve_code(code, seed, out)?],
                (None, Some(text)) => {
                    let passport: Passport =
                        text.parse().map_err(|e| usage(format!("--passport {text:?}: {e}")))?;
                    let cfg = SolveConfig {
                        rng_seed: seed,
                        ..SolveConfig::default()
                    };
                    solve_passport(&passport, &cfg)?
                }
                (None, None) => bail!(usage("one of --tree or --passport is required")),
            };
            for sol in &sols {
                let code = identify_tree(&sol.poly).map(|t| t.plane_code()).unwrap_or_else(|_| "?".into());
                if json {
                    let passport = sol_passport(sol);
                    let rec = dessin::record::SolutionRecord::new(passport, code, sol);
                    writeln!(out, "{}", serde_json::to_string(&rec)?)?;
                } else {
                    writeln!(out, "tree {code}")?;
                    print_solution(out, sol)?;
                }
            }
        }
        Command::Classify {
            source,
            max_iter,
            json,
        } => {
            eprintln!("seed 0");
            let p = load_poly(&source, out)?;
            let mut cfg = OrbitConfig::default();
            if let Some(n) = max_iter {
                cfg.max_iter = n;
            }
            let c = classify(&p, &cfg);
            if json {
                let rec = dessin::record::ClassificationRecord::from(&c);
                writeln!(out, "{}", serde_json::to_string(&rec)?)?;
            } else {
                writeln!(out, "{} {}", c.taxonomy, c.connectedness)?;
                writeln!(out, "{}", fate_line("+1", &c.fate_plus))?;
                writeln!(out, "{}", fate_line("-1", &c.fate_minus))?;
            }
        }
        Command::Render {
            source,
            out: path,
            viewport,
            size,
            max_iter,
            kind,
            trap_radius,
            escape_cutoff,
        } => {
            eprintln!("seed 0");
            let p = load_poly(&source, out)?;
            let spec = RasterSpec::new(size.0, size.1, viewport)?;
            let raster = match kind {
                RenderKind::Escape => render_escape(&p, spec, max_iter),
                RenderKind::Basins => {
                    let c = classify(&p, &OrbitConfig::default());
                    let basin = BasinSpec {
                        trap_radius,
                        escape_cutoff,
                        max_iter,
                        ..BasinSpec::default()
                    };
                    render_basins(&p, &c, spec, &basin)?
                }
            };
            write_raster(&raster, &path)?;
            writeln!(
                out,
                "wrote {} ({}x{}, {} pixels never trapped)",
                path.display(),
                size.0,
                size.1,
                raster.bounded_count()
            )?;
        }
        Command::Dim {
            source,
            method,
            seed,
            points,
            max_period,
        } => {
            eprintln!("seed {seed}");
            let p = load_poly(&source, out)?;
            let c = classify(&p, &OrbitConfig::default());
            let est = match method {
                DimMethod::Box => {
                    let cloud = uniform_cloud(&p, points, seed)?;
                    let cfg = BoxConfig {
                        disconnected: c.taxonomy == dessin::dynamics::Taxonomy::G4,
                        ..BoxConfig::default()
                    };
                    box_dim(&cloud, &cfg)?
                }
                DimMethod::Pressure => pressure_dim(
                    &p,
                    &PressureConfig {
                        max_period,
                        attractor_multiplier: c.max_multiplier(),
                    },
                )?,
            };
            let rec = dessin::record::DimensionRecord::from(&est);
            writeln!(out, "{} {:.6} confidence {}", rec.method, rec.value, rec.confidence)?;
            writeln!(out, "{}", serde_json::to_string(&rec)?)?;
        }
        Command::Catalog { edges, run } => {
            eprintln!("seed {}", run.seed);
            let cfg = catalog_config(&run);
            let records = run_catalog(edges as usize, &cfg, &run.store)?;
            writeln!(out, "{} records in {}", records.len(), run.store.display())?;
            write!(out, "{}", markdown_report(&records))?;
        }
        Command::Series { m, from, to, run } => {
            eprintln!("seed {}", run.seed);
            if from > to {
                bail!(usage("--from must not exceed --to"));
            }
            let cfg = catalog_config(&run);
            let rows = run_series(m, from..=to, &cfg, &run.store)?;
            write!(out, "{}", series_table(m, &rows))?;
        }
        Command::Report { store, out: path } => {
            eprintln!("seed 0");
            let records = Store::open(&store)?.load_all()?;
            let table = markdown_report(&records);
            match path {
                Some(path) => {
                    fs::write(&path, &table).with_context(|| format!("writing {}", path.display()))?;
                    writeln!(out, "wrote {} ({} records)", path.display(), records.len())?;
                }
                None => write!(out, "{table}")?,
            }
        }
    }
    Ok(())
}

fn sol_passport(sol: &SZSolution<f64>) -> String {
    let degrees = |vs: &[dessin::Cluster]| {
        let mut d: Vec<usize> = vs.iter().map(|v| v.multiplicity).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
    };
    format!("{}|{}", degrees(&sol.white), degrees(&sol.black))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match err.downcast_ref::<ShabatError>() {
                Some(ShabatError::Exhausted { .. }) => eprintln!("error: not found: {err}"),
                _ => eprintln!("error: {err:#}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
