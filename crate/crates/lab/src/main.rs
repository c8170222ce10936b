//! `arakelov`: command line front end for the experiment runner.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use arakelov_lab::config::{
    BergmanParams, BiluParams, BiluTag, BrolinParams, BrolinTag, CanonicalHeightParams, DifferenceParams,
    DifferenceTag, DistortionParams, DistortionTag, EquidistParams, GromovParams, GromovTag, HeightParams,
    HilbertSamuelParams, IntersectParams, LatticeParams, OrbitParams, SiuParams, VolumeParams, VolumeTag, DEFAULT_PRECISION_BITS, DEFAULT_QUADRATURE_BUDGET, DEFAULT_TOLERANCE,
};
use arakelov_lab::formats::{parse_range_list, Int, LatticeSpec, MapSpec, MetricSpec, PointSpec};
use arakelov_lab::{parse_config, run, Params, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arakelov", version, about = "Heights, equidistribution and Bergman-kernel experiments on P^1")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Working precision of multiprecision arithmetic, in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: usize,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Target accuracy of truncated limits and root isolation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Maximum quadrature nodes per one-dimensional integral.
    #[arg(long, global = true, default_value_t = DEFAULT_QUADRATURE_BUDGET)]
    quadrature_budget: usize,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the JSON report here instead of stdout; a table goes next to it as .csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the CSV table to this path (`-` for stdout).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Naive height of a point.
    Height {
        /// `1,2`, `1/2,3`, `minpoly:-2,0,1`, `zeta:m:e1,e2` or JSON.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Canonical height by the Tate limit.
    CanonicalHeight {
        /// `power<q>`, `unicritical:q:c` or JSON.
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Galois orbit, Weyl sums and discrepancy of an algebraic point.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long = "K", default_value_t = 8)]
        cutoff: u32,
    },
    /// Equidistribution experiments.
    #[command(subcommand)]
    Equidist(EquidistCmd),
    /// Arithmetic volume and lattice point counts of a normed lattice.
    Lattice {
        /// JSON lattice file.
        #[arg(long, conflicts_with = "gram")]
        lattice: Option<PathBuf>,
        /// Gram matrix, rows separated by `;`.
        #[arg(long)]
        gram: Option<String>,
        #[arg(long, default_value_t = 1)]
        torsion: u64,
        /// Sublattice generators, rows separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        sublattice: Option<String>,
        #[arg(long, default_value_t = arakelov_core::lattice::DEFAULT_RANK_CAP)]
        rank_cap: usize,
    },
    /// Distortion, volume and sup-norm experiments.
    #[command(subcommand)]
    Bergman(BergmanCmd),
    /// Arithmetic intersection number of two metrics on O(1).
    Intersect {
        /// Shorthand for `--a c:<c>`.
        #[arg(long, conflicts_with = "a", allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Growth of chi_L2(N M) against c_1(M)^2.
    HilbertSamuel {
        #[arg(long, default_value = "fs")]
        metric: String,
        /// Values of N, e.g. `10,50,200` or `10..200:10`.
        #[arg(long)]
        ns: String,
        #[arg(long, default_value_t = 0.025)]
        band: f64,
    },
    /// Growth of chi_L2(N (L - M)) against (L^2 - 2 L.M) / 2.
    Siu {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        ns: String,
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
    },
    /// Run a JSON config file.
    Run { config: PathBuf },
}

#[derive(Subcommand)]
enum EquidistCmd {
    /// Orbits of primitive roots of unity.
    Bilu {
        #[arg(long)]
        orders: String,
        #[arg(long = "K", default_value_t = 8)]
        cutoff: u32,
    },
    /// Backward-iteration sample of the canonical measure.
    Brolin {
        #[arg(long)]
        map: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = arakelov_core::dynamics::DEFAULT_BURN_IN)]
        burn_in: usize,
    },
}

#[derive(Subcommand)]
enum BergmanCmd {
    Distortion {
        #[arg(long, allow_hyphen_values = true)]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        measure: Option<String>,
        #[arg(long, default_value_t = 24)]
        radii: usize,
        #[arg(long, default_value_t = 48)]
        angles: usize,
    },
    Difference {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        j: String,
        #[arg(long)]
        k: Option<f64>,
    },
    Volume {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// Coefficients of s by x1 exponent, e.g. `1,0`.
        #[arg(long, allow_hyphen_values = true)]
        section: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        j: String,
        #[arg(long)]
        k: Option<f64>,
    },
    Gromov {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        sums: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn u32s(s: &str) -> anyhow::Result<Vec<u32>> {
    parse_range_list(s)?.into_iter().map(|v| u32::try_from(v).context("value too large")).collect()
}

fn usizes(s: &str) -> anyhow::Result<Vec<usize>> {
    Ok(parse_range_list(s)?.into_iter().map(|v| v as usize).collect())
}

fn int_rows(s: &str) -> anyhow::Result<Vec<Vec<Int>>> {
    s.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse().map(Int).map_err(|_| anyhow::anyhow!("`{}` is not an integer", x.trim())))
                .collect()
        })
        .collect()
}

fn params(cmd: Cmd) -> anyhow::Result<Params> {
    let metric = |s: &str| MetricSpec::parse_cli(s);
    Ok(match cmd {
        Cmd::Height { point } => Params::Height(HeightParams { point: PointSpec::parse_cli(&point)? }),
        Cmd::CanonicalHeight { map, point } => Params::CanonicalHeight(CanonicalHeightParams {
            map: MapSpec::parse_cli(&map)?,
            point: PointSpec::parse_cli(&point)?,
        }),
        Cmd::Orbit { point, cutoff } => Params::Orbit(OrbitParams { point: PointSpec::parse_cli(&point)?, cutoff }),
        Cmd::Equidist(EquidistCmd::Bilu { orders, cutoff }) => {
            Params::Equidist(EquidistParams::Bilu(BiluParams { experiment: BiluTag, orders: parse_range_list(&orders)?, cutoff }))
        }
        Cmd::Equidist(EquidistCmd::Brolin { map, count, burn_in }) => {
            Params::Equidist(EquidistParams::Brolin(BrolinParams { experiment: BrolinTag, map: MapSpec::parse_cli(&map)?, count, burn_in }))
        }
        Cmd::Lattice { lattice, gram, torsion, sublattice, rank_cap } => {
            let spec = match (lattice, gram) {
                (Some(path), _) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                (None, Some(g)) => LatticeSpec::parse_gram(&g, torsion)?,
                (None, None) => bail!("lattice: pass --lattice FILE or --gram ROWS"),
            };
            let sublattice = sublattice.as_deref().map(int_rows).transpose()?;
            Params::Lattice(LatticeParams { lattice: spec, sublattice, rank_cap })
        }
        Cmd::Bergman(b) => Params::Bergman(match b {
            BergmanCmd::Distortion { metric: m, measure, radii, angles } => BergmanParams::Distortion(DistortionParams {
                experiment: DistortionTag,
                metric: metric(&m)?,
                measure: measure.as_deref().map(metric).transpose()?,
                radii,
                angles,
            }),
            BergmanCmd::Difference { l, m, n, j, k } => {
                BergmanParams::Difference(DifferenceParams {
                    experiment: DifferenceTag,
                    l: metric(&l)?,
                    m: metric(&m)?,
                    n: u32s(&n)?,
                    j: u32s(&j)?,
                    k,
                })
            }
            BergmanCmd::Volume { l, m, section, n, j, k } => BergmanParams::Volume(VolumeParams {
                experiment: VolumeTag,
                l: metric(&l)?,
                m: metric(&m)?,
                section: section
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad coefficient `{x}`")))
                    .collect::<anyhow::Result<_>>()?,
                n: u32s(&n)?,
                j: u32s(&j)?,
                k,
            }),
            BergmanCmd::Gromov { l, m, sums, trials } => {
                BergmanParams::Gromov(GromovParams {
                    experiment: GromovTag,
                    l: metric(&l)?,
                    m: metric(&m)?,
                    sums: u32s(&sums)?,
                    trials,
                })
            }
        }),
        Cmd::Intersect { c, a, b } => {
            let a = match (c, a) {
                (Some(c), _) => MetricSpec::C { c: c.parse()? },
                (None, Some(a)) => metric(&a)?,
                (None, None) => bail!("intersect: pass --c or --a"),
            };
            Params::Intersect(IntersectParams { a, b: b.as_deref().map(metric).transpose()? })
        }
        Cmd::HilbertSamuel { metric: m, ns, band } => {
            Params::HilbertSamuel(HilbertSamuelParams { metric: metric(&m)?, ns: usizes(&ns)?, band })
        }
        Cmd::Siu { l, m, ns, slack } => Params::Siu(SiuParams { l: metric(&l)?, m: metric(&m)?, ns: usizes(&ns)?, slack }),
        Cmd::Run { .. } => unreachable!("handled by the caller"),
    })
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{nl}").and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn main_inner() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    let c = cli.common;
    let config = match cli.command {
        Cmd::Run { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            parse_config(&text, &config.display().to_string())?
        }
        cmd => RunConfig {
            precision_bits: c.precision_bits,
            seed: c.seed,
            tolerance: c.tolerance,
            quadrature_budget: c.quadrature_budget,
            threads: c.threads,
            out: c.out.clone(),
            ..RunConfig::new(params(cmd)?)
        },
    };
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        bail!("--tolerance must be positive");
    }
    let outcome = run(&config)?;
    let report = outcome.report_json();
    let out = c.out.clone().or_else(|| config.out.clone());
    let csv_path = c.csv.or_else(|| out.as_ref().map(|o| o.with_extension("csv")));
    match (&outcome.csv, csv_path.as_deref()) {
        (Some(table), Some(p)) => write_or_print(Some(p), table)?,
        (None, Some(p)) if p == Path::new("-") => bail!("this command produces no table"),
        _ => {}
    }
    let csv_on_stdout = csv_path.as_deref() == Some(Path::new("-"));
    if out.is_some() || !csv_on_stdout {
        write_or_print(out.as_deref(), &report)?;
    }
    for check in outcome.checks.iter().filter(|c| !c.holds) {
        eprintln!("check failed: {}: {} {} {}", check.name, check.lhs, check.relation, check.rhs);
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
