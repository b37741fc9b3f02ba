use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sdrep::feasibility::{membership_at, EngineConfig, VerdictKind};
use sdrep_cli::campaigns::{self, Campaign};
use sdrep_cli::grid::{self, Bounds};
use sdrep_cli::model::{self, Built, Elaborator, SetExpr};

#[derive(Parser)]
#[command(name = "sdrep", version, about = "Membership, rasters and checks for semidefinite representable sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of points.
    Check {
        #[command(flatten)]
        target: Target,
        /// Comma-separated coordinates in the order of the set's visible variables.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Rasterize a 2-D set to CSV and/or SVG.
    Grid {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "-1.5:1.5,-1.5:1.5", allow_hyphen_values = true)]
        bounds: String,
        #[arg(long, default_value_t = 101)]
        res: usize,
        /// Output file; with `--format both` the extension is replaced by .csv and .svg.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Print pencil size and construction tree.
    Info {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Run oracle-agreement campaigns and print JSON lines.
    Verify {
        /// albert, relint, facechar, looparrow or all.
        campaign: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 101)]
        res: usize,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    set: String,
}

#[derive(Args)]
struct EngineFlags {
    /// Bound on every auxiliary variable.
    #[arg(long, default_value_t = 1e6)]
    lmax: f64,
    /// Feasibility tolerance; the infeasibility threshold is twice this value.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EngineFlags {
    fn config(&self) -> Result<EngineConfig> {
        let cfg = EngineConfig {
            lambda_max: self.lmax,
            tol_feas: self.tol,
            out_threshold: 2.0 * self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..EngineConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

fn load(target: &Target, cfg: EngineConfig) -> Result<Built> {
    let text = std::fs::read_to_string(&target.model)
        .with_context(|| format!("cannot read model {}", target.model.display()))?;
    let parsed = model::parse_model(&text).map_err(|e| anyhow::anyhow!("[{}] {e}", e.code()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let mut elab = Elaborator::new(&parsed.model, cfg);
    elab.build(&target.set).map_err(|e| anyhow::anyhow!("[{}] {e}", e.code()))
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad coordinate `{v}` in point `{text}`")))
        .collect::<Result<_>>()?;
    if values.len() != dim || values.iter().any(|v| !v.is_finite()) {
        bail!("point `{text}` must have {dim} finite coordinates");
    }
    Ok(values)
}

fn check(target: &Target, points: &[String], engine: &EngineFlags) -> Result<ExitCode> {
    let cfg = engine.config()?;
    let built = load(target, cfg)?;
    let s = &built.sdr;
    let points: Vec<Vec<f64>> = points.iter().map(|p| parse_point(p, s.visible().len())).collect::<Result<_>>()?;
    println!("{}\tverdict\tmargin\tresidual", s.visible().join(","));
    let mut unknown = false;
    for p in &points {
        let v = membership_at(s, p, &cfg)?;
        unknown |= v.kind == VerdictKind::Unknown;
        let coords: Vec<String> = p.iter().map(f64::to_string).collect();
        let margin = if v.is_in() { format!("{:.3e}", v.margin) } else { "-".into() };
        let residual = if v.is_in() { "-".into() } else { format!("{:.3e}", v.residual) };
        println!("{}\t{}\t{margin}\t{residual}", coords.join(","), v.kind);
    }
    Ok(if unknown { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn grid_cmd(
    target: &Target,
    bounds: &str,
    res: usize,
    out: Option<&Path>,
    format: Format,
    engine: &EngineFlags,
) -> Result<ExitCode> {
    let cfg = engine.config()?;
    let bounds: Bounds = bounds.parse()?;
    let built = load(target, cfg)?;
    let report = grid::rasterize(&built.sdr, bounds, res, &cfg)?;
    match (format, out) {
        (Format::Csv, None) => print!("{}", report.to_csv()),
        (Format::Svg, None) => print!("{}", report.to_svg()),
        (Format::Both, None) => bail!("--format both needs --out"),
        (Format::Csv, Some(p)) => write_out(p, &report.to_csv())?,
        (Format::Svg, Some(p)) => write_out(p, &report.to_svg())?,
        (Format::Both, Some(p)) => {
            write_out(&p.with_extension("csv"), &report.to_csv())?;
            write_out(&p.with_extension("svg"), &report.to_svg())?;
        }
    }
    eprintln!("{}", report.summary());
    Ok(if report.count(VerdictKind::Unknown) > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn info(target: &Target, engine: &EngineFlags) -> Result<ExitCode> {
    let cfg = engine.config()?;
    let text = std::fs::read_to_string(&target.model)?;
    let parsed = model::parse_model(&text).map_err(|e| anyhow::anyhow!("[{}] {e}", e.code()))?;
    let built = load(target, cfg)?;
    let s = &built.sdr;
    println!("set: {}", target.set);
    println!("pencil dimension: {}", s.pencil().dim());
    println!("visible: {} ({})", s.visible().len(), s.visible().join(", "));
    println!("auxiliary: {} ({})", s.auxiliary().len(), s.auxiliary().join(", "));
    if let SetExpr::Relint(inner) = parsed.model.get(&target.set)? {
        let inner = Elaborator::new(&parsed.model, cfg).build(inner)?;
        let (k, n, m) = (inner.sdr.pencil().dim(), inner.sdr.visible().len(), inner.sdr.auxiliary().len());
        println!(
            "relint bookkeeping: k = {k}, m = {m}; dimension k+4 = {}; auxiliaries m+2 = {} (delta and one \
             shared gadget lambda), m+3 = {} with one lambda per strict inequality; lifted coordinates n+m+2 = {}",
            k + 4,
            m + 2,
            m + 3,
            n + m + 2
        );
    }
    println!("construction:");
    print!("{}", built.tree);
    Ok(ExitCode::SUCCESS)
}

fn verify(campaign: &str, samples: Option<usize>, res: usize, engine: &EngineFlags) -> Result<ExitCode> {
    let cfg = engine.config()?;
    let list: Vec<Campaign> = if campaign == "all" {
        Campaign::ALL.to_vec()
    } else {
        vec![campaign.parse::<Campaign>().map_err(anyhow::Error::msg)?]
    };
    let opts = campaigns::Options { samples, seed: engine.seed, resolution: res, cfg };
    let mut ok = true;
    for c in list {
        let report = campaigns::run(c, &opts)?;
        for line in &report.lines {
            println!("{line}");
        }
        ok &= report.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { target, points, engine } => check(target, points, engine),
        Command::Grid { target, bounds, res, out, format, engine } => {
            grid_cmd(target, bounds, *res, out.as_deref(), *format, engine)
        }
        Command::Info { target, engine } => info(target, engine),
        Command::Verify { campaign, samples, res, engine } => verify(campaign, *samples, *res, engine),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
