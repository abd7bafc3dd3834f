use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use canardlab::config::{ExperimentConfig, PhiChoice};
use canardlab::experiments::{self, rotation_projection};
use canardlab::output::{fmt_f64, OutputDir};
use canardlab::{CliError, CliResult};
use canardlab_core::canard::{CanardKind, SectionCurve};

#[derive(Parser)]
#[command(name = "canardlab", version, about = "Canards near regularized two-fold singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Visibility, case, eigen data, singular canard census and resonance.
    #[command(allow_negative_numbers = true)]
    Classify(CommonArgs),
    /// Trace section curves in the scaling chart and locate canards.
    #[command(allow_negative_numbers = true)]
    Hunt(CommonArgs),
    /// Scan the eigenvalue ratio for changes in the canard count.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        xi_min: Option<f64>,
        #[arg(long)]
        xi_max: Option<f64>,
        #[arg(long)]
        xi_step: Option<f64>,
    },
    /// Exit point of the layer orbit past a visible fold, against eps and z.
    #[command(allow_negative_numbers = true)]
    FoldScaling {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        eps_min: Option<f64>,
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long)]
        eps_count: Option<usize>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        z_values: Option<Vec<f64>>,
        #[arg(long)]
        rho: Option<f64>,
        /// eps used for the z-dependence fit.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Integrate the regularized field from a point.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    c_minus_gamma: Option<f64>,
    #[arg(long)]
    c_plus_gamma: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    phi: Option<PhiChoice>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    z1_min: Option<f64>,
    #[arg(long)]
    z1_max: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> ExperimentConfig {
        ExperimentConfig {
            b: self.b,
            beta: self.beta,
            c: self.c,
            gamma: self.gamma,
            c_minus_gamma: self.c_minus_gamma,
            c_plus_gamma: self.c_plus_gamma,
            xi: self.xi,
            phi: self.phi,
            k: self.k,
            delta: self.delta,
            rtol: self.rtol,
            atol: self.atol,
            grid_points: self.grid_points,
            z1_min: self.z1_min,
            z1_max: self.z1_max,
            out: self.out.clone(),
            ..Default::default()
        }
    }

    fn resolve(&self, extra: ExperimentConfig) -> CliResult<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.merged(&self.overrides()).merged(&extra))
    }
}

fn out_dir(cfg: &ExperimentConfig, command: &str) -> CliResult<OutputDir> {
    let root = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out").join(command));
    OutputDir::create(&root, command, cfg)
}

fn curve_rows(c: &SectionCurve) -> impl Iterator<Item = Vec<String>> + '_ {
    c.points
        .iter()
        .map(|p| vec![fmt_f64(p.seed), fmt_f64(p.x2), fmt_f64(p.y), fmt_f64(p.w)])
}

fn kind_label(k: CanardKind) -> String {
    match k {
        CanardKind::Strong => "strong".into(),
        CanardKind::Weak => "weak".into(),
        CanardKind::Secondary(n) => format!("secondary_{n}"),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Classify(common) => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let report = experiments::cmd_classify(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if cfg.out.is_some() {
                out_dir(&cfg, "classify")?.write_json("classify.json", &report)?;
            }
        }
        Command::Hunt(common) => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let out = experiments::cmd_hunt(&cfg)?;
            let dir = out_dir(&cfg, "hunt")?;
            let cols = ["seed", "x2", "y", "w"];
            dir.write_csv("attracting.csv", &cols, curve_rows(&out.result.attracting))?;
            dir.write_csv("repelling.csv", &cols, curve_rows(&out.result.repelling))?;
            dir.write_csv(
                "intersections.csv",
                &["index", "x2", "y", "kind", "transversal", "crossing_angle", "rotation_count", "seed_attracting", "seed_repelling"],
                out.result.report.intersections.iter().enumerate().map(|(i, c)| {
                    vec![
                        i.to_string(),
                        fmt_f64(c.point.0),
                        fmt_f64(c.point.1),
                        kind_label(c.kind),
                        c.transversal.to_string(),
                        fmt_f64(c.crossing_angle),
                        c.rotation_count.to_string(),
                        fmt_f64(c.seed_attracting),
                        fmt_f64(c.seed_repelling),
                    ]
                }),
            )?;
            let phi = cfg.regularization()?;
            let mut rows = Vec::new();
            for (idx, traj) in &out.orbits {
                for (j, (t, u, v)) in rotation_projection(traj, &out.summary.params, &phi).into_iter().enumerate() {
                    let s = traj.samples[j].1;
                    rows.push(vec![
                        idx.to_string(),
                        fmt_f64(t),
                        fmt_f64(s[0]),
                        fmt_f64(s[1]),
                        fmt_f64(s[2]),
                        fmt_f64(u),
                        fmt_f64(v),
                    ]);
                }
            }
            dir.write_csv("rotations.csv", &["index", "t", "x2", "w", "z2", "u", "v"], rows)?;
            dir.write_json("summary.json", &out.summary)?;
            for (z1, why) in out.result.attracting.failed.iter().chain(&out.result.repelling.failed) {
                eprintln!("seed {z1}: {why}");
            }
            println!(
                "{} canard(s), rotations {:?}",
                out.summary.intersections, out.summary.rotations
            );
        }
        Command::Sweep { common, xi_min, xi_max, xi_step } => {
            let cfg = common.resolve(ExperimentConfig { xi_min, xi_max, xi_step, ..Default::default() })?;
            let res = experiments::cmd_sweep(&cfg)?;
            let dir = out_dir(&cfg, "sweep")?;
            dir.write_csv(
                "counts.csv",
                &["xi", "count"],
                res.samples.iter().map(|(x, n)| vec![fmt_f64(*x), n.to_string()]),
            )?;
            dir.write_csv(
                "bifurcations.csv",
                &["xi", "lower", "upper", "error", "count_before", "count_after"],
                res.bifurcations.iter().map(|b| {
                    vec![
                        fmt_f64(b.xi),
                        fmt_f64(b.lower),
                        fmt_f64(b.upper),
                        fmt_f64(0.5 * (b.upper - b.lower)),
                        b.count_before.to_string(),
                        b.count_after.to_string(),
                    ]
                }),
            )?;
            dir.write_json("summary.json", &res)?;
            for b in &res.bifurcations {
                println!("xi = {:.4} ± {:.1e}: {} -> {}", b.xi, 0.5 * (b.upper - b.lower), b.count_before, b.count_after);
            }
        }
        Command::FoldScaling { common, eps_min, eps_max, eps_count, z, z_values, rho, eps } => {
            let cfg = common.resolve(ExperimentConfig {
                eps_min,
                eps_max,
                eps_count,
                z,
                z_values,
                rho,
                eps,
                ..Default::default()
            })?;
            let res = experiments::cmd_fold_scaling(&cfg)?;
            let dir = out_dir(&cfg, "fold-scaling")?;
            let cols = ["eps", "z", "x_exit"];
            let rows = |s: &[experiments::ExitSample]| -> Vec<Vec<String>> {
                s.iter().map(|e| vec![fmt_f64(e.eps), fmt_f64(e.z), fmt_f64(e.x_exit)]).collect()
            };
            dir.write_csv("exit_vs_eps.csv", &cols, rows(&res.eps_samples))?;
            dir.write_csv("exit_vs_z.csv", &cols, rows(&res.z_samples))?;
            dir.write_json("fit.json", &res.fit)?;
            println!("{}", serde_json::to_string_pretty(&res.fit)?);
        }
        Command::Simulate { common, eps, x0, y0, z0, t_end } => {
            let cfg = common.resolve(ExperimentConfig { eps, x0, y0, z0, t_end, ..Default::default() })?;
            let traj = experiments::cmd_simulate(&cfg)?;
            let dir = out_dir(&cfg, "simulate")?;
            dir.write_csv(
                "trajectory.csv",
                &["t", "x", "y", "z"],
                traj.samples
                    .iter()
                    .map(|(t, s)| vec![fmt_f64(*t), fmt_f64(s[0]), fmt_f64(s[1]), fmt_f64(s[2])]),
            )?;
            let (t, s) = traj.last();
            println!("t = {t}: ({}, {}, {})", s[0], s[1], s[2]);
        }
    }
    Ok(())
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("CANARDLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Input(format!("CANARDLAB_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Input("CANARDLAB_THREADS must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
