//! The five subcommands as library functions returning plain data.

use serde::{Deserialize, Serialize};

use canardlab_core::canard::{
    bifurcation_sweep, CanardHunter, CanardKind, HuntOptions, HuntResult,
    SweepOptions, SweepResult,
};
use canardlab_core::integrate::{integrate, Direction, Event, Options, Trajectory};
use canardlab_core::{
    case_classify, critical_manifold_height, eigen_data, regularized_field, resonance_check,
    singular_canard_census, slowfast_rhs, visibility, CanardCensus, CaseClass, EigenData, Error,
    Resonance, SlowFastState, TwoFoldNormalForm, Visibility,
};
use canardlab_core::twofold::DEFAULT_RESONANCE_TOL;

use crate::config::{ExperimentConfig, ParamDefaults};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub params: TwoFoldNormalForm,
    pub visibility: Visibility,
    pub case: CaseClass,
    pub eigen: Option<EigenData>,
    pub census: Option<CanardCensus>,
    pub resonance: Option<Resonance>,
}

pub fn cmd_classify(cfg: &ExperimentConfig) -> CliResult<ClassifyReport> {
    let params = cfg.normal_form(ParamDefaults::CANARD_FAMILY)?;
    let case = case_classify(&params);
    let eigen = eigen_data(&params).ok();
    let census = singular_canard_census(&params).ok();
    Ok(ClassifyReport {
        params,
        visibility: visibility(&params),
        case,
        resonance: eigen.as_ref().map(|e| resonance_check(e, DEFAULT_RESONANCE_TOL)),
        eigen,
        census,
    })
}

fn hunt_options(cfg: &ExperimentConfig) -> HuntOptions {
    let d = HuntOptions::default();
    HuntOptions {
        delta: cfg.delta.unwrap_or(d.delta),
        rtol: cfg.rtol.unwrap_or(d.rtol),
        atol: cfg.atol.unwrap_or(d.atol),
        ..d
    }
}

/// Seeds: explicit `[z1_min, z1_max]` range if set, otherwise clustered at `χ±`.
fn seed_grid(cfg: &ExperimentConfig, hunter: &CanardHunter) -> CliResult<Vec<f64>> {
    let n = cfg.grid_points.unwrap_or(800);
    match (cfg.z1_min, cfg.z1_max) {
        (None, None) => Ok(hunter.default_grid(n)),
        (lo, hi) => {
            let lo = lo.unwrap_or(-8.0);
            let hi = hi.unwrap_or(-0.1);
            if !(lo < hi && hi < 0.0 && n >= 2) {
                return Err(CliError::Input(format!(
                    "seed range must satisfy z1_min < z1_max < 0, got [{lo}, {hi}]"
                )));
            }
            Ok((0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanardSummary {
    pub x2: f64,
    pub y: f64,
    pub kind: CanardKind,
    pub transversal: bool,
    pub crossing_angle: f64,
    pub rotation_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntSummary {
    pub params: TwoFoldNormalForm,
    pub xi: f64,
    /// Transversal canards other than the weak one.
    pub intersections: usize,
    /// Rotation counts of those canards, ascending.
    pub rotations: Vec<u32>,
    pub weak_point: Option<(f64, f64)>,
    pub strong_point: Option<(f64, f64)>,
    pub canards: Vec<CanardSummary>,
    pub failed_seeds: usize,
}

pub struct HuntOutput {
    pub result: HuntResult,
    pub summary: HuntSummary,
    /// Canard orbits keyed by their index in the intersection list.
    pub orbits: Vec<(usize, Trajectory<3>)>,
}

pub fn cmd_hunt(cfg: &ExperimentConfig) -> CliResult<HuntOutput> {
    let params = cfg.normal_form(ParamDefaults::CANARD_FAMILY)?;
    let phi = cfg.regularization()?;
    let hunter = CanardHunter::new(params, phi, hunt_options(cfg))?;
    let grid = seed_grid(cfg, &hunter)?;
    let result = hunter.hunt(&grid);

    let mut canards = Vec::new();
    let mut orbits = Vec::new();
    for (idx, i) in result.report.intersections.iter().enumerate() {
        if i.kind != CanardKind::Weak {
            if let Ok(t) = hunter.canard_trajectory(i.seed_attracting, i.seed_repelling) {
                orbits.push((idx, t));
            }
        }
        canards.push(CanardSummary {
            x2: i.point.0,
            y: i.point.1,
            kind: i.kind,
            transversal: i.transversal,
            crossing_angle: i.crossing_angle,
            rotation_count: i.rotation_count,
        });
    }
    let mut rotations: Vec<u32> = result
        .report
        .intersections
        .iter()
        .filter(|i| i.transversal && i.kind != CanardKind::Weak)
        .map(|i| i.rotation_count)
        .collect();
    rotations.sort_unstable();
    let summary = HuntSummary {
        params,
        xi: hunter.eigen.xi_minus,
        intersections: result.report.transversal_count(),
        rotations,
        weak_point: hunter.weak_point(),
        strong_point: hunter.strong_point(),
        canards,
        failed_seeds: result.attracting.failed.len() + result.repelling.failed.len(),
    };
    Ok(HuntOutput {
        result,
        summary,
        orbits,
    })
}

/// `(u, v)` projection used for rotation counting, per sample of a canard orbit.
pub fn rotation_projection(
    traj: &Trajectory<3>,
    params: &TwoFoldNormalForm,
    phi: &canardlab_core::RegularizationFunction,
) -> Vec<(f64, f64, f64)> {
    let Ok(e) = eigen_data(params) else { return Vec::new() };
    let y_weak = canardlab_core::regularization::y_of_w(-params.abs_b() * e.chi_plus / params.abs_beta(), phi);
    traj.samples
        .iter()
        .map(|(t, s)| {
            let u = -e.chi_plus * s[0] - s[2];
            let v = canardlab_core::regularization::y_of_w(s[1], phi) - y_weak;
            (*t, u, v)
        })
        .collect()
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> CliResult<SweepResult> {
    let lo = cfg.xi_min.unwrap_or(2.0);
    let hi = cfg.xi_max.unwrap_or(7.0);
    if !(lo > 1.0 && hi > lo && hi <= 7.5) {
        return Err(CliError::Input(format!(
            "sweep range must satisfy 1 < xi_min < xi_max <= 7.5, got [{lo}, {hi}]"
        )));
    }
    let phi = cfg.regularization()?;
    let d = ParamDefaults::CANARD_FAMILY;
    let b = cfg.b.unwrap_or(d.b);
    let beta = cfg.beta.unwrap_or(d.beta);
    let cmg = cfg.c_minus_gamma.unwrap_or(d.c_minus_gamma);
    let opts = SweepOptions {
        step: cfg.xi_step.unwrap_or(0.25),
        grid_points: cfg.grid_points.unwrap_or(800),
        ..SweepOptions::default()
    };
    Ok(bifurcation_sweep(
        |xi| TwoFoldNormalForm::with_eigen_ratio(b, beta, cmg, xi),
        &phi,
        (lo, hi),
        &opts,
        &hunt_options(cfg),
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitSample {
    pub eps: f64,
    pub z: f64,
    pub x_exit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub k: u32,
    pub fitted_exponent: f64,
    pub expected: f64,
    pub prefactor_slope_vs_z: f64,
    pub expected_slope: f64,
    pub r_squared: f64,
}

pub struct FoldScalingOutput {
    pub fit: ScalingFit,
    pub eps_samples: Vec<ExitSample>,
    pub z_samples: Vec<ExitSample>,
}

/// `x` where the orbit leaves the layer through `y = -ε`, started on the
/// critical manifold at `x₀ = -ε^{k/(2k-1)}/ρ`.
pub fn fold_exit(
    params: &TwoFoldNormalForm,
    phi: &canardlab_core::RegularizationFunction,
    eps: f64,
    z: f64,
    rho: f64,
) -> CliResult<f64> {
    let k = f64::from(phi.k());
    let x0 = -eps.powf(k / (2.0 * k - 1.0)) / rho;
    let y0 = critical_manifold_height(params, phi, x0, z)?;
    let rhs = |_: f64, s: &[f64; 3]| {
        let d = slowfast_rhs(params, phi, &SlowFastState { x: s[0], y: s[1], z: s[2], eps });
        [d.x, d.y, d.z]
    };
    let exit = |_: f64, s: &[f64; 3]| s[1] + 1.0;
    let events = [Event::terminal("exit", &exit, Direction::Decreasing)];
    let t_max = 100.0 * x0.abs() / eps + 1e4;
    let opts = Options {
        atol: 1e-14,
        ..Options::with_tol(1e-10, 1e-14).no_record()
    };
    let traj = integrate(rhs, [x0, y0, z], (0.0, t_max), &opts, &events)?;
    match traj.terminated_by {
        Some(0) => Ok(traj.last().1[0]),
        _ => Err(Error::NoCrossing.into()),
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

pub fn cmd_fold_scaling(cfg: &ExperimentConfig) -> CliResult<FoldScalingOutput> {
    let k = cfg.k.unwrap_or(2);
    if k < 2 {
        return Err(CliError::Input(format!("k must be at least 2, got {k}")));
    }
    let params = cfg.normal_form(ParamDefaults::VISIBLE)?;
    if !(params.beta > 0.0) {
        return Err(CliError::Input("fold scaling needs a visible fold (beta > 0)".into()));
    }
    let phi = canardlab_core::phi_finite_k(k)?;
    let rho = cfg.rho.unwrap_or(canardlab_core::blowup::DEFAULT_RHO);
    let z = cfg.z.unwrap_or(-1.0);
    let (lo, hi) = (cfg.eps_min.unwrap_or(1e-6), cfg.eps_max.unwrap_or(1e-3));
    let n = cfg.eps_count.unwrap_or(7);
    if !(z < 0.0) {
        return Err(CliError::Input(format!("z must be negative, got {z}")));
    }
    if !(lo > 0.0 && hi / lo >= 1e3 && n >= 3) {
        return Err(CliError::Input("eps list must span at least three decades".into()));
    }
    let eps_list: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let z_list = cfg.z_values.clone().unwrap_or_else(|| vec![-0.5, -1.0, -2.0, -4.0]);
    if z_list.len() < 2 || z_list.iter().any(|z| !(*z < 0.0)) {
        return Err(CliError::Input("z_values needs at least two negative entries".into()));
    }
    let eps_z = cfg.eps.unwrap_or(1e-5);

    let mut eps_samples = Vec::with_capacity(n);
    for &eps in &eps_list {
        eps_samples.push(ExitSample { eps, z, x_exit: fold_exit(&params, &phi, eps, z, rho)? });
    }
    let mut z_samples = Vec::with_capacity(z_list.len());
    for &zz in &z_list {
        z_samples.push(ExitSample { eps: eps_z, z: zz, x_exit: fold_exit(&params, &phi, eps_z, zz, rho)? });
    }
    if let Some(bad) = eps_samples.iter().chain(&z_samples).find(|s| !(s.x_exit > 0.0)) {
        return Err(Error::FitFailure(format!("exit point x = {} is not positive", bad.x_exit)).into());
    }
    let lx: Vec<f64> = eps_samples.iter().map(|s| s.eps.ln()).collect();
    let ly: Vec<f64> = eps_samples.iter().map(|s| s.x_exit.ln()).collect();
    let (exponent, _, r2) = linear_fit(&lx, &ly);
    let lz: Vec<f64> = z_samples.iter().map(|s| (-s.z).ln()).collect();
    let lzy: Vec<f64> = z_samples.iter().map(|s| s.x_exit.ln()).collect();
    let (slope_z, _, _) = linear_fit(&lz, &lzy);
    if r2 < 0.99 {
        return Err(Error::FitFailure(format!("log-log fit has r^2 = {r2}")).into());
    }
    let kf = f64::from(k);
    Ok(FoldScalingOutput {
        fit: ScalingFit {
            k,
            fitted_exponent: exponent,
            expected: kf / (2.0 * kf - 1.0),
            prefactor_slope_vs_z: slope_z,
            expected_slope: -1.0 / (2.0 * kf - 1.0),
            r_squared: r2,
        },
        eps_samples,
        z_samples,
    })
}

/// Orbit of the regularized field in original coordinates.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> CliResult<Trajectory<3>> {
    let params = cfg.normal_form(ParamDefaults::VISIBLE)?;
    let phi = cfg.regularization()?;
    let eps = cfg.eps.unwrap_or(1e-3);
    if !(eps > 0.0) {
        return Err(CliError::Input(format!("eps must be positive, got {eps}")));
    }
    let start = [cfg.x0.unwrap_or(-1.0), cfg.y0.unwrap_or(0.1), cfg.z0.unwrap_or(-1.0)];
    let t_end = cfg.t_end.unwrap_or(2.0);
    let rhs = |_: f64, p: &[f64; 3]| regularized_field(&params, &phi, eps, *p).as_array();
    let opts = Options::with_tol(cfg.rtol.unwrap_or(1e-10), cfg.atol.unwrap_or(1e-12));
    Ok(integrate(rhs, start, (0.0, t_end), &opts, &[])?)
}
