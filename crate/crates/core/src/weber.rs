//! Weber equation `v'' - x v' + ξ v = 0` and the variational problem along the
//! invariant lines of the scaling chart.

use serde::{Deserialize, Serialize};

use crate::blowup::twofold::invariant_line_k2;
use crate::error::{Error, Result};
use crate::integrate::{integrate, Direction, Event, Options};
use crate::pws::TwoFoldNormalForm;
use crate::regularization::{f_of_w, RegularizationFunction};
use crate::twofold::{eigen_data, Branch};

/// Half-width of the window on which non-polynomial solutions are integrated.
pub const WEBER_WINDOW: f64 = 8.0;
pub const INTEGER_TOL: f64 = 1e-9;
pub const DEFAULT_WRONSKIAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthClass {
    AlgebraicBoth,
    ExponentialFuture,
    ExponentialPast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeberSolution {
    pub xi: f64,
    pub polynomial: bool,
    pub zero_count: u32,
    pub growth_class: GrowthClass,
}

/// Probabilists' Hermite polynomial `He_n(x)`.
pub fn hermite_he(n: u32, x: f64) -> f64 {
    hermite_sequence(n, x)[n as usize]
}

fn hermite_sequence(n: u32, x: f64) -> Vec<f64> {
    let mut seq = Vec::with_capacity(n as usize + 1);
    seq.push(1.0);
    if n >= 1 {
        seq.push(x);
    }
    for m in 1..n as usize {
        let next = x * seq[m] - m as f64 * seq[m - 1];
        seq.push(next);
    }
    seq
}

fn sign_changes(seq: &[f64]) -> u32 {
    let mut count = 0;
    let mut last = 0.0;
    for &v in seq {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Real zeros of `He_n`, counted with the Sturm sequence `He_0, …, He_n`.
pub fn hermite_zero_count(n: u32) -> u32 {
    let bound = (4.0 * f64::from(n) + 4.0).sqrt() + 1.0;
    sign_changes(&hermite_sequence(n, -bound)) - sign_changes(&hermite_sequence(n, bound))
}

/// Algebraic solution `Σ c_k s^(ξ-2k)` divided by `s^ξ`, with its `s`-derivative
/// likewise scaled: returns `(V, dV/ds)` at `s > 0`.
fn algebraic_series(xi: f64, s: f64) -> (f64, f64) {
    let inv2 = 1.0 / (s * s);
    let mut c = 1.0;
    let mut p = 1.0;
    let mut v = 1.0;
    let mut dv = xi / s;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        c *= -(xi - 2.0 * kf + 2.0) * (xi - 2.0 * kf + 1.0) / (2.0 * kf);
        p *= inv2;
        let term = c * p;
        if term.abs() >= last || term == 0.0 {
            break;
        }
        v += term;
        dv += term * (xi - 2.0 * kf) / s;
        last = term.abs();
        if last < 1e-18 * v.abs() {
            break;
        }
    }
    (v, dv)
}

fn nearest_integer(xi: f64) -> Option<u32> {
    let n = xi.round();
    (n >= 0.0 && (xi - n).abs() < INTEGER_TOL).then_some(n as u32)
}

pub fn weber_analysis(xi: f64) -> WeberSolution {
    if let Some(n) = nearest_integer(xi) {
        return WeberSolution {
            xi,
            polynomial: true,
            zero_count: hermite_zero_count(n),
            growth_class: GrowthClass::AlgebraicBoth,
        };
    }
    let x_max = WEBER_WINDOW;
    let (v0, dv0) = algebraic_series(xi, x_max);
    let rhs = |x: f64, y: &[f64; 2]| [y[1], x * y[1] - xi * y[0]];
    let g = |_: f64, y: &[f64; 2]| y[0];
    let events = [Event {
        tag: "zero",
        g: &g,
        direction: Direction::Any,
        terminal: false,
    }];
    let traj = integrate(rhs, [v0, -dv0], (-x_max, x_max), &Options::default().no_record(), &events);
    let (zero_count, growth_class) = match traj {
        Ok(t) => {
            let (_, y) = t.last();
            let slope = (y[1] / y[0]).abs();
            let class = if slope > 0.5 * x_max {
                GrowthClass::ExponentialFuture
            } else {
                GrowthClass::AlgebraicBoth
            };
            (t.event_points.len() as u32, class)
        }
        Err(_) => (0, GrowthClass::ExponentialFuture),
    };
    WeberSolution {
        xi,
        polynomial: false,
        zero_count,
        growth_class,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transversality {
    Transversal,
    Tangent,
}

/// Tangency test of the attracting and repelling manifolds along `l₂,which`.
pub fn variational_transversality(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    which: Branch,
    tol: f64,
) -> Result<Transversality> {
    let e = eigen_data(params)?;
    let line = invariant_line_k2(params, &e, which, 0.0);
    variational_transversality_with_f(params, f_of_w(line.w, phi), which, tol)
}

/// As [`variational_transversality`] with `f(w)` on the line given explicitly.
pub fn variational_transversality_with_f(
    params: &TwoFoldNormalForm,
    f_line: f64,
    which: Branch,
    tol: f64,
) -> Result<Transversality> {
    let e = eigen_data(params)?;
    let lambda = e.lambda(which);
    let other = match which {
        Branch::Plus => e.lambda_minus,
        Branch::Minus => e.lambda_plus,
    };
    if !(lambda < 0.0) || !(e.chi(which) < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no primary canard along {which:?}: λ = {lambda}, χ = {}",
            e.chi(which)
        )));
    }
    if !(f_line > 0.0) {
        return Err(Error::InvalidParameter(format!("f must be positive, got {f_line}")));
    }
    let (ab, abeta) = (params.abs_b(), params.abs_beta());
    let kappa = abeta * other / (ab * lambda);
    let a = -abeta * f_line / lambda;
    let nu = abeta * abeta * f_line / -lambda;
    let xi = other / lambda;
    let sq = nu.sqrt();
    let x_edge = WEBER_WINDOW / sq;
    let (v0, dv0) = algebraic_series(xi, WEBER_WINDOW);

    let rhs = |x2: f64, s: &[f64; 2]| {
        let [u, v] = *s;
        [a * (-ab * v + abeta * x2 * u), kappa * u]
    };
    let opts = Options::with_tol(1e-13, 1e-14).no_record();
    // dv/dx2 = √ν dv/dx̄ and u = (dv/dx2)/κ
    let past = integrate(rhs, [-sq * dv0 / kappa, v0], (-x_edge, 0.0), &opts, &[])?.last().1;
    let future = integrate(rhs, [sq * dv0 / kappa, v0], (x_edge, 0.0), &opts, &[])?.last().1;
    let w = past[1] * future[0] - future[1] * past[0];
    let norm = past[0].hypot(past[1]) * future[0].hypot(future[1]);
    Ok(if (w / norm).abs() < tol {
        Transversality::Tangent
    } else {
        Transversality::Transversal
    })
}
