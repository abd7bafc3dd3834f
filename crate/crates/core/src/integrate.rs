//! Adaptive Dormand–Prince 5(4) integrator with event location.
//!
//! Events are located by bisection on the fraction of the accepted step,
//! re-stepping from the left endpoint each time, until `|g| < EVENT_TOL`.

use crate::error::{Error, Result};

pub const EVENT_TOL: f64 = 1e-10;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Keep every accepted step in the trajectory.
    pub record: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            record: true,
        }
    }
}

impl Options {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn no_record(mut self) -> Self {
        self.record = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Increasing,
    Decreasing,
}

pub struct Event<'a, const N: usize> {
    pub tag: &'static str,
    pub g: &'a (dyn Fn(f64, &[f64; N]) -> f64 + Sync),
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn terminal(
        tag: &'static str,
        g: &'a (dyn Fn(f64, &[f64; N]) -> f64 + Sync),
        direction: Direction,
    ) -> Self {
        Self {
            tag,
            g,
            direction,
            terminal: true,
        }
    }

    fn triggered(&self, g0: f64, g1: f64) -> bool {
        let up = g0 < 0.0 && g1 >= 0.0;
        let down = g0 > 0.0 && g1 <= 0.0;
        match self.direction {
            Direction::Any => up || down,
            Direction::Increasing => up,
            Direction::Decreasing => down,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventPoint<const N: usize> {
    pub t: f64,
    pub state: [f64; N],
    pub tag: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub samples: Vec<(f64, [f64; N])>,
    pub event_points: Vec<EventPoint<N>>,
    /// Index into the event list of the terminal event that stopped the run.
    pub terminated_by: Option<usize>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        *self.samples.last().expect("trajectory has at least one sample")
    }
}

struct Stepper<'f, const N: usize, F> {
    rhs: &'f mut F,
    evals: usize,
}

impl<'f, const N: usize, F> Stepper<'f, N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    fn f(&mut self, t: f64, y: &[f64; N]) -> [f64; N] {
        self.evals += 1;
        (self.rhs)(t, y)
    }

    /// One step; returns (y_new, k7, error estimate vector).
    fn step(&mut self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N]) {
        let mut tmp = [0.0; N];
        for i in 0..N {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = self.f(t + C2 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = self.f(t + C3 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = self.f(t + C4 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = self.f(t + C5 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = self.f(t + h, &tmp);
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] =
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = self.f(t + h, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y_new, k7, err)
    }
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &Options) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        m = m.max((err[i] / sc).abs());
    }
    m
}

fn initial_step<const N: usize, F>(
    st: &mut Stepper<'_, N, F>,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &Options,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d0 = d0.max((y0[i] / sc).abs());
        d1 = d1.max((f0[i] / sc).abs());
    }
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y0[i] + dir * h0 * f0[i];
    }
    let f1 = st.f(t0 + dir * h0, &y1);
    let mut d2: f64 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d2 = d2.max(((f1[i] - f0[i]) / sc).abs() / h0);
    }
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6
    }
}

/// Integrate `y' = rhs(t, y)` from `t_span.0` to `t_span.1` (either direction).
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    opts: &Options,
    events: &[Event<'_, N>],
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let (t0, t_end) = t_span;
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut st = Stepper {
        rhs: &mut rhs,
        evals: 0,
    };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = st.f(t, &y);
    if !all_finite(&k1) {
        return Err(Error::StepFailure {
            t,
            state: y.to_vec(),
        });
    }
    let mut traj = Trajectory {
        samples: vec![(t, y)],
        event_points: Vec::new(),
        terminated_by: None,
    };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut h = opts
        .h_init
        .unwrap_or_else(|| initial_step(&mut st, t, &y, &k1, dir, opts))
        .min(opts.h_max)
        .min(span);

    for _ in 0..opts.max_steps {
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_min {
            return Err(Error::StepFailure {
                t,
                state: y.to_vec(),
            });
        }
        let (y_new, k7, err) = st.step(t, &y, &k1, dir * h);
        let norm = if all_finite(&y_new) && all_finite(&k7) {
            error_norm(&err, &y, &y_new, opts)
        } else {
            f64::INFINITY
        };
        if !(norm <= 1.0) {
            let fac = if norm.is_finite() {
                (0.9 * norm.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h *= fac;
            continue;
        }
        let t_new = if last { t_end } else { t + dir * h };

        let mut hit: Option<(usize, f64, [f64; N])> = None;
        let mut g_new = Vec::with_capacity(events.len());
        for (idx, ev) in events.iter().enumerate() {
            let g1 = (ev.g)(t_new, &y_new);
            g_new.push(g1);
            if ev.triggered(g_prev[idx], g1) {
                let (te, ye) = locate(&mut st, ev, t, &y, &k1, dir * (t_new - t).abs(), g_prev[idx]);
                traj.event_points.push(EventPoint {
                    t: te,
                    state: ye,
                    tag: ev.tag,
                });
                if ev.terminal {
                    let earlier = match hit {
                        None => true,
                        Some((_, th, _)) => (te - t).abs() < (th - t).abs(),
                    };
                    if earlier {
                        hit = Some((idx, te, ye));
                    }
                }
            }
        }
        if let Some((idx, te, ye)) = hit {
            traj.samples.push((te, ye));
            traj.terminated_by = Some(idx);
            return Ok(traj);
        }

        t = t_new;
        y = y_new;
        k1 = k7;
        g_prev = g_new;
        if opts.record || last {
            traj.samples.push((t, y));
        } else {
            traj.samples[0] = (t, y);
        }
        if last {
            return Ok(traj);
        }
        let fac = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * fac).min(opts.h_max);
    }
    Err(Error::StepFailure {
        t,
        state: y.to_vec(),
    })
}

fn locate<const N: usize, F>(
    st: &mut Stepper<'_, N, F>,
    ev: &Event<'_, N>,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    g0: f64,
) -> (f64, [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = {
        let (y1, _, _) = st.step(t, y, k1, h);
        (t + h, y1)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (ym, _, _) = st.step(t, y, k1, mid * h);
        let tm = t + mid * h;
        let gm = (ev.g)(tm, &ym);
        if gm.abs() < EVENT_TOL {
            return (tm, ym);
        }
        if (gm < 0.0) == (g0 < 0.0) && gm != 0.0 {
            lo = mid;
        } else {
            hi = mid;
            best = (tm, ym);
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let traj = integrate(|_, y: &[f64; 1]| [-y[0]], [2.0], (0.0, 1.0), &Options::default(), &[])
            .unwrap();
        let (t, y) = traj.last();
        assert_eq!(t, 1.0);
        assert!((y[0] - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn backward_in_time() {
        let traj = integrate(|_, y: &[f64; 1]| [-y[0]], [1.0], (0.0, -1.0), &Options::default(), &[])
            .unwrap();
        let (t, y) = traj.last();
        assert_eq!(t, -1.0);
        assert!((y[0] - 1.0f64.exp()).abs() < 1e-9);
        assert!(traj.samples.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn linear_crossing_event() {
        let g = |_: f64, y: &[f64; 2]| y[1];
        let ev = [Event::terminal("z", &g, Direction::Increasing)];
        let traj = integrate(
            |_, _: &[f64; 2]| [1.0, 0.5],
            [0.0, -1.3],
            (0.0, 100.0),
            &Options::default(),
            &ev,
        )
        .unwrap();
        assert_eq!(traj.terminated_by, Some(0));
        let p = &traj.event_points[0];
        assert!((p.t - 2.6).abs() < 1e-10);
        assert!(p.state[1].abs() < EVENT_TOL);
    }

    #[test]
    fn direction_filter() {
        let g = |_: f64, y: &[f64; 1]| y[0];
        let ev = [Event::terminal("down", &g, Direction::Decreasing)];
        let traj = integrate(|_, _: &[f64; 1]| [1.0], [-1.0], (0.0, 3.0), &Options::default(), &ev)
            .unwrap();
        assert_eq!(traj.terminated_by, None);
        assert_eq!(traj.last().0, 3.0);
    }

    #[test]
    fn blow_up_is_a_step_failure() {
        let r = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], [1.0], (0.0, 2.0), &Options::default(), &[]);
        assert!(matches!(r, Err(Error::StepFailure { .. })));
    }
}
