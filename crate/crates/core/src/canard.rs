//! Numerical search for canards in the scaling chart κ₂ at `r₂ = 0`.
//!
//! The attracting centre manifold is traced from seeds
//! `x₂ = -1/√δ, z₂ = z₁/√δ, w = -|b| z₁/|β|` to the section `z₂ = 0`; the
//! repelling one from the reflected seeds in backward time. Crossings of the
//! two section curves are canards.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::twofold::{chart_k2_rhs, ChartK2State};
use crate::error::{Error, Result};
use crate::integrate::{integrate, Direction, Event, Options, Trajectory};
use crate::pws::TwoFoldNormalForm;
use crate::regularization::{y_of_w, RegularizationFunction};
use crate::twofold::{case_classify, eigen_data, CaseClass, EigenData};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HuntOptions {
    pub delta: f64,
    pub rtol: f64,
    pub atol: f64,
    pub trust_radius: f64,
    pub t_max: f64,
    pub angle_tol: f64,
    /// Crossings closer than this to the weak canard point are the weak canard.
    pub weak_merge_radius: f64,
    /// Crossings closer than this to the strong canard point are the strong canard.
    pub strong_radius: f64,
    pub refine_steps: usize,
    /// Section curves are refined until chords are shorter than this.
    pub max_chord: f64,
    /// Largest turning angle between successive chords, radians.
    pub max_turn: f64,
    /// Chords shorter than this are never split for turning.
    pub min_chord: f64,
    pub max_points: usize,
}

impl Default for HuntOptions {
    fn default() -> Self {
        Self {
            delta: 0.01,
            rtol: 1e-10,
            atol: 1e-10,
            trust_radius: 50.0,
            t_max: 1e3,
            angle_tol: 1e-3,
            weak_merge_radius: 1e-6,
            strong_radius: 1e-3,
            refine_steps: 60,
            max_chord: 2e-2,
            max_turn: 0.2,
            min_chord: 1e-6,
            max_points: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectionSource {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub seed: f64,
    pub x2: f64,
    pub y: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionCurve {
    pub points: Vec<SectionPoint>,
    pub source: SectionSource,
    pub params: TwoFoldNormalForm,
    /// Seeds whose orbit failed to reach the section, with the reason.
    pub failed: Vec<(f64, String)>,
}

impl SectionCurve {
    /// Image under `(x2, y) ↦ (-x2, y)`, labelled with the other source.
    pub fn mirrored(&self) -> SectionCurve {
        SectionCurve {
            points: self
                .points
                .iter()
                .map(|p| SectionPoint { x2: -p.x2, ..*p })
                .collect(),
            source: match self.source {
                SectionSource::Attracting => SectionSource::Repelling,
                SectionSource::Repelling => SectionSource::Attracting,
            },
            params: self.params,
            failed: self.failed.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanardKind {
    Strong,
    Weak,
    Secondary(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub point: (f64, f64),
    pub transversal: bool,
    pub crossing_angle: f64,
    pub rotation_count: u32,
    pub kind: CanardKind,
    pub seed_attracting: f64,
    pub seed_repelling: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CanardReport {
    pub intersections: Vec<Intersection>,
}

impl CanardReport {
    /// Transversal crossings other than the weak canard.
    pub fn transversal_count(&self) -> usize {
        self.intersections
            .iter()
            .filter(|i| i.transversal && i.kind != CanardKind::Weak)
            .count()
    }

    pub fn strong(&self) -> Option<&Intersection> {
        self.intersections.iter().find(|i| i.kind == CanardKind::Strong)
    }

    pub fn weak(&self) -> Option<&Intersection> {
        self.intersections.iter().find(|i| i.kind == CanardKind::Weak)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntResult {
    pub attracting: SectionCurve,
    pub repelling: SectionCurve,
    pub report: CanardReport,
}

/// Seeds in `z₁` clustered geometrically toward every `χ± < 0`.
pub fn default_seed_grid(eigen: &EigenData, n: usize) -> Vec<f64> {
    let mut anchors: Vec<f64> = [eigen.chi_plus, eigen.chi_minus]
        .into_iter()
        .filter(|c| *c < 0.0)
        .collect();
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    if anchors.is_empty() {
        return Vec::new();
    }
    let lo = 4.0 * anchors[0];
    let hi = 0.2 * anchors[anchors.len() - 1];
    let base_n = n / 4;
    let per_side = (n - base_n) / (2 * anchors.len());
    let mut seeds = geomspace(-hi, -lo, base_n)
        .into_iter()
        .map(|a| -a)
        .collect::<Vec<_>>();
    for (i, &a) in anchors.iter().enumerate() {
        let left_end = if i == 0 { lo } else { 0.5 * (anchors[i - 1] + a) };
        let right_end = if i + 1 == anchors.len() {
            hi
        } else {
            0.5 * (anchors[i + 1] + a)
        };
        let inner = 1e-7 * a.abs();
        for d in geomspace(inner, a - left_end, per_side) {
            seeds.push(a - d);
        }
        for d in geomspace(inner, right_end - a, per_side) {
            seeds.push(a + d);
        }
    }
    seeds.retain(|s| *s >= lo && *s <= hi);
    seeds.sort_by(f64::total_cmp);
    seeds.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    seeds
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 || !(a > 0.0 && b > 0.0) {
        return Vec::new();
    }
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub struct CanardHunter {
    pub params: TwoFoldNormalForm,
    pub phi: RegularizationFunction,
    pub eigen: EigenData,
    pub opts: HuntOptions,
}

impl CanardHunter {
    pub fn new(
        params: TwoFoldNormalForm,
        phi: RegularizationFunction,
        opts: HuntOptions,
    ) -> Result<Self> {
        params.validate()?;
        let case = case_classify(&params);
        if !matches!(case, CaseClass::N | CaseClass::S) {
            return Err(Error::Degenerate(format!("canard search needs case N or S, got {case:?}")));
        }
        let eigen = eigen_data(&params)?;
        if !(eigen.chi_plus < 0.0 || eigen.chi_minus < 0.0) {
            return Err(Error::InvalidParameter(
                "no eigendirection enters the stable sliding region".into(),
            ));
        }
        if !(opts.delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", opts.delta)));
        }
        Ok(Self {
            params,
            phi,
            eigen,
            opts,
        })
    }

    pub fn default_grid(&self, n: usize) -> Vec<f64> {
        default_seed_grid(&self.eigen, n)
    }

    /// Section point of the canard along `v±` when `χ± < 0`.
    fn line_point(&self, chi: f64) -> Option<(f64, f64)> {
        (chi < 0.0).then(|| (0.0, y_of_w(-self.params.abs_b() * chi / self.params.abs_beta(), &self.phi)))
    }

    pub fn weak_point(&self) -> Option<(f64, f64)> {
        self.line_point(self.eigen.chi_plus)
    }

    pub fn strong_point(&self) -> Option<(f64, f64)> {
        self.line_point(self.eigen.chi_minus)
    }

    /// Seed `(x2, w, z2)` on the attracting manifold; reflected for the repelling one.
    pub fn seed_state(&self, z1: f64, source: SectionSource) -> [f64; 3] {
        let q = self.opts.delta.sqrt();
        let w = -self.params.abs_b() * z1 / self.params.abs_beta();
        match source {
            SectionSource::Attracting => [-1.0 / q, w, z1 / q],
            SectionSource::Repelling => [1.0 / q, w, -z1 / q],
        }
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
        move |_, s| {
            let d = chart_k2_rhs(
                &self.params,
                &self.phi,
                &ChartK2State {
                    x2: s[0],
                    w: s[1],
                    z2: s[2],
                    r2: 0.0,
                },
            );
            [d.x2, d.w, d.z2]
        }
    }

    fn integrate_to_section(
        &self,
        z1: f64,
        source: SectionSource,
        record: bool,
        tol_scale: f64,
    ) -> Result<Trajectory<3>> {
        if !(z1 < 0.0) {
            return Err(Error::InvalidParameter(format!("seed z1 must be negative, got {z1}")));
        }
        let r = self.opts.trust_radius;
        let section = |_: f64, s: &[f64; 3]| s[2];
        let trust = move |_: f64, s: &[f64; 3]| r - s[0].abs().max(s[2].abs());
        let events = [
            Event::terminal("section", &section, Direction::Any),
            Event::terminal("trust", &trust, Direction::Decreasing),
        ];
        let mut opts = Options::with_tol(self.opts.rtol * tol_scale, self.opts.atol * tol_scale);
        opts.record = record;
        let t_end = match source {
            SectionSource::Attracting => self.opts.t_max,
            SectionSource::Repelling => -self.opts.t_max,
        };
        let traj = integrate(self.rhs(), self.seed_state(z1, source), (0.0, t_end), &opts, &events)?;
        match traj.terminated_by {
            Some(0) => Ok(traj),
            _ => Err(Error::NoCrossing),
        }
    }

    fn section_point(&self, z1: f64, source: SectionSource, tol_scale: f64) -> Result<SectionPoint> {
        let traj = self.integrate_to_section(z1, source, false, tol_scale)?;
        let (_, s) = traj.last();
        Ok(SectionPoint {
            seed: z1,
            x2: s[0],
            y: y_of_w(s[1], &self.phi),
            w: s[1],
        })
    }

    /// Trace one seed to the section `z₂ = 0`.
    pub fn trace_seed(&self, z1: f64, source: SectionSource) -> Result<SectionPoint> {
        self.section_point(z1, source, 1.0)
    }

    /// Full orbit `(x2, w, z2)` from a seed to the section.
    pub fn seed_trajectory(&self, z1: f64, source: SectionSource) -> Result<Trajectory<3>> {
        self.integrate_to_section(z1, source, true, 1.0)
    }

    fn trace_section(&self, z1_grid: &[f64], source: SectionSource, tol_scale: f64) -> SectionCurve {
        let trace_all = |seeds: &[f64]| -> Vec<Result<SectionPoint>> {
            seeds
                .par_iter()
                .map(|&z1| self.section_point(z1, source, tol_scale))
                .collect()
        };
        let mut seeds: Vec<f64> = z1_grid.to_vec();
        seeds.sort_by(f64::total_cmp);
        let mut results = trace_all(&seeds);
        while seeds.len() < self.opts.max_points {
            let inserts = self.refinement_seeds(&seeds, &results);
            if inserts.is_empty() {
                break;
            }
            let fresh = trace_all(&inserts);
            let mut merged: Vec<(f64, Result<SectionPoint>)> = seeds
                .into_iter()
                .zip(results)
                .chain(inserts.into_iter().zip(fresh))
                .collect();
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            (seeds, results) = merged.into_iter().unzip();
        }
        let mut points = Vec::with_capacity(results.len());
        let mut failed = Vec::new();
        for (z1, r) in seeds.iter().zip(results) {
            match r {
                Ok(p) => points.push(p),
                Err(e) => failed.push((*z1, e.to_string())),
            }
        }
        SectionCurve {
            points,
            source,
            params: self.params,
            failed,
        }
    }

    /// Midpoints of seed intervals whose chord is too long or turns too sharply.
    fn refinement_seeds(&self, seeds: &[f64], results: &[Result<SectionPoint>]) -> Vec<f64> {
        let pt = |i: usize| results[i].as_ref().ok().map(|p| (p.x2, p.y));
        let splittable = |i: usize| (seeds[i + 1] - seeds[i]).abs() > 1e-12 * seeds[i].abs().max(1e-300);
        let mut flag = vec![false; seeds.len().saturating_sub(1)];
        for i in 0..flag.len() {
            if let (Some(p), Some(q)) = (pt(i), pt(i + 1)) {
                if dist(p, q) > self.opts.max_chord {
                    flag[i] = true;
                }
                if i + 2 < seeds.len() {
                    if let Some(r) = pt(i + 2).filter(|r| dist(p, q).min(dist(q, *r)) > self.opts.min_chord) {
                        let u = (q.0 - p.0, q.1 - p.1);
                        let v = (r.0 - q.0, r.1 - q.1);
                        let turn = (u.0 * v.1 - u.1 * v.0).atan2(u.0 * v.0 + u.1 * v.1).abs();
                        if turn > self.opts.max_turn {
                            flag[i] = true;
                            flag[i + 1] = true;
                        }
                    }
                }
            }
        }
        let budget = self.opts.max_points.saturating_sub(seeds.len());
        (0..flag.len())
            .filter(|&i| flag[i] && splittable(i))
            .map(|i| 0.5 * (seeds[i] + seeds[i + 1]))
            .take(budget)
            .collect()
    }

    pub fn trace_attracting_section(&self, z1_grid: &[f64]) -> SectionCurve {
        self.trace_section(z1_grid, SectionSource::Attracting, 1.0)
    }

    /// Reflected seeds integrated in backward time.
    pub fn trace_repelling_section(&self, z1_grid: &[f64]) -> SectionCurve {
        self.trace_section(z1_grid, SectionSource::Repelling, 1.0)
    }

    /// Canard orbit: attracting half then the time-reversed repelling half.
    pub fn canard_trajectory(&self, seed_attracting: f64, seed_repelling: f64) -> Result<Trajectory<3>> {
        let first = self.seed_trajectory(seed_attracting, SectionSource::Attracting)?;
        let second = self.seed_trajectory(seed_repelling, SectionSource::Repelling)?;
        let t_mid = first.last().0;
        let t_back = second.last().0;
        let mut samples = first.samples;
        for &(t, s) in second.samples.iter().rev().skip(1) {
            samples.push((t_mid + (t - t_back), s));
        }
        Ok(Trajectory {
            samples,
            event_points: first.event_points,
            terminated_by: None,
        })
    }

    pub fn hunt(&self, z1_grid: &[f64]) -> HuntResult {
        let attracting = self.trace_attracting_section(z1_grid);
        let repelling = self.trace_repelling_section(z1_grid);
        let report = self.find_intersections(&attracting, &repelling);
        HuntResult {
            attracting,
            repelling,
            report,
        }
    }

    /// Crossings of two section curves, refined by bisection on the seeds.
    pub fn find_intersections(&self, a: &SectionCurve, b: &SectionCurve) -> CanardReport {
        self.find_intersections_with(a, b, 1.0, true)
    }

    fn find_intersections_with(
        &self,
        a: &SectionCurve,
        b: &SectionCurve,
        tol_scale: f64,
        with_rotations: bool,
    ) -> CanardReport {
        let raw = raw_crossings(&a.points, &b.points);
        let weak = self.weak_point();
        let near_weak = |p: (f64, f64)| weak.is_some_and(|w| dist(p, w) < self.opts.weak_merge_radius);

        let mut weak_hit: Option<Intersection> = None;
        let mut to_refine = Vec::new();
        for c in raw {
            if near_weak(c.point) {
                let better = weak_hit.is_none_or(|h| dist(c.point, weak.unwrap()) < dist(h.point, weak.unwrap()));
                if better {
                    weak_hit = Some(Intersection {
                        point: c.point,
                        transversal: false,
                        crossing_angle: c.angle,
                        rotation_count: 0,
                        kind: CanardKind::Weak,
                        seed_attracting: c.seeds_a.0,
                        seed_repelling: c.seeds_b.0,
                    });
                }
            } else {
                to_refine.push(c);
            }
        }

        let refined: Vec<Option<Intersection>> = to_refine
            .par_iter()
            .map(|c| self.refine(c, a.source, b.source, tol_scale, with_rotations))
            .collect();

        let mut out: Vec<Intersection> = Vec::new();
        for r in refined.into_iter().flatten() {
            if near_weak(r.point) {
                if weak_hit.is_none() {
                    weak_hit = Some(Intersection {
                        kind: CanardKind::Weak,
                        transversal: false,
                        rotation_count: 0,
                        ..r
                    });
                }
                continue;
            }
            if out.iter().any(|o| dist(o.point, r.point) < 1e-8) {
                continue;
            }
            out.push(r);
        }
        if let Some(w) = weak_hit {
            out.push(w);
        }
        out.sort_by(|p, q| q.point.1.total_cmp(&p.point.1));
        CanardReport { intersections: out }
    }

    fn refine(
        &self,
        c: &RawCrossing,
        src_a: SectionSource,
        src_b: SectionSource,
        tol_scale: f64,
        with_rotations: bool,
    ) -> Option<Intersection> {
        let trace = |s: f64, src| self.section_point(s, src, tol_scale).ok().map(|p| (p.x2, p.y));
        let (mut sa, mut sb) = (c.seeds_a, c.seeds_b);
        let (mut pa, mut pb) = (c.seg_a, c.seg_b);
        let h_a = 0.25 * (sa.1 - sa.0).abs();
        let h_b = 0.25 * (sb.1 - sb.0).abs();
        let mut point = c.point;
        let mut frac = c.frac;
        for _ in 0..self.opts.refine_steps {
            if (sa.1 - sa.0).abs() <= 1e-13 * sa.0.abs() && (sb.1 - sb.0).abs() <= 1e-13 * sb.0.abs() {
                break;
            }
            let ma = 0.5 * (sa.0 + sa.1);
            let mb = 0.5 * (sb.0 + sb.1);
            let qa = trace(ma, src_a)?;
            let qb = trace(mb, src_b)?;
            let halves_a = [((sa.0, ma), (pa.0, qa)), ((ma, sa.1), (qa, pa.1))];
            let halves_b = [((sb.0, mb), (pb.0, qb)), ((mb, sb.1), (qb, pb.1))];
            let mut found = None;
            'outer: for ha in &halves_a {
                for hb in &halves_b {
                    if let Some((p, f)) = segment_intersection(ha.1 .0, ha.1 .1, hb.1 .0, hb.1 .1) {
                        found = Some((*ha, *hb, p, f));
                        break 'outer;
                    }
                }
            }
            let Some((ha, hb, p, f)) = found else { break };
            sa = ha.0;
            pa = ha.1;
            sb = hb.0;
            pb = hb.1;
            point = p;
            frac = f;
        }
        let seed_a = sa.0 + frac.0 * (sa.1 - sa.0);
        let seed_b = sb.0 + frac.1 * (sb.1 - sb.0);
        let tangent = |s: f64, h: f64, src| -> Option<(f64, f64)> {
            let p = trace(s + h, src)?;
            let m = trace(s - h, src)?;
            Some((p.0 - m.0, p.1 - m.1))
        };
        let ta = tangent(seed_a, h_a, src_a)?;
        let tb = tangent(seed_b, h_b, src_b)?;
        let cross = ta.0 * tb.1 - ta.1 * tb.0;
        let dot = ta.0 * tb.0 + ta.1 * tb.1;
        let angle = cross.abs().atan2(dot.abs());
        let rotation_count = if with_rotations {
            let (sat, sre) = match src_a {
                SectionSource::Attracting => (seed_a, seed_b),
                SectionSource::Repelling => (seed_b, seed_a),
            };
            self.canard_trajectory(sat, sre)
                .map(|t| rotation_count(&t, &self.params, &self.phi))
                .unwrap_or(0)
        } else {
            0
        };
        let kind = match self.strong_point() {
            Some(s) if dist(point, s) < self.opts.strong_radius => CanardKind::Strong,
            _ => CanardKind::Secondary(rotation_count),
        };
        Some(Intersection {
            point,
            transversal: angle > self.opts.angle_tol,
            crossing_angle: angle,
            rotation_count,
            kind,
            seed_attracting: seed_a,
            seed_repelling: seed_b,
        })
    }

    /// Number of transversal canards other than the weak one.
    pub fn canard_count(&self, z1_grid: &[f64], tol_scale: f64) -> usize {
        let a = self.trace_section(z1_grid, SectionSource::Attracting, tol_scale);
        let b = self.trace_section(z1_grid, SectionSource::Repelling, tol_scale);
        self.find_intersections_with(&a, &b, tol_scale, false)
            .transversal_count()
    }
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

type Pt = (f64, f64);

struct RawCrossing {
    point: Pt,
    angle: f64,
    seeds_a: (f64, f64),
    seeds_b: (f64, f64),
    seg_a: (Pt, Pt),
    seg_b: (Pt, Pt),
    frac: (f64, f64),
}

/// Intersection of segments `p0p1` and `q0q1`, half-open at the far ends.
fn segment_intersection(p0: Pt, p1: Pt, q0: Pt, q1: Pt) -> Option<(Pt, (f64, f64))> {
    let r = (p1.0 - p0.0, p1.1 - p0.1);
    let s = (q1.0 - q0.0, q1.1 - q0.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let d = (q0.0 - p0.0, q0.1 - p0.1);
    let t = (d.0 * s.1 - d.1 * s.0) / den;
    let u = (d.0 * r.1 - d.1 * r.0) / den;
    if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
        Some(((p0.0 + t * r.0, p0.1 + t * r.1), (t, u)))
    } else {
        None
    }
}

fn raw_crossings(a: &[SectionPoint], b: &[SectionPoint]) -> Vec<RawCrossing> {
    let bbox = |p: &SectionPoint, q: &SectionPoint| {
        (p.x2.min(q.x2), p.x2.max(q.x2), p.y.min(q.y), p.y.max(q.y))
    };
    let b_boxes: Vec<_> = b.windows(2).map(|w| bbox(&w[0], &w[1])).collect();
    let mut out = Vec::new();
    for (i, wa) in a.windows(2).enumerate() {
        let ba = bbox(&wa[0], &wa[1]);
        for (j, wb) in b.windows(2).enumerate() {
            let bb = b_boxes[j];
            if ba.1 < bb.0 || bb.1 < ba.0 || ba.3 < bb.2 || bb.3 < ba.2 {
                continue;
            }
            let (p0, p1) = ((wa[0].x2, wa[0].y), (wa[1].x2, wa[1].y));
            let (q0, q1) = ((wb[0].x2, wb[0].y), (wb[1].x2, wb[1].y));
            if let Some((pt, frac)) = segment_intersection(p0, p1, q0, q1) {
                let r = (p1.0 - p0.0, p1.1 - p0.1);
                let s = (q1.0 - q0.0, q1.1 - q0.1);
                let angle = (r.0 * s.1 - r.1 * s.0).abs().atan2((r.0 * s.0 + r.1 * s.1).abs());
                out.push(RawCrossing {
                    point: pt,
                    angle,
                    seeds_a: (a[i].seed, a[i + 1].seed),
                    seeds_b: (b[j].seed, b[j + 1].seed),
                    seg_a: (p0, p1),
                    seg_b: (q0, q1),
                    frac,
                });
            }
        }
    }
    out
}

/// Half-turns of `(u, v) = (-χ₊x₂ - z₂, y - y_weak)` about the origin, halved.
pub fn rotation_count(
    trajectory: &Trajectory<3>,
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
) -> u32 {
    let Ok(e) = eigen_data(params) else { return 0 };
    if !(e.chi_plus < 0.0) {
        return 0;
    }
    let y_weak = y_of_w(-params.abs_b() * e.chi_plus / params.abs_beta(), phi);
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for (_, s) in &trajectory.samples {
        let u = -e.chi_plus * s[0] - s[2];
        let v = y_of_w(s[1], phi) - y_weak;
        let th = v.atan2(u);
        if let Some(p) = prev {
            let mut d = th - p;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
        }
        prev = Some(th);
    }
    let half_turns = (total.abs() / std::f64::consts::PI).floor() as u32;
    half_turns / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub xi: f64,
    pub lower: f64,
    pub upper: f64,
    pub count_before: usize,
    pub count_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub samples: Vec<(f64, usize)>,
    pub bifurcations: Vec<Bifurcation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub step: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub xi_tol: f64,
    pub grid_points: usize,
    /// Integrator tolerance factor used while refining a change point.
    pub refine_tol_scale: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            step: 0.25,
            xi_tol: 1e-3,
            grid_points: 800,
            refine_tol_scale: 0.1,
        }
    }
}

/// Scan a one-parameter family for changes in the canard count.
pub fn bifurcation_sweep<F>(
    family: F,
    phi: &RegularizationFunction,
    xi_range: (f64, f64),
    opts: &SweepOptions,
    hunt: &HuntOptions,
) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<TwoFoldNormalForm> + Sync,
{
    let (lo, hi) = xi_range;
    if !(lo > 1.0 && hi > lo && opts.step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sweep range must satisfy 1 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let count = |xi: f64, tol_scale: f64| -> Result<usize> {
        let h = CanardHunter::new(family(xi)?, phi.clone(), *hunt)?;
        let grid = h.default_grid(opts.grid_points);
        Ok(h.canard_count(&grid, tol_scale))
    };
    let n = ((hi - lo) / opts.step).round().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + opts.step * i as f64 })
        .collect();
    let counts = xs
        .par_iter()
        .map(|&xi| count(xi, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<(f64, usize)> = xs.iter().copied().zip(counts.iter().copied()).collect();

    let brackets: Vec<(usize, usize)> = (0..n).filter(|&i| counts[i] != counts[i + 1]).map(|i| (i, i + 1)).collect();
    let bifurcations = brackets
        .par_iter()
        .map(|&(i, j)| {
            let (mut a, mut b) = (xs[i], xs[j]);
            let (ca, cb) = (counts[i], counts[j]);
            while b - a > opts.xi_tol {
                let m = 0.5 * (a + b);
                let cm = count(m, opts.refine_tol_scale)?;
                if cm == ca {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(Bifurcation {
                xi: 0.5 * (a + b),
                lower: a,
                upper: b,
                count_before: ca,
                count_after: cb,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        samples,
        bifurcations,
    })
}
