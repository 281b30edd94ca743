//! Continuous tracking of critical points and critical values around the loop.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;

use super::assignment::min_cost_assignment;
use super::{critical_points_of_roots, phase_speed_from_roots, value_from_roots, CLUSTER_TOLERANCE};
use crate::braidword::Permutation;
use crate::curves::{ParamBraid, StrandFamily};
use crate::error::{Error, Result};

/// Samples used to estimate the tolerance scale `max_t max_j |z_j(t)|`.
const SCALE_SAMPLES: usize = 512;

/// Largest accepted gap between the trapezoid prediction and the measured phase step.
const PHASE_PREDICTION_SLACK: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct TrackOptions {
    /// Uniform sample count on the parameter interval before adaptive halving.
    pub grid: usize,
    /// Relative distance below which critical points are merged.
    pub cluster_tol: f64,
    /// Smallest step the halving may reach.
    pub step_floor: f64,
    /// A matching is ambiguous when the runner-up is closer than this factor.
    pub ambiguity_factor: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            grid: 4096,
            cluster_tol: CLUSTER_TOLERANCE,
            step_floor: TAU / (1u64 << 20) as f64,
            ambiguity_factor: 2.0,
        }
    }
}

/// All branches at one parameter value, in branch order.
#[derive(Clone, Debug)]
pub struct TrackSample {
    pub t: f64,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// Unwrapped `arg v`.
    pub phase: Vec<f64>,
    /// Analytic `d/dt arg v`.
    pub dphase: Vec<f64>,
    pub multiplicity: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CriticalTracks {
    pub samples: Vec<TrackSample>,
    /// Branch `p` at the end continues as branch `monodromy(p)` at the start
    /// (1-based). Present for closed loops only.
    pub monodromy: Option<Permutation>,
    pub scale: f64,
}

/// Tracks the critical points of `b` over `[0, 2π]`.
pub fn track(b: &ParamBraid, opts: &TrackOptions) -> Result<CriticalTracks> {
    track_family(b, 0.0, TAU, opts, true)
}

/// Tracks the critical points of any strand family over `[t0, t1]`.
///
/// With `periodic` the end configuration is matched back to the start to
/// produce the branch monodromy.
pub fn track_family<F: StrandFamily>(
    family: &F,
    t0: f64,
    t1: f64,
    opts: &TrackOptions,
    periodic: bool,
) -> Result<CriticalTracks> {
    if opts.grid < 64 {
        return Err(Error::Config(format!("grid {} is below the minimum of 64", opts.grid)));
    }
    if t1 <= t0 {
        return Err(Error::Config("empty tracking interval".into()));
    }
    let n = family.strand_count();
    let scale = (0..SCALE_SAMPLES)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / SCALE_SAMPLES as f64;
            family.positions(t).iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let tracker = Tracker { family, opts, scale, n };

    let first = tracker.cold_sample(t0)?;
    let mut samples = vec![first];
    let h = (t1 - t0) / opts.grid as f64;
    for k in 1..=opts.grid {
        let target = if k == opts.grid { t1 } else { t0 + h * k as f64 };
        tracker.advance(&mut samples, target)?;
    }

    let monodromy = if periodic { Some(tracker.monodromy(&samples[0], samples.last().unwrap())?) } else { None };
    Ok(CriticalTracks { samples, monodromy, scale })
}

/// Continues the branches of `start` through the increasing times `targets`,
/// keeping its branch order. Used to refine existing tracks locally.
pub fn continue_from<F: StrandFamily>(
    family: &F,
    start: &TrackSample,
    targets: &[f64],
    opts: &TrackOptions,
    scale: f64,
) -> Result<Vec<TrackSample>> {
    let tracker = Tracker { family, opts, scale, n: family.strand_count() };
    let mut samples = vec![start.clone()];
    for &t in targets {
        tracker.advance(&mut samples, t)?;
    }
    samples.remove(0);
    Ok(samples)
}

struct Tracker<'a, F> {
    family: &'a F,
    opts: &'a TrackOptions,
    scale: f64,
    n: usize,
}

/// Reasons a step may be retried with a smaller size.
enum StepError {
    Retry(String),
    Fatal(Error),
}

impl<F: StrandFamily> Tracker<'_, F> {
    fn strands(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z = vec![Complex64::default(); self.n];
        let mut dz = vec![Complex64::default(); self.n];
        self.family.sample(t, &mut z, &mut dz);
        (z, dz)
    }

    fn check_separation(&self, t: f64, z: &[Complex64]) -> Result<()> {
        let tol = 1e-12 * self.scale;
        for a in 0..z.len() {
            for b in 0..a {
                if (z[a] - z[b]).norm() <= tol {
                    return Err(Error::StrandCollision { t });
                }
            }
        }
        Ok(())
    }

    fn cold_sample(&self, t: f64) -> Result<TrackSample> {
        let (z, dz) = self.strands(t);
        self.check_separation(t, &z)?;
        let set = critical_points_of_roots(&z, None, self.scale, self.opts.cluster_tol)?;
        let values: Vec<Complex64> = set.points.iter().map(|&c| value_from_roots(&z, c)).collect();
        if values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::StrandCollision { t });
        }
        Ok(TrackSample {
            t,
            dphase: set.points.iter().map(|&c| phase_speed_from_roots(&z, &dz, c)).collect(),
            phase: values.iter().map(|v| v.arg()).collect(),
            points: set.points,
            values,
            multiplicity: set.multiplicity,
        })
    }

    /// Steps from the last sample to `target`, halving on rejection.
    fn advance(&self, samples: &mut Vec<TrackSample>, target: f64) -> Result<()> {
        let mut pending = vec![target];
        while let Some(&t) = pending.last() {
            let prev = samples.last().unwrap();
            match self.step(prev, t) {
                Ok(s) => {
                    samples.push(s);
                    pending.pop();
                }
                Err(StepError::Fatal(e)) => return Err(e),
                Err(StepError::Retry(reason)) => {
                    let half = 0.5 * (t - prev.t);
                    if half < self.opts.step_floor {
                        return Err(Error::TrackingFailure { t: prev.t, reason });
                    }
                    pending.push(prev.t + half);
                }
            }
        }
        Ok(())
    }

    fn step(&self, prev: &TrackSample, t: f64) -> std::result::Result<TrackSample, StepError> {
        let (z, dz) = self.strands(t);
        self.check_separation(t, &z).map_err(StepError::Fatal)?;
        let set = critical_points_of_roots(&z, Some(&prev.points), self.scale, self.opts.cluster_tol)
            .map_err(|e| StepError::Retry(e.to_string()))?;
        let order = self.match_points(&prev.points, &set.points)?;

        let m = order.len();
        let mut sample = TrackSample {
            t,
            points: Vec::with_capacity(m),
            values: Vec::with_capacity(m),
            phase: Vec::with_capacity(m),
            dphase: Vec::with_capacity(m),
            multiplicity: Vec::with_capacity(m),
        };
        let h = t - prev.t;
        for (p, &q) in order.iter().enumerate() {
            let c = set.points[q];
            let v = value_from_roots(&z, c);
            if v.norm() == 0.0 {
                return Err(StepError::Fatal(Error::StrandCollision { t }));
            }
            let speed = phase_speed_from_roots(&z, &dz, c);
            let predicted = 0.5 * h * (speed + prev.dphase[p]);
            let raw = v.arg() - prev.phase[p];
            let jump = raw - TAU * ((raw - predicted) / TAU).round();
            if jump.abs() >= 0.5 * PI {
                return Err(StepError::Retry(format!("phase step {jump:.3} on branch {}", p + 1)));
            }
            if (jump - predicted).abs() > PHASE_PREDICTION_SLACK {
                return Err(StepError::Retry(format!("phase step disagrees with its prediction on branch {}", p + 1)));
            }
            sample.points.push(c);
            sample.values.push(v);
            sample.phase.push(prev.phase[p] + jump);
            sample.dphase.push(speed);
            sample.multiplicity.push(set.multiplicity[q]);
        }
        Ok(sample)
    }

    /// Minimal-distance matching of `prev` (rows) to `next` (columns),
    /// rejected when a competing candidate is nearly as close.
    fn match_points(&self, prev: &[Complex64], next: &[Complex64]) -> std::result::Result<Vec<usize>, StepError> {
        let cost: Vec<Vec<f64>> = prev.iter().map(|a| next.iter().map(|b| (a - b).norm()).collect()).collect();
        let order = min_cost_assignment(&cost);
        let merge = self.opts.cluster_tol * self.scale;
        let still = 1e-12 * self.scale;
        for (p, &q) in order.iter().enumerate() {
            let d = cost[p][q];
            if d <= still {
                continue;
            }
            let rival = next
                .iter()
                .enumerate()
                .filter(|&(k, b)| k != q && (b - next[q]).norm() > merge)
                .map(|(k, _)| cost[p][k])
                .fold(f64::INFINITY, f64::min);
            if rival < self.opts.ambiguity_factor * d {
                return Err(StepError::Retry(format!("ambiguous continuation of branch {}", p + 1)));
            }
        }
        Ok(order)
    }

    fn monodromy(&self, start: &TrackSample, end: &TrackSample) -> Result<Permutation> {
        let cost: Vec<Vec<f64>> =
            end.points.iter().map(|a| start.points.iter().map(|b| (a - b).norm()).collect()).collect();
        let order = min_cost_assignment(&cost);
        let tol = 1e-6 * self.scale;
        for (p, &q) in order.iter().enumerate() {
            if cost[p][q] > tol {
                return Err(Error::TrackingFailure {
                    t: end.t,
                    reason: format!("branch {} does not close up (gap {:.3e})", p + 1, cost[p][q]),
                });
            }
        }
        Permutation::from_images(order.iter().map(|&q| q + 1).collect())
    }
}

impl CriticalTracks {
    pub fn branch_count(&self) -> usize {
        self.samples[0].points.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Phase change of one branch over the interval, in turns.
    pub fn winding(&self, branch: usize) -> f64 {
        let last = self.samples.last().unwrap();
        (last.phase[branch] - self.samples[0].phase[branch]) / TAU
    }

    /// `Σ_p` winding, which the monodromy gluing makes an integer.
    pub fn total_winding(&self) -> f64 {
        (0..self.branch_count()).map(|p| self.winding(p)).sum()
    }

    /// Minimum and maximum of the analytic phase speed over every branch.
    pub fn speed_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .flat_map(|s| s.dphase.iter().copied())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// `dφ/dt` by central differences of the unwrapped phase.
    ///
    /// Rows follow the samples and columns the branches. At the ends of a
    /// closed loop the neighbour sample is taken from the branch that the
    /// monodromy glues on, shifted by one period.
    pub fn phase_derivative(&self) -> Vec<Vec<f64>> {
        let s = &self.samples;
        let last = s.len() - 1;
        let m = self.branch_count();
        let mut out = vec![vec![0.0; m]; s.len()];
        for (k, row) in out.iter_mut().enumerate() {
            for (p, slot) in row.iter_mut().enumerate() {
                let here = (s[k].t, s[k].phase[p]);
                let before = if k > 0 {
                    Some((s[k - 1].t, s[k - 1].phase[p]))
                } else {
                    self.monodromy.as_ref().map(|mu| {
                        // the branch ending as `pre` continues as `p`
                        let pre = mu.inverse().apply(p + 1) - 1;
                        let shift = s[0].phase[p] - s[last].phase[pre];
                        (s[last - 1].t - TAU, s[last - 1].phase[pre] + shift)
                    })
                };
                let after = if k < last {
                    Some((s[k + 1].t, s[k + 1].phase[p]))
                } else {
                    self.monodromy.as_ref().map(|mu| {
                        let post = mu.apply(p + 1) - 1;
                        let shift = s[last].phase[p] - s[0].phase[post];
                        (s[1].t + TAU, s[1].phase[post] + shift)
                    })
                };
                *slot = match (before, after) {
                    (Some(a), Some(b)) => central(a, here, b),
                    (None, Some(b)) => (b.1 - here.1) / (b.0 - here.0),
                    (Some(a), None) => (here.1 - a.1) / (here.0 - a.0),
                    (None, None) => 0.0,
                };
            }
        }
        out
    }

    /// Rows `t,branch,re_c,im_c,re_v,im_v,phase,dphase_dt`, branches 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,branch,re_c,im_c,re_v,im_v,phase,dphase_dt\n");
        for s in &self.samples {
            for p in 0..s.points.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    s.t,
                    p + 1,
                    s.points[p].re,
                    s.points[p].im,
                    s.values[p].re,
                    s.values[p].im,
                    s.phase[p],
                    s.dphase[p]
                );
            }
        }
        out
    }
}

/// Second-order derivative estimate at the middle of three unevenly spaced points.
fn central(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (h1, h2) = (b.0 - a.0, c.0 - b.0);
    (h1 * h1 * (c.1 - b.1) + h2 * h2 * (b.1 - a.1)) / (h1 * h2 * (h1 + h2))
}
