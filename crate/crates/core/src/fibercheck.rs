//! Fibration test on the critical-value phases, the small-`eps` limit terms
//! of satellite braids, and the twist shift of phase speeds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::braidword::{x_word, BraidWord};
use crate::curves::{satellite, ParamBraid, Reparametrized, StrandFamily, StrandLabel, SEPARATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::polyloop::{
    continue_from, critical_points_of_roots, phase_speed_from_roots, track, track_family, TrackOptions,
    TrackSample, CLUSTER_TOLERANCE,
};

/// Sub-steps per refinement window.
const REFINE_STEPS: usize = 16;
/// Successive zooms into a refinement window.
const REFINE_DEPTH: usize = 3;
/// Tie tolerance of the strict inequality in the power bound.
const POWER_TIE: f64 = 1e-9;
/// Smallest companion phase speed accepted as nonvanishing.
const MIN_COMPANION_SPEED: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub grid: usize,
    pub margin: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { grid: 4096, margin: 1e-4 }
    }
}

impl CheckOptions {
    fn validate(&self) -> Result<()> {
        if self.grid < 64 {
            return Err(Error::Config(format!("grid {} is below the minimum of 64", self.grid)));
        }
        if self.margin.is_nan() || self.margin <= 0.0 {
            return Err(Error::Config(format!("margin must be positive, got {}", self.margin)));
        }
        Ok(())
    }

    fn tracking(&self) -> TrackOptions {
        TrackOptions { grid: self.grid, ..TrackOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchSummary {
    /// Smallest `dφ/dt` on the branch.
    pub min: f64,
    pub argmin_t: f64,
    pub max: f64,
    pub min_abs: f64,
    pub argmin_abs_t: f64,
    /// Phase change over the loop, in turns.
    pub winding: f64,
    /// Interpolated parameters where `dφ/dt` changes sign.
    pub sign_changes: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NearZero {
    pub branch: usize,
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FibrationReport {
    pub verdict: Verdict,
    pub margin: f64,
    pub grid: usize,
    pub branches: Vec<BranchSummary>,
    /// One entry per run of samples below the margin, at its smallest value.
    pub near_zero: Vec<NearZero>,
    pub total_winding: f64,
}

impl FibrationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `min_p min_t |dφ_p/dt|`, infinite without branches.
    pub fn min_abs(&self) -> f64 {
        self.branches.iter().map(|b| b.min_abs).fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Tracks all critical values of `b` and tests that none of their phase
/// speeds vanishes or changes sign.
///
/// Sample windows where a speed comes within twice the margin of zero (as
/// sampled, or by parabolic extrapolation through a local minimum of its
/// modulus) or changes sign are re-tracked on finer sub-grids.
pub fn check(b: &ParamBraid, opts: &CheckOptions) -> Result<FibrationReport> {
    opts.validate()?;
    let topts = opts.tracking();
    let tracks = track(b, &topts)?;
    let samples = &tracks.samples;
    let m = tracks.branch_count();

    let windows: Vec<(usize, usize, usize)> =
        (0..m).flat_map(|p| refinement_windows(samples, p, opts.margin).into_iter().map(move |(a, z)| (p, a, z))).collect();
    let extra: Vec<(usize, Vec<(f64, f64)>)> = windows
        .par_iter()
        .map(|&(p, a, z)| refine(b, samples, p, a, z, &topts, tracks.scale).map(|pts| (p, pts)))
        .collect::<Result<_>>()?;

    let mut branches = Vec::with_capacity(m);
    let mut near_zero = Vec::new();
    for p in 0..m {
        let mut series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.dphase[p])).collect();
        for (q, pts) in &extra {
            if *q == p {
                series.extend_from_slice(pts);
            }
        }
        series.sort_by(|x, y| x.0.total_cmp(&y.0));
        series.dedup_by(|x, y| x.0 == y.0);
        branches.push(summarize(&series, tracks.winding(p)));
        collect_near_zero(&series, p, opts.margin, &mut near_zero);
    }
    let pass = branches.iter().all(|b| b.min_abs >= opts.margin && b.sign_changes.is_empty());
    Ok(FibrationReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        margin: opts.margin,
        grid: opts.grid,
        branches,
        near_zero,
        total_winding: tracks.total_winding(),
    })
}

/// Sample index windows `(a, z)` worth refining for branch `p`.
fn refinement_windows(samples: &[TrackSample], p: usize, margin: f64) -> Vec<(usize, usize)> {
    let d: Vec<f64> = samples.iter().map(|s| s.dphase[p]).collect();
    let last = d.len() - 1;
    let threshold = 2.0 * margin;
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut push = |a: usize, z: usize| {
        if let Some(prev) = out.last_mut() {
            if a <= prev.1 {
                prev.1 = prev.1.max(z);
                return;
            }
        }
        out.push((a, z));
    };
    for k in 0..=last {
        let flagged = d[k].abs() < threshold
            || (k < last && d[k] * d[k + 1] < 0.0)
            || (k > 0 && k < last && extrapolated_min(d[k - 1], d[k], d[k + 1]) < threshold);
        if flagged {
            push(k.saturating_sub(1), (k + 1).min(last));
        }
    }
    out
}

/// Minimum of `|f|` for the parabola through three equally spaced values,
/// when the middle one is a local minimum of `|f|`; infinite otherwise.
fn extrapolated_min(a: f64, b: f64, c: f64) -> f64 {
    let (a, b, c) = (a.abs(), b.abs(), c.abs());
    if !(b < a && b <= c) {
        return f64::INFINITY;
    }
    let curv = a - 2.0 * b + c;
    if curv <= 0.0 {
        return b;
    }
    let slope = 0.5 * (c - a);
    b - slope * slope / (2.0 * curv)
}

/// Re-tracks the samples `a..=z` on finer grids, zooming towards the
/// smallest `|dφ/dt|` of branch `p`. Returns the new `(t, dφ/dt)` points.
fn refine(
    b: &ParamBraid,
    samples: &[TrackSample],
    p: usize,
    a: usize,
    z: usize,
    topts: &TrackOptions,
    scale: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut start = samples[a].clone();
    let mut end_t = samples[z].t;
    for _ in 0..REFINE_DEPTH {
        let h = (end_t - start.t) / REFINE_STEPS as f64;
        let targets: Vec<f64> = (1..REFINE_STEPS).map(|k| start.t + h * k as f64).collect();
        let fine = continue_from(b, &start, &targets, topts, scale)?;
        out.extend(fine.iter().map(|s| (s.t, s.dphase[p])));
        let mut chain = vec![start.clone()];
        chain.extend(fine);
        let best = (0..chain.len())
            .min_by(|&i, &j| chain[i].dphase[p].abs().total_cmp(&chain[j].dphase[p].abs()))
            .unwrap();
        let lo = best.saturating_sub(1);
        end_t = if best + 1 < chain.len() { chain[best + 1].t } else { end_t };
        start = chain[lo].clone();
    }
    Ok(out)
}

fn summarize(series: &[(f64, f64)], winding: f64) -> BranchSummary {
    let mut s = BranchSummary {
        min: f64::INFINITY,
        argmin_t: 0.0,
        max: f64::NEG_INFINITY,
        min_abs: f64::INFINITY,
        argmin_abs_t: 0.0,
        winding,
        sign_changes: Vec::new(),
    };
    for &(t, d) in series {
        if d < s.min {
            s.min = d;
            s.argmin_t = t;
        }
        s.max = s.max.max(d);
        if d.abs() < s.min_abs {
            s.min_abs = d.abs();
            s.argmin_abs_t = t;
        }
    }
    for w in series.windows(2) {
        let ((t0, d0), (t1, d1)) = (w[0], w[1]);
        if d0 * d1 < 0.0 {
            s.sign_changes.push(t0 + (t1 - t0) * d0 / (d0 - d1));
        }
    }
    s
}

fn collect_near_zero(series: &[(f64, f64)], branch: usize, margin: f64, out: &mut Vec<NearZero>) {
    let mut run: Option<NearZero> = None;
    for &(t, d) in series {
        if d.abs() < margin {
            match &mut run {
                Some(r) if d.abs() < r.value.abs() => {
                    r.t = t;
                    r.value = d;
                }
                Some(_) => {}
                None => run = Some(NearZero { branch: branch + 1, t, value: d }),
            }
        } else if let Some(r) = run.take() {
            out.push(r);
        }
    }
    out.extend(run);
}

// ---- limit terms --------------------------------------------------------

/// Real functions of `t` sampled on a common grid, one row per branch.
#[derive(Clone, Debug, Serialize)]
pub struct Sampled {
    pub t: Vec<f64>,
    pub branches: Vec<Vec<f64>>,
}

impl Sampled {
    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.branches.iter().flatten().copied()
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values().map(f64::abs).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().map(f64::abs).fold(0.0, f64::max)
    }

    /// `min_q f_q(t)` at every sample.
    pub fn pointwise_min(&self) -> Vec<f64> {
        (0..self.t.len())
            .map(|k| self.branches.iter().map(|b| b[k]).fold(f64::INFINITY, f64::min))
            .collect()
    }
}

fn check_strand(pattern: &ParamBraid, label: StrandLabel) -> Result<usize> {
    let comps = pattern.components();
    let c = comps.get(label.component).ok_or(Error::IndexOutOfRange { index: label.component, max: comps.len() - 1 })?;
    if label.strand == 0 || label.strand > c.strands() {
        return Err(Error::IndexOutOfRange { index: label.strand, max: c.strands() });
    }
    Ok(comps[..label.component].iter().map(|c| c.strands()).sum::<usize>() + label.strand - 1)
}

/// Phase speeds of the critical values of the companion loop seen from one
/// pattern strand in the `eps → 0` limit: the companion runs through the
/// `strand`-th of `n_outer` time slices, so its speeds carry a factor `1/n_outer`.
pub fn t1_limit(companion: &ParamBraid, n_outer: usize, strand: usize, grid: usize) -> Result<Sampled> {
    if companion.strands() < 2 {
        return Err(Error::TooFewStrands { got: companion.strands(), min: 2 });
    }
    if strand == 0 || strand > n_outer {
        return Err(Error::IndexOutOfRange { index: strand, max: n_outer });
    }
    let family = Reparametrized {
        base: companion,
        scale: 1.0 / n_outer as f64,
        shift: TAU * (strand - 1) as f64 / n_outer as f64,
    };
    let tracks = track_family(&family, 0.0, TAU, &TrackOptions { grid, ..TrackOptions::default() }, false)?;
    let m = tracks.branch_count();
    Ok(Sampled {
        t: tracks.times(),
        branches: (0..m).map(|p| tracks.samples.iter().map(|s| s.dphase[p]).collect()).collect(),
    })
}

/// `s · Σ_{b ≠ a} d/dt arg(z_a - z_b)` at one time, for strand index `a`.
fn pair_speed_sum(pattern: &ParamBraid, s: usize, a: usize, t: f64, scale: f64) -> Result<f64> {
    let n = pattern.strands();
    let mut z = vec![Complex64::default(); n];
    let mut dz = vec![Complex64::default(); n];
    pattern.sample(t, &mut z, &mut dz);
    let mut sum = 0.0;
    for b in (0..n).filter(|&b| b != a) {
        let d = z[a] - z[b];
        if d.norm() <= SEPARATION_TOLERANCE * scale {
            return Err(Error::StrandCollision { t });
        }
        sum += ((dz[a] - dz[b]) * d.conj()).im / d.norm_sqr();
    }
    Ok(s as f64 * sum)
}

/// The `eps → 0` limit of the pattern's contribution to the phase speed of
/// satellite critical values near `strand`, for companions with `s` strands.
pub fn t2_limit(pattern: &ParamBraid, s: usize, strand: StrandLabel, grid: usize) -> Result<Sampled> {
    if s == 0 {
        return Err(Error::TooFewStrands { got: 0, min: 1 });
    }
    let a = check_strand(pattern, strand)?;
    let scale = pattern.scale(256).max(f64::MIN_POSITIVE);
    let t: Vec<f64> = (0..=grid).map(|k| TAU * k as f64 / grid as f64).collect();
    let values = t.par_iter().map(|&t| pair_speed_sum(pattern, s, a, t, scale)).collect::<Result<Vec<_>>>()?;
    Ok(Sampled { t, branches: vec![values] })
}

fn labels_of(pattern: &ParamBraid, component: usize) -> Vec<StrandLabel> {
    (1..=pattern.components()[component].strands()).map(|strand| StrandLabel { component, strand }).collect()
}

fn check_companions(pattern: &ParamBraid, companions: &[ParamBraid]) -> Result<usize> {
    let m = pattern.components().len();
    if companions.len() != m {
        return Err(Error::SatelliteMismatch(format!("pattern has {m} components but {} companions were given", companions.len())));
    }
    let s = companions[0].strands();
    if companions.iter().any(|c| c.strands() != s) {
        return Err(Error::SatelliteMismatch("companions must all have the same number of strands".into()));
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerBound {
    pub component: usize,
    pub min_t1: f64,
    pub max_t2: f64,
    pub power: u64,
}

/// Per pattern component, the least `r ≥ 1` with `r · min|T1| > max|T2|`.
pub fn companion_power_bound(pattern: &ParamBraid, companions: &[ParamBraid], grid: usize) -> Result<Vec<PowerBound>> {
    let s = check_companions(pattern, companions)?;
    (0..pattern.components().len())
        .map(|i| {
            let labels = labels_of(pattern, i);
            let n_i = labels.len();
            let mut min_t1 = f64::INFINITY;
            let mut max_t2: f64 = 0.0;
            for label in labels {
                min_t1 = min_t1.min(t1_limit(&companions[i], n_i, label.strand, grid)?.min_abs());
                max_t2 = max_t2.max(t2_limit(pattern, s, label, grid)?.max_abs());
            }
            if min_t1 < MIN_COMPANION_SPEED {
                return Err(Error::CompanionNotFibered(min_t1));
            }
            Ok(PowerBound { component: i, min_t1, max_t2, power: strict_power(min_t1, max_t2) })
        })
        .collect()
}

fn strict_power(min_t1: f64, max_t2: f64) -> u64 {
    let mut r = ((max_t2 / min_t1).ceil() as u64).max(1);
    while r as f64 * min_t1 <= max_t2 + POWER_TIE {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitCheck {
    pub component: usize,
    pub power: i64,
    /// `min |T1 + T2|` over strands, branches and time.
    pub min_abs: f64,
    pub sign_changes: usize,
    pub passes: bool,
}

/// Sign-aware limit test: with the companion powers applied, does every
/// `T1_q(t) + T2(t)` stay away from zero without changing sign?
///
/// This is sharper than [`companion_power_bound`], which compares magnitudes
/// and so ignores that the two terms may share a sign.
pub fn limit_check(
    pattern: &ParamBraid,
    companions: &[ParamBraid],
    powers: &[i64],
    grid: usize,
    margin: f64,
) -> Result<Vec<LimitCheck>> {
    let s = check_companions(pattern, companions)?;
    if powers.len() != companions.len() {
        return Err(Error::SatelliteMismatch("one power per companion is required".into()));
    }
    let scale = pattern.scale(256).max(f64::MIN_POSITIVE);
    (0..pattern.components().len())
        .map(|i| {
            let powered = companions[i].power(powers[i])?;
            let labels = labels_of(pattern, i);
            let n_i = labels.len();
            let mut min_abs = f64::INFINITY;
            let mut sign_changes = 0;
            for label in labels {
                let a = check_strand(pattern, label)?;
                let t1 = t1_limit(&powered, n_i, label.strand, grid)?;
                let t2 = t1.t.iter().map(|&t| pair_speed_sum(pattern, s, a, t, scale)).collect::<Result<Vec<_>>>()?;
                for branch in &t1.branches {
                    let total: Vec<f64> = branch.iter().zip(&t2).map(|(x, y)| x + y).collect();
                    min_abs = total.iter().map(|v| v.abs()).fold(min_abs, f64::min);
                    sign_changes += total.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
                }
            }
            Ok(LimitCheck {
                component: i,
                power: powers[i],
                min_abs,
                sign_changes,
                passes: min_abs >= margin && sign_changes == 0,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsAttempt {
    pub eps: f64,
    /// `pass`, `fail`, `too_large` or an error message.
    pub outcome: String,
    pub min_abs: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsSearch {
    pub eps: Option<f64>,
    pub attempts: Vec<EpsAttempt>,
}

/// Decades searched for a passing `eps`.
pub const EPS_CANDIDATES: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Builds the satellite at decreasing `eps` and stops at the first that passes.
pub fn search_eps(
    pattern: &ParamBraid,
    companions: &[ParamBraid],
    powers: &[i64],
    opts: &CheckOptions,
) -> Result<EpsSearch> {
    let mut attempts = Vec::new();
    for &eps in &EPS_CANDIDATES {
        let attempt = match satellite(pattern, companions, eps, powers) {
            Err(Error::EpsTooLarge { .. }) => EpsAttempt { eps, outcome: "too_large".into(), min_abs: None },
            Err(e) => return Err(e),
            Ok(sat) => match check(&sat, opts) {
                Ok(r) => EpsAttempt {
                    eps,
                    outcome: if r.passed() { "pass" } else { "fail" }.into(),
                    min_abs: Some(r.min_abs()),
                },
                Err(e @ (Error::TrackingFailure { .. } | Error::NonConvergence { .. })) => {
                    EpsAttempt { eps, outcome: e.to_string(), min_abs: None }
                }
                Err(e) => return Err(e),
            },
        };
        let passed = attempt.outcome == "pass";
        attempts.push(attempt);
        if passed {
            return Ok(EpsSearch { eps: Some(eps), attempts });
        }
    }
    Ok(EpsSearch { eps: None, attempts })
}

// ---- twisting -----------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct TwistShift {
    /// `max |dφ_twisted - dφ - n k|` over samples and branches.
    pub max_deviation: f64,
    pub base_min: f64,
    pub twisted_min: f64,
}

/// Compares phase speeds of `b` and `b.twist(k)` at matching critical points.
///
/// Twisting rotates every strand by `e^{ikt}`, so each critical point `c` of
/// `b` becomes `c·e^{ikt}` and its critical value gains the factor `e^{inkt}`.
pub fn twist_shift_verify(b: &ParamBraid, k: i64, grid: usize) -> Result<TwistShift> {
    let twisted = b.twist(k);
    let n = b.strands();
    let scale = b.scale(256).max(f64::MIN_POSITIVE);
    let shift = (n as i64 * k) as f64;
    let per_t = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = TAU * i as f64 / grid as f64;
            let (mut z, mut dz) = (vec![Complex64::default(); n], vec![Complex64::default(); n]);
            let (mut zt, mut dzt) = (z.clone(), dz.clone());
            b.sample(t, &mut z, &mut dz);
            twisted.sample(t, &mut zt, &mut dzt);
            let set = critical_points_of_roots(&z, None, scale, CLUSTER_TOLERANCE)?;
            let rot = Complex64::cis(k as f64 * t);
            let mut out = (0.0f64, f64::INFINITY, f64::INFINITY);
            for &c in &set.points {
                let d = phase_speed_from_roots(&z, &dz, c);
                let dt = phase_speed_from_roots(&zt, &dzt, c * rot);
                out.0 = out.0.max((dt - d - shift).abs());
                out.1 = out.1.min(d);
                out.2 = out.2.min(dt);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_t.into_iter().fold(
        TwistShift { max_deviation: 0.0, base_min: f64::INFINITY, twisted_min: f64::INFINITY },
        |acc, (dev, lo, lo_t)| TwistShift {
            max_deviation: acc.max_deviation.max(dev),
            base_min: acc.base_min.min(lo),
            twisted_min: acc.twisted_min.min(lo_t),
        },
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistPlan {
    /// The word with every `σ_i^{±1}` replaced by `X_i^{±1}`.
    pub x_word: String,
    pub strands: usize,
    pub positive_crossings: usize,
    pub negative_crossings: usize,
    /// Total time given to the positive letters.
    pub positive_time: f64,
    /// Time for one clockwise turn of each negative letter's critical value.
    pub negative_slot: Option<f64>,
    /// Lower bound on every critical-value phase speed under this schedule.
    pub lower_bound: f64,
    /// The weaker bound `-(k_- + 1)` that the twist count is derived from.
    pub guaranteed_bound: f64,
    /// Full twists that make every phase speed positive.
    pub required_twists: u64,
}

/// Schedules the critical-value motion of a word: positive letters run in
/// `positive_time`, negative letters share the rest of the loop equally.
pub fn word_twist_plan(w: &BraidWord, positive_time: f64, x_offset: Option<usize>) -> Result<TwistPlan> {
    if !(positive_time > 0.0 && positive_time < TAU) {
        return Err(Error::Config(format!("positive time must lie in (0, 2π), got {positive_time}")));
    }
    let n = w.strands();
    let (plus, minus) = w.crossing_counts();
    let mut x = BraidWord::identity(n)?;
    for &l in w.letters() {
        let part = x_word(l.unsigned_abs() as usize, n, x_offset)?;
        let part = if l > 0 { part } else { part.inverse() };
        x = x.concat(&part)?;
    }
    let (negative_slot, lower_bound) = if minus == 0 {
        (None, 0.0)
    } else {
        let slot = (TAU - positive_time) / minus as f64;
        (Some(slot), -TAU / slot)
    };
    Ok(TwistPlan {
        x_word: x.to_string(),
        strands: n,
        positive_crossings: plus,
        negative_crossings: minus,
        positive_time,
        negative_slot,
        lower_bound,
        guaranteed_bound: -(minus as f64 + 1.0),
        required_twists: (minus as u64 + 1).div_ceil(n as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::library;

    fn lib(name: &str) -> ParamBraid {
        library(name).unwrap()
    }

    #[test]
    fn hopf_passes_with_exact_minimum() {
        let r = check(&lib("hopf"), &CheckOptions { grid: 256, ..Default::default() }).unwrap();
        assert!(r.passed());
        assert!((r.branches[0].min - 2.0).abs() < 1e-9);
        assert!((r.branches[0].winding - 2.0).abs() < 1e-9);
        assert!(r.near_zero.is_empty());
    }

    #[test]
    fn rejects_bad_options() {
        assert!(check(&lib("hopf"), &CheckOptions { grid: 10, margin: 1e-4 }).is_err());
        assert!(check(&lib("hopf"), &CheckOptions { grid: 128, margin: 0.0 }).is_err());
    }

    #[test]
    fn untwisted_identity_braid_fails() {
        // two constant strands: the critical value never moves
        let r = check(&lib("hopf").twist(-1), &CheckOptions { grid: 128, ..Default::default() }).unwrap();
        assert!(!r.passed());
        assert!(!r.near_zero.is_empty());
    }

    #[test]
    fn summary_finds_sign_changes() {
        let series: Vec<(f64, f64)> = (0..=100).map(|k| (k as f64 * 0.01, (k as f64 * 0.01 - 0.505))).collect();
        let s = summarize(&series, 0.0);
        assert_eq!(s.sign_changes.len(), 1);
        assert!((s.sign_changes[0] - 0.505).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_sees_hidden_dips() {
        assert!(extrapolated_min(1.0, 0.1, 1.0) <= 0.1);
        assert!(extrapolated_min(0.5, 0.1, 0.3) < 0.1);
        assert_eq!(extrapolated_min(0.1, 0.5, 1.0), f64::INFINITY);
    }

    #[test]
    fn t1_examples() {
        let c = lib("sigma1_2strand");
        let a = t1_limit(&c, 3, 1, 128).unwrap();
        assert!((a.min() - 1.0 / 3.0).abs() < 1e-9 && (a.max() - 1.0 / 3.0).abs() < 1e-9);
        let b = t1_limit(&c, 1, 1, 128).unwrap();
        assert!((b.min() - 1.0).abs() < 1e-9 && (b.max() - 1.0).abs() < 1e-9);
        let h = t1_limit(&lib("hopf"), 1, 1, 128).unwrap();
        assert!((h.min() - 2.0).abs() < 1e-9 && (h.max() - 2.0).abs() < 1e-9);
        assert!(t1_limit(&c, 3, 4, 128).is_err());
    }

    #[test]
    fn t2_examples() {
        let h = t2_limit(&lib("hopf"), 1, StrandLabel { component: 0, strand: 1 }, 64).unwrap();
        assert!(h.values().all(|v| (v - 1.0).abs() < 1e-12));
        let f = lib("figure8");
        let label = StrandLabel { component: 0, strand: 2 };
        let one = t2_limit(&f, 1, label, 64).unwrap();
        let two = t2_limit(&f, 2, label, 64).unwrap();
        for (a, b) in one.values().zip(two.values()) {
            assert_eq!(2.0 * a, b);
        }
        assert!(t2_limit(&f, 1, StrandLabel { component: 0, strand: 4 }, 64).is_err());
    }

    #[test]
    fn strict_power_breaks_ties() {
        assert_eq!(strict_power(1.0, 0.0), 1);
        assert_eq!(strict_power(1.0, 2.5), 3);
        assert_eq!(strict_power(1.0, 3.0), 4);
        assert_eq!(strict_power(1.0 / 3.0, 2.784988), 9);
    }

    #[test]
    fn single_strand_pattern_needs_no_power() {
        let pattern = ParamBraid::from_json(
            r#"{"components":[{"strands":1,"terms":[{"re":0.0,"im":0.0,"freq_num":0,"freq_den":1}]}]}"#,
        )
        .unwrap();
        let b = companion_power_bound(&pattern, &[lib("sigma1_2strand")], 128).unwrap();
        assert_eq!(b[0].power, 1);
        assert_eq!(b[0].max_t2, 0.0);
    }

    #[test]
    fn twist_shift_on_hopf() {
        let r = twist_shift_verify(&lib("hopf"), 3, 256).unwrap();
        assert!(r.max_deviation < 1e-9);
        assert!((r.base_min - 2.0).abs() < 1e-9 && (r.twisted_min - 8.0).abs() < 1e-9);
        assert!(twist_shift_verify(&lib("figure8"), 0, 256).unwrap().max_deviation < 1e-12);
    }

    #[test]
    fn twist_plan_examples() {
        let p = word_twist_plan(&BraidWord::parse("-1", 2).unwrap(), 0.1, None).unwrap();
        assert!(p.lower_bound > -2.0 && p.lower_bound > p.guaranteed_bound);
        assert_eq!(p.required_twists, 1);
        assert_eq!(p.x_word, "-1 -1");
        let p = word_twist_plan(&BraidWord::parse("1 -2 1 -2", 3).unwrap(), 0.1, None).unwrap();
        assert_eq!(p.negative_crossings, 2);
        assert!(p.lower_bound > -3.0);
        assert_eq!(p.required_twists, 1);
        let p = word_twist_plan(&BraidWord::parse("1 2", 3).unwrap(), 0.1, None).unwrap();
        assert_eq!((p.lower_bound, p.negative_slot, p.required_twists), (0.0, None, 1));
        assert!(word_twist_plan(&BraidWord::parse("1", 2).unwrap(), 7.0, None).is_err());
    }
}
