//! Braid words from parametrized braids.
//!
//! Strands are ordered by real part, position 1 holding the largest. Whenever
//! two neighbours swap, the one with the smaller imaginary part passes over;
//! the letter `σ_p^{±1}` (positions `p`, `p + 1`) is positive when the
//! over-strand moves towards larger real part and negative otherwise.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::braidword::BraidWord;
use crate::curves::{ParamBraid, StrandFamily, StrandLabel};
use crate::error::{Error, Result};

/// Crossing times are bisected to this width.
const CROSSING_RESOLUTION: f64 = 1e-10;
/// Events sharing a strand closer than this are re-bisected more finely.
const CLOSE_EVENTS: f64 = 1e-8;
/// Width used for the finer bisection.
const FINE_RESOLUTION: f64 = 1e-13;
/// Relative size below which a real-part gap counts as touching.
const TOUCH_TOLERANCE: f64 = 1e-12;
/// Minimum relative real-part gap wanted at the basepoint.
const BASEPOINT_CLEARANCE: f64 = 1e-6;
/// Samples per unit of the largest frequency.
const SAMPLES_PER_FREQUENCY: f64 = 256.0;
/// Projection angles tried, in order, when the requested one is non-generic.
const FALLBACK_ANGLES: [f64; 4] = [1e-5, -1e-5, 3e-5, -3e-5];

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    pub grid: usize,
    /// Angle by which the plane is turned before projecting to the real axis.
    pub projection_angle: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { grid: 4096, projection_angle: 0.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingEvent {
    pub t: f64,
    /// The swapped positions are `position` and `position + 1`, counted from
    /// the largest real part.
    pub position: usize,
    pub sign: i32,
    pub over: StrandLabel,
    pub under: StrandLabel,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub word: BraidWord,
    pub events: Vec<CrossingEvent>,
    /// Start of the swept interval `[basepoint, basepoint + 2π]`.
    pub basepoint: f64,
    /// Angle actually used for the projection.
    pub projection_angle: f64,
}

impl Extraction {
    /// Rows `t,p,sign`.
    pub fn events_csv(&self) -> String {
        let mut out = String::from("t,p,sign\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{}", e.t, e.position, e.sign);
        }
        out
    }
}

pub fn extract_word(b: &ParamBraid, opts: &ExtractOptions) -> Result<BraidWord> {
    Ok(extract(b, opts)?.word)
}

/// Signed crossing count of the extracted word.
pub fn writhe(b: &ParamBraid, opts: &ExtractOptions) -> Result<i64> {
    Ok(extract_word(b, opts)?.writhe())
}

struct Sweep<'a> {
    b: &'a ParamBraid,
    n: usize,
    touch: f64,
    turn: Complex64,
}

/// A candidate crossing of strands `a < b` inside `[lo, hi]`.
#[derive(Clone, Copy, Debug)]
struct Bracket {
    a: usize,
    b: usize,
    lo: f64,
    hi: f64,
}

impl Sweep<'_> {
    fn sample(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z = vec![Complex64::default(); self.n];
        let mut dz = vec![Complex64::default(); self.n];
        self.b.sample(t, &mut z, &mut dz);
        if self.turn != Complex64::new(1.0, 0.0) {
            z.iter_mut().chain(dz.iter_mut()).for_each(|v| *v *= self.turn);
        }
        (z, dz)
    }

    /// `Re(z_a - z_b)` and its derivative.
    fn gap(&self, a: usize, b: usize, t: f64) -> (f64, f64) {
        let (z, dz) = self.sample(t);
        ((z[a] - z[b]).re, (dz[a] - dz[b]).re)
    }

    fn min_gap(&self, t: f64) -> f64 {
        let (z, _) = self.sample(t);
        let mut best = f64::INFINITY;
        for a in 0..self.n {
            for b in a + 1..self.n {
                best = best.min((z[a] - z[b]).re.abs());
            }
        }
        best
    }

    /// Brackets of sign changes of `Re(z_a - z_b)` on one sampling interval.
    fn scan(&self, t0: f64, t1: f64, out: &mut Vec<Bracket>) -> Result<()> {
        let (z0, d0) = self.sample(t0);
        let (z1, d1) = self.sample(t1);
        for a in 0..self.n {
            for b in a + 1..self.n {
                let (f0, f1) = ((z0[a] - z0[b]).re, (z1[a] - z1[b]).re);
                let (g0, g1) = ((d0[a] - d0[b]).re, (d1[a] - d1[b]).re);
                if g0 * g1 < 0.0 {
                    // a turning point: the gap may cross twice or touch
                    let te = bisect(t0, t1, CROSSING_RESOLUTION, |t| self.gap(a, b, t).1 >= 0.0, g0 >= 0.0);
                    let fe = self.gap(a, b, te).0;
                    let first = (f0 >= 0.0) != (fe >= 0.0);
                    let second = (fe >= 0.0) != (f1 >= 0.0);
                    if first {
                        out.push(Bracket { a, b, lo: t0, hi: te });
                    }
                    if second {
                        out.push(Bracket { a, b, lo: te, hi: t1 });
                    }
                    if !first && !second && fe.abs() <= self.touch {
                        return Err(Error::NonGeneric { t: te, reason: format!("strands {a} and {b} touch tangentially") });
                    }
                } else if (f0 >= 0.0) != (f1 >= 0.0) {
                    out.push(Bracket { a, b, lo: t0, hi: t1 });
                }
            }
        }
        Ok(())
    }

    fn locate(&self, br: &Bracket, width: f64) -> f64 {
        let start_sign = self.gap(br.a, br.b, br.lo).0 >= 0.0;
        bisect(br.lo, br.hi, width, |t| self.gap(br.a, br.b, t).0 >= 0.0, start_sign)
    }
}

/// Midpoint of the final bracket where `positive` flips away from `start`.
fn bisect(mut lo: f64, mut hi: f64, width: f64, positive: impl Fn(f64) -> bool, start: bool) -> f64 {
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if positive(mid) == start {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sweeps `b` over one period and records every crossing in time order.
///
/// A projection with simultaneous or tangential crossings is retried with the
/// plane turned by a few tiny angles. Turning is an isotopy, so the braid is
/// unchanged, though the word may differ by braid relations.
pub fn extract(b: &ParamBraid, opts: &ExtractOptions) -> Result<Extraction> {
    match extract_at(b, opts, opts.projection_angle) {
        Err(first @ Error::NonGeneric { .. }) => {
            for angle in FALLBACK_ANGLES.iter().map(|a| a + opts.projection_angle) {
                if let Ok(e) = extract_at(b, opts, angle) {
                    return Ok(e);
                }
            }
            Err(first)
        }
        other => other,
    }
}

fn extract_at(b: &ParamBraid, opts: &ExtractOptions, angle: f64) -> Result<Extraction> {
    let n = b.strands();
    let scale = b.scale(256).max(f64::MIN_POSITIVE);
    let sweep = Sweep { b, n, touch: TOUCH_TOLERANCE * scale, turn: Complex64::cis(-angle) };
    let samples = opts.grid.max((SAMPLES_PER_FREQUENCY * b.max_abs_freq()).ceil() as usize).max(64);
    let h = TAU / samples as f64;
    let basepoint = choose_basepoint(&sweep, h, scale);

    let brackets: Vec<Bracket> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let t0 = basepoint + h * k as f64;
            let t1 = if k + 1 == samples { basepoint + TAU } else { t0 + h };
            let mut found = Vec::new();
            sweep.scan(t0, t1, &mut found)?;
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut located: Vec<(f64, Bracket)> =
        brackets.par_iter().map(|br| (sweep.locate(br, CROSSING_RESOLUTION), *br)).collect();
    located.sort_by(|x, y| x.0.total_cmp(&y.0));
    sharpen_close_events(&sweep, &mut located)?;

    let labels = b.labels();
    let (z0, _) = sweep.sample(basepoint);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| z0[x].re.total_cmp(&z0[y].re));
    let mut position = vec![0; n];
    for (p, &s) in order.iter().enumerate() {
        position[s] = p;
    }

    let mut letters = Vec::with_capacity(located.len());
    let mut events = Vec::with_capacity(located.len());
    for (t, br) in located {
        let (pa, pb) = (position[br.a], position[br.b]);
        if pa.abs_diff(pb) != 1 {
            return Err(Error::NonGeneric { t, reason: "crossing of strands that are not adjacent in real part".into() });
        }
        let (z, _) = sweep.sample(t);
        let dim = z[br.a].im - z[br.b].im;
        if dim.abs() <= sweep.touch {
            return Err(Error::StrandCollision { t });
        }
        let (over, under) = if dim < 0.0 { (br.a, br.b) } else { (br.b, br.a) };
        // `position` counts from the smallest real part
        let left = pa.min(pb);
        let sign = if position[over] == left { 1 } else { -1 };
        let p = n - 2 - left;
        position[br.a] = pb;
        position[br.b] = pa;
        letters.push(sign * (p as i32 + 1));
        events.push(CrossingEvent { t, position: p + 1, sign, over: labels[over], under: labels[under] });
    }
    Ok(Extraction { word: BraidWord::new(n, letters)?, events, basepoint, projection_angle: angle })
}

/// The first of a few start times near `0` with no two real parts close.
fn choose_basepoint(sweep: &Sweep, h: f64, scale: f64) -> f64 {
    let candidates = [0.0, 0.5 * h, h / 3.0, 0.2 * h, h / 7.0, 0.9 * h];
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in &candidates {
        let gap = sweep.min_gap(t);
        if gap >= BASEPOINT_CLEARANCE * scale {
            return t;
        }
        if gap > best.0 {
            best = (gap, t);
        }
    }
    best.1
}

/// Re-bisects events that share a strand and lie within [`CLOSE_EVENTS`],
/// so that their order is decided at the finer resolution.
fn sharpen_close_events(sweep: &Sweep, located: &mut [(f64, Bracket)]) -> Result<()> {
    let shares = |x: &Bracket, y: &Bracket| x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b;
    let mut touched = false;
    for i in 0..located.len() {
        for j in i + 1..located.len() {
            if located[j].0 - located[i].0 > CLOSE_EVENTS {
                break;
            }
            if shares(&located[i].1, &located[j].1) {
                located[i].0 = sweep.locate(&located[i].1, FINE_RESOLUTION);
                located[j].0 = sweep.locate(&located[j].1, FINE_RESOLUTION);
                touched = true;
            }
        }
    }
    if touched {
        located.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in located.windows(2) {
            if w[1].0 - w[0].0 <= 10.0 * FINE_RESOLUTION && shares(&w[0].1, &w[1].1) {
                return Err(Error::NonGeneric { t: w[0].0, reason: "three strands share a real part".into() });
            }
        }
    }
    Ok(())
}
