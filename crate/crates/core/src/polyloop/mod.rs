//! Loops of monic polynomials `g_t(u) = ∏ (u - z_j(t))` and their critical
//! points and critical values.

pub mod aberth;
pub mod assignment;
mod tracking;

pub use tracking::{continue_from, track, track_family, CriticalTracks, TrackOptions, TrackSample};

use num_complex::Complex64;

use crate::error::{Error, Result};
use aberth::{circle_guesses, merge_clusters, merge_clusters_by, separate_duplicates, solve, CriticalOfRoots, Dense};

/// Default relative distance below which critical points count as one.
pub const CLUSTER_TOLERANCE: f64 = 1e-7;

/// Pairs farther apart than this (relative) are never merged.
const CLUSTER_SEARCH: f64 = 1e-5;

/// A pair is one double point when `Σ 1/(m - z_j)` at its midpoint is within
/// this many rounding units of `Σ 1/|m - z_j|`. A double point splits into a
/// pair of size about `sqrt(ε)`, which can exceed [`CLUSTER_TOLERANCE`], while
/// a real pair at distance `d` leaves a residual near `d²/ε` units.
const ROUNDING_UNITS: f64 = 1e3;

/// Monic polynomial `u^n + a_{n-1} u^{n-1} + … + a_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly {
    coeffs: Vec<Complex64>,
}

impl MonicPoly {
    /// From the lower coefficients `a_0, …, a_{n-1}`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DegreeTooSmall(0));
        }
        Ok(Self { coeffs })
    }

    /// Expands `∏ (u - r)` by incremental multiplication.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::DegreeTooSmall(0));
        }
        let mut full = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            full.push(Complex64::default());
            for k in (0..full.len()).rev() {
                let lower = if k > 0 { full[k - 1] } else { Complex64::default() };
                full[k] = lower - r * full[k];
            }
        }
        // drop the leading 1
        full.pop();
        Ok(Self { coeffs: full })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_0, …, a_{n-1}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn full_coeffs(&self) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        c.push(Complex64::new(1.0, 0.0));
        c
    }

    /// Horner evaluation.
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(1.0, 0.0), |acc, &a| acc * u + a)
    }

    /// Fujiwara's bound on the root moduli.
    pub fn root_bound(&self) -> f64 {
        bound_of(&self.full_coeffs())
    }

    /// All `n` roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let full = self.full_coeffs();
        solve_dense(&full)
    }

    /// The `n - 1` roots of `p'`, clusters replaced by their centroid.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        let full = self.full_coeffs();
        let deriv: Vec<Complex64> = (1..=n).map(|k| full[k] * k as f64).collect();
        let mut pts = solve_dense(&deriv)?;
        let scale = self.root_bound().max(f64::MIN_POSITIVE);
        merge_clusters(&mut pts, CLUSTER_TOLERANCE * scale);
        Ok(pts)
    }

    pub fn critical_values(&self, critical_points: &[Complex64]) -> Vec<Complex64> {
        critical_points.iter().map(|&c| self.eval(c)).collect()
    }
}

fn bound_of(full: &[Complex64]) -> f64 {
    let d = full.len() - 1;
    let lead = full[d].norm();
    (1..=d)
        .map(|k| {
            let a = full[d - k].norm() / lead;
            if k == d {
                (a / 2.0).powf(1.0 / k as f64)
            } else {
                a.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0
}

fn solve_dense(full: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = full.len() - 1;
    let scale = bound_of(full);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let center = -full[d - 1] / (full[d] * d as f64);
    let mut approx = circle_guesses(center, scale, d);
    solve(&Dense { coeffs: full, floor: 1e-8 * scale }, &mut approx)?;
    Ok(approx)
}

/// Critical points of `∏ (u - z_j)` with their cluster multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    pub points: Vec<Complex64>,
    pub multiplicity: Vec<usize>,
}

/// Critical points of the polynomial with the given roots, computed in
/// product form. `warm` seeds the iteration when given; otherwise the
/// starting values lie on a circle inside the convex hull of the roots.
pub fn critical_points_of_roots(
    roots: &[Complex64],
    warm: Option<&[Complex64]>,
    scale: f64,
    cluster_tol: f64,
) -> Result<CriticalSet> {
    let n = roots.len();
    if n < 2 {
        return Ok(CriticalSet { points: Vec::new(), multiplicity: Vec::new() });
    }
    let mut approx = match warm {
        Some(w) if w.len() == n - 1 => w.to_vec(),
        _ => cold_guesses(roots),
    };
    separate_duplicates(&mut approx, scale);
    solve(&CriticalOfRoots { roots }, &mut approx)?;
    let multiplicity = merge_clusters_by(&mut approx, |a, b| {
        let d = (a - b).norm();
        d < cluster_tol * scale || (d < CLUSTER_SEARCH * scale && numerically_double(roots, 0.5 * (a + b)))
    });
    Ok(CriticalSet { points: approx, multiplicity })
}

fn numerically_double(roots: &[Complex64], m: Complex64) -> bool {
    let (mut sum, mut noise) = (Complex64::default(), 0.0);
    for &z in roots {
        let w = m - z;
        sum += w.inv();
        noise += w.norm().recip();
    }
    sum.norm() <= ROUNDING_UNITS * f64::EPSILON * noise
}

fn cold_guesses(roots: &[Complex64]) -> Vec<Complex64> {
    let n = roots.len();
    let center: Complex64 = roots.iter().sum::<Complex64>() / n as f64;
    let radius = roots.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    circle_guesses(center, 0.5 * radius, n - 1)
}

/// `∏ (c - z_j)`.
pub fn value_from_roots(roots: &[Complex64], c: Complex64) -> Complex64 {
    roots.iter().map(|&z| c - z).product()
}

/// `d/dt arg v` at a critical point: `-Im Σ ż_j / (c - z_j)`.
///
/// Since `g_t'(c) = 0`, `dv/dt = ∂g/∂t (c, t)` and the phase speed follows
/// from the strand velocities alone.
pub fn phase_speed_from_roots(roots: &[Complex64], velocities: &[Complex64], c: Complex64) -> f64 {
    -roots
        .iter()
        .zip(velocities)
        .map(|(&z, &dz)| dz / (c - z))
        .sum::<Complex64>()
        .im
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains_all(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && b.iter().all(|x| a.iter().any(|y| (x - y).norm() < tol))
    }

    #[test]
    fn coeffs_from_roots_examples() {
        let p = MonicPoly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs()[0], c(-1.0, 0.0));
        assert_eq!(p.coeffs()[1], c(0.0, 0.0));
        let t = 0.7;
        let e = Complex64::cis(t);
        let p = MonicPoly::from_roots(&[e, -e]).unwrap();
        assert!((p.coeffs()[0] + Complex64::cis(2.0 * t)).norm() < 1e-15);
        assert!(p.coeffs()[1].norm() < 1e-15);
        // trefoil roots e^{i(-2t + 2πl)/3}: product is u^3 - e^{-2it}
        let roots: Vec<_> = (1..=3)
            .map(|l| Complex64::cis((-2.0 * t + std::f64::consts::TAU * l as f64) / 3.0))
            .collect();
        let p = MonicPoly::from_roots(&roots).unwrap();
        assert!((p.coeffs()[0] + Complex64::cis(-2.0 * t)).norm() < 1e-12);
        assert!(p.coeffs()[1].norm() < 1e-12 && p.coeffs()[2].norm() < 1e-12);
        assert!(MonicPoly::from_roots(&[]).is_err());
    }

    #[test]
    fn critical_point_examples() {
        let e = Complex64::cis(1.3);
        let p = MonicPoly::new(vec![-e * e, c(0.0, 0.0)]).unwrap();
        let cp = p.critical_points().unwrap();
        assert!(contains_all(&cp, &[c(0.0, 0.0)], 1e-12));
        assert!(contains_all(&p.critical_values(&cp), &[-e * e], 1e-12));

        let p = MonicPoly::new(vec![c(-0.4, 0.2), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let cp = p.critical_points().unwrap();
        assert_eq!(cp.len(), 2);
        assert!(cp.iter().all(|z| z.norm() < 1e-7));

        let p = MonicPoly::new(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0)]).unwrap();
        let cp = p.critical_points().unwrap();
        assert!(contains_all(&cp, &[c(1.0, 0.0), c(-1.0, 0.0)], 1e-12));
        assert!(contains_all(&p.critical_values(&cp), &[c(-2.0, 0.0), c(2.0, 0.0)], 1e-12));

        let f = Complex64::cis(-2.0 * 0.4);
        let p = MonicPoly::new(vec![-f, c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let cp = p.critical_points().unwrap();
        let vals = p.critical_values(&cp);
        assert!(vals.iter().all(|v| (v + f).norm() < 1e-12));

        assert!(matches!(MonicPoly::new(vec![c(1.0, 0.0)]).unwrap().critical_points(), Err(Error::DegreeTooSmall(1))));
    }

    #[test]
    fn product_form_matches_dense() {
        let roots = [c(1.0, 0.2), c(-0.3, 1.1), c(-0.8, -0.9), c(0.5, -0.4)];
        let dense = MonicPoly::from_roots(&roots).unwrap().critical_points().unwrap();
        let prod = critical_points_of_roots(&roots, None, 1.2, CLUSTER_TOLERANCE).unwrap();
        assert!(contains_all(&prod.points, &dense, 1e-10));
        let p = MonicPoly::from_roots(&roots).unwrap();
        for &cp in &prod.points {
            assert!((value_from_roots(&roots, cp) - p.eval(cp)).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_speed_of_rotating_pair() {
        // ±e^{it}: critical value -e^{2it} turns at speed 2
        let t = 0.3;
        let e = Complex64::cis(t);
        let roots = [e, -e];
        let vel = [Complex64::i() * e, -Complex64::i() * e];
        assert!((phase_speed_from_roots(&roots, &vel, c(0.0, 0.0)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn split_double_point_merges_but_close_pair_does_not() {
        use crate::curves::{library, StrandFamily};
        // Rounding splits the trefoil's double point by about 1.5e-7 here.
        let b = library("trefoil_neg").unwrap().twist(-3);
        let (mut z, mut dz) = (vec![Complex64::default(); 3], vec![Complex64::default(); 3]);
        b.sample(5.126011069156322, &mut z, &mut dz);
        let set = critical_points_of_roots(&z, None, 1.0, CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.multiplicity, vec![2, 2]);
        assert!(set.points[0].norm() < 1e-7);

        // u³ - 3δ²u + 1 has critical points ±δ, a genuine pair.
        let delta = 3e-6;
        let p = MonicPoly::new(vec![c(1.0, 0.0), c(-3.0 * delta * delta, 0.0), c(0.0, 0.0)]).unwrap();
        let set = critical_points_of_roots(&p.roots().unwrap(), None, 1.0, CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.multiplicity, vec![1, 1]);
        assert!(contains_all(&set.points, &[c(delta, 0.0), c(-delta, 0.0)], 1e-9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn roots_round_trip(n in 1usize..=12, seed in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 12)) {
            // keep pairwise gaps >= 0.1 by snapping to a 0.25 lattice and deduplicating
            let mut roots: Vec<Complex64> = Vec::new();
            for &(x, y) in &seed {
                let z = c((x * 4.0).round() / 4.0, (y * 4.0).round() / 4.0);
                if roots.iter().all(|r| (r - z).norm() >= 0.1) {
                    roots.push(z);
                }
                if roots.len() == n {
                    break;
                }
            }
            let p = MonicPoly::from_roots(&roots).unwrap();
            let found = p.roots().unwrap();
            prop_assert!(contains_all(&found, &roots, 1e-8));
        }
    }
}
