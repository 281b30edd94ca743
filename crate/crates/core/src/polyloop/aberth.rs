//! Aberth–Ehrlich simultaneous root iteration.
//!
//! The iteration only needs the Newton ratio `f/f'` and a backward-error
//! estimate at each approximation, so the same driver serves dense
//! coefficient polynomials and derivatives given in root (product) form.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;

/// Backward error accepted when the iteration stops without reaching machine level.
pub const ACCEPTED_BACKWARD_ERROR: f64 = 1e-10;

/// Newton ratio and backward error of a function at a point.
#[derive(Clone, Copy, Debug)]
pub struct NewtonStep {
    pub ratio: Complex64,
    pub backward_error: f64,
}

pub trait NewtonSystem {
    fn degree(&self) -> usize;
    fn newton(&self, z: Complex64) -> NewtonStep;
}

/// Dense polynomial `Σ a_k u^k` (coefficients low to high).
///
/// The backward error is taken relative to `Σ |a_k| max(|u|, floor)^k`;
/// the floor keeps roots at the origin (where only `a_0` could vanish) from
/// being judged against an identically zero bound.
pub struct Dense<'a> {
    pub coeffs: &'a [Complex64],
    pub floor: f64,
}

impl NewtonSystem for Dense<'_> {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn newton(&self, z: Complex64) -> NewtonStep {
        let mut f = Complex64::default();
        let mut df = Complex64::default();
        let mut bound = 0.0;
        let r = z.norm().max(self.floor);
        for &a in self.coeffs.iter().rev() {
            df = df * z + f;
            f = f * z + a;
            bound = bound * r + a.norm();
        }
        NewtonStep {
            ratio: if df == Complex64::default() { Complex64::default() } else { f / df },
            backward_error: if bound > 0.0 { f.norm() / bound } else { 0.0 },
        }
    }
}

/// The derivative `p'` of `p(u) = ∏ (u - z_j)`, evaluated through the
/// logarithmic derivative `L = p'/p = Σ 1/(u - z_j)`.
///
/// Newton's ratio for `p'` is `p'/p'' = L / (L² + L')` with `L' = -Σ 1/(u - z_j)²`.
/// Working with the roots keeps full relative accuracy when strands cluster.
pub struct CriticalOfRoots<'a> {
    pub roots: &'a [Complex64],
}

impl NewtonSystem for CriticalOfRoots<'_> {
    fn degree(&self) -> usize {
        self.roots.len() - 1
    }

    fn newton(&self, u: Complex64) -> NewtonStep {
        let mut l = Complex64::default();
        let mut dl = Complex64::default();
        let mut bound = 0.0;
        for &z in self.roots {
            let d = u - z;
            if d == Complex64::default() {
                // sitting on a root: push off it
                return NewtonStep { ratio: Complex64::new(f64::EPSILON, f64::EPSILON), backward_error: 1.0 };
            }
            let inv = d.inv();
            l += inv;
            dl -= inv * inv;
            bound += inv.norm();
        }
        let denom = l * l + dl;
        let ratio = if denom == Complex64::default() { Complex64::default() } else { l / denom };
        NewtonStep { ratio, backward_error: l.norm() / bound }
    }
}

/// Approximations placed on a circle, offset so no two start on a symmetry axis.
pub fn circle_guesses(center: Complex64, radius: f64, count: usize) -> Vec<Complex64> {
    let radius = if radius > 0.0 { radius } else { 1.0 };
    (0..count)
        .map(|k| center + radius * Complex64::cis(TAU * k as f64 / count as f64 + 0.4))
        .collect()
}

/// Separates (near-)coincident starting values, which would make the
/// Aberth correction singular.
pub fn separate_duplicates(guesses: &mut [Complex64], scale: f64) {
    let min_sep = 1e-9 * scale;
    let kick = 1e-6 * scale;
    for i in 0..guesses.len() {
        for j in 0..i {
            if (guesses[i] - guesses[j]).norm() <= min_sep {
                guesses[i] += kick * Complex64::cis(1.3 + 2.1 * i as f64);
            }
        }
    }
}

/// Refines `approx` in place to the roots of `system`.
///
/// Returns the largest final backward error.
pub fn solve(system: &impl NewtonSystem, approx: &mut [Complex64]) -> Result<f64> {
    let m = approx.len();
    debug_assert_eq!(m, system.degree());
    if m == 0 {
        return Ok(0.0);
    }
    let machine = 8.0 * f64::EPSILON * (m as f64 + 1.0);
    let mut done = vec![false; m];
    let mut errors = vec![f64::INFINITY; m];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let step = system.newton(approx[i]);
            errors[i] = step.backward_error;
            if step.backward_error <= machine {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: Complex64 = (0..m)
                .filter(|&k| k != i)
                .map(|k| {
                    let d = approx[i] - approx[k];
                    if d == Complex64::default() {
                        Complex64::default()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - step.ratio * repulsion;
            let delta = if denom == Complex64::default() { step.ratio } else { step.ratio / denom };
            approx[i] -= delta;
            if delta.norm() <= 4.0 * f64::EPSILON * approx[i].norm() {
                done[i] = true;
            }
            if !approx[i].re.is_finite() || !approx[i].im.is_finite() {
                return Err(Error::NonConvergence { iterations: 0, residual: f64::NAN });
            }
        }
        if all_done {
            break;
        }
    }
    let worst = approx
        .iter()
        .map(|&z| system.newton(z).backward_error)
        .fold(0.0, f64::max);
    if worst <= ACCEPTED_BACKWARD_ERROR {
        Ok(worst)
    } else {
        Err(Error::NonConvergence { iterations: MAX_ITERATIONS, residual: worst })
    }
}

/// Groups values closer than `tol` (transitively) and replaces each group by
/// its centroid. Returns the multiplicity of each entry's group.
pub fn merge_clusters(values: &mut [Complex64], tol: f64) -> Vec<usize> {
    merge_clusters_by(values, |a, b| (a - b).norm() < tol)
}

/// As [`merge_clusters`], with pairs joined whenever `same(a, b)` holds.
pub fn merge_clusters_by(values: &mut [Complex64], same: impl Fn(Complex64, Complex64) -> bool) -> Vec<usize> {
    let m = values.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in 0..i {
            if same(values[i], values[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    let mut sums = vec![Complex64::default(); m];
    let mut counts = vec![0usize; m];
    for i in 0..m {
        sums[roots[i]] += values[i];
        counts[roots[i]] += 1;
    }
    for i in 0..m {
        values[i] = sums[roots[i]] / counts[roots[i]] as f64;
    }
    roots.iter().map(|&r| counts[r]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dense_cubic() {
        // (u - 1)(u + 2)(u - i) expanded
        let roots = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::default(); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let sys = Dense { coeffs: &coeffs, floor: 1e-8 };
        let mut approx = circle_guesses(Complex64::default(), 3.0, 3);
        solve(&sys, &mut approx).unwrap();
        for r in roots {
            assert!(approx.iter().any(|z| (z - r).norm() < 1e-12));
        }
    }

    #[test]
    fn critical_points_from_roots() {
        // u^3 - 3u has roots 0, ±√3 and critical points ±1
        let s = 3f64.sqrt();
        let roots = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)];
        let sys = CriticalOfRoots { roots: &roots };
        let mut approx = circle_guesses(Complex64::default(), 1.5, 2);
        solve(&sys, &mut approx).unwrap();
        assert!(approx.iter().any(|z| (z - 1.0).norm() < 1e-13));
        assert!(approx.iter().any(|z| (z + 1.0).norm() < 1e-13));
    }

    #[test]
    fn double_critical_point_clusters() {
        let roots: Vec<_> = (0..3).map(|k| Complex64::cis(TAU * k as f64 / 3.0 + 0.2)).collect();
        let sys = CriticalOfRoots { roots: &roots };
        let mut approx = circle_guesses(Complex64::default(), 0.5, 2);
        solve(&sys, &mut approx).unwrap();
        assert!(approx.iter().all(|z| z.norm() < 1e-7));
        let mult = merge_clusters(&mut approx, 1e-7);
        assert_eq!(mult, vec![2, 2]);
        assert!(approx[0].norm() < 1e-7, "{approx:?}");
    }

    #[test]
    fn merge_is_transitive() {
        let mut v = vec![c(0.0, 0.0), c(0.6, 0.0), c(1.2, 0.0), c(5.0, 0.0)];
        let mult = merge_clusters(&mut v, 0.7);
        assert_eq!(mult, vec![3, 3, 3, 1]);
        assert!((v[0] - c(0.6, 0.0)).norm() < 1e-15);
    }
}
