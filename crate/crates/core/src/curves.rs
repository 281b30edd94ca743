//! Geometric braids parametrized by closed trigonometric-polynomial curves.
//!
//! A closure component with `n_i` strands is a single curve
//! `Z(t) = Σ c_k e^{i f_k t}` with every frequency `f_k` a multiple of
//! `1/n_i`, so `Z` has period `2π n_i`. Strand `j` of the component is
//! `Z(t + 2π(j-1))`, which makes the closure condition an identity.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational frequency `num / den`, stored in lowest terms with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Freq {
    num: i64,
    den: i64,
}

impl Freq {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidCurve("frequency denominator is zero".into()));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let s = den.signum();
        Ok(Self { num: s * num / g, den: s * den / g })
    }

    pub fn integer(k: i64) -> Self {
        Self { num: k, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn scale(self, r: i64) -> Self {
        Self::new(self.num * r, self.den).expect("non-zero denominator")
    }

    fn shift(self, k: i64) -> Self {
        Self::new(self.num + k * self.den, self.den).expect("non-zero denominator")
    }

    fn divide(self, d: i64) -> Self {
        Self::new(self.num, self.den * d).expect("non-zero denominator")
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub coeff: Complex64,
    pub freq: Freq,
}

impl TrigTerm {
    pub fn new(coeff: Complex64, freq: Freq) -> Self {
        Self { coeff, freq }
    }
}

/// One closure component: `strands` strands swept out by a single curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCurve {
    strands: usize,
    terms: Vec<TrigTerm>,
}

impl ComponentCurve {
    pub fn new(strands: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidCurve("a component needs at least one strand".into()));
        }
        for term in &terms {
            if (strands as i64) % term.freq.den != 0 {
                return Err(Error::InvalidCurve(format!(
                    "frequency {} times {} strands is not an integer",
                    term.freq, strands
                )));
            }
        }
        Ok(Self { strands, terms })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// `Z(t)`.
    pub fn value(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.coeff * Complex64::cis(term.freq.value() * t))
            .sum()
    }

    /// `Z'(t)`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| {
                let f = term.freq.value();
                term.coeff * Complex64::new(0.0, f) * Complex64::cis(f * t)
            })
            .sum()
    }

    /// Position of strand `j` (1-based): `Z(t + 2π(j-1))`.
    pub fn strand(&self, j: usize, t: f64) -> Complex64 {
        self.value(t + TAU * (j as f64 - 1.0))
    }

    pub fn max_abs_freq(&self) -> f64 {
        self.terms.iter().map(|t| t.freq.value().abs()).fold(0.0, f64::max)
    }

    /// Upper bound `Σ |c_k|` on `|Z(t)|`.
    pub fn radius_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    fn map_terms(&self, strands: usize, f: impl Fn(&TrigTerm) -> TrigTerm) -> Result<Self> {
        Self::new(strands, self.terms.iter().map(f).collect())
    }
}

/// Identifies a strand by component (0-based) and strand number `j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrandLabel {
    pub component: usize,
    pub strand: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrandPoint {
    pub label: StrandLabel,
    pub z: Complex64,
}

/// A geometric braid: an ordered list of closure components.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamBraid {
    components: Vec<ComponentCurve>,
}

/// A family of `n` moving points in the plane, sampled with velocities.
pub trait StrandFamily: Sync {
    fn strand_count(&self) -> usize;

    /// Writes positions and t-derivatives of all strands at `t`.
    fn sample(&self, t: f64, z: &mut [Complex64], dz: &mut [Complex64]);

    fn positions(&self, t: f64) -> Vec<Complex64> {
        let n = self.strand_count();
        let (mut z, mut dz) = (vec![Complex64::default(); n], vec![Complex64::default(); n]);
        self.sample(t, &mut z, &mut dz);
        z
    }
}

impl ParamBraid {
    pub fn new(components: Vec<ComponentCurve>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidCurve("a braid needs at least one component".into()));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[ComponentCurve] {
        &self.components
    }

    /// Total strand count `n = Σ n_i`.
    pub fn strands(&self) -> usize {
        self.components.iter().map(|c| c.strands).sum()
    }

    pub fn labels(&self) -> Vec<StrandLabel> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| (1..=c.strands).map(move |j| StrandLabel { component: i, strand: j }))
            .collect()
    }

    pub fn eval(&self, t: f64) -> Vec<StrandPoint> {
        self.labelled(|c, j| c.strand(j, t))
    }

    pub fn deriv(&self, t: f64) -> Vec<StrandPoint> {
        self.labelled(|c, j| c.derivative(t + TAU * (j as f64 - 1.0)))
    }

    fn labelled(&self, f: impl Fn(&ComponentCurve, usize) -> Complex64) -> Vec<StrandPoint> {
        self.labels()
            .into_iter()
            .map(|label| StrandPoint { label, z: f(&self.components[label.component], label.strand) })
            .collect()
    }

    pub fn max_abs_freq(&self) -> f64 {
        self.components.iter().map(ComponentCurve::max_abs_freq).fold(0.0, f64::max)
    }

    /// Multiplies every strand by `e^{ikt}`, i.e. adds `k` full twists.
    pub fn twist(&self, k: i64) -> ParamBraid {
        let components = self
            .components
            .iter()
            .map(|c| {
                c.map_terms(c.strands, |term| TrigTerm::new(term.coeff, term.freq.shift(k)))
                    .expect("integer shift keeps denominators")
            })
            .collect();
        ParamBraid { components }
    }

    /// The `r`-th power: the root set at `t` is the original root set at `r t`.
    ///
    /// A component with `n_i` strands splits into `gcd(|r|, n_i)` components.
    pub fn power(&self, r: i64) -> Result<ParamBraid> {
        if r == 0 {
            return Err(Error::ZeroPower);
        }
        let mut components = Vec::new();
        for c in &self.components {
            let n = c.strands as i64;
            let d = gcd(r.unsigned_abs(), n as u64) as i64;
            let strands = (n / d) as usize;
            for offset in 0..d {
                // W(t) = Z(r t + 2π offset)
                components.push(c.map_terms(strands, |term| {
                    let phase = TAU * offset as f64 * term.freq.value();
                    TrigTerm::new(term.coeff * Complex64::cis(phase), term.freq.scale(r))
                })?);
            }
        }
        Ok(ParamBraid { components })
    }

    /// Minimum pairwise strand distance and closure residual on a uniform grid.
    pub fn validate(&self, grid: usize) -> Result<Validation> {
        if grid < 2 {
            return Err(Error::Config("validation grid needs at least 2 samples".into()));
        }
        let n = self.strands();
        let (min_gap, argmin_t) = (0..grid)
            .into_par_iter()
            .map(|k| {
                let t = TAU * k as f64 / grid as f64;
                let z = self.positions(t);
                let mut best = f64::INFINITY;
                for a in 0..n {
                    for b in a + 1..n {
                        best = best.min((z[a] - z[b]).norm());
                    }
                }
                (best, t)
            })
            .reduce(|| (f64::INFINITY, 0.0), |x, y| if y.0 < x.0 { y } else { x });
        let mut closure_residual: f64 = 0.0;
        for c in &self.components {
            for j in 1..=c.strands {
                let next = if j == c.strands { 1 } else { j + 1 };
                closure_residual = closure_residual.max((c.strand(j, TAU) - c.strand(next, 0.0)).norm());
            }
        }
        Ok(Validation { min_gap, argmin_t, closure_residual })
    }

    /// `max_t max_j |z_j(t)|` on a uniform grid.
    pub fn scale(&self, grid: usize) -> f64 {
        (0..grid.max(1))
            .map(|k| {
                let t = TAU * k as f64 / grid.max(1) as f64;
                self.positions(t).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

impl StrandFamily for ParamBraid {
    fn strand_count(&self) -> usize {
        self.strands()
    }

    fn sample(&self, t: f64, z: &mut [Complex64], dz: &mut [Complex64]) {
        let mut g = 0;
        for c in &self.components {
            for j in 0..c.strands {
                let s = t + TAU * j as f64;
                z[g] = c.value(s);
                dz[g] = c.derivative(s);
                g += 1;
            }
        }
    }
}

/// The strands of `base` seen through the time change `τ = scale·t + shift`.
pub struct Reparametrized<'a> {
    pub base: &'a ParamBraid,
    pub scale: f64,
    pub shift: f64,
}

impl StrandFamily for Reparametrized<'_> {
    fn strand_count(&self) -> usize {
        self.base.strands()
    }

    fn sample(&self, t: f64, z: &mut [Complex64], dz: &mut [Complex64]) {
        self.base.sample(self.scale * t + self.shift, z, dz);
        for v in dz.iter_mut() {
            *v *= self.scale;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Validation {
    pub min_gap: f64,
    pub argmin_t: f64,
    pub closure_residual: f64,
}

/// Names accepted by [`library`].
pub const LIBRARY_NAMES: [&str; 4] = ["hopf", "trefoil_neg", "figure8", "sigma1_2strand"];

/// Built-in braids.
///
/// * `hopf`: `e^{it}` and `-e^{it}`, closing to the Hopf link.
/// * `trefoil_neg`: `e^{i(-2t + 2πℓ)/3}`, the braid `(σ_2^{-1}σ_1^{-1})^2`.
/// * `figure8`: `cos((2t+2πℓ)/3) + (i/2) sin(2(2t+2πℓ)/3)`, the braid `(σ_1σ_2^{-1})^2`.
/// * `sigma1_2strand`: `e^{i(t + 2πℓ)/2}`, the braid `σ_1`.
pub fn library(name: &str) -> Result<ParamBraid> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let term = |coeff: Complex64, num: i64, den: i64| TrigTerm::new(coeff, Freq::new(num, den).unwrap());
    let components = match name {
        "hopf" => vec![
            ComponentCurve::new(1, vec![term(c(1.0, 0.0), 1, 1)])?,
            ComponentCurve::new(1, vec![term(c(-1.0, 0.0), 1, 1)])?,
        ],
        "trefoil_neg" => vec![ComponentCurve::new(3, vec![term(c(1.0, 0.0), -2, 3)])?],
        "figure8" => vec![ComponentCurve::new(
            3,
            vec![
                term(c(0.5, 0.0), 2, 3),
                term(c(0.5, 0.0), -2, 3),
                term(c(0.25, 0.0), 4, 3),
                term(c(-0.25, 0.0), -4, 3),
            ],
        )?],
        "sigma1_2strand" => vec![ComponentCurve::new(2, vec![term(c(-1.0, 0.0), 1, 2)])?],
        other => return Err(Error::UnknownLibrary(other.to_string())),
    };
    ParamBraid::new(components)
}

/// Grid used to check strand distinctness of freshly built satellites.
pub const SATELLITE_VALIDATION_GRID: usize = 2048;

/// Relative separation below which two strands count as colliding.
pub const SEPARATION_TOLERANCE: f64 = 1e-10;

/// The satellite braid: strand `j` of pattern component `i` is replaced by an
/// `eps`-scaled copy of `companions[i]^powers[i]`, whose time runs through the
/// `j`-th of `n_i` equal slices, `z_{i,j}(t) + eps·w((t + 2π(j-1))/n_i)`.
pub fn satellite(
    pattern: &ParamBraid,
    companions: &[ParamBraid],
    eps: f64,
    powers: &[i64],
) -> Result<ParamBraid> {
    let m = pattern.components.len();
    if companions.len() != m {
        return Err(Error::SatelliteMismatch(format!(
            "pattern has {m} components but {} companions were given",
            companions.len()
        )));
    }
    if powers.len() != m {
        return Err(Error::SatelliteMismatch(format!(
            "pattern has {m} components but {} powers were given",
            powers.len()
        )));
    }
    let s = companions[0].strands();
    if companions.iter().any(|c| c.strands() != s) {
        return Err(Error::SatelliteMismatch("companions must all have the same number of strands".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let mut components = Vec::new();
    for ((outer, companion), &r) in pattern.components.iter().zip(companions).zip(powers) {
        let inner = companion.power(r)?;
        let n_i = outer.strands as i64;
        for w in &inner.components {
            let mut terms = outer.terms.clone();
            terms.extend(w.terms.iter().map(|term| TrigTerm::new(term.coeff * eps, term.freq.divide(n_i))));
            components.push(ComponentCurve::new(outer.strands * w.strands, terms)?);
        }
    }
    let braid = ParamBraid { components };
    let v = braid.validate(SATELLITE_VALIDATION_GRID)?;
    let scale = pattern.scale(256).max(f64::MIN_POSITIVE);
    if v.min_gap <= SEPARATION_TOLERANCE * scale {
        return Err(Error::EpsTooLarge { eps, min_gap: v.min_gap });
    }
    Ok(braid)
}

/// Sufficient distinctness bound: `½ · min pattern gap / max companion radius`.
pub fn max_feasible_eps(pattern: &ParamBraid, companions: &[ParamBraid], grid: usize) -> Result<f64> {
    let gap = pattern.validate(grid)?.min_gap;
    let radius = companions.iter().map(|c| c.scale(grid)).fold(0.0, f64::max);
    Ok(if radius == 0.0 { f64::INFINITY } else { 0.5 * gap / radius })
}

// ---- JSON ----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    freq_num: i64,
    freq_den: i64,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    strands: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct BraidJson {
    components: Vec<ComponentJson>,
}

impl Serialize for ParamBraid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BraidJson {
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    strands: c.strands,
                    terms: c
                        .terms
                        .iter()
                        .map(|t| TermJson {
                            re: t.coeff.re,
                            im: t.coeff.im,
                            freq_num: t.freq.num,
                            freq_den: t.freq.den,
                        })
                        .collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParamBraid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BraidJson::deserialize(deserializer)?;
        let components = raw
            .components
            .into_iter()
            .map(|c| {
                let terms = c
                    .terms
                    .into_iter()
                    .map(|t| Ok(TrigTerm::new(Complex64::new(t.re, t.im), Freq::new(t.freq_num, t.freq_den)?)))
                    .collect::<Result<Vec<_>>>()?;
                ComponentCurve::new(c.strands, terms)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ParamBraid::new(components).map_err(D::Error::custom)
    }
}

impl ParamBraid {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("braid serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn contains_all(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| close(*x, *y, tol)))
    }

    #[test]
    fn freq_normalizes() {
        let f = Freq::new(4, -6).unwrap();
        assert_eq!((f.num(), f.den()), (-2, 3));
        assert!(Freq::new(1, 0).is_err());
        assert_eq!(Freq::new(0, 5).unwrap(), Freq::integer(0));
    }

    #[test]
    fn component_rejects_bad_denominator() {
        let t = TrigTerm::new(Complex64::new(1.0, 0.0), Freq::new(1, 3).unwrap());
        assert!(ComponentCurve::new(2, vec![t]).is_err());
        assert!(ComponentCurve::new(6, vec![t]).is_ok());
        assert!(ComponentCurve::new(0, vec![]).is_err());
    }

    #[test]
    fn library_evaluations() {
        let hopf = library("hopf").unwrap();
        let z: Vec<_> = hopf.eval(0.0).iter().map(|p| p.z).collect();
        assert!(contains_all(&z, &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], 1e-15));
        let dz = hopf.deriv(0.0);
        assert!(close(dz[0].z, Complex64::new(0.0, 1.0), 1e-15));

        let s = library("sigma1_2strand").unwrap();
        let z: Vec<_> = s.eval(0.0).iter().map(|p| p.z).collect();
        assert!(contains_all(&z, &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)], 1e-15));

        let f8 = library("figure8").unwrap();
        assert_eq!(f8.strands(), 3);
        assert_eq!(f8.components().len(), 1);
        for &t in &[0.0, 0.4, 2.0, 5.5] {
            let z: Vec<_> = f8.eval(t).iter().map(|p| p.z).collect();
            let expected: Vec<_> = (1..=3)
                .map(|l| {
                    let th = (2.0 * t + TAU * l as f64) / 3.0;
                    Complex64::new(th.cos(), 0.5 * (2.0 * th).sin())
                })
                .collect();
            assert!(contains_all(&z, &expected, 1e-14));
        }
        let tre = library("trefoil_neg").unwrap();
        let z: Vec<_> = tre.eval(1.1).iter().map(|p| p.z).collect();
        let expected: Vec<_> = (1..=3).map(|l| Complex64::cis((-2.0 * 1.1 + TAU * l as f64) / 3.0)).collect();
        assert!(contains_all(&z, &expected, 1e-14));
        assert!(matches!(library("unknot"), Err(Error::UnknownLibrary(_))));
    }

    #[test]
    fn closure_is_an_identity() {
        for name in LIBRARY_NAMES {
            let b = library(name).unwrap();
            for k in 0..64 {
                let t = 0.37 * k as f64;
                for c in b.components() {
                    for j in 1..=c.strands() {
                        let next = if j == c.strands() { 1 } else { j + 1 };
                        assert!(close(c.strand(j, t + TAU), c.strand(next, t), 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn validation_examples() {
        let v = library("hopf").unwrap().validate(256).unwrap();
        assert!((v.min_gap - 2.0).abs() < 1e-12);
        assert!(v.closure_residual < 1e-12);
        assert!(library("figure8").unwrap().validate(256).unwrap().min_gap > 0.5);
    }

    #[test]
    fn twist_zero_is_identity_and_twist_one_rotates() {
        let hopf = library("hopf").unwrap();
        assert_eq!(hopf.twist(0), hopf);
        let tw = hopf.twist(1);
        for &t in &[0.0, 0.3, 2.2] {
            let z: Vec<_> = tw.eval(t).iter().map(|p| p.z).collect();
            let e = Complex64::cis(2.0 * t);
            assert!(contains_all(&z, &[e, -e], 1e-14));
        }
    }

    #[test]
    fn power_of_sigma1_is_hopf() {
        let sq = library("sigma1_2strand").unwrap().power(2).unwrap();
        assert_eq!(sq.components().len(), 2);
        for &t in &[0.0, 0.9, 3.0] {
            let z: Vec<_> = sq.eval(t).iter().map(|p| p.z).collect();
            let e = Complex64::cis(t);
            assert!(contains_all(&z, &[e, -e], 1e-14));
        }
        assert!(library("hopf").unwrap().power(0).is_err());
        let b = library("figure8").unwrap();
        assert_eq!(b.power(1).unwrap(), b);
    }

    #[test]
    fn satellite_with_zero_companion_is_the_pattern() {
        let pattern = library("figure8").unwrap();
        let zero = ParamBraid::new(vec![ComponentCurve::new(1, vec![]).unwrap()]).unwrap();
        let sat = satellite(&pattern, &[zero], 0.3, &[1]).unwrap();
        for &t in &[0.0, 1.0, 4.0] {
            let a: Vec<_> = sat.eval(t).iter().map(|p| p.z).collect();
            let b: Vec<_> = pattern.eval(t).iter().map(|p| p.z).collect();
            assert!(contains_all(&a, &b, 1e-14));
        }
    }

    #[test]
    fn satellite_preconditions() {
        let hopf = library("hopf").unwrap();
        let tre = library("trefoil_neg").unwrap();
        let s1 = library("sigma1_2strand").unwrap();
        assert!(matches!(satellite(&hopf, &[tre.clone(), s1], 0.1, &[1, 1]), Err(Error::SatelliteMismatch(_))));
        assert!(matches!(satellite(&hopf, std::slice::from_ref(&tre), 0.1, &[1]), Err(Error::SatelliteMismatch(_))));
        assert!(satellite(&hopf, &[tre.clone(), tre.clone()], 0.1, &[1, 0]).is_err());
        // constant companions ±1 with eps = 1 put both strands at 0 when t = π
        let one = |re: f64| {
            ParamBraid::new(vec![ComponentCurve::new(1, vec![TrigTerm::new(Complex64::new(re, 0.0), Freq::integer(0))]).unwrap()])
                .unwrap()
        };
        assert!(matches!(satellite(&hopf, &[one(1.0), one(-1.0)], 1.0, &[1, 1]), Err(Error::EpsTooLarge { .. })));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let b = library("figure8").unwrap();
        let text = b.to_json();
        assert!(text.contains("\"freq_den\": 3"));
        assert_eq!(ParamBraid::from_json(&text).unwrap(), b);
        let bad = r#"{"components":[{"strands":2,"terms":[{"re":1,"im":0,"freq_num":1,"freq_den":3}]}]}"#;
        assert!(ParamBraid::from_json(bad).is_err());
        assert!(ParamBraid::from_json("{").is_err());
    }
}
