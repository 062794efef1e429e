//! Interaction and trap potentials, with sampled checks of the standing
//! assumptions: `V ≥ 0` compactly supported and in `L³`, `V_ext` growing and
//! submultiplicative.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::profile::{ClosedForm, RadialProfile, Tail};

/// Analytic shape behind an interaction profile, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    SquareWell { v0: f64, radius: f64 },
    Sampled,
}

/// A radial pair potential `V(r)` with compact support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionPotential {
    pub profile: RadialProfile,
    pub support_radius: f64,
    pub l3_norm: f64,
    pub shape: Shape,
}

impl InteractionPotential {
    /// Build from samples on `[0, R]`; the last node is the support radius.
    /// No sign check here; [`validate`] reports violations.
    pub fn from_samples(grid: Vec<f64>, samples: Vec<f64>) -> Result<Self> {
        let support = *grid.last().ok_or_else(|| invalid("empty grid"))?;
        if !(support > 0.0) {
            return Err(invalid("support radius must be positive"));
        }
        let profile = RadialProfile::new(grid, samples, Tail::Zero { support })?;
        let l3 = trapezoid_moment(&profile, |v| v.abs().powi(3)).cbrt();
        Ok(InteractionPotential {
            profile,
            support_radius: support,
            l3_norm: l3,
            shape: Shape::Sampled,
        })
    }

    /// `V(r)`; exact for analytic shapes.
    pub fn value(&self, r: f64) -> f64 {
        match self.shape {
            Shape::SquareWell { v0, radius } => {
                if r <= radius {
                    v0
                } else {
                    0.0
                }
            }
            Shape::Sampled => self.profile.eval(r),
        }
    }

    /// `∫ V(x) dx` over ℝ³.
    pub fn integral(&self) -> f64 {
        match self.shape {
            Shape::SquareWell { v0, radius } => v0 * 4.0 * PI * radius.powi(3) / 3.0,
            Shape::Sampled => trapezoid_moment(&self.profile, |v| v),
        }
    }

    /// True when the potential vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.profile.samples().iter().all(|&v| v == 0.0)
    }
}

/// `4π ∫ F(V(r)) r² dr` by the trapezoid rule on the profile nodes.
fn trapezoid_moment(p: &RadialProfile, f: impl Fn(f64) -> f64) -> f64 {
    let g = p.grid();
    let s = p.samples();
    let mut acc = 0.0;
    for i in 0..g.len() - 1 {
        let a = f(s[i]) * g[i] * g[i];
        let b = f(s[i + 1]) * g[i + 1] * g[i + 1];
        acc += 0.5 * (a + b) * (g[i + 1] - g[i]);
    }
    4.0 * PI * acc
}

/// `V = V0` on `[0, R]`, zero beyond.
pub fn make_square_well(v0: f64, radius: f64, n_pts: usize) -> Result<InteractionPotential> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid(format!(
            "square well radius must be positive, got {radius}"
        )));
    }
    if !(v0 >= 0.0) || !v0.is_finite() {
        return Err(invalid(format!("square well depth must be >= 0, got {v0}")));
    }
    if n_pts < 16 {
        return Err(invalid(format!("n_pts must be >= 16, got {n_pts}")));
    }
    let profile = RadialProfile::from_fn(n_pts, radius, Tail::Zero { support: radius }, |_| v0)?;
    Ok(InteractionPotential {
        profile,
        support_radius: radius,
        l3_norm: v0 * (4.0 * PI * radius.powi(3) / 3.0).cbrt(),
        shape: Shape::SquareWell { v0, radius },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapKind {
    Harmonic,
    Quartic,
}

impl FromStr for TrapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(TrapKind::Harmonic),
            "quartic" => Ok(TrapKind::Quartic),
            other => Err(invalid(format!("unknown trap kind {other:?}"))),
        }
    }
}

impl TrapKind {
    /// Exponent `d` in `V_ext(r) = r^d`.
    pub fn degree(self) -> i32 {
        match self {
            TrapKind::Harmonic => 2,
            TrapKind::Quartic => 4,
        }
    }
}

/// External trap `V_ext(r) = r^d` with closed-form gradient and Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapPotential {
    pub kind: TrapKind,
    pub profile: RadialProfile,
    pub growth_constant: f64,
    /// `|∇V_ext|(r)`
    pub gradient: RadialProfile,
    pub laplacian: RadialProfile,
}

impl TrapPotential {
    /// Exact `V_ext(r)`.
    pub fn value(&self, r: f64) -> f64 {
        r.powi(self.kind.degree())
    }

    /// Sampled submultiplicativity `V(x+y) ≤ C(V(x)+C)(V(y)+C)` on the
    /// integer lattice `{−m..m}³`, with `V` read from the sampled profile.
    pub fn submultiplicative(&self, c: f64, m: i32) -> bool {
        lattice_triples(&self.profile, m)
            .iter()
            .all(|&(vs, vx, vy)| vs <= c * (vx + c) * (vy + c) * (1.0 + 1e-12))
    }
}

/// Distinct `(V(x+y), V(x), V(y))` over lattice pairs, deduplicated by the
/// squared norms that determine them.
fn lattice_triples(p: &RadialProfile, m: i32) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                pts.push([a, b, c]);
            }
        }
    }
    let mut seen = HashSet::new();
    for x in &pts {
        let nx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        for y in &pts {
            let ny = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            let s = [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
            let ns = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
            seen.insert((ns, nx, ny));
        }
    }
    let mut out: Vec<_> = seen
        .into_iter()
        .map(|(ns, nx, ny)| {
            (
                p.eval((ns as f64).sqrt()),
                p.eval((nx as f64).sqrt()),
                p.eval((ny as f64).sqrt()),
            )
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Smallest `C` (to bisection accuracy) certified on the lattice.
fn fit_submultiplicative_constant(p: &RadialProfile, m: i32) -> f64 {
    let triples = lattice_triples(p, m);
    let ok = |c: f64| triples.iter().all(|&(s, x, y)| s <= c * (x + c) * (y + c));
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub const SUBMULT_LATTICE: i32 = 5;

/// Harmonic `r²` or quartic `r⁴` trap sampled on `[0, r_max]`.
pub fn make_trap(kind: TrapKind, n_pts: usize, r_max: f64) -> Result<TrapPotential> {
    if !(r_max > 0.0) {
        return Err(invalid(format!("r_max must be positive, got {r_max}")));
    }
    if n_pts < 16 {
        return Err(invalid(format!("n_pts must be >= 16, got {n_pts}")));
    }
    let d = kind.degree() as f64;
    let power = |coef: f64, exponent: f64| {
        let form = ClosedForm::Power { coef, exponent };
        let tail = Tail::ClosedForm {
            r_cut: r_max,
            form: form.clone(),
        };
        RadialProfile::from_fn(n_pts, r_max, tail, move |r| form.eval(r))
    };
    let profile = power(1.0, d)?;
    // ∇ r^d = d r^{d-1};  Δ r^d = d(d+1) r^{d-2}
    let gradient = power(d, d - 1.0)?;
    let laplacian = power(d * (d + 1.0), d - 2.0)?;
    let growth_constant = fit_submultiplicative_constant(&profile, SUBMULT_LATTICE);
    Ok(TrapPotential {
        kind,
        profile,
        growth_constant,
        gradient,
        laplacian,
    })
}

/// One assumption check with the value that witnesses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, pass: bool, witness: f64, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        pass,
        witness,
        detail: detail.into(),
    }
}

pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

/// Check a potential against the standing assumptions.
pub fn validate<P: Validate + ?Sized>(p: &P) -> ValidationReport {
    p.validate()
}

impl Validate for InteractionPotential {
    fn validate(&self) -> ValidationReport {
        let s = self.profile.samples();
        let neg = s.iter().position(|&v| v < 0.0);
        let mut checks = vec![match neg {
            Some(i) => check(
                "nonnegative",
                false,
                s[i],
                format!("negative value at node {i}"),
            ),
            None => check(
                "nonnegative",
                true,
                s.iter().cloned().fold(f64::INFINITY, f64::min),
                "V >= 0 at all nodes",
            ),
        }];
        let beyond = self
            .profile
            .grid()
            .iter()
            .zip(s)
            .filter(|(r, _)| **r > self.support_radius)
            .any(|(_, v)| *v != 0.0);
        checks.push(check(
            "compact_support",
            self.profile.is_compact() && !beyond,
            self.support_radius,
            "zero tail beyond the support radius",
        ));
        checks.push(check(
            "l3_finite",
            self.l3_norm.is_finite(),
            self.l3_norm,
            "||V||_3",
        ));
        ValidationReport { checks }
    }
}

impl Validate for TrapPotential {
    fn validate(&self) -> ValidationReport {
        let g = self.profile.grid();
        let s = self.profile.samples();
        let half = g.len() / 2;
        let monotone = s[half..].windows(2).all(|w| w[1] > w[0]);
        let r_far = 4.0 * g[g.len() - 1];
        let far = self.profile.eval(r_far);
        let mut checks = vec![check(
            "growth",
            monotone && far > s[s.len() - 1],
            far,
            format!("monotone on the outer half of the grid; V_ext({r_far}) from the tail"),
        )];
        checks.push(check(
            "submultiplicative",
            self.submultiplicative(self.growth_constant, SUBMULT_LATTICE),
            self.growth_constant,
            format!(
                "sampled on the lattice {{-{m}..{m}}}^3",
                m = SUBMULT_LATTICE
            ),
        ));
        checks.push(check(
            "nonnegative",
            s.iter().all(|&v| v >= 0.0),
            s.iter().cloned().fold(f64::INFINITY, f64::min),
            "V_ext >= 0",
        ));
        // The growth of ∇V_ext, ΔV_ext is recorded as a fitted exponential
        // rate; no threshold is asserted.
        for (name, prof) in [
            ("gradient_rate", &self.gradient),
            ("laplacian_rate", &self.laplacian),
        ] {
            let rate = exponential_rate(prof);
            checks.push(check(
                name,
                rate.is_finite(),
                rate,
                "fitted rate of log(1+|f|) vs r",
            ));
        }
        ValidationReport { checks }
    }
}

fn exponential_rate(p: &RadialProfile) -> f64 {
    let g = p.grid();
    let s = p.samples();
    let half = g.len() / 2;
    let pts: Vec<(f64, f64)> = g[half..]
        .iter()
        .zip(&s[half..])
        .map(|(&r, &v)| (r, (1.0 + v.abs()).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// JSON description of a potential: `{kind, parameters, grid}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub grid: GridSpec,
    /// `(r, V)` pairs for `kind = "sampled"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_pts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_pts: 256,
            r_max: None,
        }
    }
}

impl PotentialSpec {
    pub fn square_well(v0: f64, radius: f64) -> Self {
        PotentialSpec {
            kind: "square_well".into(),
            parameters: [("v0".to_string(), v0), ("radius".to_string(), radius)].into(),
            grid: GridSpec::default(),
            samples: None,
        }
    }

    pub fn trap(kind: TrapKind, r_max: f64) -> Self {
        let name = match kind {
            TrapKind::Harmonic => "harmonic",
            TrapKind::Quartic => "quartic",
        };
        PotentialSpec {
            kind: name.into(),
            parameters: BTreeMap::new(),
            grid: GridSpec {
                n_pts: 128,
                r_max: Some(r_max),
            },
            samples: None,
        }
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| invalid(format!("{} potential needs parameter {key:?}", self.kind)))
    }

    pub fn interaction(&self) -> Result<InteractionPotential> {
        match self.kind.as_str() {
            "square_well" => {
                make_square_well(self.param("v0")?, self.param("radius")?, self.grid.n_pts)
            }
            "zero" => make_square_well(
                0.0,
                self.parameters.get("radius").copied().unwrap_or(1.0),
                self.grid.n_pts,
            ),
            "sampled" => {
                let s = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| invalid("sampled potential needs samples"))?;
                InteractionPotential::from_samples(
                    s.iter().map(|p| p.0).collect(),
                    s.iter().map(|p| p.1).collect(),
                )
            }
            other => Err(invalid(format!("unknown interaction kind {other:?}"))),
        }
    }

    pub fn trap_potential(&self) -> Result<TrapPotential> {
        let kind: TrapKind = self.kind.parse()?;
        make_trap(kind, self.grid.n_pts, self.grid.r_max.unwrap_or(10.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_examples() {
        let z = make_square_well(0.0, 1.0, 64).unwrap();
        assert_eq!(z.l3_norm, 0.0);
        assert!(z.is_zero());
        let w = make_square_well(2.0, 1.0, 256).unwrap();
        assert!(w.profile.samples().iter().all(|&v| v == 2.0));
        assert!((w.integral() - 8.37758040957278).abs() < 1e-12);
        assert!((trapezoid_moment(&w.profile, |v| v) - w.integral()).abs() < 1e-4);
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(
            make_square_well(-1.0, 1.0, 64),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_square_well(1.0, 0.0, 64),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            "cubic".parse::<TrapKind>(),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn traps() {
        let h = make_trap(TrapKind::Harmonic, 128, 10.0).unwrap();
        assert!((h.profile.eval(2.0) - 4.0).abs() < 1e-10);
        let q = make_trap(TrapKind::Quartic, 128, 10.0).unwrap();
        assert_eq!(q.value(2.0), 16.0);
        assert!((q.profile.eval(2.0) - 16.0).abs() < 1e-4);
        assert!(h.submultiplicative(2.0, SUBMULT_LATTICE));
        assert!(h.growth_constant <= 2.0);
        assert!(validate(&h).all_pass());
        assert!(validate(&q).all_pass());
        assert!((h.laplacian.eval(3.0) - 6.0).abs() < 1e-12);
        assert!((q.laplacian.eval(2.0) - 80.0).abs() < 1e-9);
    }

    #[test]
    fn negative_node_is_reported() {
        let grid: Vec<f64> = (0..32).map(|i| i as f64 / 31.0).collect();
        let mut s = vec![1.0; 32];
        s[7] = -0.5;
        let v = InteractionPotential::from_samples(grid, s).unwrap();
        let rep = validate(&v);
        let c = rep.get("nonnegative").unwrap();
        assert!(!c.pass && c.detail.contains("node 7"));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = PotentialSpec::square_well(2.0, 1.0);
        let j = serde_json::to_string(&s).unwrap();
        let back: PotentialSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        assert_eq!(back.interaction().unwrap().support_radius, 1.0);
    }
}
