//! The scalar transition functions of the collar deformation.
//!
//! Six functions on `[0,1]` drive everything: the adapted-form pair
//! `(f₀, g₀)`, the limit pair `(f₁, g₁)`, the cutoff `h` and the closed-
//! leaf trigger `e`. Their plateaus must be *exact* — the equality loci
//! of the term lemmas are only testable where a factor is exactly zero —
//! so every curve returns literal constants on its plateaus and a
//! mollifier ratio in between.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impl_curve;
use crate::scalar::{Curve, CurveLinComb, Dual, Scalar};
use crate::verify::report::{param_f64, CheckReport, Params};

/// Guard width: inside this distance of a plateau edge the mollifier is
/// below the double-precision floor anyway, so the plateau value is
/// returned directly. Keeps dual gradients free of 0·∞.
const EDGE: f64 = 1e-12;

fn mollifier_ratio<S: Scalar>(t: S) -> S {
    // exp(-1/t) / (exp(-1/t) + exp(-1/(1-t))) for t in (0,1).
    let m0 = (-(S::one() / t.clone())).exp();
    let m1 = (-(S::one() / (S::one() - t))).exp();
    m0.clone() / (m0 + m1)
}

/// C^∞ monotone step: 0 on (−∞,a], 1 on [b,∞), strictly increasing
/// between, built from the symmetric exp(−1/x) mollifier ratio.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    a: f64,
    b: f64,
}

impl SmoothStep {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::contract(format!(
                "smooth_step needs a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(SmoothStep { a, b })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        let t = (x - S::constant(self.a)) * S::constant(1.0 / (self.b - self.a));
        let tv = t.value();
        if tv <= EDGE {
            S::zero()
        } else if tv >= 1.0 - EDGE {
            S::one()
        } else {
            mollifier_ratio(t)
        }
    }
}
impl_curve!(SmoothStep);

/// `1 − step`: falls from 1 to 0 across `[a,b]`.
#[derive(Debug, Clone)]
pub struct FallingStep(SmoothStep);

impl FallingStep {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Ok(FallingStep(SmoothStep::new(a, b)?))
    }

    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        S::one() - self.0.eval_generic(x)
    }
}
impl_curve!(FallingStep);

/// C^∞ bump supported on `[lo,hi]`, normalized to `amplitude` at the
/// midpoint: `amplitude · exp(4 − 1/(τ(1−τ)))` with `τ` the unit-interval
/// coordinate.
#[derive(Debug, Clone)]
pub struct Bump {
    lo: f64,
    hi: f64,
    amplitude: f64,
}

impl Bump {
    pub fn new(lo: f64, hi: f64, amplitude: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::contract(format!("bump needs lo < hi, got {lo}, {hi}")));
        }
        Ok(Bump { lo, hi, amplitude })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        let t = (x - S::constant(self.lo)) * S::constant(1.0 / (self.hi - self.lo));
        let tv = t.value();
        if tv <= EDGE || tv >= 1.0 - EDGE {
            return S::zero();
        }
        let inv = S::one() / (t.clone() * (S::one() - t));
        (S::constant(4.0) - inv).exp() * S::constant(self.amplitude)
    }
}
impl_curve!(Bump);

/// `f₀(r) = 1 − c·r²` (positive, strictly decreasing for c ∈ (0,1)).
#[derive(Debug, Clone)]
pub struct QuadraticDrop {
    c: f64,
}

impl QuadraticDrop {
    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        S::one() - S::constant(self.c) * x.clone() * x
    }
}
impl_curve!(QuadraticDrop);

/// `g₀(r) = r² + (1 − r²)·step(r)`: exactly `r²` until the blend starts,
/// exactly 1 after it ends, weakly increasing throughout.
#[derive(Debug, Clone)]
pub struct BlendedSquare {
    step: SmoothStep,
}

impl BlendedSquare {
    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        let r2 = x.clone() * x.clone();
        let s = self.step.eval_generic(x);
        r2.clone() + (S::one() - r2) * s
    }
}
impl_curve!(BlendedSquare);

/// Shape parameters for the transition-function suite; everything the
/// profile needs to be rebuilt, in a human-readable key-value format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    /// `f₀ = 1 − c·r²`.
    pub f0_quadratic: f64,
    /// Blend interval taking `g₀` from `r²` to 1.
    pub g0_blend: (f64, f64),
    /// Fall interval of `f₁` (1 before, 0 after).
    pub f1_fall: (f64, f64),
    /// Rise interval of `g₁` (0 before, 1 after).
    pub g1_rise: (f64, f64),
    /// Fall interval of `h`.
    pub h_fall: (f64, f64),
    /// Support of `e`.
    pub e_support: (f64, f64),
    /// `e` at the middle of its support; must be nonzero for a valid
    /// profile.
    pub e_amplitude: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            f0_quadratic: 0.5,
            g0_blend: (0.8, 0.95),
            f1_fall: (0.25, 0.5),
            g1_rise: (0.5, 0.75),
            h_fall: (0.75, 0.9),
            e_support: (0.4, 0.6),
            e_amplitude: 1.0,
        }
    }
}

/// The transition-function suite `(f₀, g₀, f₁, g₁, h, e)` with its shape
/// metadata. Curves supply values and analytic first derivatives; the
/// validator re-checks every constraint numerically.
#[derive(Clone)]
pub struct TransitionProfile {
    pub f0: Arc<dyn Curve>,
    pub g0: Arc<dyn Curve>,
    pub f1: Arc<dyn Curve>,
    pub g1: Arc<dyn Curve>,
    pub h: Arc<dyn Curve>,
    pub e: Arc<dyn Curve>,
    pub params: ProfileParams,
}

impl std::fmt::Debug for TransitionProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransitionProfile").field("params", &self.params).finish()
    }
}

impl TransitionProfile {
    /// Build a profile from shape parameters.
    pub fn from_params(params: ProfileParams) -> Result<Self> {
        let intervals = [
            ("g0_blend", params.g0_blend),
            ("f1_fall", params.f1_fall),
            ("g1_rise", params.g1_rise),
            ("h_fall", params.h_fall),
            ("e_support", params.e_support),
        ];
        for (name, (a, b)) in intervals {
            if !(0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::contract(format!(
                    "{name} must satisfy 0 ≤ a < b ≤ 1, got ({a}, {b})"
                )));
            }
        }
        if !(params.f0_quadratic > 0.0 && params.f0_quadratic < 1.0) {
            return Err(Error::contract("f0_quadratic must lie in (0,1)"));
        }
        Ok(TransitionProfile {
            f0: Arc::new(QuadraticDrop { c: params.f0_quadratic }),
            g0: Arc::new(BlendedSquare {
                step: SmoothStep::new(params.g0_blend.0, params.g0_blend.1)?,
            }),
            f1: Arc::new(FallingStep::new(params.f1_fall.0, params.f1_fall.1)?),
            g1: Arc::new(SmoothStep::new(params.g1_rise.0, params.g1_rise.1)?),
            h: Arc::new(FallingStep::new(params.h_fall.0, params.h_fall.1)?),
            e: Arc::new(Bump::new(
                params.e_support.0,
                params.e_support.1,
                params.e_amplitude,
            )?),
            params,
        })
    }

    /// The value `e(midpoint of support)`.
    pub fn e_amplitude(&self) -> f64 {
        self.params.e_amplitude
    }

    /// Interpolant `f_t = (1−t)f₀ + t f₁`.
    pub fn f_t(&self, t: f64) -> Arc<dyn Curve> {
        Arc::new(CurveLinComb { a: 1.0 - t, f: self.f0.clone(), b: t, g: self.f1.clone() })
    }

    /// Interpolant `g_t = (1−t)g₀ + t g₁`.
    pub fn g_t(&self, t: f64) -> Arc<dyn Curve> {
        Arc::new(CurveLinComb { a: 1.0 - t, f: self.g0.clone(), b: t, g: self.g1.clone() })
    }

    /// Serialize the shape parameters as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(&self.params).expect("profile params serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let params: ProfileParams =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_params(params)
    }
}

/// The default profile of the artifact. The amplitude scales `e`; it must
/// be nonzero (Theorem hypotheses require `e(1/2) ≠ 0`).
pub fn make_default_profiles(e_amplitude: f64) -> Result<TransitionProfile> {
    if e_amplitude == 0.0 {
        return Err(Error::contract(
            "e_amplitude must be nonzero; use TransitionProfile::from_params to build \
             deliberately degenerate profiles",
        ));
    }
    TransitionProfile::from_params(ProfileParams { e_amplitude, ..ProfileParams::default() })
}

/// C^∞ monotone step function from 0 to 1 across `[a,b]`, as a curve.
pub fn smooth_step(a: f64, b: f64) -> Result<Arc<dyn Curve>> {
    Ok(Arc::new(SmoothStep::new(a, b)?))
}

// ---------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------

const GRID: usize = 10_000;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n as f64 - 1.0);
    (0..n).map(move |i| lo + step * i as f64)
}

/// Sign-condition grids shrink the open interval by 3% per side: closer
/// to a plateau edge the mollifier ratio rounds to an exact plateau value
/// (the small exponential drops below one ulp of the large one), so a
/// *strict* sign is not decidable in double precision there. The cutoff
/// comes from `1/(1−τ) − 1/τ < ln(2/ε_f64) ≈ 36.7`.
fn open_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let w = (hi - lo) * 3e-2;
    grid(lo + w, hi - w, n)
}

struct ConstraintScan {
    name: &'static str,
    /// Worst (smallest) value of the constraint's margin function.
    worst: f64,
    at: f64,
    /// Pass requires `worst > threshold`: strict sign conditions use 0,
    /// exact identities allow a worst margin of exactly 0.
    threshold: f64,
}

fn scan(
    name: &'static str,
    points: impl Iterator<Item = f64>,
    f: impl Fn(f64) -> f64,
) -> ConstraintScan {
    let mut worst = f64::INFINITY;
    let mut at = f64::NAN;
    for r in points {
        let v = f(r);
        if v < worst {
            worst = v;
            at = r;
        }
    }
    ConstraintScan { name, worst, at, threshold: 0.0 }
}

fn exactness(name: &'static str, points: impl Iterator<Item = f64>, f: impl Fn(f64) -> f64) -> ConstraintScan {
    // Margin 0 when the identity is exact, negative otherwise.
    let mut s = scan(name, points, |r| -f(r).abs());
    s.threshold = -f64::EPSILON;
    s
}

/// Evaluate every profile invariant on a dense grid plus exact plateau
/// spot checks. One report per constraint; the margin is the worst value
/// of the constraint's slack function (positive = satisfied strictly,
/// zero = satisfied exactly, negative = violated).
pub fn validate_profiles(p: &TransitionProfile) -> Vec<CheckReport> {
    let pr = &p.params;
    let scans = vec![
        scan("f0 positive on [0,1]", grid(0.0, 1.0, GRID), |r| p.f0.value(r)),
        scan("f0' negative on (0,1]", grid(1e-4, 1.0, GRID), |r| -p.f0.deriv(r)),
        scan("g0 weakly increasing", grid(0.0, 1.0, GRID), |r| p.g0.deriv(r) + 1e-12),
        exactness("g0 = r^2 on [0,1/2]", grid(0.0, 0.5, GRID / 4), |r| p.g0.value(r) - r * r),
        exactness("g0 = 1 near r=1", grid(pr.g0_blend.1, 1.0, GRID / 16), |r| {
            p.g0.value(r) - 1.0
        }),
        exactness("f1 = 1 on [0,1/4]", grid(0.0, pr.f1_fall.0, GRID / 16), |r| {
            p.f1.value(r) - 1.0
        }),
        exactness("f1 = 0 on [1/2,1]", grid(pr.f1_fall.1, 1.0, GRID / 8), |r| p.f1.value(r)),
        scan(
            "f1' negative on (1/4,1/2)",
            open_grid(pr.f1_fall.0, pr.f1_fall.1, GRID / 4),
            |r| -p.f1.deriv(r),
        ),
        exactness("g1 = 0 on [0,1/2]", grid(0.0, pr.g1_rise.0, GRID / 8), |r| p.g1.value(r)),
        exactness("g1 = 1 on [3/4,1]", grid(pr.g1_rise.1, 1.0, GRID / 16), |r| {
            p.g1.value(r) - 1.0
        }),
        scan(
            "g1' positive on (1/2,3/4)",
            open_grid(pr.g1_rise.0, pr.g1_rise.1, GRID / 4),
            |r| p.g1.deriv(r),
        ),
        exactness("h = 1 on [0,3/4]", grid(0.0, pr.h_fall.0, GRID / 8), |r| p.h.value(r) - 1.0),
        exactness("h = 0 near r=1", grid(pr.h_fall.1, 1.0, GRID / 16), |r| p.h.value(r)),
        exactness(
            "e supported near r=1/2",
            grid(0.0, pr.e_support.0, GRID / 16).chain(grid(pr.e_support.1, 1.0, GRID / 16)),
            |r| p.e.value(r),
        ),
        {
            let mid = 0.5 * (pr.e_support.0 + pr.e_support.1);
            ConstraintScan {
                name: "e(1/2) nonzero",
                worst: p.e.value(mid).abs(),
                at: mid,
                threshold: 0.0,
            }
        },
        scan("contact quantity (g0'f0 - f0'g0)/r > 0 on (0,1]", grid(1e-4, 1.0, GRID), |r| {
            contact_quantity(p, r)
        }),
        {
            // Limit r → 0 of the contact quantity equals 2·f0(0).
            let limit = contact_quantity(p, 1e-8);
            ConstraintScan {
                name: "contact quantity limit at r=0 equals 2·f0(0)",
                worst: 1e-6 - (limit - 2.0 * p.f0.value(0.0)).abs(),
                at: 0.0,
                threshold: 0.0,
            }
        },
    ];
    scans
        .into_iter()
        .map(|s| {
            let mut params = Params::new();
            params.insert("grid".into(), serde_json::json!(GRID));
            params.insert("worst_at".into(), param_f64(s.at));
            CheckReport::positivity(s.name, "profile", params, s.worst, None, s.threshold)
        })
        .collect()
}

/// `(g₀'f₀ − f₀'g₀)/r` generalized to any `(f, g)` pair at radius `r`.
pub fn wronskian_over_r(f: &dyn Curve, g: &dyn Curve, r: f64) -> f64 {
    (g.deriv(r) * f.value(r) - f.deriv(r) * g.value(r)) / r
}

fn contact_quantity(p: &TransitionProfile, r: f64) -> f64 {
    wronskian_over_r(p.f0.as_ref(), p.g0.as_ref(), r)
}

/// Worst value of `(g_t'f_t − f_t'g_t)/r` over an `(r, t)` grid with
/// `t < 1`: the scalar heart of the contact computation.
pub fn interpolant_contact_margin(p: &TransitionProfile, t_points: usize, r_points: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for i in 0..t_points {
        // t in [0, 1), endpoint excluded.
        let t = i as f64 / t_points as f64;
        let ft = p.f_t(t);
        let gt = p.g_t(t);
        for r in grid(1e-4, 1.0, r_points) {
            let raw = wronskian_over_r(ft.as_ref(), gt.as_ref(), r);
            if raw < worst {
                worst = raw;
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------
// The Example 4.2 bump
// ---------------------------------------------------------------------

/// Even C^∞ bump `f` supported in `[−eps, eps]` scaled so that
/// `∫ f² = 2`, together with `G(x) = ∫₀ˣ f(u)² du` (so `G(±1) = ±1`).
pub struct NormalizedBump {
    pub eps: f64,
    /// The scale applied to the raw mollifier.
    pub scale: f64,
    pub f: Arc<dyn Curve>,
    pub g: Arc<dyn Curve>,
}

/// Raw even mollifier `exp(−1/(1−(x/eps)²))` on `(−eps, eps)`.
#[derive(Debug, Clone)]
struct EvenBump {
    eps: f64,
    scale: f64,
}

impl EvenBump {
    fn eval_generic<S: Scalar>(&self, x: S) -> S {
        let t = x * S::constant(1.0 / self.eps);
        let tv = t.value();
        if tv.abs() >= 1.0 - EDGE {
            return S::zero();
        }
        let one_minus = S::one() - t.clone() * t;
        (-(S::one() / one_minus)).exp() * S::constant(self.scale)
    }
}
impl_curve!(EvenBump);

/// `G(x) = ∫₀ˣ f(u)² du` for the normalized bump: quadrature values with
/// the analytic derivative `f(x)²`.
struct CumulativeSquare {
    f: EvenBump,
    eps: f64,
    half_mass: f64,
}

impl std::fmt::Debug for CumulativeSquare {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "CumulativeSquare(eps = {})", self.eps)
    }
}

impl Curve for CumulativeSquare {
    fn eval_f64(&self, x: f64) -> f64 {
        if x >= self.eps {
            self.half_mass
        } else if x <= -self.eps {
            -self.half_mass
        } else {
            let f = &self.f;
            adaptive_simpson(&|u| f.eval_f64(u).powi(2), 0.0, x, 1e-12, 40)
        }
    }

    fn eval_dual(&self, x: Dual) -> Dual {
        let val = self.eval_f64(x.val);
        let slope = self.f.eval_f64(x.val).powi(2);
        let grad = x.grad.iter().map(|g| slope * g).collect();
        Dual { val, grad }
    }
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, depth)
}

/// Build the Example 4.2 bump: even, supported in `[−eps, eps]`, with
/// `∫ f² = 2` enforced by adaptive Simpson quadrature.
pub fn example42_bump(eps: f64) -> Result<NormalizedBump> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::contract(format!("bump support must satisfy 0 < eps < 1, got {eps}")));
    }
    let raw = EvenBump { eps, scale: 1.0 };
    let raw_mass = adaptive_simpson(&|u| raw.eval_f64(u).powi(2), -eps, eps, 1e-14, 48);
    let scale = (2.0 / raw_mass).sqrt();
    let f = EvenBump { eps, scale };
    let half_mass = adaptive_simpson(&|u| f.eval_f64(u).powi(2), 0.0, eps, 1e-14, 48);
    Ok(NormalizedBump {
        eps,
        scale,
        f: Arc::new(f.clone()),
        g: Arc::new(CumulativeSquare { f, eps, half_mass }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::report::all_ok;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_step_plateaus_and_midpoint() {
        let s = smooth_step(0.0, 1.0).unwrap();
        assert_eq!(s.value(-0.5), 0.0);
        assert_eq!(s.value(1.5), 1.0);
        assert_eq!(s.value(0.0), 0.0);
        assert_eq!(s.value(1.0), 1.0);
        // The symmetric mollifier ratio forces equality at the midpoint.
        assert_relative_eq!(s.value(0.5), 0.5, max_relative = 1e-14);
        // Strictly increasing inside.
        assert!(s.value(0.3) < s.value(0.4));
        assert!(s.deriv(0.5) > 0.0);
    }

    #[test]
    fn smooth_step_rejects_bad_bounds() {
        assert!(SmoothStep::new(1.0, 1.0).is_err());
        assert!(SmoothStep::new(2.0, 1.0).is_err());
    }

    #[test]
    fn default_profile_values() {
        let p = make_default_profiles(1.0).unwrap();
        // g0 = r² exactly on [0, 1/2].
        assert_eq!(p.g0.value(0.25), 0.0625);
        // f1 strictly inside its fall interval.
        let v = p.f1.value(0.3);
        assert!(v > 0.0 && v < 1.0);
        assert!(p.f1.deriv(0.3) < 0.0);
        // e has the configured amplitude at the middle of its support.
        assert_relative_eq!(p.e.value(0.5), 1.0, max_relative = 1e-14);
        assert_eq!(p.e.value(0.39), 0.0);
        assert_eq!(p.e.value(0.61), 0.0);
    }

    #[test]
    fn default_profile_validates() {
        let p = make_default_profiles(1.0).unwrap();
        let reports = validate_profiles(&p);
        for r in &reports {
            assert!(r.ok(), "constraint failed: {} (margin {})", r.check, r.margin);
        }
        assert!(all_ok(&reports));
    }

    #[test]
    fn zero_amplitude_fails_the_validator() {
        assert!(make_default_profiles(0.0).is_err());
        let p = TransitionProfile::from_params(ProfileParams {
            e_amplitude: 0.0,
            ..ProfileParams::default()
        })
        .unwrap();
        let reports = validate_profiles(&p);
        let failing: Vec<_> =
            reports.iter().filter(|r| !r.ok()).map(|r| r.check.clone()).collect();
        assert_eq!(failing, vec!["e(1/2) nonzero".to_string()]);
    }

    #[test]
    fn decreasing_g0_fails_the_validator() {
        // Sabotage g0 by a falling step: weak monotonicity must fail.
        let p = make_default_profiles(1.0).unwrap();
        let bad = TransitionProfile {
            g0: Arc::new(FallingStep::new(0.1, 0.9).unwrap()),
            ..p
        };
        let reports = validate_profiles(&bad);
        assert!(reports
            .iter()
            .any(|r| r.check == "g0 weakly increasing" && !r.ok()));
    }

    #[test]
    fn contact_quantity_is_two_on_inner_plateau() {
        // (g0'f0 − f0'g0)/r = 2 exactly while g0 = r², f0 = 1 − r²/2.
        let p = make_default_profiles(1.0).unwrap();
        for r in [0.05, 0.2, 0.45] {
            assert_relative_eq!(wronskian_over_r(p.f0.as_ref(), p.g0.as_ref(), r), 2.0,
                max_relative = 1e-12);
        }
    }

    #[test]
    fn interpolant_contact_scalar_positive_below_t1() {
        let p = make_default_profiles(1.0).unwrap();
        let worst = interpolant_contact_margin(&p, 101, 400);
        assert!(worst > 0.0, "worst interpolant margin {worst}");
    }

    #[test]
    fn profile_params_toml_round_trip() {
        let p = make_default_profiles(2.5).unwrap();
        let text = p.to_toml();
        let q = TransitionProfile::from_toml(&text).unwrap();
        assert_eq!(p.params, q.params);
        assert!(TransitionProfile::from_toml("e_amplitude = 1.0\nbogus = 3").is_err());
    }

    #[test]
    fn bump_normalization_and_cumulative() {
        let nb = example42_bump(0.1).unwrap();
        // Independent oracle: composite Simpson on a fixed fine grid.
        let n = 1 << 15;
        let h = 0.2 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = -0.1 + i as f64 * h;
            let (fa, fm, fb) = (
                nb.f.value(a).powi(2),
                nb.f.value(a + 0.5 * h).powi(2),
                nb.f.value(a + h).powi(2),
            );
            acc += h / 6.0 * (fa + 4.0 * fm + fb);
        }
        assert!((acc - 2.0).abs() <= 1e-10, "∫f² = {acc}");
        // Support.
        assert_eq!(nb.f.value(0.1 * 1.01), 0.0);
        assert_eq!(nb.f.value(-0.2), 0.0);
        // G(±1) = ±1 by evenness of f².
        assert_relative_eq!(nb.g.value(1.0), 1.0, epsilon = 1e-10);
        assert_relative_eq!(nb.g.value(-1.0), -1.0, epsilon = 1e-10);
        assert_eq!(nb.g.value(0.0), 0.0);
        // G' = f² via the dual path.
        for x in [-0.05, 0.0, 0.03, 0.09] {
            assert_relative_eq!(nb.g.deriv(x), nb.f.value(x).powi(2), max_relative = 1e-13);
        }
    }

    #[test]
    fn bump_rejects_bad_support() {
        assert!(example42_bump(0.0).is_err());
        assert!(example42_bump(1.0).is_err());
    }
}
