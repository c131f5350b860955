//! The five-sphere with its standard contact form and the cubic Milnor
//! fibration.
//!
//! The chart is the ambient R⁶ ≅ C³ with coordinates
//! (x₀,y₀,x₁,y₁,x₂,y₂); forms live as ambient fields and are evaluated
//! on tangent frames of the unit sphere. The page-angle form of the open
//! book is dθ = Im(df/f) for f = X³+Y³+Z³, an analytic rational field
//! away from the binding {f = 0} ∩ S⁵; samples stay a configurable
//! distance δ_N from the binding.

use std::sync::Arc;

use crate::charts::{Chart, ChartRef, DifferentialForm, Domain, VectorField};
use crate::error::{Error, Result};
use crate::exterior::multi_index::rank_of_mask;
use crate::scalar::Scalar;
use crate::{impl_smooth_fn, smooth_fn};

/// Complex helper over any scalar.
#[derive(Clone, Debug)]
struct Cx<S: Scalar> {
    re: S,
    im: S,
}

impl<S: Scalar> Cx<S> {
    fn new(re: S, im: S) -> Self {
        Cx { re, im }
    }

    fn mul(&self, other: &Self) -> Self {
        Cx {
            re: self.re.clone() * other.re.clone() - self.im.clone() * other.im.clone(),
            im: self.re.clone() * other.im.clone() + self.im.clone() * other.re.clone(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        Cx { re: self.re.clone() + other.re.clone(), im: self.im.clone() + other.im.clone() }
    }
}

/// f(x) = X³ + Y³ + Z³ and its six partials, generically.
fn cubic_and_gradient<S: Scalar>(x: &[S]) -> (Cx<S>, [Cx<S>; 3]) {
    let mut f = Cx::new(S::zero(), S::zero());
    let mut grads: [Cx<S>; 3] = [
        Cx::new(S::zero(), S::zero()),
        Cx::new(S::zero(), S::zero()),
        Cx::new(S::zero(), S::zero()),
    ];
    for k in 0..3 {
        let w = Cx::new(x[2 * k].clone(), x[2 * k + 1].clone());
        let w2 = w.mul(&w);
        f = f.add(&w2.mul(&w));
        // ∂f/∂w = 3w²; ∂/∂x = 3w², ∂/∂y = 3i·w².
        grads[k] = Cx::new(
            S::constant(3.0) * w2.re.clone(),
            S::constant(3.0) * w2.im.clone(),
        );
    }
    (f, grads)
}

/// f at a real point, as (re, im).
pub fn cubic_value(x: &[f64]) -> (f64, f64) {
    let (f, _) = cubic_and_gradient(x);
    (f.re, f.im)
}

/// dθ = Im(df/f) = (u·dv − v·du)/(u²+v²) as an ambient coefficient field.
struct DThetaField;

impl DThetaField {
    fn dims(&self) -> (usize, usize) {
        (6, 6)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let (f, grads) = cubic_and_gradient(x);
        let norm2 = f.re.clone() * f.re.clone() + f.im.clone() * f.im.clone();
        for k in 0..3 {
            // ∂/∂x_{2k} of (u,v) is grads[k]; ∂/∂x_{2k+1} is i·grads[k].
            let du_dx = grads[k].re.clone();
            let dv_dx = grads[k].im.clone();
            let du_dy = -grads[k].im.clone();
            let dv_dy = grads[k].re.clone();
            out[2 * k] = (f.re.clone() * dv_dx - f.im.clone() * du_dx) / norm2.clone();
            out[2 * k + 1] = (f.re.clone() * dv_dy - f.im.clone() * du_dy) / norm2.clone();
        }
    }
}
impl_smooth_fn!(DThetaField);

/// Orientation of S⁵ induced from the ambient orientation of C³ with the
/// outward normal first: ι_x(dx₀∧dy₀∧dx₁∧dy₁∧dx₂∧dy₂).
struct SphereOrientation;

impl SphereOrientation {
    fn dims(&self) -> (usize, usize) {
        (6, 6)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let full: u32 = (1 << 6) - 1;
        for j in 0..6 {
            let mask = full & !(1u32 << j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out[rank_of_mask(mask)] = x[j].clone() * S::constant(sign);
        }
    }
}
impl_smooth_fn!(SphereOrientation);

/// The S⁵ model: standard contact form, Milnor page-angle form, Reeb
/// field, and the binding cutoff.
pub struct MilnorModel {
    /// Ambient chart of R⁶; samples lie on the unit sphere with
    /// |f| > δ_N (points nearer the binding are resampled).
    pub chart: ChartRef,
    pub delta_n: f64,
    /// α_std = Σ (x dy − y dx).
    pub alpha_std: DifferentialForm,
    /// dθ = Im(df/f).
    pub dtheta: DifferentialForm,
    /// Reeb field of α_std (the Hopf field).
    pub reeb: VectorField,
}

/// Build the model. Samples from its chart satisfy both the sphere
/// constraint and the binding cutoff |X³+Y³+Z³| > δ_N.
pub fn milnor_model(delta_n: f64) -> Result<MilnorModel> {
    if !(delta_n > 0.0 && delta_n < 0.5) {
        return Err(Error::contract(format!(
            "binding cutoff must satisfy 0 < delta_n < 0.5, got {delta_n}"
        )));
    }
    let chart = Chart::new(
        "s5",
        &["x0", "y0", "x1", "y1", "x2", "y2"],
        Domain::Sphere {
            predicate: Some(Arc::new(move |x: &[f64]| {
                let (u, v) = cubic_value(x);
                (u * u + v * v).sqrt() > delta_n
            })),
        },
        5,
        Arc::new(SphereOrientation),
    );
    let alpha_std = DifferentialForm::from_fn(
        chart.clone(),
        1,
        smooth_fn!(6, 6, |x| vec![
            -x[1].clone(),
            x[0].clone(),
            -x[3].clone(),
            x[2].clone(),
            -x[5].clone(),
            x[4].clone()
        ]),
    );
    let dtheta = DifferentialForm::from_fn(chart.clone(), 1, Arc::new(DThetaField));
    let reeb = VectorField::new(
        chart.clone(),
        smooth_fn!(6, 6, |x| vec![
            -x[1].clone(),
            x[0].clone(),
            -x[3].clone(),
            x[2].clone(),
            -x[5].clone(),
            x[4].clone()
        ]),
    );
    let model = MilnorModel { chart, delta_n, alpha_std, dtheta, reeb };
    model.verify_construction(200, 0x515)?;
    Ok(model)
}

impl MilnorModel {
    fn verify_construction(&self, samples: usize, seed: u64) -> Result<()> {
        let pts = self.chart.sample(samples, seed)?;
        let da = self.alpha_std.exterior_derivative();
        let top = self.alpha_std.wedge(&da)?.wedge(&da)?;
        for p in &pts {
            let frame = self.chart.tangent_frame(p)?;
            let orient = self.chart.orientation_form().value(p)?.evaluate(&frame)?;
            let v = top.value(p)?.evaluate(&frame)? / orient;
            if v <= 0.0 {
                return Err(Error::Construction {
                    check: "alpha_std contact (alpha∧(d alpha)² > 0)".into(),
                    detail: format!("value {v:.3e} at {p:?}"),
                });
            }
            let (u, w) = cubic_value(p);
            if (u * u + w * w).sqrt() <= self.delta_n {
                return Err(Error::Construction {
                    check: "sample respects the binding cutoff".into(),
                    detail: format!("|f| = {:.3e} at {p:?}", (u * u + w * w).sqrt()),
                });
            }
        }
        Ok(())
    }

    /// The exact Reeb flow z ↦ e^{it}z.
    pub fn reeb_flow(&self, p: &[f64], t: f64) -> Vec<f64> {
        let (c, s) = (t.cos(), t.sin());
        let mut q = vec![0.0; 6];
        for k in 0..3 {
            let (x, y) = (p[2 * k], p[2 * k + 1]);
            q[2 * k] = x * c - y * s;
            q[2 * k + 1] = x * s + y * c;
        }
        q
    }

    /// Independent certificate for dθ(R): the finite-difference rate of
    /// the page angle along the exact Reeb flow. The cubic is weighted-
    /// homogeneous of degree 3 under the flow, so this is 3 up to
    /// rounding.
    pub fn page_angle_rate(&self, p: &[f64]) -> f64 {
        let h = 1e-4;
        let (u1, v1) = cubic_value(&self.reeb_flow(p, h));
        let (u0, v0) = cubic_value(&self.reeb_flow(p, -h));
        // arg(f₁/f₀) via the conjugate product avoids branch cuts.
        let re = u1 * u0 + v1 * v0;
        let im = v1 * u0 - u1 * v0;
        im.atan2(re) / (2.0 * h)
    }
}
