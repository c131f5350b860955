//! Coordinate charts, seeded domain sampling, and smooth maps.
//!
//! A [`Chart`] is a named coordinate patch with a sampling domain and a
//! reference orientation form. Differential forms (see [`form`]) are
//! fields of alternating-form values attached to a chart.

pub mod form;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Dual;

pub use form::{pullback, DifferentialForm, ScalarField, SmoothFn, SmoothMap};

pub type ChartRef = Arc<Chart>;
pub type Pred = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Sampling domain of a chart.
#[derive(Clone)]
pub enum Domain {
    /// Product of closed intervals, with an optional rejection predicate.
    Box { lo: Vec<f64>, hi: Vec<f64>, predicate: Option<Pred> },
    /// Unit sphere in all chart coordinates (the chart is the ambient
    /// space of an embedded sphere), with an optional rejection predicate.
    Sphere { predicate: Option<Pred> },
    /// First `sphere` coordinates on a unit sphere, the rest in a box.
    SphereTimesBox { sphere: usize, lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lo, hi, predicate } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b)
                    && predicate.as_ref().is_none_or(|p| p(x))
            }
            Domain::Sphere { predicate } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (r2 - 1.0).abs() <= 1e-9 && predicate.as_ref().is_none_or(|p| p(x))
            }
            Domain::SphereTimesBox { sphere, lo, hi } => {
                let r2: f64 = x[..*sphere].iter().map(|v| v * v).sum();
                (r2 - 1.0).abs() <= 1e-9
                    && x[*sphere..].iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b)
            }
        }
    }

    /// Unit normal of the constraint surface, if the domain has one.
    fn constraint_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Domain::Box { .. } => None,
            Domain::Sphere { .. } => {
                let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                Some(x.iter().map(|v| v / n).collect())
            }
            Domain::SphereTimesBox { sphere, .. } => {
                let n: f64 = x[..*sphere].iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut out = vec![0.0; x.len()];
                for i in 0..*sphere {
                    out[i] = x[i] / n;
                }
                Some(out)
            }
        }
    }
}

/// A coordinate chart: dimension, coordinate names, sampling domain and a
/// reference orientation form declared positive.
///
/// On a plain coordinate chart the orientation has top degree (one
/// coefficient). On an ambient chart carrying an embedded hypersurface
/// (the sphere domains) it has degree `dim − 1` and is paired with
/// tangent frames.
pub struct Chart {
    name: String,
    dim: usize,
    coords: Vec<String>,
    domain: Domain,
    orient_degree: usize,
    orientation: Arc<dyn SmoothFn>,
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        coords: &[&str],
        domain: Domain,
        orient_degree: usize,
        orientation: Arc<dyn SmoothFn>,
    ) -> ChartRef {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let dim = coords.len();
        assert_eq!(orientation.input_dim(), dim);
        assert_eq!(
            orientation.output_dim(),
            crate::exterior::binomial(dim, orient_degree),
            "orientation field must have C(dim, degree) coefficients"
        );
        Arc::new(Chart { name: name.into(), dim, coords, domain, orient_degree, orientation })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.domain.contains(x)
    }

    pub fn orient_degree(&self) -> usize {
        self.orient_degree
    }

    /// Top coefficient of the orientation form; only meaningful on
    /// coordinate charts where the orientation has top degree.
    pub fn orientation_top_coeff(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.orient_degree, self.dim);
        let mut out = vec![0.0; self.orientation.output_dim()];
        self.orientation.eval_f64(x, &mut out);
        out[0]
    }

    fn orientation_nonvanishing(&self, x: &[f64]) -> bool {
        let mut out = vec![0.0; self.orientation.output_dim()];
        self.orientation.eval_f64(x, &mut out);
        out.iter().any(|c| *c != 0.0)
    }

    /// The orientation as a differential form on this chart.
    pub fn orientation_form(self: &ChartRef) -> DifferentialForm {
        DifferentialForm::from_fn(self.clone(), self.orient_degree, self.orientation.clone())
    }

    /// Deterministic seeded sampling of the chart domain. Identical
    /// `(count, seed)` always produce the identical point list.
    pub fn sample(self: &ChartRef, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::contract("sample count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let budget = 10_000usize;
        while out.len() < count {
            let mut accepted = None;
            for _ in 0..budget {
                let x = self.draw(&mut rng);
                if self.domain.contains(&x) {
                    accepted = Some(x);
                    break;
                }
            }
            let x = accepted.ok_or_else(|| {
                Error::Sampling(format!(
                    "chart `{}`: rejection sampling exhausted {budget} attempts",
                    self.name
                ))
            })?;
            if !self.orientation_nonvanishing(&x) {
                return Err(Error::Sampling(format!(
                    "chart `{}`: orientation form vanishes at sampled point {x:?}",
                    self.name
                )));
            }
            out.push(x);
        }
        Ok(out)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.domain {
            Domain::Box { lo, hi, .. } => {
                lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect()
            }
            Domain::Sphere { .. } => draw_unit_sphere(rng, self.dim),
            Domain::SphereTimesBox { sphere, lo, hi } => {
                let mut x = draw_unit_sphere(rng, *sphere);
                for (a, b) in lo.iter().zip(hi) {
                    x.push(rng.gen_range(*a..*b));
                }
                x
            }
        }
    }

    /// Tangency test against the domain's constraint surface:
    /// every basis vector must be orthogonal to the unit normal.
    pub fn check_tangent(&self, point: &[f64], basis: &[Vec<f64>]) -> Result<()> {
        let Some(normal) = self.domain.constraint_normal(point) else {
            return Ok(());
        };
        for (i, b) in basis.iter().enumerate() {
            let dot: f64 = b.iter().zip(&normal).map(|(u, v)| u * v).sum();
            let scale: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            if dot.abs() > 1e-10 * scale.max(1.0) {
                return Err(Error::contract(format!(
                    "basis vector {i} is not tangent at {point:?} (⟨b,n⟩ = {dot:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Orthonormal tangent frame at a point of an embedded sphere chart:
    /// project the ambient basis onto the tangent space, drop the vector
    /// with the smallest projection residual, Gram-Schmidt the rest in
    /// index order.
    pub fn tangent_frame(&self, point: &[f64]) -> Result<Vec<Vec<f64>>> {
        let normal = self.domain.constraint_normal(point).ok_or_else(|| {
            Error::contract(format!("chart `{}` has no constraint surface", self.name))
        })?;
        // The projection of e_i has squared norm 1 − n_i²; the smallest
        // residual is the index with the largest |n_i|.
        let drop = normal
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.dim - 1);
        for i in 0..self.dim {
            if i == drop {
                continue;
            }
            let mut v: Vec<f64> = (0..self.dim)
                .map(|j| (if i == j { 1.0 } else { 0.0 }) - normal[i] * normal[j])
                .collect();
            for prev in &frame {
                let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (a, b) in v.iter_mut().zip(prev) {
                    *a -= dot * b;
                }
            }
            let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n < 1e-8 {
                return Err(Error::evaluation(format!(
                    "degenerate tangent frame at {point:?}"
                )));
            }
            for a in v.iter_mut() {
                *a /= n;
            }
            frame.push(v);
        }
        Ok(frame)
    }
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("coords", &self.coords)
            .finish()
    }
}

fn draw_unit_sphere(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// A vector field on a chart: point → components.
pub struct VectorField {
    chart: ChartRef,
    components: Arc<dyn SmoothFn>,
}

impl VectorField {
    pub fn new(chart: ChartRef, components: Arc<dyn SmoothFn>) -> Self {
        assert_eq!(components.input_dim(), chart.dim());
        assert_eq!(components.output_dim(), chart.dim());
        VectorField { chart, components }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.chart.dim()];
        self.components.eval_f64(x, &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::evaluation(format!(
                "vector field non-finite at {x:?} on chart `{}`",
                self.chart.name()
            )));
        }
        Ok(out)
    }
}

/// Chart identity (charts are compared by reference, not by name).
pub fn same_chart(a: &ChartRef, b: &ChartRef) -> bool {
    Arc::ptr_eq(a, b)
}

pub(crate) fn seed_point(x: &[f64]) -> Vec<Dual> {
    Dual::seed_point(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_fn;

    fn unit_box_chart(dim: usize) -> ChartRef {
        let orient = smooth_fn!(2, 1, |_x| vec![crate::scalar::Scalar::one()]);
        let _ = dim;
        Chart::new(
            "box2",
            &["x", "y"],
            Domain::Box { lo: vec![0.0; 2], hi: vec![1.0; 2], predicate: None },
            2,
            orient,
        )
    }

    #[test]
    fn sampling_is_deterministic() {
        let chart = unit_box_chart(2);
        let a = chart.sample(5, 42).unwrap();
        let b = chart.sample(5, 42).unwrap();
        assert_eq!(a, b);
        let c = chart.sample(5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_satisfy_domain() {
        let chart = unit_box_chart(2);
        for p in chart.sample(100, 7).unwrap() {
            assert!(chart.contains(&p));
        }
    }

    #[test]
    fn sphere_samples_are_normalized() {
        let orient = smooth_fn!(3, 1, |_x| vec![crate::scalar::Scalar::one()]);
        let chart = Chart::new(
            "s2",
            &["x", "y", "z"],
            Domain::Sphere { predicate: None },
            3,
            orient,
        );
        for p in chart.sample(200, 11).unwrap() {
            let r2: f64 = p.iter().map(|v| v * v).sum();
            assert!((r2 - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn tangent_frame_is_orthonormal_and_tangent() {
        let orient = smooth_fn!(4, 1, |_x| vec![crate::scalar::Scalar::one()]);
        let chart =
            Chart::new("s3", &["a", "b", "c", "d"], Domain::Sphere { predicate: None }, 4, orient);
        for p in chart.sample(20, 3).unwrap() {
            let frame = chart.tangent_frame(&p).unwrap();
            assert_eq!(frame.len(), 3);
            chart.check_tangent(&p, &frame).unwrap();
            for (i, u) in frame.iter().enumerate() {
                for (j, v) in frame.iter().enumerate() {
                    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejection_budget_errors_out() {
        let orient = smooth_fn!(1, 1, |_x| vec![crate::scalar::Scalar::one()]);
        let chart = Chart::new(
            "impossible",
            &["x"],
            Domain::Box {
                lo: vec![0.0],
                hi: vec![1.0],
                predicate: Some(Arc::new(|_x: &[f64]| false)),
            },
            1,
            orient,
        );
        assert!(matches!(chart.sample(1, 0), Err(Error::Sampling(_))));
    }
}
