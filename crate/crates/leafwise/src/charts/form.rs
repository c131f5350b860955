//! Differential forms as coefficient fields over a chart.
//!
//! A [`DifferentialForm`] is an expression tree over base coefficient
//! fields: sums, smooth-function multiples, wedges, exterior derivatives
//! and pullbacks. Every node evaluates coefficients either on `f64`
//! points or on [`Dual`] points; the dual path is what makes first
//! partials of base fields analytic. Where a node would need one more
//! derivative order than its children can supply (the jet of an exterior
//! derivative, the jet of a pullback), it falls back to Richardson-
//! extrapolated central differences over its own exact value path.

use std::sync::Arc;

use crate::charts::{same_chart, seed_point, ChartRef, VectorField};
use crate::error::{Error, Result};
use crate::exterior::multi_index::{indices_from_mask, masks_colex, rank_of_mask, shuffle_sign};
use crate::exterior::{binomial, wedge_coeffs, FormValue, LinearMap};
use crate::scalar::{Curve, Dual, Scalar};

/// A smooth vector-valued function of chart coordinates, evaluable on
/// values and on duals. Coefficient fields and chart maps implement this.
pub trait SmoothFn: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn eval_f64(&self, x: &[f64], out: &mut [f64]);
    fn eval_dual(&self, x: &[Dual], out: &mut [Dual]);
}

/// Defines an anonymous [`SmoothFn`] from a generic (capture-free)
/// formula: `smooth_fn!(input_dim, output_dim, |x| vec![...])`.
#[macro_export]
macro_rules! smooth_fn {
    ($in_dim:expr, $out_dim:expr, |$x:ident| $body:expr) => {{
        struct AnonFn;
        impl AnonFn {
            fn formula<S: $crate::scalar::Scalar>(&self, $x: &[S]) -> Vec<S> {
                $body
            }
        }
        impl $crate::charts::SmoothFn for AnonFn {
            fn input_dim(&self) -> usize {
                $in_dim
            }
            fn output_dim(&self) -> usize {
                $out_dim
            }
            fn eval_f64(&self, x: &[f64], out: &mut [f64]) {
                out.clone_from_slice(&self.formula(x));
            }
            fn eval_dual(
                &self,
                x: &[$crate::scalar::Dual],
                out: &mut [$crate::scalar::Dual],
            ) {
                out.clone_from_slice(&self.formula(x));
            }
        }
        ::std::sync::Arc::new(AnonFn) as ::std::sync::Arc<dyn $crate::charts::SmoothFn>
    }};
}

/// Implements [`SmoothFn`] for a type with
/// `fn dims(&self) -> (usize, usize)` and
/// `fn formula<S: Scalar>(&self, x: &[S], out: &mut [S])`.
#[macro_export]
macro_rules! impl_smooth_fn {
    ($ty:ty) => {
        impl $crate::charts::SmoothFn for $ty {
            fn input_dim(&self) -> usize {
                self.dims().0
            }
            fn output_dim(&self) -> usize {
                self.dims().1
            }
            fn eval_f64(&self, x: &[f64], out: &mut [f64]) {
                self.formula(x, out)
            }
            fn eval_dual(
                &self,
                x: &[$crate::scalar::Dual],
                out: &mut [$crate::scalar::Dual],
            ) {
                self.formula(x, out)
            }
        }
    };
}

/// A smooth scalar function on a chart, used to scale forms.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// A curve applied to one coordinate, e.g. `f₀(r)` on a polar chart.
    CurveOfCoord { curve: Arc<dyn Curve>, coord: usize },
    /// A general scalar field (`output_dim == 1`).
    Fn(Arc<dyn SmoothFn>),
}

impl ScalarField {
    pub fn curve(curve: Arc<dyn Curve>, coord: usize) -> Self {
        ScalarField::CurveOfCoord { curve, coord }
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> S
    where
        Self: ScalarFieldEval<S>,
    {
        ScalarFieldEval::eval_impl(self, x)
    }
}

/// Dispatch helper: ScalarField evaluation for each scalar type.
pub trait ScalarFieldEval<S: Scalar> {
    fn eval_impl(&self, x: &[S]) -> S;
}

impl ScalarFieldEval<f64> for ScalarField {
    fn eval_impl(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::CurveOfCoord { curve, coord } => curve.eval_f64(x[*coord]),
            ScalarField::Fn(f) => {
                let mut out = [0.0];
                f.eval_f64(x, &mut out);
                out[0]
            }
        }
    }
}

impl ScalarFieldEval<Dual> for ScalarField {
    fn eval_impl(&self, x: &[Dual]) -> Dual {
        match self {
            ScalarField::Constant(c) => Dual::constant(*c),
            ScalarField::CurveOfCoord { curve, coord } => curve.eval_dual(x[*coord].clone()),
            ScalarField::Fn(f) => {
                let mut out = [Dual::constant(0.0)];
                f.eval_dual(x, &mut out);
                out[0].clone()
            }
        }
    }
}

/// A smooth map between charts with an analytic Jacobian.
pub struct SmoothMap {
    name: String,
    from: ChartRef,
    to: ChartRef,
    fun: Arc<dyn SmoothFn>,
    /// Extra domain restriction beyond the source chart (e.g. a meridian
    /// projection is undefined on the pole axis).
    domain: Option<crate::charts::Pred>,
}

impl SmoothMap {
    pub fn new(
        name: impl Into<String>,
        from: ChartRef,
        to: ChartRef,
        fun: Arc<dyn SmoothFn>,
    ) -> Self {
        assert_eq!(fun.input_dim(), from.dim());
        assert_eq!(fun.output_dim(), to.dim());
        SmoothMap { name: name.into(), from, to, fun, domain: None }
    }

    pub fn with_domain(mut self, pred: crate::charts::Pred) -> Self {
        self.domain = Some(pred);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn from_chart(&self) -> &ChartRef {
        &self.from
    }

    pub fn to_chart(&self) -> &ChartRef {
        &self.to
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if let Some(p) = &self.domain {
            if !p(x) {
                return Err(Error::evaluation(format!(
                    "point {x:?} outside the domain of map `{}`",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let mut out = vec![0.0; self.to.dim()];
        self.fun.eval_f64(x, &mut out);
        Ok(out)
    }

    /// Image point and Jacobian (`to.dim × from.dim`, row-major).
    pub fn jet(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_domain(x)?;
        let seeded = seed_point(x);
        let mut out = vec![Dual::constant(0.0); self.to.dim()];
        self.fun.eval_dual(&seeded, &mut out);
        let m = self.from.dim();
        let mut jac = vec![0.0; self.to.dim() * m];
        let mut val = vec![0.0; self.to.dim()];
        for (i, o) in out.iter().enumerate() {
            val[i] = o.val;
            for j in 0..m {
                jac[i * m + j] = o.partial(j);
            }
        }
        Ok((val, jac))
    }

}

#[derive(Clone)]
enum Repr {
    /// Base coefficient field with analytic duals.
    Field(Arc<dyn SmoothFn>),
    /// Value-only coefficient field; Jacobians use finite differences.
    ValueOnly(Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>),
    Constant(FormValue),
    Sum(Vec<(f64, Arc<DifferentialForm>)>),
    Scaled(ScalarField, Arc<DifferentialForm>),
    Wedge(Arc<DifferentialForm>, Arc<DifferentialForm>),
    D(Arc<DifferentialForm>),
    Pullback(Arc<SmoothMap>, Arc<DifferentialForm>),
}

/// A differential form: a chart, a degree, and a coefficient field.
#[derive(Clone)]
pub struct DifferentialForm {
    chart: ChartRef,
    degree: usize,
    repr: Repr,
}

impl DifferentialForm {
    /// A form from an analytic coefficient field (`C(dim, degree)`
    /// outputs in colex order).
    pub fn from_fn(chart: ChartRef, degree: usize, f: Arc<dyn SmoothFn>) -> Self {
        assert_eq!(f.input_dim(), chart.dim());
        assert_eq!(f.output_dim(), binomial(chart.dim(), degree.min(chart.dim()))
        , "coefficient count must be C(dim, degree)");
        DifferentialForm { chart, degree, repr: Repr::Field(f) }
    }

    /// A form whose coefficients are only available as values; its
    /// Jacobian uses the finite-difference fallback.
    pub fn from_values(
        chart: ChartRef,
        degree: usize,
        f: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    ) -> Self {
        DifferentialForm { chart, degree, repr: Repr::ValueOnly(f) }
    }

    pub fn constant(chart: ChartRef, value: FormValue) -> Result<Self> {
        if value.dim() != chart.dim() {
            return Err(Error::contract(format!(
                "constant form of dimension {} on chart `{}` of dimension {}",
                value.dim(),
                chart.name(),
                chart.dim()
            )));
        }
        Ok(DifferentialForm { chart, degree: value.degree(), repr: Repr::Constant(value) })
    }

    pub fn zero(chart: ChartRef, degree: usize) -> Self {
        let dim = chart.dim();
        let value = if degree > dim {
            FormValue::overflow_zero(dim, degree)
        } else {
            FormValue::zero(dim, degree).expect("degree within dimension")
        };
        DifferentialForm { chart, degree, repr: Repr::Constant(value) }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// True when every coefficient value on the evaluation path comes
    /// from an analytic (dual-capable) formula. The *jet* of a derived
    /// form (exterior derivative or pullback) may still use the
    /// finite-difference fallback.
    pub fn analytic(&self) -> bool {
        match &self.repr {
            Repr::Field(_) | Repr::Constant(_) => true,
            Repr::ValueOnly(_) => false,
            Repr::Sum(terms) => terms.iter().all(|(_, t)| t.analytic()),
            Repr::Scaled(_, inner) | Repr::D(inner) | Repr::Pullback(_, inner) => inner.analytic(),
            Repr::Wedge(a, b) => a.analytic() && b.analytic(),
        }
    }

    fn coeff_len(&self) -> usize {
        if self.degree > self.chart.dim() {
            0
        } else {
            binomial(self.chart.dim(), self.degree)
        }
    }

    /// Coefficients at a point, as raw numbers in colex order.
    pub fn coeffs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.chart.dim() {
            return Err(Error::contract(format!(
                "point of dimension {} on chart `{}` of dimension {}",
                x.len(),
                self.chart.name(),
                self.chart.dim()
            )));
        }
        let c = self.coeffs_f64(x)?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::evaluation(format!(
                "non-finite coefficient at {x:?} on chart `{}`",
                self.chart.name()
            )));
        }
        Ok(c)
    }

    /// The pointwise alternating-form value at a point.
    pub fn value(&self, x: &[f64]) -> Result<FormValue> {
        let dim = self.chart.dim();
        if self.degree > dim {
            return Ok(FormValue::overflow_zero(dim, self.degree));
        }
        FormValue::new(dim, self.degree, self.coeffs(x)?)
    }

    /// Coefficients with exact (or fallback) first partials:
    /// `out[i].partial(j)` is `∂(coeff_i)/∂x_j`.
    pub fn jet(&self, x: &[f64]) -> Result<Vec<Dual>> {
        self.coeffs_dual(&seed_point(x))
    }

    /// Value and Jacobian rows per coefficient.
    pub fn jacobian(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let m = self.chart.dim();
        let jet = self.jet(x)?;
        let vals = jet.iter().map(|d| d.val).collect();
        let jac = jet.iter().map(|d| (0..m).map(|j| d.partial(j)).collect()).collect();
        Ok((vals, jac))
    }

    fn coeffs_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.repr {
            Repr::Field(f) => {
                let mut out = vec![0.0; self.coeff_len()];
                f.eval_f64(x, &mut out);
                Ok(out)
            }
            Repr::ValueOnly(f) => {
                let out = f(x);
                if out.len() != self.coeff_len() {
                    return Err(Error::evaluation(
                        "value-only field returned the wrong coefficient count",
                    ));
                }
                Ok(out)
            }
            Repr::Constant(v) => Ok(v.coeffs().to_vec()),
            Repr::Sum(terms) => {
                let mut acc = vec![0.0; self.coeff_len()];
                for (w, t) in terms {
                    for (a, b) in acc.iter_mut().zip(t.coeffs_f64(x)?) {
                        *a += w * b;
                    }
                }
                Ok(acc)
            }
            Repr::Scaled(s, inner) => {
                let f: f64 = s.eval(x);
                Ok(inner.coeffs_f64(x)?.into_iter().map(|c| f * c).collect())
            }
            Repr::Wedge(a, b) => {
                let ca = a.coeffs_f64(x)?;
                let cb = b.coeffs_f64(x)?;
                Ok(wedge_coeffs(self.chart.dim(), a.degree, b.degree, &ca, &cb))
            }
            Repr::D(inner) => {
                let jet = inner.coeffs_dual(&seed_point(x))?;
                Ok(curl_from_jet(self.chart.dim(), inner.degree, &jet, |d, j| d.partial(j)))
            }
            Repr::Pullback(map, inner) => {
                let (image, jac) = map.jet(x)?;
                let inner_coeffs = inner.coeffs_f64(&image)?;
                Ok(crate::exterior::pullback_coeffs(
                    map.to_chart().dim(),
                    map.from_chart().dim(),
                    self.degree,
                    &jac,
                    &inner_coeffs,
                ))
            }
        }
    }

    fn coeffs_dual(&self, x: &[Dual]) -> Result<Vec<Dual>> {
        match &self.repr {
            Repr::Field(f) => {
                let mut out = vec![Dual::constant(0.0); self.coeff_len()];
                f.eval_dual(x, &mut out);
                Ok(out)
            }
            Repr::Constant(v) => Ok(v.coeffs().iter().map(|&c| Dual::constant(c)).collect()),
            Repr::Sum(terms) => {
                let mut acc = vec![Dual::constant(0.0); self.coeff_len()];
                for (w, t) in terms {
                    let tw = Dual::constant(*w);
                    for (a, b) in acc.iter_mut().zip(t.coeffs_dual(x)?) {
                        *a = a.clone() + tw.clone() * b;
                    }
                }
                Ok(acc)
            }
            Repr::Scaled(s, inner) => {
                let f: Dual = s.eval(x);
                Ok(inner
                    .coeffs_dual(x)?
                    .into_iter()
                    .map(|c| f.clone() * c)
                    .collect())
            }
            Repr::Wedge(a, b) => {
                let ca = a.coeffs_dual(x)?;
                let cb = b.coeffs_dual(x)?;
                Ok(wedge_coeffs(self.chart.dim(), a.degree, b.degree, &ca, &cb))
            }
            // One derivative order beyond the analytic budget: assemble
            // the dual output from finite differences of the value path.
            Repr::D(_) | Repr::ValueOnly(_) | Repr::Pullback(..) => {
                fd_chain(x, self.coeff_len(), |xr| self.coeffs_f64(xr))
            }
        }
    }

    /// Exterior derivative. For a top-degree form this is the explicit
    /// overflow-zero form of degree `dim + 1`.
    pub fn exterior_derivative(&self) -> DifferentialForm {
        let dim = self.chart.dim();
        if self.degree >= dim {
            return DifferentialForm {
                chart: self.chart.clone(),
                degree: self.degree + 1,
                repr: Repr::Constant(FormValue::overflow_zero(dim, self.degree + 1)),
            };
        }
        match &self.repr {
            // d of a constant is zero; keep it exact.
            Repr::Constant(_) => DifferentialForm::zero(self.chart.clone(), self.degree + 1),
            _ => DifferentialForm {
                chart: self.chart.clone(),
                degree: self.degree + 1,
                repr: Repr::D(Arc::new(self.clone())),
            },
        }
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::contract(format!(
                "wedge of forms on different charts `{}` and `{}`",
                self.chart.name(),
                other.chart.name()
            )));
        }
        let degree = self.degree + other.degree;
        if degree > self.chart.dim() {
            return Ok(DifferentialForm::zero(self.chart.clone(), degree));
        }
        Ok(DifferentialForm {
            chart: self.chart.clone(),
            degree,
            repr: Repr::Wedge(Arc::new(self.clone()), Arc::new(other.clone())),
        })
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn lin_comb(&self, a: f64, other: &DifferentialForm, b: f64) -> Result<DifferentialForm> {
        if !same_chart(&self.chart, &other.chart) || self.degree != other.degree {
            return Err(Error::contract(format!(
                "linear combination of a degree-{} form on `{}` with a degree-{} form on `{}`",
                self.degree,
                self.chart.name(),
                other.degree,
                other.chart.name()
            )));
        }
        Ok(DifferentialForm {
            chart: self.chart.clone(),
            degree: self.degree,
            repr: Repr::Sum(vec![(a, Arc::new(self.clone())), (b, Arc::new(other.clone()))]),
        })
    }

    pub fn sum(terms: Vec<(f64, DifferentialForm)>) -> Result<DifferentialForm> {
        let first = terms.first().ok_or_else(|| Error::contract("empty sum of forms"))?;
        let chart = first.1.chart.clone();
        let degree = first.1.degree;
        if terms.iter().any(|(_, t)| !same_chart(&t.chart, &chart) || t.degree != degree) {
            return Err(Error::contract("sum of forms with mismatched chart or degree"));
        }
        Ok(DifferentialForm {
            chart,
            degree,
            repr: Repr::Sum(terms.into_iter().map(|(w, t)| (w, Arc::new(t))).collect()),
        })
    }

    pub fn scale(&self, factor: f64) -> DifferentialForm {
        DifferentialForm {
            chart: self.chart.clone(),
            degree: self.degree,
            repr: Repr::Sum(vec![(factor, Arc::new(self.clone()))]),
        }
    }

    pub fn scalar_mul(&self, s: ScalarField) -> DifferentialForm {
        DifferentialForm {
            chart: self.chart.clone(),
            degree: self.degree,
            repr: Repr::Scaled(s, Arc::new(self.clone())),
        }
    }

    /// Pair a 1-form with a vector field at a point.
    pub fn pair(&self, field: &VectorField, x: &[f64]) -> Result<f64> {
        if self.degree != 1 {
            return Err(Error::contract(format!(
                "pairing needs a 1-form, got degree {}",
                self.degree
            )));
        }
        if !same_chart(&self.chart, field.chart()) {
            return Err(Error::contract(format!(
                "pairing a form on `{}` with a field on `{}`",
                self.chart.name(),
                field.chart().name()
            )));
        }
        let c = self.coeffs(x)?;
        let v = field.value(x)?;
        Ok(c.iter().zip(&v).map(|(a, b)| a * b).sum())
    }

    /// Restrict an ambient form to a tangent subspace at a point: the
    /// pullback along the basis-assembly map. The basis must be tangent
    /// to the chart's constraint surface.
    pub fn restrict_to_tangent(&self, x: &[f64], basis: &[Vec<f64>]) -> Result<FormValue> {
        self.chart.check_tangent(x, basis)?;
        let map = LinearMap::from_columns(basis)?;
        self.value(x)?.pull_back_linear(&map)
    }
}

/// Assemble `d(a)` coefficients from the jet of `a`:
/// `(da)_M = Σ_{j∈M} sign(j, M∖j) ∂_j a_{M∖j}`.
fn curl_from_jet<T, F>(dim: usize, inner_degree: usize, jet: &[T], partial: F) -> Vec<f64>
where
    F: Fn(&T, usize) -> f64,
{
    let out_len = binomial(dim, inner_degree + 1);
    let mut out = Vec::with_capacity(out_len);
    for &mask in &masks_colex(dim, inner_degree + 1) {
        let mut acc = 0.0;
        for j in indices_from_mask(mask) {
            let rest = mask & !(1u32 << j);
            let sign = shuffle_sign(1u32 << j, rest);
            acc += sign * partial(&jet[rank_of_mask(rest)], j);
        }
        out.push(acc);
    }
    out
}

/// Finite-difference fallback: central differences with one Richardson
/// extrapolation level, step `1e-5·(1+|x_j|)`, chained through the input
/// duals so that it composes correctly inside larger expressions.
fn fd_chain<F>(x: &[Dual], out_len: usize, f: F) -> Result<Vec<Dual>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let m = x.len();
    let base: Vec<f64> = x.iter().map(|d| d.val).collect();
    let val = f(&base)?;
    if val.len() != out_len {
        return Err(Error::evaluation("finite-difference fallback: wrong output length"));
    }
    // Jacobian columns.
    let mut jac = vec![0.0; out_len * m];
    let mut probe = base.clone();
    for j in 0..m {
        let h = 1e-5 * (1.0 + base[j].abs());
        let mut diff = |step: f64| -> Result<Vec<f64>> {
            probe[j] = base[j] + step;
            let hi = f(&probe)?;
            probe[j] = base[j] - step;
            let lo = f(&probe)?;
            probe[j] = base[j];
            Ok(hi.iter().zip(lo).map(|(a, b)| (a - b) / (2.0 * step)).collect())
        };
        let d_h = diff(h)?;
        let d_h2 = diff(h / 2.0)?;
        for i in 0..out_len {
            jac[i * m + j] = (4.0 * d_h2[i] - d_h[i]) / 3.0;
        }
    }
    // Chain through the input gradients.
    let n_seeds = x.iter().map(|d| d.grad.len()).max().unwrap_or(0);
    let out = (0..out_len)
        .map(|i| {
            let mut grad = vec![0.0; n_seeds];
            for (j, xj) in x.iter().enumerate() {
                let jij = jac[i * m + j];
                for (g, xg) in grad.iter_mut().zip(&xj.grad) {
                    *g += jij * xg;
                }
            }
            Dual { val: val[i], grad }
        })
        .collect();
    Ok(out)
}

/// Pullback of a form along a smooth map between charts:
/// `pullback(F, a)` lives on `F`'s source chart and satisfies
/// `(F*a)(v₁..v_k) = a(dF v₁, .., dF v_k)` pointwise.
pub fn pullback(map: &Arc<SmoothMap>, a: &DifferentialForm) -> Result<DifferentialForm> {
    if !same_chart(map.to_chart(), a.chart()) {
        return Err(Error::contract(format!(
            "pullback along `{}` (into chart `{}`) of a form on chart `{}`",
            map.name(),
            map.to_chart().name(),
            a.chart().name()
        )));
    }
    let degree = a.degree();
    if degree > map.from_chart().dim() {
        return Ok(DifferentialForm::zero(map.from_chart().clone(), degree));
    }
    Ok(DifferentialForm {
        chart: map.from_chart().clone(),
        degree,
        repr: Repr::Pullback(map.clone(), Arc::new(a.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{Chart, Domain};
    use approx::assert_relative_eq;

    fn plane() -> ChartRef {
        let orient = smooth_fn!(2, 1, |_x| vec![Scalar::one()]);
        Chart::new(
            "plane",
            &["x", "y"],
            Domain::Box { lo: vec![-1.0; 2], hi: vec![1.0; 2], predicate: None },
            2,
            orient,
        )
    }

    fn torus3() -> ChartRef {
        let tau = std::f64::consts::TAU;
        let orient = smooth_fn!(3, 1, |_x| vec![Scalar::one()]);
        Chart::new(
            "t3",
            &["x", "y", "z"],
            Domain::Box { lo: vec![0.0; 3], hi: vec![tau; 3], predicate: None },
            3,
            orient,
        )
    }

    #[test]
    fn d_of_x_dy_is_dx_dy() {
        let chart = plane();
        // a = x·dy
        let a = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(2, 2, |x| vec![Scalar::zero(), x[0].clone()]),
        );
        let da = a.exterior_derivative();
        let v = da.value(&[0.37, -0.82]).unwrap();
        assert_relative_eq!(v.coeff(&[0, 1]).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn d_squared_vanishes_on_analytic_form() {
        let chart = torus3();
        // A smooth 1-form with non-trivial coefficients.
        let a = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![
                (x[1].clone() * x[2].clone()).sin(),
                x[0].clone().cos() * x[2].clone(),
                (x[0].clone() * x[1].clone()).cos()
            ]),
        );
        let dda = a.exterior_derivative().exterior_derivative();
        for p in chart.sample(50, 5).unwrap() {
            let v = dda.value(&p).unwrap();
            assert!(v.max_abs_coeff() <= 1e-9, "d² residual {}", v.max_abs_coeff());
        }
    }

    #[test]
    fn wedge_mu_dmu_is_volume() {
        // μ ∧ dμ = dx∧dy∧dz for μ = cos z dx − sin z dy.
        let chart = torus3();
        let mu = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![x[2].clone().cos(), -x[2].clone().sin(), Scalar::zero()]),
        );
        let w = mu.wedge(&mu.exterior_derivative()).unwrap();
        for p in chart.sample(10, 1).unwrap() {
            let v = w.value(&p).unwrap();
            assert_relative_eq!(v.coeff(&[0, 1, 2]).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn exterior_derivative_matches_finite_differences() {
        let chart = torus3();
        // μ = cos z dx − sin z dy, dμ = −sin z dz∧dx − cos z dz∧dy
        let mu = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![x[2].clone().cos(), -x[2].clone().sin(), Scalar::zero()]),
        );
        let dmu = mu.exterior_derivative();
        for p in chart.sample(20, 9).unwrap() {
            let z = p[2];
            let v = dmu.value(&p).unwrap();
            // dz∧dx = −dx∧dz, dz∧dy = −dy∧dz
            assert_relative_eq!(v.coeff(&[0, 2]).unwrap(), z.sin(), max_relative = 1e-12);
            assert_relative_eq!(v.coeff(&[1, 2]).unwrap(), z.cos(), max_relative = 1e-12);
            assert_relative_eq!(v.coeff(&[0, 1]).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn leibniz_rule() {
        let chart = torus3();
        let a = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![x[1].clone().sin(), x[2].clone().cos(), x[0].clone()]),
        );
        let b = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![x[2].clone(), x[0].clone().sin(), Scalar::one()]),
        );
        let lhs = a.wedge(&b).unwrap().exterior_derivative();
        let rhs = a
            .exterior_derivative()
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&b.exterior_derivative()).unwrap().scale(-1.0))
            .unwrap();
        for p in chart.sample(25, 12).unwrap() {
            let l = lhs.value(&p).unwrap();
            let r = rhs.value(&p).unwrap();
            let diff = l.sub(&r).unwrap().max_abs_coeff();
            assert!(diff <= 1e-8, "Leibniz residual {diff}");
        }
    }

    #[test]
    fn jet_consistent_with_finite_differences() {
        let chart = torus3();
        let a = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![
                (x[0].clone() * x[1].clone()).sin(),
                x[2].clone().exp(),
                x[0].clone() * x[2].clone()
            ]),
        );
        for p in chart.sample(10, 21).unwrap() {
            let jet = a.jet(&p).unwrap();
            let h = 1e-6;
            for j in 0..3 {
                let mut hi = p.clone();
                hi[j] += h;
                let mut lo = p.clone();
                lo[j] -= h;
                let chi = a.coeffs(&hi).unwrap();
                let clo = a.coeffs(&lo).unwrap();
                for (i, d) in jet.iter().enumerate() {
                    let fd = (chi[i] - clo[i]) / (2.0 * h);
                    assert_relative_eq!(d.partial(j), fd, max_relative = 1e-6, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn pullback_along_identity_is_identity() {
        let chart = plane();
        let a = DifferentialForm::from_fn(
            chart.clone(),
            1,
            smooth_fn!(2, 2, |x| vec![x[1].clone(), x[0].clone()]),
        );
        let id = Arc::new(SmoothMap::new(
            "id",
            chart.clone(),
            chart.clone(),
            smooth_fn!(2, 2, |x| vec![x[0].clone(), x[1].clone()]),
        ));
        let pa = pullback(&id, &a).unwrap();
        for p in chart.sample(10, 2).unwrap() {
            let u = a.value(&p).unwrap();
            let v = pa.value(&p).unwrap();
            assert!(u.sub(&v).unwrap().max_abs_coeff() <= 1e-13);
        }
    }

    #[test]
    fn pullback_naturality_d_commutes() {
        // F(u, v) = (u·v, sin u, v²) from the plane to the 3-torus chart,
        // a = a smooth 1-form; d(F*a) must equal F*(da).
        let src = plane();
        let dst = torus3();
        let f = Arc::new(SmoothMap::new(
            "f",
            src.clone(),
            dst.clone(),
            smooth_fn!(2, 3, |x| vec![
                x[0].clone() * x[1].clone() + Scalar::constant(3.0),
                x[0].clone().sin() + Scalar::constant(3.0),
                x[1].clone() * x[1].clone() + Scalar::constant(3.0)
            ]),
        ));
        let a = DifferentialForm::from_fn(
            dst.clone(),
            1,
            smooth_fn!(3, 3, |x| vec![x[1].clone().cos(), x[2].clone(), x[0].clone().sin()]),
        );
        let lhs = pullback(&f, &a).unwrap().exterior_derivative();
        let rhs = pullback(&f, &a.exterior_derivative()).unwrap();
        for p in src.sample(15, 4).unwrap() {
            let l = lhs.value(&p).unwrap();
            let r = rhs.value(&p).unwrap();
            let diff = l.sub(&r).unwrap().max_abs_coeff();
            assert!(diff <= 1e-8, "naturality residual {diff}");
        }
    }

    #[test]
    fn pair_dz_with_unit_z_field() {
        let chart = torus3();
        let dz = DifferentialForm::constant(
            chart.clone(),
            FormValue::basis(3, &[2]).unwrap(),
        )
        .unwrap();
        let ez = VectorField::new(
            chart.clone(),
            smooth_fn!(3, 3, |_x| vec![Scalar::zero(), Scalar::zero(), Scalar::one()]),
        );
        assert_eq!(dz.pair(&ez, &[0.1, 0.2, 0.3]).unwrap(), 1.0);
    }

    #[test]
    fn restriction_drops_missing_directions() {
        let orient = smooth_fn!(3, 1, |_x| vec![Scalar::one()]);
        let sphere = Chart::new("s2", &["x", "y", "z"], Domain::Sphere { predicate: None }, 3, orient);
        let dx0 = DifferentialForm::constant(
            sphere.clone(),
            FormValue::basis(3, &[0]).unwrap(),
        )
        .unwrap();
        // At the north pole (0,0,1) the tangent plane is spanned by e0, e1.
        let p = vec![0.0, 0.0, 1.0];
        let restricted = dx0
            .restrict_to_tangent(&p, &[vec![0.0, 1.0, 0.0]])
            .unwrap();
        assert_eq!(restricted.coeffs(), &[0.0]);
        // Non-tangent basis is a contract violation.
        assert!(dx0.restrict_to_tangent(&p, &[vec![0.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn value_only_fields_use_fd_jacobian() {
        let chart = plane();
        let a = DifferentialForm::from_values(
            chart.clone(),
            1,
            Arc::new(|x: &[f64]| vec![x[0] * x[1], x[0].cos()]),
        );
        assert!(!a.analytic());
        let da = a.exterior_derivative();
        // d(xy dx + cos x dy) = (−sin x − x) dx∧dy
        let p = [0.4, -0.3];
        let v = da.value(&p).unwrap();
        assert_relative_eq!(
            v.coeff(&[0, 1]).unwrap(),
            -p[0].sin() - p[0],
            max_relative = 1e-9
        );
    }
}
