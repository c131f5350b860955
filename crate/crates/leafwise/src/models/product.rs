//! The S⁴×S¹ counterexample model.
//!
//! S⁴ carries the integrable 1-form θ₀ = f(x₅)dx₅ + G(x₅)ds whose kernel
//! foliates S⁴×S¹ with the closed leaf S³×S¹ at the equator, and the
//! perturbation direction v₀ = (1−x₅²)π*λ + x₅ds. The sphere is covered
//! by two stereographic charts (×S¹), each degenerating at one pole;
//! forms are defined once as ambient fields and pulled back to both
//! charts, where every check runs in plain coordinates.
//!
//! On the sphere (1−x₅²)π*λ agrees exactly with the restriction of the
//! polynomial field x₁dx₂ − x₂dx₁ + x₃dx₄ − x₄dx₃, which is smooth
//! across the poles; the model uses the polynomial representative and
//! verifies the π*λ identity on samples away from the pole axis.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charts::{
    pullback, Chart, ChartRef, DifferentialForm, Domain, ScalarField, SmoothMap,
};
use crate::error::{Error, Result};
use crate::exterior::multi_index::rank_of_mask;
use crate::exterior::FormValue;
use crate::profiles::{example42_bump, NormalizedBump};
use crate::scalar::Scalar;
use crate::{impl_smooth_fn, smooth_fn};

/// Chart radius: |u| ≤ 1.5 covers x₅ ≥ −5/13 from each side, so the two
/// charts overlap on a wide equatorial band.
pub const CHART_RADIUS: f64 = 1.5;

/// Orientation of S⁴×S¹ as an ambient 5-form on R⁵×R:
/// ι_x(dx₁∧…∧dx₅)∧ds with the outward normal first.
struct AmbientOrientation;

impl AmbientOrientation {
    fn dims(&self) -> (usize, usize) {
        (6, 6)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        for o in out.iter_mut() {
            *o = S::zero();
        }
        for j in 0..5 {
            let mask = ((1u32 << 5) - 1) & !(1u32 << j) | (1 << 5);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out[rank_of_mask(mask)] = x[j].clone() * S::constant(sign);
        }
    }
}
impl_smooth_fn!(AmbientOrientation);

/// Stereographic chart orientation: the pullback of the ambient
/// orientation is `sign · (2/(1+|u|²))⁴ du₁∧…∧du₄∧ds`, positive for the
/// chart projecting from the south pole, negative from the north.
struct StereoOrientation {
    sign: f64,
}

impl StereoOrientation {
    fn dims(&self) -> (usize, usize) {
        (5, 1)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let u2 = x[0].clone() * x[0].clone()
            + x[1].clone() * x[1].clone()
            + x[2].clone() * x[2].clone()
            + x[3].clone() * x[3].clone();
        let c = S::constant(2.0) / (S::one() + u2);
        out[0] = c.powi(4) * S::constant(self.sign);
    }
}
impl_smooth_fn!(StereoOrientation);

/// The stereographic embedding (u, s) ↦ (2u, ±(1−|u|²))/(1+|u|²), s).
struct StereoEmbedding {
    /// +1 covers the north pole (projection from the south pole).
    pole_sign: f64,
}

impl StereoEmbedding {
    fn dims(&self) -> (usize, usize) {
        (5, 6)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let u2 = x[0].clone() * x[0].clone()
            + x[1].clone() * x[1].clone()
            + x[2].clone() * x[2].clone()
            + x[3].clone() * x[3].clone();
        let denom = S::one() + u2.clone();
        for i in 0..4 {
            out[i] = S::constant(2.0) * x[i].clone() / denom.clone();
        }
        out[4] = S::constant(self.pole_sign) * (S::one() - u2) / denom;
        out[5] = x[4].clone();
    }
}
impl_smooth_fn!(StereoEmbedding);

/// Forms attached to one stereographic chart.
pub struct ChartForms {
    pub chart: ChartRef,
    /// Embedding into the ambient chart.
    pub embed: Arc<SmoothMap>,
    pub theta0: DifferentialForm,
    pub gamma: DifferentialForm,
    pub v0: DifferentialForm,
    /// ω = dv₀ + γ∧v₀.
    pub omega: DifferentialForm,
}

/// The S⁴×S¹ model with its two meridian charts.
pub struct ProductModel {
    /// Ambient formula host: R⁵×R with the S⁴×S¹ domain.
    pub ambient: ChartRef,
    /// Ambient chart of R⁴ hosting λ on S³.
    pub r4: ChartRef,
    pub bump: NormalizedBump,
    pub north: ChartForms,
    pub south: ChartForms,
    /// λ = x₁dx₂ − x₂dx₁ + x₃dx₄ − x₄dx₃ on the R⁴ chart.
    pub lambda: DifferentialForm,
    /// Meridian projection u ↦ u/|u| from the north chart to R⁴ ⊇ S³.
    pub meridian_north: Arc<SmoothMap>,
    /// Transition (u, s) ↦ (u/|u|², s) between the charts.
    pub north_to_south: Arc<SmoothMap>,
}

fn stereo_chart(name: &str, sign: f64) -> ChartRef {
    Chart::new(
        name,
        &["u1", "u2", "u3", "u4", "s"],
        Domain::Box {
            lo: vec![-CHART_RADIUS, -CHART_RADIUS, -CHART_RADIUS, -CHART_RADIUS, 0.0],
            hi: vec![CHART_RADIUS, CHART_RADIUS, CHART_RADIUS, CHART_RADIUS, TAU],
            predicate: Some(Arc::new(|x: &[f64]| {
                x[..4].iter().map(|v| v * v).sum::<f64>() <= CHART_RADIUS * CHART_RADIUS
            })),
        },
        5,
        Arc::new(StereoOrientation { sign }),
    )
}

/// Build the model with the bump supported in `[−eps_bump, eps_bump]`.
/// Construction verifies the integrability identity dθ₀ = θ₀∧γ on both
/// charts; a violation signals a wrong convention for G.
pub fn product_model(eps_bump: f64) -> Result<ProductModel> {
    if !(eps_bump > 0.0 && eps_bump <= 0.2) {
        return Err(Error::contract(format!(
            "bump support must satisfy 0 < eps ≤ 0.2, got {eps_bump}"
        )));
    }
    let bump = example42_bump(eps_bump)?;

    let ambient = Chart::new(
        "s4s1_ambient",
        &["x1", "x2", "x3", "x4", "x5", "s"],
        Domain::SphereTimesBox { sphere: 5, lo: vec![0.0], hi: vec![TAU] },
        5,
        Arc::new(AmbientOrientation),
    );
    let r4 = Chart::new(
        "r4",
        &["w1", "w2", "w3", "w4"],
        Domain::Sphere { predicate: None },
        4,
        smooth_fn!(4, 1, |_x| vec![Scalar::one()]),
    );

    // Ambient fields.
    let dx5 = DifferentialForm::constant(ambient.clone(), FormValue::basis(6, &[4])?)?;
    let ds = DifferentialForm::constant(ambient.clone(), FormValue::basis(6, &[5])?)?;
    let theta0_amb = dx5
        .scalar_mul(ScalarField::curve(bump.f.clone(), 4))
        .add(&ds.scalar_mul(ScalarField::curve(bump.g.clone(), 4)))?;
    let gamma_amb = ds.scalar_mul(ScalarField::curve(bump.f.clone(), 4));
    let v0_amb = DifferentialForm::from_fn(
        ambient.clone(),
        1,
        smooth_fn!(6, 6, |x| vec![
            -x[1].clone(),
            x[0].clone(),
            -x[3].clone(),
            x[2].clone(),
            Scalar::zero(),
            x[4].clone()
        ]),
    );

    let lambda = DifferentialForm::from_fn(
        r4.clone(),
        1,
        smooth_fn!(4, 4, |x| vec![-x[1].clone(), x[0].clone(), -x[3].clone(), x[2].clone()]),
    );

    let build_chart = |name: &str, pole_sign: f64| -> Result<ChartForms> {
        let chart = stereo_chart(name, pole_sign);
        let embed = Arc::new(SmoothMap::new(
            format!("embed_{name}"),
            chart.clone(),
            ambient.clone(),
            Arc::new(StereoEmbedding { pole_sign }),
        ));
        let theta0 = pullback(&embed, &theta0_amb)?;
        let gamma = pullback(&embed, &gamma_amb)?;
        let v0 = pullback(&embed, &v0_amb)?;
        let omega = v0.exterior_derivative().add(&gamma.wedge(&v0)?)?;
        Ok(ChartForms { chart, embed, theta0, gamma, v0, omega })
    };
    let north = build_chart("s4s1_north", 1.0)?;
    let south = build_chart("s4s1_south", -1.0)?;

    let meridian_north = Arc::new(
        SmoothMap::new(
            "meridian_projection",
            north.chart.clone(),
            r4.clone(),
            smooth_fn!(5, 4, |x| {
                let n = (x[0].clone() * x[0].clone()
                    + x[1].clone() * x[1].clone()
                    + x[2].clone() * x[2].clone()
                    + x[3].clone() * x[3].clone())
                .sqrt();
                vec![
                    x[0].clone() / n.clone(),
                    x[1].clone() / n.clone(),
                    x[2].clone() / n.clone(),
                    x[3].clone() / n,
                ]
            }),
        )
        .with_domain(Arc::new(|x: &[f64]| {
            x[..4].iter().map(|v| v * v).sum::<f64>().sqrt() > 0.05
        })),
    );

    let north_to_south = Arc::new(
        SmoothMap::new(
            "north_to_south",
            north.chart.clone(),
            south.chart.clone(),
            smooth_fn!(5, 5, |x| {
                let u2 = x[0].clone() * x[0].clone()
                    + x[1].clone() * x[1].clone()
                    + x[2].clone() * x[2].clone()
                    + x[3].clone() * x[3].clone();
                vec![
                    x[0].clone() / u2.clone(),
                    x[1].clone() / u2.clone(),
                    x[2].clone() / u2.clone(),
                    x[3].clone() / u2,
                    x[4].clone(),
                ]
            }),
        )
        .with_domain(Arc::new(|x: &[f64]| {
            x[..4].iter().map(|v| v * v).sum::<f64>().sqrt() > 1.0 / CHART_RADIUS - 1e-9
        })),
    );

    let model = ProductModel {
        ambient,
        r4,
        bump,
        north,
        south,
        lambda,
        meridian_north,
        north_to_south,
    };
    model.verify_construction(200, 0x542)?;
    Ok(model)
}

impl ProductModel {
    pub fn charts(&self) -> [&ChartForms; 2] {
        [&self.north, &self.south]
    }

    /// Samples on the overlap band (1/R ≤ |u| ≤ R) of the north chart.
    pub fn sample_overlap(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u: Vec<f64> =
                (0..4).map(|_| rng.gen_range(-CHART_RADIUS..CHART_RADIUS)).collect();
            let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n >= 1.0 / CHART_RADIUS && n <= CHART_RADIUS {
                let mut p = u;
                p.push(rng.gen_range(0.0..TAU));
                out.push(p);
            }
        }
        out
    }

    /// Residual of dθ₀ − θ₀∧γ at a point of one chart.
    pub fn integrability_residual(&self, forms: &ChartForms, p: &[f64]) -> Result<f64> {
        let lhs = forms.theta0.exterior_derivative().value(p)?;
        let rhs = forms.theta0.wedge(&forms.gamma)?.value(p)?;
        Ok(lhs.sub(&rhs)?.max_abs_coeff())
    }

    /// The alternative v₀ = (1−x₅²)·π*λ + x₅·ds on the north chart,
    /// defined away from the pole axis; used to certify that the
    /// polynomial representative equals the paper's formula on samples.
    pub fn v0_via_meridian_north(&self) -> Result<DifferentialForm> {
        let lam = pullback(&self.meridian_north, &self.lambda)?;
        let one_minus_x52 = ScalarField::Fn(smooth_fn!(5, 1, |x| {
            let u2 = x[0].clone() * x[0].clone()
                + x[1].clone() * x[1].clone()
                + x[2].clone() * x[2].clone()
                + x[3].clone() * x[3].clone();
            let d = S::one() + u2.clone();
            vec![S::constant(4.0) * u2 / (d.clone() * d)]
        }));
        let x5 = ScalarField::Fn(smooth_fn!(5, 1, |x| {
            let u2 = x[0].clone() * x[0].clone()
                + x[1].clone() * x[1].clone()
                + x[2].clone() * x[2].clone()
                + x[3].clone() * x[3].clone();
            vec![(S::one() - u2.clone()) / (S::one() + u2)]
        }));
        let ds = DifferentialForm::constant(
            self.north.chart.clone(),
            FormValue::basis(5, &[4])?,
        )?;
        lam.scalar_mul(one_minus_x52).add(&ds.scalar_mul(x5))
    }

    fn verify_construction(&self, samples: usize, seed: u64) -> Result<()> {
        for forms in self.charts() {
            let pts = forms.chart.sample(samples, seed)?;
            for p in &pts {
                let r = self.integrability_residual(forms, p)?;
                if r > 1e-8 {
                    return Err(Error::Construction {
                        check: format!(
                            "d(theta0) = theta0∧gamma on {}",
                            forms.chart.name()
                        ),
                        detail: format!(
                            "residual {r:.3e} at {p:?}; G must be the cumulative \
                             integral of f²"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn north_pole_point() -> Vec<f64> {
        vec![0.0, 0.0, 0.0, 0.0, 1.0]
    }

    #[test]
    fn rejects_bad_bump_support() {
        assert!(product_model(0.0).is_err());
        assert!(product_model(0.3).is_err());
    }

    #[test]
    fn theta0_at_the_poles_is_ds() {
        let m = product_model(0.1).unwrap();
        // North pole = u = 0 on the north chart: θ₀ = G(1)·ds = +ds.
        let v = m.north.theta0.value(&north_pole_point()).unwrap();
        for i in 0..4 {
            assert!(v.coeffs()[i].abs() <= 1e-10);
        }
        assert_relative_eq!(v.coeff(&[4]).unwrap(), 1.0, epsilon = 1e-10);
        // South pole = u = 0 on the south chart: θ₀ = G(−1)·ds = −ds.
        let v = m.south.theta0.value(&north_pole_point()).unwrap();
        assert_relative_eq!(v.coeff(&[4]).unwrap(), -1.0, epsilon = 1e-10);
    }

    #[test]
    fn v0_at_the_poles_is_plus_minus_ds() {
        let m = product_model(0.1).unwrap();
        let v = m.north.v0.value(&north_pole_point()).unwrap();
        for i in 0..4 {
            assert!(v.coeffs()[i].abs() <= 1e-12);
        }
        assert_relative_eq!(v.coeff(&[4]).unwrap(), 1.0, epsilon = 1e-12);
        let v = m.south.v0.value(&north_pole_point()).unwrap();
        assert_relative_eq!(v.coeff(&[4]).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn integrability_identity_holds_on_both_charts() {
        let m = product_model(0.1).unwrap();
        for forms in m.charts() {
            for p in forms.chart.sample(100, 17).unwrap() {
                let r = m.integrability_residual(forms, &p).unwrap();
                assert!(r <= 1e-8, "residual {r} on {}", forms.chart.name());
            }
        }
    }

    #[test]
    fn polynomial_v0_equals_meridian_formula() {
        let m = product_model(0.1).unwrap();
        let alt = m.v0_via_meridian_north().unwrap();
        for p in m.north.chart.sample(200, 23).unwrap() {
            let n = p[..4].iter().map(|v| v * v).sum::<f64>().sqrt();
            if n <= 0.05 {
                continue;
            }
            let a = m.north.v0.value(&p).unwrap();
            let b = alt.value(&p).unwrap();
            let d = a.sub(&b).unwrap().max_abs_coeff();
            assert!(d <= 1e-10, "v0 identity residual {d} at {p:?}");
        }
    }

    #[test]
    fn meridian_fixes_the_equator() {
        // At |u| = 1 the meridian projection is the identity, and the
        // pullback of λ has the same coefficients as λ itself.
        let m = product_model(0.1).unwrap();
        let p = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        let pulled = pullback(&m.meridian_north, &m.lambda).unwrap();
        let v = pulled.value(&p).unwrap();
        let w = m.lambda.value(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for i in 0..4 {
            assert_relative_eq!(v.coeffs()[i], w.coeffs()[i], epsilon = 1e-13);
        }
        assert_eq!(v.coeffs()[4], 0.0);
    }

    #[test]
    fn chart_overlap_consistency() {
        let m = product_model(0.1).unwrap();
        let pts = m.sample_overlap(60, 31);
        for (name, north_form, south_form) in [
            ("theta0", &m.north.theta0, &m.south.theta0),
            ("gamma", &m.north.gamma, &m.south.gamma),
            ("v0", &m.north.v0, &m.south.v0),
        ] {
            let pulled = pullback(&m.north_to_south, south_form).unwrap();
            for p in &pts {
                let a = north_form.value(p).unwrap();
                let b = pulled.value(p).unwrap();
                let d = a.sub(&b).unwrap().max_abs_coeff();
                assert!(d <= 1e-8, "{name} overlap residual {d} at {p:?}");
            }
        }
    }

    #[test]
    fn omega_positivity_at_the_pole() {
        // θ₀∧ω² / orientation = 8 at the north pole.
        let m = product_model(0.1).unwrap();
        let p = north_pole_point();
        let top = m.north.theta0.wedge(&m.north.omega).unwrap().wedge(&m.north.omega).unwrap();
        let v = top.value(&p).unwrap().coeffs()[0];
        let orient = m.north.chart.orientation_top_coeff(&p);
        assert_relative_eq!(v / orient, 8.0, max_relative = 1e-8);
    }

    #[test]
    fn embedding_lands_on_the_sphere() {
        let m = product_model(0.1).unwrap();
        for p in m.north.chart.sample(50, 41).unwrap() {
            let img = m.north.embed.apply(&p).unwrap();
            let r2: f64 = img[..5].iter().map(|v| v * v).sum();
            assert!((r2 - 1.0).abs() <= 1e-12);
            assert!(m.ambient.contains(&img));
        }
    }
}
