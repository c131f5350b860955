//! The torus binding and its collar.
//!
//! N = T³ with μ = cos z·dx − sin z·dy, ν = dz, Ω = dx∧dy satisfies every
//! binding hypothesis of the deformation theorems with explicit global
//! coordinates: μ∧dμ = dx∧dy∧dz, ν is closed and nonvanishing,
//! ν∧dμ ≡ 0, dΩ = 0 and ν∧(εΩ+dμ) = ε·dx∧dy∧dz > 0 for every ε > 0.
//!
//! The collar T³×D² carries polar coordinates (x,y,z,r,θ) away from the
//! axis and a Cartesian disk chart (x,y,z,u,v) over r < 0.2, where
//! g₀ = r² exactly and the disk factor of the adapted form is the smooth
//! u·dv − v·du.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charts::{Chart, ChartRef, DifferentialForm, Domain, ScalarField, SmoothMap, VectorField};
use crate::error::{Error, Result};
use crate::exterior::FormValue;
use crate::profiles::TransitionProfile;
use crate::scalar::{Curve, CurveLinComb, Scalar};
use crate::{impl_smooth_fn, smooth_fn};

/// Inner radius of the polar chart; the Cartesian chart covers r < 0.2.
pub const R_MIN: f64 = 0.05;
/// Outer radius of the Cartesian disk chart.
pub const R_CART: f64 = 0.2;
/// Overlap annulus for polar/Cartesian consistency checks.
pub const OVERLAP: (f64, f64) = (0.1, 0.2);

/// A binding: contact form μ, closed 1-form ν with ν∧(dμ)^{n−1} ≡ 0, and
/// a closed 2-form Ω, on a (2n−1)-dimensional chart.
pub struct BindingData {
    pub chart: ChartRef,
    pub mu: DifferentialForm,
    pub nu: DifferentialForm,
    pub omega: DifferentialForm,
    /// Half-dimension parameter: the collar has dimension 2n+1.
    pub n: usize,
    /// The calibration scale the binding was validated with.
    pub epsilon: f64,
    /// Reeb field of μ.
    pub reeb: VectorField,
}

/// The collar N×D² with both disk charts and the adapted form α₀.
pub struct CollarModel {
    pub binding: BindingData,
    pub profile: TransitionProfile,
    /// Polar chart (x, y, z, r, θ), r ∈ [R_MIN, 1].
    pub polar: ChartRef,
    /// Cartesian disk chart (x, y, z, u, v), u²+v² < R_CART².
    pub cart: ChartRef,
    /// Base forms on the polar chart.
    pub mu: DifferentialForm,
    pub nu: DifferentialForm,
    pub dtheta: DifferentialForm,
    pub dr: DifferentialForm,
    pub omega: DifferentialForm,
    /// Ω̃ = Ω + e(r)·dθ∧ν on the polar chart.
    pub omega_tilde: DifferentialForm,
    /// α₀ = f₀(r)μ + g₀(r)dθ on the polar chart.
    pub alpha0: DifferentialForm,
    /// Base forms on the Cartesian chart (e ≡ 0 there, so Ω̃ = Ω).
    pub mu_cart: DifferentialForm,
    pub nu_cart: DifferentialForm,
    pub omega_cart: DifferentialForm,
    pub alpha0_cart: DifferentialForm,
    /// g₀dθ = u·dv − v·du on the Cartesian chart.
    pub theta_factor_cart: DifferentialForm,
    /// Polar → Cartesian transition on the overlap annulus.
    pub polar_to_cart: Arc<SmoothMap>,
}

fn t3_chart() -> ChartRef {
    Chart::new(
        "torus3",
        &["x", "y", "z"],
        Domain::Box { lo: vec![0.0; 3], hi: vec![TAU; 3], predicate: None },
        3,
        smooth_fn!(3, 1, |_x| vec![Scalar::one()]),
    )
}

/// The binding N = T³ with μ = cos z·dx − sin z·dy, ν = dz, Ω = dx∧dy.
/// All binding invariants are verified at construction on seeded samples;
/// a violated invariant is a construction error naming the check.
pub fn torus_binding(epsilon: f64) -> Result<BindingData> {
    if epsilon <= 0.0 {
        return Err(Error::contract(format!("epsilon must be positive, got {epsilon}")));
    }
    let chart = t3_chart();
    let mu = DifferentialForm::from_fn(
        chart.clone(),
        1,
        smooth_fn!(3, 3, |x| vec![x[2].clone().cos(), -x[2].clone().sin(), Scalar::zero()]),
    );
    let nu = DifferentialForm::constant(chart.clone(), FormValue::basis(3, &[2])?)?;
    let omega = DifferentialForm::constant(chart.clone(), FormValue::basis(3, &[0, 1])?)?;
    let reeb = VectorField::new(
        chart.clone(),
        smooth_fn!(3, 3, |x| vec![x[2].clone().cos(), -x[2].clone().sin(), Scalar::zero()]),
    );
    let binding = BindingData { chart, mu, nu, omega, n: 2, epsilon, reeb };
    verify_binding(&binding, 500, 0xB1D)?;
    Ok(binding)
}

/// Re-checkable binding invariants; the constructor runs them and the
/// verification suite runs them again before any theorem-level check.
pub fn verify_binding(b: &BindingData, samples: usize, seed: u64) -> Result<()> {
    let pts = b.chart.sample(samples, seed)?;
    let dmu = b.mu.exterior_derivative();
    let dnu = b.nu.exterior_derivative();
    let domega = b.omega.exterior_derivative();
    // μ∧(dμ)^{n−1}, against the binding orientation.
    let mut contact_vol = b.mu.clone();
    for _ in 0..b.n - 1 {
        contact_vol = contact_vol.wedge(&dmu)?;
    }
    // ν∧(εΩ + dμ)^{n−1}
    let eps_omega = b.omega.scale(b.epsilon).add(&dmu)?;
    let mut calibrated = b.nu.clone();
    for _ in 0..b.n - 1 {
        calibrated = calibrated.wedge(&eps_omega)?;
    }
    // ν∧(dμ)^{n−1}
    let mut nu_dmu = b.nu.clone();
    for _ in 0..b.n - 1 {
        nu_dmu = nu_dmu.wedge(&dmu)?;
    }
    let fail = |check: &str, detail: String| Error::Construction {
        check: check.to_string(),
        detail,
    };
    for p in &pts {
        let orient = b.chart.orientation_top_coeff(p);
        let cv = contact_vol.value(p)?.coeffs()[0] / orient;
        if cv.abs() <= 1e-10 {
            return Err(fail("mu contact (mu∧dmu^{n-1} nonvanishing)", format!("value {cv:.3e} at {p:?}")));
        }
        let r1 = dnu.value(p)?.max_abs_coeff();
        if r1 > 1e-9 {
            return Err(fail("nu closed (dnu = 0)", format!("residual {r1:.3e} at {p:?}")));
        }
        let nv = b.nu.value(p)?.max_abs_coeff();
        if nv <= 1e-10 {
            return Err(fail("nu nonvanishing", format!("norm {nv:.3e} at {p:?}")));
        }
        let r2 = nu_dmu.value(p)?.max_abs_coeff();
        if r2 > 1e-9 {
            return Err(fail("nu∧dmu^{n-1} = 0", format!("residual {r2:.3e} at {p:?}")));
        }
        let r3 = domega.value(p)?.max_abs_coeff();
        if r3 > 1e-9 {
            return Err(fail("Omega closed (dOmega = 0)", format!("residual {r3:.3e} at {p:?}")));
        }
        let cal = calibrated.value(p)?.coeffs()[0] / orient;
        if cal <= 0.0 {
            return Err(fail(
                "nu∧(eps·Omega + dmu)^{n-1} > 0",
                format!("value {cal:.3e} at {p:?} (eps = {})", b.epsilon),
            ));
        }
    }
    Ok(())
}

/// Cartesian-chart coefficients of α₀ = f₀(r)μ + r²dθ, with
/// f₀ = 1 − c·r² and r² = u² + v²: all polynomial, smooth at the axis.
struct Alpha0Cart {
    c: f64,
}

impl Alpha0Cart {
    fn dims(&self) -> (usize, usize) {
        (5, 5)
    }
    fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let (z, u, v) = (x[2].clone(), x[3].clone(), x[4].clone());
        let r2 = u.clone() * u.clone() + v.clone() * v.clone();
        let f0 = S::one() - S::constant(self.c) * r2;
        out[0] = f0.clone() * z.clone().cos();
        out[1] = -(f0 * z.sin());
        out[2] = S::zero();
        // r²dθ = u·dv − v·du
        out[3] = -v;
        out[4] = u;
    }
}
impl_smooth_fn!(Alpha0Cart);

/// Assemble the collar model over a binding with a profile. The
/// Cartesian chart hard-codes the plateau structure (g₀ = r², f₁ ≡ 1,
/// g₁ ≡ 0, h ≡ 1, e ≡ 0 on r < 0.2), so the profile's transition
/// intervals must all start at or beyond R_CART.
pub fn collar(binding: BindingData, profile: TransitionProfile) -> Result<CollarModel> {
    let pr = &profile.params;
    let starts = [
        ("g0_blend", pr.g0_blend.0),
        ("f1_fall", pr.f1_fall.0),
        ("g1_rise", pr.g1_rise.0),
        ("h_fall", pr.h_fall.0),
        ("e_support", pr.e_support.0),
    ];
    for (name, start) in starts {
        if start < R_CART {
            return Err(Error::contract(format!(
                "{name} begins at {start} < {R_CART}; the Cartesian disk chart requires all \
                 transitions to start beyond it"
            )));
        }
    }
    if binding.n != 2 {
        return Err(Error::contract("the shipped collar is five-dimensional (n = 2)"));
    }

    let polar = Chart::new(
        "collar_polar",
        &["x", "y", "z", "r", "theta"],
        Domain::Box {
            lo: vec![0.0, 0.0, 0.0, R_MIN, 0.0],
            hi: vec![TAU, TAU, TAU, 1.0, TAU],
            predicate: None,
        },
        5,
        // orientation μ∧(dμ)^{n−1}∧(r dr∧dθ) = r·dx∧dy∧dz∧dr∧dθ
        smooth_fn!(5, 1, |x| vec![x[3].clone()]),
    );
    let cart = Chart::new(
        "collar_cart",
        &["x", "y", "z", "u", "v"],
        Domain::Box {
            lo: vec![0.0, 0.0, 0.0, -R_CART, -R_CART],
            hi: vec![TAU, TAU, TAU, R_CART, R_CART],
            predicate: Some(Arc::new(|x: &[f64]| x[3] * x[3] + x[4] * x[4] < R_CART * R_CART)),
        },
        5,
        smooth_fn!(5, 1, |_x| vec![Scalar::one()]),
    );

    // Polar-chart base forms.
    let mu = DifferentialForm::from_fn(
        polar.clone(),
        1,
        smooth_fn!(5, 5, |x| vec![
            x[2].clone().cos(),
            -x[2].clone().sin(),
            Scalar::zero(),
            Scalar::zero(),
            Scalar::zero()
        ]),
    );
    let nu = DifferentialForm::constant(polar.clone(), FormValue::basis(5, &[2])?)?;
    let dtheta = DifferentialForm::constant(polar.clone(), FormValue::basis(5, &[4])?)?;
    let dr = DifferentialForm::constant(polar.clone(), FormValue::basis(5, &[3])?)?;
    let omega = DifferentialForm::constant(polar.clone(), FormValue::basis(5, &[0, 1])?)?;
    // Ω̃ = Ω + e(r)·dθ∧ν
    let dtheta_nu =
        DifferentialForm::constant(polar.clone(), FormValue::basis(5, &[4, 2])?)?;
    let omega_tilde = omega
        .add(&dtheta_nu.scalar_mul(ScalarField::curve(profile.e.clone(), 3)))?;
    // α₀ = f₀(r)·μ + g₀(r)·dθ
    let alpha0 = mu
        .scalar_mul(ScalarField::curve(profile.f0.clone(), 3))
        .add(&dtheta.scalar_mul(ScalarField::curve(profile.g0.clone(), 3)))?;

    // Cartesian-chart base forms.
    let mu_cart = DifferentialForm::from_fn(
        cart.clone(),
        1,
        smooth_fn!(5, 5, |x| vec![
            x[2].clone().cos(),
            -x[2].clone().sin(),
            Scalar::zero(),
            Scalar::zero(),
            Scalar::zero()
        ]),
    );
    let nu_cart = DifferentialForm::constant(cart.clone(), FormValue::basis(5, &[2])?)?;
    let omega_cart = DifferentialForm::constant(cart.clone(), FormValue::basis(5, &[0, 1])?)?;
    let theta_factor_cart = DifferentialForm::from_fn(
        cart.clone(),
        1,
        smooth_fn!(5, 5, |x| vec![
            Scalar::zero(),
            Scalar::zero(),
            Scalar::zero(),
            -x[4].clone(),
            x[3].clone()
        ]),
    );
    let alpha0_cart = DifferentialForm::from_fn(
        cart.clone(),
        1,
        Arc::new(Alpha0Cart { c: pr.f0_quadratic }),
    );

    let polar_to_cart = Arc::new(SmoothMap::new(
        "polar_to_cart",
        polar.clone(),
        cart.clone(),
        smooth_fn!(5, 5, |x| vec![
            x[0].clone(),
            x[1].clone(),
            x[2].clone(),
            x[3].clone() * x[4].clone().cos(),
            x[3].clone() * x[4].clone().sin()
        ]),
    ));

    let model = CollarModel {
        binding,
        profile,
        polar,
        cart,
        mu,
        nu,
        dtheta,
        dr,
        omega,
        omega_tilde,
        alpha0,
        mu_cart,
        nu_cart,
        omega_cart,
        alpha0_cart,
        theta_factor_cart,
        polar_to_cart,
    };
    model.check_overlap(200, 0xC0117A)?;
    Ok(model)
}

impl CollarModel {
    pub fn n(&self) -> usize {
        self.binding.n
    }

    /// Seeded samples on the overlap annulus of the two disk charts,
    /// in polar coordinates.
    pub fn sample_overlap(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                vec![
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(OVERLAP.0..OVERLAP.1),
                    rng.gen_range(0.0..TAU),
                ]
            })
            .collect()
    }

    /// Polar/Cartesian consistency: a polar-chart form and the pullback
    /// of its Cartesian counterpart must agree on the annulus.
    pub fn overlap_residual(
        &self,
        polar_form: &DifferentialForm,
        cart_form: &DifferentialForm,
        points: &[Vec<f64>],
    ) -> Result<f64> {
        let pulled = crate::charts::pullback(&self.polar_to_cart, cart_form)?;
        let mut worst = 0.0f64;
        for p in points {
            let d = polar_form.value(p)?.sub(&pulled.value(p)?)?.max_abs_coeff();
            worst = worst.max(d);
        }
        Ok(worst)
    }

    fn check_overlap(&self, count: usize, seed: u64) -> Result<()> {
        let pts = self.sample_overlap(count, seed);
        let pairs: [(&str, &DifferentialForm, &DifferentialForm); 4] = [
            ("alpha0", &self.alpha0, &self.alpha0_cart),
            ("mu", &self.mu, &self.mu_cart),
            ("nu", &self.nu, &self.nu_cart),
            ("omega_tilde", &self.omega_tilde, &self.omega_cart),
        ];
        for (name, polar_form, cart_form) in pairs {
            let worst = self.overlap_residual(polar_form, cart_form, &pts)?;
            if worst > 1e-8 {
                return Err(Error::Construction {
                    check: format!("polar/Cartesian overlap agreement for {name}"),
                    detail: format!("residual {worst:.3e}"),
                });
            }
        }
        Ok(())
    }

    /// Interpolant curve `f_t·h` used by the ν-term of the family.
    pub fn fth_curve(&self, t: f64) -> Arc<dyn Curve> {
        Arc::new(crate::scalar::CurveProduct { f: self.profile.f_t(t), g: self.profile.h.clone() })
    }

    /// Interpolant `f_t`.
    pub fn ft_curve(&self, t: f64) -> Arc<dyn Curve> {
        self.profile.f_t(t)
    }

    /// Interpolant `g_t`.
    pub fn gt_curve(&self, t: f64) -> Arc<dyn Curve> {
        self.profile.g_t(t)
    }

    /// `g_t` as a curve of r², for the Cartesian chart where only the
    /// (1−t)·r² branch survives. Returns the weight (1−t).
    pub fn gt_cart_weight(&self, t: f64) -> f64 {
        1.0 - t
    }

    /// `f_t` on the Cartesian chart: (1−t)·f₀(r) + t (since f₁ ≡ 1 there).
    pub fn ft_cart_curve(&self, t: f64) -> Arc<dyn Curve> {
        Arc::new(CurveLinComb {
            a: 1.0 - t,
            f: self.profile.f0.clone(),
            b: t,
            g: Arc::new(crate::scalar::ConstCurve(1.0)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::make_default_profiles;
    use approx::assert_relative_eq;

    #[test]
    fn binding_invariants_hold() {
        let b = torus_binding(0.5).unwrap();
        // μ∧dμ = +1·dx∧dy∧dz at every sample.
        let dmu = b.mu.exterior_derivative();
        let w = b.mu.wedge(&dmu).unwrap();
        for p in b.chart.sample(50, 1).unwrap() {
            assert_relative_eq!(
                w.value(&p).unwrap().coeff(&[0, 1, 2]).unwrap(),
                1.0,
                max_relative = 1e-12
            );
            // ν∧dμ = 0: both dμ terms contain dz.
            let nd = b.nu.wedge(&dmu).unwrap().value(&p).unwrap().max_abs_coeff();
            assert!(nd <= 1e-15);
            // ν∧(εΩ+dμ) = ε·dx∧dy∧dz
            let cal = b
                .nu
                .wedge(&b.omega.scale(b.epsilon).add(&dmu).unwrap())
                .unwrap()
                .value(&p)
                .unwrap();
            assert_relative_eq!(cal.coeff(&[0, 1, 2]).unwrap(), 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn binding_rejects_nonpositive_epsilon() {
        assert!(torus_binding(0.0).is_err());
        assert!(torus_binding(-1.0).is_err());
    }

    #[test]
    fn reeb_field_of_mu() {
        let b = torus_binding(1.0).unwrap();
        let dmu = b.mu.exterior_derivative();
        for p in b.chart.sample(30, 2).unwrap() {
            // μ(R) = 1
            assert_relative_eq!(b.mu.pair(&b.reeb, &p).unwrap(), 1.0, max_relative = 1e-12);
            // ι_R dμ = 0 and ν(R) = 0 (the first integral is constant).
            let r = b.reeb.value(&p).unwrap();
            let dmu_v = dmu.value(&p).unwrap();
            for probe in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
                let v = dmu_v.evaluate(&[r.clone(), probe.to_vec()]).unwrap();
                assert!(v.abs() <= 1e-14);
            }
            assert!(b.nu.pair(&b.reeb, &p).unwrap().abs() <= 1e-15);
        }
    }

    #[test]
    fn collar_alpha0_at_quarter_radius() {
        let model = collar(torus_binding(0.5).unwrap(), make_default_profiles(1.0).unwrap())
            .unwrap();
        // α₀(r = 0.25) = f₀(0.25)·μ + 0.0625·dθ, f₀(0.25) = 0.96875.
        let p = vec![1.0, 2.0, 3.0, 0.25, 4.0];
        let v = model.alpha0.value(&p).unwrap();
        let f0 = 0.96875;
        assert_relative_eq!(v.coeff(&[0]).unwrap(), f0 * 3.0f64.cos(), max_relative = 1e-14);
        assert_relative_eq!(v.coeff(&[1]).unwrap(), -f0 * 3.0f64.sin(), max_relative = 1e-14);
        assert_eq!(v.coeff(&[2]).unwrap(), 0.0);
        assert_eq!(v.coeff(&[3]).unwrap(), 0.0);
        assert_eq!(v.coeff(&[4]).unwrap(), 0.0625);
    }

    #[test]
    fn collar_contact_positivity_matches_scalar_oracle() {
        let model = collar(torus_binding(0.5).unwrap(), make_default_profiles(1.0).unwrap())
            .unwrap();
        let da = model.alpha0.exterior_derivative();
        let top = model.alpha0.wedge(&da).unwrap().wedge(&da).unwrap();
        let prof = &model.profile;
        for p in model.polar.sample(300, 7).unwrap() {
            let r = p[3];
            let val = top.value(&p).unwrap().coeffs()[0] / model.polar.orientation_top_coeff(&p);
            // n·f₀^{n−1}·(g₀′f₀ − f₀′g₀)/r with n = 2.
            let oracle = 2.0
                * prof.f0.value(r)
                * crate::profiles::wronskian_over_r(prof.f0.as_ref(), prof.g0.as_ref(), r);
            assert_relative_eq!(val, oracle, max_relative = 1e-9);
            assert!(val > 0.0);
        }
    }

    #[test]
    fn collar_overlap_agreement() {
        let model = collar(torus_binding(0.5).unwrap(), make_default_profiles(1.0).unwrap())
            .unwrap();
        let pts = model.sample_overlap(100, 3);
        let worst = model
            .overlap_residual(&model.alpha0, &model.alpha0_cart, &pts)
            .unwrap();
        assert!(worst <= 1e-8, "alpha0 overlap residual {worst}");
    }

    #[test]
    fn collar_rejects_profiles_invading_the_disk_chart() {
        let bad = crate::profiles::TransitionProfile::from_params(
            crate::profiles::ProfileParams {
                e_support: (0.1, 0.3),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(collar(torus_binding(0.5).unwrap(), bad).is_err());
    }
}
