//! The t-parameterized families.
//!
//! On the collar the family is the four-term expression
//!
//! ```text
//! α_t = (1−t)f_t(r)·μ + t·f_t(r)h(r)·ν + g_t(r)·dθ + t·e(r)·dr
//! ω_t = dα₀ + t·ε·Ω̃
//! ```
//!
//! with `f_t = (1−t)f₀ + t f₁`, `g_t = (1−t)g₀ + t g₁`. Away from the
//! collar the family is the line `τ·α₀ + (1−τ)·dθ` with `τ = (1−t)²`,
//! exercised on the five-sphere model. The linear perturbation
//! `θ_t = θ₀ + t·v₀` lives on the product model.

use std::sync::Arc;

use crate::charts::{ChartRef, DifferentialForm, ScalarField};
use crate::error::{Error, Result};
use crate::models::product::ChartForms;
use crate::models::{CollarModel, MilnorModel};

/// The outer-branch interpolation parameter.
pub fn tau(t: f64) -> f64 {
    (1.0 - t) * (1.0 - t)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::contract(format!("deformation parameter t must lie in [0,1], got {t}")));
    }
    Ok(())
}

/// The four summands of the collar family at a fixed t, as separate
/// fields. They sum to α_t exactly.
pub struct TermDecomposition {
    pub term_mu: DifferentialForm,
    pub term_nu: DifferentialForm,
    pub term_theta: DifferentialForm,
    pub term_dr: DifferentialForm,
}

impl TermDecomposition {
    pub fn terms(&self) -> [&DifferentialForm; 4] {
        [&self.term_mu, &self.term_nu, &self.term_theta, &self.term_dr]
    }

    pub fn sum(&self) -> Result<DifferentialForm> {
        DifferentialForm::sum(vec![
            (1.0, self.term_mu.clone()),
            (1.0, self.term_nu.clone()),
            (1.0, self.term_theta.clone()),
            (1.0, self.term_dr.clone()),
        ])
    }
}

/// A deformation family over a collar model with a fixed calibration
/// scale ε.
pub struct DeformationFamily {
    pub collar: Arc<CollarModel>,
    pub epsilon: f64,
}

impl DeformationFamily {
    pub fn new(collar: Arc<CollarModel>, epsilon: f64) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::contract(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(DeformationFamily { collar, epsilon })
    }

    pub fn polar_chart(&self) -> &ChartRef {
        &self.collar.polar
    }

    pub fn cart_chart(&self) -> &ChartRef {
        &self.collar.cart
    }

    /// α_t on the polar chart.
    pub fn alpha_t(&self, t: f64) -> Result<DifferentialForm> {
        check_t(t)?;
        self.term_decomposition(t)?.sum()
    }

    /// The four summands of α_t on the polar chart.
    pub fn term_decomposition(&self, t: f64) -> Result<TermDecomposition> {
        check_t(t)?;
        let c = &self.collar;
        let r = 3; // radial coordinate index on the polar chart
        let term_mu = c
            .mu
            .scalar_mul(ScalarField::curve(c.ft_curve(t), r))
            .scale(1.0 - t);
        let term_nu = c
            .nu
            .scalar_mul(ScalarField::curve(c.fth_curve(t), r))
            .scale(t);
        let term_theta = c.dtheta.scalar_mul(ScalarField::curve(c.gt_curve(t), r));
        let term_dr = c
            .dr
            .scalar_mul(ScalarField::curve(c.profile.e.clone(), r))
            .scale(t);
        Ok(TermDecomposition { term_mu, term_nu, term_theta, term_dr })
    }

    /// α_t on the Cartesian disk chart, where f₁ ≡ 1, g₁ ≡ 0, h ≡ 1 and
    /// e ≡ 0: α_t = (1−t)f_t·μ + t·f_t·ν + (1−t)·(u dv − v du).
    pub fn alpha_t_cart(&self, t: f64) -> Result<DifferentialForm> {
        check_t(t)?;
        self.term_decomposition_cart(t)?.sum()
    }

    /// The four summands on the Cartesian chart (the dr term is the zero
    /// form there).
    pub fn term_decomposition_cart(&self, t: f64) -> Result<TermDecomposition> {
        check_t(t)?;
        let c = &self.collar;
        // f_t(r) = (1−t)(1 − c·r²) + t = 1 − (1−t)·c·r², a polynomial in
        // u² + v², smooth at the axis.
        let cquad = c.profile.params.f0_quadratic;
        let ft_field = ScalarField::Fn(ft_cart_field(cquad, t));
        let term_mu = c.mu_cart.scalar_mul(ft_field.clone()).scale(1.0 - t);
        let term_nu = c.nu_cart.scalar_mul(ft_field).scale(t);
        let term_theta = c.theta_factor_cart.scale(1.0 - t);
        let term_dr = DifferentialForm::zero(c.cart.clone(), 1);
        Ok(TermDecomposition { term_mu, term_nu, term_theta, term_dr })
    }

    /// ω_t = dα₀ + t·ε·Ω̃ on the polar chart. At t = 0 the Ω̃ summand has
    /// weight exactly zero, so ω₀ = dα₀ by construction.
    pub fn omega_t(&self, t: f64) -> Result<DifferentialForm> {
        check_t(t)?;
        self.collar
            .alpha0
            .exterior_derivative()
            .add(&self.collar.omega_tilde.scale(t * self.epsilon))
    }

    /// ω_t on the Cartesian chart (Ω̃ = Ω there).
    pub fn omega_t_cart(&self, t: f64) -> Result<DifferentialForm> {
        check_t(t)?;
        self.collar
            .alpha0_cart
            .exterior_derivative()
            .add(&self.collar.omega_cart.scale(t * self.epsilon))
    }
}

/// Smooth Cartesian-chart field for f_t(r) = 1 − (1−t)·c·r².
fn ft_cart_field(c: f64, t: f64) -> Arc<dyn crate::charts::SmoothFn> {
    use crate::charts::SmoothFn;
    use crate::scalar::{Dual, Scalar};
    struct FtCart {
        w: f64,
    }
    impl FtCart {
        fn formula<S: Scalar>(&self, x: &[S], out: &mut [S]) {
            let r2 = x[3].clone() * x[3].clone() + x[4].clone() * x[4].clone();
            out[0] = S::one() - S::constant(self.w) * r2;
        }
    }
    impl SmoothFn for FtCart {
        fn input_dim(&self) -> usize {
            5
        }
        fn output_dim(&self) -> usize {
            1
        }
        fn eval_f64(&self, x: &[f64], out: &mut [f64]) {
            self.formula(x, out)
        }
        fn eval_dual(&self, x: &[Dual], out: &mut [Dual]) {
            self.formula(x, out)
        }
    }
    Arc::new(FtCart { w: (1.0 - t) * c })
}

/// The outer-region branch on the five-sphere: τ·α_std + (1−τ)·dθ.
pub fn outer_alpha_t(model: &MilnorModel, t: f64) -> Result<DifferentialForm> {
    check_t(t)?;
    let tau = tau(t);
    model.alpha_std.lin_comb(tau, &model.dtheta, 1.0 - tau)
}

/// ω_t off the collar: Ω̃ vanishes there, so ω_t = dα_std for every t.
pub fn outer_omega_t(model: &MilnorModel, t: f64) -> Result<DifferentialForm> {
    check_t(t)?;
    Ok(model.alpha_std.exterior_derivative())
}

/// The linear perturbation θ_t = θ₀ + t·v₀ on one product chart.
pub fn theta_t_linear(forms: &ChartForms, t: f64) -> Result<DifferentialForm> {
    if t < 0.0 {
        return Err(Error::contract(format!("perturbation parameter must be ≥ 0, got {t}")));
    }
    forms.theta0.lin_comb(1.0, &forms.v0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{collar, milnor_model, product_model, torus_binding};
    use crate::profiles::make_default_profiles;
    use approx::assert_relative_eq;

    fn family() -> DeformationFamily {
        let model = collar(
            torus_binding(0.5).unwrap(),
            make_default_profiles(1.0).unwrap(),
        )
        .unwrap();
        DeformationFamily::new(Arc::new(model), 0.5).unwrap()
    }

    #[test]
    fn rejects_out_of_range_t() {
        let f = family();
        assert!(f.alpha_t(-0.1).is_err());
        assert!(f.alpha_t(1.1).is_err());
        assert!(DeformationFamily::new(f.collar.clone(), 0.0).is_err());
    }

    #[test]
    fn alpha_at_t0_is_adapted_form() {
        let f = family();
        let a0 = f.alpha_t(0.0).unwrap();
        for p in f.polar_chart().sample(40, 3).unwrap() {
            let d = a0
                .value(&p)
                .unwrap()
                .sub(&f.collar.alpha0.value(&p).unwrap())
                .unwrap()
                .max_abs_coeff();
            assert!(d <= 1e-15, "alpha_0 mismatch {d}");
        }
    }

    #[test]
    fn alpha_at_t1_is_limit_form() {
        // α₁ = f₁·ν + g₁·dθ + e·dr (h ≡ 1 on supp f₁).
        let f = family();
        let a1 = f.alpha_t(1.0).unwrap();
        let prof = &f.collar.profile;
        for p in f.polar_chart().sample(60, 4).unwrap() {
            let r = p[3];
            let v = a1.value(&p).unwrap();
            assert!(v.coeff(&[0]).unwrap().abs() <= 1e-15);
            assert!(v.coeff(&[1]).unwrap().abs() <= 1e-15);
            assert_relative_eq!(
                v.coeff(&[2]).unwrap(),
                prof.f1.value(r) * prof.h.value(r),
                max_relative = 1e-13,
                epsilon = 1e-15
            );
            assert_relative_eq!(
                v.coeff(&[3]).unwrap(),
                prof.e.value(r),
                max_relative = 1e-13,
                epsilon = 1e-15
            );
            assert_relative_eq!(
                v.coeff(&[4]).unwrap(),
                prof.g1.value(r),
                max_relative = 1e-13,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn alpha_at_t1_outer_plateau_is_exactly_dtheta() {
        let f = family();
        let a1 = f.alpha_t(1.0).unwrap();
        for r in [0.76, 0.85, 0.93, 1.0] {
            let p = vec![0.3, 1.2, 2.2, r, 0.7];
            let v = a1.value(&p).unwrap();
            assert_eq!(v.coeffs(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn term_decomposition_sums_to_alpha() {
        let f = family();
        for t in [0.0, 0.3, 0.77, 1.0] {
            let alpha = f.alpha_t(t).unwrap();
            let sum = f.term_decomposition(t).unwrap().sum().unwrap();
            for p in f.polar_chart().sample(25, 5).unwrap() {
                let d = alpha
                    .value(&p)
                    .unwrap()
                    .sub(&sum.value(&p).unwrap())
                    .unwrap()
                    .max_abs_coeff();
                assert!(d <= 1e-12);
            }
        }
    }

    #[test]
    fn dr_term_vanishes_at_t0_and_nu_term_on_inner_plateau() {
        let f = family();
        let d0 = f.term_decomposition(0.0).unwrap();
        let p = vec![0.5, 0.5, 0.5, 0.3, 0.5];
        assert_eq!(d0.term_dr.value(&p).unwrap().max_abs_coeff(), 0.0);
        // term_nu at r ≤ 0.25, t = 0.5 is 0.5·f_t(r)·ν (h ≡ 1 there).
        let d5 = f.term_decomposition(0.5).unwrap();
        let p = vec![1.0, 1.0, 1.0, 0.2, 1.0];
        let v = d5.term_nu.value(&p).unwrap();
        let ft = f.collar.ft_curve(0.5).value(0.2);
        assert_relative_eq!(v.coeff(&[2]).unwrap(), 0.5 * ft, max_relative = 1e-14);
        assert_eq!(v.coeff(&[0]).unwrap(), 0.0);
    }

    #[test]
    fn omega_at_t0_is_d_alpha0_exactly() {
        let f = family();
        let w0 = f.omega_t(0.0).unwrap();
        let da0 = f.collar.alpha0.exterior_derivative();
        for p in f.polar_chart().sample(30, 6).unwrap() {
            let d = w0
                .value(&p)
                .unwrap()
                .sub(&da0.value(&p).unwrap())
                .unwrap()
                .max_abs_coeff();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn omega_coefficients_at_half_radius_t1() {
        // ω₁ at r = 1/2: f₀dμ + f₀'dr∧μ + g₀'dr∧dθ + εΩ + ε·e(1/2)·dθ∧ν.
        let f = family();
        let eps = f.epsilon;
        let p = vec![0.9, 0.4, 1.7, 0.5, 2.0];
        let z = p[2];
        let w = f.omega_t(1.0).unwrap().value(&p).unwrap();
        let (f0, f0p, g0p, e_half) = (0.875, -0.5, 1.0, 1.0);
        // dμ = −sin z·dz∧dx − cos z·dz∧dy ⇒ coefficients on (x,z), (y,z).
        assert_relative_eq!(w.coeff(&[0, 2]).unwrap(), f0 * z.sin(), max_relative = 1e-12);
        assert_relative_eq!(w.coeff(&[1, 2]).unwrap(), f0 * z.cos(), max_relative = 1e-12);
        // f₀'·dr∧μ ⇒ on (x,r): −f₀'·cos z (dr∧dx = −dx∧dr).
        assert_relative_eq!(
            w.coeff(&[0, 3]).unwrap(),
            -f0p * z.cos(),
            max_relative = 1e-12
        );
        assert_relative_eq!(w.coeff(&[1, 3]).unwrap(), f0p * z.sin(), max_relative = 1e-12);
        // g₀'·dr∧dθ on (r,θ).
        assert_relative_eq!(w.coeff(&[3, 4]).unwrap(), g0p, max_relative = 1e-12);
        // ε·Ω on (x,y).
        assert_relative_eq!(w.coeff(&[0, 1]).unwrap(), eps, max_relative = 1e-12);
        // ε·e(1/2)·dθ∧ν = −ε·e·dz∧dθ on (z,θ).
        assert_relative_eq!(
            w.coeff(&[2, 4]).unwrap(),
            -eps * e_half,
            max_relative = 1e-12
        );
    }

    #[test]
    fn d_omega1_matches_closed_form() {
        // dω₁ = ε·e'(r)·dr∧dθ∧ν on the collar.
        let f = family();
        let w1 = f.omega_t(1.0).unwrap();
        let dw1 = w1.exterior_derivative();
        let prof = &f.collar.profile;
        for p in f.polar_chart().sample(40, 8).unwrap() {
            let r = p[3];
            let v = dw1.value(&p).unwrap();
            // dr∧dθ∧dz = +dz∧dr∧dθ ⇒ coefficient on (z,r,θ) is ε·e'(r).
            let expect = f.epsilon * prof.e.deriv(r);
            assert_relative_eq!(
                v.coeff(&[2, 3, 4]).unwrap(),
                expect,
                max_relative = 1e-6,
                epsilon = 1e-9
            );
            // Every other coefficient is noise from d(dα₀).
            for (rank, c) in v.coeffs().iter().enumerate() {
                if rank != crate::exterior::MultiIndex::new(vec![2, 3, 4]).unwrap().rank() {
                    assert!(c.abs() <= 1e-9, "stray dω₁ coefficient {c}");
                }
            }
        }
    }

    #[test]
    fn omega_is_affine_in_t() {
        let f = family();
        let (w0, w_half, w1) =
            (f.omega_t(0.0).unwrap(), f.omega_t(0.5).unwrap(), f.omega_t(1.0).unwrap());
        for p in f.polar_chart().sample(20, 9).unwrap() {
            let mid = w0.value(&p).unwrap().scale(0.5).add(&w1.value(&p).unwrap().scale(0.5)).unwrap();
            let d = w_half.value(&p).unwrap().sub(&mid).unwrap().max_abs_coeff();
            assert!(d <= 1e-12);
        }
    }

    #[test]
    fn alpha_coefficients_are_quadratic_in_t() {
        // Coefficients of α_t are degree ≤ 2 polynomials in t: quadratic
        // interpolation through t ∈ {0, 1/2, 1} reproduces t = 0.3.
        let f = family();
        let p = vec![0.7, 1.1, 0.23, 0.62, 3.0];
        let a = |t: f64| f.alpha_t(t).unwrap().value(&p).unwrap();
        let (v0, vh, v1) = (a(0.0), a(0.5), a(1.0));
        let t = 0.3;
        // Lagrange basis on {0, 1/2, 1}.
        let l0 = (t - 0.5) * (t - 1.0) / ((0.0 - 0.5) * (0.0 - 1.0));
        let lh = (t - 0.0) * (t - 1.0) / ((0.5 - 0.0) * (0.5 - 1.0));
        let l1 = (t - 0.0) * (t - 0.5) / ((1.0 - 0.0) * (1.0 - 0.5));
        let interp = v0.scale(l0).add(&vh.scale(lh)).unwrap().add(&v1.scale(l1)).unwrap();
        let d = a(t).sub(&interp).unwrap().max_abs_coeff();
        assert!(d <= 1e-12, "quadratic interpolation residual {d}");
    }

    #[test]
    fn cartesian_terms_match_polar_on_overlap() {
        let f = family();
        let pts = f.collar.sample_overlap(40, 10);
        for t in [0.0, 0.4, 1.0] {
            let polar = f.alpha_t(t).unwrap();
            let cart = f.alpha_t_cart(t).unwrap();
            let w = f.collar.overlap_residual(&polar, &cart, &pts).unwrap();
            assert!(w <= 1e-8, "alpha_t overlap residual {w} at t = {t}");
            let wp = f.omega_t(t).unwrap();
            let wc = f.omega_t_cart(t).unwrap();
            let w2 = f.collar.overlap_residual(&wp, &wc, &pts).unwrap();
            assert!(w2 <= 1e-6, "omega_t overlap residual {w2} at t = {t}");
        }
    }

    #[test]
    fn outer_family_interpolates_alpha_std_to_dtheta() {
        let m = milnor_model(0.05).unwrap();
        let a0 = outer_alpha_t(&m, 0.0).unwrap();
        let a1 = outer_alpha_t(&m, 1.0).unwrap();
        for p in m.chart.sample(20, 11).unwrap() {
            let d0 = a0
                .value(&p)
                .unwrap()
                .sub(&m.alpha_std.value(&p).unwrap())
                .unwrap()
                .max_abs_coeff();
            assert!(d0 <= 1e-15);
            let d1 = d1_residual(&a1, &m, &p);
            assert!(d1 <= 1e-15);
        }
    }

    fn d1_residual(a1: &DifferentialForm, m: &MilnorModel, p: &[f64]) -> f64 {
        a1.value(p)
            .unwrap()
            .sub(&m.dtheta.value(p).unwrap())
            .unwrap()
            .max_abs_coeff()
    }

    #[test]
    fn theta_t_reduces_to_theta0() {
        let m = product_model(0.1).unwrap();
        let t0 = theta_t_linear(&m.north, 0.0).unwrap();
        for p in m.north.chart.sample(20, 13).unwrap() {
            let d = t0
                .value(&p)
                .unwrap()
                .sub(&m.north.theta0.value(&p).unwrap())
                .unwrap()
                .max_abs_coeff();
            assert!(d <= 1e-15);
        }
        assert!(theta_t_linear(&m.north, -0.01).is_err());
    }
}
