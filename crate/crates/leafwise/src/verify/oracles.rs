//! Closed-form oracles, independent of the generic form pipeline.
//!
//! Every oracle here is assembled from hand-written pointwise values and
//! profile curves only — no exterior-derivative engine, no form
//! expression trees — so that agreement with the generic pipeline checks
//! two genuinely different code paths.
//!
//! The term expansions follow the collar calculation
//!
//! ```text
//! (1−t)f_t·μ∧ω_tⁿ   = n(1−t)f_t g₀′ · μ∧dr∧dθ∧{f₀dμ + tεΩ}^{n−1}
//! t·f_t h·ν∧ω_tⁿ    = n t f_t h g₀′ · ν∧dr∧dθ∧{f₀dμ + tεΩ}^{n−1}
//! g_t·dθ∧ω_tⁿ       = n g_t f₀′     · dθ∧dr∧μ∧{f₀dμ + tεΩ}^{n−1}
//! t·e·dr∧ω_tⁿ       = n t²ε e²      · dr∧dθ∧ν∧{f₀dμ + tεΩ}^{n−1}
//! ```
//!
//! and the contact expansion
//!
//! ```text
//! α_t∧(dα_t)ⁿ = n(1−t)ⁿ f_t^{n−1} (g_t′f_t − f_t′g_t)/r
//!                 · μ∧(dμ)^{n−1}∧(r dr∧dθ).
//! ```
//!
//! (The bracketed powers keep every factor the wedge kernel actually
//! produces; dropping the `(1−t)f_t dμ` term of `dα_t` or the ε in the
//! dr-term, as a quick reading of the source calculation might, changes
//! the values without changing their signs.)

use crate::error::Result;
use crate::exterior::FormValue;
use crate::models::CollarModel;
use crate::profiles::TransitionProfile;

/// Pointwise value of μ = cos z·dx − sin z·dy on the 5-dim collar chart.
pub fn mu_value(z: f64) -> FormValue {
    FormValue::new(5, 1, vec![z.cos(), -z.sin(), 0.0, 0.0, 0.0]).expect("mu value")
}

/// Pointwise value of dμ = −sin z·dz∧dx − cos z·dz∧dy.
pub fn dmu_value(z: f64) -> FormValue {
    let zx = FormValue::basis(5, &[2, 0]).expect("dz∧dx");
    let zy = FormValue::basis(5, &[2, 1]).expect("dz∧dy");
    zx.scale(-z.sin()).add(&zy.scale(-z.cos())).expect("dmu value")
}

pub fn nu_value() -> FormValue {
    FormValue::basis(5, &[2]).expect("nu value")
}

pub fn dr_value() -> FormValue {
    FormValue::basis(5, &[3]).expect("dr value")
}

pub fn dtheta_value() -> FormValue {
    FormValue::basis(5, &[4]).expect("dtheta value")
}

pub fn omega_binding_value() -> FormValue {
    FormValue::basis(5, &[0, 1]).expect("Omega value")
}

/// `{f₀(r)·dμ + tε·Ω}^{n−1}` at a collar point.
fn braces_power(profile: &TransitionProfile, epsilon: f64, n: usize, t: f64, z: f64, r: f64) -> Result<FormValue> {
    let braces = dmu_value(z)
        .scale(profile.f0.value(r))
        .add(&omega_binding_value().scale(t * epsilon))?;
    let mut acc = FormValue::scalar(5, 1.0);
    for _ in 0..n - 1 {
        acc = acc.wedge(&braces)?;
    }
    Ok(acc)
}

/// The collar orientation volume at radius r (coefficient of the
/// orientation form μ∧(dμ)^{n−1}∧(r dr∧dθ) = r·dx∧dy∧dz∧dr∧dθ).
fn orientation_coeff(r: f64) -> f64 {
    r
}

/// Closed-form value of (term k)∧ω_tⁿ at a polar collar point,
/// normalized by the orientation volume. Terms are indexed 0..4 in the
/// order μ, ν, dθ, dr.
pub fn lemma_term_value(
    collar: &CollarModel,
    epsilon: f64,
    term: usize,
    t: f64,
    point: &[f64],
) -> Result<f64> {
    let profile = &collar.profile;
    let n = collar.binding.n as f64;
    let (z, r) = (point[2], point[3]);
    let braces = braces_power(profile, epsilon, collar.binding.n, t, z, r)?;
    let ft = profile.f_t(t).value(r);
    let gt = profile.g_t(t).value(r);
    let (prefactor, base) = match term {
        0 => (
            n * (1.0 - t) * ft * profile.g0.deriv(r),
            mu_value(z).wedge(&dr_value())?.wedge(&dtheta_value())?,
        ),
        1 => (
            n * t * ft * profile.h.value(r) * profile.g0.deriv(r),
            nu_value().wedge(&dr_value())?.wedge(&dtheta_value())?,
        ),
        2 => (
            n * gt * profile.f0.deriv(r),
            dtheta_value().wedge(&dr_value())?.wedge(&mu_value(z))?,
        ),
        3 => (
            n * t * t * epsilon * profile.e.value(r).powi(2),
            dr_value().wedge(&dtheta_value())?.wedge(&nu_value())?,
        ),
        _ => return Err(crate::error::Error::contract(format!("term index {term} out of range"))),
    };
    let top = base.wedge(&braces)?;
    Ok(prefactor * top.coeffs()[0] / orientation_coeff(r))
}

/// Closed-form contact scalar: α_t∧(dα_t)ⁿ normalized by the orientation
/// volume, i.e. `n(1−t)ⁿ f_t^{n−1} (g_t′f_t − f_t′g_t)/r`.
pub fn contact_scalar(profile: &TransitionProfile, n: usize, t: f64, r: f64) -> f64 {
    let ft = profile.f_t(t);
    let gt = profile.g_t(t);
    let wr = crate::profiles::wronskian_over_r(ft.as_ref(), gt.as_ref(), r);
    n as f64 * (1.0 - t).powi(n as i32) * ft.value(r).powi(n as i32 - 1) * wr
}

/// Closed-form dω₁ = ε·e′(r)·dr∧dθ∧ν as a pointwise value.
pub fn domega1_value(profile: &TransitionProfile, epsilon: f64, r: f64) -> Result<FormValue> {
    let base = dr_value().wedge(&dtheta_value())?.wedge(&nu_value())?;
    Ok(base.scale(epsilon * profile.e.deriv(r)))
}

/// Brute-force alternation-sum evaluation of a wedge product:
/// `(a∧b)(v₁..v_{k+l}) = (1/(k!l!)) Σ_σ sign(σ) a(v_σ…) b(v_σ…)`.
pub fn alternation_wedge_eval(
    a: &FormValue,
    b: &FormValue,
    vectors: &[Vec<f64>],
) -> Result<f64> {
    let k = a.degree();
    let l = b.degree();
    assert_eq!(vectors.len(), k + l);
    let mut total = 0.0;
    let mut index: Vec<usize> = (0..k + l).collect();
    permute_with_sign(&mut index, 0, 1.0, &mut |perm, sign| -> Result<()> {
        let first: Vec<Vec<f64>> = perm[..k].iter().map(|&i| vectors[i].clone()).collect();
        let rest: Vec<Vec<f64>> = perm[k..].iter().map(|&i| vectors[i].clone()).collect();
        total += sign * a.evaluate(&first)? * b.evaluate(&rest)?;
        Ok(())
    })?;
    let norm = (factorial(k) * factorial(l)) as f64;
    Ok(total / norm)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

fn permute_with_sign<F>(items: &mut Vec<usize>, start: usize, sign: f64, f: &mut F) -> Result<()>
where
    F: FnMut(&[usize], f64) -> Result<()>,
{
    if start == items.len() {
        return f(items, sign);
    }
    for i in start..items.len() {
        let flip = if i == start { 1.0 } else { -1.0 };
        items.swap(start, i);
        permute_with_sign(items, start + 1, sign * flip, f)?;
        items.swap(start, i);
    }
    Ok(())
}
