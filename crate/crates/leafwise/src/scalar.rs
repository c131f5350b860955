//! Forward-mode scalars.
//!
//! Coefficient formulas throughout the crate are written once, generically
//! over [`Scalar`], and evaluated either on plain `f64` (values) or on
//! [`Dual`] numbers (values plus exact first partials). This is what the
//! "analytic Jacobian" of a differential form means here: the same formula
//! run on duals, no symbolic differentiation and no truncation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A scalar type that supports the arithmetic used by coefficient formulas.
///
/// Implemented by `f64` and [`Dual`]. Branching inside a formula must use
/// [`Scalar::value`] so that plateaus of piecewise-smooth functions return
/// exact constants for every implementation.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;

    /// The underlying value (primal part).
    fn value(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn sin(self) -> Self {
        f64::sin(self)
    }

    fn cos(self) -> Self {
        f64::cos(self)
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// First-order dual number: value plus gradient with respect to a fixed
/// set of seed variables.
///
/// An empty gradient means "constant": binary operations broadcast it to
/// the other operand's length, so constants never allocate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    pub val: f64,
    pub grad: Vec<f64>,
}

impl Dual {
    pub fn constant(val: f64) -> Self {
        Dual { val, grad: Vec::new() }
    }

    /// The `i`-th of `n` seed variables.
    pub fn var(val: f64, i: usize, n: usize) -> Self {
        let mut grad = vec![0.0; n];
        grad[i] = 1.0;
        Dual { val, grad }
    }

    /// Seed a full point: one variable per coordinate.
    pub fn seed_point(x: &[f64]) -> Vec<Dual> {
        let n = x.len();
        x.iter().enumerate().map(|(i, &v)| Dual::var(v, i, n)).collect()
    }

    pub fn partial(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    /// Chain rule for a unary function with value `f` and derivative `df`
    /// at `self.val`.
    fn chain(mut self, f: f64, df: f64) -> Self {
        self.val = f;
        for g in &mut self.grad {
            *g *= df;
        }
        self
    }
}

fn zip_grads(a: Vec<f64>, b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    if b.is_empty() {
        return a.into_iter().map(|x| f(x, 0.0)).collect();
    }
    if a.is_empty() {
        return b.iter().map(|&y| f(0.0, y)).collect();
    }
    debug_assert_eq!(a.len(), b.len(), "dual gradient lengths differ");
    a.into_iter().zip(b.iter()).map(|(x, &y)| f(x, y)).collect()
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            val: self.val + rhs.val,
            grad: zip_grads(self.grad, &rhs.grad, |x, y| x + y),
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            val: self.val - rhs.val,
            grad: zip_grads(self.grad, &rhs.grad, |x, y| x - y),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let (a, b) = (self.val, rhs.val);
        Dual {
            val: a * b,
            grad: zip_grads(self.grad, &rhs.grad, |x, y| b * x + a * y),
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let (a, b) = (self.val, rhs.val);
        let inv_b2 = 1.0 / (b * b);
        Dual {
            val: a / b,
            grad: zip_grads(self.grad, &rhs.grad, |x, y| (b * x - a * y) * inv_b2),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(mut self) -> Dual {
        self.val = -self.val;
        for g in &mut self.grad {
            *g = -*g;
        }
        self
    }
}

impl Scalar for Dual {
    fn constant(c: f64) -> Self {
        Dual::constant(c)
    }

    fn value(&self) -> f64 {
        self.val
    }

    fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c)
    }

    fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s)
    }

    fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e)
    }

    fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r)
    }
}

/// A smooth scalar function of one variable, evaluable on plain values
/// and on duals. Implementors write one generic formula; the
/// [`impl_curve!`](crate::impl_curve) macro generates the delegation.
pub trait Curve: Send + Sync + std::fmt::Debug {
    fn eval_f64(&self, x: f64) -> f64;
    fn eval_dual(&self, x: Dual) -> Dual;

    fn value(&self, x: f64) -> f64 {
        self.eval_f64(x)
    }

    /// First derivative, exact via the dual path.
    fn deriv(&self, x: f64) -> f64 {
        self.eval_dual(Dual::var(x, 0, 1)).partial(0)
    }
}

/// Implements [`Curve`] for a type with a
/// `fn eval_generic<S: Scalar>(&self, x: S) -> S` method.
#[macro_export]
macro_rules! impl_curve {
    ($ty:ty) => {
        impl $crate::scalar::Curve for $ty {
            fn eval_f64(&self, x: f64) -> f64 {
                self.eval_generic(x)
            }
            fn eval_dual(&self, x: $crate::scalar::Dual) -> $crate::scalar::Dual {
                self.eval_generic(x)
            }
        }
    };
}

/// The constant function.
#[derive(Debug, Clone)]
pub struct ConstCurve(pub f64);

impl ConstCurve {
    fn eval_generic<S: Scalar>(&self, _x: S) -> S {
        S::constant(self.0)
    }
}
impl_curve!(ConstCurve);

/// `a·f + b·g` for two curves; used for the interpolants
/// `f_t = (1−t)f₀ + t f₁`.
pub struct CurveLinComb {
    pub a: f64,
    pub f: std::sync::Arc<dyn Curve>,
    pub b: f64,
    pub g: std::sync::Arc<dyn Curve>,
}

impl std::fmt::Debug for CurveLinComb {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "CurveLinComb({}·f + {}·g)", self.a, self.b)
    }
}

impl Curve for CurveLinComb {
    fn eval_f64(&self, x: f64) -> f64 {
        self.a * self.f.eval_f64(x) + self.b * self.g.eval_f64(x)
    }
    fn eval_dual(&self, x: Dual) -> Dual {
        self.f.eval_dual(x.clone()) * Dual::constant(self.a)
            + self.g.eval_dual(x) * Dual::constant(self.b)
    }
}

/// Pointwise product `f·g`; used for `f_t(r)·h(r)`.
pub struct CurveProduct {
    pub f: std::sync::Arc<dyn Curve>,
    pub g: std::sync::Arc<dyn Curve>,
}

impl std::fmt::Debug for CurveProduct {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "CurveProduct")
    }
}

impl Curve for CurveProduct {
    fn eval_f64(&self, x: f64) -> f64 {
        self.f.eval_f64(x) * self.g.eval_f64(x)
    }
    fn eval_dual(&self, x: Dual) -> Dual {
        self.f.eval_dual(x.clone()) * self.g.eval_dual(x)
    }
}
