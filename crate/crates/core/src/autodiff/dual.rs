use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Forward-mode dual number: carries one directional derivative alongside
/// the primal value. Nest (`Dual<Dual<f64>>`) for second-order input
/// derivatives; every [`Scalar`] primitive obeys the chain rule exactly.
#[derive(Debug, Clone, Copy)]
pub struct Dual<S> {
    pub primal: S,
    pub tangent: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(primal: S, tangent: S) -> Self {
        Dual { primal, tangent }
    }

    /// Lift a value with zero tangent.
    pub fn constant(primal: S) -> Self {
        Dual {
            primal,
            tangent: S::zero(),
        }
    }

    /// The seeded variable: tangent one.
    pub fn variable(primal: S) -> Self {
        Dual {
            primal,
            tangent: S::one(),
        }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.primal + rhs.primal, self.tangent + rhs.tangent)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.primal - rhs.primal, self.tangent - rhs.tangent)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual::new(
            self.primal * rhs.primal,
            self.primal * rhs.tangent + self.tangent * rhs.primal,
        )
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = S::one() / rhs.primal;
        Dual::new(
            self.primal * inv,
            (self.tangent - self.primal * inv * rhs.tangent) * inv,
        )
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.primal, -self.tangent)
    }
}

/// Comparison is by primal part only, the usual convention for branches in
/// differentiated code.
impl<S: Scalar> PartialEq for Dual<S> {
    fn eq(&self, other: &Self) -> bool {
        self.primal == other.primal
    }
}

impl<S: Scalar> PartialOrd for Dual<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.primal.partial_cmp(&other.primal)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
    fn from_f64(x: f64) -> Self {
        Dual::constant(S::from_f64(x))
    }
    fn value(self) -> f64 {
        self.primal.value()
    }
    fn sin(self) -> Self {
        Dual::new(self.primal.sin(), self.tangent * self.primal.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.primal.cos(), -(self.tangent * self.primal.sin()))
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.primal.sin_cos();
        (
            Dual::new(s, self.tangent * c),
            Dual::new(c, -(self.tangent * s)),
        )
    }
    fn tanh(self) -> Self {
        let t = self.primal.tanh();
        Dual::new(t, self.tangent * (S::one() - t * t))
    }
    fn exp(self) -> Self {
        let e = self.primal.exp();
        Dual::new(e, self.tangent * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.primal.ln(), self.tangent / self.primal)
    }
    fn sqrt(self) -> Self {
        let r = self.primal.sqrt();
        Dual::new(r, self.tangent / (S::from_f64(2.0) * r))
    }
    fn abs(self) -> Self {
        if self.primal < S::zero() {
            -self
        } else {
            self
        }
    }
    fn powi(self, n: i32) -> Self {
        Dual::new(
            self.primal.powi(n),
            self.tangent * S::from_f64(n as f64) * self.primal.powi(n - 1),
        )
    }
    fn is_finite(self) -> bool {
        self.primal.is_finite() && self.tangent.is_finite()
    }
}
