//! Third-order forward-mode derivatives.
//!
//! A [`Jet`] carries a value together with its first three derivatives with
//! respect to one scalar input. Arithmetic follows the Leibniz and Faà di
//! Bruno rules truncated at order three, so evaluating a formula on
//! `Jet::variable(t)` yields `g(t), g'(t), g''(t), g'''(t)` in one pass.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    pub const fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0, d3: 0.0 }
    }

    pub fn derivative(&self, order: u8) -> f64 {
        match order {
            0 => self.v,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    /// Chain rule for `phi(self)` given `phi` and its derivatives at `self.v`.
    fn compose(self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        Jet { v: f0, d1: f1 * a1, d2: f2 * a1 * a1 + f1 * a2, d3: f3 * a1 * a1 * a1 + 3.0 * f2 * a1 * a2 + f1 * a3 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e, e)
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        let r = 1.0 / x;
        self.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }

    /// `self^n` for real `n`. Terms whose falling-factorial coefficient is zero
    /// are dropped, so integer powers stay finite at zero.
    pub fn powf(self, n: f64) -> Self {
        let x = self.v;
        let term = |coef: f64, k: f64| if coef == 0.0 { 0.0 } else { coef * x.powf(n - k) };
        self.compose(x.powf(n), term(n, 1.0), term(n * (n - 1.0), 2.0), term(n * (n - 1.0) * (n - 2.0), 3.0))
    }

    /// `|self|`, differentiated from the right at zero.
    pub fn abs(self) -> Self {
        let s = if self.v < 0.0 { -1.0 } else { 1.0 };
        self.compose(self.v.abs(), s, 0.0, 0.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d3: self.d3 + o.d3 }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet { v: self.v * c, d1: self.d1 * c, d2: self.d2 * c, d3: self.d3 * c }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, j: Jet) -> Jet {
        j.recip() * self
    }
}
