//! Dormand–Prince 5(4) embedded Runge–Kutta pair for scalar autonomous ODEs.
//!
//! The right-hand side does not depend on the independent variable, so the
//! stage abscissae never enter the update.

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last stage row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// State of a Dormand–Prince integration of `y' = rhs(y)`.
///
/// The independent variable may run in either direction; `advance_to` clips
/// the last step so every requested target is hit exactly.
pub struct Dopri5<F> {
    rhs: F,
    ctl: StepControl,
    x: f64,
    y: f64,
    dy: f64,
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64) -> Result<f64>,
{
    pub fn new(mut rhs: F, x0: f64, y0: f64, ctl: StepControl) -> Result<Self> {
        let dy = rhs(y0)?;
        Ok(Dopri5 { rhs, ctl, x: x0, y: y0, dy, h: 0.0, accepted: 0, rejected: 0 })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    fn tolerance(&self, y: f64) -> f64 {
        self.ctl.rel_tol * y.abs() + self.ctl.abs_tol
    }

    fn initial_step(&self, span: f64) -> f64 {
        let sc = self.tolerance(self.y);
        let d0 = self.y.abs() / sc;
        let d1 = self.dy.abs() / sc;
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs()).min(self.ctl.max_step)
    }

    /// Integrates from the current position to `target`.
    pub fn advance_to(&mut self, target: f64) -> Result<f64> {
        let dir = if target >= self.x { 1.0 } else { -1.0 };
        if self.h == 0.0 {
            self.h = self.initial_step(target - self.x);
        }
        while (target - self.x) * dir > 0.0 {
            let remaining = (target - self.x).abs();
            let mut h = self.h.min(self.ctl.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let min_step = 1e-14 * self.x.abs().max(1.0);
            if h < min_step && !last {
                return Err(Error::Stiffness { xi: self.x, step: h });
            }
            let (y_new, dy_new, err) = self.trial(dir * h)?;
            let sc = self.tolerance(self.y.abs().max(y_new.abs()));
            let ratio = err / sc;
            if ratio <= 1.0 {
                self.x = if last { target } else { self.x + dir * h };
                self.y = y_new;
                self.dy = dy_new;
                self.accepted += 1;
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                // keep the controller's proposal when a clipped step was accepted
                self.h = if last { self.h.max(h * grow) } else { h * grow };
            } else {
                self.rejected += 1;
                self.h = h * (0.9 * ratio.powf(-0.2)).clamp(0.1, 1.0);
                if self.h < min_step {
                    return Err(Error::Stiffness { xi: self.x, step: self.h });
                }
            }
        }
        Ok(self.y)
    }

    fn trial(&mut self, h: f64) -> Result<(f64, f64, f64)> {
        let y = self.y;
        let k1 = self.dy;
        let k2 = (self.rhs)(y + h * A21 * k1)?;
        let k3 = (self.rhs)(y + h * (A31 * k1 + A32 * k2))?;
        let k4 = (self.rhs)(y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
        let k5 = (self.rhs)(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
        let k6 = (self.rhs)(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = (self.rhs)(y_new)?;
        let err = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        Ok((y_new, k7, err))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl(tol: f64) -> StepControl {
        StepControl { rel_tol: tol, abs_tol: tol, max_step: f64::INFINITY }
    }

    #[test]
    fn exponential_decay() {
        let mut s = Dopri5::new(|y| Ok(-y), 0.0, 1.0, ctl(1e-12)).unwrap();
        for &x in &[0.5, 1.0, 2.0, 5.0] {
            let y = s.advance_to(x).unwrap();
            assert!((y - (-x).exp()).abs() < 1e-11, "{x}");
        }
    }

    #[test]
    fn backward_logistic() {
        // y' = -y(1-y), y(0) = 1/2  =>  y = 1/(1+e^x)
        let mut s = Dopri5::new(|y| Ok(-y * (1.0 - y)), 0.0, 0.5, ctl(1e-11)).unwrap();
        let y = s.advance_to(-6.0).unwrap();
        assert!((y - 1.0 / (1.0 + (-6f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn fifth_order_convergence() {
        // fixed-ish steps via max_step: error ratio for halving should be near 2^5
        let err = |h: f64| {
            let c = StepControl { rel_tol: 1.0, abs_tol: 1.0, max_step: h };
            let mut s = Dopri5::new(|y| Ok(y * y.cos()), 0.0, 1.0, c).unwrap();
            s.advance_to(2.0).unwrap()
        };
        let reference = {
            let mut s = Dopri5::new(|y| Ok(y * y.cos()), 0.0, 1.0, ctl(1e-14)).unwrap();
            s.advance_to(2.0).unwrap()
        };
        let e1 = (err(0.2) - reference).abs();
        let e2 = (err(0.1) - reference).abs();
        let order = (e1 / e2).log2();
        assert!(order > 4.5, "observed order {order}");
    }

    #[test]
    fn rhs_error_propagates() {
        let mut s =
            Dopri5::new(|y: f64| if y < 0.5 { Err(Error::DegenerateProfile) } else { Ok(-1.0) }, 0.0, 1.0, ctl(1e-8))
                .unwrap();
        assert!(s.advance_to(2.0).is_err());
    }
}
