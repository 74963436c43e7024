use num_complex::Complex64;

use super::{Expr, Var};
use crate::error::Result;

/// Complex-valued expression stored as a pair of real trees.
#[derive(Clone, Debug)]
pub struct CExpr {
    pub re: Expr,
    pub im: Expr,
}

impl CExpr {
    pub fn new(re: Expr, im: Expr) -> Self {
        CExpr { re, im }
    }

    pub fn real(re: Expr) -> Self {
        CExpr::new(re, Expr::zero())
    }

    pub fn constant(c: Complex64) -> Self {
        CExpr::new(Expr::constant(c.re), Expr::constant(c.im))
    }

    pub fn i() -> Self {
        CExpr::new(Expr::zero(), Expr::one())
    }

    /// `z = x + iy`
    pub fn z() -> Self {
        CExpr::new(Expr::x(), Expr::y())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &CExpr) -> CExpr {
        CExpr::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &CExpr) -> CExpr {
        CExpr::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> CExpr {
        CExpr::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> CExpr {
        CExpr::new(self.re.clone(), self.im.neg())
    }

    pub fn re_part(&self) -> CExpr {
        CExpr::real(self.re.clone())
    }

    pub fn im_part(&self) -> CExpr {
        CExpr::real(self.im.clone())
    }

    pub fn mul(&self, o: &CExpr) -> CExpr {
        if self.is_real() && o.is_real() {
            return CExpr::real(self.re.mul(&o.re));
        }
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        CExpr::new(re, im)
    }

    pub fn div(&self, o: &CExpr) -> CExpr {
        if o.is_real() {
            return CExpr::new(self.re.div(&o.re), self.im.div(&o.re));
        }
        let den = o.re.square().add(&o.im.square());
        let re = self.re.mul(&o.re).add(&self.im.mul(&o.im)).div(&den);
        let im = self.im.mul(&o.re).sub(&self.re.mul(&o.im)).div(&den);
        CExpr::new(re, im)
    }

    pub fn powi(&self, n: i32) -> CExpr {
        if self.is_real() {
            return CExpr::real(self.re.powi(n));
        }
        if n < 0 {
            return CExpr::constant(Complex64::new(1.0, 0.0)).div(&self.powi(-n));
        }
        let mut acc = CExpr::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn exp(&self) -> CExpr {
        let mag = self.re.exp();
        if self.is_real() {
            return CExpr::real(mag);
        }
        CExpr::new(mag.mul(&self.im.cos()), mag.mul(&self.im.sin()))
    }

    pub fn sin(&self) -> CExpr {
        if self.is_real() {
            return CExpr::real(self.re.sin());
        }
        CExpr::new(
            self.re.sin().mul(&self.im.cosh()),
            self.re.cos().mul(&self.im.sinh()),
        )
    }

    pub fn cos(&self) -> CExpr {
        if self.is_real() {
            return CExpr::real(self.re.cos());
        }
        CExpr::new(
            self.re.cos().mul(&self.im.cosh()),
            self.re.sin().mul(&self.im.sinh()).neg(),
        )
    }

    pub fn cosh(&self) -> CExpr {
        self.exp().add(&self.neg().exp()).scale(0.5)
    }

    pub fn sinh(&self) -> CExpr {
        self.exp().sub(&self.neg().exp()).scale(0.5)
    }

    pub fn scale(&self, c: f64) -> CExpr {
        CExpr::new(self.re.scale(c), self.im.scale(c))
    }

    pub fn diff(&self, var: Var) -> CExpr {
        CExpr::new(self.re.diff(var), self.im.diff(var))
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.re.eval(x, y)?, self.im.eval(x, y)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arithmetic_matches_num_complex() {
        let z = CExpr::z();
        let w = z
            .powi(3)
            .add(&CExpr::i().mul(&z))
            .div(&z.sub(&CExpr::constant(Complex64::new(2.0, 1.0))));
        let e = z.exp().mul(&z.sin()).add(&z.cos().mul(&z.cosh()));
        for &(x, y) in &[(0.3, 0.7), (-1.1, 0.2)] {
            let zz = Complex64::new(x, y);
            let want_w = (zz.powi(3) + Complex64::i() * zz) / (zz - Complex64::new(2.0, 1.0));
            let want_e = zz.exp() * zz.sin() + zz.cos() * zz.cosh();
            assert!((w.eval(x, y).unwrap() - want_w).norm() < 1e-13);
            assert!((e.eval(x, y).unwrap() - want_e).norm() < 1e-13);
        }
    }

    #[test]
    fn negative_power_inverts() {
        let w = CExpr::z().powi(-2);
        let zz = Complex64::new(0.4, -1.3);
        assert!((w.eval(zz.re, zz.im).unwrap() - zz.powi(-2)).norm() < 1e-14);
    }

    #[test]
    fn real_inputs_stay_real() {
        let e = CExpr::real(Expr::x()).mul(&CExpr::real(Expr::y())).exp();
        assert!(e.is_real());
    }
}
