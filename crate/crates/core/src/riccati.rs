//! Residuals and transforms linking the Schrödinger equation `(−Δ+ν)u = 0`,
//! the Riccati equation `∂_z̄Q + |Q|² = ν/4` and the main Vekua equation
//! `W_z̄ = (f_z̄/f)·W̄`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ComplexField, DomainSpec, ScalarField, NONVANISHING_EPS};
use crate::quadrature::{op_a, op_abar, AntiderivativeConfig};

/// Sample margin (in grid cells) used when reducing residuals of grid-backed
/// quantities: boundary one-sided stencils are excluded.
pub const GRID_MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max residual for a field to count as a solution.
    pub solution: f64,
    pub nonvanishing: f64,
    /// Upper bound on sampled moduli of "bounded" inputs.
    pub bound: f64,
    /// Grid inputs get `solution + grid_coeff * h² * scale` instead of
    /// `solution`, since finite differences cannot do better than O(h²).
    pub grid_coeff: f64,
    /// When false, hypotheses are measured but not enforced. Used for
    /// negative controls.
    pub check_hypotheses: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            solution: 1e-6,
            nonvanishing: NONVANISHING_EPS,
            bound: 1e6,
            grid_coeff: 50.0,
            check_hypotheses: true,
        }
    }
}

impl Tolerances {
    /// Solution-hood tolerance adapted to the backend of `q`.
    pub fn solution_for(&self, h2: Option<f64>, scale: f64) -> f64 {
        match h2 {
            None => self.solution,
            Some(h2) => self.solution + self.grid_coeff * h2 * scale.max(1.0),
        }
    }
}

pub(crate) fn margin(grid: bool) -> usize {
    if grid {
        GRID_MARGIN
    } else {
        0
    }
}

/// The potential `ν` together with antiderivative settings.
#[derive(Clone, Debug)]
pub struct RiccatiProblem {
    pub nu: ScalarField,
    pub cfg: AntiderivativeConfig,
    pub tol: Tolerances,
}

impl RiccatiProblem {
    pub fn new(nu: ScalarField) -> Result<Self> {
        let max = nu.max_abs(0)?;
        if !max.is_finite() {
            return Err(Error::Parameter(
                "potential is not finite on the domain".into(),
            ));
        }
        let cfg = AntiderivativeConfig::new(nu.domain());
        Ok(RiccatiProblem {
            nu,
            cfg,
            tol: Tolerances::default(),
        })
    }

    pub fn constant(nu: f64, domain: &DomainSpec) -> Result<Self> {
        Self::new(ScalarField::constant(nu, domain))
    }

    pub fn domain(&self) -> &DomainSpec {
        self.nu.domain()
    }

    pub fn with_cfg(mut self, cfg: AntiderivativeConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// `∂_z̄Q + |Q|² − ν/4`.
    pub fn riccati_residual(&self, q: &ComplexField) -> Result<ComplexField> {
        let quarter_nu = ComplexField::from_real(self.nu.scale(0.25));
        q.d_zbar()?
            .add(&ComplexField::from_real(q.modulus_sq()?))?
            .sub(&quarter_nu)
    }

    /// Max modulus of the Riccati residual over the sample lattice.
    pub fn riccati_residual_max(&self, q: &ComplexField) -> Result<f64> {
        self.riccati_residual(q)?.max_modulus(margin(q.is_grid()))
    }

    /// `(−Δ + ν)u`.
    pub fn schrodinger_residual(&self, u: &ScalarField) -> Result<ScalarField> {
        self.nu.mul(u)?.sub(&u.laplacian())
    }

    pub fn schrodinger_residual_max(&self, u: &ScalarField) -> Result<f64> {
        self.schrodinger_residual(u)?.max_abs(margin(u.is_grid()))
    }

    /// Fails with [`Error::NotASolution`] when `q` misses the Riccati equation.
    pub fn require_riccati(&self, q: &ComplexField, what: &str) -> Result<f64> {
        let residual = self.riccati_residual_max(q)?;
        let scale = q.max_modulus(0)?.powi(2);
        let tolerance = self.tol.solution_for(q.grid_h2(), scale);
        if self.tol.check_hypotheses && !(residual < tolerance) {
            return Err(Error::NotASolution {
                what: what.into(),
                residual,
                tolerance,
            });
        }
        Ok(residual)
    }

    pub fn require_schrodinger(&self, u: &ScalarField, what: &str) -> Result<f64> {
        let residual = self.schrodinger_residual_max(u)?;
        let scale = u.max_abs(0)?;
        let tolerance = self.tol.solution_for(u.grid_h2(), scale) * scale.max(1.0);
        if self.tol.check_hypotheses && !(residual < tolerance) {
            return Err(Error::NotASolution {
                what: what.into(),
                residual,
                tolerance,
            });
        }
        Ok(residual)
    }

    fn require_nonvanishing(&self, f: &ScalarField) -> Result<()> {
        let (at, value) = f.min_abs(0)?;
        if value.is_nan() || value <= self.tol.nonvanishing {
            return Err(Error::Vanishing { at, value });
        }
        Ok(())
    }

    /// `Q = u_z / u`.
    pub fn log_derivative(&self, u: &ScalarField) -> Result<ComplexField> {
        self.require_nonvanishing(u)?;
        u.wirtinger().d_z.div_real(u)
    }

    /// `u = e^{A[Q]}`; `u(x0, y0) = e^c`.
    pub fn exp_reconstruct(&self, q: &ComplexField) -> Result<ScalarField> {
        Ok(op_a(q, &self.cfg)?.exp())
    }

    /// The three sides of the factorization
    /// `¼(Δ−ν)φ = (∂_z̄ + QC)(∂_z − QC)φ = (∂_z + Q̄C)(∂_z̄ − Q̄C)φ`.
    pub fn factorization_apply(
        &self,
        q: &ComplexField,
        phi: &ScalarField,
    ) -> Result<Factorization> {
        let lhs = ComplexField::from_real(phi.laplacian().sub(&self.nu.mul(phi)?)?.scale(0.25));
        let w = phi.wirtinger();
        let phi_c = ComplexField::from_real(phi.clone());
        // Cφ = φ for real φ
        let psi = w.d_z.sub(&q.mul(&phi_c)?)?;
        let rhs1 = psi.d_zbar()?.add(&q.mul(&psi.conj())?)?;
        let qb = q.conj();
        let chi = w.d_zbar.sub(&qb.mul(&phi_c)?)?;
        let rhs2 = chi.d_z()?.add(&qb.mul(&chi.conj())?)?;
        Ok(Factorization { lhs, rhs1, rhs2 })
    }

    /// `W_z̄ − (f_z̄/f)·W̄`.
    pub fn vekua_residual(&self, w: &ComplexField, f: &ScalarField) -> Result<ComplexField> {
        self.require_nonvanishing(f)?;
        let coeff = f.wirtinger().d_zbar.div_real(f)?;
        w.d_zbar()?.sub(&coeff.mul(&w.conj())?)
    }

    /// `v = f⁻¹ Ā(i f² ∂_z̄(f⁻¹u))`.
    pub fn darboux_v_from_u(&self, u: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
        self.require_nonvanishing(f)?;
        let arg = ComplexField::from_real(u.div(f)?)
            .d_zbar()?
            .mul_real(&f.square())?
            .mul_i();
        op_abar(&arg, &self.cfg)?.div(f)
    }

    /// `u = −f Ā(i f⁻² ∂_z̄(f v))`.
    pub fn darboux_u_from_v(&self, v: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
        self.require_nonvanishing(f)?;
        let arg = ComplexField::from_real(f.mul(v)?)
            .d_zbar()?
            .div_real(&f.square())?
            .mul_i();
        Ok(op_abar(&arg, &self.cfg)?.mul(f)?.neg())
    }

    /// `η = 2(|∇f|/f)² − ν`.
    pub fn darboux_potential_eta(&self, f: &ScalarField) -> Result<ScalarField> {
        self.require_nonvanishing(f)?;
        f.gradient_norm_ratio()?.scale(2.0).sub(&self.nu)
    }

    /// `W = e^{A[Q]} + i e^{−A[Q0]} Ā[i e^{2A[Q0]} ∂_z̄ e^{A[Q−Q0]}]`.
    pub fn euler_first_w_from_q(
        &self,
        q: &ComplexField,
        q0: &ComplexField,
    ) -> Result<ComplexField> {
        self.require_riccati(q, "Q")?;
        self.require_riccati(q0, "Q0")?;
        let bound = q0.max_modulus(0)?;
        if self.tol.check_hypotheses && !(bound <= self.tol.bound) {
            return Err(Error::Unbounded {
                what: "Q0".into(),
                value: bound,
            });
        }
        let a_q = op_a(q, &self.cfg)?;
        let a_q0 = op_a(q0, &self.cfg.clone().with_constant(0.0))?;
        let a_diff = op_a(&q.sub(q0)?, &self.cfg.clone().with_constant(0.0))?;
        let inner = ComplexField::from_real(a_diff.exp())
            .d_zbar()?
            .mul_real(&a_q0.scale(2.0).exp())?
            .mul_i();
        let im = op_abar(&inner, &self.cfg)?.mul(&a_q0.neg().exp())?;
        ComplexField::new(a_q.exp(), im)
    }

    /// `Q = ∂_z Re W / Re W`.
    pub fn euler_first_q_from_w(&self, w: &ComplexField) -> Result<ComplexField> {
        self.log_derivative(w.re())
    }
}

/// Output of [`RiccatiProblem::factorization_apply`].
#[derive(Clone, Debug)]
pub struct Factorization {
    pub lhs: ComplexField,
    pub rhs1: ComplexField,
    pub rhs2: ComplexField,
}

impl Factorization {
    /// `(max|lhs − rhs1|, max|lhs − rhs2|)`.
    pub fn gaps(&self) -> Result<(f64, f64)> {
        let m = margin(self.lhs.is_grid() || self.rhs1.is_grid());
        Ok((
            self.lhs.sub(&self.rhs1)?.max_modulus(m)?,
            self.lhs.sub(&self.rhs2)?.max_modulus(m)?,
        ))
    }
}

/// A solution `f` of the Schrödinger equation with a pair `(u, v)` such that
/// `W = u + iv` solves the main Vekua equation.
#[derive(Clone, Debug)]
pub struct ConjugatePair {
    pub u: ScalarField,
    pub v: ScalarField,
    pub f: ScalarField,
}

impl ConjugatePair {
    /// Completes `u` to a pair via the Darboux transform.
    pub fn from_u(u: ScalarField, f: ScalarField, prob: &RiccatiProblem) -> Result<Self> {
        let v = prob.darboux_v_from_u(&u, &f)?;
        Ok(ConjugatePair { u, v, f })
    }

    pub fn w(&self) -> Result<ComplexField> {
        ComplexField::new(self.u.clone(), self.v.clone())
    }

    pub fn vekua_residual_max(&self, prob: &RiccatiProblem) -> Result<f64> {
        let w = self.w()?;
        prob.vekua_residual(&w, &self.f)?
            .max_modulus(margin(w.is_grid()))
    }
}

#[cfg(test)]
mod tests;
