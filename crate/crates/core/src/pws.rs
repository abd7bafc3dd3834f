//! Piecewise-smooth two-fold normal form on the switching manifold `y = 0`.
//!
//! The vector fields are the leading-order truncation of the normal form:
//!
//! ```text
//! X+ = (c/|β|, a·y + |b|·z, sign b)        for y > 0
//! X- = (sign β, α·y - |β|·x, γ/|b|)         for y < 0
//! ```
//!
//! Higher-order terms can be supplied through [`PiecewiseSystem`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldValue {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl FieldValue {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self { dx, dy, dz }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.dz.is_finite()
    }
}

/// Coefficients `(a, α, b, β, c, γ)` of the two-fold normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoFoldNormalForm {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub c: f64,
    pub gamma: f64,
}

impl TwoFoldNormalForm {
    /// Normal form with `a = α = 0`.
    pub fn new(b: f64, beta: f64, c: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            a: 0.0,
            alpha: 0.0,
            b,
            beta,
            c,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    /// Build from the sums `c - γ` and `c + γ`.
    pub fn from_sums(b: f64, beta: f64, c_minus_gamma: f64, c_plus_gamma: f64) -> Result<Self> {
        Self::new(
            b,
            beta,
            0.5 * (c_plus_gamma + c_minus_gamma),
            0.5 * (c_plus_gamma - c_minus_gamma),
        )
    }

    /// Choose `c + γ` so that the eigenvalue ratio `λ-/λ+` equals `xi`.
    ///
    /// With `b = 1, β = -1, c - γ = 5/2` this is the family
    /// `c + γ = 3(ξ+1)/(2(ξ-1))`.
    pub fn with_eigen_ratio(b: f64, beta: f64, c_minus_gamma: f64, xi: f64) -> Result<Self> {
        if !(xi > 1.0) || !xi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue ratio must exceed 1, got {xi}"
            )));
        }
        let disc = c_minus_gamma * c_minus_gamma + 4.0 * b * beta;
        if !(disc > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue ratio needs a positive discriminant, got {disc}"
            )));
        }
        let c_plus_gamma = disc.sqrt() * (xi + 1.0) / (xi - 1.0);
        Self::from_sums(b, beta, c_minus_gamma, c_plus_gamma)
    }

    pub fn with_offsets(mut self, a: f64, alpha: f64) -> Self {
        self.a = a;
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.alpha, self.b, self.beta, self.c, self.gamma];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        if self.b == 0.0 {
            return Err(Error::InvalidParameter("b must be nonzero".into()));
        }
        if self.beta == 0.0 {
            return Err(Error::InvalidParameter("beta must be nonzero".into()));
        }
        if self.c + self.gamma < 0.0 || self.c - self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need c + gamma >= 0 and c - gamma >= 0 (c = {}, gamma = {})",
                self.c, self.gamma
            )));
        }
        Ok(())
    }

    pub fn sign_b(&self) -> f64 {
        self.b.signum()
    }

    pub fn sign_beta(&self) -> f64 {
        self.beta.signum()
    }

    pub fn abs_b(&self) -> f64 {
        self.b.abs()
    }

    pub fn abs_beta(&self) -> f64 {
        self.beta.abs()
    }

    pub fn discriminant(&self) -> f64 {
        let d = self.c - self.gamma;
        d * d + 4.0 * self.b * self.beta
    }

    /// Matrix of the desingularized sliding field.
    pub fn sliding_matrix(&self) -> [[f64; 2]; 2] {
        [
            [-self.c, -self.abs_b() * self.sign_beta()],
            [-self.abs_beta() * self.sign_b(), -self.gamma],
        ]
    }
}

/// Anything that supplies the two smooth fields `X+` and `X-`.
pub trait SwitchedField {
    fn side_field(&self, point: [f64; 3], side: Side) -> FieldValue;
}

impl SwitchedField for TwoFoldNormalForm {
    fn side_field(&self, point: [f64; 3], side: Side) -> FieldValue {
        eval_normal_form(self, point, side)
    }
}

/// Remainder terms added to the truncated normal form.
pub type Remainder = dyn Fn(Side, [f64; 3]) -> [f64; 3] + Send + Sync;

/// Normal form plus an optional remainder (zero when absent).
#[derive(Clone)]
pub struct PiecewiseSystem {
    pub form: TwoFoldNormalForm,
    remainder: Option<Arc<Remainder>>,
}

impl PiecewiseSystem {
    pub fn new(form: TwoFoldNormalForm) -> Self {
        Self {
            form,
            remainder: None,
        }
    }

    pub fn with_remainder(mut self, remainder: Arc<Remainder>) -> Self {
        self.remainder = Some(remainder);
        self
    }
}

impl fmt::Debug for PiecewiseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseSystem")
            .field("form", &self.form)
            .field("remainder", &self.remainder.is_some())
            .finish()
    }
}

impl SwitchedField for PiecewiseSystem {
    fn side_field(&self, point: [f64; 3], side: Side) -> FieldValue {
        let base = eval_normal_form(&self.form, point, side);
        match &self.remainder {
            None => base,
            Some(r) => {
                let [rx, ry, rz] = r(side, point);
                FieldValue::new(base.dx + rx, base.dy + ry, base.dz + rz)
            }
        }
    }
}

pub fn eval_normal_form(params: &TwoFoldNormalForm, point: [f64; 3], side: Side) -> FieldValue {
    let [x, y, z] = point;
    match side {
        Side::Plus => FieldValue::new(
            params.c / params.abs_beta(),
            params.a * y + params.abs_b() * z,
            params.sign_b(),
        ),
        Side::Minus => FieldValue::new(
            params.sign_beta(),
            params.alpha * y - params.abs_beta() * x,
            params.gamma / params.abs_b(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    StableSliding,
    UnstableSliding,
    CrossingDown,
    CrossingUp,
    FoldPlus,
    FoldMinus,
    TwoFold,
}

impl RegionClass {
    pub fn is_sliding(self) -> bool {
        matches!(self, RegionClass::StableSliding | RegionClass::UnstableSliding)
    }
}

pub fn classify_point(x: f64, z: f64) -> RegionClass {
    match (x == 0.0, z == 0.0) {
        (true, true) => RegionClass::TwoFold,
        (false, true) => RegionClass::FoldPlus,
        (true, false) => RegionClass::FoldMinus,
        (false, false) => match (x < 0.0, z < 0.0) {
            (true, true) => RegionClass::StableSliding,
            (false, false) => RegionClass::UnstableSliding,
            (false, true) => RegionClass::CrossingDown,
            (true, false) => RegionClass::CrossingUp,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlidingValue {
    pub dx: f64,
    pub dz: f64,
    pub sigma: f64,
}

/// Filippov sliding field at `(x, 0, z)`.
pub fn sliding_field<F: SwitchedField>(field: &F, x: f64, z: f64) -> Result<SlidingValue> {
    if !classify_point(x, z).is_sliding() {
        return Err(Error::NotSlidingRegion { x, z });
    }
    let p = [x, 0.0, z];
    let up = field.side_field(p, Side::Plus);
    let down = field.side_field(p, Side::Minus);
    let sigma = down.dy / (down.dy - up.dy);
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::NotSlidingRegion { x, z });
    }
    Ok(SlidingValue {
        dx: sigma * up.dx + (1.0 - sigma) * down.dx,
        dz: sigma * up.dz + (1.0 - sigma) * down.dz,
        sigma,
    })
}

/// Sliding field multiplied by `X-·∇y - X+·∇y`; linear and defined everywhere.
pub fn desingularized_sliding_field(params: &TwoFoldNormalForm, x: f64, z: f64) -> (f64, f64) {
    let m = params.sliding_matrix();
    (m[0][0] * x + m[0][1] * z, m[1][0] * x + m[1][1] * z)
}
