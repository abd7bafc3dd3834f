//! Quasi-homogeneous blow-up of the fold line `x = 0, ỹ = -1`.
//!
//! Coordinates use the shifted layer variable `y = ỹ + 1`, so the fold sits
//! at `y = 0` and `1 + φ ≈ φ^[k] y^k` there.

use serde::{Deserialize, Serialize};

use crate::pws::TwoFoldNormalForm;

pub const DEFAULT_RHO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldBlowupWeights {
    pub a1: u32,
    pub a2: u32,
    pub a3: u32,
}

impl FoldBlowupWeights {
    pub fn new(k: u32) -> Self {
        Self {
            a1: 2 * k,
            a2: 2,
            a3: 2 * (2 * k - 1),
        }
    }

    fn f(&self) -> (f64, f64, f64) {
        (f64::from(self.a1), f64::from(self.a2), f64::from(self.a3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldK1State {
    pub r1: f64,
    pub y1: f64,
    pub z: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldK2State {
    pub x2: f64,
    pub y2: f64,
    pub z: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FoldChartState {
    K1(FoldK1State),
    K2(FoldK2State),
}

/// Blow-down to `(x, y, z, ε)` with `y` the shifted layer variable.
pub fn fold_blowdown(k: u32, state: &FoldChartState) -> [f64; 4] {
    let (a1, a2, a3) = FoldBlowupWeights::new(k).f();
    match state {
        FoldChartState::K1(s) => [
            -s.r1.powf(a1),
            s.r1.powf(a2) * s.y1,
            s.z,
            s.r1.powf(a3) * s.eps1,
        ],
        FoldChartState::K2(s) => [
            s.r2.powf(a1) * s.x2,
            s.r2.powf(a2) * s.y2,
            s.z,
            s.r2.powf(a3),
        ],
    }
}

/// Transition κ₂ → κ₁ on `x2 < 0`; `None` outside the overlap.
pub fn fold_kappa12(k: u32, s: &FoldK2State) -> Option<FoldK1State> {
    if !(s.x2 < 0.0) {
        return None;
    }
    let (a1, a2, a3) = FoldBlowupWeights::new(k).f();
    let m = -s.x2;
    Some(FoldK1State {
        r1: s.r2 * m.powf(1.0 / a1),
        y1: m.powf(-a2 / a1) * s.y2,
        z: s.z,
        eps1: m.powf(-a3 / a1),
    })
}

/// Transition κ₁ → κ₂ on `eps1 > 0`; `None` outside the overlap.
pub fn fold_kappa21(k: u32, s: &FoldK1State) -> Option<FoldK2State> {
    if !(s.eps1 > 0.0) {
        return None;
    }
    let (a1, a2, a3) = FoldBlowupWeights::new(k).f();
    Some(FoldK2State {
        x2: -s.eps1.powf(-a1 / a3),
        y2: s.eps1.powf(-a2 / a3) * s.y1,
        z: s.z,
        r2: s.r1 * s.eps1.powf(1.0 / a3),
    })
}

/// Scaling-chart field after division by `r₂^(2(k-1))`, truncated.
pub fn fold_chart_rhs(
    k: u32,
    phi_k_coeff: f64,
    params: &TwoFoldNormalForm,
    s: &FoldK2State,
) -> FoldK2State {
    let (a1, _, _) = FoldBlowupWeights::new(k).f();
    FoldK2State {
        x2: 2.0 * params.sign_beta(),
        y2: params.abs_b() * s.z * phi_k_coeff * s.y2.powi(k as i32)
            - 2.0 * params.abs_beta() * s.x2,
        z: 2.0 * s.r2.powf(a1) * params.gamma / params.abs_b(),
        r2: 0.0,
    }
}

/// Leading term of the attracting trajectory `y₂(x₂)` for `x₂ ≪ 0`, `z < 0`.
pub fn fold_gamma2_leading(
    k: u32,
    phi_k_coeff: f64,
    params: &TwoFoldNormalForm,
    z: f64,
    x2: f64,
) -> f64 {
    (2.0 * params.abs_beta() * x2 / (phi_k_coeff * params.abs_b() * z)).powf(1.0 / f64::from(k))
}
