//! Regularization functions, the slow-fast system and its `w`-coordinate form.
//!
//! Inside the layer the fast variable is the rescaled `ỹ = y/ε`; a
//! [`SlowFastState`] always carries `ỹ` and [`SlowFastState::to_original`]
//! maps back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pws::{FieldValue, Side, SwitchedField, TwoFoldNormalForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    Finite(u32),
    Infinite,
}

/// Monotone switching function `φ` with `φ' = C_k (1 - y²)^(k-1)` on `(-1, 1)`.
///
/// The function is evaluated through the gap `1 + φ(-1 + u)`, a polynomial in
/// `u` that is accurate near the endpoint; odd symmetry covers `y > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationFunction {
    k: u32,
    c_k: f64,
    phi_k_coeff: f64,
    /// Coefficient of `u^(k+j)` in the gap polynomial.
    gap: Vec<f64>,
}

fn binomial(n: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

pub fn phi_cubic() -> RegularizationFunction {
    phi_finite_k(2).expect("k = 2 is valid")
}

pub fn phi_finite_k(k: u32) -> Result<RegularizationFunction> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("smoothness k must be >= 2, got {k}")));
    }
    let m = k - 1;
    let norm: f64 = (0..=m)
        .map(|j| binomial(m, j) * (-1f64).powi(j as i32) / f64::from(2 * j + 1))
        .sum();
    let c_k = 1.0 / norm;
    let gap = (0..=m)
        .map(|j| {
            c_k * binomial(m, j) * 2f64.powi((m - j) as i32) * (-1f64).powi(j as i32)
                / f64::from(k + j)
        })
        .collect();
    Ok(RegularizationFunction {
        k,
        c_k,
        phi_k_coeff: c_k * 2f64.powi(m as i32) / f64::from(k),
        gap,
    })
}

impl RegularizationFunction {
    pub fn smoothness_k(&self) -> Smoothness {
        Smoothness::Finite(self.k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Leading coefficient `φ^[k]` in `φ(y) = -1 + φ^[k] (1 + y)^k + ...`.
    pub fn phi_k_coeff(&self) -> f64 {
        self.phi_k_coeff
    }

    pub fn normalization(&self) -> f64 {
        self.c_k
    }

    /// `1 + φ(-1 + u)` for `u ∈ [0, 1]`.
    fn gap_at(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &g in self.gap.iter().rev() {
            acc = acc * u + g;
        }
        acc * u.powi(self.k as i32)
    }

    fn gap_slope(&self, u: f64) -> f64 {
        self.c_k * (u * (2.0 - u)).powi(self.k as i32 - 1)
    }

    /// Solve `gap(u) = t` for `t ∈ [0, 1]`.
    fn gap_inverse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut u = (t / self.phi_k_coeff).powf(1.0 / f64::from(self.k)).min(1.0);
        for _ in 0..200 {
            let r = self.gap_at(u) - t;
            if r == 0.0 {
                return u;
            }
            if r < 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            let slope = self.gap_slope(u);
            let mut next = u - r / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-15 * u || hi - lo <= 1e-15 * hi {
                return next;
            }
            u = next;
        }
        u
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= -1.0 {
            -1.0
        } else if y >= 1.0 {
            1.0
        } else if y <= 0.0 {
            -1.0 + self.gap_at(1.0 + y)
        } else {
            1.0 - self.gap_at(1.0 - y)
        }
    }

    pub fn deriv(&self, y: f64) -> f64 {
        if y.abs() >= 1.0 {
            0.0
        } else {
            self.c_k * (1.0 - y * y).powi(self.k as i32 - 1)
        }
    }

    /// `1 + φ(y)` without cancellation near `y = -1`.
    pub fn one_plus(&self, y: f64) -> f64 {
        if y <= 0.0 {
            self.gap_at((1.0 + y).clamp(0.0, 1.0))
        } else {
            2.0 - self.gap_at((1.0 - y).max(0.0))
        }
    }

    /// `1 - φ(y)` without cancellation near `y = 1`.
    pub fn one_minus(&self, y: f64) -> f64 {
        self.one_plus(-y)
    }

    /// `φ⁻¹(v)` on `[-1, 1]`; NaN outside.
    pub fn inverse(&self, v: f64) -> f64 {
        if !(-1.0..=1.0).contains(&v) {
            return f64::NAN;
        }
        if v <= 0.0 {
            -1.0 + self.gap_inverse(1.0 + v)
        } else {
            1.0 - self.gap_inverse(1.0 - v)
        }
    }

    /// `y` with `1 + φ(y) = t`, accurate for small `t`.
    pub fn inverse_from_gap(&self, t: f64) -> f64 {
        -1.0 + self.gap_inverse(t)
    }

    /// `φ'(y)` at `y = -1 + u`.
    fn deriv_from_left(&self, u: f64) -> f64 {
        self.gap_slope(u)
    }
}

/// `w = (1 - φ)/(1 + φ)`.
pub fn w_transform(phi_val: f64) -> Result<f64> {
    if !(phi_val > -1.0 && phi_val < 1.0) {
        return Err(Error::Domain(format!("w-transform needs φ in (-1, 1), got {phi_val}")));
    }
    Ok((1.0 - phi_val) / (1.0 + phi_val))
}

/// Inverse of [`w_transform`]: returns `(φ, y)`.
pub fn w_inverse(w: f64, phi: &RegularizationFunction) -> Result<(f64, f64)> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Domain(format!("w must lie in (0, ∞), got {w}")));
    }
    Ok(((1.0 - w) / (1.0 + w), y_of_w(w, phi)))
}

/// `y = φ⁻¹((1-w)/(1+w))`, computed from whichever endpoint is nearer; NaN for `w <= 0`.
pub fn y_of_w(w: f64, phi: &RegularizationFunction) -> f64 {
    if !(w > 0.0) {
        return f64::NAN;
    }
    if w >= 1.0 {
        -1.0 + phi.gap_inverse(2.0 / (1.0 + w))
    } else {
        1.0 - phi.gap_inverse(2.0 * w / (1.0 + w))
    }
}

/// `f(w) = ½ (1+w)² φ'(φ⁻¹((1-w)/(1+w)))`; NaN for `w <= 0`.
pub fn f_of_w(w: f64, phi: &RegularizationFunction) -> f64 {
    if !(w > 0.0) || !w.is_finite() {
        return f64::NAN;
    }
    let d = if w >= 1.0 {
        phi.deriv_from_left(phi.gap_inverse(2.0 / (1.0 + w)))
    } else {
        phi.deriv_from_left(phi.gap_inverse(2.0 * w / (1.0 + w)))
    };
    0.5 * (1.0 + w) * (1.0 + w) * d
}

/// `X_ε = ½ X+ (1 + φ(y/ε)) + ½ X- (1 - φ(y/ε))`.
pub fn regularized_field<F: SwitchedField>(
    field: &F,
    phi: &RegularizationFunction,
    eps: f64,
    point: [f64; 3],
) -> FieldValue {
    let up = field.side_field(point, Side::Plus);
    let down = field.side_field(point, Side::Minus);
    let s = point[1] / eps;
    let p = 0.5 * phi.one_plus(s);
    let m = 0.5 * phi.one_minus(s);
    FieldValue::new(
        p * up.dx + m * down.dx,
        p * up.dy + m * down.dy,
        p * up.dz + m * down.dz,
    )
}

/// State of the slow-fast system; `y` is the layer variable `ỹ = y/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowFastState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub eps: f64,
}

impl SlowFastState {
    /// `(x, ε·ỹ, z)`.
    pub fn to_original(&self) -> [f64; 3] {
        [self.x, self.eps * self.y, self.z]
    }

    pub fn from_original(point: [f64; 3], eps: f64) -> Self {
        Self {
            x: point[0],
            y: point[1] / eps,
            z: point[2],
            eps,
        }
    }
}

/// Fast-time slow-fast system (time `τ = 2t/ε`), fields frozen at `y = 0`.
pub fn slowfast_rhs(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    state: &SlowFastState,
) -> SlowFastState {
    let p = phi.one_plus(state.y);
    let m = phi.one_minus(state.y);
    let up = params.side_field([state.x, 0.0, state.z], Side::Plus);
    let down = params.side_field([state.x, 0.0, state.z], Side::Minus);
    SlowFastState {
        x: state.eps * (up.dx * p + down.dx * m),
        y: up.dy * p + down.dy * m,
        z: state.eps * (up.dz * p + down.dz * m),
        eps: 0.0,
    }
}

/// `ỹ = h₀(x, z)` on the critical manifold.
pub fn critical_manifold_height(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    x: f64,
    z: f64,
) -> Result<f64> {
    let up = params.abs_b() * z;
    let down = -params.abs_beta() * x;
    let denom = down - up;
    if denom == 0.0 {
        return Err(Error::OutsideSliding { x, z });
    }
    let sigma = down / denom;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::OutsideSliding { x, z });
    }
    Ok(if sigma <= 0.5 {
        -1.0 + phi.gap_inverse(2.0 * sigma)
    } else {
        1.0 - phi.gap_inverse(2.0 * (1.0 - sigma))
    })
}

/// Truncated layer system in `(x, w, z)`.
pub fn wsystem_rhs(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    eps: f64,
    state: [f64; 3],
) -> [f64; 3] {
    let [x, w, z] = state;
    let (ab, abeta) = (params.abs_b(), params.abs_beta());
    [
        eps * (params.c / abeta + params.sign_beta() * w),
        f_of_w(w, phi) * (-ab * z + abeta * x * w),
        eps * (params.sign_b() + params.gamma / ab * w),
    ]
}
