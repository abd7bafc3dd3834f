//! Cylindrical blow-up of the line `x = z = ε = 0` in `(x, w, z)` coordinates.
//!
//! Chart κ₁ (`x̄ = -1`): `x = -r₁, z = r₁z₁, ε = r₁²ε₁`.
//! Chart κ₂ (`ε̄ = 1`): `x = r₂x₂, z = r₂z₂, ε = r₂²`.
//! Both vector fields are truncated (all `O(r)` terms dropped).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pws::TwoFoldNormalForm;
use crate::regularization::{f_of_w, RegularizationFunction};
use crate::twofold::{eigen_data, Branch, EigenData};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartK1State {
    pub r1: f64,
    pub w: f64,
    pub z1: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartK2State {
    pub x2: f64,
    pub w: f64,
    pub z2: f64,
    pub r2: f64,
}

impl ChartK1State {
    /// `(x, w, z, ε)`.
    pub fn blow_down(&self) -> [f64; 4] {
        [-self.r1, self.w, self.r1 * self.z1, self.r1 * self.r1 * self.eps1]
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.r1, self.w, self.z1, self.eps1]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self { r1: a[0], w: a[1], z1: a[2], eps1: a[3] }
    }
}

impl ChartK2State {
    /// `(x, w, z, ε)`.
    pub fn blow_down(&self) -> [f64; 4] {
        [self.r2 * self.x2, self.w, self.r2 * self.z2, self.r2 * self.r2]
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x2, self.w, self.z2, self.r2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self { x2: a[0], w: a[1], z2: a[2], r2: a[3] }
    }
}

pub fn kappa12(s: &ChartK2State) -> Result<ChartK1State> {
    if !(s.x2 < 0.0) {
        return Err(Error::Domain(format!("κ12 needs x2 < 0, got {}", s.x2)));
    }
    Ok(ChartK1State {
        r1: -s.r2 * s.x2,
        w: s.w,
        z1: -s.z2 / s.x2,
        eps1: 1.0 / (s.x2 * s.x2),
    })
}

pub fn kappa21(s: &ChartK1State) -> Result<ChartK2State> {
    if !(s.eps1 > 0.0) {
        return Err(Error::Domain(format!("κ21 needs eps1 > 0, got {}", s.eps1)));
    }
    let q = s.eps1.sqrt();
    Ok(ChartK2State {
        x2: -1.0 / q,
        w: s.w,
        z2: s.z1 / q,
        r2: s.r1 * q,
    })
}

pub fn chart_k1_rhs(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    s: &ChartK1State,
) -> ChartK1State {
    let (ab, abeta) = (params.abs_b(), params.abs_beta());
    let f1 = params.c / abeta + params.sign_beta() * s.w;
    ChartK1State {
        r1: -s.r1 * s.eps1 * f1,
        w: f_of_w(s.w, phi) * (-ab * s.z1 - abeta * s.w),
        z1: s.eps1 * (params.sign_b() + params.gamma / ab * s.w + f1 * s.z1),
        eps1: 2.0 * f1 * s.eps1 * s.eps1,
    }
}

/// Scaling-chart field; `r₂` is a parameter.
pub fn chart_k2_rhs(
    params: &TwoFoldNormalForm,
    phi: &RegularizationFunction,
    s: &ChartK2State,
) -> ChartK2State {
    let (ab, abeta) = (params.abs_b(), params.abs_beta());
    ChartK2State {
        x2: params.c / abeta + params.sign_beta() * s.w,
        w: f_of_w(s.w, phi) * (-ab * s.z2 + abeta * s.x2 * s.w),
        z2: params.sign_b() + params.gamma / ab * s.w,
        r2: 0.0,
    }
}

/// `(x, w, z) ↦ (-x, w, -z)`; time must be reversed by the caller.
pub fn reflect(s: &ChartK2State) -> ChartK2State {
    ChartK2State {
        x2: -s.x2,
        w: s.w,
        z2: -s.z2,
        r2: s.r2,
    }
}

pub fn reflect_point(p: [f64; 3]) -> [f64; 3] {
    [-p[0], p[1], -p[2]]
}

/// Point of the invariant line `l₂,±` at abscissa `x2`.
pub fn invariant_line_k2(
    params: &TwoFoldNormalForm,
    eigen: &EigenData,
    which: Branch,
    x2: f64,
) -> ChartK2State {
    let chi = eigen.chi(which);
    ChartK2State {
        x2,
        w: -params.abs_b() * chi / params.abs_beta(),
        z2: -chi * x2,
        r2: 0.0,
    }
}

/// Reduced flow on the centre manifold in chart κ₁, leading order, `(r1, z1, eps1)`.
pub fn reduced_k1_rhs(params: &TwoFoldNormalForm, s: [f64; 3]) -> [f64; 3] {
    let [r1, z1, eps1] = s;
    let ab = params.abs_b();
    let g = params.c - ab * params.sign_beta() * z1;
    let p = ab * params.sign_beta() * z1 * z1
        - (params.c - params.gamma) * z1
        - params.abs_beta() * params.sign_b();
    [-r1 * g, -p, 2.0 * eps1 * g]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedEquilibrium {
    pub which: Branch,
    /// `(r1, z1, eps1)`.
    pub location: [f64; 3],
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

/// Equilibria `(0, χ±, 0)` of the reduced flow, for each `χ± < 0`.
pub fn reduced_equilibria(params: &TwoFoldNormalForm) -> Result<Vec<ReducedEquilibrium>> {
    let e = eigen_data(params)?;
    let sq = e.discriminant.sqrt();
    let mut out = Vec::new();
    for (which, sign) in [(Branch::Plus, -1.0), (Branch::Minus, 1.0)] {
        let chi = e.chi(which);
        if chi < 0.0 {
            let lambda = e.lambda(which);
            out.push(ReducedEquilibrium {
                which,
                location: [0.0, chi, 0.0],
                mu1: lambda,
                mu2: sign * sq,
                mu3: -2.0 * lambda,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularization::phi_cubic;

    fn xi5() -> TwoFoldNormalForm {
        TwoFoldNormalForm::new(1.0, -1.0, 2.375, -0.125).unwrap()
    }

    #[test]
    fn kappa12_example() {
        let s = ChartK2State { x2: -10.0, w: 2.0, z2: 5.0, r2: 0.0 };
        let k1 = kappa12(&s).unwrap();
        assert_eq!(k1.r1, 0.0);
        assert_eq!(k1.w, 2.0);
        assert!((k1.z1 - 0.5).abs() < 1e-15);
        assert!((k1.eps1 - 0.01).abs() < 1e-15);
        assert!(kappa12(&ChartK2State { x2: 1.0, ..s }).is_err());
        assert!(kappa21(&ChartK1State { eps1: 0.0, ..k1 }).is_err());
    }

    #[test]
    fn k2_origin_speed() {
        let d = chart_k2_rhs(&xi5(), &phi_cubic(), &ChartK2State { x2: 0.0, w: 2.0, z2: 0.0, r2: 0.0 });
        assert!((d.x2 - 0.375).abs() < 1e-15);
    }

    #[test]
    fn line_of_equilibria_in_k1() {
        let p = xi5();
        let phi = phi_cubic();
        for z1 in [-0.3, -1.0, -4.0] {
            let s = ChartK1State { r1: 0.0, w: -p.abs_b() * z1 / p.abs_beta(), z1, eps1: 0.0 };
            let d = chart_k1_rhs(&p, &phi, &s);
            assert_eq!(d.to_array(), [0.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn invariant_lines_in_k1() {
        let p = xi5();
        let e = eigen_data(&p).unwrap();
        for which in [Branch::Plus, Branch::Minus] {
            let chi = e.chi(which);
            let s = ChartK1State { r1: 0.0, w: -chi / 1.0, z1: chi, eps1: 0.3 };
            let d = chart_k1_rhs(&p, &phi_cubic(), &s);
            assert!(d.w.abs() < 1e-14 && d.z1.abs() < 1e-14, "{d:?}");
        }
    }

    #[test]
    fn reduced_example() {
        let p = TwoFoldNormalForm::with_eigen_ratio(1.0, -1.0, 2.5, 3.5).unwrap();
        let eq = reduced_equilibria(&p).unwrap();
        let plus = eq.iter().find(|q| q.which == Branch::Plus).unwrap();
        assert!((plus.mu1 + 0.6).abs() < 1e-12);
        assert!((plus.mu2 + 1.5).abs() < 1e-12);
        assert!((plus.mu3 - 1.2).abs() < 1e-12);
    }
}
