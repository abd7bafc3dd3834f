//! Eigen-structure of the desingularized sliding field and the singular canard census.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pws::TwoFoldNormalForm;

pub const DEFAULT_RESONANCE_TOL: f64 = 1e-9;

/// Eigenvalues `λ±`, eigenvector slopes `χ±` (with `v± = (1, -χ±)`) and ratios.
///
/// `xi_minus = λ-/λ+` is the ratio that controls the weak direction `v+`
/// (it exceeds 1 in the node case); `xi_plus = λ+/λ-` is its reciprocal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub discriminant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl EigenData {
    pub fn v_plus(&self) -> [f64; 2] {
        [1.0, -self.chi_plus]
    }

    pub fn v_minus(&self) -> [f64; 2] {
        [1.0, -self.chi_minus]
    }

    pub fn lambda(&self, which: Branch) -> f64 {
        match which {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }

    pub fn chi(&self, which: Branch) -> f64 {
        match which {
            Branch::Plus => self.chi_plus,
            Branch::Minus => self.chi_minus,
        }
    }

    /// Ratio of the other eigenvalue to the one along `which`.
    pub fn ratio_along(&self, which: Branch) -> f64 {
        match which {
            Branch::Plus => self.xi_minus,
            Branch::Minus => self.xi_plus,
        }
    }
}

pub fn eigen_data(params: &TwoFoldNormalForm) -> Result<EigenData> {
    let disc = params.discriminant();
    if disc < 0.0 {
        return Err(Error::FocusCase(disc));
    }
    let sq = disc.sqrt();
    let s = params.c + params.gamma;
    let d = params.c - params.gamma;
    let lambda_plus = -0.5 * s + 0.5 * sq;
    let lambda_minus = -0.5 * s - 0.5 * sq;
    let k = params.sign_beta() / (2.0 * params.abs_b());
    Ok(EigenData {
        lambda_plus,
        lambda_minus,
        chi_plus: k * (d + sq),
        chi_minus: k * (d - sq),
        xi_plus: lambda_plus / lambda_minus,
        xi_minus: lambda_minus / lambda_plus,
        discriminant: disc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseClass {
    S,
    SN,
    N,
    Focus,
}

pub fn case_classify(params: &TwoFoldNormalForm) -> CaseClass {
    let disc = params.discriminant();
    if disc < 0.0 {
        return CaseClass::Focus;
    }
    let s = params.c + params.gamma;
    let sq = disc.sqrt();
    if s < sq {
        CaseClass::S
    } else if s == sq {
        CaseClass::SN
    } else {
        CaseClass::N
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Visibility {
    Visible,
    Invisible,
    VisibleInvisible,
}

pub fn visibility(params: &TwoFoldNormalForm) -> Visibility {
    match (params.b > 0.0, params.beta > 0.0) {
        (true, true) => Visibility::Visible,
        (false, false) => Visibility::Invisible,
        _ => Visibility::VisibleInvisible,
    }
}

/// Singular canards through the two-fold.
///
/// `region_label` is `None` in the visible-invisible case with `b < 0`,
/// where no singular canards exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanardCensus {
    pub strong_primary: u32,
    pub weak_primary_sector: bool,
    pub primary_unique: u32,
    pub faux: u32,
    pub region_label: Option<u8>,
}

pub fn singular_canard_census(params: &TwoFoldNormalForm) -> Result<CanardCensus> {
    let case = case_classify(params);
    match case {
        CaseClass::SN | CaseClass::Focus => {
            return Err(Error::Degenerate(format!("no hyperbolic census in case {case:?}")))
        }
        _ => {}
    }
    let e = eigen_data(params)?;
    let minus_in = e.chi_minus < 0.0;
    let plus_in = e.chi_plus < 0.0;
    let vis = visibility(params);
    let region_label = match (vis, case) {
        (Visibility::VisibleInvisible, _) if params.b < 0.0 => None,
        (Visibility::Visible, CaseClass::N) => Some(1),
        (Visibility::Invisible, CaseClass::N) => Some(2),
        (Visibility::VisibleInvisible, CaseClass::N) => Some(5),
        (Visibility::Visible, _) => Some(3),
        (Visibility::Invisible, _) => Some(4),
        (Visibility::VisibleInvisible, _) => Some(6),
    };
    let census = if case == CaseClass::N {
        let strong = u32::from(minus_in);
        CanardCensus {
            strong_primary: strong,
            weak_primary_sector: plus_in,
            primary_unique: strong,
            faux: 0,
            region_label,
        }
    } else {
        CanardCensus {
            strong_primary: 0,
            weak_primary_sector: false,
            primary_unique: u32::from(minus_in),
            faux: u32::from(plus_in),
            region_label,
        }
    };
    Ok(census)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resonance {
    Transversal,
    Resonant(u32),
}

/// Compare `xi_minus` against the natural numbers.
pub fn resonance_check(eigen: &EigenData, tol: f64) -> Resonance {
    resonance_of_ratio(eigen.xi_minus, tol)
}

pub fn resonance_of_ratio(xi: f64, tol: f64) -> Resonance {
    if !xi.is_finite() || xi < 0.5 {
        return Resonance::Transversal;
    }
    let n = xi.round();
    if n >= 1.0 && (xi - n).abs() < tol {
        Resonance::Resonant(n as u32)
    } else {
        Resonance::Transversal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(xi: f64) -> TwoFoldNormalForm {
        TwoFoldNormalForm::with_eigen_ratio(1.0, -1.0, 2.5, xi).unwrap()
    }

    #[test]
    fn family_at_three_and_a_half() {
        let p = family(3.5);
        assert!((p.c - 2.6).abs() < 1e-14 && (p.gamma - 0.1).abs() < 1e-14);
        let e = eigen_data(&p).unwrap();
        assert!((e.lambda_plus + 0.6).abs() < 1e-14);
        assert!((e.lambda_minus + 2.1).abs() < 1e-14);
        assert!((e.chi_plus + 2.0).abs() < 1e-14);
        assert!((e.chi_minus + 0.5).abs() < 1e-14);
        assert!((e.xi_minus - 3.5).abs() < 1e-13);
    }

    #[test]
    fn symmetric_saddle() {
        let p = TwoFoldNormalForm::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let e = eigen_data(&p).unwrap();
        assert_eq!((e.lambda_plus, e.lambda_minus), (1.0, -1.0));
        assert_eq!((e.chi_plus, e.chi_minus), (1.0, -1.0));
        assert_eq!(case_classify(&p), CaseClass::S);
    }

    #[test]
    fn focus_is_reported() {
        let p = TwoFoldNormalForm::new(1.0, -1.0, 0.5, 0.0).unwrap();
        assert_eq!(case_classify(&p), CaseClass::Focus);
        assert!(matches!(eigen_data(&p), Err(Error::FocusCase(_))));
        assert!(singular_canard_census(&p).is_err());
    }

    #[test]
    fn saddle_node_boundary() {
        let p = TwoFoldNormalForm::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(case_classify(&p), CaseClass::SN);
    }

    #[test]
    fn family_is_node() {
        for xi in [2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 6.5] {
            assert_eq!(case_classify(&family(xi)), CaseClass::N);
        }
    }

    #[test]
    fn visibility_table() {
        let v = |b, beta| visibility(&TwoFoldNormalForm::new(b, beta, 0.0, 0.0).unwrap());
        assert_eq!(v(1.0, 1.0), Visibility::Visible);
        assert_eq!(v(-1.0, -1.0), Visibility::Invisible);
        assert_eq!(v(1.0, -1.0), Visibility::VisibleInvisible);
        assert_eq!(v(-1.0, 1.0), Visibility::VisibleInvisible);
    }

    #[test]
    fn census_regions() {
        let node = |b: f64, beta: f64| TwoFoldNormalForm::from_sums(b, beta, 2.5, 10.0).unwrap();
        let c = singular_canard_census(&node(1.0, 1.0)).unwrap();
        assert_eq!((c.region_label, c.strong_primary, c.weak_primary_sector), (Some(1), 1, false));
        let c = singular_canard_census(&node(-1.0, -1.0)).unwrap();
        assert_eq!((c.region_label, c.strong_primary, c.weak_primary_sector), (Some(2), 0, true));
        let c = singular_canard_census(&node(1.0, -1.0)).unwrap();
        assert_eq!((c.region_label, c.strong_primary, c.weak_primary_sector), (Some(5), 1, true));
        let c = singular_canard_census(&node(-1.0, 1.0)).unwrap();
        assert_eq!((c.region_label, c.strong_primary, c.weak_primary_sector), (None, 0, false));

        let saddle = |b: f64, beta: f64| TwoFoldNormalForm::from_sums(b, beta, 2.5, 0.1).unwrap();
        let c = singular_canard_census(&saddle(1.0, 1.0)).unwrap();
        assert_eq!((c.region_label, c.primary_unique, c.faux), (Some(3), 1, 0));
        let c = singular_canard_census(&saddle(-1.0, -1.0)).unwrap();
        assert_eq!((c.region_label, c.primary_unique, c.faux), (Some(4), 0, 1));
        let c = singular_canard_census(&saddle(1.0, -1.0)).unwrap();
        assert_eq!((c.region_label, c.primary_unique, c.faux), (Some(6), 1, 1));
        let c = singular_canard_census(&saddle(-1.0, 1.0)).unwrap();
        assert_eq!((c.region_label, c.primary_unique, c.faux), (None, 0, 0));
    }

    #[test]
    fn resonance_examples() {
        let tol = DEFAULT_RESONANCE_TOL;
        assert_eq!(resonance_check(&eigen_data(&family(3.5)).unwrap(), tol), Resonance::Transversal);
        assert_eq!(resonance_check(&eigen_data(&family(3.0)).unwrap(), tol), Resonance::Resonant(3));
        let s = TwoFoldNormalForm::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(resonance_check(&eigen_data(&s).unwrap(), tol), Resonance::Transversal);
    }
}
