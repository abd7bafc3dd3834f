//! Blow-ups of the non-hyperbolic fold line and of the two-fold line.

pub mod fold;
pub mod twofold;

pub use fold::{
    fold_blowdown, fold_chart_rhs, fold_gamma2_leading, fold_kappa12, fold_kappa21,
    FoldBlowupWeights, FoldChartState, FoldK1State, FoldK2State, DEFAULT_RHO,
};
pub use twofold::{
    chart_k1_rhs, chart_k2_rhs, invariant_line_k2, kappa12, kappa21, reduced_equilibria,
    reduced_k1_rhs, reflect, reflect_point, ChartK1State, ChartK2State, ReducedEquilibrium,
};
