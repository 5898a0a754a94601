//! CHSH machinery, the nonlocality/symmetry trade-off, and bounds obtained by
//! averaging squared Bell parameters over all translations.

mod chsh;
mod tradeoff;
mod tripartite;
mod variance;

pub use chsh::{
    chsh_exact, chsh_of_settings, chsh_value, parse_settings_quad, quad_correlations,
    render_settings_quad, violation_example, SettingsQuad, ViolationEvaluation, ViolationExample,
};
pub use tradeoff::{
    consistency_threshold, monte_carlo_tradeoff, p_w1, p_w1_from_p, p_w1_of_e2, q_w0, q_w0_from_p,
    q_w0_of_e2, render_tradeoff_csv, tradeoff_curve, within_three_sigma, ConsistencyThreshold,
    MonteCarloTradeoff, TradeoffPoint, TRADEOFF_HEADER,
};
pub use tripartite::{
    j_local_max, j_nonlocal_max, j_signed, mean_square_j, mean_square_tripartite_i,
    reference_tripartite_settings, tripartite_bell_i, tripartite_bell_j_bound, JBound,
    TripartiteSettings, J_SEARCH_BUDGET, J_SIGNS,
};
pub use variance::{fine_grained_zeta, mean_square_chsh, FineGrained, MeanSquare};

use serde::Serialize;

use crate::Rational;

/// JSON shape shared by every bound report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub parameter: String,
    pub n: usize,
    pub settings: Vec<(String, String)>,
    pub mean_square: String,
    pub bound: f64,
    pub bound_symbolic: String,
    pub exact: bool,
}

/// `√r` written as `k√m` when `r` is an integer, `√(a/b)` otherwise.
pub fn sqrt_symbol(r: Rational) -> String {
    if *r.denom() != 1 || *r.numer() < 0 {
        return format!("√({r})");
    }
    let v = *r.numer();
    let mut k = 1i64;
    let mut m = v;
    let mut f = 2i64;
    while f * f <= m {
        while m % (f * f) == 0 {
            m /= f * f;
            k *= f;
        }
        f += 1;
    }
    match (k, m) {
        (_, 0) => "0".into(),
        (k, 1) => k.to_string(),
        (1, m) => format!("√{m}"),
        (k, m) => format!("{k}√{m}"),
    }
}

pub(crate) fn rational_sqrt_f64(r: Rational) -> f64 {
    (*r.numer() as f64 / *r.denom() as f64).sqrt()
}
