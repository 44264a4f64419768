//! Numerical limit studies: Lie–Trotter limits of multivariable means, the
//! `p → 0` behavior of Rényi power means on powered tuples, and the
//! convergence of `Q_p` to the log-Euclidean mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpd::{check_same_dim, HermitianMatrix, HpdMatrix};
use crate::multi::{
    arithmetic_mean, harmonic_mean, karcher_mean, log_euclidean, quasi_arithmetic,
    renyi_power_mean, wasserstein_barycenter, weighted_sum, MatrixTuple, SolverConfig,
    WeightVector,
};
use crate::order::{near_order_cmp, OrderVerdict, ToleranceProfile};
use crate::pair::thompson_distance;

/// Smallest admissible `s` in a Lie–Trotter grid; `(·)^{1/s}` amplifies
/// rounding by `1/s`.
pub const MIN_CURVE_PARAMETER: f64 = 1e-3;

/// Errors at or below this level are treated as rounding noise when
/// estimating convergence orders.
pub const ERROR_FLOOR: f64 = 1e-13;

/// Exponential curve `γ(s) = exp(sH)` through the identity with `γ'(0) = H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    generator: HermitianMatrix,
}

impl Curve {
    pub fn new(generator: HermitianMatrix) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> &HermitianMatrix {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn eval(&self, s: f64) -> Result<HpdMatrix> {
        if s == 0.0 {
            return Ok(HpdMatrix::identity(self.dim()));
        }
        self.generator.scale(s).exp()
    }
}

/// A named multivariable mean with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MultiMean {
    Arithmetic,
    Harmonic,
    Quasi { p: f64 },
    LogEuclidean,
    Karcher,
    Renyi { t: f64, z: f64 },
    Barycenter,
}

impl MultiMean {
    pub fn evaluate(&self, w: &WeightVector, a: &MatrixTuple, cfg: &SolverConfig) -> Result<HpdMatrix> {
        match *self {
            MultiMean::Arithmetic => arithmetic_mean(w, a),
            MultiMean::Harmonic => harmonic_mean(w, a),
            MultiMean::Quasi { p } => quasi_arithmetic(p, w, a),
            MultiMean::LogEuclidean => log_euclidean(w, a),
            MultiMean::Karcher => karcher_mean(w, a, cfg).map(|r| r.0),
            MultiMean::Renyi { t, z } => renyi_power_mean(t, z, w, a, cfg).map(|r| r.0),
            MultiMean::Barycenter => wasserstein_barycenter(w, a, cfg).map(|r| r.0),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            MultiMean::Arithmetic => "arithmetic".into(),
            MultiMean::Harmonic => "harmonic".into(),
            MultiMean::Quasi { p } => format!("quasi(p={p})"),
            MultiMean::LogEuclidean => "log-euclidean".into(),
            MultiMean::Karcher => "karcher".into(),
            MultiMean::Renyi { t, z } => format!("renyi(t={t},z={z})"),
            MultiMean::Barycenter => "barycenter".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub name: String,
    pub verdict: OrderVerdict,
}

impl NamedVerdict {
    fn new(name: impl Into<String>, verdict: OrderVerdict) -> Self {
        Self {
            name: name.into(),
            verdict,
        }
    }
}

/// One grid point of a study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub parameter: f64,
    pub distance: f64,
    /// The same distance at the negated parameter, where the study has one.
    pub negative_distance: Option<f64>,
    pub verdicts: Vec<NamedVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitStudyReport {
    pub study: String,
    pub parameter_name: String,
    pub rows: Vec<LimitRow>,
    /// Median of `log(E_i / E_{i+1}) / log(x_i / x_{i+1})` over adjacent grid
    /// points; `None` when every error sits at the rounding floor.
    pub estimated_order: Option<f64>,
}

impl LimitStudyReport {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.parameter).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &NamedVerdict> {
        self.rows.iter().flat_map(|r| r.verdicts.iter())
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts().all(|v| v.verdict.holds)
    }

    /// Smallest margin over all verdicts, `+∞` if there are none.
    pub fn worst_margin(&self) -> f64 {
        self.verdicts()
            .map(|v| v.verdict.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Settings shared by the studies.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyOptions {
    pub solver: SolverConfig,
    pub tolerance: ToleranceProfile,
    /// Lie–Trotter only: also evaluate at `−s`.
    pub include_negative: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            tolerance: ToleranceProfile::new(1e-8, true).expect("valid tolerance"),
            include_negative: false,
        }
    }
}

fn check_grid(grid: &[f64], upper: f64, floor: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("empty parameter grid".into()));
    }
    if let Some(x) = grid.iter().find(|x| !(**x >= floor && **x < upper)) {
        return Err(Error::Domain(format!(
            "grid value {x} outside [{floor}, {upper})"
        )));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("grid must be strictly decreasing".into()));
    }
    Ok(())
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

fn estimate_order(grid: &[f64], errors: &[f64]) -> Option<f64> {
    let ratios = grid
        .windows(2)
        .zip(errors.windows(2))
        .filter(|(_, e)| e[0] > ERROR_FLOOR && e[1] > ERROR_FLOOR)
        .map(|(x, e)| (e[0] / e[1]).ln() / (x[0] / x[1]).ln())
        .collect();
    median(ratios)
}

/// `exp(Σ w_j H_j)`, the Lie–Trotter limit for curves with derivatives `H_j`.
pub fn lie_trotter_target(w: &WeightVector, curves: &[Curve]) -> Result<HpdMatrix> {
    if w.len() != curves.len() {
        return Err(Error::DimensionMismatch(w.len(), curves.len()));
    }
    weighted_sum(w, curves.iter().map(Curve::generator))?.exp()
}

/// `E(s) = d_T(G(ω; γ_1(s), …, γ_n(s))^{1/s}, exp(Σ w_j γ_j'(0)))` over a
/// positive grid decreasing toward 0, with the sandwich `ℋ ⪯ G ⪯ 𝒜` checked
/// at every point.
pub fn lie_trotter_limit_study(
    mean: &MultiMean,
    w: &WeightVector,
    curves: &[Curve],
    s_grid: &[f64],
    opts: &StudyOptions,
) -> Result<LimitStudyReport> {
    check_grid(s_grid, 1.0, MIN_CURVE_PARAMETER)?;
    let first = curves
        .first()
        .ok_or_else(|| Error::Domain("no curves given".into()))?;
    for c in &curves[1..] {
        check_same_dim(first.dim(), c.dim())?;
    }
    let target = lie_trotter_target(w, curves)?;

    let error_at = |s: f64| -> Result<(f64, MatrixTuple, HpdMatrix)> {
        let tuple = MatrixTuple::new(curves.iter().map(|c| c.eval(s)).collect::<Result<_>>()?)?;
        let g = mean.evaluate(w, &tuple, &opts.solver)?;
        let e = thompson_distance(&g.pow(1.0 / s)?, &target)?;
        Ok((e, tuple, g))
    };

    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let (e, tuple, g) = error_at(s)?;
        let h = harmonic_mean(w, &tuple)?;
        let a = arithmetic_mean(w, &tuple)?;
        let verdicts = vec![
            NamedVerdict::new("harmonic ⪯ mean", near_order_cmp(&h, &g, &opts.tolerance)?),
            NamedVerdict::new("mean ⪯ arithmetic", near_order_cmp(&g, &a, &opts.tolerance)?),
        ];
        let negative_distance = if opts.include_negative {
            Some(error_at(-s)?.0)
        } else {
            None
        };
        rows.push(LimitRow {
            parameter: s,
            distance: e,
            negative_distance,
            verdicts,
        });
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    Ok(LimitStudyReport {
        study: format!("lie-trotter/{}", mean.label()),
        parameter_name: "s".into(),
        estimated_order: estimate_order(s_grid, &errors),
        rows,
    })
}

/// Which side of the identity the tuple lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenyiHypothesis {
    /// Every `A_j ≤ I`.
    BelowIdentity,
    /// Every `A_j ≥ I`.
    AboveIdentity,
}

const HYPOTHESIS_SLACK: f64 = 1e-12;

impl RenyiHypothesis {
    pub fn holds_for(&self, a: &MatrixTuple) -> bool {
        match self {
            RenyiHypothesis::BelowIdentity => {
                a.iter().all(|x| x.max_eigenvalue() <= 1.0 + HYPOTHESIS_SLACK)
            }
            RenyiHypothesis::AboveIdentity => {
                a.iter().all(|x| x.min_eigenvalue() >= 1.0 - HYPOTHESIS_SLACK)
            }
        }
    }

    pub fn detect(a: &MatrixTuple) -> Option<Self> {
        [RenyiHypothesis::BelowIdentity, RenyiHypothesis::AboveIdentity]
            .into_iter()
            .find(|h| h.holds_for(a))
    }
}

/// For each `p` in a positive decreasing grid, compares
/// `X₋ = R_{t,z}(ω; 𝔸^{−p})^{−1/p}` and `X₊ = R_{t,z}(ω; 𝔸^p)^{1/p}`.
///
/// Verdicts per grid point:
/// * `X₋ ⪯ X₊`;
/// * under `BelowIdentity`: `X₊ ⪯ Q_p(ω; 𝔸^{1−t})` and
///   `LE(ω; 𝔸^{1−t}) ⪯ Q_p(ω; 𝔸^{1−t})`;
/// * under `AboveIdentity`: `Q_{−p}(ω; 𝔸^{1−t}) ⪯ X₋` and
///   `Q_{−p}(ω; 𝔸^{1−t}) ⪯ LE(ω; 𝔸^{1−t})`.
///
/// The row distance is `d_T(X₊, LE(ω; 𝔸^{1−t}))`, the negative-side one
/// `d_T(X₋, LE(ω; 𝔸^{1−t}))`.
pub fn renyi_zero_limit_study(
    t: f64,
    z: f64,
    w: &WeightVector,
    a: &MatrixTuple,
    p_grid: &[f64],
    hypothesis: Option<RenyiHypothesis>,
    opts: &StudyOptions,
) -> Result<LimitStudyReport> {
    if !(0.0 <= t && t < z && z <= 1.0) {
        return Err(Error::Domain(format!(
            "Rényi power mean needs 0 <= t < z <= 1, got t = {t}, z = {z}"
        )));
    }
    check_grid(p_grid, f64::INFINITY, f64::MIN_POSITIVE)?;
    if let Some(h) = hypothesis {
        if !h.holds_for(a) {
            return Err(Error::Domain(format!("tuple does not satisfy {h:?}")));
        }
    }
    let tol = &opts.tolerance;
    let base = a.powered(1.0 - t)?;
    let le = log_euclidean(w, &base)?;

    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let (rp, _) = renyi_power_mean(t, z, w, &a.powered(p)?, &opts.solver)?;
        let (rm, _) = renyi_power_mean(t, z, w, &a.powered(-p)?, &opts.solver)?;
        let x_plus = rp.pow(1.0 / p)?;
        let x_minus = rm.pow(-1.0 / p)?;
        let mut verdicts = vec![NamedVerdict::new(
            "negative side ⪯ positive side",
            near_order_cmp(&x_minus, &x_plus, tol)?,
        )];
        match hypothesis {
            Some(RenyiHypothesis::BelowIdentity) => {
                let q = quasi_arithmetic(p, w, &base)?;
                verdicts.push(NamedVerdict::new(
                    "positive side ⪯ quasi(p) of powered tuple",
                    near_order_cmp(&x_plus, &q, tol)?,
                ));
                verdicts.push(NamedVerdict::new(
                    "log-euclidean ⪯ quasi(p) of powered tuple",
                    near_order_cmp(&le, &q, tol)?,
                ));
            }
            Some(RenyiHypothesis::AboveIdentity) => {
                let q = quasi_arithmetic(-p, w, &base)?;
                verdicts.push(NamedVerdict::new(
                    "quasi(-p) of powered tuple ⪯ negative side",
                    near_order_cmp(&q, &x_minus, tol)?,
                ));
                verdicts.push(NamedVerdict::new(
                    "quasi(-p) of powered tuple ⪯ log-euclidean",
                    near_order_cmp(&q, &le, tol)?,
                ));
            }
            None => {}
        }
        rows.push(LimitRow {
            parameter: p,
            distance: thompson_distance(&x_plus, &le)?,
            negative_distance: Some(thompson_distance(&x_minus, &le)?),
            verdicts,
        });
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    Ok(LimitStudyReport {
        study: format!("renyi-zero(t={t},z={z})"),
        parameter_name: "p".into(),
        estimated_order: estimate_order(p_grid, &errors),
        rows,
    })
}

/// For each `p` in a positive decreasing grid: `LE ⪯ Q_p`, `Q_{−p} ⪯ LE`,
/// and against the previous grid point `q > p`: `Q_p ⪯ Q_q` and
/// `Q_{−q} ⪯ Q_{−p}`. The row distance is `d_T(Q_p, LE)`.
pub fn qp_le_convergence_study(
    w: &WeightVector,
    a: &MatrixTuple,
    p_grid: &[f64],
    opts: &StudyOptions,
) -> Result<LimitStudyReport> {
    check_grid(p_grid, f64::INFINITY, f64::MIN_POSITIVE)?;
    let tol = &opts.tolerance;
    let le = log_euclidean(w, a)?;
    let mut rows = Vec::with_capacity(p_grid.len());
    let mut previous: Option<(HpdMatrix, HpdMatrix)> = None;
    for &p in p_grid {
        let qp = quasi_arithmetic(p, w, a)?;
        let qm = quasi_arithmetic(-p, w, a)?;
        let mut verdicts = vec![
            NamedVerdict::new("log-euclidean ⪯ quasi(p)", near_order_cmp(&le, &qp, tol)?),
            NamedVerdict::new("quasi(-p) ⪯ log-euclidean", near_order_cmp(&qm, &le, tol)?),
        ];
        if let Some((prev_p, prev_m)) = &previous {
            verdicts.push(NamedVerdict::new(
                "quasi(p) ⪯ quasi(previous p)",
                near_order_cmp(&qp, prev_p, tol)?,
            ));
            verdicts.push(NamedVerdict::new(
                "quasi(-previous p) ⪯ quasi(-p)",
                near_order_cmp(prev_m, &qm, tol)?,
            ));
        }
        rows.push(LimitRow {
            parameter: p,
            distance: thompson_distance(&qp, &le)?,
            negative_distance: Some(thompson_distance(&qm, &le)?),
            verdicts,
        });
        previous = Some((qp, qm));
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    Ok(LimitStudyReport {
        study: "qp-le".into(),
        parameter_name: "p".into(),
        estimated_order: estimate_order(p_grid, &errors),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

    fn curves(hs: Vec<HermitianMatrix>) -> Vec<Curve> {
        hs.into_iter().map(Curve::new).collect()
    }

    #[test]
    fn curve_passes_through_identity() {
        let c = Curve::new(HermitianMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap());
        assert_eq!(c.eval(0.0).unwrap(), HpdMatrix::identity(2));
    }

    #[test]
    fn constant_curves_have_zero_error() {
        let cs = curves(vec![HermitianMatrix::zeros(2), HermitianMatrix::zeros(2)]);
        let w = WeightVector::uniform(2).unwrap();
        let r = lie_trotter_limit_study(&MultiMean::Arithmetic, &w, &cs, &GRID, &StudyOptions::default())
            .unwrap();
        assert!(r.distances().iter().all(|&e| e == 0.0));
        assert_eq!(r.estimated_order, None);
    }

    #[test]
    fn cancelling_generators() {
        let cs = curves(vec![
            HermitianMatrix::diagonal(&[1.0, -1.0]).unwrap(),
            HermitianMatrix::diagonal(&[-1.0, 1.0]).unwrap(),
        ]);
        let w = WeightVector::uniform(2).unwrap();
        let r = lie_trotter_limit_study(&MultiMean::Arithmetic, &w, &cs, &GRID, &StudyOptions::default())
            .unwrap();
        let e = r.distances();
        assert!(e.windows(2).all(|x| x[1] < x[0]));
        assert!(e[3] < 1e-2);
    }

    #[test]
    fn noncommuting_first_order() {
        let cs = curves(vec![
            HermitianMatrix::diagonal(&[1.0, -1.0]).unwrap(),
            HermitianMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap(),
        ]);
        let w = WeightVector::uniform(2).unwrap();
        for mean in [
            MultiMean::Arithmetic,
            MultiMean::Harmonic,
            MultiMean::Quasi { p: 0.5 },
            MultiMean::Quasi { p: -0.5 },
        ] {
            let r = lie_trotter_limit_study(&mean, &w, &cs, &GRID, &StudyOptions::default()).unwrap();
            let order = r.estimated_order.unwrap();
            assert!((0.7..=1.3).contains(&order), "{mean:?}: order {order}");
            assert!(r.distances().windows(2).all(|x| x[1] < x[0]));
            assert!(r.all_hold());
        }
    }

    #[test]
    fn grid_validation() {
        let cs = curves(vec![HermitianMatrix::zeros(2)]);
        let w = WeightVector::uniform(1).unwrap();
        let o = StudyOptions::default();
        let m = MultiMean::Arithmetic;
        assert!(lie_trotter_limit_study(&m, &w, &cs, &[0.01, 0.02], &o).is_err());
        assert!(lie_trotter_limit_study(&m, &w, &cs, &[1e-4], &o).is_err());
        assert!(lie_trotter_limit_study(&m, &w, &cs, &[], &o).is_err());
        assert!(lie_trotter_limit_study(&m, &w, &cs, &[1.0], &o).is_err());
    }

    #[test]
    fn commuting_qp_le() {
        let a = MatrixTuple::new(vec![
            HpdMatrix::diagonal(&[1.0, 4.0]).unwrap(),
            HpdMatrix::diagonal(&[9.0, 16.0]).unwrap(),
        ])
        .unwrap();
        let w = WeightVector::uniform(2).unwrap();
        let r = qp_le_convergence_study(&w, &a, &[0.5, 0.25, 0.125, 0.0625], &StudyOptions::default())
            .unwrap();
        assert!(r.all_hold());
        assert!(r.distances().windows(2).all(|x| x[1] < x[0]));
    }

    #[test]
    fn constant_tuple_qp_le() {
        let x = HpdMatrix::from_real_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
        let a = MatrixTuple::constant(x, 3).unwrap();
        let w = WeightVector::uniform(3).unwrap();
        let r = qp_le_convergence_study(&w, &a, &[0.5, 0.1], &StudyOptions::default()).unwrap();
        assert!(r.all_hold());
        assert!(r.verdicts().all(|v| v.verdict.margin.abs() < 1e-12));
    }

    #[test]
    fn renyi_hypothesis_is_checked() {
        let a = MatrixTuple::new(vec![HpdMatrix::diagonal(&[0.5, 2.0]).unwrap()]).unwrap();
        let w = WeightVector::uniform(1).unwrap();
        assert_eq!(RenyiHypothesis::detect(&a), None);
        let r = renyi_zero_limit_study(
            0.4,
            0.9,
            &w,
            &a,
            &[0.1],
            Some(RenyiHypothesis::BelowIdentity),
            &StudyOptions::default(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn renyi_zero_commuting_below_identity() {
        let a = MatrixTuple::new(vec![
            HpdMatrix::diagonal(&[0.2, 0.9]).unwrap(),
            HpdMatrix::diagonal(&[0.5, 0.3]).unwrap(),
        ])
        .unwrap();
        let w = WeightVector::new(vec![0.4, 0.6]).unwrap();
        let h = RenyiHypothesis::detect(&a);
        assert_eq!(h, Some(RenyiHypothesis::BelowIdentity));
        let r = renyi_zero_limit_study(0.4, 0.9, &w, &a, &[0.2, 0.1, 0.05], h, &StudyOptions::default())
            .unwrap();
        assert!(r.all_hold(), "{r:?}");
        assert!(r.worst_margin() >= -1e-9);
    }
}
