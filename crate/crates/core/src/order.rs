//! Binary relations on the positive definite cone, decided with explicit
//! signed margins.
//!
//! Every comparison returns an [`OrderVerdict`] whose `margin` is the
//! extremal quantity the relation is about (a smallest eigenvalue, a minimal
//! partial sum, ...). The relation holds when `margin ≥ −tolerance`, where the
//! tolerance comes from a [`ToleranceProfile`] and is scaled by
//! `max(1, ‖A‖, ‖B‖)` unless scaling is switched off.
//!
//! The five relations form the implication chain
//!
//! ```text
//! A ≤ B  ⟹  log A ≤ log B  ⟹  A ⪯ B  ⟹  A ≤_λ B  ⟹  A ≺_wlog B
//! ```
//!
//! and [`relation_profile`] reports any break of that chain as a numerical
//! failure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpd::{check_same_dim, HpdMatrix};
use crate::pair::{inverse_geometric_mean, metric_geometric};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub psd_margin: f64,
    pub rel_scale: bool,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            psd_margin: 1e-9,
            rel_scale: true,
        }
    }
}

impl ToleranceProfile {
    pub fn new(psd_margin: f64, rel_scale: bool) -> Result<Self> {
        if !(psd_margin > 0.0 && psd_margin.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {psd_margin}"
            )));
        }
        Ok(Self {
            psd_margin,
            rel_scale,
        })
    }

    /// `psd_margin · max(1, ‖A‖, ‖B‖)` when scaling is on.
    pub fn effective(&self, a: &HpdMatrix, b: &HpdMatrix) -> f64 {
        if self.rel_scale {
            self.psd_margin * 1f64.max(a.operator_norm()).max(b.operator_norm())
        } else {
            self.psd_margin
        }
    }
}

/// The extremal quantity behind a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub quantity: String,
    pub value: f64,
    pub index: Option<usize>,
}

impl Witness {
    fn new(quantity: impl Into<String>, value: f64, index: Option<usize>) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub witness: Witness,
}

impl OrderVerdict {
    pub fn new(margin: f64, tolerance: f64, witness: Witness) -> Self {
        Self {
            holds: margin >= -tolerance,
            margin,
            tolerance,
            witness,
        }
    }

    /// Margin inside the ±tolerance band.
    pub fn is_boundary(&self) -> bool {
        self.margin.abs() <= self.tolerance
    }
}

/// `A ≤ B`: margin `λ_min(B − A)`.
pub fn loewner_cmp(a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = b.as_hermitian().sub(a.as_hermitian())?;
    let lmin = diff.min_eigenvalue()?;
    Ok(OrderVerdict::new(
        lmin,
        tol.effective(a, b),
        Witness::new("smallest eigenvalue of B - A", lmin, Some(0)),
    ))
}

/// Chaotic order `log A ≤ log B`: margin `λ_min(log B − log A)`.
pub fn chaotic_cmp(a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = b.log().sub(&a.log())?;
    let lmin = diff.min_eigenvalue()?;
    Ok(OrderVerdict::new(
        lmin,
        tol.effective(a, b),
        Witness::new("smallest eigenvalue of log B - log A", lmin, Some(0)),
    ))
}

/// Near-order `A ⪯ B ⟺ A^{-1} # B ≥ I`: margin `λ_min(A^{-1} # B) − 1`.
///
/// Cross-checked against the dual criterion `A # B^{-1} ≤ I`; if the two
/// margins land on opposite sides of the tolerance band the comparison is a
/// numerical failure.
pub fn near_order_cmp(a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let tolerance = tol.effective(a, b);
    let c = inverse_geometric_mean(a, b)?;
    let lmin = c.min_eigenvalue();
    let margin = lmin - 1.0;

    let dual = metric_geometric(a, &b.inv()?, 0.5)?;
    let dual_margin = 1.0 - dual.max_eigenvalue();
    if (margin > tolerance && dual_margin < -tolerance)
        || (margin < -tolerance && dual_margin > tolerance)
    {
        return Err(Error::Numerical(format!(
            "near-order criteria disagree: λ_min(A^-1 # B) - 1 = {margin:e}, 1 - λ_max(A # B^-1) = {dual_margin:e}"
        )));
    }
    Ok(OrderVerdict::new(
        margin,
        tolerance,
        Witness::new("smallest eigenvalue of A^-1 # B, minus 1", lmin, Some(0)),
    ))
}

/// Entrywise eigenvalue order `λ_i(A) ≤ λ_i(B)` (both sorted descending).
pub fn eigen_entrywise_cmp(
    a: &HpdMatrix,
    b: &HpdMatrix,
    tol: &ToleranceProfile,
) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let la = a.eigen().descending();
    let lb = b.eigen().descending();
    let (index, margin) = la
        .iter()
        .zip(&lb)
        .map(|(x, y)| y - x)
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("dim >= 1");
    Ok(OrderVerdict::new(
        margin,
        tol.effective(a, b),
        Witness::new("min over i of λ_i(B) - λ_i(A), descending", margin, Some(index)),
    ))
}

/// Spectral equality `A =_λ B`: margin `−max_i |λ_i(A) − λ_i(B)|`.
pub fn eigen_equal(a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let (index, gap) = a
        .eigenvalues()
        .iter()
        .zip(b.eigenvalues())
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("dim >= 1");
    let m = a.dim();
    Ok(OrderVerdict::new(
        -gap,
        tol.effective(a, b),
        Witness::new("max over i of |λ_i(A) - λ_i(B)|", gap, Some(m - 1 - index)),
    ))
}

/// Weak log-majorization `A ≺_wlog B`: margin
/// `min_k Σ_{i≤k} (log λ_i(B) − log λ_i(A))` over descending spectra.
///
/// With `strong` set the full sums must also agree within the tolerance
/// (log-majorization `≺_log`); the margin is then the smaller of the weak
/// margin and `−|Σ_i log λ_i(B) − Σ_i log λ_i(A)|`.
pub fn weak_log_majorization_cmp(
    a: &HpdMatrix,
    b: &HpdMatrix,
    tol: &ToleranceProfile,
    strong: bool,
) -> Result<OrderVerdict> {
    check_same_dim(a.dim(), b.dim())?;
    let la = a.eigen().descending();
    let lb = b.eigen().descending();
    let mut partial = 0.0;
    let mut weak = f64::INFINITY;
    let mut weak_k = 0;
    for (k, (x, y)) in la.iter().zip(&lb).enumerate() {
        partial += y.ln() - x.ln();
        if partial < weak {
            weak = partial;
            weak_k = k;
        }
    }
    let tolerance = tol.effective(a, b);
    if strong {
        let total_gap = -partial.abs();
        if total_gap < weak {
            return Ok(OrderVerdict::new(
                total_gap,
                tolerance,
                Witness::new("|log det B - log det A|", partial.abs(), None),
            ));
        }
    }
    Ok(OrderVerdict::new(
        weak,
        tolerance,
        Witness::new(
            "min over k of leading log-eigenvalue sums of B minus A",
            weak,
            Some(weak_k),
        ),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Loewner,
    Chaotic,
    Near,
    EigenEntrywise,
    WeakLogMajorization,
}

impl Relation {
    /// In implication order, strongest first.
    pub const CHAIN: [Relation; 5] = [
        Relation::Loewner,
        Relation::Chaotic,
        Relation::Near,
        Relation::EigenEntrywise,
        Relation::WeakLogMajorization,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Relation::Loewner => "loewner",
            Relation::Chaotic => "chaotic",
            Relation::Near => "near",
            Relation::EigenEntrywise => "eigen-entrywise",
            Relation::WeakLogMajorization => "weak-log-majorization",
        }
    }

    pub fn compare(&self, a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<OrderVerdict> {
        match self {
            Relation::Loewner => loewner_cmp(a, b, tol),
            Relation::Chaotic => chaotic_cmp(a, b, tol),
            Relation::Near => near_order_cmp(a, b, tol),
            Relation::EigenEntrywise => eigen_entrywise_cmp(a, b, tol),
            Relation::WeakLogMajorization => weak_log_majorization_cmp(a, b, tol, false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationProfile {
    pub loewner: OrderVerdict,
    pub chaotic: OrderVerdict,
    pub near: OrderVerdict,
    pub eigen_entrywise: OrderVerdict,
    pub weak_log_major: OrderVerdict,
}

/// A link of the implication chain whose antecedent holds and whose
/// consequent fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainViolation {
    pub antecedent: Relation,
    pub consequent: Relation,
    pub antecedent_margin: f64,
    pub consequent_margin: f64,
}

impl RelationProfile {
    pub fn verdict(&self, r: Relation) -> &OrderVerdict {
        match r {
            Relation::Loewner => &self.loewner,
            Relation::Chaotic => &self.chaotic,
            Relation::Near => &self.near,
            Relation::EigenEntrywise => &self.eigen_entrywise,
            Relation::WeakLogMajorization => &self.weak_log_major,
        }
    }

    /// Links `r_k ⟹ r_{k+1}` that break. An antecedent sitting inside its
    /// tolerance band is a boundary case and never counts.
    pub fn chain_violations(&self) -> Vec<ChainViolation> {
        Relation::CHAIN
            .windows(2)
            .filter_map(|w| {
                let ant = self.verdict(w[0]);
                let cons = self.verdict(w[1]);
                (ant.holds && !ant.is_boundary() && !cons.holds).then(|| ChainViolation {
                    antecedent: w[0],
                    consequent: w[1],
                    antecedent_margin: ant.margin,
                    consequent_margin: cons.margin,
                })
            })
            .collect()
    }
}

/// All five verdicts, without asserting the chain.
pub fn profile_relations(
    a: &HpdMatrix,
    b: &HpdMatrix,
    tol: &ToleranceProfile,
) -> Result<RelationProfile> {
    Ok(RelationProfile {
        loewner: loewner_cmp(a, b, tol)?,
        chaotic: chaotic_cmp(a, b, tol)?,
        near: near_order_cmp(a, b, tol)?,
        eigen_entrywise: eigen_entrywise_cmp(a, b, tol)?,
        weak_log_major: weak_log_majorization_cmp(a, b, tol, false)?,
    })
}

/// All five verdicts; a broken implication is a numerical failure carrying
/// the full profile.
pub fn relation_profile(a: &HpdMatrix, b: &HpdMatrix, tol: &ToleranceProfile) -> Result<RelationProfile> {
    let profile = profile_relations(a, b, tol)?;
    let violations = profile.chain_violations();
    if violations.is_empty() {
        Ok(profile)
    } else {
        Err(Error::Numerical(format!(
            "relation chain violated: {violations:?}; profile {profile:?}"
        )))
    }
}
