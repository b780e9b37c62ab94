//! Open multicomponent solutions.
//!
//! `G(T, p, N) = Σ N_i μ_i` with `μ_i = μ*_i(T, p) + RT ln x_i + RT ln γ_i`.
//! The Gibbs metric on `(T, p, N_1, …, N_r)` is bordered: a bulk block in
//! `(T, p)`, border columns of partial molar entropies and volumes, and the
//! interior block `∂μ_i/∂N_k`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::MetricValue;
use crate::numdiff::StatePoint;
use crate::reaction::R_GAS;
use crate::standard::StandardPotential;

/// Relative step of the finite-difference fallback for activity derivatives.
pub const ACTIVITY_FD_STEP: f64 = 1e-5;

/// Tolerance for asymmetry of the deviation block before it is symmetrized.
pub const DEVIATION_SYMMETRY_TOL: f64 = 1e-6;

/// Activity coefficients of a solution, through `ln γ_i`.
///
/// Only [`ActivityModel::ln_gamma`] is required. The derivatives default to
/// central differences; models with closed forms should override them.
pub trait ActivityModel: Send + Sync {
    fn ln_gamma(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>>;

    /// `(∂ln γ_i/∂N_k)_{T,p}`, row `i`, column `k`.
    fn dln_gamma_dn(&self, t: f64, p: f64, n: &[f64]) -> Result<Matrix> {
        let r = n.len();
        let mut m = Matrix::zeros(r);
        for k in 0..r {
            let h = ACTIVITY_FD_STEP * n[k].abs().max(f64::EPSILON.sqrt());
            let mut up = n.to_vec();
            let mut down = n.to_vec();
            up[k] += h;
            down[k] -= h;
            let (a, b) = (self.ln_gamma(t, p, &up)?, self.ln_gamma(t, p, &down)?);
            for i in 0..r {
                m[(i, k)] = (a[i] - b[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }

    fn dln_gamma_dt(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>> {
        let h = ACTIVITY_FD_STEP * t.abs().max(1.0);
        let (a, b) = (self.ln_gamma(t + h, p, n)?, self.ln_gamma(t - h, p, n)?);
        Ok(a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    }

    fn dln_gamma_dp(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>> {
        let h = ACTIVITY_FD_STEP * p.abs().max(1.0);
        let (a, b) = (self.ln_gamma(t, p + h, n)?, self.ln_gamma(t, p - h, n)?);
        Ok(a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    }
}

/// One-parameter Margules binary: `ln γ_1 = (A/RT) x_2²`, `ln γ_2 = (A/RT) x_1²`,
/// from `G_ex = A N_1 N_2 / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MargulesBinary {
    pub a: f64,
}

impl MargulesBinary {
    fn fractions(n: &[f64]) -> Result<(f64, f64, f64)> {
        if n.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: n.len(),
            });
        }
        let total = n[0] + n[1];
        Ok((n[0] / total, n[1] / total, total))
    }
}

impl ActivityModel for MargulesBinary {
    fn ln_gamma(&self, t: f64, _p: f64, n: &[f64]) -> Result<Vec<f64>> {
        let (x1, x2, _) = Self::fractions(n)?;
        let k = self.a / (R_GAS * t);
        Ok(vec![k * x2 * x2, k * x1 * x1])
    }

    fn dln_gamma_dn(&self, t: f64, _p: f64, n: &[f64]) -> Result<Matrix> {
        let (x1, x2, total) = Self::fractions(n)?;
        let k = 2.0 * self.a / (R_GAS * t * total);
        Matrix::from_rows(&[
            vec![-k * x2 * x2, k * x1 * x2],
            vec![k * x1 * x2, -k * x1 * x1],
        ])
    }

    fn dln_gamma_dt(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>> {
        Ok(self.ln_gamma(t, p, n)?.iter().map(|g| -g / t).collect())
    }

    fn dln_gamma_dp(&self, _t: f64, _p: f64, n: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; n.len()])
    }
}

/// Activity model given only by `ln γ_i`; every derivative is taken by
/// central differences.
pub struct FdActivity<F>(pub F);

impl<F> ActivityModel for FdActivity<F>
where
    F: Fn(f64, f64, &[f64]) -> Vec<f64> + Send + Sync,
{
    fn ln_gamma(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>> {
        let g = (self.0)(t, p, n);
        if g.len() != n.len() {
            return Err(Error::DimensionMismatch {
                expected: n.len(),
                found: g.len(),
            });
        }
        Ok(g)
    }
}

/// Mole numbers, standard potentials and an optional activity model.
#[derive(Clone)]
pub struct SolutionSpec {
    moles: Vec<f64>,
    mu_star: Vec<StandardPotential>,
    activity: Option<Arc<dyn ActivityModel>>,
}

impl fmt::Debug for SolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionSpec")
            .field("moles", &self.moles)
            .field("mu_star", &self.mu_star)
            .field("activity", &self.activity.as_ref().map(|_| "<model>"))
            .finish()
    }
}

/// Bulk response terms `(C_p, αV, k_T V)` of the whole solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkResponse {
    pub c_p: f64,
    pub alpha_v: f64,
    pub k_t_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialMolarSet {
    pub entropy: Vec<f64>,
    pub volume: Vec<f64>,
    /// `∂μ_i/∂N_k`
    pub mu_bar: Matrix,
}

/// Interior block split into its ideal and activity parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub ideal: Matrix,
    pub deviation: Matrix,
}

impl Decomposition {
    pub fn total(&self) -> Matrix {
        self.ideal.add(&self.deviation)
    }
}

impl SolutionSpec {
    pub fn new(moles: Vec<f64>, mu_star: Vec<StandardPotential>) -> Result<Self> {
        if moles.is_empty() {
            return Err(Error::InvalidParameter(
                "a solution needs at least one species".into(),
            ));
        }
        if mu_star.len() != moles.len() {
            return Err(Error::DimensionMismatch {
                expected: moles.len(),
                found: mu_star.len(),
            });
        }
        if let Some(bad) = moles.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return Err(Error::Domain(format!("mole number {bad} must be > 0")));
        }
        Ok(Self {
            moles,
            mu_star,
            activity: None,
        })
    }

    /// An ideal solution with all standard potentials zero.
    pub fn ideal(moles: Vec<f64>) -> Result<Self> {
        let r = moles.len();
        Self::new(moles, vec![StandardPotential::default(); r])
    }

    pub fn with_activity(mut self, model: impl ActivityModel + 'static) -> Self {
        self.activity = Some(Arc::new(model));
        self
    }

    pub fn with_moles(&self, moles: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(moles, self.mu_star.clone())?;
        out.activity = self.activity.clone();
        Ok(out)
    }

    pub fn species(&self) -> usize {
        self.moles.len()
    }

    pub fn moles(&self) -> &[f64] {
        &self.moles
    }

    pub fn total_moles(&self) -> f64 {
        self.moles.iter().sum()
    }

    pub fn is_ideal(&self) -> bool {
        self.activity.is_none()
    }

    fn check(t: f64, p: f64) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("T = {t} must be > 0")));
        }
        if !p.is_finite() {
            return Err(Error::Domain(format!("p = {p} must be finite")));
        }
        Ok(())
    }

    fn ln_gamma(&self, t: f64, p: f64, n: &[f64]) -> Result<Vec<f64>> {
        match &self.activity {
            Some(m) => m.ln_gamma(t, p, n),
            None => Ok(vec![0.0; n.len()]),
        }
    }

    /// `G = Σ N_i (μ*_i + RT ln x_i + RT ln γ_i)` at arbitrary positive mole numbers.
    pub fn gibbs_at(&self, t: f64, p: f64, n: &[f64]) -> Result<f64> {
        Self::check(t, p)?;
        if n.len() != self.species() {
            return Err(Error::DimensionMismatch {
                expected: self.species(),
                found: n.len(),
            });
        }
        if let Some(bad) = n.iter().find(|x| !(**x > 0.0)) {
            return Err(Error::Domain(format!("mole number {bad} must be > 0")));
        }
        let total: f64 = n.iter().sum();
        let rt = R_GAS * t;
        let lg = self.ln_gamma(t, p, n)?;
        Ok(n.iter()
            .zip(&self.mu_star)
            .zip(&lg)
            .map(|((&ni, mu), g)| ni * (mu.at(t, p).value + rt * ((ni / total).ln() + g)))
            .sum())
    }

    pub fn gibbs(&self, t: f64, p: f64) -> Result<f64> {
        self.gibbs_at(t, p, &self.moles)
    }

    /// Chemical potentials `μ_i`.
    pub fn chemical_potentials(&self, t: f64, p: f64) -> Result<Vec<f64>> {
        Self::check(t, p)?;
        let total = self.total_moles();
        let rt = R_GAS * t;
        let lg = self.ln_gamma(t, p, &self.moles)?;
        Ok(self
            .moles
            .iter()
            .zip(&self.mu_star)
            .zip(&lg)
            .map(|((&ni, mu), g)| mu.at(t, p).value + rt * ((ni / total).ln() + g))
            .collect())
    }

    pub fn partial_molars(&self, t: f64, p: f64) -> Result<PartialMolarSet> {
        Self::check(t, p)?;
        let n = &self.moles;
        let r = n.len();
        let total = self.total_moles();
        let rt = R_GAS * t;
        let mut entropy = Vec::with_capacity(r);
        let mut volume = Vec::with_capacity(r);
        let (lg, lg_t, lg_p) = match &self.activity {
            Some(m) => (
                m.ln_gamma(t, p, n)?,
                m.dln_gamma_dt(t, p, n)?,
                m.dln_gamma_dp(t, p, n)?,
            ),
            None => (vec![0.0; r], vec![0.0; r], vec![0.0; r]),
        };
        for i in 0..r {
            let mu = self.mu_star[i].at(t, p);
            entropy.push(-(mu.t + R_GAS * (n[i] / total).ln() + R_GAS * lg[i] + rt * lg_t[i]));
            volume.push(mu.p + rt * lg_p[i]);
        }
        let d = self.decomposition(t, p)?;
        Ok(PartialMolarSet {
            entropy,
            volume,
            mu_bar: d.total(),
        })
    }

    /// `RT (δ_ik/N_i − 1/N)`, which annihilates the mole vector.
    pub fn ideal_block(&self, t: f64) -> Matrix {
        let total = self.total_moles();
        let rt = R_GAS * t;
        let n = &self.moles;
        Matrix::from_fn(n.len(), |i, k| {
            let diagonal = if i == k { 1.0 / n[i] } else { 0.0 };
            rt * (diagonal - 1.0 / total)
        })
    }

    /// Ideal block and `RT ∂ln γ_i/∂N_k`; the latter is zero without an activity model.
    pub fn decomposition(&self, t: f64, p: f64) -> Result<Decomposition> {
        Self::check(t, p)?;
        let ideal = self.ideal_block(t);
        let r = self.species();
        let deviation = match &self.activity {
            None => Matrix::zeros(r),
            Some(m) => {
                let mut d = m.dln_gamma_dn(t, p, &self.moles)?.scale(R_GAS * t);
                if d.dim() != r {
                    return Err(Error::DimensionMismatch {
                        expected: r,
                        found: d.dim(),
                    });
                }
                if let Some((i, j)) = d.asymmetry(DEVIATION_SYMMETRY_TOL) {
                    return Err(Error::Asymmetric {
                        what: "activity deviation block",
                        i,
                        j,
                        a: d[(i, j)],
                        b: d[(j, i)],
                    });
                }
                d.symmetrize();
                d
            }
        };
        Ok(Decomposition { ideal, deviation })
    }

    /// Bulk terms consistent with `G`: `C_p = −T G_TT`, `αV = G_Tp`, `k_T V = −G_pp`.
    ///
    /// The standard potentials contribute analytically; the activity part by
    /// central differences of the excess Gibbs energy.
    pub fn bulk_response(&self, t: f64, p: f64) -> Result<BulkResponse> {
        Self::check(t, p)?;
        let (mut g_tt, mut g_tp, mut g_pp) = (0.0, 0.0, 0.0);
        for (ni, mu) in self.moles.iter().zip(&self.mu_star) {
            let d = mu.at(t, p);
            g_tt += ni * d.tt;
            g_tp += ni * d.tp;
            g_pp += ni * d.pp;
        }
        if self.activity.is_some() {
            let excess = |tt: f64, pp: f64| -> Result<f64> {
                let lg = self.ln_gamma(tt, pp, &self.moles)?;
                Ok(R_GAS * tt * self.moles.iter().zip(&lg).map(|(n, g)| n * g).sum::<f64>())
            };
            let ht = 1e-3 * t.abs().max(1.0);
            let hp = 1e-3 * p.abs().max(1.0);
            let e0 = excess(t, p)?;
            g_tt += (excess(t + ht, p)? - 2.0 * e0 + excess(t - ht, p)?) / (ht * ht);
            g_pp += (excess(t, p + hp)? - 2.0 * e0 + excess(t, p - hp)?) / (hp * hp);
            g_tp += (excess(t + ht, p + hp)? - excess(t + ht, p - hp)? - excess(t - ht, p + hp)?
                + excess(t - ht, p - hp)?)
                / (4.0 * ht * hp);
        }
        Ok(BulkResponse {
            c_p: -t * g_tt,
            alpha_v: g_tp,
            k_t_v: -g_pp,
        })
    }

    /// `(r+2)×(r+2)` Gibbs metric on `(T, p, N_1, …, N_r)`.
    pub fn open_system_metric(&self, bulk: &BulkResponse, t: f64, p: f64) -> Result<MetricValue> {
        let pm = self.partial_molars(t, p)?;
        let r = self.species();
        let g = Matrix::from_fn(r + 2, |i, j| match (i, j) {
            (0, 0) => -bulk.c_p / t,
            (0, 1) | (1, 0) => bulk.alpha_v,
            (1, 1) => -bulk.k_t_v,
            (0, m) | (m, 0) => -pm.entropy[m - 2],
            (1, m) | (m, 1) => pm.volume[m - 2],
            (a, b) => pm.mu_bar[(a - 2, b - 2)],
        });
        let mut coords = vec![("T".to_string(), t), ("p".to_string(), p)];
        coords.extend(
            self.moles
                .iter()
                .enumerate()
                .map(|(i, &n)| (format!("N{}", i + 1), n)),
        );
        MetricValue::new(g, None, StatePoint::new(open_chart(r), coords)?)
    }

    /// `r×r` metric `∂μ_i/∂N_k` at fixed temperature and pressure.
    pub fn isothermal_isobaric_metric(&self, t: f64, p: f64) -> Result<MetricValue> {
        let g = self.decomposition(t, p)?.total();
        let coords = self
            .moles
            .iter()
            .enumerate()
            .map(|(i, &n)| (format!("N{}", i + 1), n))
            .collect();
        MetricValue::new(
            g,
            None,
            StatePoint::new(mole_chart(self.species()), coords)?,
        )
    }
}

fn mole_names(r: usize) -> String {
    (1..=r)
        .map(|i| format!("N{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// `(T,p,N1,…,Nr)`
pub fn open_chart(r: usize) -> String {
    format!("(T,p,{})", mole_names(r))
}

/// `(N1,…,Nr)`
pub fn mole_chart(r: usize) -> String {
    format!("({})", mole_names(r))
}
