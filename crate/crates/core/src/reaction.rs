//! Chemical reactions in a closed system.
//!
//! Mole numbers follow `N_i = N_i⁰ + ν_i ξ`. The Gibbs metric lives on
//! `(T, p, ξ)`; at fixed temperature it reduces to `(p, ξ)`, and at fixed
//! temperature and pressure to the single number `d²G/dξ²`, whose sign is
//! decided by comparing the interaction term `W(ξ) = d/dξ ln Π γ_i^ν_i`
//! against `(Σν)²/N − Σ ν_i²/N_i`.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Tensor3};
use crate::metric::MetricValue;
use crate::numdiff::{Jet3, PotentialSurface, StatePoint};
use crate::scan::{brent_root, scan_1d, ScanResult};
use crate::standard::StandardPotential;

/// Molar gas constant, J/(mol K).
pub const R_GAS: f64 = 8.314462618;

/// Chart of the full reaction metric.
pub const REACTION_CHART: &str = "(T,p,ξ)";
/// Chart of the isothermal reaction metric.
pub const ISOTHERMAL_CHART: &str = "(p,ξ)";

#[derive(Debug, Clone, PartialEq)]
pub struct Stoichiometry {
    species: Vec<String>,
    nu: Vec<i32>,
    n0: Vec<f64>,
    molar_mass: Option<Vec<f64>>,
}

impl Stoichiometry {
    pub fn new(
        species: Vec<String>,
        nu: Vec<i32>,
        n0: Vec<f64>,
        molar_mass: Option<Vec<f64>>,
    ) -> Result<Self> {
        let r = species.len();
        for found in [nu.len(), n0.len()] {
            if found != r {
                return Err(Error::DimensionMismatch { expected: r, found });
            }
        }
        if !nu.iter().any(|&v| v < 0) || !nu.iter().any(|&v| v > 0) {
            return Err(Error::InvalidParameter(format!(
                "stoichiometry {nu:?} needs at least one reactant and one product"
            )));
        }
        if let Some(bad) = n0.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "initial moles {bad} must be ≥ 0"
            )));
        }
        if let Some(m) = &molar_mass {
            if m.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: m.len(),
                });
            }
            let balance: f64 = nu.iter().zip(m).map(|(&v, mm)| v as f64 * mm).sum();
            let size: f64 = nu.iter().zip(m).map(|(&v, mm)| (v as f64 * mm).abs()).sum();
            if balance.abs() > 1e-9 * size {
                return Err(Error::InvalidParameter(format!(
                    "mass is not conserved: Σ ν_i M_i = {balance}"
                )));
            }
        }
        Ok(Self {
            species,
            nu,
            n0,
            molar_mass,
        })
    }

    fn from_parts(species: &[&str], nu: &[i32], n0: &[f64], mass: Option<&[f64]>) -> Self {
        Self::new(
            species.iter().map(|s| s.to_string()).collect(),
            nu.to_vec(),
            n0.to_vec(),
            mass.map(<[f64]>::to_vec),
        )
        .expect("built-in stoichiometry is valid")
    }

    /// `2 H₂ + O₂ → 2 H₂O` from two moles of hydrogen and one of oxygen.
    pub fn synthesis() -> Self {
        Self::from_parts(
            &["H2", "O2", "H2O"],
            &[-2, -1, 2],
            &[2.0, 1.0, 0.0],
            Some(&[2.016, 31.998, 18.015]),
        )
    }

    /// `2 H₂O → 2 H₂ + O₂` from two moles of water.
    pub fn dissociation() -> Self {
        Self::from_parts(
            &["H2", "O2", "H2O"],
            &[2, 1, -2],
            &[0.0, 0.0, 2.0],
            Some(&[2.016, 31.998, 18.015]),
        )
    }

    /// `A + B → C + D` from one mole each of A and B.
    pub fn displacement() -> Self {
        Self::from_parts(
            &["A", "B", "C", "D"],
            &[-1, -1, 1, 1],
            &[1.0, 1.0, 0.0, 0.0],
            None,
        )
    }

    /// `A → B` from one mole of A.
    pub fn a_to_b() -> Self {
        Self::from_parts(&["A", "B"], &[-1, 1], &[1.0, 0.0], None)
    }

    pub const BUILTINS: [&'static str; 4] = ["synthesis", "dissociation", "displacement", "a-to-b"];

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "synthesis" => Ok(Self::synthesis()),
            "dissociation" => Ok(Self::dissociation()),
            "displacement" => Ok(Self::displacement()),
            "a-to-b" => Ok(Self::a_to_b()),
            other => Err(Error::InvalidParameter(format!(
                "unknown built-in reaction {other:?} (expected one of {:?})",
                Self::BUILTINS
            ))),
        }
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn nu(&self) -> &[i32] {
        &self.nu
    }

    pub fn n0(&self) -> &[f64] {
        &self.n0
    }

    pub fn molar_mass(&self) -> Option<&[f64]> {
        self.molar_mass.as_deref()
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn nu_sum(&self) -> f64 {
        self.nu.iter().map(|&v| v as f64).sum()
    }

    /// `[ξ_min, ξ_max]` on which every `N_i(ξ) ≥ 0`.
    pub fn feasibility(&self) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (&v, &n) in self.nu.iter().zip(&self.n0) {
            if v > 0 {
                lo = lo.max(-n / v as f64);
            } else if v < 0 {
                hi = hi.min(n / (-v) as f64);
            }
        }
        (lo, hi)
    }

    /// `N_i⁰ + ν_i ξ`, an error naming every species that would go negative.
    pub fn moles_at(&self, xi: f64) -> Result<Vec<f64>> {
        let n: Vec<f64> = self
            .n0
            .iter()
            .zip(&self.nu)
            .map(|(&n0, &v)| n0 + v as f64 * xi)
            .collect();
        let negative: Vec<String> = n
            .iter()
            .zip(&self.species)
            .filter(|(x, _)| **x < 0.0 || !x.is_finite())
            .map(|(_, s)| s.clone())
            .collect();
        if negative.is_empty() {
            Ok(n)
        } else {
            Err(Error::InfeasibleExtent {
                xi,
                species: negative,
            })
        }
    }

    /// Mole numbers strictly inside the feasibility interval.
    ///
    /// Species that take part in the reaction must be present; the logarithms
    /// and `1/N_i` terms diverge otherwise.
    pub fn interior_moles(&self, xi: f64) -> Result<Vec<f64>> {
        let n = self.moles_at(xi)?;
        let vanishing: Vec<&str> = n
            .iter()
            .zip(&self.nu)
            .zip(&self.species)
            .filter(|((x, v), _)| **x == 0.0 && **v != 0)
            .map(|(_, s)| s.as_str())
            .collect();
        if !vanishing.is_empty() {
            return Err(Error::Domain(format!(
                "extent {xi} is on the boundary: no {}",
                vanishing.join(", ")
            )));
        }
        Ok(n)
    }
}

/// Interaction term `W(ξ) = d/dξ ln Π γ_i^ν_i` of a non-ideal mixture.
pub trait InteractionTerm {
    fn w(&self, xi: f64, t: f64) -> f64;

    /// Excess Gibbs energy and its ξ-derivative `RT ln Q_γ`, when known.
    fn excess_gibbs(&self, _xi: f64, _t: f64) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> f64> InteractionTerm for F {
    fn w(&self, xi: f64, _t: f64) -> f64 {
        self(xi)
    }
}

/// Regular-solution interaction for the binary `A → B` with one mole in total:
/// `G_ex = Ω ξ (1 − ξ)`, so `W = −2Ω/(RT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularInteraction {
    pub omega: f64,
}

impl InteractionTerm for RegularInteraction {
    fn w(&self, _xi: f64, t: f64) -> f64 {
        -2.0 * self.omega / (R_GAS * t)
    }

    fn excess_gibbs(&self, xi: f64, _t: f64) -> Option<(f64, f64)> {
        Some((self.omega * xi * (1.0 - xi), self.omega * (1.0 - 2.0 * xi)))
    }
}

struct Sums {
    total: f64,
    nu_sum: f64,
    // Σ ν²/N_i, Σ ν³/N_i²
    nu2_over_n: f64,
    nu3_over_n2: f64,
}

fn sums(s: &Stoichiometry, xi: f64) -> Result<Sums> {
    let n = s.interior_moles(xi)?;
    let mut out = Sums {
        total: n.iter().sum(),
        nu_sum: s.nu_sum(),
        nu2_over_n: 0.0,
        nu3_over_n2: 0.0,
    };
    for (&v, &ni) in s.nu.iter().zip(&n) {
        if v != 0 {
            let v = v as f64;
            out.nu2_over_n += v * v / ni;
            out.nu3_over_n2 += v * v * v / (ni * ni);
        }
    }
    Ok(out)
}

/// Curve of phase boundary: `(Σν)²/ΣN − Σ ν_i²/N_i`.
pub fn w_phase_boundary(s: &Stoichiometry, xi: f64) -> Result<f64> {
    let q = sums(s, xi)?;
    Ok(q.nu_sum * q.nu_sum / q.total - q.nu2_over_n)
}

/// `dW/dξ = −(Σν)³/N² + Σ ν_i³/N_i²` for the phase-boundary curve.
pub fn dw_dxi(s: &Stoichiometry, xi: f64) -> Result<f64> {
    let q = sums(s, xi)?;
    Ok(-q.nu_sum.powi(3) / (q.total * q.total) + q.nu3_over_n2)
}

/// `d ln Q_c / dξ = Σ ν_i²/N_i − (Σν)²/ΣN`.
pub fn dlnqc_dxi(s: &Stoichiometry, xi: f64) -> Result<f64> {
    Ok(-w_phase_boundary(s, xi)?)
}

/// `d²G/dξ² = RT [Σ ν_i²/N_i − (Σν)²/ΣN + W(ξ)]`; `W = 0` for an ideal mixture.
pub fn d2g_dxi2(
    s: &Stoichiometry,
    xi: f64,
    t: f64,
    interaction: Option<&dyn InteractionTerm>,
) -> Result<f64> {
    check_temperature(t)?;
    let w = interaction.map_or(0.0, |f| f.w(xi, t));
    Ok(R_GAS * t * (dlnqc_dxi(s, xi)? + w))
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("T = {t} must be > 0")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    /// `d²G/dξ² > 0`: locally stable.
    Convex,
    /// `d²G/dξ² < 0`: locally unstable.
    Concave,
    /// On the phase-boundary curve.
    Critical,
}

/// Compares an interaction value against the phase-boundary curve.
pub fn classify(s: &Stoichiometry, xi: f64, w: f64) -> Result<Convexity> {
    let boundary = w_phase_boundary(s, xi)?;
    let gap = w - boundary;
    if gap.abs() <= 1e-12 * w.abs().max(boundary.abs()) {
        Ok(Convexity::Critical)
    } else if gap > 0.0 {
        Ok(Convexity::Convex)
    } else {
        Ok(Convexity::Concave)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quotient {
    /// `Π x_i^ν_i`
    pub q_c: f64,
    /// `Q_γ Q_c`; equal to `q_c` for an ideal mixture, absent when the
    /// interaction term does not supply `ln Q_γ`.
    pub q_a: Option<f64>,
    pub dlnqc_dxi: f64,
}

pub fn quotient_of_reaction(
    s: &Stoichiometry,
    xi: f64,
    t: f64,
    interaction: Option<&dyn InteractionTerm>,
) -> Result<Quotient> {
    check_temperature(t)?;
    let n = s.interior_moles(xi)?;
    let total: f64 = n.iter().sum();
    let ln_qc: f64 =
        s.nu.iter()
            .zip(&n)
            .filter(|(v, _)| **v != 0)
            .map(|(&v, &ni)| v as f64 * (ni / total).ln())
            .sum();
    let q_c = ln_qc.exp();
    let q_a = match interaction {
        None => Some(q_c),
        Some(f) => f
            .excess_gibbs(xi, t)
            .map(|(_, rt_ln_qg)| (ln_qc + rt_ln_qg / (R_GAS * t)).exp()),
    };
    Ok(Quotient {
        q_c,
        q_a,
        dlnqc_dxi: dlnqc_dxi(s, xi)?,
    })
}

/// `K_a = exp(−Δ_rGθ / RT)`.
pub fn equilibrium_constant(delta_g_theta: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    Ok((-delta_g_theta / (R_GAS * t)).exp())
}

/// Location of the extremum of the phase-boundary curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalExtent {
    Extremum { xi: f64, w: f64, scan: ScanResult },
    Monotone { scan: ScanResult },
}

impl CriticalExtent {
    /// `(ξ*, W*)` when an extremum exists.
    pub fn point(&self) -> Option<(f64, f64)> {
        match self {
            CriticalExtent::Extremum { xi, w, .. } => Some((*xi, *w)),
            CriticalExtent::Monotone { .. } => None,
        }
    }

    pub fn scan(&self) -> &ScanResult {
        match self {
            CriticalExtent::Extremum { scan, .. } | CriticalExtent::Monotone { scan } => scan,
        }
    }
}

/// Relative margin trimmed from each end of the feasibility interval.
pub const EXTENT_MARGIN: f64 = 1e-4;

/// Scans `dW/dξ` across the feasibility interval (trimmed by [`EXTENT_MARGIN`])
/// and returns the root where `|W|` is smallest.
pub fn critical_extent(s: &Stoichiometry) -> Result<CriticalExtent> {
    let (lo, hi) = s.feasibility();
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "feasibility interval [{lo}, {hi}] is not a bounded interval"
        )));
    }
    let margin = EXTENT_MARGIN * (hi - lo);
    let f = |xi: f64| dw_dxi(s, xi).unwrap_or(f64::NAN);
    let scan = scan_1d(f, lo + margin, hi - margin, 2001)?;
    let best = scan
        .roots
        .iter()
        .filter_map(|r| w_phase_boundary(s, r.x).ok().map(|w| (r.x, w)))
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
    Ok(match best {
        Some((xi, w)) => CriticalExtent::Extremum { xi, w, scan },
        None => CriticalExtent::Monotone { scan },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsSample {
    pub xi: f64,
    pub g: f64,
    pub dg_dxi: f64,
    pub d2g_dxi2: f64,
}

/// `G(ξ)` of a gas mixture at the standard pressure, with its first two derivatives.
///
/// `mu_theta` holds `μθ_i(T)` per species. Without an interaction term the
/// mixture is ideal; with one, its excess Gibbs energy is added when known.
pub fn gibbs_profile(
    s: &Stoichiometry,
    t: f64,
    mu_theta: &[f64],
    interaction: Option<&dyn InteractionTerm>,
    xis: &[f64],
) -> Result<Vec<GibbsSample>> {
    check_temperature(t)?;
    if mu_theta.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: mu_theta.len(),
        });
    }
    let rt = R_GAS * t;
    let delta_theta: f64 = s.nu.iter().zip(mu_theta).map(|(&v, m)| v as f64 * m).sum();
    xis.iter()
        .map(|&xi| {
            let n = s.interior_moles(xi)?;
            let total: f64 = n.iter().sum();
            let mut g: f64 = n
                .iter()
                .zip(mu_theta)
                .map(|(&ni, &m)| {
                    if ni > 0.0 {
                        ni * (m + rt * (ni / total).ln())
                    } else {
                        0.0
                    }
                })
                .sum();
            let q = quotient_of_reaction(s, xi, t, None)?;
            let mut dg = delta_theta + rt * q.q_c.ln();
            if let Some(f) = interaction {
                match f.excess_gibbs(xi, t) {
                    Some((ex, dex)) => {
                        g += ex;
                        dg += dex;
                    }
                    None => {
                        return Err(Error::InvalidParameter(
                            "interaction term supplies no excess Gibbs energy".into(),
                        ))
                    }
                }
            }
            Ok(GibbsSample {
                xi,
                g,
                dg_dxi: dg,
                d2g_dxi2: d2g_dxi2(s, xi, t, interaction)?,
            })
        })
        .collect()
}

/// Bulk response terms and reaction properties entering the Gibbs metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionMetricInputs {
    pub c_p: f64,
    /// `α V`
    pub alpha_v: f64,
    /// `k_T V`
    pub k_t_v: f64,
    /// `Δ_r S`
    pub delta_s: f64,
    /// `Δ_r V`
    pub delta_v: f64,
    /// `(∂A/∂ξ)_{T,p}`
    pub da_dxi: f64,
    /// `A = −Δ_r G`
    pub affinity: f64,
}

impl ReactionMetricInputs {
    /// `(∂A/∂ξ)_{T,p} ≤ 0`, the condition for local stability in ξ.
    pub fn is_stable(&self) -> bool {
        self.da_dxi <= 0.0
    }

    fn check(&self) -> Result<()> {
        let all = [
            self.c_p,
            self.alpha_v,
            self.k_t_v,
            self.delta_s,
            self.delta_v,
            self.da_dxi,
            self.affinity,
        ];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "non-finite reaction inputs {self:?}"
            )))
        }
    }
}

/// The 3×3 Gibbs metric on `(T, p, ξ)` assembled from response functions.
pub fn gibbs_reaction_metric(
    inp: &ReactionMetricInputs,
    t: f64,
    p: f64,
    xi: f64,
) -> Result<MetricValue> {
    check_temperature(t)?;
    inp.check()?;
    let g = Matrix::from_rows(&[
        vec![-inp.c_p / t, inp.alpha_v, -inp.delta_s],
        vec![inp.alpha_v, -inp.k_t_v, inp.delta_v],
        vec![-inp.delta_s, inp.delta_v, -inp.da_dxi],
    ])?;
    let point = StatePoint::from_values(REACTION_CHART, &["T", "p", "ξ"], &[t, p, xi])?;
    MetricValue::new(g, None, point)
}

/// The determinant of the Gibbs metric in reduced form,
/// `−(C_v k_T V / T) A' + (C_v/T)(Δ_rV)² + k_T V [Δ_rS − (αV / k_T V) Δ_rV]²`
/// with `C_v = C_p − T (αV)² / (k_T V)`.
pub fn reduced_determinant(inp: &ReactionMetricInputs, t: f64) -> Result<f64> {
    check_temperature(t)?;
    inp.check()?;
    if inp.k_t_v == 0.0 {
        return Err(Error::Divergent {
            what: "reduced determinant",
            denominator: inp.k_t_v,
        });
    }
    let c_v = inp.c_p - t * inp.alpha_v * inp.alpha_v / inp.k_t_v;
    let shifted = inp.delta_s - inp.alpha_v / inp.k_t_v * inp.delta_v;
    Ok(-c_v * inp.k_t_v / t * inp.da_dxi
        + c_v / t * inp.delta_v * inp.delta_v
        + inp.k_t_v * shifted * shifted)
}

/// The 2×2 isothermal Gibbs metric on `(p, ξ)` from response functions.
pub fn isothermal_metric(inp: &ReactionMetricInputs, p: f64, xi: f64) -> Result<MetricValue> {
    inp.check()?;
    let g = Matrix::from_rows(&[
        vec![-inp.k_t_v, inp.delta_v],
        vec![inp.delta_v, -inp.da_dxi],
    ])?;
    let point = StatePoint::from_values(ISOTHERMAL_CHART, &["p", "ξ"], &[p, xi])?;
    MetricValue::new(g, None, point)
}

/// `G(p, ξ) = Σ N_i (μθ_i + RT ln(x_i p / pθ))` of an ideal-gas mixture at
/// fixed temperature, with derivatives through third order.
pub fn ideal_isothermal_jet(
    s: &Stoichiometry,
    t: f64,
    p: f64,
    p_ref: f64,
    mu_theta: &[f64],
    xi: f64,
) -> Result<Jet3> {
    check_temperature(t)?;
    check_pressure(p, p_ref)?;
    if mu_theta.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: mu_theta.len(),
        });
    }
    let rt = R_GAS * t;
    let n = s.interior_moles(xi)?;
    let q = sums(s, xi)?;
    let total = q.total;
    let ln_p = (p / p_ref).ln();
    let value: f64 = n
        .iter()
        .zip(mu_theta)
        .map(|(&ni, &m)| {
            if ni > 0.0 {
                ni * (m + rt * ((ni / total).ln() + ln_p))
            } else {
                0.0
            }
        })
        .sum();
    let delta_theta: f64 = s.nu.iter().zip(mu_theta).map(|(&v, m)| v as f64 * m).sum();
    let ln_qc: f64 =
        s.nu.iter()
            .zip(&n)
            .filter(|(v, _)| **v != 0)
            .map(|(&v, &ni)| v as f64 * (ni / total).ln())
            .sum();
    let grad = vec![total * rt / p, delta_theta + rt * (ln_qc + q.nu_sum * ln_p)];
    let g_xx = q.nu2_over_n - q.nu_sum * q.nu_sum / total;
    let hess = Matrix::from_rows(&[
        vec![-total * rt / (p * p), rt * q.nu_sum / p],
        vec![rt * q.nu_sum / p, rt * g_xx],
    ])?;
    let g_xxx = q.nu_sum.powi(3) / (total * total) - q.nu3_over_n2;
    let third = Tensor3::from_fn(2, |i, j, k| match i + j + k {
        0 => 2.0 * total * rt / p.powi(3),
        1 => -rt * q.nu_sum / (p * p),
        2 => 0.0,
        _ => rt * g_xxx,
    });
    Jet3::new(value, grad, hess, third)
}

fn check_pressure(p: f64, p_ref: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() && p_ref > 0.0 && p_ref.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "pressures p = {p}, pθ = {p_ref} must be > 0"
        )))
    }
}

/// Isothermal Gibbs metric of an ideal-gas mixture, with third derivatives.
pub fn ideal_isothermal_metric(s: &Stoichiometry, t: f64, p: f64, xi: f64) -> Result<MetricValue> {
    let mu = vec![0.0; s.len()];
    let jet = ideal_isothermal_jet(s, t, p, 1.0, &mu, xi)?;
    let point = StatePoint::from_values(ISOTHERMAL_CHART, &["p", "ξ"], &[p, xi])?;
    MetricValue::from_jet(jet, point)
}

/// Ideal `A → B` gas mixture with one mole in total:
/// `G = (1−ξ)μθ_A + ξμθ_B + RT ln(p/pθ) + RT[(1−ξ)ln(1−ξ) + ξ ln ξ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealBinaryMixture {
    pub mu_a: StandardPotential,
    pub mu_b: StandardPotential,
    pub p_ref: f64,
}

impl IdealBinaryMixture {
    fn check(&self, t: f64, p: f64, xi: f64) -> Result<()> {
        check_temperature(t)?;
        check_pressure(p, self.p_ref)?;
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::Domain(format!(
                "extent {xi} must lie strictly between 0 and 1 (the mixing entropy diverges)"
            )));
        }
        Ok(())
    }

    pub fn gibbs(&self, t: f64, p: f64, xi: f64) -> Result<f64> {
        Ok(self.jet(t, p, xi)?.value)
    }

    /// `G` and all derivatives through third order in `(T, p, ξ)`.
    pub fn jet(&self, t: f64, p: f64, xi: f64) -> Result<Jet3> {
        self.check(t, p, xi)?;
        let r = R_GAS;
        let a = self.mu_a.theta(t);
        let b = self.mu_b.theta(t);
        let y = 1.0 - xi;
        let mix = y * y.ln() + xi * xi.ln();
        let mix1 = (xi / y).ln();
        let mix2 = 1.0 / (xi * y);
        let mix3 = (2.0 * xi - 1.0) / (xi * xi * y * y);
        let ln_p = (p / self.p_ref).ln();

        let value = y * a[0] + xi * b[0] + r * t * ln_p + r * t * mix;
        let grad = vec![
            y * a[1] + xi * b[1] + r * ln_p + r * mix,
            r * t / p,
            b[0] - a[0] + r * t * mix1,
        ];
        let g_tt = y * a[2] + xi * b[2];
        let g_tx = b[1] - a[1] + r * mix1;
        let hess = Matrix::from_rows(&[
            vec![g_tt, r / p, g_tx],
            vec![r / p, -r * t / (p * p), 0.0],
            vec![g_tx, 0.0, r * t * mix2],
        ])?;
        // indices: 0 = T, 1 = p, 2 = ξ
        let third = Tensor3::from_fn(3, |i, j, k| {
            let mut c = [0usize; 3];
            for idx in [i, j, k] {
                c[idx] += 1;
            }
            match c {
                [3, 0, 0] => y * a[3] + xi * b[3],
                [2, 0, 1] => b[2] - a[2],
                [1, 2, 0] => -r / (p * p),
                [1, 0, 2] => r * mix2,
                [0, 3, 0] => 2.0 * r * t / p.powi(3),
                [0, 0, 3] => r * t * mix3,
                _ => 0.0,
            }
        });
        Jet3::new(value, grad, hess, third)
    }

    /// `G(T, p, ξ)` as an analytic surface.
    pub fn surface(&self) -> PotentialSurface {
        let mix = *self;
        PotentialSurface::analytic(REACTION_CHART, &["T", "p", "ξ"], move |x| {
            mix.jet(x[0], x[1], x[2])
        })
        .with_domain(move |x| mix.check(x[0], x[1], x[2]))
    }

    pub fn metric(&self, t: f64, p: f64, xi: f64) -> Result<MetricValue> {
        let jet = self.jet(t, p, xi)?;
        let point = StatePoint::from_values(REACTION_CHART, &["T", "p", "ξ"], &[t, p, xi])?;
        MetricValue::from_jet(jet, point)
    }

    /// Response-function form of the same state.
    pub fn reaction_inputs(&self, t: f64, p: f64, xi: f64) -> Result<ReactionMetricInputs> {
        let jet = self.jet(t, p, xi)?;
        Ok(ReactionMetricInputs {
            c_p: -t * jet.hess[(0, 0)],
            alpha_v: jet.hess[(0, 1)],
            k_t_v: -jet.hess[(1, 1)],
            delta_s: -jet.hess[(0, 2)],
            delta_v: jet.hess[(1, 2)],
            da_dxi: -jet.hess[(2, 2)],
            affinity: -jet.grad[2],
        })
    }

    /// `(RT/p²) [G_Tξ² − G_ξξ (G_TT + R/T)]`, the determinant of the metric.
    pub fn reduced_determinant(&self, t: f64, p: f64, xi: f64) -> Result<f64> {
        let jet = self.jet(t, p, xi)?;
        let (g_tt, g_tx, g_xx) = (jet.hess[(0, 0)], jet.hess[(0, 2)], jet.hess[(2, 2)]);
        Ok(R_GAS * t / (p * p) * (g_tx * g_tx - g_xx * (g_tt + R_GAS / t)))
    }
}

/// Stability of a fixed point of the logistic flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointStability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticCurve {
    /// `(Δ_rG, ξ)` pairs.
    pub samples: Vec<(f64, f64)>,
    pub equilibria: [(f64, FixedPointStability); 2],
}

/// Solution of `dξ/dΔ_rG = ξ(1 − ξ)/RT` through `ξ(0) = ξ₀`.
pub fn logistic_value(t: f64, xi0: f64, delta_g: f64) -> Result<f64> {
    check_temperature(t)?;
    if !(0.0..=1.0).contains(&xi0) {
        return Err(Error::Domain(format!(
            "initial extent {xi0} must lie in [0, 1]"
        )));
    }
    if xi0 == 0.0 || xi0 == 1.0 {
        return Ok(xi0);
    }
    let k = 1.0 / (R_GAS * t);
    Ok(1.0 / (1.0 + (1.0 - xi0) / xi0 * (-k * delta_g).exp()))
}

pub fn logistic_curve(t: f64, xi0: f64, dg_lo: f64, dg_hi: f64, n: usize) -> Result<LogisticCurve> {
    if !(dg_lo < dg_hi) || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need a non-empty range and at least 2 samples, got [{dg_lo}, {dg_hi}] with {n}"
        )));
    }
    let step = (dg_hi - dg_lo) / (n - 1) as f64;
    let samples = (0..n)
        .map(|i| {
            let g = if i == n - 1 {
                dg_hi
            } else {
                dg_lo + i as f64 * step
            };
            logistic_value(t, xi0, g).map(|x| (g, x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogisticCurve {
        samples,
        equilibria: [
            (0.0, FixedPointStability::Unstable),
            (1.0, FixedPointStability::Stable),
        ],
    })
}

/// Several simultaneous reactions over one species list.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    /// One row of coefficients per reaction.
    nu: Vec<Vec<i32>>,
    n0: Vec<f64>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, nu: Vec<Vec<i32>>, n0: Vec<f64>) -> Result<Self> {
        let r = species.len();
        if nu.is_empty() {
            return Err(Error::InvalidParameter(
                "a network needs at least one reaction".into(),
            ));
        }
        for row in &nu {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: row.len(),
                });
            }
        }
        if n0.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: n0.len(),
            });
        }
        Ok(Self { species, nu, n0 })
    }

    pub fn reactions(&self) -> usize {
        self.nu.len()
    }

    /// `N_i = N_i⁰ + Σ_n ν_in ξ_n`.
    pub fn moles_at(&self, xis: &[f64]) -> Result<Vec<f64>> {
        if xis.len() != self.nu.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nu.len(),
                found: xis.len(),
            });
        }
        let n: Vec<f64> = (0..self.species.len())
            .map(|i| {
                self.n0[i]
                    + self
                        .nu
                        .iter()
                        .zip(xis)
                        .map(|(row, x)| row[i] as f64 * x)
                        .sum::<f64>()
            })
            .collect();
        let bad: Vec<String> = n
            .iter()
            .zip(&self.species)
            .filter(|(x, _)| **x <= 0.0)
            .map(|(_, s)| s.clone())
            .collect();
        if bad.is_empty() {
            Ok(n)
        } else {
            Err(Error::InfeasibleExtent {
                xi: xis[0],
                species: bad,
            })
        }
    }

    /// Ideal-gas reaction block `RT [Σ_i ν_in ν_im / N_i − (Σν_n)(Σν_m)/N]`,
    /// which equals `−∂A_n/∂ξ_m`.
    pub fn ideal_reaction_block(&self, t: f64, xis: &[f64]) -> Result<Matrix> {
        check_temperature(t)?;
        let n = self.moles_at(xis)?;
        let total: f64 = n.iter().sum();
        let sums: Vec<f64> = self
            .nu
            .iter()
            .map(|row| row.iter().map(|&v| v as f64).sum())
            .collect();
        let l = self.nu.len();
        Ok(Matrix::from_fn(l, |a, b| {
            let direct: f64 = n
                .iter()
                .enumerate()
                .map(|(i, ni)| self.nu[a][i] as f64 * self.nu[b][i] as f64 / ni)
                .sum();
            R_GAS * t * (direct - sums[a] * sums[b] / total)
        }))
    }
}

/// Bulk terms and per-reaction data for the bordered multi-reaction metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiReactionInputs {
    pub c_p: f64,
    pub alpha_v: f64,
    pub k_t_v: f64,
    pub delta_s: Vec<f64>,
    pub delta_v: Vec<f64>,
    /// `∂A_n/∂ξ_m`; must be symmetric.
    pub affinity_jacobian: Matrix,
}

/// `(l+2)×(l+2)` Gibbs metric on `(T, p, ξ_1, …, ξ_l)`.
pub fn multireaction_metric(
    inp: &MultiReactionInputs,
    t: f64,
    p: f64,
    xis: &[f64],
) -> Result<MetricValue> {
    check_temperature(t)?;
    let l = inp.affinity_jacobian.dim();
    for found in [inp.delta_s.len(), inp.delta_v.len(), xis.len()] {
        if found != l {
            return Err(Error::DimensionMismatch { expected: l, found });
        }
    }
    let jac = &inp.affinity_jacobian;
    if let Some((i, j)) = jac.asymmetry(1e-9) {
        return Err(Error::Asymmetric {
            what: "affinity Jacobian",
            i,
            j,
            a: jac[(i, j)],
            b: jac[(j, i)],
        });
    }
    let g = Matrix::from_fn(l + 2, |i, j| match (i, j) {
        (0, 0) => -inp.c_p / t,
        (0, 1) | (1, 0) => inp.alpha_v,
        (1, 1) => -inp.k_t_v,
        (0, m) | (m, 0) => -inp.delta_s[m - 2],
        (1, m) | (m, 1) => inp.delta_v[m - 2],
        (a, b) => -jac[(a - 2, b - 2)],
    });
    let mut names = vec!["T".to_string(), "p".to_string()];
    names.extend((1..=l).map(|n| format!("ξ{n}")));
    let mut values = vec![t, p];
    values.extend_from_slice(xis);
    let coords = names.into_iter().zip(values).collect();
    let chart = format!(
        "(T,p,{})",
        (1..=l)
            .map(|n| format!("ξ{n}"))
            .collect::<Vec<_>>()
            .join(",")
    );
    MetricValue::new(g, None, StatePoint::new(chart, coords)?)
}

/// Extent at which `A → B`-type reactions with a constant interaction term
/// cross the phase-boundary curve on `(lo, hi)`, if they do.
pub fn boundary_crossing(s: &Stoichiometry, w: f64, lo: f64, hi: f64) -> Result<Option<f64>> {
    let f = |xi: f64| w - w_phase_boundary(s, xi).unwrap_or(f64::NAN);
    let (fa, fb) = (f(lo), f(hi));
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Ok(None);
    }
    brent_root(f, lo, hi, 1e-14, 0.0).map(Some)
}
