//! Single-component gases: ideal, van der Waals and Berthelot.
//!
//! States are addressed in the `(T, v)` chart. The Weinhold metric is the
//! Hessian of the molar energy `u(s, v)`; its entries are written in terms of
//! `(T, v)` and its derivatives reach the `(s, v)` chart through
//! `∂/∂s|_v = (T/c_V) ∂/∂T` and `∂/∂v|_s = ∂/∂v|_T − (T p_T / c_V) ∂/∂T`.
//!
//! The Berthelot gas uses the thermodynamically consistent potential
//! `s = c_v ln T + R ln(v − b) − a/(T² v)`, `u = c_v T − 2a/(T v)`, whose heat
//! capacity at constant volume is `c_V = c_v + 2a/(T² v)`. With a constant
//! `c_V` the Berthelot equation of state admits no energy function.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Tensor3};
use crate::metric::{degeneracy_ratio, MetricValue};
use crate::numdiff::{Jet3, PotentialSurface, StatePoint};
use crate::scan::{brent_root, scan_1d, ExtremumKind};

/// Chart label for the Weinhold metric.
pub const ENERGY_CHART: &str = "(s,v)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GasModel {
    Ideal,
    VanDerWaals,
    Berthelot,
}

impl FromStr for GasModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(GasModel::Ideal),
            "vdw" | "van-der-waals" | "vanderwaals" => Ok(GasModel::VanDerWaals),
            "berthelot" => Ok(GasModel::Berthelot),
            other => Err(Error::InvalidParameter(format!(
                "unknown gas model {other:?} (expected ideal, vdw or berthelot)"
            ))),
        }
    }
}

impl fmt::Display for GasModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GasModel::Ideal => "ideal",
            GasModel::VanDerWaals => "vdw",
            GasModel::Berthelot => "berthelot",
        })
    }
}

/// Constants fixing the zero of entropy. They never affect a metric or a curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub t0: f64,
    pub v0: f64,
    pub s0: f64,
}

impl Default for Reference {
    fn default() -> Self {
        Self {
            t0: 1.0,
            v0: 1.0,
            s0: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// Attraction constant.
    pub a: f64,
    /// Excluded molar volume.
    pub b: f64,
    /// Gas constant.
    pub r: f64,
    /// Constant part of the molar heat capacity at constant volume.
    pub cv: f64,
    pub reference: Reference,
}

impl GasParams {
    /// Default reference `T₀ = v₀ = 1`, `s₀ = 0`, except that `v₀ = 2b` once `b ≥ 1`
    /// so the reference state stays inside the domain.
    pub fn new(a: f64, b: f64, r: f64, cv: f64) -> Self {
        let mut reference = Reference::default();
        if b >= reference.v0 {
            reference.v0 = 2.0 * b;
        }
        Self {
            a,
            b,
            r,
            cv,
            reference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.r, self.cv]
            .iter()
            .chain([self.reference.t0, self.reference.v0, self.reference.s0].iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(format!(
                "non-finite gas parameter in {self:?}"
            )));
        }
        if self.a < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "a = {} must be ≥ 0",
                self.a
            )));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "b = {} must be ≥ 0",
                self.b
            )));
        }
        if self.r <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "R = {} must be > 0",
                self.r
            )));
        }
        if self.cv <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "c_v = {} must be > 0",
                self.cv
            )));
        }
        if self.reference.t0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "reference temperature {} must be > 0",
                self.reference.t0
            )));
        }
        Ok(())
    }
}

/// Equation-of-state derivatives and heat capacity at one `(T, v)` state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosDerivatives {
    pub p: f64,
    pub p_t: f64,
    pub p_v: f64,
    pub p_tt: f64,
    pub p_tv: f64,
    pub p_vv: f64,
    /// Magnitude of the terms summed into `p_v`, for judging when it vanishes.
    pub p_v_scale: f64,
    /// `c_V` and its `T` and `v` derivatives.
    pub heat: f64,
    pub heat_t: f64,
    pub heat_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseFunctions {
    pub t: f64,
    pub v: f64,
    pub c_v: f64,
    pub c_p: f64,
    /// Thermal expansion coefficient.
    pub alpha: f64,
    /// Isothermal compressibility.
    pub k_t: f64,
}

impl ResponseFunctions {
    pub fn heat_capacity_gap(&self) -> f64 {
        self.c_p - self.c_v
    }

    /// `v T α² / k_T`, which must equal [`Self::heat_capacity_gap`].
    pub fn gap_from_expansion(&self) -> f64 {
        self.v * self.t * self.alpha * self.alpha / self.k_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub p: f64,
    pub t: f64,
    pub v: f64,
}

/// Critical point located numerically as the extrema of the spinodal curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalScan {
    /// Where `T(v)` along the spinodal peaks.
    pub from_temperature: CriticalPoint,
    /// Where `p(v)` along the spinodal peaks.
    pub from_pressure: CriticalPoint,
}

/// One sample of the degeneracy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinodalPoint {
    pub v: f64,
    pub p: f64,
    pub t: f64,
    pub s: f64,
    /// `|det η| / scale²` of the Weinhold metric at the point.
    pub det_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gas {
    model: GasModel,
    params: GasParams,
}

impl Gas {
    /// For the ideal gas `a` and `b` are ignored and treated as zero.
    pub fn new(model: GasModel, params: GasParams) -> Result<Self> {
        params.validate()?;
        let params = match model {
            GasModel::Ideal => GasParams {
                a: 0.0,
                b: 0.0,
                ..params
            },
            _ => params,
        };
        if params.reference.v0 <= params.b {
            return Err(Error::InvalidParameter(format!(
                "reference volume {} must exceed b = {}",
                params.reference.v0, params.b
            )));
        }
        Ok(Self { model, params })
    }

    pub fn ideal(r: f64, cv: f64) -> Result<Self> {
        Self::new(GasModel::Ideal, GasParams::new(0.0, 0.0, r, cv))
    }

    pub fn van_der_waals(a: f64, b: f64, r: f64, cv: f64) -> Result<Self> {
        Self::new(GasModel::VanDerWaals, GasParams::new(a, b, r, cv))
    }

    pub fn berthelot(a: f64, b: f64, r: f64, cv: f64) -> Result<Self> {
        Self::new(GasModel::Berthelot, GasParams::new(a, b, r, cv))
    }

    pub fn model(&self) -> GasModel {
        self.model
    }

    pub fn params(&self) -> &GasParams {
        &self.params
    }

    pub fn check_state(&self, t: f64, v: f64) -> Result<()> {
        if !(t.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state T = {t}, v = {v}")));
        }
        if t <= 0.0 {
            return Err(Error::Domain(format!("T = {t} must be > 0")));
        }
        if v <= self.params.b {
            return Err(Error::Domain(format!(
                "v = {v} must exceed the excluded volume b = {}",
                self.params.b
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, t: f64, v: f64) -> Result<f64> {
        self.check_state(t, v)?;
        Ok(self.pressure_unchecked(t, v))
    }

    fn pressure_unchecked(&self, t: f64, v: f64) -> f64 {
        let GasParams { a, b, r, .. } = self.params;
        match self.model {
            GasModel::Ideal | GasModel::VanDerWaals => r * t / (v - b) - a / (v * v),
            GasModel::Berthelot => r * t / (v - b) - a / (t * v * v),
        }
    }

    pub fn derivatives(&self, t: f64, v: f64) -> Result<EosDerivatives> {
        self.check_state(t, v)?;
        let GasParams { a, b, r, cv, .. } = self.params;
        let w = v - b;
        let p = self.pressure_unchecked(t, v);
        Ok(match self.model {
            GasModel::Ideal | GasModel::VanDerWaals => EosDerivatives {
                p,
                p_t: r / w,
                p_v: -r * t / (w * w) + 2.0 * a / v.powi(3),
                p_tt: 0.0,
                p_tv: -r / (w * w),
                p_vv: 2.0 * r * t / w.powi(3) - 6.0 * a / v.powi(4),
                p_v_scale: r * t / (w * w) + 2.0 * a / v.powi(3),
                heat: cv,
                heat_t: 0.0,
                heat_v: 0.0,
            },
            GasModel::Berthelot => EosDerivatives {
                p,
                p_t: r / w + a / (t * t * v * v),
                p_v: -r * t / (w * w) + 2.0 * a / (t * v.powi(3)),
                p_tt: -2.0 * a / (t.powi(3) * v * v),
                p_tv: -r / (w * w) - 2.0 * a / (t * t * v.powi(3)),
                p_vv: 2.0 * r * t / w.powi(3) - 6.0 * a / (t * v.powi(4)),
                p_v_scale: r * t / (w * w) + 2.0 * a / (t * v.powi(3)),
                heat: cv + 2.0 * a / (t * t * v),
                heat_t: -4.0 * a / (t.powi(3) * v),
                heat_v: -2.0 * a / (t * t * v * v),
            },
        })
    }

    /// Molar heat capacity at constant volume at a state.
    pub fn heat_capacity(&self, t: f64, v: f64) -> Result<f64> {
        Ok(self.derivatives(t, v)?.heat)
    }

    pub fn entropy(&self, t: f64, v: f64) -> Result<f64> {
        self.check_state(t, v)?;
        Ok(self.entropy_unchecked(t, v))
    }

    fn entropy_unchecked(&self, t: f64, v: f64) -> f64 {
        let GasParams {
            a,
            b,
            r,
            cv,
            reference,
        } = self.params;
        let base =
            cv * (t / reference.t0).ln() + r * ((v - b) / (reference.v0 - b)).ln() + reference.s0;
        match self.model {
            GasModel::Ideal | GasModel::VanDerWaals => base,
            GasModel::Berthelot => {
                base - a / (t * t * v) + a / (reference.t0 * reference.t0 * reference.v0)
            }
        }
    }

    pub fn internal_energy(&self, t: f64, v: f64) -> Result<f64> {
        self.check_state(t, v)?;
        let GasParams { a, cv, .. } = self.params;
        Ok(match self.model {
            GasModel::Ideal | GasModel::VanDerWaals => cv * t - a / v,
            GasModel::Berthelot => cv * t - 2.0 * a / (t * v),
        })
    }

    /// Temperature at entropy `s` and volume `v`.
    ///
    /// Closed form for the ideal and van der Waals gases. The Berthelot entropy
    /// is solved for `ln T` by Newton steps kept inside a sign-change bracket,
    /// falling back to bisection, until `|ΔT| ≤ 4ε T`.
    pub fn temperature(&self, s: f64, v: f64) -> Result<f64> {
        if !(s.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state s = {s}, v = {v}")));
        }
        if v <= self.params.b {
            return Err(Error::Domain(format!(
                "v = {v} must exceed the excluded volume b = {}",
                self.params.b
            )));
        }
        let GasParams {
            a,
            b,
            r,
            cv,
            reference,
        } = self.params;
        let log_ideal = reference.t0.ln() + (s - reference.s0) / cv
            - (r / cv) * ((v - b) / (reference.v0 - b)).ln();
        let t = match self.model {
            GasModel::Ideal | GasModel::VanDerWaals => log_ideal.exp(),
            GasModel::Berthelot => {
                // F(y) = s(e^y, v) − s, increasing and concave in y = ln T
                let shift = a / (reference.t0 * reference.t0 * reference.v0);
                let f = |y: f64| cv * (y - log_ideal) - a * (-2.0 * y).exp() / v + shift;
                let df = |y: f64| cv + 2.0 * a * (-2.0 * y).exp() / v;
                solve_increasing(f, df, log_ideal)?.exp()
            }
        };
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!(
                "no positive temperature at s = {s}, v = {v}"
            )));
        }
        Ok(t)
    }

    /// Energy `u(s, v)`, the potential whose Hessian is the Weinhold metric.
    pub fn energy_sv(&self, s: f64, v: f64) -> Result<f64> {
        let t = self.temperature(s, v)?;
        self.internal_energy(t, v)
    }

    /// The `(s, v)` point of a `(T, v)` state.
    pub fn energy_chart_point(&self, t: f64, v: f64) -> Result<StatePoint> {
        let s = self.entropy(t, v)?;
        StatePoint::from_values(ENERGY_CHART, &["s", "v"], &[s, v])
    }

    /// Weinhold metric entries `(g11, g12, g22)` in the `(s, v)` chart, no derivatives.
    pub fn weinhold_entries(&self, t: f64, v: f64) -> Result<[f64; 3]> {
        let d = self.derivatives(t, v)?;
        Ok([
            t / d.heat,
            -t * d.p_t / d.heat,
            -d.p_v + t * d.p_t * d.p_t / d.heat,
        ])
    }

    /// Value, gradient `(T, −p)`, Weinhold metric and its `(s, v)` derivatives.
    pub fn weinhold_jet(&self, t: f64, v: f64) -> Result<Jet3> {
        let d = self.derivatives(t, v)?;
        let u = self.internal_energy(t, v)?;
        let c = d.heat;
        let c2 = c * c;
        let [g11, g12, g22] = self.weinhold_entries(t, v)?;

        // partial derivatives of the entries in (T, v)
        let g11_t = 1.0 / c - t * d.heat_t / c2;
        let g11_v = -t * d.heat_v / c2;
        let g12_t = -(d.p_t + t * d.p_tt) / c + t * d.p_t * d.heat_t / c2;
        let g12_v = -t * d.p_tv / c + t * d.p_t * d.heat_v / c2;
        let g22_t = -d.p_tv + (d.p_t * d.p_t + 2.0 * t * d.p_t * d.p_tt) / c
            - t * d.p_t * d.p_t * d.heat_t / c2;
        let g22_v = -d.p_vv + 2.0 * t * d.p_t * d.p_tv / c - t * d.p_t * d.p_t * d.heat_v / c2;

        let d_s = |gt: f64| t / c * gt;
        let d_v = |gt: f64, gv: f64| gv - t * d.p_t / c * gt;
        let entry_derivs = [
            [d_s(g11_t), d_v(g11_t, g11_v)],
            [d_s(g12_t), d_v(g12_t, g12_v)],
            [d_s(g22_t), d_v(g22_t, g22_v)],
        ];
        let slot = |i: usize, j: usize| match (i, j) {
            (0, 0) => 0,
            (1, 1) => 2,
            _ => 1,
        };
        let third = Tensor3::from_fn(2, |i, j, m| entry_derivs[slot(i, j)][m]);
        let hess = Matrix::from_fn(2, |i, j| [g11, g12, g22][slot(i, j)]);
        Jet3::new(u, vec![t, -d.p], hess, third)
    }

    /// Weinhold metric at a `(T, v)` state, expressed in the `(s, v)` chart.
    pub fn weinhold_metric(&self, t: f64, v: f64) -> Result<MetricValue> {
        let jet = self.weinhold_jet(t, v)?;
        MetricValue::from_jet(jet, self.energy_chart_point(t, v)?)
    }

    fn energy_domain(&self) -> impl Fn(&[f64]) -> Result<()> + Send + Sync + 'static {
        let b = self.params.b;
        move |x: &[f64]| {
            if x[1] > b {
                Ok(())
            } else {
                Err(Error::Domain(format!("v = {} must exceed b = {b}", x[1])))
            }
        }
    }

    /// `u(s, v)` with closed-form jets.
    pub fn energy_surface(&self) -> PotentialSurface {
        let gas = *self;
        PotentialSurface::analytic(ENERGY_CHART, &["s", "v"], move |x| {
            let t = gas.temperature(x[0], x[1])?;
            gas.weinhold_jet(t, x[1])
        })
        .with_domain(self.energy_domain())
    }

    /// `u(s, v)` with finite-difference jets.
    pub fn energy_fd_surface(&self, step: f64) -> PotentialSurface {
        let gas = *self;
        PotentialSurface::finite_difference(
            ENERGY_CHART,
            &["s", "v"],
            move |x| gas.energy_sv(x[0], x[1]).unwrap_or(f64::NAN),
            step,
        )
        .with_domain(self.energy_domain())
    }

    /// Heat capacities, expansion coefficient and compressibility.
    pub fn response_functions(&self, t: f64, v: f64) -> Result<ResponseFunctions> {
        let d = self.derivatives(t, v)?;
        if d.p_v >= -1e-12 * d.p_v_scale {
            return Err(Error::MechanicallyUnstable { dp_dv: d.p_v });
        }
        Ok(ResponseFunctions {
            t,
            v,
            c_v: d.heat,
            c_p: d.heat - t * d.p_t * d.p_t / d.p_v,
            alpha: -d.p_t / (v * d.p_v),
            k_t: -1.0 / (v * d.p_v),
        })
    }

    fn has_spinodal(&self) -> bool {
        self.model != GasModel::Ideal && self.params.a > 0.0
    }

    /// Temperature on the degeneracy curve `(∂p/∂v)_T = 0`, if the model has one.
    pub fn spinodal_temperature(&self, v: f64) -> Result<f64> {
        self.require_spinodal()?;
        let GasParams { a, b, r, .. } = self.params;
        if v <= b {
            return Err(Error::Domain(format!("v = {v} must exceed b = {b}")));
        }
        let t2 = 2.0 * a * (v - b).powi(2) / (r * v.powi(3));
        Ok(match self.model {
            GasModel::Berthelot => t2.sqrt(),
            _ => t2,
        })
    }

    /// Pressure on the degeneracy curve.
    pub fn spinodal_pressure(&self, v: f64) -> Result<f64> {
        self.require_spinodal()?;
        let GasParams { a, b, r, .. } = self.params;
        if v <= b {
            return Err(Error::Domain(format!("v = {v} must exceed b = {b}")));
        }
        Ok(match self.model {
            GasModel::Berthelot => (v - 2.0 * b) / (v - b) * (a * r / (2.0 * v.powi(3))).sqrt(),
            _ => a * (v - 2.0 * b) / v.powi(3),
        })
    }

    fn require_spinodal(&self) -> Result<()> {
        if self.has_spinodal() {
            Ok(())
        } else {
            Err(Error::NoCriticalBehaviour("no curve of degeneracy"))
        }
    }

    /// Samples of the degeneracy curve at the given volumes; empty for the ideal gas.
    pub fn spinodal(&self, volumes: &[f64]) -> Result<Vec<SpinodalPoint>> {
        if !self.has_spinodal() {
            return Ok(Vec::new());
        }
        volumes
            .iter()
            .map(|&v| {
                let t = self.spinodal_temperature(v)?;
                let p = self.spinodal_pressure(v)?;
                let entries = self.weinhold_entries(t, v)?;
                let g = Matrix::from_fn(2, |i, j| entries[i + j]);
                Ok(SpinodalPoint {
                    v,
                    p,
                    t,
                    s: self.entropy(t, v)?,
                    det_residual: degeneracy_ratio(&g),
                })
            })
            .collect()
    }

    /// Closed-form critical point (positive branch for the Berthelot gas).
    pub fn critical_point(&self) -> Result<CriticalPoint> {
        self.require_spinodal()?;
        let GasParams { a, b, r, .. } = self.params;
        if b <= 0.0 {
            return Err(Error::NoCriticalBehaviour("no critical point when b = 0"));
        }
        Ok(match self.model {
            GasModel::Berthelot => CriticalPoint {
                p: (a * r / (216.0 * b.powi(3))).sqrt(),
                t: (8.0 * a / (27.0 * r * b)).sqrt(),
                v: 3.0 * b,
            },
            _ => CriticalPoint {
                p: a / (27.0 * b * b),
                t: 8.0 * a / (27.0 * b * r),
                v: 3.0 * b,
            },
        })
    }

    /// Both signs of the Berthelot critical pressure and temperature; the
    /// negative branch is unphysical and only reported.
    pub fn berthelot_critical_branches(&self) -> Result<[CriticalPoint; 2]> {
        if self.model != GasModel::Berthelot {
            return Err(Error::InvalidParameter("not a Berthelot gas".into()));
        }
        let c = self.critical_point()?;
        Ok([
            c,
            CriticalPoint {
                p: -c.p,
                t: -c.t,
                v: c.v,
            },
        ])
    }

    /// Critical point as the maxima of `T(v)` and `p(v)` along the degeneracy curve.
    pub fn critical_point_numeric(&self) -> Result<CriticalScan> {
        self.require_spinodal()?;
        let b = self.params.b;
        if b <= 0.0 {
            return Err(Error::NoCriticalBehaviour("no critical point when b = 0"));
        }
        let (lo, hi) = (1.5 * b, 10.0 * b);
        let locate = |f: &dyn Fn(f64) -> f64, what: &'static str| -> Result<f64> {
            let scan = scan_1d(f, lo, hi, 1001)?;
            scan.extrema
                .iter()
                .filter(|e| e.kind == ExtremumKind::Maximum)
                .max_by(|x, y| x.value.total_cmp(&y.value))
                .map(|e| e.x)
                .ok_or(Error::NoCriticalBehaviour(what))
        };
        let t_of = |v: f64| self.spinodal_temperature(v).unwrap_or(f64::NAN);
        let p_of = |v: f64| self.spinodal_pressure(v).unwrap_or(f64::NAN);
        let vt = locate(&t_of, "spinodal temperature has no maximum")?;
        let vp = locate(&p_of, "spinodal pressure has no maximum")?;
        Ok(CriticalScan {
            from_temperature: CriticalPoint {
                p: p_of(vt),
                t: t_of(vt),
                v: vt,
            },
            from_pressure: CriticalPoint {
                p: p_of(vp),
                t: t_of(vp),
                v: vp,
            },
        })
    }

    /// Closed forms for the scalar curvature of the Weinhold metric.
    ///
    /// Ideal: 0. Van der Waals: `aRv³ / (c_v (p v³ − a v + 2ab)²)`. Berthelot:
    /// the reference `L`, `Q`, `W` polynomial expression, evaluated verbatim.
    pub fn curvature_closed_form(&self, t: f64, v: f64) -> Result<f64> {
        self.check_state(t, v)?;
        let GasParams { a, b, r, cv, .. } = self.params;
        match self.model {
            GasModel::Ideal => Ok(0.0),
            GasModel::VanDerWaals => {
                let p = self.pressure_unchecked(t, v);
                let base = p * v.powi(3) - a * v + 2.0 * a * b;
                let size = (p * v.powi(3)).abs() + a * v + 2.0 * a * b;
                if base.abs() <= 1e-12 * size {
                    return Err(Error::Divergent {
                        what: "van der Waals curvature",
                        denominator: base,
                    });
                }
                Ok(a * r * v.powi(3) / (cv * base * base))
            }
            GasModel::Berthelot => {
                let base = r * t * t * v.powi(3) - 2.0 * a * (v - b).powi(2);
                let size = r * t * t * v.powi(3) + 2.0 * a * (v - b).powi(2);
                if base.abs() <= 1e-12 * size {
                    return Err(Error::Divergent {
                        what: "Berthelot curvature",
                        denominator: base,
                    });
                }
                let num = t.powi(4) * v.powi(4) * r * cv * berthelot_l_poly(cv, r, b, v)
                    + t * t * v.powi(3) * r * a * berthelot_q_poly(cv, r, b, v)
                    + a * a * berthelot_w_poly(cv, r, b, v);
                Ok(2.0 * a * num / (cv.powi(3) * t.powi(3) * v * base * base))
            }
        }
    }
}

fn solve_increasing<F, D>(f: F, df: D, guess: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    const MAX_ITER: usize = 400;
    let tol = 4.0 * f64::EPSILON;
    // bracket the root by expanding from the guess
    let mut lo = guess - 1.0;
    let mut hi = guess + 1.0;
    let mut expansions = 0;
    while f(lo) > 0.0 {
        lo -= 2.0 * (hi - lo);
        expansions += 1;
        if expansions > 60 || !lo.is_finite() {
            return Err(Error::NoConvergence {
                what: "temperature bracket",
                iterations: expansions,
            });
        }
    }
    while f(hi) < 0.0 {
        hi += 2.0 * (hi - lo);
        expansions += 1;
        if expansions > 60 || !hi.is_finite() {
            return Err(Error::NoConvergence {
                what: "temperature bracket",
                iterations: expansions,
            });
        }
    }
    let mut y = guess.clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let fy = f(y);
        if fy == 0.0 {
            return Ok(y);
        }
        if fy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let newton = y - fy / df(y);
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - y).abs() <= tol || hi - lo <= tol * y.abs().max(1.0) {
            return Ok(next);
        }
        y = next;
    }
    Err(Error::NoConvergence {
        what: "temperature solve",
        iterations: MAX_ITER,
    })
}

/// `L(c_v, v)` of the reference Berthelot curvature.
pub fn berthelot_l_poly(cv: f64, r: f64, b: f64, v: f64) -> f64 {
    (2.0 * cv - r) * v * v - 3.0 * cv * b * v + cv * b * b
}

/// `Q(c_v, v)` of the reference Berthelot curvature.
pub fn berthelot_q_poly(cv: f64, r: f64, b: f64, v: f64) -> f64 {
    -r * v.powi(5) + 3.0 * r * b * v.powi(4) - 3.0 * r * b * b * v.powi(3)
        + (r * b.powi(3) + cv + r) * v * v
        - b * (b - 2.0 * v) * (r + cv)
}

/// `W(c_v, v)` of the reference Berthelot curvature (not the reaction interaction term).
pub fn berthelot_w_poly(cv: f64, r: f64, b: f64, v: f64) -> f64 {
    -r * v.powi(7) + 4.0 * r * b * v.powi(6) - 6.0 * r * b * b * v.powi(5)
        + (2.0 * cv + r + 4.0 * r * b.powi(3)) * v.powi(4)
        - (8.0 * cv + 3.0 * r + r * b.powi(3)) * b * v.powi(3)
        + (12.0 * cv + 3.0 * r) * b * b * v * v
        - (8.0 * cv + r) * b.powi(3) * v
        + 2.0 * cv * b.powi(4)
}

/// Reduced van der Waals spinodal `(T_r, p_r)` at reduced volume `v_r > 1/3`.
pub fn reduced_spinodal(v_r: f64) -> Result<(f64, f64)> {
    if !(v_r > 1.0 / 3.0) || !v_r.is_finite() {
        return Err(Error::Domain(format!(
            "reduced volume {v_r} must exceed 1/3"
        )));
    }
    Ok(reduced_spinodal_unchecked(v_r))
}

fn reduced_spinodal_unchecked(v_r: f64) -> (f64, f64) {
    let t_r = (3.0 * v_r - 1.0).powi(2) / (4.0 * v_r.powi(3));
    let p_r = (3.0 * v_r - 2.0) / v_r.powi(3);
    (t_r, p_r)
}

/// A root of `T_r(v_r) = T` on the reduced spinodal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBranchPoint {
    /// 1, 2, 3 in increasing `v_r`.
    pub branch: usize,
    pub v_r: f64,
    pub t_r: f64,
    pub p_r: f64,
    /// `v_r > 1/3`, i.e. the molar volume exceeds the excluded volume.
    pub physical: bool,
    /// `T_r(v_r) − T` at the returned root.
    pub residual: f64,
}

/// All reduced volumes whose spinodal temperature equals `t_r`, with their
/// pressures. Empty at and above the critical temperature.
pub fn reduced_spinodal_branches(t_r: f64) -> Result<Vec<ReducedBranchPoint>> {
    if !(t_r > 0.0) || !t_r.is_finite() {
        return Err(Error::Domain(format!(
            "reduced temperature {t_r} must be > 0"
        )));
    }
    if t_r >= 1.0 {
        return Ok(Vec::new());
    }
    // 4 T v³ − (3v − 1)² changes sign on each bracket
    let cubic = |v: f64| 4.0 * t_r * v.powi(3) - (3.0 * v - 1.0).powi(2);
    let brackets = [
        (0.0, 1.0 / 3.0),
        (1.0 / 3.0, 1.0),
        (1.0, 9.0 / (4.0 * t_r) + 1.0),
    ];
    brackets
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let v_r = brent_root(cubic, lo, hi, 0.0, 0.0)?;
            let (t, p_r) = reduced_spinodal_unchecked(v_r);
            Ok(ReducedBranchPoint {
                branch: i + 1,
                v_r,
                t_r,
                p_r,
                physical: v_r > 1.0 / 3.0,
                residual: t - t_r,
            })
        })
        .collect()
}
