//! Third-order jets of scalar potentials.
//!
//! Every geometric quantity downstream is built from a [`Jet3`]: the value,
//! gradient, Hessian and third-derivative tensor of a potential at a point.
//! Jets come either from hand-coded closed forms ([`PotentialSurface::analytic`])
//! or from central finite differences with one Richardson extrapolation step
//! ([`fd_jet3`]), which serves as the independent oracle for the closed forms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Tensor3};

/// Default relative base step for finite differences.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Base step for curvature built from finite-difference jets. Third
/// derivatives lose about `ε/h³` to roundoff, so they need a coarser stencil.
pub const CURVATURE_STEP: f64 = 1e-2;

/// A point in a named coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePoint {
    coords: Vec<(String, f64)>,
    chart: String,
}

impl StatePoint {
    /// Creates a point; values must be finite and names unique.
    pub fn new<S: Into<String>>(chart: S, coords: Vec<(String, f64)>) -> Result<Self> {
        for (i, (name, value)) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::Domain(format!(
                    "coordinate {name} = {value} is not finite"
                )));
            }
            if coords[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate coordinate name {name}"
                )));
            }
        }
        Ok(Self {
            coords,
            chart: chart.into(),
        })
    }

    /// Convenience constructor from parallel name and value slices.
    pub fn from_values(chart: &str, names: &[&str], values: &[f64]) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: values.len(),
            });
        }
        Self::new(
            chart,
            names
                .iter()
                .zip(values)
                .map(|(n, v)| (n.to_string(), *v))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.coords.iter().map(|(n, _)| n.as_str())
    }

    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().map(|(_, v)| *v).collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.coords.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Same chart and names, new values.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: values.len(),
            });
        }
        Self::new(
            self.chart.clone(),
            self.coords
                .iter()
                .zip(values)
                .map(|((n, _), v)| (n.clone(), *v))
                .collect(),
        )
    }
}

/// Value, gradient, Hessian and third derivatives of a potential at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Matrix,
    pub third: Tensor3,
}

impl Jet3 {
    /// Checks that all parts share one dimension and symmetrizes hess and third.
    pub fn new(value: f64, grad: Vec<f64>, hess: Matrix, third: Tensor3) -> Result<Self> {
        let k = grad.len();
        for found in [hess.dim(), third.dim()] {
            if found != k {
                return Err(Error::DimensionMismatch { expected: k, found });
            }
        }
        let mut jet = Self {
            value,
            grad,
            hess,
            third,
        };
        jet.symmetrize();
        Ok(jet)
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Averages the Hessian and third tensor over index permutations.
    pub fn symmetrize(&mut self) {
        self.hess.symmetrize();
        self.third.symmetrize();
    }

    fn check_dim(&self, expected: usize) -> Result<()> {
        for found in [self.grad.len(), self.hess.dim(), self.third.dim()] {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(())
    }
}

/// How a surface produces its jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Analytic,
    FiniteDifference,
}

type JetFn = Arc<dyn Fn(&[f64]) -> Result<Jet3> + Send + Sync>;
type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type DomainFn = Arc<dyn Fn(&[f64]) -> Result<()> + Send + Sync>;

#[derive(Clone)]
enum Source {
    Analytic(JetFn),
    FiniteDifference { value: ValueFn, step: f64 },
}

/// A constitutive relation `Φ(x¹, …, x^k)` together with a jet evaluator.
#[derive(Clone)]
pub struct PotentialSurface {
    names: Vec<String>,
    chart: String,
    domain: Option<DomainFn>,
    source: Source,
}

impl fmt::Debug for PotentialSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSurface")
            .field("chart", &self.chart)
            .field("names", &self.names)
            .field("kind", &self.kind())
            .finish()
    }
}

impl PotentialSurface {
    /// Surface backed by closed-form derivatives.
    ///
    /// The jet function's output must have dimension `names.len()`; a mismatch
    /// is reported on evaluation.
    pub fn analytic<F>(chart: &str, names: &[&str], jet: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Jet3> + Send + Sync + 'static,
    {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            chart: chart.to_string(),
            domain: None,
            source: Source::Analytic(Arc::new(jet)),
        }
    }

    /// Surface whose jets come from [`fd_jet3`] on a value function.
    pub fn finite_difference<F>(chart: &str, names: &[&str], value: F, step: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            chart: chart.to_string(),
            domain: None,
            source: Source::FiniteDifference {
                value: Arc::new(value),
                step,
            },
        }
    }

    /// Attaches a domain predicate checked before every evaluation.
    pub fn with_domain<D>(mut self, domain: D) -> Self
    where
        D: Fn(&[f64]) -> Result<()> + Send + Sync + 'static,
    {
        self.domain = Some(Arc::new(domain));
        self
    }

    /// The finite-difference twin of this surface: same chart and domain,
    /// value taken from this surface's jets.
    pub fn to_finite_difference(&self, step: f64) -> Self {
        let value: ValueFn = match &self.source {
            Source::FiniteDifference { value, .. } => value.clone(),
            Source::Analytic(jet) => {
                let jet = jet.clone();
                Arc::new(move |x: &[f64]| jet(x).map(|j| j.value).unwrap_or(f64::NAN))
            }
        };
        Self {
            names: self.names.clone(),
            chart: self.chart.clone(),
            domain: self.domain.clone(),
            source: Source::FiniteDifference { value, step },
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> SurfaceKind {
        match self.source {
            Source::Analytic(_) => SurfaceKind::Analytic,
            Source::FiniteDifference { .. } => SurfaceKind::FiniteDifference,
        }
    }

    /// A point of this surface's chart with the given coordinate values.
    pub fn point(&self, values: &[f64]) -> Result<StatePoint> {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        StatePoint::from_values(&self.chart, &names, values)
    }

    pub fn check_domain(&self, values: &[f64]) -> Result<()> {
        match &self.domain {
            Some(d) => d(values),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &StatePoint) -> Result<Jet3> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        if x.chart() != self.chart {
            return Err(Error::InvalidParameter(format!(
                "point in chart {} evaluated on surface in chart {}",
                x.chart(),
                self.chart
            )));
        }
        let values = x.values();
        self.check_domain(&values)?;
        match &self.source {
            Source::Analytic(jet) => {
                let mut j = jet(&values)?;
                j.check_dim(self.dim())?;
                j.symmetrize();
                Ok(j)
            }
            Source::FiniteDifference { value, step } => fd_jet3(value.as_ref(), x, *step),
        }
    }
}

/// Central-difference jet with one Richardson extrapolation step.
///
/// Per-axis steps are `h · max(1, |x_i|)`; estimates at that step and at half
/// of it are combined as `(4·D(h/2) − D(h)) / 3`. The stencil reaches two steps
/// from `x` along each axis. Any non-finite evaluation is an error naming the
/// stencil point.
pub fn fd_jet3<F>(f: &F, x: &StatePoint, h: f64) -> Result<Jet3>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "base step {h} must be positive"
        )));
    }
    let x0 = x.values();
    let steps: Vec<f64> = x0.iter().map(|xi| h * xi.abs().max(1.0)).collect();
    let half: Vec<f64> = steps.iter().map(|s| 0.5 * s).collect();
    let coarse = central_jet(f, &x0, &steps)?;
    let fine = central_jet(f, &x0, &half)?;
    let k = x0.len();
    let extrapolate = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    let grad = (0..k)
        .map(|i| extrapolate(coarse.grad[i], fine.grad[i]))
        .collect();
    let hess = Matrix::from_fn(k, |i, j| {
        extrapolate(coarse.hess[(i, j)], fine.hess[(i, j)])
    });
    let third = Tensor3::from_fn(k, |i, j, l| {
        extrapolate(coarse.third[(i, j, l)], fine.third[(i, j, l)])
    });
    Jet3::new(fine.value, grad, hess, third)
}

fn central_jet<F>(f: &F, x0: &[f64], h: &[f64]) -> Result<Jet3>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let k = x0.len();
    // offsets are (axis, multiple of that axis' step)
    let eval = |offsets: &[(usize, f64)]| -> Result<f64> {
        let mut p = x0.to_vec();
        for &(axis, m) in offsets {
            p[axis] += m * h[axis];
        }
        let v = f(&p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation { point: p, value: v })
        }
    };

    let f0 = eval(&[])?;
    let mut grad = vec![0.0; k];
    let mut hess = Matrix::zeros(k);
    let mut third = Tensor3::zeros(k);

    for i in 0..k {
        let fp = eval(&[(i, 1.0)])?;
        let fm = eval(&[(i, -1.0)])?;
        let fp2 = eval(&[(i, 2.0)])?;
        let fm2 = eval(&[(i, -2.0)])?;
        let hi = h[i];
        grad[i] = (fp - fm) / (2.0 * hi);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        third[(i, i, i)] = (fp2 - 2.0 * fp + 2.0 * fm - fm2) / (2.0 * hi * hi * hi);
    }

    for i in 0..k {
        for j in (i + 1)..k {
            let fpp = eval(&[(i, 1.0), (j, 1.0)])?;
            let fpm = eval(&[(i, 1.0), (j, -1.0)])?;
            let fmp = eval(&[(i, -1.0), (j, 1.0)])?;
            let fmm = eval(&[(i, -1.0), (j, -1.0)])?;
            let hij = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = hij;
            hess[(j, i)] = hij;
        }
    }

    // mixed third derivatives ∂_a ∂_a ∂_b for a ≠ b
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let pp = eval(&[(a, 1.0), (b, 1.0)])?;
            let zp = eval(&[(b, 1.0)])?;
            let mp = eval(&[(a, -1.0), (b, 1.0)])?;
            let pm = eval(&[(a, 1.0), (b, -1.0)])?;
            let zm = eval(&[(b, -1.0)])?;
            let mm = eval(&[(a, -1.0), (b, -1.0)])?;
            let v = (pp - 2.0 * zp + mp - pm + 2.0 * zm - mm) / (2.0 * h[a] * h[a] * h[b]);
            third[(a, a, b)] = v;
            third[(a, b, a)] = v;
            third[(b, a, a)] = v;
        }
    }

    for i in 0..k {
        for j in (i + 1)..k {
            for l in (j + 1)..k {
                let mut acc = 0.0;
                for si in [1.0, -1.0] {
                    for sj in [1.0, -1.0] {
                        for sl in [1.0, -1.0] {
                            acc += si * sj * sl * eval(&[(i, si), (j, sj), (l, sl)])?;
                        }
                    }
                }
                let v = acc / (8.0 * h[i] * h[j] * h[l]);
                for p in [
                    (i, j, l),
                    (i, l, j),
                    (j, i, l),
                    (j, l, i),
                    (l, i, j),
                    (l, j, i),
                ] {
                    third[p] = v;
                }
            }
        }
    }

    Ok(Jet3 {
        value: f0,
        grad,
        hess,
        third,
    })
}

/// Relative difference `|a − b| / max(|a|, |b|, floor)`.
pub fn relative_difference(a: f64, b: f64, floor: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().max(b.abs()).max(floor)
}
