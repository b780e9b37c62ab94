//! Sampling 1-D functions for sign changes and extrema.

use crate::error::{Error, Result};

/// Root refinement stops once the bracket is this narrow (relative to `max(1, |x|)`).
pub const ROOT_INTERVAL_TOL: f64 = 1e-12;
/// Root refinement stops once `|f|` is this small relative to the bracketing samples.
pub const ROOT_VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub bracket: (f64, f64),
    pub x: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// A sampled curve with its refined roots and extrema.
///
/// Non-finite samples are kept in `samples` but never used for bracketing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub samples: Vec<(f64, f64)>,
    pub roots: Vec<Root>,
    pub extrema: Vec<Extremum>,
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when `|f| ≤ ftol` or the bracket half-width drops below
/// `2ε|x| + xtol/2`.
pub fn brent_root<F>(f: F, a: f64, b: f64, xtol: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    brent_with_values(&f, a, b, fa, fb, xtol, ftol)
}

fn brent_with_values<F>(
    f: &F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const MAX_ITER: usize = 200;
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NonFiniteEvaluation {
            point: vec![a, b],
            value: if fa.is_finite() { fb } else { fa },
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidParameter(format!(
            "no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= ftol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFiniteEvaluation {
                point: vec![b],
                value: fb,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "Brent root",
        iterations: MAX_ITER,
    })
}

/// Samples `f` uniformly on `[lo, hi]`, refines every sign change to a root and
/// every sign change of the sampled slope to an extremum.
pub fn scan_1d<F>(f: F, lo: f64, hi: f64, n_samples: usize) -> Result<ScanResult>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "scan interval [{lo}, {hi}] is empty"
        )));
    }
    if n_samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "scan needs at least 3 samples, got {n_samples}"
        )));
    }
    let dx = (hi - lo) / (n_samples - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n_samples)
        .map(|i| {
            let x = if i == n_samples - 1 {
                hi
            } else {
                lo + i as f64 * dx
            };
            (x, f(x))
        })
        .collect();
    let mut roots = Vec::new();
    for (i, &(x0, y0)) in samples.iter().enumerate() {
        if !y0.is_finite() {
            continue;
        }
        if y0 == 0.0 {
            roots.push(Root {
                bracket: (x0, x0),
                x: x0,
                residual: 0.0,
            });
            continue;
        }
        let Some(&(x1, y1)) = samples.get(i + 1) else {
            continue;
        };
        if y1.is_finite() && y1 != 0.0 && y0.signum() != y1.signum() {
            let xtol = ROOT_INTERVAL_TOL * x0.abs().max(x1.abs()).max(1.0);
            let x = brent_with_values(
                &f,
                x0,
                x1,
                y0,
                y1,
                xtol,
                ROOT_VALUE_TOL * y0.abs().min(y1.abs()),
            )?;
            roots.push(Root {
                bracket: (x0, x1),
                x,
                residual: f(x),
            });
        }
    }

    let slope: Vec<Option<f64>> = (0..n_samples)
        .map(|i| {
            if i == 0 || i == n_samples - 1 {
                return None;
            }
            let (a, b) = (samples[i - 1].1, samples[i + 1].1);
            (a.is_finite() && b.is_finite()).then(|| (b - a) / (2.0 * dx))
        })
        .collect();
    let delta = (1e-5 * (hi - lo)).min(0.5 * dx);
    let derivative = |x: f64| (f(x + delta) - f(x - delta)) / (2.0 * delta);
    let mut extrema = Vec::new();
    for i in 1..n_samples.saturating_sub(2) {
        let (Some(s0), Some(s1)) = (slope[i], slope[i + 1]) else {
            continue;
        };
        if s0 == 0.0 || s0.signum() == s1.signum() && s1 != 0.0 {
            continue;
        }
        let (x0, x1) = (samples[i].0, samples[i + 1].0);
        let (d0, d1) = (derivative(x0), derivative(x1));
        let x = if d0 == 0.0 {
            x0
        } else if d1 == 0.0 {
            x1
        } else if d0.signum() != d1.signum() {
            let xtol = ROOT_INTERVAL_TOL * x0.abs().max(x1.abs()).max(1.0);
            brent_with_values(&derivative, x0, x1, d0, d1, xtol, 0.0)?
        } else {
            // grid slope changed sign but the refined derivative did not
            let first_is_better = if s0 > 0.0 {
                samples[i].1 >= samples[i + 1].1
            } else {
                samples[i].1 <= samples[i + 1].1
            };
            if first_is_better {
                x0
            } else {
                x1
            }
        };
        extrema.push(Extremum {
            x,
            value: f(x),
            kind: if s0 > 0.0 {
                ExtremumKind::Maximum
            } else {
                ExtremumKind::Minimum
            },
        });
    }

    Ok(ScanResult {
        samples,
        roots,
        extrema,
    })
}
