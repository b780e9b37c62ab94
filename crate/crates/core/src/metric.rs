//! Hessian metrics and their curvature.
//!
//! A metric `η_ij = ∂²Φ/∂x^i∂x^j` carries its first derivatives
//! `η_ij,m = ∂³Φ/∂x^i∂x^j∂x^m`. Because those are fully symmetric, the
//! Christoffel symbols collapse to `Γ^k_ij = ½ η_ij,m η^km` and the fourth
//! derivatives drop out of the Riemann tensor.
//!
//! Index conventions: `christoffel[(k, i, j)] = Γ^k_ij`,
//! `riemann[(l, i, j, k)] = R^l_ijk = ∂_jΓ^l_ki − ∂_kΓ^l_ji + Γ^l_jpΓ^p_ki − Γ^l_kpΓ^p_ji`,
//! `R_ik = R^j_ijk`, `R = R_ik η^ik`.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix, Tensor3};
use crate::numdiff::{Jet3, PotentialSurface, StatePoint};

/// `|det| / scale^k` below this is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// `|det| / scale^k` below this (but above [`DEGENERACY_TOL`]) is flagged near-degenerate.
pub const NEAR_DEGENERACY_TOL: f64 = 1e-6;

/// Relative tolerance used when cross-checking two curvature formulas.
pub const FORMULA_AGREEMENT_TOL: f64 = 1e-8;

/// A metric at a point, optionally with its coordinate derivatives.
///
/// Metrics assembled from measured response functions have no derivative
/// data; curvature is undefined for those.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub g: Matrix,
    pub dg: Option<Tensor3>,
    pub point: StatePoint,
}

impl MetricValue {
    /// Validates shapes and symmetry (relative `1e-9`), then symmetrizes exactly.
    pub fn new(mut g: Matrix, dg: Option<Tensor3>, point: StatePoint) -> Result<Self> {
        let k = g.dim();
        if point.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: point.dim(),
            });
        }
        if let Some((i, j)) = g.asymmetry(1e-9) {
            return Err(Error::Asymmetric {
                what: "metric",
                i,
                j,
                a: g[(i, j)],
                b: g[(j, i)],
            });
        }
        g.symmetrize();
        let dg = match dg {
            Some(mut t) => {
                if t.dim() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        found: t.dim(),
                    });
                }
                let defect = t.symmetry_defect();
                if defect > 1e-9 * t.max_abs().max(f64::MIN_POSITIVE) {
                    return Err(Error::Asymmetric {
                        what: "metric derivative",
                        i: 0,
                        j: 0,
                        a: defect,
                        b: 0.0,
                    });
                }
                t.symmetrize();
                Some(t)
            }
            None => None,
        };
        Ok(Self { g, dg, point })
    }

    /// The Hessian metric of a jet: `g = hess`, `dg = third`.
    pub fn from_jet(jet: Jet3, point: StatePoint) -> Result<Self> {
        Self::new(jet.hess, Some(jet.third), point)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `|det| / scale^k` with `scale = max |g_ij|`; zero for the zero matrix.
    pub fn degeneracy_ratio(&self) -> f64 {
        degeneracy_ratio(&self.g)
    }

    fn require_dg(&self) -> Result<&Tensor3> {
        self.dg.as_ref().ok_or(Error::MissingDerivatives)
    }

    fn nondegenerate_inverse(&self) -> Result<(f64, Matrix)> {
        let det = self.g.det();
        let relative = relative_det(det, &self.g);
        if relative < DEGENERACY_TOL {
            return Err(Error::Degenerate { det, relative });
        }
        let inv = self
            .g
            .inverse()
            .ok_or(Error::Degenerate { det, relative })?;
        Ok((det, inv))
    }
}

fn relative_det(det: f64, g: &Matrix) -> f64 {
    let scale = g.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    det.abs() / scale.powi(g.dim() as i32)
}

pub fn degeneracy_ratio(g: &Matrix) -> f64 {
    relative_det(g.det(), g)
}

/// Hessian metric of a surface at a point.
pub fn hessian_metric(surface: &PotentialSurface, x: &StatePoint) -> Result<MetricValue> {
    let jet = surface.evaluate(x)?;
    MetricValue::from_jet(jet, x.clone())
}

/// Inertia of a symmetric metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite { positive: usize, negative: usize },
    Degenerate,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signature::PositiveDefinite => f.write_str("positive-definite"),
            Signature::NegativeDefinite => f.write_str("negative-definite"),
            Signature::Indefinite { positive, negative } => {
                write!(f, "indefinite({positive},{negative})")
            }
            Signature::Degenerate => f.write_str("degenerate"),
        }
    }
}

/// Determinant and signature of a symmetric matrix.
///
/// Degenerate when `|det| < tol · scale^k`; otherwise the signature counts the
/// signs of the Jacobi eigenvalues.
pub fn matrix_det_and_signature(g: &Matrix, degeneracy_tol: f64) -> (f64, Signature) {
    let det = g.det();
    if relative_det(det, g) < degeneracy_tol {
        return (det, Signature::Degenerate);
    }
    let eig = symmetric_eigenvalues(g);
    let positive = eig.iter().filter(|e| **e > 0.0).count();
    let negative = eig.len() - positive;
    let sig = match (positive, negative) {
        (_, 0) => Signature::PositiveDefinite,
        (0, _) => Signature::NegativeDefinite,
        (positive, negative) => Signature::Indefinite { positive, negative },
    };
    (det, sig)
}

pub fn det_and_signature(m: &MetricValue, degeneracy_tol: f64) -> (f64, Signature) {
    matrix_det_and_signature(&m.g, degeneracy_tol)
}

/// `Γ^k_ij = ½ Σ_m η_ij,m η^km`, stored at `[(k, i, j)]`.
pub fn christoffel(m: &MetricValue) -> Result<Tensor3> {
    let dg = m.require_dg()?;
    let (_, inv) = m.nondegenerate_inverse()?;
    Ok(christoffel_with(dg, &inv))
}

fn christoffel_with(dg: &Tensor3, inv: &Matrix) -> Tensor3 {
    let n = inv.dim();
    Tensor3::from_fn(n, |k, i, j| {
        0.5 * (0..n).map(|m| dg[(i, j, m)] * inv[(k, m)]).sum::<f64>()
    })
}

/// Rank-4 tensor, `[(l, i, j, k)] = R^l_ijk`.
#[derive(Clone, PartialEq)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        data.push(f(l, i, j, k));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn max_difference(&self, other: &Riemann) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `R_ik = R^j_ijk`.
    pub fn ricci(&self) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, |i, k| (0..n).map(|j| self[(j, i, j, k)]).sum())
    }
}

impl Index<(usize, usize, usize, usize)> for Riemann {
    type Output = f64;
    fn index(&self, (l, i, j, k): (usize, usize, usize, usize)) -> &f64 {
        let n = self.n;
        &self.data[((l * n + i) * n + j) * n + k]
    }
}

impl fmt::Debug for Riemann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Riemann")
            .field("n", &self.n)
            .field("data", &self.data)
            .finish()
    }
}

/// Riemann tensor built from the Christoffel symbols.
///
/// For a Hessian metric the derivative terms of the textbook formula reduce to
/// twice the negated quadratic terms, leaving `R^l_ijk = Γ^l_kpΓ^p_ji − Γ^l_jpΓ^p_ki`.
pub fn riemann(m: &MetricValue) -> Result<Riemann> {
    let gamma = christoffel(m)?;
    Ok(riemann_from_christoffel(&gamma))
}

fn riemann_from_christoffel(gamma: &Tensor3) -> Riemann {
    let n = gamma.dim();
    Riemann::from_fn(n, |l, i, j, k| {
        (0..n)
            .map(|p| gamma[(l, k, p)] * gamma[(p, j, i)] - gamma[(l, j, p)] * gamma[(p, k, i)])
            .sum()
    })
}

/// Riemann tensor as the quartic contraction
/// `¼ (η_ij,m η_sn,k − η_sn,j η_ki,m) η^mn η^ls`.
pub fn riemann_closed_form(m: &MetricValue) -> Result<Riemann> {
    let dg = m.require_dg()?;
    let (_, inv) = m.nondegenerate_inverse()?;
    Ok(riemann_contraction(dg, &inv))
}

fn riemann_contraction(dg: &Tensor3, inv: &Matrix) -> Riemann {
    let n = inv.dim();
    // raised[(l, n, k)] = η^ls η_sn,k
    let raised = Tensor3::from_fn(n, |l, b, k| {
        (0..n).map(|s| inv[(l, s)] * dg[(s, b, k)]).sum()
    });
    Riemann::from_fn(n, |l, i, j, k| {
        let mut acc = 0.0;
        for mm in 0..n {
            for nn in 0..n {
                acc += inv[(mm, nn)]
                    * (dg[(i, j, mm)] * raised[(l, nn, k)] - raised[(l, nn, j)] * dg[(k, i, mm)]);
            }
        }
        0.25 * acc
    })
}

/// Everything curvature-related at one point.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    /// `[(k, i, j)] = Γ^k_ij`
    pub christoffel: Tensor3,
    pub riemann: Riemann,
    pub ricci: Matrix,
    pub scalar: f64,
    pub det: f64,
    pub signature: Signature,
    /// `|det| / scale^k`
    pub degeneracy_ratio: f64,
    /// `true` when the ratio lies below [`NEAR_DEGENERACY_TOL`].
    pub near_degenerate: bool,
    /// Largest entrywise difference between the Christoffel-built Riemann
    /// tensor and the quartic contraction, relative to the largest entry.
    pub closed_form_discrepancy: f64,
}

/// Full curvature pipeline. The Christoffel route is authoritative; the quartic
/// contraction is computed alongside and its disagreement reported.
pub fn curvature(m: &MetricValue) -> Result<CurvatureReport> {
    let dg = m.require_dg()?;
    let (det, inv) = m.nondegenerate_inverse()?;
    let (_, signature) = det_and_signature(m, DEGENERACY_TOL);
    let gamma = christoffel_with(dg, &inv);
    let riemann = riemann_from_christoffel(&gamma);
    let closed = riemann_contraction(dg, &inv);
    let mut ricci = riemann.ricci();
    ricci.symmetrize();
    let n = m.dim();
    let scalar = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| ricci[(i, k)] * inv[(i, k)])
        .sum();
    let size = riemann.max_abs().max(closed.max_abs());
    let closed_form_discrepancy = if size == 0.0 {
        0.0
    } else {
        riemann.max_difference(&closed) / size
    };
    let ratio = relative_det(det, &m.g);
    Ok(CurvatureReport {
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
        det,
        signature,
        degeneracy_ratio: ratio,
        near_degenerate: ratio < NEAR_DEGENERACY_TOL,
        closed_form_discrepancy,
    })
}

struct Plane {
    // metric entries
    g11: f64,
    g12: f64,
    g22: f64,
    // inverse entries
    u11: f64,
    u12: f64,
    u22: f64,
    det: f64,
    // e[i][j][m] = η_ij,m with 0-based indices
    e: [[[f64; 2]; 2]; 2],
}

fn plane(m: &MetricValue) -> Result<Plane> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    let dg = m.require_dg()?;
    let (det, inv) = m.nondegenerate_inverse()?;
    let mut e = [[[0.0; 2]; 2]; 2];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, col) in row.iter_mut().enumerate() {
            for (k, v) in col.iter_mut().enumerate() {
                *v = dg[(i, j, k)];
            }
        }
    }
    Ok(Plane {
        g11: m.g[(0, 0)],
        g12: m.g[(0, 1)],
        g22: m.g[(1, 1)],
        u11: inv[(0, 0)],
        u12: inv[(0, 1)],
        u22: inv[(1, 1)],
        det,
        e,
    })
}

impl Plane {
    fn ricci(&self) -> Matrix {
        let (u11, u12, u22) = (self.u11, self.u12, self.u22);
        let e = &self.e;
        let e111 = e[0][0][0];
        let e112 = e[0][0][1];
        let e121 = e[0][1][0];
        let e211 = e[1][0][0];
        let e212 = e[1][0][1];
        let e221 = e[1][1][0];
        let e222 = e[1][1][1];
        let r11 = 0.25
            * ((e211 * e211 - e111 * e212) * u11 * u22
                + (e211 * e212 - e111 * e222) * u12 * u22
                + (e212 * e212 - e112 * e222) * u22 * u22);
        let r12 = 0.25
            * ((e111 * e212 - e211 * e211) * u11 * u12
                + (e111 * e222 - e212 * e112) * u12 * u12
                + (e112 * e222 - e212 * e212) * u12 * u22);
        let r22 = 0.25
            * ((e211 * e211 - e221 * e111) * u11 * u11
                + (e212 * e112 - e111 * e222) * u11 * u12
                + (e212 * e212 - e121 * e222) * u11 * u22);
        Matrix::from_fn(2, |i, k| match (i, k) {
            (0, 0) => r11,
            (1, 1) => r22,
            _ => r12,
        })
    }

    fn bordered_determinant(&self) -> f64 {
        let e = &self.e;
        Matrix::from_fn(3, |row, col| {
            let (i, j) = [(0, 0), (0, 1), (1, 1)][row];
            match col {
                0 => [self.g11, self.g12, self.g22][row],
                c => e[i][j][c - 1],
            }
        })
        .det()
    }

    fn scalar_from_ricci(&self, ricci: &Matrix) -> f64 {
        2.0 * (ricci[(0, 0)] * self.u11 + ricci[(0, 1)] * self.u12)
    }

    fn curvature_scale(&self) -> f64 {
        let de = self
            .e
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        let du = self.u11.abs().max(self.u12.abs()).max(self.u22.abs());
        de * de * du * du * du
    }
}

/// Ricci tensor of a 2-D Hessian metric from its explicit component formulas.
pub fn ricci_2d(m: &MetricValue) -> Result<Matrix> {
    Ok(plane(m)?.ricci())
}

/// Scalar curvature of a 2-D Hessian metric as the bordered determinant
/// `R = −det[[η11, η11,1, η11,2], [η12, η12,1, η12,2], [η22, η22,1, η22,2]] / (2 det η²)`.
pub fn scalar_curvature_determinant_form(m: &MetricValue) -> Result<f64> {
    let p = plane(m)?;
    Ok(-p.bordered_determinant() / (2.0 * p.det * p.det))
}

/// Scalar curvature of a 2-D Hessian metric as `2(R11 η^11 + R12 η^12)`.
pub fn scalar_curvature_ricci_form(m: &MetricValue) -> Result<f64> {
    let p = plane(m)?;
    Ok(p.scalar_from_ricci(&p.ricci()))
}

/// Scalar curvature of a 2-D metric by the determinant form, checked against
/// the Ricci-component form.
///
/// The two must agree to [`FORMULA_AGREEMENT_TOL`] relative to the larger of
/// the results and the natural curvature scale `|η_ij,m|² |η^ij|³`.
pub fn scalar_curvature_2d(m: &MetricValue) -> Result<f64> {
    let p = plane(m)?;
    let by_det = -p.bordered_determinant() / (2.0 * p.det * p.det);
    let by_ricci = p.scalar_from_ricci(&p.ricci());
    let size = by_det.abs().max(by_ricci.abs()).max(p.curvature_scale());
    if (by_det - by_ricci).abs() > FORMULA_AGREEMENT_TOL * size {
        return Err(Error::FormulaMismatch {
            what: "2-D scalar curvature (determinant vs Ricci form)",
            first: by_det,
            second: by_ricci,
        });
    }
    Ok(by_det)
}
