use thermogeom::gas::{reduced_spinodal_branches, Gas, GasModel, GasParams};
use thermogeom::metric::{curvature, det_and_signature, hessian_metric, DEGENERACY_TOL};
use thermogeom::Error;

use crate::args::GasAction;
use crate::config::{linspace, Settings};
use crate::table::Table;
use crate::{CliResult, Output};

pub fn run(action: GasAction, s: &Settings) -> CliResult<Output> {
    match action {
        GasAction::PtBoundary => pt_boundary(s),
        other => {
            let gas = gas_from(s)?;
            match other {
                GasAction::Metric => metric(&gas, s),
                GasAction::Curvature => curvature_scan(&gas, s),
                GasAction::Spinodal => spinodal(&gas, s),
                GasAction::Critical => critical(&gas),
                GasAction::PtBoundary => unreachable!(),
            }
        }
    }
}

/// Defaults: van der Waals with `a = 1`, `b = 0.1`, `R = 1`, `c_v = 1.5`.
pub fn gas_from(s: &Settings) -> CliResult<Gas> {
    let model: GasModel = s.get_or("model", GasModel::VanDerWaals)?;
    let params = GasParams::new(
        s.get_or("a", 1.0)?,
        s.get_or("b", 0.1)?,
        s.get_or("R", 1.0)?,
        s.get_or("cv", 1.5)?,
    );
    Ok(Gas::new(model, params)?)
}

fn volume_grid(gas: &Gas, s: &Settings) -> CliResult<Vec<f64>> {
    let b = gas.params().b;
    let (lo, hi) = match s.range("range")? {
        Some(r) => r,
        None if b > 0.0 => (1.5 * b, 20.0 * b),
        None => (0.5, 5.0),
    };
    Ok(linspace(lo, hi, s.samples(101)?))
}

/// Requested temperature, or 1.5 `T_c` (1 for gases without a critical point).
fn scan_temperature(gas: &Gas, s: &Settings) -> CliResult<f64> {
    if let Some(t) = s.get("T")? {
        return Ok(t);
    }
    Ok(gas.critical_point().map(|c| 1.5 * c.t).unwrap_or(1.0))
}

fn metric(gas: &Gas, s: &Settings) -> CliResult<Output> {
    let t = scan_temperature(gas, s)?;
    let mut table = Table::new(&[
        "v",
        "T",
        "s",
        "p",
        "g_ss",
        "g_sv",
        "g_vv",
        "det",
        "signature",
    ]);
    for v in volume_grid(gas, s)? {
        let m = gas.weinhold_metric(t, v)?;
        let (det, sig) = det_and_signature(&m, DEGENERACY_TOL);
        table.push(vec![
            v.into(),
            t.into(),
            gas.entropy(t, v)?.into(),
            gas.pressure(t, v)?.into(),
            m.g[(0, 0)].into(),
            m.g[(0, 1)].into(),
            m.g[(1, 1)].into(),
            det.into(),
            sig.to_string().into(),
        ]);
    }
    Ok(Output {
        summary: vec![format!(
            "{} Weinhold metric at T = {t}, {} volumes",
            gas.model(),
            table.rows.len()
        )],
        table,
    })
}

/// Scalar curvature along an isotherm. Points where the metric is degenerate
/// or the closed form diverges are written as `nan`.
fn curvature_scan(gas: &Gas, s: &Settings) -> CliResult<Output> {
    let t = scan_temperature(gas, s)?;
    let step: Option<f64> = s.get("step")?;
    let surface = step.map(|h| gas.energy_fd_surface(h));
    let mut table = Table::new(&[
        "v",
        "T",
        "degeneracy_ratio",
        "R_pipeline",
        "R_closed_form",
        "near_degenerate",
    ]);
    for v in volume_grid(gas, s)? {
        let m = match &surface {
            Some(surface) => hessian_metric(surface, &gas.energy_chart_point(t, v)?)?,
            None => gas.weinhold_metric(t, v)?,
        };
        let (scalar, near) = match curvature(&m) {
            Ok(r) => (r.scalar, r.near_degenerate),
            Err(Error::Degenerate { .. }) => (f64::NAN, true),
            Err(e) => return Err(e.into()),
        };
        let closed = match gas.curvature_closed_form(t, v) {
            Ok(x) => x,
            Err(Error::Divergent { .. }) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            v.into(),
            t.into(),
            m.degeneracy_ratio().into(),
            scalar.into(),
            closed.into(),
            near.into(),
        ]);
    }
    let pipeline = if step.is_some() {
        "finite-difference"
    } else {
        "analytic"
    };
    Ok(Output {
        summary: vec![format!(
            "{} scalar curvature at T = {t} ({pipeline} jets)",
            gas.model()
        )],
        table,
    })
}

fn spinodal(gas: &Gas, s: &Settings) -> CliResult<Output> {
    let mut table = Table::new(&["v", "p_spin", "T_spin", "det_residual"]);
    let points = gas.spinodal(&volume_grid(gas, s)?)?;
    for p in &points {
        table.push(vec![
            p.v.into(),
            p.p.into(),
            p.t.into(),
            p.det_residual.into(),
        ]);
    }
    let summary = if points.is_empty() {
        format!("{}: no curve of degeneracy", gas.model())
    } else {
        format!(
            "{}: {} points on the curve of degeneracy",
            gas.model(),
            points.len()
        )
    };
    Ok(Output {
        table,
        summary: vec![summary],
    })
}

fn critical(gas: &Gas) -> CliResult<Output> {
    let closed = gas.critical_point()?;
    let scan = gas.critical_point_numeric()?;
    let mut table = Table::new(&["source", "p", "T", "v"]);
    let mut rows = vec![
        ("closed-form", closed),
        ("spinodal-temperature-maximum", scan.from_temperature),
        ("spinodal-pressure-maximum", scan.from_pressure),
    ];
    if gas.model() == GasModel::Berthelot {
        rows.push((
            "closed-form-negative-branch",
            gas.berthelot_critical_branches()?[1],
        ));
    }
    for (source, c) in rows {
        table.push(vec![source.into(), c.p.into(), c.t.into(), c.v.into()]);
    }
    Ok(Output {
        table,
        summary: vec![format!(
            "critical point (p, T, v) = ({}, {}, {})",
            closed.p, closed.t, closed.v
        )],
    })
}

/// Reduced spinodal branches `p_r(T_r)`; a single temperature with `tr`,
/// otherwise a scan of `T_r` over `range` (default 0.05:0.99).
pub fn pt_boundary(s: &Settings) -> CliResult<Output> {
    let temperatures = match s.get::<f64>("tr")? {
        Some(t) => vec![t],
        None => {
            let (lo, hi) = s.range("range")?.unwrap_or((0.05, 0.99));
            linspace(lo, hi, s.samples(95)?)
        }
    };
    let mut table = Table::new(&["v_r", "T_r", "p_r", "branch_id"]);
    let mut worst: f64 = 0.0;
    for t in temperatures {
        for b in reduced_spinodal_branches(t)? {
            worst = worst.max(b.residual.abs());
            table.push(vec![
                b.v_r.into(),
                b.t_r.into(),
                b.p_r.into(),
                b.branch.into(),
            ]);
        }
    }
    Ok(Output {
        summary: vec![format!(
            "{} branch points, largest temperature residual {worst:e}",
            table.rows.len()
        )],
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point_of_unit_reduced_gas() {
        let s = Settings::from_pairs([
            ("model", "vdw"),
            ("a", "27"),
            ("b", "1"),
            ("R", "2.6666666666666665"),
        ])
        .unwrap();
        let out = run(GasAction::Critical, &s).unwrap();
        assert_eq!(out.table.rows.len(), 3);
        assert!(
            out.summary[0].starts_with("critical point (p, T, v) = (1, 3"),
            "{}",
            out.summary[0]
        );
    }

    #[test]
    fn ideal_curvature_column_is_zero() {
        let s = Settings::from_pairs([("model", "ideal"), ("samples", "5")]).unwrap();
        let out = run(GasAction::Curvature, &s).unwrap();
        let col = out.table.column("R_pipeline").unwrap();
        for row in &out.table.rows {
            match row[col] {
                crate::table::Cell::Real(x) => assert!(x.abs() < 1e-8),
                _ => panic!("expected a real"),
            }
        }
    }

    #[test]
    fn ideal_spinodal_is_empty() {
        let s = Settings::from_pairs([("model", "ideal")]).unwrap();
        let out = run(GasAction::Spinodal, &s).unwrap();
        assert!(out.table.rows.is_empty());
    }
}
