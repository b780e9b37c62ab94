use thermogeom::metric::curvature;
use thermogeom::reaction::{
    critical_extent, dw_dxi, gibbs_profile, ideal_isothermal_metric, w_phase_boundary,
    CriticalExtent, InteractionTerm, RegularInteraction, Stoichiometry, EXTENT_MARGIN,
};

use crate::args::ReactionAction;
use crate::config::{linspace, Settings};
use crate::table::Table;
use crate::{CliError, CliResult, Output};

pub fn run(action: ReactionAction, s: &Settings) -> CliResult<Output> {
    let st = stoichiometry_from(s)?;
    match action {
        ReactionAction::WCurve => w_curve(&st, s),
        ReactionAction::CriticalExtent => extent(&st),
        ReactionAction::GibbsScan => gibbs_scan(&st, s),
        ReactionAction::Metric => metric(&st, s),
    }
}

/// A built-in reaction, or one given by `nu`, `n0` and optionally `species`.
/// Defaults to the water synthesis.
pub fn stoichiometry_from(s: &Settings) -> CliResult<Stoichiometry> {
    match (s.get_str("builtin"), s.list::<i32>("nu")?) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "give either builtin or nu/n0, not both".into(),
        )),
        (Some(name), None) => Ok(Stoichiometry::builtin(name)?),
        (None, Some(nu)) => {
            let n0: Vec<f64> = s
                .list("n0")?
                .ok_or_else(|| CliError::Config("nu needs matching n0".into()))?;
            let species = match s.list::<String>("species")? {
                Some(x) => x,
                None => (1..=nu.len()).map(|i| format!("S{i}")).collect(),
            };
            Ok(Stoichiometry::new(species, nu, n0, None)?)
        }
        (None, None) => Ok(Stoichiometry::synthesis()),
    }
}

fn extent_grid(st: &Stoichiometry, s: &Settings) -> CliResult<Vec<f64>> {
    let (lo, hi) = match s.range("range")? {
        Some(r) => r,
        None => {
            let (lo, hi) = st.feasibility();
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(CliError::Config(
                    "unbounded feasibility interval; give range explicitly".into(),
                ));
            }
            let m = EXTENT_MARGIN * (hi - lo);
            (lo + m, hi - m)
        }
    };
    Ok(linspace(lo, hi, s.samples(201)?))
}

fn w_curve(st: &Stoichiometry, s: &Settings) -> CliResult<Output> {
    let mut table = Table::new(&["xi", "W", "dW_dxi"]);
    for xi in extent_grid(st, s)? {
        table.push(vec![
            xi.into(),
            w_phase_boundary(st, xi)?.into(),
            dw_dxi(st, xi)?.into(),
        ]);
    }
    Ok(Output {
        summary: vec![format!(
            "curve of phase boundary, {} samples",
            table.rows.len()
        )],
        table,
    })
}

fn extent(st: &Stoichiometry) -> CliResult<Output> {
    let mut table = Table::new(&["xi_star", "W_star"]);
    let summary = match critical_extent(st)? {
        CriticalExtent::Extremum { xi, w, .. } => {
            table.push(vec![xi.into(), w.into()]);
            format!("critical extent xi* = {xi}, W* = {w}")
        }
        CriticalExtent::Monotone { .. } => "W is monotone on the feasibility interval".to_string(),
    };
    Ok(Output {
        table,
        summary: vec![summary],
    })
}

fn mu_theta(st: &Stoichiometry, s: &Settings) -> CliResult<Vec<f64>> {
    let mu = s.list::<f64>("mu")?.unwrap_or_else(|| vec![0.0; st.len()]);
    if mu.len() != st.len() {
        return Err(CliError::Config(format!(
            "mu has {} entries for {} species",
            mu.len(),
            st.len()
        )));
    }
    Ok(mu)
}

/// `G(ξ)` at the standard pressure. With `omega`, a regular-solution excess
/// term is added (meaningful for `a-to-b`, which has one mole in total).
fn gibbs_scan(st: &Stoichiometry, s: &Settings) -> CliResult<Output> {
    let t = s.get_or("T", 298.15)?;
    let mu = mu_theta(st, s)?;
    let regular = s
        .get::<f64>("omega")?
        .map(|omega| RegularInteraction { omega });
    let interaction = regular.as_ref().map(|r| r as &dyn InteractionTerm);
    let mut table = Table::new(&["xi", "G", "dG_dxi", "d2G_dxi2"]);
    for g in gibbs_profile(st, t, &mu, interaction, &extent_grid(st, s)?)? {
        table.push(vec![
            g.xi.into(),
            g.g.into(),
            g.dg_dxi.into(),
            g.d2g_dxi2.into(),
        ]);
    }
    let kind = if regular.is_some() {
        "regular"
    } else {
        "ideal"
    };
    Ok(Output {
        summary: vec![format!("{kind} Gibbs profile at T = {t}")],
        table,
    })
}

/// Isothermal `(p, ξ)` metric of the ideal-gas mixture along `ξ`.
fn metric(st: &Stoichiometry, s: &Settings) -> CliResult<Output> {
    let t = s.get_or("T", 298.15)?;
    let p = s.get_or("p", 1.0)?;
    let mut table = Table::new(&["xi", "g_pp", "g_pxi", "g_xixi", "det", "R"]);
    for xi in extent_grid(st, s)? {
        let m = ideal_isothermal_metric(st, t, p, xi)?;
        let r = curvature(&m).map(|c| c.scalar).unwrap_or(f64::NAN);
        table.push(vec![
            xi.into(),
            m.g[(0, 0)].into(),
            m.g[(0, 1)].into(),
            m.g[(1, 1)].into(),
            m.g.det().into(),
            r.into(),
        ]);
    }
    Ok(Output {
        summary: vec![format!(
            "isothermal ideal-mixture metric at T = {t}, p = {p}"
        )],
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Cell;

    fn reals(t: &Table, name: &str) -> Vec<f64> {
        let c = t.column(name).unwrap();
        t.rows
            .iter()
            .map(|r| match r[c] {
                Cell::Real(x) => x,
                _ => panic!("not a real"),
            })
            .collect()
    }

    #[test]
    fn displacement_extent() {
        let s = Settings::from_pairs([("builtin", "displacement")]).unwrap();
        let out = run(ReactionAction::CriticalExtent, &s).unwrap();
        assert!((reals(&out.table, "xi_star")[0] - 0.5).abs() < 1e-9);
        assert!((reals(&out.table, "W_star")[0] + 8.0).abs() < 1e-9);
    }

    #[test]
    fn a_to_b_is_convex() {
        let s = Settings::from_pairs([("builtin", "a-to-b")]).unwrap();
        let out = run(ReactionAction::GibbsScan, &s).unwrap();
        assert!(reals(&out.table, "d2G_dxi2").iter().all(|x| *x > 0.0));
    }

    #[test]
    fn custom_stoichiometry() {
        let s = Settings::from_pairs([("nu", "-1,1"), ("n0", "1,0")]).unwrap();
        assert_eq!(stoichiometry_from(&s).unwrap().nu(), &[-1, 1]);
        let both = Settings::from_pairs([("nu", "-1,1"), ("builtin", "a-to-b")]).unwrap();
        assert!(stoichiometry_from(&both).is_err());
    }
}
