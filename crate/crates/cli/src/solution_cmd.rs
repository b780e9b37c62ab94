use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermogeom::metric::{matrix_det_and_signature, DEGENERACY_TOL};
use thermogeom::reaction::R_GAS;
use thermogeom::solution::{MargulesBinary, SolutionSpec};

use crate::args::SolutionAction;
use crate::config::Settings;
use crate::table::{Cell, Table};
use crate::{CliError, CliResult, Output};

pub fn run(action: SolutionAction, s: &Settings) -> CliResult<Output> {
    match action {
        SolutionAction::Metric => metric(s),
        SolutionAction::Decompose => decompose(s),
    }
}

fn with_model(moles: Vec<f64>, s: &Settings) -> CliResult<SolutionSpec> {
    let spec = SolutionSpec::ideal(moles)?;
    match s.get::<f64>("margules")? {
        None => Ok(spec),
        Some(_) if spec.species() != 2 => Err(CliError::Config(
            "the Margules model needs exactly two species".into(),
        )),
        Some(a) => Ok(spec.with_activity(MargulesBinary { a })),
    }
}

/// Mole vectors: the given `moles`, or `samples` random vectors of
/// `components` species (default 3) drawn from `seed`.
fn mole_sets(s: &Settings) -> CliResult<Vec<Vec<f64>>> {
    if let Some(m) = s.list::<f64>("moles")? {
        return Ok(vec![m]);
    }
    let r: usize = s.get_or("components", 3)?;
    if r == 0 {
        return Err(CliError::Config("components must be ≥ 1".into()));
    }
    let n = s.samples(10)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.get_or("seed", 1)?);
    Ok((0..n)
        .map(|_| (0..r).map(|_| rng.gen_range(0.1..5.0)).collect())
        .collect())
}

/// Isothermal-isobaric metric per mole vector, with `|det| / (RT / min N)^r`.
fn metric(s: &Settings) -> CliResult<Output> {
    let t = s.get_or("T", 298.15)?;
    let p = s.get_or("p", 1.0)?;
    let sets = mole_sets(s)?;
    let r = sets[0].len();
    let mut header = vec!["sample".to_string()];
    header.extend((1..=r).map(|i| format!("N{i}")));
    for i in 1..=r {
        for k in i..=r {
            header.push(format!("g_{i}_{k}"));
        }
    }
    header.extend(["det", "relative_det", "signature"].map(String::from));
    let mut table = Table::new(&header);
    let mut worst: f64 = 0.0;
    for (n, moles) in sets.into_iter().enumerate() {
        if moles.len() != r {
            return Err(CliError::Config(
                "all mole vectors need the same length".into(),
            ));
        }
        let spec = with_model(moles, s)?;
        let m = spec.isothermal_isobaric_metric(t, p)?;
        let (det, sig) = matrix_det_and_signature(&m.g, DEGENERACY_TOL);
        let min = spec.moles().iter().cloned().fold(f64::INFINITY, f64::min);
        let relative = det.abs() / (R_GAS * t / min).powi(r as i32);
        worst = worst.max(relative);
        let mut row: Vec<Cell> = vec![n.into()];
        row.extend(spec.moles().iter().map(|&x| x.into()));
        for i in 0..r {
            for k in i..r {
                row.push(m.g[(i, k)].into());
            }
        }
        row.extend([det.into(), relative.into(), sig.to_string().into()]);
        table.push(row);
    }
    Ok(Output {
        summary: vec![format!(
            "{} mole vectors, largest |det|/(RT/min N)^r = {worst:e}",
            table.rows.len()
        )],
        table,
    })
}

/// Ideal and activity parts of `∂μ_i/∂N_k`, entry by entry.
fn decompose(s: &Settings) -> CliResult<Output> {
    let t = s.get_or("T", 298.15)?;
    let p = s.get_or("p", 1.0)?;
    let moles = s.list::<f64>("moles")?.unwrap_or_else(|| vec![1.0, 1.0]);
    let spec = with_model(moles, s)?;
    let d = spec.decomposition(t, p)?;
    let total = d.total();
    let mut table = Table::new(&["i", "k", "ideal", "deviation", "total"]);
    let r = spec.species();
    for i in 0..r {
        for k in 0..r {
            table.push(vec![
                (i + 1).into(),
                (k + 1).into(),
                d.ideal[(i, k)].into(),
                d.deviation[(i, k)].into(),
                total[(i, k)].into(),
            ]);
        }
    }
    let kind = if spec.is_ideal() { "ideal" } else { "Margules" };
    Ok(Output {
        summary: vec![format!("{kind} solution, {r} species, T = {t}")],
        table,
    })
}
