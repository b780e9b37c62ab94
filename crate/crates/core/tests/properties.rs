use proptest::prelude::*;
use thermogeom::gas::{Gas, GasModel};
use thermogeom::linalg::{Matrix, Tensor3};
use thermogeom::metric::{
    curvature, det_and_signature, ricci_2d, scalar_curvature_2d, scalar_curvature_determinant_form,
    scalar_curvature_ricci_form, MetricValue, Signature, DEGENERACY_TOL,
};
use thermogeom::numdiff::{fd_jet3, Jet3, PotentialSurface, StatePoint, DEFAULT_STEP};
use thermogeom::reaction::{
    d2g_dxi2, ideal_isothermal_metric, w_phase_boundary, IdealBinaryMixture, Stoichiometry, R_GAS,
};
use thermogeom::solution::{MargulesBinary, SolutionSpec};
use thermogeom::standard::StandardPotential;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn metric_2d(g: [f64; 3], dg: [f64; 4]) -> MetricValue {
    let g = Matrix::from_rows(&[vec![g[0], g[1]], vec![g[1], g[2]]]).unwrap();
    // dg[(i,j,k)] depends only on how many indices are 1
    let dg = Tensor3::from_fn(2, |i, j, k| dg[i + j + k]);
    let point = StatePoint::from_values("(x,y)", &["x", "y"], &[0.0, 0.0]).unwrap();
    MetricValue::new(g, Some(dg), point).unwrap()
}

fn well_conditioned_metric() -> impl Strategy<Value = MetricValue> {
    (
        prop::array::uniform3(-3.0..3.0f64),
        prop::array::uniform4(-5.0..5.0f64),
    )
        .prop_filter("well-conditioned", |(g, _)| {
            let det = g[0] * g[2] - g[1] * g[1];
            let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            det.abs() > 1e-2 * scale * scale
        })
        .prop_map(|(g, dg)| metric_2d(g, dg))
}

const THIRD_STEP: f64 = 3e-3;

fn gas_model() -> impl Strategy<Value = GasModel> {
    prop_oneof![
        Just(GasModel::Ideal),
        Just(GasModel::VanDerWaals),
        Just(GasModel::Berthelot)
    ]
}

fn gas(model: GasModel) -> Gas {
    match model {
        GasModel::Ideal => Gas::ideal(1.0, 1.5).unwrap(),
        GasModel::VanDerWaals => Gas::van_der_waals(1.0, 0.1, 1.0, 1.5).unwrap(),
        GasModel::Berthelot => Gas::berthelot(1.0, 0.1, 1.0, 1.5).unwrap(),
    }
}

/// `(T, v)` with `T` comfortably above the degeneracy curve.
fn stable_state(model: GasModel) -> impl Strategy<Value = (f64, f64)> {
    (0.2..3.0f64, 0.0..1.0f64).prop_map(move |(v, lift)| {
        let g = gas(model);
        let floor = match model {
            GasModel::Ideal => 0.1,
            _ => g.spinodal_temperature(v).unwrap(),
        };
        (floor * (1.2 + lift) + 0.05, v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gas_jets_match_differences(model in gas_model(), (t, v) in (0.4..3.0f64, 0.3..3.0f64)) {
        let g = gas(model);
        let surface: PotentialSurface = g.energy_surface();
        let s = g.entropy(t, v).unwrap();
        let point = surface.point(&[s, v]).unwrap();
        let exact = surface.evaluate(&point).unwrap();
        let f = |x: &[f64]| g.energy_sv(x[0], x[1]).unwrap();
        let fd = fd_jet3(&f, &point, DEFAULT_STEP).unwrap();
        let hs = exact.hess.max_abs();
        for (a, b) in exact.hess.as_slice().iter().zip(fd.hess.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-6 * hs, "{model}: hess {a} vs {b}");
        }
        // third derivatives: roundoff grows as the step shrinks, truncation near v = b as it grows
        let fd3 = fd_jet3(&f, &point, THIRD_STEP).unwrap();
        let ts = exact.third.max_abs();
        for (a, b) in exact.third.as_slice().iter().zip(fd3.third.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-4 * ts, "{model}: third {a} vs {b}");
        }
    }

    #[test]
    fn mixture_jets_match_differences(
        t in 250.0..600.0f64,
        p in 0.2..5.0f64,
        xi in 0.05..0.95f64,
    ) {
        let mix = IdealBinaryMixture {
            mu_a: StandardPotential::temperature_only(-2.0e4, 30.0, -3.5),
            mu_b: StandardPotential::temperature_only(-2.4e4, 45.0, -5.0),
            p_ref: 1.0,
        };
        let point = StatePoint::from_values("(T,p,ξ)", &["T", "p", "ξ"], &[t, p, xi]).unwrap();
        let exact = mix.jet(t, p, xi).unwrap();
        let f = |x: &[f64]| mix.gibbs(x[0], x[1], x[2]).unwrap();
        let fd = fd_jet3(&f, &point, DEFAULT_STEP).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let size = (exact.hess[(i, i)] * exact.hess[(j, j)]).abs().sqrt();
                let (a, b) = (exact.hess[(i, j)], fd.hess[(i, j)]);
                prop_assert!((a - b).abs() <= 1e-6 * size, "hess[{i}][{j}] {a} vs {b}");
            }
        }
    }

    #[test]
    fn jets_are_stored_symmetric(vals in prop::collection::vec(-10.0..10.0f64, 27)) {
        let third = Tensor3::from_fn(3, |i, j, k| vals[9 * i + 3 * j + k]);
        let hess = Matrix::from_fn(3, |i, j| vals[3 * i + j]);
        let jet = Jet3::new(0.0, vec![0.0; 3], hess, third).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(jet.hess[(i, j)].to_bits(), jet.hess[(j, i)].to_bits());
                for k in 0..3 {
                    let x = jet.third[(i, j, k)].to_bits();
                    for perm in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        prop_assert_eq!(x, jet.third[perm].to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn richardson_step_halving(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let f = |z: &[f64]| (0.7 * z[0] - 0.3 * z[1]).exp() + z[0] * z[0] * z[1].sin();
        let point = StatePoint::from_values("(x,y)", &["x", "y"], &[x, y]).unwrap();
        let coarse = fd_jet3(&f, &point, 1e-2).unwrap();
        let fine = fd_jet3(&f, &point, 5e-3).unwrap();
        let hs = coarse.hess.max_abs();
        for (a, b) in coarse.hess.as_slice().iter().zip(fine.hess.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-4 * hs);
        }
        let ts = coarse.third.max_abs();
        for (a, b) in coarse.third.as_slice().iter().zip(fine.third.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-4 * ts);
        }
    }

    #[test]
    fn curvature_formulas_agree(m in well_conditioned_metric()) {
        let general = curvature(&m).unwrap().scalar;
        let det_form = scalar_curvature_determinant_form(&m).unwrap();
        let ricci_form = scalar_curvature_ricci_form(&m).unwrap();
        let scale = general.abs().max(1.0);
        prop_assert!((general - det_form).abs() <= 1e-8 * scale, "{general} vs {det_form}");
        prop_assert!((general - ricci_form).abs() <= 1e-8 * scale, "{general} vs {ricci_form}");
        prop_assert!(scalar_curvature_2d(&m).is_ok());
    }

    #[test]
    fn ricci_trace_identity_and_symmetry(m in well_conditioned_metric()) {
        let ricci = ricci_2d(&m).unwrap();
        let inv = m.g.inverse().unwrap();
        let first = ricci[(0, 0)] * inv[(0, 0)];
        let second = ricci[(1, 1)] * inv[(1, 1)];
        let scale = first.abs().max(second.abs()).max(1e-300);
        prop_assert!((first - second).abs() <= 1e-8 * scale.max(ricci.max_abs() * inv.max_abs()));
        let full = curvature(&m).unwrap().ricci;
        prop_assert!((full[(0, 1)] - full[(1, 0)]).abs() <= 1e-10 * full.max_abs().max(1e-300));
    }

    #[test]
    fn quadratic_potentials_are_flat(g in prop::array::uniform3(-3.0..3.0f64)) {
        prop_assume!((g[0] * g[2] - g[1] * g[1]).abs() > 1e-3);
        let m = metric_2d(g, [0.0; 4]);
        let report = curvature(&m).unwrap();
        prop_assert_eq!(report.riemann.max_abs(), 0.0);
        prop_assert_eq!(report.scalar, 0.0);
    }

    #[test]
    fn degenerate_exactly_on_spinodal(
        (model, (t, v)) in gas_model().prop_flat_map(|m| (Just(m), stable_state(m))),
    ) {
        let g = gas(model);
        let d = g.derivatives(t, v).unwrap();
        let m = g.weinhold_metric(t, v).unwrap();
        let ratio = m.degeneracy_ratio();
        // away from the curve both the determinant and ∂p/∂v are clearly nonzero
        prop_assert!(ratio > 1e-8 && d.p_v < -1e-8 * d.p_v_scale);
        if model != GasModel::Ideal {
            let vs = [v];
            let on = g.spinodal(&vs).unwrap()[0];
            let d_on = g.derivatives(on.t, on.v).unwrap();
            prop_assert!(on.det_residual < 1e-8);
            prop_assert!(d_on.p_v.abs() < 1e-8 * d_on.p_v_scale);
        }
    }

    #[test]
    fn ideal_determinant(t in 0.1..10.0f64, v in 0.1..10.0f64) {
        let g = Gas::ideal(1.0, 1.5).unwrap();
        let m = g.weinhold_metric(t, v).unwrap();
        let (det, sig) = det_and_signature(&m, DEGENERACY_TOL);
        prop_assert!(rel(det, t * t / (1.5 * v * v)) < 1e-10);
        prop_assert_eq!(sig, Signature::PositiveDefinite);
    }

    #[test]
    fn heat_capacity_gap(model in gas_model(), seed in 0.0..1.0f64, v in 0.2..3.0f64) {
        let g = gas(model);
        let floor = match model {
            GasModel::Ideal => 0.1,
            _ => g.spinodal_temperature(v).unwrap(),
        };
        let t = floor * (1.05 + 2.0 * seed);
        let rf = g.response_functions(t, v).unwrap();
        prop_assert!(rel(rf.heat_capacity_gap(), rf.gap_from_expansion()) < 1e-8);
    }

    #[test]
    fn entropy_reference_is_unobservable(model in gas_model(), s0 in -5.0..5.0f64, t0 in 0.5..2.0f64) {
        let base = gas(model);
        let mut params = *base.params();
        params.reference.s0 = s0;
        params.reference.t0 = t0;
        let shifted = Gas::new(model, params).unwrap();
        let (a, b) = (base.weinhold_metric(1.3, 0.9).unwrap(), shifted.weinhold_metric(1.3, 0.9).unwrap());
        for (x, y) in a.g.as_slice().iter().zip(b.g.as_slice()) {
            prop_assert!(rel(*x, *y) < 1e-12);
        }
    }

    #[test]
    fn phase_boundary_round_trip(
        nu in prop::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 2..5),
        n0 in prop::collection::vec(0.5..3.0f64, 5),
        frac in 0.05..0.95f64,
        t in 200.0..800.0f64,
    ) {
        let mut nu = nu;
        let r = nu.len();
        nu[0] = -nu[0].abs();
        nu[r - 1] = nu[r - 1].abs();
        let s = Stoichiometry::new(
            (0..r).map(|i| format!("S{i}")).collect(),
            nu,
            n0[..r].to_vec(),
            None,
        ).unwrap();
        let (lo, hi) = s.feasibility();
        let xi = lo + frac * (hi - lo);
        let w = w_phase_boundary(&s, xi).unwrap();
        let exact = move |_: f64| w;
        let rt = R_GAS * t;
        prop_assert!(d2g_dxi2(&s, xi, t, Some(&exact)).unwrap().abs() < 1e-10 * rt * w.abs().max(1.0));
        let above = move |_: f64| w + 1e-6;
        let below = move |_: f64| w - 1e-6;
        prop_assert!(d2g_dxi2(&s, xi, t, Some(&above)).unwrap() > 0.0);
        prop_assert!(d2g_dxi2(&s, xi, t, Some(&below)).unwrap() < 0.0);
    }

    #[test]
    fn dissociation_mirrors_synthesis(xi in 0.001..0.999f64) {
        let a = w_phase_boundary(&Stoichiometry::dissociation(), xi).unwrap();
        let b = w_phase_boundary(&Stoichiometry::synthesis(), 1.0 - xi).unwrap();
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn worked_boundaries_are_negative(xi in 0.001..0.999f64) {
        for s in [Stoichiometry::synthesis(), Stoichiometry::dissociation(), Stoichiometry::displacement()] {
            prop_assert!(w_phase_boundary(&s, xi).unwrap() < 0.0);
        }
    }

    #[test]
    fn ideal_balanced_reactions_are_convex(
        half in prop::collection::vec(1i32..=3, 1..3),
        n0 in prop::collection::vec(0.5..3.0f64, 4),
        frac in 0.01..0.99f64,
    ) {
        // reactants and products with equal total coefficients
        let mut nu: Vec<i32> = half.iter().map(|v| -v).collect();
        nu.extend(half.iter().copied());
        let r = nu.len();
        let s = Stoichiometry::new(
            (0..r).map(|i| format!("S{i}")).collect(),
            nu,
            n0[..r].to_vec(),
            None,
        ).unwrap();
        let (lo, hi) = s.feasibility();
        prop_assert!(d2g_dxi2(&s, lo + frac * (hi - lo), 300.0, None).unwrap() > 0.0);
    }

    #[test]
    fn ideal_isothermal_never_degenerate(p in 0.1..10.0f64, xi in 0.01..0.99f64) {
        let m = ideal_isothermal_metric(&Stoichiometry::a_to_b(), 300.0, p, xi).unwrap();
        prop_assert!(m.g.det().abs() > 0.0);
        prop_assert!(curvature(&m).unwrap().scalar.abs() < 1e-8);
    }

    #[test]
    fn ideal_solutions_annihilate_moles(moles in prop::collection::vec(0.05..5.0f64, 2..=5)) {
        let spec = SolutionSpec::ideal(moles.clone()).unwrap();
        let t = 300.0;
        let m = spec.isothermal_isobaric_metric(t, 1.0).unwrap();
        let r = moles.len() as i32;
        let min = moles.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = R_GAS * t / min;
        prop_assert!(m.g.det().abs() < 1e-12 * scale.powi(r));
        let norm: f64 = moles.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in m.g.mul_vec(&moles) {
            prop_assert!(x.abs() <= 1e-12 * scale * norm);
        }
    }

    #[test]
    fn margules_block_symmetric_and_additive(
        n1 in 0.1..3.0f64,
        n2 in 0.1..3.0f64,
        a in -5000.0..5000.0f64,
    ) {
        let spec = SolutionSpec::ideal(vec![n1, n2]).unwrap().with_activity(MargulesBinary { a });
        let d = spec.decomposition(300.0, 1.0).unwrap();
        let total = spec.isothermal_isobaric_metric(300.0, 1.0).unwrap().g;
        prop_assert!(rel(total[(0, 1)], total[(1, 0)]) < 1e-10 || total[(0, 1)] == total[(1, 0)]);
        let sum = d.ideal.add(&d.deviation);
        for (x, y) in sum.as_slice().iter().zip(total.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
        }
    }
}

#[test]
fn vdw_curvature_survives_vanishing_b() {
    let g = Gas::van_der_waals(1.0, 1e-12, 1.0, 1.5).unwrap();
    assert!(g.curvature_closed_form(1.0, 1.0).unwrap().abs() > 1e-6);
}
