use std::time::Instant;

use csl_heat::lattice::build_grid;
use csl_heat::materials::{copper, tellurium_dioxide};
use csl_heat::noise::CslParams;
use csl_lab::cumulant::ops::{plus_state, projector, sigma_x, sigma_z};
use csl_lab::cumulant::{evolve_master_second_cumulant, master_equation_series, trace_distance, CMatrix, NoiseModel, SmallSystem};
use csl_lab::mc::{discrete_oracle, mc_energy_growth, McConfig, ProbeSpec};
use csl_lab::sde::{ito_to_strat, strat_to_ito, LinearSde};
use csl_lab::trajectory::evolve_trajectories;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn copper_l4_ensemble_matches_discrete_oracle() {
    let params = CslParams::new(1e-8, 1e-7).unwrap();
    let start = Instant::now();
    let r = mc_energy_growth(&McConfig::default(), &params, &copper()).unwrap();
    let elapsed = start.elapsed();
    println!("slope {:.6e} ± {:.3e}, oracle {:.6e}, continuum {:.6e}, {:?}", r.slope, r.stderr, r.discrete_oracle, r.continuum_slope, elapsed);
    assert!((r.slope - r.discrete_oracle).abs() <= 3.0 * r.stderr);
    assert_eq!(r.modes, 192);
    assert!(r.warning.is_none(), "{:?}", r.warning);
    let chi = r.chi_square.expect("covariance is well sampled");
    println!("chi2 {:.3} on {} dof, p = {:.3}", chi.chi2, chi.dof, chi.p_value);
    assert!(chi.p_value > 0.05);
}

#[test]
fn oracle_refines_monotonically_towards_continuum() {
    let params = CslParams::new(1e-8, 1e-7).unwrap();
    for mat in [copper(), tellurium_dioxide()] {
        let grid = build_grid(4, &mat).unwrap();
        let continuum = csl_heat::heating::energy_growth_white(&params, grid.total_mass(), 1.0).unwrap();
        let gaps: Vec<f64> = [7, 9, 11]
            .iter()
            .map(|&p| {
                let o = discrete_oracle(4, &ProbeSpec { extent: 4.0, per_axis: p }, &params, &mat, true).unwrap();
                ((o - continuum) / continuum).abs()
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2] < 1e-4);
    }
}

#[test]
fn dephasing_engines_agree() {
    let g = 1.0e3;
    let sys = SmallSystem::new(CMatrix::zeros(2, 2), sigma_z(), NoiseModel::White { gamma: g }).unwrap();
    let rho0 = projector(&plus_state());
    let t = 0.5 / g;
    let me = evolve_master_second_cumulant(&sys, &rho0, t, 1e-6).unwrap();
    let ens = evolve_trajectories(&sys, &plus_state(), t, 1e-5, 2000, 11).unwrap();
    let (td, se) = ens.compare(&me, 500, 3);
    assert!(td <= (3.0 * se).max(0.02), "{td} vs {se}");
}

#[test]
fn driven_master_equation_keeps_trace_and_hermiticity() {
    let h0 = sigma_x() * Complex64::new(csl_heat::materials::HBAR * 4e3, 0.0);
    let sys = SmallSystem::new(h0, sigma_z(), NoiseModel::Exponential { gamma: 800.0, tau_c: 5e-5 }).unwrap();
    let sol = master_equation_series(&sys, &projector(&plus_state()), 2e-3, 1e-5).unwrap();
    for rho in &sol.states {
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(rho, &rho.adjoint());
    }
    // memory makes it differ from the white limit but not wildly
    let white = SmallSystem { noise: NoiseModel::White { gamma: 800.0 }, ..sys.clone() };
    let w = evolve_master_second_cumulant(&white, &projector(&plus_state()), 2e-3, 1e-5).unwrap();
    let gap = trace_distance(sol.states.last().unwrap(), &w);
    assert!(gap > 0.0 && gap < 0.1, "{gap}");
}

fn random_sde(d: usize, m: usize, vals: &[f64]) -> LinearSde {
    let mut it = vals.iter().cycle().copied();
    let mut mat = |r, c| DMatrix::from_fn(r, c, |_, _| it.next().unwrap());
    let a = mat(d, d);
    let av = mat(d, 1).column(0).into_owned();
    let bm: Vec<_> = (0..m).map(|_| mat(d, d)).collect();
    let bv: Vec<DVector<f64>> = (0..m).map(|_| mat(d, 1).column(0).into_owned()).collect();
    LinearSde::new(a, av, bm, bv).unwrap()
}

proptest! {
    #[test]
    fn conversion_round_trip(d in 1usize..5, m in 0usize..4, vals in prop::collection::vec(-10.0f64..10.0, 1..64)) {
        let s = random_sde(d, m, &vals);
        let back = ito_to_strat(&strat_to_ito(&s));
        let scale = s.a_mat.amax().max(s.a_vec.amax()).max(1.0);
        let corr: f64 = s.b_mats.iter().map(|b| (b * b).amax()).sum::<f64>().max(1.0);
        prop_assert!((&back.a_mat - &s.a_mat).amax() <= 1e-14 * scale.max(corr));
        prop_assert!((&back.a_vec - &s.a_vec).amax() <= 1e-14 * scale.max(corr * 10.0));
        prop_assert_eq!(&back.b_mats, &s.b_mats);
        prop_assert_eq!(&back.b_vecs, &s.b_vecs);
    }
}
