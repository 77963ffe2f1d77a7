use std::f64::consts::FRAC_2_PI;
use std::fs;

use parajc::analysis::{conditional_photon_state, fidelity_report, reduced_photon_state};
use parajc::config::{CrossingChoice, ScenarioConfig, ScenarioId};
use parajc::linalg::eigvalsh;
use parajc::scenarios::{find_quiet_state, resolve_setup, run, wigner_maps, wigner_report};
use parajc::wigner::PhaseSpaceGrid;
use parajc::Qubit;

fn config(id: ScenarioId) -> ScenarioConfig {
    ScenarioConfig::defaults(id).resolved(id)
}

#[test]
fn weak_decay_keeps_the_quiet_spot() {
    let mut cfg = config(ScenarioId::Quietstate);
    cfg.system.kappa = 1e-3;
    cfg.system.gamma = 1e-3;
    cfg.time.dt_out = 0.05;
    cfg.time.dt_int = 0.025;
    let quiet = find_quiet_state(&resolve_setup(&cfg).unwrap()).unwrap();
    let spot = &quiet.beats.quiet_spots[0];
    assert!(
        (spot.time - 31.0).abs() < 2.0,
        "quiet spot at {}",
        spot.time
    );
    assert!((spot.excited_population_mean - 0.5).abs() < 0.05);

    assert!(!quiet.state.is_pure());
    let rho = quiet.state.to_density_matrix();
    assert!((quiet.state.trace() - 1.0).abs() < 1e-8);
    assert!(eigvalsh(&rho).unwrap()[0] > -1e-7);

    let fid =
        fidelity_report(&reduced_photon_state(&quiet.state).unwrap(), &quiet.targets).unwrap();
    assert!(fid.subspace > 0.95, "fidelity {}", fid.subspace);
    let excited = conditional_photon_state(&quiet.state, Qubit::Excited).unwrap();
    // A photon jump moves weight into odd numbers at a rate of about κ⟨n⟩.
    let odd: f64 = excited.state.populations().iter().skip(1).step_by(2).sum();
    assert!(odd > 0.0 && odd < 4e-3 * quiet.time, "odd weight {odd}");
}

#[test]
fn crossing_ii_splits_into_parity_branches() {
    let mut cfg = config(ScenarioId::Quietstate);
    cfg.system.crossing = CrossingChoice::II;
    cfg.time.t_end = 320.0;
    cfg.time.dt_out = 0.05;
    let setup = resolve_setup(&cfg).unwrap();
    let record = setup.record.as_ref().unwrap();
    assert!((record.delta_star - 0.8427).abs() < 2e-3);

    let quiet = find_quiet_state(&setup).unwrap();
    let slow = quiet.beats.slow_period.unwrap();
    assert!((slow / (2.0 * std::f64::consts::PI / record.gap) - 1.0).abs() < 0.05);

    let excited = conditional_photon_state(&quiet.state, Qubit::Excited).unwrap();
    let ground = conditional_photon_state(&quiet.state, Qubit::Ground).unwrap();
    let e = excited.state.populations();
    let g = ground.state.populations();
    assert!(e.iter().skip(1).step_by(2).sum::<f64>() < 1e-10);
    assert!(g.iter().step_by(2).sum::<f64>() < 1e-10);
    assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(excited.probability > 0.05 && ground.probability > 0.05);
}

#[test]
fn wigner_maps_are_normalized_and_consistent() {
    let mut cfg = config(ScenarioId::Wigner);
    cfg.time.dt_out = 0.05;
    let quiet = find_quiet_state(&resolve_setup(&cfg).unwrap()).unwrap();
    let grid = PhaseSpaceGrid::square(3.0, 0.1);
    let maps = wigner_maps(&quiet, &grid).unwrap();
    let report = wigner_report(&quiet, &maps).unwrap();
    assert!((report.vacuum_origin - FRAC_2_PI).abs() < 1e-12);
    for (name, integral) in &report.integrals {
        assert!((integral - 1.0).abs() < 0.02, "{name}: {integral}");
    }
    for c in &report.comparisons {
        if c.numeric.starts_with("target") {
            assert!(c.sup_difference < 1e-6, "{c:?}");
        } else {
            assert!(c.sup_difference < 0.2, "{c:?}");
        }
    }
    assert!(report.negativity["vacuum"].min_value > -1e-9);
}

#[test]
fn wigner_scenario_writes_binary_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(ScenarioId::Wigner);
    cfg.time.dt_out = 0.05;
    cfg.phase_space = PhaseSpaceGrid::square(1.5, 0.1);
    assert!(run(&cfg, dir.path()).is_err());
    cfg.phase_space = PhaseSpaceGrid::square(3.5, 0.1);
    let manifest = run(&cfg, dir.path()).unwrap();
    let points = 71 * 71;
    let bin = manifest
        .outputs
        .iter()
        .find(|o| o.path == "wigner_unconditioned.bin")
        .unwrap();
    assert_eq!(bin.bytes, points * 8);
    let header: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("wigner_unconditioned.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(header["payload"], "wigner_unconditioned.bin");
    assert_eq!(header["re_axis"]["count"], 71);
    let csv = fs::read_to_string(dir.path().join("wigner_unconditioned.csv")).unwrap();
    assert_eq!(csv.lines().count(), points + 1);
    assert!(dir.path().join("wigner_report.json").exists());
}
