//! Scenario runners: each turns a [`ScenarioConfig`] into a directory of
//! CSV/JSON/binary datasets plus a `manifest.json` with content digests.
//!
//! The computational cores ([`resolve_setup`], [`find_quiet_state`],
//! [`analyse_quiet_state`], [`scan_point`], …) are public so tests and
//! bindings can use them without touching the filesystem.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    align_quiet_instant, conditional_photon_state, effective_two_qubit, extract_beats,
    fidelity_report, reduced_photon_state, subspace_fidelity, summarize_density, BeatReport,
    DensitySummary, EffectiveTwoQubit, FidelityReport, TargetStates, TWO_QUBIT_BASIS,
};
use crate::config::{CrossingChoice, Detuning, NamedDetuning, ScenarioConfig, ScenarioId};
use crate::dynamics::{
    evolve_lindblad, evolve_ramped, evolve_schrodinger, Propagator, Snapshot, TimeGrid, TimeSeries,
};
use crate::error::{Error, Result};
use crate::fockspace::{CompositeSpace, FockSpace, QuantumState, Qubit, Space};
use crate::io::{matrix_to_csv, to_json, write_file};
use crate::linalg::CMatrix;
use crate::model::{
    excited_vacuum, hamiltonian, linear_grid, locate_crossing, predict_crossings, sweep_spectrum,
    CrossingPrediction, CrossingRecord, SystemParams,
};
use crate::wigner::{
    negativity_report, wigner_even_analytic, wigner_numeric, wigner_odd_analytic, NegativityReport,
    WignerMap,
};

/// Allowed change of beat and quiet-state observables when n_max grows by
/// [`TRUNCATION_STEP`].
pub const TRUNCATION_GATE: f64 = 1e-3;
pub const TRUNCATION_STEP: usize = 4;

/// One written dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: ScenarioId,
    pub config: ScenarioConfig,
    pub outputs: Vec<OutputFile>,
    pub version: String,
    pub duration_seconds: f64,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let sha256 = write_file(&self.dir.join(name), bytes)?;
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256,
            bytes: bytes.len(),
        });
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, text.as_bytes())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.text(name, &to_json(value)?)
    }
}

/// Run `cfg` (already resolved for its scenario) into `out_dir`.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest> {
    let scenario = cfg.scenario_id()?;
    cfg.validate()?;
    let started = Instant::now();
    let mut out = Outputs::new(out_dir);
    match scenario {
        ScenarioId::Spectrum => run_spectrum(cfg, &mut out)?,
        ScenarioId::Beats => run_beats(cfg, &mut out)?,
        ScenarioId::Quietstate => run_quietstate(cfg, &mut out)?,
        ScenarioId::Wigner => run_wigner(cfg, &mut out)?,
        ScenarioId::FidelityScan => run_fidelity_scan(cfg, &mut out)?,
        ScenarioId::RampCompare => run_ramp_compare(cfg, &mut out)?,
    }
    let manifest = RunManifest {
        scenario,
        config: cfg.clone(),
        outputs: out.files,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    write_file(
        &out_dir.join("manifest.json"),
        to_json(&manifest)?.as_bytes(),
    )?;
    Ok(manifest)
}

/// Resolved physical setup shared by the dynamics scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub params: SystemParams,
    pub space: CompositeSpace,
    pub grid: TimeGrid,
    pub crossing: CrossingChoice,
    /// The numerically located crossing, when the detuning came from it.
    pub record: Option<CrossingRecord>,
    /// Slow period implied by the crossing gap, used as a coverage check.
    pub expected_slow_period: Option<f64>,
}

impl Setup {
    fn open(&self) -> bool {
        self.params.kappa > 0.0 || self.params.gamma > 0.0
    }

    fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Ok(Self {
            space: CompositeSpace::new(FockSpace::new(n_max)?),
            ..self.clone()
        })
    }
}

fn prediction_for(template: &SystemParams, crossing: CrossingChoice) -> CrossingPrediction {
    let (m, n) = crossing.label().pair().expect("named crossings have pairs");
    predict_crossings(template, n)
        .into_iter()
        .find(|c| c.plus_n == m && c.minus_n == n)
        .expect("pair is enumerated")
}

/// Turn the configured detuning into a number; `"located"` falls back to the
/// prediction when G = 0 since nothing is avoided then.
pub fn resolve_detuning(
    template: &SystemParams,
    detuning: Detuning,
    crossing: CrossingChoice,
    space: CompositeSpace,
) -> Result<(f64, Option<CrossingRecord>)> {
    match detuning {
        Detuning::Value(d) => Ok((d, None)),
        Detuning::Named(NamedDetuning::Predicted) => {
            Ok((prediction_for(template, crossing).delta_star, None))
        }
        Detuning::Named(NamedDetuning::Located) => {
            if template.parametric == 0.0 {
                return Ok((prediction_for(template, crossing).delta_star, None));
            }
            let record = locate_crossing(template, crossing.label(), space)?;
            Ok((record.delta_star, Some(record)))
        }
    }
}

pub fn resolve_setup(cfg: &ScenarioConfig) -> Result<Setup> {
    let space = cfg.space()?;
    let template = cfg.system.template();
    let (detuning, record) =
        resolve_detuning(&template, cfg.system.detuning, cfg.system.crossing, space)?;
    let gap = record
        .as_ref()
        .map(|r| r.gap)
        .unwrap_or_else(|| prediction_for(&template, cfg.system.crossing).perturbative_gap);
    Ok(Setup {
        params: template.with_detuning(detuning),
        space,
        grid: cfg.time.grid(),
        crossing: cfg.system.crossing,
        record,
        expected_slow_period: (gap > 0.0).then(|| 2.0 * PI / gap),
    })
}

/// Evolution from |e,0⟩: Schrödinger when both decay rates vanish, Lindblad
/// otherwise.
pub fn evolve_setup(setup: &Setup) -> Result<TimeSeries> {
    let psi0 = excited_vacuum(setup.space);
    if setup.open() {
        evolve_lindblad(&setup.params, &psi0.into_density(), &setup.grid)
    } else {
        let h = hamiltonian(&setup.params, setup.space)?;
        evolve_schrodinger(&h, &psi0, &setup.grid)
    }
}

/// Full state at time `t`.
pub fn state_at(setup: &Setup, t: f64) -> Result<QuantumState> {
    if t == 0.0 {
        let psi0 = excited_vacuum(setup.space);
        return Ok(if setup.open() {
            psi0.into_density()
        } else {
            psi0
        });
    }
    if setup.open() {
        let steps = (t / setup.grid.dt_out).ceil().max(1.0);
        let dt_out = t / steps;
        let grid =
            TimeGrid::new(t, dt_out, setup.grid.dt_int.min(dt_out)).with_snapshots(steps as usize);
        let series = evolve_lindblad(
            &setup.params,
            &excited_vacuum(setup.space).into_density(),
            &grid,
        )?;
        let last = series
            .snapshots
            .into_iter()
            .last()
            .ok_or_else(|| Error::Invariant("no snapshot at the requested time".into()))?;
        Ok(last.state)
    } else {
        let h = hamiltonian(&setup.params, setup.space)?;
        let QuantumState::Pure { vector, .. } = excited_vacuum(setup.space) else {
            unreachable!()
        };
        QuantumState::pure(
            Space::Composite(setup.space),
            Propagator::new(&h)?.state_at(&vector, t),
        )
    }
}

/// The first quiet spot, moved within half a fast period to the instant of
/// highest subspace fidelity.
#[derive(Debug, Clone)]
pub struct QuietState {
    pub time: f64,
    /// Envelope minimum the search was centred on.
    pub envelope_minimum: f64,
    pub state: QuantumState,
    pub targets: TargetStates,
    pub beats: BeatReport,
    pub series: TimeSeries,
}

fn targets_for(setup: &Setup, state: &QuantumState) -> Result<TargetStates> {
    let fock = setup.space.fock();
    match setup.crossing {
        CrossingChoice::I => TargetStates::crossing_i(fock),
        CrossingChoice::II => {
            TargetStates::crossing_ii(fock, &conditional_photon_state(state, Qubit::Ground)?.state)
        }
    }
}

pub fn find_quiet_state(setup: &Setup) -> Result<QuietState> {
    let series = evolve_setup(setup)?;
    let beats = extract_beats(&series, setup.expected_slow_period)?;
    let spot = beats
        .quiet_spots
        .first()
        .ok_or_else(|| Error::Invariant("no quiet spot in the evolution window".into()))?;
    let center = spot.time;
    let half = 0.5 * beats.fast_period;
    let targets = targets_for(setup, &state_at(setup, center)?)?;

    let (time, state) = if setup.open() {
        // Sample the window from one evolution with per-step snapshots.
        let t_end = (center + half).min(setup.grid.t_end);
        let grid = TimeGrid::new(t_end, setup.grid.dt_out, setup.grid.dt_int).with_snapshots(1);
        let run = evolve_lindblad(
            &setup.params,
            &excited_vacuum(setup.space).into_density(),
            &grid,
        )?;
        let mut best: Option<(f64, &Snapshot)> = None;
        for snap in run
            .snapshots
            .iter()
            .filter(|s| (s.time - center).abs() <= half)
        {
            let f = subspace_fidelity(&reduced_photon_state(&snap.state)?, &targets)?;
            if best.is_none_or(|(g, _)| f > g) {
                best = Some((f, snap));
            }
        }
        let (_, snap) =
            best.ok_or_else(|| Error::Invariant("no snapshot near the quiet spot".into()))?;
        (snap.time, snap.state.clone())
    } else {
        let h = hamiltonian(&setup.params, setup.space)?;
        let prop = Propagator::new(&h)?;
        let QuantumState::Pure { vector, .. } = excited_vacuum(setup.space) else {
            unreachable!()
        };
        let amps = prop.project(&vector);
        let space = Space::Composite(setup.space);
        let (t, _) = align_quiet_instant(center, half, beats.fast_period / 200.0, &targets, |t| {
            QuantumState::pure(space, prop.state_from_projection(&amps, t))
        })?;
        (
            t,
            QuantumState::pure(space, prop.state_from_projection(&amps, t))?,
        )
    };
    Ok(QuietState {
        time,
        envelope_minimum: center,
        state,
        targets,
        beats,
        series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSummary {
    pub probability: f64,
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for ComplexMatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&crate::linalg::C64) -> f64| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitSummary {
    pub basis: [String; 4],
    pub populations: [f64; 4],
    pub leakage: f64,
    pub concurrence: f64,
    /// arg ρ′[gO, eE].
    pub relative_phase: f64,
    pub rho: ComplexMatrixJson,
}

impl TwoQubitSummary {
    fn of(eff: &EffectiveTwoQubit) -> Result<Self> {
        Ok(Self {
            basis: TWO_QUBIT_BASIS.map(String::from),
            populations: eff.populations(),
            leakage: eff.leakage,
            concurrence: eff.concurrence()?,
            relative_phase: eff.relative_phase(),
            rho: (&eff.rho).into(),
        })
    }
}

/// Everything reported about the state at a quiet spot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuietStateReport {
    pub time: f64,
    pub envelope_minimum: f64,
    pub excited_population: f64,
    pub photon: DensitySummary,
    pub conditional_excited: ConditionalSummary,
    pub conditional_ground: ConditionalSummary,
    pub fidelity: FidelityReport,
    pub two_qubit: TwoQubitSummary,
}

pub fn analyse_quiet_state(
    state: &QuantumState,
    targets: &TargetStates,
    time: f64,
    envelope_minimum: f64,
) -> Result<QuietStateReport> {
    let photon = reduced_photon_state(state)?;
    let cond = |q| -> Result<ConditionalSummary> {
        let c = conditional_photon_state(state, q)?;
        Ok(ConditionalSummary {
            probability: c.probability,
            populations: c.state.populations(),
        })
    };
    let excited = cond(Qubit::Excited)?;
    let eff = effective_two_qubit(state, targets)?;
    Ok(QuietStateReport {
        time,
        envelope_minimum,
        excited_population: excited.probability,
        photon: summarize_density(&photon.to_density_matrix(), 6),
        conditional_excited: excited,
        conditional_ground: cond(Qubit::Ground)?,
        fidelity: fidelity_report(&photon, targets)?,
        two_qubit: TwoQubitSummary::of(&eff)?,
    })
}

/// Change of the beat and quiet-state observables under n_max → n_max + 4
/// at fixed parameters and fixed sampling instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationCheck {
    pub n_max: usize,
    pub n_max_compared: usize,
    pub changes: BTreeMap<String, f64>,
    pub max_change: f64,
    pub tolerance: f64,
}

impl TruncationCheck {
    pub fn passed(&self) -> bool {
        self.max_change < self.tolerance
    }

    fn gate(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::ConvergenceGate(format!(
                "n_max {} -> {} changes observables by {:e}",
                self.n_max, self.n_max_compared, self.max_change
            )))
        }
    }
}

fn observables(beats: &BeatReport, report: &QuietStateReport) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("fast_period".into(), beats.fast_period);
    if let Some(t2) = beats.slow_period {
        m.insert("slow_period".into(), t2);
    }
    if let Some(q) = beats.quiet_spots.first() {
        m.insert("quiet_spot_time".into(), q.time);
        m.insert(
            "quiet_spot_excited_population".into(),
            q.excited_population_mean,
        );
    }
    m.insert("excited_population".into(), report.excited_population);
    for n in 0..4 {
        m.insert(format!("p{n}"), report.photon.populations[n]);
        m.insert(
            format!("conditional_e_p{n}"),
            report.conditional_excited.populations[n],
        );
        m.insert(
            format!("conditional_g_p{n}"),
            report.conditional_ground.populations[n],
        );
    }
    m.insert("fidelity".into(), report.fidelity.subspace);
    m
}

/// Compare a quiet-state analysis against the same run on a larger space.
pub fn truncation_check(
    setup: &Setup,
    quiet: &QuietState,
    report: &QuietStateReport,
) -> Result<TruncationCheck> {
    let bigger = setup.with_n_max(setup.space.n_max() + TRUNCATION_STEP)?;
    let series = evolve_setup(&bigger)?;
    let beats = extract_beats(&series, setup.expected_slow_period)?;
    let state = state_at(&bigger, quiet.time)?;
    let targets = match setup.crossing {
        CrossingChoice::I => TargetStates::crossing_i(bigger.space.fock())?,
        CrossingChoice::II => targets_for(&bigger, &state)?,
    };
    let big_report = analyse_quiet_state(&state, &targets, quiet.time, quiet.envelope_minimum)?;
    let base = observables(&quiet.beats, report);
    let other = observables(&beats, &big_report);
    let changes: BTreeMap<String, f64> = base
        .iter()
        .filter_map(|(k, v)| other.get(k).map(|w| (k.clone(), (v - w).abs())))
        .collect();
    let max_change = changes.values().copied().fold(0.0, f64::max);
    Ok(TruncationCheck {
        n_max: setup.space.n_max(),
        n_max_compared: bigger.space.n_max(),
        changes,
        max_change,
        tolerance: TRUNCATION_GATE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupSummary {
    pub detuning: f64,
    pub coupling: f64,
    pub parametric: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub n_max: usize,
    pub crossing: CrossingChoice,
    pub located: Option<CrossingRecord>,
    pub predicted: CrossingPrediction,
}

impl SetupSummary {
    fn of(setup: &Setup) -> Self {
        let p = setup.params;
        Self {
            detuning: p.detuning,
            coupling: p.coupling,
            parametric: p.parametric,
            kappa: p.kappa,
            gamma: p.gamma,
            n_max: setup.space.n_max(),
            crossing: setup.crossing,
            located: setup.record.clone(),
            predicted: prediction_for(&p, setup.crossing),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpectrumReport {
    n_max: usize,
    coupling: f64,
    parametric: f64,
    predictions: Vec<CrossingPrediction>,
    crossings: Vec<CrossingRecord>,
}

fn run_spectrum(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let s = &cfg.spectrum;
    let template = cfg.system.template();
    let space = cfg.space()?;
    let sweep = sweep_spectrum(
        &template,
        &linear_grid(s.delta_min, s.delta_max, s.points),
        space,
    )?;
    out.text("spectrum.csv", &sweep.to_csv())?;
    out.json(
        "crossings.json",
        &SpectrumReport {
            n_max: space.n_max(),
            coupling: template.coupling,
            parametric: template.parametric,
            predictions: predict_crossings(&template, s.max_photon),
            crossings: sweep.crossings,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatsSummary {
    pub setup: SetupSummary,
    /// π/g.
    pub expected_fast_period: f64,
    /// 2π/[(√6−√2)G] for crossing I, 2π/gap for a located crossing.
    pub expected_slow_period: Option<f64>,
    pub report: BeatReport,
}

fn write_series(out: &mut Outputs, stem: &str, series: &TimeSeries) -> Result<()> {
    out.text(&format!("{stem}.csv"), &series.to_csv())?;
    if !series.snapshots.is_empty() {
        out.write(
            &format!("{stem}_snapshots.bin"),
            &series.snapshots_le_bytes(),
        )?;
    }
    Ok(())
}

fn formula_slow_period(setup: &Setup) -> Option<f64> {
    let gap = prediction_for(&setup.params, setup.crossing).perturbative_gap;
    (gap > 0.0).then(|| 2.0 * PI / gap)
}

fn run_beats(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let setup = resolve_setup(cfg)?;
    let series = evolve_setup(&setup)?;
    let report = extract_beats(&series, setup.expected_slow_period)?;
    write_series(out, "timeseries", &series)?;
    out.json(
        "beats.json",
        &BeatsSummary {
            setup: SetupSummary::of(&setup),
            expected_fast_period: PI / setup.params.coupling,
            expected_slow_period: formula_slow_period(&setup),
            report,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct QuietStateFile {
    setup: SetupSummary,
    beats: BeatReport,
    quiet: QuietStateReport,
    truncation: TruncationCheck,
}

fn photon_distribution_csv(populations: &[f64]) -> String {
    let mut s = String::from("n,p\n");
    for (n, p) in populations.iter().enumerate() {
        s.push_str(&format!("{n},{}\n", crate::io::fmt_f64(*p)));
    }
    s
}

fn run_quietstate(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let setup = resolve_setup(cfg)?;
    let quiet = find_quiet_state(&setup)?;
    let report = analyse_quiet_state(
        &quiet.state,
        &quiet.targets,
        quiet.time,
        quiet.envelope_minimum,
    )?;
    let truncation = truncation_check(&setup, &quiet, &report)?.gate()?;
    let photon = reduced_photon_state(&quiet.state)?;
    out.text(
        "photon_density.csv",
        &matrix_to_csv(&photon.to_density_matrix()),
    )?;
    out.text(
        "conditional_e.csv",
        &photon_distribution_csv(&report.conditional_excited.populations),
    )?;
    out.text(
        "conditional_g.csv",
        &photon_distribution_csv(&report.conditional_ground.populations),
    )?;
    let eff = effective_two_qubit(&quiet.state, &quiet.targets)?;
    out.text("rho_prime.csv", &matrix_to_csv(&eff.rho))?;
    out.json(
        "quietstate.json",
        &QuietStateFile {
            setup: SetupSummary::of(&setup),
            beats: quiet.beats,
            quiet: report,
            truncation,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerComparison {
    pub numeric: String,
    pub reference: String,
    /// sup |W₁ − W₂| over |α| ≤ radius.
    pub sup_difference: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerReport {
    pub time: f64,
    pub vacuum_origin: f64,
    pub comparisons: Vec<WignerComparison>,
    pub negativity: BTreeMap<String, NegativityReport>,
    pub integrals: BTreeMap<String, f64>,
}

/// All maps of the Wigner scenario, keyed by name.
pub fn wigner_maps(
    quiet: &QuietState,
    grid: &crate::wigner::PhaseSpaceGrid,
) -> Result<Vec<(String, WignerMap)>> {
    let fock = quiet.targets.fock;
    let photon = reduced_photon_state(&quiet.state)?;
    let cond_e = conditional_photon_state(&quiet.state, Qubit::Excited)?.state;
    let cond_g = conditional_photon_state(&quiet.state, Qubit::Ground)?.state;
    let target = |v: &crate::linalg::CVector| QuantumState::pure(Space::Fock(fock), v.clone());
    let mut maps = vec![
        (
            "unconditioned".to_string(),
            wigner_numeric(&photon, grid, "reduced photon state")?,
        ),
        (
            "conditional_e".to_string(),
            wigner_numeric(&cond_e, grid, "photon state given e")?,
        ),
        (
            "conditional_g".to_string(),
            wigner_numeric(&cond_g, grid, "photon state given g")?,
        ),
        (
            "target_even".to_string(),
            wigner_numeric(&target(&quiet.targets.even)?, grid, "even target")?,
        ),
        (
            "target_odd".to_string(),
            wigner_numeric(&target(&quiet.targets.odd)?, grid, "odd target")?,
        ),
        (
            "vacuum".to_string(),
            wigner_numeric(&crate::fockspace::fock_state(fock, 0)?, grid, "vacuum")?,
        ),
    ];
    if quiet.targets.label == crate::model::CrossingLabel::I {
        maps.push(("even_analytic".to_string(), wigner_even_analytic(grid)?));
        maps.push(("odd_analytic".to_string(), wigner_odd_analytic(grid)?));
    }
    Ok(maps)
}

pub fn wigner_report(quiet: &QuietState, maps: &[(String, WignerMap)]) -> Result<WignerReport> {
    let get = |name: &str| maps.iter().find(|(n, _)| n == name).map(|(_, m)| m);
    let vacuum = get("vacuum").expect("vacuum map is always built");
    let radius = vacuum.grid.re_max.min(vacuum.grid.im_max);
    let (even_ref, odd_ref) = if get("even_analytic").is_some() {
        ("even_analytic", "odd_analytic")
    } else {
        ("target_even", "target_odd")
    };
    let mut comparisons = Vec::new();
    for (numeric, reference) in [
        ("conditional_e", even_ref),
        ("conditional_g", odd_ref),
        ("target_even", even_ref),
        ("target_odd", odd_ref),
    ] {
        if numeric == reference {
            continue;
        }
        comparisons.push(WignerComparison {
            numeric: numeric.into(),
            reference: reference.into(),
            sup_difference: get(numeric)
                .unwrap()
                .sup_difference(get(reference).unwrap(), radius)?,
            radius,
        });
    }
    let origin = crate::linalg::C64::new(0.0, 0.0);
    Ok(WignerReport {
        time: quiet.time,
        vacuum_origin: crate::wigner::displaced_parity(
            &crate::fockspace::fock_state(quiet.targets.fock, 0)?.to_density_matrix(),
            origin,
        )
        .re,
        comparisons,
        negativity: maps
            .iter()
            .map(|(n, m)| (n.clone(), negativity_report(m)))
            .collect(),
        integrals: maps
            .iter()
            .map(|(n, m)| (n.clone(), m.integral()))
            .collect(),
    })
}

fn run_wigner(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let setup = resolve_setup(cfg)?;
    let quiet = find_quiet_state(&setup)?;
    let maps = wigner_maps(&quiet, &cfg.phase_space)?;
    for (name, map) in &maps {
        out.text(&format!("wigner_{name}.csv"), &map.to_csv())?;
        let payload = format!("wigner_{name}.bin");
        out.write(&payload, &map.payload_le_bytes())?;
        out.json(&format!("wigner_{name}.json"), &map.header(&payload))?;
    }
    out.json("wigner_report.json", &wigner_report(&quiet, &maps)?)
}

/// Quiet-state figures of merit at one g/G.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub ratio: f64,
    pub coupling: f64,
    pub detuning: f64,
    pub time: f64,
    pub fidelity: f64,
    pub pure_form_fidelity: f64,
    pub concurrence: f64,
    pub leakage: f64,
    pub relative_phase: f64,
    pub populations: [f64; 4],
    #[serde(skip)]
    pub rho_prime: CMatrix,
}

/// Time grid for a scan point: long enough for 1.3 slow periods, sampled
/// finely relative to π/g.
fn scan_grid(base: &TimeGrid, coupling: f64, slow_period: f64) -> TimeGrid {
    let fast = PI / coupling;
    let dt_out = base.dt_out.min(fast / 150.0);
    let dt_int = base.dt_int.min(dt_out);
    TimeGrid::new(1.3 * slow_period, dt_out, dt_int)
}

pub fn scan_point(cfg: &ScenarioConfig, ratio: f64) -> Result<ScanPoint> {
    let parametric = cfg.system.parametric;
    let coupling = ratio * parametric;
    let space = cfg.space()?;
    let template =
        SystemParams::new(0.0, coupling, parametric).with_decay(cfg.system.kappa, cfg.system.gamma);
    let (detuning, record) =
        resolve_detuning(&template, cfg.system.detuning, cfg.system.crossing, space)?;
    let gap = record
        .as_ref()
        .map(|r| r.gap)
        .unwrap_or_else(|| prediction_for(&template, cfg.system.crossing).perturbative_gap);
    if gap <= 0.0 {
        return Err(Error::InvalidParameter(
            "scan needs a nonzero crossing gap".into(),
        ));
    }
    let slow = 2.0 * PI / gap;
    let setup = Setup {
        params: template.with_detuning(detuning),
        space,
        grid: scan_grid(&cfg.time.grid(), coupling, slow),
        crossing: cfg.system.crossing,
        record,
        expected_slow_period: Some(slow),
    };
    let quiet = find_quiet_state(&setup)?;
    let photon = reduced_photon_state(&quiet.state)?;
    let fid = fidelity_report(&photon, &quiet.targets)?;
    let eff = effective_two_qubit(&quiet.state, &quiet.targets)?;
    Ok(ScanPoint {
        ratio,
        coupling,
        detuning,
        time: quiet.time,
        fidelity: fid.subspace,
        pure_form_fidelity: fid.pure_form,
        concurrence: eff.concurrence()?,
        leakage: eff.leakage,
        relative_phase: eff.relative_phase(),
        populations: eff.populations(),
        rho_prime: eff.rho,
    })
}

pub fn fidelity_scan(cfg: &ScenarioConfig) -> Result<Vec<ScanPoint>> {
    cfg.scan
        .ratios
        .par_iter()
        .map(|&r| scan_point(cfg, r))
        .collect()
}

fn ratio_tag(r: f64) -> String {
    format!("{r}").replace('.', "p")
}

fn run_fidelity_scan(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    use crate::io::fmt_f64;
    let points = fidelity_scan(cfg)?;
    let mut csv = String::from(
        "g_over_G,coupling,detuning,time,fidelity,pure_form_fidelity,concurrence,leakage,relative_phase,pop_gE,pop_gO,pop_eE,pop_eO\n",
    );
    for p in &points {
        let mut cells = vec![
            fmt_f64(p.ratio),
            fmt_f64(p.coupling),
            fmt_f64(p.detuning),
            fmt_f64(p.time),
            fmt_f64(p.fidelity),
            fmt_f64(p.pure_form_fidelity),
            fmt_f64(p.concurrence),
            fmt_f64(p.leakage),
            fmt_f64(p.relative_phase),
        ];
        cells.extend(p.populations.iter().map(|x| fmt_f64(*x)));
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    out.text("fidelity_scan.csv", &csv)?;
    // ρ′ dumps at the weakest and strongest coupling of the scan.
    let mut dumps: Vec<&ScanPoint> = Vec::new();
    let lowest = points.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let highest = points.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    for p in lowest.into_iter().chain(highest) {
        if !dumps.iter().any(|d| d.ratio == p.ratio) {
            dumps.push(p);
        }
    }
    for p in dumps {
        let tag = ratio_tag(p.ratio);
        out.text(
            &format!("rho_prime_g{tag}G.csv"),
            &matrix_to_csv(&p.rho_prime),
        )?;
        out.json(
            &format!("rho_prime_g{tag}G.json"),
            &TwoQubitDump {
                ratio: p.ratio,
                basis: TWO_QUBIT_BASIS.map(String::from),
                rho: (&p.rho_prime).into(),
            },
        )?;
    }
    out.json("fidelity_scan.json", &points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TwoQubitDump {
    ratio: f64,
    basis: [String; 4],
    rho: ComplexMatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampRun {
    pub profile: crate::dynamics::RampProfile,
    pub report: BeatReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampComparison {
    pub setup: SetupSummary,
    pub first: RampRun,
    pub second: RampRun,
    /// Contrast of the second profile minus that of the first.
    pub contrast_gain: f64,
}

/// Evolve both configured ramps; returns the comparison and both series.
pub fn ramp_compare(cfg: &ScenarioConfig) -> Result<(RampComparison, TimeSeries, TimeSeries)> {
    let setup = resolve_setup(cfg)?;
    let psi0 = excited_vacuum(setup.space);
    let run_one = |spec: crate::config::RampSpec| -> Result<(RampRun, TimeSeries)> {
        let profile = spec.profile(cfg.system.parametric);
        let series = evolve_ramped(&setup.params, &profile, &psi0, &setup.grid)?;
        let report = extract_beats(&series, setup.expected_slow_period)?;
        Ok((RampRun { profile, report }, series))
    };
    let (first, first_series) = run_one(cfg.ramp.first)?;
    let (second, second_series) = run_one(cfg.ramp.second)?;
    let comparison = RampComparison {
        setup: SetupSummary::of(&setup),
        contrast_gain: second.report.contrast - first.report.contrast,
        first,
        second,
    };
    Ok((comparison, first_series, second_series))
}

fn run_ramp_compare(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let (comparison, a, b) = ramp_compare(cfg)?;
    write_series(out, "timeseries_first", &a)?;
    write_series(out, "timeseries_second", &b)?;
    out.json("ramp_compare.json", &comparison)
}
