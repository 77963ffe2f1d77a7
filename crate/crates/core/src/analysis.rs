//! Reduced and conditional photon states, target superpositions, the
//! effective two-qubit picture with its concurrence, and beat extraction
//! from P_e(t).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::fockspace::{CompositeSpace, FockSpace, QuantumState, Qubit, Space};
use crate::linalg::{eigh, sqrtm_psd, trace, CMatrix, CVector, C64, I};
use crate::model::CrossingLabel;

/// Outcome probabilities below this cannot be conditioned on.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

fn composite_of(state: &QuantumState) -> Result<CompositeSpace> {
    match state.space() {
        Space::Composite(c) => Ok(c),
        other => Err(Error::ShapeMismatch(format!(
            "expected a qubit-field state, got {other:?}"
        ))),
    }
}

fn fock_matrix(state: &QuantumState) -> Result<(FockSpace, CMatrix)> {
    match state.space() {
        Space::Fock(f) => Ok((f, state.to_density_matrix())),
        other => Err(Error::ShapeMismatch(format!(
            "expected a photon state, got {other:?}"
        ))),
    }
}

/// Partial trace over the qubit.
pub fn reduced_photon_state(state: &QuantumState) -> Result<QuantumState> {
    let space = composite_of(state)?;
    let d = space.fock().dim();
    let rho = match state {
        QuantumState::Pure { vector, .. } => CMatrix::from_fn(d, d, |m, n| {
            vector[m] * vector[n].conj() + vector[d + m] * vector[d + n].conj()
        }),
        QuantumState::Density { matrix, .. } => {
            CMatrix::from_fn(d, d, |m, n| matrix[(m, n)] + matrix[(d + m, d + n)])
        }
    };
    QuantumState::density(Space::Fock(space.fock()), rho)
}

/// Photon state after the qubit was found in `outcome`.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub outcome: Qubit,
    pub probability: f64,
    pub state: QuantumState,
}

pub fn conditional_photon_state(state: &QuantumState, outcome: Qubit) -> Result<ConditionalState> {
    let space = composite_of(state)?;
    let fock = space.fock();
    let d = fock.dim();
    let offset = outcome.index() * d;
    match state {
        QuantumState::Pure { vector, .. } => {
            let block = vector.rows(offset, d).into_owned();
            let p = block.norm_squared();
            if p <= MIN_OUTCOME_PROBABILITY {
                return Err(Error::ZeroProbability(p));
            }
            Ok(ConditionalState {
                outcome,
                probability: p,
                state: QuantumState::pure(Space::Fock(fock), block.unscale(p.sqrt()))?,
            })
        }
        QuantumState::Density { matrix, .. } => {
            let block = matrix.view((offset, offset), (d, d)).into_owned();
            let p = trace(&block).re;
            if p <= MIN_OUTCOME_PROBABILITY {
                return Err(Error::ZeroProbability(p));
            }
            Ok(ConditionalState {
                outcome,
                probability: p,
                state: QuantumState::density(Space::Fock(fock), block.unscale(p))?,
            })
        }
    }
}

/// The even and odd photon superpositions formed at a crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStates {
    pub label: CrossingLabel,
    pub fock: FockSpace,
    pub even: CVector,
    pub odd: CVector,
}

impl TargetStates {
    pub fn new(label: CrossingLabel, fock: FockSpace, even: CVector, odd: CVector) -> Result<Self> {
        let d = fock.dim();
        if even.len() != d || odd.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "target vectors must have length {d}"
            )));
        }
        for (name, v) in [("even", &even), ("odd", &odd)] {
            if (v.norm_squared() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "{name} target is not normalized"
                )));
            }
        }
        if even.dotc(&odd).norm() > 1e-9 {
            return Err(Error::InvalidParameter("targets are not orthogonal".into()));
        }
        Ok(Self {
            label,
            fock,
            even,
            odd,
        })
    }

    /// (|0⟩ + i|2⟩)/√2 and (|1⟩ + i|3⟩)/√2.
    pub fn crossing_i(fock: FockSpace) -> Result<Self> {
        Self::new(
            CrossingLabel::I,
            fock,
            pair_superposition(fock, 0, 2)?,
            pair_superposition(fock, 1, 3)?,
        )
    }

    /// Even target (|0⟩ + i|4⟩)/√2; the odd partner is the principal
    /// eigenvector of the supplied conditional-g photon state.
    pub fn crossing_ii(fock: FockSpace, conditional_ground: &QuantumState) -> Result<Self> {
        let even = pair_superposition(fock, 0, 4)?;
        let (f, rho) = fock_matrix(conditional_ground)?;
        if f != fock {
            return Err(Error::ShapeMismatch("photon spaces differ".into()));
        }
        let odd = principal_vector(&rho)?.0;
        Self::new(CrossingLabel::II, fock, even, odd)
    }

    fn projector(&self) -> CMatrix {
        self.even.clone() * self.even.adjoint() + self.odd.clone() * self.odd.adjoint()
    }
}

fn pair_superposition(fock: FockSpace, low: usize, high: usize) -> Result<CVector> {
    if high > fock.n_max() {
        return Err(Error::OutOfRange {
            what: "target photon number",
            value: high,
            max: fock.n_max(),
        });
    }
    let mut v = CVector::zeros(fock.dim());
    v[low] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[high] = I * FRAC_1_SQRT_2;
    Ok(v)
}

/// Largest eigenvalue and its eigenvector, phase-fixed so the first
/// component of largest magnitude is real positive.
fn principal_vector(rho: &CMatrix) -> Result<(CVector, f64)> {
    let e = eigh(rho)?;
    let k = e.values.len() - 1;
    let mut v = e.vectors.column(k).into_owned();
    let lead = v.iter().copied().fold(C64::new(0.0, 0.0), |a, z| {
        if z.norm() > a.norm() + 1e-12 {
            z
        } else {
            a
        }
    });
    if lead.norm() > 0.0 {
        let phase = lead.conj() / lead.norm();
        v = v.map(|z| z * phase);
    }
    Ok((v, e.values[k]))
}

/// Tr[ρ_ph (|even⟩⟨even| + |odd⟩⟨odd|)].
pub fn subspace_fidelity(photon: &QuantumState, targets: &TargetStates) -> Result<f64> {
    let (f, rho) = fock_matrix(photon)?;
    if f != targets.fock {
        return Err(Error::ShapeMismatch("photon spaces differ".into()));
    }
    Ok(trace(&(rho * targets.projector())).re.clamp(0.0, 1.0))
}

/// The subspace fidelity together with the diagnostics it does not
/// constrain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Tr[ρ_ph ρ_T].
    pub subspace: f64,
    /// ⟨even|ρ_ph|even⟩.
    pub even_overlap: f64,
    /// ⟨odd|ρ_ph|odd⟩.
    pub odd_overlap: f64,
    /// ⟨ph|ρ_T|ph⟩ with |ph⟩ the dominant eigenvector of ρ_ph.
    pub pure_form: f64,
    /// Weight of that eigenvector.
    pub principal_weight: f64,
}

pub fn fidelity_report(photon: &QuantumState, targets: &TargetStates) -> Result<FidelityReport> {
    let subspace = subspace_fidelity(photon, targets)?;
    let (_, rho) = fock_matrix(photon)?;
    let overlap = |v: &CVector| (v.adjoint() * &rho * v)[(0, 0)].re;
    let (ph, weight) = principal_vector(&rho)?;
    let pure_form = (ph.adjoint() * targets.projector() * &ph)[(0, 0)].re;
    Ok(FidelityReport {
        subspace,
        even_overlap: overlap(&targets.even),
        odd_overlap: overlap(&targets.odd),
        pure_form,
        principal_weight: weight,
    })
}

/// Basis labels of the effective two-qubit space, in matrix order.
pub const TWO_QUBIT_BASIS: [&str; 4] = ["g,E", "g,O", "e,E", "e,O"];

/// Qubit ⊗ {|even⟩, |odd⟩} projection of a qubit-field state.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTwoQubit {
    /// Renormalized 4×4 density matrix in [`TWO_QUBIT_BASIS`] order.
    pub rho: CMatrix,
    /// 1 − weight inside the projected subspace.
    pub leakage: f64,
}

pub fn effective_two_qubit(
    state: &QuantumState,
    targets: &TargetStates,
) -> Result<EffectiveTwoQubit> {
    let space = composite_of(state)?;
    if space.fock() != targets.fock {
        return Err(Error::ShapeMismatch("photon spaces differ".into()));
    }
    let d = space.fock().dim();
    let mut basis = CMatrix::zeros(space.dim(), 4);
    for (col, (q, v)) in [
        (Qubit::Ground, &targets.even),
        (Qubit::Ground, &targets.odd),
        (Qubit::Excited, &targets.even),
        (Qubit::Excited, &targets.odd),
    ]
    .into_iter()
    .enumerate()
    {
        basis.view_mut((q.index() * d, col), (d, 1)).copy_from(v);
    }
    let full = state.to_density_matrix();
    let projected = basis.adjoint() * full * &basis;
    let weight = trace(&projected).re;
    if weight < MIN_OUTCOME_PROBABILITY {
        return Err(Error::ZeroProbability(weight));
    }
    let rho = projected.unscale(weight);
    let rho = (&rho + rho.adjoint()).scale(0.5);
    Ok(EffectiveTwoQubit {
        rho,
        leakage: (1.0 - weight / state.trace()).clamp(0.0, 1.0),
    })
}

impl EffectiveTwoQubit {
    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.rho[(k, k)].re)
    }

    /// φ in (|e,E⟩ + e^{iφ}|g,O⟩)/𝒜, read from ρ′[gO, eE].
    pub fn relative_phase(&self) -> f64 {
        self.rho[(1, 2)].arg()
    }

    pub fn concurrence(&self) -> Result<f64> {
        concurrence(&self.rho)
    }
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::ShapeMismatch(
            "concurrence needs a 4x4 matrix".into(),
        ));
    }
    // σ_y ⊗ σ_y is real with ±1 on the anti-diagonal.
    let flip = CMatrix::from_fn(4, 4, |r, col| {
        if r + col == 3 {
            C64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let tilde = &flip * rho.conjugate() * &flip;
    let root = sqrtm_psd(rho)?;
    let mut lambdas: Vec<f64> = eigh(&(&root * tilde * &root))?
        .values
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// A complex matrix entry for JSON summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Populations and the largest off-diagonal entries of a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub populations: Vec<f64>,
    pub top_coherences: Vec<Coherence>,
}

pub fn summarize_density(rho: &CMatrix, top: usize) -> DensitySummary {
    let n = rho.nrows();
    let mut coherences: Vec<Coherence> = (0..n)
        .flat_map(|r| (r + 1..n).map(move |col| (r, col)))
        .map(|(row, col)| {
            let z = rho[(row, col)];
            Coherence {
                row,
                col,
                re: z.re,
                im: z.im,
                abs: z.norm(),
            }
        })
        .collect();
    // Stable sort keeps index order among equal magnitudes.
    coherences.sort_by(|a, b| b.abs.total_cmp(&a.abs));
    coherences.truncate(top);
    DensitySummary {
        populations: (0..n).map(|k| rho[(k, k)].re).collect(),
        top_coherences: coherences,
    }
}

/// Tuning of [`extract_beats`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatAnalysis {
    /// Required coverage in units of the slow period.
    pub min_coverage: f64,
    /// Envelope extrema closer than this many fast periods to either end
    /// are discarded.
    pub edge_periods: f64,
    /// Relative envelope modulation below which no slow period is reported.
    pub min_modulation: f64,
}

impl Default for BeatAnalysis {
    fn default() -> Self {
        Self {
            min_coverage: 1.2,
            edge_periods: 2.0,
            min_modulation: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuietSpot {
    pub time: f64,
    /// P_e at the nearest sample.
    pub excited_population: f64,
    /// Slow (low-passed) part of P_e there.
    pub excited_population_mean: f64,
    /// Peak-to-peak fast amplitude there.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatReport {
    pub fast_period: f64,
    pub slow_period: Option<f64>,
    pub quiet_spots: Vec<QuietSpot>,
    /// Max − min of the fast-oscillation envelope away from the edges.
    pub contrast: f64,
    pub envelope_max: f64,
    pub envelope_min: f64,
}

/// Decomposed P_e(t): slow part, fast peak-to-peak envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSignal {
    pub times: Vec<f64>,
    pub slow: Vec<f64>,
    pub envelope: Vec<f64>,
}

pub fn extract_beats(series: &TimeSeries, expected_slow_period: Option<f64>) -> Result<BeatReport> {
    extract_beats_with(series, expected_slow_period, &BeatAnalysis::default()).map(|(r, _)| r)
}

/// Beat extraction returning the intermediate signal as well.
///
/// T₁ comes from the dominant non-DC band of the Hann-windowed spectrum of
/// P_e; the envelope is twice the analytic-signal magnitude of P_e with the
/// band below half the fast frequency removed; T₂ is twice the distance
/// between adjacent interior envelope extrema.
pub fn extract_beats_with(
    series: &TimeSeries,
    expected_slow_period: Option<f64>,
    cfg: &BeatAnalysis,
) -> Result<(BeatReport, BeatSignal)> {
    let n = series.len();
    let dt = series.sample_interval();
    if n < 16 || dt <= 0.0 {
        return Err(Error::SeriesTooShort {
            covered: series.times.last().copied().unwrap_or(0.0),
            required: 16.0 * dt.max(0.0),
        });
    }
    let span = series.times[n - 1] - series.times[0];
    if let Some(t2) = expected_slow_period {
        if span < cfg.min_coverage * t2 {
            return Err(Error::SeriesTooShort {
                covered: span,
                required: cfg.min_coverage * t2,
            });
        }
    }
    let pe = &series.excited_population;
    let fast_period = 1.0 / dominant_frequency(pe, dt, 3.0 / span)?;
    let signal = decompose(&series.times, pe, dt, 0.5 / fast_period);

    let edge = cfg.edge_periods * fast_period;
    let interior: Vec<usize> = (0..n)
        .filter(|&k| {
            let t = series.times[k] - series.times[0];
            t >= edge && t <= span - edge
        })
        .collect();
    if interior.len() < 3 {
        return Err(Error::SeriesTooShort {
            covered: span,
            required: 2.0 * edge,
        });
    }
    let env = &signal.envelope;
    let (env_min, env_max) = interior
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
            (lo.min(env[k]), hi.max(env[k]))
        });
    let modulated = env_max > 0.0 && (env_max - env_min) / env_max >= cfg.min_modulation;

    let mut quiet_spots = Vec::new();
    let mut slow_period = None;
    if modulated {
        let extrema = envelope_extrema(
            &series.times,
            env,
            &interior,
            fast_period / dt,
            env_max - env_min,
        );
        for &(time, is_min) in &extrema {
            if is_min {
                let k = nearest_sample(&series.times, time);
                quiet_spots.push(QuietSpot {
                    time,
                    excited_population: pe[k],
                    excited_population_mean: signal.slow[k],
                    envelope: env[k],
                });
            }
        }
        slow_period = extrema
            .windows(2)
            .find(|w| w[0].1 != w[1].1)
            .map(|w| 2.0 * (w[1].0 - w[0].0))
            .or_else(|| {
                // A single minimum: the envelope starts at its maximum.
                quiet_spots
                    .first()
                    .map(|q| 2.0 * (q.time - series.times[0]))
            });
    }
    if let Some(t2) = slow_period {
        if span < cfg.min_coverage * t2 {
            return Err(Error::SeriesTooShort {
                covered: span,
                required: cfg.min_coverage * t2,
            });
        }
    }
    Ok((
        BeatReport {
            fast_period,
            slow_period,
            quiet_spots,
            contrast: env_max - env_min,
            envelope_max: env_max,
            envelope_min: env_min,
        },
        signal,
    ))
}

fn fft(buffer: &mut [C64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buffer.len())
    } else {
        planner.plan_fft_forward(buffer.len())
    };
    plan.process(buffer);
}

/// Carrier frequency of the dominant Hann-windowed spectral band above
/// `f_min`, on an 8× zero-padded spectrum.
fn dominant_frequency(x: &[f64], dt: f64, f_min: f64) -> Result<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let len = (8 * n).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for (k, v) in x.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
        buf[k] = C64::new((v - mean) * w, 0.0);
    }
    fft(&mut buf, false);
    let df = 1.0 / (len as f64 * dt);
    let k_min = ((f_min / df).ceil() as usize).max(1);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|z| z.norm()).collect();
    let k = (k_min..len / 2 - 1)
        .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
        .ok_or(Error::SeriesTooShort {
            covered: n as f64 * dt,
            required: 2.0 / f_min,
        })?;
    if mag[k] <= 0.0 {
        return Err(Error::InvalidParameter(
            "P_e has no oscillating component".into(),
        ));
    }
    // A beat splits the carrier into a doublet; the power centroid of the
    // band around the strongest line recovers the carrier itself.
    let lo = ((0.75 * k as f64) as usize).max(k_min);
    let hi = ((1.25 * k as f64).ceil() as usize).min(len / 2 - 1);
    let (weighted, total) = (lo..=hi).fold((0.0, 0.0), |(wf, w), j| {
        let p = mag[j] * mag[j];
        (wf + p * j as f64, w + p)
    });
    Ok(weighted / total * df)
}

/// Split `x` into its band below `f_cut` and twice the analytic-signal
/// magnitude of the rest. Even reflection removes the end discontinuity of
/// the implied periodic extension.
fn decompose(times: &[f64], x: &[f64], dt: f64, f_cut: f64) -> BeatSignal {
    let n = x.len();
    let len = 2 * n;
    let mut buf: Vec<C64> = x
        .iter()
        .chain(x.iter().rev())
        .map(|&v| C64::new(v, 0.0))
        .collect();
    fft(&mut buf, false);
    let df = 1.0 / (len as f64 * dt);
    let freq = |k: usize| if k <= len / 2 { k as f64 } else { (len - k) as f64 } * df;

    let mut low = buf.clone();
    let mut analytic = buf;
    for k in 0..len {
        if freq(k) > f_cut {
            low[k] = C64::new(0.0, 0.0);
        } else {
            analytic[k] = C64::new(0.0, 0.0);
        }
        if k > len / 2 {
            analytic[k] = C64::new(0.0, 0.0);
        } else if k > 0 && k < len / 2 {
            analytic[k] *= 2.0;
        }
    }
    fft(&mut low, true);
    fft(&mut analytic, true);
    let scale = 1.0 / len as f64;
    BeatSignal {
        times: times.to_vec(),
        slow: low[..n].iter().map(|z| z.re * scale).collect(),
        envelope: analytic[..n]
            .iter()
            .map(|z| 2.0 * z.norm() * scale)
            .collect(),
    }
}

/// Alternating local extrema `(time, is_min)` of the envelope over
/// `interior`, after a moving average one fast period wide. Extrema
/// shallower than 10% of the modulation `depth` are merged away; each one is
/// placed at the midpoint of the two crossings of a level 20% of `depth`
/// away from it, which stays well defined on flat tops.
fn envelope_extrema(
    times: &[f64],
    env: &[f64],
    interior: &[usize],
    window: f64,
    depth: f64,
) -> Vec<(f64, bool)> {
    let half = ((window / 2.0).round() as usize).max(1);
    let smooth: Vec<f64> = (0..env.len())
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half + 1).min(env.len());
            env[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let threshold = 0.1 * depth;
    let mut out: Vec<(f64, bool)> = Vec::new();
    // Hysteresis walk: commit an extremum once the signal has moved away
    // from it by more than the threshold.
    let mut best = interior[0];
    let mut direction: Option<bool> = None; // Some(true) while descending
    for &k in &interior[1..] {
        match direction {
            None => {
                if smooth[k] < smooth[best] - threshold {
                    direction = Some(true);
                    best = k;
                } else if smooth[k] > smooth[best] + threshold {
                    direction = Some(false);
                    best = k;
                } else if (smooth[k] - smooth[interior[0]]).abs() < threshold {
                    continue;
                }
            }
            Some(true) => {
                if smooth[k] < smooth[best] {
                    best = k;
                } else if smooth[k] > smooth[best] + threshold {
                    out.push((
                        level_midpoint(times, &smooth, best, true, 0.2 * depth),
                        true,
                    ));
                    direction = Some(false);
                    best = k;
                }
            }
            Some(false) => {
                if smooth[k] > smooth[best] {
                    best = k;
                } else if smooth[k] < smooth[best] - threshold {
                    out.push((
                        level_midpoint(times, &smooth, best, false, 0.2 * depth),
                        false,
                    ));
                    direction = Some(true);
                    best = k;
                }
            }
        }
    }
    out
}

fn level_midpoint(times: &[f64], y: &[f64], k: usize, is_min: bool, offset: f64) -> f64 {
    let level = if is_min { y[k] + offset } else { y[k] - offset };
    let beyond = |j: usize| if is_min { y[j] >= level } else { y[j] <= level };
    let crossing = |inner: usize, outer: usize| {
        let frac = (level - y[inner]) / (y[outer] - y[inner]);
        times[inner] + frac * (times[outer] - times[inner])
    };
    let left = (1..=k)
        .rev()
        .find(|&j| beyond(j - 1))
        .map(|j| crossing(j, j - 1));
    let right = (k..y.len() - 1)
        .find(|&j| beyond(j + 1))
        .map(|j| crossing(j, j + 1));
    match (left, right) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        _ => times[k],
    }
}

fn nearest_sample(times: &[f64], t: f64) -> usize {
    let k = times.partition_point(|&x| x < t);
    if k == 0 {
        0
    } else if k == times.len() || t - times[k - 1] <= times[k] - t {
        k - 1
    } else {
        k
    }
}

/// Instant within `center ± half_width` that maximizes the subspace
/// fidelity of the reduced photon state, scanned with step `step`.
pub fn align_quiet_instant(
    center: f64,
    half_width: f64,
    step: f64,
    targets: &TargetStates,
    state_at: impl Fn(f64) -> Result<QuantumState>,
) -> Result<(f64, f64)> {
    if step <= 0.0 || half_width < 0.0 {
        return Err(Error::InvalidParameter(
            "scan step and width must be positive".into(),
        ));
    }
    let count = (2.0 * half_width / step).round() as usize;
    let mut best = (center, f64::NEG_INFINITY);
    for k in 0..=count {
        let t = (center - half_width + k as f64 * step).max(0.0);
        let f = subspace_fidelity(&reduced_photon_state(&state_at(t)?)?, targets)?;
        if f > best.1 {
            best = (t, f);
        }
    }
    Ok(best)
}
