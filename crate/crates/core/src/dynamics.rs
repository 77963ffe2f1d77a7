//! Time evolution.
//!
//! * constant H: exact propagation through the eigen-decomposition of H;
//! * ramped parametric drive G(t): piecewise propagation with G frozen at
//!   the midpoint of each internal step;
//! * open system: Lindblad master equation with cavity (κ) and qubit (γ)
//!   decay, integrated with fixed-step RK4 in the interaction picture of
//!   H so the coherent part is exact and only the dissipator is stepped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{
    annihilation, on_field, on_qubit, qubit_ops, CompositeSpace, Operator, QuantumState, Space,
};
use crate::linalg::{eigh, eigvalsh, hermiticity_defect, trace, CMatrix, CVector, Eigh, C64, I};
use crate::model::{HamiltonianTerms, SystemParams};

/// Relative fidelity change allowed when halving the ramp step.
pub const RAMP_STEP_GATE: f64 = 1e-8;
/// Largest observable change allowed when halving the Lindblad step.
pub const LINDBLAD_STEP_GATE: f64 = 1e-7;
pub const UNITARY_NORM_TOL: f64 = 1e-9;
pub const LINDBLAD_TRACE_TOL: f64 = 1e-8;
pub const LINDBLAD_POSITIVITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampKind {
    Constant,
    Linear,
    Tanh,
}

/// Switch-on profile of the parametric strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampProfile {
    pub kind: RampKind,
    pub final_strength: f64,
    /// Ramp duration τ_r in units of 1/g; ignored for `Constant`.
    pub duration: f64,
}

/// Steepness of the tanh switch-on; G(t) spans tanh(−k)…tanh(k) over τ_r.
const TANH_STEEPNESS: f64 = 3.0;

impl RampProfile {
    pub fn constant(strength: f64) -> Self {
        Self {
            kind: RampKind::Constant,
            final_strength: strength,
            duration: 0.0,
        }
    }

    pub fn linear(strength: f64, duration: f64) -> Self {
        Self {
            kind: RampKind::Linear,
            final_strength: strength,
            duration,
        }
    }

    pub fn tanh(strength: f64, duration: f64) -> Self {
        Self {
            kind: RampKind::Tanh,
            final_strength: strength,
            duration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.final_strength.is_finite() && self.final_strength >= 0.0) {
            return Err(Error::InvalidParameter(
                "ramp final strength must be finite and >= 0".into(),
            ));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::InvalidParameter(
                "ramp duration must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Time from which G(t) equals the final strength.
    pub fn settle_time(&self) -> f64 {
        match self.kind {
            RampKind::Constant => 0.0,
            _ => self.duration,
        }
    }

    pub fn strength_at(&self, t: f64) -> f64 {
        let gf = self.final_strength;
        if t >= self.settle_time() {
            return gf;
        }
        let x = (t / self.duration).max(0.0);
        match self.kind {
            RampKind::Constant => gf,
            RampKind::Linear => gf * x,
            RampKind::Tanh => {
                let k = TANH_STEEPNESS;
                gf * ((k * (2.0 * x - 1.0)).tanh() + k.tanh()) / (2.0 * k.tanh())
            }
        }
    }
}

/// Output sampling and internal step, both in units of 1/g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt_out: f64,
    pub dt_int: f64,
    /// Keep a full state every `snapshot_stride` samples; 0 keeps none.
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_end: 100.0,
            dt_out: 0.02,
            dt_int: 0.005,
            snapshot_stride: 0,
        }
    }
}

impl TimeGrid {
    pub fn new(t_end: f64, dt_out: f64, dt_int: f64) -> Self {
        Self {
            t_end,
            dt_out,
            dt_int,
            snapshot_stride: 0,
        }
    }

    pub fn with_snapshots(self, stride: usize) -> Self {
        Self {
            snapshot_stride: stride,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.t_end.is_finite()
            && self.t_end >= 0.0
            && self.dt_out > 0.0
            && self.dt_int > 0.0
            && self.dt_int <= self.dt_out;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "time grid needs t_end >= 0 and 0 < dt_int <= dt_out (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.t_end / self.dt_out + 1e-9).floor() as usize + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples())
            .map(|k| k as f64 * self.dt_out)
            .collect()
    }

    /// Equal internal substeps per output interval, each ≤ dt_int.
    fn substeps(&self) -> (usize, f64) {
        let m = (self.dt_out / self.dt_int - 1e-9).ceil().max(1.0) as usize;
        (m, self.dt_out / m as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: QuantumState,
}

/// Observables sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub space: CompositeSpace,
    pub times: Vec<f64>,
    /// ⟨a†a⟩.
    pub mean_photons: Vec<f64>,
    /// P_e.
    pub excited_population: Vec<f64>,
    /// Photon-number distribution p₀ … p_{n_max} per sample.
    pub photon_distribution: Vec<Vec<f64>>,
    /// |⟨0|ρ_ph|2⟩| per sample.
    pub coherence_02: Vec<f64>,
    /// |⟨1|ρ_ph|3⟩| per sample.
    pub coherence_13: Vec<f64>,
    /// Trace (or norm²) per sample.
    pub trace: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
}

impl TimeSeries {
    fn new(space: CompositeSpace) -> Self {
        Self {
            space,
            times: Vec::new(),
            mean_photons: Vec::new(),
            excited_population: Vec::new(),
            photon_distribution: Vec::new(),
            coherence_02: Vec::new(),
            coherence_13: Vec::new(),
            trace: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample_interval(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    fn push_pure(&mut self, t: f64, psi: &CVector) {
        let d = self.space.fock().dim();
        let rho_ph =
            |m: usize, n: usize| -> C64 { psi[m] * psi[n].conj() + psi[d + m] * psi[d + n].conj() };
        let dist: Vec<f64> = (0..d)
            .map(|n| psi[n].norm_sqr() + psi[d + n].norm_sqr())
            .collect();
        let pe: f64 = (0..d).map(|n| psi[d + n].norm_sqr()).sum();
        self.push(t, dist, pe, &rho_ph, psi.norm_squared());
    }

    fn push_density(&mut self, t: f64, rho: &CMatrix) {
        let d = self.space.fock().dim();
        let rho_ph = |m: usize, n: usize| -> C64 { rho[(m, n)] + rho[(d + m, d + n)] };
        let dist: Vec<f64> = (0..d).map(|n| rho_ph(n, n).re).collect();
        let pe: f64 = (0..d).map(|n| rho[(d + n, d + n)].re).sum();
        self.push(t, dist, pe, &rho_ph, trace(rho).re);
    }

    fn push(
        &mut self,
        t: f64,
        dist: Vec<f64>,
        pe: f64,
        rho_ph: &dyn Fn(usize, usize) -> C64,
        tr: f64,
    ) {
        let d = dist.len();
        self.mean_photons
            .push(dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum());
        self.excited_population.push(pe);
        self.coherence_02
            .push(if d > 2 { rho_ph(0, 2).norm() } else { 0.0 });
        self.coherence_13
            .push(if d > 3 { rho_ph(1, 3).norm() } else { 0.0 });
        self.photon_distribution.push(dist);
        self.trace.push(tr);
        self.times.push(t);
    }

    /// CSV with columns `t, mean_n, P_e, p0 … p{n_max}`.
    pub fn to_csv(&self) -> String {
        use crate::io::fmt_f64;
        let d = self.space.fock().dim();
        let mut out = String::from("t,mean_n,P_e");
        for n in 0..d {
            out.push_str(&format!(",p{n}"));
        }
        out.push('\n');
        for k in 0..self.len() {
            out.push_str(&fmt_f64(self.times[k]));
            out.push(',');
            out.push_str(&fmt_f64(self.mean_photons[k]));
            out.push(',');
            out.push_str(&fmt_f64(self.excited_population[k]));
            for p in &self.photon_distribution[k] {
                out.push(',');
                out.push_str(&fmt_f64(*p));
            }
            out.push('\n');
        }
        out
    }

    /// Snapshot sidecar: each snapshot's vector (or density matrix,
    /// row-major) as little-endian f64 interleaved re/im, snapshots
    /// concatenated in time order.
    pub fn snapshots_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for s in &self.snapshots {
            match &s.state {
                QuantumState::Pure { vector, .. } => {
                    for z in vector.iter() {
                        out.extend_from_slice(&z.re.to_le_bytes());
                        out.extend_from_slice(&z.im.to_le_bytes());
                    }
                }
                QuantumState::Density { matrix, .. } => {
                    out.extend(crate::io::matrix_le_bytes(matrix));
                }
            }
        }
        out
    }
}

fn composite_of(state: &QuantumState) -> Result<CompositeSpace> {
    match state.space() {
        Space::Composite(c) => Ok(c),
        other => Err(Error::ShapeMismatch(format!(
            "evolution needs a qubit-field state, got {other:?}"
        ))),
    }
}

fn pure_vector(state: &QuantumState) -> Result<&CVector> {
    match state {
        QuantumState::Pure { vector, .. } => Ok(vector),
        QuantumState::Density { .. } => Err(Error::InvalidParameter(
            "Schrödinger evolution needs a pure initial state".into(),
        )),
    }
}

/// exp(−iHt) through one eigen-decomposition of a constant H.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: CompositeSpace,
    eig: Eigh,
}

impl Propagator {
    pub fn new(h: &Operator) -> Result<Self> {
        let space = match h.space() {
            Space::Composite(c) => c,
            other => {
                return Err(Error::ShapeMismatch(format!(
                    "Hamiltonian must act on the qubit-field space, got {other:?}"
                )))
            }
        };
        Ok(Self {
            space,
            eig: eigh(h.matrix())?,
        })
    }

    pub fn space(&self) -> CompositeSpace {
        self.space
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Amplitudes of ψ₀ in the eigenbasis.
    pub fn project(&self, psi0: &CVector) -> CVector {
        self.eig.vectors.adjoint() * psi0
    }

    /// ψ(t) from eigenbasis amplitudes of ψ₀.
    pub fn state_from_projection(&self, amps: &CVector, t: f64) -> CVector {
        let phased = CVector::from_fn(amps.len(), |k, _| {
            amps[k] * (-I * self.eig.values[k] * t).exp()
        });
        &self.eig.vectors * phased
    }

    pub fn state_at(&self, psi0: &CVector, t: f64) -> CVector {
        self.state_from_projection(&self.project(psi0), t)
    }

    pub fn matrix(&self, t: f64) -> CMatrix {
        self.eig.apply_fn(|lam| (-I * lam * t).exp())
    }
}

/// ψ(t) = exp(−iHt)ψ₀ sampled on `grid`.
pub fn evolve_schrodinger(
    h: &Operator,
    psi0: &QuantumState,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    grid.validate()?;
    let space = composite_of(psi0)?;
    if h.space() != psi0.space() {
        return Err(Error::ShapeMismatch(
            "Hamiltonian and initial state live on different spaces".into(),
        ));
    }
    if h.hermiticity_defect() > 1e-10 {
        return Err(Error::InvalidParameter(
            "Hamiltonian is not Hermitian".into(),
        ));
    }
    let v0 = pure_vector(psi0)?;
    check_norm(v0.norm_squared())?;
    let prop = Propagator::new(h)?;
    let amps = prop.project(v0);
    let mut series = TimeSeries::new(space);
    for (k, t) in grid.times().into_iter().enumerate() {
        let psi = prop.state_from_projection(&amps, t);
        check_norm(psi.norm_squared())?;
        series.push_pure(t, &psi);
        maybe_snapshot(&mut series, grid, k, t, || {
            QuantumState::pure(Space::Composite(space), psi.clone())
        })?;
    }
    Ok(series)
}

fn check_norm(n2: f64) -> Result<()> {
    if (n2 - 1.0).abs() > UNITARY_NORM_TOL {
        return Err(Error::Invariant(format!("state norm² drifted to {n2}")));
    }
    Ok(())
}

fn maybe_snapshot(
    series: &mut TimeSeries,
    grid: &TimeGrid,
    k: usize,
    t: f64,
    make: impl FnOnce() -> Result<QuantumState>,
) -> Result<()> {
    if grid.snapshot_stride > 0 && k.is_multiple_of(grid.snapshot_stride) {
        series.snapshots.push(Snapshot {
            time: t,
            state: make()?,
        });
    }
    Ok(())
}

/// Propagation with the parametric strength following `ramp`; the detuning
/// and coupling come from `template`.
///
/// Runs twice (step `dt_int` and `dt_int/2`) and fails the step gate if the
/// final states differ in fidelity by more than [`RAMP_STEP_GATE`].
pub fn evolve_ramped(
    template: &SystemParams,
    ramp: &RampProfile,
    psi0: &QuantumState,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let (series, last) = ramped_run(template, ramp, psi0, grid)?;
    let half = TimeGrid {
        dt_int: grid.dt_int / 2.0,
        snapshot_stride: 0,
        ..*grid
    };
    let (_, last_half) = ramped_run(template, ramp, psi0, &half)?;
    let infidelity = 1.0 - last.dotc(&last_half).norm_sqr();
    if infidelity.abs() > RAMP_STEP_GATE {
        return Err(Error::ConvergenceGate(format!(
            "halving dt_int changed the final-state fidelity by {infidelity:e}"
        )));
    }
    Ok(series)
}

fn ramped_run(
    template: &SystemParams,
    ramp: &RampProfile,
    psi0: &QuantumState,
    grid: &TimeGrid,
) -> Result<(TimeSeries, CVector)> {
    template.validate()?;
    ramp.validate()?;
    grid.validate()?;
    let space = composite_of(psi0)?;
    let mut psi = pure_vector(psi0)?.clone();
    check_norm(psi.norm_squared())?;

    let terms = HamiltonianTerms::new(space);
    let (m, h) = grid.substeps();
    let settled = terms.matrix(template.detuning, template.coupling, ramp.final_strength);
    let settled_step = eigh(&settled)?.apply_fn(|lam| (-I * lam * h).exp());
    let settle_time = ramp.settle_time();

    let mut series = TimeSeries::new(space);
    let times = grid.times();
    for (k, &t_out) in times.iter().enumerate() {
        if k > 0 {
            let t0 = times[k - 1];
            for s in 0..m {
                let start = t0 + s as f64 * h;
                psi = if start >= settle_time {
                    &settled_step * &psi
                } else {
                    let g_mid = ramp.strength_at(start + 0.5 * h);
                    let hm = terms.matrix(template.detuning, template.coupling, g_mid);
                    eigh(&hm)?.apply_fn(|lam| (-I * lam * h).exp()) * &psi
                };
            }
        }
        check_norm(psi.norm_squared())?;
        series.push_pure(t_out, &psi);
        maybe_snapshot(&mut series, grid, k, t_out, || {
            QuantumState::pure(Space::Composite(space), psi.clone())
        })?;
    }
    Ok((series, psi))
}

/// Collapse operators √κ·a and √γ·σ₋ on the qubit-field space.
pub fn collapse_operators(p: &SystemParams, space: CompositeSpace) -> Vec<CMatrix> {
    let mut ops = Vec::new();
    if p.kappa > 0.0 {
        let a = on_field(&annihilation(space.fock())).expect("field embedding");
        ops.push(a.into_matrix().scale(p.kappa.sqrt()));
    }
    if p.gamma > 0.0 {
        let (_, sm) = qubit_ops();
        let l = on_qubit(&sm, space.fock()).expect("qubit embedding");
        ops.push(l.into_matrix().scale(p.gamma.sqrt()));
    }
    ops
}

/// Lindblad evolution dρ/dt = −i[H,ρ] + κ𝒟[a]ρ + γ𝒟[σ₋]ρ.
///
/// Runs at `dt_int` and `dt_int/2`; fails if any sampled observable moves by
/// more than [`LINDBLAD_STEP_GATE`], or if trace, Hermiticity or positivity
/// drift past their tolerances.
pub fn evolve_lindblad(
    p: &SystemParams,
    rho0: &QuantumState,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let series = lindblad_run(p, rho0, grid, true)?;
    if p.kappa > 0.0 || p.gamma > 0.0 {
        let half = TimeGrid {
            dt_int: grid.dt_int / 2.0,
            snapshot_stride: 0,
            ..*grid
        };
        let fine = lindblad_run(p, rho0, &half, false)?;
        let mut worst = 0.0f64;
        for k in 0..series.len() {
            worst = worst
                .max((series.mean_photons[k] - fine.mean_photons[k]).abs())
                .max((series.excited_population[k] - fine.excited_population[k]).abs());
        }
        if worst > LINDBLAD_STEP_GATE {
            return Err(Error::ConvergenceGate(format!(
                "halving dt_int moved observables by {worst:e}"
            )));
        }
    }
    Ok(series)
}

struct InteractionFrame {
    energies: Vec<f64>,
    /// Collapse operators in the eigenbasis of H.
    jumps: Vec<CMatrix>,
    /// Σ L†L in the eigenbasis of H.
    decay: CMatrix,
}

impl InteractionFrame {
    /// P(t)[j,k] = exp(i(E_j − E_k)t).
    fn phases(&self, t: f64) -> CMatrix {
        let u: Vec<C64> = self.energies.iter().map(|e| (I * e * t).exp()).collect();
        CMatrix::from_fn(u.len(), u.len(), |j, k| u[j] * u[k].conj())
    }

    fn derivative(&self, ph: &CMatrix, rho: &CMatrix) -> CMatrix {
        let decay = self.decay.component_mul(ph);
        let mut out = (&decay * rho + rho * &decay).scale(-0.5);
        for l in &self.jumps {
            let li = l.component_mul(ph);
            out += &li * rho * li.adjoint();
        }
        out
    }

    fn rk4_step(&self, t: f64, h: f64, rho: &CMatrix) -> CMatrix {
        if self.jumps.is_empty() {
            return rho.clone();
        }
        let (p0, p1, p2) = (self.phases(t), self.phases(t + 0.5 * h), self.phases(t + h));
        let k1 = self.derivative(&p0, rho);
        let k2 = self.derivative(&p1, &(rho + k1.scale(0.5 * h)));
        let k3 = self.derivative(&p1, &(rho + k2.scale(0.5 * h)));
        let k4 = self.derivative(&p2, &(rho + k3.scale(h)));
        rho + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
    }
}

fn lindblad_run(
    p: &SystemParams,
    rho0: &QuantumState,
    grid: &TimeGrid,
    check: bool,
) -> Result<TimeSeries> {
    p.validate()?;
    grid.validate()?;
    let space = composite_of(rho0)?;
    let rho_start = rho0.to_density_matrix();
    QuantumState::density(Space::Composite(space), rho_start.clone())?.validate()?;

    let terms = HamiltonianTerms::new(space);
    let eig = eigh(&terms.matrix(p.detuning, p.coupling, p.parametric))?;
    let v = &eig.vectors;
    let vd = v.adjoint();
    let jumps: Vec<CMatrix> = collapse_operators(p, space)
        .into_iter()
        .map(|l| &vd * l * v)
        .collect();
    let decay = jumps
        .iter()
        .fold(CMatrix::zeros(space.dim(), space.dim()), |acc, l| {
            acc + l.adjoint() * l
        });
    let frame = InteractionFrame {
        energies: eig.values.clone(),
        jumps,
        decay,
    };

    let (m, h) = grid.substeps();
    let times = grid.times();
    let mut rho_i = &vd * &rho_start * v;
    let mut series = TimeSeries::new(space);
    for (k, &t_out) in times.iter().enumerate() {
        if k > 0 {
            let t0 = times[k - 1];
            for s in 0..m {
                rho_i = frame.rk4_step(t0 + s as f64 * h, h, &rho_i);
            }
        }
        let rho_eig = rho_i.component_mul(&frame.phases(t_out).map(|z| z.conj()));
        let rho = v * rho_eig * &vd;
        if check {
            check_density(&rho, t_out)?;
        }
        series.push_density(t_out, &rho);
        maybe_snapshot(&mut series, grid, k, t_out, || {
            QuantumState::density(Space::Composite(space), rho.clone())
        })?;
    }
    Ok(series)
}

fn check_density(rho: &CMatrix, t: f64) -> Result<()> {
    let tr = trace(rho).re;
    if (tr - 1.0).abs() > LINDBLAD_TRACE_TOL {
        return Err(Error::Invariant(format!(
            "trace drifted to {tr} at t = {t}"
        )));
    }
    let herm = hermiticity_defect(rho);
    if herm > LINDBLAD_TRACE_TOL {
        return Err(Error::Invariant(format!(
            "density lost Hermiticity ({herm:e}) at t = {t}"
        )));
    }
    let min = eigvalsh(rho)?[0];
    if min < -LINDBLAD_POSITIVITY_TOL {
        return Err(Error::Invariant(format!(
            "density eigenvalue {min:e} at t = {t}"
        )));
    }
    Ok(())
}

/// Real scalar helper for the mean of H in a pure state.
pub fn energy(h: &Operator, psi: &CVector) -> f64 {
    psi.dotc(&(h.matrix() * psi)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::{basis_state, Qubit};
    use crate::model::{excited_vacuum, hamiltonian};

    fn space(n: usize) -> CompositeSpace {
        CompositeSpace::with_n_max(n).unwrap()
    }

    #[test]
    fn ramp_profiles() {
        let t = RampProfile::tanh(0.1, 20.0);
        assert_eq!(t.strength_at(0.0), 0.0);
        assert!((t.strength_at(20.0) - 0.1).abs() < 1e-15);
        assert_eq!(t.strength_at(35.0), 0.1);
        assert!((t.strength_at(10.0) - 0.05).abs() < 1e-15);
        // Continuity at the end of the ramp.
        assert!((t.strength_at(20.0 - 1e-9) - 0.1).abs() < 1e-9);

        let l = RampProfile::linear(0.2, 10.0);
        assert!((l.strength_at(5.0) - 0.1).abs() < 1e-15);
        assert_eq!(RampProfile::constant(0.3).strength_at(0.0), 0.3);
        assert_eq!(RampProfile::tanh(0.1, 0.0).strength_at(0.0), 0.1);
        assert!(RampProfile::linear(-1.0, 1.0).validate().is_err());
    }

    #[test]
    fn time_grid_rules() {
        let g = TimeGrid::new(1.0, 0.1, 0.03);
        assert_eq!(g.samples(), 11);
        let (m, h) = g.substeps();
        assert_eq!(m, 4);
        assert!((h - 0.025).abs() < 1e-15);
        assert!(TimeGrid::new(1.0, 0.1, 0.2).validate().is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.0).validate().is_err());
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let s = space(4);
        let h = hamiltonian(&SystemParams::new(0.0, 1.0, 0.0), s).unwrap();
        let series =
            evolve_schrodinger(&h, &excited_vacuum(s), &TimeGrid::new(10.0, 0.05, 0.05)).unwrap();
        for (t, pe) in series.times.iter().zip(&series.excited_population) {
            assert!((pe - t.cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let s = space(3);
        let h = Operator::zeros(Space::Composite(s));
        let psi0 = basis_state(s, Qubit::Ground, 2).unwrap();
        let series =
            evolve_schrodinger(&h, &psi0, &TimeGrid::new(5.0, 0.5, 0.5).with_snapshots(1)).unwrap();
        for snap in &series.snapshots {
            assert_eq!(snap.state, psi0);
        }
    }

    #[test]
    fn density_input_rejected_for_schrodinger() {
        let s = space(2);
        let h = hamiltonian(&SystemParams::new(0.0, 1.0, 0.0), s).unwrap();
        let rho = excited_vacuum(s).into_density();
        assert!(evolve_schrodinger(&h, &rho, &TimeGrid::new(1.0, 0.1, 0.1)).is_err());
    }

    #[test]
    fn damped_cavity_decays_exponentially() {
        let s = space(3);
        // g must stay positive; MIN_POSITIVE leaves the field effectively uncoupled.
        let p = SystemParams::new(0.0, f64::MIN_POSITIVE, 0.0).with_decay(1.0, 0.0);
        let rho0 = basis_state(s, Qubit::Ground, 1).unwrap().into_density();
        let series = evolve_lindblad(&p, &rho0, &TimeGrid::new(5.0, 0.1, 0.01)).unwrap();
        for (t, n) in series.times.iter().zip(&series.mean_photons) {
            assert!((n - (-t).exp()).abs() < 1e-8, "t={t} n={n}");
        }
    }

    #[test]
    fn lindblad_without_decay_is_unitary() {
        let s = space(6);
        let p = SystemParams::new(1.3, 1.0, 0.1);
        let h = hamiltonian(&p, s).unwrap();
        let grid = TimeGrid::new(20.0, 0.1, 0.05);
        let a = evolve_schrodinger(&h, &excited_vacuum(s), &grid).unwrap();
        let b = evolve_lindblad(&p, &excited_vacuum(s).into_density(), &grid).unwrap();
        for k in 0..a.len() {
            assert!((a.mean_photons[k] - b.mean_photons[k]).abs() < 1e-7);
            assert!((a.excited_population[k] - b.excited_population[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn constant_ramp_matches_exact_propagation() {
        let s = space(6);
        let p = SystemParams::new(1.38, 1.0, 0.1);
        let h = hamiltonian(&p, s).unwrap();
        let grid = TimeGrid::new(10.0, 0.1, 0.05).with_snapshots(10);
        let exact = evolve_schrodinger(&h, &excited_vacuum(s), &grid).unwrap();
        let ramped =
            evolve_ramped(&p, &RampProfile::constant(0.1), &excited_vacuum(s), &grid).unwrap();
        for (x, y) in exact.snapshots.iter().zip(&ramped.snapshots) {
            let (QuantumState::Pure { vector: u, .. }, QuantumState::Pure { vector: v, .. }) =
                (&x.state, &y.state)
            else {
                panic!()
            };
            assert!(1.0 - u.dotc(v).norm_sqr() < 1e-8);
        }
    }

    #[test]
    fn csv_columns() {
        let s = space(2);
        let h = hamiltonian(&SystemParams::new(0.0, 1.0, 0.0), s).unwrap();
        let series =
            evolve_schrodinger(&h, &excited_vacuum(s), &TimeGrid::new(0.2, 0.1, 0.1)).unwrap();
        let csv = series.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "t,mean_n,P_e,p0,p1,p2");
        assert_eq!(csv.lines().count(), 4);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn unitary_evolution_conserves_norm_and_parity(
            delta in 0.2f64..2.0,
            big_g in 0.0f64..0.3,
            t_end in 1.0f64..40.0,
        ) {
            let s = space(6);
            let h = hamiltonian(&SystemParams::new(delta, 1.0, big_g), s).unwrap();
            let grid = TimeGrid::new(t_end, t_end / 20.0, t_end / 20.0).with_snapshots(5);
            let series = evolve_schrodinger(&h, &excited_vacuum(s), &grid).unwrap();
            for tr in &series.trace {
                proptest::prop_assert!((tr - 1.0).abs() < UNITARY_NORM_TOL);
            }
            let odd = crate::model::Sector::ExcitedOdd.indices(s);
            for snap in &series.snapshots {
                let pops = snap.state.populations();
                let leak: f64 = odd.iter().map(|&i| pops[i]).sum();
                proptest::prop_assert!(leak < 1e-10);
            }
        }

        #[test]
        fn lindblad_keeps_a_valid_density(
            kappa in 0.0f64..0.2,
            gamma in 0.0f64..0.2,
        ) {
            let s = space(4);
            let p = SystemParams::new(1.2, 1.0, 0.1).with_decay(kappa, gamma);
            let grid = TimeGrid::new(4.0, 0.2, 0.01).with_snapshots(5);
            let series =
                evolve_lindblad(&p, &excited_vacuum(s).into_density(), &grid).unwrap();
            for tr in &series.trace {
                proptest::prop_assert!((tr - 1.0).abs() < LINDBLAD_TRACE_TOL);
            }
            for snap in &series.snapshots {
                let rho = snap.state.to_density_matrix();
                proptest::prop_assert!(crate::linalg::eigvalsh(&rho).unwrap()[0] > -LINDBLAD_POSITIVITY_TOL);
            }
        }
    }
}
