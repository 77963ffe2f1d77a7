//! The parametrically driven Jaynes–Cummings Hamiltonian
//!
//! ```text
//! H = Δ(a†a + σ₊σ₋) + g(aσ₊ + a†σ₋) + G(a² + a†²)
//! ```
//!
//! its dressed-state doublets, the analytic crossing predictions, and a
//! numerical avoided-crossing finder working on eigenvalue sweeps over Δ.
//!
//! H commutes with the joint parity (−1)^{a†a}·(−σ_z), so the spectrum
//! splits into two sectors. Levels from different sectors cross exactly;
//! gap minima are therefore searched inside each sector separately.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{
    annihilation, basis_state, creation, number, on_field, on_qubit, qubit_ops, tensor,
    CompositeSpace, Operator, QuantumState, Qubit, Space,
};
use crate::linalg::{c, eigh, eigvalsh, CMatrix, CVector};

/// Physical parameters, all rates in units of the coupling frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Δ = ω₀ − ω_P/2.
    pub detuning: f64,
    /// Qubit–cavity coupling g.
    pub coupling: f64,
    /// Parametric (two-photon) strength G.
    pub parametric: f64,
    /// Cavity field decay rate κ.
    pub kappa: f64,
    /// Qubit decay rate γ.
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(detuning: f64, coupling: f64, parametric: f64) -> Self {
        Self {
            detuning,
            coupling,
            parametric,
            kappa: 0.0,
            gamma: 0.0,
        }
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        Self { detuning, ..self }
    }

    pub fn with_parametric(self, parametric: f64) -> Self {
        Self { parametric, ..self }
    }

    pub fn with_decay(self, kappa: f64, gamma: f64) -> Self {
        Self {
            kappa,
            gamma,
            ..self
        }
    }

    /// `g > 0`, `G ≥ 0`, `κ, γ ≥ 0`, everything finite.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.detuning,
            self.coupling,
            self.parametric,
            self.kappa,
            self.gamma,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite system parameter".into(),
            ));
        }
        if self.coupling <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be > 0, got {}",
                self.coupling
            )));
        }
        if self.parametric < 0.0 || self.kappa < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidParameter(
                "parametric strength and decay rates must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Operator pieces of H on one composite space, reused across parameter
/// values.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    space: CompositeSpace,
    excitation: CMatrix,
    exchange: CMatrix,
    two_photon: CMatrix,
}

impl HamiltonianTerms {
    pub fn new(space: CompositeSpace) -> Self {
        let f = space.fock();
        let a = annihilation(f);
        let ad = creation(f);
        let (sp, sm) = qubit_ops();
        let n_field = on_field(&number(f)).expect("field embedding");
        let n_qubit = on_qubit(&(&sp * &sm), f).expect("qubit embedding");
        let excitation = (&n_field + &n_qubit).into_matrix();
        let exchange = (&tensor(&sp, &a).unwrap() + &tensor(&sm, &ad).unwrap()).into_matrix();
        let two_photon = on_field(&(&(&a * &a) + &(&ad * &ad)))
            .unwrap()
            .into_matrix();
        Self {
            space,
            excitation,
            exchange,
            two_photon,
        }
    }

    pub fn space(&self) -> CompositeSpace {
        self.space
    }

    pub fn matrix(&self, detuning: f64, coupling: f64, parametric: f64) -> CMatrix {
        self.excitation.scale(detuning)
            + self.exchange.scale(coupling)
            + self.two_photon.scale(parametric)
    }

    pub fn operator(&self, p: &SystemParams) -> Operator {
        Operator::new(
            Space::Composite(self.space),
            self.matrix(p.detuning, p.coupling, p.parametric),
        )
        .expect("shape fixed by construction")
    }
}

pub fn hamiltonian(p: &SystemParams, space: CompositeSpace) -> Result<Operator> {
    p.validate()?;
    Ok(HamiltonianTerms::new(space).operator(p))
}

/// One of the two joint-parity sectors left invariant by H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// |e, even⟩ ⊕ |g, odd⟩; contains |e,0⟩ and the crossings I and II.
    ExcitedEven,
    /// |e, odd⟩ ⊕ |g, even⟩; contains the vacuum |g,0⟩.
    ExcitedOdd,
}

impl Sector {
    pub const ALL: [Sector; 2] = [Sector::ExcitedEven, Sector::ExcitedOdd];

    pub fn contains(self, q: Qubit, n: usize) -> bool {
        let excited_even = match q {
            Qubit::Excited => n.is_multiple_of(2),
            Qubit::Ground => n % 2 == 1,
        };
        excited_even == (self == Sector::ExcitedEven)
    }

    /// Composite-space indices of the sector, ascending.
    pub fn indices(self, space: CompositeSpace) -> Vec<usize> {
        (0..space.dim())
            .filter(|&i| {
                let (q, n) = space.label(i);
                self.contains(q, n)
            })
            .collect()
    }
}

fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, col| m[(idx[r], idx[col])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// Jaynes–Cummings doublet |±,n⟩ = (|e,n⟩ ± |g,n+1⟩)/√2.
#[derive(Debug, Clone)]
pub struct DressedState {
    pub branch: Branch,
    pub n: usize,
    pub energy: f64,
    pub state: QuantumState,
}

/// λ±,n = (n+1)Δ ± √(n+1)·g.
pub fn dressed_energy(branch: Branch, n: usize, detuning: f64, coupling: f64) -> f64 {
    let k = (n + 1) as f64;
    k * detuning + branch.sign() * k.sqrt() * coupling
}

pub fn dressed_state(
    branch: Branch,
    n: usize,
    p: &SystemParams,
    space: CompositeSpace,
) -> Result<DressedState> {
    if n + 1 > space.n_max() {
        return Err(Error::OutOfRange {
            what: "dressed-state photon index + 1",
            value: n + 1,
            max: space.n_max(),
        });
    }
    let mut v = CVector::zeros(space.dim());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    v[space.index(Qubit::Excited, n)] = c(h);
    v[space.index(Qubit::Ground, n + 1)] = c(branch.sign() * h);
    Ok(DressedState {
        branch,
        n,
        energy: dressed_energy(branch, n, p.detuning, p.coupling),
        state: QuantumState::pure(Space::Composite(space), v)?,
    })
}

/// ⟨m|(a² + a†²)|n⟩ in closed form.
pub fn two_photon_element(m: usize, n: usize) -> f64 {
    if m == n + 2 {
        (((n + 1) * (n + 2)) as f64).sqrt()
    } else if n == m + 2 {
        (((m + 1) * (m + 2)) as f64).sqrt()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingLabel {
    /// |+,0⟩ with |−,2⟩.
    I,
    /// |+,0⟩ with |−,4⟩.
    II,
    Other,
}

impl CrossingLabel {
    /// Photon indices (m, n) of the (+,m)/(−,n) pair.
    pub fn pair(self) -> Option<(usize, usize)> {
        match self {
            CrossingLabel::I => Some((0, 2)),
            CrossingLabel::II => Some((0, 4)),
            CrossingLabel::Other => None,
        }
    }

    fn from_pair(m: usize, n: usize) -> Self {
        match (m, n) {
            (0, 2) => CrossingLabel::I,
            (0, 4) => CrossingLabel::II,
            _ => CrossingLabel::Other,
        }
    }
}

/// Analytic crossing of λ₊,m and λ₋,n with its first-order parametric gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingPrediction {
    pub label: CrossingLabel,
    pub plus_n: usize,
    pub minus_n: usize,
    pub delta_star: f64,
    pub energy: f64,
    pub perturbative_gap: f64,
}

/// Enumerate (+,m)/(−,n) crossings with `m < n ≤ max_photon`.
///
/// λ₊,m = λ₋,n gives Δ* = g(√(m+1) + √(n+1))/(n − m), positive only for
/// n > m. The gap is 2G|⟨+,m|(a² + a†²)|−,n⟩| which is nonzero only when
/// the pair differs by two photons.
pub fn predict_crossings(p: &SystemParams, max_photon: usize) -> Vec<CrossingPrediction> {
    let g = p.coupling;
    let mut out = Vec::new();
    for m in 0..=max_photon {
        for n in (m + 1)..=max_photon {
            let delta_star =
                g * (((m + 1) as f64).sqrt() + ((n + 1) as f64).sqrt()) / (n - m) as f64;
            // ⟨+,m|V|−,n⟩ = ½(⟨m|V|n⟩ − ⟨m+1|V|n+1⟩)
            let elem = 0.5 * (two_photon_element(m, n) - two_photon_element(m + 1, n + 1));
            out.push(CrossingPrediction {
                label: CrossingLabel::from_pair(m, n),
                plus_n: m,
                minus_n: n,
                delta_star,
                energy: dressed_energy(Branch::Plus, m, delta_star, g),
                perturbative_gap: 2.0 * p.parametric * elem.abs(),
            });
        }
    }
    out
}

/// Knobs for the numerical crossing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSearch {
    /// Gaps below this (times g) are exact crossings and are not reported.
    pub true_crossing_threshold: f64,
    /// Golden-section tolerance on Δ*.
    pub delta_tol: f64,
}

impl Default for CrossingSearch {
    fn default() -> Self {
        Self {
            true_crossing_threshold: 1e-9,
            delta_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub label: CrossingLabel,
    pub delta_star: f64,
    pub gap: f64,
    pub sector: Sector,
    /// Sector-local indices of the lower and upper branch.
    pub branches: (usize, usize),
    /// The two dressed states carrying most of the weight of both branches.
    pub dressed: [String; 2],
}

/// Eigenvalues over a detuning grid.
#[derive(Debug, Clone)]
pub struct SpectrumSweep {
    pub template: SystemParams,
    pub space: CompositeSpace,
    pub delta_grid: Vec<f64>,
    /// Full spectrum, ascending, one row per grid point.
    pub branches: Vec<Vec<f64>>,
    /// Per-sector spectra in [`Sector::ALL`] order.
    pub sector_branches: [Vec<Vec<f64>>; 2],
    pub crossings: Vec<CrossingRecord>,
}

struct SectorSolver {
    terms: HamiltonianTerms,
    indices: Vec<usize>,
}

impl SectorSolver {
    fn new(space: CompositeSpace, sector: Sector) -> Self {
        Self {
            terms: HamiltonianTerms::new(space),
            indices: sector.indices(space),
        }
    }

    fn matrix(&self, p: &SystemParams, detuning: f64) -> CMatrix {
        submatrix(
            &self.terms.matrix(detuning, p.coupling, p.parametric),
            &self.indices,
        )
    }

    fn values(&self, p: &SystemParams, detuning: f64) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix(p, detuning))
    }

    fn gap(&self, p: &SystemParams, detuning: f64, lower: usize) -> Result<f64> {
        let v = self.values(p, detuning)?;
        Ok(v[lower + 1] - v[lower])
    }
}

pub fn sweep_spectrum(
    template: &SystemParams,
    delta_grid: &[f64],
    space: CompositeSpace,
) -> Result<SpectrumSweep> {
    sweep_spectrum_with(template, delta_grid, space, &CrossingSearch::default())
}

pub fn sweep_spectrum_with(
    template: &SystemParams,
    delta_grid: &[f64],
    space: CompositeSpace,
    search: &CrossingSearch,
) -> Result<SpectrumSweep> {
    template.validate()?;
    if delta_grid.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "detuning grid needs at least 3 points, got {}",
            delta_grid.len()
        )));
    }
    if delta_grid.windows(2).any(|w| w[1] <= w[0]) || delta_grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter(
            "detuning grid must be finite and strictly increasing".into(),
        ));
    }
    let terms = HamiltonianTerms::new(space);
    let solvers = Sector::ALL.map(|s| SectorSolver::new(space, s));

    let rows: Vec<(Vec<f64>, [Vec<f64>; 2])> = delta_grid
        .par_iter()
        .map(|&d| -> Result<_> {
            let full = eigvalsh(&terms.matrix(d, template.coupling, template.parametric))?;
            let a = solvers[0].values(template, d)?;
            let b = solvers[1].values(template, d)?;
            Ok((full, [a, b]))
        })
        .collect::<Result<_>>()?;

    let mut branches = Vec::with_capacity(rows.len());
    let mut sector_branches: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    for (full, [a, b]) in rows {
        branches.push(full);
        sector_branches[0].push(a);
        sector_branches[1].push(b);
    }
    let mut sweep = SpectrumSweep {
        template: *template,
        space,
        delta_grid: delta_grid.to_vec(),
        branches,
        sector_branches,
        crossings: Vec::new(),
    };
    sweep.crossings = find_avoided_crossings_with(&sweep, search)?;
    Ok(sweep)
}

pub fn find_avoided_crossings(sweep: &SpectrumSweep) -> Result<Vec<CrossingRecord>> {
    find_avoided_crossings_with(sweep, &CrossingSearch::default())
}

/// Interior local minima of every adjacent-branch gap, refined by
/// golden-section search with re-diagonalization, then labelled by their
/// dressed-state content.
pub fn find_avoided_crossings_with(
    sweep: &SpectrumSweep,
    search: &CrossingSearch,
) -> Result<Vec<CrossingRecord>> {
    let grid = &sweep.delta_grid;
    let p = sweep.template;
    let mut candidates = Vec::new();
    for (si, sector) in Sector::ALL.into_iter().enumerate() {
        let rows = &sweep.sector_branches[si];
        let nb = rows[0].len();
        for j in 0..nb.saturating_sub(1) {
            let gaps: Vec<f64> = rows.iter().map(|r| r[j + 1] - r[j]).collect();
            for k in 1..grid.len() - 1 {
                // Flat gaps (e.g. the 2g splitting of one doublet) must not
                // register rounding noise as minima.
                let tol = GAP_NOISE * (1.0 + gaps[k].abs());
                if gaps[k - 1] - gaps[k] > tol && gaps[k + 1] - gaps[k] >= -tol {
                    candidates.push((sector, j, grid[k - 1], grid[k + 1]));
                }
            }
        }
    }

    let space = sweep.space;
    let mut records: Vec<CrossingRecord> = candidates
        .par_iter()
        .map(|&(sector, j, lo, hi)| -> Result<Option<CrossingRecord>> {
            let solver = SectorSolver::new(space, sector);
            let f = |d: f64| solver.gap(&p, d, j);
            let (delta_star, golden_gap) = golden_section_min(f, lo, hi, search.delta_tol)?;
            let fitted = hyperbolic_min_gap(f, delta_star, (1e-4 * p.coupling).min(hi - lo))?;
            let gap = fitted.map_or(golden_gap, |g| g.min(golden_gap));
            if gap < search.true_crossing_threshold * p.coupling {
                return Ok(None);
            }
            let (dressed, label) = dressed_content(&solver, &p, delta_star, j, sector)?;
            Ok(Some(CrossingRecord {
                label,
                delta_star,
                gap,
                sector,
                branches: (j, j + 1),
                dressed,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by(|a, b| a.delta_star.total_cmp(&b.delta_star));
    Ok(records)
}

const GAP_NOISE: f64 = 1e-11;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimize a unimodal `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    let best = [(x1, f1), (x2, f2), (x, fx)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap();
    Ok(best)
}

/// Near a two-level crossing gap² is exactly quadratic in Δ; fitting it
/// through three points resolves exact crossings that golden-section
/// search can only bracket.
fn hyperbolic_min_gap<F>(f: F, x: f64, h: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let ym = f(x - h)?.powi(2);
    let y0 = f(x)?.powi(2);
    let yp = f(x + h)?.powi(2);
    let curv = (yp - 2.0 * y0 + ym) / (h * h);
    if curv <= 0.0 {
        return Ok(None);
    }
    let slope = (yp - ym) / (2.0 * h);
    let vertex = y0 - slope * slope / (2.0 * curv);
    Ok(Some(vertex.max(0.0).sqrt()))
}

fn dressed_content(
    solver: &SectorSolver,
    p: &SystemParams,
    detuning: f64,
    lower: usize,
    sector: Sector,
) -> Result<([String; 2], CrossingLabel)> {
    let space = solver.terms.space();
    let eig = eigh(&solver.matrix(p, detuning))?;
    let idx = &solver.indices;
    let pos = |q: Qubit, n: usize| idx.iter().position(|&i| i == space.index(q, n));

    // Sector-local amplitude of the bare state, summed over both branches.
    let weight = |components: &[(usize, f64)]| -> f64 {
        [lower, lower + 1]
            .iter()
            .map(|&b| {
                components
                    .iter()
                    .map(|&(r, amp)| eig.vectors[(r, b)] * amp)
                    .sum::<num_complex::Complex64>()
                    .norm_sqr()
            })
            .sum()
    };

    let h = std::f64::consts::FRAC_1_SQRT_2;
    // (weight, label, doublet); the vacuum |g,0⟩ has no doublet.
    type Candidate = (f64, String, Option<(Branch, usize)>);
    let mut scored: Vec<Candidate> = Vec::new();
    if let Some(r) = pos(Qubit::Ground, 0) {
        scored.push((weight(&[(r, 1.0)]), "g,0".into(), None));
    }
    for n in 0..space.n_max() {
        if !sector.contains(Qubit::Excited, n) {
            continue;
        }
        let (Some(re), Some(rg)) = (pos(Qubit::Excited, n), pos(Qubit::Ground, n + 1)) else {
            continue;
        };
        for b in [Branch::Plus, Branch::Minus] {
            let w = weight(&[(re, h), (rg, b.sign() * h)]);
            scored.push((w, format!("{},{}", b.symbol(), n), Some((b, n))));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top = [scored[0].clone(), scored[1].clone()];
    let label = match (top[0].2, top[1].2) {
        (Some((b1, n1)), Some((b2, n2))) if b1 != b2 => {
            let (m, n) = if b1 == Branch::Plus {
                (n1, n2)
            } else {
                (n2, n1)
            };
            CrossingLabel::from_pair(m, n)
        }
        _ => CrossingLabel::Other,
    };
    Ok(([top[0].1.clone(), top[1].1.clone()], label))
}

/// Uniform grid of `points` values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo; points];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + step * k as f64).collect()
}

/// Numerically locate the labelled crossing near its analytic position for
/// the coupling and parametric strength in `template`.
pub fn locate_crossing(
    template: &SystemParams,
    label: CrossingLabel,
    space: CompositeSpace,
) -> Result<CrossingRecord> {
    let (m, n) = label
        .pair()
        .ok_or_else(|| Error::InvalidParameter("only crossings I and II can be located".into()))?;
    let prediction = predict_crossings(template, n)
        .into_iter()
        .find(|c| c.plus_n == m && c.minus_n == n)
        .expect("pair is enumerated");
    let g = template.coupling;
    let lo = (prediction.delta_star - 0.25 * g).max(1e-3 * g);
    let hi = prediction.delta_star + 0.25 * g;
    let sweep = sweep_spectrum(template, &linear_grid(lo, hi, 401), space)?;
    sweep
        .crossings
        .into_iter()
        .filter(|r| r.label == label)
        .min_by(|a, b| {
            (a.delta_star - prediction.delta_star)
                .abs()
                .total_cmp(&(b.delta_star - prediction.delta_star).abs())
        })
        .ok_or_else(|| {
            Error::Invariant(format!(
                "crossing {label:?} not found near Δ = {:.5}",
                prediction.delta_star
            ))
        })
}

impl SpectrumSweep {
    /// CSV with columns `delta, eig_0 … eig_{dim−1}`.
    pub fn to_csv(&self) -> String {
        let dim = self.space.dim();
        let mut out = String::from("delta");
        for k in 0..dim {
            out.push_str(&format!(",eig_{k}"));
        }
        out.push('\n');
        for (d, row) in self.delta_grid.iter().zip(&self.branches) {
            out.push_str(&crate::io::fmt_f64(*d));
            for e in row {
                out.push(',');
                out.push_str(&crate::io::fmt_f64(*e));
            }
            out.push('\n');
        }
        out
    }
}

/// Check H·|±,n⟩ = λ±,n|±,n⟩ for a given state; returns the residual norm.
pub fn eigen_residual(h: &Operator, d: &DressedState) -> Result<f64> {
    let hv = h.apply(&d.state)?;
    let QuantumState::Pure { vector, .. } = &d.state else {
        unreachable!()
    };
    Ok((hv - vector.scale(d.energy)).norm())
}

/// Basis states used as the initial condition throughout: |e,0⟩.
pub fn excited_vacuum(space: CompositeSpace) -> QuantumState {
    basis_state(space, Qubit::Excited, 0).expect("n = 0 always fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn space(n: usize) -> CompositeSpace {
        CompositeSpace::with_n_max(n).unwrap()
    }

    #[test]
    fn vacuum_rabi_element() {
        let s = space(1);
        let h = hamiltonian(&SystemParams::new(0.0, 1.0, 0.0), s).unwrap();
        let m = h.matrix();
        let e0 = s.index(Qubit::Excited, 0);
        let g1 = s.index(Qubit::Ground, 1);
        assert_eq!(m[(e0, g1)], c(1.0));
        let mut ev = eigvalsh(m).unwrap();
        ev.sort_by(f64::total_cmp);
        // |g,0⟩ → 0, {|e,0⟩,|g,1⟩} → ±1, |e,1⟩ alone in the truncated block → 0.
        let want = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_photon_matrix_elements() {
        let s = space(5);
        let g_par = 0.1;
        let h = hamiltonian(&SystemParams::new(0.7, 1.0, g_par), s).unwrap();
        let m = h.matrix();
        let e2 = s.index(Qubit::Excited, 2);
        let e0 = s.index(Qubit::Excited, 0);
        let g3 = s.index(Qubit::Ground, 3);
        let g1 = s.index(Qubit::Ground, 1);
        assert!((m[(e2, e0)].re - 2f64.sqrt() * g_par).abs() < 1e-15);
        assert!((m[(g3, g1)].re - 6f64.sqrt() * g_par).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let s = space(8);
        for &(d, g, gp) in &[(0.3, 1.0, 0.1), (1.366, 2.5, 0.7), (-0.4, 0.1, 0.0)] {
            let h = hamiltonian(&SystemParams::new(d, g, gp), s).unwrap();
            assert!(hermiticity_defect(h.matrix()) < 1e-12);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let s = space(3);
        assert!(hamiltonian(&SystemParams::new(1.0, 0.0, 0.1), s).is_err());
        assert!(hamiltonian(&SystemParams::new(1.0, 1.0, -0.1), s).is_err());
        let p = SystemParams::new(1.0, 1.0, 0.1).with_decay(-1.0, 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn crossing_one_energy() {
        let d = (1.0 + SQRT3) / 2.0;
        let want = (3.0 + SQRT3) / 2.0;
        let plus0 = dressed_energy(Branch::Plus, 0, d, 1.0);
        let minus2 = dressed_energy(Branch::Minus, 2, d, 1.0);
        assert!((plus0 - want).abs() < 1e-14);
        assert!((minus2 - want).abs() < 1e-14);
        assert!((plus0 - 2.3660).abs() < 1e-4);
    }

    #[test]
    fn dressed_states_are_eigenvectors_without_drive() {
        let s = space(6);
        let p = SystemParams::new(1.366, 1.0, 0.0);
        let h = hamiltonian(&p, s).unwrap();
        for n in 0..6 {
            for b in [Branch::Plus, Branch::Minus] {
                let d = dressed_state(b, n, &p, s).unwrap();
                assert!((d.state.trace() - 1.0).abs() < 1e-15);
                assert!(eigen_residual(&h, &d).unwrap() < 1e-10);
            }
        }
        assert!(matches!(
            dressed_state(Branch::Plus, 6, &p, s),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn predicted_crossings() {
        let p = SystemParams::new(0.0, 1.0, 0.1);
        let preds = predict_crossings(&p, 6);
        let one = preds.iter().find(|c| c.label == CrossingLabel::I).unwrap();
        assert!((one.delta_star - (1.0 + SQRT3) / 2.0).abs() < 1e-14);
        let want_gap = 2f64.sqrt() * (SQRT3 - 1.0) * 0.1;
        assert!((one.perturbative_gap - want_gap).abs() < 1e-14);
        assert!((one.perturbative_gap - 0.10353).abs() < 1e-5);

        let two = preds.iter().find(|c| c.label == CrossingLabel::II).unwrap();
        assert!((two.delta_star - (1.0 + 5f64.sqrt()) / 4.0).abs() < 1e-14);
        assert_eq!(two.perturbative_gap, 0.0);

        let undriven = predict_crossings(&p.with_parametric(0.0), 6);
        assert!(undriven.iter().all(|c| c.perturbative_gap == 0.0));
        assert!(undriven.iter().all(|c| c.delta_star > 0.0));
        assert_eq!(undriven.len(), 21);
    }

    #[test]
    fn perturbative_gap_matches_operator_route() {
        let s = space(9);
        let p = SystemParams::new(0.0, 1.0, 0.1);
        let v = on_field(&{
            let a = annihilation(s.fock());
            let ad = creation(s.fock());
            &(&a * &a) + &(&ad * &ad)
        })
        .unwrap();
        for pred in predict_crossings(&p, 6) {
            let plus = dressed_state(Branch::Plus, pred.plus_n, &p, s).unwrap();
            let minus = dressed_state(Branch::Minus, pred.minus_n, &p, s).unwrap();
            let QuantumState::Pure { vector: vp, .. } = &plus.state else {
                unreachable!()
            };
            let vm = v.apply(&minus.state).unwrap();
            let elem = vp.dotc(&vm).norm();
            assert!((2.0 * p.parametric * elem - pred.perturbative_gap).abs() < 1e-14);
        }
    }

    #[test]
    fn sector_split_is_a_partition() {
        let s = space(5);
        let mut all: Vec<usize> = Sector::ALL.iter().flat_map(|x| x.indices(s)).collect();
        all.sort();
        assert_eq!(all, (0..s.dim()).collect::<Vec<_>>());
        assert!(Sector::ExcitedEven
            .indices(s)
            .contains(&s.index(Qubit::Excited, 0)));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| Ok((x - 0.3).powi(2) + 1.0), -1.0, 2.0, 1e-9).unwrap();
        // A quadratic minimum is only resolvable to ~sqrt(eps).
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_fit_recovers_gap() {
        let f = |x: f64| Ok((0.01f64.powi(2) + 4.0 * (x - 1.0).powi(2)).sqrt());
        let g = hyperbolic_min_gap(f, 1.00001, 1e-4).unwrap().unwrap();
        assert!((g - 0.01).abs() < 1e-10);
        let v = |x: f64| Ok(3.0 * (x - 1.0f64).abs());
        let g = hyperbolic_min_gap(v, 1.0 + 5e-7, 1e-4).unwrap().unwrap();
        assert!(g < 1e-9);
    }

    #[test]
    fn sweep_rejects_short_or_unsorted_grids() {
        let s = space(3);
        let p = SystemParams::new(0.0, 1.0, 0.1);
        assert!(sweep_spectrum(&p, &[1.0, 2.0], s).is_err());
        assert!(sweep_spectrum(&p, &[1.0, 0.5, 2.0], s).is_err());
    }

    #[test]
    fn undriven_sweep_has_no_avoided_crossings() {
        let s = space(6);
        let p = SystemParams::new(0.0, 1.0, 0.0);
        let sweep = sweep_spectrum(&p, &linear_grid(0.5, 2.0, 301), s).unwrap();
        assert!(sweep.crossings.is_empty(), "{:?}", sweep.crossings);
    }

    #[test]
    fn sweep_rows_ascending() {
        let s = space(4);
        let p = SystemParams::new(0.0, 1.0, 0.1);
        let sweep = sweep_spectrum(&p, &linear_grid(0.5, 2.0, 31), s).unwrap();
        assert_eq!(sweep.branches.len(), 31);
        for row in &sweep.branches {
            assert_eq!(row.len(), s.dim());
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
        let csv = sweep.to_csv();
        assert!(csv.starts_with("delta,eig_0,"));
        assert_eq!(csv.lines().count(), 32);
    }

    #[test]
    fn crossing_one_is_located_and_labelled() {
        let s = space(10);
        let p = SystemParams::new(0.0, 1.0, 0.1);
        let rec = locate_crossing(&p, CrossingLabel::I, s).unwrap();
        assert_eq!(rec.sector, Sector::ExcitedEven);
        assert!(rec.dressed.contains(&"+,0".to_string()));
        assert!(rec.dressed.contains(&"-,2".to_string()));
        assert!((rec.gap - 0.10353).abs() / 0.10353 < 0.1);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn hamiltonian_is_hermitian_and_parity_blocked(
            delta in -3.0f64..3.0,
            g in 0.1f64..2.0,
            big_g in 0.0f64..0.5,
            n_max in 2usize..9,
        ) {
            let s = space(n_max);
            let h = hamiltonian(&SystemParams::new(delta, g, big_g), s).unwrap();
            proptest::prop_assert!(hermiticity_defect(h.matrix()) < 1e-14);
            for r in Sector::ExcitedEven.indices(s) {
                for col in Sector::ExcitedOdd.indices(s) {
                    proptest::prop_assert_eq!(h.matrix()[(r, col)], c(0.0));
                }
            }
        }

        #[test]
        fn uncoupled_drive_spectrum_is_the_dressed_ladder(
            delta in -3.0f64..3.0,
            g in 0.1f64..2.0,
            n_max in 2usize..9,
        ) {
            let s = space(n_max);
            let h = hamiltonian(&SystemParams::new(delta, g, 0.0), s).unwrap();
            let numeric = eigvalsh(h.matrix()).unwrap();
            let mut exact = vec![0.0, delta * (n_max + 1) as f64];
            for n in 0..n_max {
                exact.push(dressed_energy(Branch::Plus, n, delta, g));
                exact.push(dressed_energy(Branch::Minus, n, delta, g));
            }
            exact.sort_by(f64::total_cmp);
            for (x, y) in numeric.iter().zip(&exact) {
                proptest::prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
