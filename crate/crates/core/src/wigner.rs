//! Wigner functions on a rectangular α-grid.
//!
//! The numeric route evaluates the displaced parity
//! `W(α) = (2/π)·Tr[D(−α) ρ D(α) Π]`. Because `D(α)ΠD(−α) = D(2α)Π`, every
//! entry reduces to a closed-form displacement matrix element
//!
//! ```text
//! ⟨m|D(β)|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²),   m ≥ n
//! ```
//!
//! which is exact on the truncated space. A padded matrix-exponential
//! displacement is kept as an independent cross-check.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{annihilation, creation, FockSpace, QuantumState, Space};
use crate::linalg::{trace, unitary_propagator, CMatrix, C64, I};

/// Allowed deviation of the discrete integral of W from 1.
pub const NORMALIZATION_TOL: f64 = 0.02;

/// Depth a negative region must reach to be counted: 1e-3 of the 2/π bound.
/// Shallower dips are Gaussian tails of weakly populated high Fock levels.
pub const NEGATIVITY_THRESHOLD: f64 = -1e-3 * FRAC_2_PI;

/// Symmetric rectangular grid over Re α and Im α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceGrid {
    /// Re α runs over [−re_max, re_max].
    pub re_max: f64,
    pub re_step: f64,
    /// Im α runs over [−im_max, im_max].
    pub im_max: f64,
    pub im_step: f64,
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self::square(3.0, 0.05)
    }
}

impl PhaseSpaceGrid {
    pub fn square(extent: f64, step: f64) -> Self {
        Self {
            re_max: extent,
            re_step: step,
            im_max: extent,
            im_step: step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.re_max, self.re_step, self.im_max, self.im_step];
        if all.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::InvalidParameter(
                "phase-space extents and steps must be finite and > 0".into(),
            ));
        }
        if self.re_step > self.re_max || self.im_step > self.im_max {
            return Err(Error::InvalidParameter(
                "grid step exceeds its extent".into(),
            ));
        }
        Ok(())
    }

    fn half_count(max: f64, step: f64) -> usize {
        (max / step + 1e-9).floor() as usize
    }

    pub fn re_axis(&self) -> Vec<f64> {
        axis(Self::half_count(self.re_max, self.re_step), self.re_step)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        axis(Self::half_count(self.im_max, self.im_step), self.im_step)
    }

    pub fn cell_area(&self) -> f64 {
        self.re_step * self.im_step
    }

    /// Grid points in storage order: Im α outer, Re α fastest.
    pub fn points(&self) -> Vec<C64> {
        let re = self.re_axis();
        self.im_axis()
            .into_iter()
            .flat_map(|y| re.iter().map(move |&x| C64::new(x, y)))
            .collect()
    }
}

fn axis(half: usize, step: f64) -> Vec<f64> {
    (0..=2 * half)
        .map(|k| (k as f64 - half as f64) * step)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerMethod {
    DisplacedParity,
    EvenAnalytic,
    OddAnalytic,
}

/// Sampled Wigner function. `values[j * re_len + i]` belongs to
/// `(re_axis[i], im_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub source: String,
    pub method: WignerMethod,
    /// Largest |Im| left by the complex trace (zero for analytic maps).
    pub max_imag_residue: f64,
}

impl WignerMap {
    fn assemble(
        grid: PhaseSpaceGrid,
        source: &str,
        method: WignerMethod,
        values: Vec<f64>,
        max_imag_residue: f64,
    ) -> Self {
        Self {
            grid,
            re_axis: grid.re_axis(),
            im_axis: grid.im_axis(),
            values,
            source: source.to_string(),
            method,
            max_imag_residue,
        }
    }

    fn analytic(
        grid: &PhaseSpaceGrid,
        source: &str,
        method: WignerMethod,
        w: fn(C64) -> f64,
    ) -> Result<Self> {
        grid.validate()?;
        let values = grid.points().into_par_iter().map(w).collect();
        Ok(Self::assemble(*grid, source, method, values, 0.0))
    }

    pub fn at(&self, i_re: usize, j_im: usize) -> f64 {
        self.values[j_im * self.re_axis.len() + i_re]
    }

    pub fn alpha(&self, i_re: usize, j_im: usize) -> C64 {
        C64::new(self.re_axis[i_re], self.im_axis[j_im])
    }

    /// Σ W · ΔRe α · ΔIm α.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest |W₁ − W₂| over grid points with |α| ≤ `radius`.
    pub fn sup_difference(&self, other: &WignerMap, radius: f64) -> Result<f64> {
        if self.re_axis != other.re_axis || self.im_axis != other.im_axis {
            return Err(Error::ShapeMismatch(
                "Wigner maps use different grids".into(),
            ));
        }
        let points = self.grid.points();
        Ok(points
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(a, _)| a.norm() <= radius + 1e-12)
            .map(|(_, (x, y))| (x - y).abs())
            .fold(0.0, f64::max))
    }

    /// CSV with columns `re_alpha, im_alpha, W`.
    pub fn to_csv(&self) -> String {
        use crate::io::fmt_f64;
        let mut out = String::from("re_alpha,im_alpha,W\n");
        for (j, y) in self.im_axis.iter().enumerate() {
            for (i, x) in self.re_axis.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(*x),
                    fmt_f64(*y),
                    fmt_f64(self.at(i, j))
                ));
            }
        }
        out
    }

    pub fn header(&self, payload_file: &str) -> WignerHeader {
        WignerHeader {
            payload: payload_file.to_string(),
            layout: "little-endian f64, im_alpha outer, re_alpha fastest".into(),
            re_axis: AxisSpec::of(&self.re_axis, self.grid.re_step),
            im_axis: AxisSpec::of(&self.im_axis, self.grid.im_step),
            source: self.source.clone(),
            method: self.method,
            integral: self.integral(),
            max_imag_residue: self.max_imag_residue,
        }
    }

    pub fn payload_le_bytes(&self) -> Vec<u8> {
        crate::io::f64_le_bytes(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl AxisSpec {
    fn of(axis: &[f64], step: f64) -> Self {
        Self {
            start: axis[0],
            step,
            count: axis.len(),
        }
    }
}

/// JSON header describing a flat binary Wigner payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerHeader {
    pub payload: String,
    pub layout: String,
    pub re_axis: AxisSpec,
    pub im_axis: AxisSpec,
    pub source: String,
    pub method: WignerMethod,
    pub integral: f64,
    pub max_imag_residue: f64,
}

/// Displaced-parity Wigner function of a photon state.
///
/// Fails with [`Error::GridTooSmall`] when the discrete integral misses 1 by
/// more than [`NORMALIZATION_TOL`].
pub fn wigner_numeric(
    photon: &QuantumState,
    grid: &PhaseSpaceGrid,
    source: &str,
) -> Result<WignerMap> {
    let map = wigner_numeric_unchecked(photon, grid, source)?;
    let integral = map.integral();
    if (integral - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::GridTooSmall(integral));
    }
    Ok(map)
}

/// [`wigner_numeric`] without the normalization gate.
pub fn wigner_numeric_unchecked(
    photon: &QuantumState,
    grid: &PhaseSpaceGrid,
    source: &str,
) -> Result<WignerMap> {
    grid.validate()?;
    let rho = match photon.space() {
        Space::Fock(_) => photon.to_density_matrix(),
        other => {
            return Err(Error::ShapeMismatch(format!(
                "Wigner functions need a photon state, got {other:?}"
            )))
        }
    };
    let evaluated: Vec<C64> = grid
        .points()
        .into_par_iter()
        .map(|alpha| displaced_parity(&rho, alpha))
        .collect();
    let residue = evaluated.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let values = evaluated.into_iter().map(|z| z.re).collect();
    Ok(WignerMap::assemble(
        *grid,
        source,
        WignerMethod::DisplacedParity,
        values,
        residue,
    ))
}

/// `(2/π) Σ_{m,n} ρ[n,m] (−1)^n ⟨m|D(2α)|n⟩`, complex so the imaginary
/// residue can be checked.
pub fn displaced_parity(rho: &CMatrix, alpha: C64) -> C64 {
    let d = rho.nrows();
    let beta = alpha * 2.0;
    let x = beta.norm_sqr();
    let gauss = (-0.5 * x).exp();
    let mut total = C64::new(0.0, 0.0);
    // k = m − n ≥ 0 off-diagonal order.
    let mut beta_pow = C64::new(1.0, 0.0);
    let mut minus_conj_pow = C64::new(1.0, 0.0);
    for k in 0..d {
        let mut lag_prev = 0.0;
        let mut lag = 1.0;
        // √(n!/(n+k)!) built incrementally in n.
        let mut ratio = (1..=k).map(|j| 1.0 / (j as f64).sqrt()).product::<f64>();
        for n in 0..d - k {
            if n > 0 {
                let next = ((2 * n - 1 + k) as f64 - x) * lag - ((n - 1 + k) as f64) * lag_prev;
                lag_prev = lag;
                lag = next / n as f64;
                ratio *= (n as f64 / (n + k) as f64).sqrt();
            }
            let m = n + k;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let base = sign * ratio * gauss * lag;
            // ⟨m|D|n⟩ for m ≥ n, paired with ρ[n,m].
            total += rho[(n, m)] * beta_pow * base;
            if k > 0 {
                // ⟨n|D|m⟩ = √(n!/m!) (−β*)^{k} e^{−x/2} L_n^{(k)}(x), paired
                // with ρ[m,n] and parity (−1)^m.
                let parity_shift = if k % 2 == 0 { 1.0 } else { -1.0 };
                total += rho[(m, n)] * minus_conj_pow * base * parity_shift;
            }
        }
        beta_pow *= beta;
        minus_conj_pow *= -beta.conj();
    }
    total * FRAC_2_PI
}

/// Closed form for (|0⟩ + i|2⟩)/√2:
/// `(2/π)e^{−2|α|²}[(1−2|α|²)² + 4√2·Re α·Im α]`.
pub fn even_analytic_value(alpha: C64) -> f64 {
    let r2 = alpha.norm_sqr();
    FRAC_2_PI * (-2.0 * r2).exp() * ((1.0 - 2.0 * r2).powi(2) + 4.0 * SQRT_2 * alpha.re * alpha.im)
}

/// Closed form for (|1⟩ + i|3⟩)/√2:
/// `(1/π)e^{−2|α|²}[−2(1−4|α|²)² + 8|α|⁴(1+4|α|²/3) + 8√6(4|α|²/3−1)·Re α·Im α]`.
pub fn odd_analytic_value(alpha: C64) -> f64 {
    let r2 = alpha.norm_sqr();
    let bracket = -2.0 * (1.0 - 4.0 * r2).powi(2)
        + 8.0 * r2 * r2 * (1.0 + 4.0 * r2 / 3.0)
        + 8.0 * 6f64.sqrt() * (4.0 * r2 / 3.0 - 1.0) * alpha.re * alpha.im;
    (-2.0 * r2).exp() * bracket / PI
}

pub fn wigner_even_analytic(grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    WignerMap::analytic(
        grid,
        "even-target",
        WignerMethod::EvenAnalytic,
        even_analytic_value,
    )
}

pub fn wigner_odd_analytic(grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    WignerMap::analytic(
        grid,
        "odd-target",
        WignerMethod::OddAnalytic,
        odd_analytic_value,
    )
}

/// `D(α) = exp(αa† − α*a)` built on `fock` enlarged by `padding` levels and
/// truncated back.
pub fn displacement_padded(fock: FockSpace, alpha: C64, padding: usize) -> Result<CMatrix> {
    let big = FockSpace::new(fock.n_max() + padding)?;
    let generator =
        creation(big).matrix() * alpha - annihilation(big).matrix().clone() * alpha.conj();
    // exp(A) = exp(−iH) with H = iA Hermitian.
    let full = unitary_propagator(&(generator * I), 1.0)?;
    Ok(full.view((0, 0), (fock.dim(), fock.dim())).into_owned())
}

/// `(2/π)Tr[D(−α) ρ D(α) Π]` with both displacements from
/// [`displacement_padded`]; ρ is embedded in the padded space first.
pub fn displaced_parity_padded(rho: &CMatrix, alpha: C64, padding: usize) -> Result<C64> {
    let d = rho.nrows();
    let big = FockSpace::new(d - 1 + padding)?;
    let mut embedded = CMatrix::zeros(big.dim(), big.dim());
    embedded.view_mut((0, 0), (d, d)).copy_from(rho);
    let plus = displacement_padded(big, alpha, 0)?;
    let minus = displacement_padded(big, -alpha, 0)?;
    let shifted = minus * embedded * plus;
    let parity = CMatrix::from_fn(big.dim(), big.dim(), |r, c| {
        if r == c {
            C64::new(if r % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(trace(&(shifted * parity)) * FRAC_2_PI)
}

/// One connected negative region (4-neighbour connectivity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeRegion {
    pub min_value: f64,
    pub min_re: f64,
    pub min_im: f64,
    pub points: usize,
    /// ∫ W dA over the region.
    pub mass: f64,
    /// Where the minimum sits: "origin", "I" … "IV", or "axis".
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub min_value: f64,
    /// Grid points attaining the global minimum (within 1e-12).
    pub min_locations: Vec<[f64; 2]>,
    /// ∫ min(W, 0) dA.
    pub negative_mass: f64,
    pub threshold: f64,
    pub regions: Vec<NegativeRegion>,
}

fn classify(re: f64, im: f64, step: f64) -> String {
    let tol = 0.5 * step;
    if re.abs() <= tol && im.abs() <= tol {
        "origin".into()
    } else if re.abs() <= tol || im.abs() <= tol {
        "axis".into()
    } else {
        match (re > 0.0, im > 0.0) {
            (true, true) => "I",
            (false, true) => "II",
            (false, false) => "III",
            (true, false) => "IV",
        }
        .into()
    }
}

pub fn negativity_report(map: &WignerMap) -> NegativityReport {
    negativity_report_with(map, NEGATIVITY_THRESHOLD)
}

pub fn negativity_report_with(map: &WignerMap, threshold: f64) -> NegativityReport {
    let nx = map.re_axis.len();
    let ny = map.im_axis.len();
    let area = map.grid.cell_area();
    let min_value = map.values.iter().copied().fold(f64::INFINITY, f64::min);
    let min_locations = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .filter(|&(i, j)| map.at(i, j) <= min_value + 1e-12)
        .map(|(i, j)| [map.re_axis[i], map.im_axis[j]])
        .collect();
    let negative_mass = map.values.iter().map(|w| w.min(0.0)).sum::<f64>() * area;

    let mut seen = vec![false; nx * ny];
    let mut regions = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || map.values[start] >= 0.0 {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let (mut count, mut mass, mut best) = (0usize, 0.0, start);
        while let Some(k) = stack.pop() {
            count += 1;
            mass += map.values[k] * area;
            if map.values[k] < map.values[best] {
                best = k;
            }
            let (i, j) = (k % nx, k / nx);
            let neighbours = [
                (i > 0).then(|| k - 1),
                (i + 1 < nx).then(|| k + 1),
                (j > 0).then(|| k - nx),
                (j + 1 < ny).then(|| k + nx),
            ];
            for nb in neighbours.into_iter().flatten() {
                if !seen[nb] && map.values[nb] < 0.0 {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        if map.values[best] >= threshold {
            continue;
        }
        let (re, im) = (map.re_axis[best % nx], map.im_axis[best / nx]);
        regions.push(NegativeRegion {
            min_value: map.values[best],
            min_re: re,
            min_im: im,
            points: count,
            mass,
            location: classify(re, im, map.grid.re_step.max(map.grid.im_step)),
        });
    }
    NegativityReport {
        min_value,
        min_locations,
        negative_mass,
        threshold,
        regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::TargetStates;
    use crate::fockspace::fock_state;
    use crate::linalg::CVector;
    use proptest::prelude::*;

    fn fock(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    fn target_maps(grid: &PhaseSpaceGrid) -> (WignerMap, WignerMap) {
        let f = fock(8);
        let t = TargetStates::crossing_i(f).unwrap();
        let even = QuantumState::pure(Space::Fock(f), t.even).unwrap();
        let odd = QuantumState::pure(Space::Fock(f), t.odd).unwrap();
        (
            wigner_numeric(&even, grid, "even").unwrap(),
            wigner_numeric(&odd, grid, "odd").unwrap(),
        )
    }

    #[test]
    fn grid_axes_are_symmetric() {
        let g = PhaseSpaceGrid::default();
        let re = g.re_axis();
        assert_eq!(re.len(), 121);
        assert_eq!(re[60], 0.0);
        assert!((re[0] + 3.0).abs() < 1e-12 && (re[120] - 3.0).abs() < 1e-12);
        assert!(PhaseSpaceGrid::square(3.0, 0.0).validate().is_err());
    }

    #[test]
    fn fock_state_values_at_origin() {
        let g = PhaseSpaceGrid::square(3.0, 0.1);
        let vac = wigner_numeric(&fock_state(fock(4), 0).unwrap(), &g, "vacuum").unwrap();
        assert!((vac.at(30, 30) - FRAC_2_PI).abs() < 1e-14);
        let a = vac.alpha(40, 35);
        assert!((vac.at(40, 35) - FRAC_2_PI * (-2.0 * a.norm_sqr()).exp()).abs() < 1e-14);
        let one = wigner_numeric(&fock_state(fock(4), 1).unwrap(), &g, "one").unwrap();
        assert!((one.at(30, 30) + FRAC_2_PI).abs() < 1e-14);
        assert!(negativity_report(&vac).regions.is_empty());
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let g = PhaseSpaceGrid::default();
        let (even, odd) = target_maps(&g);
        let even_exact = wigner_even_analytic(&g).unwrap();
        let odd_exact = wigner_odd_analytic(&g).unwrap();
        assert!(even.sup_difference(&even_exact, 3.0).unwrap() < 1e-12);
        assert!(odd.sup_difference(&odd_exact, 3.0).unwrap() < 1e-12);
        assert!(even.max_imag_residue < 1e-12 && odd.max_imag_residue < 1e-12);
    }

    #[test]
    fn analytic_values_at_origin_and_boundary() {
        assert_eq!(even_analytic_value(C64::new(0.0, 0.0)), FRAC_2_PI);
        assert_eq!(odd_analytic_value(C64::new(0.0, 0.0)), -FRAC_2_PI);
        assert!(even_analytic_value(C64::new(0.5, 0.5)) > 0.0);
        // On the anti-diagonal α = r(1 − i)/√2 the bracket vanishes where
        // 4√2·Re·Im = −(1 − 2r²)².
        let root = |r: f64| 2.0 * SQRT_2 * r * r - (1.0 - 2.0 * r * r).powi(2);
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if root(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let alpha = C64::new(lo, -lo) / SQRT_2;
        assert!(even_analytic_value(alpha).abs() < 1e-15);
    }

    #[test]
    fn normalization_and_grid_gate() {
        let f = fock(8);
        let t = TargetStates::crossing_i(f).unwrap();
        let odd = QuantumState::pure(Space::Fock(f), t.odd).unwrap();
        let wide = wigner_odd_analytic(&PhaseSpaceGrid::square(4.0, 0.05)).unwrap();
        assert!((wide.integral() - 1.0).abs() < NORMALIZATION_TOL);
        let err = wigner_numeric(&odd, &PhaseSpaceGrid::square(0.5, 0.05), "odd").unwrap_err();
        assert!(matches!(err, Error::GridTooSmall(_)));
    }

    #[test]
    fn even_target_has_two_negative_lobes() {
        let (even, _) = target_maps(&PhaseSpaceGrid::default());
        let report = negativity_report(&even);
        let mut places: Vec<&str> = report.regions.iter().map(|r| r.location.as_str()).collect();
        places.sort();
        assert_eq!(places, ["II", "IV"]);
        assert!(report.regions.iter().all(|r| r.min_re * r.min_im < 0.0));
        assert!(report.negative_mass < 0.0);
    }

    #[test]
    fn padded_exponential_converges_to_closed_form() {
        let f = fock(6);
        let t = TargetStates::crossing_i(f).unwrap();
        let rho = t.even.clone() * t.even.adjoint();
        for alpha in [C64::new(0.3, -0.2), C64::new(-0.7, 0.5)] {
            let exact = displaced_parity(&rho, alpha);
            let padded = displaced_parity_padded(&rho, alpha, 8).unwrap();
            assert!(
                (exact - padded).norm() < 1e-6,
                "{alpha}: {exact} vs {padded}"
            );
        }
        // Eight extra levels are not enough at |α| = √2; more padding is.
        let alpha = C64::new(1.0, 1.0);
        let exact = displaced_parity(&rho, alpha);
        let short = (displaced_parity_padded(&rho, alpha, 8).unwrap() - exact).norm();
        let long = (displaced_parity_padded(&rho, alpha, 40).unwrap() - exact).norm();
        assert!(short > 1e-6);
        assert!(long < 1e-10, "{long}");
    }

    #[test]
    fn csv_and_payload_shapes() {
        let map = wigner_even_analytic(&PhaseSpaceGrid::square(1.0, 0.5)).unwrap();
        let csv = map.to_csv();
        assert!(csv.starts_with("re_alpha,im_alpha,W\n"));
        assert_eq!(csv.lines().count(), 1 + 25);
        assert_eq!(map.payload_le_bytes().len(), 25 * 8);
        assert_eq!(map.header("w.bin").re_axis.count, 5);
    }

    proptest! {
        #[test]
        fn wigner_is_real_bounded_and_normalized(
            amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        ) {
            let f = fock(4);
            let v = CVector::from_iterator(5, amps.iter().map(|&(a, b)| C64::new(a, b)));
            prop_assume!(v.norm() > 0.2);
            let state = QuantumState::pure(Space::Fock(f), v.unscale(v.norm())).unwrap();
            let map = wigner_numeric_unchecked(&state, &PhaseSpaceGrid::square(4.0, 0.1), "random").unwrap();
            prop_assert!(map.max_imag_residue < 1e-10);
            prop_assert!(map.max_value() <= FRAC_2_PI + 1e-9);
            prop_assert!((map.integral() - 1.0).abs() < NORMALIZATION_TOL);
        }

        #[test]
        fn even_closed_form_is_inversion_symmetric(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let a = C64::new(re, im);
            prop_assert_eq!(even_analytic_value(a), even_analytic_value(-a));
        }
    }
}
