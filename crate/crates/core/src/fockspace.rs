//! Truncated bosonic Fock space, qubit operators and the qubit ⊗ Fock
//! product space.
//!
//! Basis ordering is qubit-major: `index(q, n) = q·(n_max + 1) + n` with
//! `q = 0` for |g⟩ and `q = 1` for |e⟩. Tracing out the qubit is therefore
//! a sum of two contiguous diagonal blocks.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_defect, trace, CMatrix, CVector, C64};

/// Photon-number basis |0⟩ … |n_max⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter(
                "Fock space needs n_max >= 1 (dim >= 2)".into(),
            ));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    #[serde(rename = "g")]
    Ground = 0,
    #[serde(rename = "e")]
    Excited = 1,
}

impl Qubit {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Qubit::Ground => "g",
            Qubit::Excited => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeSpace {
    fock: FockSpace,
}

impl CompositeSpace {
    pub fn new(fock: FockSpace) -> Self {
        Self { fock }
    }

    pub fn with_n_max(n_max: usize) -> Result<Self> {
        Ok(Self::new(FockSpace::new(n_max)?))
    }

    pub fn fock(&self) -> FockSpace {
        self.fock
    }

    pub fn n_max(&self) -> usize {
        self.fock.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.fock.dim()
    }

    pub fn index(&self, q: Qubit, n: usize) -> usize {
        q.index() * self.fock.dim() + n
    }

    pub fn label(&self, index: usize) -> (Qubit, usize) {
        let d = self.fock.dim();
        let q = if index < d {
            Qubit::Ground
        } else {
            Qubit::Excited
        };
        (q, index % d)
    }
}

/// Which Hilbert space an operator or state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Qubit,
    Fock(FockSpace),
    Composite(CompositeSpace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Qubit => 2,
            Space::Fock(f) => f.dim(),
            Space::Composite(c) => c.dim(),
        }
    }
}

/// Dense complex matrix tagged with its space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: Space, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix on a space of dim {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.map(|z| z * s),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s))
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.check_same(rhs)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Operator> {
        self.check_same(rhs)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.check_same(rhs)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix,
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn apply(&self, state: &QuantumState) -> Result<CVector> {
        match state {
            QuantumState::Pure { space, vector } if *space == self.space => {
                Ok(&self.matrix * vector)
            }
            QuantumState::Pure { .. } => Err(Error::ShapeMismatch(
                "operator and state live on different spaces".into(),
            )),
            QuantumState::Density { .. } => {
                Err(Error::ShapeMismatch("apply expects a pure state".into()))
            }
        }
    }

    fn check_same(&self, rhs: &Operator) -> Result<()> {
        if self.space != rhs.space {
            return Err(Error::ShapeMismatch(format!(
                "operators on {:?} and {:?}",
                self.space, rhs.space
            )));
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator spaces differ")
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator spaces differ")
    }
}

/// Bosonic annihilation operator with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    Operator {
        space: Space::Fock(space),
        matrix: m,
    }
}

pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).adjoint()
}

/// a†a, built directly so the diagonal is exact.
pub fn number(space: FockSpace) -> Operator {
    let d = space.dim();
    let m = CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| c(n as f64)));
    Operator {
        space: Space::Fock(space),
        matrix: m,
    }
}

/// Photon parity (−1)^{a†a}.
pub fn parity(space: FockSpace) -> Operator {
    let d = space.dim();
    let m = CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| {
        c(if n % 2 == 0 { 1.0 } else { -1.0 })
    }));
    Operator {
        space: Space::Fock(space),
        matrix: m,
    }
}

/// σ₊ = |e⟩⟨g| and σ₋ = σ₊†.
pub fn qubit_ops() -> (Operator, Operator) {
    let mut m = CMatrix::zeros(2, 2);
    m[(Qubit::Excited.index(), Qubit::Ground.index())] = c(1.0);
    let plus = Operator {
        space: Space::Qubit,
        matrix: m,
    };
    let minus = plus.adjoint();
    (plus, minus)
}

/// Kronecker product of a qubit operator and a Fock operator.
pub fn tensor(qubit: &Operator, field: &Operator) -> Result<Operator> {
    let fock = match (qubit.space, field.space) {
        (Space::Qubit, Space::Fock(f)) => f,
        (a, b) => {
            return Err(Error::ShapeMismatch(format!(
                "tensor expects (qubit, Fock) factors, got ({a:?}, {b:?})"
            )))
        }
    };
    Ok(Operator {
        space: Space::Composite(CompositeSpace::new(fock)),
        matrix: qubit.matrix.kronecker(&field.matrix),
    })
}

/// Embed a Fock operator as I₂ ⊗ B.
pub fn on_field(field: &Operator) -> Result<Operator> {
    tensor(&Operator::identity(Space::Qubit), field)
}

/// Embed a qubit operator as A ⊗ I.
pub fn on_qubit(qubit: &Operator, fock: FockSpace) -> Result<Operator> {
    tensor(qubit, &Operator::identity(Space::Fock(fock)))
}

pub const NORM_TOL: f64 = 1e-9;

/// Pure state vector or density matrix on a tagged space.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure { space: Space, vector: CVector },
    Density { space: Space, matrix: CMatrix },
}

impl QuantumState {
    pub fn pure(space: Space, vector: CVector) -> Result<Self> {
        if vector.len() != space.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} on a space of dim {}",
                vector.len(),
                space.dim()
            )));
        }
        Ok(Self::Pure { space, vector })
    }

    pub fn density(space: Space, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} density on a space of dim {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        Ok(Self::Density { space, matrix })
    }

    pub fn space(&self) -> Space {
        match self {
            Self::Pure { space, .. } | Self::Density { space, .. } => *space,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure { .. })
    }

    pub fn to_density_matrix(&self) -> CMatrix {
        match self {
            Self::Pure { vector, .. } => vector * vector.adjoint(),
            Self::Density { matrix, .. } => matrix.clone(),
        }
    }

    pub fn into_density(self) -> Self {
        let space = self.space();
        Self::Density {
            space,
            matrix: self.to_density_matrix(),
        }
    }

    /// Tr[ρ A] (real part; A is expected Hermitian).
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        if op.space() != self.space() {
            return Err(Error::ShapeMismatch(
                "operator and state live on different spaces".into(),
            ));
        }
        Ok(match self {
            Self::Pure { vector, .. } => vector.dotc(&(op.matrix() * vector)).re,
            Self::Density { matrix, .. } => trace(&(matrix * op.matrix())).re,
        })
    }

    /// Diagonal of the density matrix in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Pure { vector, .. } => vector.iter().map(|z| z.norm_sqr()).collect(),
            Self::Density { matrix, .. } => matrix.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            Self::Pure { vector, .. } => vector.norm_squared(),
            Self::Density { matrix, .. } => trace(matrix).re,
        }
    }

    /// Check normalization, Hermiticity and positivity at 1e-9.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pure { vector, .. } => {
                let n = vector.norm_squared();
                if (n - 1.0).abs() > NORM_TOL {
                    return Err(Error::Invariant(format!("state norm² = {n}")));
                }
            }
            Self::Density { matrix, .. } => {
                let h = hermiticity_defect(matrix);
                if h > NORM_TOL {
                    return Err(Error::Invariant(format!("density not Hermitian ({h:e})")));
                }
                let tr = trace(matrix);
                if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
                    return Err(Error::Invariant(format!("density trace = {tr}")));
                }
                let min = crate::linalg::eigvalsh(matrix)?
                    .first()
                    .copied()
                    .unwrap_or(0.0);
                if min < -NORM_TOL {
                    return Err(Error::Invariant(format!(
                        "density has negative eigenvalue {min:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// |q, n⟩ on the composite space.
pub fn basis_state(space: CompositeSpace, q: Qubit, n: usize) -> Result<QuantumState> {
    if n > space.n_max() {
        return Err(Error::OutOfRange {
            what: "photon number",
            value: n,
            max: space.n_max(),
        });
    }
    let mut v = CVector::zeros(space.dim());
    v[space.index(q, n)] = c(1.0);
    QuantumState::pure(Space::Composite(space), v)
}

/// |n⟩ on a Fock space.
pub fn fock_state(space: FockSpace, n: usize) -> Result<QuantumState> {
    if n > space.n_max() {
        return Err(Error::OutOfRange {
            what: "photon number",
            value: n,
            max: space.n_max(),
        });
    }
    let mut v = CVector::zeros(space.dim());
    v[n] = c(1.0);
    QuantumState::pure(Space::Fock(space), v)
}

/// Normalized Fock-space vector from `(n, amplitude)` pairs.
pub fn fock_superposition(space: FockSpace, terms: &[(usize, C64)]) -> Result<CVector> {
    let mut v = CVector::zeros(space.dim());
    for &(n, amp) in terms {
        if n > space.n_max() {
            return Err(Error::OutOfRange {
                what: "photon number",
                value: n,
                max: space.n_max(),
            });
        }
        v[n] += amp;
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("zero superposition".into()));
    }
    Ok(v.unscale(norm))
}

/// |q⟩ ⊗ |φ⟩ for a Fock-space vector φ.
pub fn product_vector(space: CompositeSpace, q: Qubit, field: &CVector) -> Result<CVector> {
    if field.len() != space.fock().dim() {
        return Err(Error::ShapeMismatch(format!(
            "field vector of length {} for Fock dim {}",
            field.len(),
            space.fock().dim()
        )));
    }
    let mut v = CVector::zeros(space.dim());
    for (n, amp) in field.iter().enumerate() {
        v[space.index(q, n)] = *amp;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn fock(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn annihilation_entries() {
        let a = annihilation(fock(1));
        assert_eq!(a.matrix()[(0, 1)], c(1.0));
        assert_eq!(a.matrix()[(0, 0)], c(0.0));
        assert_eq!(a.matrix()[(1, 0)], c(0.0));
        assert_eq!(a.matrix()[(1, 1)], c(0.0));

        let a = annihilation(fock(3));
        assert_eq!(a.matrix()[(2, 3)], c(3f64.sqrt()));
    }

    #[test]
    fn number_operator_from_ladder_ops() {
        let f = fock(3);
        let n = &creation(f) * &annihilation(f);
        for k in 0..4 {
            assert!((n.matrix()[(k, k)] - c(k as f64)).norm() < 1e-15);
        }
        assert_eq!(
            n,
            Operator::new(Space::Fock(f), n.matrix().clone()).unwrap()
        );
    }

    #[test]
    fn commutator_identity_on_untruncated_block() {
        let f = fock(6);
        let comm = annihilation(f).commutator(&creation(f)).unwrap();
        for i in 0..f.n_max() {
            for j in 0..f.n_max() {
                let want = if i == j { c(1.0) } else { c(0.0) };
                assert!((comm.matrix()[(i, j)] - want).norm() < 1e-14);
            }
        }
        // Truncation artifact in the corner.
        let last = comm.matrix()[(f.n_max(), f.n_max())].re;
        assert!((last + f.n_max() as f64).abs() < 1e-12);
    }

    #[test]
    fn creation_is_exact_adjoint() {
        let f = fock(5);
        let a = annihilation(f);
        let ad = creation(f);
        assert_eq!(ad.matrix(), &a.matrix().adjoint());
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn qubit_ladder() {
        let (sp, sm) = qubit_ops();
        let g = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let e = CVector::from_vec(vec![c(0.0), c(1.0)]);
        assert_eq!(sp.matrix() * &g, e);
        assert_eq!(sm.matrix() * &g, CVector::zeros(2));
        let proj_e = &sp * &sm;
        assert_eq!(proj_e.matrix(), &(&e * e.adjoint()));
    }

    #[test]
    fn tensor_ordering() {
        let f = fock(5);
        let space = CompositeSpace::new(f);
        assert_eq!(space.index(Qubit::Excited, 3), 9);

        let n_op = on_field(&number(f)).unwrap();
        let e2 = basis_state(space, Qubit::Excited, 2).unwrap();
        let out = n_op.apply(&e2).unwrap();
        let want = basis_state(space, Qubit::Excited, 2).unwrap();
        if let QuantumState::Pure { vector, .. } = want {
            assert!((out - vector.scale(2.0)).norm() < 1e-15);
        }

        let (sp, _) = qubit_ops();
        let raise = on_qubit(&sp, f).unwrap();
        let g1 = basis_state(space, Qubit::Ground, 1).unwrap();
        let out = raise.apply(&g1).unwrap();
        assert_eq!(out[space.index(Qubit::Excited, 1)], c(1.0));
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_wrong_factors() {
        let f = fock(2);
        let a = annihilation(f);
        assert!(matches!(tensor(&a, &a), Err(Error::ShapeMismatch(_))));
        let (sp, _) = qubit_ops();
        assert!(tensor(&sp, &sp).is_err());
    }

    #[test]
    fn basis_states() {
        let space = CompositeSpace::with_n_max(5).unwrap();
        let e0 = basis_state(space, Qubit::Excited, 0).unwrap();
        let QuantumState::Pure { vector, .. } = &e0 else {
            panic!()
        };
        assert_eq!(vector[6], c(1.0));
        let g3 = basis_state(space, Qubit::Ground, 3).unwrap();
        assert!((g3.trace() - 1.0).abs() < 1e-15);
        g3.validate().unwrap();
        let QuantumState::Pure { vector: g0, .. } = basis_state(space, Qubit::Ground, 0).unwrap()
        else {
            panic!()
        };
        assert_eq!(vector.dotc(&g0), c(0.0));
        assert!(matches!(
            basis_state(space, Qubit::Excited, 6),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn number_expectation_is_exact() {
        let space = CompositeSpace::with_n_max(7).unwrap();
        let n_op = on_field(&number(space.fock())).unwrap();
        for q in [Qubit::Ground, Qubit::Excited] {
            for n in 0..=7 {
                let s = basis_state(space, q, n).unwrap();
                assert_eq!(s.expectation(&n_op).unwrap(), n as f64);
            }
        }
    }

    #[test]
    fn mixed_product_rule() {
        let f = fock(3);
        let (sp, sm) = qubit_ops();
        let a = annihilation(f);
        let ad = creation(f);
        let lhs = &tensor(&sp, &a).unwrap() * &tensor(&sm, &ad).unwrap();
        let rhs = tensor(&(&sp * &sm), &(&a * &ad)).unwrap();
        assert!(max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn density_validation() {
        let f = fock(2);
        let s = fock_state(f, 1).unwrap().into_density();
        s.validate().unwrap();
        let bad = QuantumState::density(Space::Fock(f), CMatrix::identity(3, 3)).unwrap();
        assert!(bad.validate().is_err());
        assert!(FockSpace::new(0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn ladder_commutator_is_identity_below_cutoff(n_max in 1usize..12) {
            let f = fock(n_max);
            let a = annihilation(f);
            let comm = a.commutator(&creation(f)).unwrap();
            let m = comm.matrix();
            for k in 0..n_max {
                proptest::prop_assert!((m[(k, k)] - c(1.0)).norm() < 1e-12);
            }
            proptest::prop_assert!((m[(n_max, n_max)] - c(-(n_max as f64))).norm() < 1e-12);
        }

        #[test]
        fn number_expectation_matches_populations(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        ) {
            let f = fock(5);
            let v = CVector::from_iterator(6, amps.iter().map(|&(re, im)| C64::new(re, im)));
            proptest::prop_assume!(v.norm() > 1e-3);
            let state = QuantumState::pure(Space::Fock(f), v.unscale(v.norm())).unwrap();
            let direct: f64 = state
                .populations()
                .iter()
                .enumerate()
                .map(|(n, p)| n as f64 * p)
                .sum();
            let via_op = state.expectation(&number(f)).unwrap();
            proptest::prop_assert!((direct - via_op).abs() < 1e-12);
        }
    }
}
