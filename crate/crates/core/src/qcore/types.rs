use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance for assertions that hold exactly in exact arithmetic.
pub const TOL: f64 = 1e-9;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: CVec,
}

impl Ket {
    pub fn new(amps: CVec) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("ket of dimension 0".into()));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!("ket norm {norm} differs from 1")));
        }
        Ok(Ket { amps })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(amps: CVec) -> Result<Self> {
        let norm = amps.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Ket {
            amps: amps / C64::from(norm),
        })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Ket::new(CVec::from_column_slice(amps))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = CVec::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Ket { amps }
    }

    /// Computational basis state of `bits.len()` qubits, most significant bit first.
    pub fn from_bits(bits: &[bool]) -> Self {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Ket::basis(1 << bits.len(), idx)
    }

    pub(crate) fn new_unchecked(amps: CVec) -> Self {
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amps
    }

    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::dims(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn density(&self) -> DensityOp {
        DensityOp {
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    matrix: CMat,
}

impl DensityOp {
    pub fn new(matrix: CMat) -> Result<Self> {
        let d = check_square(&matrix)?;
        if d == 0 {
            return Err(Error::InvalidState("density of dimension 0".into()));
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > TOL {
            return Err(Error::InvalidState(format!(
                "density not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidState(format!("density trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::InvalidState(format!("density has negative eigenvalue {min:e}")));
        }
        Ok(DensityOp { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMat) -> Self {
        DensityOp { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOp {
            matrix: CMat::identity(dim, dim) / C64::from(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Diagonal in the computational basis, as real probabilities.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn conjugate_by(&self, u: &UnitaryOp) -> Result<DensityOp> {
        if u.dim() != self.dim() {
            return Err(Error::dims(format!(
                "unitary dim {} vs density dim {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(DensityOp {
            matrix: &u.matrix * &self.matrix * u.matrix.adjoint(),
        })
    }
}

/// A unitary operator.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp {
    matrix: CMat,
}

impl UnitaryOp {
    pub fn new(matrix: CMat) -> Result<Self> {
        let d = check_square(&matrix)?;
        if d == 0 {
            return Err(Error::InvalidState("unitary of dimension 0".into()));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not unitary (deviation {dev:e})"
            )));
        }
        Ok(UnitaryOp { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMat) -> Self {
        UnitaryOp { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryOp {
            matrix: CMat::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dagger(&self) -> UnitaryOp {
        UnitaryOp {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &UnitaryOp) -> Result<UnitaryOp> {
        if self.dim() != other.dim() {
            return Err(Error::dims(format!("compose dims {} and {}", self.dim(), other.dim())));
        }
        Ok(UnitaryOp {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if self.dim() != ket.dim() {
            return Err(Error::dims(format!(
                "unitary dim {} vs ket dim {}",
                self.dim(),
                ket.dim()
            )));
        }
        Ok(Ket::new_unchecked(&self.matrix * ket.amplitudes()))
    }

    pub fn approx_eq(&self, other: &UnitaryOp, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.matrix - &other.matrix)) <= tol
    }
}

/// Largest entry of `U U† − I`.
pub fn unitarity_deviation(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let d = m.nrows();
    max_abs(&(m * m.adjoint() - CMat::identity(d, d)))
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Eigenvalues of a Hermitian matrix (only the Hermitian part is used).
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::from(0.5);
    nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// Kronecker product, shared by every kind of quantum value.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for Ket {
    fn tensor(&self, other: &Self) -> Self {
        Ket::new_unchecked(self.amps.kronecker(&other.amps))
    }
}

impl Tensor for DensityOp {
    fn tensor(&self, other: &Self) -> Self {
        DensityOp::new_unchecked(self.matrix.kronecker(&other.matrix))
    }
}

impl Tensor for UnitaryOp {
    fn tensor(&self, other: &Self) -> Self {
        UnitaryOp::new_unchecked(self.matrix.kronecker(&other.matrix))
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Tensor product of a list; the empty product is not defined.
pub fn tensor_all<T: Tensor + Clone>(items: &[T]) -> Option<T> {
    let (first, rest) = items.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, x| acc.tensor(x)))
}

/// A quantum value whose kind is only known at run time (e.g. read from JSON).
#[derive(Clone, Debug, PartialEq)]
pub enum QValue {
    Ket(Ket),
    Density(DensityOp),
    Unitary(UnitaryOp),
}

impl QValue {
    pub fn kind(&self) -> &'static str {
        match self {
            QValue::Ket(_) => "ket",
            QValue::Density(_) => "density",
            QValue::Unitary(_) => "unitary",
        }
    }

    pub fn tensor(&self, other: &QValue) -> Result<QValue> {
        match (self, other) {
            (QValue::Ket(a), QValue::Ket(b)) => Ok(QValue::Ket(a.tensor(b))),
            (QValue::Density(a), QValue::Density(b)) => Ok(QValue::Density(a.tensor(b))),
            (QValue::Unitary(a), QValue::Unitary(b)) => Ok(QValue::Unitary(a.tensor(b))),
            (a, b) => Err(Error::InvalidState(format!(
                "cannot tensor a {} with a {}",
                a.kind(),
                b.kind()
            ))),
        }
    }
}
