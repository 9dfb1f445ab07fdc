//! Quantum states used throughout the toolkit: pure kets, the maximally
//! entangled n-qudit state (GHZ for qubits), the W state, Werner mixtures and
//! Haar-random pure states.
//!
//! "Werner state" here means `p |Psi><Psi| + (1 - p) I / d^n` with `|Psi>` the
//! maximally entangled state; most of the literature calls this family
//! isotropic.
//!
//! Random pure states are drawn from a ChaCha20 stream (`rand_chacha`),
//! seeded with `seed_from_u64(seed)` and stream id 0; each amplitude is an
//! independent standard complex Gaussian (real and imaginary parts from
//! `rand_distr::StandardNormal`, real part first) and the vector is then
//! normalized.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SubsystemDims, HERMITIAN_TOL};

/// Tolerance on `|Tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted as non-negative.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Tolerance on the norm of a ket.
pub const KET_NORM_TOL: f64 = 1e-12;
/// A state counts as pure when its purity is at least `1 - PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-9;

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureKet {
    amplitudes: Vec<Complex64>,
}

impl PureKet {
    /// Accepts amplitudes whose Euclidean norm is 1 within `KET_NORM_TOL`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Dimension("a ket needs at least 2 amplitudes".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Range("ket has a non-finite amplitude".into()));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::Range(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Range(format!(
                "cannot normalize a ket of norm {norm}"
            )));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Range(format!(
                "basis index {index} >= dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product `|self>|other>`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self { amplitudes }
    }

    /// `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    /// The projector as a density matrix over `dims`.
    pub fn to_density(&self, dims: SubsystemDims) -> Result<DensityMatrix> {
        dims.check_order(self.dim())?;
        Ok(DensityMatrix::new_unchecked(self.projector(), dims))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Validated quantum state: Hermitian, unit trace, positive semidefinite,
/// with the tensor structure attached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: SubsystemDims,
}

impl DensityMatrix {
    /// Skips validation. Only for constructions that are states by design.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: SubsystemDims) -> Self {
        debug_assert_eq!(matrix.dim(), dims.total());
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    /// Matrix order `N`.
    pub fn order(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.purity()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - PURITY_TOL
    }

    /// Fails with [`Error::Purity`] unless the state is pure.
    pub fn require_pure(&self) -> Result<()> {
        let purity = self.purity();
        if purity < 1.0 - PURITY_TOL {
            return Err(Error::Purity {
                purity,
                deviation: 1.0 - purity,
            });
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .hermitian_eigenvalues()
            .expect("density matrices are Hermitian")
    }

    /// Reduced state on the subsystems not listed in `traced`.
    pub fn reduce(&self, traced: &[usize]) -> Result<DensityMatrix> {
        let m = self.matrix.partial_trace(&self.dims, traced)?;
        let kept: Vec<usize> = (0..self.dims.len())
            .filter(|k| !traced.contains(k))
            .collect();
        Ok(Self::new_unchecked(m, self.dims.select(&kept)?))
    }

    /// `I / N` over the given dims.
    pub fn maximally_mixed(dims: SubsystemDims) -> Self {
        let m = ComplexMatrix::maximally_mixed(dims.total());
        Self::new_unchecked(m, dims)
    }

    /// Tensor product of two states.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self::new_unchecked(
            self.matrix.kron(&other.matrix),
            self.dims.concat(&other.dims)?,
        ))
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Range(format!("mixing weight {w} outside [0, 1]")));
        }
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "cannot mix states over {:?} and {:?}",
                self.dims.as_slice(),
                other.dims.as_slice()
            )));
        }
        let m = self.matrix.scale(w).try_add(&other.matrix.scale(1.0 - w))?;
        Ok(Self::new_unchecked(m, self.dims.clone()))
    }

    pub fn to_json(&self) -> String {
        crate::linalg::matrix_to_json(&self.matrix, Some(&self.dims))
    }

    /// Parses a state file; `"dims"` is mandatory for states.
    pub fn from_json(text: &str) -> Result<Self> {
        let (m, dims) = crate::linalg::matrix_from_json(text)?;
        let dims = dims.ok_or_else(|| Error::Format("state files must carry \"dims\"".into()))?;
        validate(m, dims)
    }
}

/// Checks the density-matrix invariants.
pub fn validate(m: ComplexMatrix, dims: SubsystemDims) -> Result<DensityMatrix> {
    dims.check_order(m.dim())?;
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::Hermiticity { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::Trace {
            trace,
            deviation: (trace - 1.0).abs(),
        });
    }
    let min_eigenvalue = m.hermitian_eigenvalues()?[0];
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(Error::Positivity { min_eigenvalue });
    }
    Ok(DensityMatrix::new_unchecked(m, dims))
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Ket `(1/sqrt(d)) sum_i |i i ... i>` on `n` qudits.
pub fn max_entangled_ket(n: usize, d: usize) -> Result<PureKet> {
    if n < 2 {
        return Err(Error::Range(format!("need at least 2 parties, got {n}")));
    }
    let dims = SubsystemDims::uniform(n, d)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dims.total()];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amplitudes[dims.encode(&vec![i; n])] = amp;
    }
    PureKet::new(amplitudes)
}

/// Maximally entangled n-qudit state; `max_entangled(n, 2)` is the n-qubit GHZ state.
pub fn max_entangled(n: usize, d: usize) -> Result<DensityMatrix> {
    let ket = max_entangled_ket(n, d)?;
    ket.to_density(SubsystemDims::uniform(n, d)?)
}

/// `(|001> + |010> + |100>) / sqrt(3)`.
pub fn w_ket() -> PureKet {
    let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let z = Complex64::new(0.0, 0.0);
    PureKet::new(vec![z, a, a, z, a, z, z, z]).expect("W ket is normalized")
}

pub fn w_state() -> DensityMatrix {
    w_ket()
        .to_density(SubsystemDims::uniform(3, 2).expect("3 qubits fit"))
        .expect("W ket has order 8")
}

/// Werner mixture `p |Psi><Psi| + (1 - p) I / d^n`.
pub fn werner(n: usize, d: usize, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    let psi = max_entangled(n, d)?;
    let mixed = DensityMatrix::maximally_mixed(psi.dims().clone());
    psi.mix(&mixed, p)
}

/// Haar-random pure state of dimension `dim`, deterministic in `seed`.
pub fn random_pure(dim: usize, seed: u64) -> Result<PureKet> {
    random_pure_with(&mut ChaCha20Rng::seed_from_u64(seed), dim)
}

/// Haar-random pure state drawn from a caller-supplied generator.
pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<PureKet> {
    if dim < 2 {
        return Err(Error::Dimension(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    let amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    PureKet::normalized(amplitudes)
}
