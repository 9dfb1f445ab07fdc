//! Local rank-1 measurement on one party of a multipartite state.
//!
//! Party A (the measured subsystems) is projected onto a pure target with the
//! identity on party B, `M = |t><t|_A (x) I_B`. The outcome probability is
//! `Tr(M rho M^dagger)` and the post-measurement state of B is
//! `Tr_A(M rho M^dagger)` normalized by that probability.
//!
//! Measured subsystems need not be contiguous. The state is first permuted so
//! that party A comes first (both parties keep their ascending order), which
//! makes `M` a plain `|t><t| (x) I`. Target amplitudes are indexed by the
//! mixed-radix encoding of party A's digits in ascending subsystem order.
//!
//! Sweeps draw target `k` from a ChaCha20 stream seeded with
//! `seed_from_u64(seed)` and stream id `k`, so each sample is reproducible on
//! its own and parallel evaluation keeps the sequential order. Sample 0 equals
//! [`random_pure`](crate::states::random_pure) with the same seed.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hs_distance, ComplexMatrix, SubsystemDims};
use crate::states::{random_pure_with, werner, DensityMatrix, PureKet};

/// Outcomes at or below this probability have no defined reduced state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Split of the subsystems into a measured party A and an unmeasured party B.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    measured: Vec<usize>,
    unmeasured: Vec<usize>,
}

impl Bipartition {
    /// Party A is `measured`; party B is every other subsystem of `n`.
    pub fn new(measured: &[usize], n: usize) -> Result<Self> {
        let mut m = measured.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.len() != measured.len() {
            return Err(Error::InvalidPartition(format!(
                "duplicate subsystem in {measured:?}"
            )));
        }
        let unmeasured: Vec<usize> = (0..n).filter(|k| !m.contains(k)).collect();
        Self::from_sets(&m, &unmeasured, n)
    }

    pub fn from_sets(measured: &[usize], unmeasured: &[usize], n: usize) -> Result<Self> {
        if measured.is_empty() || unmeasured.is_empty() {
            return Err(Error::InvalidPartition(
                "both parties must be non-empty".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &k in measured.iter().chain(unmeasured) {
            if k >= n {
                return Err(Error::InvalidPartition(format!(
                    "subsystem {k} out of range for {n} subsystems"
                )));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidPartition(format!(
                    "subsystem {k} appears more than once"
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "parties do not cover all {n} subsystems"
            )));
        }
        let mut measured = measured.to_vec();
        let mut unmeasured = unmeasured.to_vec();
        measured.sort_unstable();
        unmeasured.sort_unstable();
        Ok(Self {
            measured,
            unmeasured,
        })
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn unmeasured(&self) -> &[usize] {
        &self.unmeasured
    }

    /// Total number of subsystems.
    pub fn len(&self) -> usize {
        self.measured.len() + self.unmeasured.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The same split with the roles of the parties exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            measured: self.unmeasured.clone(),
            unmeasured: self.measured.clone(),
        }
    }

    pub(crate) fn check_dims(&self, dims: &SubsystemDims) -> Result<()> {
        if dims.len() != self.len() {
            return Err(Error::Dimension(format!(
                "bipartition covers {} subsystems, state has {}",
                self.len(),
                dims.len()
            )));
        }
        Ok(())
    }

    /// Subsystem order that puts party A first.
    fn measured_first(&self) -> Vec<usize> {
        self.measured
            .iter()
            .chain(&self.unmeasured)
            .copied()
            .collect()
    }
}

/// Result of one local projection.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    /// `<t| rho_A |t>` with `rho_A` the marginal of the measured party.
    pub probability: f64,
    /// `Tr(Tr_A(M rho M^dagger))` before normalization.
    pub raw_trace: f64,
    /// Normalized state of party B; `None` when the outcome is (numerically) impossible.
    pub reduced_state: Option<DensityMatrix>,
}

/// A state prepared for repeated projections of one party.
#[derive(Debug, Clone)]
pub struct LocalProjector {
    permuted: ComplexMatrix,
    measured_dim: usize,
    rest_dim: usize,
    rest_dims: SubsystemDims,
    measured_marginal: ComplexMatrix,
}

impl LocalProjector {
    pub fn new(rho: &DensityMatrix, part: &Bipartition) -> Result<Self> {
        part.check_dims(rho.dims())?;
        let (permuted, _) = rho
            .matrix()
            .permute_subsystems(rho.dims(), &part.measured_first())?;
        let measured_dim = rho.dims().total_of(part.measured());
        let rest_dim = rho.dims().total_of(part.unmeasured());
        let rest_dims = rho.dims().select(part.unmeasured())?;
        let measured_marginal = rho.matrix().partial_trace(rho.dims(), part.unmeasured())?;
        Ok(Self {
            permuted,
            measured_dim,
            rest_dim,
            rest_dims,
            measured_marginal,
        })
    }

    /// Dimension a target ket must have.
    pub fn measured_dim(&self) -> usize {
        self.measured_dim
    }

    /// Marginal state of the measured party.
    pub fn measured_marginal(&self) -> &ComplexMatrix {
        &self.measured_marginal
    }

    pub fn rest_dims(&self) -> &SubsystemDims {
        &self.rest_dims
    }

    /// Projects party A onto `target`. Never fails on small probabilities;
    /// the reduced state is simply absent.
    pub fn project(&self, target: &PureKet) -> Result<MeasurementOutcome> {
        if target.dim() != self.measured_dim {
            return Err(Error::Dimension(format!(
                "target has dimension {}, measured party has {}",
                target.dim(),
                self.measured_dim
            )));
        }
        let t = target.amplitudes();
        let (da, db) = (self.measured_dim, self.rest_dim);

        // Tr_A(|t><t| (x) I  rho  |t><t| (x) I) = <t|_A rho |t>_A
        let mut reduced = vec![Complex64::new(0.0, 0.0); db * db];
        for (a, ta) in t.iter().enumerate() {
            let ta = ta.conj();
            if ta == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a2, ta2) in t.iter().enumerate() {
                let w = ta * ta2;
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..db {
                    for b2 in 0..db {
                        reduced[b * db + b2] += w * self.permuted.get(a * db + b, a2 * db + b2);
                    }
                }
            }
        }
        let reduced = ComplexMatrix::from_data(db, reduced)?;
        let raw_trace = reduced.trace().re;

        let probability: f64 = (0..da)
            .flat_map(|a| (0..da).map(move |a2| (a, a2)))
            .map(|(a, a2)| t[a].conj() * self.measured_marginal.get(a, a2) * t[a2])
            .sum::<Complex64>()
            .re;

        let reduced_state = (probability > ZERO_PROBABILITY).then(|| {
            DensityMatrix::new_unchecked(reduced.scale(1.0 / raw_trace), self.rest_dims.clone())
        });
        Ok(MeasurementOutcome {
            probability,
            raw_trace,
            reduced_state,
        })
    }
}

/// Projects party A of `rho` onto `target` and returns the normalized state of B.
pub fn local_project(
    rho: &DensityMatrix,
    target: &PureKet,
    part: &Bipartition,
) -> Result<MeasurementOutcome> {
    let outcome = LocalProjector::new(rho, part)?.project(target)?;
    if outcome.reduced_state.is_none() {
        return Err(Error::ZeroProbabilityOutcome {
            probability: outcome.probability,
        });
    }
    Ok(outcome)
}

/// Measures qudit 0 of `werner(n, d, p)`.
pub fn werner_post_measurement(
    n: usize,
    d: usize,
    p: f64,
    target: &PureKet,
) -> Result<MeasurementOutcome> {
    let rho = werner(n, d, p)?;
    local_project(&rho, target, &Bipartition::new(&[0], n)?)
}

/// Random target `index` of a sweep with the given seed.
pub fn sweep_target(dim: usize, seed: u64, index: u64) -> Result<PureKet> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_pure_with(&mut rng, dim)
}

/// Projects party A onto `samples` Haar-random targets.
///
/// Zero-probability outcomes are kept, with no reduced state.
pub fn measurement_sweep(
    rho: &DensityMatrix,
    part: &Bipartition,
    samples: usize,
    seed: u64,
) -> Result<Vec<MeasurementOutcome>> {
    if samples == 0 {
        return Err(Error::Range("a sweep needs at least one sample".into()));
    }
    let projector = LocalProjector::new(rho, part)?;
    let dim = projector.measured_dim();
    (0..samples as u64)
        .into_par_iter()
        .map(|k| projector.project(&sweep_target(dim, seed, k)?))
        .collect()
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub sample_index: usize,
    pub probability: f64,
    /// Distance of the reduced state from `I / d_B`; absent for zero-probability outcomes.
    pub distance_from_center: Option<f64>,
}

pub fn sweep_records(outcomes: &[MeasurementOutcome]) -> Result<Vec<SweepRecord>> {
    outcomes
        .iter()
        .enumerate()
        .map(|(sample_index, o)| {
            let distance_from_center = match &o.reduced_state {
                Some(r) => Some(hs_distance(
                    r.matrix(),
                    &ComplexMatrix::maximally_mixed(r.order()),
                )?),
                None => None,
            };
            Ok(SweepRecord {
                sample_index,
                probability: o.probability,
                distance_from_center,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "sample_index,probability,distance_from_center";

/// Writes sweep rows with 17 significant digits; missing distances are empty fields.
pub fn write_sweep_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        write!(out, "{},{:.16e},", r.sample_index, r.probability)?;
        if let Some(d) = r.distance_from_center {
            write!(out, "{d:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, random_pure};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn classical_pair() -> DensityMatrix {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let m = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        crate::states::validate(m, dims).unwrap()
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(&[0], 2).is_ok());
        assert!(Bipartition::new(&[0, 1], 2).is_err());
        assert!(Bipartition::new(&[], 2).is_err());
        assert!(Bipartition::new(&[3], 2).is_err());
        assert!(Bipartition::new(&[0, 0], 3).is_err());
        assert!(Bipartition::from_sets(&[0], &[2], 3).is_err());
        assert!(Bipartition::from_sets(&[0, 1], &[1, 2], 3).is_err());
        let p = Bipartition::new(&[2, 0], 4).unwrap();
        assert_eq!(p.measured(), &[0, 2]);
        assert_eq!(p.unmeasured(), &[1, 3]);
        assert_eq!(p.swapped().measured(), &[1, 3]);
    }

    #[test]
    fn classical_mixture_collapses_onto_diagonal() {
        let (a, b) = (0.6f64.sqrt(), c(0.0, 0.4f64.sqrt()));
        let target = PureKet::new(vec![c(a, 0.0), b]).unwrap();
        let out = local_project(
            &classical_pair(),
            &target,
            &Bipartition::new(&[0], 2).unwrap(),
        )
        .unwrap();
        let r = out.reduced_state.unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.6, 0.4]);
        assert!((r.matrix() - &expected).max_abs() < 1e-14);
        assert!((out.probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ghz_outcome_probability_and_jump() {
        let ghz = max_entangled(3, 2).unwrap();
        let part = Bipartition::new(&[0], 3).unwrap();
        let before = ghz.reduce(&[0]).unwrap();
        for seed in 0..20 {
            let out = local_project(&ghz, &random_pure(2, seed).unwrap(), &part).unwrap();
            assert!((out.probability - 0.5).abs() < 1e-12);
            let jump = hs_distance(before.matrix(), out.reduced_state.unwrap().matrix()).unwrap();
            assert!((jump - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_probability_is_an_error_for_single_projection() {
        let rho = PureKet::basis(4, 0)
            .unwrap()
            .to_density(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap();
        let part = Bipartition::new(&[0], 2).unwrap();
        let err = local_project(&rho, &PureKet::basis(2, 1).unwrap(), &part).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityOutcome { .. }));
        // the projector itself just reports the missing state
        let out = LocalProjector::new(&rho, &part)
            .unwrap()
            .project(&PureKet::basis(2, 1).unwrap())
            .unwrap();
        assert!(out.reduced_state.is_none());
        assert_eq!(out.probability, 0.0);
    }

    #[test]
    fn dimension_mismatches() {
        let rho = max_entangled(2, 3).unwrap();
        let part = Bipartition::new(&[0], 2).unwrap();
        assert!(matches!(
            local_project(&rho, &PureKet::basis(2, 0).unwrap(), &part),
            Err(Error::Dimension(_))
        ));
        let part3 = Bipartition::new(&[0], 3).unwrap();
        assert!(matches!(
            local_project(&rho, &PureKet::basis(3, 0).unwrap(), &part3),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn werner_post_measurement_radius() {
        for seed in 0..100 {
            let t = random_pure(2, seed).unwrap();
            let out = werner_post_measurement(2, 2, 0.6, &t).unwrap();
            let r = out.reduced_state.unwrap();
            let d = hs_distance(r.matrix(), &ComplexMatrix::maximally_mixed(2)).unwrap();
            assert!((d - 0.6 / 2f64.sqrt()).abs() < 1e-12);
            assert!((out.probability - 0.5).abs() < 1e-12);
        }
        let t = random_pure(2, 5).unwrap();
        let r = werner_post_measurement(3, 2, 0.4, &t)
            .unwrap()
            .reduced_state
            .unwrap();
        let d = hs_distance(r.matrix(), &ComplexMatrix::maximally_mixed(4)).unwrap();
        assert!((d - 0.4 * 0.75f64.sqrt()).abs() < 1e-12);

        let t = random_pure(3, 8).unwrap();
        let r = werner_post_measurement(2, 3, 0.0, &t)
            .unwrap()
            .reduced_state
            .unwrap();
        assert!((r.matrix() - &ComplexMatrix::maximally_mixed(3)).max_abs() < 1e-15);
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let rho = max_entangled(2, 2).unwrap();
        let part = Bipartition::new(&[1], 2).unwrap();
        let a = measurement_sweep(&rho, &part, 50, 7).unwrap();
        let b = measurement_sweep(&rho, &part, 50, 7).unwrap();
        assert_eq!(a, b);
        let first = local_project(&rho, &random_pure(2, 7).unwrap(), &part).unwrap();
        assert_eq!(a[0], first);
        let later = local_project(&rho, &sweep_target(2, 7, 33).unwrap(), &part).unwrap();
        assert_eq!(a[33], later);
        assert!(measurement_sweep(&rho, &part, 0, 7).is_err());
    }

    #[test]
    fn sweep_keeps_zero_probability_outcomes() {
        // Haar-random targets essentially never land on a zero-probability
        // outcome, so check the record layout on hand-built outcomes
        let records = sweep_records(&[
            MeasurementOutcome {
                probability: 0.0,
                raw_trace: 0.0,
                reduced_state: None,
            },
            MeasurementOutcome {
                probability: 0.25,
                raw_trace: 0.25,
                reduced_state: Some(DensityMatrix::maximally_mixed(
                    SubsystemDims::new(vec![2]).unwrap(),
                )),
            },
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_CSV_HEADER);
        assert_eq!(lines[1], "0,0.0000000000000000e0,");
        assert_eq!(lines[2], "1,2.5000000000000000e-1,0.0000000000000000e0");
    }

    #[test]
    fn explicit_operator_agrees_on_noncontiguous_party() {
        // measure subsystems {0, 2} of a random 2x3x2 state: build M = P_A (x) I_B
        // in measured-first order, permute it back, and compare Tr_A(M rho M^dagger)
        let dims = SubsystemDims::new(vec![2, 3, 2]).unwrap();
        let psi = random_pure(12, 3).unwrap();
        let rho = psi.to_density(dims.clone()).unwrap();
        let part = Bipartition::new(&[0, 2], 3).unwrap();
        let target = random_pure(4, 4).unwrap();

        let m_first = target.projector().kron(&ComplexMatrix::identity(3));
        let first_dims = SubsystemDims::new(vec![2, 2, 3]).unwrap();
        // measured-first order is [0, 2, 1]; its inverse is [0, 2, 1]
        let (m, _) = m_first.permute_subsystems(&first_dims, &[0, 2, 1]).unwrap();
        let post = &(&m * rho.matrix()) * &m.adjoint();
        let prob = post.trace().re;
        let reduced = post
            .partial_trace(&dims, &[0, 2])
            .unwrap()
            .scale(1.0 / prob);

        let out = local_project(&rho, &target, &part).unwrap();
        assert!((out.probability - prob).abs() < 1e-12);
        assert!((out.raw_trace - prob).abs() < 1e-12);
        assert!((out.reduced_state.unwrap().matrix() - &reduced).max_abs() < 1e-12);
    }
}
