//! Separability thresholds, the pure-state entanglement measure and the
//! oracles used to cross-check them.
//!
//! For a pure state `sigma` of order `N` and a bipartition A/B, the mixture
//! `p sigma + (1 - p) I / N` stays separable up to
//! `p_max = 1 / (1 + N q_min)`, where `q_min` is the least probability of
//! projecting party A onto a pure state. The entanglement across the split is
//! `e = 1 - p_max`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{absolute_sep_radius, simplex_division_ratio};
use crate::linalg::{hs_distance, ComplexMatrix, SubsystemDims};
use crate::measurement::{measurement_sweep, Bipartition};
use crate::states::DensityMatrix;

/// Eigenvalues of the partial transpose above `-PPT_TOL` count as non-negative.
pub const PPT_TOL: f64 = 1e-9;
/// Slack on the absolute-separability radius.
pub const BALL_TOL: f64 = 1e-12;
/// Threshold comparisons `p <= p*` are closed with this slack.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// `q_min` below this gets a warning in the report.
pub const Q_MIN_WARN: f64 = 1e-9;
/// Fewest samples [`q_min_sampled`] accepts.
pub const MIN_QMIN_SAMPLES: usize = 100;

/// `1 / (d^(n-1) + 1)`: largest Werner fraction for which the n-qudit Werner
/// state is separable.
pub fn werner_threshold(n: usize, d: usize) -> f64 {
    assert!(n >= 2 && d >= 2, "need n >= 2 and d >= 2");
    1.0 / ((d as f64).powi(n as i32 - 1) + 1.0)
}

/// `1 / (N + 1)` for the N x N Werner state.
pub fn bipartite_werner_threshold(local_dim: usize) -> f64 {
    simplex_division_ratio(local_dim)
}

/// Whether `p` is within the separable range `[0, threshold]`, boundary included.
pub fn is_below_threshold(p: f64, threshold: f64) -> bool {
    p <= threshold + BOUNDARY_TOL
}

/// Least outcome probability over rank-1 projections of the measured party:
/// the smallest eigenvalue of its marginal.
pub fn q_min_exact(sigma: &DensityMatrix, part: &Bipartition) -> Result<f64> {
    sigma.require_pure()?;
    part.check_dims(sigma.dims())?;
    let marginal = sigma
        .matrix()
        .partial_trace(sigma.dims(), part.unmeasured())?;
    let lowest = marginal.hermitian_eigenvalues()?[0];
    Ok(lowest.max(0.0))
}

/// Minimum outcome probability over `samples` Haar-random targets. Never
/// below [`q_min_exact`] up to roundoff.
pub fn q_min_sampled(
    sigma: &DensityMatrix,
    part: &Bipartition,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    sigma.require_pure()?;
    if samples < MIN_QMIN_SAMPLES {
        return Err(Error::Range(format!(
            "q_min sampling needs at least {MIN_QMIN_SAMPLES} samples, got {samples}"
        )));
    }
    let outcomes = measurement_sweep(sigma, part, samples, seed)?;
    Ok(outcomes
        .iter()
        .map(|o| o.probability)
        .fold(f64::INFINITY, f64::min))
}

/// Which separability question a PPT verdict answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PptScope {
    /// 2x2 and 2x3 splits, where PPT is equivalent to separability.
    Exact,
    /// Larger splits, where PPT is only necessary for separability.
    NecessaryOnly,
}

impl PptScope {
    pub fn label(self) -> &'static str {
        match self {
            PptScope::Exact => "exact",
            PptScope::NecessaryOnly => "necessary_only",
        }
    }
}

pub fn ppt_scope(dims: &SubsystemDims, part: &Bipartition) -> PptScope {
    let a = dims.total_of(part.measured());
    let b = dims.total_of(part.unmeasured());
    if a * b <= 6 {
        PptScope::Exact
    } else {
        PptScope::NecessaryOnly
    }
}

/// Smallest eigenvalue of the partial transpose over the unmeasured party.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, part: &Bipartition) -> Result<f64> {
    part.check_dims(rho.dims())?;
    let pt = rho
        .matrix()
        .partial_transpose(rho.dims(), part.unmeasured())?;
    Ok(pt.hermitian_eigenvalues()?[0])
}

/// Peres–Horodecki test: true when the partial transpose has no eigenvalue
/// below `-PPT_TOL`.
pub fn ppt_check(rho: &DensityMatrix, part: &Bipartition) -> Result<bool> {
    Ok(ppt_min_eigenvalue(rho, part)? >= -PPT_TOL)
}

/// Whether `rho` lies within the absolute-separability radius about `I / d^n`.
pub fn in_absolute_sep_ball(rho: &DensityMatrix, n: usize, d: usize) -> Result<bool> {
    let order = (d as u64).checked_pow(n as u32);
    if order != Some(rho.order() as u64) {
        return Err(Error::Dimension(format!(
            "state has order {}, expected {d}^{n}",
            rho.order()
        )));
    }
    let distance = hs_distance(rho.matrix(), &ComplexMatrix::maximally_mixed(rho.order()))?;
    Ok(distance <= absolute_sep_radius(n, d) + BALL_TOL)
}

/// Entanglement of a pure state across a bipartition, with the intermediate
/// quantities it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    /// Largest separable mixing fraction; equals `p_max`.
    pub threshold_p: f64,
    pub q_min: f64,
    pub p_max: f64,
    pub entanglement_e: f64,
    pub measured_party: Vec<usize>,
    /// PPT verdict on the pure state itself (false: entangled across the split).
    pub oracle_ppt_verdict: Option<bool>,
    /// Sampled estimate of `q_min`.
    pub oracle_qmin_sampled: Option<f64>,
    pub ppt_scope: Option<PptScope>,
    /// Set when `q_min` is numerically zero; `e = 0` may then hide
    /// entanglement that a rank-deficient marginal cannot reveal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// `e = 1 - 1 / (1 + N q_min)` for a pure state.
pub fn entanglement_measure(
    sigma: &DensityMatrix,
    part: &Bipartition,
) -> Result<SeparabilityReport> {
    let q_min = q_min_exact(sigma, part)?;
    let n = sigma.order() as f64;
    let p_max = 1.0 / (1.0 + n * q_min);
    let warning = (q_min < Q_MIN_WARN).then(|| {
        format!("q_min < {Q_MIN_WARN:e}: measured marginal is rank-deficient, e = 0 is not proof of separability")
    });
    Ok(SeparabilityReport {
        threshold_p: p_max,
        q_min,
        p_max,
        entanglement_e: 1.0 - p_max,
        measured_party: part.measured().to_vec(),
        oracle_ppt_verdict: None,
        oracle_qmin_sampled: None,
        ppt_scope: None,
        warning,
    })
}

impl SeparabilityReport {
    /// Fills in the PPT and sampled-`q_min` oracles.
    pub fn with_oracles(
        mut self,
        sigma: &DensityMatrix,
        part: &Bipartition,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        self.oracle_ppt_verdict = Some(ppt_check(sigma, part)?);
        self.ppt_scope = Some(ppt_scope(sigma.dims(), part));
        self.oracle_qmin_sampled = Some(q_min_sampled(sigma, part, samples, seed)?);
        Ok(self)
    }
}

/// Upper bound on `e` when a single qudit of an n-qudit state is measured,
/// reached by the maximally entangled state: `1 - 1 / (1 + d^(n-1))`.
pub fn max_single_qudit_entanglement(n: usize, d: usize) -> f64 {
    1.0 - werner_threshold(n, d)
}

/// Orients a split so the party with the smaller dimension is measured; ties
/// go to the party holding the lowest subsystem index.
pub fn default_orientation(dims: &SubsystemDims, part: &Bipartition) -> Bipartition {
    let a = dims.total_of(part.measured());
    let b = dims.total_of(part.unmeasured());
    let a_has_lowest = part.measured().first() < part.unmeasured().first();
    if a < b || (a == b && a_has_lowest) {
        part.clone()
    } else {
        part.swapped()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, random_pure, w_state, werner, PureKet};

    fn product_state() -> DensityMatrix {
        let a = random_pure(2, 1).unwrap();
        let b = random_pure(2, 2).unwrap();
        a.tensor(&b)
            .to_density(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap()
    }

    #[test]
    fn threshold_table() {
        assert_eq!(werner_threshold(2, 2), 1.0 / 3.0);
        assert_eq!(werner_threshold(3, 2), 0.2);
        assert_eq!(werner_threshold(2, 4), 0.2);
        assert_eq!(bipartite_werner_threshold(3), 0.25);
        assert_eq!(bipartite_werner_threshold(5), 1.0 / 6.0);
        for n in 2..=8 {
            assert_eq!(
                werner_threshold(n, 2),
                1.0 / (2f64.powi(n as i32 - 1) + 1.0)
            );
        }
        for big_n in 2..=10 {
            assert_eq!(
                bipartite_werner_threshold(big_n),
                werner_threshold(2, big_n)
            );
        }
    }

    #[test]
    fn q_min_examples() {
        let w = w_state();
        for k in 0..3 {
            let q = q_min_exact(&w, &Bipartition::new(&[k], 3).unwrap()).unwrap();
            assert!((q - 1.0 / 3.0).abs() < 1e-12);
        }
        for &(n, d) in &[(2, 2), (2, 3), (3, 2), (3, 3)] {
            let q = q_min_exact(
                &max_entangled(n, d).unwrap(),
                &Bipartition::new(&[0], n).unwrap(),
            )
            .unwrap();
            assert!((q - 1.0 / d as f64).abs() < 1e-12);
        }
        let q = q_min_exact(&product_state(), &Bipartition::new(&[0], 2).unwrap()).unwrap();
        assert!(q < 1e-10);
    }

    #[test]
    fn mixed_states_are_rejected() {
        let rho = werner(2, 2, 0.5).unwrap();
        let part = Bipartition::new(&[0], 2).unwrap();
        assert!(matches!(
            q_min_exact(&rho, &part),
            Err(Error::Purity { .. })
        ));
        assert!(matches!(
            entanglement_measure(&rho, &part),
            Err(Error::Purity { .. })
        ));
        assert!(matches!(
            q_min_sampled(&rho, &part, 200, 0),
            Err(Error::Purity { .. })
        ));
    }

    #[test]
    fn measure_examples() {
        let w = entanglement_measure(&w_state(), &Bipartition::new(&[0], 3).unwrap()).unwrap();
        assert!((w.p_max - 3.0 / 11.0).abs() < 1e-12);
        assert!((w.entanglement_e - 8.0 / 11.0).abs() < 1e-12);
        assert!(w.warning.is_none());

        let ghz = max_entangled(3, 2).unwrap();
        let g = entanglement_measure(&ghz, &Bipartition::new(&[0], 3).unwrap()).unwrap();
        assert!((g.p_max - 0.2).abs() < 1e-12);
        assert!((g.entanglement_e - 0.8).abs() < 1e-12);

        let p =
            entanglement_measure(&product_state(), &Bipartition::new(&[0], 2).unwrap()).unwrap();
        assert!((p.p_max - 1.0).abs() < 1e-9);
        assert!(p.entanglement_e.abs() < 1e-9);
        assert!(p.warning.is_some());
    }

    #[test]
    fn sampled_q_min_for_target_independent_state() {
        let rho = max_entangled(2, 3).unwrap();
        let q = q_min_sampled(&rho, &Bipartition::new(&[0], 2).unwrap(), 100, 3).unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-10);
        assert!(q_min_sampled(&rho, &Bipartition::new(&[0], 2).unwrap(), 99, 3).is_err());
    }

    #[test]
    fn ppt_on_werner_family() {
        let part = Bipartition::new(&[0], 2).unwrap();
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let verdict = ppt_check(&werner(2, 2, p).unwrap(), &part).unwrap();
            assert_eq!(verdict, p <= 1.0 / 3.0, "p = {p}");
        }
        // the partial transpose of the Werner state has lowest eigenvalue (1 - 3p) / 4
        let ev = ppt_min_eigenvalue(&werner(2, 2, 0.6).unwrap(), &part).unwrap();
        assert!((ev - (1.0 - 1.8) / 4.0).abs() < 1e-12);
        for n in 2..=5 {
            let mixed = DensityMatrix::maximally_mixed(SubsystemDims::new(vec![n, 2]).unwrap());
            assert!(ppt_check(&mixed, &part).unwrap());
        }
    }

    #[test]
    fn ppt_scope_labels() {
        let part = Bipartition::new(&[0], 2).unwrap();
        assert_eq!(
            ppt_scope(&SubsystemDims::new(vec![2, 2]).unwrap(), &part),
            PptScope::Exact
        );
        assert_eq!(
            ppt_scope(&SubsystemDims::new(vec![3, 2]).unwrap(), &part),
            PptScope::Exact
        );
        assert_eq!(
            ppt_scope(&SubsystemDims::new(vec![3, 3]).unwrap(), &part),
            PptScope::NecessaryOnly
        );
        let three = Bipartition::new(&[0], 3).unwrap();
        assert_eq!(
            ppt_scope(&SubsystemDims::new(vec![2, 2, 2]).unwrap(), &three),
            PptScope::NecessaryOnly
        );
    }

    #[test]
    fn ghz_pair_marginal_is_ppt() {
        let pair = max_entangled(3, 2).unwrap().reduce(&[2]).unwrap();
        assert!(ppt_check(&pair, &Bipartition::new(&[0], 2).unwrap()).unwrap());
        // the W state's pair marginal is entangled
        let w_pair = w_state().reduce(&[2]).unwrap();
        assert!(!ppt_check(&w_pair, &Bipartition::new(&[0], 2).unwrap()).unwrap());
    }

    #[test]
    fn absolute_ball_membership() {
        assert!(in_absolute_sep_ball(&werner(2, 2, 1.0 / 3.0).unwrap(), 2, 2).unwrap());
        assert!(!in_absolute_sep_ball(&werner(2, 2, 0.4).unwrap(), 2, 2).unwrap());
        let center = DensityMatrix::maximally_mixed(SubsystemDims::new(vec![2, 2]).unwrap());
        assert!(in_absolute_sep_ball(&center, 2, 2).unwrap());
        assert!(matches!(
            in_absolute_sep_ball(&center, 3, 2),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn report_json_field_names() {
        let sigma = w_state();
        let part = Bipartition::new(&[1], 3).unwrap();
        let report = entanglement_measure(&sigma, &part)
            .unwrap()
            .with_oracles(&sigma, &part, 1000, 0)
            .unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "threshold_p",
            "q_min",
            "p_max",
            "entanglement_e",
            "measured_party",
            "oracle_ppt_verdict",
            "oracle_qmin_sampled",
            "ppt_scope",
        ];
        let mut got = keys.clone();
        got.sort_unstable();
        expected.sort_unstable();
        assert_eq!(got, expected);
        assert_eq!(v["ppt_scope"], "necessary_only");
        assert_eq!(v["oracle_ppt_verdict"], false);
        assert_eq!(v["measured_party"], serde_json::json!([1]));
    }

    #[test]
    fn default_orientation_prefers_small_party() {
        let dims = SubsystemDims::new(vec![2, 3, 2]).unwrap();
        let split = Bipartition::new(&[1, 2], 3).unwrap();
        assert_eq!(default_orientation(&dims, &split).measured(), &[0]);
        let tie = SubsystemDims::new(vec![2, 2]).unwrap();
        let b = Bipartition::new(&[1], 2).unwrap();
        assert_eq!(default_orientation(&tie, &b).measured(), &[0]);
    }

    #[test]
    fn measure_of_pure_product_from_kets() {
        let k = PureKet::basis(3, 1)
            .unwrap()
            .tensor(&PureKet::basis(3, 2).unwrap());
        let rho = k
            .to_density(SubsystemDims::new(vec![3, 3]).unwrap())
            .unwrap();
        let r = entanglement_measure(&rho, &Bipartition::new(&[0], 2).unwrap()).unwrap();
        assert_eq!(r.q_min, 0.0);
        assert_eq!(r.p_max, 1.0);
        assert_eq!(r.entanglement_e, 0.0);
    }
}
