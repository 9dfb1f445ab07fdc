//! Euclidean geometry of density-matrix space under the Hilbert–Schmidt metric.
//!
//! States of order `N` sit inside the `(N^2 - 1)`-ball of radius
//! `sqrt((N - 1) / N)` about `I / N`; pure states lie on its surface. An
//! orthogonal basis of pure states forms a regular simplex inscribed in that
//! ball, and the ratio in which the `(N^2 - 1)`-simplex cuts a radius gives
//! the separability threshold `1 / (N + 1)` for Werner states.

use crate::error::{Error, Result};
use crate::linalg::{hs_distance, ComplexMatrix};
use crate::states::DensityMatrix;

/// Slack allowed on a radial fraction before it is treated as an error.
pub const RADIAL_TOL: f64 = 1e-9;
/// Tolerance for orthogonality and purity of basis inputs.
pub const BASIS_TOL: f64 = 1e-9;

/// Ball radius and simplex division ratio for matrices of order `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexRatios {
    pub order: usize,
    pub ball_radius: f64,
    pub division_ratio: f64,
}

impl SimplexRatios {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            ball_radius: ball_radius(order),
            division_ratio: simplex_division_ratio(order),
        }
    }
}

/// `sqrt((N - 1) / N)`: distance from `I / N` to any pure state of order `N`.
pub fn ball_radius(order: usize) -> f64 {
    assert!(order >= 2, "order must be at least 2");
    let n = order as f64;
    ((n - 1.0) / n).sqrt()
}

/// `1 / (N + 1)`, the least ratio in which the regular `(N^2 - 1)`-simplex
/// inscribed in the ball divides a radius ending at a state.
pub fn simplex_division_ratio(order: usize) -> f64 {
    assert!(order >= 2, "order must be at least 2");
    1.0 / (order as f64 + 1.0)
}

/// Lengths along a radius `Ib` of the `(N^2 - 1)`-ball, from the
/// similar-triangles construction that yields the division ratio.
///
/// `I` is the center, `b` the outer end of the radius (a pure state), `a` the
/// point where the simplex boundary crosses the radius, `c` the foot of the
/// inradius and `d` the foot of the perpendicular from `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusDivision {
    /// `Ib = sqrt((N - 1) / N)`
    pub ib: f64,
    /// `bd = sqrt((N - 2) / (N - 1))`
    pub bd: f64,
    /// `Id = 1 / sqrt(N (N - 1))`
    pub id: f64,
    /// `Ic = Ib / (N^2 - 1)`, the simplex inradius
    pub ic: f64,
    /// `Ia = (N - 1) Ic`
    pub ia: f64,
}

impl RadiusDivision {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2, "order must be at least 2");
        let n = order as f64;
        let ib = ball_radius(order);
        let bd = ((n - 2.0) / (n - 1.0)).sqrt();
        let id = 1.0 / (n * (n - 1.0)).sqrt();
        // circumradius / inradius of a regular k-simplex is k, here k = N^2 - 1
        let ic = ib / (n * n - 1.0);
        // Id / Ib = Ic / Ia
        let ia = ic * ib / id;
        Self { ib, bd, id, ic, ia }
    }

    /// `Ia / Ib`.
    pub fn ratio(&self) -> f64 {
        self.ia / self.ib
    }
}

/// `p` such that `D(rho, I/N) = p * ball_radius(N)`.
pub fn radial_fraction(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.order();
    let distance = hs_distance(rho.matrix(), &ComplexMatrix::maximally_mixed(n))?;
    let p = distance / ball_radius(n);
    if p > 1.0 + RADIAL_TOL {
        return Err(Error::Geometry(format!(
            "radial fraction {p} exceeds 1; input is not a valid state"
        )));
    }
    Ok(p)
}

/// All Kronecker products of two complete orthogonal bases of pure states.
///
/// The products are the vertices of a regular simplex centered at
/// `I / (d_A d_B)` and inscribed in the ball of that order.
pub fn product_basis(
    basis_a: &[DensityMatrix],
    basis_b: &[DensityMatrix],
) -> Result<Vec<DensityMatrix>> {
    check_basis(basis_a, "A")?;
    check_basis(basis_b, "B")?;
    let mut out = Vec::with_capacity(basis_a.len() * basis_b.len());
    for a in basis_a {
        for b in basis_b {
            out.push(a.tensor(b)?);
        }
    }
    Ok(out)
}

fn check_basis(basis: &[DensityMatrix], label: &str) -> Result<()> {
    let first = basis
        .first()
        .ok_or_else(|| Error::Basis(format!("basis {label} is empty")))?;
    let order = first.order();
    if basis.len() != order {
        return Err(Error::Basis(format!(
            "basis {label} has {} elements, expected {order}",
            basis.len()
        )));
    }
    for (i, s) in basis.iter().enumerate() {
        if s.dims() != first.dims() {
            return Err(Error::Basis(format!(
                "basis {label} mixes tensor structures"
            )));
        }
        if !s.is_pure() {
            return Err(Error::Basis(format!(
                "element {i} of basis {label} is mixed (purity {})",
                s.purity()
            )));
        }
        for (j, t) in basis.iter().enumerate().skip(i + 1) {
            let overlap = s.matrix().hs_inner(t.matrix())?.norm();
            if overlap > BASIS_TOL {
                return Err(Error::Basis(format!(
                    "elements {i} and {j} of basis {label} overlap by {overlap:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Numbers that characterize how close a set of states is to a regular
/// simplex centered at the maximally mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexDiagnostics {
    /// Largest pairwise `|Tr(a b)|`.
    pub max_overlap: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    /// `||centroid - I / N||`.
    pub centroid_residual: f64,
    /// Largest deviation of a vertex's distance to `I / N` from the ball radius.
    pub radius_residual: f64,
}

impl SimplexDiagnostics {
    pub fn edge_spread(&self) -> f64 {
        self.max_edge - self.min_edge
    }
}

pub fn simplex_diagnostics(vertices: &[DensityMatrix]) -> Result<SimplexDiagnostics> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::Basis("no vertices".into()))?;
    let n = first.order();
    let center = ComplexMatrix::maximally_mixed(n);
    let radius = ball_radius(n);
    let mut diag = SimplexDiagnostics {
        max_overlap: 0.0,
        min_edge: f64::INFINITY,
        max_edge: 0.0,
        centroid_residual: 0.0,
        radius_residual: 0.0,
    };
    let mut centroid = ComplexMatrix::zeros(n);
    for (i, v) in vertices.iter().enumerate() {
        centroid = centroid.try_add(&v.matrix().scale(1.0 / vertices.len() as f64))?;
        let r = hs_distance(v.matrix(), &center)?;
        diag.radius_residual = diag.radius_residual.max((r - radius).abs());
        for w in &vertices[i + 1..] {
            diag.max_overlap = diag
                .max_overlap
                .max(v.matrix().hs_inner(w.matrix())?.norm());
            let e = hs_distance(v.matrix(), w.matrix())?;
            diag.min_edge = diag.min_edge.min(e);
            diag.max_edge = diag.max_edge.max(e);
        }
    }
    diag.centroid_residual = hs_distance(&centroid, &center)?;
    Ok(diag)
}

/// Radius about `I / d^n` inside which every n-qudit state is separable:
/// `sqrt((d^n - 1) / d^n) / (1 + d^(n-1))`.
pub fn absolute_sep_radius(n: usize, d: usize) -> f64 {
    assert!(n >= 1 && d >= 2, "need n >= 1 and d >= 2");
    let big = (d as f64).powi(n as i32);
    let rest = (d as f64).powi(n as i32 - 1);
    ((big - 1.0) / big).sqrt() / (1.0 + rest)
}
