//! Feasible sets with counted Euclidean (Frobenius) projections.

use crate::linalg::{LinalgError, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// Symmetric positive semidefinite matrices.
    PsdCone {
        dim: usize,
    },
    /// PSD cone intersected with the Frobenius ball of the given radius.
    PsdConeCapped {
        dim: usize,
        radius: f64,
    },
    FrobBall {
        dim: usize,
        radius: f64,
    },
    Unconstrained {
        dim: usize,
    },
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match *self {
            DomainKind::PsdCone { dim }
            | DomainKind::PsdConeCapped { dim, .. }
            | DomainKind::FrobBall { dim, .. }
            | DomainKind::Unconstrained { dim } => dim,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            DomainKind::PsdConeCapped { radius, .. } | DomainKind::FrobBall { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

/// A feasible set `D` together with a counter of how many times `Π_D` was applied.
///
/// A `Domain` belongs to a single run; the counter is its only mutable state.
#[derive(Debug, Clone)]
pub struct Domain {
    kind: DomainKind,
    projection_count: u64,
}

impl Domain {
    pub fn new(kind: DomainKind) -> Self {
        if let Some(r) = kind.radius() {
            assert!(r > 0.0 && r.is_finite(), "domain radius must be positive and finite");
        }
        assert!(kind.dim() > 0, "domain dimension must be positive");
        Domain { kind, projection_count: 0 }
    }

    pub fn psd_cone(dim: usize) -> Self {
        Self::new(DomainKind::PsdCone { dim })
    }

    pub fn psd_cone_capped(dim: usize, radius: f64) -> Self {
        Self::new(DomainKind::PsdConeCapped { dim, radius })
    }

    pub fn frob_ball(dim: usize, radius: f64) -> Self {
        Self::new(DomainKind::FrobBall { dim, radius })
    }

    pub fn unconstrained(dim: usize) -> Self {
        Self::new(DomainKind::Unconstrained { dim })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn projection_count(&self) -> u64 {
        self.projection_count
    }

    /// Nearest point of the domain in Frobenius norm. Counts one projection.
    pub fn project(&mut self, x: &SymMatrix) -> Result<SymMatrix, LinalgError> {
        if x.dim() != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), actual: x.dim() });
        }
        self.projection_count += 1;
        match self.kind {
            DomainKind::PsdCone { .. } => clamp_psd(x),
            DomainKind::PsdConeCapped { radius, .. } => Ok(shrink_to_ball(clamp_psd(x)?, radius)),
            DomainKind::FrobBall { radius, .. } => Ok(shrink_to_ball(x.clone(), radius)),
            DomainKind::Unconstrained { .. } => Ok(x.clone()),
        }
    }

    /// Whether `x` lies within `tol` of the domain (eigenvalue and norm slack).
    pub fn contains(&self, x: &SymMatrix, tol: f64) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        let psd_ok = || x.sym_eig().map(|e| e.min_eigenvalue() >= -tol).unwrap_or(false);
        let ball_ok = |r: f64| x.frob_norm() <= r + tol;
        match self.kind {
            DomainKind::PsdCone { .. } => psd_ok(),
            DomainKind::PsdConeCapped { radius, .. } => ball_ok(radius) && psd_ok(),
            DomainKind::FrobBall { radius, .. } => ball_ok(radius),
            DomainKind::Unconstrained { .. } => true,
        }
    }
}

/// Clamps negative eigenvalues to zero. PSD inputs are returned unchanged.
fn clamp_psd(x: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    let eig = x.sym_eig()?;
    if eig.min_eigenvalue() >= 0.0 {
        return Ok(x.clone());
    }
    Ok(eig.reconstruct_mapped(|l| if l < 0.0 { 0.0 } else { l }))
}

fn shrink_to_ball(mut x: SymMatrix, radius: f64) -> SymMatrix {
    let norm = x.frob_norm();
    if norm > radius {
        x.scale_mut(radius / norm);
    }
    x
}
