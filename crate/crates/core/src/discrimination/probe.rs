use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, ComplexMatrix, DensityMatrix, Ket, DEGENERACY_GAP};
use std::f64::consts::FRAC_1_SQRT_2;

/// Initial state prepared before the field is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeSpec {
    /// `|0⟩`, the +1 eigenstate of `σ_z`.
    Ket0,
    /// `|+⟩ = (|0⟩ + |1⟩)/√2`.
    AlongX,
    /// `(|λmax⟩ + |λmin⟩)/√2` from the eigenvectors of `H1 − H0`.
    OptimalSuperposition,
    /// Pure state with Bloch vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    Bloch { theta_deg: f64, phi_deg: f64 },
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        if let ProbeSpec::Bloch { theta_deg, phi_deg } = *self {
            if !theta_deg.is_finite() || !phi_deg.is_finite() {
                return Err(Error::InvalidArgument("Bloch probe angles must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Eigen-data of `H1 − H0` used by the optimal probe and the condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceBasis {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub ket_max: Ket,
    pub ket_min: Ket,
}

impl DifferenceBasis {
    pub fn gap(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }

    pub fn optimal_probe(&self) -> Ket {
        [
            (self.ket_max[0] + self.ket_min[0]) * FRAC_1_SQRT_2,
            (self.ket_max[1] + self.ket_min[1]) * FRAC_1_SQRT_2,
        ]
    }
}

/// Phase-fixed extreme eigenvectors of `H1 − H0`; fails when the spectrum
/// is degenerate (gap below `1e-12` rad/s).
pub fn difference_basis(h0: &ComplexMatrix, h1: &ComplexMatrix) -> Result<DifferenceBasis> {
    let es = hermitian_eig(&(*h1 - *h0))?;
    let gap = es.lambda_max() - es.lambda_min();
    if gap < DEGENERACY_GAP {
        return Err(Error::DegenerateHypotheses { gap });
    }
    let vmax = es.vector(1);
    let vmin = es.vector(0);
    Ok(DifferenceBasis {
        lambda_max: es.lambda_max(),
        lambda_min: es.lambda_min(),
        ket_max: [vmax[0], vmax[1]],
        ket_min: [vmin[0], vmin[1]],
    })
}

pub fn probe_ket(spec: &ProbeSpec, h0: &ComplexMatrix, h1: &ComplexMatrix) -> Result<Ket> {
    spec.validate()?;
    Ok(match *spec {
        ProbeSpec::Ket0 => [c(1.0, 0.0), c(0.0, 0.0)],
        ProbeSpec::AlongX => [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
        ProbeSpec::OptimalSuperposition => difference_basis(h0, h1)?.optimal_probe(),
        ProbeSpec::Bloch { theta_deg, phi_deg } => {
            let half = theta_deg.to_radians() / 2.0;
            [c(half.cos(), 0.0), c(0.0, phi_deg.to_radians()).exp() * half.sin()]
        }
    })
}

pub fn probe_state(spec: &ProbeSpec, h0: &ComplexMatrix, h1: &ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::pure(&probe_ket(spec, h0, h1)?)
}
