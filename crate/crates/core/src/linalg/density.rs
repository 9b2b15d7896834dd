use super::eigen::pauli_components;
use super::{c, ComplexMatrix, Ket};
use crate::error::{Error, Result};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-9;
/// Propagated states may dip this far below zero before the step is treated
/// as a numerical failure.
pub(crate) const PROPAGATION_POSITIVITY_TOL: f64 = 1e-7;

/// A qubit density matrix together with its invariant diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

fn min_eigenvalue_2x2(m: &ComplexMatrix) -> f64 {
    let (a, b) = pauli_components(&m.hermitian_part());
    a - (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-9) and positivity (−1e-9).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::diagnose(matrix)?;
        if rho.hermiticity_defect > HERMITICITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix not Hermitian (defect {:.3e})",
                rho.hermiticity_defect
            )));
        }
        if rho.trace_defect > TRACE_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace off by {:.3e}",
                rho.trace_defect
            )));
        }
        if rho.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix not positive (min eigenvalue {:.3e})",
                rho.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    fn diagnose(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::InvalidArgument("density matrices are 2×2".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidArgument("density matrix has non-finite entries".into()));
        }
        Ok(Self {
            matrix,
            hermiticity_defect: matrix.hermiticity_defect(),
            trace_defect: (matrix.trace() - c(1.0, 0.0)).norm(),
            min_eigenvalue: min_eigenvalue_2x2(&matrix),
        })
    }

    /// Wraps the output of a propagation step at time `t`. Fails when
    /// positivity is violated beyond `1e-7` or the trace/Hermiticity drifted.
    pub(crate) fn from_propagated(matrix: ComplexMatrix, t: f64) -> Result<Self> {
        let rho = Self::diagnose(matrix).map_err(|e| Error::Numerical(format!("at t = {t} s: {e}")))?;
        if rho.min_eigenvalue < -PROPAGATION_POSITIVITY_TOL {
            return Err(Error::Positivity {
                t,
                min_eigenvalue: rho.min_eigenvalue,
            });
        }
        if rho.hermiticity_defect > HERMITICITY_TOL || rho.trace_defect > TRACE_TOL {
            return Err(Error::Numerical(format!(
                "at t = {t} s: hermiticity defect {:.3e}, trace defect {:.3e}",
                rho.hermiticity_defect, rho.trace_defect
            )));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) nonzero ket.
    pub fn pure(psi: &Ket) -> Result<Self> {
        let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot build a state from a zero ket".into()));
        }
        let u = [psi[0] / n, psi[1] / n];
        Self::new(ComplexMatrix::outer(&u, &u))
    }

    /// `(I + r·σ)/2`, requiring `‖r‖ ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let m = (ComplexMatrix::identity(2)? + ComplexMatrix::pauli_dot(r)) * 0.5;
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self::new(ComplexMatrix::identity(2).expect("valid") * 0.5).expect("valid state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn bloch(&self) -> [f64; 3] {
        bloch_vector(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }
}

/// Bloch coordinates `r_k = Tr(ρ σ_k)`.
pub fn bloch_vector(rho: &ComplexMatrix) -> [f64; 3] {
    let (_, b) = pauli_components(rho);
    [2.0 * b[0], 2.0 * b[1], 2.0 * b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_round_trip() {
        let r = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let back = rho.bloch();
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-15);
        }
        assert!(rho.min_eigenvalue > 0.0);
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(DensityMatrix::from_bloch([0.0, 0.0, 1.5]).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(2).unwrap()).is_err());
        let skew = ComplexMatrix::mat2(c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        assert!(DensityMatrix::new(skew).is_err());
        assert!(DensityMatrix::pure(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let rho = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((rho.bloch()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn propagated_positivity_breach_is_numerical_failure() {
        let bad = ComplexMatrix::mat2(c(1.0 + 1e-6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-6, 0.0));
        assert!(matches!(
            DensityMatrix::from_propagated(bad, 2.0),
            Err(Error::Positivity { .. })
        ));
        let slight = ComplexMatrix::mat2(c(1.0 + 1e-8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-8, 0.0));
        assert!(DensityMatrix::from_propagated(slight, 2.0).is_ok());
    }
}
