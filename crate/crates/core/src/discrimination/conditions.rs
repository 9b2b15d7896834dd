use super::probe::difference_basis;
use crate::error::Result;
use crate::linalg::{ComplexMatrix, DensityMatrix, Ket, C64};
use crate::propagator::lindblad_rhs;
use crate::scenario::Scenario;

/// Inequalities count as satisfied only beyond this margin.
pub const CONDITION_SLACK: f64 = 1e-12;
/// Gaps of `H1 − H0` below this (rad/s) are flagged as ill-conditioned.
const NEAR_DEGENERATE_GAP: f64 = 1e-9;

/// Matrix elements of `N1 − N0` in the extreme eigenbasis of `H1 − H0` and
/// the two sufficient conditions for an early noisy advantage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `⟨λmax|N1 − N0|λmax⟩`, 1/s.
    pub x1: f64,
    /// `Re ⟨λmax|N1 − N0|λmin⟩`, 1/s.
    pub y1: f64,
    /// `Im ⟨λmax|N1 − N0|λmin⟩`, 1/s.
    pub z1: f64,
    /// `⟨λmin|N1 − N0|λmin⟩`, 1/s.
    pub w1: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `|x1 + w1| > λmax − λmin`.
    pub cond1: bool,
    /// `(w1 − x1)² + 4y1² + 4z1² > 4 z1 (λmax − λmin)`.
    pub cond2: bool,
    /// The gap of `H1 − H0` is below `1e-9` rad/s, so the eigenvectors and
    /// therefore `y1`, `z1` are poorly determined.
    pub degenerate: bool,
    /// At least one inequality is within the slack of equality.
    pub near_boundary: bool,
}

/// `N = Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})` for `ρ = |ψ⟩⟨ψ|`.
pub fn dissipator_on(psi: &Ket, ls: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let rho = DensityMatrix::pure(psi)?;
    lindblad_rhs(&rho, &ComplexMatrix::zeros(2)?, ls)
}

fn element(m: &ComplexMatrix, bra: &Ket, ket: &Ket) -> C64 {
    let mk = m.mul_vec(ket);
    bra[0].conj() * mk[0] + bra[1].conj() * mk[1]
}

/// Evaluates both conditions with the optimal probe
/// `(|λmax⟩ + |λmin⟩)/√2`, whatever probe the scenario names.
pub fn check_conditions(scenario: &Scenario) -> Result<ConditionReport> {
    let (hyp0, hyp1) = scenario.hypotheses()?;
    let basis = difference_basis(&hyp0.hamiltonian, &hyp1.hamiltonian)?;
    let psi = basis.optimal_probe();
    let dn = dissipator_on(&psi, &hyp1.lindblad_ops)? - dissipator_on(&psi, &hyp0.lindblad_ops)?;

    let x1 = element(&dn, &basis.ket_max, &basis.ket_max).re;
    let w1 = element(&dn, &basis.ket_min, &basis.ket_min).re;
    let off = element(&dn, &basis.ket_max, &basis.ket_min);
    let (y1, z1) = (off.re, off.im);
    let gap = basis.gap();

    let margin1 = (x1 + w1).abs() - gap;
    let margin2 = (w1 - x1).powi(2) + 4.0 * y1 * y1 + 4.0 * z1 * z1 - 4.0 * z1 * gap;
    Ok(ConditionReport {
        x1,
        y1,
        z1,
        w1,
        lambda_max: basis.lambda_max,
        lambda_min: basis.lambda_min,
        cond1: margin1 > CONDITION_SLACK,
        cond2: margin2 > CONDITION_SLACK,
        degenerate: gap < NEAR_DEGENERATE_GAP,
        near_boundary: margin1.abs() <= CONDITION_SLACK || margin2.abs() <= CONDITION_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::{success_probability, ProbeSpec};
    use crate::error::Error;
    use crate::linalg::trace_norm_hermitian;
    use crate::model::{AxisBinding, FieldSpec, NoiseSpec};
    use crate::propagator::{evolve, PropagationSettings};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig3(t2: f64) -> Scenario {
        let mut s = Scenario::new(FieldSpec::new(1.86, 75.0).unwrap(), FieldSpec::new(1.86, 30.0).unwrap());
        s.noise = NoiseSpec::from_times(5.5, t2, 0.5, AxisBinding::HamiltonianLocked).unwrap();
        s
    }

    #[test]
    fn noiseless_gives_zero_elements() {
        let mut s = fig3(1.0);
        s.noise = NoiseSpec::noiseless();
        let r = check_conditions(&s).unwrap();
        assert_eq!((r.x1, r.y1, r.z1, r.w1), (0.0, 0.0, 0.0, 0.0));
        assert!(!r.cond1 && !r.cond2);
        assert!(r.near_boundary);
    }

    #[test]
    fn fig3_anisotropic_noise_satisfies_second_condition() {
        let r = check_conditions(&fig3(0.6)).unwrap();
        assert!(r.cond2);
        assert!(!r.cond1);
        assert!((r.lambda_max - r.lambda_min) > 0.0);
    }

    #[test]
    fn isotropic_noise_satisfies_neither() {
        let r = check_conditions(&fig3(5.5)).unwrap();
        assert!(!r.cond1 && !r.cond2, "{r:?}");
    }

    #[test]
    fn first_condition_is_void_for_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut s = fig3(1.0);
            s.field0 = FieldSpec::new(rng.gen_range(0.5..3.0), rng.gen_range(-90.0..90.0)).unwrap();
            s.noise.p_ground = rng.gen_range(0.0..1.0);
            let r = check_conditions(&s).unwrap();
            assert!((r.x1 + r.w1).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_pair_is_an_error() {
        let mut s = fig3(1.0);
        s.field1 = s.field0;
        assert!(matches!(check_conditions(&s), Err(Error::DegenerateHypotheses { .. })));
    }

    /// The second condition is the statement that the initial growth rate of
    /// the noisy trace norm beats the unitary rate λmax − λmin.
    #[test]
    fn second_condition_matches_initial_growth_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let settings = PropagationSettings::default();
        for _ in 0..40 {
            let mut s = fig3(1.0);
            s.field0 = FieldSpec::new(rng.gen_range(0.5..3.0), rng.gen_range(-90.0..90.0)).unwrap();
            s.field1 = FieldSpec::new(rng.gen_range(0.5..3.0), rng.gen_range(-90.0..90.0)).unwrap();
            let t1 = rng.gen_range(1.0..10.0);
            let t2 = t1 / rng.gen_range(0.6..30.0);
            s.noise = NoiseSpec::from_times(t1, t2, rng.gen_range(0.0..1.0), AxisBinding::HamiltonianLocked).unwrap();
            s.probe = ProbeSpec::OptimalSuperposition;
            let r = check_conditions(&s).unwrap();
            let (h0, h1) = s.hypotheses().unwrap();
            let probe = crate::discrimination::probe_state(&s.probe, &h0.hamiltonian, &h1.hamiltonian).unwrap();
            // Exact initial derivative of ‖ρ1 − ρ0‖_tr: trace norm of the rhs difference.
            let d0 = crate::propagator::lindblad_rhs(&probe, &h0.hamiltonian, &h0.lindblad_ops).unwrap();
            let d1 = crate::propagator::lindblad_rhs(&probe, &h1.hamiltonian, &h1.lindblad_ops).unwrap();
            let rate = trace_norm_hermitian(&(d1 - d0)).unwrap();
            let gap = r.lambda_max - r.lambda_min;
            assert_eq!(rate > gap, r.cond2, "rate {rate} gap {gap}");
            // Cross-check the rate against a short propagation.
            let h = 1e-6;
            let a = evolve(&probe, &h0.hamiltonian, &h0.lindblad_ops, h, &settings).unwrap();
            let b = evolve(&probe, &h1.hamiltonian, &h1.lindblad_ops, h, &settings).unwrap();
            let p = success_probability(&a, &b, 0.5, 0.5).unwrap();
            assert!(((p - 0.5) * 4.0 / h - rate).abs() < 1e-4 * rate.max(1.0));
        }
    }
}
