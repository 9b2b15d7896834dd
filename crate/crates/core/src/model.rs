//! Spin-1/2 in a static xz-plane field with dephasing and amplitude damping
//! tied to the field axis.
//!
//! Fields are specified in nanotesla; Hamiltonians come out in rad/s via
//! `H = −γ·1e-9·(B·σ_n + B_c·σ_x)/2`. The ground state of such a Hamiltonian
//! (for γ > 0) is the +1 eigenvector of `σ_n`, with `n` the direction of the
//! total field.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, Ket};

/// Proton gyromagnetic ratio, rad/s/T (CODATA).
pub const PROTON_GYROMAGNETIC_RATIO: f64 = 2.675_221_874_4e8;

const NANOTESLA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub magnitude_nt: f64,
    /// Direction `n = (cos θ, 0, sin θ)`.
    pub theta_deg: f64,
}

impl FieldSpec {
    pub fn new(magnitude_nt: f64, theta_deg: f64) -> Result<Self> {
        let f = Self {
            magnitude_nt,
            theta_deg,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude_nt >= 0.0) || !self.magnitude_nt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "field magnitude must be a finite value ≥ 0 nT, got {}",
                self.magnitude_nt
            )));
        }
        if !(-180.0..=180.0).contains(&self.theta_deg) {
            return Err(Error::InvalidArgument(format!(
                "field angle must lie in [−180°, 180°], got {}",
                self.theta_deg
            )));
        }
        Ok(())
    }

    pub fn direction(&self) -> [f64; 3] {
        axis_from_theta(self.theta_deg)
    }
}

pub fn axis_from_theta(theta_deg: f64) -> [f64; 3] {
    let th = theta_deg.to_radians();
    [th.cos(), 0.0, th.sin()]
}

/// How the noise axis of each hypothesis is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisBinding {
    /// Each hypothesis relaxes along its own total-field direction.
    HamiltonianLocked,
    /// Both hypotheses share this axis regardless of their fields.
    FixedAxis { theta_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Dephasing rate κ₁, 1/s.
    pub kappa1: f64,
    /// Damping rate κ₂, 1/s.
    pub kappa2: f64,
    /// Steady-state ground population p.
    pub p_ground: f64,
    pub axis_binding: AxisBinding,
}

impl NoiseSpec {
    pub fn new(kappa1: f64, kappa2: f64, p_ground: f64, axis_binding: AxisBinding) -> Result<Self> {
        let n = Self {
            kappa1,
            kappa2,
            p_ground,
            axis_binding,
        };
        n.validate()?;
        Ok(n)
    }

    /// Noise specified through relaxation times.
    pub fn from_times(t1: f64, t2: f64, p_ground: f64, axis_binding: AxisBinding) -> Result<Self> {
        let (kappa1, kappa2) = times_to_rates(t1, t2)?;
        Self::new(kappa1, kappa2, p_ground, axis_binding)
    }

    pub fn noiseless() -> Self {
        Self {
            kappa1: 0.0,
            kappa2: 0.0,
            p_ground: 0.5,
            axis_binding: AxisBinding::HamiltonianLocked,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa1 >= 0.0 && self.kappa1.is_finite()) {
            return Err(Error::UnphysicalNoise(format!(
                "dephasing rate κ₁ must be ≥ 0, got {}",
                self.kappa1
            )));
        }
        if !(self.kappa2 >= 0.0 && self.kappa2.is_finite()) {
            return Err(Error::UnphysicalNoise(format!(
                "damping rate κ₂ must be ≥ 0, got {}",
                self.kappa2
            )));
        }
        if !(0.0..=1.0).contains(&self.p_ground) {
            return Err(Error::UnphysicalNoise(format!(
                "ground population p must lie in [0, 1], got {}",
                self.p_ground
            )));
        }
        if let AxisBinding::FixedAxis { theta_deg } = self.axis_binding {
            if !(-180.0..=180.0).contains(&theta_deg) {
                return Err(Error::InvalidArgument(format!(
                    "fixed noise axis angle must lie in [−180°, 180°], got {theta_deg}"
                )));
            }
        }
        Ok(())
    }

    /// `(T1, T2)`, or `None` without damping (T1 infinite).
    pub fn times(&self) -> Option<(f64, f64)> {
        rates_to_times(self.kappa1, self.kappa2).ok()
    }
}

/// `T1 = 1/κ₂`, `T2 = 2/(4κ₁ + κ₂)`.
pub fn rates_to_times(kappa1: f64, kappa2: f64) -> Result<(f64, f64)> {
    if !(kappa2 > 0.0) || !kappa2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "κ₂ must be > 0 to define T1, got {kappa2}"
        )));
    }
    if !(kappa1 >= 0.0) || !kappa1.is_finite() {
        return Err(Error::UnphysicalNoise(format!("κ₁ must be ≥ 0, got {kappa1}")));
    }
    Ok((1.0 / kappa2, 2.0 / (4.0 * kappa1 + kappa2)))
}

/// Inverse of [`rates_to_times`]; requires `0 < T2 ≤ 2·T1`.
pub fn times_to_rates(t1: f64, t2: f64) -> Result<(f64, f64)> {
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(Error::UnphysicalNoise(format!("T1 must be > 0 s, got {t1}")));
    }
    if !(t2 > 0.0) || !t2.is_finite() {
        return Err(Error::UnphysicalNoise(format!("T2 must be > 0 s, got {t2}")));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::UnphysicalNoise(format!(
            "T2 = {t2} s violates T2 ≤ 2·T1 = {} s (would need κ₁ < 0)",
            2.0 * t1
        )));
    }
    let kappa2 = 1.0 / t1;
    let kappa1 = ((2.0 / t2 - kappa2) / 4.0).max(0.0);
    Ok((kappa1, kappa2))
}

/// Total field vector in nT: the tilted field plus a control along x.
pub fn total_field(field: &FieldSpec, control_bc_nt: f64) -> [f64; 3] {
    let n = field.direction();
    [
        field.magnitude_nt * n[0] + control_bc_nt,
        0.0,
        field.magnitude_nt * n[2],
    ]
}

/// `H = −γ·1e-9·(B·(cos θ σ_x + sin θ σ_z) + B_c σ_x)/2` in rad/s.
pub fn build_hamiltonian(field: &FieldSpec, control_bc_nt: f64, gamma: f64) -> Result<ComplexMatrix> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gyromagnetic ratio must be > 0, got {gamma}"
        )));
    }
    if !control_bc_nt.is_finite() {
        return Err(Error::InvalidArgument("control field must be finite".into()));
    }
    field.validate()?;
    let b = total_field(field, control_bc_nt);
    Ok(ComplexMatrix::pauli_dot(b) * (-gamma * NANOTESLA / 2.0))
}

/// Unit vector along the total field.
pub fn effective_axis(field: &FieldSpec, control_bc_nt: f64) -> Result<[f64; 3]> {
    let b = total_field(field, control_bc_nt);
    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateAxis);
    }
    Ok([b[0] / norm, b[1] / norm, b[2] / norm])
}

fn require_unit(axis: &[f64; 3]) -> Result<()> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "axis must have unit length, got |n| = {n}"
        )));
    }
    Ok(())
}

/// Ground (+1 of `σ_n`) and excited (−1 of `σ_n`) states, phase-fixed.
pub fn ground_excited(axis: &[f64; 3]) -> Result<(Ket, Ket)> {
    require_unit(axis)?;
    let es = hermitian_eig(&ComplexMatrix::pauli_dot(*axis))?;
    let g = es.vector(1);
    let e = es.vector(0);
    Ok(([g[0], g[1]], [e[0], e[1]]))
}

/// `[√κ₁ σ_n, √(κ₂p) |g⟩⟨e|, √(κ₂(1−p)) |e⟩⟨g|]`; zero-rate channels stay in
/// the list as zero matrices.
pub fn lindblad_ops(axis: &[f64; 3], noise: &NoiseSpec) -> Result<Vec<ComplexMatrix>> {
    noise.validate()?;
    let (g, e) = ground_excited(axis)?;
    let sigma_n = ComplexMatrix::pauli_dot(*axis);
    let lowering = ComplexMatrix::outer(&g, &e);
    let raising = ComplexMatrix::outer(&e, &g);
    Ok(vec![
        sigma_n * noise.kappa1.sqrt(),
        lowering * (noise.kappa2 * noise.p_ground).sqrt(),
        raising * (noise.kappa2 * (1.0 - noise.p_ground)).sqrt(),
    ])
}

/// One hypothesis: its field, Hamiltonian and the Lindblad set it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub field: FieldSpec,
    pub control_bc_nt: f64,
    pub hamiltonian: ComplexMatrix,
    pub noise_axis: [f64; 3],
    pub lindblad_ops: Vec<ComplexMatrix>,
    pub ground_state: Ket,
    pub excited_state: Ket,
}

impl Hypothesis {
    pub fn build(field: FieldSpec, control_bc_nt: f64, gamma: f64, noise: &NoiseSpec) -> Result<Self> {
        let hamiltonian = build_hamiltonian(&field, control_bc_nt, gamma)?;
        let noise_axis = match noise.axis_binding {
            AxisBinding::FixedAxis { theta_deg } => axis_from_theta(theta_deg),
            AxisBinding::HamiltonianLocked => match effective_axis(&field, control_bc_nt) {
                Ok(axis) => axis,
                // Without noise the axis never enters the dynamics.
                Err(Error::DegenerateAxis) if noise.is_noiseless() => [0.0, 0.0, 1.0],
                Err(e) => return Err(e),
            },
        };
        let lindblad_ops = lindblad_ops(&noise_axis, noise)?;
        let (ground_state, excited_state) = ground_excited(&noise_axis)?;
        Ok(Self {
            field,
            control_bc_nt,
            hamiltonian,
            noise_axis,
            lindblad_ops,
            ground_state,
            excited_state,
        })
    }
}
