//! Time evolution of qubit density matrices under a Lindblad generator.
//!
//! Density matrices are column-stacked, `vec(ρ) = [ρ00, ρ10, ρ01, ρ11]`, so
//! that `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`. The default method exponentiates the
//! 4×4 Liouvillian exactly; a fixed-step RK4 integrator is kept as an
//! independent cross-check.

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, c, commutator, expm, hermitian_eig, unitary_2x2, unvectorize, vectorize, ComplexMatrix,
    DensityMatrix, C64,
};

const RK4_STABILITY: f64 = 0.05;
const RATE_FLOOR: f64 = 1e-6;

/// Superoperator acting on column-stacked density matrices, units 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian {
    pub matrix: ComplexMatrix,
}

impl Liouvillian {
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.matrix.mul_vec(&vectorize(rho)))
    }

    /// `exp(L·t)` as a 4×4 superoperator.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        expm(&(self.matrix * t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SuperopExact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationSettings {
    pub method: Method,
    /// Largest RK4 step, s.
    pub dt_max: f64,
    /// Run RK4 at `h` and `h/2` and return the Richardson extrapolation.
    pub richardson_check: bool,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self {
            method: Method::SuperopExact,
            dt_max: 0.01,
            richardson_check: false,
        }
    }
}

impl PropagationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0) || !self.dt_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dt_max must be > 0, got {}",
                self.dt_max
            )));
        }
        Ok(())
    }
}

fn check_operators(h: &ComplexMatrix, ls: &[ComplexMatrix]) -> Result<()> {
    if h.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian must be 2×2, got {}×{}",
            h.dim(),
            h.dim()
        )));
    }
    if let Some((k, l)) = ls.iter().enumerate().find(|(_, l)| l.dim() != 2) {
        return Err(Error::InvalidArgument(format!(
            "Lindblad operator {k} must be 2×2, got {}×{}",
            l.dim(),
            l.dim()
        )));
    }
    Ok(())
}

fn rhs_matrix(rho: &ComplexMatrix, h: &ComplexMatrix, ls: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut out = commutator(h, rho)? * c(0.0, -1.0);
    for l in ls {
        let ld = l.adjoint();
        out += *l * *rho * ld - anticommutator(&(ld * *l), rho)? * 0.5;
    }
    Ok(out)
}

/// `−i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &ComplexMatrix, ls: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    check_operators(h, ls)?;
    rhs_matrix(rho.matrix(), h, ls)
}

/// Liouvillian in the column-stacking convention:
/// `−i(I⊗H − Hᵀ⊗I) + Σ_k (L̄_k⊗L_k − ½ I⊗L_k†L_k − ½ (L_k†L_k)ᵀ⊗I)`.
pub fn build_liouvillian(h: &ComplexMatrix, ls: &[ComplexMatrix]) -> Result<Liouvillian> {
    check_operators(h, ls)?;
    let id = ComplexMatrix::identity(2)?;
    let mut m = (ComplexMatrix::kron(&id, h)? - ComplexMatrix::kron(&h.transpose(), &id)?) * c(0.0, -1.0);
    for l in ls {
        let ldl = l.adjoint() * *l;
        m += ComplexMatrix::kron(&l.conj(), l)?
            - ComplexMatrix::kron(&id, &ldl)? * 0.5
            - ComplexMatrix::kron(&ldl.transpose(), &id)? * 0.5;
    }
    Ok(Liouvillian { matrix: m })
}

/// Rate scale used to bound the RK4 step: the spread of `H` plus
/// `4·Σ‖L_k‖²`, floored at `1e-6`.
pub fn rate_scale(h: &ComplexMatrix, ls: &[ComplexMatrix]) -> Result<f64> {
    check_operators(h, ls)?;
    let es = hermitian_eig(h)?;
    let mut lambda = es.lambda_max() - es.lambda_min();
    for l in ls {
        let es = hermitian_eig(&(l.adjoint() * *l))?;
        lambda += 4.0 * es.lambda_max().max(0.0);
    }
    Ok(lambda.max(RATE_FLOOR))
}

fn rk4_step(l: &ComplexMatrix, y: &[C64], h: f64) -> Vec<C64> {
    let axpy = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let k1 = l.mul_vec(y);
    let k2 = l.mul_vec(&axpy(y, &k1, h / 2.0));
    let k3 = l.mul_vec(&axpy(y, &k2, h / 2.0));
    let k4 = l.mul_vec(&axpy(y, &k3, h));
    (0..y.len())
        .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

fn rk4_integrate(l: &ComplexMatrix, y0: &[C64], t: f64, h_max: f64) -> Vec<C64> {
    if t == 0.0 {
        return y0.to_vec();
    }
    let steps = (t / h_max).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut y = y0.to_vec();
    for _ in 0..steps {
        y = rk4_step(l, &y, h);
    }
    y
}

struct Rk4Plan {
    liouvillian: ComplexMatrix,
    h_max: f64,
    richardson: bool,
}

impl Rk4Plan {
    fn new(h: &ComplexMatrix, ls: &[ComplexMatrix], settings: &PropagationSettings) -> Result<Self> {
        let lambda = rate_scale(h, ls)?;
        Ok(Self {
            liouvillian: build_liouvillian(h, ls)?.matrix,
            h_max: settings.dt_max.min(RK4_STABILITY / lambda),
            richardson: settings.richardson_check,
        })
    }

    fn advance(&self, y: &[C64], dt: f64) -> Vec<C64> {
        let coarse = rk4_integrate(&self.liouvillian, y, dt, self.h_max);
        if !self.richardson {
            return coarse;
        }
        let fine = rk4_integrate(&self.liouvillian, y, dt, self.h_max / 2.0);
        fine.iter().zip(&coarse).map(|(f, c)| (f * 16.0 - c) / 15.0).collect()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and ≥ 0, got {t}")));
    }
    Ok(())
}

/// State at time `t` starting from `rho0`.
pub fn evolve(
    rho0: &DensityMatrix,
    h: &ComplexMatrix,
    ls: &[ComplexMatrix],
    t: f64,
    settings: &PropagationSettings,
) -> Result<DensityMatrix> {
    Ok(evolve_grid(rho0, h, ls, &[t], settings)?.remove(0))
}

/// States on a nondecreasing grid of times. The exact method exponentiates
/// the generator independently for every time; RK4 steps from one grid point
/// to the next.
pub fn evolve_grid(
    rho0: &DensityMatrix,
    h: &ComplexMatrix,
    ls: &[ComplexMatrix],
    times: &[f64],
    settings: &PropagationSettings,
) -> Result<Vec<DensityMatrix>> {
    settings.validate()?;
    check_operators(h, ls)?;
    for (i, &t) in times.iter().enumerate() {
        check_time(t)?;
        if i > 0 && t < times[i - 1] {
            return Err(Error::InvalidArgument("time grid must be nondecreasing".into()));
        }
    }
    let y0 = vectorize(rho0.matrix());
    let mut out = Vec::with_capacity(times.len());
    match settings.method {
        Method::SuperopExact => {
            let l = build_liouvillian(h, ls)?;
            for &t in times {
                if t == 0.0 {
                    out.push(*rho0);
                    continue;
                }
                let y = l.propagator(t)?.mul_vec(&y0);
                out.push(DensityMatrix::from_propagated(unvectorize(&y), t)?);
            }
        }
        Method::Rk4 => {
            let plan = Rk4Plan::new(h, ls, settings)?;
            let mut y = y0.to_vec();
            let mut prev = 0.0;
            for &t in times {
                y = plan.advance(&y, t - prev);
                prev = t;
                out.push(DensityMatrix::from_propagated(unvectorize(&y), t)?);
            }
        }
    }
    Ok(out)
}

/// Difference between RK4 at step `h` and `h/2` divided by 15, the standard
/// estimate of the error left in the finer solution.
pub fn rk4_error_estimate(
    rho0: &DensityMatrix,
    h: &ComplexMatrix,
    ls: &[ComplexMatrix],
    t: f64,
    settings: &PropagationSettings,
) -> Result<f64> {
    settings.validate()?;
    check_time(t)?;
    let plan = Rk4Plan::new(h, ls, settings)?;
    let y0 = vectorize(rho0.matrix());
    let coarse = rk4_integrate(&plan.liouvillian, &y0, t, plan.h_max);
    let fine = rk4_integrate(&plan.liouvillian, &y0, t, plan.h_max / 2.0);
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / 15.0)
}

/// `U ρ0 U†` with `U = exp(−iHt)`.
pub fn evolve_unitary(rho0: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let u = unitary_2x2(h, t)?;
    DensityMatrix::from_propagated(u * *rho0.matrix() * u.adjoint(), t)
}

/// Closed-form Bloch vector for `H = ω σ_z/2` with noise locked to z:
/// `r_x + i r_y = (r0_x + i r0_y)·e^{(iω − 1/T2)t}` and
/// `r_z = r_eq + (r0_z − r_eq)·e^{−t/T1}` with `r_eq = 2p − 1`.
/// A physical field `B` along +z corresponds to `ω = −γB`.
pub fn bloch_oracle_zfield(r0: [f64; 3], omega: f64, t1: f64, t2: f64, p_ground: f64, t: f64) -> Result<[f64; 3]> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::InvalidArgument(format!("T1 and T2 must be > 0, got {t1}, {t2}")));
    }
    let transverse = c(r0[0], r0[1]) * c(-t / t2, omega * t).exp();
    let r_eq = 2.0 * p_ground - 1.0;
    Ok([transverse.re, transverse.im, r_eq + (r0[2] - r_eq) * (-t / t1).exp()])
}
