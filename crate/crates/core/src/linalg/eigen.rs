//! Hermitian eigendecomposition: closed form for 2×2, cyclic Jacobi for 4×4.

use super::{c, fix_phase, ComplexMatrix, C64, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Eigenvalue gaps below this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

const JACOBI_OFFDIAG_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching unit eigenvectors stored as
/// the columns of `eigenvectors`. Each column is phase-fixed: its first
/// component of modulus above `1e-12` is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [f64; 4],
    pub eigenvectors: ComplexMatrix,
    /// Set when two consecutive eigenvalues are closer than [`DEGENERACY_GAP`];
    /// the eigenvectors of such a pair are then an arbitrary orthonormal basis.
    pub degenerate: bool,
    dim: usize,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues[..self.dim]
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.dim - 1]
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// `V f(Λ) V†`, the spectral calculus.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.values().iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
        .expect("dimension already validated")
    }
}

pub(crate) fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let defect = m.hermiticity_defect();
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    if defect > tol {
        return Err(Error::InvalidArgument(format!(
            "matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian 2×2 or 4×4 matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    require_hermitian(m)?;
    let h = m.hermitian_part();
    match h.dim() {
        2 => Ok(eig2(&h)),
        _ => Ok(jacobi(&h)),
    }
}

/// Pauli decomposition `M = a·I + b·σ`, returned as `(a, [bx, by, bz])`.
pub(crate) fn pauli_components(h: &ComplexMatrix) -> (f64, [f64; 3]) {
    let a = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let bz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let off = 0.5 * (h[(1, 0)] + h[(0, 1)].conj());
    (a, [off.re, off.im, bz])
}

fn eig2(h: &ComplexMatrix) -> EigenSystem {
    let (a, b) = pauli_components(h);
    let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let mut eigenvalues = [0.0; 4];
    eigenvalues[0] = a - r;
    eigenvalues[1] = a + r;

    if 2.0 * r < DEGENERACY_GAP {
        return EigenSystem {
            eigenvalues,
            eigenvectors: ComplexMatrix::identity(2).expect("valid"),
            degenerate: true,
            dim: 2,
        };
    }

    let (nx, ny, nz) = (b[0] / r, b[1] / r, b[2] / r);
    // +1 eigenvector of n·σ, picking the better-conditioned closed form.
    let mut up = if nz >= 0.0 {
        [c(1.0 + nz, 0.0), c(nx, ny)]
    } else {
        [c(nx, -ny), c(1.0 - nz, 0.0)]
    };
    let mut down = if nz <= 0.0 {
        [c(1.0 - nz, 0.0), c(-nx, -ny)]
    } else {
        [c(nx, -ny), c(-(1.0 + nz), 0.0)]
    };
    normalize(&mut up);
    normalize(&mut down);
    fix_phase(&mut up);
    fix_phase(&mut down);

    let eigenvectors = ComplexMatrix::mat2(down[0], up[0], down[1], up[1]);
    EigenSystem {
        eigenvalues,
        eigenvectors,
        degenerate: false,
        dim: 2,
    }
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

fn off_diagonal_max(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

/// Cyclic complex Jacobi. Each rotation first strips the phase of the pivot
/// `a_pq`, then applies the classical real rotation.
fn jacobi(h: &ComplexMatrix) -> EigenSystem {
    let n = h.dim();
    let mut a = *h;
    let mut v = ComplexMatrix::identity(n).expect("valid");
    let scale = h.max_abs().max(1.0);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_max(&a) <= JACOBI_OFFDIAG_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let e = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;

                // U = P·G with P = diag(1, conj(e)) on (p, q), G = [[c, s], [-s, c]].
                let mut u = ComplexMatrix::identity(n).expect("valid");
                u[(p, p)] = c(cs, 0.0);
                u[(p, q)] = c(sn, 0.0);
                u[(q, p)] = -e.conj() * sn;
                u[(q, q)] = e.conj() * cs;

                a = u.adjoint() * a * u;
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                v = v * u;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));

    let mut eigenvalues = [0.0; 4];
    let mut vectors = ComplexMatrix::zeros(n).expect("valid");
    for (k, &idx) in order.iter().enumerate() {
        eigenvalues[k] = a[(idx, idx)].re;
        let mut col: Vec<C64> = (0..n).map(|i| v[(i, idx)]).collect();
        normalize(&mut col);
        fix_phase(&mut col);
        for i in 0..n {
            vectors[(i, k)] = col[i];
        }
    }
    let degenerate = eigenvalues[..n]
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < DEGENERACY_GAP);

    EigenSystem {
        eigenvalues,
        eigenvectors: vectors,
        degenerate,
        dim: n,
    }
}

/// Trace norm `Σ|λ_k|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    require_hermitian(m)?;
    if m.dim() == 2 {
        let (a, b) = pauli_components(&m.hermitian_part());
        let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        return Ok((a + r).abs() + (a - r).abs());
    }
    Ok(hermitian_eig(m)?.values().iter().map(|x| x.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(dim: usize, vals: &[f64]) -> ComplexMatrix {
        let mut k = 0;
        let mut m = ComplexMatrix::zeros(dim).unwrap();
        for i in 0..dim {
            m[(i, i)] = c(vals[k], 0.0);
            k += 1;
            for j in (i + 1)..dim {
                let z = c(vals[k], vals[k + 1]);
                k += 2;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn check_system(m: &ComplexMatrix, es: &EigenSystem) {
        let n = m.dim();
        for k in 0..n {
            let v = es.vector(k);
            let mv = m.mul_vec(&v);
            for i in 0..n {
                assert!((mv[i] - v[i] * es.eigenvalues[k]).norm() < 1e-10);
            }
            let first = v.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
            for l in 0..n {
                let w = es.vector(l);
                let ip: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-10);
            }
        }
        assert!(es.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(es.reconstruct().max_abs_diff(m) < 1e-9);
    }

    #[test]
    fn sigma_x_spectrum() {
        let es = hermitian_eig(&ComplexMatrix::pauli_x()).unwrap();
        assert!((es.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((es.eigenvalues[1] - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = es.vector(0);
        let plus = es.vector(1);
        assert!((minus[0] - c(s, 0.0)).norm() < 1e-14 && (minus[1] + c(s, 0.0)).norm() < 1e-14);
        assert!((plus[0] - c(s, 0.0)).norm() < 1e-14 && (plus[1] - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_is_flagged_degenerate() {
        let es = hermitian_eig(&ComplexMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(es.values(), &[1.0, 1.0]);
        assert!(es.degenerate);
        check_system(&ComplexMatrix::identity(2).unwrap(), &es);
        let es4 = hermitian_eig(&ComplexMatrix::identity(4).unwrap()).unwrap();
        assert!(es4.degenerate);
    }

    #[test]
    fn tilted_axis_matches_closed_form_ground_state() {
        let th = 30f64.to_radians();
        let sn = ComplexMatrix::pauli_dot([th.cos(), 0.0, th.sin()]);
        let es = hermitian_eig(&sn).unwrap();
        assert!((es.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] - 1.0).abs() < 1e-14);
        let norm = 1.0 / (2.0 - 2.0 * th.sin()).sqrt();
        let g = es.vector(1);
        assert!((g[0] - c(norm * th.cos(), 0.0)).norm() < 1e-12);
        assert!((g[1] - c(norm * (1.0 - th.sin()), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::mat2(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(hermitian_eig(&m), Err(Error::InvalidArgument(_))));
        assert!(trace_norm_hermitian(&m).is_err());
    }

    #[test]
    fn trace_norm_examples() {
        let z = ComplexMatrix::pauli_z();
        assert!((trace_norm_hermitian(&z).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(trace_norm_hermitian(&ComplexMatrix::zeros(2).unwrap()).unwrap(), 0.0);
        assert!((trace_norm_hermitian(&(z * 0.5)).unwrap() - 1.0).abs() < 1e-15);
        let d = ComplexMatrix::from_fn(4, |i, j| {
            if i == j {
                c([1.0, -2.0, 0.5, -0.25][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        assert!((trace_norm_hermitian(&d).unwrap() - 3.75).abs() < 1e-14);
    }

    #[test]
    fn jacobi_agrees_with_closed_form_on_2x2() {
        let m = random_hermitian(2, &[0.3, -1.2, 0.7, 0.4]);
        let a = eig2(&m);
        let b = jacobi(&m);
        for k in 0..2 {
            assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-13);
            let (va, vb) = (a.vector(k), b.vector(k));
            for i in 0..2 {
                assert!((va[i] - vb[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction_over_many_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let dim = if trial % 2 == 0 { 2 } else { 4 };
            let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let m = random_hermitian(dim, &vals);
            let es = hermitian_eig(&m).unwrap();
            check_system(&m, &es);
        }
    }

    proptest! {
        #[test]
        fn trace_norm_matches_bloch_identity(a in -3.0f64..3.0, bx in -3.0f64..3.0, by in -3.0f64..3.0, bz in -3.0f64..3.0) {
            let m = ComplexMatrix::identity(2).unwrap() * a + ComplexMatrix::pauli_dot([bx, by, bz]);
            let r = (bx * bx + by * by + bz * bz).sqrt();
            let expected = (a + r).abs() + (a - r).abs();
            prop_assert!((trace_norm_hermitian(&m).unwrap() - expected).abs() < 1e-10);
            prop_assert!((trace_norm_hermitian(&(-m)).unwrap() - expected).abs() < 1e-10);
        }

        #[test]
        fn jacobi_4x4_spectrum_is_consistent(vals in proptest::collection::vec(-10.0f64..10.0, 16)) {
            let m = random_hermitian(4, &vals);
            let es = hermitian_eig(&m).unwrap();
            let tr: f64 = es.values().iter().sum();
            prop_assert!((tr - m.trace().re).abs() < 1e-9);
            prop_assert!(es.reconstruct().max_abs_diff(&m) < 1e-9);
        }
    }
}
