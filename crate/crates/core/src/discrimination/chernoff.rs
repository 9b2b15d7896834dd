use crate::error::Result;
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, EigenSystem};

const GRID_STEPS: usize = 100;
const SEARCH_TOL: f64 = 1e-6;
/// `Q*` below this is reported with an infinite exponent.
pub const CHERNOFF_ZERO: f64 = 1e-15;
/// Eigenvalues in `[−1e-9, 0)` are treated as exact zeros for matrix powers.
const CLIP_TOL: f64 = 1e-9;
/// Positive eigenvalues at or below this are rounding residue of a zero
/// eigenvalue (unit-trace states are resolved to about 1e-16), so they are
/// zeroed too. Left alone, `x^s` would lift `Q(s)` by `O(√x)` mid-interval.
const ROUNDOFF_ZERO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffResult {
    pub s_star: f64,
    /// `min_s Tr(ρ0^s ρ1^{1−s})`.
    pub q_star: f64,
    /// `−ln Q*`, or `+∞` when `Q* < 1e-15`.
    pub exponent: f64,
    /// Coarse scan `s = 0, 0.01, …, 1` used to seed the search.
    pub grid_s: Vec<f64>,
    pub grid_q: Vec<f64>,
}

impl ChernoffResult {
    pub fn grid_min(&self) -> f64 {
        self.grid_q.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `x^p` on the spectrum with `0^0 := 0`, so `ρ^0` is the support projector.
fn power(es: &EigenSystem, p: f64) -> ComplexMatrix {
    es.map_spectrum(|x| {
        let x = if (-CLIP_TOL..=ROUNDOFF_ZERO).contains(&x) {
            0.0
        } else {
            x
        };
        if x <= 0.0 {
            0.0
        } else {
            x.powf(p)
        }
    })
}

struct ChernoffFunction {
    e0: EigenSystem,
    e1: EigenSystem,
}

impl ChernoffFunction {
    fn q(&self, s: f64) -> f64 {
        (power(&self.e0, s) * power(&self.e1, 1.0 - s)).trace().re
    }
}

/// Minimises `f` on `[a, b]` by golden-section search until the bracket is
/// narrower than `tol`; returns `(x, f(x))`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Quantum Chernoff quantity `min_{s∈[0,1]} Tr(ρ0^s ρ1^{1−s})`: a 101-point
/// scan locates the bracket, then golden-section search refines `s` to 1e-6.
pub fn chernoff(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<ChernoffResult> {
    let f = ChernoffFunction {
        e0: hermitian_eig(rho0.matrix())?,
        e1: hermitian_eig(rho1.matrix())?,
    };
    let grid_s: Vec<f64> = (0..=GRID_STEPS).map(|k| k as f64 / GRID_STEPS as f64).collect();
    let grid_q: Vec<f64> = grid_s.iter().map(|&s| f.q(s)).collect();
    let best = grid_q
        .iter()
        .enumerate()
        .fold(0, |bi, (i, &q)| if q < grid_q[bi] { i } else { bi });

    let lo = grid_s[best.saturating_sub(1)];
    let hi = grid_s[(best + 1).min(GRID_STEPS)];
    let (s_gs, q_gs) = golden_section_min(|s| f.q(s), lo, hi, SEARCH_TOL);
    let (s_star, q_star) = if q_gs <= grid_q[best] {
        (s_gs, q_gs)
    } else {
        (grid_s[best], grid_q[best])
    };
    let q_star = q_star.clamp(0.0, 1.0);
    let exponent = if q_star < CHERNOFF_ZERO {
        f64::INFINITY
    } else {
        -q_star.ln()
    };
    Ok(ChernoffResult {
        s_star,
        q_star,
        exponent,
        grid_s,
        grid_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;

    #[test]
    fn identical_states() {
        let rho = DensityMatrix::from_bloch([0.2, -0.3, 0.4]).unwrap();
        let r = chernoff(&rho, &rho).unwrap();
        assert!((r.q_star - 1.0).abs() < 1e-12);
        assert!(r.exponent.abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = chernoff(&a, &b).unwrap();
        assert_eq!(r.q_star, 0.0);
        assert!(r.exponent.is_infinite() && r.exponent > 0.0);
    }

    #[test]
    fn pure_pair_gives_squared_overlap() {
        let a = [c(1.0, 0.0), c(0.0, 0.0)];
        let th: f64 = 0.7;
        let b = [c(th.cos(), 0.0), c(0.0, th.sin())];
        let r = chernoff(&DensityMatrix::pure(&a).unwrap(), &DensityMatrix::pure(&b).unwrap()).unwrap();
        assert!((r.q_star - th.cos().powi(2)).abs() < 1e-8);
        assert!(r.grid_q.iter().all(|q| (q - th.cos().powi(2)).abs() < 1e-8));
    }

    #[test]
    fn random_pure_pairs_give_squared_overlap() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut ket = || {
                [
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ]
            };
            let (a, b) = (ket(), ket());
            let na = a[0].norm_sqr() + a[1].norm_sqr();
            let nb = b[0].norm_sqr() + b[1].norm_sqr();
            let overlap = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr() / (na * nb);
            let r = chernoff(&DensityMatrix::pure(&a).unwrap(), &DensityMatrix::pure(&b).unwrap()).unwrap();
            assert!((r.q_star - overlap).abs() < 1e-10, "{} vs {overlap}", r.q_star);
        }
    }

    #[test]
    fn commuting_mixed_states_match_classical_formula() {
        // Diagonal states: Q(s) = Σ a_i^s b_i^{1−s}.
        let a = DensityMatrix::from_bloch([0.0, 0.0, 0.6]).unwrap();
        let b = DensityMatrix::from_bloch([0.0, 0.0, -0.2]).unwrap();
        let (a0, a1, b0, b1): (f64, f64, f64, f64) = (0.8, 0.2, 0.4, 0.6);
        let classical = |s: f64| a0.powf(s) * b0.powf(1.0 - s) + a1.powf(s) * b1.powf(1.0 - s);
        let mut best = f64::INFINITY;
        for k in 0..=1_000_000 {
            best = best.min(classical(k as f64 / 1e6));
        }
        let r = chernoff(&a, &b).unwrap();
        assert!((r.q_star - best).abs() < 1e-10);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-8 && fx < 1e-16);
    }

    /// Independent oracle: `Q(s)` from closed-form 2×2 powers on a dense grid.
    fn dense_min(a: &DensityMatrix, b: &DensityMatrix, steps: usize) -> f64 {
        let pow = |rho: &DensityMatrix, p: f64| {
            let r = rho.bloch();
            let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            let (lp, lm) = ((1.0 + n) / 2.0, (1.0 - n) / 2.0);
            let (fp, fm) = (lp.powf(p), if lm > 0.0 { lm.powf(p) } else { 0.0 });
            // f(ρ) = (f+ + f−)/2 · I + (f+ − f−)/2 · r̂·σ
            let id = ComplexMatrix::identity(2).unwrap();
            let dir = if n > 0.0 {
                [r[0] / n, r[1] / n, r[2] / n]
            } else {
                [0.0; 3]
            };
            id * ((fp + fm) / 2.0) + ComplexMatrix::pauli_dot(dir) * ((fp - fm) / 2.0)
        };
        (0..=steps)
            .map(|k| {
                let s = k as f64 / steps as f64;
                (pow(a, s) * pow(b, 1.0 - s)).trace().re
            })
            .fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #[test]
        fn chernoff_bounds(r0 in prop::array::uniform3(-0.57f64..0.57), r1 in prop::array::uniform3(-0.57f64..0.57)) {
            let a = DensityMatrix::from_bloch(r0).unwrap();
            let b = DensityMatrix::from_bloch(r1).unwrap();
            let r = chernoff(&a, &b).unwrap();
            let q_half = r.grid_q[50];
            prop_assert!(r.q_star <= r.grid_q[0] + 1e-12);
            prop_assert!(r.q_star <= r.grid_q[100] + 1e-12);
            prop_assert!(r.q_star <= q_half + 1e-12);
            prop_assert!(r.grid_min() >= r.q_star);
            let dense = dense_min(&a, &b, 20_000);
            prop_assert!((dense - r.q_star).abs() < 1e-6, "dense {} vs {}", dense, r.q_star);
            prop_assert!(r.q_star >= 0.0 && r.q_star <= 1.0);
        }
    }
}
