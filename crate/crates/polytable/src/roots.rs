//! Simultaneous root finding: Aberth-Ehrlich iteration with Newton polishing,
//! exact deflation of zeros at the origin, and residual certificates.
//!
//! Newton ratios are evaluated through the exact dyadic representation, so
//! residuals certify against the polynomial actually handed in rather than
//! against a noise floor of floating Horner.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exact::ExactPoly;
use crate::poly::Poly;
use crate::scalar::{cast, to_f64, Real};

/// Iteration controls. Defaults: tol 1e-12 (relative residual), 500 rounds,
/// seed 0 for the initial angular offset.
#[derive(Clone, Debug)]
pub struct RootConfig<T: Real> {
    pub tol: T,
    pub max_iters: u32,
    pub seed: u64,
}

impl<T: Real> Default for RootConfig<T> {
    fn default() -> Self {
        RootConfig {
            tol: cast(1e-12),
            max_iters: 500,
            seed: 0,
        }
    }
}

/// All complex zeros of one polynomial, with per-root residuals
/// |p(r)| / (max|coeff| * max(1,|r|)^deg) and convergence flags.
#[derive(Clone, Debug)]
pub struct RootSet<T: Real> {
    pub roots: Vec<Complex<T>>,
    pub residuals: Vec<T>,
    pub converged: Vec<bool>,
    pub source_degree: usize,
}

impl<T: Real> RootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in [0, 1).
pub(crate) fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Initial guesses from the Newton polygon: radii come from the slopes of the
/// upper convex hull of (k, log2|c_k|), which track the root moduli clusters.
/// One circle of Cauchy-bound radius stalls when moduli span several decades.
fn initial_guesses(coeff_log2: &[Option<f64>], seed: u64) -> Vec<Complex<f64>> {
    let pts: Vec<(usize, f64)> = coeff_log2
        .iter()
        .enumerate()
        .filter_map(|(k, l)| l.map(|v| (k, v)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // keep only points above the chord from (x1,y1) to (x,y)
            if (y2 - y1) * (x - x1) as f64 <= (y - y1) * (x2 - x1) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }

    let degree = coeff_log2.len() - 1;
    let mut state = seed ^ 0xa076_1d64_78bd_642f;
    let sigma = unit_f64(&mut state) * std::f64::consts::TAU;
    let n_edges = (hull.len() - 1).max(1);
    let mut out = Vec::with_capacity(degree);
    for i in 0..hull.len() - 1 {
        let (k1, h1) = hull[i];
        let (k2, h2) = hull[i + 1];
        let count = k2 - k1;
        let r = ((h1 - h2) / count as f64).clamp(-400.0, 400.0).exp2();
        for j in 0..count {
            let theta = std::f64::consts::TAU * (j as f64 / count as f64 + i as f64 / n_edges as f64)
                + sigma
                + 0.4 / degree as f64;
            out.push(Complex::new(r * theta.cos(), r * theta.sin()));
        }
    }
    out
}

struct EvalOutcome<T: Real> {
    ratio: Option<Complex<T>>,
    residual: T,
    log2_dp: Option<f64>,
}

fn eval_at<T: Real>(p: &ExactPoly, log2_maxc: f64, z: Complex<T>) -> EvalOutcome<T> {
    let ev = p.newton_eval(z);
    let d = p.degree().unwrap_or(0) as f64;
    let log2_z = to_f64(z.norm()).max(1.0).log2();
    let residual = match ev.log2_p {
        None => T::zero(),
        Some(lp) => {
            let lr = lp - log2_maxc - d * log2_z;
            if lr < -1060.0 {
                T::zero()
            } else {
                cast(lr.exp2())
            }
        }
    };
    EvalOutcome {
        ratio: ev.ratio,
        residual,
        log2_dp: ev.log2_dp,
    }
}

/// All complex roots of the exact polynomial. Deterministic for a given
/// config seed.
pub fn find_roots_exact<T: Real>(p: &ExactPoly, cfg: &RootConfig<T>) -> Result<RootSet<T>> {
    let Some(source_degree) = p.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    if source_degree == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            residuals: Vec::new(),
            converged: Vec::new(),
            source_degree: 0,
        });
    }

    let (deflated, origin_mult) = p.deflate_origin();
    let d = deflated.degree().unwrap();
    let log2_maxc = deflated.log2_max_coeff();

    let mut roots: Vec<Complex<T>> = if d == 0 {
        Vec::new()
    } else {
        initial_guesses(&deflated.coeff_log2(), cfg.seed)
            .into_iter()
            .map(|z| Complex::new(cast::<T>(z.re), cast::<T>(z.im)))
            .collect()
    };

    if d > 0 {
        let mut residuals = vec![T::infinity(); d];
        for _ in 0..cfg.max_iters {
            let mut all_done = true;
            for k in 0..d {
                let out = eval_at(&deflated, log2_maxc, roots[k]);
                residuals[k] = out.residual;
                if out.residual <= cfg.tol {
                    continue;
                }
                all_done = false;
                let Some(ratio) = out.ratio else {
                    // p' vanished exactly; nudge off the critical point
                    let bump = cast::<T>(1e-6) * (T::one() + roots[k].norm());
                    roots[k] = roots[k] + Complex::new(bump, bump);
                    continue;
                };
                let mut s = Complex::new(T::zero(), T::zero());
                for j in 0..d {
                    if j != k {
                        s = s + (roots[k] - roots[j]).inv();
                    }
                }
                let denom = Complex::new(T::one(), T::zero()) - ratio * s;
                let step = ratio / denom;
                if step.re.is_finite() && step.im.is_finite() {
                    roots[k] = roots[k] - step;
                }
            }
            if all_done {
                break;
            }
        }

        // Newton polish with implicit deflation of the sibling roots
        for k in 0..d {
            let others: Vec<Complex<T>> = (0..d).filter(|&j| j != k).map(|j| roots[j]).collect();
            roots[k] = polish_exact(&deflated, log2_maxc, roots[k], &others);
        }
    }

    let mut residuals = Vec::with_capacity(source_degree);
    let mut converged = Vec::with_capacity(source_degree);
    for k in 0..d {
        let out = eval_at(&deflated, log2_maxc, roots[k]);
        residuals.push(out.residual);
        converged.push(out.residual <= cfg.tol);
    }
    for _ in 0..origin_mult {
        roots.push(Complex::new(T::zero(), T::zero()));
        residuals.push(T::zero());
        converged.push(true);
    }

    Ok(RootSet {
        roots,
        residuals,
        converged,
        source_degree,
    })
}

/// All complex roots of a floating polynomial (exact conversion first).
pub fn find_roots<T: Real>(p: &Poly<T>, cfg: &RootConfig<T>) -> Result<RootSet<T>> {
    find_roots_exact(&ExactPoly::from_poly(p), cfg)
}

const POLISH_STEPS: usize = 50;
// |p'| below 2^-996 * max|coeff| (~1e-300 relative) is the multiple-root cliff
const CLIFF_LOG2: f64 = -996.0;

fn polish_exact<T: Real>(
    p: &ExactPoly,
    log2_maxc: f64,
    start: Complex<T>,
    deflate: &[Complex<T>],
) -> Complex<T> {
    let mut z = start;
    for _ in 0..POLISH_STEPS {
        let out = eval_at(p, log2_maxc, z);
        if out.residual == T::zero() {
            return z;
        }
        let Some(ratio) = out.ratio else {
            return z;
        };
        let mut s = Complex::new(T::zero(), T::zero());
        for &o in deflate {
            let diff = z - o;
            if diff.norm() > T::zero() {
                s = s + diff.inv();
            }
        }
        let cliff = out.log2_dp.is_some_and(|l| l < CLIFF_LOG2 + log2_maxc);
        let denom = Complex::new(T::one(), T::zero()) - ratio * s;
        let step = ratio / denom;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return z;
        }
        let next = z - step;
        if cliff {
            // single implicit-deflation step on the multiple-root cliff
            return next;
        }
        if (next - z).norm() <= cast::<T>(1e-16) * (T::one() + z.norm()) {
            return next;
        }
        z = next;
    }
    z
}

/// Newton-polishes one approximate root; at most 50 steps, best effort.
pub fn polish_root<T: Real>(p: &Poly<T>, approx: Complex<T>) -> Complex<T> {
    let xp = ExactPoly::from_poly(p);
    if xp.is_zero() || xp.degree() == Some(0) {
        return approx;
    }
    let log2_maxc = xp.log2_max_coeff();
    polish_exact(&xp, log2_maxc, approx, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type P = Poly<f64>;

    fn sorted_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_known_roots() {
        let cfg = RootConfig::default();
        let rs = find_roots(&P::from_real(&[6.0, -6.0, 1.0]), &cfg).unwrap();
        assert!(rs.all_converged());
        let roots = sorted_by_re(rs.roots.clone());
        let s3 = 3.0f64.sqrt();
        assert!((roots[0] - Complex64::new(3.0 - s3, 0.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(3.0 + s3, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn linear_and_constant() {
        let cfg = RootConfig::default();
        let rs = find_roots(&P::from_real(&[-2.0, 1.0]), &cfg).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.roots[0] - Complex64::new(2.0, 0.0)).norm() < 1e-14);

        let empty = find_roots(&P::from_real(&[5.0]), &cfg).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.source_degree, 0);

        assert!(matches!(
            find_roots(&P::zero(), &cfg),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn worked_example_p11_roots() {
        // 2z^2 - 5z + 4 has roots (5 +- i sqrt 7)/4 with |root|^2 = 2
        let cfg = RootConfig::default();
        let rs = find_roots(&P::from_real(&[4.0, -5.0, 2.0]), &cfg).unwrap();
        assert!(rs.all_converged());
        for r in &rs.roots {
            assert!((r.re - 1.25).abs() < 1e-13);
            assert!((r.im.abs() - 7.0f64.sqrt() / 4.0).abs() < 1e-13);
            assert!((r.norm_sqr() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_roots_deflated_exactly() {
        // z^3 (z - 1)
        let p = P::from_real(&[0.0, 0.0, 0.0, -1.0, 1.0]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert_eq!(rs.source_degree, 4);
        let zeros = rs.roots.iter().filter(|r| r.norm() == 0.0).count();
        assert_eq!(zeros, 3);
        assert!(rs.roots.iter().any(|r| (r - Complex64::new(1.0, 0.0)).norm() < 1e-13));
        assert!(rs.all_converged());
    }

    #[test]
    fn moduli_spanning_decades() {
        // (z - 1e-3)(z - 1)(z - 1e3): Newton-polygon starts must find all three
        let p = {
            let a = P::from_real(&[-1e-3, 1.0]);
            let b = P::from_real(&[-1.0, 1.0]);
            let c = P::from_real(&[-1e3, 1.0]);
            &(&a * &b) * &c
        };
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert!(rs.all_converged());
        let mut moduli: Vec<f64> = rs.roots.iter().map(|r| r.norm()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((moduli[0] - 1e-3).abs() < 1e-11);
        assert!((moduli[1] - 1.0).abs() < 1e-11);
        assert!((moduli[2] - 1e3).abs() < 1e-8);
    }

    #[test]
    fn planted_grid_roots_recovered() {
        // roots on a grid with separation >= 0.3, degree 12
        let mut roots = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                roots.push(Complex64::new(-0.6 + 0.4 * i as f64, -0.3 + 0.3 * j as f64));
            }
        }
        let mut p = P::one();
        for r in &roots {
            p = &p * &P::new(vec![-r, Complex64::new(1.0, 0.0)]);
        }
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert!(rs.all_converged());
        for planted in &roots {
            let nearest = rs
                .roots
                .iter()
                .map(|r| (r - planted).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "planted root {planted} missed ({nearest:.2e})");
        }
    }

    #[test]
    fn conjugate_symmetry_for_real_inputs() {
        let p = P::from_real(&[3.0, -1.0, 2.0, 0.5, 1.0, 4.0]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        for r in &rs.roots {
            let conj_dist = rs
                .roots
                .iter()
                .map(|s| (s - r.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(conj_dist < 1e-8);
        }
    }

    #[test]
    fn root_product_matches_constant_term() {
        // product of roots = (-1)^deg c0/cdeg
        let mut state = 7u64;
        for deg in [5usize, 12, 30, 60] {
            let coeffs: Vec<f64> = (0..=deg)
                .map(|_| 2.0 * unit_f64(&mut state) - 1.0)
                .collect();
            let p = P::from_real(&coeffs);
            if p.degree() != Some(deg) || p.coeff(0).norm() == 0.0 {
                continue;
            }
            let rs = find_roots(&p, &RootConfig::default()).unwrap();
            if !rs.all_converged() {
                continue;
            }
            let log_prod: f64 = rs.roots.iter().map(|r| r.norm().ln()).sum();
            let expected = (p.coeff(0).norm() / p.coeff(deg).norm()).ln();
            assert!(
                (log_prod - expected).abs() < 1e-6 * expected.abs().max(1.0),
                "deg {deg}: log product {log_prod} vs {expected}"
            );
        }
    }

    #[test]
    fn polish_textbook_newton() {
        let p = P::from_real(&[-2.0, 0.0, 1.0]);
        let r = polish_root(&p, Complex64::new(1.4, 0.0));
        assert!((r.re - 2.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.im, 0.0);
    }

    #[test]
    fn polish_triple_root_best_effort() {
        // (z-1)^3: documented cube-root-of-eps behavior, asserted loosely
        let lin = P::from_real(&[-1.0, 1.0]);
        let p = lin.pow(3);
        let r = polish_root(&p, Complex64::new(1.1, 0.0));
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn polish_fixed_point_at_root() {
        let p = P::from_real(&[6.0, -5.0, 1.0]); // roots 2, 3
        let r = polish_root(&p, Complex64::new(2.0, 0.0));
        assert!((r - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = P::from_real(&[1.0, -3.0, 0.5, 2.0, 1.0]);
        let cfg = RootConfig::default();
        let a = find_roots(&p, &cfg).unwrap();
        let b = find_roots(&p, &cfg).unwrap();
        assert_eq!(a.roots, b.roots);
        let other = find_roots(
            &p,
            &RootConfig {
                seed: 99,
                ..RootConfig::default()
            },
        )
        .unwrap();
        // same multiset of roots regardless of seed
        for r in &a.roots {
            assert!(other.roots.iter().any(|s| (s - r).norm() < 1e-9));
        }
    }
}
