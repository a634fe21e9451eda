//! The zero-locus curve: phi(z) = C(z)/(A(z)B(z)), membership tests, a
//! marching-squares tracer for Im phi = 0 restricted to Re phi >= 1, and the
//! three-term curve for the collapsed diagonal sequence.

use num_complex::Complex;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::{find_roots, RootConfig};
use crate::scalar::{cast, to_f64, Real};
use crate::table::CoefficientTriple;

/// Curve membership: indeterminate marks points too close to the excluded
/// zeros of A*B (or of C for the three-term curve), where the theorem says
/// nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    On,
    Off,
    Indeterminate,
}

/// Axis-aligned rectangle in the z plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bbox<T: Real> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Real> Bbox<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Self {
        Bbox {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.x_min < self.x_max && self.y_min < self.y_max)
    }
}

/// phi = C/(A B) with lazily computed excluded points (zeros of A*B).
pub struct LocusFunction<T: Real> {
    triple: CoefficientTriple<T>,
    ab: Poly<T>,
    excluded: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> LocusFunction<T> {
    pub fn new(triple: CoefficientTriple<T>) -> Result<Self> {
        if triple.a.is_zero() || triple.b.is_zero() {
            return Err(Error::DegenerateLocus(
                "A or B is the zero polynomial, phi is undefined everywhere",
            ));
        }
        let ab = &triple.a * &triple.b;
        Ok(LocusFunction {
            triple,
            ab,
            excluded: OnceLock::new(),
        })
    }

    pub fn triple(&self) -> &CoefficientTriple<T> {
        &self.triple
    }

    /// Zeros of A*B, computed on first use.
    pub fn excluded_points(&self) -> &[Complex<T>] {
        self.excluded.get_or_init(|| {
            match find_roots(&self.ab, &RootConfig::default()) {
                Ok(rs) => rs.roots,
                Err(_) => Vec::new(), // constant A*B has no zeros
            }
        })
    }

    /// C(z)/(A(z)B(z)); domain error on a zero of A*B.
    pub fn phi(&self, z: Complex<T>) -> Result<Complex<T>> {
        let den = self.ab.eval(z);
        if den.norm() == T::zero() {
            return Err(Error::PhiPole {
                re: to_f64(z.re),
                im: to_f64(z.im),
            });
        }
        Ok(self.triple.c.eval(z) / den)
    }

    fn min_excluded_distance(&self, z: Complex<T>) -> T {
        self.excluded_points()
            .iter()
            .map(|&e| (z - e).norm())
            .fold(T::infinity(), T::min)
    }

    /// Membership on the curve Im phi = 0, Re phi >= 1. The imaginary test is
    /// relative in |phi| (phi blows up near the excluded points), the real
    /// inequality is absolute.
    pub fn on_curve(&self, z: Complex<T>, tol: T) -> Membership {
        if self.min_excluded_distance(z) <= tol {
            return Membership::Indeterminate;
        }
        match self.phi(z) {
            Err(_) => Membership::Indeterminate,
            Ok(phi) => {
                if phi.im.abs() <= tol * (T::one() + phi.norm()) && phi.re >= T::one() - tol {
                    Membership::On
                } else {
                    Membership::Off
                }
            }
        }
    }

    /// Traces the curve inside `bbox` by marching squares on Im phi with
    /// bisection-refined vertices, cells containing excluded points skipped,
    /// and segments clipped to Re phi >= 1.
    pub fn trace_curve(&self, bbox: Bbox<T>, grid_step: T) -> CurvePolyline<T> {
        trace(self, bbox, grid_step)
    }
}

/// Polyline approximation of the traced curve.
#[derive(Clone, Debug)]
pub struct CurvePolyline<T: Real> {
    pub segments: Vec<Vec<Complex<T>>>,
    pub bbox: Bbox<T>,
    pub grid_step: T,
}

impl<T: Real> CurvePolyline<T> {
    pub fn total_points(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        self.segments.iter().flatten().copied()
    }
}

const IM_TARGET: f64 = 1e-10;
const RE_TOL: f64 = 1e-6;
const MAX_BISECT: usize = 64;

fn trace<T: Real>(lf: &LocusFunction<T>, bbox: Bbox<T>, grid_step: T) -> CurvePolyline<T> {
    let empty = CurvePolyline {
        segments: Vec::new(),
        bbox,
        grid_step,
    };
    if bbox.is_degenerate() || grid_step <= T::zero() {
        return empty;
    }
    let nx = to_f64((bbox.x_max - bbox.x_min) / grid_step).ceil() as usize;
    let ny = to_f64((bbox.y_max - bbox.y_min) / grid_step).ceil() as usize;
    if nx == 0 || ny == 0 || nx.saturating_mul(ny) > 64_000_000 {
        return empty;
    }

    let x_at = |i: usize| bbox.x_min + grid_step * cast::<T>(i as f64);
    let y_at = |j: usize| bbox.y_min + grid_step * cast::<T>(j as f64);

    // (Im, Re) of phi per node; None at evaluation poles
    let mut vals: Vec<Option<(T, T)>> = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let z = Complex::new(x_at(i), y_at(j));
            vals.push(lf.phi(z).ok().map(|p| (p.im, p.re)));
        }
    }
    let node = |i: usize, j: usize| vals[j * (nx + 1) + i];

    let excluded = lf.excluded_points().to_vec();
    let re_slack = cast::<T>(10.0) * grid_step;
    let mut raw_segments: Vec<(Complex<T>, Complex<T>)> = Vec::new();

    for j in 0..ny {
        for i in 0..nx {
            let corners = [
                (x_at(i), y_at(j), node(i, j)),         // bl
                (x_at(i + 1), y_at(j), node(i + 1, j)), // br
                (x_at(i + 1), y_at(j + 1), node(i + 1, j + 1)), // tr
                (x_at(i), y_at(j + 1), node(i, j + 1)), // tl
            ];
            if corners.iter().any(|c| c.2.is_none()) {
                continue;
            }
            let cell_has_pole = excluded.iter().any(|e| {
                e.re >= x_at(i)
                    && e.re <= x_at(i + 1)
                    && e.im >= y_at(j)
                    && e.im <= y_at(j + 1)
            });
            if cell_has_pole {
                continue;
            }
            if corners
                .iter()
                .all(|c| c.2.unwrap().1 < T::one() - re_slack)
            {
                continue;
            }

            let sign = |k: usize| corners[k].2.unwrap().0 >= T::zero();
            let mut case = 0usize;
            for (k, bit) in [(0, 1), (1, 2), (2, 4), (3, 8)] {
                if sign(k) {
                    case |= bit;
                }
            }
            // edges: 0 bottom (bl-br), 1 right (br-tr), 2 top (tl-tr), 3 left (bl-tl)
            let edges: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 => &[(3, 2), (0, 1)],
                10 => &[(3, 0), (2, 1)],
                _ => unreachable!(),
            };
            let edge_ends = |e: usize| -> (usize, usize) {
                match e {
                    0 => (0, 1),
                    1 => (1, 2),
                    2 => (3, 2),
                    3 => (0, 3),
                    _ => unreachable!(),
                }
            };
            for &(ea, eb) in edges {
                let va = refine_on_edge(lf, &corners, edge_ends(ea));
                let vb = refine_on_edge(lf, &corners, edge_ends(eb));
                if let (Some(a), Some(b)) = (va, vb) {
                    raw_segments.push((a, b));
                }
            }
        }
    }

    let clipped = clip_segments(lf, raw_segments);
    CurvePolyline {
        segments: chain_segments(clipped),
        bbox,
        grid_step,
    }
}

/// Bisection along a cell edge to |Im phi| <= 1e-10. Returns None when the
/// target cannot be met (evaluation failure on the edge).
fn refine_on_edge<T: Real>(
    lf: &LocusFunction<T>,
    corners: &[(T, T, Option<(T, T)>); 4],
    (ka, kb): (usize, usize),
) -> Option<Complex<T>> {
    let (xa, ya, va) = corners[ka];
    let (xb, yb, vb) = corners[kb];
    let mut a = Complex::new(xa, ya);
    let mut b = Complex::new(xb, yb);
    let mut fa = va?.0;
    let fb = vb?.0;
    let pos = |v: T| v >= T::zero();
    if pos(fa) == pos(fb) {
        // no crossing; can happen on the unused edge of ambiguous cases
        return None;
    }
    let target = cast::<T>(IM_TARGET);
    if fa.abs() <= target {
        return Some(a);
    }
    if fb.abs() <= target {
        return Some(b);
    }
    for _ in 0..MAX_BISECT {
        let mid = (a + b) * Complex::new(cast::<T>(0.5), T::zero());
        let fm = lf.phi(mid).ok()?.im;
        if fm.abs() <= target {
            return Some(mid);
        }
        if pos(fm) == pos(fa) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    None
}

/// Clips segments against Re phi >= 1 - 1e-6; mixed segments get a bisected
/// boundary endpoint (the curve ends where Re phi = 1 are genuine endpoints).
fn clip_segments<T: Real>(
    lf: &LocusFunction<T>,
    segments: Vec<(Complex<T>, Complex<T>)>,
) -> Vec<(Complex<T>, Complex<T>)> {
    let re_tol = cast::<T>(RE_TOL);
    let one = T::one();
    let inside = |z: Complex<T>| -> Option<bool> { lf.phi(z).ok().map(|p| p.re >= one - re_tol) };
    let mut out = Vec::with_capacity(segments.len());
    for (a, b) in segments {
        match (inside(a), inside(b)) {
            (Some(true), Some(true)) => out.push((a, b)),
            (Some(true), Some(false)) => {
                if let Some(c) = clip_point(lf, a, b) {
                    out.push((a, c));
                }
            }
            (Some(false), Some(true)) => {
                if let Some(c) = clip_point(lf, b, a) {
                    out.push((c, b));
                }
            }
            _ => {}
        }
    }
    out
}

/// Bisects on the chord from the inside point toward the outside point for
/// the Re phi = 1 boundary; returns a point still inside at tolerance.
fn clip_point<T: Real>(
    lf: &LocusFunction<T>,
    inside: Complex<T>,
    outside: Complex<T>,
) -> Option<Complex<T>> {
    let one = T::one();
    let re_tol = cast::<T>(RE_TOL);
    let mut a = inside;
    let mut b = outside;
    for _ in 0..MAX_BISECT {
        let mid = (a + b) * Complex::new(cast::<T>(0.5), T::zero());
        let p = lf.phi(mid).ok()?;
        if p.re >= one {
            a = mid;
        } else {
            b = mid;
        }
        if (a - b).norm() <= cast::<T>(1e-15) * (one + a.norm()) {
            break;
        }
    }
    // keep only if the boundary point still satisfies both curve conditions
    let p = lf.phi(a).ok()?;
    if p.re >= one - re_tol && p.im.abs() <= cast::<T>(IM_TARGET) * (one + p.norm()) {
        Some(a)
    } else {
        None
    }
}

/// Joins 2-point segments into polylines on exactly shared endpoints (shared
/// cell edges bisect to bit-identical vertices). Deterministic order.
fn chain_segments<T: Real>(segments: Vec<(Complex<T>, Complex<T>)>) -> Vec<Vec<Complex<T>>> {
    use std::collections::HashMap;
    let key = |z: Complex<T>| -> (u64, u64) {
        (to_f64(z.re).to_bits(), to_f64(z.im).to_bits())
    };
    let mut adjacency: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(key(*a)).or_default().push(idx);
        adjacency.entry(key(*b)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = vec![a, b];
        // extend forward from the tail, then backward from the head
        for dir in 0..2 {
            loop {
                let end = if dir == 0 {
                    *chain.last().unwrap()
                } else {
                    chain[0]
                };
                let Some(cands) = adjacency.get(&key(end)) else {
                    break;
                };
                let mut advanced = false;
                for &idx in cands {
                    if used[idx] {
                        continue;
                    }
                    let (sa, sb) = segments[idx];
                    let next = if key(sa) == key(end) {
                        sb
                    } else if key(sb) == key(end) {
                        sa
                    } else {
                        continue;
                    };
                    used[idx] = true;
                    if dir == 0 {
                        chain.push(next);
                    } else {
                        chain.insert(0, next);
                    }
                    advanced = true;
                    break;
                }
                if !advanced {
                    break;
                }
            }
        }
        out.push(chain);
    }
    out
}

/// The three-term curve for the collapsed sequence R_N: membership of
/// Im(D^2/C) = 0 with 0 <= Re(D^2/C) <= 4, indeterminate near zeros of C.
pub struct ThreeTermCurve<T: Real> {
    d: Poly<T>,
    c: Poly<T>,
    excluded: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> ThreeTermCurve<T> {
    pub fn new(d: Poly<T>, c: Poly<T>) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DegenerateLocus(
                "C is the zero polynomial, D^2/C is undefined everywhere",
            ));
        }
        Ok(ThreeTermCurve {
            d,
            c,
            excluded: OnceLock::new(),
        })
    }

    pub fn excluded_points(&self) -> &[Complex<T>] {
        self.excluded.get_or_init(|| {
            match find_roots(&self.c, &RootConfig::default()) {
                Ok(rs) => rs.roots,
                Err(_) => Vec::new(),
            }
        })
    }

    pub fn membership(&self, z: Complex<T>, tol: T) -> Membership {
        let near = self
            .excluded_points()
            .iter()
            .any(|&e| (z - e).norm() <= tol);
        if near {
            return Membership::Indeterminate;
        }
        let den = self.c.eval(z);
        if den.norm() == T::zero() {
            return Membership::Indeterminate;
        }
        let d = self.d.eval(z);
        let w = d * d / den;
        let four = cast::<T>(4.0);
        if w.im.abs() <= tol * (T::one() + w.norm()) && w.re >= -tol && w.re <= four + tol {
            Membership::On
        } else {
            Membership::Off
        }
    }
}

/// One-shot membership on the three-term curve.
pub fn three_term_curve_membership<T: Real>(
    d: &Poly<T>,
    c: &Poly<T>,
    z: Complex<T>,
    tol: T,
) -> Result<Membership> {
    Ok(ThreeTermCurve::new(d.clone(), c.clone())?.membership(z, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type P = Poly<f64>;

    fn worked_locus() -> LocusFunction<f64> {
        LocusFunction::new(CoefficientTriple::new(
            P::one(),
            P::from_real(&[2.0, -2.0, 1.0]),
            P::var(),
        ))
        .unwrap()
    }

    fn dist_to_example_set(z: Complex64) -> f64 {
        // ([1,2] x {0}) U {x^2+y^2 = 2, x >= 1}
        let seg = if z.re >= 1.0 && z.re <= 2.0 {
            z.im.abs()
        } else {
            (z - Complex64::new(1.0, 0.0))
                .norm()
                .min((z - Complex64::new(2.0, 0.0)).norm())
        };
        let arc = if z.re >= 1.0 {
            (z.norm() - 2.0f64.sqrt()).abs()
        } else {
            (z - Complex64::new(1.0, 1.0))
                .norm()
                .min((z - Complex64::new(1.0, -1.0)).norm())
        };
        seg.min(arc)
    }

    #[test]
    fn phi_values_on_worked_example() {
        let lf = worked_locus();
        let p = lf.phi(Complex64::new(1.5, 0.0)).unwrap();
        assert!((p - Complex64::new(1.2, 0.0)).norm() < 1e-14);

        // on the circle branch at x = 1.2: Re phi = 1 + (3-2x)/(2(x-1)) = 2.5
        let z = Complex64::new(1.2, 0.56f64.sqrt());
        let p = lf.phi(z).unwrap();
        assert!(p.im.abs() < 1e-13);
        assert!((p.re - 2.5).abs() < 1e-12);

        let p = lf.phi(Complex64::new(3.0, 0.0)).unwrap();
        assert!((p - Complex64::new(0.6, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn phi_pole_is_domain_error() {
        let lf = worked_locus();
        assert!(matches!(
            lf.phi(Complex64::new(1.0, 1.0)),
            Err(Error::PhiPole { .. })
        ));
    }

    #[test]
    fn membership_cases() {
        let lf = worked_locus();
        assert_eq!(lf.on_curve(Complex64::new(1.5, 0.0), 1e-8), Membership::On);
        // C(0) = 0 while A(0)B(0) = 2: phi = 0, off the curve
        assert_eq!(lf.on_curve(Complex64::new(0.0, 0.0), 1e-8), Membership::Off);
        // a zero of B
        assert_eq!(
            lf.on_curve(Complex64::new(1.0, 1.0), 1e-6),
            Membership::Indeterminate
        );
        assert_eq!(lf.on_curve(Complex64::new(3.0, 0.0), 1e-8), Membership::Off);
    }

    #[test]
    fn locus_rejects_zero_a_or_b() {
        let t = CoefficientTriple::new(P::zero(), P::one(), P::var());
        assert!(LocusFunction::new(t).is_err());
    }

    #[test]
    fn traced_worked_example_matches_known_set() {
        let lf = worked_locus();
        let bbox = Bbox::new(-0.5, 2.5, -1.6, 1.6);
        let curve = lf.trace_curve(bbox, 0.01);
        assert!(curve.total_points() > 100);

        // every emitted point is on the known set and passes on_curve
        for p in curve.points() {
            assert!(
                dist_to_example_set(p) <= 0.02,
                "traced point {p} off the set"
            );
            assert_eq!(lf.on_curve(p, 1e-6), Membership::On, "point {p}");
        }

        // and the known set is covered by the trace
        let mut probes: Vec<Complex64> = (0..=100)
            .map(|k| Complex64::new(1.0 + k as f64 / 100.0, 0.0))
            .collect();
        // arc x >= 1 <=> |angle| <= pi/4
        probes.extend((-25..=25).map(|k| {
            let th = k as f64 / 25.0 * std::f64::consts::FRAC_PI_4;
            Complex64::from_polar(2.0f64.sqrt(), th)
        }));
        for q in probes {
            let d = curve
                .points()
                .map(|p| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 0.02, "set point {q} not covered (nearest {d:.3})");
        }
    }

    #[test]
    fn traced_h_curve_is_half_line() {
        let lf = LocusFunction::new(CoefficientTriple::<f64>::special_h()).unwrap();
        let bbox = Bbox::new(0.0, 6.0, -1.0, 1.0);
        let curve = lf.trace_curve(bbox, 0.01);
        assert!(curve.total_points() > 50);
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        for p in curve.points() {
            assert!(p.im.abs() <= 0.02);
            assert!(p.re >= 1.0 - 0.02 && p.re <= 6.0 + 1e-9);
            min_x = min_x.min(p.re);
            max_x = max_x.max(p.re);
        }
        assert!(min_x <= 1.02, "left endpoint {min_x}");
        assert!(max_x >= 5.98, "right endpoint {max_x}");
    }

    #[test]
    fn trace_off_curve_region_is_empty() {
        let lf = worked_locus();
        let bbox = Bbox::new(-2.0, -1.0, 0.5, 1.5);
        let curve = lf.trace_curve(bbox, 0.05);
        assert_eq!(curve.total_points(), 0);
    }

    #[test]
    fn three_term_membership_cases() {
        // D = 2, C = 1: D^2/C = 4 everywhere
        let on = three_term_curve_membership(
            &P::from_real(&[2.0]),
            &P::one(),
            Complex64::new(-7.3, 2.1),
            1e-9,
        )
        .unwrap();
        assert_eq!(on, Membership::On);

        // D = z, C = 1
        let d = P::var();
        let c = P::one();
        assert_eq!(
            three_term_curve_membership(&d, &c, Complex64::new(1.0, 0.0), 1e-9).unwrap(),
            Membership::On
        );
        assert_eq!(
            three_term_curve_membership(&d, &c, Complex64::new(3.0, 0.0), 1e-9).unwrap(),
            Membership::Off
        );

        // near a zero of C
        let curve = ThreeTermCurve::new(P::var(), P::var()).unwrap();
        assert_eq!(
            curve.membership(Complex64::new(1e-9, 0.0), 1e-6),
            Membership::Indeterminate
        );

        assert!(ThreeTermCurve::new(P::var(), P::zero()).is_err());
    }

    #[test]
    fn h_reduction_identity() {
        // P_{m,n}(z) = A^m B^n H_{m,n}(C/(A B)) away from zeros of A*B
        use crate::table::{build_h_table, build_table};
        let t = CoefficientTriple::new(
            P::from_real(&[1.0, 2.0]),
            P::from_real(&[2.0, -2.0, 1.0]),
            P::from_real(&[0.0, 1.0, -1.0]),
        );
        let m_cap = 10usize;
        let tab = build_table(&t, m_cap, m_cap).unwrap();
        let h = build_h_table::<f64>(m_cap, m_cap).unwrap();
        let lf = LocusFunction::new(t.clone()).unwrap();
        let mut state = 99u64;
        for m in 0..=m_cap {
            for n in 0..=m_cap {
                for _ in 0..50 {
                    let z = Complex64::new(
                        4.0 * crate::roots::unit_f64(&mut state) - 2.0,
                        4.0 * crate::roots::unit_f64(&mut state) - 2.0,
                    );
                    let ab = (&t.a * &t.b).eval(z);
                    if ab.norm() < 1e-3 {
                        continue;
                    }
                    let phi = lf.phi(z).unwrap();
                    let lhs = tab.entry(m, n).unwrap().eval(z);
                    let rhs = t.a.eval(z).powu(m as u32)
                        * t.b.eval(z).powu(n as u32)
                        * h.entry(m, n).unwrap().eval(phi);
                    assert!(
                        (lhs - rhs).norm() <= 1e-8 * (1.0 + lhs.norm().max(rhs.norm())),
                        "({m},{n}) at z={z}"
                    );
                }
            }
        }
    }
}
