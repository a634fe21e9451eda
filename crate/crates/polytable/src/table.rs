//! Generation of the doubly-indexed polynomial tables and their collapsed
//! diagonal sequences.
//!
//! The general table satisfies
//!   P_{m,n} + A P_{m-1,n} + B P_{m,n-1} + C P_{m-1,n-1} = 0,  P_{0,0} = 1,
//! with out-of-range entries zero. H is the special triple (1, 1, z); R is
//! driven by a numerator spec on the same denominator.

use num_complex::Complex;

use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::exact::ExactPoly;
use crate::poly::Poly;
use crate::scalar::{cast, Real};

/// Default cap on the total number of stored coefficients per table.
pub const DEFAULT_COEFF_CAP: usize = 1 << 28;

/// The (A, B, C) polynomials defining a table.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTriple<T: Real> {
    pub a: Poly<T>,
    pub b: Poly<T>,
    pub c: Poly<T>,
}

impl<T: Real> CoefficientTriple<T> {
    pub fn new(a: Poly<T>, b: Poly<T>, c: Poly<T>) -> Self {
        CoefficientTriple { a, b, c }
    }

    /// A = B = C = 0 generates nothing beyond the (0,0) entry.
    pub fn is_degenerate(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// The H-table triple A = 1, B = 1, C = z.
    pub fn special_h() -> Self {
        CoefficientTriple {
            a: Poly::one(),
            b: Poly::one(),
            c: Poly::var(),
        }
    }
}

/// Numerator N(s,t,z) = sum a_{i,j,k} s^i t^j z^k with 0 <= i <= I etc.
#[derive(Clone, Debug, PartialEq)]
pub struct NumeratorSpec<T: Real> {
    a: Vec<T>,
    i_max: usize,
    j_max: usize,
    k_max: usize,
}

impl<T: Real> NumeratorSpec<T> {
    /// `a[i][j][k]` nested coefficients; ragged inner vectors are zero-padded.
    pub fn new(a: Vec<Vec<Vec<T>>>) -> Self {
        let i_max = a.len().saturating_sub(1);
        let j_max = a.iter().map(|v| v.len()).max().unwrap_or(1).saturating_sub(1);
        let k_max = a
            .iter()
            .flat_map(|v| v.iter().map(|w| w.len()))
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        let mut flat = vec![T::zero(); (i_max + 1) * (j_max + 1) * (k_max + 1)];
        for (i, vi) in a.iter().enumerate() {
            for (j, vj) in vi.iter().enumerate() {
                for (k, &v) in vj.iter().enumerate() {
                    flat[(i * (j_max + 1) + j) * (k_max + 1) + k] = v;
                }
            }
        }
        NumeratorSpec {
            a: flat,
            i_max,
            j_max,
            k_max,
        }
    }

    /// The unit numerator N = 1.
    pub fn unit() -> Self {
        NumeratorSpec::new(vec![vec![vec![T::one()]]])
    }

    pub fn bounds(&self) -> (usize, usize, usize) {
        (self.i_max, self.j_max, self.k_max)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        if i > self.i_max || j > self.j_max || k > self.k_max {
            T::zero()
        } else {
            self.a[(i * (self.j_max + 1) + j) * (self.k_max + 1) + k]
        }
    }

    /// Shrinks I, J, K to the largest indices carrying a nonzero entry; the
    /// nonreal-zero bound I + J + 2K is only meaningful for tight bounds.
    pub fn shrink_to_tight(&self) -> Self {
        let mut ti = 0;
        let mut tj = 0;
        let mut tk = 0;
        let mut any = false;
        for i in 0..=self.i_max {
            for j in 0..=self.j_max {
                for k in 0..=self.k_max {
                    if self.get(i, j, k) != T::zero() {
                        ti = ti.max(i);
                        tj = tj.max(j);
                        tk = tk.max(k);
                        any = true;
                    }
                }
            }
        }
        if !any {
            return NumeratorSpec::new(vec![vec![vec![T::zero()]]]);
        }
        let mut nested = vec![vec![vec![T::zero(); tk + 1]; tj + 1]; ti + 1];
        for (i, vi) in nested.iter_mut().enumerate() {
            for (j, vj) in vi.iter_mut().enumerate() {
                for (k, v) in vj.iter_mut().enumerate() {
                    *v = self.get(i, j, k);
                }
            }
        }
        NumeratorSpec::new(nested)
    }

    /// Theorem bound I + J + 2K on nonreal zeros (use on a tight spec).
    pub fn nonreal_bound(&self) -> usize {
        self.i_max + self.j_max + 2 * self.k_max
    }

    /// sum_k a_{m,n,k} z^k, the recurrence right-hand side at (m, n).
    pub fn rhs_poly(&self, m: usize, n: usize) -> Poly<T> {
        if m > self.i_max || n > self.j_max {
            return Poly::zero();
        }
        Poly::new(
            (0..=self.k_max)
                .map(|k| Complex::new(self.get(m, n, k), T::zero()))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    GeneralP,
    SpecialH,
    GeneralR,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::GeneralP => "GeneralP",
            TableKind::SpecialH => "SpecialH",
            TableKind::GeneralR => "GeneralR",
        }
    }
}

#[derive(Clone, Debug)]
pub enum TableSource<T: Real> {
    Triple(CoefficientTriple<T>),
    Numerator(NumeratorSpec<T>),
}

/// Fully memoized table of polynomials, row-major over (m, n).
#[derive(Clone, Debug)]
pub struct PolyTable<T: Real> {
    pub kind: TableKind,
    pub m_max: usize,
    pub n_max: usize,
    entries: Vec<Poly<T>>,
    source: TableSource<T>,
}

impl<T: Real> PolyTable<T> {
    pub fn entry(&self, m: usize, n: usize) -> Result<&Poly<T>> {
        if m > self.m_max || n > self.n_max {
            return Err(Error::TableTooSmall {
                m,
                n,
                m_max: self.m_max,
                n_max: self.n_max,
            });
        }
        Ok(&self.entries[m * (self.n_max + 1) + n])
    }

    pub fn source(&self) -> &TableSource<T> {
        &self.source
    }

    /// Rebuilds entry (m, n) over exact dyadic arithmetic. The floating table
    /// is the exported artifact; exact entries are what the root finder needs
    /// once coefficients outgrow the 53-bit integer window.
    pub fn exact_entry(&self, m: usize, n: usize) -> Result<ExactPoly> {
        if m > self.m_max || n > self.n_max {
            return Err(Error::TableTooSmall {
                m,
                n,
                m_max: self.m_max,
                n_max: self.n_max,
            });
        }
        match &self.source {
            TableSource::Triple(t) => Ok(exact_entry_triple(t, m, n)),
            TableSource::Numerator(num) => Ok(exact_entry_numerator(num, m, n)),
        }
    }

    /// Relative residual of the defining recurrence at (m, n); entries out of
    /// range on the left-hand side count as zero.
    pub fn recurrence_residual(&self, m: usize, n: usize) -> Result<T> {
        let zero = Poly::zero();
        let at = |i: Option<usize>, j: Option<usize>| -> Result<&Poly<T>> {
            match (i, j) {
                (Some(i), Some(j)) => self.entry(i, j),
                _ => Ok(&zero),
            }
        };
        let cur = self.entry(m, n)?;
        let up = at(m.checked_sub(1), Some(n))?;
        let left = at(Some(m), n.checked_sub(1))?;
        let diag = at(m.checked_sub(1), n.checked_sub(1))?;
        let (terms, rhs): (Vec<Poly<T>>, Poly<T>) = match &self.source {
            TableSource::Triple(t) => (
                vec![cur.clone(), &t.a * up, &t.b * left, &t.c * diag],
                Poly::zero(),
            ),
            TableSource::Numerator(num) => (
                vec![
                    cur.clone(),
                    up.clone(),
                    left.clone(),
                    &Poly::var() * diag,
                ],
                num.rhs_poly(m, n),
            ),
        };
        let mut sum = Poly::zero();
        let mut scale = rhs.max_coeff_norm();
        for t in &terms {
            sum = &sum + t;
            scale = scale.max(t.max_coeff_norm());
        }
        sum = &sum - &rhs;
        if scale == T::zero() {
            return Ok(T::zero());
        }
        Ok(sum.max_coeff_norm() / scale)
    }
}

fn check_cap(total: &mut usize, add: usize, cap: usize) -> Result<()> {
    *total += add;
    if *total > cap {
        Err(Error::MemoryCap {
            needed: *total,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Builds the general table for a coefficient triple, memoized row-major.
pub fn build_table<T: Real>(
    spec: &CoefficientTriple<T>,
    m_max: usize,
    n_max: usize,
) -> Result<PolyTable<T>> {
    build_table_with_cap(spec, m_max, n_max, DEFAULT_COEFF_CAP)
}

pub fn build_table_with_cap<T: Real>(
    spec: &CoefficientTriple<T>,
    m_max: usize,
    n_max: usize,
    cap: usize,
) -> Result<PolyTable<T>> {
    let kind = if *spec == CoefficientTriple::special_h() {
        TableKind::SpecialH
    } else {
        TableKind::GeneralP
    };
    let cols = n_max + 1;
    let mut entries: Vec<Poly<T>> = Vec::with_capacity((m_max + 1) * cols);
    let mut total = 0usize;
    for m in 0..=m_max {
        for n in 0..=n_max {
            let p = if m == 0 && n == 0 {
                Poly::one()
            } else {
                let mut acc = Poly::zero();
                if m > 0 {
                    acc = &acc + &(&spec.a * &entries[(m - 1) * cols + n]);
                }
                if n > 0 {
                    acc = &acc + &(&spec.b * &entries[m * cols + n - 1]);
                }
                if m > 0 && n > 0 {
                    acc = &acc + &(&spec.c * &entries[(m - 1) * cols + n - 1]);
                }
                -&acc
            };
            check_cap(&mut total, p.coeffs().len(), cap)?;
            entries.push(p);
        }
    }
    Ok(PolyTable {
        kind,
        m_max,
        n_max,
        entries,
        source: TableSource::Triple(spec.clone()),
    })
}

/// The H table: A = 1, B = 1, C = z.
pub fn build_h_table<T: Real>(m_max: usize, n_max: usize) -> Result<PolyTable<T>> {
    build_table(&CoefficientTriple::special_h(), m_max, n_max)
}

/// Builds the general-numerator table R.
pub fn build_r_table<T: Real>(
    num: &NumeratorSpec<T>,
    m_max: usize,
    n_max: usize,
) -> Result<PolyTable<T>> {
    build_r_table_with_cap(num, m_max, n_max, DEFAULT_COEFF_CAP)
}

pub fn build_r_table_with_cap<T: Real>(
    num: &NumeratorSpec<T>,
    m_max: usize,
    n_max: usize,
    cap: usize,
) -> Result<PolyTable<T>> {
    let cols = n_max + 1;
    let z = Poly::var();
    let mut entries: Vec<Poly<T>> = Vec::with_capacity((m_max + 1) * cols);
    let mut total = 0usize;
    for m in 0..=m_max {
        for n in 0..=n_max {
            let mut acc = num.rhs_poly(m, n);
            if m > 0 {
                acc = &acc - &entries[(m - 1) * cols + n];
            }
            if n > 0 {
                acc = &acc - &entries[m * cols + n - 1];
            }
            if m > 0 && n > 0 {
                acc = &acc - &(&z * &entries[(m - 1) * cols + n - 1]);
            }
            check_cap(&mut total, acc.coeffs().len(), cap)?;
            entries.push(acc);
        }
    }
    Ok(PolyTable {
        kind: TableKind::GeneralR,
        m_max,
        n_max,
        entries,
        source: TableSource::Numerator(num.clone()),
    })
}

fn exact_entry_triple<T: Real>(t: &CoefficientTriple<T>, m: usize, n: usize) -> ExactPoly {
    let a = ExactPoly::from_poly(&t.a);
    let b = ExactPoly::from_poly(&t.b);
    let c = ExactPoly::from_poly(&t.c);
    let mut prev: Vec<ExactPoly> = Vec::new();
    let mut cur: Vec<ExactPoly> = Vec::new();
    for i in 0..=m {
        cur.clear();
        for j in 0..=n {
            let e = if i == 0 && j == 0 {
                ExactPoly::one()
            } else {
                let mut acc = ExactPoly::zero();
                if i > 0 {
                    acc = acc.add(&a.mul(&prev[j]));
                }
                if j > 0 {
                    acc = acc.add(&b.mul(&cur[j - 1]));
                }
                if i > 0 && j > 0 {
                    acc = acc.add(&c.mul(&prev[j - 1]));
                }
                acc.neg()
            };
            cur.push(e);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n].clone()
}

fn exact_entry_numerator<T: Real>(num: &NumeratorSpec<T>, m: usize, n: usize) -> ExactPoly {
    let mut prev: Vec<ExactPoly> = Vec::new();
    let mut cur: Vec<ExactPoly> = Vec::new();
    for i in 0..=m {
        cur.clear();
        for j in 0..=n {
            let mut acc = ExactPoly::from_poly(&num.rhs_poly(i, j));
            if i > 0 {
                acc = acc.add(&prev[j].neg());
            }
            if j > 0 {
                acc = acc.add(&cur[j - 1].neg());
            }
            if i > 0 && j > 0 {
                acc = acc.add(&prev[j - 1].mul_shift(1).neg());
            }
            cur.push(acc);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n].clone()
}

/// Closed form for Q_{m,n}: sum_{k=0}^{m} (-1)^{m+k} C(n,k) z^{m-k} when
/// m < n, and (-1)^m (z-1)^n z^{m-n} when m >= n. Exact integer binomials.
pub fn q_closed_form<T: Real>(m: usize, n: usize) -> Result<Poly<T>> {
    if m < n {
        let coeffs = (0..=m)
            .map(|j| {
                // coefficient of z^j, j = m - k
                let b = binomial(n as u64, (m - j) as u64)?;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Ok(Complex::new(cast::<T>(sign * b as f64), T::zero()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    } else {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); m + 1];
        for k in 0..=n {
            // (z-1)^n = sum_k (-1)^{n-k} C(n,k) z^k, shifted by z^{m-n}
            let b = binomial(n as u64, k as u64)?;
            let parity = (m + n - k) % 2; // (-1)^m * (-1)^{n-k}
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            coeffs[m - n + k] = Complex::new(cast::<T>(sign * b as f64), T::zero());
        }
        Ok(Poly::new(coeffs))
    }
}

/// One-index recurrence oracle for Q_{m,n}: z Q_{m-1,n} + Q_{m,n} equals
/// C(n,m) for 1 <= m <= n and 0 for m > n, with Q_{0,n} = 1. Kept independent
/// of the closed form so the two can check each other.
pub fn q_series_oracle<T: Real>(m: usize, n: usize) -> Result<Poly<T>> {
    let mut q = Poly::one();
    let z = Poly::var();
    for i in 1..=m {
        let rhs = if i <= n {
            Poly::constant(Complex::new(
                cast::<T>(binomial(n as u64, i as u64)? as f64),
                T::zero(),
            ))
        } else {
            Poly::zero()
        };
        q = &rhs - &(&z * &q);
    }
    Ok(q)
}

/// Collapses the table onto the diagonals: S_N = sum_{m+2n=N} P_{m,n} and
/// R_N = sum_{m+n=N} P_{m,n}, for N = 0..=n_target.
pub fn collapse_sequences<T: Real>(
    table: &PolyTable<T>,
    n_target: usize,
) -> Result<(Vec<Poly<T>>, Vec<Poly<T>>)> {
    let mut s_seq = Vec::with_capacity(n_target + 1);
    let mut r_seq = Vec::with_capacity(n_target + 1);
    for total in 0..=n_target {
        let mut s = Poly::zero();
        for n in 0..=total / 2 {
            let m = total - 2 * n;
            s = &s + table.entry(m, n)?;
        }
        s_seq.push(s);
        let mut r = Poly::zero();
        for n in 0..=total {
            let m = total - n;
            r = &r + table.entry(m, n)?;
        }
        r_seq.push(r);
    }
    Ok((s_seq, r_seq))
}
