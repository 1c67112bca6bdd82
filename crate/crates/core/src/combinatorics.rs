//! Stirling and Eulerian numbers, the `s_nk` polynomials, partial Bell
//! polynomials and bounded compositions.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::signed_log::{Approx, SignedLog, SignedSum};

/// Default table size; caps the total copula dimension.
pub const DEFAULT_NMAX: usize = 64;

/// Cancellation factor above which `s_poly` switches to the Bell recurrence
/// when that route is available (x in (0, 1]).
const S_POLY_FALLBACK_CANCELLATION: f64 = 1e3;

/// Largest `n` accepted by the enumeration-based Bell oracle.
pub const BELL_ENUM_MAX: usize = 20;

/// Exact Stirling numbers of both kinds together with log-magnitude copies.
#[derive(Debug, Clone)]
pub struct StirlingTables {
    nmax: usize,
    s1: Vec<Vec<BigInt>>,
    s2: Vec<Vec<BigInt>>,
    ln_s1: Vec<Vec<f64>>,
    ln_s2: Vec<Vec<f64>>,
}

impl StirlingTables {
    pub fn new(nmax: usize) -> Self {
        let mut s1 = vec![vec![BigInt::zero(); nmax + 1]; nmax + 1];
        let mut s2 = vec![vec![BigInt::zero(); nmax + 1]; nmax + 1];
        s1[0][0] = BigInt::one();
        s2[0][0] = BigInt::one();
        for n in 0..nmax {
            for k in 1..=n + 1 {
                let nb = BigInt::from(n);
                let kb = BigInt::from(k);
                s1[n + 1][k] = &s1[n][k - 1] - &nb * &s1[n][k];
                s2[n + 1][k] = &s2[n][k - 1] + &kb * &s2[n][k];
            }
        }
        let logs = |t: &Vec<Vec<BigInt>>| -> Vec<Vec<f64>> {
            t.iter()
                .map(|row| row.iter().map(ln_abs_bigint).collect())
                .collect()
        };
        let ln_s1 = logs(&s1);
        let ln_s2 = logs(&s2);
        StirlingTables {
            nmax,
            s1,
            s2,
            ln_s1,
            ln_s2,
        }
    }

    /// Shared tables with `nmax = DEFAULT_NMAX`.
    pub fn global() -> &'static StirlingTables {
        static TABLES: OnceLock<StirlingTables> = OnceLock::new();
        TABLES.get_or_init(|| StirlingTables::new(DEFAULT_NMAX))
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    fn check(&self, n: usize, k: usize) -> Result<()> {
        if n > self.nmax || k > self.nmax {
            return Err(Error::arg(format!(
                "Stirling index ({n}, {k}) exceeds table size {}",
                self.nmax
            )));
        }
        Ok(())
    }

    pub fn stirling1(&self, n: usize, k: usize) -> Result<BigInt> {
        self.check(n, k)?;
        Ok(self.s1[n][k].clone())
    }

    pub fn stirling2(&self, n: usize, k: usize) -> Result<BigInt> {
        self.check(n, k)?;
        Ok(self.s2[n][k].clone())
    }

    /// `ln |s(n,k)|`; `-inf` when the number is zero. Indices must be in range.
    pub fn ln_abs_s1(&self, n: usize, k: usize) -> f64 {
        self.ln_s1[n][k]
    }

    /// `ln S(n,k)`; `-inf` when the number is zero. Indices must be in range.
    pub fn ln_s2(&self, n: usize, k: usize) -> f64 {
        self.ln_s2[n][k]
    }

    /// Sign of `s(n,k)`, which is `(-1)^(n-k)` when nonzero.
    pub fn sign_s1(&self, n: usize, k: usize) -> i8 {
        if self.s1[n][k].is_zero() {
            0
        } else if (n - k) % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

/// Stirling number of the first kind from the shared tables.
pub fn stirling1(n: usize, k: usize) -> Result<BigInt> {
    StirlingTables::global().stirling1(n, k)
}

/// Stirling number of the second kind from the shared tables.
pub fn stirling2(n: usize, k: usize) -> Result<BigInt> {
    StirlingTables::global().stirling2(n, k)
}

pub(crate) fn ln_abs_bigint(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let a = x.abs();
    match a.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let shift = a.bits().saturating_sub(60);
            let top = (&a >> shift).to_f64().unwrap_or(f64::INFINITY);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// `ln n!`, tabulated for small `n`.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(1025);
        let mut acc = 0.0;
        t.push(0.0);
        for i in 1..=1024 {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    });
    if n < table.len() {
        table[n]
    } else {
        table[table.len() - 1] + ((table.len())..=n).map(|i| (i as f64).ln()).sum::<f64>()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `x (x-1) ... (x-n+1)`; the empty product for `n = 0`.
pub fn falling_factorial(x: f64, n: usize) -> f64 {
    (0..n).map(|i| x - i as f64).product()
}

/// Falling factorial in signed log space.
pub fn falling_factorial_log(x: f64, n: usize) -> SignedLog {
    (0..n).fold(SignedLog::ONE, |acc, i| acc * SignedLog::from_f64(x - i as f64))
}

fn check_poly_args(n: usize, x: f64, tables: &StirlingTables) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("s_nk requires n >= 1"));
    }
    if n > tables.nmax() {
        return Err(Error::arg(format!(
            "order {n} exceeds table size {}",
            tables.nmax()
        )));
    }
    if !x.is_finite() {
        return Err(Error::arg(format!("non-finite argument {x}")));
    }
    Ok(())
}

/// `s_nk(x) = sum_{l=k}^n s(n,l) S(l,k) x^l` for a single `k`.
pub fn s_poly(n: usize, k: usize, x: f64) -> Result<Approx> {
    if k == 0 || k > n {
        check_poly_args(n, x, StirlingTables::global())?;
        return Ok(Approx::exact(SignedLog::ZERO));
    }
    Ok(s_poly_row(n, x)?[k])
}

/// All of `s_n0(x), ..., s_nn(x)` (entry `k` at index `k`).
///
/// Coefficients are exact integers summed in sign-separated log-space
/// accumulators. When `x` is in `(0, 1]` and that sum shows noticeable
/// cancellation, the row is recomputed with the Bell recurrence on the falling
/// factorials `(x)_l`, whose terms then all share one sign.
pub fn s_poly_row(n: usize, x: f64) -> Result<Vec<Approx>> {
    let tables = StirlingTables::global();
    check_poly_args(n, x, tables)?;
    if x == 1.0 {
        let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
        row[n] = Approx::exact(SignedLog::ONE);
        return Ok(row);
    }
    let row = s_poly_row_direct(tables, n, x);
    let worst = row.iter().map(|a| a.cancellation).fold(1.0, f64::max);
    if worst > S_POLY_FALLBACK_CANCELLATION && x > 0.0 && x < 1.0 {
        let xs: Vec<SignedLog> = (1..=n).map(|l| falling_factorial_log(x, l)).collect();
        let tri = bell_triangle(&xs)?;
        return Ok(tri[n].clone());
    }
    Ok(row)
}

fn s_poly_row_direct(tables: &StirlingTables, n: usize, x: f64) -> Vec<Approx> {
    let lx = SignedLog::from_f64(x);
    let powers: Vec<SignedLog> = (0..=n).map(|l| lx.powi(l)).collect();
    let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        let mut acc = SignedSum::new();
        for l in k..=n {
            let c = SignedLog::new(tables.sign_s1(n, l), tables.ln_abs_s1(n, l) + tables.ln_s2(l, k));
            acc.push(c * powers[l]);
        }
        *slot = acc.finish();
    }
    row
}

/// `sum_{l=k}^n S(n,l) s(l,k) x^l` for all `k` (index `k`).
///
/// This transposed ordering of the Stirling numbers gives the partial Bell
/// polynomials of `(1, -1!, 2!, -3!, ...)` scaled by `x^l`, which is what the
/// Ali-Mikhail-Haq node derivatives produce.
pub fn s_poly_dual_row(n: usize, x: f64) -> Result<Vec<Approx>> {
    let tables = StirlingTables::global();
    check_poly_args(n, x, tables)?;
    let lx = SignedLog::from_f64(x);
    let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        let mut acc = SignedSum::new();
        for l in k..=n {
            let c = SignedLog::new(tables.sign_s1(l, k), tables.ln_s2(n, l) + tables.ln_abs_s1(l, k));
            acc.push(c * lx.powi(l));
        }
        *slot = acc.finish();
    }
    Ok(row)
}

/// Partial Bell polynomials `B_{m,j}(x_1, ..., x_{m-j+1})` for all
/// `0 <= j <= m <= n` where `n = xs.len()`.
///
/// `result[m][j]` holds `B_{m,j}`; `B_{0,0} = 1`. Uses the recurrence
/// `B_{m,j} = sum_i C(m-1, i-1) x_i B_{m-i, j-1}`.
pub fn bell_triangle(xs: &[SignedLog]) -> Result<Vec<Vec<Approx>>> {
    bell_triangle_approx(&xs.iter().copied().map(Approx::exact).collect::<Vec<_>>())
}

/// As [`bell_triangle`] with inputs that carry their own cancellation factors.
pub fn bell_triangle_approx(xs: &[Approx]) -> Result<Vec<Vec<Approx>>> {
    let n = xs.len();
    let mut b = vec![vec![Approx::exact(SignedLog::ZERO); n + 1]; n + 1];
    b[0][0] = Approx::exact(SignedLog::ONE);
    for m in 1..=n {
        for j in 1..=m {
            let mut acc = SignedSum::new();
            for i in 1..=m - j + 1 {
                let prev = b[m - i][j - 1];
                if prev.value.is_zero() {
                    continue;
                }
                let coef = SignedLog::from_ln(ln_binomial(m - 1, i - 1));
                let term = coef * xs[i - 1].value * prev.value;
                acc.push_approx(Approx {
                    value: term,
                    cancellation: prev.cancellation.max(xs[i - 1].cancellation),
                });
            }
            b[m][j] = acc.finish();
        }
    }
    Ok(b)
}

/// `B_{n,k}(x_1, ..., x_{n-k+1})` via the recurrence.
pub fn bell_partial(n: usize, k: usize, xs: &[SignedLog]) -> Result<SignedLog> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::arg(format!("bell_partial needs 1 <= k <= n, got n={n}, k={k}")));
    }
    if xs.len() != n - k + 1 {
        return Err(Error::arg(format!(
            "bell_partial({n},{k}) needs {} arguments, got {}",
            n - k + 1,
            xs.len()
        )));
    }
    let mut padded = xs.to_vec();
    padded.resize(n, SignedLog::ZERO);
    Ok(bell_triangle(&padded)?[n][k].value)
}

/// The index set `P_{n,k}`: vectors `j` of length `n-k+1` with
/// `sum i*j_i = n` and `sum j_i = k`.
pub fn bell_index_set(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, len: usize, rem_n: usize, rem_k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i > len {
            if rem_n == 0 && rem_k == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let max_j = (rem_n / i).min(rem_k);
        for j in 0..=max_j {
            cur.push(j);
            rec(i + 1, len, rem_n - i * j, rem_k - j, cur, out);
            cur.pop();
        }
    }
    if k == 0 || k > n {
        return Vec::new();
    }
    let len = n - k + 1;
    let mut out = Vec::new();
    rec(1, len, n, k, &mut Vec::with_capacity(len), &mut out);
    out
}

/// `B_{n,k}` by explicit enumeration of `P_{n,k}` with multinomial weights.
/// Refuses `n > 20`.
pub fn bell_partial_enumerated(n: usize, k: usize, xs: &[SignedLog]) -> Result<SignedLog> {
    if n > BELL_ENUM_MAX {
        return Err(Error::arg(format!(
            "enumeration of P_(n,k) refused for n = {n} > {BELL_ENUM_MAX}"
        )));
    }
    if n == 0 || k == 0 || k > n {
        return Err(Error::arg(format!("bell_partial needs 1 <= k <= n, got n={n}, k={k}")));
    }
    if xs.len() != n - k + 1 {
        return Err(Error::arg(format!(
            "bell_partial({n},{k}) needs {} arguments, got {}",
            n - k + 1,
            xs.len()
        )));
    }
    let mut acc = SignedSum::new();
    for j in bell_index_set(n, k) {
        let mut term = SignedLog::from_ln(ln_factorial(n));
        for (idx, &ji) in j.iter().enumerate() {
            if ji == 0 {
                continue;
            }
            let l = idx + 1;
            let scaled = xs[idx] / SignedLog::from_ln(ln_factorial(l));
            term = term * scaled.powi(ji) / SignedLog::from_ln(ln_factorial(ji));
        }
        acc.push(term);
    }
    Ok(acc.value())
}

/// Eulerian number `A(n,k)`.
pub fn eulerian(n: usize, k: usize) -> BigUint {
    if k >= n.max(1) {
        return if n == 0 && k == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut v = BigUint::zero();
            if j < row.len() {
                v += &row[j] * BigUint::from(j + 1);
            }
            if j >= 1 && j - 1 < row.len() {
                v += &row[j - 1] * BigUint::from(m - j);
            }
            *slot = v;
        }
        row = next;
    }
    row[k].clone()
}

/// `ln A(n,k)` for `k < n`, cached up to `DEFAULT_NMAX + 2`.
pub(crate) fn ln_eulerian_row(n: usize) -> Vec<f64> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=DEFAULT_NMAX + 2)
            .map(|m| {
                (0..m.max(1))
                    .map(|k| ln_abs_bigint(&BigInt::from(eulerian(m, k))))
                    .collect()
            })
            .collect()
    });
    if n < table.len() {
        table[n].clone()
    } else {
        (0..n.max(1))
            .map(|k| ln_abs_bigint(&BigInt::from(eulerian(n, k))))
            .collect()
    }
}

/// Integer vectors `j` with `1 <= j_s <= d_s` and `sum j_s = k`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSet {
    pub d_vec: Vec<usize>,
    pub k: usize,
    pub elements: Vec<Vec<usize>>,
}

impl CompositionSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Eagerly collects [`compositions_iter`].
pub fn bounded_compositions(d_vec: &[usize], k: usize) -> CompositionSet {
    CompositionSet {
        d_vec: d_vec.to_vec(),
        k,
        elements: compositions_iter(d_vec, k).collect(),
    }
}

/// Lazily enumerates bounded compositions in lexicographic order.
pub fn compositions_iter(d_vec: &[usize], k: usize) -> CompositionIter {
    CompositionIter::new(d_vec, k)
}

#[derive(Debug, Clone)]
pub struct CompositionIter {
    d: Vec<usize>,
    /// Suffix sums of the upper bounds: `cap[i] = sum_{s>=i} d_s`.
    cap: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl CompositionIter {
    fn new(d_vec: &[usize], k: usize) -> Self {
        let m = d_vec.len();
        let mut cap = vec![0; m + 1];
        for i in (0..m).rev() {
            cap[i] = cap[i + 1] + d_vec[i];
        }
        let valid = m >= 1 && d_vec.iter().all(|&d| d >= 1) && k >= m && k <= cap[0];
        let current = if valid {
            Some(Self::smallest_from(d_vec, &cap, 0, k, Vec::with_capacity(m)))
        } else {
            None
        };
        CompositionIter {
            d: d_vec.to_vec(),
            cap,
            current,
        }
    }

    /// Lexicographically smallest completion of `prefix` (positions `< i`)
    /// summing to `rem` over positions `i..`.
    fn smallest_from(d: &[usize], cap: &[usize], i: usize, mut rem: usize, mut prefix: Vec<usize>) -> Vec<usize> {
        let m = d.len();
        for s in i..m {
            let remaining_slots = m - s - 1;
            // Need rem - j <= cap[s+1] and rem - j >= remaining_slots.
            let lo = rem.saturating_sub(cap[s + 1]).max(1);
            debug_assert!(lo <= d[s] && rem - lo >= remaining_slots);
            prefix.push(lo);
            rem -= lo;
        }
        prefix
    }
}

impl Iterator for CompositionIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let m = cur.len();
        // Find the rightmost position that can be incremented while the
        // suffix after it can still absorb the remainder.
        let mut suffix_sum = 0;
        let mut successor = None;
        for i in (0..m).rev() {
            let rem_after = suffix_sum;
            if i + 1 < m && cur[i] < self.d[i] && rem_after > m - i - 1 {
                let mut prefix = cur[..i].to_vec();
                prefix.push(cur[i] + 1);
                successor = Some(Self::smallest_from(&self.d, &self.cap, i + 1, rem_after - 1, prefix));
                break;
            }
            suffix_sum += cur[i];
        }
        self.current = successor;
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling1(0, 0).unwrap(), BigInt::from(1));
        assert_eq!(stirling1(5, 0).unwrap(), BigInt::from(0));
        assert_eq!(stirling1(3, 1).unwrap(), BigInt::from(2));
        assert_eq!(stirling1(3, 2).unwrap(), BigInt::from(-3));
        assert_eq!(stirling2(0, 0).unwrap(), BigInt::from(1));
        assert_eq!(stirling2(6, 6).unwrap(), BigInt::from(1));
        assert_eq!(stirling2(4, 2).unwrap(), BigInt::from(7));
        assert_eq!(stirling2(6, 3).unwrap(), BigInt::from(90));
        assert!(stirling1(65, 1).is_err());
        assert!(StirlingTables::new(80).stirling1(70, 3).is_ok());
    }

    #[test]
    fn stirling_beyond_64_bits_is_exact() {
        // |s(25,1)| = 24!
        let f24: BigInt = (1..=24u64).map(BigInt::from).product();
        assert_eq!(stirling1(25, 1).unwrap(), f24);
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(2.7, 0), 1.0);
        assert_eq!(falling_factorial(3.0, 3), 6.0);
        assert_eq!(falling_factorial(0.5, 2), -0.25);
    }

    #[test]
    fn s_poly_examples() {
        let v = s_poly(1, 1, 0.7).unwrap().value.to_f64();
        assert!(rel(v, 0.7) < 1e-15);
        // s_22(x) = x^2, s_21(x) = -x + x^2
        assert!(rel(s_poly(2, 2, 0.5).unwrap().value.to_f64(), 0.25) < 1e-15);
        assert!(rel(s_poly(2, 1, 0.5).unwrap().value.to_f64(), -0.25) < 1e-15);
        assert!(s_poly(0, 1, 0.5).is_err());
        assert!(s_poly(3, 4, 0.5).unwrap().value.is_zero());
    }

    #[test]
    fn s_poly_at_one_is_kronecker() {
        let row = s_poly_row(7, 1.0).unwrap();
        for (k, a) in row.iter().enumerate() {
            assert_eq!(a.value.is_zero(), k != 7);
        }
    }

    #[test]
    fn s_poly_sign_pattern_up_to_twenty() {
        for &x in &[0.1, 0.5, 0.9, 1.0] {
            for n in 1..=20 {
                let row = s_poly_row(n, x).unwrap();
                for k in 1..=n {
                    if x == 1.0 && k < n {
                        continue;
                    }
                    let expect = if (n - k) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(row[k].value.sign(), expect, "n={n} k={k} x={x}");
                    assert!(!row[k].precision_warning());
                }
            }
        }
    }

    #[test]
    fn dual_row_small_cases() {
        let x = 1.7;
        let row = s_poly_dual_row(4, x).unwrap();
        // k=4: S(4,4)s(4,4)x^4
        assert!(rel(row[4].value.to_f64(), x.powi(4)) < 1e-14);
        // k=3: S(4,3)s(3,3)x^3 + S(4,4)s(4,3)x^4 = 6x^3 - 6x^4
        assert!(rel(row[3].value.to_f64(), 6.0 * x.powi(3) - 6.0 * x.powi(4)) < 1e-13);
    }

    #[test]
    fn bell_examples() {
        let x1 = SignedLog::from_f64(1.3);
        let x2 = SignedLog::from_f64(-0.4);
        assert!(rel(bell_partial(1, 1, &[x1]).unwrap().to_f64(), 1.3) < 1e-15);
        assert!(rel(bell_partial(2, 1, &[x1, x2]).unwrap().to_f64(), -0.4) < 1e-15);
        assert!(rel(bell_partial(3, 2, &[x1, x2]).unwrap().to_f64(), 3.0 * 1.3 * -0.4) < 1e-14);
        assert!(rel(bell_partial_enumerated(3, 2, &[x1, x2]).unwrap().to_f64(), 3.0 * 1.3 * -0.4) < 1e-14);
        let ones = vec![SignedLog::ONE; 4];
        assert!(rel(bell_partial(6, 3, &ones).unwrap().to_f64(), 90.0) < 1e-13);
        assert!(bell_partial(3, 2, &[x1]).is_err());
        assert!(bell_partial_enumerated(21, 2, &vec![SignedLog::ONE; 20]).is_err());
    }

    #[test]
    fn bell_alternating_argument_identity() {
        let (n, k, x) = (5usize, 2usize, 1.5f64);
        let xs: Vec<SignedLog> = (1..=n - k + 1)
            .map(|l| SignedLog::from_f64(if l % 2 == 1 { -x } else { x }))
            .collect();
        let got = bell_partial(n, k, &xs).unwrap().to_f64();
        let s = stirling2(n, k).unwrap().to_f64().unwrap();
        let expect = -s * x * x;
        assert!(rel(got, expect) < 1e-12);
    }

    #[test]
    fn eulerian_examples() {
        assert_eq!(eulerian(0, 0), BigUint::from(1u32));
        assert_eq!(eulerian(3, 1), BigUint::from(4u32));
        let row: BigUint = (0..5).map(|k| eulerian(5, k)).sum();
        assert_eq!(row, BigUint::from(120u32));
        assert_eq!(eulerian(3, 3), BigUint::zero());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(bounded_compositions(&[2, 2], 2).elements, vec![vec![1, 1]]);
        assert_eq!(bounded_compositions(&[2, 2], 3).elements, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(bounded_compositions(&[2, 2], 4).elements, vec![vec![2, 2]]);
        assert!(bounded_compositions(&[2, 2], 5).is_empty());
        assert!(bounded_compositions(&[2, 2], 1).is_empty());
        assert_eq!(bounded_compositions(&[1, 3, 1], 4).elements, vec![vec![1, 2, 1]]);
    }

    #[test]
    fn compositions_are_lexicographic() {
        let set = bounded_compositions(&[3, 1, 4, 2], 6);
        for w in set.elements.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    fn brute_force_compositions(d: &[usize], k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &ds in d {
            let mut next = Vec::new();
            for p in &out {
                for j in 1..=ds {
                    let mut q = p.clone();
                    q.push(j);
                    next.push(q);
                }
            }
            out = next;
        }
        out.retain(|j| j.iter().sum::<usize>() == k);
        out.sort();
        out
    }

    proptest! {
        #[test]
        fn compositions_match_brute_force(d in proptest::collection::vec(1usize..5, 1..5), extra in 0usize..12) {
            let k = d.len() + extra;
            prop_assert_eq!(bounded_compositions(&d, k).elements, brute_force_compositions(&d, k));
        }

        #[test]
        fn bell_recurrence_matches_enumeration(n in 1usize..=10, kk in 0usize..10, seed in proptest::collection::vec(0.1f64..2.0, 10)) {
            let k = 1 + kk % n;
            let xs: Vec<SignedLog> = seed[..n - k + 1].iter().map(|&v| SignedLog::from_f64(v)).collect();
            let a = bell_partial(n, k, &xs).unwrap().to_f64();
            let b = bell_partial_enumerated(n, k, &xs).unwrap().to_f64();
            prop_assert!(rel(a, b) < 1e-12);
        }
    }
}
