//! Brute-force verifiers kept independent of the main evaluation path:
//! finite differences of the CDF (built from `psi` and `psi_inv` only),
//! exact rational `s_nk`, truncated polylog series, enumeration of `b_k`, and
//! a Halton sequence for quasi-Monte-Carlo checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::combinatorics::{bounded_compositions, stirling1, stirling2};
use crate::error::{Error, Result};
use crate::tree::{NacChild, NacTree};

/// Largest dimension accepted by the mixed-partial oracle (the stencil has
/// `2^d` points per level).
pub const FD_MAX_DIM: usize = 5;

fn cdf_plain(tree: &NacTree, u: &[f64]) -> f64 {
    let g = tree.generator();
    let mut t = 0.0;
    for c in tree.children() {
        let v = match c {
            NacChild::Leaf(i) => u[*i],
            NacChild::Node(sub) => cdf_plain(sub, u),
        };
        t += g.psi_inv(v.clamp(0.0, 1.0)).unwrap_or(f64::INFINITY);
    }
    g.psi(t)
}

/// Default step for a `d`-fold central difference, shrunk to stay inside
/// the unit cube.
pub fn default_step(u: &[f64]) -> f64 {
    let d = u.len() as f64;
    let h = 0.5 * f64::EPSILON.powf(1.0 / (d + 4.0));
    let room = u.iter().map(|&x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min);
    h.min(0.4 * room)
}

fn central_mixed(f: &dyn Fn(&[f64]) -> f64, u: &[f64], h: f64) -> f64 {
    let d = u.len();
    let mut x = u.to_vec();
    let mut acc = 0.0;
    for mask in 0u32..(1 << d) {
        let mut sign = 1.0;
        for (i, xi) in x.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *xi = u[i] + h;
            } else {
                *xi = u[i] - h;
                sign = -sign;
            }
        }
        acc += sign * f(&x);
    }
    acc / (2.0 * h).powi(d as i32)
}

/// `d`-fold mixed central difference of `f` at `u` with step `h`, with one
/// level of Richardson extrapolation when `richardson` is set.
pub fn fd_mixed_partial_fn(f: &dyn Fn(&[f64]) -> f64, u: &[f64], h: f64, richardson: bool) -> Result<f64> {
    if u.is_empty() || u.len() > FD_MAX_DIM {
        return Err(Error::arg(format!(
            "mixed finite differences are limited to 1 <= d <= {FD_MAX_DIM}"
        )));
    }
    if !(h > 0.0) {
        return Err(Error::arg("finite-difference step must be positive"));
    }
    let coarse = central_mixed(f, u, h);
    if !richardson {
        return Ok(coarse);
    }
    let fine = central_mixed(f, u, h / 2.0);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `d^d C / du_1 ... du_d` at `u` by Richardson-extrapolated central
/// differences of the CDF with step `step`.
pub fn fd_mixed_partial(tree: &NacTree, u: &[f64], step: f64) -> Result<f64> {
    tree.validate()?;
    if u.len() != tree.dim() {
        return Err(Error::arg("point dimension does not match the structure"));
    }
    fd_mixed_partial_fn(&|x| cdf_plain(tree, x), u, step, true)
}

/// [`fd_mixed_partial`] with [`default_step`].
pub fn fd_density(tree: &NacTree, u: &[f64]) -> Result<f64> {
    fd_mixed_partial(tree, u, default_step(u))
}

/// `k`-th derivative of `f` at `x` from central differences with steps
/// `h, h/2, ..., h/2^(levels-1)` combined by Richardson extrapolation.
pub fn fd_derivative(f: &dyn Fn(f64) -> f64, x: f64, k: usize, h: f64, levels: usize) -> f64 {
    let diff = |h: f64| {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + (k as f64 / 2.0 - j as f64) * h);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        acc / h.powi(k as i32)
    };
    let levels = levels.max(1);
    let mut table: Vec<f64> = (0..levels).map(|i| diff(h / 2f64.powi(i as i32))).collect();
    for m in 1..levels {
        let factor = 4f64.powi(m as i32);
        for i in (m..levels).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
    }
    table[levels - 1]
}

/// [`fd_derivative`] over the steps `h_max / 2^i`, returning the estimate
/// that changed least from the previous step.
pub fn fd_derivative_adaptive(f: &dyn Fn(f64) -> f64, x: f64, k: usize, h_max: f64) -> f64 {
    let est: Vec<f64> = (0..10).map(|i| fd_derivative(f, x, k, h_max / 2f64.powi(i), 3)).collect();
    let mut best = est[1];
    let mut best_change = f64::INFINITY;
    for i in 1..est.len() {
        let change = (est[i] - est[i - 1]).abs();
        if change < best_change {
            best_change = change;
            best = est[i];
        }
    }
    best
}

/// `sum_{l=k}^n s(n,l) S(l,k) x^l` in exact rational arithmetic.
pub fn s_poly_rational(n: usize, k: usize, x: &BigRational) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    let mut pow = BigRational::one();
    for l in 0..=n {
        if l >= k {
            let c = stirling1(n, l)? * stirling2(l, k)?;
            acc += BigRational::from_integer(c) * &pow;
        }
        pow *= x;
    }
    Ok(acc)
}

/// Falling factorial `(x)_n` in rationals.
pub fn falling_factorial_rational(x: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..n {
        acc *= x - BigRational::from_integer(BigInt::from(i));
    }
    acc
}

/// `Li_{-n}(z) = sum_{j>=1} j^n z^j` summed until the terms are negligible.
pub fn polylog_series(n: usize, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::arg("polylog series needs |z| < 1"));
    }
    let mut acc = 0.0;
    let mut zj = 1.0;
    for j in 1..2_000_000u64 {
        zj *= z;
        let term = (j as f64).powi(n as i32) * zj;
        acc += term;
        if j as f64 > n as f64 / -z.abs().ln() && term.abs() < 1e-18 * acc.abs() {
            return Ok(acc);
        }
    }
    Err(Error::Numerical("polylog series did not converge".into()))
}

/// `b_k = sum over j in Q(d, k) of prod_s a_s[j_s]`, where `a[s][j]` is the
/// coefficient of `x^j` of child `s` (index 0 unused).
pub fn b_coeff_by_enumeration(a: &[Vec<f64>], k: usize) -> f64 {
    let d_vec: Vec<usize> = a.iter().map(|r| r.len() - 1).collect();
    bounded_compositions(&d_vec, k)
        .elements
        .iter()
        .map(|j| j.iter().zip(a).map(|(&js, row)| row[js]).product::<f64>())
        .sum()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Point `i` (starting at 1) of the Halton sequence in `dim <= 10`
/// dimensions.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    PRIMES[..dim].iter().map(|&b| radical_inverse(i, b)).collect()
}

/// Outcome of one built-in self check.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Quick consistency checks of the main path against the oracles.
pub fn selftest() -> Vec<SelfCheck> {
    use crate::combinatorics::s_poly;
    use crate::density::{log_density, pdf2};
    use crate::dsl::parse;
    use crate::generators::polylog_neg;
    use crate::inner_coeffs::{CoeffMethod, NodePair};
    use crate::specialized::{pdf_clayton2, pdf_gumbel2};

    let mut out = Vec::new();
    let mut push = |name: &'static str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        out.push(SelfCheck { name, passed, detail });
    };

    push("s_poly vs exact rationals", (|| {
        let x = BigRational::new(BigInt::from(2), BigInt::from(5));
        let mut worst: f64 = 0.0;
        for n in 1..=15 {
            for k in 1..=n {
                let exact = s_poly_rational(n, k, &x)?;
                let e = exact.to_f64().unwrap_or(f64::NAN);
                let got = s_poly(n, k, 0.4)?.value.to_f64();
                worst = worst.max(((got - e) / e).abs());
            }
        }
        Ok((worst < 1e-10, format!("max rel err {worst:.2e}")))
    })());

    push("polylog vs series", (|| {
        let mut worst: f64 = 0.0;
        for n in 0..=8 {
            let a = polylog_neg(n, 0.6)?.exp();
            let b = polylog_series(n, 0.6)?;
            worst = worst.max(((a - b) / b).abs());
        }
        Ok((worst < 1e-12, format!("max rel err {worst:.2e}")))
    })());

    push("closed-form vs Bell coefficients", (|| {
        let t = parse("G(1.5; 1, G(2.5; 2, 3))")?;
        let NacChild::Node(sub) = &t.children()[1] else { unreachable!() };
        let pair = NodePair::new(t.generator(), sub.generator())?;
        let a = pair.a_coeff_table(6, 0.8, CoeffMethod::ClosedForm)?;
        let b = pair.a_coeff_table(6, 0.8, CoeffMethod::Bell)?;
        let mut worst: f64 = 0.0;
        for k in 1..=6 {
            let (x, y) = (a.get(k).to_f64(), b.get(k).to_f64());
            worst = worst.max(((x - y) / y).abs());
        }
        Ok((worst < 1e-10, format!("max rel err {worst:.2e}")))
    })());

    push("density vs finite differences", (|| {
        let mut worst: f64 = 0.0;
        for text in ["G(1.3333333333333333; 1, G(2; 2, 3))", "C(1; 1, C(2; 2, 3))"] {
            let t = parse(text)?;
            let u = [0.3, 0.5, 0.7];
            let a = pdf2(&t, &u)?;
            let b = fd_density(&t, &u)?;
            worst = worst.max(((a - b) / b).abs());
        }
        Ok((worst < 1e-3, format!("max rel err {worst:.2e}")))
    })());

    push("specialized vs generic", (|| {
        let mut worst: f64 = 0.0;
        let u = [0.2, 0.45, 0.8, 0.6];
        let g = parse("G(1.4; 1, G(2.5; 2, 3), 4)")?;
        let c = parse("C(0.7; 1, C(2; 2, 3), 4)")?;
        for (t, s) in [(&g, pdf_gumbel2(&g, &u)?), (&c, pdf_clayton2(&c, &u)?)] {
            let a = log_density(t, &u)?.value.exp();
            worst = worst.max(((a - s) / s).abs());
        }
        Ok((worst < 1e-9, format!("max rel err {worst:.2e}")))
    })());

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn independence_mixed_partial_is_one() {
        let t = parse("G(1; 1, G(1; 2, 3))").unwrap();
        assert!((fd_mixed_partial(&t, &[0.5, 0.5, 0.5], 0.05).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn refuses_large_dimension() {
        let t = parse("G(1.5; 1, 2, 3, 4, 5, 6)").unwrap();
        assert!(fd_mixed_partial(&t, &[0.5; 6], 0.01).is_err());
    }

    #[test]
    fn convergence_order() {
        let t = parse("C(1; 1, C(2; 2, 3))").unwrap();
        let u = [0.3, 0.5, 0.7];
        let exact = crate::density::pdf2(&t, &u).unwrap();
        let f = |x: &[f64]| cdf_plain(&t, x);
        let e1 = (fd_mixed_partial_fn(&f, &u, 0.04, false).unwrap() - exact).abs();
        let e2 = (fd_mixed_partial_fn(&f, &u, 0.02, false).unwrap() - exact).abs();
        assert!((e1 / e2).log2() >= 1.8, "order {}", (e1 / e2).log2());
    }

    #[test]
    fn derivative_of_exp() {
        for k in 0..=5 {
            let v = fd_derivative(&|x: f64| (-2.0 * x).exp(), 0.7, k, 0.4, 4);
            let exact = (-2.0f64).powi(k as i32) * (-1.4f64).exp();
            assert!(((v - exact) / exact).abs() < 1e-7, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn rational_identities() {
        let x = BigRational::new(BigInt::from(2), BigInt::from(5));
        // s_nn(x) = x^n
        let mut xn = BigRational::one();
        for n in 1..=10 {
            xn *= &x;
            assert_eq!(s_poly_rational(n, n, &x).unwrap(), xn);
        }
        // sum_k (-1)_k s_nk(x) = (-x)_n
        let neg_one = -BigRational::one();
        for n in 1..=15 {
            let mut lhs = BigRational::zero();
            for k in 1..=n {
                lhs += falling_factorial_rational(&neg_one, k) * s_poly_rational(n, k, &x).unwrap();
            }
            assert_eq!(lhs, falling_factorial_rational(&-x.clone(), n));
        }
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(halton(2, 2), vec![0.25, 2.0 / 3.0]);
    }

    #[test]
    fn polylog_series_small() {
        assert!((polylog_series(0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((polylog_series(1, 0.5).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn selftest_passes() {
        for c in selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
