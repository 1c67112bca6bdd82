//! Node functions `psi0^-1 o psi_s`, the coefficients `a_{s,nk}(t)` of the
//! inner generator derivatives and the Cauchy-product coefficients `b_k`.
//!
//! The n-th derivative of `exp(-v * node(t))` is `exp(-v * node(t))` times
//! the polynomial `sum_k a_{nk}(t) (-v)^k`; `a_{nk}` is the partial Bell
//! polynomial of the node derivatives. Closed forms exist for every family
//! pair supported here; the Bell route is kept as an alternative.

use crate::combinatorics::{
    bell_triangle_approx, falling_factorial_log, s_poly_dual_row, s_poly_row, StirlingTables,
};
use crate::error::{Error, Result};
use crate::generators::{ln_expm1, ln_one_minus_exp_neg, polylog_neg, Family, GeneratorSpec};
use crate::signed_log::{Approx, SignedLog, SignedSum, PRECISION_WARNING_THRESHOLD};

/// Cancellation factor of a closed-form row above which the Bell route is
/// also evaluated and the better-conditioned of the two is kept.
const CLOSED_FORM_FALLBACK_CANCELLATION: f64 = 1e3;

/// How to compute `a_{nk}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoeffMethod {
    /// Family-specific closed form, with the Bell route as fallback when the
    /// closed form loses precision.
    #[default]
    ClosedForm,
    /// Partial Bell polynomials of the node derivatives.
    Bell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairKind {
    /// Parent and child generators coincide; the node is the identity.
    Identity,
    /// Same tilted outer power family (covers Gumbel, `c = 0`, and Clayton,
    /// `c = 1`): node `(c^theta_s + t)^alpha - c^theta_0`.
    OuterPower { alpha: f64, c_theta_child: f64, c_theta_parent: f64 },
    Amh { theta0s: f64 },
    Joe { alpha: f64 },
    /// Joe node shifted by `h` plus `ln p0`.
    Frank { alpha: f64, h: f64, ln_p0: f64 },
    /// AMH parent with Clayton child.
    AmhClayton { theta0: f64, beta: f64 },
}

/// A parent/child generator pair satisfying the sufficient nesting condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePair {
    parent: GeneratorSpec,
    child: GeneratorSpec,
    kind: PairKind,
}

impl NodePair {
    pub fn new(parent: GeneratorSpec, child: GeneratorSpec) -> Result<Self> {
        let (fp, fc) = (parent.family(), child.family());
        let (tp, tc) = (parent.theta(), child.theta());
        let kind = if fp == fc {
            if tp > tc {
                return Err(Error::Config(format!(
                    "nesting condition violated: parent {parent} has a larger parameter than child {child}"
                )));
            }
            if tp == tc {
                PairKind::Identity
            } else {
                let alpha = tp / tc;
                match fp {
                    Family::Gumbel => PairKind::OuterPower {
                        alpha,
                        c_theta_child: 0.0,
                        c_theta_parent: 0.0,
                    },
                    Family::Clayton => PairKind::OuterPower {
                        alpha,
                        c_theta_child: 1.0,
                        c_theta_parent: 1.0,
                    },
                    Family::Tilted { c, .. } => PairKind::OuterPower {
                        alpha,
                        c_theta_child: c.powf(tc),
                        c_theta_parent: c.powf(tp),
                    },
                    Family::Amh => PairKind::Amh {
                        theta0s: (tc - tp) / (1.0 - tp),
                    },
                    Family::Joe => PairKind::Joe { alpha },
                    Family::Frank => {
                        let ps = -(-tc).exp_m1();
                        let p0 = -(-tp).exp_m1();
                        PairKind::Frank {
                            alpha,
                            h: -ps.ln(),
                            ln_p0: p0.ln(),
                        }
                    }
                }
            }
        } else if fp == Family::Amh && fc == Family::Clayton {
            if tc < 1.0 {
                return Err(Error::Config(format!(
                    "an AMH parent needs Clayton children with parameter >= 1, got {tc}"
                )));
            }
            PairKind::AmhClayton {
                theta0: tp,
                beta: 1.0 / tc,
            }
        } else {
            return Err(Error::unsupported(format!(
                "no closed form for a {} parent with a {} child",
                fp.name(),
                fc.name()
            )));
        };
        Ok(NodePair { parent, child, kind })
    }

    pub fn parent(&self) -> GeneratorSpec {
        self.parent
    }

    pub fn child(&self) -> GeneratorSpec {
        self.child
    }

    /// `theta_parent / theta_child` for same-family pairs.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            PairKind::Identity => Some(1.0),
            PairKind::OuterPower { alpha, .. } | PairKind::Joe { alpha } | PairKind::Frank { alpha, .. } => Some(alpha),
            PairKind::Amh { .. } | PairKind::AmhClayton { .. } => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.kind == PairKind::Identity
    }

    /// The node `psi_parent^-1(psi_child(t))`.
    pub fn node_value(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        match self.kind {
            PairKind::Identity => t,
            PairKind::OuterPower {
                alpha,
                c_theta_child,
                c_theta_parent,
            } => {
                if c_theta_child == 0.0 {
                    t.powf(alpha)
                } else {
                    // (c_s + t)^a - c_0 with c_s^a = c_0
                    c_theta_parent * (alpha * (t / c_theta_child).ln_1p()).exp_m1()
                }
            }
            PairKind::Amh { theta0s } => t + (-theta0s * (-t).exp()).ln_1p() - (-theta0s).ln_1p(),
            PairKind::Joe { alpha } => joe_node(alpha, t),
            PairKind::Frank { alpha, h, ln_p0 } => joe_node(alpha, t + h) + ln_p0,
            PairKind::AmhClayton { theta0, beta } => ((1.0 - theta0) * (beta * t.ln_1p()).exp_m1()).ln_1p(),
        }
    }

    /// `node^(k)(t)` for `k >= 1`; its sign is `(-1)^(k-1)`.
    pub fn node_deriv(&self, k: usize, t: f64) -> Result<Approx> {
        Ok(self.node_derivs(k, t)?[k - 1])
    }

    /// `node^(1)(t), ..., node^(n)(t)`.
    pub fn node_derivs(&self, n: usize, t: f64) -> Result<Vec<Approx>> {
        check_t(t)?;
        if n == 0 {
            return Err(Error::arg("derivative order must be >= 1"));
        }
        let out = match self.kind {
            PairKind::Identity => (1..=n)
                .map(|k| Approx::exact(if k == 1 { SignedLog::ONE } else { SignedLog::ZERO }))
                .collect(),
            PairKind::OuterPower { alpha, c_theta_child, .. } => {
                let ly = (c_theta_child + t).ln();
                (1..=n)
                    .map(|k| Approx::exact(falling_factorial_log(alpha, k) * SignedLog::from_ln((alpha - k as f64) * ly)))
                    .collect()
            }
            PairKind::Amh { theta0s } => {
                let z = theta0s * (-t).exp();
                let mut v = Vec::with_capacity(n);
                v.push(Approx::exact(SignedLog::from_ln(-(-z).ln_1p())));
                for k in 2..=n {
                    let mag = polylog_neg(k - 1, z)?;
                    v.push(Approx::exact(SignedLog::new(1, mag).alternate(k - 1)));
                }
                v
            }
            PairKind::Joe { alpha } => joe_node_derivs(alpha, n, t)?,
            PairKind::Frank { alpha, h, .. } => joe_node_derivs(alpha, n, t + h)?,
            PairKind::AmhClayton { theta0, beta } => amh_clayton_node_derivs(theta0, beta, n, t)?,
        };
        Ok(out)
    }

    /// Coefficient row `a_{n1}(t), ..., a_{nn}(t)`.
    pub fn a_coeff_table(&self, n: usize, t: f64, method: CoeffMethod) -> Result<CoeffTable> {
        if n == 0 {
            return Err(Error::arg("a-table needs n >= 1"));
        }
        let row = match method {
            CoeffMethod::Bell => self.bell_rows(n, t)?.swap_remove(n),
            CoeffMethod::ClosedForm => {
                let row = self.closed_form_row(n, t)?;
                if row_cancellation(&row) > CLOSED_FORM_FALLBACK_CANCELLATION {
                    let alt = self.bell_rows(n, t)?.swap_remove(n);
                    if row_cancellation(&alt) < row_cancellation(&row) {
                        alt
                    } else {
                        row
                    }
                } else {
                    row
                }
            }
        };
        Ok(CoeffTable::from_row(row))
    }

    /// Rows `1..=n` of the coefficient triangle (index 0 of the result is row 1).
    pub fn a_coeff_triangle(&self, n: usize, t: f64, method: CoeffMethod) -> Result<Vec<CoeffTable>> {
        if method == CoeffMethod::Bell {
            let rows = self.bell_rows(n, t)?;
            return Ok(rows.into_iter().skip(1).map(CoeffTable::from_row).collect());
        }
        (1..=n).map(|m| self.a_coeff_table(m, t, method)).collect()
    }

    /// Bell triangle over the node derivatives; `rows[m][k] = a_{mk}`.
    fn bell_rows(&self, n: usize, t: f64) -> Result<Vec<Vec<Approx>>> {
        let derivs = self.node_derivs(n, t)?;
        bell_triangle_approx(&derivs)
    }

    /// Closed-form row; entry `k` at index `k` (index 0 unused).
    fn closed_form_row(&self, n: usize, t: f64) -> Result<Vec<Approx>> {
        check_t(t)?;
        match self.kind {
            PairKind::Identity => {
                let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
                row[n] = Approx::exact(SignedLog::ONE);
                Ok(row)
            }
            PairKind::OuterPower { alpha, c_theta_child, .. } => {
                let ly = (c_theta_child + t).ln();
                let s = s_poly_row(n, alpha)?;
                Ok(s.iter()
                    .enumerate()
                    .map(|(k, a)| Approx {
                        value: a.value * SignedLog::from_ln((alpha * k as f64 - n as f64) * ly),
                        cancellation: a.cancellation,
                    })
                    .collect())
            }
            PairKind::Amh { theta0s } => {
                let x = 1.0 / (1.0 - theta0s * (-t).exp());
                s_poly_dual_row(n, x)
            }
            PairKind::Joe { alpha } => joe_closed_row(alpha, n, t),
            PairKind::Frank { alpha, h, .. } => joe_closed_row(alpha, n, t + h),
            PairKind::AmhClayton { theta0, beta } => amh_clayton_closed_row(theta0, beta, n, t),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Boundary {
            what: "node argument",
            value: t,
        });
    }
    Ok(())
}

fn row_cancellation(row: &[Approx]) -> f64 {
    row.iter()
        .filter(|a| !a.value.is_zero())
        .map(|a| a.cancellation)
        .fold(1.0, f64::max)
}

/// `-ln(1 - (1 - e^{-t})^alpha)`.
fn joe_node(alpha: f64, t: f64) -> f64 {
    let lw = alpha * ln_one_minus_exp_neg(t);
    -(-lw.exp_m1()).ln()
}

/// The Joe node is `f(alpha * f(t))` with `f(s) = -ln(1 - e^{-s})`, whose
/// derivatives are `(-1)^m Li_{1-m}(e^{-s})`.
fn joe_node_derivs(alpha: f64, n: usize, t: f64) -> Result<Vec<Approx>> {
    let f_derivs = |s: f64| -> Result<Vec<SignedLog>> {
        (1..=n)
            .map(|m| Ok(SignedLog::new(1, polylog_neg(m - 1, (-s).exp())?).alternate(m)))
            .collect()
    };
    let inner: Vec<Approx> = f_derivs(t)?
        .into_iter()
        .map(|d| Approx::exact(d * SignedLog::from_f64(alpha)))
        .collect();
    let s = -alpha * ln_one_minus_exp_neg(t);
    let outer = f_derivs(s)?;
    compose(&outer, &inner, n)
}

fn amh_clayton_node_derivs(theta0: f64, beta: f64, n: usize, t: f64) -> Result<Vec<Approx>> {
    let y = (beta * t.ln_1p()).exp();
    let lr = (1.0 - theta0).ln() - (theta0 + (1.0 - theta0) * y).ln();
    let outer: Vec<SignedLog> = (1..=n)
        .map(|k| SignedLog::from_ln(crate::combinatorics::ln_factorial(k - 1) + k as f64 * lr).alternate(k - 1))
        .collect();
    let ly = t.ln_1p();
    let inner: Vec<Approx> = (1..=n)
        .map(|m| Approx::exact(falling_factorial_log(beta, m) * SignedLog::from_ln((beta - m as f64) * ly)))
        .collect();
    compose(&outer, &inner, n)
}

/// Faa di Bruno: derivatives `1..=n` of `f(g(t))` from `f^(k)(g(t))` and `g^(m)(t)`.
fn compose(outer: &[SignedLog], inner: &[Approx], n: usize) -> Result<Vec<Approx>> {
    let bell = bell_triangle_approx(inner)?;
    Ok((1..=n)
        .map(|m| {
            let mut acc = SignedSum::new();
            for k in 1..=m {
                let b = bell[m][k];
                acc.push_approx(Approx {
                    value: outer[k - 1] * b.value,
                    cancellation: b.cancellation,
                });
            }
            acc.finish()
        })
        .collect())
}

/// `a_nk = (-1)^{n-k} sum_m S(n,m) (-q)^m sum_l s(l,k) s_ml(alpha) r^l` with
/// `q = e^{-t}/(1-e^{-t})` and `r = (psiJ - 1)/psiJ`, `psiJ = 1 - (1-e^{-t})^alpha`.
fn joe_closed_row(alpha: f64, n: usize, t: f64) -> Result<Vec<Approx>> {
    let tables = StirlingTables::global();
    let lq = -ln_expm1(t);
    let lwa = alpha * ln_one_minus_exp_neg(t);
    let lr = lwa - (-lwa.exp_m1()).ln();
    let neg_q = SignedLog::new(-1, lq);
    let r = SignedLog::new(-1, lr);
    let s_rows: Vec<Vec<Approx>> = (1..=n).map(|m| s_poly_row(m, alpha)).collect::<Result<_>>()?;
    let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        let mut outer = SignedSum::new();
        for m in k..=n {
            let mut inner = SignedSum::new();
            for l in k..=m {
                let s_lk = SignedLog::new(tables.sign_s1(l, k), tables.ln_abs_s1(l, k));
                let sml = s_rows[m - 1][l];
                inner.push_approx(Approx {
                    value: s_lk * sml.value * r.powi(l),
                    cancellation: sml.cancellation,
                });
            }
            let inner = inner.finish();
            outer.push_approx(Approx {
                value: SignedLog::from_ln(tables.ln_s2(n, m)) * neg_q.powi(m) * inner.value,
                cancellation: inner.cancellation,
            });
        }
        let v = outer.finish();
        *slot = Approx {
            value: v.value.alternate(n - k),
            cancellation: v.cancellation,
        };
    }
    Ok(row)
}

/// `a_nk = sum_{j=k}^n s(j,k) s_nj(beta) y^j (1+t)^{j beta - n}` with
/// `y = (1-theta0) / (theta0 + (1-theta0)(1+t)^beta)`.
fn amh_clayton_closed_row(theta0: f64, beta: f64, n: usize, t: f64) -> Result<Vec<Approx>> {
    let tables = StirlingTables::global();
    let l1t = t.ln_1p();
    let ly = (1.0 - theta0).ln() - (theta0 + (1.0 - theta0) * (beta * l1t).exp()).ln();
    let s = s_poly_row(n, beta)?;
    let mut row = vec![Approx::exact(SignedLog::ZERO); n + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        let mut acc = SignedSum::new();
        for j in k..=n {
            let s_jk = SignedLog::new(tables.sign_s1(j, k), tables.ln_abs_s1(j, k));
            let w = SignedLog::from_ln(j as f64 * ly + (j as f64 * beta - n as f64) * l1t);
            acc.push_approx(Approx {
                value: s_jk * s[j].value * w,
                cancellation: s[j].cancellation,
            });
        }
        *slot = acc.finish();
    }
    Ok(row)
}

/// Coefficients of a polynomial `sum_{k=first}^{last} c_k x^k` in signed log
/// space, with a cancellation estimate covering all entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub first: usize,
    pub entries: Vec<SignedLog>,
    pub cancellation: f64,
}

impl CoeffTable {
    /// The monomial `x^shift`.
    pub fn monomial(shift: usize) -> Self {
        CoeffTable {
            first: shift,
            entries: vec![SignedLog::ONE],
            cancellation: 1.0,
        }
    }

    /// Builds a table from a row indexed by `k` (index 0 is `k = 0`),
    /// trimming leading zeros.
    pub fn from_row(row: Vec<Approx>) -> Self {
        let cancellation = row_cancellation(&row);
        let first = row.iter().position(|a| !a.value.is_zero()).unwrap_or(row.len());
        let entries: Vec<SignedLog> = row[first.min(row.len())..].iter().map(|a| a.value).collect();
        CoeffTable {
            first,
            entries,
            cancellation,
        }
    }

    /// Highest index with a stored entry.
    pub fn last(&self) -> usize {
        self.first + self.entries.len().saturating_sub(1)
    }

    /// Coefficient of `x^k` (zero outside the stored range).
    pub fn get(&self, k: usize) -> SignedLog {
        if k < self.first {
            return SignedLog::ZERO;
        }
        self.entries.get(k - self.first).copied().unwrap_or(SignedLog::ZERO)
    }

    /// `(k, c_k)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, SignedLog)> + '_ {
        self.entries.iter().enumerate().map(move |(i, &c)| (self.first + i, c))
    }

    pub fn precision_warning(&self) -> bool {
        self.cancellation * f64::EPSILON > PRECISION_WARNING_THRESHOLD
    }

    /// Polynomial product.
    pub fn mul(&self, other: &CoeffTable) -> CoeffTable {
        if self.entries.is_empty() || other.entries.is_empty() {
            return CoeffTable {
                first: self.first + other.first,
                entries: Vec::new(),
                cancellation: self.cancellation.max(other.cancellation),
            };
        }
        let len = self.entries.len() + other.entries.len() - 1;
        let mut acc = vec![SignedSum::new(); len];
        for (i, &a) in self.entries.iter().enumerate() {
            for (j, &b) in other.entries.iter().enumerate() {
                acc[i + j].push(a * b);
            }
        }
        let mut cancellation = self.cancellation.max(other.cancellation);
        let entries = acc
            .iter()
            .map(|s| {
                let r = s.finish();
                if !r.value.is_zero() {
                    cancellation = cancellation.max(r.cancellation * self.cancellation.max(other.cancellation));
                }
                r.value
            })
            .collect();
        CoeffTable {
            first: self.first + other.first,
            entries,
            cancellation,
        }
    }
}

/// The polynomial contributed by one child of the root.
#[derive(Debug, Clone, PartialEq)]
pub enum ChildCoeffs {
    /// A bare argument of the parent: the monomial `x`.
    Degenerate,
    /// `sum_k a_{d_s k} x^k` of a nested child.
    Table(CoeffTable),
}

/// Cauchy product of the children's polynomials: the `b_k`, stored from
/// `k = d_0` (number of children) to `d` (number of leaves).
///
/// Degenerate children contribute the factor `x`, i.e. a shift of the index;
/// when every child is degenerate the result is the single coefficient
/// `b_d = 1`.
pub fn b_coeff_table(children: &[ChildCoeffs]) -> CoeffTable {
    let shift = children.iter().filter(|c| matches!(c, ChildCoeffs::Degenerate)).count();
    let mut acc = CoeffTable::monomial(shift);
    for c in children {
        if let ChildCoeffs::Table(t) = c {
            acc = acc.mul(t);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::TiltBase;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn pairs() -> Vec<NodePair> {
        let g = |f: fn(f64) -> Result<GeneratorSpec>, a: f64, b: f64| NodePair::new(f(a).unwrap(), f(b).unwrap()).unwrap();
        vec![
            g(GeneratorSpec::gumbel, 1.5, 3.0),
            g(GeneratorSpec::clayton, 0.8, 2.5),
            g(GeneratorSpec::amh, 0.3, 0.7),
            g(GeneratorSpec::joe, 1.4, 2.6),
            g(GeneratorSpec::frank, 2.0, 5.0),
            NodePair::new(GeneratorSpec::amh(0.4).unwrap(), GeneratorSpec::clayton(1.7).unwrap()).unwrap(),
            NodePair::new(
                GeneratorSpec::tilted(TiltBase::Exp, 0.7, 1.3).unwrap(),
                GeneratorSpec::tilted(TiltBase::Exp, 0.7, 2.1).unwrap(),
            )
            .unwrap(),
            NodePair::new(
                GeneratorSpec::tilted(TiltBase::Inverse, 0.4, 1.2).unwrap(),
                GeneratorSpec::tilted(TiltBase::Inverse, 0.4, 1.9).unwrap(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn pair_validation() {
        let g = GeneratorSpec::gumbel;
        assert!(matches!(NodePair::new(g(2.0).unwrap(), g(1.5).unwrap()), Err(Error::Config(_))));
        assert!(matches!(
            NodePair::new(g(2.0).unwrap(), GeneratorSpec::clayton(3.0).unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(NodePair::new(GeneratorSpec::amh(0.5).unwrap(), GeneratorSpec::clayton(0.5).unwrap()).is_err());
        let p = NodePair::new(g(1.5).unwrap(), g(3.0).unwrap()).unwrap();
        assert_eq!(p.alpha(), Some(0.5));
    }

    #[test]
    fn node_matches_composition() {
        for p in pairs() {
            for &t in &[0.05, 0.7, 3.0] {
                let direct = p.parent().psi_inv(p.child().psi(t)).unwrap();
                assert!(rel(p.node_value(t), direct) < 1e-10, "{:?} t={t}", p.kind);
            }
        }
    }

    #[test]
    fn node_derivative_examples() {
        let g = GeneratorSpec::gumbel;
        let id = NodePair::new(g(2.0).unwrap(), g(2.0).unwrap()).unwrap();
        assert_eq!(id.node_deriv(1, 0.4).unwrap().value, SignedLog::ONE);
        let half = NodePair::new(g(1.0).unwrap(), g(2.0).unwrap()).unwrap();
        assert!(rel(half.node_deriv(1, 1.0).unwrap().value.to_f64(), 0.5) < 1e-15);
    }

    #[test]
    fn node_derivatives_match_finite_differences() {
        for p in pairs() {
            for &t in &[0.3, 1.1] {
                let h = 1e-3;
                let f = |x: f64| p.node_value(x);
                let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
                let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                let got = p.node_derivs(2, t).unwrap();
                assert!(rel(got[0].value.to_f64(), d1) < 1e-5, "{:?}", p.kind);
                assert!(rel(got[1].value.to_f64(), d2) < 1e-4, "{:?}", p.kind);
                for (k, d) in got.iter().enumerate() {
                    assert_eq!(d.value.sign(), if k % 2 == 0 { 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_bell() {
        for p in pairs() {
            for &t in &[0.2, 1.0, 2.9] {
                for n in 1..=8 {
                    let a = p.a_coeff_table(n, t, CoeffMethod::ClosedForm).unwrap();
                    let b = p.a_coeff_table(n, t, CoeffMethod::Bell).unwrap();
                    for k in 1..=n {
                        let (x, y) = (a.get(k).to_f64(), b.get(k).to_f64());
                        assert!(rel(x, y) < 1e-10, "{:?} n={n} k={k} t={t}: {x} vs {y}", p.kind);
                        assert_eq!(a.get(k).sign(), if (n - k) % 2 == 0 { 1 } else { -1 });
                    }
                }
            }
        }
    }

    #[test]
    fn gumbel_half_example() {
        let g = GeneratorSpec::gumbel;
        let p = NodePair::new(g(1.0).unwrap(), g(2.0).unwrap()).unwrap();
        let a = p.a_coeff_table(2, 1.0, CoeffMethod::ClosedForm).unwrap();
        assert!(rel(a.get(2).to_f64(), 0.25) < 1e-15);
        // s_21(0.5) = -0.5 + 0.25
        assert!(rel(a.get(1).to_f64(), -0.25) < 1e-15);
    }

    #[test]
    fn identity_pair_is_unit() {
        let g = GeneratorSpec::joe(2.0).unwrap();
        let p = NodePair::new(g, g).unwrap();
        let a = p.a_coeff_table(1, 0.9, CoeffMethod::ClosedForm).unwrap();
        assert_eq!(a.get(1), SignedLog::ONE);
        let a3 = p.a_coeff_table(3, 0.9, CoeffMethod::ClosedForm).unwrap();
        assert_eq!((a3.first, a3.entries.clone()), (3, vec![SignedLog::ONE]));
    }

    #[test]
    fn frank_is_shifted_joe() {
        let (t0, t1) = (2.0f64, 5.0f64);
        let f = NodePair::new(GeneratorSpec::frank(t0).unwrap(), GeneratorSpec::frank(t1).unwrap()).unwrap();
        let j = NodePair::new(GeneratorSpec::joe(t0).unwrap(), GeneratorSpec::joe(t1).unwrap()).unwrap();
        let h = -(-(-t1).exp_m1()).ln();
        for n in 1..=6 {
            let a = f.a_coeff_table(n, 0.8, CoeffMethod::ClosedForm).unwrap();
            let b = j.a_coeff_table(n, 0.8 + h, CoeffMethod::ClosedForm).unwrap();
            for k in 1..=n {
                assert!(rel(a.get(k).to_f64(), b.get(k).to_f64()) < 1e-12);
            }
        }
    }

    #[test]
    fn b_table_all_degenerate_is_unit() {
        let b = b_coeff_table(&[ChildCoeffs::Degenerate, ChildCoeffs::Degenerate]);
        assert_eq!(b.first, 2);
        assert_eq!(b.entries, vec![SignedLog::ONE]);
    }

    #[test]
    fn b_table_small_product() {
        let p = NodePair::new(GeneratorSpec::gumbel(1.5).unwrap(), GeneratorSpec::gumbel(3.0).unwrap()).unwrap();
        let a1 = p.a_coeff_table(2, 0.7, CoeffMethod::ClosedForm).unwrap();
        let a2 = p.a_coeff_table(2, 1.3, CoeffMethod::ClosedForm).unwrap();
        let b = b_coeff_table(&[ChildCoeffs::Table(a1.clone()), ChildCoeffs::Degenerate, ChildCoeffs::Table(a2.clone())]);
        assert_eq!(b.first, 3);
        assert_eq!(b.last(), 5);
        let f = |t: &CoeffTable, k| t.get(k).to_f64();
        let b4 = f(&a1, 1) * f(&a2, 2) + f(&a1, 2) * f(&a2, 1);
        assert!(rel(b.get(4).to_f64(), b4) < 1e-14);
        for (k, c) in b.iter() {
            assert_eq!(c.sign(), if (5 - k) % 2 == 0 { 1 } else { -1 });
        }
    }
}
