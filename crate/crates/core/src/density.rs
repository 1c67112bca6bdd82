//! CDF and (log-)density of nested Archimedean copulas.
//!
//! The density is `sum_k b_k psi0^(k)(t(u))` times the product of the
//! `(psi_s^-1)'(u_sj)`, where the `b_k` are the Cauchy-product coefficients of
//! the children's polynomials. After folding out the signs every term is
//! positive, so the log-density is a plain log-sum-exp.

use crate::error::{Error, Result};
use crate::generators::{check_open_unit, GeneratorSpec};
use crate::inner_coeffs::{b_coeff_table, ChildCoeffs, CoeffMethod, CoeffTable, NodePair};
use crate::signed_log::{SignedLog, SignedSum, PRECISION_WARNING_THRESHOLD};
use crate::three_level;
use crate::tree::{NacChild, NacTree};

/// A log-density value with the cancellation factor accumulated while
/// computing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensity {
    pub value: f64,
    pub cancellation: f64,
}

impl LogDensity {
    /// Estimated relative error of `exp(value)`.
    pub fn rel_error_estimate(&self) -> f64 {
        self.cancellation * f64::EPSILON
    }

    pub fn precision_warning(&self) -> bool {
        self.rel_error_estimate() > PRECISION_WARNING_THRESHOLD
    }
}

/// CDF value together with the generator arguments it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfEval {
    pub value: f64,
    /// `psi0^-1(C(u))`, computed as a sum over the children.
    pub t: f64,
    /// For each child of the root: its own `t_s(u_s)` (for a leaf, `psi0^-1(u)`).
    pub child_t: Vec<f64>,
}

pub(crate) fn check_point(tree: &NacTree, u: &[f64]) -> Result<()> {
    let d = tree.dim();
    if u.len() != d {
        return Err(Error::arg(format!("point has {} coordinates, structure has {d}", u.len())));
    }
    for &x in u {
        check_open_unit(x)?;
    }
    Ok(())
}

/// `t_N(u_N)`: the sum of the children's contributions, in this node's scale.
pub(crate) fn node_t(tree: &NacTree, u: &[f64]) -> Result<f64> {
    let g = tree.generator();
    let mut t = 0.0;
    for c in tree.children() {
        t += match c {
            NacChild::Leaf(i) => g.psi_inv(u[*i])?,
            NacChild::Node(sub) => NodePair::new(g, sub.generator())?.node_value(node_t(sub, u)?),
        };
    }
    Ok(t)
}

/// `C(u)` by recursive evaluation.
pub fn cdf(tree: &NacTree, u: &[f64]) -> Result<CdfEval> {
    tree.validate()?;
    check_point(tree, u)?;
    let g = tree.generator();
    let mut child_t = Vec::with_capacity(tree.children().len());
    let mut t = 0.0;
    for c in tree.children() {
        let (own, contrib) = match c {
            NacChild::Leaf(i) => {
                let v = g.psi_inv(u[*i])?;
                (v, v)
            }
            NacChild::Node(sub) => {
                let ts = node_t(sub, u)?;
                (ts, NodePair::new(g, sub.generator())?.node_value(ts))
            }
        };
        child_t.push(own);
        t += contrib;
    }
    Ok(CdfEval {
        value: g.psi(t),
        t,
        child_t,
    })
}

/// Sum of `ln(-(psi^-1)'(u_j))` over the leaves directly below `tree`.
pub(crate) fn direct_leaf_jacobian(tree: &NacTree, u: &[f64]) -> Result<f64> {
    let g = tree.generator();
    let mut acc = 0.0;
    for c in tree.children() {
        if let NacChild::Leaf(i) = c {
            acc += g.log_neg_psi_inv_prime(u[*i])?;
        }
    }
    Ok(acc)
}

/// Polynomial, node argument and log-Jacobian of a child whose children are
/// all leaves.
pub(crate) struct ChildEval {
    pub coeffs: CoeffTable,
    pub log_jacobian: f64,
}

pub(crate) fn bottom_child(parent: GeneratorSpec, node: &NacTree, u: &[f64], method: CoeffMethod) -> Result<ChildEval> {
    let pair = NodePair::new(parent, node.generator())?;
    let n = node.children().len();
    if node.children().iter().any(|c| matches!(c, NacChild::Node(_))) {
        return Err(Error::unsupported("expected a child whose children are all leaves"));
    }
    let t = node_t(node, u)?;
    Ok(ChildEval {
        coeffs: pair.a_coeff_table(n, t, method)?,
        log_jacobian: direct_leaf_jacobian(node, u)?,
    })
}

/// Contracts the root polynomial with the root generator derivatives:
/// `ln sum_k b_k psi0^(k)(t)` after the sign `(-1)^d` of the Jacobian is
/// folded in.
pub(crate) fn contract_root(root: GeneratorSpec, b: &CoeffTable, t: f64, d: usize) -> Result<LogDensity> {
    let mut acc = SignedSum::new();
    for (k, bk) in b.iter() {
        if bk.is_zero() {
            continue;
        }
        let lpsi = root.log_abs_psi_deriv(k, t)?;
        // b_k psi0^(k) (-1)^d: psi0^(k) has sign (-1)^k.
        let term = (bk * SignedLog::from_ln(lpsi)).alternate(k + d);
        acc.push(term);
    }
    let r = acc.finish();
    if r.value.sign() != 1 {
        return Err(Error::Numerical(format!(
            "density sum evaluated to {:?} (cancellation factor {:.3e})",
            r.value, r.cancellation
        )));
    }
    Ok(LogDensity {
        value: r.value.ln_abs(),
        cancellation: r.cancellation.max(b.cancellation),
    })
}

/// Log-density of a one- or two-level structure.
pub fn logpdf2(tree: &NacTree, u: &[f64]) -> Result<LogDensity> {
    logpdf2_with(tree, u, CoeffMethod::ClosedForm)
}

pub fn logpdf2_with(tree: &NacTree, u: &[f64], method: CoeffMethod) -> Result<LogDensity> {
    tree.validate()?;
    if tree.levels() > 2 {
        return Err(Error::unsupported("logpdf2 needs at most two levels; use log_density"));
    }
    check_point(tree, u)?;
    if all_independent(tree) {
        return Ok(LogDensity { value: 0.0, cancellation: 1.0 });
    }
    let root = tree.generator();
    let mut children = Vec::with_capacity(tree.children().len());
    let mut jac = direct_leaf_jacobian(tree, u)?;
    for c in tree.children() {
        match c {
            NacChild::Leaf(_) => children.push(ChildCoeffs::Degenerate),
            NacChild::Node(sub) => {
                let ev = bottom_child(root, sub, u, method)?;
                jac += ev.log_jacobian;
                children.push(ChildCoeffs::Table(ev.coeffs));
            }
        }
    }
    let b = b_coeff_table(&children);
    let t = node_t(tree, u)?;
    let mut ld = contract_root(root, &b, t, tree.dim())?;
    ld.value += jac;
    Ok(ld)
}

/// `exp(logpdf2)`; over- or underflows for large dimensions where
/// [`logpdf2`] stays finite.
pub fn pdf2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    Ok(logpdf2(tree, u)?.value.exp())
}

/// Log-density of any supported structure (up to three levels).
pub fn log_density(tree: &NacTree, u: &[f64]) -> Result<LogDensity> {
    log_density_with(tree, u, CoeffMethod::ClosedForm)
}

fn all_independent(tree: &NacTree) -> bool {
    tree.generator().is_independence()
        && tree.children().iter().all(|c| match c {
            NacChild::Leaf(_) => true,
            NacChild::Node(sub) => all_independent(sub),
        })
}

pub fn log_density_with(tree: &NacTree, u: &[f64], method: CoeffMethod) -> Result<LogDensity> {
    if tree.levels() <= 3 && all_independent(tree) {
        tree.validate()?;
        check_point(tree, u)?;
        return Ok(LogDensity { value: 0.0, cancellation: 1.0 });
    }
    match tree.levels() {
        0..=2 => logpdf2_with(tree, u, method),
        3 => three_level::logpdf3_with(tree, u, method),
        n => Err(Error::unsupported(format!(
            "{n} nesting levels; at most three are supported"
        ))),
    }
}

/// Plain Archimedean log-density `ln((-1)^d psi^(d)(t)) + sum ln(-(psi^-1)'(u_j))`.
pub fn archimedean_logpdf(g: GeneratorSpec, u: &[f64]) -> Result<f64> {
    let mut t = 0.0;
    let mut jac = 0.0;
    for &x in u {
        check_open_unit(x)?;
        t += g.psi_inv(x)?;
        jac += g.log_neg_psi_inv_prime(x)?;
    }
    Ok(g.log_abs_psi_deriv(u.len(), t)? + jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn independence_cdf_and_density() {
        let t = parse("G(1; 1, G(1; 2, 3))").unwrap();
        let c = cdf(&t, &[0.5, 0.5, 0.5]).unwrap();
        assert!(rel(c.value, 0.125) < 1e-14);
        let ld = logpdf2(&t, &[0.2, 0.7, 0.4]).unwrap();
        assert!(ld.value.abs() < 1e-14);
        assert!(rel(pdf2(&t, &[0.2, 0.7, 0.4]).unwrap(), 1.0) < 1e-14);
    }

    #[test]
    fn uniform_margins() {
        let t = parse("G(1.5; 1, G(2.5; 2, 3))").unwrap();
        let c = cdf(&t, &[0.3, 0.6, 1.0 - 1e-12]).unwrap().value;
        let sub = parse("G(1.5; 1, G(2.5; 2))").unwrap();
        let c2 = cdf(&sub, &[0.3, 0.6]).unwrap().value;
        assert!(rel(c, c2) < 1e-9);
    }

    #[test]
    fn t_sum_agrees_with_inverse_of_cdf() {
        let t = parse("C(1; 1, C(2; 2, 3))").unwrap();
        let e = cdf(&t, &[0.3, 0.4, 0.5]).unwrap();
        let via_inverse = t.generator().psi_inv(e.value).unwrap();
        assert!(rel(e.t, via_inverse) < 1e-12);
    }

    #[test]
    fn nested_clayton_cdf_by_hand() {
        // C0(u1, C1(u2, u3)) with theta0 = 1, theta1 = 2
        let t = parse("C(1; 1, C(2; 2, 3))").unwrap();
        let u = [0.3f64, 0.4, 0.5];
        let c1 = (u[1].powf(-2.0) + u[2].powf(-2.0) - 1.0).powf(-0.5);
        let c0 = 1.0 / (1.0 / u[0] + 1.0 / c1 - 1.0);
        assert!(rel(cdf(&t, &u).unwrap().value, c0) < 1e-14);
    }

    #[test]
    fn boundary_and_dimension_errors() {
        let t = parse("G(1.5; 1, G(2; 2, 3))").unwrap();
        assert!(matches!(logpdf2(&t, &[0.0, 0.5, 0.5]), Err(Error::Boundary { .. })));
        assert!(matches!(cdf(&t, &[0.2, 1.0, 0.5]), Err(Error::Boundary { .. })));
        assert!(logpdf2(&t, &[0.5, 0.5]).is_err());
        assert!(logpdf2(&t, &[0.5, 1.5, 0.5]).is_err());
    }

    #[test]
    fn collapse_to_archimedean() {
        for text in ["C(2; 1, C(2; 2, 3), C(2; 4, 5))", "G(1.8; 1, G(1.8; 2, 3), 4, 5)"] {
            let t = parse(text).unwrap();
            let u = [0.2, 0.5, 0.35, 0.8, 0.6];
            let a = logpdf2(&t, &u).unwrap().value;
            let b = archimedean_logpdf(t.generator(), &u).unwrap();
            assert!(rel(a.exp(), b.exp()) < 1e-10);
        }
    }

    #[test]
    fn exchangeability_within_child() {
        let t = parse("G(1.3; 1, G(2.2; 2, 3, 4))").unwrap();
        let a = logpdf2(&t, &[0.3, 0.1, 0.5, 0.8]).unwrap().value;
        let b = logpdf2(&t, &[0.3, 0.8, 0.1, 0.5]).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn methods_agree() {
        let t = parse("J(1.5; 1, J(2.5; 2, 3), J(3; 4, 5))").unwrap();
        let u = [0.2, 0.5, 0.35, 0.8, 0.6];
        let a = logpdf2_with(&t, &u, CoeffMethod::ClosedForm).unwrap().value;
        let b = logpdf2_with(&t, &u, CoeffMethod::Bell).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }
}
