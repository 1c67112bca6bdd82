//! Densities of three-level structures.
//!
//! A middle node `N` below the root with its own children contributes, in
//! terms of the root frailty `x = -v0`, the polynomial
//! `A_k = sum_l beta_l a^{(0N)}_{lk}(t_N)`, where `beta` is the Cauchy
//! product of the polynomials of `N`'s children (bottom nodes and bare
//! leaves) and `a^{(0N)}` is the coefficient triangle of the root/middle pair.
//! The root then proceeds exactly as in the two-level case.

use crate::density::{bottom_child, check_point, contract_root, direct_leaf_jacobian, node_t, LogDensity};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::inner_coeffs::{b_coeff_table, ChildCoeffs, CoeffMethod, CoeffTable, NodePair};
use crate::signed_log::{Approx, SignedLog, SignedSum};
use crate::tree::{NacChild, NacTree};

/// Composite coefficients of a middle node together with the log-Jacobian of
/// all leaves below it.
#[derive(Debug, Clone, PartialEq)]
pub struct MiddleEval {
    pub coeffs: CoeffTable,
    pub log_jacobian: f64,
}

/// Per-middle-node composite tables and the root `b` table of a three-level
/// structure, in the order of the root's children.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelCoeffs {
    pub children: Vec<ChildCoeffs>,
    pub root_b: CoeffTable,
}

/// Composite coefficient table of `node` relative to `parent`.
pub fn middle_a_table(parent: GeneratorSpec, node: &NacTree, u: &[f64], method: CoeffMethod) -> Result<MiddleEval> {
    let pair = NodePair::new(parent, node.generator())?;
    let mut polys = Vec::with_capacity(node.children().len());
    let mut jac = direct_leaf_jacobian(node, u)?;
    for c in node.children() {
        match c {
            NacChild::Leaf(_) => polys.push(ChildCoeffs::Degenerate),
            NacChild::Node(sub) => {
                if sub.levels() > 1 {
                    return Err(Error::unsupported(
                        "a middle node's children must be leaves or leaf-only nodes (at most three levels)",
                    ));
                }
                let ev = bottom_child(node.generator(), sub, u, method)?;
                jac += ev.log_jacobian;
                polys.push(ChildCoeffs::Table(ev.coeffs));
            }
        }
    }
    let beta = b_coeff_table(&polys);
    let t = node_t(node, u)?;
    let top = beta.last();
    let tri = pair.a_coeff_triangle(top, t, method)?;
    let mut cancellation = beta.cancellation;
    for row in &tri {
        cancellation = cancellation.max(row.cancellation);
    }
    let mut row = vec![Approx::exact(SignedLog::ZERO); top + 1];
    for (k, slot) in row.iter_mut().enumerate().skip(1) {
        let mut acc = SignedSum::new();
        for (l, bl) in beta.iter() {
            if l >= k {
                acc.push(bl * tri[l - 1].get(k));
            }
        }
        *slot = acc.finish();
    }
    let mut coeffs = CoeffTable::from_row(row);
    coeffs.cancellation = coeffs.cancellation.max(cancellation);
    Ok(MiddleEval {
        coeffs,
        log_jacobian: jac,
    })
}

fn root_children(tree: &NacTree, u: &[f64], method: CoeffMethod) -> Result<(Vec<ChildCoeffs>, f64)> {
    let root = tree.generator();
    let mut children = Vec::with_capacity(tree.children().len());
    let mut jac = direct_leaf_jacobian(tree, u)?;
    for c in tree.children() {
        match c {
            NacChild::Leaf(_) => children.push(ChildCoeffs::Degenerate),
            NacChild::Node(sub) if sub.levels() == 1 => {
                let ev = bottom_child(root, sub, u, method)?;
                jac += ev.log_jacobian;
                children.push(ChildCoeffs::Table(ev.coeffs));
            }
            NacChild::Node(sub) => {
                let ev = middle_a_table(root, sub, u, method)?;
                jac += ev.log_jacobian;
                children.push(ChildCoeffs::Table(ev.coeffs));
            }
        }
    }
    Ok((children, jac))
}

/// Composite and root coefficient tables at `u`.
pub fn three_level_coeffs(tree: &NacTree, u: &[f64], method: CoeffMethod) -> Result<ThreeLevelCoeffs> {
    tree.validate()?;
    check_point(tree, u)?;
    let (children, _) = root_children(tree, u, method)?;
    let root_b = b_coeff_table(&children);
    Ok(ThreeLevelCoeffs { children, root_b })
}

/// Log-density of a structure with up to three levels.
pub fn logpdf3(tree: &NacTree, u: &[f64]) -> Result<LogDensity> {
    logpdf3_with(tree, u, CoeffMethod::ClosedForm)
}

pub fn logpdf3_with(tree: &NacTree, u: &[f64], method: CoeffMethod) -> Result<LogDensity> {
    tree.validate()?;
    check_point(tree, u)?;
    let (children, jac) = root_children(tree, u, method)?;
    let b = b_coeff_table(&children);
    let t = node_t(tree, u)?;
    let mut ld = contract_root(tree.generator(), &b, t, tree.dim())?;
    ld.value += jac;
    Ok(ld)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{archimedean_logpdf, logpdf2};
    use crate::dsl::parse;

    #[test]
    fn independence_is_zero() {
        let t = parse("G(1; 1, G(1; G(1; 2, 3), 4))").unwrap();
        assert!(logpdf3(&t, &[0.1, 0.4, 0.6, 0.9]).unwrap().value.abs() < 1e-13);
    }

    #[test]
    fn collapse_to_archimedean() {
        let t = parse("C(1.7; 1, C(1.7; C(1.7; 2, 3), 4))").unwrap();
        let u = [0.15, 0.45, 0.7, 0.3];
        let a = logpdf3(&t, &u).unwrap().value;
        let b = archimedean_logpdf(t.generator(), &u).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn middle_with_single_leaf_child_node_reduces() {
        // A middle node whose only child is a bottom node is the bottom node
        // composed with the identity when the middle generator equals the root's.
        let three = parse("G(1.5; 1, G(1.5; G(2.5; 2, 3)))").unwrap();
        let two = parse("G(1.5; 1, G(2.5; 2, 3))").unwrap();
        let u = [0.3, 0.55, 0.8];
        let a = logpdf3(&three, &u).unwrap().value;
        let b = logpdf2(&two, &u).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn splice_when_middle_equals_root() {
        let three = parse("G(1.5; 1, G(1.5; G(3; 2, 3), 4))").unwrap();
        let two = parse("G(1.5; 1, G(3; 2, 3), 4)").unwrap();
        let u = [0.3, 0.55, 0.8, 0.2];
        let a = logpdf3(&three, &u).unwrap().value;
        let b = logpdf2(&two, &u).unwrap().value;
        assert!((a.exp() - b.exp()).abs() / b.exp() < 1e-10);
    }

    #[test]
    fn root_signs_alternate() {
        let t = parse("G(1.2; 1, G(2; G(3; 2, 3), G(4; 4, 5), 6), 7)").unwrap();
        let u = [0.3, 0.55, 0.8, 0.2, 0.6, 0.45, 0.7];
        let c = three_level_coeffs(&t, &u, CoeffMethod::ClosedForm).unwrap();
        let d = t.dim();
        for (k, b) in c.root_b.iter() {
            assert_eq!(b.sign(), if (d - k) % 2 == 0 { 1 } else { -1 });
        }
    }
}
