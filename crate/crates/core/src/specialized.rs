//! Family-specific two-level densities in plain `f64`.
//!
//! Each function evaluates the per-family closed forms directly: the node
//! coefficients `a_{s,nk}`, the root derivatives and the leaf Jacobians, with
//! `b_k` obtained by enumerating bounded compositions. These are a second,
//! independent route to the same densities as [`crate::density::pdf2`] and are
//! meant for small dimensions only.

use crate::combinatorics::bounded_compositions;
use crate::error::{Error, Result};
use crate::generators::{check_open_unit, Family, GeneratorSpec};
use crate::tree::{NacChild, NacTree};

const MAX_N: usize = 24;

fn stirling1_f(n: usize, k: usize) -> f64 {
    let mut row = vec![1.0f64];
    for m in 0..n {
        let mut next = vec![0.0; m + 2];
        for (j, v) in row.iter().enumerate() {
            next[j + 1] += v;
            next[j] -= m as f64 * v;
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0.0)
}

fn stirling2_f(n: usize, k: usize) -> f64 {
    let mut row = vec![1.0f64];
    for m in 0..n {
        let mut next = vec![0.0; m + 2];
        for (j, v) in row.iter().enumerate() {
            next[j + 1] += v;
            next[j] += j as f64 * v;
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0.0)
}

/// `sum_{l=k}^n s(n,l) S(l,k) x^l`.
fn s_nk(n: usize, k: usize, x: f64) -> f64 {
    (k..=n).map(|l| stirling1_f(n, l) * stirling2_f(l, k) * x.powi(l as i32)).sum()
}

fn falling(x: f64, n: usize) -> f64 {
    (0..n).map(|i| x - i as f64).product()
}

fn eulerian_f(n: usize, k: usize) -> f64 {
    let mut row = vec![1.0f64];
    for m in 1..=n {
        let mut next = vec![0.0; m];
        for (j, slot) in next.iter_mut().enumerate() {
            let a = if j < row.len() { row[j] } else { 0.0 };
            let b = if j >= 1 && j - 1 < row.len() { row[j - 1] } else { 0.0 };
            *slot = (j as f64 + 1.0) * a + (m - j) as f64 * b;
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0.0)
}

/// `Li_{-m}(z) / z` for `m >= 0`.
fn polylog_neg_over_z(m: usize, z: f64) -> f64 {
    if m == 0 {
        return 1.0 / (1.0 - z);
    }
    let num: f64 = (0..m).map(|j| eulerian_f(m, j) * z.powi(j as i32)).sum();
    num / (1.0 - z).powi(m as i32 + 1)
}

/// A root child: its node coefficients `a_{s, d_s j}` for `j = 1..=d_s`
/// (index 0 unused), the root-scale contribution `psi0_s(t_s)`, and the
/// product of `-(psi_s^-1)'` over its leaves.
struct Block {
    a: Vec<f64>,
    root_t: f64,
    neg_jac: f64,
}

fn leaf_block(root_t: f64, neg_jac: f64) -> Block {
    Block {
        a: vec![0.0, 1.0],
        root_t,
        neg_jac,
    }
}

/// `(-1)^d sum_k b_k psi0^(k)(t) * prod(-(psi_s^-1)')`.
fn assemble(blocks: &[Block], root_deriv: &dyn Fn(usize, f64) -> f64) -> f64 {
    let d_vec: Vec<usize> = blocks.iter().map(|b| b.a.len() - 1).collect();
    let d: usize = d_vec.iter().sum();
    let t: f64 = blocks.iter().map(|b| b.root_t).sum();
    let mut acc = 0.0;
    for k in blocks.len()..=d {
        let b_k: f64 = bounded_compositions(&d_vec, k)
            .elements
            .iter()
            .map(|j| j.iter().zip(blocks).map(|(&js, b)| b.a[js]).product::<f64>())
            .sum();
        acc += b_k * root_deriv(k, t);
    }
    let jac: f64 = blocks.iter().map(|b| b.neg_jac).product();
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    sign * acc * jac
}

/// Root children as `(child generator or None for a leaf, leaf indices)`.
fn blocks_of(tree: &NacTree, u: &[f64]) -> Result<Vec<(Option<GeneratorSpec>, Vec<usize>)>> {
    tree.validate()?;
    if tree.levels() > 2 {
        return Err(Error::arg("specialized densities need at most two levels"));
    }
    if u.len() != tree.dim() {
        return Err(Error::arg(format!("point has {} coordinates, structure has {}", u.len(), tree.dim())));
    }
    for &x in u {
        check_open_unit(x)?;
    }
    if tree.dim() > MAX_N {
        return Err(Error::arg(format!("specialized densities support d <= {MAX_N}")));
    }
    Ok(tree
        .children()
        .iter()
        .map(|c| match c {
            NacChild::Leaf(i) => (None, vec![*i]),
            NacChild::Node(sub) => (Some(sub.generator()), sub.leaves()),
        })
        .collect())
}

fn require(tree: &NacTree, root: Family, child: Family) -> Result<()> {
    let ok = tree.generator().family() == root
        && tree.children().iter().all(|c| match c {
            NacChild::Leaf(_) => true,
            NacChild::Node(s) => s.generator().family() == child,
        });
    if ok {
        Ok(())
    } else {
        Err(Error::arg(format!(
            "structure is not a nested {}/{} copula",
            root.name(),
            child.name()
        )))
    }
}

pub fn pdf_clayton2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Clayton, Family::Clayton)?;
    let th0 = tree.generator().theta();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        match g {
            None => {
                let x = u[idx[0]];
                blocks.push(leaf_block(x.powf(-th0) - 1.0, th0 * x.powf(-th0 - 1.0)));
            }
            Some(g) => {
                let th = g.theta();
                let alpha = th0 / th;
                let n = idx.len();
                let ts: f64 = idx.iter().map(|&i| u[i].powf(-th) - 1.0).sum();
                let a = (0..=n)
                    .map(|j| if j == 0 { 0.0 } else { (1.0 + ts).powf(alpha * j as f64 - n as f64) * s_nk(n, j, alpha) })
                    .collect();
                let neg_jac = idx.iter().map(|&i| th * u[i].powf(-th - 1.0)).product();
                blocks.push(Block {
                    a,
                    root_t: (1.0 + ts).powf(alpha) - 1.0,
                    neg_jac,
                });
            }
        }
    }
    Ok(assemble(&blocks, &|k, t| falling(-1.0 / th0, k) * (1.0 + t).powf(-(k as f64 + 1.0 / th0))))
}

pub fn pdf_gumbel2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Gumbel, Family::Gumbel)?;
    let th0 = tree.generator().theta();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        let th = g.map_or(th0, |g| g.theta());
        let alpha = th0 / th;
        let n = idx.len();
        let ts: f64 = idx.iter().map(|&i| (-u[i].ln()).powf(th)).sum();
        let a = (0..=n)
            .map(|j| if j == 0 { 0.0 } else { ts.powf(alpha * j as f64 - n as f64) * s_nk(n, j, alpha) })
            .collect();
        let neg_jac = idx.iter().map(|&i| th * (-u[i].ln()).powf(th - 1.0) / u[i]).product();
        blocks.push(Block {
            a,
            root_t: ts.powf(alpha),
            neg_jac,
        });
    }
    Ok(assemble(&blocks, &|k, t| {
        let inner: f64 = (1..=k).map(|j| s_nk(k, j, 1.0 / th0) * (-t.powf(1.0 / th0)).powi(j as i32)).sum();
        (-t.powf(1.0 / th0)).exp() * t.powi(-(k as i32)) * inner
    }))
}

fn amh_root(th0: f64) -> impl Fn(usize, f64) -> f64 {
    move |k, t| {
        let z = th0 * (-t).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * (1.0 - th0) * (-t).exp() * polylog_neg_over_z(k, z)
    }
}

fn amh_leaf(th0: f64, x: f64) -> Block {
    leaf_block(((1.0 - th0) / x + th0).ln(), (1.0 - th0) / (x * (1.0 - th0 * (1.0 - x))))
}

pub fn pdf_amh2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Amh, Family::Amh)?;
    let th0 = tree.generator().theta();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        match g {
            None => blocks.push(amh_leaf(th0, u[idx[0]])),
            Some(g) => {
                let th = g.theta();
                let th0s = (th - th0) / (1.0 - th0);
                let n = idx.len();
                let ts: f64 = idx.iter().map(|&i| ((1.0 - th) / u[i] + th).ln()).sum();
                let x = 1.0 / (1.0 - th0s * (-ts).exp());
                let a = (0..=n)
                    .map(|k| {
                        if k == 0 {
                            0.0
                        } else {
                            (k..=n).map(|l| stirling2_f(n, l) * stirling1_f(l, k) * x.powi(l as i32)).sum()
                        }
                    })
                    .collect();
                let neg_jac = idx.iter().map(|&i| (1.0 - th) / (u[i] * (1.0 - th * (1.0 - u[i])))).product();
                blocks.push(Block {
                    a,
                    root_t: ((ts.exp() - th0s) / (1.0 - th0s)).ln(),
                    neg_jac,
                });
            }
        }
    }
    Ok(assemble(&blocks, &amh_root(th0)))
}

/// Coefficients of the inner Joe generator with `alpha = theta0 / theta_s`.
fn joe_a(n: usize, k: usize, alpha: f64, t: f64) -> f64 {
    let e = (-t).exp();
    let z = -e / (1.0 - e);
    let psi_j = 1.0 - (1.0 - e).powf(alpha);
    let r = (psi_j - 1.0) / psi_j;
    let mut acc = 0.0;
    for m in k..=n {
        let inner: f64 = (k..=m).map(|l| stirling1_f(l, k) * s_nk(m, l, alpha) * r.powi(l as i32)).sum();
        acc += stirling2_f(n, m) * z.powi(m as i32) * inner;
    }
    if (n - k) % 2 == 0 {
        acc
    } else {
        -acc
    }
}

pub fn pdf_joe2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Joe, Family::Joe)?;
    let th0 = tree.generator().theta();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        let th = g.map_or(th0, |g| g.theta());
        let alpha = th0 / th;
        let n = idx.len();
        let ts: f64 = idx.iter().map(|&i| -(1.0 - (1.0 - u[i]).powf(th)).ln()).sum();
        let a = (0..=n).map(|k| if k == 0 { 0.0 } else { joe_a(n, k, alpha, ts) }).collect();
        let neg_jac = idx
            .iter()
            .map(|&i| th * (1.0 - u[i]).powf(th - 1.0) / (1.0 - (1.0 - u[i]).powf(th)))
            .product();
        blocks.push(Block {
            a,
            root_t: -(1.0 - (1.0 - (-ts).exp()).powf(alpha)).ln(),
            neg_jac,
        });
    }
    Ok(assemble(&blocks, &|k, t| {
        let e = (-t).exp();
        let x = e / (1.0 - e);
        let p: f64 = (1..=k)
            .map(|l| stirling2_f(k, l) * falling(l as f64 - 1.0 - 1.0 / th0, l - 1) * x.powi(l as i32))
            .sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * (1.0 - e).powf(1.0 / th0) / th0 * p
    }))
}

pub fn pdf_frank2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Frank, Family::Frank)?;
    let th0 = tree.generator().theta();
    let p0 = -(-th0).exp_m1();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        let th = g.map_or(th0, |g| g.theta());
        let alpha = th0 / th;
        let ps = -(-th).exp_m1();
        let h = -ps.ln();
        let n = idx.len();
        let ts: f64 = idx.iter().map(|&i| -((-(-th * u[i]).exp_m1()) / ps).ln()).sum();
        let a = (0..=n).map(|k| if k == 0 { 0.0 } else { joe_a(n, k, alpha, ts + h) }).collect();
        let neg_jac = idx
            .iter()
            .map(|&i| th * (-th * u[i]).exp() / -(-th * u[i]).exp_m1())
            .product();
        blocks.push(Block {
            a,
            root_t: -((1.0 - (1.0 - ps * (-ts).exp()).powf(alpha)) / p0).ln(),
            neg_jac,
        });
    }
    Ok(assemble(&blocks, &|k, t| {
        let z = p0 * (-t).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign / th0 * z * polylog_neg_over_z(k - 1, z)
    }))
}

pub fn pdf_amh_clayton2(tree: &NacTree, u: &[f64]) -> Result<f64> {
    require(tree, Family::Amh, Family::Clayton)?;
    let th0 = tree.generator().theta();
    let mut blocks = Vec::new();
    for (g, idx) in blocks_of(tree, u)? {
        match g {
            None => blocks.push(amh_leaf(th0, u[idx[0]])),
            Some(g) => {
                let th = g.theta();
                let n = idx.len();
                let ts: f64 = idx.iter().map(|&i| u[i].powf(-th) - 1.0).sum();
                let w = (1.0 + ts).powf(1.0 / th);
                let q = (1.0 - th0) / (th0 + (1.0 - th0) * w);
                let a = (0..=n)
                    .map(|k| {
                        if k == 0 {
                            return 0.0;
                        }
                        (k..=n)
                            .map(|j| {
                                stirling1_f(j, k)
                                    * s_nk(n, j, 1.0 / th)
                                    * q.powi(j as i32)
                                    * (1.0 + ts).powf(j as f64 / th - n as f64)
                            })
                            .sum()
                    })
                    .collect();
                let neg_jac = idx.iter().map(|&i| th * u[i].powf(-th - 1.0)).product();
                blocks.push(Block {
                    a,
                    root_t: ((1.0 - th0) * w + th0).ln(),
                    neg_jac,
                });
            }
        }
    }
    Ok(assemble(&blocks, &amh_root(th0)))
}
