//! Sampling two-level nested Gumbel and Clayton copulas via their frailty
//! representation.
//!
//! The root frailty `V0` has Laplace transform `psi0`; each child node draws
//! `V0s` with Laplace transform `exp(-V0 * psi0s(t))`, and a leaf under that
//! node is `psi_s(E / V0s)` for a unit exponential `E`. Every observation
//! uses its own ChaCha stream, so results do not depend on thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::tree::{NacChild, NacTree};

/// Row-major `n x d` sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * d);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != d {
                return Err(Error::Data {
                    row: i + 1,
                    msg: format!("expected {d} columns, found {}", r.len()),
                });
            }
            data.extend(r);
        }
        Ok(SampleMatrix { n, d, data })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks(self.d.max(1)).take(self.n)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Positive stable variate with Laplace transform `exp(-t^alpha)`.
pub fn sample_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0, "stable index must be in (0, 1]");
    if alpha == 1.0 {
        return 1.0;
    }
    let u = std::f64::consts::PI * open_unit(rng);
    let e: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    a * ((1.0 - alpha) * u).sin().powf((1.0 - alpha) / alpha) / e.powf((1.0 - alpha) / alpha)
}

/// Variate with Laplace transform `exp(-v ((1 + t)^alpha - 1))`, the
/// exponentially tilted stable law. The draw is the sum of `ceil(v)` pieces,
/// each obtained by rejection with acceptance probability at least `1/e`.
pub fn sample_tilted_stable<R: Rng>(alpha: f64, v: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return v;
    }
    let m = v.ceil().max(1.0) as usize;
    let scale = (v / m as f64).powf(1.0 / alpha);
    let mut total = 0.0;
    for _ in 0..m {
        loop {
            let s = scale * sample_stable(alpha, rng);
            if open_unit(rng) <= (-s).exp() {
                total += s;
                break;
            }
        }
    }
    total
}

#[derive(Clone, Copy)]
enum Kind {
    Gumbel,
    Clayton,
}

fn sampling_kind(tree: &NacTree) -> Result<Kind> {
    tree.validate()?;
    if tree.levels() > 2 {
        return Err(Error::unsupported("sampling supports at most two levels"));
    }
    if tree.all_family(Family::Gumbel) {
        Ok(Kind::Gumbel)
    } else if tree.all_family(Family::Clayton) {
        Ok(Kind::Clayton)
    } else {
        Err(Error::unsupported("sampling supports all-Gumbel or all-Clayton structures only"))
    }
}

fn clamp_interior(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

fn sample_row(tree: &NacTree, kind: Kind, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let root = tree.generator();
    let th0 = root.theta();
    let v0 = match kind {
        Kind::Gumbel => sample_stable(1.0 / th0, rng),
        Kind::Clayton => Gamma::new(1.0 / th0, 1.0).expect("valid gamma shape").sample(rng),
    };
    let mut leaf = |g: &GeneratorSpec, v: f64, i: usize, rng: &mut ChaCha8Rng| {
        let e: f64 = rng.sample(Exp1);
        out[i] = clamp_interior(g.psi(e / v));
    };
    for c in tree.children() {
        match c {
            NacChild::Leaf(i) => leaf(&root, v0, *i, rng),
            NacChild::Node(sub) => {
                let g = sub.generator();
                let alpha = th0 / g.theta();
                let v = match kind {
                    Kind::Gumbel => v0.powf(1.0 / alpha) * sample_stable(alpha, rng),
                    Kind::Clayton => sample_tilted_stable(alpha, v0, rng),
                };
                for sc in sub.children() {
                    if let NacChild::Leaf(i) = sc {
                        leaf(&g, v, *i, rng);
                    }
                }
            }
        }
    }
}

/// `n` observations from a two-level nested Gumbel or Clayton copula.
/// Observation `i` uses stream `i` of a ChaCha8 generator seeded with `seed`.
pub fn sample_nested(tree: &NacTree, n: usize, seed: u64) -> Result<SampleMatrix> {
    let kind = sampling_kind(tree)?;
    let d = tree.dim();
    let mut data = vec![0.0; n * d];
    data.par_chunks_mut(d.max(1)).enumerate().for_each(|(i, row)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        sample_row(tree, kind, &mut rng, row);
    });
    Ok(SampleMatrix { n, d, data })
}
