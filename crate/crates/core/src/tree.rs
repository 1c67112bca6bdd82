//! Nesting structures.

use std::fmt;

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::inner_coeffs::NodePair;

/// Deepest supported nesting (root, middle, bottom).
pub const MAX_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum NacChild {
    /// Zero-based coordinate index.
    Leaf(usize),
    Node(NacTree),
}

/// A generator with an ordered list of children.
#[derive(Debug, Clone, PartialEq)]
pub struct NacTree {
    generator: GeneratorSpec,
    children: Vec<NacChild>,
}

impl NacTree {
    /// Builds a node, checking the nesting condition for every direct child
    /// node. Leaf indices are checked by [`NacTree::validate`].
    pub fn new(generator: GeneratorSpec, children: Vec<NacChild>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::arg("a nesting node needs at least one child"));
        }
        for c in &children {
            if let NacChild::Node(sub) = c {
                NodePair::new(generator, sub.generator)?;
            }
        }
        Ok(NacTree { generator, children })
    }

    /// A plain Archimedean copula on coordinates `0..d`.
    pub fn archimedean(generator: GeneratorSpec, d: usize) -> Result<Self> {
        Self::new(generator, (0..d).map(NacChild::Leaf).collect())
    }

    /// The two-parameter form `C0(u_1, C1(u_2, ..., u_d))`.
    pub fn fully_nested_pair(root: GeneratorSpec, child: GeneratorSpec, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("need at least two coordinates"));
        }
        let inner = NacTree::new(child, (1..d).map(NacChild::Leaf).collect())?;
        let t = NacTree::new(root, vec![NacChild::Leaf(0), NacChild::Node(inner)])?;
        t.validate()?;
        Ok(t)
    }

    pub fn generator(&self) -> GeneratorSpec {
        self.generator
    }

    pub fn children(&self) -> &[NacChild] {
        &self.children
    }

    /// Number of leaves below this node.
    pub fn dim(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                NacChild::Leaf(_) => 1,
                NacChild::Node(t) => t.dim(),
            })
            .sum()
    }

    /// Number of levels: 1 for a plain Archimedean copula.
    pub fn levels(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| match c {
                NacChild::Leaf(_) => 0,
                NacChild::Node(t) => t.levels(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Leaf indices in depth-first order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        for c in &self.children {
            match c {
                NacChild::Leaf(i) => out.push(*i),
                NacChild::Node(t) => t.collect_leaves(out),
            }
        }
    }

    /// Checks that the leaves are a permutation of `0..d` and that the tree
    /// has at most [`MAX_LEVELS`] levels.
    pub fn validate(&self) -> Result<()> {
        let levels = self.levels();
        if levels > MAX_LEVELS {
            return Err(Error::unsupported(format!(
                "{levels} nesting levels; at most {MAX_LEVELS} are supported"
            )));
        }
        let leaves = self.leaves();
        let d = leaves.len();
        let mut seen = vec![false; d];
        for &i in &leaves {
            if i >= d {
                return Err(Error::arg(format!("leaf index {} out of range for dimension {d}", i + 1)));
            }
            if seen[i] {
                return Err(Error::arg(format!("leaf index {} appears twice", i + 1)));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Copy of the tree with every generator replaced by `f(depth, g)`
    /// (depth 0 at the root).
    pub fn map_generators<F>(&self, f: &F) -> Result<NacTree>
    where
        F: Fn(usize, &GeneratorSpec) -> Result<GeneratorSpec>,
    {
        self.map_at(0, f)
    }

    fn map_at<F>(&self, depth: usize, f: &F) -> Result<NacTree>
    where
        F: Fn(usize, &GeneratorSpec) -> Result<GeneratorSpec>,
    {
        let children = self
            .children
            .iter()
            .map(|c| match c {
                NacChild::Leaf(i) => Ok(NacChild::Leaf(*i)),
                NacChild::Node(t) => Ok(NacChild::Node(t.map_at(depth + 1, f)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        NacTree::new(f(depth, &self.generator)?, children)
    }

    /// Whether all generators belong to `family`.
    pub fn all_family(&self, family: Family) -> bool {
        self.generator.family() == family
            && self.children.iter().all(|c| match c {
                NacChild::Leaf(_) => true,
                NacChild::Node(t) => t.all_family(family),
            })
    }
}

impl fmt::Display for NacTree {
    /// Canonical structure expression, e.g. `G(1.5; 1, G(2; 2, 3))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator;
        write!(f, "{}(", g.family().letter())?;
        match g.family() {
            Family::Tilted { base, c } => write!(f, "{}, {c}, {}", g.theta(), base.keyword())?,
            _ => write!(f, "{}", g.theta())?,
        }
        write!(f, ";")?;
        for (i, c) in self.children.iter().enumerate() {
            write!(f, "{}", if i == 0 { " " } else { ", " })?;
            match c {
                NacChild::Leaf(idx) => write!(f, "{}", idx + 1)?,
                NacChild::Node(t) => write!(f, "{t}")?,
            }
        }
        write!(f, ")")
    }
}
