//! Text form of nesting structures.
//!
//! ```text
//! tree   := family "(" params ";" child ("," child)* ")"
//! family := "C" | "G" | "F" | "J" | "A" | "T"
//! params := number                          (C, G, F, J, A)
//!         | number "," number "," base      (T: theta, tilt, base)
//! base   := "exp" | "inv"
//! child  := integer | tree                  (leaf indices are 1-based)
//! ```
//!
//! `G(1.3333; 1, G(2; 2, 3))` is a three-dimensional nested Gumbel copula.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec, TiltBase};
use crate::tree::{NacChild, NacTree};

/// Parses a structure expression and validates the resulting tree.
pub fn parse(text: &str) -> Result<NacTree> {
    let mut p = Parser { src: text, pos: 0 };
    let tree = p.tree()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    tree.validate()?;
    Ok(tree)
}

impl FromStr for NacTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn token(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ',' | ';'))
            .unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let tok = self.token().to_string();
        tok.parse::<f64>().map_err(|_| Error::Parse {
            offset: start,
            msg: format!("expected a number, found '{tok}'"),
        })
    }

    fn tree(&mut self) -> Result<NacTree> {
        self.skip_ws();
        let start = self.pos;
        let letter = self.peek().ok_or_else(|| self.err("expected a family letter"))?;
        self.pos += letter.len_utf8();
        self.expect('(')?;
        let theta = self.number()?;
        let family = match letter {
            'C' => Family::Clayton,
            'G' => Family::Gumbel,
            'F' => Family::Frank,
            'J' => Family::Joe,
            'A' => Family::Amh,
            'T' => {
                self.expect(',')?;
                let c = self.number()?;
                self.expect(',')?;
                let kw_pos = self.pos;
                let base = match self.token() {
                    "exp" => TiltBase::Exp,
                    "inv" => TiltBase::Inverse,
                    other => {
                        let msg = format!("unknown tilt base '{other}' (expected exp or inv)");
                        self.pos = kw_pos;
                        return Err(self.err(&msg));
                    }
                };
                Family::Tilted { base, c }
            }
            other => {
                self.pos = start;
                return Err(self.err(&format!("unknown family letter '{other}'")));
            }
        };
        let generator = GeneratorSpec::new(family, theta)?;
        self.expect(';')?;
        let mut children = vec![self.child()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    children.push(self.child()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected ',' or ')'")),
            }
        }
        NacTree::new(generator, children)
    }

    fn child(&mut self) -> Result<NacChild> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let tok = self.token().to_string();
                let idx: usize = tok.parse().map_err(|_| Error::Parse {
                    offset: start,
                    msg: format!("expected a leaf index, found '{tok}'"),
                })?;
                if idx == 0 {
                    return Err(Error::Parse {
                        offset: start,
                        msg: "leaf indices start at 1".into(),
                    });
                }
                Ok(NacChild::Leaf(idx - 1))
            }
            Some(_) => Ok(NacChild::Node(self.tree()?)),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let t = parse("G(1.3333; 1, G(2; 2, 3))").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.levels(), 2);
        assert_eq!(t.to_string(), "G(1.3333; 1, G(2; 2, 3))");
    }

    #[test]
    fn whitespace_is_flexible() {
        let t = parse("  C( 0.5 ;1,C(2;2 ,3 ) )").unwrap();
        assert_eq!(t.to_string(), "C(0.5; 1, C(2; 2, 3))");
    }

    #[test]
    fn tilted_syntax() {
        let t = parse("T(1.5, 0.25, exp; 1, T(2, 0.25, exp; 2, 3))").unwrap();
        assert_eq!(t.to_string(), "T(1.5, 0.25, exp; 1, T(2, 0.25, exp; 2, 3))");
        assert!(parse("T(1.5, 0.25, foo; 1, 2)").is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("G(2; 1, 2"), Err(Error::Parse { .. })));
        assert!(matches!(parse("X(2; 1, 2)"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse("G(2; 0, 1)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("G(abc; 1)"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse("G(2; 1, 2) x"), Err(Error::Parse { .. })));
        assert!(matches!(parse("G(0.5; 1, 2)"), Err(Error::Config(_))));
        assert!(matches!(parse("G(2; 1, G(1.5; 2, 3))"), Err(Error::Config(_))));
        assert!(parse("G(2; 1, 3)").is_err());
    }

    fn arb_tree() -> impl Strategy<Value = NacTree> {
        // Random Gumbel/Clayton trees with up to three levels.
        (any::<bool>(), proptest::collection::vec((0usize..3, 1usize..4), 1..4), 1.0f64..3.0, 0usize..1000).prop_map(
            |(clayton, shape, base, perm_seed)| {
                let mk = |theta: f64| {
                    if clayton {
                        GeneratorSpec::clayton(theta).unwrap()
                    } else {
                        GeneratorSpec::gumbel(theta).unwrap()
                    }
                };
                let mut next = 0usize;
                let mut leaf = || {
                    next += 1;
                    NacChild::Leaf(next - 1)
                };
                let mut children = vec![leaf()];
                for (i, &(kind, size)) in shape.iter().enumerate() {
                    let th = base + 0.5 * (i as f64 + 1.0);
                    match kind {
                        0 => children.push(leaf()),
                        1 => {
                            let ls = (0..size).map(|_| leaf()).collect();
                            children.push(NacChild::Node(NacTree::new(mk(th), ls).unwrap()));
                        }
                        _ => {
                            let ls = (0..size).map(|_| leaf()).collect();
                            let bottom = NacTree::new(mk(th + 1.25), ls).unwrap();
                            let mid = NacTree::new(mk(th), vec![NacChild::Node(bottom), leaf()]).unwrap();
                            children.push(NacChild::Node(mid));
                        }
                    }
                }
                let t = NacTree::new(mk(base), children).unwrap();
                // Relabel leaves with a deterministic permutation.
                let d = t.dim();
                let shift = perm_seed % d;
                relabel(&t, &|i| (i + shift) % d)
            },
        )
    }

    fn relabel(t: &NacTree, f: &dyn Fn(usize) -> usize) -> NacTree {
        let children = t
            .children()
            .iter()
            .map(|c| match c {
                NacChild::Leaf(i) => NacChild::Leaf(f(*i)),
                NacChild::Node(s) => NacChild::Node(relabel(s, f)),
            })
            .collect();
        NacTree::new(t.generator(), children).unwrap()
    }

    proptest! {
        #[test]
        fn canonical_round_trip(t in arb_tree()) {
            let text = t.to_string();
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
