//! Automorphism actions on elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::hm::{alpha_apply, SqueezeMap};
use crate::matrix::UnimodularMatrix;

/// Application direction for [`aut_act`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Automorphism {
    /// Bijection of a finite magma's symbols, fixing the unit.
    FinitePermutation(BTreeMap<String, String>),
    /// Torus automorphism: row vector times matrix, reduced mod 1.
    MatrixAut(UnimodularMatrix),
    /// `f -> f o s^k` on step functions.
    SqueezePower { k: i64, squeeze: SqueezeMap },
    /// Right-to-left composition.
    Composite(Vec<Automorphism>),
}

impl Automorphism {
    pub fn identity_matrix(dim: usize) -> Automorphism {
        Automorphism::MatrixAut(UnimodularMatrix::identity(dim))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Automorphism::FinitePermutation(map) => map.iter().all(|(k, v)| k == v),
            Automorphism::MatrixAut(m) => *m == UnimodularMatrix::identity(m.size()),
            Automorphism::SqueezePower { k, .. } => *k == 0,
            Automorphism::Composite(parts) => parts.iter().all(|a| a.is_identity()),
        }
    }

    pub fn inverse(&self) -> Automorphism {
        match self {
            Automorphism::FinitePermutation(map) => Automorphism::FinitePermutation(
                map.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
            ),
            Automorphism::MatrixAut(m) => Automorphism::MatrixAut(m.inverse()),
            Automorphism::SqueezePower { k, squeeze } => Automorphism::SqueezePower {
                k: -k,
                squeeze: squeeze.clone(),
            },
            Automorphism::Composite(parts) => {
                Automorphism::Composite(parts.iter().rev().map(|a| a.inverse()).collect())
            }
        }
    }

    /// Composition `self o other` as matrix automorphisms, kept in the
    /// canonical single-matrix form: `(self o other)(v) = v * B_other * B_self`.
    pub fn compose_matrix(&self, other: &Automorphism) -> Result<Automorphism> {
        match (self, other) {
            (Automorphism::MatrixAut(a), Automorphism::MatrixAut(b)) => {
                Ok(Automorphism::MatrixAut(b.mul(a)))
            }
            _ => Err(Error::ShapeMismatch(
                "matrix composition requires matrix automorphisms".into(),
            )),
        }
    }
}

/// Applies `alpha` (or its inverse) to an element.
pub fn aut_act(alpha: &Automorphism, x: &Element, direction: Direction) -> Result<Element> {
    match (alpha, x) {
        (Automorphism::FinitePermutation(map), Element::FiniteAtom(name)) => {
            let image = match direction {
                Direction::Forward => map.get(name).cloned(),
                Direction::Inverse => map
                    .iter()
                    .find(|(_, v)| *v == name)
                    .map(|(k, _)| k.clone()),
            };
            image
                .map(Element::FiniteAtom)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))
        }
        (Automorphism::MatrixAut(m), Element::TorusPoint(coords)) => {
            if coords.len() != m.size() {
                return Err(Error::ShapeMismatch(format!(
                    "torus point dim {} vs matrix size {}",
                    coords.len(),
                    m.size()
                )));
            }
            let image = match direction {
                Direction::Forward => m.act_row(coords),
                Direction::Inverse => m.inverse().act_row(coords),
            };
            Ok(Element::torus(image))
        }
        (Automorphism::SqueezePower { k, squeeze }, Element::Step(f)) => {
            let k = match direction {
                Direction::Forward => *k,
                Direction::Inverse => -*k,
            };
            Ok(Element::Step(alpha_apply(f, k, squeeze)?))
        }
        (Automorphism::Composite(parts), _) => {
            let mut current = x.clone();
            match direction {
                // forward applies right-to-left; inverse the reversed,
                // inverted sequence, i.e. left-to-right with each inverse
                Direction::Forward => {
                    for a in parts.iter().rev() {
                        current = aut_act(a, &current, Direction::Forward)?;
                    }
                }
                Direction::Inverse => {
                    for a in parts.iter() {
                        current = aut_act(a, &current, Direction::Inverse)?;
                    }
                }
            }
            Ok(current)
        }
        _ => Err(Error::ShapeMismatch(format!(
            "automorphism {alpha:?} does not act on {x:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn matrix_aut_forward_matches_spec_example() {
        let a = UnimodularMatrix::from_i64(&[&[5, 1], &[-6, -1]]).unwrap();
        let aut = Automorphism::MatrixAut(a);
        let x = Element::torus(vec![rat(2, 5), rat(1, 3)]);
        let image = aut_act(&aut, &x, Direction::Forward).unwrap();
        assert_eq!(image, Element::torus(vec![rat(0, 1), rat(1, 15)]));
    }

    #[test]
    fn forward_then_inverse_is_identity() {
        let a = UnimodularMatrix::from_i64(&[&[5, 1], &[-6, -1]]).unwrap();
        let aut = Automorphism::MatrixAut(a);
        for (p, q) in [(1, 3), (2, 7), (5, 11), (0, 1)] {
            let x = Element::torus(vec![rat(p, q), rat(p + 1, q + 1)]);
            let there = aut_act(&aut, &x, Direction::Forward).unwrap();
            let back = aut_act(&aut, &there, Direction::Inverse).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn permutation_acts_and_inverts() {
        let map: BTreeMap<String, String> = [("e", "e"), ("a", "b"), ("b", "a")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let aut = Automorphism::FinitePermutation(map);
        let a = Element::atom("a");
        assert_eq!(aut_act(&aut, &a, Direction::Forward).unwrap(), Element::atom("b"));
        assert_eq!(aut_act(&aut, &a, Direction::Inverse).unwrap(), Element::atom("b"));
        assert_eq!(
            aut_act(&aut, &Element::atom("e"), Direction::Forward).unwrap(),
            Element::atom("e")
        );
    }

    #[test]
    fn composite_applies_right_to_left() {
        let a = UnimodularMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let b = UnimodularMatrix::from_i64(&[&[1, 0], &[1, 1]]).unwrap();
        let comp = Automorphism::Composite(vec![
            Automorphism::MatrixAut(a.clone()),
            Automorphism::MatrixAut(b.clone()),
        ]);
        let x = Element::torus(vec![rat(1, 5), rat(1, 7)]);
        let expected = aut_act(
            &Automorphism::MatrixAut(a),
            &aut_act(&Automorphism::MatrixAut(b), &x, Direction::Forward).unwrap(),
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(aut_act(&comp, &x, Direction::Forward).unwrap(), expected);
        // composite forward then inverse round-trips
        let there = aut_act(&comp, &x, Direction::Forward).unwrap();
        assert_eq!(aut_act(&comp, &there, Direction::Inverse).unwrap(), x);
    }
}
