//! The element model shared by every magma descriptor.

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::hm::StepFunction;
use crate::rational::Rational;

/// Right component of a semidirect-product pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRight {
    /// Exponent in `X ⋊_α Z`.
    Exponent(i64),
    /// Automorphism handle in `X ⋊ H`.
    Aut(Automorphism),
}

/// An element of some magma. Which variants are legal is dictated by the
/// descriptor; `element_in` checks the match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Element {
    FiniteAtom(String),
    RationalVector(Vec<Rational>),
    /// Coordinates are canonical representatives in `[0, 1)`.
    TorusPoint(Vec<Rational>),
    Step(StepFunction),
    Pair { left: Box<Element>, right: PairRight },
}

impl Element {
    pub fn atom(name: &str) -> Element {
        Element::FiniteAtom(name.to_string())
    }

    pub fn torus(coords: Vec<Rational>) -> Element {
        Element::TorusPoint(coords.into_iter().map(|c| c.mod1()).collect())
    }

    pub fn vector(coords: Vec<Rational>) -> Element {
        Element::RationalVector(coords)
    }

    pub fn pair(left: Element, right: PairRight) -> Element {
        Element::Pair {
            left: Box::new(left),
            right,
        }
    }

    pub fn pair_z(left: Element, n: i64) -> Element {
        Element::pair(left, PairRight::Exponent(n))
    }
}
