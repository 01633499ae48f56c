//! Composable magma descriptors and the operations every other module
//! builds on: validation, units, products, inverses.

use serde::{Deserialize, Serialize};

use crate::element::{Element, PairRight};
use crate::error::{Error, Result};
use crate::hm::{hm_product, SqueezeMap, StepFunction};
use crate::matrix::UnimodularMatrix;
use crate::rational::Rational;

/// Description of a unital topologized magma. Descriptors form a finite
/// tree; every constructor validates its own level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagmaDescriptor {
    FiniteMagma {
        elements: Vec<String>,
        /// `table[i][j]` is the product of `elements[i]` and `elements[j]`.
        table: Vec<Vec<String>>,
        unit: String,
        /// Computed by exhaustive triple scan at construction.
        associative: bool,
    },
    RationalVectorGroup {
        dim: usize,
    },
    RationalTorus {
        dim: usize,
    },
    /// `HM0` of the base, with the squeeze map driving its absorbing
    /// automorphism.
    HM0Of {
        base: Box<MagmaDescriptor>,
        squeeze: SqueezeMap,
    },
    /// `base ⋊_α Z` where `α` is the squeeze automorphism of the base
    /// (the base must be an `HM0Of`).
    SemidirectZ {
        base: Box<MagmaDescriptor>,
        squeeze: SqueezeMap,
    },
    /// `base ⋊ H` for a registry-grown group of torus automorphisms,
    /// seeded by explicit generators.
    SemidirectAut {
        base: Box<MagmaDescriptor>,
        registry_id: String,
        seeds: Vec<UnimodularMatrix>,
    },
}

/// Validates a finite Cayley table and computes the associativity flag.
/// Associativity is not required; non-associative magmas are first-class.
pub fn mk_finite_magma(elements: Vec<String>, table: Vec<Vec<String>>, unit: String) -> Result<MagmaDescriptor> {
    let n = elements.len();
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "table must be {n}x{n} for {n} elements"
        )));
    }
    let index = |name: &str| -> Result<usize> {
        elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    };
    for row in &table {
        for entry in row {
            index(entry)?;
        }
    }
    let u = index(&unit)?;
    for (i, e) in elements.iter().enumerate() {
        if &table[u][i] != e {
            return Err(Error::UnitLawViolation(format!("unit * {e} = {}", table[u][i])));
        }
        if &table[i][u] != e {
            return Err(Error::UnitLawViolation(format!("{e} * unit = {}", table[i][u])));
        }
    }
    let mut associative = true;
    'scan: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let xy = index(&table[x][y])?;
                let yz = index(&table[y][z])?;
                if table[xy][z] != table[x][yz] {
                    associative = false;
                    break 'scan;
                }
            }
        }
    }
    Ok(MagmaDescriptor::FiniteMagma {
        elements,
        table,
        unit,
        associative,
    })
}

/// Cyclic group of order `n` with symbols `e, g1, ..., g{n-1}`.
pub fn mk_cyclic(n: usize) -> MagmaDescriptor {
    assert!(n >= 1);
    let name = |i: usize| if i == 0 { "e".to_string() } else { format!("g{i}") };
    let elements: Vec<String> = (0..n).map(name).collect();
    let table: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| name((i + j) % n)).collect())
        .collect();
    mk_finite_magma(elements, table, "e".to_string()).expect("cyclic table is valid")
}

/// Left-zero band on `{a, b}` with an adjoined unit: `a*b = a`, `b*a = b`.
/// Associative but not a group; exercises the non-group code paths.
pub fn mk_left_zero_band() -> MagmaDescriptor {
    let elements = vec!["e".to_string(), "a".to_string(), "b".to_string()];
    let table = vec![
        vec!["e".to_string(), "a".to_string(), "b".to_string()],
        vec!["a".to_string(), "a".to_string(), "a".to_string()],
        vec!["b".to_string(), "b".to_string(), "b".to_string()],
    ];
    mk_finite_magma(elements, table, "e".to_string()).expect("band table is valid")
}

/// The smallest genuinely non-associative unital magma used in tests:
/// `(a*a)*a = b*a = a` but `a*(a*a) = a*b = b`.
pub fn mk_nonassoc() -> MagmaDescriptor {
    let elements = vec!["e".to_string(), "a".to_string(), "b".to_string()];
    let table = vec![
        vec!["e".to_string(), "a".to_string(), "b".to_string()],
        vec!["a".to_string(), "b".to_string(), "b".to_string()],
        vec!["b".to_string(), "a".to_string(), "a".to_string()],
    ];
    mk_finite_magma(elements, table, "e".to_string()).expect("table is valid")
}

/// The unit element of a descriptor.
pub fn unit_of(m: &MagmaDescriptor) -> Element {
    match m {
        MagmaDescriptor::FiniteMagma { unit, .. } => Element::FiniteAtom(unit.clone()),
        MagmaDescriptor::RationalVectorGroup { dim } => {
            Element::RationalVector(vec![Rational::zero(); *dim])
        }
        MagmaDescriptor::RationalTorus { dim } => Element::TorusPoint(vec![Rational::zero(); *dim]),
        MagmaDescriptor::HM0Of { base, .. } => Element::Step(StepFunction::constant(unit_of(base))),
        MagmaDescriptor::SemidirectZ { base, .. } => {
            Element::pair(unit_of(base), PairRight::Exponent(0))
        }
        MagmaDescriptor::SemidirectAut { base, .. } => {
            let dim = match base.as_ref() {
                MagmaDescriptor::RationalTorus { dim } => *dim,
                _ => 0,
            };
            Element::pair(
                unit_of(base),
                PairRight::Aut(crate::automorphism::Automorphism::identity_matrix(dim)),
            )
        }
    }
}

/// Checks that an element has the shape the descriptor demands.
pub fn element_in(m: &MagmaDescriptor, x: &Element) -> Result<()> {
    match (m, x) {
        (MagmaDescriptor::FiniteMagma { elements, .. }, Element::FiniteAtom(name)) => {
            if elements.contains(name) {
                Ok(())
            } else {
                Err(Error::UnknownSymbol(name.clone()))
            }
        }
        (MagmaDescriptor::RationalVectorGroup { dim }, Element::RationalVector(coords)) => {
            if coords.len() == *dim {
                Ok(())
            } else {
                Err(Error::ShapeMismatch(format!(
                    "vector dim {} != {dim}",
                    coords.len()
                )))
            }
        }
        (MagmaDescriptor::RationalTorus { dim }, Element::TorusPoint(coords)) => {
            if coords.len() != *dim {
                return Err(Error::ShapeMismatch(format!(
                    "torus dim {} != {dim}",
                    coords.len()
                )));
            }
            let bad = coords
                .iter()
                .any(|c| c.is_negative() || *c >= Rational::one());
            if bad {
                Err(Error::ShapeMismatch(
                    "torus coordinates must be canonical in [0,1)".into(),
                ))
            } else {
                Ok(())
            }
        }
        (MagmaDescriptor::HM0Of { base, .. }, Element::Step(f)) => {
            for piece in f.pieces() {
                element_in(base, &piece.value)?;
            }
            if f.pieces()[0].value != unit_of(base) {
                return Err(Error::NotInHM0);
            }
            Ok(())
        }
        (MagmaDescriptor::SemidirectZ { base, .. }, Element::Pair { left, right }) => {
            element_in(base, left)?;
            match right {
                PairRight::Exponent(_) => Ok(()),
                PairRight::Aut(_) => Err(Error::ShapeMismatch(
                    "semidirect-Z right component must be an exponent".into(),
                )),
            }
        }
        (MagmaDescriptor::SemidirectAut { base, .. }, Element::Pair { left, right }) => {
            element_in(base, left)?;
            match right {
                PairRight::Aut(crate::automorphism::Automorphism::MatrixAut(mat)) => {
                    let dim = match base.as_ref() {
                        MagmaDescriptor::RationalTorus { dim } => *dim,
                        _ => {
                            return Err(Error::ShapeMismatch(
                                "semidirect-aut base must be a torus".into(),
                            ))
                        }
                    };
                    if mat.size() == dim {
                        Ok(())
                    } else {
                        Err(Error::ShapeMismatch(format!(
                            "automorphism size {} != torus dim {dim}",
                            mat.size()
                        )))
                    }
                }
                _ => Err(Error::ShapeMismatch(
                    "semidirect-aut right component must be a matrix automorphism".into(),
                )),
            }
        }
        _ => Err(Error::ShapeMismatch(format!(
            "element {x:?} does not fit descriptor"
        ))),
    }
}

/// The binary operation of the magma described by `m`.
pub fn op_apply(m: &MagmaDescriptor, x: &Element, y: &Element) -> Result<Element> {
    element_in(m, x)?;
    element_in(m, y)?;
    match (m, x, y) {
        (MagmaDescriptor::FiniteMagma { elements, table, .. }, Element::FiniteAtom(a), Element::FiniteAtom(b)) => {
            let i = elements.iter().position(|e| e == a).unwrap();
            let j = elements.iter().position(|e| e == b).unwrap();
            Ok(Element::FiniteAtom(table[i][j].clone()))
        }
        (MagmaDescriptor::RationalVectorGroup { .. }, Element::RationalVector(a), Element::RationalVector(b)) => {
            Ok(Element::RationalVector(
                a.iter().zip(b).map(|(p, q)| p + q).collect(),
            ))
        }
        (MagmaDescriptor::RationalTorus { .. }, Element::TorusPoint(a), Element::TorusPoint(b)) => {
            Ok(Element::torus(a.iter().zip(b).map(|(p, q)| p + q).collect()))
        }
        (MagmaDescriptor::HM0Of { base, .. }, Element::Step(f), Element::Step(g)) => {
            Ok(Element::Step(hm_product(base, f, g)?))
        }
        (MagmaDescriptor::SemidirectZ { .. } | MagmaDescriptor::SemidirectAut { .. }, _, _) => {
            crate::semidirect::sd_multiply(m, x, y)
        }
        _ => unreachable!("shape already checked"),
    }
}

/// Whether the described magma is a group (so inverses are computable).
pub fn is_group(m: &MagmaDescriptor) -> bool {
    match m {
        MagmaDescriptor::FiniteMagma {
            elements,
            table,
            unit,
            associative,
        } => {
            *associative
                && elements.iter().enumerate().all(|(i, _)| {
                    elements
                        .iter()
                        .enumerate()
                        .any(|(j, _)| &table[i][j] == unit && &table[j][i] == unit)
                })
        }
        MagmaDescriptor::RationalVectorGroup { .. } | MagmaDescriptor::RationalTorus { .. } => true,
        MagmaDescriptor::HM0Of { base, .. } => is_group(base),
        MagmaDescriptor::SemidirectZ { base, .. } | MagmaDescriptor::SemidirectAut { base, .. } => {
            is_group(base)
        }
    }
}

/// Inverse of `x` in a group base; `NoInverse` when the base is not a group.
pub fn invert(m: &MagmaDescriptor, x: &Element) -> Result<Element> {
    element_in(m, x)?;
    if !is_group(m) {
        return Err(Error::NoInverse(format!("{m:?}")));
    }
    match (m, x) {
        (MagmaDescriptor::FiniteMagma { elements, table, unit, .. }, Element::FiniteAtom(a)) => {
            let i = elements.iter().position(|e| e == a).unwrap();
            let j = elements
                .iter()
                .enumerate()
                .position(|(j, _)| &table[i][j] == unit && &table[j][i] == unit)
                .ok_or_else(|| Error::NoInverse(format!("{a} has no inverse")))?;
            Ok(Element::FiniteAtom(elements[j].clone()))
        }
        (MagmaDescriptor::RationalVectorGroup { .. }, Element::RationalVector(coords)) => {
            Ok(Element::RationalVector(coords.iter().map(|c| -c).collect()))
        }
        (MagmaDescriptor::RationalTorus { .. }, Element::TorusPoint(coords)) => {
            Ok(Element::torus(coords.iter().map(|c| -c).collect()))
        }
        (MagmaDescriptor::HM0Of { base, .. }, Element::Step(f)) => {
            let raw = f
                .pieces()
                .iter()
                .map(|p| Ok((p.start.clone(), invert(base, &p.value)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Element::Step(crate::hm::step_canonicalize(raw)?))
        }
        (MagmaDescriptor::SemidirectZ { .. } | MagmaDescriptor::SemidirectAut { .. }, _) => {
            crate::semidirect::sd_invert(m, x)
        }
        _ => unreachable!("shape already checked"),
    }
}
