//! Symbolic neighborhoods of the unit and decidable membership.

use serde::{Deserialize, Serialize};

use crate::element::{Element, PairRight};
use crate::error::{Error, Result};
use crate::magma::MagmaDescriptor;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborhoodSpec {
    /// Coordinates within `eps` of the unit: absolute value for vectors,
    /// distance to the nearest integer for torus points. An optional
    /// coordinate set restricts which coordinates are constrained.
    EpsBox {
        eps: Rational,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<Vec<usize>>,
    },
    /// Explicit finite subset.
    Subset { members: Vec<Element> },
    /// `N(inner, a, b; eps)`: step functions whose defect on `[a,b)` is
    /// strictly below `eps`.
    HMSubbasic {
        inner: Box<NeighborhoodSpec>,
        a: Rational,
        b: Rational,
        eps: Rational,
    },
    Intersection(Vec<NeighborhoodSpec>),
    /// Base neighborhood times the discrete unit of the right factor.
    ProductDiscrete { base: Box<NeighborhoodSpec> },
    /// The whole magma (used as the vacuous normalization result).
    Whole,
}

impl NeighborhoodSpec {
    pub fn eps_box(eps: Rational) -> NeighborhoodSpec {
        NeighborhoodSpec::EpsBox { eps, coords: None }
    }

    pub fn subset(members: Vec<Element>) -> NeighborhoodSpec {
        NeighborhoodSpec::Subset { members }
    }

    pub fn subbasic(inner: NeighborhoodSpec, a: Rational, b: Rational, eps: Rational) -> NeighborhoodSpec {
        NeighborhoodSpec::HMSubbasic {
            inner: Box::new(inner),
            a,
            b,
            eps,
        }
    }

    pub fn product_discrete(base: NeighborhoodSpec) -> NeighborhoodSpec {
        NeighborhoodSpec::ProductDiscrete {
            base: Box::new(base),
        }
    }

    /// Structural validity against a descriptor: interval bounds of every
    /// subbasic part, and nesting shapes.
    pub fn validate(&self) -> Result<()> {
        match self {
            NeighborhoodSpec::EpsBox { eps, .. } => {
                if *eps <= Rational::zero() {
                    Err(Error::BadInterval("eps must be positive".into()))
                } else {
                    Ok(())
                }
            }
            NeighborhoodSpec::Subset { .. } | NeighborhoodSpec::Whole => Ok(()),
            NeighborhoodSpec::HMSubbasic { inner, a, b, eps } => {
                if a < &Rational::zero() || b > &Rational::one() || a >= b {
                    return Err(Error::BadInterval(format!("[{a}, {b})")));
                }
                if *eps <= Rational::zero() {
                    return Err(Error::BadInterval("eps must be positive".into()));
                }
                inner.validate()
            }
            NeighborhoodSpec::Intersection(parts) => {
                if parts.is_empty() {
                    return Err(Error::BadInterval("empty intersection".into()));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            NeighborhoodSpec::ProductDiscrete { base } => base.validate(),
        }
    }
}

/// Exact membership of `x` in the neighborhood `u` of the magma `m`.
pub fn nbhd_member(m: &MagmaDescriptor, u: &NeighborhoodSpec, x: &Element) -> Result<bool> {
    match u {
        NeighborhoodSpec::Whole => Ok(true),
        NeighborhoodSpec::EpsBox { eps, coords } => {
            let distances: Vec<Rational> = match x {
                Element::RationalVector(cs) => cs.iter().map(|c| c.abs()).collect(),
                Element::TorusPoint(cs) => cs.iter().map(|c| c.dist_to_int()).collect(),
                _ => {
                    return Err(Error::ShapeMismatch(
                        "eps-box applies to vector or torus elements".into(),
                    ))
                }
            };
            let checked: Box<dyn Iterator<Item = &Rational>> = match coords {
                None => Box::new(distances.iter()),
                Some(idx) => {
                    if idx.iter().any(|&i| i >= distances.len()) {
                        return Err(Error::ShapeMismatch("coordinate index out of range".into()));
                    }
                    Box::new(idx.iter().map(|&i| &distances[i]))
                }
            };
            let mut ok = true;
            for d in checked {
                if d > eps {
                    ok = false;
                }
            }
            Ok(ok)
        }
        NeighborhoodSpec::Subset { members } => Ok(members.contains(x)),
        NeighborhoodSpec::HMSubbasic { inner, a, b, eps } => match x {
            Element::Step(f) => {
                let base = match m {
                    MagmaDescriptor::HM0Of { base, .. } => base.as_ref(),
                    _ => {
                        return Err(Error::ShapeMismatch(
                            "subbasic neighborhood needs an HM0 descriptor".into(),
                        ))
                    }
                };
                crate::hm::hm_nbhd_member(base, f, inner, a, b, eps)
            }
            _ => Err(Error::ShapeMismatch(
                "subbasic neighborhood applies to step functions".into(),
            )),
        },
        NeighborhoodSpec::Intersection(parts) => {
            for part in parts {
                if !nbhd_member(m, part, x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        NeighborhoodSpec::ProductDiscrete { base } => match (m, x) {
            (
                MagmaDescriptor::SemidirectZ { base: bm, .. },
                Element::Pair {
                    left,
                    right: PairRight::Exponent(n),
                },
            ) => Ok(*n == 0 && nbhd_member(bm, base, left)?),
            (
                MagmaDescriptor::SemidirectAut { base: bm, .. },
                Element::Pair {
                    left,
                    right: PairRight::Aut(a),
                },
            ) => Ok(a.is_identity() && nbhd_member(bm, base, left)?),
            _ => Err(Error::ShapeMismatch(
                "product-discrete neighborhood applies to semidirect pairs".into(),
            )),
        },
    }
}

/// A spec whose membership is the conjunction of the two inputs. EpsBox
/// pairs fuse to the minimum radius, Subset pairs to the set intersection;
/// anything else wraps in an Intersection.
pub fn nbhd_intersect(u1: &NeighborhoodSpec, u2: &NeighborhoodSpec) -> Result<NeighborhoodSpec> {
    match (u1, u2) {
        (NeighborhoodSpec::Whole, other) | (other, NeighborhoodSpec::Whole) => Ok(other.clone()),
        (
            NeighborhoodSpec::EpsBox { eps: e1, coords: c1 },
            NeighborhoodSpec::EpsBox { eps: e2, coords: c2 },
        ) if c1 == c2 => Ok(NeighborhoodSpec::EpsBox {
            eps: e1.clone().min(e2.clone()),
            coords: c1.clone(),
        }),
        (NeighborhoodSpec::Subset { members: m1 }, NeighborhoodSpec::Subset { members: m2 }) => {
            Ok(NeighborhoodSpec::Subset {
                members: m1.iter().filter(|x| m2.contains(x)).cloned().collect(),
            })
        }
        _ => Ok(NeighborhoodSpec::Intersection(vec![u1.clone(), u2.clone()])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magma::mk_cyclic;
    use crate::rational::rat;

    #[test]
    fn eps_box_torus_membership() {
        let t2 = MagmaDescriptor::RationalTorus { dim: 2 };
        let u = NeighborhoodSpec::eps_box(rat(1, 10));
        assert!(nbhd_member(&t2, &u, &Element::torus(vec![rat(0, 1), rat(1, 15)])).unwrap());
        assert!(!nbhd_member(&t2, &u, &Element::torus(vec![rat(1, 2), rat(0, 1)])).unwrap());
        // wrap-around: 14/15 is within 1/15 of the integer 1
        assert!(nbhd_member(&t2, &u, &Element::torus(vec![rat(14, 15), rat(0, 1)])).unwrap());
    }

    #[test]
    fn eps_box_coordinate_restriction() {
        let t2 = MagmaDescriptor::RationalTorus { dim: 2 };
        let u = NeighborhoodSpec::EpsBox {
            eps: rat(1, 10),
            coords: Some(vec![0]),
        };
        assert!(nbhd_member(&t2, &u, &Element::torus(vec![rat(1, 20), rat(1, 2)])).unwrap());
        assert!(!nbhd_member(&t2, &u, &Element::torus(vec![rat(1, 2), rat(1, 20)])).unwrap());
    }

    #[test]
    fn subset_membership_is_exact() {
        let c2 = mk_cyclic(2);
        let u = NeighborhoodSpec::subset(vec![Element::atom("e")]);
        assert!(nbhd_member(&c2, &u, &Element::atom("e")).unwrap());
        assert!(!nbhd_member(&c2, &u, &Element::atom("g1")).unwrap());
    }

    #[test]
    fn intersect_fuses_eps_and_subsets() {
        let a = NeighborhoodSpec::eps_box(rat(1, 10));
        let b = NeighborhoodSpec::eps_box(rat(1, 4));
        assert_eq!(nbhd_intersect(&a, &b).unwrap(), NeighborhoodSpec::eps_box(rat(1, 10)));

        let s1 = NeighborhoodSpec::subset(vec![Element::atom("e"), Element::atom("g1")]);
        let s2 = NeighborhoodSpec::subset(vec![Element::atom("e")]);
        assert_eq!(
            nbhd_intersect(&s1, &s2).unwrap(),
            NeighborhoodSpec::subset(vec![Element::atom("e")])
        );
    }

    #[test]
    fn intersection_membership_is_conjunction() {
        let t1 = MagmaDescriptor::RationalTorus { dim: 1 };
        let a = NeighborhoodSpec::eps_box(rat(1, 10));
        let b = NeighborhoodSpec::subset(vec![Element::torus(vec![rat(1, 2)])]);
        let both = NeighborhoodSpec::Intersection(vec![a.clone(), b.clone()]);
        for p in [rat(0, 1), rat(1, 20), rat(1, 2), rat(3, 4)] {
            let x = Element::torus(vec![p]);
            let conj = nbhd_member(&t1, &a, &x).unwrap() && nbhd_member(&t1, &b, &x).unwrap();
            assert_eq!(nbhd_member(&t1, &both, &x).unwrap(), conj);
        }
    }

    #[test]
    fn validate_rejects_bad_intervals() {
        let inner = NeighborhoodSpec::subset(vec![Element::atom("e")]);
        assert!(NeighborhoodSpec::subbasic(inner.clone(), rat(1, 2), rat(1, 2), rat(1, 4))
            .validate()
            .is_err());
        assert!(NeighborhoodSpec::subbasic(inner.clone(), rat(0, 1), rat(3, 2), rat(1, 4))
            .validate()
            .is_err());
        assert!(NeighborhoodSpec::subbasic(inner, rat(0, 1), rat(1, 1), rat(1, 4))
            .validate()
            .is_ok());
    }
}
