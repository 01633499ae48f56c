//! Semidirect products `X ⋊_α Z` and `X ⋊ H`, the duoseparable enlargement
//! `F X = HM0(X) ⋊ Z`, and the constructive witness factorizations.

use serde::{Deserialize, Serialize};

use crate::automorphism::{aut_act, Automorphism, Direction};
use crate::element::{Element, PairRight};
use crate::error::{Error, Result};
use crate::hm::{
    absorb_exponent, alpha_apply, hm_embed, hm_nbhd_normalize, subbasic_parts, SqueezeMap,
};
use crate::magma::{element_in, invert, op_apply, unit_of, MagmaDescriptor};
use crate::neighborhood::{nbhd_member, NeighborhoodSpec};
use crate::unimodular::AbsorbingFamilyRegistry;

fn as_pair(x: &Element) -> Result<(&Element, &PairRight)> {
    match x {
        Element::Pair { left, right } => Ok((left, right)),
        _ => Err(Error::ShapeMismatch("semidirect element must be a pair".into())),
    }
}

/// `(x,n)*(y,m) = (x * α^n(y), n+m)` resp. `(x,f)*(y,g) = (x * f(y), f∘g)`.
pub fn sd_multiply(m: &MagmaDescriptor, p: &Element, q: &Element) -> Result<Element> {
    element_in(m, p)?;
    element_in(m, q)?;
    let (pl, pr) = as_pair(p)?;
    let (ql, qr) = as_pair(q)?;
    match m {
        MagmaDescriptor::SemidirectZ { base, squeeze } => {
            let (n, mm) = match (pr, qr) {
                (PairRight::Exponent(n), PairRight::Exponent(m)) => (*n, *m),
                _ => unreachable!("shape already checked"),
            };
            let twisted = match ql {
                Element::Step(g) => Element::Step(alpha_apply(g, n, squeeze)?),
                _ => unreachable!("semidirect-Z base elements are step functions"),
            };
            Ok(Element::pair_z(op_apply(base, pl, &twisted)?, n + mm))
        }
        MagmaDescriptor::SemidirectAut { base, .. } => {
            let (f, g) = match (pr, qr) {
                (PairRight::Aut(f), PairRight::Aut(g)) => (f, g),
                _ => unreachable!("shape already checked"),
            };
            let twisted = aut_act(f, ql, Direction::Forward)?;
            let composed = f.compose_matrix(g)?;
            Ok(Element::pair(op_apply(base, pl, &twisted)?, PairRight::Aut(composed)))
        }
        _ => Err(Error::ShapeMismatch("not a semidirect descriptor".into())),
    }
}

/// `(x,n)^{-1} = (α^{-n}(x^{-1}), -n)` resp. `(x,f)^{-1} = (f^{-1}(x^{-1}), f^{-1})`.
pub fn sd_invert(m: &MagmaDescriptor, p: &Element) -> Result<Element> {
    element_in(m, p)?;
    let (pl, pr) = as_pair(p)?;
    match m {
        MagmaDescriptor::SemidirectZ { base, squeeze } => {
            let n = match pr {
                PairRight::Exponent(n) => *n,
                _ => unreachable!(),
            };
            let inv_left = invert(base, pl)?;
            let twisted = match &inv_left {
                Element::Step(g) => Element::Step(alpha_apply(g, -n, squeeze)?),
                _ => unreachable!(),
            };
            Ok(Element::pair_z(twisted, -n))
        }
        MagmaDescriptor::SemidirectAut { base, .. } => {
            let f = match pr {
                PairRight::Aut(f) => f,
                _ => unreachable!(),
            };
            let inv_left = invert(base, pl)?;
            let finv = f.inverse();
            let twisted = aut_act(&finv, &inv_left, Direction::Forward)?;
            Ok(Element::pair(twisted, PairRight::Aut(finv)))
        }
        _ => Err(Error::ShapeMismatch("not a semidirect descriptor".into())),
    }
}

/// The enlargement functor: `F X = HM0(X) ⋊_{α} Z` with the squeeze-induced
/// absorbing automorphism. Composable: `F` applies to its own output.
pub fn build_f(x: MagmaDescriptor, squeeze: SqueezeMap) -> MagmaDescriptor {
    MagmaDescriptor::SemidirectZ {
        base: Box::new(MagmaDescriptor::HM0Of {
            base: Box::new(x),
            squeeze: squeeze.clone(),
        }),
        squeeze,
    }
}

/// `x -> (i_x, 0)`: the operation-preserving embedding of the base into `F X`.
pub fn embed_into_f(f_desc: &MagmaDescriptor, x: &Element) -> Result<Element> {
    match f_desc {
        MagmaDescriptor::SemidirectZ { base, .. } => match base.as_ref() {
            MagmaDescriptor::HM0Of { base: inner, .. } => {
                Ok(Element::pair_z(Element::Step(hm_embed(inner, x)?), 0))
            }
            _ => Err(Error::ShapeMismatch("F descriptor must wrap an HM0".into())),
        },
        _ => Err(Error::ShapeMismatch("not an F-shaped descriptor".into())),
    }
}

/// A claimed factorization `target = s1 * u * s2` with both association
/// orders verified at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuoWitness {
    pub s1: Element,
    pub u: Element,
    pub s2: Element,
}

impl DuoWitness {
    /// Both associated products, `(s1*u)*s2` and `s1*(u*s2)`.
    pub fn products(&self, m: &MagmaDescriptor) -> Result<(Element, Element)> {
        let left = sd_multiply(m, &sd_multiply(m, &self.s1, &self.u)?, &self.s2)?;
        let right = sd_multiply(m, &self.s1, &sd_multiply(m, &self.u, &self.s2)?)?;
        Ok((left, right))
    }
}

fn post_verify(m: &MagmaDescriptor, w: &DuoWitness, target: &Element, nbhd: &NeighborhoodSpec) -> Result<()> {
    if !nbhd_member(m, nbhd, &w.u)? {
        return Err(Error::AbsorptionFailed("witness u is not in the neighborhood".into()));
    }
    let (left, right) = w.products(m)?;
    if &left != target || &right != target {
        return Err(Error::AbsorptionFailed("witness product mismatch".into()));
    }
    Ok(())
}

/// Witness for `X ⋊_α Z` with the canonical countable set `S = {1}×Z`:
/// `target = (f, m)` factors as `(1,-n) * (α^n(f), 0) * (1, n+m)` where `n`
/// is the least absorbing exponent for the normalized neighborhood.
pub fn duo_witness_z(m: &MagmaDescriptor, target: &Element, w: &NeighborhoodSpec) -> Result<DuoWitness> {
    element_in(m, target)?;
    let (base_hm, squeeze) = match m {
        MagmaDescriptor::SemidirectZ { base, squeeze } => (base.as_ref(), squeeze),
        _ => return Err(Error::ShapeMismatch("duo_witness_z needs a semidirect-Z descriptor".into())),
    };
    let inner_base = match base_hm {
        MagmaDescriptor::HM0Of { base, .. } => base.as_ref(),
        _ => return Err(Error::ShapeMismatch("semidirect-Z base must be an HM0".into())),
    };
    let base_nbhd = match w {
        NeighborhoodSpec::ProductDiscrete { base } => base.as_ref(),
        _ => {
            return Err(Error::ShapeMismatch(
                "unit neighborhoods of the product are product-with-discrete".into(),
            ))
        }
    };
    let (f, exp) = match as_pair(target)? {
        (Element::Step(f), PairRight::Exponent(e)) => (f, *e),
        _ => unreachable!("shape already checked"),
    };
    let normalized = hm_nbhd_normalize(inner_base, &subbasic_parts(base_nbhd)?)?;
    let n = absorb_exponent(inner_base, f, &normalized, squeeze)? as i64;
    let unit_step = unit_of(base_hm);
    let witness = DuoWitness {
        s1: Element::pair_z(unit_step.clone(), -n),
        u: Element::pair_z(Element::Step(alpha_apply(f, n, squeeze)?), 0),
        s2: Element::pair_z(unit_step, n + exp),
    };
    post_verify(m, &witness, target, w)?;
    Ok(witness)
}

/// Witness for `X ⋊ H`: absorb the left component through the registry,
/// `target = (x, h)` factors as `(1,g) * (g^{-1}(x), id) * (1, g^{-1}∘h)`.
pub fn duo_witness_group(
    m: &MagmaDescriptor,
    target: &Element,
    w: &NeighborhoodSpec,
    registry: &AbsorbingFamilyRegistry,
) -> Result<DuoWitness> {
    element_in(m, target)?;
    let base = match m {
        MagmaDescriptor::SemidirectAut { base, .. } => base.as_ref(),
        _ => {
            return Err(Error::ShapeMismatch(
                "duo_witness_group needs a semidirect-aut descriptor".into(),
            ))
        }
    };
    let base_nbhd = match w {
        NeighborhoodSpec::ProductDiscrete { base } => base.as_ref(),
        _ => {
            return Err(Error::ShapeMismatch(
                "unit neighborhoods of the product are product-with-discrete".into(),
            ))
        }
    };
    let (x, h) = match as_pair(target)? {
        (x, PairRight::Aut(h)) => (x, h),
        _ => unreachable!("shape already checked"),
    };
    let g = registry.absorb(std::slice::from_ref(x), base_nbhd)?;
    let u_left = aut_act(&g, x, Direction::Inverse)?;
    let dim = match base {
        MagmaDescriptor::RationalTorus { dim } => *dim,
        _ => return Err(Error::ShapeMismatch("semidirect-aut base must be a torus".into())),
    };
    let witness = DuoWitness {
        s1: Element::pair(unit_of(base), PairRight::Aut(g.clone())),
        u: Element::pair(u_left, PairRight::Aut(Automorphism::identity_matrix(dim))),
        s2: Element::pair(unit_of(base), PairRight::Aut(g.inverse().compose_matrix(h)?)),
    };
    post_verify(m, &witness, target, w)?;
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magma::mk_cyclic;
    use crate::rational::rat;

    fn f_c2() -> MagmaDescriptor {
        build_f(mk_cyclic(2), SqueezeMap::standard())
    }

    fn i_x_pair(fdesc: &MagmaDescriptor, exp: i64) -> Element {
        let mut e = embed_into_f(fdesc, &Element::atom("g1")).unwrap();
        if let Element::Pair { right, .. } = &mut e {
            *right = PairRight::Exponent(exp);
        }
        e
    }

    #[test]
    fn unit_laws_in_f() {
        let m = f_c2();
        let unit = unit_of(&m);
        let p = i_x_pair(&m, 3);
        assert_eq!(sd_multiply(&m, &unit, &p).unwrap(), p);
        assert_eq!(sd_multiply(&m, &p, &unit).unwrap(), p);
    }

    #[test]
    fn exponents_add_and_alpha_twists() {
        let m = f_c2();
        let p = i_x_pair(&m, -2);
        let base_hm = match &m {
            MagmaDescriptor::SemidirectZ { base, .. } => base.as_ref().clone(),
            _ => unreachable!(),
        };
        let q = Element::pair_z(unit_of(&base_hm), 5);
        let prod = sd_multiply(&m, &p, &q).unwrap();
        // α^{-2}(unit) = unit, so the left part is unchanged and exponents add
        assert_eq!(prod, i_x_pair(&m, 3));
    }

    #[test]
    fn invert_round_trips() {
        let m = f_c2();
        let p = i_x_pair(&m, 3);
        let inv = sd_invert(&m, &p).unwrap();
        assert_eq!(sd_multiply(&m, &p, &inv).unwrap(), unit_of(&m));
        assert_eq!(sd_multiply(&m, &inv, &p).unwrap(), unit_of(&m));
        assert_eq!(sd_invert(&m, &unit_of(&m)).unwrap(), unit_of(&m));
    }

    #[test]
    fn invert_fails_for_non_group_base() {
        let m = build_f(crate::magma::mk_left_zero_band(), SqueezeMap::standard());
        let p = embed_into_f(&m, &Element::atom("a")).unwrap();
        assert!(matches!(sd_invert(&m, &p), Err(Error::NoInverse(_))));
    }

    #[test]
    fn embedding_is_homomorphism_on_c4() {
        let c4 = mk_cyclic(4);
        let m = build_f(c4.clone(), SqueezeMap::standard());
        let elems = ["e", "g1", "g2", "g3"];
        for x in elems {
            for y in elems {
                let ex = embed_into_f(&m, &Element::atom(x)).unwrap();
                let ey = embed_into_f(&m, &Element::atom(y)).unwrap();
                let xy = op_apply(&c4, &Element::atom(x), &Element::atom(y)).unwrap();
                assert_eq!(sd_multiply(&m, &ex, &ey).unwrap(), embed_into_f(&m, &xy).unwrap());
            }
        }
        // injectivity
        for x in elems {
            for y in elems {
                if x != y {
                    assert_ne!(
                        embed_into_f(&m, &Element::atom(x)).unwrap(),
                        embed_into_f(&m, &Element::atom(y)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn nested_f_still_validates() {
        let m = build_f(f_c2(), SqueezeMap::standard());
        let inner = i_x_pair(&f_c2(), 1);
        let e = embed_into_f(&m, &inner).unwrap();
        let unit = unit_of(&m);
        assert_eq!(sd_multiply(&m, &unit, &e).unwrap(), e);
        assert_eq!(sd_multiply(&m, &e, &unit).unwrap(), e);
        let inv = sd_invert(&m, &e).unwrap();
        assert_eq!(sd_multiply(&m, &e, &inv).unwrap(), unit);
    }

    #[test]
    fn duo_witness_z_spec_example() {
        let m = f_c2();
        let target = i_x_pair(&m, 3);
        let w = NeighborhoodSpec::product_discrete(NeighborhoodSpec::subbasic(
            NeighborhoodSpec::subset(vec![Element::atom("e")]),
            rat(0, 1),
            rat(1, 1),
            rat(1, 4),
        ));
        let witness = duo_witness_z(&m, &target, &w).unwrap();
        // n = 2 per the absorbing-exponent example
        let base_hm = match &m {
            MagmaDescriptor::SemidirectZ { base, .. } => base.as_ref().clone(),
            _ => unreachable!(),
        };
        assert_eq!(witness.s1, Element::pair_z(unit_of(&base_hm), -2));
        assert_eq!(witness.s2, Element::pair_z(unit_of(&base_hm), 5));
        let (l, r) = witness.products(&m).unwrap();
        assert_eq!(l, target);
        assert_eq!(r, target);
    }

    #[test]
    fn duo_witness_z_unit_target() {
        let m = f_c2();
        let target = unit_of(&m);
        let w = NeighborhoodSpec::product_discrete(NeighborhoodSpec::subbasic(
            NeighborhoodSpec::subset(vec![Element::atom("e")]),
            rat(0, 1),
            rat(1, 1),
            rat(1, 4),
        ));
        let witness = duo_witness_z(&m, &target, &w).unwrap();
        assert_eq!(witness.s1, Element::pair_z(witness_left(&witness.u), 0));
        let (l, r) = witness.products(&m).unwrap();
        assert_eq!(l, target);
        assert_eq!(r, target);
    }

    fn witness_left(u: &Element) -> Element {
        match u {
            Element::Pair { left, .. } => (**left).clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn duo_witness_z_negative_exponent() {
        let m = f_c2();
        let base_hm = match &m {
            MagmaDescriptor::SemidirectZ { base, .. } => base.as_ref().clone(),
            _ => unreachable!(),
        };
        let target = Element::pair_z(unit_of(&base_hm), -7);
        let w = NeighborhoodSpec::product_discrete(NeighborhoodSpec::subbasic(
            NeighborhoodSpec::subset(vec![Element::atom("e")]),
            rat(0, 1),
            rat(1, 1),
            rat(1, 4),
        ));
        let witness = duo_witness_z(&m, &target, &w).unwrap();
        assert_eq!(witness.s1, Element::pair_z(unit_of(&base_hm), 0));
        assert_eq!(witness.s2, Element::pair_z(unit_of(&base_hm), -7));
    }
}
