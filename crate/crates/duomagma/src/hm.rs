//! Step functions `[0,1) -> X` with finitely many pieces, their pointwise
//! products, the two-piece embedding of the base, and the squeeze
//! automorphism `f -> f o s^k` together with its absorbing-exponent search.

use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::magma::{op_apply, unit_of, MagmaDescriptor};
use crate::neighborhood::{nbhd_intersect, nbhd_member, NeighborhoodSpec};
use crate::rational::Rational;

/// One affine piece `t -> p*t + q` of a squeeze map, valid on
/// `[start, next_start)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub start: Rational,
    pub p: Rational,
    pub q: Rational,
}

/// A rational piecewise-linear contraction of `[0,1)`: a strictly increasing
/// self-bijection with `s(0) = 0` and `s(t) < t` on `(0,1)`, so that
/// `s^n(t) -> 0` for every `t < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqueezeMap {
    pieces: Vec<AffinePiece>,
}

impl SqueezeMap {
    /// `s(t) = t/2` on `[0,1/2)`, `s(t) = (3t-1)/2` on `[1/2,1)`.
    pub fn standard() -> SqueezeMap {
        SqueezeMap {
            pieces: vec![
                AffinePiece {
                    start: Rational::zero(),
                    p: Rational::new(1, 2),
                    q: Rational::zero(),
                },
                AffinePiece {
                    start: Rational::new(1, 2),
                    p: Rational::new(3, 2),
                    q: Rational::new(-1, 2),
                },
            ],
        }
    }

    pub fn new(pieces: Vec<AffinePiece>) -> Result<SqueezeMap> {
        let map = SqueezeMap { pieces };
        map.validate()?;
        Ok(map)
    }

    /// Re-checks the squeeze axioms; deserialized maps should be
    /// validated before use.
    pub fn validate(&self) -> Result<()> {
        let one = Rational::one();
        if self.pieces.is_empty() || !self.pieces[0].start.is_zero() {
            return Err(Error::BadBreakpoints("squeeze map must start at 0".into()));
        }
        if !self.pieces[0].q.is_zero() {
            return Err(Error::BadBreakpoints("squeeze map must fix 0".into()));
        }
        for w in self.pieces.windows(2) {
            if w[1].start <= w[0].start {
                return Err(Error::BadBreakpoints("squeeze breakpoints must increase".into()));
            }
            let t = &w[1].start;
            let left = &w[0].p * t + w[0].q.clone();
            let right = &w[1].p * t + w[1].q.clone();
            if left != right {
                return Err(Error::BadBreakpoints("squeeze map must be continuous".into()));
            }
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            if piece.p <= Rational::zero() {
                return Err(Error::BadBreakpoints("squeeze slopes must be positive".into()));
            }
            let end = self
                .pieces
                .get(i + 1)
                .map(|n| n.start.clone())
                .unwrap_or_else(Rational::one);
            // s(t) < t on (0,1): affine per piece, so endpoint checks suffice.
            if piece.start.is_zero() {
                if piece.p >= one {
                    return Err(Error::BadBreakpoints("squeeze must contract near 0".into()));
                }
            } else {
                let at_start = &piece.p * &piece.start + piece.q.clone();
                if at_start >= piece.start {
                    return Err(Error::BadBreakpoints("squeeze must satisfy s(t) < t".into()));
                }
            }
            let at_end = &piece.p * &end + piece.q.clone();
            if at_end > end {
                return Err(Error::BadBreakpoints("squeeze must satisfy s(t) <= t".into()));
            }
        }
        let last = self.pieces.last().unwrap();
        if &last.p + &last.q != one {
            return Err(Error::BadBreakpoints("squeeze image must fill [0,1)".into()));
        }
        Ok(())
    }

    pub fn apply(&self, t: &Rational) -> Rational {
        let piece = self
            .pieces
            .iter()
            .rev()
            .find(|piece| piece.start <= *t)
            .expect("t >= 0");
        &piece.p * t + piece.q.clone()
    }

    pub fn apply_inv(&self, t: &Rational) -> Rational {
        // image of piece i is [s(start_i), s(start_{i+1}))
        let idx = (0..self.pieces.len())
            .rev()
            .find(|&i| self.apply(&self.pieces[i].start) <= *t)
            .expect("t >= 0");
        let piece = &self.pieces[idx];
        (t - &piece.q) / piece.p.clone()
    }

    /// `s^k(t)`; negative `k` applies the inverse.
    pub fn apply_pow(&self, t: &Rational, k: i64) -> Rational {
        let mut out = t.clone();
        if k >= 0 {
            for _ in 0..k {
                out = self.apply(&out);
            }
        } else {
            for _ in 0..(-k) {
                out = self.apply_inv(&out);
            }
        }
        out
    }
}

/// One constant piece of a step function, valid on `[start, next_start)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPiece {
    pub start: Rational,
    pub value: Element,
}

/// Canonical piecewise-constant function `[0,1) -> X`: the first breakpoint
/// is 0, breakpoints strictly increase, adjacent values differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFunction {
    pieces: Vec<StepPiece>,
}

impl StepFunction {
    pub fn constant(value: Element) -> StepFunction {
        StepFunction {
            pieces: vec![StepPiece {
                start: Rational::zero(),
                value,
            }],
        }
    }

    pub fn pieces(&self) -> &[StepPiece] {
        &self.pieces
    }

    pub fn value_at(&self, t: &Rational) -> &Element {
        &self
            .pieces
            .iter()
            .rev()
            .find(|piece| piece.start <= *t)
            .expect("t >= 0")
            .value
    }

    /// End of piece `i` (the next breakpoint, or 1).
    pub fn piece_end(&self, i: usize) -> Rational {
        self.pieces
            .get(i + 1)
            .map(|p| p.start.clone())
            .unwrap_or_else(Rational::one)
    }

    /// Sorted union of this function's breakpoints with another's.
    fn merged_breakpoints(&self, other: &StepFunction) -> Vec<Rational> {
        let mut points: Vec<Rational> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .map(|p| p.start.clone())
            .collect();
        points.sort();
        points.dedup();
        points
    }
}

/// Validates raw pieces and merges adjacent equal values.
pub fn step_canonicalize(raw: Vec<(Rational, Element)>) -> Result<StepFunction> {
    if raw.is_empty() {
        return Err(Error::BadBreakpoints("no pieces".into()));
    }
    if !raw[0].0.is_zero() {
        return Err(Error::BadBreakpoints("first breakpoint must be 0".into()));
    }
    let one = Rational::one();
    for w in raw.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::BadBreakpoints("breakpoints must strictly increase".into()));
        }
    }
    if raw.last().unwrap().0 >= one {
        return Err(Error::BadBreakpoints("breakpoints must lie in [0,1)".into()));
    }
    let mut pieces: Vec<StepPiece> = Vec::with_capacity(raw.len());
    for (start, value) in raw {
        match pieces.last() {
            Some(last) if last.value == value => {}
            _ => pieces.push(StepPiece { start, value }),
        }
    }
    Ok(StepFunction { pieces })
}

/// Pointwise product `(fg)(t) = f(t) * g(t)` over the base magma.
pub fn hm_product(base: &MagmaDescriptor, f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    let points = f.merged_breakpoints(g);
    let mut raw = Vec::with_capacity(points.len());
    for t in points {
        let value = op_apply(base, f.value_at(&t), g.value_at(&t))?;
        raw.push((t, value));
    }
    step_canonicalize(raw)
}

/// The two-piece embedding: unit on `[0,1/2)`, `x` on `[1/2,1)`.
pub fn hm_embed(base: &MagmaDescriptor, x: &Element) -> Result<StepFunction> {
    crate::magma::element_in(base, x)?;
    step_canonicalize(vec![
        (Rational::zero(), unit_of(base)),
        (Rational::new(1, 2), x.clone()),
    ])
}

/// A unit-preserving homomorphism between finite magmas, given as an
/// explicit element map and validated exhaustively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteHom {
    pub source: MagmaDescriptor,
    pub target: MagmaDescriptor,
    pub map: std::collections::BTreeMap<String, String>,
}

impl FiniteHom {
    pub fn new(
        source: MagmaDescriptor,
        target: MagmaDescriptor,
        map: std::collections::BTreeMap<String, String>,
    ) -> Result<FiniteHom> {
        let h = FiniteHom { source, target, map };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        let (src_elems, src_unit) = match &self.source {
            MagmaDescriptor::FiniteMagma { elements, unit, .. } => (elements.clone(), unit.clone()),
            _ => return Err(Error::NotAHomomorphism("source must be a finite magma".into())),
        };
        let tgt_unit = match &self.target {
            MagmaDescriptor::FiniteMagma { unit, .. } => unit.clone(),
            _ => return Err(Error::NotAHomomorphism("target must be a finite magma".into())),
        };
        for e in &src_elems {
            if !self.map.contains_key(e) {
                return Err(Error::NotAHomomorphism(format!("no image for `{e}`")));
            }
        }
        if self.map.get(&src_unit) != Some(&tgt_unit) {
            return Err(Error::NotAHomomorphism("unit not preserved".into()));
        }
        for x in &src_elems {
            for y in &src_elems {
                let xy = op_apply(&self.source, &Element::atom(x), &Element::atom(y))?;
                let hx_hy = op_apply(
                    &self.target,
                    &self.apply_atom(x)?,
                    &self.apply_atom(y)?,
                )?;
                let h_xy = match xy {
                    Element::FiniteAtom(s) => self.apply_atom(&s)?,
                    _ => unreachable!("finite magma product is an atom"),
                };
                if h_xy != hx_hy {
                    return Err(Error::NotAHomomorphism(format!(
                        "h({x}*{y}) != h({x})*h({y})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn apply_atom(&self, name: &str) -> Result<Element> {
        self.map
            .get(name)
            .map(|s| Element::atom(s))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        match x {
            Element::FiniteAtom(name) => self.apply_atom(name),
            _ => Err(Error::ShapeMismatch("finite hom applies to atoms".into())),
        }
    }
}

/// Functor action: same breakpoints, values mapped through `h`.
pub fn hm_map(h: &FiniteHom, f: &StepFunction) -> Result<StepFunction> {
    let raw = f
        .pieces()
        .iter()
        .map(|p| Ok((p.start.clone(), h.apply(&p.value)?)))
        .collect::<Result<Vec<_>>>()?;
    step_canonicalize(raw)
}

/// Exact Lebesgue measure of `[a,b) \ f^{-1}(V)`.
pub fn hm_measure_defect(
    base: &MagmaDescriptor,
    f: &StepFunction,
    v: &NeighborhoodSpec,
    a: &Rational,
    b: &Rational,
) -> Result<Rational> {
    if a < &Rational::zero() || b > &Rational::one() || a >= b {
        return Err(Error::BadInterval(format!("[{a}, {b})")));
    }
    let mut defect = Rational::zero();
    for (i, piece) in f.pieces().iter().enumerate() {
        let lo = piece.start.clone().max(a.clone());
        let hi = f.piece_end(i).min(b.clone());
        if lo >= hi {
            continue;
        }
        if !nbhd_member(base, v, &piece.value)? {
            defect += hi - lo;
        }
    }
    Ok(defect)
}

/// Subbasic membership: `λ([a,b) \ f^{-1}(inner)) < eps`, strict and exact.
pub fn hm_nbhd_member(
    base: &MagmaDescriptor,
    f: &StepFunction,
    inner: &NeighborhoodSpec,
    a: &Rational,
    b: &Rational,
    eps: &Rational,
) -> Result<bool> {
    Ok(hm_measure_defect(base, f, inner, a, b)? < *eps)
}

/// The normalized unit neighborhood `{f : λ(f^{-1}(inner)) > 1 - eps}`,
/// contained in every subbasic part it was derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedUnitNbhd {
    pub inner: NeighborhoodSpec,
    pub eps: Rational,
}

impl NormalizedUnitNbhd {
    pub fn whole() -> NormalizedUnitNbhd {
        NormalizedUnitNbhd {
            inner: NeighborhoodSpec::Whole,
            eps: Rational::one(),
        }
    }

    /// Membership of `f` in the normalized neighborhood, i.e. total defect
    /// over `[0,1)` strictly below `eps`.
    pub fn contains(&self, base: &MagmaDescriptor, f: &StepFunction) -> Result<bool> {
        hm_nbhd_member(base, f, &self.inner, &Rational::zero(), &Rational::one(), &self.eps)
    }
}

/// One subbasic constraint `N(inner, a, b; eps)` as input to normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbasicPart {
    pub inner: NeighborhoodSpec,
    pub a: Rational,
    pub b: Rational,
    pub eps: Rational,
}

/// Normalizes a finite intersection of subbasic unit neighborhoods to the
/// `{f : λ(f^{-1}(V)) > 1 - eps}` form: parts with `eps > b - a` hold for
/// every step function and are dropped; the rest fuse to the intersection
/// of their inner sets with the minimum eps.
pub fn hm_nbhd_normalize(base: &MagmaDescriptor, parts: &[SubbasicPart]) -> Result<NormalizedUnitNbhd> {
    let unit = unit_of(base);
    let mut inner: Option<NeighborhoodSpec> = None;
    let mut eps: Option<Rational> = None;
    for part in parts {
        if part.eps > &part.b - &part.a {
            continue; // vacuous constraint
        }
        if !nbhd_member(base, &part.inner, &unit)? {
            return Err(Error::NotUnitNeighborhood);
        }
        inner = Some(match inner {
            None => part.inner.clone(),
            Some(prev) => nbhd_intersect(&prev, &part.inner)?,
        });
        eps = Some(match eps {
            None => part.eps.clone(),
            Some(prev) => prev.min(part.eps.clone()),
        });
    }
    match (inner, eps) {
        (Some(inner), Some(eps)) => Ok(NormalizedUnitNbhd { inner, eps }),
        _ => Ok(NormalizedUnitNbhd::whole()),
    }
}

/// Flattens a neighborhood spec (a subbasic set, an intersection of them,
/// or the whole space) into normalization input.
pub fn subbasic_parts(spec: &NeighborhoodSpec) -> Result<Vec<SubbasicPart>> {
    match spec {
        NeighborhoodSpec::HMSubbasic { inner, a, b, eps } => Ok(vec![SubbasicPart {
            inner: (**inner).clone(),
            a: a.clone(),
            b: b.clone(),
            eps: eps.clone(),
        }]),
        NeighborhoodSpec::Intersection(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(subbasic_parts(p)?);
            }
            Ok(out)
        }
        NeighborhoodSpec::Whole => Ok(vec![]),
        other => Err(Error::ShapeMismatch(format!(
            "not a subbasic HM neighborhood: {other:?}"
        ))),
    }
}

/// `f o s^k`: forward application composes with the squeeze, so breakpoints
/// move through `s^{-k}` while values are unchanged.
pub fn alpha_apply(f: &StepFunction, k: i64, s: &SqueezeMap) -> Result<StepFunction> {
    let raw = f
        .pieces()
        .iter()
        .map(|p| (s.apply_pow(&p.start, -k), p.value.clone()))
        .collect();
    step_canonicalize(raw)
}

/// Length of the maximal prefix `[0, b~)` on which `f`'s value lies in
/// `inner`; `None` when every piece does.
fn inner_prefix(base: &MagmaDescriptor, f: &StepFunction, inner: &NeighborhoodSpec) -> Result<Option<Rational>> {
    for piece in f.pieces() {
        if !nbhd_member(base, inner, &piece.value)? {
            return Ok(Some(piece.start.clone()));
        }
    }
    Ok(None)
}

/// Closed-form sufficient exponent: iterate `t <- s(t)` from `1 - eps`
/// until `t` drops below the unit prefix of `f`.
pub fn absorb_sufficient_bound(
    base: &MagmaDescriptor,
    f: &StepFunction,
    nbhd: &NormalizedUnitNbhd,
    s: &SqueezeMap,
) -> Result<u64> {
    if nbhd.eps >= Rational::one() {
        return Ok(0);
    }
    let prefix = match inner_prefix(base, f, &nbhd.inner)? {
        None => return Ok(0),
        Some(p) => p,
    };
    let mut t = Rational::one() - nbhd.eps.clone();
    let mut n = 0u64;
    while t >= prefix {
        t = s.apply(&t);
        n += 1;
    }
    Ok(n)
}

/// Least `n >= 0` with `f o s^n` in the normalized neighborhood. Existence
/// is guaranteed because `f` starts with a unit prefix and `s^n(t) -> 0`.
pub fn absorb_exponent(
    base: &MagmaDescriptor,
    f: &StepFunction,
    nbhd: &NormalizedUnitNbhd,
    s: &SqueezeMap,
) -> Result<u64> {
    if f.pieces()[0].value != unit_of(base) {
        return Err(Error::NotInHM0);
    }
    if nbhd.eps >= Rational::one() {
        return Ok(0); // degenerate: every HM0 function qualifies
    }
    if !nbhd_member(base, &nbhd.inner, &unit_of(base))? {
        return Err(Error::NotUnitNeighborhood);
    }
    let bound = absorb_sufficient_bound(base, f, nbhd, s)?;
    for n in 0..=bound {
        if nbhd.contains(base, &alpha_apply(f, n as i64, s)?)? {
            return Ok(n);
        }
    }
    // unreachable when the bound analysis is right; keep the exact post-check
    Err(Error::AbsorptionFailed(format!(
        "no exponent up to the sufficient bound {bound}"
    )))
}
