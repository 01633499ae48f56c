//! Integer lattice machinery: SL-completion of primitive vectors,
//! small-combination search, the small-column greedy loop, torus
//! absorption, blockwise lifts, and the absorbing-family registry.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::automorphism::{aut_act, Automorphism, Direction};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::lll::lll_reduce;
use crate::matrix::{IntMatrix, RationalMatrix, UnimodularMatrix};
use crate::neighborhood::{nbhd_member, NeighborhoodSpec};
use crate::magma::MagmaDescriptor;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    Enumeration,
    LatticeReduction,
}

/// Knobs for the relation search. The classical pigeonhole bound
/// `K > (2lM)^n` is available through [`SearchBudget::pigeonhole_bound_k`] but the
/// default budget relies on lattice reduction with a small enumeration
/// fallback; the exact post-check makes any strategy sound.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub strategy: SearchStrategy,
    /// Explicit enumeration radius; `None` means escalate from 1.
    pub pigeonhole_k: Option<BigInt>,
    /// Cap on enumeration states visited.
    pub timeout_steps: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            strategy: SearchStrategy::LatticeReduction,
            pigeonhole_k: None,
            timeout_steps: 4_000_000,
        }
    }
}

impl SearchBudget {
    pub fn enumeration(k: BigInt) -> SearchBudget {
        SearchBudget {
            strategy: SearchStrategy::Enumeration,
            pigeonhole_k: Some(k),
            timeout_steps: 4_000_000,
        }
    }

    /// The pigeonhole bound `(2 l M)^n + 1` where `M` bounds `|entry| / eps`.
    pub fn pigeonhole_bound_k(l: usize, n: usize, m_bound: &BigInt) -> BigInt {
        let base = BigInt::from(2 * l) * m_bound;
        let mut k = BigInt::one();
        for _ in 0..n {
            k *= &base;
        }
        k + 1
    }
}

fn gcd_of(entries: &[BigInt]) -> BigInt {
    entries
        .iter()
        .fold(BigInt::zero(), |acc, e| acc.gcd(e))
}

/// Divides by the gcd and fixes the sign of the first nonzero entry.
pub fn make_primitive(mut d: Vec<BigInt>) -> Result<Vec<BigInt>> {
    let g = gcd_of(&d);
    if g.is_zero() {
        return Err(Error::NotPrimitive("0".into()));
    }
    for e in d.iter_mut() {
        *e = &*e / &g;
    }
    if let Some(first) = d.iter().find(|e| !e.is_zero()) {
        if first.is_negative() {
            for e in d.iter_mut() {
                *e = -&*e;
            }
        }
    }
    Ok(d)
}

/// Completes a primitive vector `d` to a matrix in SL(l, Z) whose last
/// column is `d`: reduce `d` to `e_1` by embedded extended-gcd transforms,
/// invert, cycle the first column to the back, and repair the determinant
/// sign on a non-last column.
pub fn primitive_completion(d: &[BigInt]) -> Result<UnimodularMatrix> {
    let l = d.len();
    let g = gcd_of(d);
    if !g.is_one() {
        return Err(Error::NotPrimitive(g.to_string()));
    }
    if l == 1 {
        // SL(1, Z) = {[1]}, so only d = (1) completes
        if d[0].is_one() {
            return Ok(UnimodularMatrix::identity(1));
        }
        return Err(Error::NonInvertibleMatrix(d[0].to_string()));
    }
    let mut w: Vec<BigInt> = d.to_vec();
    let mut u = IntMatrix::identity(l);
    // zero out w[i] into w[i-1] from the bottom up; each 2x2 transform has det 1
    for i in (1..l).rev() {
        let (a, b) = (w[i - 1].clone(), w[i].clone());
        if b.is_zero() {
            continue;
        }
        let ext = a.extended_gcd(&b);
        let (g, x, y) = (ext.gcd, ext.x, ext.y);
        let row_top = [x.clone(), y.clone()];
        let row_bot = [-(&b / &g), &a / &g];
        // apply T on rows (i-1, i) of u and w
        for col in 0..l {
            let top = &row_top[0] * u.get(i - 1, col) + &row_top[1] * u.get(i, col);
            let bot = &row_bot[0] * u.get(i - 1, col) + &row_bot[1] * u.get(i, col);
            u.set(i - 1, col, top);
            u.set(i, col, bot);
        }
        w[i - 1] = g;
        w[i] = BigInt::zero();
    }
    debug_assert!(w[0].is_one());
    // u * d = e_1 and det u = 1, so u^{-1} is integral with first column d
    let inv = u.inverse_rational()?;
    let mut completed = IntMatrix::zero(l, l);
    for i in 0..l {
        for j in 0..l {
            // cycle columns: old column 0 (which is d) goes last
            let src = (j + 1) % l;
            let e = inv.get(i, src);
            debug_assert!(e.is_integer());
            completed.set(i, j, e.numer().clone());
        }
    }
    // the l-cycle has sign (-1)^(l-1); negate a non-last column if needed
    if l.is_multiple_of(2) {
        for i in 0..l {
            let v = -completed.get(i, 0);
            completed.set(i, 0, v);
        }
    }
    let result = UnimodularMatrix::new(completed)?;
    for (i, di) in d.iter().enumerate() {
        debug_assert_eq!(result.get(i, l - 1), di);
    }
    Ok(result)
}

fn combination(cols: &[Vec<Rational>], d: &[BigInt]) -> Vec<Rational> {
    let n = cols[0].len();
    (0..n)
        .map(|row| {
            d.iter()
                .zip(cols)
                .fold(Rational::zero(), |acc, (di, col)| {
                    acc + &col[row] * &Rational::int(di.clone())
                })
        })
        .collect()
}

fn passes(cols: &[Vec<Rational>], d: &[BigInt], eps: &Rational) -> bool {
    !d.iter().all(|e| e.is_zero()) && combination(cols, d).iter().all(|c| c.abs() <= *eps)
}

/// Odometer over `{0..k}^l` in lexicographic order.
fn next_tuple(tuple: &mut [BigInt], k: &BigInt) -> bool {
    for i in (0..tuple.len()).rev() {
        if &tuple[i] < k {
            tuple[i] += 1;
            for t in tuple.iter_mut().skip(i + 1) {
                *t = BigInt::zero();
            }
            return true;
        }
    }
    false
}

/// Pigeonhole cube key: `floor(coord / eps)` per coordinate, or the exact
/// value when `eps = 0`.
fn cube_key(v: &[Rational], eps: &Rational) -> Vec<String> {
    v.iter()
        .map(|c| {
            if eps.is_zero() {
                c.to_string()
            } else {
                (c / eps).floor().to_string()
            }
        })
        .collect()
}

fn enumerate_differences(
    cols: &[Vec<Rational>],
    eps: &Rational,
    k: &BigInt,
    steps: &mut u64,
    limit: u64,
) -> Result<Option<Vec<BigInt>>> {
    let l = cols.len();
    let mut seen: BTreeMap<Vec<String>, Vec<BigInt>> = BTreeMap::new();
    let mut tuple = vec![BigInt::zero(); l];
    loop {
        *steps += 1;
        if *steps > limit {
            return Err(Error::BudgetExhausted(format!("{limit} enumeration steps")));
        }
        let v = combination(cols, &tuple);
        if passes(cols, &tuple, eps) {
            return Ok(Some(make_primitive(tuple)?));
        }
        let key = cube_key(&v, eps);
        if let Some(prev) = seen.get(&key) {
            let d: Vec<BigInt> = tuple.iter().zip(prev).map(|(a, b)| a - b).collect();
            if passes(cols, &d, eps) {
                return Ok(Some(make_primitive(d)?));
            }
        } else {
            seen.insert(key, tuple.clone());
        }
        if !next_tuple(&mut tuple, k) {
            return Ok(None);
        }
    }
}

/// Rows `[w * scale * y_i | e_i]` reduced by LLL; a large weight `w`
/// forces the reduction to spend its budget on shrinking the value block,
/// so the coefficient tails of short vectors are small combinations.
fn lattice_candidates(cols: &[Vec<Rational>], weight: &BigInt) -> Vec<Vec<BigInt>> {
    let l = cols.len();
    let n = cols[0].len();
    let mut scale = BigInt::one();
    for col in cols {
        for c in col {
            scale = scale.lcm(c.denom());
        }
    }
    let w = weight * &scale;
    let rows: Vec<Vec<BigInt>> = (0..l)
        .map(|i| {
            let mut row: Vec<BigInt> = (0..n)
                .map(|r| {
                    let scaled = &cols[i][r] * &Rational::int(w.clone());
                    debug_assert!(scaled.is_integer());
                    scaled.numer().clone()
                })
                .collect();
            for j in 0..l {
                row.push(if i == j { BigInt::one() } else { BigInt::zero() });
            }
            row
        })
        .collect();
    let reduced = lll_reduce(rows);
    let coeffs = |v: &Vec<BigInt>| -> Vec<BigInt> { v[n..].to_vec() };
    let mut out: Vec<Vec<BigInt>> = reduced.iter().map(coeffs).collect();
    // also pairwise sums and differences of the reduced rows
    for i in 0..reduced.len() {
        for j in i + 1..reduced.len() {
            out.push(
                reduced[i][n..]
                    .iter()
                    .zip(&reduced[j][n..])
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            out.push(
                reduced[i][n..]
                    .iter()
                    .zip(&reduced[j][n..])
                    .map(|(a, b)| a + b)
                    .collect(),
            );
        }
    }
    out
}

/// Finds a primitive nonzero integer vector `d` with every coordinate of
/// `sum d_i y_i` of absolute value at most `eps`. The exact post-check is
/// applied to every candidate before it is returned.
pub fn small_combination(
    cols: &[Vec<Rational>],
    eps: &Rational,
    budget: &SearchBudget,
) -> Result<Vec<BigInt>> {
    if cols.is_empty() {
        return Err(Error::ShapeMismatch("no columns".into()));
    }
    let l = cols.len();
    // trivial: a single column already small
    for (i, col) in cols.iter().enumerate() {
        if col.iter().all(|c| c.abs() <= *eps) {
            let mut d = vec![BigInt::zero(); l];
            d[i] = BigInt::one();
            return Ok(d);
        }
    }
    let mut steps = 0u64;
    if budget.strategy == SearchStrategy::LatticeReduction {
        // escalate the value-block weight until the reduction is forced to
        // produce entrywise-small combinations
        let mut weight = BigInt::one();
        for _ in 0..8 {
            for cand in lattice_candidates(cols, &weight) {
                if passes(cols, &cand, eps) {
                    return make_primitive(cand);
                }
            }
            weight *= BigInt::from(64);
        }
    }
    // enumeration: explicit K, or escalate until the step budget runs out
    let ks: Vec<BigInt> = match &budget.pigeonhole_k {
        Some(k) => vec![k.clone()],
        None => (0..)
            .map(|i| BigInt::from(1u64 << i))
            .take(24)
            .collect(),
    };
    for k in ks {
        match enumerate_differences(cols, eps, &k, &mut steps, budget.timeout_steps) {
            Ok(Some(d)) => return Ok(d),
            Ok(None) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no passing combination within {} steps",
        budget.timeout_steps
    )))
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Column permutation matrix placing original column `perm[j]` at position
/// `j`; if the permutation is odd the last column is negated to stay in SL
/// (negation preserves column smallness).
fn fronting_matrix(perm: &[usize]) -> UnimodularMatrix {
    let m = perm.len();
    let mut p = IntMatrix::zero(m, m);
    for (j, &src) in perm.iter().enumerate() {
        p.set(src, j, BigInt::one());
    }
    if permutation_sign(perm) < 0 {
        for i in 0..m {
            let v = -p.get(i, m - 1);
            p.set(i, m - 1, v);
        }
    }
    UnimodularMatrix::new(p).expect("signed permutation is in SL")
}

fn small_column_indices(y: &RationalMatrix, eps: &Rational) -> Vec<usize> {
    (0..y.cols)
        .filter(|&j| y.col(j).iter().all(|c| c.abs() <= *eps))
        .collect()
}

/// The greedy loop of the small-column lemma: returns `A` in SL(2n, Z)
/// such that every entry of the first `n` columns of `X A` has absolute
/// value at most `eps`. The count of small columns strictly increases each
/// iteration, so the loop terminates.
pub fn shrink_columns(x: &RationalMatrix, eps: &Rational, budget: &SearchBudget) -> Result<UnimodularMatrix> {
    let n = x.rows;
    let m = x.cols;
    if m != 2 * n {
        return Err(Error::ShapeMismatch(format!("matrix must be n x 2n, got {n} x {m}")));
    }
    let mut a = UnimodularMatrix::identity(m);
    let mut prev_small = None;
    loop {
        let y = x.mul_int(a.matrix());
        let small = small_column_indices(&y, eps);
        let k = small.len();
        if let Some(prev) = prev_small {
            assert!(k > prev, "small-column count must strictly increase");
        }
        // front the small columns
        let perm: Vec<usize> = small
            .iter()
            .copied()
            .chain((0..m).filter(|j| !small.contains(j)))
            .collect();
        a = a.mul(&fronting_matrix(&perm));
        if k >= n {
            let y = x.mul_int(a.matrix());
            debug_assert!((0..n).all(|j| y.col(j).iter().all(|c| c.abs() <= *eps)));
            return Ok(a);
        }
        prev_small = Some(k);
        let y = x.mul_int(a.matrix());
        let tail_cols: Vec<Vec<Rational>> = (k..m).map(|j| y.col(j)).collect();
        let d = small_combination(&tail_cols, eps, budget)?;
        let completion = primitive_completion(&d)?;
        // B = blockdiag(I_k, D)
        let mut b = IntMatrix::identity(m);
        let l = m - k;
        for i in 0..l {
            for j in 0..l {
                b.set(k + i, k + j, completion.get(i, j).clone());
            }
        }
        a = a.mul(&UnimodularMatrix::new(b)?);
    }
}

/// blockdiag(A, ..., A) acting coordinatewise on `k` blocks.
pub fn block_diagonal_lift(a: &UnimodularMatrix, blocks: usize) -> UnimodularMatrix {
    assert!(blocks >= 1);
    a.block_repeat(blocks)
}

fn torus_coords(x: &Element) -> Result<Vec<Rational>> {
    match x {
        Element::TorusPoint(cs) => Ok(cs.clone()),
        _ => Err(Error::ShapeMismatch("expected a torus point".into())),
    }
}

fn in_box(coords: &[Rational], d_set: &[usize], eps: &Rational) -> bool {
    d_set.iter().all(|&i| coords[i].dist_to_int() <= *eps)
}

/// Finds `A` in SL(m, Z) moving every point of `F` into the box
/// `{|v_i| <= eps mod 1 : i in d_set}`: lift, permute the constrained
/// coordinates to the front, shrink, permute back. Extra coordinates
/// beyond the working `2 n0` block ride along untouched.
pub fn torus_absorb(
    points: &[Vec<Rational>],
    d_set: &[usize],
    eps: &Rational,
    budget: &SearchBudget,
) -> Result<UnimodularMatrix> {
    if points.is_empty() {
        return Ok(UnimodularMatrix::identity(d_set.iter().max().map_or(0, |&i| i + 1)));
    }
    let m = points[0].len();
    if points.iter().any(|p| p.len() != m) {
        return Err(Error::ShapeMismatch("points of mixed dimension".into()));
    }
    let mut d_set: Vec<usize> = d_set.to_vec();
    d_set.sort_unstable();
    d_set.dedup();
    if d_set.iter().any(|&i| i >= m) {
        return Err(Error::ShapeMismatch("coordinate index out of range".into()));
    }
    if points.iter().all(|p| in_box(p, &d_set, eps)) {
        return Ok(UnimodularMatrix::identity(m));
    }
    let n0 = points.len().max(d_set.len());
    if m < 2 * n0 {
        return Err(Error::DimensionTooSmall(format!(
            "need dimension >= {} for {} points and {} constrained coordinates",
            2 * n0,
            points.len(),
            d_set.len()
        )));
    }
    // coordinate permutation: d_set first, then the rest in order
    let order: Vec<usize> = d_set
        .iter()
        .copied()
        .chain((0..m).filter(|i| !d_set.contains(i)))
        .collect();
    // row-vector convention: (v P)_j = v_{order[j]}
    let mut p = IntMatrix::zero(m, m);
    for (j, &src) in order.iter().enumerate() {
        p.set(src, j, BigInt::one());
    }
    let p_inv = {
        let mut q = IntMatrix::zero(m, m);
        for (j, &src) in order.iter().enumerate() {
            q.set(j, src, BigInt::one());
        }
        q
    };
    // working matrix: point rows (zero-padded to n0) on the leading 2*n0
    // permuted coordinates
    let rows: Vec<Vec<Rational>> = (0..n0)
        .map(|i| {
            (0..2 * n0)
                .map(|j| {
                    points
                        .get(i)
                        .map(|pt| pt[order[j]].clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect()
        })
        .collect();
    let working = RationalMatrix::from_rows(rows)?;
    let a0 = shrink_columns(&working, eps, budget)?;
    let mut block = IntMatrix::identity(m);
    for i in 0..2 * n0 {
        for j in 0..2 * n0 {
            block.set(i, j, a0.get(i, j).clone());
        }
    }
    let full = IntMatrix::from_rows(
        (0..m)
            .map(|i| (0..m).map(|j| p.mul(&block).mul(&p_inv).get(i, j).clone()).collect())
            .collect(),
    )?;
    let result = UnimodularMatrix::new(full)?;
    // exact re-verification of the defining membership
    for pt in points {
        let image: Vec<Rational> = result.act_row(pt).iter().map(|c| c.mod1()).collect();
        if !in_box(&image, &d_set, eps) {
            return Err(Error::AbsorptionFailed("post-check failed after shrink".into()));
        }
    }
    Ok(result)
}

/// Memoized, append-only family of absorbing automorphisms of a
/// finite-dimensional rational torus.
#[derive(Debug)]
pub struct AbsorbingFamilyRegistry {
    dim: usize,
    seeds: Vec<UnimodularMatrix>,
    budget: SearchBudget,
    entries: Mutex<BTreeMap<String, Automorphism>>,
}

impl AbsorbingFamilyRegistry {
    pub fn new(dim: usize, seeds: Vec<UnimodularMatrix>) -> AbsorbingFamilyRegistry {
        AbsorbingFamilyRegistry {
            dim,
            seeds,
            budget: SearchBudget::default(),
            entries: Mutex::new(BTreeMap::new()),
        }
    }

    /// Registry matching a `SemidirectAut` descriptor's dimension and seeds.
    pub fn for_descriptor(desc: &MagmaDescriptor) -> Result<AbsorbingFamilyRegistry> {
        match desc {
            MagmaDescriptor::SemidirectAut { base, seeds, .. } => match base.as_ref() {
                MagmaDescriptor::RationalTorus { dim } => {
                    Ok(AbsorbingFamilyRegistry::new(*dim, seeds.clone()))
                }
                _ => Err(Error::ShapeMismatch("semidirect-aut base must be a torus".into())),
            },
            _ => Err(Error::ShapeMismatch("not a semidirect-aut descriptor".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seeds(&self) -> &[UnimodularMatrix] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn fingerprint(points: &[Element], u: &NeighborhoodSpec) -> String {
        let mut keys: Vec<String> = points
            .iter()
            .map(|p| serde_json::to_string(p).expect("elements serialize"))
            .collect();
        keys.sort();
        format!(
            "{}|{}",
            keys.join(","),
            serde_json::to_string(u).expect("neighborhood specs serialize")
        )
    }

    /// Returns `alpha` with `F ⊆ alpha(U)`, i.e. `alpha^{-1}(F) ⊆ U`.
    /// Identical queries return the stored entry.
    pub fn absorb(&self, points: &[Element], u: &NeighborhoodSpec) -> Result<Automorphism> {
        let (eps, coords) = match u {
            NeighborhoodSpec::EpsBox { eps, coords } => (eps.clone(), coords.clone()),
            _ => {
                return Err(Error::ShapeMismatch(
                    "registry absorption requires an eps-box neighborhood".into(),
                ))
            }
        };
        let key = Self::fingerprint(points, u);
        if let Some(found) = self.entries.lock().unwrap().get(&key) {
            return Ok(found.clone());
        }
        let coord_vecs: Vec<Vec<Rational>> = points
            .iter()
            .map(torus_coords)
            .collect::<Result<Vec<_>>>()?;
        // working coordinate set: the requested restriction, or the first
        // half of the coordinates when the box constrains everything
        let d_set: Vec<usize> = match &coords {
            Some(c) => c.clone(),
            None => (0..self.dim / 2).collect(),
        };
        let a = torus_absorb(&coord_vecs, &d_set, &eps, &self.budget)?;
        let alpha = Automorphism::MatrixAut(a.inverse());
        // exact re-verification against the box actually requested
        let torus = MagmaDescriptor::RationalTorus { dim: self.dim };
        for point in points {
            let pre = aut_act(&alpha, point, Direction::Inverse)?;
            if !nbhd_member(&torus, u, &pre)? {
                return Err(Error::AbsorptionFailed(
                    "absorbed image escapes the requested box".into(),
                ));
            }
        }
        let mut entries = self.entries.lock().unwrap();
        // a racing duplicate insert resolves to the first stored entry
        Ok(entries.entry(key).or_insert(alpha).clone())
    }
}

/// `T^d ⋊ H` with a registry-grown automorphism group containing the seeds.
pub fn torus_duo_group(dim: usize, seeds: Vec<UnimodularMatrix>) -> Result<MagmaDescriptor> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall("torus dimension must be >= 2".into()));
    }
    for s in &seeds {
        if s.size() != dim {
            return Err(Error::ShapeMismatch(format!(
                "seed size {} != dimension {dim}",
                s.size()
            )));
        }
    }
    Ok(MagmaDescriptor::SemidirectAut {
        base: Box::new(MagmaDescriptor::RationalTorus { dim }),
        registry_id: format!("torus-{dim}"),
        seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn completion_identity_case() {
        let d = big(&[0, 1]);
        let m = primitive_completion(&d).unwrap();
        assert_eq!(m.get(0, 1), &BigInt::from(0));
        assert_eq!(m.get(1, 1), &BigInt::from(1));
    }

    #[test]
    fn completion_of_2_3() {
        let d = big(&[2, 3]);
        let m = primitive_completion(&d).unwrap();
        assert_eq!(m.get(0, 1), &BigInt::from(2));
        assert_eq!(m.get(1, 1), &BigInt::from(3));
        assert_eq!(m.matrix().det(), BigInt::from(1));
    }

    #[test]
    fn completion_of_6_10_15() {
        let d = big(&[6, 10, 15]);
        let m = primitive_completion(&d).unwrap();
        for (i, di) in d.iter().enumerate() {
            assert_eq!(m.get(i, 2), di);
        }
        assert_eq!(m.matrix().det(), BigInt::from(1));
    }

    #[test]
    fn completion_rejects_imprimitive() {
        assert!(matches!(
            primitive_completion(&big(&[2, 4])),
            Err(Error::NotPrimitive(_))
        ));
    }

    #[test]
    fn small_combination_examples() {
        // zero column: unit vector suffices
        let d = small_combination(&[vec![rat(0, 1)], vec![rat(1, 1)]], &rat(0, 1), &SearchBudget::default()).unwrap();
        assert_eq!(d, big(&[1, 0]));

        // 3/7, 2/7 with eps = 1/7
        let cols = vec![vec![rat(3, 7)], vec![rat(2, 7)]];
        let d = small_combination(&cols, &rat(1, 7), &SearchBudget::default()).unwrap();
        assert!(passes(&cols, &d, &rat(1, 7)));
        assert!(gcd_of(&d).is_one());

        // exact relation among 1/2, 1/3, 1/6
        let cols = vec![vec![rat(1, 2)], vec![rat(1, 3)], vec![rat(1, 6)]];
        let d = small_combination(&cols, &rat(0, 1), &SearchBudget::default()).unwrap();
        assert!(passes(&cols, &d, &rat(0, 1)));
    }

    #[test]
    fn small_combination_enumeration_strategy() {
        let cols = vec![vec![rat(3, 7)], vec![rat(2, 7)]];
        let budget = SearchBudget::enumeration(BigInt::from(7));
        let d = small_combination(&cols, &rat(1, 7), &budget).unwrap();
        assert!(passes(&cols, &d, &rat(1, 7)));
    }

    #[test]
    fn shrink_already_small() {
        let x = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 2), rat(0, 1), rat(0, 1)],
        ])
        .unwrap();
        let a = shrink_columns(&x, &rat(1, 2), &SearchBudget::default()).unwrap();
        assert_eq!(a, UnimodularMatrix::identity(4));
    }

    #[test]
    fn shrink_spec_example() {
        let x = RationalMatrix::from_rows(vec![vec![rat(5, 2), rat(1, 1)]]).unwrap();
        let a = shrink_columns(&x, &rat(1, 2), &SearchBudget::default()).unwrap();
        let y = x.mul_int(a.matrix());
        assert!(y.get(0, 0).abs() <= rat(1, 2));
        assert_eq!(a.matrix().det(), BigInt::from(1));
    }

    #[test]
    fn shrink_rejects_wrong_shape() {
        let x = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3), rat(1, 4)]]).unwrap();
        assert!(matches!(
            shrink_columns(&x, &rat(1, 2), &SearchBudget::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn torus_absorb_spec_example() {
        let points = vec![vec![rat(2, 5), rat(1, 3)]];
        let a = torus_absorb(&points, &[0], &rat(1, 10), &SearchBudget::default()).unwrap();
        let image: Vec<Rational> = a.act_row(&points[0]).iter().map(|c| c.mod1()).collect();
        assert!(image[0].dist_to_int() <= rat(1, 10));
        assert_eq!(a.matrix().det(), BigInt::from(1));
    }

    #[test]
    fn torus_absorb_fixed_point_and_inside() {
        let zero = vec![vec![rat(0, 1), rat(0, 1)]];
        assert_eq!(
            torus_absorb(&zero, &[0], &rat(1, 10), &SearchBudget::default()).unwrap(),
            UnimodularMatrix::identity(2)
        );
        let inside = vec![vec![rat(1, 20), rat(1, 2)]];
        assert_eq!(
            torus_absorb(&inside, &[0], &rat(1, 10), &SearchBudget::default()).unwrap(),
            UnimodularMatrix::identity(2)
        );
    }

    #[test]
    fn torus_absorb_dimension_check() {
        let points = vec![vec![rat(1, 3), rat(1, 5)], vec![rat(1, 7), rat(2, 7)]];
        assert!(matches!(
            torus_absorb(&points, &[0], &rat(1, 10), &SearchBudget::default()),
            Err(Error::DimensionTooSmall(_))
        ));
    }

    #[test]
    fn block_lift_acts_per_block() {
        let a = UnimodularMatrix::from_i64(&[&[5, 1], &[-6, -1]]).unwrap();
        let lifted = block_diagonal_lift(&a, 2);
        let v = vec![rat(2, 5), rat(1, 3), rat(2, 5), rat(1, 3)];
        let image: Vec<Rational> = lifted.act_row(&v).iter().map(|c| c.mod1()).collect();
        let per_block: Vec<Rational> = a.act_row(&v[..2]).iter().map(|c| c.mod1()).collect();
        assert_eq!(&image[..2], &per_block[..]);
        assert_eq!(&image[2..], &per_block[..]);
        assert_eq!(block_diagonal_lift(&a, 1), a);
        assert_eq!(
            block_diagonal_lift(&UnimodularMatrix::identity(2), 3),
            UnimodularMatrix::identity(6)
        );
    }

    #[test]
    fn registry_memoizes() {
        let registry = AbsorbingFamilyRegistry::new(2, vec![]);
        let f = vec![Element::torus(vec![rat(2, 5), rat(1, 3)])];
        let u = NeighborhoodSpec::EpsBox {
            eps: rat(1, 10),
            coords: Some(vec![0]),
        };
        let a1 = registry.absorb(&f, &u).unwrap();
        let a2 = registry.absorb(&f, &u).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(registry.len(), 1);
        // the defining membership: alpha^{-1}(F) ⊆ U
        let torus = MagmaDescriptor::RationalTorus { dim: 2 };
        let pre = aut_act(&a1, &f[0], Direction::Inverse).unwrap();
        assert!(nbhd_member(&torus, &u, &pre).unwrap());
    }

    #[test]
    fn registry_zero_is_identity() {
        let registry = AbsorbingFamilyRegistry::new(2, vec![]);
        let f = vec![Element::torus(vec![rat(0, 1), rat(0, 1)])];
        let u = NeighborhoodSpec::eps_box(rat(1, 10));
        let a = registry.absorb(&f, &u).unwrap();
        assert!(a.is_identity());
    }
}
