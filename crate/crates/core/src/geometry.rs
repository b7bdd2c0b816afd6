//! Rectangle indexing collection `A = {[0,t] : t in R^N_+}`.
//!
//! A rectangle `[0,t]` is identified with its upper corner `t`. Finite unions
//! are canonical antichains of corners, and increments `C = A \ B` pair a
//! corner with such a union. Intersections of rectangles are componentwise
//! minima ("meets"), so every set operation reduces to corner arithmetic.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest number of union corners accepted by subset enumerations.
pub const MAX_UNION_CORNERS: usize = 20;

/// Largest number of intermediate inclusion-exclusion terms kept by [`Increment::frontier`].
const MAX_FRONTIER_TERMS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate {index} is negative ({value})")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("corners must have at least one coordinate")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty corner list")]
    Empty,
    #[error("{count} corners exceed the enumeration limit of {limit}")]
    TooManyCorners { count: usize, limit: usize },
    #[error(
        "inclusion-exclusion coefficient {coefficient} at corner {corner:?} is not +1 or -1"
    )]
    SignMultiplicity { corner: Vec<f64>, coefficient: i64 },
}

/// Upper corner `t` of the rectangle `[0,t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<T>",
    into = "Vec<T>",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub struct Corner<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Corner<T> {
    pub fn new(coords: Vec<T>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        for (index, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeometryError::NonFinite { index });
            }
            if c < T::zero() {
                return Err(GeometryError::NegativeCoordinate {
                    index,
                    value: c.as_f64(),
                });
            }
        }
        Ok(Self { coords })
    }

    /// The corner `(0,...,0)`, standing for the minimal set `{0}`.
    pub fn origin(dim: usize) -> Self {
        assert!(dim > 0, "origin needs a positive dimension");
        Self {
            coords: vec![T::zero(); dim],
        }
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&c| T::lit(c)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.abs() <= T::coord_tol())
    }

    /// Componentwise minimum: `[0,s] ∩ [0,t] = [0, s ∧ t]`.
    pub fn meet(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "meet of corners of different dimension");
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        }
    }

    /// Componentwise maximum (the smallest rectangle containing both).
    pub fn join(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "join of corners of different dimension");
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        }
    }

    /// `[0,self] ⊆ [0,other]`, up to the coordinate tolerance.
    pub fn le(&self, other: &Self) -> bool {
        self.coords
            .iter()
            .zip(&other.coords)
            .all(|(&a, &b)| a <= b + T::coord_tol())
    }

    /// Every coordinate strictly below `other` (beyond tolerance).
    pub fn strictly_below(&self, other: &Self) -> bool {
        self.coords
            .iter()
            .zip(&other.coords)
            .all(|(&a, &b)| a + T::coord_tol() < b)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(&a, &b)| (a - b).abs() <= T::coord_tol())
    }

    /// Lexicographic total order used for canonical forms.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.partial_cmp(b).unwrap_or(Ordering::Equal) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub fn coord_sum(&self) -> T {
        self.coords.iter().copied().sum()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.as_f64()).collect()
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<(), GeometryError> {
        if self.dim() != expected {
            return Err(GeometryError::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for Corner<T> {
    type Error = GeometryError;

    fn try_from(coords: Vec<T>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl<T> From<Corner<T>> for Vec<T> {
    fn from(c: Corner<T>) -> Self {
        c.coords
    }
}

impl<T: Scalar> fmt::Display for Corner<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Order used for linear extensions: coordinate sum, then lexicographic.
fn extension_cmp<T: Scalar>(a: &Corner<T>, b: &Corner<T>) -> Ordering {
    a.coord_sum()
        .partial_cmp(&b.coord_sum())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.lex_cmp(b))
}

fn common_dim<T: Scalar>(corners: &[Corner<T>]) -> Result<Option<usize>, GeometryError> {
    let Some(first) = corners.first() else {
        return Ok(None);
    };
    for c in corners {
        c.check_dim(first.dim())?;
    }
    Ok(Some(first.dim()))
}

/// Appends `c` unless an approximately equal corner is already present.
fn push_unique<T: Scalar>(set: &mut Vec<Corner<T>>, c: Corner<T>) -> bool {
    if set.iter().any(|d| d.approx_eq(&c)) {
        false
    } else {
        set.push(c);
        true
    }
}

/// Finite union `∪ [0,b_i]` in its extremal (antichain) representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Corner<T>>",
    into = "Vec<Corner<T>>",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub struct UnionSet<T> {
    corners: Vec<Corner<T>>,
}

impl<T: Scalar> UnionSet<T> {
    pub fn new(corners: &[Corner<T>]) -> Result<Self, GeometryError> {
        canonicalize(corners)
    }

    pub fn empty() -> Self {
        Self {
            corners: Vec::new(),
        }
    }

    pub fn corners(&self) -> &[Corner<T>] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.corners.first().map(Corner::dim)
    }

    /// Whether the point `p` lies in the union.
    pub fn contains_point(&self, p: &Corner<T>) -> bool {
        self.corners.iter().any(|b| p.le(b))
    }

    /// Whether `[0,t]` is contained in the union. Rectangles satisfy the
    /// Shape hypothesis, so this holds iff `t` is below a single corner.
    pub fn contains_rect(&self, t: &Corner<T>) -> bool {
        self.contains_point(t)
    }

    /// The union intersected with `[0,a]`.
    pub fn clip(&self, a: &Corner<T>) -> Result<Self, GeometryError> {
        let clipped: Vec<_> = self.corners.iter().map(|b| b.meet(a)).collect();
        canonicalize(&clipped)
    }
}

impl<T: Scalar> TryFrom<Vec<Corner<T>>> for UnionSet<T> {
    type Error = GeometryError;

    fn try_from(corners: Vec<Corner<T>>) -> Result<Self, Self::Error> {
        canonicalize(&corners)
    }
}

impl<T> From<UnionSet<T>> for Vec<Corner<T>> {
    fn from(u: UnionSet<T>) -> Self {
        u.corners
    }
}

/// Reduces a list of corners to the antichain of its maximal elements,
/// sorted lexicographically.
pub fn canonicalize<T: Scalar>(corners: &[Corner<T>]) -> Result<UnionSet<T>, GeometryError> {
    common_dim(corners)?;
    let mut unique: Vec<Corner<T>> = Vec::with_capacity(corners.len());
    for c in corners {
        push_unique(&mut unique, c.clone());
    }
    let mut maximal: Vec<Corner<T>> = unique
        .iter()
        .filter(|c| !unique.iter().any(|d| !d.approx_eq(c) && c.le(d)))
        .cloned()
        .collect();
    maximal.sort_by(|a, b| a.lex_cmp(b));
    Ok(UnionSet { corners: maximal })
}

/// Sign of a frontier term in the inclusion-exclusion expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct FrontierEntry<T> {
    pub corner: Corner<T>,
    pub sign: Sign,
}

/// The C-frontier: semilattice elements that survive inclusion-exclusion
/// cancellation, each with its net sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    transparent,
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub struct Frontier<T> {
    entries: Vec<FrontierEntry<T>>,
}

impl<T: Scalar> Frontier<T> {
    pub fn entries(&self) -> &[FrontierEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn corners(&self) -> impl Iterator<Item = &Corner<T>> {
        self.entries.iter().map(|e| &e.corner)
    }
}

/// Increment `C = [0,a] \ ∪[0,b_i]`, with every `b_i` clipped to `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Increment<T> {
    a: Corner<T>,
    b: UnionSet<T>,
}

impl<T: Scalar> Increment<T> {
    pub fn new(a: Corner<T>, b: &[Corner<T>]) -> Result<Self, GeometryError> {
        for c in b {
            c.check_dim(a.dim())?;
        }
        let clipped: Vec<_> = b.iter().map(|c| c.meet(&a)).collect();
        let b = canonicalize(&clipped)?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Corner<T> {
        &self.a
    }

    pub fn b(&self) -> &UnionSet<T> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Whether `[0,u] ∩ C` is empty, i.e. `[0,u] ∩ [0,a] ⊆ B`.
    pub fn misses(&self, u: &Corner<T>) -> bool {
        self.b.contains_rect(&u.meet(&self.a))
    }

    /// All meets of nonempty subsets of the `b` corners, deduplicated,
    /// enumerated by subset size and then lexicographically by index.
    pub fn semilattice(&self) -> Result<Vec<Corner<T>>, GeometryError> {
        let bs = self.b.corners();
        let k = bs.len();
        if k > MAX_UNION_CORNERS {
            return Err(GeometryError::TooManyCorners {
                count: k,
                limit: MAX_UNION_CORNERS,
            });
        }
        let mut out = Vec::new();
        for size in 1..=k {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let meet = idx[1..]
                    .iter()
                    .fold(bs[idx[0]].clone(), |acc, &i| acc.meet(&bs[i]));
                push_unique(&mut out, meet);
                if !next_combination(&mut idx, k) {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Net inclusion-exclusion expansion of `1_B` grouped by corner.
    ///
    /// Terms are accumulated one `b` corner at a time:
    /// `F_i = F_{i-1} + b_i - (F_{i-1} ∧ b_i)`, which equals the full subset
    /// expansion after grouping identical corners.
    pub fn inclusion_exclusion_terms(&self) -> Result<Vec<(Corner<T>, i64)>, GeometryError> {
        let mut terms: Vec<(Corner<T>, i64)> = Vec::new();
        for bi in self.b.corners() {
            let mut fresh: Vec<(Corner<T>, i64)> = Vec::with_capacity(terms.len() + 1);
            fresh.push((bi.clone(), 1));
            fresh.extend(terms.iter().map(|(c, k)| (c.meet(bi), -k)));
            for (c, k) in fresh {
                match terms.iter_mut().find(|(d, _)| d.approx_eq(&c)) {
                    Some((_, acc)) => *acc += k,
                    None => terms.push((c, k)),
                }
            }
            terms.retain(|(_, k)| *k != 0);
            if terms.len() > MAX_FRONTIER_TERMS {
                return Err(GeometryError::TooManyCorners {
                    count: terms.len(),
                    limit: MAX_FRONTIER_TERMS,
                });
            }
        }
        Ok(terms)
    }

    /// The C-frontier with inclusion-exclusion signs. An empty `b` yields
    /// the single entry `(origin, +1)`.
    pub fn frontier(&self) -> Result<Frontier<T>, GeometryError> {
        if self.b.is_empty() {
            return Ok(Frontier {
                entries: vec![FrontierEntry {
                    corner: Corner::origin(self.dim()),
                    sign: Sign::Plus,
                }],
            });
        }
        let mut terms = self.inclusion_exclusion_terms()?;
        terms.sort_by(|(a, _), (b, _)| {
            b.coord_sum()
                .partial_cmp(&a.coord_sum())
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.lex_cmp(b))
        });
        let entries = terms
            .into_iter()
            .map(|(corner, k)| match k {
                1 => Ok(FrontierEntry {
                    corner,
                    sign: Sign::Plus,
                }),
                -1 => Ok(FrontierEntry {
                    corner,
                    sign: Sign::Minus,
                }),
                coefficient => Err(GeometryError::SignMultiplicity {
                    corner: corner.to_f64_vec(),
                    coefficient,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Frontier { entries })
    }
}

/// Advances `idx` to the next `idx.len()`-combination of `0..n`.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether `order` lists corners so that `u ≤ v` implies `u` comes first.
pub fn is_linear_extension<T: Scalar>(order: &[Corner<T>]) -> bool {
    order.iter().enumerate().all(|(i, u)| {
        order[..i]
            .iter()
            .all(|earlier| earlier.approx_eq(u) || !u.le(earlier))
    })
}

/// Whether the set is closed under pairwise meets.
pub fn is_min_closed<T: Scalar>(corners: &[Corner<T>]) -> bool {
    corners.iter().all(|u| {
        corners
            .iter()
            .all(|v| corners.iter().any(|w| w.approx_eq(&u.meet(v))))
    })
}

/// Smallest meet-closed superset of `corners` containing the origin,
/// listed in a linear extension of the componentwise order.
pub fn min_closure<T: Scalar>(corners: &[Corner<T>]) -> Result<Vec<Corner<T>>, GeometryError> {
    let dim = common_dim(corners)?.ok_or(GeometryError::Empty)?;
    let mut set: Vec<Corner<T>> = vec![Corner::origin(dim)];
    for c in corners {
        push_unique(&mut set, c.clone());
    }
    // Meets of the newest elements with everything seen so far.
    let mut frontier_start = 0;
    loop {
        let len = set.len();
        let mut added = false;
        for i in frontier_start..len {
            for j in 0..len {
                let m = set[i].meet(&set[j]);
                added |= push_unique(&mut set, m);
            }
        }
        if !added {
            break;
        }
        frontier_start = len;
    }
    set.sort_by(extension_cmp);
    if !is_linear_extension(&set) {
        set = topological_order(set);
    }
    Ok(set)
}

/// Kahn-style ordering for inputs whose coordinate sums are not reliable
/// (corners separated by amounts comparable to the tolerance).
fn topological_order<T: Scalar>(mut remaining: Vec<Corner<T>>) -> Vec<Corner<T>> {
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let pos = (0..remaining.len())
            .find(|&i| {
                !remaining
                    .iter()
                    .enumerate()
                    .any(|(j, v)| j != i && !v.approx_eq(&remaining[i]) && v.le(&remaining[i]))
            })
            .unwrap_or(0);
        out.push(remaining.remove(pos));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: &[f64]) -> Corner<f64> {
        Corner::from_f64(x).unwrap()
    }

    fn cs(xs: &[&[f64]]) -> Vec<Corner<f64>> {
        xs.iter().map(|x| c(x)).collect()
    }

    #[test]
    fn canonicalize_examples() {
        let u = canonicalize(&cs(&[&[1., 2.], &[2., 1.]])).unwrap();
        assert_eq!(u.corners(), cs(&[&[1., 2.], &[2., 1.]]).as_slice());
        let u = canonicalize(&cs(&[&[1., 1.], &[2., 2.]])).unwrap();
        assert_eq!(u.corners(), cs(&[&[2., 2.]]).as_slice());
        let u = canonicalize(&cs(&[&[1., 3.], &[2., 2.], &[1., 2.]])).unwrap();
        assert_eq!(u.corners(), cs(&[&[1., 3.], &[2., 2.]]).as_slice());
    }

    #[test]
    fn negative_coordinate_rejected() {
        assert!(matches!(
            Corner::<f64>::new(vec![1.0, -0.5]),
            Err(GeometryError::NegativeCoordinate { index: 1, .. })
        ));
        let json = "[[1.0, -2.0]]";
        assert!(serde_json::from_str::<UnionSet<f64>>(json).is_err());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let err = canonicalize(&[c(&[1.0]), c(&[1.0, 2.0])]).unwrap_err();
        assert!(matches!(err, GeometryError::DimensionMismatch { .. }));
        let err = Increment::new(c(&[1.0, 1.0]), &[c(&[1.0])]).unwrap_err();
        assert!(matches!(err, GeometryError::DimensionMismatch { .. }));
    }

    #[test]
    fn near_duplicates_merge() {
        let u = canonicalize(&[c(&[1.0, 2.0]), c(&[1.0 + 1e-14, 2.0])]).unwrap();
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn semilattice_examples() {
        let inc = Increment::new(c(&[5., 5.]), &cs(&[&[1., 2.], &[2., 1.]])).unwrap();
        assert_eq!(inc.semilattice().unwrap(), cs(&[&[1., 2.], &[2., 1.], &[1., 1.]]));

        let inc = Increment::new(c(&[4.]), &cs(&[&[3.]])).unwrap();
        assert_eq!(inc.semilattice().unwrap(), cs(&[&[3.]]));

        let inc =
            Increment::new(c(&[5., 5.]), &cs(&[&[1., 4.], &[2., 3.], &[4., 1.]])).unwrap();
        assert_eq!(
            inc.semilattice().unwrap(),
            cs(&[&[1., 4.], &[2., 3.], &[4., 1.], &[1., 3.], &[1., 1.], &[2., 1.]])
        );
    }

    fn as_pairs(f: &Frontier<f64>) -> Vec<(Vec<f64>, i8)> {
        let mut v: Vec<_> = f
            .entries()
            .iter()
            .map(|e| (e.corner.to_f64_vec(), i8::from(e.sign)))
            .collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    }

    #[test]
    fn frontier_two_corners() {
        let inc = Increment::new(c(&[2., 2.]), &cs(&[&[1., 2.], &[2., 1.]])).unwrap();
        let f = inc.frontier().unwrap();
        assert_eq!(
            as_pairs(&f),
            vec![(vec![1., 1.], -1), (vec![1., 2.], 1), (vec![2., 1.], 1)]
        );
    }

    #[test]
    fn frontier_one_dimensional() {
        let inc = Increment::new(c(&[3.]), &cs(&[&[2.]])).unwrap();
        assert_eq!(as_pairs(&inc.frontier().unwrap()), vec![(vec![2.], 1)]);
    }

    #[test]
    fn frontier_three_dimensional_no_collisions() {
        let inc = Increment::new(
            c(&[1., 1., 1.]),
            &cs(&[&[1., 1., 0.5], &[1., 0.5, 1.], &[0.5, 1., 1.]]),
        )
        .unwrap();
        let f = inc.frontier().unwrap();
        assert_eq!(f.len(), 7);
        let got = as_pairs(&f);
        let expected = {
            let mut v = vec![
                (vec![1., 1., 0.5], 1),
                (vec![1., 0.5, 1.], 1),
                (vec![0.5, 1., 1.], 1),
                (vec![1., 0.5, 0.5], -1),
                (vec![0.5, 1., 0.5], -1),
                (vec![0.5, 0.5, 1.], -1),
                (vec![0.5, 0.5, 0.5], 1),
            ];
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            v
        };
        assert_eq!(got, expected);
    }

    #[test]
    fn frontier_empty_b_is_origin() {
        let inc = Increment::new(c(&[2., 3.]), &[]).unwrap();
        let f = inc.frontier().unwrap();
        assert_eq!(as_pairs(&f), vec![(vec![0., 0.], 1)]);
    }

    #[test]
    fn frontier_reports_non_unit_multiplicity() {
        // Three corners whose pairwise and triple meets coincide at (1,1,1):
        // net coefficient is -3 + 1 = -2.
        let inc = Increment::new(
            c(&[2., 2., 2.]),
            &cs(&[&[2., 1., 1.], &[1., 2., 1.], &[1., 1., 2.]]),
        )
        .unwrap();
        match inc.frontier() {
            Err(GeometryError::SignMultiplicity { corner, coefficient }) => {
                assert_eq!(corner, vec![1., 1., 1.]);
                assert_eq!(coefficient, -2);
            }
            other => panic!("expected multiplicity error, got {other:?}"),
        }
    }

    #[test]
    fn b_corners_are_clipped_to_a() {
        let inc = Increment::new(c(&[2., 2.]), &cs(&[&[3., 1.], &[1., 5.]])).unwrap();
        assert_eq!(inc.b().corners(), cs(&[&[1., 2.], &[2., 1.]]).as_slice());
    }

    #[test]
    fn min_closure_examples() {
        let got = min_closure(&cs(&[&[1., 2.], &[2., 1.]])).unwrap();
        assert_eq!(got, cs(&[&[0., 0.], &[1., 1.], &[1., 2.], &[2., 1.]]));

        let got = min_closure(&cs(&[&[3.]])).unwrap();
        assert_eq!(got, cs(&[&[0.], &[3.]]));

        let grid: Vec<_> = (1..=3)
            .flat_map(|i| (1..=3).map(move |j| c(&[i as f64, j as f64])))
            .collect();
        let got = min_closure(&grid).unwrap();
        assert_eq!(got.len(), 10);
        assert!(got[0].is_origin());
        assert!(grid.iter().all(|g| got.iter().any(|h| h.approx_eq(g))));
        assert!(is_min_closed(&got));
        assert!(is_linear_extension(&got));
    }

    #[test]
    fn min_closure_rejects_empty() {
        assert_eq!(min_closure::<f64>(&[]).unwrap_err(), GeometryError::Empty);
    }

    #[test]
    fn topological_fallback_is_an_extension() {
        let order = topological_order(cs(&[&[2., 2.], &[1., 1.], &[0., 0.], &[1., 2.]]));
        assert!(is_linear_extension(&order));
    }

    #[test]
    fn frontier_serializes_as_records() {
        let inc = Increment::new(c(&[3.]), &cs(&[&[2.]])).unwrap();
        let json = serde_json::to_string(&inc.frontier().unwrap()).unwrap();
        assert_eq!(json, r#"[{"corner":[2.0],"sign":1}]"#);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Corner::<f32>::from_f64(&[2., 2.]).unwrap();
        let b = [
            Corner::<f32>::from_f64(&[1., 2.]).unwrap(),
            Corner::<f32>::from_f64(&[2., 1.]).unwrap(),
        ];
        let f = Increment::new(a, &b).unwrap().frontier().unwrap();
        assert_eq!(f.len(), 3);
    }
}
