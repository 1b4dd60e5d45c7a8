//! Sparse exterior algebra over the rationals.
//!
//! Forms are stored as maps from strictly increasing index tuples to nonzero
//! rational coefficients. Index tuples are bit masks internally (bit `i` is the
//! 1-based basis label `i + 1`), which caps the ambient dimension at 64.
//!
//! Conventions used throughout the crate:
//!
//! * `(i_v a)(w1, ..., w_{k-1}) = a(v, w1, ..., w_{k-1})`.
//! * `multi_contract([v1, ..., vk], a) = i_vk(...(i_v1 a))`, so that
//!   `multi_contract(vs, a)(w..) = a(v1, ..., vk, w..)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::rational::Q;

pub const MAX_DIMENSION: usize = 64;

fn check_dimension(d: usize) -> Result<()> {
    if d > MAX_DIMENSION {
        Err(Error::TooManyDimensions(d))
    } else {
        Ok(())
    }
}

/// Strictly increasing tuple of basis labels.
///
/// Tuples of equal length are ordered lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexTuple(u64);

impl IndexTuple {
    pub const EMPTY: IndexTuple = IndexTuple(0);

    /// Builds a tuple from 1-based labels, which must be strictly increasing
    /// and at most `dimension`.
    pub fn from_indices(indices: &[usize], dimension: usize) -> Result<Self> {
        let invalid = || Error::InvalidIndex {
            indices: indices.to_vec(),
            dimension,
        };
        check_dimension(dimension)?;
        let mut mask = 0u64;
        let mut prev = 0;
        for &i in indices {
            if i == 0 || i > dimension || i <= prev {
                return Err(invalid());
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(IndexTuple(mask))
    }

    /// Builds a tuple from 0-based positions in any order; duplicates collapse.
    pub fn from_positions(positions: impl IntoIterator<Item = usize>) -> Self {
        IndexTuple(positions.into_iter().fold(0, |m, p| m | (1u64 << p)))
    }

    #[inline]
    pub fn from_mask(mask: u64) -> Self {
        IndexTuple(mask)
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 0-based positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let p = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(p)
            }
        })
    }

    /// 1-based labels in increasing order.
    pub fn indices(self) -> Vec<usize> {
        self.positions().map(|p| p + 1).collect()
    }

    #[inline]
    pub fn contains_position(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    #[inline]
    pub fn max_position(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        // the tuple holding the smallest differing label comes first
        let diff = self.0 ^ other.0;
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

/// Sign of `e^a ∧ e^b` relative to `e^{a ∪ b}`; `None` when they overlap.
#[inline]
pub fn wedge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j == 63 { 0 } else { !((2u64 << j) - 1) };
        inversions += (a & above).count_ones();
    }
    Some(inversions % 2 == 1)
}

/// Sign of removing position `p` from the front of `mask` (interior product).
#[inline]
pub fn contraction_negative(mask: u64, p: usize) -> bool {
    (mask & ((1u64 << p) - 1)).count_ones() % 2 == 1
}

/// All `k`-subsets of `0..n` as masks, in lexicographic tuple order.
pub fn subsets(n: usize, k: usize) -> Vec<IndexTuple> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(IndexTuple::from_positions(idx.iter().copied()));
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A vector of the base space, in standard coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    pub coords: Vec<Q>,
}

impl Vector {
    pub fn new(coords: Vec<Q>) -> Self {
        Vector { coords }
    }

    pub fn zero(d: usize) -> Self {
        Vector::new(vec![Q::zero(); d])
    }

    /// Standard basis vector `e_i`, 1-based.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Vector::zero(d);
        v.coords[i - 1] = Q::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector::new(xs.iter().map(|&x| crate::rational::q(x)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &Q) -> Vector {
        Vector::new(self.coords.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }
}

/// Constant-coefficient alternating form on a `dimension`-dimensional space.
#[derive(Clone, PartialEq, Eq)]
pub struct AlternatingForm {
    dimension: usize,
    degree: usize,
    terms: BTreeMap<IndexTuple, Q>,
}

impl fmt::Debug for AlternatingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(d={}, k={}; ", self.dimension, self.degree)?;
        let mut first = true;
        for (t, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·e{:?}", t.indices())?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl AlternatingForm {
    pub fn zero(dimension: usize, degree: usize) -> Self {
        AlternatingForm {
            dimension,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dimension: usize, c: Q) -> Self {
        let mut f = AlternatingForm::zero(dimension, 0);
        f.add_term(IndexTuple::EMPTY, c);
        f
    }

    /// Builds a form from 1-based index lists. Repeated tuples are summed.
    pub fn from_terms<I>(dimension: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Q)>,
    {
        check_dimension(dimension)?;
        let mut f = AlternatingForm::zero(dimension, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::InvalidIndex {
                    indices: idx,
                    dimension,
                });
            }
            let t = IndexTuple::from_indices(&idx, dimension)?;
            f.add_term(t, c);
        }
        Ok(f)
    }

    /// `c · e^{i1} ∧ ... ∧ e^{ik}` for 1-based labels in any order.
    pub fn monomial(dimension: usize, indices: &[usize], c: Q) -> Result<Self> {
        check_dimension(dimension)?;
        let mut f = AlternatingForm::scalar(dimension, c);
        for &i in indices {
            if i == 0 || i > dimension {
                return Err(Error::InvalidIndex {
                    indices: indices.to_vec(),
                    dimension,
                });
            }
            f = f.wedge(&AlternatingForm::basis_one_form(dimension, i))?;
        }
        Ok(f)
    }

    /// The dual basis 1-form `e^i`, 1-based.
    pub fn basis_one_form(dimension: usize, i: usize) -> Self {
        let mut f = AlternatingForm::zero(dimension, 1);
        f.add_term(IndexTuple::from_positions([i - 1]), Q::one());
        f
    }

    pub fn one_form(coeffs: &[Q]) -> Self {
        let mut f = AlternatingForm::zero(coeffs.len(), 1);
        for (p, c) in coeffs.iter().enumerate() {
            f.add_term(IndexTuple::from_positions([p]), c.clone());
        }
        f
    }

    /// Coefficients of a 1-form as a dense covector.
    pub fn covector(&self) -> Vec<Q> {
        debug_assert_eq!(self.degree, 1);
        let mut v = vec![Q::zero(); self.dimension];
        for (t, c) in &self.terms {
            v[t.mask().trailing_zeros() as usize] = c.clone();
        }
        v
    }

    pub(crate) fn add_term(&mut self, t: IndexTuple, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(t) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexTuple, &Q)> {
        self.terms.iter().map(|(t, c)| (*t, c))
    }

    pub fn coeff(&self, t: IndexTuple) -> Q {
        self.terms.get(&t).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero coefficients in the standard basis.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut f = AlternatingForm::zero(self.dimension, self.degree);
        if c.is_zero() {
            return f;
        }
        for (t, x) in &self.terms {
            f.terms.insert(*t, x * c);
        }
        f
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
                reason: format!("expected degree {}", self.degree),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut f = self.clone();
        for (t, c) in &other.terms {
            f.add_term(*t, c.clone());
        }
        Ok(f)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut f = self.clone();
        for (t, c) in &other.terms {
            f.add_term(*t, -c.clone());
        }
        Ok(f)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        let mut f = AlternatingForm::zero(self.dimension, self.degree + other.degree);
        if f.degree > self.dimension {
            return Ok(f);
        }
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(neg) = wedge_sign(a.mask(), b.mask()) {
                    let c = x * y;
                    f.add_term(IndexTuple(a.mask() | b.mask()), if neg { -c } else { c });
                }
            }
        }
        Ok(f)
    }

    /// Interior product `i_v self`.
    pub fn contract(&self, v: &Vector) -> Result<Self> {
        if v.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: v.dimension(),
            });
        }
        if self.degree == 0 {
            return Err(Error::DegreeOutOfRange {
                degree: 0,
                reason: "cannot contract a vector into a 0-form".into(),
            });
        }
        let mut f = AlternatingForm::zero(self.dimension, self.degree - 1);
        for (t, c) in &self.terms {
            for p in t.positions() {
                let vp = &v.coords[p];
                if vp.is_zero() {
                    continue;
                }
                let x = c * vp;
                let rest = IndexTuple(t.mask() & !(1u64 << p));
                f.add_term(rest, if contraction_negative(t.mask(), p) { -x } else { x });
            }
        }
        Ok(f)
    }

    /// `i_vk ∘ ... ∘ i_v1 self`.
    pub fn multi_contract(&self, vs: &[Vector]) -> Result<Self> {
        if vs.len() > self.degree {
            return Err(Error::DegreeOutOfRange {
                degree: self.degree,
                reason: format!("cannot contract {} vectors", vs.len()),
            });
        }
        let mut f = self.clone();
        for v in vs {
            if f.is_zero() {
                return Ok(AlternatingForm::zero(self.dimension, self.degree - vs.len()));
            }
            f = f.contract(v)?;
        }
        Ok(f)
    }

    /// Full evaluation `self(v1, ..., vk)`.
    pub fn evaluate(&self, vs: &[Vector]) -> Result<Q> {
        if vs.len() != self.degree {
            return Err(Error::DegreeOutOfRange {
                degree: self.degree,
                reason: format!("evaluation needs {} vectors, got {}", self.degree, vs.len()),
            });
        }
        Ok(self.multi_contract(vs)?.coeff(IndexTuple::EMPTY))
    }

    /// Pullback along the linear map `w ↦ M w`, where `M` has `self.dimension()`
    /// rows and `target_dim` columns: `(M* a)(w..) = a(M w..)`.
    pub fn pullback(&self, m: &Mat, target_dim: usize) -> Result<Self> {
        check_dimension(target_dim)?;
        if m.len() != self.dimension || m.iter().any(|r| r.len() != target_dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: m.len(),
            });
        }
        let mut out = AlternatingForm::zero(target_dim, self.degree);
        if self.degree > target_dim {
            return Ok(out);
        }
        let rows: Vec<Vec<(usize, &Q)>> = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        for (t, c) in &self.terms {
            let mut acc: BTreeMap<u64, Q> = BTreeMap::new();
            acc.insert(0, c.clone());
            for p in t.positions() {
                let mut next: BTreeMap<u64, Q> = BTreeMap::new();
                for (mask, x) in &acc {
                    for &(j, y) in &rows[p] {
                        if mask >> j & 1 == 1 {
                            continue;
                        }
                        let neg = (mask >> (j + 1)).count_ones() % 2 == 1;
                        let v = x * y;
                        let e = next.entry(mask | 1 << j).or_insert_with(Q::zero);
                        if neg {
                            *e -= v;
                        } else {
                            *e += v;
                        }
                    }
                }
                next.retain(|_, v| !v.is_zero());
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            for (mask, x) in acc {
                out.add_term(IndexTuple(mask), x);
            }
        }
        Ok(out)
    }

    /// Coefficients relative to the basis whose dual vectors are the columns
    /// of `basis` (a `d × d` matrix): `a(b_I)` for every tuple `I`.
    pub fn in_basis(&self, basis_columns: &Mat) -> Result<Self> {
        self.pullback(basis_columns, self.dimension)
    }

    /// Block form `self ⊕ other` on `d1 + d2` dimensions.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
                reason: format!("direct sum needs equal degrees ({})", self.degree),
            });
        }
        let d = self.dimension + other.dimension;
        check_dimension(d)?;
        let mut f = AlternatingForm::zero(d, self.degree);
        for (t, c) in &self.terms {
            f.add_term(*t, c.clone());
        }
        for (t, c) in &other.terms {
            f.add_term(IndexTuple(t.mask() << self.dimension), c.clone());
        }
        Ok(f)
    }

    /// Re-embeds into a larger space, sending position `p` to `positions[p]`.
    pub fn embed(&self, dimension: usize, positions: &[usize]) -> Result<Self> {
        check_dimension(dimension)?;
        let mut f = AlternatingForm::zero(dimension, self.degree);
        for (t, c) in &self.terms {
            let mapped: Vec<usize> = t.positions().map(|p| positions[p]).collect();
            let mut sorted = mapped.clone();
            sorted.sort_unstable();
            // sign of the permutation that sorts `mapped`
            let mut inv = 0;
            for i in 0..mapped.len() {
                for j in i + 1..mapped.len() {
                    if mapped[i] > mapped[j] {
                        inv += 1;
                    }
                }
            }
            let x = if inv % 2 == 1 { -c.clone() } else { c.clone() };
            f.add_term(IndexTuple::from_positions(sorted), x);
        }
        Ok(f)
    }

    /// Mask of every position used by some term.
    pub fn used_positions(&self) -> u64 {
        self.terms.keys().fold(0, |m, t| m | t.mask())
    }
}

impl Add for &AlternatingForm {
    type Output = AlternatingForm;
    fn add(self, rhs: &AlternatingForm) -> AlternatingForm {
        self.try_add(rhs).expect("adding forms of different shape")
    }
}

impl Sub for &AlternatingForm {
    type Output = AlternatingForm;
    fn sub(self, rhs: &AlternatingForm) -> AlternatingForm {
        self.try_sub(rhs).expect("subtracting forms of different shape")
    }
}

impl Neg for &AlternatingForm {
    type Output = AlternatingForm;
    fn neg(self) -> AlternatingForm {
        self.scaled(&-Q::one())
    }
}

/// Exact subspace of the base space (or its dual), stored as a reduced
/// row-echelon basis so that equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    dual: bool,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: usize, dual: bool, vectors: &[Vec<Q>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: v.len(),
            });
        }
        let (basis, pivots) = linalg::rref(vectors, ambient);
        Ok(Subspace {
            ambient,
            dual,
            basis,
            pivots,
        })
    }

    pub fn span(ambient: usize, vectors: &[Vector]) -> Result<Self> {
        let rows: Mat = vectors.iter().map(|v| v.coords.clone()).collect();
        Subspace::new(ambient, false, &rows)
    }

    /// Span of the dual 1-forms, as a subspace of the dual space.
    pub fn span_forms(ambient: usize, forms: &[AlternatingForm]) -> Result<Self> {
        let rows: Mat = forms.iter().map(|f| f.covector()).collect();
        Subspace::new(ambient, true, &rows)
    }

    pub fn zero(ambient: usize, dual: bool) -> Self {
        Subspace {
            ambient,
            dual,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize, dual: bool) -> Self {
        Subspace {
            ambient,
            dual,
            basis: linalg::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the standard basis vectors with the given 1-based labels.
    pub fn coordinate(ambient: usize, dual: bool, indices: &[usize]) -> Result<Self> {
        let mut rows = Vec::new();
        for &i in indices {
            if i == 0 || i > ambient {
                return Err(Error::InvalidIndex {
                    indices: indices.to_vec(),
                    dimension: ambient,
                });
            }
            let mut r = vec![Q::zero(); ambient];
            r[i - 1] = Q::one();
            rows.push(r);
        }
        Subspace::new(ambient, dual, &rows)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.iter().cloned().map(Vector::new).collect()
    }

    pub fn basis_forms(&self) -> Vec<AlternatingForm> {
        self.basis.iter().map(|r| AlternatingForm::one_form(r)).collect()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        if self.dual != other.dual {
            return Err(Error::precondition(
                "cannot combine a subspace of the base space with one of the dual",
            ));
        }
        Ok(())
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates_of(&self, v: &[Q]) -> Option<Vec<Q>> {
        let coeffs: Vec<Q> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (c, row) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= c * b;
            }
        }
        rest.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        v.len() == self.ambient && self.coordinates_of(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let rows: Mat = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::new(self.ambient, self.dual, &rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// The annihilator, living in the opposite space.
    pub fn annihilator(&self) -> Subspace {
        let ns = linalg::null_space(&self.basis, self.ambient);
        Subspace::new(self.ambient, !self.dual, &ns).expect("null space has ambient length")
    }

    /// Standard basis vectors (as 0-based positions) completing the echelon
    /// basis to a basis of the ambient space.
    pub fn coordinate_complement(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&p| !is_pivot[p]).collect()
    }

    /// Same subspace with the dual flag flipped (identifies `W` with `W**`).
    pub fn reinterpret(&self, dual: bool) -> Subspace {
        let mut s = self.clone();
        s.dual = dual;
        s
    }
}

/// A direct-sum decomposition `W = X ⊕ L`.
#[derive(Clone, Debug)]
pub struct Splitting {
    part_x: Subspace,
    part_l: Subspace,
}

impl Splitting {
    pub fn new(part_x: Subspace, part_l: Subspace) -> Result<Self> {
        part_x.check_compatible(&part_l)?;
        if part_x.dim() + part_l.dim() != part_x.ambient()
            || part_x.sum(&part_l)?.dim() != part_x.ambient()
        {
            return Err(Error::precondition("subspaces are not complementary"));
        }
        Ok(Splitting { part_x, part_l })
    }

    pub fn part_x(&self) -> &Subspace {
        &self.part_x
    }

    pub fn part_l(&self) -> &Subspace {
        &self.part_l
    }

    pub fn ambient(&self) -> usize {
        self.part_x.ambient()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn e(d: usize, idx: &[usize]) -> AlternatingForm {
        AlternatingForm::monomial(d, idx, q(1)).unwrap()
    }

    #[test]
    fn subsets_enumerates_in_lex_order() {
        let s: Vec<Vec<usize>> = subsets(4, 2).into_iter().map(|t| t.indices()).collect();
        assert_eq!(
            s,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(subsets(3, 0).len(), 1);
        assert_eq!(subsets(2, 3).len(), 0);
        assert_eq!(subsets(5, 5).len(), 1);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn index_tuple_validation() {
        assert!(IndexTuple::from_indices(&[1, 3], 3).is_ok());
        assert!(IndexTuple::from_indices(&[3, 1], 3).is_err());
        assert!(IndexTuple::from_indices(&[1, 1], 3).is_err());
        assert!(IndexTuple::from_indices(&[0], 3).is_err());
        assert!(IndexTuple::from_indices(&[4], 3).is_err());
        assert!(IndexTuple::from_indices(&[1], 65).is_err());
    }

    #[test]
    fn wedge_basics() {
        let w = e(2, &[1]).wedge(&e(2, &[2])).unwrap();
        assert_eq!(w, e(2, &[1, 2]));
        assert_eq!(e(2, &[2]).wedge(&e(2, &[1])).unwrap(), -&w);
        // odd degree a ∧ a = 0
        let a = &e(3, &[1]) + &e(3, &[2]);
        assert!(a.wedge(&a).unwrap().is_zero());
        // (e1+e2) ∧ (e1-e2) = -2 e12
        let p = &e(2, &[1]) + &e(2, &[2]);
        let m = &e(2, &[1]) - &e(2, &[2]);
        assert_eq!(p.wedge(&m).unwrap(), e(2, &[1, 2]).scaled(&q(-2)));
        assert!(e(2, &[1]).wedge(&e(3, &[1])).is_err());
        // degree beyond dimension
        assert!(e(2, &[1, 2]).wedge(&e(2, &[1])).unwrap().is_zero());
    }

    #[test]
    fn contraction_signs() {
        let w = e(3, &[1, 2]);
        assert_eq!(w.contract(&Vector::basis(3, 1)).unwrap(), e(3, &[2]));
        assert!(w.contract(&Vector::basis(3, 3)).unwrap().is_zero());
        let f = &e(3, &[1, 2]) + &e(3, &[2, 3]);
        let expected = &e(3, &[3]) - &e(3, &[1]);
        assert_eq!(f.contract(&Vector::basis(3, 2)).unwrap(), expected);
        assert!(AlternatingForm::scalar(3, q(1))
            .contract(&Vector::basis(3, 1))
            .is_err());
    }

    #[test]
    fn multi_contraction_convention() {
        let w = e(2, &[1, 2]);
        let full = w
            .multi_contract(&[Vector::basis(2, 1), Vector::basis(2, 2)])
            .unwrap();
        assert_eq!(full, AlternatingForm::scalar(2, q(1)));
        let rep = w
            .multi_contract(&[Vector::basis(2, 1), Vector::basis(2, 1)])
            .unwrap();
        assert!(rep.is_zero());
        assert_eq!(
            w.evaluate(&[Vector::basis(2, 2), Vector::basis(2, 1)]).unwrap(),
            q(-1)
        );
    }

    #[test]
    fn pullback_by_swap_and_identity() {
        let w = e(2, &[1, 2]);
        let swap = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(w.pullback(&swap, 2).unwrap(), -&w);
        assert_eq!(w.pullback(&linalg::identity(2), 2).unwrap(), w);
        let scale = vec![vec![qf(1, 2), q(0)], vec![q(0), q(3)]];
        assert_eq!(w.pullback(&scale, 2).unwrap(), w.scaled(&qf(3, 2)));
        assert!(w.pullback(&swap, 3).is_err());
    }

    #[test]
    fn embed_tracks_permutation_sign() {
        let w = e(2, &[1, 2]);
        let emb = w.embed(3, &[2, 0]).unwrap();
        assert_eq!(emb, -&e(3, &[1, 3]));
    }

    #[test]
    fn subspace_lattice() {
        let s1 = Subspace::coordinate(3, false, &[1]).unwrap();
        let s2 = Subspace::coordinate(3, false, &[2]).unwrap();
        assert_eq!(s1.sum(&s2).unwrap(), Subspace::coordinate(3, false, &[1, 2]).unwrap());
        let a = Subspace::coordinate(3, false, &[1, 2]).unwrap();
        let b = Subspace::coordinate(3, false, &[2, 3]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), s2);
        assert_eq!(a.annihilator(), Subspace::coordinate(3, true, &[3]).unwrap());
        assert_eq!(Subspace::zero(3, false).annihilator(), Subspace::full(3, true));
        assert!(s1.sum(&s1.annihilator()).is_err());
    }

    #[test]
    fn splitting_requires_complement() {
        let x = Subspace::coordinate(3, false, &[1]).unwrap();
        let l = Subspace::coordinate(3, false, &[2, 3]).unwrap();
        assert!(Splitting::new(x.clone(), l).is_ok());
        let bad = Subspace::coordinate(3, false, &[1, 2]).unwrap();
        assert!(Splitting::new(x, bad).is_err());
    }
}
