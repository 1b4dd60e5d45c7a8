//! Complementary n-isotropic subspaces, the index count 𝔑, canonical
//! representations and the relation checkers for canonical and
//! maximal-dimension isotropic subspaces.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::{
    self, basis_columns, classify_isotropy, decomposable_basis_search, is_decomposable, kernel,
    LengthBounds, LowerBoundSource,
};
use crate::error::{Error, Result};
use crate::exterior::{binomial, subsets, AlternatingForm, IndexTuple, Subspace, Vector};
use crate::linalg::{self, Mat};
use crate::rational::Q;
use crate::search::{self, SearchBudget};

/// A vertical subspace `V ⊇ L` that is `r`-isotropic.
#[derive(Clone, Debug)]
pub struct VerticalData {
    pub v: Subspace,
    pub r: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementMethod {
    /// Induction on `dim L`, falling back to the linear solve.
    Auto,
    Inductive,
    LinearSolve,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementChecks {
    pub direct_sum: bool,
    pub n_isotropic: bool,
    /// `(F ∩ V) ⊕ L = V`, when `V` is given.
    pub v_splitting: Option<bool>,
    /// `F ∩ V` is `(r−1)`-isotropic, when `V` is given.
    pub v_isotropic: Option<bool>,
}

impl ComplementChecks {
    pub fn all_hold(&self) -> bool {
        self.direct_sum
            && self.n_isotropic
            && self.v_splitting != Some(false)
            && self.v_isotropic != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct ComplementResult {
    pub f: Subspace,
    pub f_basis: Vec<Vector>,
    pub checks: ComplementChecks,
    pub method: ComplementMethod,
}

/// Verifies `L` is maximal isotropic decomposable and returns a decomposable
/// basis of it.
pub fn certify_maximal_isotropic_decomposable(
    omega: &AlternatingForm,
    l: &Subspace,
    budget: &SearchBudget,
) -> Result<Vec<Vector>> {
    if omega.degree() < 2 {
        return Err(Error::DegreeOutOfRange {
            degree: omega.degree(),
            reason: "isotropic decomposable subspaces need deg ω ≥ 2".into(),
        });
    }
    let rep = classify_isotropy(l, omega, 1)?;
    if !rep.is_maximal {
        return Err(Error::precondition("L is not maximal 1-isotropic"));
    }
    let search = decomposable_basis_search(l, omega, budget)?;
    search
        .basis
        .ok_or_else(|| Error::precondition("no decomposable basis of L found within the search budget"))
}

fn check_vertical(omega: &AlternatingForm, l: &Subspace, vd: &VerticalData) -> Result<()> {
    if vd.r == 0 || vd.r > omega.degree() {
        return Err(Error::DegreeOutOfRange {
            degree: vd.r,
            reason: format!("r must lie in 1..={}", omega.degree()),
        });
    }
    if !vd.v.contains_subspace(l) {
        return Err(Error::precondition("L is not contained in V"));
    }
    if !classify_isotropy(&vd.v, omega, vd.r)?.is_k_isotropic {
        return Err(Error::precondition(format!("V is not {}-isotropic", vd.r)));
    }
    Ok(())
}

/// Exact verification of every postcondition of a complement.
pub fn verify_complement(
    omega: &AlternatingForm,
    l: &Subspace,
    f_basis: &[Vector],
    vertical: Option<&VerticalData>,
) -> Result<ComplementChecks> {
    let d = omega.dimension();
    let f = Subspace::span(d, f_basis)?;
    let direct_sum = f.dim() == f_basis.len() && f.dim() + l.dim() == d && f.sum(l)?.dim() == d;
    let restricted = omega.pullback(&basis_columns(f_basis, d), f_basis.len())?;
    let n_isotropic = restricted.is_zero();
    let (v_splitting, v_isotropic) = match vertical {
        None => (None, None),
        Some(vd) => {
            let fv = f.intersect(&vd.v)?;
            let split = fv.dim() + l.dim() == vd.v.dim() && fv.sum(l)? == vd.v;
            let iso = classify_isotropy(&fv, omega, vd.r - 1)?.is_k_isotropic;
            (Some(split), Some(iso))
        }
    };
    Ok(ComplementChecks {
        direct_sum,
        n_isotropic,
        v_splitting,
        v_isotropic,
    })
}

/// An `n`-isotropic complement `F` of a maximal isotropic decomposable `L`
/// (with `(F ∩ V) ⊕ L = V` and `F ∩ V` `(r−1)`-isotropic when `V` is given).
///
/// Every returned complement has had its postconditions checked exactly.
pub fn complement_n_isotropic(
    omega: &AlternatingForm,
    l: &Subspace,
    vertical: Option<&VerticalData>,
    method: ComplementMethod,
    budget: &SearchBudget,
) -> Result<ComplementResult> {
    let lbasis = certify_maximal_isotropic_decomposable(omega, l, budget)?;
    if let Some(vd) = vertical {
        check_vertical(omega, l, vd)?;
    }
    let mut attempts = Vec::new();
    if matches!(method, ComplementMethod::Auto | ComplementMethod::Inductive) {
        attempts.push(ComplementMethod::Inductive);
    }
    if matches!(method, ComplementMethod::Auto | ComplementMethod::LinearSolve) {
        attempts.push(ComplementMethod::LinearSolve);
    }
    for m in attempts {
        let candidate = match m {
            ComplementMethod::Inductive => inductive_complement(omega, &lbasis)?,
            _ => linear_solve_complement(omega, l, vertical)?,
        };
        let Some(f_basis) = candidate else { continue };
        let checks = verify_complement(omega, l, &f_basis, vertical)?;
        if checks.all_hold() {
            return Ok(ComplementResult {
                f: Subspace::span(omega.dimension(), &f_basis)?,
                f_basis,
                checks,
                method: m,
            });
        }
    }
    Err(Error::SearchExhausted(
        "no complement satisfying every postcondition was found".into(),
    ))
}

/// Projects `v` along the (echelon) subspace `k` onto the coordinate
/// complement of `k`, returning the coordinates at `positions`.
fn project_along(v: &Vector, k: &Subspace, positions: &[usize]) -> Vec<Q> {
    let mut w = v.coords.clone();
    for (row, &p) in k.basis().iter().zip(k.pivots()) {
        let c = w[p].clone();
        if c.is_zero() {
            continue;
        }
        for (x, y) in w.iter_mut().zip(row) {
            *x -= &c * y;
        }
    }
    positions.iter().map(|&p| w[p].clone()).collect()
}

fn independent_subset(vs: Vec<Vector>, d: usize) -> Vec<Vector> {
    let mut rows: Mat = Vec::new();
    let mut out = Vec::new();
    for v in vs {
        rows.push(v.coords.clone());
        if linalg::rank(&rows, d) == rows.len() {
            out.push(v);
        } else {
            rows.pop();
        }
    }
    out
}

/// The inductive construction: peel off one decomposable vector `v₀` of
/// `L`, split `ω = ω₁ + α₀ ∧ u¹ ∧ … ∧ uⁿ`, keep `ker ω₁ ∩ ker α₀` in `F` and
/// recurse on `W₁ = ker α₀ ∩ ker ũ¹ … ũˢ` with `L₁ = L ∩ ker α₀`.
///
/// Returns `None` when a step cannot be carried out (the caller falls back).
fn inductive_complement(omega: &AlternatingForm, lbasis: &[Vector]) -> Result<Option<Vec<Vector>>> {
    let d = omega.dimension();
    if lbasis.is_empty() {
        return Ok((d == 0).then(Vec::new));
    }
    if omega.degree() < 2 {
        return Ok(None);
    }
    let ker = kernel(omega)?;
    if ker.dim() > 0 {
        let lspan = Subspace::span(d, lbasis)?;
        if !lspan.contains_subspace(&ker) {
            return Ok(None);
        }
        let positions = ker.coordinate_complement();
        let embed: Vec<Vector> = positions.iter().map(|&p| Vector::basis(d, p + 1)).collect();
        let reduced = omega.pullback(&basis_columns(&embed, d), positions.len())?;
        let projected: Vec<Vector> = lbasis
            .iter()
            .map(|v| Vector::new(project_along(v, &ker, &positions)))
            .filter(|v| !v.is_zero())
            .collect();
        let projected = independent_subset(projected, positions.len());
        let Some(sub) = inductive_complement(&reduced, &projected)? else {
            return Ok(None);
        };
        return Ok(Some(sub.iter().map(|f| lift(f, &embed, d)).collect()));
    }

    let v0 = &lbasis[0];
    let rows: Mat = lbasis.iter().map(|v| v.coords.clone()).collect();
    let mut delta = vec![Q::zero(); lbasis.len()];
    delta[0] = Q::one();
    let Some(alpha0) = linalg::solve(&rows, &delta, d) else {
        return Ok(None);
    };
    let alpha0_form = AlternatingForm::one_form(&alpha0);
    let Some(factors) = is_decomposable(&omega.contract(v0)?).factors else {
        return Ok(None);
    };
    let big_u = analysis::wedge_all(&factors, d);
    let omega1 = omega.try_sub(&alpha0_form.wedge(&big_u)?)?;

    let ker_alpha0 = Subspace::new(d, true, std::slice::from_ref(&alpha0))?.annihilator();
    let k1 = kernel(&omega1)?.intersect(&ker_alpha0)?;
    let us = k1.basis_vectors();
    // ũ^j ∈ span(u¹..uⁿ) with ũ^j(u_i) = δ
    let covs: Mat = factors.iter().map(|f| f.covector()).collect();
    let pairing: Mat = us
        .iter()
        .map(|u| covs.iter().map(|c| linalg::dot(c, &u.coords)).collect())
        .collect();
    let mut duals: Mat = vec![alpha0];
    for j in 0..us.len() {
        let mut e = vec![Q::zero(); us.len()];
        e[j] = Q::one();
        let Some(c) = linalg::solve(&pairing, &e, covs.len()) else {
            return Ok(None);
        };
        let mut dual = vec![Q::zero(); d];
        for (cj, cov) in c.iter().zip(&covs) {
            for (x, y) in dual.iter_mut().zip(cov) {
                *x += cj * y;
            }
        }
        duals.push(dual);
    }
    let w1: Vec<Vector> = linalg::null_space(&duals, d).into_iter().map(Vector::new).collect();
    let w1_space = Subspace::span(d, &w1)?;
    let w1_mat = basis_columns(&w1, d);
    let mut l1 = Vec::new();
    for v in &lbasis[1..] {
        if !w1_space.contains(&v.coords) {
            return Ok(None);
        }
        // coordinates of v in the (non-echelon) basis w1
        let Some(c) = linalg::solve(&w1_mat, &v.coords, w1.len()) else {
            return Ok(None);
        };
        l1.push(Vector::new(c));
    }
    let omega1_w1 = omega1.pullback(&w1_mat, w1.len())?;
    if !l1.is_empty() {
        let l1_space = Subspace::span(w1.len(), &l1)?;
        if !classify_isotropy(&l1_space, &omega1_w1, 1)?.is_maximal {
            return Ok(None);
        }
    }
    let Some(sub) = inductive_complement(&omega1_w1, &l1)? else {
        return Ok(None);
    };
    let mut f = us;
    f.extend(sub.iter().map(|x| lift(x, &w1, d)));
    Ok(Some(f))
}

fn lift(coords: &Vector, basis: &[Vector], d: usize) -> Vector {
    let mut v = Vector::zero(d);
    for (c, b) in coords.coords.iter().zip(basis) {
        if !c.is_zero() {
            v = v.add(&b.scaled(c));
        }
    }
    v
}

/// Extends `base` to span `target` using vectors from `candidates`.
fn extend_with(base: &[Vector], candidates: &[Vector], target_dim: usize, d: usize) -> Vec<Vector> {
    let mut rows: Mat = base.iter().map(|v| v.coords.clone()).collect();
    let mut out = Vec::new();
    for c in candidates {
        if rows.len() == target_dim {
            break;
        }
        rows.push(c.coords.clone());
        if linalg::rank(&rows, d) == rows.len() {
            out.push(c.clone());
        } else {
            rows.pop();
        }
    }
    out
}

/// `F` as the graph of a linear map `C → L` over a complement `C` of `L`.
///
/// Since `L` is 1-isotropic, every evaluation of `ω` on vectors
/// `c_j + Σ a_ij l_i` is affine in the unknowns `a_ij`, so the isotropy
/// conditions form a linear system.
fn linear_solve_complement(
    omega: &AlternatingForm,
    l: &Subspace,
    vertical: Option<&VerticalData>,
) -> Result<Option<Vec<Vector>>> {
    let d = omega.dimension();
    let deg = omega.degree();
    let lb = l.basis_vectors();
    let standard: Vec<Vector> = (1..=d).map(|i| Vector::basis(d, i)).collect();
    let mut c_basis = Vec::new();
    let mut n_vertical = 0;
    if let Some(vd) = vertical {
        c_basis = extend_with(&lb, &vd.v.basis_vectors(), vd.v.dim(), d);
        n_vertical = c_basis.len();
    }
    let mut base: Vec<Vector> = lb.clone();
    base.extend(c_basis.iter().cloned());
    c_basis.extend(extend_with(&base, &standard, d, d));
    let (m, c) = (lb.len(), c_basis.len());
    let nvars = m * c;

    enum Slot<'a> {
        Var(usize),
        Fixed(&'a Vector),
    }
    let mut rows: Mat = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    let mut affine = |slots: &[Slot]| -> Result<()> {
        let base: Vec<Vector> = slots
            .iter()
            .map(|s| match s {
                Slot::Var(j) => c_basis[*j].clone(),
                Slot::Fixed(v) => (*v).clone(),
            })
            .collect();
        let constant = omega.evaluate(&base)?;
        let mut row = vec![Q::zero(); nvars];
        for (pos, s) in slots.iter().enumerate() {
            if let Slot::Var(j) = s {
                for (i, li) in lb.iter().enumerate() {
                    let mut vs = base.clone();
                    vs[pos] = li.clone();
                    row[i * c + j] += omega.evaluate(&vs)?;
                }
            }
        }
        if row.iter().all(Zero::is_zero) {
            if !constant.is_zero() {
                rows.push(row);
                rhs.push(-constant);
            }
        } else {
            rows.push(row);
            rhs.push(-constant);
        }
        Ok(())
    };
    for t in subsets(c, deg) {
        let slots: Vec<Slot> = t.positions().map(Slot::Var).collect();
        affine(&slots)?;
    }
    if let Some(vd) = vertical {
        for t in subsets(n_vertical, vd.r) {
            for rest in subsets(d, deg - vd.r) {
                let mut slots: Vec<Slot> = t.positions().map(Slot::Var).collect();
                slots.extend(rest.positions().map(|p| Slot::Fixed(&standard[p])));
                affine(&slots)?;
            }
        }
    }
    let Some(a) = linalg::solve(&rows, &rhs, nvars) else {
        return Ok(None);
    };
    let f = (0..c)
        .map(|j| {
            let mut v = c_basis[j].clone();
            for (i, li) in lb.iter().enumerate() {
                let x = &a[i * c + j];
                if !x.is_zero() {
                    v = v.add(&li.scaled(x));
                }
            }
            v
        })
        .collect();
    Ok(Some(f))
}

#[derive(Clone, Debug)]
pub struct DualFrame {
    /// Decomposable `v ∈ L` with `ω(v, f₁, …, fₙ) = 1`.
    pub v: Vector,
    pub forms: Vec<AlternatingForm>,
    /// `f¹ ∧ … ∧ fⁿ = i_v ω`, hence lies in `ω♭(L)`.
    pub wedge_in_image: bool,
}

/// Dual 1-forms `f¹..fⁿ` with `f^j(f_i) = δ` and `f¹∧…∧fⁿ ∈ ω♭(L)`.
pub fn dual_frame(
    omega: &AlternatingForm,
    l: &Subspace,
    fs: &[Vector],
    budget: &SearchBudget,
) -> Result<DualFrame> {
    let n = omega.degree().saturating_sub(1);
    if fs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: fs.len(),
        });
    }
    let lbasis = certify_maximal_isotropic_decomposable(omega, l, budget)?;
    let mut chosen = None;
    for v in &lbasis {
        let mut args = vec![v.clone()];
        args.extend(fs.iter().cloned());
        let x = omega.evaluate(&args)?;
        if !x.is_zero() {
            chosen = Some(v.scaled(&(Q::one() / x)));
            break;
        }
    }
    let v = chosen.ok_or_else(|| {
        Error::precondition("the contraction of ω with f₁..fₙ annihilates L")
    })?;
    let iv = omega.contract(&v)?;
    let covs: Mat = analysis::support(&iv).basis().clone();
    // f^j = Σ_k C[j][k] s^k with Σ_k C[j][k] s^k(f_i) = δ_ij
    let pairing: Mat = covs
        .iter()
        .map(|s| fs.iter().map(|f| linalg::dot(s, &f.coords)).collect())
        .collect();
    let inv = linalg::inverse(&linalg::transpose(&pairing, n))
        .ok_or_else(|| Error::Internal("f₁..fₙ are not independent modulo ker i_v ω".into()))?;
    let d = omega.dimension();
    let forms: Vec<AlternatingForm> = inv
        .iter()
        .map(|row| {
            let mut cov = vec![Q::zero(); d];
            for (c, s) in row.iter().zip(&covs) {
                for (x, y) in cov.iter_mut().zip(s) {
                    *x += c * y;
                }
            }
            AlternatingForm::one_form(&cov)
        })
        .collect();
    for (j, fj) in forms.iter().enumerate() {
        for (i, fi) in fs.iter().enumerate() {
            let expected = if i == j { Q::one() } else { Q::zero() };
            if fj.evaluate(std::slice::from_ref(fi))? != expected {
                return Err(Error::Internal("dual frame is not dual".into()));
            }
        }
    }
    let wedge_in_image = analysis::wedge_all(&forms, d) == iv;
    if !wedge_in_image {
        return Err(Error::Internal("f¹∧…∧fⁿ differs from i_v ω".into()));
    }
    Ok(DualFrame {
        v,
        forms,
        wedge_in_image,
    })
}

fn check_complement_basis(l: &Subspace, f_basis: &[Vector]) -> Result<()> {
    let d = l.ambient();
    if f_basis.iter().any(|f| f.dimension() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f_basis.iter().map(Vector::dimension).find(|&x| x != d).unwrap_or(0),
        });
    }
    let f = Subspace::span(d, f_basis)?;
    if f.dim() != f_basis.len() || f.dim() + l.dim() != d || f.sum(l)?.dim() != d {
        return Err(Error::precondition("the given vectors do not span a complement of L"));
    }
    Ok(())
}

/// `ℑ^{𝔅_F}` and `𝔑(𝔅_F)`: the n-subsets of the basis whose contraction with
/// `ω` is nonzero.
pub fn index_count(
    omega: &AlternatingForm,
    l: &Subspace,
    f_basis: &[Vector],
) -> Result<(Vec<IndexTuple>, usize)> {
    check_complement_basis(l, f_basis)?;
    let n = omega.degree().saturating_sub(1);
    let mut idx = Vec::new();
    for t in subsets(f_basis.len(), n) {
        let vs: Vec<Vector> = t.positions().map(|p| f_basis[p].clone()).collect();
        if !omega.multi_contract(&vs)?.is_zero() {
            idx.push(t);
        }
    }
    let count = idx.len();
    Ok((idx, count))
}

/// Counts `𝔑` for bases `g · M` with small integer `M`, using integer
/// minors. The contraction `i_{f_I} ω` is nonzero iff it is nonzero on some
/// basis vector `l_a` of `L`, and `ω(l_a, (gM)_I) = Σ_J ω(l_a, g_J) det M_{J,I}`.
struct MinorCounter {
    n: usize,
    dim_f: usize,
    rows: Vec<Vec<(u64, i128)>>,
}

impl MinorCounter {
    fn new(omega: &AlternatingForm, lbasis: &[Vector], g: &[Vector]) -> Result<Option<Self>> {
        let d = omega.dimension();
        let cols = basis_columns(g, d);
        let mut rows = Vec::new();
        for l in lbasis {
            let beta = omega.contract(l)?.pullback(&cols, g.len())?;
            let denom = crate::rational::common_denominator(beta.terms().map(|(_, c)| c));
            let mut row = Vec::new();
            for (t, c) in beta.terms() {
                let scaled = c.numer() * (&denom / c.denom());
                let Some(x) = scaled.to_i128() else { return Ok(None) };
                row.push((t.mask(), x));
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
        Ok(Some(MinorCounter {
            n: omega.degree() - 1,
            dim_f: g.len(),
            rows,
        }))
    }
}

/// Fraction-free (Bareiss) determinant of a small integer minor; `None` on
/// overflow or when a pivot column is entirely zero.
fn minor_det(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> Option<i128> {
    let k = rows.len();
    if k == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..k {
        if a[i][i] == 0 {
            let p = (i + 1..k).find(|&r| a[r][i] != 0)?;
            a.swap(i, p);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                let x = a[r][c].checked_mul(a[i][i])?.checked_sub(a[r][i].checked_mul(a[i][c])?)?;
                a[r][c] = x / prev;
            }
        }
        prev = a[i][i];
    }
    Some(sign * a[k - 1][k - 1])
}

// `minor_det` returns `None` for a zero pivot column, which means a zero
// determinant; distinguish that from overflow.
fn minor_det_or_zero(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> Option<i128> {
    match minor_det(m, rows, cols) {
        Some(x) => Some(x),
        None => {
            let q: Mat = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| crate::rational::q(m[r][c])).collect())
                .collect();
            let det = linalg::det(&q);
            if det.is_zero() {
                Some(0)
            } else {
                None
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NlStage {
    Standard,
    CoordinateAligned,
    HillClimb,
    Random,
}

#[derive(Clone, Debug, Serialize)]
pub struct NlResult {
    /// `𝔑` of the echelon basis of `F`.
    pub count_standard: usize,
    pub best_count: usize,
    /// `dim(L / ker ω)`.
    pub floor: usize,
    pub certified_zero_gap: bool,
    /// `best_count − floor`, an upper bound on `𝔑_L`.
    pub value_upper: usize,
    /// Lower bound on `𝔑_L`: 0, raised by `𝔑(𝔅_F) ≥ ℓ(ω)`.
    pub value_lower: usize,
    pub length_lower_bound: usize,
    pub bases_tried: usize,
    pub witness_stage: NlStage,
    #[serde(skip)]
    pub witness_basis: Vec<Vector>,
}

/// Budgeted computation of `𝔑_L = min 𝔑(𝔅_F) − dim(L/ker ω)`.
///
/// Candidates: the echelon basis of `F`, the projection of standard vectors
/// onto `F` along `L`, greedy elementary moves `f_i += c f_j`, and
/// `budget.random_trials` seeded integer changes of basis.
pub fn frak_n_l(
    omega: &AlternatingForm,
    l: &Subspace,
    f: &Subspace,
    budget: &SearchBudget,
) -> Result<NlResult> {
    let d = omega.dimension();
    let standard_basis = f.basis_vectors();
    check_complement_basis(l, &standard_basis)?;
    let floor = l.dim() - kernel(omega)?.dim();
    let length_lower = analysis::length_lower_bound(omega).0;
    let (_, count_standard) = index_count(omega, l, &standard_basis)?;

    // standard vectors outside L, projected onto F along L
    let mut aligned = Vec::new();
    let lf_basis: Vec<Vector> = l.basis_vectors().into_iter().chain(standard_basis.iter().cloned()).collect();
    let lf = basis_columns(&lf_basis, d);
    for p in l.coordinate_complement() {
        let e = Vector::basis(d, p + 1);
        let c = linalg::solve(&lf, &e.coords, d).expect("L ⊕ F = W");
        aligned.push(lift(&Vector::new(c[l.dim()..].to_vec()), &standard_basis, d));
    }
    let (_, count_aligned) = index_count(omega, l, &aligned)?;

    let (mut best, mut stage, g) = if count_aligned < count_standard {
        (count_aligned, NlStage::CoordinateAligned, aligned)
    } else {
        (count_standard, NlStage::Standard, standard_basis)
    };
    let dim_f = g.len();
    let mut best_m: Vec<Vec<i64>> = (0..dim_f)
        .map(|i| (0..dim_f).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut tried = 2;

    let lbasis = l.basis_vectors();
    let counter = MinorCounter::new(omega, &lbasis, &g)?;
    let count_m = |m: &[Vec<i64>]| -> Result<usize> {
        if let Some(c) = counter.as_ref().and_then(|c| c.count_checked(m)) {
            return Ok(c);
        }
        let basis = apply_int(&g, m, d);
        Ok(index_count(omega, l, &basis)?.1)
    };

    let bound = budget.coeff_bound.max(1);
    if best > floor && dim_f > 1 {
        'climb: for _sweep in 0..20 {
            let mut improved = false;
            for i in 0..dim_f {
                for j in 0..dim_f {
                    if i == j {
                        continue;
                    }
                    for c in (-bound..=bound).filter(|&c| c != 0) {
                        let mut m = best_m.clone();
                        for row in m.iter_mut() {
                            row[i] += c * row[j];
                        }
                        tried += 1;
                        let k = count_m(&m)?;
                        if k < best {
                            best = k;
                            best_m = m;
                            stage = NlStage::HillClimb;
                            improved = true;
                            if best <= floor {
                                break 'climb;
                            }
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let mut rng = budget.rng();
    for _ in 0..budget.random_trials {
        if best <= floor {
            break;
        }
        let mq = search::random_invertible(&mut rng, dim_f, bound);
        let m: Vec<Vec<i64>> = mq
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer().to_i64().expect("small")).collect())
            .collect();
        tried += 1;
        let k = count_m(&m)?;
        if k < best {
            best = k;
            best_m = m;
            stage = NlStage::Random;
        }
    }
    let witness = apply_int(&g, &best_m, d);
    debug_assert_eq!(index_count(omega, l, &witness)?.1, best);
    if best < floor {
        return Err(Error::Internal(format!(
            "basis with 𝔑 = {best} below dim(L/ker ω) = {floor}"
        )));
    }
    Ok(NlResult {
        count_standard,
        best_count: best,
        floor,
        certified_zero_gap: best == floor,
        value_upper: best - floor,
        value_lower: if best == floor { 0 } else { length_lower.saturating_sub(floor) },
        length_lower_bound: length_lower,
        bases_tried: tried,
        witness_stage: stage,
        witness_basis: witness,
    })
}

impl MinorCounter {
    /// `None` on i128 overflow.
    fn count_checked(&self, m: &[Vec<i64>]) -> Option<usize> {
        let mut cache: HashMap<(u64, u64), i128> = HashMap::new();
        let mut total = 0;
        for t in subsets(self.dim_f, self.n) {
            let cols: Vec<usize> = t.positions().collect();
            let mut nonzero = false;
            for row in &self.rows {
                let mut s: i128 = 0;
                for &(jm, c) in row {
                    let key = (jm, t.mask());
                    let minor = match cache.get(&key) {
                        Some(&x) => x,
                        None => {
                            let rws: Vec<usize> = IndexTuple::from_mask(jm).positions().collect();
                            let x = minor_det_or_zero(m, &rws, &cols)?;
                            cache.insert(key, x);
                            x
                        }
                    };
                    s = s.checked_add(c.checked_mul(minor)?)?;
                }
                if s != 0 {
                    nonzero = true;
                    break;
                }
            }
            total += usize::from(nonzero);
        }
        Some(total)
    }
}

fn apply_int(g: &[Vector], m: &[Vec<i64>], d: usize) -> Vec<Vector> {
    (0..g.len())
        .map(|j| {
            let mut v = Vector::zero(d);
            for (i, gi) in g.iter().enumerate() {
                if m[i][j] != 0 {
                    v = v.add(&gi.scaled(&crate::rational::q(m[i][j])));
                }
            }
            v
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CanonicalRep {
    pub l_basis: Vec<Vector>,
    pub f_basis: Vec<Vector>,
    /// `e^i`: dual to `f_basis`, vanishing on `L`.
    pub dual_forms: Vec<AlternatingForm>,
    /// `(ī, ê_ī)` for `ī ∈ ℑ^{𝔅_F}`, in lexicographic order.
    pub hat_forms: Vec<(IndexTuple, AlternatingForm)>,
    /// `ω = sign · Σ ê_ī ∧ e^{i₁} ∧ … ∧ e^{iₙ}`.
    pub sign: i8,
    /// `ℓ(ω) = |ℑ^{𝔅_F}|`, realized by `length_witness`.
    pub length: usize,
    pub length_witness: Vec<Vector>,
}

impl CanonicalRep {
    pub fn index_set(&self) -> Vec<IndexTuple> {
        self.hat_forms.iter().map(|(t, _)| *t).collect()
    }

    pub fn reconstruct(&self) -> AlternatingForm {
        let d = self.l_basis.first().or(self.f_basis.first()).map_or(0, Vector::dimension);
        let mut sum: Option<AlternatingForm> = None;
        for (t, hat) in &self.hat_forms {
            let mut term = hat.clone();
            for p in t.positions() {
                term = term.wedge(&self.dual_forms[p]).expect("same dimension");
            }
            sum = Some(match sum {
                None => term,
                Some(s) => s.try_add(&term).expect("same shape"),
            });
        }
        let sum = sum.unwrap_or_else(|| AlternatingForm::zero(d, self.degree()));
        if self.sign < 0 {
            -&sum
        } else {
            sum
        }
    }

    fn degree(&self) -> usize {
        self.hat_forms.first().map_or(0, |(t, _)| t.len() + 1)
    }
}

/// Writes `ω = ± Σ ê_ī ∧ e^{i₁}∧…∧e^{iₙ}` with `ê_ī = i_{f_{i₁}…f_{iₙ}} ω`
/// on a basis of `F` realizing `𝔑 = dim(L/ker ω)`.
pub fn canonical_representation(
    omega: &AlternatingForm,
    l: &Subspace,
    f_basis: &[Vector],
) -> Result<CanonicalRep> {
    let d = omega.dimension();
    let (index_set, count) = index_count(omega, l, f_basis)?;
    let floor = l.dim() - kernel(omega)?.dim();
    if count != floor {
        return Err(Error::precondition(format!(
            "the basis has 𝔑 = {count}, not dim(L/ker ω) = {floor}; 𝔑_L is not certified zero"
        )));
    }
    if !verify_complement(omega, l, f_basis, None)?.all_hold() {
        return Err(Error::precondition("F is not an n-isotropic complement of L"));
    }
    let l_basis = l.basis_vectors();
    let full: Vec<Vector> = l_basis.iter().chain(f_basis).cloned().collect();
    // rows of B^{-1}, where B has the basis as columns, are the dual covectors
    let binv = linalg::inverse(&basis_columns(&full, d))
        .ok_or_else(|| Error::Internal("L ⊕ F basis is singular".into()))?;
    let dual_forms: Vec<AlternatingForm> = binv[l_basis.len()..]
        .iter()
        .map(|r| AlternatingForm::one_form(r))
        .collect();
    let mut hat_forms = Vec::new();
    for t in &index_set {
        let vs: Vec<Vector> = t.positions().map(|p| f_basis[p].clone()).collect();
        hat_forms.push((*t, omega.multi_contract(&vs)?));
    }
    let mut rep = CanonicalRep {
        l_basis,
        f_basis: f_basis.to_vec(),
        dual_forms,
        hat_forms,
        sign: 1,
        length: count,
        length_witness: Vec::new(),
    };
    if rep.hat_forms.is_empty() {
        if !omega.is_zero() {
            return Err(Error::Internal("empty index set for a nonzero form".into()));
        }
    } else if rep.reconstruct() != *omega {
        rep.sign = -1;
        if rep.reconstruct() != *omega {
            return Err(Error::Internal("canonical reconstruction does not equal ω".into()));
        }
    }
    // ê's: independent and in F^⊥
    let hats: Mat = rep.hat_forms.iter().map(|(_, h)| h.covector()).collect();
    if linalg::rank(&hats, d) != hats.len() {
        return Err(Error::Internal("the ê forms are linearly dependent".into()));
    }
    for h in &hats {
        if f_basis.iter().any(|f| !linalg::dot(h, &f.coords).is_zero()) {
            return Err(Error::Internal("an ê form does not vanish on F".into()));
        }
    }
    // length witness: dual basis {ê's, completion inside F^⊥, e^i}
    let f_perp = Subspace::span(d, f_basis)?.annihilator();
    let mut covs = hats.clone();
    for r in f_perp.basis() {
        covs.push(r.clone());
        if linalg::rank(&covs, d) < covs.len() {
            covs.pop();
        }
    }
    covs.extend(rep.dual_forms.iter().map(|f| f.covector()));
    let witness = analysis::vector_basis_dual_to(&covs, d)
        .ok_or_else(|| Error::Internal("length witness basis is singular".into()))?;
    let len = analysis::relative_length(omega, &witness)?;
    if len != count {
        return Err(Error::Internal(format!("length witness gives {len}, expected {count}")));
    }
    rep.length_witness = witness;
    Ok(rep)
}

/// Length certified through the isotropic structure: for `L` maximal
/// isotropic decomposable with `𝔑_L = 0`, `ℓ(ω) = dim(L/ker ω)`.
pub fn structural_length(
    omega: &AlternatingForm,
    l: &Subspace,
    budget: &SearchBudget,
) -> Result<Option<LengthBounds>> {
    let comp = complement_n_isotropic(omega, l, None, ComplementMethod::Auto, budget)?;
    let nl = frak_n_l(omega, l, &comp.f, budget)?;
    if !nl.certified_zero_gap {
        return Ok(None);
    }
    let rep = canonical_representation(omega, l, &nl.witness_basis)?;
    let analytic = analysis::length_lower_bound(omega);
    let lower = if analytic.0 > rep.length {
        return Err(Error::Internal("analytic length bound exceeds the structural length".into()));
    } else {
        (rep.length, LowerBoundSource::IsotropicStructure)
    };
    Ok(Some(LengthBounds {
        lower: lower.0,
        upper: rep.length,
        certified: true,
        lower_source: lower.1,
        witness_basis: Some(rep.length_witness),
    }))
}

/// `[ω′]_L = [ω]_L`, i.e. `i_v (ω′ − ω) = 0` for every `v ∈ L`. When it holds
/// and `L` is maximal isotropic decomposable for `ω`, the same is re-checked
/// for `ω′`.
pub fn principal_class_check(
    omega: &AlternatingForm,
    omega_prime: &AlternatingForm,
    l: &Subspace,
    budget: &SearchBudget,
) -> Result<bool> {
    let diff = omega_prime.try_sub(omega)?;
    for v in l.basis_vectors() {
        if !diff.contract(&v)?.is_zero() {
            return Ok(false);
        }
    }
    if omega.degree() >= 2
        && certify_maximal_isotropic_decomposable(omega, l, budget).is_ok()
        && certify_maximal_isotropic_decomposable(omega_prime, l, budget).is_err()
    {
        return Err(Error::Internal(
            "L lost maximal isotropic decomposability within its principal class".into(),
        ));
    }
    Ok(true)
}

/// Rank of a family of forms of equal degree.
pub fn forms_rank(forms: &[AlternatingForm]) -> usize {
    let keys: BTreeSet<IndexTuple> = forms.iter().flat_map(|f| f.terms().map(|(t, _)| t)).collect();
    let keys: Vec<IndexTuple> = keys.into_iter().collect();
    let rows: Mat = forms.iter().map(|f| keys.iter().map(|t| f.coeff(*t)).collect()).collect();
    linalg::rank(&rows, keys.len())
}

/// `ω♭(L)`: the contractions of `ω` with a basis of `L`.
pub fn flat_image(omega: &AlternatingForm, l: &Subspace) -> Result<Vec<AlternatingForm>> {
    l.basis_vectors().iter().map(|v| omega.contract(v)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxDimRelation {
    pub isotropic: bool,
    pub image_dim: usize,
    /// `dim Λⁿ L^⊥ = C(d − dim L, n)`.
    pub target_dim: usize,
    pub kernel_dim: usize,
    /// `dim L = dim ker ω + C(N+n, n)`.
    pub dimension_side: bool,
    /// `ω♭(L) = Λⁿ L^⊥`.
    pub image_side: bool,
    pub holds: bool,
}

pub fn check_max_dim_relation(omega: &AlternatingForm, l: &Subspace) -> Result<MaxDimRelation> {
    let d = omega.dimension();
    if omega.degree() == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            reason: "contraction needs deg ω ≥ 1".into(),
        });
    }
    let n = omega.degree() - 1;
    let isotropic = classify_isotropy(l, omega, 1.min(n))?.is_k_isotropic;
    let image = flat_image(omega, l)?;
    let image_dim = forms_rank(&image);
    let target_dim = binomial(d - l.dim(), n);
    let kernel_dim = kernel(omega)?.dim();
    let dimension_side = l.dim() == kernel_dim + target_dim;
    let image_side = isotropic && image_dim == target_dim;
    Ok(MaxDimRelation {
        isotropic,
        image_dim,
        target_dim,
        kernel_dim,
        dimension_side,
        image_side,
        holds: image_side,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalRelation {
    pub image_dim: usize,
    /// `dim Λⁿ_r L^⊥`, counted on an adapted basis.
    pub target_dim: usize,
    /// `Σ_{s<r} C(N′, s) C(n′, n − s)`.
    pub formula_dim: usize,
    pub image_in_target: bool,
    pub holds: bool,
}

/// `ω♭(L) = Λⁿ_r L^⊥`, where `Λⁿ_r L^⊥` consists of the n-forms vanishing on
/// `L` and under contraction with any `r` vectors of `V`.
pub fn check_canonical_relation(
    omega: &AlternatingForm,
    l: &Subspace,
    v: &Subspace,
    r: usize,
) -> Result<CanonicalRelation> {
    if !v.contains_subspace(l) {
        return Err(Error::precondition("L is not contained in V"));
    }
    if omega.degree() == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            reason: "contraction needs deg ω ≥ 1".into(),
        });
    }
    let d = omega.dimension();
    let n = omega.degree() - 1;
    let n_vert = v.dim() - l.dim();
    let n_hor = d - v.dim();
    // adapted dual basis: n-forms on W/L are spanned by monomials in the
    // N′ vertical and n′ horizontal covectors; Λⁿ_r keeps fewer than r
    // vertical factors
    let mut target_dim = 0;
    for t in subsets(n_vert + n_hor, n) {
        if t.positions().filter(|&p| p < n_vert).count() < r {
            target_dim += 1;
        }
    }
    let formula_dim = (0..r).map(|s| binomial(n_vert, s) * binomial(n_hor, n.saturating_sub(s)) * usize::from(s <= n)).sum();
    let image = flat_image(omega, l)?;
    let image_dim = forms_rank(&image);
    let lb = l.basis_vectors();
    let vb = v.basis_vectors();
    let mut image_in_target = true;
    'check: for beta in &image {
        for x in &lb {
            if !beta.contract(x)?.is_zero() {
                image_in_target = false;
                break 'check;
            }
        }
        if r <= n {
            for t in subsets(vb.len(), r) {
                let vs: Vec<Vector> = t.positions().map(|p| vb[p].clone()).collect();
                if !beta.multi_contract(&vs)?.is_zero() {
                    image_in_target = false;
                    break 'check;
                }
            }
        }
    }
    if target_dim != formula_dim {
        return Err(Error::Internal(format!(
            "adapted monomial count {target_dim} differs from the dimension formula {formula_dim}"
        )));
    }
    Ok(CanonicalRelation {
        image_dim,
        target_dim,
        formula_dim,
        image_in_target,
        holds: image_in_target && image_dim == target_dim,
    })
}
