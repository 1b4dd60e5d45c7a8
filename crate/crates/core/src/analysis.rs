//! Structural analysis of a single form: kernel, support, decomposability,
//! length bounds, k-orthogonal complements and isotropy classes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{AlternatingForm, IndexTuple, Subspace, Vector};
use crate::linalg::{self, Mat};
use crate::rational::{q, Q};
use crate::search::{self, SearchBudget};

/// Rows of the linear system `v ↦ i_{v_1..v_j} β ... = 0`, one row per output
/// coefficient. Columns are the coordinates of `v`.
fn contraction_rows(forms: &[AlternatingForm], d: usize) -> Mat {
    let mut rows: BTreeMap<(usize, IndexTuple), Vec<Q>> = BTreeMap::new();
    for (fi, beta) in forms.iter().enumerate() {
        for (t, c) in beta.terms() {
            for p in t.positions() {
                let rest = IndexTuple::from_mask(t.mask() & !(1u64 << p));
                let neg = crate::exterior::contraction_negative(t.mask(), p);
                let row = rows
                    .entry((fi, rest))
                    .or_insert_with(|| vec![Q::zero(); d]);
                row[p] = if neg { -c.clone() } else { c.clone() };
            }
        }
    }
    rows.into_values().collect()
}

/// `ker ω = { v | i_v ω = 0 }`.
pub fn kernel(omega: &AlternatingForm) -> Result<Subspace> {
    if omega.degree() == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            reason: "the kernel of a 0-form is undefined".into(),
        });
    }
    let d = omega.dimension();
    let rows = contraction_rows(std::slice::from_ref(omega), d);
    let ns = linalg::null_space(&rows, d);
    Subspace::new(d, false, &ns)
}

/// Dimension of the support, i.e. the rank of `v ↦ i_v β`.
pub fn support_dim(beta: &AlternatingForm) -> usize {
    if beta.degree() == 0 || beta.is_zero() {
        return 0;
    }
    let d = beta.dimension();
    linalg::rank(&contraction_rows(std::slice::from_ref(beta), d), d)
}

/// Smallest dual subspace `S` with `β ∈ Λ^k S`, computed as `(ker β)^⊥`.
/// The zero form (and any 0-form) has support `{0}`.
pub fn support(beta: &AlternatingForm) -> Subspace {
    if beta.degree() == 0 || beta.is_zero() {
        return Subspace::zero(beta.dimension(), true);
    }
    kernel(beta).expect("degree >= 1").annihilator()
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub decomposable: bool,
    pub support_dim: usize,
    /// 1-forms whose wedge product equals the input exactly; present for
    /// nonzero decomposable inputs of degree ≥ 1.
    pub factors: Option<Vec<AlternatingForm>>,
}

/// `β` is decomposable iff `β = 0` or `dim S_β = deg β`.
pub fn is_decomposable(beta: &AlternatingForm) -> Decomposition {
    let k = beta.degree();
    if beta.is_zero() || k == 0 {
        return Decomposition {
            decomposable: true,
            support_dim: 0,
            factors: None,
        };
    }
    let sdim = support_dim(beta);
    if sdim != k {
        return Decomposition {
            decomposable: false,
            support_dim: sdim,
            factors: None,
        };
    }
    let mut factors = support(beta).basis_forms();
    let product = wedge_all(&factors, beta.dimension());
    let (t, c) = product.terms().next().expect("support basis wedge is nonzero");
    let scale = beta.coeff(t) / c;
    factors[0] = factors[0].scaled(&scale);
    debug_assert_eq!(&wedge_all(&factors, beta.dimension()), beta);
    Decomposition {
        decomposable: true,
        support_dim: sdim,
        factors: Some(factors),
    }
}

pub fn wedge_all(forms: &[AlternatingForm], d: usize) -> AlternatingForm {
    forms.iter().fold(AlternatingForm::scalar(d, Q::one()), |acc, f| {
        acc.wedge(f).expect("same dimension")
    })
}

/// Rank of a 2-form viewed as a skew matrix.
pub fn skew_rank(beta: &AlternatingForm) -> usize {
    debug_assert_eq!(beta.degree(), 2);
    support_dim(beta)
}

/// A vector basis `b_1..b_d` whose dual basis starts with the given
/// covectors (which must be independent), completed by standard covectors.
pub fn vector_basis_dual_to(covectors: &[Vec<Q>], d: usize) -> Option<Vec<Vector>> {
    let mut rows: Mat = covectors.to_vec();
    for p in 0..d {
        if rows.len() == d {
            break;
        }
        let mut e = vec![Q::zero(); d];
        e[p] = Q::one();
        rows.push(e);
        if linalg::rank(&rows, d) < rows.len() {
            rows.pop();
        }
    }
    let inv = linalg::inverse(&rows)?;
    Some(
        (0..d)
            .map(|j| Vector::new(inv.iter().map(|r| r[j].clone()).collect()))
            .collect(),
    )
}

/// `d × k` matrix whose columns are the given vectors.
pub fn basis_columns(basis: &[Vector], d: usize) -> Mat {
    (0..d)
        .map(|i| basis.iter().map(|b| b.coords[i].clone()).collect())
        .collect()
}

/// Relative length `ℓ_𝔅(β)`: the number of nonzero coefficients of `β` in
/// the dual basis of the vector basis `basis`.
pub fn relative_length(beta: &AlternatingForm, basis: &[Vector]) -> Result<usize> {
    Ok(beta.in_basis(&basis_columns(basis, beta.dimension()))?.num_terms())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundSource {
    ZeroForm,
    Support,
    NotDecomposable,
    SkewRank,
    /// `ℓ(ω) = dim(L / ker ω)` for a maximal isotropic decomposable `L` with
    /// a zero index gap.
    IsotropicStructure,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthBounds {
    pub lower: usize,
    pub upper: usize,
    pub certified: bool,
    pub lower_source: LowerBoundSource,
    /// Vector basis whose dual basis realizes `upper`.
    #[serde(skip)]
    pub witness_basis: Option<Vec<Vector>>,
}

impl LengthBounds {
    fn new(lower: (usize, LowerBoundSource), upper: usize, witness: Option<Vec<Vector>>) -> Self {
        LengthBounds {
            lower: lower.0,
            upper,
            certified: lower.0 == upper,
            lower_source: lower.1,
            witness_basis: witness,
        }
    }
}

/// Analytic lower bound on the length.
pub fn length_lower_bound(beta: &AlternatingForm) -> (usize, LowerBoundSource) {
    if beta.is_zero() {
        return (0, LowerBoundSource::ZeroForm);
    }
    let k = beta.degree();
    if k == 0 {
        return (1, LowerBoundSource::Support);
    }
    let sdim = support_dim(beta);
    let mut best = (sdim.div_ceil(k), LowerBoundSource::Support);
    if sdim != k && best.0 < 2 {
        best = (2, LowerBoundSource::NotDecomposable);
    }
    if k == 2 && sdim / 2 > best.0 {
        best = (sdim / 2, LowerBoundSource::SkewRank);
    }
    best
}

/// Symplectic Gram–Schmidt: a vector basis in which a 2-form reads
/// `Σ e^{2i-1} ∧ e^{2i}`.
pub fn skew_normal_basis(beta: &AlternatingForm) -> Vec<Vector> {
    let d = beta.dimension();
    let pair = |a: &Vector, b: &Vector| beta.evaluate(&[a.clone(), b.clone()]).expect("2-form");
    let mut rest: Vec<Vector> = (1..=d).map(|i| Vector::basis(d, i)).collect();
    let mut out = Vec::new();
    loop {
        let mut found = None;
        'search: for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                let w = pair(&rest[i], &rest[j]);
                if !w.is_zero() {
                    found = Some((i, j, w));
                    break 'search;
                }
            }
        }
        let Some((i, j, w)) = found else { break };
        let u = rest[i].clone();
        let v = rest[j].scaled(&(Q::one() / w));
        rest.remove(j);
        rest.remove(i);
        rest = rest
            .into_iter()
            .map(|x| {
                let a = pair(&x, &v);
                let b = pair(&x, &u);
                x.sub(&u.scaled(&a)).add(&v.scaled(&b))
            })
            .collect();
        out.push(u);
        out.push(v);
    }
    out.extend(rest);
    out
}

/// Budgeted bounds on `ℓ(β) = min_𝔅 ℓ_𝔅(β)`.
///
/// The upper bound is the best relative length over the standard basis, the
/// factor basis (decomposable input), the skew normal basis (degree 2), and
/// `budget.random_trials` seeded unimodular changes of basis.
pub fn length_bounds(beta: &AlternatingForm, budget: &SearchBudget) -> LengthBounds {
    let d = beta.dimension();
    let lower = length_lower_bound(beta);
    let standard: Vec<Vector> = (1..=d).map(|i| Vector::basis(d, i)).collect();
    if beta.is_zero() {
        return LengthBounds::new(lower, 0, Some(standard));
    }
    let mut best = (beta.num_terms(), standard);
    let consider = |basis: Vec<Vector>, best: &mut (usize, Vec<Vector>)| {
        if let Ok(len) = relative_length(beta, &basis) {
            if len < best.0 {
                *best = (len, basis);
            }
        }
    };
    if best.0 > lower.0 {
        if let Some(factors) = is_decomposable(beta).factors {
            let cov: Mat = factors.iter().map(|f| f.covector()).collect();
            if let Some(b) = vector_basis_dual_to(&cov, d) {
                consider(b, &mut best);
            }
        }
    }
    if best.0 > lower.0 && beta.degree() == 2 {
        consider(skew_normal_basis(beta), &mut best);
    }
    let mut rng = budget.rng();
    for _ in 0..budget.random_trials {
        if best.0 <= lower.0 {
            break;
        }
        let m = search::random_unimodular(&mut rng, d, budget.coeff_bound.max(1));
        let basis: Vec<Vector> = (0..d)
            .map(|j| Vector::new(m.iter().map(|r| r[j].clone()).collect()))
            .collect();
        consider(basis, &mut best);
    }
    LengthBounds::new(lower, best.0, Some(best.1))
}

/// `L^{ω,k} = { v | i_v i_{v_1} ... i_{v_k} ω = 0  ∀ v_i ∈ L }`.
///
/// By multilinearity and alternation it suffices to take the `v_i` to be
/// distinct basis vectors of `L`. `k = deg ω` gives the whole space.
pub fn k_orthogonal(l: &Subspace, omega: &AlternatingForm, k: usize) -> Result<Subspace> {
    check_subspace(l, omega)?;
    if k > omega.degree() {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            reason: format!("k must be at most deg ω = {}", omega.degree()),
        });
    }
    let d = omega.dimension();
    if omega.degree() == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            reason: "k-orthogonal complements need deg ω ≥ 1".into(),
        });
    }
    if k == omega.degree() {
        return Ok(Subspace::full(d, false));
    }
    let basis = l.basis_vectors();
    let mut forms = Vec::new();
    for t in crate::exterior::subsets(basis.len(), k) {
        let vs: Vec<Vector> = t.positions().map(|p| basis[p].clone()).collect();
        let beta = omega.multi_contract(&vs)?;
        if !beta.is_zero() {
            forms.push(beta);
        }
    }
    let rows = contraction_rows(&forms, d);
    Subspace::new(d, false, &linalg::null_space(&rows, d))
}

fn check_subspace(l: &Subspace, omega: &AlternatingForm) -> Result<()> {
    if l.ambient() != omega.dimension() {
        return Err(Error::DimensionMismatch {
            expected: omega.dimension(),
            found: l.ambient(),
        });
    }
    if l.is_dual() {
        return Err(Error::precondition("expected a subspace of the base space, got a dual subspace"));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropyReport {
    pub k: usize,
    pub is_k_isotropic: bool,
    pub is_strict: bool,
    pub is_maximal: bool,
    #[serde(skip)]
    pub k_orthogonal: Subspace,
    pub k_orthogonal_dim: usize,
    /// `ker ω ⊆ L`, reported when `L` is maximal.
    pub kernel_in_l: Option<bool>,
}

/// Isotropy class of `L`. Maximality is decided as `L = L^{ω,k}`: for a
/// k-isotropic `L`, adjoining `u` keeps k-isotropy iff `u ∈ L^{ω,k}`.
pub fn classify_isotropy(l: &Subspace, omega: &AlternatingForm, k: usize) -> Result<IsotropyReport> {
    let ko = k_orthogonal(l, omega, k)?;
    let is_k = ko.contains_subspace(l);
    let is_strict = is_k && (k == 0 || !k_orthogonal(l, omega, k - 1)?.contains_subspace(l));
    let is_maximal = is_k && ko == *l;
    let kernel_in_l = if is_maximal {
        Some(l.contains_subspace(&kernel(omega)?))
    } else {
        None
    };
    Ok(IsotropyReport {
        k,
        is_k_isotropic: is_k,
        is_strict,
        is_maximal,
        k_orthogonal_dim: ko.dim(),
        k_orthogonal: ko,
        kernel_in_l,
    })
}

/// `i_v ω` is decomposable (vectors in `ker ω` count as decomposable).
pub fn decomposable_vector(v: &Vector, omega: &AlternatingForm) -> Result<bool> {
    Ok(is_decomposable(&omega.contract(v)?).decomposable)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSearchStage {
    Canonical,
    LatticeReduced,
    FactorSpaces,
    ShortVectors,
    Enumeration,
    Random,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecomposableBasisOutcome {
    /// `None` means "not found within budget", never "nonexistent".
    #[serde(skip)]
    pub basis: Option<Vec<Vector>>,
    pub found: bool,
    pub stage: Option<BasisSearchStage>,
    pub candidates_tried: usize,
    /// Set when `L` is not 1-isotropic.
    pub warning: Option<String>,
}

/// Cap on integer combinations examined by the enumeration stage.
const ENUMERATION_CAP: usize = 5000;

/// Cap on short lattice vectors examined.
const SHORT_VECTOR_CAP: usize = 20000;

/// Searches for a basis of `L` made of decomposable vectors: the echelon
/// basis first, then an LLL-reduced basis of the integer lattice in `L`,
/// then linear spaces of decomposable vectors cut out by candidate factor
/// covectors, then lattice vectors by increasing length, then integer combinations of the reduced basis with entries in
/// `[-coeff_bound, coeff_bound]` (fewest nonzero entries first), then seeded
/// random rational combinations.
pub fn decomposable_basis_search(
    l: &Subspace,
    omega: &AlternatingForm,
    budget: &SearchBudget,
) -> Result<DecomposableBasisOutcome> {
    check_subspace(l, omega)?;
    let warning = if omega.degree() >= 2 && !classify_isotropy(l, omega, 1)?.is_k_isotropic {
        Some("L is not 1-isotropic".to_string())
    } else {
        None
    };
    let m = l.dim();
    let d = l.ambient();
    let echelon = l.basis_vectors();
    let mut tried = 0usize;
    let mut chosen: Vec<Vector> = Vec::new();
    let mut chosen_rows: Mat = Vec::new();
    let accept = |v: Vector, chosen: &mut Vec<Vector>, chosen_rows: &mut Mat| -> Result<bool> {
        chosen_rows.push(v.coords.clone());
        if linalg::rank(chosen_rows, d) < chosen_rows.len() {
            chosen_rows.pop();
            return Ok(false);
        }
        if decomposable_vector(&v, omega)? {
            chosen.push(v);
            Ok(true)
        } else {
            chosen_rows.pop();
            Ok(false)
        }
    };
    let done = |stage, chosen: Vec<Vector>, tried, warning| DecomposableBasisOutcome {
        basis: Some(chosen),
        found: true,
        stage: Some(stage),
        candidates_tried: tried,
        warning,
    };

    for v in &echelon {
        tried += 1;
        accept(v.clone(), &mut chosen, &mut chosen_rows)?;
    }
    if chosen.len() == m {
        return Ok(done(BasisSearchStage::Canonical, chosen, tried, warning));
    }

    let echelon_rows: Mat = echelon.iter().map(|v| v.coords.clone()).collect();
    let lattice = linalg::saturated_lattice(&echelon_rows, d);
    let reduced: Vec<Vector> = lattice.iter().cloned().map(Vector::new).collect();
    for v in &reduced {
        tried += 1;
        accept(v.clone(), &mut chosen, &mut chosen_rows)?;
    }
    if chosen.len() == m {
        return Ok(done(BasisSearchStage::LatticeReduced, chosen, tried, warning));
    }

    if omega.degree() >= 2 {
        for v in factor_space_candidates(l, omega, budget)? {
            tried += 1;
            accept(v, &mut chosen, &mut chosen_rows)?;
            if chosen.len() == m {
                return Ok(done(BasisSearchStage::FactorSpaces, chosen, tried, warning));
            }
        }
    }

    // lattice vectors of L in order of increasing length
    if !lattice.is_empty() {
        let norm2 = |r: &[Q]| r.iter().map(|c| crate::rational::to_f64(c).powi(2)).sum::<f64>();
        let mut bound = lattice.iter().map(|r| norm2(r)).fold(0.0, f64::max);
        let mut shorts = Vec::new();
        for _ in 0..12 {
            shorts = linalg::short_vectors(&lattice, bound, SHORT_VECTOR_CAP);
            if shorts.len() >= SHORT_VECTOR_CAP {
                break;
            }
            bound *= 2.0;
        }
        let mut vs: Vec<(f64, Vector)> = shorts
            .iter()
            .map(|x| {
                let mut v = Vector::zero(d);
                for (r, &c) in reduced.iter().zip(x) {
                    if c != 0 {
                        v = v.add(&r.scaled(&q(c)));
                    }
                }
                (norm2(&v.coords), v)
            })
            .collect();
        vs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, v) in vs {
            tried += 1;
            accept(v, &mut chosen, &mut chosen_rows)?;
            if chosen.len() == m {
                return Ok(done(BasisSearchStage::ShortVectors, chosen, tried, warning));
            }
        }
    }

    let b = budget.coeff_bound.max(1);
    let combine = |coeffs: &[(usize, i64)]| -> Vector {
        let mut v = Vector::zero(d);
        for &(i, c) in coeffs {
            v = v.add(&reduced[i].scaled(&q(c)));
        }
        v
    };
    let enumeration_start = tried;
    'enumerate: for size in 2..=m {
        for t in crate::exterior::subsets(m, size) {
            let pos: Vec<usize> = t.positions().collect();
            // coefficient tuples in [-b, b] \ {0}, first entry positive
            let nonzero: Vec<i64> = (-b..=b).filter(|&c| c != 0).collect();
            let count = nonzero.len().pow(size as u32 - 1) * b as usize;
            for code in 0..count {
                if tried - enumeration_start >= ENUMERATION_CAP {
                    break 'enumerate;
                }
                let mut rest = code;
                let mut coeffs = Vec::with_capacity(size);
                coeffs.push((pos[0], (rest % b as usize) as i64 + 1));
                rest /= b as usize;
                for &p in &pos[1..] {
                    coeffs.push((p, nonzero[rest % nonzero.len()]));
                    rest /= nonzero.len();
                }
                tried += 1;
                accept(combine(&coeffs), &mut chosen, &mut chosen_rows)?;
                if chosen.len() == m {
                    return Ok(done(BasisSearchStage::Enumeration, chosen, tried, warning));
                }
            }
        }
    }

    let mut rng = budget.rng();
    for _ in 0..budget.random_trials {
        let mut v = Vector::zero(d);
        for e in &echelon {
            v = v.add(&e.scaled(&search::random_rational(&mut rng, 5, 4)));
        }
        tried += 1;
        if v.is_zero() {
            continue;
        }
        accept(v, &mut chosen, &mut chosen_rows)?;
        if chosen.len() == m {
            return Ok(done(BasisSearchStage::Random, chosen, tried, warning));
        }
    }
    Ok(DecomposableBasisOutcome {
        basis: None,
        found: false,
        stage: None,
        candidates_tried: tried,
        warning,
    })
}

/// Node budget of the factor-space search.
const FACTOR_SEARCH_NODES: usize = 3000;

fn integral_lll(rows: &[Vec<Q>]) -> Mat {
    let integral: Mat = rows
        .iter()
        .map(|r| {
            let den = Q::from_integer(crate::rational::common_denominator(r));
            r.iter().map(|c| c * &den).collect()
        })
        .collect();
    linalg::lll(&integral)
}

/// `{v ∈ span(cs) : α ∧ i_v ω = 0}`.
fn factor_restriction(cs: &[Vector], images: &[AlternatingForm], alpha: &AlternatingForm) -> Result<(Vec<Vector>, Vec<AlternatingForm>)> {
    let wedged: Vec<AlternatingForm> = images.iter().map(|b| alpha.wedge(b)).collect::<Result<_>>()?;
    let keys: Vec<crate::exterior::IndexTuple> = wedged
        .iter()
        .flat_map(|f| f.terms().map(|(t, _)| t))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows: Mat = keys.iter().map(|t| wedged.iter().map(|f| f.coeff(*t)).collect()).collect();
    let null = linalg::null_space(&rows, cs.len());
    let combine = |t: &[Q]| {
        let mut v = Vector::zero(cs[0].dimension());
        let mut img = AlternatingForm::zero(images[0].dimension(), images[0].degree());
        for ((c, b), x) in cs.iter().zip(images).zip(t) {
            if !x.is_zero() {
                v = v.add(&c.scaled(x));
                img = &img + &b.scaled(x);
            }
        }
        (v, img)
    };
    Ok(null.iter().map(|t| combine(t)).unzip())
}

/// Vectors of `L` whose contraction lies in `Λⁿ span(α₁..αₙ)` for candidate
/// factor covectors `αᵢ ∈ L⁰`; every nonzero such vector is decomposable.
/// Candidates are an LLL-reduced integer basis of `L⁰` and its pairwise
/// combinations with small coefficients, explored depth-first with larger
/// restricted spaces first.
fn factor_space_candidates(l: &Subspace, omega: &AlternatingForm, budget: &SearchBudget) -> Result<Vec<Vector>> {
    let n = omega.degree() - 1;
    let ann = l.annihilator();
    if l.dim() == 0 || ann.dim() < n {
        return Ok(Vec::new());
    }
    let covs = integral_lll(ann.basis());
    let b = budget.coeff_bound.max(1);
    let mut cands: Vec<Vec<Q>> = covs.clone();
    for i in 0..covs.len() {
        for j in i + 1..covs.len() {
            for ci in 1..=b {
                for cj in (-b..=b).filter(|&c| c != 0) {
                    cands.push(covs[i].iter().zip(&covs[j]).map(|(x, y)| x * q(ci) + y * q(cj)).collect());
                }
            }
        }
    }
    let alphas: Vec<AlternatingForm> = cands.iter().map(|c| AlternatingForm::one_form(c)).collect();
    let cs: Vec<Vector> = integral_lll(l.basis()).into_iter().map(Vector::new).collect();
    let images: Vec<AlternatingForm> = cs.iter().map(|c| omega.contract(c)).collect::<Result<_>>()?;

    struct Dfs<'a> {
        alphas: &'a [AlternatingForm],
        cands: &'a [Vec<Q>],
        n: usize,
        d: usize,
        target: usize,
        nodes: usize,
        found: Vec<Vector>,
        found_rows: Mat,
    }
    impl Dfs<'_> {
        fn full(&self) -> bool {
            self.found_rows.len() >= self.target || self.nodes >= FACTOR_SEARCH_NODES
        }
        fn record(&mut self, vs: &[Vector]) {
            for v in vs {
                self.found_rows.push(v.coords.clone());
                if linalg::rank(&self.found_rows, self.d) < self.found_rows.len() {
                    self.found_rows.pop();
                } else {
                    self.found.push(v.clone());
                }
            }
        }
        fn go(&mut self, cs: &[Vector], images: &[AlternatingForm], picked: &mut Vec<usize>) -> Result<()> {
            if picked.len() == self.n {
                self.record(cs);
                return Ok(());
            }
            let mut children = Vec::new();
            for (i, alpha) in self.alphas.iter().enumerate() {
                if self.full() {
                    break;
                }
                let mut rows: Mat = picked.iter().map(|&p| self.cands[p].clone()).collect();
                rows.push(self.cands[i].clone());
                if linalg::rank(&rows, self.d) < rows.len() {
                    continue;
                }
                self.nodes += 1;
                let (sub, imgs) = factor_restriction(cs, images, alpha)?;
                // a new direction must not already be covered
                let fresh = sub.iter().any(|v| {
                    let mut r = self.found_rows.clone();
                    r.push(v.coords.clone());
                    linalg::rank(&r, self.d) == r.len()
                });
                if fresh {
                    children.push((sub.len(), i, sub, imgs));
                }
            }
            children.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            for (_, i, sub, imgs) in children {
                if self.found_rows.len() >= self.target {
                    break;
                }
                picked.push(i);
                self.go(&sub, &imgs, picked)?;
                picked.pop();
            }
            Ok(())
        }
    }
    let mut dfs = Dfs {
        alphas: &alphas,
        cands: &cands,
        n,
        d: l.ambient(),
        target: l.dim(),
        nodes: 0,
        found: Vec::new(),
        found_rows: Vec::new(),
    };
    if n == 0 {
        return Ok(cs);
    }
    dfs.go(&cs, &images, &mut Vec::new())?;
    Ok(dfs.found)
}

/// Whether `vs` is a basis of `L` made of decomposable vectors.
pub fn is_decomposable_basis(l: &Subspace, omega: &AlternatingForm, vs: &[Vector]) -> Result<bool> {
    if vs.len() != l.dim() || vs.iter().any(|v| v.dimension() != l.ambient()) {
        return Ok(false);
    }
    if Subspace::span(l.ambient(), vs)? != *l {
        return Ok(false);
    }
    for v in vs {
        if !decomposable_vector(v, omega)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random vector with small rational entries; used by property tests and
/// probes.
pub fn random_vector<R: Rng>(rng: &mut R, d: usize) -> Vector {
    Vector::new((0..d).map(|_| search::random_rational(rng, 4, 3)).collect())
}
