//! Polynomial-coefficient forms and vector fields on coordinate space.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{self, AlternatingForm, IndexTuple};
use crate::rational::{self, q, Q};

pub type Exponents = Vec<u32>;

/// Multivariate polynomial with exact rational coefficients in `z¹..z^d`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("z{}", i + 1) } else { format!("z{}^{k}", i + 1) })
                    .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_monomial(vec![0; nvars], c);
        p
    }

    /// The coordinate `z^{i+1}` (0-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, Q::one())
    }

    pub fn monomial(exponents: Exponents, c: Q) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.add_monomial(exponents, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Q)>) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_monomial(e, c);
        }
        Ok(p)
    }

    pub fn add_monomial(&mut self, e: Exponents, c: Q) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scaled(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_monomial(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_monomial(e.clone(), -c.clone());
        }
        p
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_monomial(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(self.nvars, Q::one()), |acc, _| acc.mul(self))
    }

    /// `∂/∂z^{i+1}`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            p.add_monomial(e2, c * q(i64::from(e[i])));
        }
        p
    }

    /// Antiderivative in `z^{i+1}` with zero constant of integration.
    pub fn antiderivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] += 1;
            p.add_monomial(e2, c / q(i64::from(e[i] + 1)));
        }
        p
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += m;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = rational::to_f64(c);
                for (x, &k) in point.iter().zip(e) {
                    if k > 0 {
                        m *= x.powi(k as i32);
                    }
                }
                m
            })
            .sum()
    }

    /// `p(φ¹(z), …, φ^d(z))`.
    pub fn compose(&self, map: &[Poly]) -> Poly {
        let nv = map.first().map_or(self.nvars, Poly::nvars);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut m = Poly::constant(nv, c.clone());
            for (phi, &k) in map.iter().zip(e) {
                if k > 0 {
                    m = m.mul(&phi.pow(k));
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// Whether the polynomial depends on `z^{i+1}`.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    fn leading(&self) -> Option<(&Exponents, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. With a single divisor the remainder is zero iff the
    /// divisor divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lt_e, lt_c) = divisor.leading()?;
        let mut rest = self.clone();
        let mut quotient = Poly::zero(self.nvars);
        while let Some((e, c)) = rest.leading() {
            if e.iter().zip(lt_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponents = e.iter().zip(lt_e).map(|(a, b)| a - b).collect();
            let qc = c / lt_c;
            let step = Poly::monomial(qe, qc);
            rest = rest.sub(&step.mul(divisor));
            quotient = quotient.add(&step);
        }
        Some(quotient)
    }
}

/// Polynomial evaluated in floating point without re-deriving exponents.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let vars = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as i32))
                        .collect();
                    (vars, rational::to_f64(c))
                })
                .collect(),
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(vars, c)| vars.iter().fold(*c, |m, &(i, k)| m * z[i].powi(k)))
            .sum()
    }
}

/// k-form whose coefficients are polynomials in the coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    dimension: usize,
    degree: usize,
    terms: BTreeMap<IndexTuple, Poly>,
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (t, p) in &self.terms {
            m.entry(&t.indices(), p);
        }
        m.finish()
    }
}

impl PolyForm {
    pub fn zero(dimension: usize, degree: usize) -> Self {
        PolyForm {
            dimension,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_constant(form: &AlternatingForm) -> Self {
        let d = form.dimension();
        let mut f = PolyForm::zero(d, form.degree());
        for (t, c) in form.terms() {
            f.add_term(t, Poly::constant(d, c.clone()));
        }
        f
    }

    /// `p dz^{i₁} ∧ … ∧ dz^{i_k}` for 1-based indices in any order.
    pub fn monomial(dimension: usize, indices: &[usize], p: Poly) -> Result<Self> {
        let unit = AlternatingForm::monomial(dimension, indices, Q::one())?;
        let mut f = PolyForm::zero(dimension, indices.len());
        if p.nvars() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: p.nvars(),
            });
        }
        for (t, c) in unit.terms() {
            f.add_term(t, p.scaled(c));
        }
        Ok(f)
    }

    pub fn add_term(&mut self, t: IndexTuple, p: Poly) {
        if p.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&t) {
            Some(old) => old.add(&p),
            None => p,
        };
        if !merged.is_zero() {
            self.terms.insert(t, merged);
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexTuple, &Poly)> {
        self.terms.iter().map(|(t, p)| (*t, p))
    }

    pub fn coeff(&self, t: IndexTuple) -> Poly {
        self.terms.get(&t).cloned().unwrap_or_else(|| Poly::zero(self.dimension))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &PolyForm) -> Result<()> {
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

    pub fn try_add(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_same(other)?;
        let mut f = self.clone();
        for (t, p) in &other.terms {
            f.add_term(*t, p.clone());
        }
        Ok(f)
    }

    pub fn try_sub(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_same(other)?;
        let mut f = self.clone();
        for (t, p) in &other.terms {
            f.add_term(*t, p.scaled(&-Q::one()));
        }
        Ok(f)
    }

    pub fn scaled(&self, c: &Q) -> PolyForm {
        let mut f = PolyForm::zero(self.dimension, self.degree);
        for (t, p) in &self.terms {
            f.add_term(*t, p.scaled(c));
        }
        f
    }

    pub fn mul_poly(&self, g: &Poly) -> PolyForm {
        let mut f = PolyForm::zero(self.dimension, self.degree);
        for (t, p) in &self.terms {
            f.add_term(*t, p.mul(g));
        }
        f
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        let mut f = PolyForm::zero(self.dimension, self.degree + other.degree);
        for (a, pa) in &self.terms {
            for (b, pb) in &other.terms {
                if let Some(neg) = exterior::wedge_sign(a.mask(), b.mask()) {
                    let prod = pa.mul(pb);
                    let prod = if neg { prod.scaled(&-Q::one()) } else { prod };
                    f.add_term(IndexTuple::from_mask(a.mask() | b.mask()), prod);
                }
            }
        }
        Ok(f)
    }

    /// Exterior derivative `d(p dz^I) = Σ_j ∂_j p dz^j ∧ dz^I`.
    pub fn d(&self) -> PolyForm {
        let mut f = PolyForm::zero(self.dimension, self.degree + 1);
        for (t, p) in &self.terms {
            for j in 0..self.dimension {
                let dp = p.derivative(j);
                if dp.is_zero() {
                    continue;
                }
                if let Some(neg) = exterior::wedge_sign(1u64 << j, t.mask()) {
                    let dp = if neg { dp.scaled(&-Q::one()) } else { dp };
                    f.add_term(IndexTuple::from_mask(t.mask() | 1u64 << j), dp);
                }
            }
        }
        f
    }

    /// Contraction with the coordinate field `∂/∂z^{p+1}`.
    pub fn contract_coordinate(&self, p: usize) -> PolyForm {
        let mut f = PolyForm::zero(self.dimension, self.degree.saturating_sub(1));
        for (t, c) in &self.terms {
            if !t.contains_position(p) {
                continue;
            }
            let neg = exterior::contraction_negative(t.mask(), p);
            let c = if neg { c.scaled(&-Q::one()) } else { c.clone() };
            f.add_term(IndexTuple::from_mask(t.mask() & !(1u64 << p)), c);
        }
        f
    }

    pub fn eval(&self, point: &[Q]) -> Result<AlternatingForm> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: point.len(),
            });
        }
        AlternatingForm::from_terms(
            self.dimension,
            self.degree,
            self.terms.iter().map(|(t, p)| (t.indices(), p.eval(point))),
        )
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<(IndexTuple, f64)> {
        self.terms.iter().map(|(t, p)| (*t, p.eval_f64(point))).collect()
    }

    /// Pullback along the polynomial map `z ↦ φ(z)`:
    /// `Σ c_I(φ) dφ^{i₁} ∧ … ∧ dφ^{i_k}`.
    pub fn pullback(&self, map: &[Poly]) -> Result<PolyForm> {
        if map.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: map.len(),
            });
        }
        let target = map.first().map_or(self.dimension, Poly::nvars);
        let differentials: Vec<PolyForm> = map
            .iter()
            .map(|phi| {
                let mut f = PolyForm::zero(target, 1);
                for j in 0..target {
                    f.add_term(IndexTuple::from_positions([j]), phi.derivative(j));
                }
                f
            })
            .collect();
        let mut out = PolyForm::zero(target, self.degree);
        for (t, c) in &self.terms {
            let mut term = PolyForm::zero(target, 0);
            term.add_term(IndexTuple::from_mask(0), c.compose(map));
            for p in t.positions() {
                term = term.wedge(&differentials[p])?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }
}

/// Vector field with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let d = components.len();
        if let Some(p) = components.iter().find(|p| p.nvars() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.nvars(),
            });
        }
        Ok(PolyVectorField { components })
    }

    /// `∂/∂z^{i+1}` (0-based `i`).
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut c = vec![Poly::zero(d); d];
        c[i] = Poly::constant(d, Q::one());
        PolyVectorField { components: c }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn scaled_by(&self, g: &Poly) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|c| c.mul(g)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyVectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        PolyVectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// `X(f) = Σ X^j ∂_j f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        self.components
            .iter()
            .enumerate()
            .fold(Poly::zero(f.nvars()), |acc, (j, xj)| acc.add(&xj.mul(&f.derivative(j))))
    }

    pub fn eval(&self, point: &[Q]) -> Vec<Q> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }
}
