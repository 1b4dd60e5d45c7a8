//! Exterior calculus on polynomial forms, the fiberwise Poincaré homotopy,
//! Moser-type flattening and Frobenius involutivity checks.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;

use crate::analysis;
use crate::error::{Error, Result};
use crate::exterior::{self, AlternatingForm, IndexTuple, Subspace};
use crate::isotropic;
use crate::linalg;
use crate::poly::{CompiledPoly, Poly, PolyForm, PolyVectorField};
use crate::rational::{self, qf, Q};
use crate::search::{self, SearchBudget};

/// Partition of the coordinates `1..d` into leaf (`x`) and fiber (`y`) directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateSplit {
    x_indices: Vec<usize>,
    y_indices: Vec<usize>,
}

impl CoordinateSplit {
    /// 1-based index sets; they must partition `1..=d`.
    pub fn new(d: usize, x_indices: &[usize], y_indices: &[usize]) -> Result<Self> {
        let mut seen = vec![false; d];
        for &i in x_indices.iter().chain(y_indices) {
            if i == 0 || i > d {
                return Err(Error::InvalidIndex {
                    indices: vec![i],
                    dimension: d,
                });
            }
            if seen[i - 1] {
                return Err(Error::precondition(format!("coordinate {i} appears twice in the split")));
            }
            seen[i - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::precondition(format!(
                "coordinate {} missing from the split",
                missing + 1
            )));
        }
        let mut x = x_indices.to_vec();
        let mut y = y_indices.to_vec();
        x.sort_unstable();
        y.sort_unstable();
        Ok(CoordinateSplit {
            x_indices: x,
            y_indices: y,
        })
    }

    pub fn dimension(&self) -> usize {
        self.x_indices.len() + self.y_indices.len()
    }

    pub fn x_indices(&self) -> &[usize] {
        &self.x_indices
    }

    pub fn y_indices(&self) -> &[usize] {
        &self.y_indices
    }

    fn mask(indices: &[usize]) -> u64 {
        indices.iter().fold(0, |m, &i| m | 1u64 << (i - 1))
    }

    pub fn x_mask(&self) -> u64 {
        Self::mask(&self.x_indices)
    }

    pub fn y_mask(&self) -> u64 {
        Self::mask(&self.y_indices)
    }

    /// `L = span(∂/∂y)`.
    pub fn fiber_subspace(&self) -> Result<Subspace> {
        Subspace::coordinate(self.dimension(), false, &self.y_indices)
    }
}

fn check_split(omega: &PolyForm, s: &CoordinateSplit) -> Result<()> {
    if omega.dimension() != s.dimension() {
        return Err(Error::DimensionMismatch {
            expected: s.dimension(),
            found: omega.dimension(),
        });
    }
    Ok(())
}

pub fn exterior_derivative(omega: &PolyForm) -> PolyForm {
    omega.d()
}

/// Splits `ω = Ω + ω_F`, where `ω_F` collects the terms built from `dx` only.
pub fn restrict_split(omega: &PolyForm, s: &CoordinateSplit) -> Result<(PolyForm, PolyForm)> {
    check_split(omega, s)?;
    let xm = s.x_mask();
    let mut rest = PolyForm::zero(omega.dimension(), omega.degree());
    let mut leaf = PolyForm::zero(omega.dimension(), omega.degree());
    for (t, p) in omega.terms() {
        if t.mask() & !xm == 0 {
            leaf.add_term(t, p.clone());
        } else {
            rest.add_term(t, p.clone());
        }
    }
    Ok((rest, leaf))
}

/// Fiberwise homotopy along `y` for `Φ_t(x, y) = (x, t y)`. Each monomial
/// `c x^a y^b dz^I` contributes `Σ_{j ∈ I ∩ Y} ± c/(|b| + |I ∩ Y|) · y_j x^a y^b dz^{I∖j}`.
/// Requires `dω = 0` and `ω_F = 0`; the result satisfies `dθ = ω` exactly.
pub fn poincare_homotopy(omega: &PolyForm, s: &CoordinateSplit) -> Result<PolyForm> {
    check_split(omega, s)?;
    if omega.degree() == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            reason: "the homotopy operator needs a form of positive degree".into(),
        });
    }
    if !omega.d().is_zero() {
        return Err(Error::precondition("ω is not closed"));
    }
    let (_, leaf) = restrict_split(omega, s)?;
    if !leaf.is_zero() {
        return Err(Error::precondition("ω has a nonzero restriction to the leaves (ω_F ≠ 0)"));
    }
    let d = omega.dimension();
    let ym = s.y_mask();
    let mut theta = PolyForm::zero(d, omega.degree() - 1);
    for (t, p) in omega.terms() {
        let fiber = t.mask() & ym;
        let k_y = fiber.count_ones();
        for (e, c) in p.terms() {
            let b: u32 = (0..d).filter(|&i| ym >> i & 1 == 1).map(|i| e[i]).sum();
            let weight = c / Q::from_integer((b + k_y).into());
            for j in IndexTuple::from_mask(fiber).positions() {
                let mut e2 = e.clone();
                e2[j] += 1;
                let mut w = weight.clone();
                if exterior::contraction_negative(t.mask(), j) {
                    w = -w;
                }
                theta.add_term(IndexTuple::from_mask(t.mask() & !(1u64 << j)), Poly::monomial(e2, w));
            }
        }
    }
    if theta.d() != *omega {
        return Err(Error::Internal("homotopy identity dθ = ω failed".into()));
    }
    Ok(theta)
}

#[derive(Clone, Debug)]
pub struct FlattenParams {
    pub steps: usize,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Half-width of the box around the origin used for samples and probes.
    pub radius: f64,
    pub fd_step: f64,
    pub probes: usize,
}

impl Default for FlattenParams {
    fn default() -> Self {
        FlattenParams {
            steps: 100,
            samples: 50,
            tol: 1e-6,
            seed: search::DEFAULT_SEED,
            radius: 0.1,
            fd_step: 1e-4,
            probes: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlattenSample {
    pub point: Vec<f64>,
    pub error: f64,
    pub x_drift: f64,
}

#[derive(Clone, Debug)]
pub struct FlattenResult {
    pub omega0: AlternatingForm,
    pub steps: usize,
    pub step_size: f64,
    pub samples: Vec<FlattenSample>,
    pub max_error: f64,
    pub max_x_drift: f64,
    pub tol: f64,
    pub passed: bool,
    pub seed: u64,
}

/// Coefficient rows `(n−1)`-tuple → value, indexed consistently across the system.
struct MoserSystem {
    d: usize,
    y_positions: Vec<usize>,
    rows: Vec<IndexTuple>,
    /// `i_{∂y_j} ω₀` per row and fiber direction.
    base: Vec<Vec<f64>>,
    /// `i_{∂y_j} (ω − ω₀)` per row and fiber direction.
    delta: Vec<Vec<Option<CompiledPoly>>>,
    alpha: Vec<Option<CompiledPoly>>,
}

impl MoserSystem {
    fn new(omega: &PolyForm, omega0: &PolyForm, alpha: &PolyForm, s: &CoordinateSplit) -> Result<Self> {
        let d = omega.dimension();
        let y_positions: Vec<usize> = s.y_indices().iter().map(|i| i - 1).collect();
        let diff = omega.try_sub(omega0)?;
        let base_c: Vec<PolyForm> = y_positions.iter().map(|&j| omega0.contract_coordinate(j)).collect();
        let delta_c: Vec<PolyForm> = y_positions.iter().map(|&j| diff.contract_coordinate(j)).collect();
        let mut rows: Vec<IndexTuple> = base_c
            .iter()
            .chain(&delta_c)
            .chain(std::iter::once(alpha))
            .flat_map(|f| f.terms().map(|(t, _)| t).collect::<Vec<_>>())
            .collect();
        rows.sort();
        rows.dedup();
        let base = rows
            .iter()
            .map(|&t| base_c.iter().map(|f| rational::to_f64(&f.coeff(t).constant_term())).collect())
            .collect();
        let compile = |p: Poly| (!p.is_zero()).then(|| CompiledPoly::new(&p));
        let delta = rows
            .iter()
            .map(|&t| delta_c.iter().map(|f| compile(f.coeff(t))).collect())
            .collect();
        let alpha = rows.iter().map(|&t| compile(alpha.coeff(t))).collect();
        Ok(MoserSystem {
            d,
            y_positions,
            rows,
            base,
            delta,
            alpha,
        })
    }

    /// Minimum-norm `X_t(z) ∈ span(∂/∂y)` with `i_{X_t} ω_t = α`.
    fn velocity(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        let m = self.rows.len();
        let k = self.y_positions.len();
        let mut out = vec![0.0; self.d];
        if m == 0 || k == 0 {
            return Ok(out);
        }
        let mut a = DMatrix::<f64>::zeros(m, k);
        let mut b = DVector::<f64>::zeros(m);
        for r in 0..m {
            for c in 0..k {
                let dv = self.delta[r][c].as_ref().map_or(0.0, |p| p.eval(z));
                a[(r, c)] = self.base[r][c] + t * dv;
            }
            b[r] = self.alpha[r].as_ref().map_or(0.0, |p| p.eval(z));
        }
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let x = svd
            .solve(&b, smax * 1e-12)
            .map_err(|e| Error::Internal(format!("SVD solve failed: {e}")))?;
        let residual = (&a * &x - &b).norm();
        if residual > 1e-8 * (1.0 + b.norm()) {
            return Err(Error::InconsistentSystem {
                point: z.to_vec(),
                residual,
            });
        }
        for (c, &j) in self.y_positions.iter().enumerate() {
            out[j] = x[c];
        }
        Ok(out)
    }

    /// Classic RK4 from `t = 0` to `t = 1`.
    fn flow(&self, z0: &[f64], steps: usize) -> Result<Vec<f64>> {
        let h = 1.0 / steps as f64;
        let mut z = z0.to_vec();
        let axpy = |z: &[f64], k: &[f64], s: f64| -> Vec<f64> { z.iter().zip(k).map(|(a, b)| a + s * b).collect() };
        for n in 0..steps {
            let t = n as f64 * h;
            let k1 = self.velocity(t, &z)?;
            let k2 = self.velocity(t + h / 2.0, &axpy(&z, &k1, h / 2.0))?;
            let k3 = self.velocity(t + h / 2.0, &axpy(&z, &k2, h / 2.0))?;
            let k4 = self.velocity(t + h, &axpy(&z, &k3, h))?;
            for i in 0..z.len() {
                z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        Ok(z)
    }
}

fn q_point_strings(p: &[Q]) -> Vec<String> {
    p.iter().map(rational::fmt_q).collect()
}

fn probe_points(d: usize, count: usize, radius: f64, rng: &mut impl Rng) -> Vec<Vec<Q>> {
    // rational grid with spacing radius / 10
    let steps = 10i64;
    let scale = (steps as f64 / radius).round().max(1.0) as i64;
    (0..count)
        .map(|_| {
            (0..d)
                .map(|_| qf(rng.random_range(-steps..=steps), scale))
                .collect()
        })
        .collect()
}

/// Checks the hypotheses at the origin and at random rational probes:
/// constant kernel dimension and `span(∂/∂y)` maximal isotropic decomposable.
fn check_flatten_hypotheses(
    omega: &PolyForm,
    s: &CoordinateSplit,
    params: &FlattenParams,
) -> Result<()> {
    let d = omega.dimension();
    let l = s.fiber_subspace()?;
    let budget = SearchBudget::with_seed(params.seed);
    let mut rng = search::rng(params.seed);
    let mut points = vec![vec![Q::zero(); d]];
    points.extend(probe_points(d, params.probes, params.radius, &mut rng));
    let mut expected = None;
    for p in &points {
        let w = omega.eval(p)?;
        let rank = d - analysis::kernel(&w)?.dim();
        match expected {
            None => expected = Some(rank),
            Some(e) if e != rank => {
                return Err(Error::RankDrop {
                    point: q_point_strings(p),
                    rank,
                    expected: e,
                })
            }
            _ => {}
        }
    }
    for p in &points {
        let w = omega.eval(p)?;
        isotropic::certify_maximal_isotropic_decomposable(&w, &l, &budget).map_err(|e| {
            Error::precondition(format!(
                "span(∂/∂y) is not maximal isotropic decomposable at {:?}: {e}",
                q_point_strings(p)
            ))
        })?;
    }
    Ok(())
}

/// `(Φ*ω)_I(z) = Σ_K ω_K(Φ(z)) det J[K, I]`, compared against `ω₀` over all `I`.
fn pulled_back_error(
    omega: &[(IndexTuple, CompiledPoly)],
    omega0: &AlternatingForm,
    image: &[f64],
    jac: &DMatrix<f64>,
) -> f64 {
    let d = jac.nrows();
    let k = omega0.degree();
    let values: Vec<(Vec<usize>, f64)> = omega
        .iter()
        .map(|(t, p)| (t.positions().collect(), p.eval(image)))
        .collect();
    let mut err: f64 = 0.0;
    for cols in exterior::subsets(d, k) {
        let cpos: Vec<usize> = cols.positions().collect();
        let mut v = 0.0;
        for (rpos, c) in &values {
            let minor = DMatrix::from_fn(k, k, |a, b| jac[(rpos[a], cpos[b])]);
            v += c * minor.determinant();
        }
        err = err.max((v - rational::to_f64(&omega0.coeff(cols))).abs());
    }
    err
}

/// Builds the flow `Φ_t` with `(Φ₁)*ω = ω(0)` and checks it numerically at
/// random points near the origin. A result above `tol` is returned with
/// `passed = false`.
pub fn moser_flatten(omega: &PolyForm, s: &CoordinateSplit, params: &FlattenParams) -> Result<FlattenResult> {
    check_split(omega, s)?;
    if params.steps == 0 {
        return Err(Error::precondition("steps must be positive"));
    }
    let d = omega.dimension();
    let theta = poincare_homotopy(omega, s)?;
    check_flatten_hypotheses(omega, s, params)?;

    let omega0 = omega.eval(&vec![Q::zero(); d])?;
    let omega0_poly = PolyForm::from_constant(&omega0);
    let theta0 = poincare_homotopy(&omega0_poly, s)?;
    let alpha = theta0.try_sub(&theta)?;
    let system = MoserSystem::new(omega, &omega0_poly, &alpha, s)?;

    let compiled: Vec<(IndexTuple, CompiledPoly)> =
        omega.terms().map(|(t, p)| (t, CompiledPoly::new(p))).collect();
    let mut rng = search::rng(params.seed ^ 0x5eed);
    let h = params.fd_step;
    let xs: Vec<usize> = s.x_indices().iter().map(|i| i - 1).collect();
    let mut samples = Vec::with_capacity(params.samples);
    for _ in 0..params.samples {
        let z0: Vec<f64> = (0..d).map(|_| rng.random_range(-params.radius..=params.radius)).collect();
        let image = system.flow(&z0, params.steps)?;
        let mut jac = DMatrix::<f64>::zeros(d, d);
        for c in 0..d {
            // 4th-order central stencil
            let shifted = |s: f64| -> Result<Vec<f64>> {
                let mut z = z0.clone();
                z[c] += s * h;
                system.flow(&z, params.steps)
            };
            let (p2, p1, m1, m2) = (shifted(2.0)?, shifted(1.0)?, shifted(-1.0)?, shifted(-2.0)?);
            for r in 0..d {
                jac[(r, c)] = (-p2[r] + 8.0 * p1[r] - 8.0 * m1[r] + m2[r]) / (12.0 * h);
            }
        }
        let error = pulled_back_error(&compiled, &omega0, &image, &jac);
        let x_drift = xs.iter().map(|&i| (image[i] - z0[i]).abs()).fold(0.0, f64::max);
        samples.push(FlattenSample {
            point: z0,
            error,
            x_drift,
        });
    }
    let max_error = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    let max_x_drift = samples.iter().map(|s| s.x_drift).fold(0.0, f64::max);
    Ok(FlattenResult {
        omega0,
        steps: params.steps,
        step_size: 1.0 / params.steps as f64,
        samples,
        max_error,
        max_x_drift,
        tol: params.tol,
        passed: max_error <= params.tol,
        seed: params.seed,
    })
}

/// `[a, b]^i = a(b^i) − b(a^i)`.
pub fn lie_bracket(a: &PolyVectorField, b: &PolyVectorField) -> Result<PolyVectorField> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            found: b.dimension(),
        });
    }
    let comps = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(ai, bi)| a.apply(bi).sub(&b.apply(ai)))
        .collect();
    PolyVectorField::new(comps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvolutivityFailure {
    /// The bracket leaves the span at a probe point.
    NotInSpan { point: Vec<Q> },
    /// The bracket lies in the span pointwise, but only with a coefficient
    /// that is a non-polynomial rational function.
    SingularCoefficient { generator: usize, numerator: Poly, denominator: Poly },
}

#[derive(Clone, Debug)]
pub struct InvolutivityWitness {
    pub pair: (usize, usize),
    pub bracket: PolyVectorField,
    pub failure: InvolutivityFailure,
}

#[derive(Clone, Debug)]
pub struct InvolutivityResult {
    pub involutive: bool,
    pub rank: usize,
    pub probes: Vec<Vec<Q>>,
    pub witness: Option<InvolutivityWitness>,
}

fn poly_det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    match m.len() {
        0 => Poly::constant(nvars, Q::one()),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero(nvars);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&poly_det(&minor, nvars));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Frobenius check for the module generated by polynomial vector fields.
/// Every pairwise bracket must lie in the span at each probe point and be a
/// polynomial combination of the generators.
pub fn involutive(dist: &[PolyVectorField], probes: usize, seed: u64) -> Result<InvolutivityResult> {
    let Some(first) = dist.first() else {
        return Ok(InvolutivityResult {
            involutive: true,
            rank: 0,
            probes: Vec::new(),
            witness: None,
        });
    };
    let d = first.dimension();
    if let Some(v) = dist.iter().find(|v| v.dimension() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.dimension(),
        });
    }
    let mut rng = search::rng(seed);
    let points: Vec<Vec<Q>> = (0..probes.max(1))
        .map(|_| (0..d).map(|_| search::random_nonzero_rational(&mut rng, 9, 4)).collect())
        .collect();
    let gens_at = |p: &[Q]| -> Vec<Vec<Q>> { dist.iter().map(|v| v.eval(p)).collect() };
    let rank0 = linalg::rank(&gens_at(&points[0]), d);
    for p in &points[1..] {
        let r = linalg::rank(&gens_at(p), d);
        if r != rank0 {
            return Err(Error::RankDrop {
                point: q_point_strings(p),
                rank: r,
                expected: rank0,
            });
        }
    }

    // frame: independent generators and rows of a nonvanishing minor at the first probe
    let g0 = gens_at(&points[0]);
    let mut frame: Vec<usize> = Vec::new();
    for (i, row) in g0.iter().enumerate() {
        let mut trial: Vec<Vec<Q>> = frame.iter().map(|&j| g0[j].clone()).collect();
        trial.push(row.clone());
        if linalg::rank(&trial, d) == trial.len() {
            frame.push(i);
        }
    }
    let frame_rows: Vec<Vec<Q>> = frame.iter().map(|&j| g0[j].clone()).collect();
    let (_, pivots) = linalg::rref(&frame_rows, d);
    let minor_of = |cols: &[&PolyVectorField]| -> Vec<Vec<Poly>> {
        pivots
            .iter()
            .map(|&r| cols.iter().map(|v| v.components()[r].clone()).collect())
            .collect()
    };
    let frame_fields: Vec<&PolyVectorField> = frame.iter().map(|&j| &dist[j]).collect();
    let denominator = poly_det(&minor_of(&frame_fields), d);

    for i in 0..dist.len() {
        for j in i + 1..dist.len() {
            let bracket = lie_bracket(&dist[i], &dist[j])?;
            let witness = |failure| InvolutivityWitness {
                pair: (i, j),
                bracket: bracket.clone(),
                failure,
            };
            for p in &points {
                let mut rows = gens_at(p);
                rows.push(bracket.eval(p));
                if linalg::rank(&rows, d) != rank0 {
                    return Ok(InvolutivityResult {
                        involutive: false,
                        rank: rank0,
                        witness: Some(witness(InvolutivityFailure::NotInSpan { point: p.clone() })),
                        probes: points,
                    });
                }
            }
            // Cramer: c_k = N_k / D with respect to the frame
            for k in 0..frame_fields.len() {
                let mut cols = frame_fields.clone();
                cols[k] = &bracket;
                let numerator = poly_det(&minor_of(&cols), d);
                if numerator.div_exact(&denominator).is_none() {
                    return Ok(InvolutivityResult {
                        involutive: false,
                        rank: rank0,
                        witness: Some(witness(InvolutivityFailure::SingularCoefficient {
                            generator: frame[k],
                            numerator,
                            denominator: denominator.clone(),
                        })),
                        probes: points,
                    });
                }
            }
        }
    }
    Ok(InvolutivityResult {
        involutive: true,
        rank: rank0,
        probes: points,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::q;
    use crate::search::random_rational;

    fn c(d: usize, v: i64) -> Poly {
        Poly::constant(d, q(v))
    }

    fn random_poly(rng: &mut impl Rng, d: usize, deg: u32, terms: usize) -> Poly {
        let mut p = Poly::zero(d);
        for _ in 0..terms {
            let e: Vec<u32> = (0..d).map(|_| rng.random_range(0..=deg)).collect();
            p.add_monomial(e, random_rational(rng, 3, 2));
        }
        p
    }

    fn random_form(rng: &mut impl Rng, d: usize, k: usize, fiber_mask: Option<u64>) -> PolyForm {
        let mut f = PolyForm::zero(d, k);
        for t in exterior::subsets(d, k) {
            if fiber_mask.is_some_and(|m| t.mask() & m == 0) || rng.random_bool(0.4) {
                continue;
            }
            f.add_term(t, random_poly(rng, d, 2, 2));
        }
        f
    }

    #[test]
    fn d_squared_vanishes() {
        let mut rng = search::rng(1);
        for i in 0..100 {
            let theta = random_form(&mut rng, 4, 1 + i % 3, None);
            assert!(theta.d().d().is_zero());
        }
    }

    #[test]
    fn homotopy_of_dy_dx() {
        // z¹ = x, z² = y; ω = dy ∧ dx, θ = y dx
        let s = CoordinateSplit::new(2, &[1], &[2]).unwrap();
        let omega = PolyForm::monomial(2, &[2, 1], c(2, 1)).unwrap();
        let theta = poincare_homotopy(&omega, &s).unwrap();
        assert_eq!(theta, PolyForm::monomial(2, &[1], Poly::var(2, 1)).unwrap());
    }

    #[test]
    fn homotopy_inverts_d_on_random_exact_forms() {
        let mut rng = search::rng(3);
        let s = CoordinateSplit::new(5, &[1, 2], &[3, 4, 5]).unwrap();
        for k in 1..=3 {
            for _ in 0..10 {
                let theta_prime = random_form(&mut rng, 5, k, Some(s.y_mask()));
                let omega = theta_prime.d();
                if omega.is_zero() {
                    continue;
                }
                let theta = poincare_homotopy(&omega, &s).unwrap();
                assert_eq!(theta.d(), omega);
            }
        }
    }

    #[test]
    fn homotopy_rejects_bad_inputs() {
        let s = CoordinateSplit::new(2, &[1], &[2]).unwrap();
        let not_closed = PolyForm::monomial(2, &[1], Poly::var(2, 1)).unwrap();
        assert!(poincare_homotopy(&not_closed, &s).is_err());
        let leafy = PolyForm::monomial(2, &[1], c(2, 1)).unwrap();
        assert!(poincare_homotopy(&leafy, &s).is_err());
    }

    #[test]
    fn homotopy_of_constant_omega0() {
        let e = catalog::omega0(2, 1).unwrap();
        let s = CoordinateSplit::new(6, &[1, 2, 3], &[4, 5, 6]).unwrap();
        let w = PolyForm::from_constant(&e.form);
        let theta = poincare_homotopy(&w, &s).unwrap();
        assert_eq!(theta.d(), w);
        assert!(theta.terms().all(|(_, p)| p.total_degree() == 1));
    }

    #[test]
    fn split_principal_class() {
        let e = catalog::omega0(2, 1).unwrap();
        let d = 6;
        let s = CoordinateSplit::new(d, &[1, 2, 3], &[4, 5, 6]).unwrap();
        let mut rng = search::rng(5);
        let pad = PolyForm::monomial(d, &[1, 2, 3], random_poly(&mut rng, d, 2, 3)).unwrap();
        let w = PolyForm::from_constant(&e.form).try_add(&pad).unwrap();
        let (rest, leaf) = restrict_split(&w, &s).unwrap();
        assert_eq!(leaf, pad);
        let l = s.fiber_subspace().unwrap();
        let budget = SearchBudget::default();
        for _ in 0..20 {
            let p: Vec<Q> = (0..d).map(|_| random_rational(&mut rng, 3, 3)).collect();
            let a = w.eval(&p).unwrap();
            let b = rest.eval(&p).unwrap();
            assert!(isotropic::principal_class_check(&a, &b, &l, &budget).unwrap());
        }
    }

    #[test]
    fn moser_identity_on_constant_form() {
        let e = catalog::omega0(1, 1).unwrap();
        let s = CoordinateSplit::new(4, &[1, 2], &[3, 4]).unwrap();
        let w = PolyForm::from_constant(&e.form);
        let params = FlattenParams {
            samples: 5,
            ..Default::default()
        };
        let r = moser_flatten(&w, &s, &params).unwrap();
        assert!(r.passed);
        assert!(r.max_error < 1e-9, "{}", r.max_error);
        assert_eq!(r.max_x_drift, 0.0);
    }

    #[test]
    fn moser_recovers_sheared_omega0() {
        // Ω₀(1,1) on (x, q, p, p¹); shift p¹ by g¹(q), p by g⁰(x)
        let e = catalog::omega0(1, 1).unwrap();
        let d = 4;
        let z = |i| Poly::var(d, i);
        let g1 = z(1).mul(&z(1)).scaled(&q(3)).add(&z(1));
        let g0 = z(0).mul(&z(0)).scaled(&qf(-1, 2));
        let map = vec![z(0), z(1), z(2).add(&g0), z(3).add(&g1)];
        let w = PolyForm::from_constant(&e.form).pullback(&map).unwrap();
        let s = CoordinateSplit::new(d, &[1, 2], &[3, 4]).unwrap();
        let params = FlattenParams {
            samples: 10,
            ..Default::default()
        };
        let r = moser_flatten(&w, &s, &params).unwrap();
        assert!(r.passed, "max error {}", r.max_error);
        assert!(r.max_x_drift == 0.0);
    }

    #[test]
    fn moser_aborts_on_rank_drop() {
        // z¹ dz¹ ∧ dz²-type degeneration: ω = x dy ∧ dx' vanishes on x = 0
        let d = 2;
        let s = CoordinateSplit::new(d, &[1], &[2]).unwrap();
        let w = PolyForm::monomial(d, &[2, 1], Poly::var(d, 0).mul(&Poly::var(d, 0)).add(&c(d, 1)))
            .unwrap()
            .mul_poly(&Poly::var(d, 1));
        // closed (2-form in 2d) with ω(0) = 0 but nonzero elsewhere
        let err = moser_flatten(&w, &s, &FlattenParams::default()).unwrap_err();
        assert_eq!(err.kind(), "rank_drop");
    }

    #[test]
    fn brackets() {
        let d = 3;
        let e1 = PolyVectorField::coordinate(d, 0);
        let e2 = PolyVectorField::coordinate(d, 1);
        assert!(lie_bracket(&e1, &e2).unwrap().is_zero());
        let v = e2.scaled_by(&Poly::var(d, 0));
        assert_eq!(lie_bracket(&e1, &v).unwrap(), e2);
    }

    #[test]
    fn jacobi_and_antisymmetry() {
        let mut rng = search::rng(11);
        let d = 3;
        let field = |rng: &mut _| PolyVectorField::new((0..d).map(|_| random_poly(rng, d, 2, 2)).collect()).unwrap();
        for _ in 0..50 {
            let (a, b, cc) = (field(&mut rng), field(&mut rng), field(&mut rng));
            let ab = lie_bracket(&a, &b).unwrap();
            assert_eq!(ab, PolyVectorField::new(lie_bracket(&b, &a).unwrap().components().iter().map(|p| p.scaled(&q(-1))).collect()).unwrap());
            let j = lie_bracket(&a, &lie_bracket(&b, &cc).unwrap())
                .unwrap()
                .add(&lie_bracket(&b, &lie_bracket(&cc, &a).unwrap()).unwrap())
                .add(&lie_bracket(&cc, &ab).unwrap());
            assert!(j.is_zero());
        }
    }

    #[test]
    fn involutivity_verdicts() {
        let d = 3;
        let e = |i| PolyVectorField::coordinate(d, i);
        let coord = involutive(&[e(0), e(1)], 5, 7).unwrap();
        assert!(coord.involutive);
        let v = e(1).scaled_by(&Poly::var(d, 0));
        for seed in 0..5 {
            let r = involutive(&[e(0), v.clone()], 5, seed).unwrap();
            assert!(!r.involutive);
            let w = r.witness.unwrap();
            assert_eq!(w.pair, (0, 1));
            assert_eq!(w.bracket, e(1));
        }
        // ∂₁, ∂₂ + z¹∂₃: bracket ∂₃ leaves the span
        let tilted = e(1).add(&e(2).scaled_by(&Poly::var(d, 0)));
        let r = involutive(&[e(0), tilted], 5, 7).unwrap();
        assert!(matches!(r.witness.unwrap().failure, InvolutivityFailure::NotInSpan { .. }));
    }

    #[test]
    fn split_blocks_are_involutive() {
        let d = 4;
        let e = |i| PolyVectorField::coordinate(d, i);
        // L₁ = span(∂₁ + z³∂₂, ∂₂), L₂ = span(∂₃, ∂₄ + z¹∂₃)
        let l1 = vec![e(0).add(&e(1).scaled_by(&Poly::var(d, 2))), e(1)];
        let l2 = vec![e(2), e(3).add(&e(2).scaled_by(&Poly::var(d, 0)))];
        for seed in 0..5 {
            assert!(involutive(&l1, 5, seed).unwrap().involutive);
            assert!(involutive(&l2, 5, seed).unwrap().involutive);
            let sum: Vec<_> = l1.iter().chain(&l2).cloned().collect();
            assert!(involutive(&sum, 5, seed).unwrap().involutive);
        }
    }
}
