//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use isodec::analysis::{self, LowerBoundSource};
use isodec::catalog::{self, CatalogEntry};
use isodec::exterior::{self, AlternatingForm, Subspace, Vector};
use isodec::flatten::{self, CoordinateSplit, FlattenParams};
use isodec::isotropic::{self, ComplementMethod, VerticalData};
use isodec::linalg;
use isodec::poly::{Poly, PolyForm, PolyVectorField};
use isodec::rational::{q, Q};
use isodec::search::{self, random_rational, SearchBudget};
use rand::Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn r11_reproduction() -> Outcome {
    let start = Instant::now();
    let e = catalog::example_r11().unwrap();
    let default_budget = SearchBudget::default();
    let mut certified = Vec::new();
    for (name, span) in catalog::example_r11_spans().unwrap() {
        let ok = isotropic::certify_maximal_isotropic_decomposable(&e.form, &span, &default_budget).is_ok();
        certified.push(format!("{name}:{ok}"));
        if !ok {
            return outcome(false, format!("span {name} not certified"));
        }
    }
    let budget = SearchBudget {
        coeff_bound: 2,
        random_trials: 10_000,
        seed: search::DEFAULT_SEED,
    };
    let nl = isotropic::frak_n_l(&e.form, &e.l, e.f.as_ref().unwrap(), &budget).unwrap();
    let elapsed = start.elapsed();
    let ok = nl.count_standard == 4 && nl.best_count == 4 && nl.value_upper == 1 && within(elapsed, 60);
    outcome(
        ok,
        format!(
            "spans [{}], standard count {}, best count over {} bases {}, upper bound {} ({:.1}s)",
            certified.join(", "),
            nl.count_standard,
            nl.bases_tried,
            nl.best_count,
            nl.value_upper,
            elapsed.as_secs_f64()
        ),
    )
}

fn canonical_forms() -> Outcome {
    let start = Instant::now();
    let budget = SearchBudget::default();
    for (n, big_n) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        let e = catalog::omega0(n, big_n).unwrap();
        let fail = |what: &str| outcome(false, format!("Ω₀({n},{big_n}): {what}"));
        if analysis::kernel(&e.form).unwrap().dim() != 0 {
            return fail("kernel not trivial");
        }
        let Some(len) = isotropic::structural_length(&e.form, &e.l, &budget).unwrap() else {
            return fail("no structural length");
        };
        if !(len.certified && len.lower == big_n * n + 1 && len.upper == len.lower) {
            return fail("length not certified at Nn+1");
        }
        let iso = analysis::classify_isotropy(&e.l, &e.form, 1).unwrap();
        if !(iso.is_maximal && iso.k_orthogonal == e.l) {
            return fail("L ≠ L^{ω,1}");
        }
        let v = e.v.as_ref().unwrap();
        let viso = analysis::classify_isotropy(&v.v, &e.form, 2).unwrap();
        if !(viso.is_k_isotropic && viso.is_strict) {
            return fail("V not strict 2-isotropic");
        }
        let nl = isotropic::frak_n_l(&e.form, &e.l, e.f.as_ref().unwrap(), &budget).unwrap();
        if !(nl.certified_zero_gap && nl.value_upper == 0 && nl.value_lower == 0) {
            return fail("𝔑_L not certified 0");
        }
        let rep = isotropic::canonical_representation(&e.form, &e.l, &nl.witness_basis).unwrap();
        if rep.reconstruct() != e.form {
            return fail("reconstruction differs");
        }
    }
    let elapsed = start.elapsed();
    outcome(
        within(elapsed, 10),
        format!("4 cases exact, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn transform(entry: &CatalogEntry, m: &[Vec<Q>]) -> (AlternatingForm, Subspace, Option<VerticalData>) {
    let d = entry.form.dimension();
    let inv = linalg::inverse(&m.to_vec()).expect("unimodular");
    let form = entry.form.pullback(&m.to_vec(), d).unwrap();
    let pull = |s: &Subspace| {
        let vs: Vec<Vector> = s
            .basis_vectors()
            .iter()
            .map(|v| Vector::new(linalg::mat_vec(&inv, &v.coords)))
            .collect();
        Subspace::span(d, &vs).unwrap()
    };
    let l = pull(&entry.l);
    let v = entry.v.as_ref().map(|v| VerticalData { v: pull(&v.v), r: v.r });
    (form, l, v)
}

fn complement_suite() -> Outcome {
    let sources: Vec<CatalogEntry> = vec![
        catalog::omega0(1, 1).unwrap(),
        catalog::omega0(2, 1).unwrap(),
        catalog::omega0(1, 2).unwrap(),
        catalog::omega0(2, 2).unwrap(),
        catalog::example_r11().unwrap(),
        catalog::max_dim_example(1, 2).unwrap(),
        catalog::max_dim_example(2, 1).unwrap(),
        catalog::omega0_constrained(2, 2, &[(1, 1), (2, 2)].into_iter().collect::<BTreeSet<_>>()).unwrap(),
        catalog::direct_sum(&catalog::omega0(1, 1).unwrap(), &catalog::omega0(1, 1).unwrap()).unwrap(),
    ];
    let mut rng = search::rng(2024);
    let budget = SearchBudget::default();
    let mut failures = Vec::new();
    let mut with_v = 0;
    for i in 0..200 {
        let entry = &sources[i % sources.len()];
        let m = search::random_unimodular(&mut rng, entry.form.dimension(), 2);
        let (form, l, v) = transform(entry, &m);
        with_v += usize::from(v.is_some());
        let res = isotropic::complement_n_isotropic(&form, &l, v.as_ref(), ComplementMethod::Auto, &budget);
        match res {
            Ok(r) => {
                let checks = isotropic::verify_complement(&form, &l, &r.f_basis, v.as_ref()).unwrap();
                if !checks.all_hold() {
                    failures.push(format!("#{i} {}: {:?}", entry.name, checks));
                }
            }
            Err(e) => failures.push(format!("#{i} {}: {e}", entry.name)),
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("200 instances ({with_v} with V), all postconditions verified")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn random_exact_form(rng: &mut impl Rng, s: &CoordinateSplit, k: usize) -> PolyForm {
    let d = s.dimension();
    let all: Vec<usize> = (0..d).collect();
    let mut theta = PolyForm::zero(d, k);
    for t in exterior::subsets(d, k) {
        if t.mask() & s.y_mask() == 0 || rng.random_bool(0.5) {
            continue;
        }
        theta.add_term(t, common::random_poly_in(rng, d, &all, 3, 2));
    }
    theta.d()
}

fn homotopy_exactness() -> Outcome {
    let mut rng = search::rng(99);
    let mut checked = 0;
    let mut failures = 0;
    while checked < 100 {
        let d = rng.random_range(2..=5);
        let ny = rng.random_range(1..d);
        let x: Vec<usize> = (1..=d - ny).collect();
        let y: Vec<usize> = (d - ny + 1..=d).collect();
        let s = CoordinateSplit::new(d, &x, &y).unwrap();
        let k = rng.random_range(0..d);
        let omega = random_exact_form(&mut rng, &s, k);
        if omega.is_zero() {
            continue;
        }
        checked += 1;
        match flatten::poincare_homotopy(&omega, &s) {
            Ok(theta) if theta.d() == omega => {}
            _ => failures += 1,
        }
    }
    outcome(failures == 0, format!("{checked} closed forms, {failures} failures, zero tolerance"))
}

fn moser_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = search::rng(5);
    let (omega, split, _) = common::sheared_omega0(2, &mut rng);
    let params = FlattenParams::default();
    let coarse = flatten::moser_flatten(&omega, &split, &params).unwrap();
    let fine = flatten::moser_flatten(
        &omega,
        &split,
        &FlattenParams {
            steps: 400,
            ..params.clone()
        },
    )
    .unwrap();
    let elapsed = start.elapsed();
    // monotone within the finite-difference noise floor
    let noise = 1e-10;
    let ok = coarse.samples.len() == 50
        && coarse.max_error <= 1e-6
        && coarse.max_x_drift <= 1e-9
        && fine.max_error <= coarse.max_error + noise
        && within(elapsed, 120);
    outcome(
        ok,
        format!(
            "max error {:.2e} (100 steps) → {:.2e} (400 steps), x drift {:.1e}, {:.1}s",
            coarse.max_error,
            fine.max_error,
            coarse.max_x_drift,
            elapsed.as_secs_f64()
        ),
    )
}

fn random_form(rng: &mut impl Rng, d: usize, k: usize, density: f64) -> AlternatingForm {
    let mut terms: Vec<(Vec<usize>, Q)> = Vec::new();
    for t in exterior::subsets(d, k) {
        if rng.random_bool(density) {
            terms.push((t.indices(), random_rational(rng, 4, 3)));
        }
    }
    AlternatingForm::from_terms(d, k, terms).unwrap()
}

fn length_oracle() -> Outcome {
    let mut rng = search::rng(31);
    let budget = SearchBudget::default();
    let mut bad = Vec::new();
    for i in 0..100 {
        let d = rng.random_range(2..=8);
        let density = rng.random_range(0.1..0.9);
        let beta = random_form(&mut rng, d, 2, density);
        let b = analysis::length_bounds(&beta, &budget);
        let expected = analysis::skew_rank(&beta) / 2;
        if !(b.certified && b.lower == expected && b.upper == expected) {
            bad.push(format!("#{i}: {:?} vs {expected}", (b.lower, b.upper, b.lower_source == LowerBoundSource::SkewRank)));
        }
    }
    outcome(bad.is_empty(), format!("100 random 2-forms, {} mismatches", bad.len()))
}

fn sign(neg: bool) -> Q {
    if neg {
        q(-1)
    } else {
        q(1)
    }
}

fn algebra_invariants() -> Outcome {
    let mut rng = search::rng(17);
    let cases = 1000;
    let mut failures: Vec<&str> = Vec::new();
    for _ in 0..cases {
        let d = rng.random_range(1..=7);
        let p = rng.random_range(0..=d);
        let r = rng.random_range(0..=d - p);
        let a = random_form(&mut rng, d, p, 0.5);
        let b = random_form(&mut rng, d, r, 0.5);
        let v = analysis::random_vector(&mut rng, d);

        let ab = a.wedge(&b).unwrap();
        if ab != b.wedge(&a).unwrap().scaled(&sign(p * r % 2 == 1)) {
            failures.push("anticommutativity");
        }
        if p + r >= 1 {
            let lhs = ab.contract(&v).unwrap();
            let mut rhs = AlternatingForm::zero(d, p + r - 1);
            if p >= 1 {
                rhs = &rhs + &a.contract(&v).unwrap().wedge(&b).unwrap();
            }
            if r >= 1 {
                rhs = &rhs + &a.wedge(&b.contract(&v).unwrap()).unwrap().scaled(&sign(p % 2 == 1));
            }
            if lhs != rhs {
                failures.push("antiderivation");
            }
        }
        if p >= 2 && !a.contract(&v).unwrap().contract(&v).unwrap().is_zero() {
            failures.push("i_v∘i_v");
        }
        let rows: Vec<Vec<Q>> = (0..rng.random_range(0..=d))
            .map(|_| analysis::random_vector(&mut rng, d).coords)
            .collect();
        let s = Subspace::new(d, false, &rows).unwrap();
        if s.annihilator().annihilator() != s {
            failures.push("annihilator involution");
        }
        if p >= 1 && analysis::support(&a) != analysis::kernel(&a).unwrap().annihilator() {
            failures.push("support/kernel duality");
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{cases} random cases × 5 identities, exact")
        } else {
            format!("{} violations, first: {}", failures.len(), failures[0])
        },
    )
}

fn involutivity() -> Outcome {
    let d = 3;
    let e = |i| PolyVectorField::coordinate(d, i);
    let twisted = e(1).scaled_by(&Poly::var(d, 0));
    for seed in 0..5 {
        let blocks = [vec![e(0), e(1)], vec![e(2)], vec![e(0), e(1), e(2)]];
        for b in &blocks {
            if !flatten::involutive(b, 6, seed).unwrap().involutive {
                return outcome(false, format!("coordinate block rejected at seed {seed}"));
            }
        }
        let r = flatten::involutive(&[e(0), twisted.clone()], 6, seed).unwrap();
        let ok = !r.involutive && r.witness.as_ref().is_some_and(|w| w.bracket == e(1) && w.pair == (0, 1));
        if !ok {
            return outcome(false, format!("span(∂₁, z¹∂₂) verdict wrong at seed {seed}"));
        }
    }
    outcome(true, "coordinate blocks involutive; span(∂₁, z¹∂₂) rejected with [∂₁, z¹∂₂] = ∂₂; 5 seeds")
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 R^11 example reproduction", r11_reproduction),
        ("2 canonical forms", canonical_forms),
        ("3 complement property suite", complement_suite),
        ("4 Poincaré homotopy exactness", homotopy_exactness),
        ("5 Moser flattening oracle", moser_oracle),
        ("6 length oracle", length_oracle),
        ("7 algebra invariants", algebra_invariants),
        ("8 involutivity checker", involutivity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        println!("criterion {name}: {} — {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
