#![allow(dead_code)]

use isodec::catalog;
use isodec::flatten::{restrict_split, CoordinateSplit};
use isodec::poly::{Poly, PolyForm};
use isodec::rational::qf;
use rand::Rng;

/// Random polynomial of total degree ≤ `deg` in the listed variables.
pub fn random_poly_in(rng: &mut impl Rng, d: usize, vars: &[usize], deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(d);
    for _ in 0..terms {
        let mut e = vec![0u32; d];
        let mut budget = rng.random_range(0..=deg);
        while budget > 0 {
            e[vars[rng.random_range(0..vars.len())]] += 1;
            budget -= 1;
        }
        p.add_monomial(e, qf(rng.random_range(-3..=3), rng.random_range(1..=3)));
    }
    p
}

/// `ω = Φ*Ω₀(n, 1)` for `Φ` shifting every momentum by a polynomial of
/// degree ≤ 2 in `(x, q)`. The shift of `p` is solved from the others so that
/// the leaves `{p = const, p^μ = const}` stay isotropic (`ω_F = 0`).
pub fn sheared_omega0(n: usize, rng: &mut impl Rng) -> (PolyForm, CoordinateSplit, Vec<Poly>) {
    let entry = catalog::omega0(n, 1).expect("catalog entry");
    let d = entry.form.dimension();
    let base: Vec<usize> = (0..=n).collect(); // x^1..x^n, q
    let q_pos = n;
    let p_pos = n + 1;
    let omega0 = PolyForm::from_constant(&entry.form);
    let mut map: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
    for m in map.iter_mut().skip(p_pos + 1) {
        *m = m.add(&random_poly_in(rng, d, &base, 2, 3));
    }
    let leaf = |map: &[Poly]| {
        let w = omega0.pullback(map).expect("pullback");
        let s = split(n, d);
        restrict_split(&w, &s).expect("split").1
    };
    let residual = leaf(&map);
    let x_tuple = isodec::IndexTuple::from_positions(base.iter().copied());
    assert!(residual.terms().all(|(t, _)| t == x_tuple));
    let primitive = residual.coeff(x_tuple).antiderivative(q_pos);
    let mut chosen = None;
    for sign in [1, -1] {
        let mut trial = map.clone();
        trial[p_pos] = Poly::var(d, p_pos).add(&primitive.scaled(&qf(sign, 1)));
        if leaf(&trial).is_zero() {
            chosen = Some(trial);
            break;
        }
    }
    let map = chosen.expect("a shift of p cancels the leaf part");
    let w = omega0.pullback(&map).expect("pullback");
    (w, split(n, d), map)
}

pub fn split(n: usize, d: usize) -> CoordinateSplit {
    let x: Vec<usize> = (1..=n + 1).collect();
    let y: Vec<usize> = (n + 2..=d).collect();
    CoordinateSplit::new(d, &x, &y).expect("split")
}
