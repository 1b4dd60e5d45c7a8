"""Smoke test for the isodec Python extension.

Build and install first:  maturin build --release -m crates/python/Cargo.toml
and pip-install the produced wheel, then run  python python/smoke_test.py
"""

import json

import isodec_py as iso


def check_algebra():
    a = iso.Form(3, 1, [([1], "1")])
    b = iso.Form(3, 1, [([2], "1/2")])
    ab = a.wedge(b)
    assert ab.terms() == [([1, 2], "1/2")], ab.terms()
    assert (ab + b.wedge(a)).is_zero()
    assert ab.is_decomposable()
    assert ab.kernel().dim == 1
    assert ab.contract(["1", "0", "0"]).terms() == [([2], "1/2")]
    symplectic = iso.Form(4, 2, [([1, 2], "1"), ([3, 4], "1")])
    assert not symplectic.is_decomposable()
    assert json.loads(symplectic.length_bounds())["upper"] == 2


def check_pipeline():
    form, l, v, r, _ = iso.catalog("omega0:2,2")
    assert (form.dimension, form.degree) == (9, 3)
    assert iso.is_k_isotropic(form, l, 2)
    f = iso.complement(form, l, v, r, seed=7)
    assert f.dim + l.dim == form.dimension
    nl = json.loads(iso.nl(form, l, f))
    assert nl["value_upper"] == 0
    rep = json.loads(iso.canonical(form, l, f))
    assert rep["certified"] and rep["length"] == 5, rep["length"]
    again = iso.Form.from_json(form.to_json())
    assert again == form


def check_errors():
    try:
        iso.Form(3, 2, [([1, 4], "1")])
    except iso.IsodecError as e:
        assert str(e).startswith("invalid_index"), e
    else:
        raise AssertionError("out-of-range index accepted")


def check_flatten_and_frobenius():
    form = {
        "dimension": 4,
        "degree": 2,
        "terms": [
            {"indices": [2, 3], "monomials": [
                {"exponents": [0, 0, 0, 0], "coeff": "1"},
                {"exponents": [1, 0, 0, 0], "coeff": "1"}]},
            {"indices": [1, 4], "monomials": [{"exponents": [0, 0, 0, 0], "coeff": "1"}]},
            {"indices": [1, 3], "monomials": [{"exponents": [0, 1, 0, 0], "coeff": "1"}]},
        ],
    }
    res = json.loads(iso.flatten_form(json.dumps(form), [1, 2], [3, 4], samples=8))
    assert res["passed"] and res["max_error"] < 1e-6, res["max_error"]

    one = [{"exponents": [0, 0], "coeff": "1"}]
    z1 = [{"exponents": [1, 0], "coeff": "1"}]
    dist = {"dimension": 2, "fields": [
        {"dimension": 2, "components": [{"monomials": one}, {"monomials": []}]},
        {"dimension": 2, "components": [{"monomials": []}, {"monomials": z1}]},
    ]}
    out = json.loads(iso.involutive(json.dumps(dist)))
    assert out["involutive"] is False and out["witness"]["pair"] == [1, 2]


if __name__ == "__main__":
    check_algebra()
    check_pipeline()
    check_errors()
    check_flatten_and_frobenius()
    print(f"isodec {iso.__version__}: python smoke test passed")
