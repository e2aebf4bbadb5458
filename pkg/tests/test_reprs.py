import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cbfourier.catalog import construct_builtin
from cbfourier.groups import ElementSet, cyclic_group, direct_product, symmetric_group, trivial_group
from cbfourier.reprs import (
    FunctionOnGroup,
    a_norm,
    a_norm_many,
    a_norm_oracle,
    compute_irreps,
    delta,
    fourier_transform,
    indicator,
    inverse_fourier,
    is_positive_definite,
    product_irreps,
    regular_representations,
)

GROUPS = construct_builtin()
BY_NAME = {G.name: G for G in GROUPS}
HALF_ONE_PLUS_ROOT2 = (1 + np.sqrt(2)) / 2


def dft_norm(u):
    """Cyclic group oracle: ||u||_A = (1/n) sum_k |sum_m u(m) w^{km}|."""
    return np.abs(np.fft.fft(u)).sum() / len(u)


def test_regular_representation_examples():
    lam, rho = regular_representations(trivial_group())
    assert lam.shape == (1, 1, 1) and lam[0, 0, 0] == 1 and rho[0, 0, 0] == 1
    lam, _ = regular_representations(cyclic_group(2))
    assert np.array_equal(lam[1], [[0, 1], [1, 0]])
    S3 = symmetric_group(3)
    lam, rho = regular_representations(S3)
    for s, t in itertools.product(range(6), repeat=2):
        assert np.array_equal(lam[s] @ rho[t], rho[t] @ lam[s])
        assert np.array_equal(lam[s] @ lam[t], lam[S3.mul(s, t)])


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_irreps_are_unitary_irreducible_and_complete(G):
    ir = compute_irreps(G)
    assert sum(d * d for d in ir.dims) == G.order
    res = ir.residuals()
    assert max(res.values()) < 1e-9
    chi = ir.character_table()
    # orthonormal characters
    gram = chi.conj() @ chi.T / G.order
    assert np.allclose(gram, np.eye(len(ir)), atol=1e-9)
    assert np.allclose(ir.irreps[0], 1)  # trivial first


def test_irrep_dimension_multisets():
    dims = {G.name: sorted(compute_irreps(G).dims) for G in GROUPS}
    assert dims["S3"] == [1, 1, 2]
    assert dims["D4"] == [1, 1, 1, 1, 2] and dims["Q8"] == [1, 1, 1, 1, 2]
    assert dims["A4"] == [1, 1, 1, 3]
    assert dims["Z12"] == [1] * 12


def test_z4_characters():
    ir = compute_irreps(BY_NAME["Z4"])

    def key(vals):
        return tuple((round(v.real, 9) + 0.0, round(v.imag, 9) + 0.0) for v in vals)

    got = {key(r[:, 0, 0]) for r in ir.irreps}
    want = {key([1j ** (k * n) for n in range(4)]) for k in range(4)}
    assert got == want


def test_fourier_examples():
    Z4 = BY_NAME["Z4"]
    c = fourier_transform(indicator(ElementSet(Z4, (0, 1))))
    vals = sorted((round(b[0, 0].real, 12) + 0.0, round(b[0, 0].imag, 12) + 0.0) for b in c.blocks)
    assert vals == sorted([(2, 0), (1, 1), (0, 0), (1, -1)])
    Z2 = BY_NAME["Z2"]
    c = fourier_transform(FunctionOnGroup(Z2, np.ones(2)))
    assert sorted(b[0, 0].real for b in c.blocks) == [0, 2]
    for G in (BY_NAME["S3"], BY_NAME["A4"]):
        for b in fourier_transform(delta(G, G.identity)).blocks:
            assert np.allclose(b, np.eye(b.shape[0]))


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_inverse_fourier_round_trip(G):
    rng = np.random.default_rng(G.order)
    u = FunctionOnGroup(G, rng.normal(size=G.order) + 1j * rng.normal(size=G.order))
    back = inverse_fourier(fourier_transform(u), compute_irreps(G))
    assert u.allclose(back, 1e-10)


def test_norm_examples():
    Z4 = BY_NAME["Z4"]
    assert abs(a_norm(indicator(ElementSet(Z4, (0, 1)))).a_norm - HALF_ONE_PLUS_ROOT2) < 1e-12
    for G in GROUPS:
        one = a_norm(FunctionOnGroup(G, np.ones(G.order)))
        assert abs(one.a_norm - 1) < 1e-9 and one.is_positive_definite
        assert abs(a_norm(delta(G, G.identity)).a_norm - 1) < 1e-9


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 12])
def test_cyclic_norm_matches_dft(n):
    G = cyclic_group(n)
    rng = np.random.default_rng(n)
    U = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
    got = a_norm_many(U, compute_irreps(G))
    assert np.allclose(got, [dft_norm(u) for u in U], atol=1e-10)


def test_product_irreps_norm_multiplicative():
    Z3, S3 = cyclic_group(3), symmetric_group(3)
    GH = direct_product(S3, Z3)
    pi = product_irreps(compute_irreps(S3), compute_irreps(Z3), GH)
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=6), rng.normal(size=3)
    w = np.outer(u, v).ravel()  # w(g, h) = u(g) v(h), index g*|H|+h
    nu = a_norm(FunctionOnGroup(S3, u)).a_norm
    nv = a_norm(FunctionOnGroup(Z3, v)).a_norm
    assert abs(a_norm_many(w[None], pi)[0] - nu * nv) < 1e-9
    assert abs(a_norm_many(w[None], pi)[0] - a_norm(FunctionOnGroup(GH, w)).a_norm) < 1e-9


def test_positive_definite_examples():
    Z4 = BY_NAME["Z4"]
    assert is_positive_definite(indicator(ElementSet(Z4, (0, 2))))
    assert is_positive_definite(delta(Z4, 0))
    assert not is_positive_definite(indicator(ElementSet(Z4, (1, 3))))


@pytest.mark.parametrize("name", ["Z4", "S3", "Q8"])
def test_oracle_examples(name):
    G = BY_NAME[name]
    for u, want in [(delta(G, G.identity), 1.0), (FunctionOnGroup(G, np.ones(G.order)), 1.0)]:
        r = a_norm_oracle(u)
        assert abs(r.value - want) < 1e-6 and r.lower <= r.upper + 1e-9
    if name == "Z4":
        r = a_norm_oracle(indicator(ElementSet(G, (0, 1))))
        assert abs(r.value - HALF_ONE_PLUS_ROOT2) < 1e-6


# -- properties ---------------------------------------------------------------

PROP_GROUPS = [BY_NAME[n] for n in ("Z6", "S3", "D4", "Q8", "A4")]
vals = st.lists(st.floats(-3, 3, allow_nan=False), min_size=24, max_size=24)


@pytest.mark.parametrize("G", PROP_GROUPS, ids=lambda G: G.name)
@settings(max_examples=40, deadline=None)
@given(a=vals, b=vals, s=st.integers(0, 11))
def test_banach_algebra_properties(G, a, b, s):
    n = G.order
    ir = compute_irreps(G)
    u = FunctionOnGroup(G, np.array(a[:n]) + 1j * np.array(a[-n:]))
    v = FunctionOnGroup(G, np.array(b[:n]))
    nu, nv = a_norm(u, ir).a_norm, a_norm(v, ir).a_norm
    tol = 1e-9 * (1 + nu * nv)
    assert a_norm(u * v, ir).a_norm <= nu * nv + tol
    assert np.abs(u.values).max() <= nu + tol
    assert nu <= np.abs(u.values).sum() + tol  # point masses have norm one
    sv = s % n
    assert abs(a_norm(u.translate(sv), ir).a_norm - nu) <= tol
    assert abs(a_norm(FunctionOnGroup(G, u.values[G.inverses]), ir).a_norm - nu) <= tol


@pytest.mark.parametrize("G", PROP_GROUPS, ids=lambda G: G.name)
@settings(max_examples=30, deadline=None)
@given(a=vals)
def test_positive_definite_norm_is_value_at_identity(G, a):
    # u = f * f~ (convolution with the involution) is positive definite
    n = G.order
    f = np.array(a[:n])
    u = np.zeros(n)
    for s, t in itertools.product(range(n), repeat=2):
        u[G.mul(s, G.inv(t))] += f[s] * f[t]
    fu = FunctionOnGroup(G, u)
    assert is_positive_definite(fu, 1e-7)
    assert abs(a_norm(fu).a_norm - u[G.identity]) <= 1e-8 * (1 + abs(u[G.identity]))
