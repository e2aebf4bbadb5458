"""Acceptance suite: one PASS/FAIL line per criterion.

Each test records its verdict in ``VERDICTS``; ``conftest.py`` prints them
again after the run, so the lines appear even when output is captured.
Run just this file with ``pytest -s tests/test_acceptance.py``.
"""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from cbfourier.catalog import construct_builtin
from cbfourier.cb import (
    adjoint,
    cb_norm,
    choi_min_eigenvalue,
    function_map_cb,
    identity_function_map,
    identity_map,
    multiplication_map,
    tensor_with_identity,
    transpose_map,
)
from cbfourier.errors import NotContractive
from cbfourier.groups import ElementSet, PartialMap, automorphisms, is_affine, is_isomorphism
from cbfourier.lab import (
    SAEKI_BOUND,
    approximate_diagonal,
    build_phi_alpha,
    extract_alpha,
    idempotent_scan,
    range_characterization,
    walter_classify,
)
from cbfourier.lattice import COVERED, coset, coset_contains, covering_witness
from cbfourier.piecewise import CosetRingSet, Piece, graph_decompose
from cbfourier.reprs import FunctionOnGroup, a_norm_many, a_norm_oracle, compute_irreps, indicator
from cbfourier.scan import exhaustive_theorem_scan, scan_pairs
from helpers import box, random_piecewise, random_thin_family

GROUPS = construct_builtin()
BY_NAME = {G.name: G for G in GROUPS}
FROZEN = json.loads((Path(__file__).parent / "data" / "scan_counts.json").read_text())

# tolerances
IDEMPOTENT_TOL = 1e-6
SAEKI_TOL = 1e-6
SAEKI_WITNESS_TOL = 1e-9
ORACLE_TOL = 1e-6
CB_TOL = 1e-3
CHOI_TOL = 1e-9
DIAGONAL_TOL = 1e-9
IDENTITY_TOL = 1e-6
GAP_TOL = 1e-3

EVEN_ODD = CosetRingSet((Piece(coset((0, 0), [(2, 2)])), Piece(coset((1, 2), [(2, 2)]))), 2)

VERDICTS: dict[int, tuple[str, bool, str]] = {}


def verdict(n, title, passed, detail):
    VERDICTS[n] = (title, bool(passed), detail)
    print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {n}: {title} ({detail})")
    assert passed, f"criterion {n} failed: {detail}"


@pytest.fixture(scope="module")
def scans():
    t0 = time.perf_counter()
    out = [exhaustive_theorem_scan(G, H) for G, H in scan_pairs(GROUPS)]
    return out, time.perf_counter() - t0


def cp_maps(scans):
    for s in scans:
        G, H = BY_NAME[s.G], BY_NAME[s.H]
        for code in s.cp_maps:
            yield PartialMap.from_array(H, G, code)


def test_criterion_01_idempotent_classification():
    t0 = time.perf_counter()
    bad, subsets = [], 0
    for G in GROUPS:
        sc = idempotent_scan(G, tol=IDEMPOTENT_TOL)
        subsets += len(sc.reports)
        bad += [(G.name, v) for v in sc.violations]
    dt = time.perf_counter() - t0
    verdict(1, "norm one iff coset, positive definite iff subgroup", not bad and dt < 60,
            f"{subsets} subsets over {len(GROUPS)} groups, {len(bad)} violations, {dt:.1f} s")


def test_criterion_02_saeki_gap():
    worst = np.inf
    for G in GROUPS:
        if G.is_abelian():
            m = idempotent_scan(G).min_noncoset_norm()
            if m is not None:
                worst = min(worst, m)
    Z4 = BY_NAME["Z4"]
    w = float(a_norm_many(indicator(ElementSet(Z4, (0, 1))).values[None], compute_irreps(Z4))[0])
    ok = worst >= SAEKI_BOUND - SAEKI_TOL and abs(w - SAEKI_BOUND) <= SAEKI_WITNESS_TOL
    verdict(2, "non-coset idempotents of abelian groups have norm >= (1+sqrt2)/2", ok,
            f"smallest {worst:.12f}, witness {w:.15f}, target {SAEKI_BOUND:.15f}")


@pytest.mark.slow
def test_criterion_03_norm_oracle():
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for G in GROUPS:
        n = G.order
        ir = compute_irreps(G)
        rng = np.random.default_rng(1000 + n)
        rand = rng.normal(size=(100, n)) + 1j * rng.normal(size=(100, n))
        masks = np.arange(1, 1 << n)
        idem = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
        U = np.vstack([rand, idem])
        fast = a_norm_many(U, ir)
        for u, a in zip(U, fast):
            r = a_norm_oracle(FunctionOnGroup(G, u))
            worst = max(worst, abs(r.lower - a), abs(r.upper - a))
            count += 1
    verdict(3, "irrep formula agrees with trace-norm oracle", worst <= ORACLE_TOL,
            f"{count} functions, worst deviation {worst:.2e}, {time.perf_counter() - t0:.0f} s")


@pytest.mark.slow
def test_criterion_04_affine_and_homomorphism(scans):
    results, _ = scans
    upper = max(s.max_affine_upper for s in results)
    eig = np.inf
    homs = 0
    for pm in cp_maps(results):
        if len(pm.domain) == 0:
            continue
        homs += 1
        eig = min(eig, choi_min_eigenvalue(adjoint(build_phi_alpha(pm)).full_map()))
    ok = upper <= 1 + CB_TOL and eig >= -CHOI_TOL and homs == sum(s.subgroup_hom for s in results)
    verdict(4, "affine maps have cb <= 1, homomorphisms have PSD Choi", ok,
            f"max affine upper {upper:.9f}, {homs} homomorphisms, min Choi eigenvalue {eig:.2e}")


@pytest.mark.slow
def test_criterion_05_exhaustive_scan(scans):
    results, dt = scans
    total = sum(s.total for s in results)
    bad = [f"{s.G} {s.H}" for s in results if not s.consistent]
    drift = [f"{s.G} {s.H}" for s in results
             if {k: getattr(s, k) for k in FROZEN[f"{s.G} {s.H}"]} != FROZEN[f"{s.G} {s.H}"]]
    verdict(5, "cc iff affine and cp iff homomorphism on every scanned map",
            len(results) == len(FROZEN) and not bad and not drift and dt < 600,
            f"{len(results)} pairs, {total} maps, {len(bad)} inconsistent pairs, "
            f"{len(drift)} count changes, {dt:.0f} s")


@pytest.mark.slow
def test_criterion_06_composition_bound(scans):
    results, _ = scans
    viol = sum(s.bound_violations for s in results)
    ratio = max(s.max_bound_ratio for s in results)
    verdict(6, "cb upper <= n * sum of piece norms for the singleton decomposition", viol == 0,
            f"{viol} violations, largest upper/bound ratio {ratio:.6f}")


def test_criterion_07_diagonal():
    bad = []
    for G in GROUPS:
        d = approximate_diagonal(G)
        if not (d.is_diagonal_indicator and d.is_positive_definite and abs(d.norm - 1) <= DIAGONAL_TOL):
            bad.append(G.name)
    verdict(7, "diagonal indicator is positive definite with norm one", not bad,
            f"{len(GROUPS)} groups, failures: {bad or 'none'}")


@pytest.mark.slow
def test_criterion_08_amplified_choi(scans):
    results, _ = scans
    worst, maps = np.inf, 0
    for pm in cp_maps(results):
        full = adjoint(build_phi_alpha(pm)).full_map()
        maps += 1
        for k in (1, 2, 3):
            worst = min(worst, choi_min_eigenvalue(tensor_with_identity(full, k)))
    control = [choi_min_eigenvalue(tensor_with_identity(transpose_map(2), k)) for k in (1, 2, 3)]
    ok = worst >= -CHOI_TOL and all(c < -CHOI_TOL for c in control)
    verdict(8, "cp maps stay cp after tensoring with M_k, transpose does not", ok,
            f"{maps} cp maps x k=1..3, min eigenvalue {worst:.2e}, transpose control {control}")


def test_criterion_09_cb_sanity():
    ids = [cb_norm(identity_map(k)) for k in (1, 2, 3)] + [function_map_cb(identity_function_map(BY_NAME["S3"]))]
    id_ok = all(abs(b.lower - 1) <= IDENTITY_TOL and abs(b.upper - 1) <= IDENTITY_TOL for b in ids)
    t = cb_norm(transpose_map(2))
    t_ok = t.contains(2.0) and t.relative_gap <= GAP_TOL
    m = function_map_cb(multiplication_map(indicator(ElementSet(BY_NAME["Z4"], (0, 1)))))
    m_ok = m.contains(SAEKI_BOUND) and m.relative_gap <= GAP_TOL
    verdict(9, "cb sandwiches for identity, transpose and an idempotent multiplier", id_ok and t_ok and m_ok,
            f"transpose [{t.lower:.6f}, {t.upper:.6f}], multiplier [{m.lower:.6f}, {m.upper:.6f}]")


def test_criterion_10_lattice_machinery():
    round_trips = 0
    for i in range(50):
        dim = 1 if i < 25 else 2
        S, truth = random_piecewise(np.random.default_rng(5000 + i), dim, codim=dim, max_index=8)
        f = graph_decompose(S, dim)
        X = box(dim, 50)
        d0, v0 = truth(X)
        d1, v1 = f.evaluate_many(X)
        round_trips += bool(np.array_equal(d0, d1) and np.array_equal(v0[d0], v1[d1]))
    covers = 0
    for i in range(50):
        fam = random_thin_family(np.random.default_rng(6000 + i))
        w = covering_witness(fam, 2)
        covers += w != COVERED and not any(coset_contains(c, w) for c in fam)
    pieces = len(graph_decompose(EVEN_ODD, 1).pieces)
    verdict(10, "graph decomposition, covering witnesses, even/odd example",
            round_trips == 50 and covers == 50 and pieces == 2,
            f"{round_trips}/50 round trips, {covers}/50 witnesses, even/odd pieces {pieces}")


@pytest.mark.slow
def test_criterion_11_round_trips(scans):
    results, _ = scans
    rng = np.random.default_rng(11)
    small = [G for G in GROUPS if G.order <= 12]
    same = 0
    for _ in range(1000):
        H, G = small[rng.integers(len(small))], small[rng.integers(len(small))]
        pm = PartialMap.from_array(H, G, rng.integers(-1, G.order, size=H.order))
        back = extract_alpha(build_phi_alpha(pm))
        same += back == pm
    homs = ranges = 0
    for pm in cp_maps(results):
        homs += 1
        ranges += range_characterization(build_phi_alpha(pm)).equals_column_space
    verdict(11, "extract(build(alpha)) = alpha and range equals column space",
            same == 1000 and ranges == homs,
            f"{same}/1000 round trips, {ranges}/{homs} ranges")


def test_criterion_12_isomorphisms():
    lines, ok = [], True
    for name in ("Z2", "Z3", "Z4", "Z2xZ2", "S3"):
        G = BY_NAME[name]
        found = 0
        for perm in itertools.permutations(range(G.order)):
            pm = PartialMap.from_array(G, G, perm)
            phi = build_phi_alpha(pm)
            try:
                w = walter_classify(phi)
            except NotContractive:
                ok &= not is_affine(pm)
                continue
            found += 1
            again = PartialMap.from_array(G, G, [G.mul(w.s0, b) for b in w.beta])
            ok &= is_isomorphism(G, G, w.beta) and np.array_equal(build_phi_alpha(again).matrix, phi.matrix)
            ok &= (not w.completely_positive) or w.s0 == G.identity
        want = G.order * len(automorphisms(G))
        ok &= found == want
        lines.append(f"{name}: {found}")
    verdict(12, "cc isomorphisms factor as translation after an automorphism", ok, ", ".join(lines))
