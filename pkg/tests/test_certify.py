"""Stabilizer scans, theorem drivers, obstruction arithmetic."""

import pytest

from orbicert.certify import (
    GLGL_WITNESS,
    STATED_WITNESSES,
    DirectionSet,
    certify_not_digraph_group,
    certify_q17,
    certify_two_closed,
    lambda_obstructions,
    obstruction_polynomials,
    scalar_closure_of_d8,
    scan_primes,
    search_linear_witness,
    setwise_stabilizer_gl2,
    stabilizer_intersection_report,
)
from orbicert.digraphs import orbital_union_set, preserves_set
from orbicert.errors import DegenerateLambda
from orbicert.fields import INFINITY
from orbicert.groups import LinPart, d8_elements, g0_contains
from orbicert.matrices import Matrix, mat_inv, mat_mul


def test_direction_set_realized():
    ds = DirectionSet((1, 4), 5)
    assert len(ds.realized) == 2 * 4
    assert (2, 2) in ds.realized and (1, 4) in ds.realized
    assert (0, 0) not in ds.realized
    with pytest.raises(ValueError):
        DirectionSet((1, 6), 5)  # 6 = 1 mod 5, duplicate


def test_stabilizer_of_everything_is_gl2():
    p = 5
    ds = DirectionSet(tuple(range(p)) + (INFINITY,), p)
    assert len(setwise_stabilizer_gl2(ds)) == 480


def test_stabilizer_is_a_subgroup():
    stab = setwise_stabilizer_gl2(DirectionSet((1, 4), 5))
    elems = set(stab)
    for a in stab:
        assert mat_inv(a) in elems
        for b in stab:
            assert mat_mul(a, b) in elems


def test_d8_inside_stabilizers_of_closed_direction_sets():
    for p, dirs in [(5, (1, 4)), (7, (0, INFINITY)), (13, (2, 6, 7, 11)), (13, (5, 8))]:
        stab = set(setwise_stabilizer_gl2(DirectionSet(dirs, p)))
        assert set(d8_elements(p).elements) <= stab


def test_scalar_closure_size():
    for p in (5, 7, 13, 17):
        assert len(scalar_closure_of_d8(p)) == 4 * (p - 1)


def test_pair_intersection_p5():
    rep = stabilizer_intersection_report(
        [DirectionSet((1, 4), 5), DirectionSet((2, 3), 5)], 5
    )
    assert rep["gl2_enumerated"] == 480
    assert rep["stabilizer_orders"] == [32, 32]
    assert rep["intersection_order"] == 16
    assert rep["intersection_equals_scalar_closure_of_d8"]
    assert rep["dihedral_core_size"] == 8


def test_pair_intersection_p7_corrected_directions():
    rep = stabilizer_intersection_report(
        [DirectionSet((0, INFINITY), 7), DirectionSet((1, 6), 7)], 7
    )
    assert rep["gl2_enumerated"] == 2016
    assert rep["intersection_order"] == 24
    assert rep["intersection_equals_scalar_closure_of_d8"]
    assert rep["dihedral_core_size"] == 8


def test_direction_pair_not_dihedral_closed_fails_to_pin():
    # {1, 4} over GF(7) is not stable under negation of the slope, so the
    # dihedral group does not even stabilize it; the intersection with the
    # axis-pair stabilizer has order 12 and misses 6 of the 8 dihedral
    # matrices.
    rep = stabilizer_intersection_report(
        [DirectionSet((0, INFINITY), 7), DirectionSet((1, 4), 7)], 7
    )
    assert rep["intersection_order"] == 12
    assert not rep["intersection_equals_scalar_closure_of_d8"]
    assert rep["dihedral_core_size"] == 2  # only the scalars +-1 survive


def test_equianharmonic_pair_shares_extra_symmetry_p13():
    # both quadruples have cross-ratio satisfying r^2 - r + 1 = 0 mod 13,
    # so each setwise stabilizer is an A4-type group of order 144 and they
    # coincide; the pair cannot pin the dihedral group.
    from orbicert.crossratio import lambda_quad_cross_ratio

    for lam in (2, 3):
        r = lambda_quad_cross_ratio(lam, 13)
        assert (r * r - r + 1) % 13 == 0
    v2 = DirectionSet((2, 6, 7, 11), 13)
    v3 = DirectionSet((3, 4, 9, 10), 13)
    s2 = frozenset(setwise_stabilizer_gl2(v2))
    s3 = frozenset(setwise_stabilizer_gl2(v3))
    assert len(s2) == len(s3) == 144
    assert s2 == s3
    witness = Matrix(((1, 1), (5, 8)), 13)
    assert witness in s2 and not g0_contains(witness)
    rep = stabilizer_intersection_report([v2, v3], 13)
    assert rep["intersection_order"] == 144
    assert not rep["intersection_equals_scalar_closure_of_d8"]


def test_other_pairs_pin_at_p13():
    v1 = DirectionSet((1, 12), 13)
    v2 = DirectionSet((2, 6, 7, 11), 13)
    rep = stabilizer_intersection_report([v1, v2], 13)
    assert rep["intersection_order"] == 48
    assert rep["intersection_equals_scalar_closure_of_d8"]
    assert rep["dihedral_core_size"] == 8


def test_two_closed_certificates():
    c5 = certify_two_closed(5, 2)
    assert c5.status == "verified"
    assert c5.evidence["stabilizer_pair"]["intersection_equals_scalar_closure_of_d8"]
    assert "stabilizer_all_suborbits" not in c5.evidence

    c13 = certify_two_closed(13, 2, samples=5000)
    assert c13.status == "verified"
    assert not c13.evidence["stabilizer_pair"][
        "intersection_equals_scalar_closure_of_d8"
    ]
    rep = c13.evidence["stabilizer_all_suborbits"]
    assert rep["intersection_order"] == 48
    assert rep["intersection_equals_scalar_closure_of_d8"]


def test_q17_certificate_and_corruption():
    cert = certify_q17(2, samples=5000)
    assert cert.status == "verified"
    rep = cert.evidence["stabilizer"]
    assert rep["gl2_enumerated"] == 78336
    assert rep["intersection_order"] == 64
    assert rep["dihedral_core_size"] == 8

    # dropping the slope 16 breaks dihedral stability: certification of the
    # corrupted direction set must fail the pinning check
    broken = stabilizer_intersection_report([DirectionSet((1, 2, 8, 9, 15), 17)], 17)
    assert not broken["intersection_equals_scalar_closure_of_d8"]
    assert broken["dihedral_core_size"] < 8
    assert broken["intersection_order"] != 64


def test_stated_witnesses_q5_all_hold():
    m, p = 2, 5
    ident = Matrix.identity(m, p)
    for (pp, union), rows in STATED_WITNESSES.items():
        if pp != p:
            continue
        lin = LinPart(Matrix(rows, p), ident)
        assert preserves_set(lin, orbital_union_set(union, m, p))
        assert not g0_contains(lin)


def test_stated_q7_singleton_witness_fails_and_replacement_found():
    m, p = 2, 7
    ident = Matrix.identity(m, p)
    union = orbital_union_set(["L2"], m, p)
    stated = LinPart(Matrix(STATED_WITNESSES[(7, frozenset({"L2"}))], p), ident)
    assert not preserves_set(stated, union)  # the published matrix fails
    repl = search_linear_witness(union, m, p)
    assert repl == Matrix(((1, 1), (1, 6)), p)
    assert preserves_set(LinPart(repl, ident), union)
    assert not g0_contains(repl)


def test_stated_q13_triple_union_witness_fails_and_replacement_found():
    m, p = 2, 13
    ident = Matrix.identity(m, p)
    union = orbital_union_set(["L1", "L2", "L3"], m, p)
    stated = LinPart(
        Matrix(STATED_WITNESSES[(13, frozenset({"L1", "L2", "L3"}))], p), ident
    )
    assert not preserves_set(stated, union)
    repl = search_linear_witness(union, m, p)
    assert repl == Matrix(((1, 5), (5, 1)), p)
    assert preserves_set(LinPart(repl, ident), union)


def test_not_digraph_group_p5():
    cert = certify_not_digraph_group(5, 2)
    assert cert.status == "verified"
    assert cert.evidence["unions_checked"] == 14
    kinds = cert.evidence["witness_kinds"]
    assert set(kinds) == {"linear", "hamming", "glgl-on-B", "complement-ref"}
    assert cert.evidence["stated_witnesses_failed"] == []
    seen = set()
    for entry in cert.evidence["unions"]:
        assert entry["verified"]
        key = tuple(entry["connection_set_labels"])
        assert key not in seen  # each union certified exactly once
        seen.add(key)
        assert entry["witness_kind"] in {
            "linear",
            "hamming",
            "glgl-on-B",
            "complement-ref",
        }
    assert len(seen) == 2**4 - 2


def test_not_digraph_group_p5_parallel():
    cert = certify_not_digraph_group(5, 2, jobs=2)
    assert cert.status == "verified"
    assert cert.evidence["unions_checked"] == 14


def test_not_digraph_group_p7_records_failure():
    cert = certify_not_digraph_group(7, 2)
    assert cert.status == "verified"
    assert cert.evidence["unions_checked"] == 14
    failed = cert.evidence["stated_witnesses_failed"]
    assert {"union": ["L2"], "stated": [[1, 2], [2, 1]]} in failed


def test_glgl_witness_preserves_nonsimple_everywhere():
    for p in (5, 7, 13):
        ident = Matrix.identity(2, p)
        lin = LinPart(Matrix(GLGL_WITNESS, p), ident)
        assert preserves_set(lin, orbital_union_set(["B"], 2, p))
        assert not g0_contains(lin)


def test_obstruction_polynomials_frozen():
    assert set(obstruction_polynomials(2)) == {17, 41, -7, 481}
    assert set(obstruction_polynomials(4)) == {257, 353, 161, 69121}


def test_lambda_obstructions_mod_p():
    assert 0 in lambda_obstructions(3, 41)  # 3^4 + 1 = 82 = 2 * 41
    assert 0 in lambda_obstructions(2, 7)
    assert 0 in lambda_obstructions(2, 13)
    assert 0 not in lambda_obstructions(2, 19) and 0 not in lambda_obstructions(4, 19)
    with pytest.raises(DegenerateLambda):
        lambda_obstructions(2, 5)  # 2^4 = 1 mod 5
    with pytest.raises(DegenerateLambda):
        lambda_obstructions(4, 17)  # 4^4 = 1 mod 17


def test_scan():
    cert = scan_primes(500)
    assert cert.status == "verified"
    assert cert.evidence["both_obstructed"] == [7, 13]
    # slope-2 obstructed but slope-4 clean at 17
    assert any(v % 17 == 0 for v in obstruction_polynomials(2))
    assert not any(v % 17 == 0 for v in obstruction_polynomials(4))
    assert not any(v % 19 == 0 for v in obstruction_polynomials(2))


def test_scan_consistent_with_residue_sets():
    # where the quadruple is nondegenerate, "p divides an integer in the
    # slope set" must agree with "0 lies in the mod-p residue set"
    from orbicert.fields import is_prime

    for p in range(5, 200):
        if not is_prime(p):
            continue
        for lam in (2, 4):
            if pow(lam, 4, p) in (0, 1):
                continue
            by_int = any(v % p == 0 for v in obstruction_polynomials(lam))
            by_residue = 0 in lambda_obstructions(lam, p)
            assert by_int == by_residue
