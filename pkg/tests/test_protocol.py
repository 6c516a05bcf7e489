import itertools
import random

import pytest

from sppc.adversary import make_adversary
from sppc.errors import ConfigurationError
from sppc.field import FieldContext
from sppc.mvpoly import from_text, in_span, linear_combine, span_coordinates
from sppc.params import derive_params
from sppc.protocol import (
    CommonRandomness,
    QueryNoise,
    RoundAnswer,
    build_round_queries,
    decode_round,
    gen_mask,
    plaintext_evaluations,
    prepare,
    query_nodes,
    row_query_polys,
    run_protocol,
    server_answer,
)
from sppc.storage import FileSet, StorageNoise, encode_storage, random_fileset, random_noise, storage_polynomials

CANDS = ["2,0:1 1,1:3 0,1:2", "0,2:5 1,0:1"]


def setup_3d(cands=CANDS):
    p = derive_params(21, 4, 2, 2, 1, 1, 2, P=len(cands), M=2, q=29)
    cs = [from_text(c, 2, 29) for c in cands]
    f, p, basis, pts = prepare(cs, p)
    return f, p, basis, pts, cs


def lagrange_weight(f, nodes, j, x):
    num = den = 1
    for i, u in enumerate(nodes):
        if i != j:
            num = num * (x - u) % f.q
            den = den * (nodes[j] - u) % f.q
    return num * f.inv(den) % f.q


def test_derive_params_examples():
    p = derive_params(21, 4, 2, 2, 1, 1, 2)
    assert (p.E, p.delta, p.L, p.S, p.q) == (6, 2, 3, 2, 29)
    p = derive_params(4, 2, 0, 1, 0, 0, 1)
    assert (p.E, p.delta, p.L, p.S) == (2, 2, 1, 1)
    with pytest.raises(ConfigurationError, match="infeasible"):
        derive_params(10, 4, 2, 2, 1, 1, 2)
    with pytest.raises(ConfigurationError):
        derive_params(21, 4, 2, 2, 1, 1, 2, q=30)


def test_query_polys_meet_their_constraints():
    f, p, basis, pts, _ = setup_3d()
    rng = random.Random(0)
    for theta in (1, 2):
        target = basis.candidate_coords[theta - 1]
        for s in range(1, p.S + 1):
            for i in range(1, p.L + 1):
                noise_row = [tuple(f.random_vector(rng, basis.F)) for _ in range(p.T)]
                polys = row_query_polys(f, p, pts, basis, theta, s, i, noise_row)
                for l, k, b in pts.window(p, s):
                    got = tuple(f.poly_eval(q, b) for q in polys)
                    assert got == (target if l == i else (0,) * basis.F)
                for t in range(1, p.T + 1):
                    assert tuple(f.poly_eval(q, pts.a(t)) for q in polys) == noise_row[t - 1]
                assert all(f.degree(q) <= p.E + p.T - 1 for q in polys)


def test_single_candidate_zero_noise_queries_are_weighted_target():
    f, p, basis, pts, cs = setup_3d(CANDS[:1])
    assert basis.F == 1
    target = basis.candidate_coords[0][0]
    zero = QueryNoise(1, tuple(tuple((0,) for _ in range(p.T)) for _ in range(p.L)))
    for s in range(1, p.S + 1):
        zero = QueryNoise(s, zero.coords)
        queries, _ = build_round_queries(f, p, 1, s, basis, pts, noise=zero)
        nodes = query_nodes(p, pts, s)
        window = pts.window(p, s)
        for q in queries:
            x = pts.a(q.server_id)
            for i in range(1, p.L + 1):
                weight = sum(lagrange_weight(f, nodes, j, x) for j, (l, _, _) in enumerate(window) if l == i)
                assert q.coords[i - 1] == (target * weight % f.q,)


def test_mask_properties():
    f, p, basis, pts, _ = setup_3d()
    assert gen_mask(f, p, 1, [0] * p.mask_size, pts) == []
    rng = random.Random(1)
    for s in range(1, p.S + 1):
        z = f.random_vector(rng, p.mask_size)
        psi = gen_mask(f, p, s, z, pts)
        assert all(f.poly_eval(psi, b) == 0 for _, _, b in pts.window(p, s))
        assert [f.poly_eval(psi, pts.a(j)) for j in range(1, p.mask_size + 1)] == z
        assert f.degree(psi) <= p.code_dimension - 1 == 17
    with pytest.raises(ValueError):
        gen_mask(f, p, 1, [0], pts)


def compose(f, mono_poly_terms, storage_row):
    """Univariate polynomial of a monomial substituted with the row's storage polynomials."""
    acc = [1]
    for poly, e in zip(storage_row, mono_poly_terms):
        for _ in range(e):
            acc = f.poly_mul(acc, poly)
    return acc


def test_answers_match_global_polynomial_oracle():
    f, p, basis, pts, cs = setup_3d()
    for trial in range(20):
        rng = random.Random(100 + trial)
        files = random_fileset(f, p, rng)
        noise = random_noise(f, p, rng)
        servers, _ = encode_storage(f, files, pts, p, noise=noise)
        sp = storage_polynomials(f, files, noise, pts, p)
        s, theta = 1 + trial % p.S, 1 + trial % 2
        queries, qnoise = build_round_queries(f, p, theta, s, basis, pts, rng)
        cr = CommonRandomness.draw(f, p, trial)
        zeta = gen_mask(f, p, s, cr.round(s), pts)
        for i in range(1, p.L + 1):
            qpolys = row_query_polys(f, p, pts, basis, theta, s, i, qnoise.coords[i - 1])
            row = [sp[(m, i)] for m in range(1, p.M + 1)]
            for qf, b in zip(qpolys, basis.basis):
                for exp, c in b.terms:
                    zeta = f.poly_add(zeta, f.poly_scale(f.poly_mul(qf, compose(f, exp, row)), c))
        assert f.degree(zeta) <= p.code_dimension - 1
        for q in queries:
            ans = server_answer(f, servers[q.server_id - 1], q, cr, basis, pts, p)
            assert ans == f.poly_eval(zeta, pts.a(q.server_id))
        phi = cs[theta - 1]
        for l, k, b in pts.window(p, s):
            assert f.poly_eval(zeta, b) == plaintext_evaluations(f, phi, files, p)[l - 1][k - 1]


def test_all_zero_inputs_answer_zero():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, P=1, M=2, q=29)
    cs = [from_text("1,1:3 1,0:1", 2, 29)]
    f, p, basis, pts = prepare(cs, p)
    files = FileSet.from_lists([[[0] * p.K for _ in range(p.L)] for _ in range(p.M)])
    zero_noise = StorageNoise(tuple(tuple((0,) * p.X for _ in range(p.L)) for _ in range(p.M)))
    servers, _ = encode_storage(f, files, pts, p, noise=zero_noise)
    qn = QueryNoise(1, tuple(tuple((0,) for _ in range(p.T)) for _ in range(p.L)))
    queries, _ = build_round_queries(f, p, 1, 1, basis, pts, noise=qn)
    cr = CommonRandomness(tuple((0,) * p.mask_size for _ in range(p.S)))
    assert all(server_answer(f, servers[q.server_id - 1], q, cr, basis, pts, p) == 0 for q in queries)


def test_one_term_case_by_hand():
    p = derive_params(4, 1, 0, 1, 0, 0, 1, P=1, M=1, q=7)
    f, p, basis, pts = prepare([from_text("1:1", 1, 7)], p)
    rng = random.Random(3)
    files = random_fileset(f, p, rng)
    servers, _ = encode_storage(f, files, pts, p, rng=rng)
    queries, _ = build_round_queries(f, p, 1, 1, basis, pts, rng)
    cr = CommonRandomness.draw(f, p, 5)
    psi = gen_mask(f, p, 1, cr.round(1), pts)
    for q in queries:
        st = servers[q.server_id - 1]
        expect = sum(q.coords[l - 1][0] * st.row_shares(l, 1)[0] for l in range(1, p.L + 1))
        expect += f.poly_eval(psi, pts.a(q.server_id))
        assert server_answer(f, st, q, cr, basis, pts, p) == expect % 7


def test_queries_are_span_members():
    f, p, basis, pts, _ = setup_3d()
    rng = random.Random(4)
    for s in range(1, p.S + 1):
        queries, _ = build_round_queries(f, p, 1, s, basis, pts, rng)
        for q in queries:
            assert len(q.coords) == p.L
            for v in q.coords:
                assert in_span(f, linear_combine(f, basis, v), basis)
                assert span_coordinates(f, linear_combine(f, basis, v), basis) == list(v)


def test_noise_weight_matrices_invertible():
    f, p, basis, pts, _ = setup_3d()
    for s in range(1, p.S + 1):
        nodes = query_nodes(p, pts, s)
        noise_idx = range(len(nodes) - p.T, len(nodes))
        for subset in itertools.combinations(range(1, p.N + 1), p.T):
            mat = [[lagrange_weight(f, nodes, j, pts.a(n)) for j in noise_idx] for n in subset]
            assert f.is_invertible(mat)


def test_round_window_values_and_plaintext_agreement():
    f, p, basis, pts, cs = setup_3d()
    for seed in range(50):
        rng = random.Random(seed)
        files = random_fileset(f, p, rng)
        servers, _ = encode_storage(f, files, pts, p, rng=rng)
        cr = CommonRandomness.draw(f, p, seed)
        expected = plaintext_evaluations(f, cs[0], files, p)
        for s in range(1, p.S + 1):
            queries, _ = build_round_queries(f, p, 1, s, basis, pts, rng)
            answers = [RoundAnswer(q.server_id, s, server_answer(f, servers[q.server_id - 1], q, cr, basis, pts, p))
                       for q in queries]
            got = decode_round(f, answers, s, pts, p)
            assert sorted(got) == [(l, k) for l in range(1, 4) for k in (2 * s - 1, 2 * s)]
            assert all(v == expected[l - 1][k - 1] for (l, k), v in got.items())


def test_constant_candidate():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, P=1, M=2, q=29)
    cs = [from_text("0,0:5", 2, 29)]
    ctx = FieldContext(29)
    files = random_fileset(ctx, p, random.Random(6))
    V, _ = run_protocol(1, files, cs, p, seed=6)
    assert all(v == 5 for row in V for v in row)


def test_worked_example_run():
    f, p, basis, pts, cs = setup_3d()
    files = random_fileset(f, p, random.Random(7))
    adv = make_adversary("random", p, seed=7)
    V, tr = run_protocol(2, files, cs, p, adv, seed=7)
    assert V == plaintext_evaluations(f, cs[1], files, p)
    assert len(tr.rounds) == 2
    assert [rr.download_symbols for rr in tr.rounds] == [20, 20]
    faults = [r for r in tr.records if r.direction == "fault"]
    assert len(faults) == 4


def test_degraded_mds_instance():
    p = derive_params(6, 2, 0, 1, 0, 0, 1, P=1, M=2)
    cs = [from_text("1,0:2 0,1:1", 2, p.q)]
    ctx = FieldContext(p.q)
    files = random_fileset(ctx, p, random.Random(8))
    V, _ = run_protocol(1, files, cs, p, seed=8)
    assert V == plaintext_evaluations(ctx, cs[0], files, p)


@pytest.mark.parametrize("kind, extra", [
    ("worst_slot", {}),
    ("fixed", {"byzantine": [[3], [20]], "unresponsive": [[4], [3]]}),
    ("random", {"strategy": "possibly_honest"}),
])
def test_adversary_patterns(kind, extra):
    f, p, basis, pts, cs = setup_3d()
    for seed in range(5):
        files = random_fileset(f, p, random.Random(seed))
        adv = make_adversary(kind, p, seed=seed, **extra)
        V, _ = run_protocol(1, files, cs, p, adv, seed=seed)
        assert V == plaintext_evaluations(f, cs[0], files, p)


def test_mask_randomness_does_not_change_output():
    f, p, basis, pts, cs = setup_3d()
    files = random_fileset(f, p, random.Random(9))
    adv = make_adversary("random", p, seed=9)
    V1, t1 = run_protocol(1, files, cs, p, adv, seed=9, common_seed=1)
    V2, t2 = run_protocol(1, files, cs, p, adv, seed=9, common_seed=2)
    assert V1 == V2
    assert [r.payload for r in t1.records if r.direction == "answer"] != \
           [r.payload for r in t2.records if r.direction == "answer"]


def test_parallel_rounds_match_sequential():
    f, p, basis, pts, cs = setup_3d()
    files = random_fileset(f, p, random.Random(10))
    adv = make_adversary("random", p, seed=10)
    V1, t1 = run_protocol(1, files, cs, p, adv, seed=10)
    V2, t2 = run_protocol(1, files, cs, p, adv, seed=10, workers=2)
    assert V1 == V2
    assert t1.dumps() == t2.dumps()


def test_bad_inputs_rejected():
    f, p, basis, pts, cs = setup_3d()
    files = random_fileset(f, p, random.Random(11))
    with pytest.raises(ValueError):
        run_protocol(3, files, cs, p)
    with pytest.raises(ValueError):
        run_protocol(0, files, cs, p)
    with pytest.raises(ConfigurationError):
        run_protocol(1, files, [from_text("3,0:1", 2, 29), cs[1]], p)
    with pytest.raises(ConfigurationError):
        make_adversary("fixed", p, byzantine=[1, 2])
    with pytest.raises(ConfigurationError):
        make_adversary("fixed", p, byzantine=[1], unresponsive=[1])


def test_transcript_format():
    f, p, basis, pts, cs = setup_3d()
    files = random_fileset(f, p, random.Random(12))
    _, tr = run_protocol(1, files, cs, p, make_adversary("worst_slot", p), seed=12)
    lines = tr.dumps().splitlines()
    assert lines[0].startswith("# sppc transcript N=21")
    assert "round=1 direction=fault server_id=2 payload=unresponsive" in lines
    assert all(ln.startswith("round=") for ln in lines[1:])
