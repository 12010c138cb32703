import pytest

from twinwidth.encoder import (EncodingError, decontraction_sequence, encode_all,
                               encode_component, estimated_size, sound_t)
from twinwidth.trigraph import from_edges


def red_path_with_pendants():
    # 1-2-3 red, 3-4 black, 5 isolated with black edge to 1
    return from_edges(5, black=[(3, 4), (1, 5)], red=[(1, 2), (2, 3)])


def test_sound_t_values():
    assert sound_t(1, 1) == 2 * 4 * 1 + 1
    assert sound_t(2, 3) == 2 * 6 * 16 + 1
    assert sound_t(4, 2) == 2 * 10 * 8 + 1


def test_estimated_size():
    assert estimated_size(3, 5) == (30, 75)


def test_encoding_is_plain_and_sized():
    h = red_path_with_pendants()
    g, T, plan = encode_component(h, {1, 2, 3}, d=2, t_override=3)
    assert plan.tainted and plan.sound_t == sound_t(2, 3)
    assert g.n_red_edges() == 0
    assert len(g) == 2 + 3 * 6 and len(T) == 18
    # biclique inside each blow-up
    for v in (1, 2, 3):
        for a in plan.A[v]:
            assert g.black_neighbors(a) >= set(plan.B[v])
    # red edge 1-2 becomes two matchings
    for x, y in zip(plan.A[1], plan.A[2]):
        assert g.is_black(x, y)
    assert not g.is_black(plan.A[1][0], plan.A[2][1])
    # outside black neighbours are inherited by every copy
    assert all(g.is_black(x, 5) for x in plan.A[1] + plan.B[1])
    assert all(g.is_black(x, 4) for x in plan.A[3] + plan.B[3])


def test_decontraction_recovers_trigraph():
    h = red_path_with_pendants()
    g, _, plan = encode_component(h, {1, 2, 3}, d=2, t_override=4)
    seq, back = decontraction_sequence(g, plan)
    assert seq.partial
    assert seq.replay().relabel({**back, 4: 4, 5: 5}) == h


def test_component_errors():
    h = red_path_with_pendants()
    with pytest.raises(EncodingError, match="component"):
        encode_component(h, {1, 2}, d=2, t_override=2)
    with pytest.raises(EncodingError, match="exceeds"):
        encode_component(h, {1, 2, 3}, d=1, t_override=2)
    with pytest.raises(EncodingError):
        encode_component(h, {1, 2, 3}, d=2, t_override=0)


def test_memory_guard(monkeypatch):
    h = red_path_with_pendants()
    monkeypatch.setenv("TWW_MEMORY_GUARD_MB", "0.01")
    with pytest.raises(EncodingError, match="guard"):
        encode_component(h, {1, 2, 3}, d=2, t_override=40)
    g, _, _ = encode_component(h, {1, 2, 3}, d=2, t_override=40, force=True)
    assert len(g) == 2 + 240


def test_encode_all_components():
    h = from_edges(6, black=[(2, 3)], red=[(1, 2), (4, 5)])
    res = encode_all(h, d=1, t_override=2)
    assert [p.S for p in res.plans] == [[1, 2], [4, 5]]
    assert res.g.n_red_edges() == 0
    seq, back = res.decontraction()
    keep = {v: v for v in (3, 6)}
    assert seq.replay().relabel({**back, **keep}) == h
    with pytest.raises(EncodingError):
        encode_all(h, d=1, max_component=1)
