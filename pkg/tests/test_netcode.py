import numpy as np
import pytest

from securenc.errors import DimensionError
from securenc.gf import Matrix, gaussian_binomial, gf
from securenc.netcode import (
    EavesdropClass,
    PacketSet,
    Precoder,
    Scenario,
    decode,
    encode,
    enumerate_wiretap_classes,
    expand_eavesdrop,
    message_slice,
    observation_matrix,
    observe,
)


def test_scenario_validation():
    F = gf(2)
    with pytest.raises(ValueError):
        Scenario(F, 1, 2, 2, (1, 1))  # needs T+1 lengths
    with pytest.raises(ValueError):
        Scenario(F, 1, 2, 2, (1, 1, 1))  # sum != mn
    sc = Scenario(F, 2, 3, 2, (2, 3, 1))
    assert sc.offsets == (0, 2, 5, 6)
    assert sc.coords([2]) == [2, 3, 4]
    assert sc.complement([1]) == (2, 3)
    with pytest.raises(ValueError):
        sc.check_index_set([3])  # auxiliary block is not a message index


def test_scenario_json_round_trip():
    sc = Scenario(gf(256), 2, 3, 2, (2, 2, 2))
    assert Scenario.from_json(sc.to_json()) == sc


@pytest.mark.parametrize("q", [2, 3, 4, 256])
def test_encode_decode_round_trip(q):
    sc = Scenario(gf(q), 2, 3, 2, (2, 2, 2))
    rng = np.random.default_rng(q)
    for _ in range(20):
        pre = Precoder.random(sc, rng)
        s = rng.integers(0, q, size=sc.mn)
        p = encode(s, pre)
        assert p.symbols.shape == (3, 2)
        assert np.array_equal(decode(p, pre), s)


def test_identity_precoder_packetises_in_order():
    sc = Scenario(gf(5), 2, 2, 1, (2, 2))
    p = encode([1, 2, 3, 4], Precoder.identity(sc))
    assert p.to_json() == [[1, 2], [3, 4]]
    assert PacketSet.from_json(p.to_json()) == p


def test_precoder_rejects_singular_and_wrong_shape():
    sc = Scenario(gf(2), 1, 2, 1, (1, 1))
    with pytest.raises(ValueError):
        Precoder(sc, Matrix(gf(2), [[1, 1], [1, 1]]))
    with pytest.raises(DimensionError):
        Precoder(sc, Matrix.identity(gf(2), 3))


def test_observation_is_kron_structured():
    F = gf(3)
    sc = Scenario(F, 2, 3, 1, (3, 3))
    pre = Precoder.random(sc, 1)
    cls = EavesdropClass(Matrix(F, [[1, 2, 0]]))
    s = np.arange(6) % 3
    x = encode(s, pre).symbols
    # Eve sees packet0 + 2 * packet1, symbol by symbol
    expected = [(x[0, j] + 2 * x[1, j]) % 3 for j in range(2)]
    assert observe(cls, pre, s).tolist() == expected
    assert observation_matrix(cls, pre) == expand_eavesdrop(cls, 2) @ pre.matrix


def test_zero_rank_wiretap_sees_nothing():
    sc = Scenario(gf(2), 1, 2, 1, (1, 1))
    cls = next(enumerate_wiretap_classes(sc.field, 2, 0))
    assert cls.mu == 0
    assert observe(cls, Precoder.identity(sc), [1, 1]).size == 0


def test_eavesdrop_class_requires_full_row_rank():
    with pytest.raises(ValueError):
        EavesdropClass(Matrix(gf(2), [[1, 1], [1, 1]]))


@pytest.mark.parametrize("q,n", [(2, 3), (3, 3), (4, 3), (2, 4)])
def test_wiretap_class_enumeration(q, n):
    F = gf(q)
    for mu in range(n + 1):
        classes = list(enumerate_wiretap_classes(F, n, mu))
        assert len(classes) == gaussian_binomial(q, n, mu)
        kernels = {c.kernel for c in classes}
        assert len(kernels) == len(classes)
        assert all(c.kernel.dim == n - mu for c in classes)


def test_same_class_under_row_operations():
    F = gf(5)
    B = Matrix(F, [[1, 2, 3], [0, 1, 4]])
    G = Matrix(F, [[2, 1], [3, 3]])  # invertible
    assert EavesdropClass(B).same_class(EavesdropClass(G @ B))
    assert EavesdropClass.from_kernel(EavesdropClass(B).kernel).same_class(EavesdropClass(B))


def test_message_slice():
    sc = Scenario(gf(7), 2, 2, 2, (1, 2, 1))
    s = [1, 2, 3, 4]
    assert message_slice(s, sc, [2]).tolist() == [2, 3]
    assert message_slice(s, sc, [2, 1]).tolist() == [1, 2, 3]
