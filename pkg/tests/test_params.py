import pytest

from limrand.errors import ParameterError
from limrand.params import Params, clog2


@pytest.mark.parametrize("x,expected", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (512, 9), (513, 10)])
def test_clog2(x, expected):
    assert clog2(x) == expected


def test_clog2_rejects_nonpositive():
    with pytest.raises(ParameterError):
        clog2(0)


def test_derived_constants_n512():
    p = Params(n=512)
    assert p.L == 9
    assert p.id_space == 512 ** 3
    assert p.id_bits == 28
    assert p.phases == 90
    assert p.geo_cap == 90
    assert p.epochs == 9
    assert p.kwise_k == 81


def test_L_floor_for_single_node():
    assert Params(n=1).L == 1


def test_base_radius_formula():
    p = Params(n=256)
    for i in range(1, p.epochs + 1):
        assert p.base_radius(i) == (p.epochs - i) * p.radius_c * p.L


def test_center_threshold_last_epoch_is_certain():
    p = Params(n=512)
    assert p.center_threshold(p.epochs) == 1 << p.L
    assert p.center_threshold(1) == (2 * 9 * 512) // 512


def test_overrides_and_validation():
    p = Params(n=64).with_overrides(phases_factor=1)
    assert p.phases == 6
    with pytest.raises(ParameterError):
        Params(n=64).with_overrides(bogus=1)
    with pytest.raises(ParameterError):
        Params(n=64, radius_c=0)
    with pytest.raises(ParameterError):
        Params(n=0)
    assert Params(n=64).to_dict()["n"] == 64
