import math

import pytest

from sdfrelay.errors import DomainError
from sdfrelay.model import Fading, FadingSpec, NetworkConfig, NodeLayout


def test_layout_geometry():
    lay = NodeLayout((15.0, 0.0), (6.0, 0.0))
    assert (lay.norm_s, lay.norm_r, lay.dist_sr) == (15.0, 6.0, 9.0)
    turned = lay.rotated(1.0)
    assert turned.norm_s == pytest.approx(15.0) and turned.dist_sr == pytest.approx(9.0)


def test_line_layout():
    lay = NodeLayout.line(15.0, 0.6)
    assert lay.x_r == pytest.approx((6.0, 0.0))
    assert lay.dist_sr == pytest.approx(0.6 * 15.0)
    for bad in (0.0, 1.0, 1.2):
        with pytest.raises(DomainError):
            NodeLayout.line(15.0, bad)


@pytest.mark.parametrize("x_s, x_r", [((0.0, 0.0), (1.0, 0.0)), ((1.0, 1.0), (1.0, 1.0)),
                                      ((math.nan, 0.0), (1.0, 0.0)), ((1.0, 0.0, 0.0), (2.0, 0.0))])
def test_layout_validation(x_s, x_r):
    with pytest.raises(DomainError):
        NodeLayout(x_s, x_r)


def test_relay_at_destination_is_allowed():
    assert NodeLayout((15.0, 0.0), (0.0, 0.0)).norm_r == 0.0


@pytest.mark.parametrize("kwargs", [dict(alpha=2.0), dict(alpha=math.inf), dict(beta=0.0),
                                    dict(lam=-1e-3), dict(lam=math.nan), dict(fading="nakagami")])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        NetworkConfig.create((15.0, 0.0), (6.0, 0.0), **kwargs)


def test_fading_names_round_trip():
    for name in ("rayleigh", "pathloss-only", "mixed-u1"):
        assert FadingSpec.from_name(name).name == name
    custom = FadingSpec(Fading.RAYLEIGH, Fading.DETERMINISTIC, Fading.RAYLEIGH)
    assert custom.name.count("/") == 2 and not custom.is_rayleigh


def test_config_helpers():
    cfg = NetworkConfig.create((15.0, 0.0), (6.0, 0.0), lam=1e-3)
    assert cfg.with_lambda(2e-3).lam == 2e-3 and cfg.lam == 1e-3
    assert cfg.with_fading("mixed-u1").fading == FadingSpec.mixed_u1()
