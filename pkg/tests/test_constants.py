import math

from pytest import approx, mark, raises

from app.api.schemas.geometry import BallDomain, unit_box
from app.api.services.constants import (
    chebyshev_constant,
    heat_cmn,
    heat_constant,
    heat_mean_value_chain,
    laplace_cn,
    laplace_constant,
    laplace_mean_value_chain,
    modified_heatball_volume,
    optimize_delta,
    rescale_constant,
)
from app.api.services.fields import make_heat_witness, make_quadratic
from app.api.services.geometry import unit_heatball_volume
from app.api.utils.errors import EmptyDomainError, InvalidParameterError, UnsupportedExtraDimensionError


@mark.parametrize("n", range(1, 11))
def test_laplace_cn_closed_form(n):
    assert laplace_cn(n) == approx(1 / (n + 2), abs=1e-12)


def test_laplace_constant_unit_square():
    report = laplace_constant(unit_box(2), 0.25, safety=0.9)
    assert report.terms["interior_term"] == approx(1 / 4096, rel=1e-12)
    assert report.terms["interior_term"] == approx(2.441e-4, rel=1e-3)
    assert report.terms["ball_term"] == approx((1 / 1024) / (1 + 64 / math.pi), rel=1e-12)
    assert report.c == approx(0.9 * report.terms["ball_term"], rel=1e-12)
    assert report.intermediates["half_ball_volume"] == approx(math.pi / 64)
    assert report.shrunk_measure == approx(0.25)


def test_laplace_constant_empty_shrink():
    with raises(EmptyDomainError):
        laplace_constant(unit_box(2), 0.5)


@mark.parametrize("safety", (0.0, 1.0, 1.5))
def test_laplace_constant_rejects_bad_safety(safety):
    with raises(InvalidParameterError):
        laplace_constant(unit_box(2), 0.25, safety=safety)


def test_optimized_delta_beats_fixed_delta():
    dom = unit_box(2)
    best = optimize_delta(dom)
    assert best.c >= laplace_constant(dom, 0.25).c
    assert best.c == approx(laplace_constant(dom, best.scale).c)
    assert 0 < best.scale < 0.5


def test_optimized_delta_on_ball():
    best = optimize_delta(BallDomain(center=(0.0, 0.0), radius=1.0))
    assert best.c > 0
    assert best.scale < 1.0


def test_heat_constant_terms():
    report = heat_constant(unit_box(2), 0.3, m=3, safety=0.9)
    assert report.kind == "heat"
    assert report.c == approx(0.9 * min(report.terms.values()))
    assert report.intermediates["M_R"] >= report.diagnostics["M_R_scan"]
    expected = report.intermediates["M_R"] * (report.intermediates["modified_heatball_volume"] + 1)
    assert report.intermediates["C_R"] == approx(expected)
    assert report.intermediates["C_mn"] == approx(heat_cmn(1, 3))


def test_heat_cmn_closed_form():
    assert heat_cmn(1, 3) == approx(4 * unit_heatball_volume(4) / math.e ** 6, rel=1e-12)


def test_modified_heatball_volume_scaling():
    assert modified_heatball_volume(0.6, 1, 3) / modified_heatball_volume(0.3, 1, 3) == approx(8.0, rel=1e-8)


def test_heat_constant_rejects_small_m():
    with raises(UnsupportedExtraDimensionError):
        heat_constant(unit_box(2), 0.3, m=2)


def test_heat_constant_empty_shrink():
    with raises(EmptyDomainError):
        heat_constant(unit_box(2), 2.0)


def test_chebyshev_constant_examples():
    assert chebyshev_constant(1.0, 0.5, 1.0) == 0.125
    assert chebyshev_constant(1.0, 1.0, 4.0) == approx(2.0)


def test_chebyshev_constant_rejects_nonpositive():
    with raises(InvalidParameterError):
        chebyshev_constant(0.0, 0.5, 1.0)


def test_rescale_constant():
    assert rescale_constant(0.1, 3.0) == approx((0.3, 0.3))
    with raises(InvalidParameterError):
        rescale_constant(0.1, 0.0)


def test_mean_value_chain_for_quadratic():
    chain = laplace_mean_value_chain(make_quadratic(2), (0.5, 0.5), 0.25, 1e-5)
    assert chain["holds"]
    assert chain["mean_value_bound"] == approx(chain["u_x"], rel=1e-10)
    assert chain["hypothesis_bound"] < chain["u_x"]


def test_mean_value_chain_for_drift():
    chain = heat_mean_value_chain(make_heat_witness(1, "drift"), (0.5, 0.5), 0.3)
    assert chain["holds"]
    assert chain["phi_R"] > chain["u_center"]
