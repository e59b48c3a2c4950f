import math

import numpy as np
import pytest

from holonomy_lab.develop import detour_path, holonomy
from holonomy_lab.quaddiff import QuadDiff, decompose, sup_norm
from holonomy_lab.sampling import random_direction, sample_quaddiff
from holonomy_lab.variation import (
    dlength_fd, dlength_line_integral, model_integral, n_integral, pullback_field, theorem_main_report,
)
from oracles import power_map_length


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("c,d", [(0.02, 0.01), (-0.08, 0.03j), (0.02j, -0.05)])
def test_power_map_derivative(ell, c, d):
    # L(t) = l sqrt(1 - 2 (c + t d))
    exact = -ell * d / np.sqrt(1 - 2 * c)
    got = dlength_line_integral(QuadDiff.power_map(ell, c), QuadDiff.power_map(ell, d))
    assert abs(got - exact) < 1e-9 * abs(exact)


def test_fd_oracle_on_power_map():
    ell, c, d = 1.0, 0.05, 0.02
    fd = dlength_fd(QuadDiff.power_map(ell, c), QuadDiff.power_map(ell, d))
    exact = (power_map_length(ell, c + 1e-6 * d) - power_map_length(ell, c - 1e-6 * d)) / 2e-6
    assert abs(fd - exact) < 1e-7


@pytest.mark.parametrize("index", range(4))
def test_line_integral_vs_fd(index):
    phi = sample_quaddiff(21, index=index)
    direction = random_direction(21, phi.ell, index=100 + index)
    a = dlength_line_integral(phi, direction)
    b = dlength_fd(phi, direction)
    assert abs(a - b) < 1e-6 * max(1, abs(b))


def test_several_directions_in_one_pass():
    phi = sample_quaddiff(3, index=0)
    dirs = [random_direction(3, phi.ell, index=k) for k in range(3)]
    together = dlength_line_integral(phi, dirs)
    assert len(together) == 3
    for d, val in zip(dirs, together):
        assert abs(val - dlength_line_integral(phi, d)) < 1e-9


def test_linear_in_direction():
    phi = sample_quaddiff(6, index=1)
    d1 = random_direction(6, phi.ell, index=1)
    d2 = random_direction(6, phi.ell, index=2)
    lhs = dlength_line_integral(phi, d1 * 2.0 + d2 * (-1j))
    rhs = 2.0 * dlength_line_integral(phi, d1) - 1j * dlength_line_integral(phi, d2)
    assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("side", [1, -1])
def test_detour_matches_axis(side):
    phi = sample_quaddiff(12, index=3)
    d = random_direction(12, phi.ell, index=7)
    a = dlength_line_integral(phi, d)
    b = dlength_line_integral(phi, d, path=detour_path(phi.ell, side=side))
    assert abs(a - b) < 1e-8


@pytest.mark.parametrize("lam", [1.0, 0.3 - 2j])
def test_model_integral(lam):
    phi = sample_quaddiff(14, index=2)
    L = holonomy(phi).length.value
    assert abs(model_integral(phi, lam) - (-lam * L)) < 1e-9 * abs(lam * L)


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("psi0", [1.0, -0.3 + 0.7j])
def test_n_integral_constant(ell, psi0):
    phi = QuadDiff.constant(ell, psi0)
    value = n_integral(phi)
    assert abs(value + 4 * math.pi**2 * psi0 / ell) < 1e-10
    assert abs(abs(value) - ell * sup_norm(phi)) < 1e-9


def test_n_integral_kills_nonconstant_modes():
    phi = QuadDiff(1.2, {-3: 0.4, -1: 1j, 2: -0.5})
    assert abs(n_integral(phi)) < 1e-12


def test_main_inequality_is_sharp_at_zero():
    # at phi = 0 the developing map is the identity, f*n = n and dL = -int n . direction
    d = random_direction(5, 1.3, index=0)
    assert abs(n_integral(d) + dlength_line_integral(QuadDiff.zero(1.3), d)) < 1e-10


def test_pullback_field_identity_structure():
    zero = QuadDiff.zero(1.0)
    for z in (1j, 0.5 + 2j, -3 + 1j):
        assert abs(pullback_field(zero, z) - z) < 1e-10


def test_theorem_main_report_fields():
    phi = sample_quaddiff(30, K_target=0.1, r=0.5, index=0)
    d = random_direction(30, phi.ell, index=1)
    rep = theorem_main_report(phi, d, 0.5, seed=30)
    assert rep["holds"]
    assert not rep["conditional"]
    assert rep["margin"] == pytest.approx(rep["rhs"] - rep["lhs"])
    big = theorem_main_report(phi * 5, d, 0.5, seed=30)
    assert big["hypothesis_violated"] and big["conditional"]
