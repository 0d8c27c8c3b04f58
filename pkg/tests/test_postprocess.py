import numpy as np
import pytest
from math import pi, sqrt

import cavityscat as cs
from cavityscat import postprocess
from cavityscat.errors import UnsupportedPolarizationError, ValidationError
from cavityscat.modal import ConnectionSolution, ModalTables, ModeCoefficients
from cavityscat.model import QuadratureConfig
from cavityscat.postprocess import (FieldMap, backscatter_sweep, diagonal_trace,
                                    enhancement, export_grid, export_sweep, field_at,
                                    field_grid, interface_value_jump, rcs_tm,
                                    te_flux_jump)

from conftest import example1_spec


def test_tm_field_vanishes_on_walls_and_bottom(tm_example1):
    spec, tables, sol = tm_example1
    scale = max(abs(field_at(spec, tables, sol, x, y))
                for x in (-0.2, 0.1, 0.3) for y in (-0.2, -0.8, -1.2))
    for y in np.linspace(-1.5, 0.0, 7):
        assert abs(field_at(spec, tables, sol, -0.5, float(y))) <= 1e-12 * scale
        assert abs(field_at(spec, tables, sol, 0.5, float(y))) <= 1e-12 * scale
    for x in np.linspace(-0.5, 0.5, 7):
        assert abs(field_at(spec, tables, sol, float(x), -1.5)) <= 1e-12 * scale


def test_aperture_trace_matches_coefficients(tm_example1):
    spec, tables, sol = tm_example1
    cav = spec.cavities[0]
    for x in (-0.31, 0.07, 0.44):
        want = sum(sol.coefficient(0, n) * np.sin(n * pi * (x - cav.a) / cav.w)
                   for n in range(1, spec.N + 1))
        got = field_at(spec, tables, sol, x, 0.0)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_point_outside_cavities_is_domain_error(tm_example1):
    spec, tables, sol = tm_example1
    with pytest.raises(ValidationError):
        field_at(spec, tables, sol, 3.0, -0.5)
    with pytest.raises(ValidationError):
        field_at(spec, tables, sol, 0.0, -2.5)


def test_tm_interface_continuity(tm_two_layer):
    spec, tables, sol = tm_two_layer
    scale = abs(field_at(spec, tables, sol, 0.1, -0.7))
    for x in np.linspace(-0.45, 0.45, 9):
        above, below = interface_value_jump(spec, tables, sol, 0, 1, float(x))
        assert abs(above - below) <= 1e-10 * max(scale, abs(above))


def test_te_flux_continuity(te_two_layer):
    spec, tables, sol = te_two_layer
    for x in np.linspace(-0.45, 0.45, 9):
        above, below = te_flux_jump(spec, tables, sol, 0, 1, float(x))
        assert abs(above - below) <= 1e-8 * max(abs(above), abs(below))


def test_field_grid_matches_field_at(tm_two_layer):
    spec, tables, sol = tm_two_layer
    fm = field_grid(spec, tables, sol, 0, 7, 9)
    for i in range(0, len(fm.x), 11):
        want = field_at(spec, tables, sol, float(fm.x[i]), float(fm.y[i]), 0)
        assert abs(fm.values[i] - want) <= 1e-12 * max(1.0, abs(want))


def test_diagonal_trace_has_requested_samples(tm_two_layer):
    spec, tables, sol = tm_two_layer
    fm = diagonal_trace(spec, tables, sol, 0, samples=200)
    assert len(fm.x) == 200
    assert fm.x[0] == spec.cavities[0].a and fm.y[-1] == -spec.cavities[0].depth


def test_helmholtz_residual_order():
    # N = 10 keeps all retained modes inside the asymptotic FD regime at the
    # pinned step ladder (mu_max * step <= 0.32)
    from cavityscat.oracle import fd_interior_check
    from conftest import two_layer_spec
    for pol in ("TM", "TE"):
        spec = two_layer_spec(pol, N=10)
        tables, sol = cs.solve(spec)
        rep = fd_interior_check(spec, tables, sol, points_per_layer=8)
        assert rep.oracle_value.real >= 1.9, (pol, rep.oracle_value)


# --- RCS ---------------------------------------------------------------------


def test_rcs_vanishes_toward_grazing(tm_example1):
    spec, tables, sol = tm_example1
    near0 = rcs_tm(spec, sol, 1e-6)
    mid = rcs_tm(spec, sol, pi / 2)
    assert near0 <= 1e-9 * mid
    assert rcs_tm(spec, sol, pi - 1e-6) <= 1e-9 * mid


def test_rcs_invariant_under_phase_rotation(tm_example1):
    spec, tables, sol = tm_example1
    rot = postprocess.ApertureSolution(
        coefficients=tuple(np.exp(0.7j) * u for u in sol.coefficients),
        layout=sol.layout, rcond=sol.rcond)
    for phi in (0.3, 1.2, 2.5):
        assert abs(rcs_tm(spec, sol, phi) - rcs_tm(spec, rot, phi)) \
            <= 1e-12 * max(1.0, rcs_tm(spec, sol, phi))


def test_rcs_rejects_te(te_two_layer):
    spec, tables, sol = te_two_layer
    with pytest.raises(UnsupportedPolarizationError):
        rcs_tm(spec, sol, 1.0)
    with pytest.raises(UnsupportedPolarizationError):
        backscatter_sweep(spec, [1.0])


def test_backscatter_sweep_nonnegative_and_finite():
    # 721-point sweep on a moderate configuration: no NaN, no negatives
    k0 = 8 * pi
    lam = 2 * pi / k0
    spec = cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(k0, pi / 3), polarization="TM",
        cavities=(cs.Cavity(-lam / 2, lam / 2, (cs.Layer(0.0, -lam / 4, complex(k0)),)),),
        N=40, quad=QuadratureConfig(panels=48, points_per_panel=6)))
    angles = np.linspace(pi / 720, pi - pi / 720, 721)
    sweep = backscatter_sweep(spec, angles)
    assert np.all(np.isfinite(sweep.sigma))
    assert np.all(sweep.sigma >= 0)
    # continuity: no jumps beyond a factor bound between neighbouring angles
    ratio = np.abs(np.diff(sweep.sigma)) / (np.maximum.reduce(
        [sweep.sigma[1:], sweep.sigma[:-1], np.full(720, 1e-12)]))
    assert np.max(ratio) < 1.0


def test_backscatter_rejects_bad_angles(tm_example1):
    spec, _, _ = tm_example1
    with pytest.raises(ValidationError):
        backscatter_sweep(spec, [0.0, 1.0])


# --- enhancement -------------------------------------------------------------


def test_enhancement_identity_field_is_one():
    # constant field u = 1 via a synthetic flat n = 0 mode: Q_E = 1 to
    # quadrature tolerance (checks the norm plumbing and the w*h denominator)
    from cavityscat.modal import connection_te, mode_coefficients
    w, h = 0.4, 1.3
    spec = cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(1.0, 0.0), polarization="TE",
        cavities=(cs.Cavity(0.0, w, (cs.Layer(0.0, -h, 1.0 + 0j),)),), N=1))
    cav = spec.cavities[0]
    # flat mode: beta = 0 branch with u_hat chosen so u_1 = u_0 = 1
    mc0 = ModeCoefficients(n=0, betas=(0.0 + 0.0j,), a=(1.0 / h,), b=(-1.0 / h,))
    conn0 = ConnectionSolution(u_hat=(complex(-1.0 / mc0.a[0]),), impedance=0.0 + 0.0j)
    mc1 = mode_coefficients(cav, 1)
    conn1 = connection_te(cav, 1, 1.0, coeffs=mc1)
    tables = ModalTables(polarization="TE", N=1,
                         entries={(0, 0): (mc0, conn0), (0, 1): (mc1, conn1)})
    from cavityscat.assembly import ApertureSolution, ModeLayout
    sol = ApertureSolution(coefficients=(np.array([1.0 + 0.0j, 0.0 + 0.0j]),),
                           layout=ModeLayout("TE", 1, 1), rcond=1.0)
    q = enhancement(spec, tables, sol, 0)
    assert abs(q - 1.0) <= 1e-12


def test_enhancement_denominator_scaling(te_two_layer):
    spec, tables, sol = te_two_layer
    q = enhancement(spec, tables, sol, 0)
    # doubling all coefficients doubles Q_E (norm ratio linear in the field)
    from cavityscat.assembly import ApertureSolution
    sol2 = ApertureSolution(coefficients=tuple(2.0 * u for u in sol.coefficients),
                            layout=sol.layout, rcond=sol.rcond)
    assert abs(enhancement(spec, tables, sol2, 0) - 2.0 * q) <= 1e-12 * q


# --- export ------------------------------------------------------------------


def test_export_empty_grid_header_only(tmp_path):
    fm = FieldMap(x=np.empty(0), y=np.empty(0), cavity=np.empty(0, int),
                  layer=np.empty(0, int), values=np.empty(0, complex))
    path = tmp_path / "empty.csv"
    export_grid(fm, path)
    assert path.read_text().strip() == "x,y,cavity,layer,re_u,im_u,abs_u"


def test_export_deterministic_bytes(tmp_path, tm_two_layer):
    spec, tables, sol = tm_two_layer
    fm = field_grid(spec, tables, sol, 0, 5, 5)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    export_grid(fm, p1)
    export_grid(fm, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_export_sweep_schema(tmp_path):
    sweep = postprocess.RcsSweep(angles=np.array([0.5, 1.0]),
                                 sigma=np.array([1.0, 2.0]),
                                 sigma_db=np.array([0.0, 3.0103]))
    path = tmp_path / "rcs.csv"
    export_sweep(sweep, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "phi_rad,sigma,sigma_db"
    assert len(lines) == 3
