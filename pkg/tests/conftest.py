import numpy as np
import pytest
from math import pi

import cavityscat as cs
from cavityscat.model import QuadratureConfig


def example1_spec(polarization: str, N: int = 30, panels: int = 32) -> cs.ProblemSpec:
    """Single empty cavity [-0.5, 0.5], depth 1.5, kappa0 = 1.5, theta = pi/9."""
    return cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(kappa0=1.5, theta=pi / 9),
        polarization=polarization,
        cavities=(cs.Cavity(a=-0.5, b=0.5, layers=(cs.Layer(0.0, -1.5, 1.5 + 0j),)),),
        N=N, quad=QuadratureConfig(panels=panels)))


def example4_spec(polarization: str, N: int = 36, panels: int = 48,
                  kappa0: float = 2 * pi, theta: float = pi / 6) -> cs.ProblemSpec:
    """Three cavities: empty / three layers (pi, 2pi, 10pi) / two layers (lossy, 0.5)."""
    c1 = cs.Cavity(-0.6, -0.1, (cs.Layer(0.0, -0.1, complex(kappa0)),))
    c2 = cs.Cavity(0.0, 0.2, (cs.Layer(0.0, -1 / 6, complex(pi)),
                              cs.Layer(-1 / 6, -1 / 3, complex(2 * pi)),
                              cs.Layer(-1 / 3, -0.5, complex(10 * pi))))
    c3 = cs.Cavity(0.3, 0.6, (cs.Layer(0.0, -0.15, 1.0 + 0.5j),
                              cs.Layer(-0.15, -0.3, 0.5 + 0j)))
    return cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(kappa0=kappa0, theta=theta), polarization=polarization,
        cavities=(c1, c2, c3), N=N, quad=QuadratureConfig(panels=panels)))


def two_layer_spec(polarization: str, N: int = 16, panels: int = 32) -> cs.ProblemSpec:
    return cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(kappa0=1.5, theta=pi / 9), polarization=polarization,
        cavities=(cs.Cavity(a=-0.5, b=0.5, layers=(
            cs.Layer(0.0, -0.7, 1.5 + 0j), cs.Layer(-0.7, -1.5, 3.0 + 0.5j))),),
        N=N, quad=QuadratureConfig(panels=panels)))


@pytest.fixture(scope="session")
def tm_two_layer():
    spec = two_layer_spec("TM")
    tables, sol = cs.solve(spec)
    return spec, tables, sol


@pytest.fixture(scope="session")
def te_two_layer():
    spec = two_layer_spec("TE")
    tables, sol = cs.solve(spec)
    return spec, tables, sol


@pytest.fixture(scope="session")
def tm_example1():
    spec = example1_spec("TM")
    tables, sol = cs.solve(spec)
    return spec, tables, sol


def rel_err(a, b) -> float:
    b = complex(b)
    return abs(complex(a) - b) / (abs(b) if b != 0 else 1.0)


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
