import json
import math

import pytest
from hypothesis import given, strategies as st

import cavityscat as cs
from cavityscat.errors import SpecFileError, ValidationError
from cavityscat.model import kappa_from_material, spec_from_dict, spec_to_dict

from conftest import example1_spec, example4_spec


def test_example1_configuration_is_valid():
    spec = example1_spec("TM")
    assert spec.cavities[0].w == 1.0
    assert spec.cavities[0].depth == 1.5
    assert abs(spec.wave.alpha ** 2 + spec.wave.beta ** 2 - 1.5 ** 2) <= 1e-14
    assert spec.wave.beta > 0


def test_example4_configuration_is_valid():
    spec = example4_spec("TE")
    assert spec.K == 3
    assert [c.L for c in spec.cavities] == [1, 3, 2]
    assert spec.cavities[1].layers[1].h == pytest.approx(-1 / 6)


def test_overlapping_cavities_rejected():
    cavs = (cs.Cavity(0.0, 1.0, (cs.Layer(0.0, -1.0, 1 + 0j),)),
            cs.Cavity(0.5, 1.5, (cs.Layer(0.0, -1.0, 1 + 0j),)))
    spec = cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM", cavs, N=4)
    with pytest.raises(ValidationError) as exc:
        cs.validate(spec)
    assert "cavities" in exc.value.field


def test_touching_cavities_rejected():
    cavs = (cs.Cavity(0.0, 1.0, (cs.Layer(0.0, -1.0, 1 + 0j),)),
            cs.Cavity(1.0, 2.0, (cs.Layer(0.0, -1.0, 1 + 0j),)))
    with pytest.raises(ValidationError):
        cs.validate(cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM", cavs, N=4))


@pytest.mark.parametrize("field,build", [
    ("kappa0", lambda: cs.ProblemSpec(cs.IncidentWave(-1.0, 0.0), "TM",
                                      (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 + 0j),)),), 4)),
    ("theta", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 2.0), "TM",
                                     (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 + 0j),)),), 4)),
    ("N", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                                 (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 + 0j),)),), 0)),
    ("polarization", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TEM",
                                            (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 + 0j),)),), 4)),
    ("a", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                                 (cs.Cavity(1, 0, (cs.Layer(0, -1, 1 + 0j),)),), 4)),
    ("y_top", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                                     (cs.Cavity(0, 1, (cs.Layer(-0.1, -1, 1 + 0j),)),), 4)),
    ("y_bottom", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                                        (cs.Cavity(0, 1, (cs.Layer(0, 0.5, 1 + 0j),)),), 4)),
    ("kappa", lambda: cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                                     (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 - 0.2j),)),), 4)),
])
def test_invariant_violations_name_offending_field(field, build):
    with pytest.raises(ValidationError) as exc:
        cs.validate(build())
    assert field in exc.value.field


@pytest.mark.parametrize("quad,field", [
    (cs.QuadratureConfig(panels=0), "panels"),
    (cs.QuadratureConfig(points_per_panel=1), "points_per_panel"),
    (cs.QuadratureConfig(bessel_K=0), "bessel_K"),
    (cs.QuadratureConfig(lift_threshold=7), "lift_threshold"),
])
def test_quadrature_config_validation(quad, field):
    spec = cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM",
                          (cs.Cavity(0, 1, (cs.Layer(0, -1, 1 + 0j),)),), 4, quad)
    with pytest.raises(ValidationError) as exc:
        cs.validate(spec)
    assert field in exc.value.field


def test_validate_is_idempotent():
    spec = example4_spec("TM")
    assert cs.validate(spec) == spec


def test_validate_sorts_cavities():
    cavs = (cs.Cavity(2.0, 3.0, (cs.Layer(0, -1, 1 + 0j),)),
            cs.Cavity(0.0, 1.0, (cs.Layer(0, -1, 1 + 0j),)))
    spec = cs.validate(cs.ProblemSpec(cs.IncidentWave(1.0, 0.0), "TM", cavs, 4))
    assert spec.cavities[0].a == 0.0


def test_roundtrip_example4(tmp_path):
    spec = example4_spec("TE")
    path = tmp_path / "spec.json"
    cs.save_spec(spec, path)
    assert cs.load_spec(path) == spec


def test_roundtrip_lossy_kappa(tmp_path):
    # epsilon = 4 + i, mu = 1 at omega = kappa0 -> Im kappa > 0 accepted
    k0 = 32 * math.pi
    kap = kappa_from_material(k0, 4 + 1j, 1.0)
    assert kap.imag > 0
    assert abs(kap - k0 * (4 + 1j) ** 0.5) <= 1e-9 * abs(kap)
    spec = cs.validate(cs.ProblemSpec(
        cs.IncidentWave(k0, math.pi / 3), "TM",
        (cs.Cavity(-0.03125, 0.03125, (cs.Layer(0.0, -0.015625, kap),)),), N=8))
    path = tmp_path / "lossy.json"
    cs.save_spec(spec, path)
    assert cs.load_spec(path) == spec


def test_missing_field_names_it(tmp_path):
    doc = spec_to_dict(example1_spec("TM"))
    del doc["kappa0"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SpecFileError) as exc:
        cs.load_spec(path)
    assert exc.value.field == "kappa0"


def test_schema_version_mismatch(tmp_path):
    doc = spec_to_dict(example1_spec("TM"))
    doc["schema"] = 99
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SpecFileError) as exc:
        cs.load_spec(path)
    assert exc.value.field == "schema"


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\n  \"schema\": 1,\n")
    with pytest.raises(SpecFileError) as exc:
        cs.load_spec(path)
    assert "line" in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(SpecFileError):
        cs.load_spec(tmp_path / "nope.json")


@given(a=st.floats(-3, 3, allow_nan=False), w=st.floats(0.01, 2),
       d1=st.floats(0.05, 1), d2=st.floats(0.05, 1),
       kre=st.floats(0.1, 20), kim=st.floats(0, 5),
       kappa0=st.floats(0.1, 50), theta=st.floats(-1.5, 1.5),
       n=st.integers(1, 100))
def test_roundtrip_is_lossless(a, w, d1, d2, kre, kim, kappa0, theta, n):
    spec = cs.ProblemSpec(
        cs.IncidentWave(kappa0, theta), "TE",
        (cs.Cavity(a, a + w, (cs.Layer(0.0, -d1, complex(kre, kim)),
                              cs.Layer(-d1, -d1 - d2, complex(kre / 2, 0.0)))),),
        N=n)
    spec = cs.validate(spec)
    assert spec_from_dict(spec_to_dict(spec)) == spec
