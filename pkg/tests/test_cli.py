import json
from math import pi

import pytest

import cavityscat as cs
from cavityscat import cli
from cavityscat.model import QuadratureConfig

from conftest import example1_spec


def _write_spec(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    cs.save_spec(spec, path)
    return path


def _tiny_tm(N=6, panels=8):
    return example1_spec("TM", N=N, panels=panels)


def _tiny_te(N=6, panels=8):
    return example1_spec("TE", N=N, panels=panels)


def _manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_solve_roundtrip(tmp_path):
    spec_path = _write_spec(tmp_path, _tiny_tm())
    out = tmp_path / "out"
    assert cli.main(["solve", "--spec", str(spec_path), "--out", str(out)]) == 0
    body = (out / "coefficients.csv").read_text().splitlines()
    assert body[0] == "cavity,mode,re_u,im_u,abs_u"
    assert len(body) == 7
    man = _manifest(out)
    assert man["subcommand"] == "solve" and man["outputs"] == ["coefficients.csv"]
    assert man["diagnostics"]["size"] == 6


def test_solve_deterministic_reruns(tmp_path):
    spec_path = _write_spec(tmp_path, _tiny_tm())
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        assert cli.main(["solve", "--spec", str(spec_path), "--out", str(out)]) == 0
        outs.append(out)
    assert (outs[0] / "coefficients.csv").read_bytes() == (outs[1] / "coefficients.csv").read_bytes()
    m1, m2 = _manifest(outs[0]), _manifest(outs[1])
    m1.pop("wall_time_s"), m2.pop("wall_time_s")
    assert m1 == m2


def test_field_subcommand(tmp_path):
    spec_path = _write_spec(tmp_path, _tiny_te())
    out = tmp_path / "out"
    assert cli.main(["field", "--spec", str(spec_path), "--out", str(out),
                     "--grid", "9", "7"]) == 0
    lines = (out / "field.csv").read_text().splitlines()
    assert lines[0] == "x,y,cavity,layer,re_u,im_u,abs_u"
    assert len(lines) == 1 + 9 * 7


def test_rcs_subcommand_and_te_rejection(tmp_path):
    spec_path = _write_spec(tmp_path, _tiny_tm())
    out = tmp_path / "out"
    assert cli.main(["rcs", "--spec", str(spec_path), "--out", str(out),
                     "--angles", "9"]) == 0
    lines = (out / "rcs.csv").read_text().splitlines()
    assert lines[0] == "phi_rad,sigma,sigma_db" and len(lines) == 10

    te_path = _write_spec(tmp_path, _tiny_te(), "te.json")
    code = cli.main(["rcs", "--spec", str(te_path), "--out", str(tmp_path / "out2")])
    assert code == cli.EXIT_INPUT


def test_enhance_subcommand(tmp_path):
    spec = cs.validate(cs.ProblemSpec(
        wave=cs.IncidentWave(1.5, 0.0), polarization="TE",
        cavities=(cs.Cavity(-0.025, 0.025, (cs.Layer(0.0, -1.0, 1.5 + 0j),)),),
        N=4, quad=QuadratureConfig(panels=12)))
    spec_path = _write_spec(tmp_path, spec)
    out = tmp_path / "out"
    assert cli.main(["enhance", "--spec", str(spec_path), "--out", str(out),
                     "--kappa-min", "1.4", "--kappa-max", "1.55",
                     "--kappa-steps", "6"]) == 0
    lines = (out / "enhancement.csv").read_text().splitlines()
    assert lines[0] == "kappa,Q_E_0" and len(lines) == 7


def test_convergence_subcommand(tmp_path):
    spec_path = _write_spec(tmp_path, _tiny_tm(N=8, panels=8))
    out = tmp_path / "out"
    assert cli.main(["convergence", "--spec", str(spec_path), "--out", str(out),
                     "--levels", "3"]) == 0
    lines = (out / "convergence.csv").read_text().splitlines()
    assert lines[0] == "level,panels,h,l2_error_vs_finest" and len(lines) == 4
    man = _manifest(out)
    assert "fitted_order" in man["diagnostics"]


def test_input_errors_exit_2(tmp_path):
    assert cli.main(["solve", "--spec", str(tmp_path / "missing.json"),
                     "--out", str(tmp_path / "o")]) == cli.EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", "--spec", str(bad),
                     "--out", str(tmp_path / "o")]) == cli.EXIT_INPUT
    doc = cs.model.spec_to_dict(_tiny_tm())
    doc["cavities"][0]["b"] = doc["cavities"][0]["a"]  # invalid aperture
    p = tmp_path / "degenerate.json"
    p.write_text(json.dumps(doc))
    assert cli.main(["solve", "--spec", str(p),
                     "--out", str(tmp_path / "o")]) == cli.EXIT_INPUT


def test_validate_subcommand_passes(tmp_path):
    out = tmp_path / "val"
    code = cli.main(["validate", "--out", str(out), "--tolerance-profile", "default"])
    assert code == 0
    lines = (out / "oracle_report.csv").read_text().splitlines()
    assert lines[0].startswith("case,")
    assert all(line.rsplit(",", 1)[1] == "1" for line in lines[1:])


def test_parser_rejects_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
