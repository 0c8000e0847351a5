import json
import math

import pytest

from kmsgraph.classify import RowShape, SpectrumRow, classify_component, classify_sink, spectrum
from kmsgraph.cli import main, parse_complex
from kmsgraph.graph import component_by_label
from kmsgraph.render import closed_form, render_ascii, render_svg

LN2 = math.log(2)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "value,label",
    [(LN2 / 2, "ln(2)/2"), (-LN2, "-ln(2)"), (-math.log(4), "-ln(4)"), (0.0, "0"), (0.1234567, "0.123457")],
)
def test_closed_form(value, label):
    assert closed_form(value) == label


def test_ascii_symbols():
    rows = [
        SpectrumRow("a", "sink", RowShape.FULL_LINE),
        SpectrumRow("b", "sink", RowShape.OPEN_RAY, 0.5, "+"),
        SpectrumRow("c", "component", RowShape.POINT, -0.5),
        SpectrumRow("d", "component", RowShape.OPEN_RAY, 0.5, "-", circle=True),
    ]
    lines = render_ascii(rows).splitlines()
    assert "=" * 41 in lines[0]
    assert "o-" in lines[1] and "-o" in lines[3] and "[circle]" in lines[3]
    assert "●" in lines[2]


def test_svg_is_well_formed(gauge):
    import xml.etree.ElementTree as ET

    root = ET.fromstring(render_svg(spectrum(gauge)))
    assert root.tag.endswith("svg")


def test_spectrum_f1_ascii(capsys):
    code, out, _ = run(capsys, "--profile", "F1", "spectrum")
    assert code == 0
    lines = {ln.split()[0]: ln for ln in out.splitlines()}
    assert "all beta" in lines["s1"]
    assert "beta = -ln(2)" in lines["C2"] and "●" in lines["C2"]
    assert "beta > ln(2)/2" in lines["C3"] and "[circle]" in lines["C3"]
    assert lines["C1"].rstrip().endswith("none")


def test_trace_and_ground_commands(capsys):
    code, out, _ = run(capsys, "--profile", "gauge", "trace")
    assert code == 0 and out.strip() == "M_2(C) (+) M_3(C(T))"
    code, out, _ = run(capsys, "--profile", "F2", "ground", "--format", "text")
    assert code == 0 and out.strip() == "s1: C; (a, e3) at v4: C(T)"
    code, out, _ = run(capsys, "--profile", "F2", "ground")
    report = json.loads(out)
    assert report["potential"]["v9"] == "-inf"


def test_classify_command(capsys):
    code, out, _ = run(capsys, "classify", "--beta", str(LN2 / 2))
    data = json.loads(out)
    assert code == 0 and data["gauge_invariant_count"] == 3
    code, _, err = run(capsys, "classify", "--beta", "0")
    assert code == 1 and "trace" in err


def test_usage_errors(capsys):
    assert run(capsys, "--graph", "/nonexistent/file.graph", "analyze")[0] == 2
    assert run(capsys, "--profile", "F9", "analyze")[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["spectrum", "--format", "png"])
    assert info.value.code == 2


def test_omega_command(capsys):
    code, out, _ = run(
        capsys, "--profile", "F2", "omega", "--component", "C1", "--lambda", "0,1", "--beta", "1",
        "--mu", "e3,a", "--nu", "@v3",
    )
    val = json.loads(out)["value"]
    z = 1 + math.e + math.exp(-1)
    assert code == 0 and val["re"] == pytest.approx(0, abs=1e-14) and val["im"] == pytest.approx(1 / z)


def test_state_eval_command(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"terms": [{"source": "C1", "weight": 1.0, "measure": {"atoms": [[1, 0, 1.0]]}}]}))
    code, out, _ = run(capsys, "--profile", "F2", "state-eval", "--beta", "1", "--spec", str(spec), "--mu", "@v3")
    assert code == 0
    assert json.loads(out)["value"]["re"] == pytest.approx(1 / (1 + math.e + math.exp(-1)))
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "state-eval", "--beta", "1", "--spec", str(bad))[0] == 1
    bad.write_text('{"terms": [{"weight": 1}]}')
    assert run(capsys, "state-eval", "--beta", "1", "--spec", str(bad))[0] == 1


def test_check_command_is_seeded(capsys):
    a = run(capsys, "--profile", "F1", "check", "--beta", "1", "--pairs", "50")
    b = run(capsys, "--profile", "F1", "check", "--beta", "1", "--pairs", "50")
    assert a == b and a[0] == 0
    residuals = json.loads(a[1])["max_residual"]
    assert set(residuals) == {"C3", "C3@1", "C3@1j", "s1", "s2"} and max(residuals.values()) <= 1e-9


def test_output_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "--profile", "F1", "--output-dir", str(tmp_path), "spectrum", "--format", "svg")
    assert code == 0 and (tmp_path / "spectrum-F1.svg").read_text().strip() == out.strip()


def test_dump_round_trip(capsys, tmp_path):
    _, dumped, _ = run(capsys, "dump")
    path = tmp_path / "g.json"
    path.write_text(dumped)
    _, a, _ = run(capsys, "--profile", "F2", "analyze")
    _, b, _ = run(capsys, "--graph", str(path), "--profile", "F2", "analyze")
    assert a == b


def test_parse_complex():
    assert parse_complex("0,1") == 1j
    assert parse_complex(" -1 , 0 ") == -1


@pytest.mark.parametrize("profile", ["gauge", "F1", "F2"])
def test_spectrum_json_agrees_with_classify(capsys, doc, profile):
    g = doc.graph(profile)
    _, out, _ = run(capsys, "--profile", profile, "spectrum", "--format", "json")
    for row in json.loads(out)["rows"]:
        if row["value"] is None:
            continue
        if row["kind"] == "sink":
            iv = classify_sink(g, row["label"]).interval
            expected = iv.lower if row["direction"] == "+" else iv.upper
        else:
            v = classify_component(g, component_by_label(g, row["label"]))
            if row["shape"] == "Point":
                expected = v.beta_c
            else:
                expected = v.interval.lower if row["direction"] == "+" else v.interval.upper
        assert row["value"] == pytest.approx(expected, abs=1e-9)
        assert row["value_label"] == closed_form(row["value"])
