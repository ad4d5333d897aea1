import csv
import json
import re

import numpy as np
import pytest
from PIL import Image

from nofade.cli import main
from nofade.scoring import nofade
from nofade.synthetic import equiprobable_image


def run(tmp_path, *args, out="out"):
    return main(["--out-dir", str(tmp_path / out), "--store", str(tmp_path / "store"), *args])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def save(arr, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr).save(path)


def score_bundled(tmp_path, bundled):
    for name, task in (("synth-cls", "classification"), ("synth-seg", "segmentation"),
                       ("synth-det", "detection")):
        assert run(tmp_path, "complexity", str(bundled[name]), "--task", task) == 0


def test_entropy_constant_images(tmp_path):
    for i in range(10):
        save(np.full((4, 4), 20 * i, dtype=np.uint8), tmp_path / "ds" / f"{i}.png")
    assert run(tmp_path, "entropy", str(tmp_path / "ds")) == 0
    hist = read_csv(tmp_path / "out" / "entropy_hist.csv")
    assert len(hist) == 64
    assert int(hist[0]["count"]) == 10 and sum(int(r["count"]) for r in hist) == 10
    samples = read_csv(tmp_path / "out" / "entropy_samples.csv")
    assert {r["entropy_bits"] for r in samples} == {"0.0"}
    svg = (tmp_path / "out" / "entropy_hist.svg").read_text()
    assert "entropy (bits)" in svg and "image count" in svg


def test_entropy_class_layout(tmp_path, bundled):
    assert run(tmp_path, "entropy", str(bundled["synth-cls"]), "--layout", "class") == 0
    names = {p.name for p in (tmp_path / "out").iterdir()}
    for label in ("coarse", "medium", "fine"):
        assert f"entropy_samples_{label}.csv" in names


def test_entropy_uniform_noise_top_bin(tmp_path):
    for i in range(5):
        save(equiprobable_image(32, 32), tmp_path / "noise" / f"{i}.png")
    assert run(tmp_path, "entropy", str(tmp_path / "noise")) == 0
    hist = read_csv(tmp_path / "out" / "entropy_hist.csv")
    mode = max(hist, key=lambda r: int(r["count"]))
    assert (mode["lower_bits"], mode["upper_bits"]) == ("7.875", "8.0")


def test_entropy_errors(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert run(tmp_path, "entropy", str(tmp_path / "empty")) == 1
    (tmp_path / "bad").mkdir()
    (tmp_path / "bad" / "a.png").write_bytes(b"nope")
    assert run(tmp_path, "entropy", str(tmp_path / "bad"), "--skip-bad") == 1
    assert "a.png" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_entropy_skip_bad(tmp_path, capsys):
    save(np.zeros((3, 3), dtype=np.uint8), tmp_path / "mixed" / "good.png")
    (tmp_path / "mixed" / "bad.png").write_bytes(b"nope")
    assert run(tmp_path, "entropy", str(tmp_path / "mixed")) == 1
    assert not (tmp_path / "out").exists()
    assert run(tmp_path, "entropy", str(tmp_path / "mixed"), "--skip-bad") == 0
    assert "bad.png" in capsys.readouterr().err
    assert len(read_csv(tmp_path / "out" / "entropy_samples.csv")) == 1


def test_complexity_segmentation_constant(tmp_path, capsys):
    for i in range(3):
        save(np.full((4, 4), i, dtype=np.uint8), tmp_path / "seg" / f"{i}.png")
    assert run(tmp_path, "complexity", str(tmp_path / "seg"), "--task", "segmentation") == 0
    assert capsys.readouterr().out.strip() == "seg\tmean-entropy\t0.0"
    stored = json.loads((tmp_path / "store" / "complexity" / "seg.json").read_text())
    assert stored["value"] == 0.0


def test_complexity_mask_flag(tmp_path, capsys):
    save(np.zeros((4, 4), dtype=np.uint8), tmp_path / "img" / "a.png")
    save(equiprobable_image(16, 16), tmp_path / "masks" / "a.png")
    assert run(tmp_path, "complexity", str(tmp_path / "img"), "--task", "segmentation",
               "--mask-dir", str(tmp_path / "masks")) == 0
    assert capsys.readouterr().out.strip().endswith("\t4.0")


def test_complexity_classification_refusals(tmp_path, capsys):
    for i in range(3):
        save(np.zeros((4, 4), dtype=np.uint8), tmp_path / "one" / "only" / f"{i}.png")
    assert run(tmp_path, "complexity", str(tmp_path / "one"), "--task", "classification") == 1
    assert "at least 2 class" in capsys.readouterr().err
    for c in ("a", "b"):
        for i in range(3):
            save(np.zeros((4, 4), dtype=np.uint8), tmp_path / "same" / c / f"{i}.png")
    assert run(tmp_path, "complexity", str(tmp_path / "same"), "--task", "classification") == 1
    assert "undefined" in capsys.readouterr().err


def test_carbon_command(tmp_path, sample_registry):
    assert run(tmp_path, "carbon", str(sample_registry)) == 0
    rows = read_csv(tmp_path / "out" / "carbon.csv")
    assert len(rows) == 6 and rows[-1]["model"] == "TOTAL"
    total = sum(float(r["co2_tonnes"]) for r in rows[:-1])
    assert float(rows[-1]["co2_tonnes"]) == pytest.approx(total, rel=1e-12)


def test_carbon_zero_hours_and_unknown_gpu(tmp_path, sample_registry):
    text = sample_registry.read_text().replace(",12.0,GTX 1080 Ti", ",0.0,GTX 1080 Ti")
    (tmp_path / "reg.csv").write_text(text)
    assert run(tmp_path, "carbon", str(tmp_path / "reg.csv")) == 0
    first = read_csv(tmp_path / "out" / "carbon.csv")[0]
    assert (first["power_wh"], first["co2_tonnes"]) == ("0.0", "0.0")
    (tmp_path / "bad.csv").write_text(text.replace("TITAN X", "XYZ-9000"))
    assert run(tmp_path, "carbon", str(tmp_path / "bad.csv"), out="o2") == 1


def test_intensity_flag_and_env_config(tmp_path, sample_registry, monkeypatch):
    assert run(tmp_path, "--intensity", "0.001", "carbon", str(sample_registry)) == 0
    assert read_csv(tmp_path / "out" / "carbon.csv")[0]["intensity_t_per_kwh"] == "0.001"
    cfg = tmp_path / "nofade.ini"
    cfg.write_text("[nofade]\nintensity = 0.0005\n")
    monkeypatch.setenv("NOFADE_CONFIG", str(cfg))
    assert run(tmp_path, "carbon", str(sample_registry), out="env") == 0
    assert read_csv(tmp_path / "env" / "carbon.csv")[0]["intensity_t_per_kwh"] == "0.0005"
    cfg.write_text("[nofade]\nbogus = 1\n")
    assert run(tmp_path, "carbon", str(sample_registry), out="bad") == 1


def test_nofade_requires_scores(tmp_path, sample_registry, capsys):
    assert run(tmp_path, "nofade", str(sample_registry)) == 1
    assert "synth-cls" in capsys.readouterr().err


def test_nofade_command_and_snapshot(tmp_path, sample_registry, bundled, capsys):
    score_bundled(tmp_path, bundled)
    capsys.readouterr()
    assert run(tmp_path, "nofade", str(sample_registry)) == 0
    out = capsys.readouterr().out
    digest = re.search(r"snapshot ([0-9a-f]{64})", out).group(1)
    rows = read_csv(tmp_path / "out" / "nofade.csv")
    assert len(rows) == 5
    for r in rows:
        expected = nofade(float(r["metric_percent"]), float(r["complexity"]), float(r["flops"])).value
        assert float(r["nofade"]) == expected
    assert run(tmp_path, "nofade", str(sample_registry)) == 0
    assert digest in capsys.readouterr().out
    assert len(list((tmp_path / "store" / "results").glob("*.json"))) == 2


def test_report_nofade_scatter(tmp_path, sample_registry, bundled):
    score_bundled(tmp_path, bundled)
    assert run(tmp_path, "report", "nofade-scatter", "--registry", str(sample_registry)) == 1
    assert run(tmp_path, "report", "nofade-scatter", "--registry", str(sample_registry),
               "--task", "classification") == 0
    rows = read_csv(tmp_path / "out" / "nofade-scatter.csv")
    assert [r["label"] for r in rows] == ["TinyConv-A", "WideConv-B"]
    svg = (tmp_path / "out" / "nofade-scatter.svg").read_text()
    assert '"scale": "log10"' in svg and "TinyConv-A" in svg


def test_report_flops_ratio(tmp_path, bundled):
    score_bundled(tmp_path, bundled)
    reg = tmp_path / "two.csv"
    reg.write_text("model,task,dataset,metric_percent,flops,gpu_hours,gpu_type,source\n"
                   "a,segmentation,synth-seg,60.0,100.0,1.0,V100,\n"
                   "b,segmentation,synth-seg,60.0,10000.0,1.0,V100,\n")
    assert run(tmp_path, "report", "nofade-scatter", "--registry", str(reg)) == 0
    rows = read_csv(tmp_path / "out" / "nofade-scatter.csv")
    assert float(rows[0]["y"]) == 2 * float(rows[1]["y"])


def test_report_single_point_and_entropy_hist(tmp_path, bundled):
    reg = tmp_path / "one.csv"
    reg.write_text("model,task,dataset,metric_percent,flops,gpu_hours,gpu_type,source\n"
                   "solo,detection,x,50.0,1e9,3.0,P100,\n")
    assert run(tmp_path, "report", "co2-scatter", "--registry", str(reg)) == 0
    assert len(read_csv(tmp_path / "out" / "co2-scatter.csv")) == 1
    assert run(tmp_path, "report", "entropy-hist", "--dataset", str(bundled["synth-seg"])) == 0
    assert len(read_csv(tmp_path / "out" / "entropy-hist.csv")) == 64
    assert run(tmp_path, "report", "entropy-hist") == 1


def test_svg_values_appear_in_csv(tmp_path, sample_registry):
    assert run(tmp_path, "report", "co2-scatter", "--registry", str(sample_registry)) == 0
    csv_text = (tmp_path / "out" / "co2-scatter.csv").read_text()
    svg = (tmp_path / "out" / "co2-scatter.svg").read_text()
    values = re.findall(r'data-(?:x|y)="([^"]+)"', svg)
    values += re.findall(r'class="point-label"[^>]*>([^<]+)<', svg)
    assert len(values) == 15
    cells = set(re.split(r"[,\n]", csv_text))
    assert all(v in cells for v in values)


def test_outputs_byte_identical(tmp_path, sample_registry):
    assert run(tmp_path, "carbon", str(sample_registry), out="a") == 0
    assert run(tmp_path, "carbon", str(sample_registry), out="b") == 0
    assert (tmp_path / "a" / "carbon.csv").read_bytes() == (tmp_path / "b" / "carbon.csv").read_bytes()


def test_module_entry_point(tmp_path, sample_registry):
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "nofade", "--out-dir", str(tmp_path), "carbon",
                           str(sample_registry)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "carbon.csv").exists()
