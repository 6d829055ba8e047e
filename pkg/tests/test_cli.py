import json
from pathlib import Path

import pytest

from gwmspaces import cli, jobs, spaces, triangle
from gwmspaces.report import dumps, golden_body
from gwmspaces.verify import DEFAULT_SEED, verify_suite

ROOT = Path(__file__).resolve().parents[1]
EXAMPLE = ROOT / "jobs" / "example.json"


def write_job(tmp_path, tasks, weights=("e", "e"), **extra):
    path = tmp_path / "job.json"
    path.write_text(json.dumps({"weights": {"u": weights[0], "v": weights[1]}, "tasks": tasks, **extra}))
    return str(path)


def run(tmp_path, job, *flags):
    out = tmp_path / "report.json"
    code = cli.main(["run", job, "--out", str(out), *flags])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_forward_job_reports_exact_rationals(tmp_path):
    job = write_job(tmp_path, [{"op": "forward_transform", "x": "enumerate", "count": 4}])
    code, report = run(tmp_path, job)
    assert code == 0
    assert report["schema"] == "gwmspaces.report/1"
    assert report["results"][0]["terms"] == ["1/1", "2/1", "3/1", "4/1"]


def test_cesaro_job_holds_with_alpha_one(tmp_path):
    job = write_job(tmp_path, [{"op": "classify_into_c", "matrix": "cesaro"}])
    code, report = run(tmp_path, job)
    r = report["results"][0]
    assert code == 0 and r["status"] == "holds"
    assert r["report"]["alpha"] == pytest.approx(1.0, abs=1e-9)


def test_harmonic_beta_job_fails_with_witness(tmp_path):
    job = write_job(tmp_path, [{"op": "check_beta", "a": "harmonic", "base": "c_zero"}])
    code, report = run(tmp_path, job)
    r = report["results"][0]
    assert code == 2 and r["status"] == "fails"
    assert r["report"]["conditions"]["bounded_row_sums"]["witness"]


def test_inconclusive_exit_code(tmp_path):
    job = write_job(tmp_path, [{"op": "limit_probe", "x": "(-1)^k/(k+1)", "horizon": 2000}])
    code, report = run(tmp_path, job)
    assert code == 3 and report["results"][0]["status"] == "inconclusive"


def test_fails_beats_inconclusive(tmp_path):
    job = write_job(tmp_path, [
        {"op": "limit_probe", "x": "(-1)^k/(k+1)", "horizon": 2000},
        {"op": "limit_probe", "x": "enumerate", "horizon": 200},
    ])
    assert run(tmp_path, job)[0] == 2


def test_dsl_error_carries_task_and_position(tmp_path, capsys):
    job = write_job(tmp_path, [{"op": "forward_transform", "x": "enumerate"},
                               {"op": "norm", "x": "1/(k+"}])
    code, report = run(tmp_path, job)
    assert code == 1
    bad = report["results"][1]
    assert bad["status"] == "error" and bad["position"] == 5
    assert bad["error"].startswith("task 1:")
    assert "task 1" in capsys.readouterr().err


def test_usage_errors_exit_one(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", str(bad)]) == 1
    assert cli.main(["run", write_job(tmp_path, [{"op": "no_such_op"}])]) == 1
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["run", write_job(tmp_path, [], weights=("k-2", "e"))]) == 1


def test_horizon_precedence(tmp_path, monkeypatch):
    job = write_job(tmp_path, [{"op": "limit_probe", "x": "2^(-k)"},
                               {"op": "limit_probe", "x": "2^(-k)", "horizon": 300}],
                    defaults={"horizon": 500})
    monkeypatch.setenv(jobs.HORIZON_ENV, "700")
    _, report = run(tmp_path, job)
    assert report["config"]["horizon"] == 500
    assert [r["verdict"]["horizon"] for r in report["results"]] == [500, 300]
    _, report = run(tmp_path, job, "--horizon", "900")
    assert [r["verdict"]["horizon"] for r in report["results"]] == [900, 300]
    job2 = write_job(tmp_path, [{"op": "limit_probe", "x": "2^(-k)"}])
    _, report = run(tmp_path, job2)
    assert report["results"][0]["verdict"]["horizon"] == 700


def test_example_job_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["run", str(EXAMPLE), "--out", str(a)]) == 0
    assert cli.main(["run", str(EXAMPLE), "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert "timing" in ra
    assert dumps(golden_body(ra)) == dumps(golden_body(rb))


def test_no_timing_flag_gives_byte_identical_files(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        cli.main(["run", str(EXAMPLE), "--no-timing", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()
    assert "timing" not in json.loads(a.read_text())


def test_report_serialization_rules():
    text = dumps({"b": 0.1, "a": [float("inf"), 1 / 3]})
    assert text.index('"a"') < text.index('"b"')
    assert "0.33333333333333331" in text and '"inf"' in text


def test_verify_passes_by_default(tmp_path):
    out = tmp_path / "verify.json"
    assert cli.main(["verify", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["seed"] == DEFAULT_SEED
    assert report["summary"]["failed"] == 0 and report["summary"]["passed"] > 0


def test_verify_seed_reproduces_draws():
    a, b, c = verify_suite(7), verify_suite(7), verify_suite(8)
    assert dumps(a) == dumps(b)
    assert a["draw_fingerprint"] != c["draw_fingerprint"]


def test_verify_catches_a_corrupted_kernel(monkeypatch, tmp_path):
    real = triangle.gwm_delta

    def corrupted(w):
        G = real(w)
        return triangle.Triangle(lambda n, k: G.entry(n, k) + (1 if (n, k) == (3, 1) else 0), diagonal_nonzero=True)

    monkeypatch.setattr(triangle, "gwm_delta", corrupted)
    report = verify_suite(DEFAULT_SEED)
    assert report["summary"]["failed"] > 0
    assert report["oracles"]["kernel_composition"]["failed"] > 0
    assert report["oracles"]["closed_form_inverse"]["failed"] > 0


def test_verify_catches_a_corrupted_transform(monkeypatch, tmp_path):
    real = spaces.inverse_transform
    monkeypatch.setattr(spaces, "inverse_transform", lambda w, y: real(w, y) * 1 + real(w, y).__class__(lambda k: 1 if k == 2 else 0))
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--out", str(out)]) == 2
    report = json.loads(out.read_text())
    assert report["oracles"]["roundtrip"]["failed"] > 0


def test_module_entry_point():
    import subprocess, sys
    proc = subprocess.run([sys.executable, "-m", "gwmspaces", "run", str(EXAMPLE), "--no-timing"],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["exit_code"] == 0
