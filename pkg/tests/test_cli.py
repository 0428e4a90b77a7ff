import io
import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from corpus import example  # noqa: E402

from triangle_cf import cli  # noqa: E402
from triangle_cf.render import tile_vertices  # noqa: E402

TWO_CYCLE = ["--z", "(1 - eta^2)*theta", "--w", "1"]
TWO_THETA = ["--z", "2*theta", "--w", "theta"]


def run(argv):
    args = cli.build_parser().parse_args(argv)
    out, err = io.StringIO(), io.StringIO()
    code = args.func(args, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_expand_json():
    code, out, err = run(["expand", *TWO_CYCLE])
    assert code == cli.EXIT_OK and not err
    doc = json.loads(out)
    assert set(doc) == {"b0_word", "digits", "status", "preperiod", "period", "unit", "convergents"}
    assert doc["status"] == "Periodic" and doc["period"] == 2
    assert set(doc["unit"]) == {"matrix_z", "matrix_w", "word", "rho_alpha"}
    assert set(doc["unit"]["rho_alpha"]) == {"a", "b", "D"}
    assert len(doc["unit"]["matrix_z"]) == 6 and len(doc["unit"]["rho_alpha"]["a"]) == 3
    assert all(" ± 1e-" in c for c in doc["convergents"])


def test_expand_alpha_only():
    code, out, _ = run(["expand", "--alpha", "theta + sqrt(2*eta)"])
    assert code == cli.EXIT_OK
    assert json.loads(out)["status"] == "Periodic"


def test_b0_override_is_byte_identical():
    _, first, _ = run(["expand", *TWO_THETA])
    word = json.loads(first)["b0_word"]
    _, second, _ = run(["expand", *TWO_THETA, "--b0", word])
    assert first == second


def test_pretty_and_render_cf():
    code, out, _ = run(["expand", *TWO_CYCLE, "--pretty", "--render-cf", "text"])
    assert code == 0
    assert "period    : 2" in out and "unit      :" in out
    cf = out.rstrip().splitlines()[-1]
    assert cf.count("/(") == 5 and cf.endswith("...)))))")


def test_numeric_expand():
    code, out, _ = run(["expand", "--alpha", "e", "--beta", "1/e", "--max-digits", "12", "--b0", "g7^2 g2 g7^-2"])
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "NumericStream" and len(doc["digits"]) == 12
    assert doc["unit"] is None


@pytest.mark.parametrize(
    "argv,code",
    [
        (["expand", "--alpha", "eta +"], cli.EXIT_PARSE),
        (["expand", "--alpha", "e"], cli.EXIT_INPUT),  # no conjugate: beta required
        (["expand", "--alpha", "theta", "--z", "1", "--w", "1"], cli.EXIT_INPUT),
        (["expand", "--z", "0", "--w", "0"], cli.EXIT_INPUT),
        (["expand", "--alpha", "theta", "--b0", "g5"], cli.EXIT_PARSE),
        (["expand", "--alpha", "theta", "--b0", "g3"], cli.EXIT_INPUT),
        (["expand", *TWO_THETA, "--max-digits", "2"], cli.EXIT_BUDGET),
        (["expand", "--alpha", "theta + e - e", "--beta=-theta", "--precision", "64"], cli.EXIT_PRECISION),
    ],
)
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_budget_still_reports_digits():
    code, out, err = run(["expand", *TWO_THETA, "--max-digits", "2"])
    assert code == cli.EXIT_BUDGET and "no period" in err
    doc = json.loads(out)
    assert doc["status"] == "BudgetExhausted" and len(doc["digits"]) == 2


def test_precision_env(monkeypatch):
    monkeypatch.setenv("TRIANGLE_CF_MAX_PRECISION", "64")
    assert run(["expand", "--alpha", "theta + e - e", "--beta=-theta"])[0] == cli.EXIT_PRECISION


def test_main_parse_failure():
    with pytest.raises(SystemExit) as exc:
        cli.main(["expand", "--bogus"])
    assert exc.value.code == 2


def test_constants():
    code, out, _ = run(["constants"])
    doc = json.loads(out)
    assert code == 0 and set(doc["constants"]) == {"1", "-1", "2", "-2", "3", "-3"}
    assert all(doc["checks"].values())
    code, out, _ = run(["constants", "--pretty"])
    assert code == 0 and "FAIL" not in out


def test_batch(tmp_path):
    batch = tmp_path / "jobs.txt"
    batch.write_text('# comment\n--z "(1 - eta^2)*theta" --w 1\n--alpha "eta +"\n')
    code, out, err = run(["expand", "--batch", str(batch)])
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["status"] == "Periodic"
    assert "error" in json.loads(lines[1])
    assert code == cli.EXIT_PARSE and "parse error" in err


def test_render_counts():
    code, out, _ = run(["render", *TWO_CYCLE, "--tiles", "3"])
    assert code == 0 and "<svg" in out and out.rstrip().endswith("</svg>")
    assert out.count('<path class="tile') == 4
    assert out.count('<path class="tile base"') == 1
    assert out.count('<path class="geodesic"') == 1
    code, out, _ = run(["render", *TWO_CYCLE])
    assert out.count('<path class="tile') == 1


def test_render_to_file(tmp_path):
    target = tmp_path / "pic.svg"
    code, out, _ = run(["render", *TWO_CYCLE, "--tiles", "2", "--out", str(target)])
    assert code == 0 and out == ""
    assert target.read_text().count('<path class="tile') == 3


def test_tiles_approach_alpha():
    r = example("two_cycle")
    alpha = float(r.geodesic.alpha)
    dist = [abs(sum(tile_vertices(B)) / 7 - alpha) for B in r.iter_B(6)]
    assert all(a > b for a, b in zip(dist, dist[1:]))
