import json

import pytest

from heavenly_forge.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, SUITES, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == EXIT_PASS
    assert [line.split("\t")[0] for line in out.splitlines()] == list(SUITES)


@pytest.mark.parametrize("suite", ["flows", "omega", "metric", "homothety", "foliation", "painleve",
                                   "heavenly", "series", "sparling-tod", "legendre", "limit"])
def test_passing_suites(capsys, suite):
    code, out, _ = run(capsys, "run", suite)
    assert code == EXIT_PASS, out
    assert "PASSED" in out.splitlines()[-1]


@pytest.mark.parametrize("suite", ["pprime", "timmetric", "appendix"])
def test_suites_with_printed_form_failures(capsys, suite):
    code, out, _ = run(capsys, "run", suite, "--format", "json")
    assert code == EXIT_FAIL
    data = json.loads(out)
    bad = [c for c in data["checks"] if c["status"] == "fail"]
    assert bad and all("printed form" in c["name"] and c["witness"] for c in bad)


def test_weyl_skipped_without_flag(capsys):
    code, out, _ = run(capsys, "run", "weyl")
    assert code == EXIT_PASS and "SKIPPED" in out
    code, out, _ = run(capsys, "run", "weyl", "--allow-slow")
    assert code == EXIT_PASS and "PASSED" in out


def test_usage_errors(capsys):
    assert run(capsys, "run", "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "run", "omega", "--n", "4")[0] == EXIT_USAGE
    assert run(capsys, "run", "series", "--n", "2")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2


def test_json_deterministic_modulo_timing(capsys):
    def strip(text):
        data = json.loads(text)
        for c in data["checks"]:
            c.pop("seconds")
        return data

    a = strip(run(capsys, "run", "limit", "--seed", "3", "--format", "json")[1])
    b = strip(run(capsys, "run", "limit", "--seed", "3", "--format", "json")[1])
    assert a == b
    c = strip(run(capsys, "run", "limit", "--seed", "4", "--format", "json")[1])
    assert c["params"]["seed"] == 4


def test_output_file(tmp_path, capsys):
    path = tmp_path / "omega.json"
    code, out, _ = run(capsys, "run", "omega", "--n", "2", "--format", "json", "--output", str(path))
    assert code == EXIT_PASS and out == ""
    assert json.loads(path.read_text())["passed"]


def test_all_n2_skips_n1_only_suites(capsys):
    code, out, _ = run(capsys, "run", "all", "--n", "2", "--format", "json")
    data = json.loads(out)
    skipped = {c["name"] for c in data["checks"] if c["status"] == "skipped"}
    assert {"series", "pprime", "appendix", "weyl"} <= skipped
    assert code == EXIT_PASS


@pytest.mark.parametrize("what", ["omega", "pi1", "metricpi", "toml"])
def test_show(capsys, what):
    code, out, _ = run(capsys, "show", what)
    assert code == EXIT_PASS and out.strip()


def test_show_pi1_matches_golden_listing(capsys):
    from importlib import resources

    _, out, _ = run(capsys, "show", "pi1")
    golden = resources.files("heavenly_forge").joinpath("golden", "pi1_components.txt").read_text()
    assert out.strip() == "\n".join(l for l in golden.splitlines() if not l.startswith("#")).strip()
