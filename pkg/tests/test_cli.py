import json

import pytest

from operadim.cli import (
    EXIT_DEFECT,
    EXIT_OK,
    EXIT_UNCERTIFIED,
    EXIT_USAGE,
    ResultCache,
    RunRecord,
    main,
)
from operadim.consequences import load_matrix

PROBE = 2**63 - 25


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _strip_volatile(payload):
    """Remove timestamp/timing fields so byte-level comparison is meaningful."""
    def clean(obj):
        if isinstance(obj, dict):
            return {
                k: clean(v)
                for k, v in obj.items()
                if k not in ("timestamp", "wall_time_ms", "timings_ms")
            }
        if isinstance(obj, list):
            return [clean(v) for v in obj]
        return obj

    return clean(payload)


# --- dim ---------------------------------------------------------------------

def test_dim_preset_json(clean_cache, capsys):
    code, out, _ = run(
        capsys, "dim", "--preset", "associative", "--degree", "4",
        "--prime", "auto", "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    rec = json.loads(out)["record"]
    assert rec["dim"] == 24
    assert rec["prime"] == PROBE
    assert rec["monomial_count"] == 120
    assert rec["operad"] == "associative"


def test_dim_human_output(clean_cache, capsys):
    code, out, _ = run(
        capsys, "dim", "--preset", "right-alternative", "--degree", "4",
        "--cache", clean_cache,
    )
    assert code == EXIT_OK
    assert "dim        60" in out
    assert "uncertified" in out


def test_dim_explicit_small_prime(clean_cache, capsys):
    code, out, _ = run(
        capsys, "dim", "--preset", "dual-alternative", "--degree", "5",
        "--prime", "3", "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    assert json.loads(out)["record"]["dim"] == 27  # 2^5 - 5 in characteristic 3


def test_dim_p2_warns_for_presets(clean_cache, capsys):
    code, _, err = run(
        capsys, "dim", "--preset", "associative", "--degree", "3",
        "--prime", "2", "--cache", clean_cache,
    )
    assert code == EXIT_OK
    assert "characteristic 2" in err


def test_dim_rejects_composite_prime(clean_cache, capsys):
    code, _, err = run(
        capsys, "dim", "--preset", "associative", "--degree", "3",
        "--prime", "91", "--cache", clean_cache,
    )
    assert code == EXIT_USAGE
    assert "not a prime" in err


def test_dim_identity_file(clean_cache, capsys, tmp_path):
    path = tmp_path / "ids.txt"
    path.write_text("(x*y)*z + (x*z)*y - x*(y*z) - x*(z*y) = 0\n")
    code, out, _ = run(
        capsys, "dim", "--identities", str(path), "--degree", "4",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    rec = json.loads(out)["record"]
    assert rec["dim"] == 60
    assert rec["operad"].startswith("file:")


def test_dim_rejects_non_multilinear_file(clean_cache, capsys, tmp_path):
    path = tmp_path / "ids.txt"
    path.write_text("(x*y)*y = x*(y*y)\n")
    code, _, err = run(
        capsys, "dim", "--identities", str(path), "--degree", "4",
        "--cache", clean_cache,
    )
    assert code == EXIT_USAGE
    assert "linearize" in err


def test_dim_dump_matrix(clean_cache, capsys, tmp_path):
    dump = tmp_path / "m.txt"
    code, _, _ = run(
        capsys, "dim", "--preset", "associative", "--degree", "3",
        "--cache", clean_cache, "--dump-matrix", str(dump),
    )
    assert code == EXIT_OK
    m = load_matrix(str(dump))
    assert m.n_cols == 12
    assert m.degree == 3


def test_degree_guardrail(clean_cache, capsys):
    code, _, err = run(
        capsys, "dim", "--preset", "associative", "--degree", "7",
        "--cache", clean_cache,
    )
    assert code == EXIT_USAGE
    assert "--i-know-this-is-huge" in err


def test_missing_operad_source(clean_cache, capsys):
    code, _, err = run(capsys, "dim", "--degree", "3", "--cache", clean_cache)
    assert code == EXIT_USAGE
    assert "--preset" in err


def test_unknown_preset_exits_1(clean_cache, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dim", "--preset", "nope", "--degree", "3", "--cache", clean_cache])
    assert exc.value.code == EXIT_USAGE


# --- cache -------------------------------------------------------------------

def test_cache_coherence_second_run_identical(clean_cache, capsys):
    args = ["dim", "--preset", "alternative", "--degree", "4",
            "--cache", clean_cache, "--json"]
    code1, out1, _ = run(capsys, *args)
    lines_after_first = open(clean_cache).read().count("\n")
    code2, out2, _ = run(capsys, *args)
    lines_after_second = open(clean_cache).read().count("\n")
    assert code1 == code2 == EXIT_OK
    assert lines_after_first == lines_after_second == 1  # no recomputation
    assert _strip_volatile(json.loads(out1)) == _strip_volatile(json.loads(out2))
    # the cached record is returned verbatim, timestamps included
    assert json.loads(out1) == json.loads(out2)


def test_cache_conflict_aborts_with_both_values(clean_cache, capsys):
    run(capsys, "dim", "--preset", "associative", "--degree", "3",
        "--cache", clean_cache)
    record = json.loads(open(clean_cache).readline())
    record["rank"] += 1
    with open(clean_cache, "a") as fh:
        fh.write(json.dumps(record) + "\n")
    code, _, err = run(
        capsys, "dim", "--preset", "associative", "--degree", "3",
        "--cache", clean_cache,
    )
    assert code == EXIT_USAGE
    assert str(record["rank"]) in err and str(record["rank"] - 1) in err


def test_cache_is_keyed_by_prime(clean_cache, capsys):
    run(capsys, "dim", "--preset", "associative", "--degree", "3",
        "--cache", clean_cache, "--prime", "auto")
    run(capsys, "dim", "--preset", "associative", "--degree", "3",
        "--cache", clean_cache, "--prime", "5")
    records = [json.loads(l) for l in open(clean_cache)]
    assert len(records) == 2
    assert {r["prime"] for r in records} == {PROBE, 5}


def test_result_cache_put_and_conflict(tmp_path):
    path = str(tmp_path / "c.jsonl")
    cache = ResultCache(path)
    rec = RunRecord("op", 3, 5, 12, 6, 6, 6, 1.0, "t")
    cache.put(rec)
    cache.put(rec)  # idempotent
    assert open(path).read().count("\n") == 1
    bad = RunRecord("op", 3, 5, 12, 6, 7, 5, 1.0, "t")
    with pytest.raises(Exception, match="conflict"):
        cache.put(bad)


# --- certify -----------------------------------------------------------------

def test_certify_small_certified(clean_cache, capsys):
    code, out, _ = run(
        capsys, "certify", "--preset", "right-alternative", "--degree", "3",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["dim"] == 9
    cert = payload["certificate"]
    assert cert["verdict"] == "certified"
    assert len(cert["primes"]) == 1  # select_primes(3) needs a single prime


def test_certify_degree4_three_primes(clean_cache, capsys):
    code, out, _ = run(
        capsys, "certify", "--preset", "right-alternative", "--degree", "4",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    cert = json.loads(out)["certificate"]
    assert cert["r"] == 60
    assert cert["primes"] == [2**63 - 25, 2**63 - 165, 2**63 - 259]
    assert json.loads(out)["dim"] == 60


def test_certify_resumes_from_cache(clean_cache, capsys):
    # first run populates per-prime records; a second run does no rank work
    # and reproduces the same certificate (simulates kill + restart)
    args = ["certify", "--preset", "right-alternative", "--degree", "4",
            "--cache", clean_cache, "--json"]
    _, out1, _ = run(capsys, *args)
    n_lines = open(clean_cache).read().count("\n")
    assert n_lines == 3
    code, out2, _ = run(capsys, *args)
    assert code == EXIT_OK
    assert open(clean_cache).read().count("\n") == n_lines
    c1, c2 = json.loads(out1)["certificate"], json.loads(out2)["certificate"]
    assert (c1["primes"], c1["ranks"], c1["verdict"]) == \
        (c2["primes"], c2["ranks"], c2["verdict"])


def test_certify_partial_cache_completes(clean_cache, capsys):
    # pre-populate only the probe prime, as if a longer run was interrupted
    run(capsys, "dim", "--preset", "right-alternative", "--degree", "4",
        "--prime", "auto", "--cache", clean_cache)
    assert open(clean_cache).read().count("\n") == 1
    code, out, _ = run(
        capsys, "certify", "--preset", "right-alternative", "--degree", "4",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    assert json.loads(out)["certificate"]["verdict"] == "certified"
    assert open(clean_cache).read().count("\n") == 3


# --- dual / gk / linearize / presets ----------------------------------------

def test_dual_command(clean_cache, capsys):
    code, out, _ = run(
        capsys, "dual", "--preset", "right-alternative", "--cache", clean_cache,
    )
    assert code == EXIT_OK
    assert "x*y*z + x*z*y = 0" in out


def test_gk_right_alternative_defect(clean_cache, capsys):
    code, out, _ = run(
        capsys, "gk", "--preset", "right-alternative", "--max-degree", "5",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_DEFECT
    payload = json.loads(out)
    assert payload["dims"] == [1, 2, 9, 60, 530]
    assert payload["dual_dims"] == [1, 2, 3, 0, 0]
    assert payload["defect"] == ["0", "0", "0", "0", "1/6"]
    assert payload["koszul_refuted"] is True


def test_gk_associative_no_defect(clean_cache, capsys):
    code, out, _ = run(
        capsys, "gk", "--preset", "associative", "--max-degree", "5",
        "--cache", clean_cache, "--json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert all(c == "0" for c in payload["defect"])
    assert payload["koszul_refuted"] is False


def test_gk_never_claims_koszulity(clean_cache, capsys):
    _, out, _ = run(
        capsys, "gk", "--preset", "associative", "--max-degree", "4",
        "--cache", clean_cache,
    )
    assert "NOT implied" in out


def test_linearize_command(capsys):
    code, out, _ = run(capsys, "linearize", "(x*y)*y = x*(y*y)")
    assert code == EXIT_OK
    assert out.strip() == "-x*(y1*y2) - x*(y2*y1) + x*y1*y2 + x*y2*y1 = 0"


def test_linearize_multilinear_input_fails(capsys):
    code, _, err = run(capsys, "linearize", "(x*y)*z = x*(y*z)")
    assert code == EXIT_USAGE
    assert "multilinear" in err


def test_linearize_parse_error(capsys):
    code, _, err = run(capsys, "linearize", "(x*y = z")
    assert code == EXIT_USAGE


def test_presets_command(capsys):
    code, out, _ = run(capsys, "presets", "--json")
    assert code == EXIT_OK
    table = json.loads(out)
    assert set(table) >= {"alternative", "associative", "dual-alternative"}
    assert any("x*(y*z)" in i for i in table["associative"])
