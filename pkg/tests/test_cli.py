import json
import subprocess
import sys

import pytest

from expanselab.cli import RunConfig, main, run
from expanselab.constructions import GOLDEN_XBAR
from expanselab.corpus import corpus, random_system


def call(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


# -- construct -----------------------------------------------------------------

def test_construct_xbar_plain_text(capsys):
    status, out, _ = call(capsys, "construct", "xbar", "--length", "72")
    assert status == 0
    bits = out.strip()
    assert len(bits) == 72 and bits.startswith(GOLDEN_XBAR)


def test_construct_xbar_json(capsys):
    _, out, _ = call(capsys, "construct", "xbar", "--length", "10", "--json")
    assert json.loads(out) == {"length": 10, "bits": GOLDEN_XBAR[:10]}


def test_construct_P(capsys):
    _, out, _ = call(capsys, "construct", "P", "--horizon", "24")
    data = json.loads(out)
    assert data["P"]["members"][:6] == [1, 2, 5, 6, 7, 8]
    assert data["P_complement"]["members"][:6] == [3, 4, 9, 10, 11, 12]


def test_construct_dcounts(capsys):
    _, out, _ = call(capsys, "construct", "dcounts", "--m", "4")
    assert out.splitlines()[0].split()[:3] == ["m", "t", "C_m"]
    _, out, _ = call(capsys, "construct", "dcounts", "--m", "4", "--json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[-1] == {"m": 4, "d_counts": {"d_2": 2, "d_4": 1}}


def test_construct_blocks(capsys):
    _, out, _ = call(capsys, "construct", "blocks", "--m", "3")
    assert json.loads(out) == {"m": 3, "B": [19, 24], "C": [19, 22]}


def test_out_flag_writes_file(tmp_path, capsys):
    path = tmp_path / "x.txt"
    assert main(["construct", "xbar", "--length", "20", "--out", str(path)]) == 0
    assert path.read_text().strip() == GOLDEN_XBAR[:20]


# -- classify and dual ----------------------------------------------------------------

def test_classify_window(capsys):
    w = json.dumps({"lo": 1, "hi": 10, "members": [2, 4, 6, 8, 10], "excludes_zero": False})
    status, out, _ = call(capsys, "classify", "--window", w, "--kind", "syndetic", "--requirement", "2")
    data = json.loads(out)
    assert status == 0 and data["kind"] == "ConsistentWitness"
    assert data["max_gap"] == 2


def test_classify_rejects_bad_input(capsys):
    status, _, err = call(capsys, "classify", "--window", '{"lo": 1}', "--kind", "thick",
                          "--requirement", "2")
    assert status == 2 and err.startswith("error:")


def test_dual_family(capsys):
    fam = json.dumps({"n": 2, "subsets": [[0]]})
    status, out, _ = call(capsys, "dual", "--family", fam)
    assert status == 0
    assert json.loads(out) == {"n": 2, "subsets": [1, 3]}


def test_nonpositive_flags_exit_two(capsys):
    status, _, err = call(capsys, "verify", "chen", "--horizon", "0")
    assert status == 2 and "horizon" in err
    status, _, _ = call(capsys, "verify", "syndetic-refutation", "--epsilon", "1/2,-1")
    assert status == 2


# -- verify ------------------------------------------------------------------------------

@pytest.mark.parametrize("suite", ["eg1", "periodic", "powers", "product", "conjugacy",
                                   "inverse-limit", "generators", "chen", "chainmix", "extend"])
def test_verify_suites_pass(capsys, suite):
    status, out, _ = call(capsys, "verify", suite, "--horizon", "60")
    lines = [json.loads(line) for line in out.splitlines()]
    assert status == 0 and lines
    for rec in lines:
        assert set(rec) == {"claim", "anchor", "verdict", "witness", "constants", "params", "runtime"}
        assert rec["verdict"] == "pass"


def test_verify_ex1_aligned_and_literal(capsys):
    status, out, _ = call(capsys, "verify", "ex1", "--horizon", "300")
    assert status == 0
    status, out, _ = call(capsys, "verify", "ex1", "--horizon", "300", "--literal")
    claims = {json.loads(l)["claim"]: json.loads(l)["verdict"] for l in out.splitlines()}
    assert status == 1
    assert claims["ex1.case2.r=0"] == "fail" and claims["ex1.case2.r=0.aligned"] == "pass"


def test_verify_syndetic_epsilon_grid(capsys):
    status, out, _ = call(capsys, "verify", "syndetic-refutation", "--horizon", "200",
                          "--epsilon", "1/2,1/16")
    lines = [json.loads(l) for l in out.splitlines()]
    assert status == 0 and len(lines) >= 2


def test_verify_output_is_deterministic():
    def strip(reports):
        return [{k: v for k, v in r.to_json().items() if k != "runtime"} for r in reports]

    cfg = RunConfig("verify", "product", horizon=30)
    a, _ = run(cfg)
    b, _ = run(cfg)
    assert strip(a) == strip(b)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "expanselab.cli", "construct", "xbar", "--length", "8"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "10011010"


# -- corpus --------------------------------------------------------------------------------

def test_corpus_is_seeded_and_valid():
    a = corpus(seed=3, count=6)
    b = corpus(seed=3, count=6)
    assert [s.to_json() for s in a] == [s.to_json() for s in b]
    assert a[0].name == "four_cycle" and a[1].name == "identity_two"
    assert all(2 <= s.n <= 8 for s in a[2:])


def test_corpus_invertibility_filter():
    assert all(s.invertible for s in corpus(seed=1, count=5, invertible=True))
    assert all(s.name not in ("four_cycle", "identity_two") for s in corpus(seed=1, count=5, invertible=False))


def test_random_systems_satisfy_metric_axioms():
    import random
    rng = random.Random(0)
    for n in range(1, 9):
        s = random_system(rng, n)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert s.dist[i][k] <= s.dist[i][j] + s.dist[j][k]
