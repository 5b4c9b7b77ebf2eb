import json
from fractions import Fraction

import pytest

from helpers import swap_orbit, worked_chain
from semishift import GeneratorSet, Symbol, parse_word
from semishift.cli import execute, main
from semishift.serialize import (
    automaton_out,
    chain_in,
    chain_out,
    measure_in,
    measure_out,
    pattern_out,
    read_json,
    write_json,
)

F = Fraction
GS2 = GeneratorSet.from_signed((1, 2))

MATRICES = "[[[1,2],[0,1]],[[1,0],[2,1]]]"


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.json"
    write_json(path, measure_out(worked_chain(2)))
    return path


@pytest.fixture
def swap_file(tmp_path):
    path = tmp_path / "swap.json"
    write_json(
        path,
        {
            "kind": "periodic",
            "orbits": [automaton_out(swap_orbit())],
            "weights": ["1/1"],
        },
    )
    return path


def pattern_file(tmp_path, assignment, name="pat.json"):
    path = tmp_path / name
    pat = {"entries": [[k, v] for k, v in assignment.items()]}
    write_json(path, pat)
    return path


def test_validate_chain_example(chain_file):
    code, text = execute(["validate-chain", "--chain", str(chain_file)])
    assert code == 0
    assert "valid: true" in text
    assert "invariant: true" in text


def test_validate_chain_reports_problems(tmp_path):
    bad = measure_out(worked_chain(2))
    bad["p"] = ["1/2", "1/3"]
    path = tmp_path / "bad.json"
    write_json(path, bad)
    code, text = execute(["validate-chain", "--chain", str(path)])
    assert code == 1
    assert "valid: false" in text
    assert "problem" in text


def test_validate_chain_noninvariant_exits_one(tmp_path):
    flat = [["1/2", "1/2"], ["1/2", "1/2"]]
    data = {
        "kind": "chain", "d": 2, "sigma": [1, 2], "alphabet": [0, 1],
        "p": ["1/4", "3/4"], "P": {"1": flat, "2": flat},
    }
    path = tmp_path / "skew.json"
    write_json(path, data)
    code, text = execute(["validate-chain", "--chain", str(path)])
    assert code == 1
    assert "valid: true" in text
    assert "invariant: false" in text
    assert "witness" in text


def test_counterexample_example_no_delta():
    code, text = execute(
        ["counterexample", "--matrices", MATRICES, "--word", "a1a2A1A2",
         "--prime", "5"]
    )
    assert code == 0
    assert "threshold: 1/15625" in text
    assert "matrix_mod_p: [[1,2],[3,2]]" in text
    assert "witness: [1,0]" in text
    assert "witness_image: [1,3]" in text
    assert "cycle_length: 4" in text


def test_counterexample_with_delta(tmp_path):
    out = tmp_path / "cx.json"
    code, text = execute(
        ["counterexample", "--matrices", MATRICES, "--word", "a1a2A1A2",
         "--prime", "5", "--delta", "1/100000", "--out", str(out)]
    )
    assert code == 0
    assert "violates_bound: true" in text
    assert "chain_invariant: true" in text
    chain = chain_in(read_json(out))
    assert len(chain.alphabet) == 25

    code, text = execute(
        ["counterexample", "--matrices", MATRICES, "--word", "a1a2A1A2",
         "--prime", "5", "--delta", "1/100"]
    )
    assert code == 1
    assert "violates_bound: false" in text


def test_eval_membership_error_exits_two(chain_file, tmp_path):
    pat = pattern_file(tmp_path, {"A1": 0})
    code, text = execute(
        ["eval", "--measure", str(chain_file), "--pattern", str(pat)]
    )
    assert code == 2
    assert "MembershipError" in text


def test_eval_reports_exact_mass(chain_file, tmp_path):
    pat = pattern_file(tmp_path, {"": 0, "a2": 1, "a1a2": 1})
    code, text = execute(
        ["eval", "--measure", str(chain_file), "--pattern", str(pat)]
    )
    assert code == 0
    assert "mass: 1/8" in text


def test_eval_human_column(chain_file, tmp_path):
    pat = pattern_file(tmp_path, {"": 0})
    code, text = execute(
        ["eval", "--measure", str(chain_file), "--pattern", str(pat), "--human"]
    )
    assert code == 0
    assert "mass: 1/3 (~ 0.333333)" in text


def test_csv_format(chain_file, tmp_path):
    pat = pattern_file(tmp_path, {"": 0})
    code, text = execute(
        ["eval", "--measure", str(chain_file), "--pattern", str(pat),
         "--format", "csv"]
    )
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "key,value"
    assert "mass,1/3" in lines


def test_report_determinism(chain_file, tmp_path):
    pat = pattern_file(tmp_path, {"": 1, "a1": 0})
    argv = ["eval", "--measure", str(chain_file), "--pattern", str(pat)]
    assert execute(argv) == execute(argv)


def test_invariance_check_chain(chain_file):
    code, text = execute(["invariance-check", "--measure", str(chain_file)])
    assert code == 0
    assert "invariant: true" in text


def test_invariance_check_periodic(swap_file):
    code, text = execute(
        ["invariance-check", "--measure", str(swap_file), "--radius", "1"]
    )
    assert code == 0
    assert "invariant: true" in text


def test_extend_and_pushforward(tmp_path, chain_file):
    out = tmp_path / "ext.json"
    code, text = execute(["extend", "--chain", str(chain_file), "--out", str(out)])
    assert code == 0
    assert "invariant: true" in text
    extended = chain_in(read_json(out))
    assert len(extended.gs.sigma) == 4

    code, text = execute(
        ["pushforward-check", "--extended", str(out),
         "--chain", str(chain_file), "--radius", "2"]
    )
    assert code == 0
    assert "agree: true" in text


def test_extend_noninvariant_exits_two(tmp_path):
    flat = [["1/2", "1/2"], ["1/2", "1/2"]]
    data = {
        "kind": "chain", "d": 2, "sigma": [1, 2], "alphabet": [0, 1],
        "p": ["1/4", "3/4"], "P": {"1": flat, "2": flat},
    }
    path = tmp_path / "skew.json"
    write_json(path, data)
    code, text = execute(["extend", "--chain", str(path)])
    assert code == 1
    assert "NotInvariant" in text


def test_markovize_and_consistency(tmp_path, swap_file):
    out = tmp_path / "blocks.json"
    code, text = execute(
        ["markovize", "--measure", str(swap_file), "--order", "1",
         "--out", str(out)]
    )
    assert code == 0
    assert "blocks: 2" in text
    assert "valid: true" in text
    assert "invariant: true" in text
    block_chain = measure_in(read_json(out))
    assert sorted(block_chain.alphabet) == ["B0", "B1"]
    assert read_json(out)["blocks"]

    pat = pattern_file(tmp_path, {"": 0, "a1": 1})
    code, text = execute(
        ["consistency", "--measure", str(swap_file), "--order", "1",
         "--pattern", str(pat)]
    )
    assert code == 0
    assert "consistent: true" in text
    assert "oracle_mass: 1/2" in text
    assert "chain_mass: 1/2" in text


def test_orbit_analyze(tmp_path, swap_file):
    auto = tmp_path / "auto.json"
    write_json(auto, automaton_out(swap_orbit()))
    code, text = execute(["orbit-analyze", "--automaton", str(auto)])
    assert code == 0
    assert "periodic: true" in text
    assert "transitive: true" in text
    assert "orbit_size: 2" in text
    assert "monoid_size: 2" in text
    assert "monoid_is_group: true" in text


def test_thm_a_construct_and_lift(tmp_path):
    pat = pattern_file(tmp_path, {"": 0, "a1": 1, "a2": 1})
    morphism = tmp_path / "theta.json"
    write_json(morphism, {"k": 2, "theta": {"1": [1, 0], "2": [1, 0]}})
    out = tmp_path / "point.json"
    code, text = execute(
        ["thm-a-construct", "--pattern", str(pat), "--morphism", str(morphism),
         "--alphabet", "0,1", "--out", str(out)]
    )
    assert code == 0
    assert "periodic: true" in text
    assert "readout_matches: true" in text

    lifted = tmp_path / "lifted.json"
    code, text = execute(["lift", "--automaton", str(out), "--out", str(lifted)])
    assert code == 0
    assert "periodic: true" in text
    data = read_json(lifted)
    assert sorted(data["sigma"]) == [-2, -1, 1, 2]


def test_lift_nonperiodic_exits_one(tmp_path):
    from helpers import two_point_orbit
    auto = tmp_path / "auto.json"
    write_json(auto, automaton_out(two_point_orbit()))
    code, text = execute(["lift", "--automaton", str(auto)])
    assert code == 1
    assert "NotPeriodic" in text


def test_find_morphism_deterministic(tmp_path):
    out = tmp_path / "m.json"
    argv = ["find-morphism", "--sigma", "1,2", "--radius", "1", "--degree", "4",
            "--seed", "9", "--out", str(out)]
    code1, text1 = execute(argv)
    first_bytes = out.read_bytes()
    code2, text2 = execute(argv)
    assert code1 == code2 == 0
    assert "found: true" in text1
    assert text1 == text2
    assert out.read_bytes() == first_bytes


def test_find_morphism_budget_exhausted():
    code, text = execute(
        ["find-morphism", "--sigma", "1,2", "--radius", "2", "--degree", "2",
         "--seed", "1", "--budget", "10"]
    )
    assert code == 1
    assert "found: false" in text


def test_find_morphism_requires_seed():
    with pytest.raises(SystemExit) as exc:
        execute(["find-morphism", "--sigma", "1,2", "--radius", "1",
                 "--degree", "4"])
    assert exc.value.code == 2


def test_distance(tmp_path, chain_file, swap_file):
    fair = tmp_path / "fair.json"
    write_json(
        fair,
        {"kind": "bernoulli", "d": 2, "sigma": [1, 2], "alphabet": [0, 1],
         "probs": ["1/2", "1/2"]},
    )
    code, text = execute(
        ["distance", "--first", str(fair), "--second", str(swap_file),
         "--radius", "1"]
    )
    assert code == 0
    assert "distance: 3/2" in text


def test_window_eval(tmp_path):
    measure = tmp_path / "lattice.json"
    write_json(
        measure,
        {"kind": "lattice-markov", "alphabet": [0, 1],
         "p": ["1/3", "2/3"],
         "P": [["1/2", "1/2"], ["1/4", "3/4"]]},
    )
    pat = tmp_path / "win.json"
    write_json(pat, {"entries": [[[-1], 0], [[0], 1]]})
    code, text = execute(
        ["window-eval", "--measure", str(measure), "--pattern", str(pat)]
    )
    assert code == 0
    assert "mass: 1/6" in text


def test_window_eval_rejects_tree_measure(chain_file, tmp_path):
    pat = tmp_path / "win.json"
    write_json(pat, {"entries": [[[0], 0]]})
    code, text = execute(
        ["window-eval", "--measure", str(chain_file), "--pattern", str(pat)]
    )
    assert code == 2


def test_missing_file_exits_two(tmp_path):
    code, text = execute(
        ["validate-chain", "--chain", str(tmp_path / "missing.json")]
    )
    assert code == 2
    assert "error" in text


def test_malformed_json_exits_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, text = execute(["validate-chain", "--chain", str(path)])
    assert code == 2


def test_main_prints_report(capsys, chain_file):
    code = main(["validate-chain", "--chain", str(chain_file)])
    assert code == 0
    out = capsys.readouterr().out
    assert "invariant: true" in out
