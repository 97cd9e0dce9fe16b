"""End-to-end checks of the command line front end.

Everything goes through main(argv) in process; stdout/stderr are captured
and compared against frozen lines, so these double as format regressions.
"""

import pytest

from oneway.cli import main, parse_construction, parse_source


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def err_line(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert out == ""
    return code, err.strip()


class TestParseConstruction:
    @pytest.mark.parametrize(
        "spec,family",
        [
            ("identity", "identity"),
            ("bitselect:double", "bitselect"),
            ("witness:shift", "witness"),
            ("simple:collatz:16:1000", "simple"),
            ("surj:collatz", "surj"),
            ("two1:collatz:32", "two1"),
        ],
    )
    def test_round_trip(self, spec, family):
        handle = parse_construction(spec)
        assert handle.family == family
        assert handle.descriptor == spec
        again = parse_construction(handle.descriptor)
        assert again.descriptor == spec

    def test_collatz_defaults(self):
        handle = parse_construction("simple:collatz")
        assert handle.w is not None
        assert handle.w.horizon == 10**4
        assert handle.w.member_at_stage(2, 10**4)

    def test_collatz_bounds_are_positional(self):
        # first numeric segment caps the elements, second the stages
        handle = parse_construction("simple:collatz:16:1000")
        assert handle.w.horizon == 1000
        assert not handle.w.member_at_stage(16, 1000)


class TestParseSource:
    def test_periodic(self):
        src = parse_source("periodic:10")
        assert [src.bit(i) for i in range(4)] == [1, 0, 1, 0]

    def test_finite_pads_with_zeros(self):
        src = parse_source("finite:10")
        assert [src.bit(i) for i in range(4)] == [1, 0, 0, 0]

    def test_nested_interleave(self):
        src = parse_source("interleave(interleave(ones,zeros),zeros)")
        assert [src.bit(i) for i in range(4)] == [1, 0, 0, 0]


class TestEval:
    @pytest.mark.parametrize(
        "fn,source,bits,line",
        [
            ("identity", "zeros", "4", "0000 use=4"),
            ("bitselect:double", "periodic:10", "3", "111 use=5"),
            ("witness:shift", "random:7", "6", "001001 use=5"),
            ("identity", "interleave(periodic:10,zeros)", "6", "100010 use=6"),
            ("identity", "flip:0:zeros", "3", "100 use=3"),
        ],
    )
    def test_frozen_lines(self, capsys, fn, source, bits, line):
        code, out, err = run_cli(
            capsys, ["eval", "--fn", fn, "--input", source, "--bits", bits]
        )
        assert (code, err) == (0, "")
        assert out == line + "\n"


class TestInvertTree:
    def test_identity_recovers_target(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["invert-tree", "--fn", "identity", "--target", "periodic:10",
             "--bits", "4", "--depth", "8"],
        )
        assert (code, out) == (0, "1010\n")

    def test_shift_witness(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["invert-tree", "--fn", "witness:shift", "--target", "zeros",
             "--bits", "4", "--depth", "12"],
        )
        assert (code, out) == (0, "0000\n")

    def test_non_injective_is_a_domain_error(self, capsys):
        code, err = err_line(
            capsys,
            ["invert-tree", "--fn", "bitselect:double", "--target", "ones",
             "--bits", "8", "--depth", "16"],
        )
        assert code == 2
        assert err == ("error: no 8-bit consensus by depth 16; "
                       "fiber not provably singleton at desk scale")


class TestExtract:
    def test_simple_collatz(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["extract", "--mode", "simple", "--fn", "simple:collatz:16:1000",
             "--inverter", "reference", "--n", "7"],
        )
        assert (code, out) == (0, "n=7 member=true use=293 stagebound=293\n")

    def test_simple_file_enumeration(self, capsys, tmp_path):
        path = tmp_path / "w.enum"
        path.write_text("# element 2 enters at stage 1\nhorizon 100\n1 2\n")
        code, out, _ = run_cli(
            capsys,
            ["extract", "--mode", "simple", "--fn", f"simple:{path}",
             "--inverter", "reference", "--n", "2"],
        )
        assert (code, out) == (0, "n=2 member=true use=8 stagebound=8\n")

    @pytest.mark.parametrize("extra", [[], ["--sigma", "1"]])
    def test_randomized_collatz(self, capsys, extra):
        code, out, _ = run_cli(
            capsys,
            ["extract", "--mode", "randomized", "--fn", "surj:collatz:16:1000",
             "--inverter", "reference", "--n", "2"] + extra,
        )
        assert (code, out) == (0, "n=2 member=true use=15 stagebound=15\n")

    @pytest.mark.parametrize(
        "extra",
        [[], ["--upsilon", "101", "--zeta", "01"]],
        ids=["plain", "relativized"],
    )
    def test_two_to_one_collatz(self, capsys, extra):
        # the verdict is oblivious to the oracle pair, as it should be
        code, out, _ = run_cli(
            capsys,
            ["extract", "--mode", "two1", "--fn", "two1:collatz:16:100000",
             "--inverter", "reference", "--n", "5"] + extra,
        )
        assert (code, out) == (0, "n=5 member=true use=50 stagebound=50\n")

    def test_two_to_one_rejects_small_n(self, capsys):
        code, err = err_line(
            capsys,
            ["extract", "--mode", "two1", "--fn", "two1:collatz:16:100000",
             "--inverter", "reference", "--n", "1", "--zeta", "01"],
        )
        assert (code, err) == (2, "error: need n > |zeta| = 2, got n = 1")

    def test_horizon_overflow(self, capsys):
        code, err = err_line(
            capsys,
            ["extract", "--mode", "simple", "--fn", "simple:collatz:16:25",
             "--inverter", "reference", "--n", "15"],
        )
        assert (code, err) == (2, "error: stage 580 beyond horizon 25")

    def test_only_reference_inverter(self, capsys):
        code, err = err_line(
            capsys,
            ["extract", "--mode", "simple", "--fn", "simple:collatz:16:1000",
             "--inverter", "mine", "--n", "1"],
        )
        assert code == 1
        assert err == "error: only the built-in reference inverter ships; got 'mine'"

    def test_mode_family_mismatch(self, capsys):
        code, err = err_line(
            capsys,
            ["extract", "--mode", "simple", "--fn", "two1:collatz:16:1000",
             "--inverter", "reference", "--n", "1"],
        )
        assert code == 1
        assert err == "error: mode simple inverts simple:ENUM constructions, got 'two1'"


class TestMeasure:
    def test_prefix_set_measure(self, capsys, tmp_path):
        path = tmp_path / "set.words"
        path.write_text("0\n10\n")
        code, out, _ = run_cli(capsys, ["measure", "--prefixset", str(path)])
        assert (code, out) == (0, "3/4\n")

    def test_measure_inside_cylinder(self, capsys, tmp_path):
        path = tmp_path / "set.words"
        path.write_text("0\n10\n")
        code, out, _ = run_cli(
            capsys, ["measure", "--prefixset", str(path), "--sigma", "1"]
        )
        assert (code, out) == (0, "1/4\n")

    def test_overlapping_words_rejected(self, capsys, tmp_path):
        path = tmp_path / "set.words"
        path.write_text("0\n01\n")
        code, err = err_line(capsys, ["measure", "--prefixset", str(path)])
        assert code == 1
        assert "not prefix-free" in err

    def test_missing_file(self, capsys):
        code, err = err_line(
            capsys, ["measure", "--prefixset", "/nowhere/missing.words"]
        )
        assert code == 1
        assert err.startswith("error: cannot read prefix set /nowhere/missing.words")


class TestFiber:
    @pytest.mark.parametrize(
        "fn,target,line",
        [
            ("bitselect:double", "11", "branches=4 surviving=4"),
            ("identity", "1011", "branches=1 surviving=1"),
        ],
    )
    def test_frozen_counts(self, capsys, fn, target, line):
        code, out, err = run_cli(
            capsys, ["fiber", "--fn", fn, "--target", target, "--depth", "4"]
        )
        assert (code, err) == (0, "")
        assert out == line + "\n"


class TestSpecErrors:
    @pytest.mark.parametrize(
        "fn,message",
        [
            ("nope", "unknown construction family 'nope'"),
            ("identity:extra", "identity takes no parameters: 'identity:extra'"),
            ("witness:sideways",
             "unknown injection 'sideways'; expected one of "
             "['double', 'identity', 'shift']"),
            ("simple:collatz:16:1000:9", "trailing '9' after simple:collatz:16:1000"),
            ("simple", "simple needs an enumeration: 'simple'"),
        ],
    )
    def test_construction_grammar(self, capsys, fn, message):
        code, err = err_line(
            capsys, ["eval", "--fn", fn, "--input", "zeros", "--bits", "2"]
        )
        assert (code, err) == (1, f"error: {message}")

    @pytest.mark.parametrize(
        "source,message",
        [
            ("sideways", "unknown source 'sideways'"),
            ("interleave(periodic:10", "unknown source 'interleave(periodic:10'"),
            ("flip:zeros", "flip needs a position and a source: 'flip:zeros'"),
        ],
    )
    def test_source_grammar(self, capsys, source, message):
        code, err = err_line(
            capsys, ["eval", "--fn", "identity", "--input", source, "--bits", "2"]
        )
        assert (code, err) == (1, f"error: {message}")

    def test_missing_enumeration_file(self, capsys, tmp_path):
        code, err = err_line(
            capsys,
            ["extract", "--mode", "simple", "--fn", f"simple:{tmp_path}/gone.enum",
             "--inverter", "reference", "--n", "1"],
        )
        assert code == 1
        assert err.startswith(f"error: cannot read {tmp_path}/gone.enum")

    def test_unknown_verb(self, capsys):
        code, err = err_line(capsys, ["nonsense-verb"])
        assert code == 1
        assert "invalid choice: 'nonsense-verb'" in err

    def test_no_arguments(self, capsys):
        code, err = err_line(capsys, [])
        assert code == 1
        assert "the following arguments are required: verb" in err


class TestDemo:
    @pytest.mark.parametrize(
        "script,rows",
        [
            ("prop-simple", 64),
            ("thm-surjection", 32),
            ("thm-two1", 32),
        ],
    )
    def test_scripts_pass(self, capsys, script, rows):
        code, out, err = run_cli(capsys, ["demo", script])
        lines = out.splitlines()
        assert (code, err) == (0, "")
        assert len(lines) == rows + 1
        assert lines[-1] == "PASS"
        assert all(" MISMATCH" not in line for line in lines)

    def test_prop_simple_is_deterministic(self, capsys):
        _, first, _ = run_cli(capsys, ["demo", "prop-simple"])
        _, second, _ = run_cli(capsys, ["demo", "prop-simple"])
        assert first == second
        assert first.splitlines()[0] == "n=0 member=false use=0 stagebound=0 expected=false"
        assert first.splitlines()[8] == "n=8 member=true use=70 stagebound=70 expected=true"
