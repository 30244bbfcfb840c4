import io
import subprocess
import sys

import pytest

from emvv.cli import InputError, RunConfig, main
from emvv.frontio import parse_properties


def run(*args):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in args], out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_untransported_cell_violated(data):
    code, out, _ = run("check", data / "cell_no_transport.model", data / "transport.prop")
    assert code == 1
    assert "transport_continuity: Violated" in out and out.rstrip().endswith("violations found")
    assert "colocated({drill_station}, {polisher_station})=false" in out


def test_check_transported_cell_satisfied(data):
    code, out, _ = run("check", data / "cell_transport.model", data / "transport.prop")
    assert code == 0 and out.rstrip().endswith("all satisfied")


def test_check_energy(data):
    assert run("check", data / "energy_counter.model", data / "energy.prop")[0] == 1
    assert run("check", data / "energy_repaired.model", data / "energy.prop")[0] == 0


def test_check_constraints_after_saturation(data):
    code, out, _ = run("check", data / "gh.cg", data / "r1.cg", data / "nc.cg")
    assert code == 1
    assert "saturation added 1 fragment(s)" in out and "Nc: Violated" in out
    assert run("check", data / "gh.cg", data / "nc.cg")[0] == 0


def test_report_format(data):
    code, out, _ = run("check", "--format", "report", data / "cell_no_transport.model", data / "transport.prop")
    assert code == 1
    (line,) = out.splitlines()
    assert line.startswith("VERDICT transport_continuity Violated witness=")
    _, out, _ = run("check", "--format", "report", data / "cell_transport.model", data / "transport.prop")
    assert out.strip() == "VERDICT transport_continuity Satisfied"


def test_prove(data):
    code, out, _ = run("prove", data / "gh.cg", data / "r1.cg", data / "nc.cg")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0].startswith("step 1: R1 at {") and "(member-of z D)" in lines[0]
    assert lines[1] == "ContradictionEstablished: Nc is violated"
    code, out, _ = run("prove", data / "gh.cg", data / "nc.cg")
    assert code == 1 and out.strip() == "NoContradiction"


def test_prove_bound_reached(tmp_path, data):
    rule = tmp_path / "grow.cg"
    rule.write_text("rule Grow { if { [Person: *x] } then { [Person: *x] [Person: *] (different *x @1) } }\n")
    g = tmp_path / "g.cg"
    g.write_text("graph G { [Person: a] }\n")
    code, out, _ = run("prove", "--bound", "2", g, rule, data / "nc.cg")
    assert code == 3 and out.splitlines()[-1] == "BoundReached"


def test_saturate(data):
    code, out, _ = run("saturate", data / "gh.cg", data / "r1.cg")
    assert code == 0
    assert "# fixpoint after 2 pass(es)" in out and "(member-of z D)" in out
    assert out.count("# pass") == 1


def test_export_fol(data):
    code, out, _ = run("export-fol", data / "james.cg")
    assert code == 0
    assert out.strip() == ("exists x1. Employee(James) & Machine(drill) & Part(x1) & "
                           "agent(James, drill) & object(x1, drill)")


def test_translate(data):
    code, out, _ = run("translate", data / "cell_no_transport.model")
    assert code == 0 and out.startswith("graph ") and "(uses_resource drilling drill_station)" in out


def test_matrix_list(data):
    code, out, _ = run("matrix", "list", data / "matrix.gen", "--perspective", "integrity")
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert code == 0 and names == ["transport_continuity", "membership_consistency"]
    _, out, _ = run("matrix", "list", data / "matrix.gen", "--typology", "language")
    assert [line.split("\t")[0] for line in out.splitlines()] == ["activity_resourced"]


def test_matrix_instantiate(data, tmp_path, ref):
    target = tmp_path / "t.prop"
    code, _, _ = run("matrix", "instantiate", data / "matrix.gen", "transport_continuity",
                     "--bind", "from=drilling", "--bind", "to=polishing",
                     "--model", data / "cell_no_transport.model", "-o", target)
    assert code == 0
    (p,) = parse_properties(target.read_text(), ontology=ref)
    assert p.name == "transport_continuity"
    code, _, err = run("matrix", "instantiate", data / "matrix.gen", "transport_continuity", "--bind", "from=drilling")
    assert code == 2 and "missing" in err


@pytest.mark.parametrize("args", [
    ("check", "--bound", "0", "{data}/gh.cg"),
    ("check", "--limit", "0", "{data}/gh.cg"),
    ("check", "{data}/does-not-exist.cg"),
    ("prove", "{data}/r1.cg"),
])
def test_input_errors_exit_2(data, args):
    code, _, err = run(*(a.format(data=data) for a in args))
    assert code == 2 and "emvv: error:" in err


def test_parse_errors_are_printed(tmp_path):
    bad = tmp_path / "bad.cg"
    bad.write_text("graph G { [Nope: x] }\n")
    code, _, err = run("check", bad)
    assert code == 2 and "error[unknown-type]" in err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"], io.StringIO(), io.StringIO())
    assert exc.value.code == 2


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig("check", [], bound=0)
    with pytest.raises(InputError):
        RunConfig("check", [], limit=0)


def test_output_is_deterministic(data):
    args = ("check", data / "cell_no_transport.model", data / "transport.prop")
    assert run(*args) == run(*args)


def test_module_entry_point(data):
    proc = subprocess.run([sys.executable, "-m", "emvv", "export-fol", str(data / "james.cg")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("exists x1.")
