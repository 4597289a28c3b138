from pathlib import Path

import pytest

from mhtk.algebra import FiniteAlgebra
from mhtk.cli import main
from mhtk.colored import parse_colored, render_colored
from mhtk.fileio import parse_equations, parse_monoid, parse_rho, render_equations, render_monoid, render_rho
from mhtk.golden import FIRST_COMPOSITION, NESTED_COMPOSITION, S_IMAGE, T_COLORED, T_IMAGE
from mhtk.terms import Signature, parse_term, render_term

from strategies import BINARY, MIXED, colored_terms, terms

DATA = Path(__file__).parent / "data"


@pytest.fixture(autouse=True)
def in_data_dir(monkeypatch):
    monkeypatch.chdir(DATA)


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCompose:
    def test_positional(self, capsys):
        assert cli(capsys, "compose", "--pos", "t.ct", "2", "s.ct") == (0, FIRST_COMPOSITION + "\n", "")

    def test_nested_chain(self, capsys):
        code, inner, _ = cli(capsys, "compose", "--pos", "s.ct", "12", "r.ct")
        assert code == 0
        code, out, _ = cli(capsys, "compose", "--pos", "t.ct", "2", inner.strip())
        assert out.strip() == NESTED_COMPOSITION

    def test_root(self, capsys):
        code, out, _ = cli(capsys, "compose", "--pos", "t.ct", "", "r.ct")
        assert code == 0 and out.strip() == (DATA / "r.ct").read_text().strip()

    def test_bad_position(self, capsys):
        code, out, err = cli(capsys, "compose", "--pos", "t.ct", "2a", "s.ct")
        assert code == 2 and out == "" and "error" in err

    def test_inductive(self, capsys):
        code, out, _ = cli(capsys, "compose", "--ind", "f(x1,f(x1,x2))", "x1", "f(x2,x2)")
        assert (code, out) == (0, "f(f(x2,x2),f(f(x2,x2),x2))\n")


class TestApply:
    def test_reference(self, capsys):
        assert cli(capsys, "apply", "rho.mh", "t.ct")[:2] == (0, T_IMAGE + "\n")
        assert cli(capsys, "apply", "rho.mh", "s.ct")[:2] == (0, S_IMAGE + "\n")

    def test_identity(self, capsys):
        assert cli(capsys, "apply", "rho_id.mh", "t.ct")[:2] == (0, T_COLORED + "\n")

    def test_outside_monoid(self, capsys):
        code, _, err = cli(capsys, "apply", "rho_outside.mh", "t.ct")
        assert code == 2 and "monoid" in err


class TestTransduce:
    @pytest.mark.parametrize("term", ["t.ct", "s.ct", "f^4(f^1(x1,x3),f^2(x2,x2))"])
    def test_matches_apply(self, capsys, term):
        applied = cli(capsys, "apply", "rho.mh", term)
        transduced = cli(capsys, "transduce", "--rho", "rho.mh", term)
        assert applied == transduced

    def test_random_order(self, capsys):
        plain = cli(capsys, "transduce", "--rho", "rho.mh", "t.ct")
        shuffled = cli(capsys, "--seed", "5", "transduce", "--rho", "rho.mh", "--random-order", "t.ct")
        assert plain == shuffled


class TestCheck:
    def test_band_counterexample(self, capsys):
        code, out, _ = cli(
            capsys, "check", "--algebra", "rb22.alg", "--mhs", "M.monoid", "f(f(x1,x2),f(x1,x2)) = f(f(x1,x2),x2)"
        )
        assert code == 1
        assert "not a multi-hyperidentity" in out and "valuation" in out

    def test_band_laws_hold(self, capsys):
        code, out, _ = cli(capsys, "check", "--algebra", "rb22.alg", "--eqs", "rb.eqs")
        assert code == 0 and out.count("holds") == 3

    def test_plain_failure(self, capsys):
        code, out, _ = cli(capsys, "check", "--algebra", "rb22.alg", "f(x1,x2) = f(x2,x1)")
        assert code == 1

    def test_missing_file(self, capsys):
        code, _, err = cli(capsys, "check", "--algebra", "nope.alg", "x1 = x1")
        assert code == 2 and err


class TestProve:
    def test_trivial(self, capsys):
        code, out, _ = cli(capsys, "prove", "--sigma", "rb.eqs", "--goal", "x1 = x1")
        assert (code, out) == (0, "1. x1 = x1  [refl]\n")

    def test_proof_checks(self, capsys, tmp_path):
        goal = "f(f(x1,x2),f(x1,x2)) = f(f(x1,x2),x2)"
        code, out, _ = cli(capsys, "--budget", "depth=2", "prove", "--sigma", "rb.eqs", "--goal", goal)
        assert code == 0
        proof = tmp_path / "p.txt"
        proof.write_text(out)
        code, out, _ = cli(capsys, "check", "--proof", str(proof), "--sigma", "rb.eqs")
        assert code == 0 and out.startswith("ok")

    def test_tampered_proof_rejected(self, capsys, tmp_path):
        proof = tmp_path / "p.txt"
        proof.write_text("1. f(x1,x2) = f(x2,x1)  [axiom]\n")
        code, out, _ = cli(capsys, "check", "--proof", str(proof), "--sigma", "rb.eqs")
        assert code == 1 and "step 1" in out

    def test_not_found(self, capsys):
        code, out, _ = cli(capsys, "--budget", "depth=1,steps=1", "prove", "--sigma", "rb.eqs", "--goal", "x1 = x2")
        assert code == 1 and "not found" in out


class TestMisc:
    def test_closure(self, capsys):
        code, out, _ = cli(capsys, "closure", "--sigma", "rb.eqs", "--budget", "depth=1")
        assert code == 0 and "f(x1,x1) = x1" in out.splitlines()

    def test_selftest(self, capsys):
        code, out, _ = cli(capsys, "selftest")
        assert code == 0 and "FAIL" not in out

    def test_parse_positions(self, capsys):
        code, out, _ = cli(capsys, "parse", "--positions", "t.ct")
        assert code == 0 and "\n  22\tx2" in out

    def test_parse_error(self, capsys):
        assert cli(capsys, "parse", "f(x1")[0] == 2

    def test_global_flags_either_side(self, capsys):
        a = cli(capsys, "--sig", "binary.sig", "apply", "rho.mh", "t.ct")
        b = cli(capsys, "apply", "rho.mh", "t.ct", "--sig", "binary.sig")
        assert a == b and a[0] == 0


class TestRoundTrips:
    def test_colored_files(self):
        for name in ["t.ct", "s.ct", "r.ct"]:
            text = (DATA / name).read_text().strip()
            assert render_colored(parse_colored(text, BINARY)) == text

    def test_monoid_file(self):
        m = parse_monoid((DATA / "M.monoid").read_text(), BINARY)
        assert parse_monoid(render_monoid(m), BINARY) == m

    def test_rho_file(self):
        rho = parse_rho((DATA / "rho.mh").read_text(), BINARY, str(DATA))
        again = parse_rho(render_rho(rho), BINARY, str(DATA))
        assert again == rho

    def test_algebra_file(self):
        A = FiniteAlgebra.parse((DATA / "rb22.alg").read_text())
        assert FiniteAlgebra.parse(A.render()) == A

    def test_equations(self):
        eqs = parse_equations((DATA / "rb.eqs").read_text(), BINARY)
        assert parse_equations(render_equations(eqs), BINARY) == eqs

    def test_signature(self):
        assert Signature.parse((DATA / "binary.sig").read_text()) == BINARY


@pytest.mark.parametrize("sig", [BINARY, MIXED])
def test_term_render_round_trip(sig):
    from hypothesis import given

    @given(terms(sig, 4), colored_terms(sig, 3))
    def check(t, ct):
        assert parse_term(render_term(t), sig) == t
        assert parse_colored(render_colored(ct), sig) == ct

    check()
