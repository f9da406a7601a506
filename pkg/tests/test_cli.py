"""
src.cli（ワークスペース・レポート・キャッシュ・コマンドライン）のユニットテスト
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path
from unittest import mock

from src.cdga.algebra import validate_cdga
from src.cli.cache import CACHE_ENV, RankCache, open_cache, resolve_cache_dir
from src.cli.jumploci import main
from src.cli.report import comparable, dumps, jsonable, make_report
from src.cli.workspace import parse_combination, parse_laurent, parse_text, parse_workspace
from src.exact.cyclotomic import Cyclotomic
from src.exact.errors import InputError
from src.exact.poly import LaurentPoly
from src.twisted.complex import Character, twisted_betti


SAMPLES = Path(__file__).resolve().parent.parent / "docs" / "samples"
CLASSIC = str(SAMPLES / "classic.ws")
HODGE = str(SAMPLES / "hodge.ws")


def write(tmpdir: str, name: str, text: str) -> str:
    path = Path(tmpdir) / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run(argv):
    """main を実行して (終了コード, JSON, 標準エラー) を返す"""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None), err.getvalue()


class TestCombinations(unittest.TestCase):
    """一次結合・ローラン多項式の構文のテスト"""

    def test_terms(self):
        self.assertEqual(parse_combination("2 a*b - 1/2 c + 1"),
                         [(Fraction(2), "a*b"), (Fraction(-1, 2), "c"), (Fraction(1), "1")])

    def test_leading_minus(self):
        self.assertEqual(parse_combination("- a"), [(Fraction(-1), "a")])
        self.assertEqual(parse_combination("-a"), [(Fraction(-1), "a")])

    def test_zero(self):
        self.assertEqual(parse_combination("0"), [])

    def test_repeated_operator(self):
        with self.assertRaises(InputError):
            parse_combination("a + + b")

    def test_laurent(self):
        p = parse_laurent("t1*t2^-1 - 1", ["t1", "t2"])
        self.assertEqual(p, LaurentPoly(["t1", "t2"], {(1, -1): 1, (0, 0): -1}))

    def test_unknown_variable(self):
        with self.assertRaises(InputError):
            parse_laurent("t3 - 1", ["t1", "t2"])


class TestWorkspaceParser(unittest.TestCase):
    """ワークスペースの読み込みのテスト"""

    def test_heisenberg(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "heis.ws", "[algebra heis]\ngenerators = a b c\nd c = a*b\n")
            ws = parse_workspace([path])
            A = ws.get("algebra", "heis")
            self.assertEqual(A.dims, [1, 3, 3, 1])
            self.assertTrue(validate_cdga(A)["valid"])
            self.assertEqual(ws.names(), {"algebra": ["heis"]})

    def test_empty_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "empty.ws", "# 何もない\n\n")
            self.assertTrue(parse_workspace([path]).is_empty())

    def test_duplicate_name(self):
        text = "[algebra heis]\ngenerators = a b\n\n[algebra heis]\ngenerators = a\n"
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "dup.ws", text)
            with self.assertRaises(InputError) as cm:
                parse_workspace([path])
            self.assertEqual(cm.exception.line, 4)

    def test_duplicate_across_files(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            a = write(tmpdir, "a.ws", "[algebra x]\ngenerators = a\n")
            b = write(tmpdir, "b.ws", "[algebra x]\ngenerators = b\n")
            with self.assertRaises(InputError):
                parse_workspace([a, b])

    def test_presentation_shares_complex_names(self):
        text = ("[complex w]\nn = 1\nranks = 1 1\n\n"
                "[presentation w]\ngenerators = a\n")
        with tempfile.TemporaryDirectory() as tmpdir:
            with self.assertRaises(InputError):
                parse_workspace([write(tmpdir, "w.ws", text)])

    def test_syntax_error_position(self):
        with self.assertRaises(InputError) as cm:
            parse_text("[algebra heis]\ngenerators a b c\n")
        self.assertEqual((cm.exception.line, cm.exception.column), (2, 1))

    def test_bad_header(self):
        with self.assertRaises(InputError) as cm:
            parse_text("\n[algebra]\n")
        self.assertEqual(cm.exception.line, 2)

    def test_unknown_kind(self):
        with self.assertRaises(InputError) as cm:
            parse_text("[widget w]\n")
        self.assertEqual(cm.exception.line, 1)

    def test_value_before_section(self):
        with self.assertRaises(InputError):
            parse_text("n = 2\n")

    def test_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "t.ws", "[torus T]\nn = 2\nlatice = 1 0\n")
            with self.assertRaises(InputError) as cm:
                parse_workspace([path])
            self.assertEqual(cm.exception.line, 3)

    def test_unresolved_reference(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "m.ws", "[module M]\nalgebra = nope\ndegree0 = m\n")
            with self.assertRaises(InputError) as cm:
                parse_workspace([path])
            self.assertEqual(cm.exception.line, 2)

    def test_missing_file(self):
        with self.assertRaises(InputError):
            parse_workspace(["/nonexistent/ws.txt"])

    def test_invalid_object_strict_and_lenient(self):
        text = "[algebra bad]\ndegree0 = 1 u\ndegree1 = a\n"
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "bad.ws", text)
            with self.assertRaises(InputError) as cm:
                parse_workspace([path])
            self.assertIn("connectedness", str(cm.exception))
            ws = parse_workspace([path], strict=False)
            self.assertFalse(ws.reports[("algebra", "bad")]["valid"])

    def test_entry_error_is_located(self):
        text = "[complex c]\nn = 1\nranks = 1 1\nd 1 = 0 5 t1 1\n"
        with tempfile.TemporaryDirectory() as tmpdir:
            with self.assertRaises(InputError) as cm:
                parse_workspace([write(tmpdir, "c.ws", text)])
            self.assertEqual(cm.exception.line, 4)

    def test_samples_parse(self):
        ws = parse_workspace([CLASSIC, HODGE])
        self.assertIn("pencil", ws.names()["complex"])
        self.assertIn("pencil", ws.presentations)
        self.assertTrue(all(r["valid"] for r in ws.reports.values()))

    def test_explicit_wedge_complex(self):
        ws = parse_workspace([CLASSIC])
        C = ws.get("complex", "wedge")
        self.assertEqual(twisted_betti(C, Character.trivial(2)), [1, 2])
        self.assertEqual(twisted_betti(C, Character([Fraction(1, 2), 0])), [0, 1])

    def test_torus_from_annihilator(self):
        ws = parse_workspace([CLASSIC])
        T = ws.get("torus", "T111")
        self.assertEqual(T.dim, 2)
        self.assertIn(T.torus.annihilator(), ([[1, 1, 1]], [[-1, -1, -1]]))

    def test_hodge_gaussian_entries(self):
        ws = parse_workspace([HODGE])
        H = ws.get("hodge", "E")
        self.assertEqual(H.F_basis[0][1], Cyclotomic.gaussian(0, 1))


class TestReport(unittest.TestCase):
    """JSON レポートのテスト"""

    def test_jsonable(self):
        data = jsonable({"q": Fraction(1, 2), "v": (Fraction(3), 1), "c": Character([Fraction(1, 3)])})
        self.assertEqual(data["q"], "1/2")
        self.assertEqual(data["v"], ["3", 1])
        self.assertEqual(data["c"]["values"], ["1/3"])

    def test_sorted_and_timing_excluded(self):
        a = make_report("x", {"b": 1, "a": 2}, {"certificate": "numeric"}, seconds=0.1)
        b = make_report("x", {"a": 2, "b": 1}, {"certificate": "numeric"}, seconds=0.9)
        self.assertEqual(a["certificate"], "numeric")
        self.assertNotEqual(dumps(a), dumps(b))
        self.assertEqual(dumps(comparable(a)), dumps(comparable(b)))

    def test_default_certificate(self):
        self.assertEqual(make_report("x", {}, {})["certificate"], "exact")

    def test_unknown_certificate(self):
        with self.assertRaises(ValueError):
            make_report("x", {}, {"certificate": "guess"})


class TestRankCache(unittest.TestCase):
    """階数キャッシュのテスト"""

    def test_put_get(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            cache = RankCache(tmpdir)
            self.assertIsNone(cache.get("k"))
            cache.put("k", 3)
            self.assertEqual(cache.get("k"), 3)
            self.assertEqual(RankCache(tmpdir).get("k"), 3)
            self.assertEqual(cache.stats()["hits"], 1)
            self.assertEqual([p.name for p in Path(tmpdir).iterdir()],
                             [f"{RankCache.digest('k')}.json"])

    def test_corrupted_file_ignored(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            cache = RankCache(tmpdir)
            (Path(tmpdir) / f"{RankCache.digest('k')}.json").write_text("{", encoding="utf-8")
            with redirect_stderr(io.StringIO()):
                self.assertIsNone(cache.get("k"))

    def test_key_checked(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            cache = RankCache(tmpdir)
            path = Path(tmpdir) / f"{RankCache.digest('k')}.json"
            path.write_text(json.dumps({"key": "other", "value": 1}), encoding="utf-8")
            self.assertIsNone(cache.get("k"))

    def test_environment_overrides(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            with mock.patch.dict(os.environ, {CACHE_ENV: tmpdir}):
                self.assertEqual(resolve_cache_dir("/elsewhere"), tmpdir)
            with mock.patch.dict(os.environ, {}, clear=True):
                self.assertEqual(resolve_cache_dir("/elsewhere"), "/elsewhere")
                self.assertIsNone(open_cache(None))


class TestCommandLine(unittest.TestCase):
    """コマンドラインのテスト"""

    def setUp(self):
        patcher = mock.patch.dict(os.environ, {}, clear=False)
        patcher.start()
        os.environ.pop(CACHE_ENV, None)
        self.addCleanup(patcher.stop)

    def test_resonance_member_at_origin(self):
        code, report, _ = run(["resonance", "--workspace", CLASSIC, "--algebra", "heis",
                               "--i", "1", "--k", "1", "--point", "0,0"])
        self.assertEqual(code, 0)
        self.assertTrue(report["result"]["member"])
        self.assertEqual(report["result"]["betti"][1], 2)
        self.assertEqual(report["certificate"], "exact")

    def test_resonance_member_off_origin(self):
        code, report, _ = run(["resonance", "member", "--workspace", CLASSIC, "--algebra", "heis",
                               "--i", "1", "--k", "1", "--point", "1,0"])
        self.assertEqual(code, 0)
        self.assertFalse(report["result"]["member"])

    def test_resonance_verify(self):
        code, report, _ = run(["resonance", "verify", "--workspace", CLASSIC,
                               "--algebra", "pencil_os", "--subspace", "L111", "--i", "1", "--k", "1"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["status"], "success")

    def test_resonance_verify_refuted(self):
        code, report, _ = run(["resonance", "verify", "--workspace", CLASSIC,
                               "--algebra", "heis", "--subspace", "heis_line", "--i", "1", "--k", "1"])
        self.assertEqual(code, 1)
        self.assertIsNotNone(report["result"]["witness"])

    def test_resonance_probe_is_heuristic(self):
        code, report, _ = run(["resonance", "probe", "--workspace", CLASSIC, "--algebra", "heis",
                               "--i", "1", "--k", "1", "--json"])
        self.assertEqual(code, 0)
        self.assertEqual(report["certificate"], "heuristic")
        self.assertFalse(report["result"]["exhaustive"])

    def test_charvar_verify_torus(self):
        code, report, _ = run(["charvar", "verify-torus", "--workspace", CLASSIC,
                               "--complex", "pencil", "--torus", "T111", "--i", "1", "--k", "1"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["status"], "success")
        self.assertEqual(report["certificate"], "exact")

    def test_charvar_refuted_with_witness(self):
        code, report, _ = run(["charvar", "verify-torus", "--workspace", CLASSIC,
                               "--complex", "wedge", "--torus", "Tfull", "--i", "1", "--k", "2"])
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["status"], "refuted")
        self.assertNotEqual(report["result"]["witness"]["values"], ["0", "0"])

    def test_charvar_refuted_beyond_small_orders(self):
        text = ("[complex big]\nn = 1\nranks = 1 1\nd 1 = 0 0 t1^27720 1, 0 0 1 -1\n\n"
                "[torus Tfull1]\nn = 1\nlattice = 1\n")
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "big.ws", text)
            code, report, _ = run(["charvar", "verify-torus", "--workspace", path,
                                   "--complex", "big", "--torus", "Tfull1", "--i", "0", "--k", "1"])
            C = parse_workspace([path]).get("complex", "big")
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["status"], "refuted")
        witness = Character([Fraction(x) for x in report["result"]["witness"]["values"]])
        self.assertGreaterEqual(witness.order, 13)
        self.assertEqual(twisted_betti(C, witness)[0], 0)

    def test_charvar_member_and_betti(self):
        code, report, _ = run(["charvar", "betti", "--workspace", CLASSIC,
                               "--complex", "torus2", "--rho", "1/2,0"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["betti"], [0, 0, 0])
        code, report, _ = run(["charvar", "--workspace", CLASSIC, "--complex", "torus2",
                               "--rho", "0,0", "--i", "1", "--k", "2"])
        self.assertTrue(report["result"]["member"])

    def test_charvar_sweep(self):
        code, report, _ = run(["charvar", "sweep", "--workspace", CLASSIC,
                               "--complex", "wedge", "--i", "1", "--k", "2"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["checked"], 144)
        self.assertEqual(report["result"]["members"], 1)

    def test_compare_exp(self):
        code, report, _ = run(["compare-exp", "--workspace", CLASSIC, "--algebra", "torus2",
                               "--complex", "torus2", "--i", "1", "--k", "1", "--samples", "10"])
        self.assertEqual(code, 0)
        self.assertTrue(report["result"]["agree"])

    def test_torus_axl(self):
        code, report, _ = run(["torus", "axl", "--workspace", CLASSIC,
                               "--affine", "V1", "--zeroset", "W1", "--dim", "1"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["result"], "success")
        self.assertEqual(report["result"]["predicted"]["lattice"], [[1, 1]])

    def test_torus_axl_dimension_mismatch(self):
        code, report, _ = run(["torus", "axl", "--workspace", CLASSIC,
                               "--affine", "V1", "--zeroset", "W1", "--dim", "2"])
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["result"], "dimension-mismatch")

    def test_torus_intersect_and_contain(self):
        code, report, _ = run(["torus", "intersect", "--workspace", CLASSIC,
                               "--torus", "Tdiag", "--other", "Tanti"])
        self.assertEqual(report["result"]["components"], 2)
        self.assertEqual(report["result"]["identity_component"]["lattice"], [])
        code, report, _ = run(["torus", "contain", "--workspace", CLASSIC,
                               "--torus", "Tdiag", "--other", "Tfull"])
        self.assertTrue(report["result"]["contained"])

    def test_torus_member_and_vanish(self):
        code, report, _ = run(["torus", "member", "--workspace", CLASSIC,
                               "--torus", "Tdiag", "--point", "1/3,1/3"])
        self.assertTrue(report["result"]["member"])
        code, report, _ = run(["torus", "vanish", "--workspace", CLASSIC, "--affine", "V1",
                               "--zeroset", "W1", "--numeric-samples", "20"])
        self.assertEqual(code, 0)
        self.assertTrue(report["result"]["vanishes"])
        self.assertTrue(report["result"]["generators"][0]["numeric"]["vanishes"])

    def test_hodge_commands(self):
        code, report, _ = run(["hodge", "numbers", "--workspace", HODGE, "--hodge", "EP"])
        self.assertEqual(report["result"]["hodge_numbers"], {"h10": 1, "h01": 1, "h11": 1})
        code, report, _ = run(["hodge", "quotient", "--workspace", HODGE, "--hodge", "EP",
                               "--lattice", "1 0 0; 0 1 0"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["quotient_hodge_numbers"], {"h10": 0, "h01": 0, "h11": 1})
        code, report, _ = run(["hodge", "sub", "--workspace", HODGE, "--hodge", "EP",
                               "--lattice", "2 0 0"])
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["reason"], "Λ/Λ' has torsion")
        code, report, _ = run(["hodge", "ses", "--workspace", HODGE, "--hodge", "EP"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["weight_one_part"], {"h10": 1, "h01": 1, "h11": 0})

    def test_bdr_verify(self):
        code, report, _ = run(["hodge", "bdr-verify", "--workspace", HODGE, "--bdr", "good"])
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["certified"], [0, 1])
        code, report, _ = run(["hodge", "bdr-verify", "--workspace", HODGE, "--bdr", "bad"])
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["failures"][0]["piece"], 1)

    def test_validate(self):
        code, report, _ = run(["validate", "--workspace", CLASSIC, "--workspace", HODGE])
        self.assertEqual(code, 0)
        self.assertTrue(report["result"]["valid"])
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "bad.ws", "[algebra bad]\ndegree0 = 1 u\ndegree1 = a\n")
            code, report, _ = run(["validate", "--workspace", path])
            self.assertEqual(code, 1)
            self.assertFalse(report["result"]["valid"])

    def test_input_errors_exit_two(self):
        code, report, err = run(["resonance", "--workspace", "/nonexistent.ws", "--algebra", "x"])
        self.assertEqual(code, 2)
        self.assertIsNone(report)
        self.assertIn("エラー", err)
        code, _, _ = run(["resonance", "--workspace", CLASSIC, "--algebra", "nope",
                          "--i", "1", "--k", "1", "--point", "0,0"])
        self.assertEqual(code, 2)
        code, _, _ = run(["resonance", "--workspace", CLASSIC, "--algebra", "heis", "--i", "1", "--k", "1"])
        self.assertEqual(code, 2)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "syntax.ws", "[algebra heis]\ngenerators a b\n")
            code, _, err = run(["validate", "--workspace", path])
            self.assertEqual(code, 2)
            self.assertIn("2行目", err)

    def test_negative_degree_rejected(self):
        commands = [
            ["resonance", "--workspace", CLASSIC, "--algebra", "heis", "--point", "0,0"],
            ["charvar", "member", "--workspace", CLASSIC, "--complex", "wedge", "--rho", "0,0"],
            ["charvar", "verify-torus", "--workspace", CLASSIC, "--complex", "wedge", "--torus", "Tfull"],
            ["compare-exp", "--workspace", CLASSIC, "--algebra", "pencil_os", "--complex", "pencil"],
        ]
        for argv in commands:
            code, report, err = run(argv + ["--i=-1", "--k", "1"])
            self.assertEqual(code, 2, argv)
            self.assertIsNone(report)
            self.assertIn("--i", err)
        code, _, err = run(commands[0] + ["--i", "1", "--k=-1"])
        self.assertEqual(code, 2)
        self.assertIn("--k", err)

    def test_no_command(self):
        out = io.StringIO()
        with redirect_stdout(out):
            code = main([])
        self.assertEqual(code, 1)
        self.assertIn("resonance", out.getvalue())

    def test_determinism(self):
        argv = ["charvar", "verify-torus", "--workspace", CLASSIC, "--complex", "wedge",
                "--torus", "Tfull", "--i", "1", "--k", "2", "--seed", "7"]
        _, a, _ = run(argv)
        _, b, _ = run(argv)
        self.assertEqual(dumps(comparable(a)), dumps(comparable(b)))

    def test_cache_soundness(self):
        cases = [
            ["charvar", "verify-torus", "--workspace", CLASSIC, "--complex", "pencil",
             "--torus", "T111", "--i", "1", "--k", "1"],
            ["charvar", "verify-torus", "--workspace", CLASSIC, "--complex", "wedge",
             "--torus", "Tfull", "--i", "1", "--k", "2"],
            ["resonance", "verify", "--workspace", CLASSIC, "--algebra", "pencil_os",
             "--subspace", "L111", "--i", "1", "--k", "1"],
        ]
        with tempfile.TemporaryDirectory() as tmpdir:
            for argv in cases:
                _, plain, _ = run(argv)
                _, first, _ = run(argv + ["--cache-dir", tmpdir])
                _, second, _ = run(argv + ["--cache-dir", tmpdir])
                self.assertEqual(plain["result"], first["result"])
                self.assertEqual(first["result"], second["result"])
            self.assertTrue(any(Path(tmpdir).glob("*.json")))
            with mock.patch.dict(os.environ, {CACHE_ENV: tmpdir}):
                code, report, err = run(cases[0])
                self.assertEqual(code, 0)
                self.assertIn("キャッシュ", err)


if __name__ == "__main__":
    unittest.main()
