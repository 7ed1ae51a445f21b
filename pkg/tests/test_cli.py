#!/usr/bin/env python3
"""
Tests for the blockdet command line, run in-process through main().
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import mock

import numpy as np

from blockdet import __version__
from blockdet.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, build_parser, main
from blockdet.config import THREADS_ENV
from blockdet.serialize import array_to_dict, matrix_to_dict, write_json


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)
        patcher = mock.patch.dict(os.environ, {THREADS_ENV: "1"})
        patcher.start()
        self.addCleanup(patcher.stop)

    def path(self, name):
        return str(Path(self.tmpdir.name) / name)

    def write_matrix(self, name, rows):
        path = self.path(name)
        write_json(matrix_to_dict(np.array(rows, dtype=complex)), path)
        return path

    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestBoundCommand(CliTestCase):

    def test_chen_on_worked_example(self):
        a = self.write_matrix("a.json", [[2.0, 1.0], [1.0, 2.0]])
        b = self.write_matrix("b.json", [[3.0, 1.0], [1.0, 3.0]])
        code, out, _ = self.run_cli("bound", "--name", "chen", "--inputs", a, b)
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(doc["name"], "chen")
        self.assertTrue(doc["holds"])
        self.assertEqual(len(doc["terms"]), 1)

    def test_shipped_examples(self):
        examples = Path(__file__).resolve().parent.parent / "schemas" / "examples"
        cases = [
            ("oppenheim_schur", ["worked_a.json", "worked_b.json"]),
            ("hadamard", ["complex_hermitian.json"]),
            ("thm25", ["block_identity_2x2.json", "block_identity_2x2.json"]),
            ("lemma23", ["lemma_rows.json"]),
        ]
        for name, files in cases:
            with self.subTest(bound=name):
                code, out, _ = self.run_cli("bound", "--name", name, "--inputs", *[str(examples / f) for f in files])
                self.assertEqual(code, EXIT_OK)
                self.assertTrue(json.loads(out)["holds"])

    def test_fischer_split_and_coro24_exponent(self):
        a = self.write_matrix("a.json", np.eye(3))
        code, out, _ = self.run_cli("bound", "--name", "fischer", "--inputs", a, "--split", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["details"]["splitRow"], 1.0)

        values = self.path("b.json")
        write_json(array_to_dict(np.array([2.0, 3.0])), values)
        code, out, _ = self.run_cli("bound", "--name", "coro24", "--inputs", values, "--q", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["details"]["lhs"], 64.0)

    def test_identity_margin_and_mismatched_dimensions(self):
        eye3 = self.write_matrix("eye3.json", np.eye(3))
        code, out, _ = self.run_cli("bound", "--name", "hadamard", "--inputs", eye3)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["marginLog"], 0.0)

        eye2 = self.write_matrix("eye2.json", np.eye(2))
        code, _, err = self.run_cli("bound", "--name", "oppenheim", "--inputs", eye2, eye3)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("DimensionMismatch", err)

    def test_violation_exit_code(self):
        a = self.write_matrix("a.json", np.eye(2))
        code, out, _ = self.run_cli("bound", "--name", "hadamard", "--inputs", a, "--tol", "-1")
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertFalse(json.loads(out)["holds"])

    def test_input_errors(self):
        a = self.write_matrix("a.json", [[1.0, 2.0], [0.0, 1.0]])
        bad_json = self.path("bad.json")
        Path(bad_json).write_text("{not json", encoding="utf-8")
        cases = [
            ("bound", "--name", "hadamard", "--inputs", a),
            ("bound", "--name", "hadamard", "--inputs", bad_json),
            ("bound", "--name", "hadamard", "--inputs", self.path("missing.json")),
            ("bound", "--name", "chen", "--inputs", a),
        ]
        for argv in cases:
            with self.subTest(argv=argv):
                code, out, err = self.run_cli(*argv)
                self.assertEqual(code, EXIT_USAGE)
                self.assertEqual(out, "")
                self.assertIn("ERROR", err)

    def test_array_bounds_reject_matrix_documents(self):
        real = self.write_matrix("real.json", [[2.0, 1.0], [1.0, 2.0]])
        cplx = self.write_matrix("cplx.json", [[2.0, 1j], [-1j, 2.0]])
        values = self.path("values.json")
        write_json(array_to_dict(np.array([[2.0, 1.0]])), values)
        cases = [("lemma23", real), ("lemma23", cplx), ("coro24", real), ("hadamard", values)]
        for name, path in cases:
            with self.subTest(bound=name, path=Path(path).name):
                code, out, err = self.run_cli("bound", "--name", name, "--inputs", path)
                self.assertEqual(code, EXIT_USAGE)
                self.assertEqual(out, "")
                self.assertIn("ShapeMismatch", err)
                self.assertNotIn("ComplexWarning", err)

    def test_usage_errors_exit_two(self):
        for argv in ([], ["bound", "--name", "nope", "--inputs", "x"], ["frobnicate"]):
            with self.subTest(argv=argv):
                with self.assertRaises(SystemExit) as ctx:
                    self.run_cli(*argv)
                self.assertEqual(ctx.exception.code, 2)


class TestSuiteCommands(CliTestCase):

    def test_verify(self):
        out_path = self.path("report.json")
        code, out, _ = self.run_cli(
            "verify", "--samples", "2", "--max-n", "3", "--max-block", "2",
            "--bounds", "chen,thm25,lemma23", "--out", out_path,
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "")
        doc = json.loads(Path(out_path).read_text(encoding="utf-8"))
        self.assertEqual(list(doc["bounds"]), ["chen", "thm25", "lemma23"])
        self.assertEqual(doc["totals"], {"samples": 6, "violations": 0, "errors": 0})
        self.assertEqual(doc["environment"]["config"]["maxN"], 3)

    def test_verify_with_config_file(self):
        config = self.path("suite.yaml")
        Path(config).write_text("seed: 3\nsamplesPerBound: 1\nbounds: [hadamard]\n", encoding="utf-8")
        code, out, _ = self.run_cli("verify", "--config", config, "--seed", "4")
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(doc["environment"]["seed"], 4)
        self.assertEqual(doc["totals"]["samples"], 1)

    def test_verify_rejects_bad_config(self):
        for argv in (("--bounds", "nope"), ("--cond-cap", "1"), ("--samples", "-1"),
                     ("--max-n", "1"), ("--max-factors", "1")):
            with self.subTest(argv=argv):
                code, _, err = self.run_cli("verify", *argv)
                self.assertEqual(code, EXIT_USAGE)
                self.assertIn("ConfigInvalid", err)

    def test_reductions_and_report(self):
        out_path = self.path("reductions.json")
        code, _, _ = self.run_cli("reductions", "--samples", "1", "--max-n", "3", "--out", out_path)
        self.assertEqual(code, EXIT_OK)
        for fmt, marker in (("csv", "bound,samples"), ("md", "| bound |"), ("json", '"kind": "reductions"')):
            with self.subTest(fmt=fmt):
                code, out, _ = self.run_cli("report", "--in", out_path, "--format", fmt)
                self.assertEqual(code, EXIT_OK)
                self.assertIn(marker, out)

    def test_report_rejects_other_documents(self):
        path = self.write_matrix("a.json", np.eye(2))
        code, _, _ = self.run_cli("report", "--in", path)
        self.assertEqual(code, EXIT_USAGE)

    def test_verbose_logging(self):
        code, _, err = self.run_cli("verify", "-v", "--samples", "1", "--bounds", "hadamard")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("INFO blockdet.harness: hadamard: 1 samples", err)


class TestGenCommand(CliTestCase):

    def test_generated_matrix_feeds_bound(self):
        out_path = self.path("a.json")
        code, _, _ = self.run_cli("gen", "--dim", "3", "--seed", "5", "--complex", "--out", out_path)
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(Path(out_path).read_text(encoding="utf-8"))
        self.assertEqual((doc["rows"], doc["cols"]), (3, 3))
        code, _, _ = self.run_cli("bound", "--name", "hadamard", "--inputs", out_path)
        self.assertEqual(code, EXIT_OK)

    def test_same_flags_give_identical_output(self):
        argv = ("gen", "--kind", "pd", "--dim", "3", "--seed", "1")
        first, second = self.run_cli(*argv), self.run_cli(*argv)
        self.assertEqual(first[0], EXIT_OK)
        self.assertEqual(first[1], second[1])
        code, _, _ = self.run_cli("gen", "--kind", "psd", "--dim", "2", "--rank-deficit", "2")
        self.assertEqual(code, EXIT_USAGE)

    def test_block_and_singular_kinds(self):
        code, out, _ = self.run_cli("gen", "--kind", "block-pd", "--n", "2", "--block-dim", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["q"], 2)
        code, out, _ = self.run_cli("gen", "--kind", "psd", "--dim", "3", "--rank-deficit", "1")
        self.assertEqual(code, EXIT_OK)

    def test_gen_errors(self):
        for argv in (("--kind", "block-pd", "--dim", "4"), ("--kind", "psd", "--dim", "3"), ("--dim", "0")):
            with self.subTest(argv=argv):
                code, _, _ = self.run_cli("gen", *argv)
                self.assertEqual(code, EXIT_USAGE)


class TestParser(unittest.TestCase):

    def test_version(self):
        out = io.StringIO()
        with redirect_stdout(out), self.assertRaises(SystemExit) as ctx:
            build_parser().parse_args(["--version"])
        self.assertEqual(ctx.exception.code, 0)
        self.assertIn(__version__, out.getvalue())

    def test_bounds_flag_accepts_all(self):
        args = build_parser().parse_args(["verify", "--bounds", "all"])
        self.assertEqual(len(args.bounds), 13)


if __name__ == "__main__":
    unittest.main()
