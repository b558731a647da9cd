import unittest
import io
import json
import os
import sys
import tempfile
from contextlib import redirect_stdout, redirect_stderr

import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import power_free


def run_cli(*argv):
    out = io.StringIO()
    with redirect_stdout(out), redirect_stderr(io.StringIO()):
        code = power_free.main(list(argv))
    return code, out.getvalue()


class TestCli(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.path = self.temp_dir.name

    def tearDown(self):
        self.temp_dir.cleanup()

    def write(self, name, text):
        filepath = os.path.join(self.path, name)
        with open(filepath, "w") as f:
            f.write(text)
        return filepath

    def test_oracle(self):
        code, out = run_cli("oracle", "--n", "10", "--k", "2", "--d", "3",
                            "--mode", "f")
        self.assertEqual(code, 0)
        self.assertEqual(out, "6\n")
        code, out = run_cli("oracle", "--n", "10", "--k", "2", "--mode", "F",
                            "--format", "json", "--witness")
        document = json.loads(out)
        self.assertEqual(document["value"], 7)
        self.assertEqual(len(document["witness_set"]), 7)
        self.assertIn("provenance", document)
        code, _ = run_cli("oracle", "--n", "100", "--k", "2")
        self.assertEqual(code, 2)

    def test_construct_then_verify(self):
        set_path = os.path.join(self.path, "a.json")
        code, _ = run_cli("construct", "--family", "k6F", "--n", "1000",
                          "--out", set_path)
        self.assertEqual(code, 0)
        with open(set_path) as f:
            document = json.load(f)
        self.assertEqual(document["family"], "k6F")
        self.assertTrue(document["provenance"]["command"]
                        .startswith("power-free construct"))
        self.assertEqual(document["provenance"]["seed"], 0)
        code, out = run_cli("verify", "--input", set_path, "--k", "6",
                            "--d", "3", "--mode", "P")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["holds"])

    def test_construct_k3kf_for_k3(self):
        set_path = os.path.join(self.path, "k3kf.json")
        code, _ = run_cli("construct", "--family", "k3kf", "--n", "400",
                          "--k", "3", "--out", set_path)
        self.assertEqual(code, 0)
        with open(set_path) as f:
            self.assertEqual(json.load(f)["k"], 9)
        code, out = run_cli("verify", "--input", set_path, "--k", "9",
                            "--mode", "f", "--format", "text")
        self.assertEqual(code, 0)
        self.assertEqual(out, "holds\n")

    def test_construct_is_deterministic(self):
        first = os.path.join(self.path, "first.json")
        second = os.path.join(self.path, "second.json")
        for filepath in (first, second):
            run_cli("construct", "--family", "k9F", "--n", "400", "--seed",
                    "3", "--out", filepath)
        with open(first) as f, open(second) as g:
            self.assertEqual(f.read(), g.read())

    def test_verify_witness(self):
        set_path = self.write("set.txt", "1\n2\n4\n")
        code, out = run_cli("verify", "--input", set_path, "--k", "3",
                            "--mode", "P")
        self.assertEqual(code, 10)
        document = json.loads(out)
        self.assertFalse(document["holds"])
        self.assertEqual(document["witness"]["elements"], [1, 2, 4])
        code, out = run_cli("verify", "--input", set_path, "--k", "3",
                            "--mode", "P", "--format", "text")
        self.assertEqual(out, "witness\n1 2 4\n")

    def test_verify_malformed(self):
        set_path = self.write("bad.json", '{"elements": [1, "two"]}')
        code, _ = run_cli("verify", "--input", set_path, "--k", "3")
        self.assertEqual(code, 2)
        code, _ = run_cli("verify", "--input",
                          os.path.join(self.path, "missing.json"), "--k", "3")
        self.assertEqual(code, 2)
        set_path = self.write("bad.txt", "1\nfoo\n")
        code, _ = run_cli("verify", "--input", set_path, "--k", "3")
        self.assertEqual(code, 2)

    def test_config(self):
        config = self.write("config.json",
                            json.dumps({"n": 10, "k": 2, "mode": "f"}))
        code, out = run_cli("oracle", "--config", config)
        self.assertEqual(code, 0)
        self.assertEqual(out, "6\n")
        code, _ = run_cli("oracle", "--config", config, "--n", "10")
        self.assertEqual(code, 2)
        config = self.write("bad_config.json", "[1, 2]")
        code, _ = run_cli("oracle", "--config", config)
        self.assertEqual(code, 2)

    def test_config_options_are_checked(self):
        test_input = [{"n": 10, "k": 2, "mode": "f", "colour": "red"},
                      {"n": 10, "k": 2, "mode": "x"},
                      {"n": "ten", "k": 2},
                      {"n": 10, "k": 2, "witness": 1},
                      {"n": 10, "k": 2, "config": "other.json"},
                      {"n": 10, "k": 2, "thread": 2}]
        for i, options in enumerate(test_input):
            config = self.write(f"config_{i}.json", json.dumps(options))
            err = io.StringIO()
            with redirect_stdout(io.StringIO()), redirect_stderr(err):
                code = power_free.main(["oracle", "--config", config])
            self.assertEqual(code, 2, options)
            self.assertTrue(err.getvalue().startswith("error: config: "),
                            err.getvalue())
        # values are converted like their command line spelling
        config = self.write("strings.json", json.dumps(
            {"n": "10", "k": "2", "mode": "f", "witness": True,
             "format": "json"}))
        code, out = run_cli("oracle", "--config", config)
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["value"], 6)
        self.assertEqual(len(document["witness_set"]), 6)


    def test_graph(self):
        code, out = run_cli("graph", "--kind", "incidence", "--q", "2")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["vertex_count"], 14)
        self.assertEqual(len(document["edges"]), 21)
        self.assertEqual(document["girth"], 6)
        self.assertEqual(document["certificates"]["girth_gt"], 5)
        code, out = run_cli("graph", "--kind", "greedy", "--t", "10",
                            "--girth", "4", "--format", "dot")
        self.assertTrue(out.startswith("graph "))
        code, _ = run_cli("graph", "--kind", "greedy", "--t", "10")
        self.assertEqual(code, 2)

    def test_table(self):
        code, out = run_cli("table", "--which", "s", "--r", "1", "--i-max",
                            "10")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("# "))
        df = pd.read_csv(io.StringIO(out), comment="#")
        self.assertEqual(list(df.columns), ["i_lo", "i_hi", "value"])
        self.assertEqual(len(df), 2)
        self.assertEqual(list(df["value"]), [1, 2])

    def test_constants(self):
        code, out = run_cli("constants", "--which", "tail", "--r", "0")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertAlmostEqual(document["value"], 0.607927101854, places=10)
        self.assertEqual(document["name"], "tail")
        self.assertNotIn("which", document)
        self.assertLessEqual(document["lower"], document["upper"])
        code, out = run_cli("constants", "--which", "c0")
        document = json.loads(out)
        self.assertEqual(document["name"], "c0")
        self.assertEqual(document["digits"], 50)
        self.assertAlmostEqual(document["value"], 0.82849, delta=1e-5)

    def test_constants_c33_shape(self):
        code, out = run_cli("constants", "--which", "c33", "--r", "2")
        self.assertEqual(code, 0)
        document = json.loads(out)
        for key in ("name", "lower", "upper", "r", "digits"):
            self.assertIn(key, document)
        self.assertEqual(document["name"], "c33")
        self.assertEqual(document["r"], 2)
        self.assertEqual(document["digits"], 50)
        self.assertLess(document["lower"], document["upper"])

    def test_argument_errors(self):
        with self.assertRaises(SystemExit) as cm:
            with redirect_stderr(io.StringIO()):
                power_free.main(["oracle", "--mode", "x"])
        self.assertEqual(cm.exception.code, 2)
        code, _ = run_cli("oracle", "--k", "2")
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
