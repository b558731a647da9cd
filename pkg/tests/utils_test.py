import unittest
import io
import os
import tempfile
from unittest import mock

import pandas as pd
from pandas.testing import assert_frame_equal

from powerfree import __version__
from powerfree import utils as utils


class TestUtils(unittest.TestCase):
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

    def test_read_set_file(self):
        # test cases
        test_input = ['{"family": "k2", "elements": [5, 2, 3, 2]}',
                      "3\n1\n\n2\n",
                      "# header\n7\n7\n4\n",
                      '{"elements": []}']
        test_output = [[2, 3, 5], [1, 2, 3], [4, 7], []]
        fail = False
        i = 0
        for j, (input, output) in enumerate(zip(test_input, test_output)):
            filepath = self.write(f"set_{j}", input)
            try:
                self.assertEqual(utils.read_set_file(filepath)["elements"],
                                 output)
            except AssertionError as e:
                i += 1
                fail = True
                print(f"Test failure {i}: ", e)
        if fail:
            print(f"{i} test failures")
            raise AssertionError
        document = utils.read_set_file(self.write("doc", test_input[0]))
        self.assertEqual(document["family"], "k2")

    def test_read_set_file_malformed(self):
        for j, text in enumerate(['{"elements": [1, "two"]}',
                                  '{"elements": [true]}',
                                  '{"elements": [0, 1]}',
                                  '{"size": 3}',
                                  '{"elements": [1,',
                                  "[1, 2]",
                                  "1\n2.5\n"]):
            filepath = self.write(f"bad_{j}", text)
            with self.assertRaises(utils.MalformedInputError):
                utils.read_set_file(filepath)
        with self.assertRaises(utils.MalformedInputError) as cm:
            utils.read_set_file(os.path.join(self.path, "missing.json"))
        self.assertIn("missing.json", str(cm.exception))

    def test_default_threads(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(utils.default_threads(), 1)
        with mock.patch.dict(os.environ, {utils.THREADS_ENV_VAR: "4"}):
            self.assertEqual(utils.default_threads(), 4)
        for value in ("0", "-2", "many"):
            with mock.patch.dict(os.environ, {utils.THREADS_ENV_VAR: value}):
                with self.assertRaises(utils.InvalidArgumentError):
                    utils.default_threads()

    def test_df_to_csv(self):
        df = pd.DataFrame({"i_lo": [1, 2], "value": [1, 2]})
        filepath = os.path.join(self.path, "table.csv")
        utils.df_to_csv(df, filepath, header=utils.provenance("table", 0))
        with open(filepath) as f:
            first_line = f.readline()
        self.assertTrue(first_line.startswith("# {"))
        self.assertIn(__version__, first_line)
        assert_frame_equal(utils.csv_to_df(filepath), df)

    def test_provenance(self):
        self.assertEqual(utils.provenance("power-free oracle", 3),
                         {"command": "power-free oracle", "seed": 3,
                          "version": __version__})
        self.assertEqual(utils.to_json_str({"b": 1, "a": None}),
                         '{\n  "a": null,\n  "b": 1\n}\n')

    def test_exceptions(self):
        self.assertEqual(str(utils.InvalidArgumentError("bad n")), "bad n")
        self.assertIsInstance(utils.UncertifiedGraphError("girth_gt"),
                              utils.InvalidArgumentError)
        self.assertIn("girth_gt", str(utils.UncertifiedGraphError("girth_gt")))
        self.assertEqual(str(utils.ResourceLimitError("n", 40, 100)),
                         "'n' = 100 exceeds the supported limit of 40")

    def test_spinner(self):
        stderr = io.StringIO()
        with mock.patch("sys.stderr", stderr):
            with utils.spinner("working"):
                pass
        self.assertEqual(stderr.getvalue(), "")


if __name__ == '__main__':
    unittest.main()
