"""Binding equivalence: the scripting surface must agree with the kernel's
command-line route bit for bit."""

import io
import json
import subprocess
import sys
from contextlib import redirect_stdout

import numpy as np
import pytest

import sigstream_bindings as bindings
from sigstream.cli import main as cli_main
from sigstream.rng import substream


def cli_json(argv) -> dict:
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = cli_main(argv)
    assert code == 0
    return json.loads(buffer.getvalue())


class TestSignature:
    def test_straight_line_matches_kernel_example(self):
        coeffs, labels = bindings.signature([[0.0, 0.0], [1.0, 1.0]], 2)
        assert labels == ["(1)", "(2)", "(1,1)", "(1,2)", "(2,1)", "(2,2)"]
        np.testing.assert_array_equal(coeffs, [1.0, 1.0, 0.5, 0.5, 0.5, 0.5])

    def test_invalid_dimension_zero(self):
        with pytest.raises(ValueError, match="dimension"):
            bindings.signature(np.empty((3, 0)), 2)

    def test_version_string(self):
        assert isinstance(bindings.__version__, str) and bindings.__version__


class TestCliEquivalence:
    def test_thousand_random_paths_bitwise_equal(self, tmp_path):
        rng = substream(99, "binding-corpus")
        stream_file = tmp_path / "stream.csv"
        dataset_file = tmp_path / "subject.csv"
        for case in range(1000):
            n = int(rng.integers(2, 12))
            depth = int(rng.integers(1, 4))
            if case % 5 == 0:
                # bare stream via the lead-lag embedding (values may be negative)
                values = rng.uniform(-3.0, 3.0, size=n)
                stream_file.write_text(",".join(repr(float(v)) for v in values) + "\n")
                body = cli_json(
                    ["sig", str(stream_file), "--embedding", "lead-lag",
                     "--depth", str(depth), "--json"]
                )
                coeffs, labels = bindings.signature(bindings.lead_lag(values), depth)
            else:
                # dataset CSV via the straight-line embedding: an arbitrary
                # 2-d path with increasing first coordinate
                weeks = np.cumsum(rng.uniform(0.1, 2.0, size=n))
                delays = rng.uniform(0.0, 10.0, size=n)
                rows = ["subject,week,delay,missing,label"]
                rows += [f"s,{float(w)!r},{float(d)!r},0,0" for w, d in zip(weeks, delays)]
                dataset_file.write_text("\n".join(rows) + "\n")
                body = cli_json(
                    ["sig", str(dataset_file), "--embedding", "linear",
                     "--depth", str(depth), "--json"]
                )
                points = np.column_stack([weeks, delays])
                coeffs, labels = bindings.signature(points, depth)
            cli_coeffs = body["coefficients"]
            assert list(cli_coeffs) == labels
            for label, value in zip(labels, coeffs):
                cli_value = cli_coeffs[label]
                assert (cli_value is None and np.isnan(value)) or cli_value == value

    def test_subprocess_round_trip(self, tmp_path):
        rng = substream(7, "binding-subprocess")
        for _ in range(5):
            values = rng.uniform(-2.0, 2.0, size=6)
            stream = tmp_path / "s.txt"
            stream.write_text(",".join(repr(float(v)) for v in values) + "\n")
            proc = subprocess.run(
                [sys.executable, "-m", "sigstream.cli", "sig", str(stream),
                 "--embedding", "lead-lag", "--depth", "3", "--json"],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0
            body = json.loads(proc.stdout)
            coeffs, labels = bindings.signature(bindings.lead_lag(values), 3)
            assert [body["coefficients"][k] for k in labels] == list(coeffs)


class TestLeadLag:
    def test_example_points(self):
        path = bindings.lead_lag([1.0, 3.0, 2.0])
        assert path.tolist() == [
            [1.0, 1.0],
            [3.0, 1.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 2.0],
        ]

    def test_constant_stream(self):
        path = bindings.lead_lag([4.0, 4.0, 4.0])
        assert np.all(path == 4.0)

    def test_quadratic_variation_as_signed_area(self):
        coeffs, labels = bindings.signature(bindings.lead_lag([1.0, 3.0, 2.0]), 2)
        named = dict(zip(labels, coeffs))
        assert 0.5 * (named["(1,2)"] - named["(2,1)"]) == pytest.approx(2.5, abs=1e-12)


class TestFeaturize:
    GOLDEN = {
        "values": [1.0, 3.0, 0.0, 5.0, 3.0, 0.0, 0.0, 9.0, 3.0, 5.0],
        "missing": [False, False, True, False, False, True, True, False, False, False],
    }
    GOLDEN_PATH = [
        [0.0, 1.0, 0.0],
        [1.0, 3.0, 0.0],
        [2.0, 3.0, 1.0],
        [3.0, 5.0, 0.0],
        [4.0, 3.0, 0.0],
        [5.0, 3.0, 1.0],
        [6.0, 3.0, 1.0],
        [7.0, 9.0, 0.0],
        [8.0, 3.0, 0.0],
        [9.0, 5.0, 0.0],
    ]

    def test_golden_missing_stream_through_binding(self, tmp_path):
        rows, names = bindings.featurize(
            [self.GOLDEN],
            {"embedding": "missing-lift", "depth": 2, "standardize": False},
        )
        direct, direct_names = bindings.signature(np.array(self.GOLDEN_PATH), 2)
        assert names == direct_names
        np.testing.assert_array_equal(rows[0], direct)

        stream = tmp_path / "golden.txt"
        stream.write_text("1,3,*,5,3,*,*,9,3,5\n")
        body = cli_json(["sig", str(stream), "--embedding", "missing-lift", "--json"])
        assert body["path"] == self.GOLDEN_PATH
        assert [body["coefficients"][k] for k in names] == list(rows[0])

    def test_matrix_shape_and_names(self):
        records = [
            {"values": [4.0, 2.0, 5.0, 0.0, 5.0, 0.0], "label": 0},
            {"values": [1.0, 1.0, 2.0, 1.0, 3.0, 2.0], "label": 1},
        ]
        rows, names = bindings.featurize(records, {"depth": 1, "standardize": False})
        assert names == ["(1)", "(2)", "(3)"]
        np.testing.assert_allclose(rows[0], [5.0, -4.0, -4.0], atol=1e-15)

    def test_standardized_by_default(self):
        rng = substream(3, "binding-feats")
        records = [
            {"values": rng.uniform(0, 5, 8), "label": int(i % 2)} for i in range(6)
        ]
        rows, _ = bindings.featurize(records, {"depth": 2})
        assert np.all(np.abs(rows.mean(axis=0)) <= 1e-9)
