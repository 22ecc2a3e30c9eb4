"""Acceptance gate: every release criterion, one test each, one line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS lines.  Tolerances are fixed here and must not be loosened.
"""

import itertools
import json
import math
import time
from pathlib import Path as FsPath

import numpy as np
import pytest

from sigstream.cli import main as cli_main
from sigstream.core import (
    Path,
    TruncatedSignature,
    shuffle,
    signature,
    signature_oracle,
    signed_area,
)
from sigstream.embeddings import StreamRecord, lead_lag, missing_lift
from sigstream.ml import CVConfig, compute_metrics, smote
from sigstream.pipeline import PipelineConfig, SynthConfig, run_experiment, synth_generate
from sigstream.rng import substream

from conftest import random_path_corpus

FIXTURES = FsPath(__file__).parent / "fixtures"


def _ok(name: str) -> None:
    print(f"[acceptance] PASS - {name}")


@pytest.fixture(scope="module")
def corpus():
    return random_path_corpus(200, max_dim=4, max_points=20, seed=2024)


class TestSignatureIdentities:
    def test_identity_suite_on_random_paths(self, corpus):
        started = time.time()
        shuffle_memo: dict = {}
        rng = substream(31, "acceptance-reparam")
        for pts in corpus:
            d = pts.shape[1]
            sig4 = signature(pts, 4)

            # shuffle identity, every pair with |I| + |J| <= 4
            for len_i in range(1, 4):
                for len_j in range(1, 5 - len_i):
                    for i in itertools.product(range(1, d + 1), repeat=len_i):
                        for j in itertools.product(range(1, d + 1), repeat=len_j):
                            expansion = shuffle_memo.get((i, j))
                            if expansion is None:
                                expansion = shuffle(i, j)
                                shuffle_memo[(i, j)] = expansion
                            product = sig4.get(i) * sig4.get(j)
                            total = expansion.evaluate(sig4)
                            assert abs(product - total) <= 1e-9 * max(1.0, abs(product))

            # Chen identity at every interior split point
            from sigstream.core import chen_product

            for cut in range(1, len(pts) - 1):
                left = signature(pts[: cut + 1], 4)
                right = signature(pts[cut:], 4)
                np.testing.assert_allclose(
                    chen_product(left, right).coefficients,
                    sig4.coefficients,
                    rtol=0,
                    atol=1e-10,
                )

            # reparametrization invariance for every depth up to 5
            seg = int(rng.integers(0, len(pts) - 1))
            inserted = pts[seg] + 0.5 * (pts[seg + 1] - pts[seg])
            refined = np.insert(pts, seg + 1, inserted, axis=0)
            for depth in range(1, 6):
                np.testing.assert_allclose(
                    signature(refined, depth).coefficients,
                    signature(pts, depth).coefficients,
                    rtol=0,
                    atol=1e-12,
                )

            # tree-like cancellation
            path = Path(pts)
            back_and_forth = path.concat(path.reversed())
            np.testing.assert_allclose(
                signature(back_and_forth, 4).coefficients,
                TruncatedSignature.identity(d, 4).coefficients,
                rtol=0,
                atol=1e-10,
            )

            # scaling covariance
            lam = 1.3
            np.testing.assert_allclose(
                signature(pts * lam, 4).coefficients,
                signature(pts, 4).scale_covariant(lam).coefficients,
                rtol=1e-12,
                atol=1e-12,
            )
        elapsed = time.time() - started
        assert elapsed <= 60.0, f"identity suite took {elapsed:.1f}s"
        _ok(f"signature identity suite on 200 paths ({elapsed:.1f}s)")

    def test_oracle_equivalence(self, corpus):
        worst = 0.0
        for pts in corpus:
            sig = signature(pts, 4)
            for index, value in sig.items():
                worst = max(worst, abs(value - signature_oracle(pts, index)))
        assert worst <= 1e-9
        _ok(f"oracle equivalence, worst coefficient gap {worst:.2e}")


class TestGoldenMissingData:
    def test_missing_lift_reproduces_reference_path(self):
        record = StreamRecord(
            values=[1.0, 3.0, 0.0, 5.0, 3.0, 0.0, 0.0, 9.0, 3.0, 5.0],
            missing=[False, False, True, False, False, True, True, False, False, False],
        )
        expected = [
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
        assert missing_lift(record).points.tolist() == expected
        _ok("missing-data lift reproduces the reference path point for point")


class TestLeadLagQuadraticVariation:
    def test_signed_area_is_half_qv_on_100_streams(self):
        rng = substream(17, "acceptance-qv")
        worst = 0.0
        for _ in range(100):
            values = rng.uniform(-1.0, 1.0, size=int(rng.integers(2, 25)))
            path = lead_lag(values)
            area = signed_area(signature(path, 2), 1, 2)
            target = 0.5 * float(np.sum(np.diff(values) ** 2))
            worst = max(worst, abs(area - target))
        assert worst <= 1e-10
        _ok(f"lead-lag signed area = half quadratic variation, worst gap {worst:.2e}")


class TestTableSubstitutes:
    def test_null_data_accuracy_in_binomial_band(self):
        correct = {c: 0 for c in ("logistic", "svm", "knn")}
        total = 0
        for seed in range(20):
            config = SynthConfig(
                n0=16, n1=16, delay_mean0=3.0, delay_mean1=3.0, seed=seed
            )
            records = synth_generate(config)
            report = run_experiment(records, PipelineConfig(depths=(2,), seed=seed))
            total += len(records)
            for classifier in correct:
                correct[classifier] += round(
                    report.metric(classifier, 2).accuracy * len(records)
                )
        band = 1.96 * 0.5 / math.sqrt(total)
        for classifier, hits in correct.items():
            pooled = hits / total
            assert abs(pooled - 0.5) <= band, (
                f"{classifier}: pooled null accuracy {pooled:.4f} outside "
                f"0.5 +/- {band:.4f}"
            )
        _ok(f"null synthetic data stays inside the 95% band over 20 seeds (n={total})")

    def test_separated_data_reaches_085_for_all_classifiers(self):
        records = synth_generate(
            SynthConfig(n0=18, n1=11, delay_mean0=1.0, delay_mean1=6.0, seed=0)
        )
        report = run_experiment(records, PipelineConfig(depths=(2,), seed=0))
        for classifier in ("logistic", "svm", "knn"):
            accuracy = report.metric(classifier, 2).accuracy
            assert accuracy >= 0.85, f"{classifier}: accuracy {accuracy:.3f} < 0.85"
        _ok("separated synthetic data reaches accuracy >= 0.85 for all classifiers")

    def test_report_shape_matches_reference_layout(self):
        reference = json.loads((FIXTURES / "reference_report.json").read_text())
        records = synth_generate(SynthConfig(seed=1))
        report = run_experiment(
            records, PipelineConfig(depths=(2, 3, 4), seed=1)
        ).as_dict()

        assert report["classifiers"] == reference["classifiers"]
        assert report["depths"] == reference["depths"]
        assert set(report["features"]) == set(reference["features"])
        for depth, info in reference["features"].items():
            assert set(report["features"][depth]) == set(info)
        assert set(report["results"]) == set(reference["results"])
        for classifier, per_depth in reference["results"].items():
            assert set(report["results"][classifier]) == set(per_depth)
            for depth, metrics in per_depth.items():
                assert set(report["results"][classifier][depth]) == set(metrics)
        _ok("report layout matches the reference table field for field")


class TestSmoteArithmetic:
    def test_eighteen_eleven_balances_exactly(self):
        rng = substream(13, "acceptance-smote")
        minority = rng.normal(size=(11, 6))
        synthetic = smote(minority, 18, k=5, seed=13)
        assert synthetic.shape[0] == 7
        from sigstream.ml import balance_classes

        rows = np.vstack([rng.normal(size=(18, 6)), minority])
        labels = np.array([0] * 18 + [1] * 11)
        _, balanced = balance_classes(rows, labels, k=5, seed=13)
        assert int((balanced == 0).sum()) == 18 and int((balanced == 1).sum()) == 18
        _ok("oversampling 18/11 emits exactly 7 synthetic rows and balances 18/18")


class TestDeterminism:
    def test_synth_run_twice_byte_identical(self, tmp_path, capsys):
        data = tmp_path / "dataset.csv"
        report_a = tmp_path / "a.json"
        report_b = tmp_path / "b.json"
        assert cli_main(["synth", "--seed", "7", "--out", str(data)]) == 0
        assert (
            cli_main(
                ["run", str(data), "--depths", "2", "--seed", "7", "--out", str(report_a)]
            )
            == 0
        )
        assert cli_main(["synth", "--seed", "7", "--out", str(data)]) == 0
        assert (
            cli_main(
                [
                    "run",
                    str(data),
                    "--depths",
                    "2",
                    "--seed",
                    "7",
                    "--workers",
                    "4",
                    "--out",
                    str(report_b),
                ]
            )
            == 0
        )
        capsys.readouterr()
        assert report_a.read_bytes() == report_b.read_bytes()
        _ok("same seed gives byte-identical reports, serial and parallel")


class TestMetricsUnitSuite:
    def test_hand_computed_examples(self):
        confusion = compute_metrics(
            [1, 1, 1, 0, 0, 0], [1, 1, 0, 1, 0, 0], [0.9, 0.8, 0.3, 0.7, 0.2, 0.1]
        )
        assert confusion.kappa == pytest.approx(1 / 3, abs=1e-12)
        assert confusion.accuracy == pytest.approx(2 / 3, abs=1e-12)

        perfect = compute_metrics([1, 0, 1], [1, 0, 1], [0.9, 0.1, 0.8])
        assert all(value == 1.0 for value in perfect.as_dict().values())

        tied = compute_metrics([1, 0, 1, 0], [1, 1, 0, 0], [0.25] * 4)
        assert tied.auc == 0.5
        _ok("metrics unit suite (kappa 1/3, perfect run, tied-score AUC)")
