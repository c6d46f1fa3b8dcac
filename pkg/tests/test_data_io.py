import logging

import numpy as np
import pytest

from app.core.errors import IngestionError, OutputError
from app.models.family import MurmurationSeries, ZeroDensityHistogram
from app.models.zeros import ZeroList
from app.services.data_io import (
    CURVE_HEADER,
    CsvStore,
    conductor_offenders,
    emit_ap,
    emit_hist,
    emit_primes,
    emit_series,
    ingest_curves,
    ingest_zeros,
    persist_zeros,
)
from app.utils.arith import sieve_primes

CURVES_HEAD = ",".join(CURVE_HEADER) + "\n"


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestIngestCurves:
    def test_toy_corpus(self, toy_curves):
        assert len(toy_curves) == 18
        assert toy_curves[0].label == "11a1"
        assert toy_curves[-1].rank == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError, match="cannot open"):
            ingest_curves(tmp_path / "absent.csv")

    def test_bad_header(self, tmp_path):
        path = _write(tmp_path / "c.csv", "label,a1,a2\n11a1,0,-1\n")
        with pytest.raises(IngestionError) as info:
            ingest_curves(path)
        assert info.value.line == 1

    def test_field_count(self, tmp_path):
        path = _write(
            tmp_path / "c.csv", CURVES_HEAD + "11a1,0,-1,1,-10,-20,11,0\n11a3,0,-1\n"
        )
        with pytest.raises(IngestionError) as info:
            ingest_curves(path)
        assert info.value.line == 3

    def test_bad_integer_names_curve_and_line(self, tmp_path):
        path = _write(
            tmp_path / "c.csv",
            CURVES_HEAD + "11a1,0,-1,1,-10,-20,11,0\n\n14a1,1,0,1,four,-6,14,0\n",
        )
        with pytest.raises(IngestionError, match="curve 14a1") as info:
            ingest_curves(path)
        assert info.value.line == 4
        assert info.value.exit_code == 2

    @pytest.mark.parametrize(
        "row",
        [
            "cusp,0,0,0,0,0,1,0",
            "neg,0,-1,1,-10,-20,11,-1",
            "zero,0,-1,1,-10,-20,0,0",
        ],
    )
    def test_invalid_curves(self, tmp_path, row):
        path = _write(tmp_path / "c.csv", CURVES_HEAD + row + "\n")
        with pytest.raises(IngestionError):
            ingest_curves(path)

    def test_duplicate_labels(self, tmp_path):
        row = "11a1,0,-1,1,-10,-20,11,0\n"
        path = _write(tmp_path / "c.csv", CURVES_HEAD + row + row)
        with pytest.raises(IngestionError, match="duplicate"):
            ingest_curves(path)

    def test_conductor_warning(self, tmp_path, caplog):
        # 11a1 with conductor 14: 2 does not divide the discriminant
        path = _write(tmp_path / "c.csv", CURVES_HEAD + "odd,0,-1,1,-10,-20,14,0\n")
        with caplog.at_level(logging.WARNING):
            curves = ingest_curves(path)
        assert [E.label for E in curves] == ["odd"]
        assert "odd" in caplog.text

    def test_toy_corpus_is_consistent(self, toy_curves):
        assert conductor_offenders(toy_curves) == []


class TestZeros:
    def test_round_trip(self, tmp_path):
        zeros = {
            "kron:5": ZeroList(
                object_id="kron:5", gammas=np.array([6.6484533, 9.8314563]), height_bound=10
            ),
            "11a1": ZeroList(
                object_id="11a1", gammas=np.array([6.3626138]), height_bound=10
            ),
        }
        path = tmp_path / "z" / "zeros.csv"
        persist_zeros(zeros, path)
        lines = path.read_text().splitlines()
        assert lines == [
            "object_id,gamma",
            "11a1,6.362613800",
            "kron:5,6.648453300",
            "kron:5,9.831456300",
        ]
        again = ingest_zeros(path)
        assert sorted(again) == ["11a1", "kron:5"]
        np.testing.assert_allclose(again["kron:5"].gammas, zeros["kron:5"].gammas)
        assert again["kron:5"].source == "ingested"
        assert again["kron:5"].height_bound == pytest.approx(9.8314563)

    def test_non_increasing(self, tmp_path):
        path = _write(tmp_path / "z.csv", "object_id,gamma\na,2.0\nb,1.0\na,1.5\n")
        with pytest.raises(IngestionError, match="not above") as info:
            ingest_zeros(path)
        assert info.value.line == 4

    def test_nonpositive_ordinate(self, tmp_path):
        path = _write(tmp_path / "z.csv", "object_id,gamma\na,-2.0\n")
        with pytest.raises(IngestionError) as info:
            ingest_zeros(path)
        assert info.value.line == 2


class TestEmission:
    def test_series(self, tmp_path):
        x = np.array([2.0, 3.5, 1000.0])
        series = MurmurationSeries(
            x_grid=x,
            avg_lhs=np.array([0.1, -0.25, 1 / 3]),
            avg_zero_term=np.zeros(3),
            black=np.array([0.1, -0.25, 1 / 3]),
            family_id="s",
        )
        path = tmp_path / "series.csv"
        emit_series(series, path)
        assert path.read_text() == (
            "x,avg_lhs,avg_zero_term,black\n"
            "2,0.1,0,0.1\n"
            "3.5,-0.25,0,-0.25\n"
            "1000,0.333333333,0,0.333333333\n"
        )

    def test_series_imaginary_parts_logged(self, tmp_path, caplog):
        series = MurmurationSeries(
            x_grid=np.array([2.0, 3.0]),
            avg_lhs=np.zeros(2),
            avg_zero_term=np.array([0.5j, 0.0]),
            black=np.array([0.5j, 0.0]),
            family_id="leaky",
        )
        with caplog.at_level(logging.WARNING):
            emit_series(series, tmp_path / "s.csv")
        assert "leaky" in caplog.text

    def test_reruns_are_byte_identical(self, tmp_path):
        hist = ZeroDensityHistogram(
            bin_edges=np.linspace(0, 1, 11),
            counts=np.arange(10.0),
            family_id="h",
            member_count=3,
        )
        emit_hist(hist, tmp_path / "a.csv")
        emit_hist(hist, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.csv").read_text().splitlines()[1] == "0,0.1,0"

    def test_header_only_outputs(self, tmp_path):
        emit_ap([], tmp_path / "ap.csv")
        persist_zeros({}, tmp_path / "zeros.csv")
        assert (tmp_path / "ap.csv").read_text() == "label,p,ap\n"
        assert (tmp_path / "zeros.csv").read_text() == "object_id,gamma\n"

    def test_primes(self, tmp_path):
        emit_primes(sieve_primes(12), tmp_path / "p.csv")
        assert (tmp_path / "p.csv").read_text() == "p\n2\n3\n5\n7\n11\n"

    def test_unwritable_target(self, tmp_path):
        target = tmp_path / "dir"
        target.mkdir()
        with pytest.raises(OutputError):
            emit_ap([("11a1", 2, -2)], target)


def test_store_instance_controls_formatting(tmp_path):
    store = CsvStore()
    store.zero_format = "%.3f"
    zl = ZeroList(object_id="a", gammas=np.array([1.23456]), height_bound=2.0)
    store.persist_zeros({"a": zl}, tmp_path / "z.csv")
    assert (tmp_path / "z.csv").read_text() == "object_id,gamma\na,1.235\n"
