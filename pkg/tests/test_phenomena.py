import warnings

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalab.data import EmptyTableError, parse_csv_text, read_csv, write_csv
from causalab.phenomena import (
    build_entanglement_dataset,
    correlation,
    load_ldr_dataset,
    load_tide_dataset,
    log_negativity,
    measure_zz,
    random_density_matrix,
)
from causalab.phenomena import ldr, ohm, quantum, tides


class TestOhm:
    def test_forced_row(self):
        c = ohm.PLATINUM
        row = ohm.ohm_row(V=2.0, L=1.0, A=c["rho0"], T=0.0)
        assert row["R"] == pytest.approx(1.0, rel=1e-15)
        assert row["I"] == pytest.approx(2.0, rel=1e-15)

    def test_zero_offset(self):
        assert ohm.ohm_row(1.0, 1.0, 1e-6, 0.0)["rho"] == ohm.PLATINUM["rho0"]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_identities_every_row(self, seed):
        df = ohm.generate_ohm_dataset(500, rng=seed)
        c = ohm.PLATINUM
        np.testing.assert_allclose(df["rho"], c["rho0"] * (1 + c["alpha"] * df["T"]), rtol=1e-9)
        np.testing.assert_allclose(df["R"], df["rho"] * df["L"] / df["A"], rtol=1e-9)
        np.testing.assert_allclose(df["I"], df["V"] / df["R"], rtol=1e-9)

    def test_columns_and_ranges(self):
        df = ohm.generate_ohm_dataset(1000, rng=0)
        assert list(df.columns) == ohm.COLUMNS
        for k, (lo, hi) in ohm.DEFAULT_RANGES.items():
            assert df[k].between(lo, hi).all()

    def test_seeded(self):
        pd.testing.assert_frame_equal(ohm.generate_ohm_dataset(10, rng=3), ohm.generate_ohm_dataset(10, rng=3))

    @pytest.mark.parametrize("ranges", [{"V": (0.0, 1.0)}, {"A": (-1.0, 1.0)}, {"L": (2.0, 1.0)}, {"T": (-5.0, 1.0)}])
    def test_bad_ranges(self, ranges):
        with pytest.raises(ValueError):
            ohm.generate_ohm_dataset(5, ranges=ranges, rng=0)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            ohm.generate_ohm_dataset(0, rng=0)

    def test_models(self):
        assert ohm.MODEL_A.has_edge("T", "rho") and ohm.MODEL_A.has_edge("T", "I")
        assert not ohm.MODEL_B.has_edge("T", "rho") and ohm.MODEL_B.has_edge("T", "I")
        assert ohm.MODEL_C.has_edge("T", "rho") and not ohm.MODEL_C.has_edge("T", "I")


def _write_tides(tmp_path, es, em, tide):
    paths = []
    for name, text in (("es.csv", es), ("em.csv", em), ("tide.csv", tide)):
        p = tmp_path / name
        p.write_text(text)
        paths.append(p)
    return paths


class TestTides:
    def test_single_day(self, tmp_path):
        paths = _write_tides(tmp_path, "doy,d_es_au\n1,0.9833\n", "doy,d_em_km\n1,384400\n", "doy,h_ft\n1,3.5\n1,6.25\n1,1.0\n")
        df = load_tide_dataset(*paths)
        assert list(df.columns) == ["ESd", "EMd", "h"]
        assert len(df) == 1
        assert df["EMd"][0] == pytest.approx(384400 / tides.KM_PER_AU)
        assert df["h"][0] == 6.25

    def test_missing_day_dropped(self, tmp_path):
        paths = _write_tides(
            tmp_path, "doy,d_es_au\n1,0.98\n2,0.98\n", "doy,d_em_au\n1,0.00257\n2,0.00256\n", "doy,h_ft\n1,5.0\n"
        )
        with pytest.warns(UserWarning, match="dropping 1 day"):
            df = load_tide_dataset(*paths)
        assert len(df) == 1

    def test_unit_mismatch(self, tmp_path):
        paths = _write_tides(tmp_path, "doy,d_es_au\n1,0.98\n", "doy,d_em_km\n1,0.00257\n", "doy,h_ft\n1,5.0\n")
        with pytest.raises(tides.UnitMismatchError, match=":2:"):
            load_tide_dataset(*paths)

    def test_malformed_row_line_number(self, tmp_path):
        paths = _write_tides(tmp_path, "doy,d_es_au\n1,0.98\n2,abc\n", "doy,d_em_au\n1,0.0025\n", "doy,h_ft\n1,5\n")
        with pytest.raises(ValueError, match=":3:"):
            load_tide_dataset(*paths)

    def test_bad_header(self, tmp_path):
        paths = _write_tides(tmp_path, "day,d_es_au\n1,0.98\n", "doy,d_em_au\n1,0.0025\n", "doy,h_ft\n1,5\n")
        with pytest.raises(ValueError, match="expected header"):
            load_tide_dataset(*paths)

    def test_bad_day(self, tmp_path):
        paths = _write_tides(tmp_path, "doy,d_es_au\n400,0.98\n", "doy,d_em_au\n400,0.0025\n", "doy,h_ft\n400,5\n")
        with pytest.raises(ValueError, match="day of year"):
            load_tide_dataset(*paths)

    def test_fixture_shape(self):
        df = tides.load_fixture()
        assert len(df) == 365
        assert df["EMd"].between(0.0023, 0.0028).all()

    def test_fixture_matches_generator(self, tmp_path):
        tides.write_synthetic_fixture(tmp_path, seed=2019)
        for name in ("earth_sun.csv", "earth_moon.csv", "tide.csv"):
            assert (tmp_path / name).read_text() == (tides.fixture_dir() / "tides" / "synthetic" / name).read_text()

    def test_fixture_env_override(self, tmp_path, monkeypatch):
        tides.write_synthetic_fixture(tmp_path / "tides" / "other", seed=5)
        monkeypatch.setenv(tides.FIXTURE_ENV, str(tmp_path))
        assert len(tides.load_fixture("other")) == 365


class TestLdr:
    def test_rows(self):
        df = load_ldr_dataset(tides.fixture_dir() / "ldr" / "bench_sample.csv")
        assert tuple(df.iloc[0]) == (2.67, 100.3, 5, 37.000)
        assert tuple(df.iloc[-1]) == (8.00, 183.6, 1386, 0.413)

    def test_empty(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        with pytest.raises(EmptyTableError):
            load_ldr_dataset(p)

    def test_header(self):
        with pytest.raises(ValueError):
            ldr.parse_ldr_text("V,I,P\n1,2,3\n")

    def test_short_row(self):
        with pytest.raises(ValueError, match=":3:"):
            ldr.parse_ldr_text("V,I,P,R\n1,2,3,4\n1,2,3\n")

    def test_variants(self):
        assert ldr.ldr_variant(True, True) == ldr.MODEL_DOMAIN
        assert "R" in ldr.ldr_variant(False, False).nodes


class TestCsv:
    def test_roundtrip_exact(self, tmp_path):
        df = pd.DataFrame({"a": [0.1 + 0.2, 1e-300, 3.0], "b": [-2.5, 7.0, np.pi]})
        write_csv(df, tmp_path / "x.csv")
        pd.testing.assert_frame_equal(read_csv(tmp_path / "x.csv"), df)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            parse_csv_text("a\nnan\n")

    def test_duplicate_names(self):
        with pytest.raises(ValueError):
            parse_csv_text("a,a\n1,2\n")


PRODUCT = np.diag([1.0, 0, 0, 0]).astype(complex)


class TestQuantum:
    def test_random_state_valid(self):
        for seed in range(50):
            quantum.check_density_matrix(random_density_matrix(seed))

    def test_seeded(self):
        assert np.array_equal(random_density_matrix(4), random_density_matrix(4))

    def test_mean_purity(self):
        rng = np.random.default_rng(0)
        purity = [np.real(np.trace(r @ r)) for r in (random_density_matrix(rng) for _ in range(10000))]
        assert np.mean(purity) == pytest.approx(8 / 17, abs=0.01)

    def test_log_negativity_bell(self):
        assert log_negativity(quantum.BELL_PHI_PLUS) == pytest.approx(1.0, abs=1e-10)

    def test_log_negativity_product(self):
        assert log_negativity(PRODUCT) == pytest.approx(0.0, abs=1e-10)

    def test_log_negativity_werner(self):
        rho = 0.5 * quantum.BELL_PHI_PLUS + 0.5 * np.eye(4) / 4
        assert log_negativity(rho) == pytest.approx(np.log2(1.25), abs=1e-10)

    def test_random_product_states(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            a, b = (_qubit(rng) for _ in range(2))
            assert log_negativity(np.kron(a, b)) == pytest.approx(0.0, abs=1e-12)

    def test_log_negativity_range(self):
        for seed in range(200):
            assert 0.0 <= log_negativity(random_density_matrix(seed)) <= 1.0

    def test_bell_perfect_correlation(self):
        m = measure_zz(quantum.BELL_PHI_PLUS, 500, 0)
        assert np.all(m[:, 0] == m[:, 1])

    def test_01_state(self):
        rho = np.zeros((4, 4), complex)
        rho[1, 1] = 1
        assert np.all(measure_zz(rho, 100, 0) == [1, -1])

    def test_mixed_frequencies(self):
        m = measure_zz(np.eye(4) / 4, 10000, 0)
        codes = (m[:, 0] < 0) * 2 + (m[:, 1] < 0)
        assert np.all(np.abs(np.bincount(codes, minlength=4) / 10000 - 0.25) <= 0.02)

    def test_shots_validated(self):
        with pytest.raises(ValueError):
            measure_zz(PRODUCT, 0, 0)

    def test_expectation_converges(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            rho = random_density_matrix(rng)
            exact = np.real(np.trace(rho @ quantum.ZZ))
            assert abs(correlation(measure_zz(rho, 2000, rng)) - exact) <= 3 / np.sqrt(2000)

    def test_correlation_extremes(self):
        assert correlation([(1, 1)] * 5) == 1
        assert correlation([(1, -1)] * 5) == -1
        with pytest.raises(ValueError):
            correlation(np.empty((0, 2)))

    def test_correlation_independent(self):
        rng = np.random.default_rng(3)
        s = rng.choice([-1, 1], size=(10000, 2))
        assert abs(correlation(s)) <= 0.05

    def test_dataset_shape(self):
        df = build_entanglement_dataset(20, 100, rng=7)
        assert df.shape == (2000, 6)
        assert list(df.columns) == quantum.COLUMNS
        assert list(df["state"]) == sorted(df["state"])

    def test_forced_bell(self):
        df = build_entanglement_dataset(1, 50, rng=0, states=[quantum.BELL_PHI_PLUS])
        assert np.allclose(df["E"], 1.0) and np.all(df["C"] == 1.0)

    def test_internal_consistency(self):
        df = build_entanglement_dataset(5, 40, rng=11)
        children = np.random.SeedSequence(11).spawn(5)
        for sid, seq in enumerate(children):
            child = np.random.default_rng(seq)
            rho = random_density_matrix(child)
            block = df[df["state"] == sid]
            assert block["E"].nunique() == 1 and block["C"].nunique() == 1
            assert block["E"].iloc[0] == log_negativity(rho)
            m = measure_zz(rho, 40, child)
            assert block["C"].iloc[0] == correlation(m)
            assert np.array_equal(block[["M_A", "M_B"]].to_numpy(), m)
            assert np.allclose(block["absC"], np.abs(block["C"]))

    def test_zero_correlation_trap(self):
        df = build_entanglement_dataset(300, 100, rng=5)
        per_state = df.groupby("state").first()
        assert abs(per_state["C"].mean()) < 0.05
        assert per_state["absC"].mean() > 0.1

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            build_entanglement_dataset(1, 10, rng=0, states=[np.eye(4)])


def _qubit(rng):
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    r = g @ g.conj().T
    return r / np.trace(r)
