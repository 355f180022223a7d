"""Daily tide heights against Earth-Sun and Earth-Moon distance.

Three CSV inputs, each keyed by day of year:

* Earth-Sun distance: ``doy,d_es_au``
* Earth-Moon distance: ``doy,d_em_km`` (or ``doy,d_em_au``)
* tide readings: ``doy,h_ft``; several readings per day are allowed and the
  daily maximum is used.

The joined table has columns ``ESd``, ``EMd`` (both AU) and ``h`` (feet).
"""

from __future__ import annotations

import logging
import os
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

from ..dag import parse_dot
from ..data import check_table, parse_csv_text, write_csv

log = logging.getLogger(__name__)

KM_PER_AU = 1.495978707e8
FIXTURE_ENV = "CAUSALAB_FIXTURES"

DOMAIN_MODEL = parse_dot(
    """digraph {
  EMd [label="Earth-Moon distance"];
  ESd [label="Earth-Sun distance"];
  h [label="height of the tide"]
  ESd -> EMd -> h;
  ESd -> h;
}"""
)


class UnitMismatchError(ValueError):
    pass


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent.parent / "fixtures"


def _read(path, source_name):
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv_text(text, source=str(path) if source_name is None else source_name)


def _check_days(df, source):
    doy = df["doy"].to_numpy()
    bad = np.flatnonzero((doy < 1) | (doy > 366) | (doy != np.round(doy)))
    if bad.size:
        # +2: header line plus one-based numbering
        raise ValueError(f"{source}:{bad[0] + 2}: day of year must be an integer in [1, 366], got {doy[bad[0]]}")


def load_tide_dataset(es_csv, em_csv, tide_csv) -> pd.DataFrame:
    """Inner-join the three inputs on day of year.

    Days missing from any file are dropped with a ``UserWarning``.
    """
    es = _read(es_csv, None)
    em = _read(em_csv, None)
    tide = _read(tide_csv, None)

    if list(es.columns) != ["doy", "d_es_au"]:
        raise ValueError(f"{es_csv}: expected header doy,d_es_au, found {','.join(es.columns)}")
    if list(tide.columns) != ["doy", "h_ft"]:
        raise ValueError(f"{tide_csv}: expected header doy,h_ft, found {','.join(tide.columns)}")
    if list(em.columns) == ["doy", "d_em_km"]:
        if (em["d_em_km"] < 1e3).any():
            line = int(np.flatnonzero(em["d_em_km"].to_numpy() < 1e3)[0]) + 2
            raise UnitMismatchError(f"{em_csv}:{line}: d_em_km value looks like AU, not km")
        em = em.assign(EMd=em["d_em_km"] / KM_PER_AU)
    elif list(em.columns) == ["doy", "d_em_au"]:
        if (em["d_em_au"] > 1.0).any():
            line = int(np.flatnonzero(em["d_em_au"].to_numpy() > 1.0)[0]) + 2
            raise UnitMismatchError(f"{em_csv}:{line}: d_em_au value looks like km, not AU")
        em = em.assign(EMd=em["d_em_au"])
    else:
        raise ValueError(f"{em_csv}: expected header doy,d_em_km or doy,d_em_au, found {','.join(em.columns)}")
    if ((es["d_es_au"] < 0.5) | (es["d_es_au"] > 2.0)).any():
        line = int(np.flatnonzero(((es["d_es_au"] < 0.5) | (es["d_es_au"] > 2.0)).to_numpy())[0]) + 2
        raise UnitMismatchError(f"{es_csv}:{line}: d_es_au outside plausible AU range")
    for df, src in ((es, es_csv), (em, em_csv), (tide, tide_csv)):
        _check_days(df, src)
    for name, df, src in (("d_es_au", es, es_csv), ("EMd", em, em_csv)):
        if df["doy"].duplicated().any():
            line = int(np.flatnonzero(df["doy"].duplicated().to_numpy())[0]) + 2
            raise ValueError(f"{src}:{line}: duplicate day {int(df['doy'].iloc[line - 2])}")
        if (df[name] <= 0).any():
            raise ValueError(f"{src}: distances must be positive")

    daily = tide.groupby("doy", sort=True)["h_ft"].max()
    es_s = es.set_index("doy")["d_es_au"]
    em_s = em.set_index("doy")["EMd"]
    all_days = set(es_s.index) | set(em_s.index) | set(daily.index)
    days = sorted(set(es_s.index) & set(em_s.index) & set(daily.index))
    dropped = sorted(all_days - set(days))
    if dropped:
        warnings.warn(f"dropping {len(dropped)} day(s) missing from some input: {[int(d) for d in dropped]}", stacklevel=2)
    out = pd.DataFrame(
        {
            "ESd": es_s.loc[days].to_numpy(),
            "EMd": em_s.loc[days].to_numpy(),
            "h": daily.loc[days].to_numpy(),
        }
    )
    return check_table(out)


def load_fixture(site="synthetic") -> pd.DataFrame:
    d = fixture_dir() / "tides" / site
    return load_tide_dataset(d / "earth_sun.csv", d / "earth_moon.csv", d / "tide.csv")


# ---------------------------------------------------------------------------
# synthetic fixture

ANOMALISTIC_MONTH = 27.554551
ANOMALISTIC_YEAR = 365.259636
MEAN_EM_KM = 384_400.0
LUNAR_ECC = 0.0549
EARTH_ECC = 0.0167


def synthetic_tide_tables(
    seed,
    days=365,
    moon_ft=2.0,
    ratio=1000.0,
    base_ft=4.0,
    noise_ft=0.1,
    coupling=0.002,
):
    """Toy tidal model ``h = base + a (d0_EM/d_EM)^3 + b (1 AU/d_ES)^3 + noise``.

    ``a = moon_ft`` and ``b = a / ratio``.  ``coupling`` adds
    ``coupling * (d_ES - 1 AU)`` to the lunar distance, giving the data the
    Earth-Sun → Earth-Moon edge of the domain model.  Each day has three or
    four tide readings whose maximum is the modelled height.

    Returns three DataFrames in the loader's input formats.
    """
    rng = np.random.default_rng(seed)
    doy = np.arange(1, days + 1)
    d_es = 1 - EARTH_ECC * np.cos(2 * np.pi * (doy - 3) / ANOMALISTIC_YEAR)
    phase = rng.uniform(0, 2 * np.pi)
    em_au = MEAN_EM_KM / KM_PER_AU * (1 - LUNAR_ECC * np.cos(2 * np.pi * doy / ANOMALISTIC_MONTH + phase))
    em_au = em_au + coupling * (d_es - 1)
    d0 = MEAN_EM_KM / KM_PER_AU
    h = base_ft + moon_ft * (d0 / em_au) ** 3 + (moon_ft / ratio) * (1 / d_es) ** 3
    h = h + noise_ft * rng.standard_normal(days)

    readings = []
    for day, high in zip(doy, h):
        k = rng.integers(3, 5)
        lows = high - rng.uniform(0.5, 4.0, size=k - 1)
        vals = np.concatenate([[high], lows])
        rng.shuffle(vals)
        readings += [(day, v) for v in vals]
    es = pd.DataFrame({"doy": doy, "d_es_au": d_es})
    em = pd.DataFrame({"doy": doy, "d_em_km": em_au * KM_PER_AU})
    tide = pd.DataFrame(readings, columns=["doy", "h_ft"])
    return es, em, tide


def write_synthetic_fixture(directory, seed=2019, **kwargs) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    es, em, tide = synthetic_tide_tables(seed, **kwargs)
    write_csv(es, directory / "earth_sun.csv")
    write_csv(em, directory / "earth_moon.csv")
    write_csv(tide, directory / "tide.csv")
    return directory
