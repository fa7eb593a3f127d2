import datetime as dt

import numpy as np
import pytest

from climhet.errors import DataError, IngestError, PanelError
from climhet.ingest import (
    SINGLE_STATION, FileFormat, PanelSpec, StationRecord, assemble_daily_annual_samples,
    build_samples, build_station_month_units, parse_station_file, select_balanced_panel,
    write_rejects,
)
from climhet.synthetic import write_station_file

HEADER = "station_id,date,tmin,tmax,tavg\n"


def write(tmp_path, body, name="st.csv", header=HEADER):
    path = tmp_path / name
    path.write_text(header + body)
    return path


def rec(station, y, m, d, tavg):
    return StationRecord(station, dt.date(y, m, d), None, None, tavg)


def full_month(station, y, m, value=10.0):
    n = [31, 29 if y % 4 == 0 else 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31][m - 1]
    return [rec(station, y, m, d, value) for d in range(1, n + 1)]


def test_parse_valid_rows_and_midpoint_fallback(tmp_path):
    path = write(tmp_path, "A,2000-01-01,1.0,5.0,2.5\nA,2000-01-02,2.0,6.0,\n")
    res = parse_station_file(path)
    assert res.n_rows == 2 and not res.rejects
    assert res.records[0].tavg == 2.5
    assert res.records[1].tavg == 4.0


def test_parse_rejects_carry_line_and_reason(tmp_path):
    body = (
        "A,2000-01-01,1.0,5.0,2.5\n"
        "A,2000-02-30,1.0,5.0,2.5\n"
        "A,2000-01-03,6.0,5.0,\n"
        "A,2000-01-04,,,\n"
        "A,2000-01-05,1.0,5.0,9.0\n"
        "A,2000-01-06,1.0\n"
        "A,2000-01-07,1.0,5.0,3.0\n"
        "A,2000-01-08,1.0,5.0,3.0\n"
        "A,2000-01-09,1.0,5.0,3.0\n"
        "A,2000-01-10,1.0,5.0,3.0\n"
        "A,2000-01-11,1.0,5.0,3.0\n"
    )
    res = parse_station_file(write(tmp_path, body))
    reasons = {r.line: r.reason for r in res.rejects}
    assert reasons == {
        3: "invalid date", 4: "tmin above tmax", 5: "no temperature",
        6: "tavg outside [tmin, tmax]", 7: "wrong field count",
    }
    assert len(res.records) == 6 and res.n_rows == 11


def test_parse_fails_above_half_rejected(tmp_path):
    body = "A,2000-01-01,1,2,1.5\n" + "A,bad,1,2,1.5\n" * 2
    with pytest.raises(IngestError, match="2 of 3 rows rejected"):
        parse_station_file(write(tmp_path, body))


def test_parse_exactly_half_rejected_is_accepted(tmp_path):
    body = "A,2000-01-01,1,2,1.5\nA,bad,1,2,1.5\n"
    res = parse_station_file(write(tmp_path, body))
    assert len(res.rejects) == 1


def test_missing_file_names_path(tmp_path):
    with pytest.raises(IngestError, match="nope.csv"):
        parse_station_file(tmp_path / "nope.csv")


def test_header_mismatch(tmp_path):
    path = write(tmp_path, "A;2000-01-01;1;2\n", header="indicativo;fecha;tmin;tmax\n")
    with pytest.raises(IngestError, match="header lacks"):
        parse_station_file(path)
    fmt = FileFormat(";", {"station_id": "indicativo", "date": "fecha", "tmin": "tmin", "tmax": "tmax"})
    res = parse_station_file(path, fmt)
    assert res.records[0].tavg == 1.5


def test_custom_date_format_and_missing_tokens(tmp_path):
    path = write(tmp_path, "A,01/02/2000,-9999,4.0,3.0\n")
    res = parse_station_file(path, FileFormat(date_format="%d/%m/%Y"))
    r = res.records[0]
    assert r.date == dt.date(2000, 2, 1) and r.tmin is None and r.tavg == 3.0


def test_write_rejects(tmp_path):
    path = write(tmp_path, "A,2000-01-01,1,2,1.5\nA,x,1,2,1.5\n")
    res = parse_station_file(path)
    write_rejects([("st.csv", res.rejects)], tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines == ["source,line,reason,raw", "st.csv,3,invalid date,\"A,x,1,2,1.5\""]


def test_month_coverage_threshold():
    records = [rec("A", 2001, 2, d, 1.0) for d in range(1, 23)]  # 22 of 28 days
    assert build_station_month_units(records, 0.8) == []
    records.append(rec("A", 2001, 2, 23, 1.0))  # 23 >= 0.8 * 28
    units = build_station_month_units(records, 0.8)
    assert len(units) == 1 and units[0].n_days == 23


def test_duplicate_days_are_averaged():
    records = full_month("A", 2001, 4, 10.0) + [rec("A", 2001, 4, 1, 40.0)]
    (unit,) = build_station_month_units(records, 1.0)
    assert unit.n_days == 30 and unit.n_records == 31
    assert unit.value == pytest.approx((25.0 + 29 * 10.0) / 30)


def _panel(stations, years, skip=()):
    records = []
    for s in stations:
        for y in years:
            for m in range(1, 13):
                if (s, y, m) not in skip:
                    records += full_month(s, y, m, value=float(m) + (s == "B"))
    return records


def test_strict_panel_drops_incomplete_station():
    records = _panel(["A", "B", "C"], range(2000, 2003), skip={("C", 2001, 5)})
    units = build_station_month_units(records)
    sel = select_balanced_panel(units, PanelSpec(2000, 2002))
    assert sel.stations == ("A", "B") and sel.units_per_year == 24
    assert all(s.n == 24 for s in sel.samples.values())


def test_per_month_rule_keeps_complete_months():
    records = _panel(["A", "B", "C"], range(2000, 2003), skip={("C", 2001, 5)})
    units = build_station_month_units(records)
    sel = select_balanced_panel(units, PanelSpec(2000, 2002, rule="per-month"))
    assert sel.units_per_year == 35
    assert sel.stations == ("A", "B", "C")


def test_sample_order_is_year_station_month():
    records = _panel(["B", "A"], range(2000, 2002))
    sel = select_balanced_panel(build_station_month_units(records), PanelSpec(2000, 2001))
    np.testing.assert_array_equal(sel.samples[2000].values[:12], np.arange(1, 13))
    np.testing.assert_array_equal(sel.samples[2000].values[12:], np.arange(2, 14))


def test_empty_panel_names_worst_stations():
    records = _panel(["A", "B"], range(2000, 2002), skip={("A", 2000, 1), ("B", 2001, 2), ("B", 2001, 3)})
    with pytest.raises(PanelError, match=r"B \(2 missing\), A \(1 missing\)"):
        select_balanced_panel(build_station_month_units(records), PanelSpec(2000, 2001))


def test_daily_mode(tmp_path):
    recs = [StationRecord("A", dt.date(2000, 1, 1) + dt.timedelta(days=k), None, None, float(k))
            for k in range(366 + 365)]
    samples = assemble_daily_annual_samples(recs, PanelSpec(2000, 2001, SINGLE_STATION))
    assert samples[2000].n == 366 and samples[2001].n == 365
    partial = [r for r in recs if not (r.date.year == 2001 and r.date.month > 6)]
    samples = assemble_daily_annual_samples(partial, PanelSpec(2000, 2001, SINGLE_STATION))
    assert list(samples) == [2000]
    with pytest.raises(DataError, match="exactly one station"):
        assemble_daily_annual_samples(recs + [rec("B", 2000, 1, 1, 0.0)],
                                      PanelSpec(2000, 2001, SINGLE_STATION))


def test_panel_spec_validation():
    with pytest.raises(ValueError):
        PanelSpec(2000, 1999)
    with pytest.raises(ValueError):
        PanelSpec(2000, 2001, mode="weekly")
    with pytest.raises(ValueError):
        PanelSpec(2000, 2001, rule="loose")
    with pytest.raises(ValueError):
        PanelSpec(2000, 2001, coverage=0.0)


@pytest.mark.parametrize("missing_months,bad_rows", [(0, 0), (3, 4)])
def test_row_accounting_balances(tmp_path, missing_months, bad_rows):
    path = write_station_file(tmp_path / "s.csv", 2000, 2011, n_stations=3,
                              missing_months=missing_months, bad_rows=bad_rows, seed=4)
    parsed = parse_station_file(path)
    samples, report = build_samples([parsed], PanelSpec(2000, 2010))
    assert report.balanced()
    assert report.rejected == bad_rows
    assert sorted(samples) == list(range(2000, 2011))
    n_stations = 2 if missing_months else 3
    assert all(s.n == 12 * n_stations for s in samples.values())


def test_row_accounting_daily_mode(tmp_path):
    path = write_station_file(tmp_path / "s.csv", 2000, 2011, single_station=True, seed=5)
    samples, report = build_samples([parse_station_file(path)], PanelSpec(2000, 2010, SINGLE_STATION))
    assert report.balanced() and len(samples) == 11
    assert report.filtered_panel == 365  # 2011 lies outside the period
