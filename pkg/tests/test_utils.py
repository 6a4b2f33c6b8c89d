from __future__ import annotations

import pandas as pd
import pytest

from bayes_fuzzy_ocr.exceptions import ConfigError
from bayes_fuzzy_ocr.utils import (
    parse_float_grid,
    parse_int_list,
    parse_int_range,
    parse_seeds,
    read_report_csv,
    write_report_csv,
)


def test_float_grid_is_inclusive_and_clean():
    assert parse_float_grid("0.7:1.2:0.1") == [0.7, 0.8, 0.9, 1.0, 1.1, 1.2]
    assert parse_float_grid("1.0") == [1.0]
    assert parse_float_grid("0.9, 1.0,1.1") == [0.9, 1.0, 1.1]


@pytest.mark.parametrize("spec", ["", "1:2", "1.2:0.7:0.1", "0.7:1.2:0", "a,b"])
def test_float_grid_errors(spec):
    with pytest.raises(ConfigError):
        parse_float_grid(spec)


def test_integer_parsers():
    assert parse_int_list("784,100,10") == [784, 100, 10]
    assert parse_int_range("1:3") == [1, 2, 3]
    assert parse_int_range("2") == [2]
    assert parse_seeds("3") == [0, 1, 2]
    assert parse_seeds("4,9") == [4, 9]
    for bad in (lambda: parse_int_list(","), lambda: parse_int_range("3:1"), lambda: parse_seeds("0")):
        with pytest.raises(ConfigError):
            bad()


def test_report_csv_layout(tmp_path):
    df = pd.DataFrame({"h": [0.7, 1.0 / 3.0], "ok": [True, False], "n": [1, 2]})
    path = write_report_csv(df, tmp_path / "sub" / "r.csv", header_comments=["mode=test", "seed=1"])
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert raw.decode().splitlines() == ["# mode=test", "# seed=1", "h,ok,n", "0.7,true,1", "0.333333,false,2"]
    back = read_report_csv(path)
    assert back["n"].tolist() == [1, 2]

