from pathlib import Path

import numpy as np
import pytest

from eivslope.exceptions import ParseError, TooFewPoints
from eivslope.parsers import parse_input

DATA = Path(__file__).parent / "data"


@pytest.fixture
def write(tmp_path):
    def _write(content: str | bytes) -> Path:
        path = tmp_path / "pairs.txt"
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content)
        return path

    return _write


def test_parse_csv_with_header():
    data = parse_input(DATA / "pairs.csv")
    assert data.n == 8
    assert (data.y1[0], data.y2[0]) == (4.1, 4.0)


@pytest.mark.parametrize(
    "content",
    [
        "1 2\n3 4\n5 6\n",
        "1,2\n3,4\n5,6\n",
        "1, 2\n3 ,4\n5\t6\n",
        "  1   2  \n\n3,4\n\n\n5 6\n",
        "x y\n1 2\n3 4\n5 6",
    ],
)
def test_separators_and_blank_lines(write, content):
    data = parse_input(write(content))
    np.testing.assert_array_equal(data.y1, [1.0, 3.0, 5.0])
    np.testing.assert_array_equal(data.y2, [2.0, 4.0, 6.0])


def test_scientific_notation(write):
    data = parse_input(write("1e-3,-2.5E2\n+3,4\n5,.5\n"))
    np.testing.assert_array_equal(data.y1, [1e-3, 3.0, 5.0])
    np.testing.assert_array_equal(data.y2, [-250.0, 4.0, 0.5])


@pytest.mark.parametrize(
    "content,line,match",
    [
        ("y1,y2\n1,2\n\n3,4\n5,x\n", 5, "non-numeric"),
        ("\n\ny1,y2\nfoo,bar\n1,2\n", 4, "non-numeric"),
        ("1,2\n3,4,5\n6,7\n", 2, "expected 2 columns, found 3"),
        ("1,2\n\n3\n6,7\n", 3, "expected 2 columns, found 1"),
        ("1,2\n3,nan\n6,7\n", 2, "non-finite"),
        ("1,2\n3,4\n-inf,7\n", 3, "non-finite"),
    ],
)
def test_parse_errors_name_the_file_line(write, content, line, match):
    with pytest.raises(ParseError, match=match) as excinfo:
        parse_input(write(content))
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_undecodable_bytes(write):
    with pytest.raises(ParseError, match="UTF-8") as excinfo:
        parse_input(write(b"1,2\n3,4\n\xff\xfe5,6\n"))
    assert excinfo.value.line == 3


@pytest.mark.parametrize("content", ["", "\n\n", "y1,y2\n", "y1,y2\n1,2\n3,4\n"])
def test_too_few_points(write, content):
    with pytest.raises(TooFewPoints):
        parse_input(write(content))


def test_min_points(write):
    assert parse_input(write("1,2\n3,4\n"), min_points=2).n == 2


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_input(tmp_path / "missing.csv")
