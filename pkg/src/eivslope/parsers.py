import re
from pathlib import Path

import numpy as np
import pandas

from eivslope.dataset import Dataset
from eivslope.exceptions import ParseError, TooFewPoints
from eivslope.logger import LOGGER

_SEPARATOR = r"[,\s]+"

# lines are read into this many columns, so that wrong widths can be reported
_MAX_FIELDS = 16
_FIELD_NAMES = list(range(_MAX_FIELDS))
_LINE_NUMBER = re.compile(r"line (\d+)")
_NAN_SPELLINGS = ("nan", "+nan", "-nan")


def _undecodable_line(path: Path) -> int | None:
    for number, raw in enumerate(path.read_bytes().splitlines(), start=1):
        try:
            raw.decode("utf-8")
        except UnicodeDecodeError:
            return number
    return None


def _read_cells(path: Path) -> pandas.DataFrame:
    """Reads every line of the file, blank ones included, as a row of
    strings; missing fields are empty strings."""
    try:
        cells = pandas.read_csv(
            path,
            sep=_SEPARATOR,
            engine="python",
            header=None,
            names=_FIELD_NAMES,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pandas.errors.EmptyDataError:
        return pandas.DataFrame(columns=_FIELD_NAMES, dtype=str)
    except pandas.errors.ParserError as exc:
        match = _LINE_NUMBER.search(str(exc))
        raise ParseError(
            f"expected 2 columns, found more than {_MAX_FIELDS}",
            line=int(match[1]) if match else None,
        ) from None
    except UnicodeDecodeError as exc:
        raise ParseError(
            f"the file is not UTF-8 text ({exc.reason})", line=_undecodable_line(path)
        ) from None
    return cells.fillna("").astype(str)


def parse_input(path: Path | str, min_points: int = 3) -> Dataset:
    """Parses a two-column text file of paired observations.

    Columns may be separated by commas and/or whitespace. Blank lines are
    skipped, and a single non-numeric header line is allowed as the first
    non-blank line.

    Parameters:
        path: Path to the input file.
        min_points: The minimum number of pairs the caller needs.

    Returns:
        The observations as a `Dataset`, in file order.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: For malformed lines or undecodable bytes, with the
            offending line number.
        TooFewPoints: If fewer than `min_points` pairs are found.

    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Could not find input file at {path}")

    cells = _read_cells(path)
    if cells.empty:
        raise TooFewPoints(f"Found no pairs in {path}, at least {min_points} are needed.")

    present = cells.ne("")
    numbers = cells.apply(pandas.to_numeric, errors="coerce")
    spelled_nan = cells.apply(lambda column: column.str.lower().isin(_NAN_SPELLINGS))
    non_numeric = (present & numbers.isna() & ~spelled_nan).any(axis=1).to_numpy()
    non_finite = (present & ~np.isfinite(numbers)).any(axis=1).to_numpy()
    width = present.sum(axis=1).to_numpy()

    # row positions are file line numbers minus one
    rows = np.flatnonzero(width > 0)
    if rows.size and non_numeric[rows[0]]:
        LOGGER.debug(
            f"Skipping header line {rows[0] + 1} of {path}: "
            f"{list(cells.iloc[rows[0]][present.iloc[rows[0]]])}"
        )
        rows = rows[1:]

    bad = rows[non_numeric[rows] | (width[rows] != 2) | non_finite[rows]]
    if bad.size:
        position = int(bad[0])
        values = list(cells.iloc[position][present.iloc[position]])
        if non_numeric[position]:
            message = f"non-numeric value in {values}"
        elif width[position] != 2:
            message = f"expected 2 columns, found {width[position]}"
        else:
            message = f"non-finite value in {values}"
        raise ParseError(message, line=position + 1)

    if rows.size < min_points:
        raise TooFewPoints(
            f"Found {rows.size} pair(s) in {path}, at least {min_points} are needed."
        )

    LOGGER.debug(f"Read {rows.size} pairs from {path}")
    return Dataset(y1=numbers[0].to_numpy()[rows], y2=numbers[1].to_numpy()[rows])
