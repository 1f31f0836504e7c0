"""Tests for the Cayley table text format."""

import numpy as np
import pytest

from errors import TableParseError
from services.loop_core import EXCEPTIONAL_8
from table_format import format_table, parse_table, read_table, write_table


class TestParseTable:

    def test_basic(self):
        table = parse_table("order 3\n0 1 2\n1 2 0\n2 0 1\n")
        assert table.dtype == np.int32
        assert table.tolist() == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]

    def test_comments_and_blank_lines(self):
        text = "# Z2\n\norder 2\n# rows follow\n0 1\n\n1 0\n"
        assert parse_table(text).tolist() == [[0, 1], [1, 0]]

    def test_syntax_only(self):
        # not a Latin square, but syntactically fine
        assert parse_table("order 2\n0 0\n0 0\n").tolist() == [[0, 0], [0, 0]]

    @pytest.mark.parametrize("text, line, message", [
        ("0 1\n1 0\n", 1, "expected header"),
        ("order x\n0\n", 1, "not an integer"),
        ("order 0\n", 1, "must be positive"),
        ("order 2\n0 1\n1\n", 3, "expected 2 entries"),
        ("order 2\n0 1\n1 a\n", 3, "non-integer"),
        ("order 2\n0 1\n1 2\n", 3, "outside 0..1"),
        ("order 1\n0\n0\n", 3, "more than 1 rows"),
    ])
    def test_errors_carry_line_numbers(self, text, line, message):
        with pytest.raises(TableParseError, match=message) as exc:
            parse_table(text)
        assert exc.value.line == line
        assert str(exc.value).startswith(f"line {line}:")

    def test_missing_rows(self):
        with pytest.raises(TableParseError, match="expected 3 rows, got 1"):
            parse_table("order 3\n0 1 2\n")

    def test_empty(self):
        with pytest.raises(TableParseError, match="empty"):
            parse_table("# nothing here\n")


class TestFormatTable:

    def test_format(self):
        assert format_table(np.array([[0, 1], [1, 0]])) == "order 2\n0 1\n1 0\n"

    def test_file_round_trip_is_byte_stable(self, tmp_path):
        path = tmp_path / "eq8.txt"
        write_table(path, np.array(EXCEPTIONAL_8))
        first = path.read_text()
        write_table(path, read_table(path))
        assert path.read_text() == first
        assert read_table(path).tolist() == [list(row) for row in EXCEPTIONAL_8]
