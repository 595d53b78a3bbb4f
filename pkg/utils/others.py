# -*- coding: utf-8 -*-
from __future__ import annotations

import argparse
import csv
import io
import json
import math
from fractions import Fraction
from typing import IO, Iterable, List, Optional, Sequence

from utils.statespace.errors import ArgumentParsingError

FORMATS = ("text", "json", "csv")


class CommandArgparse(argparse.ArgumentParser):

    def __init__(self, *args, **kwargs):

        kwargs.pop('exit_on_error', None)
        kwargs.pop('allow_abbrev', None)
        add_help = kwargs.pop('add_help', False)

        super().__init__(*args, exit_on_error=False, allow_abbrev=False, add_help=add_help, **kwargs)

    def parse_known_args(self, args=None, namespace=None):
        try:
            return super().parse_known_args(args, namespace)
        except argparse.ArgumentError as e:
            raise ArgumentParsingError(str(e))

    def error(self, message: str):
        raise ArgumentParsingError(message)


def format_number(value: Optional[float], digits: int = 10) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def json_ready(value):
    """Fractions become strings, non-finite floats become null."""
    if isinstance(value, dict):
        return {k: json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dump_json(data, stream: IO[str]):
    json.dump(json_ready(data), stream, indent=2, ensure_ascii=False)
    stream.write("\n")


def _csv_cell(value, digits: int):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else format_number(value, digits)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return ";".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in value.items())
    return value


def dump_csv(records: Sequence[dict], columns: Sequence[str], stream: IO[str], digits: int = 10):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_csv_cell(record.get(c), digits) for c in columns])


def dump_rows(rows: Iterable[Sequence], header: Sequence[str], stream: IO[str], digits: int = 10):
    """Numeric rows (e.g. sample matrices) with full float precision."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])


def _text_cell(value, digits: int) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return format_number(value, digits)
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value) or "-"
    if isinstance(value, dict):
        return ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in value.items()) or "-"
    return str(value)


def text_table(records: Sequence[dict], columns: Sequence[str], digits: int = 10) -> str:
    cells: List[List[str]] = [list(columns)] + [[_text_cell(r.get(c), digits) for c in columns] for r in records]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render(records: Sequence[dict], columns: Sequence[str], fmt: str, digits: int = 10) -> str:
    stream = io.StringIO()
    if fmt == "json":
        dump_json(list(records), stream)
    elif fmt == "csv":
        dump_csv(records, columns, stream, digits)
    else:
        stream.write(text_table(records, columns, digits) + "\n")
    return stream.getvalue()


class CommandGroup:
    """A set of subcommands registered by a module's ``setup(pool)``."""

    name = ""

    def __init__(self, pool):
        self.pool = pool

    @property
    def config(self) -> dict:
        return self.pool.config

    def register(self, subparsers, common: CommandArgparse):
        raise NotImplementedError


def to_json(data) -> str:
    stream = io.StringIO()
    dump_json(data, stream)
    return stream.getvalue()
