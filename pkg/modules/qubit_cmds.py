# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from typing import TYPE_CHECKING, Optional

from utils.others import CommandArgparse, CommandGroup, format_number, render, to_json
from utils.statespace.errors import DomainError, RequireFiniteError
from utils.statespace.metrics import (
    arcsine_measure, monotone_catalog, point_mass, resolve_admissible, resolve_monotone, uniform_measure,
)
from utils.statespace.models import ScalarField
from utils.statespace.qubit import (
    INFINITE, ClosedForm, known_closed_form, pullback_closed_form, qubit_volume_monotone, qubit_volume_monotone_radial,
    qubit_volume_pullback, relative_error, reproduce_table, transpose_dichotomy, volume_from_measure,
)
from utils.statespace.quadrature import QuadratureVerdict

if TYPE_CHECKING:
    from utils.client import StateVolPool

FIELDS = [f.name for f in ScalarField]

MEASURES = {
    "point": point_mass,
    "uniform": uniform_measure,
    "arcsine": arcsine_measure,
}

MEASURE_VALUES = {
    "point": ClosedForm("pi^2", math.pi ** 2, False),
    "uniform": ClosedForm("2*pi^2", 2 * math.pi ** 2, False),
    "arcsine": INFINITE,
}

TABLE_COLUMNS = ["id", "params", "field", "verdict", "value", "closed_form", "rel_error", "flags"]
TRANSPOSE_COLUMNS = ["id", "value", "transpose_verdict", "transpose_exponent", "dichotomy"]


class QubitCommands(CommandGroup):

    name = "qubit"

    def quad_options(self) -> dict:
        return {
            "rel_tol": self.config["QUAD_REL_TOL"],
            "abs_tol": self.config["QUAD_ABS_TOL"],
            "max_level": self.config["QUAD_MAX_LEVEL"],
            "threshold": self.config["DIVERGENCE_THRESHOLD"],
            "agreement": self.config["PROBE_AGREEMENT"],
        }

    def register(self, subparsers, common: CommandArgparse):

        for name, handler, help_txt in (
            ("qubit", self.qubit, "qubit volume under a monotone or pull-back metric"),
            ("classify", self.classify, "finite/infinite verdict with the endpoint exponent evidence"),
        ):
            parser = subparsers.add_parser(name, parents=[common], help=help_txt, description=help_txt)
            target = parser.add_mutually_exclusive_group(required=True)
            target.add_argument("--metric", help="monotone metric id (sld, rld, km, geo, wy, lm2, lm3, "
                                                 "alpha:A, beta:B, gam:G)")
            target.add_argument("--pullback", help="pull-back metric id (identity, log, power:P)")
            if name == "qubit":
                target.add_argument("--measure", choices=sorted(MEASURES),
                                    help="Loewner measure representing 1/f (complex field)")
                parser.add_argument("--radial", action="store_true",
                                    help="integrate over the Bloch radius instead of t")
            parser.add_argument("--field", default="complex", choices=FIELDS)
            parser.add_argument("--require-finite", action="store_true",
                                help="exit with code 4 when the volume is infinite")
            parser.set_defaults(handler=handler)

        table = subparsers.add_parser(
            "table", parents=[common], help="qubit volumes for the whole monotone catalog",
            description="Complex and real qubit volumes for every catalog function, next to the known values."
        )
        table.add_argument("--transpose", action="store_true",
                           help="report whether f^perp has infinite volume when f has a finite one")
        table.set_defaults(handler=self.table)

    def _evaluate(self, args):

        field = ScalarField.parse(args.field)
        options = self.quad_options()

        if getattr(args, "measure", None):
            if field is not ScalarField.complex:
                raise DomainError("Loewner measures describe complex qubit volumes; use --field complex")
            mu = MEASURES[args.measure]()
            threshold = options.pop("threshold")
            options.pop("agreement")
            verdict = volume_from_measure(mu, threshold=threshold, **options)
            return f"measure:{args.measure}", field, verdict, MEASURE_VALUES.get(args.measure), "z"

        if args.metric:
            f = resolve_monotone(args.metric)
            if getattr(args, "radial", False):
                verdict = qubit_volume_monotone_radial(field, f, **options)
                variable = "r"
            else:
                verdict = qubit_volume_monotone(field, f, **options)
                variable = "t"
            return f.id, field, verdict, known_closed_form(f, field), variable

        h = resolve_admissible(args.pullback)
        return f"pullback:{h.id}", field, qubit_volume_pullback(field, h, **options), \
            pullback_closed_form(h, field), "r"

    def _report(self, args, label: str, field: ScalarField, verdict: QuadratureVerdict,
                closed: Optional[ClosedForm], variable: str) -> str:

        if args.require_finite and not verdict.is_finite:
            raise RequireFiniteError(label, verdict.exponent, verdict.endpoint)

        rel_error = relative_error(verdict, closed)

        if args.format in ("json", "csv"):
            data = {
                "id": label,
                "field": field.name,
                **verdict.to_dict(),
                "closed_form": closed.text if closed is not None else None,
                "rel_error": rel_error,
            }
            if args.format == "json":
                return to_json(data)
            return render([data], ["id", "field", "verdict", "value", "closed_form", "rel_error", "flags"], "csv",
                          args.digits)

        if not verdict.is_finite:
            return verdict.describe(args.digits, variable)

        txt = format_number(verdict.value, args.digits)
        if closed is not None and closed.value is not None:
            txt += f" ({closed.text}"
            if rel_error is not None:
                txt += f", rel. error {rel_error:.1e}"
            txt += ")"
        if verdict.flags:
            txt += f" [{', '.join(verdict.flags)}]"
        return txt

    def qubit(self, args) -> str:
        return self._report(args, *self._evaluate(args))

    def classify(self, args) -> str:
        label, field, verdict, closed, variable = self._evaluate(args)
        if args.format == "text" and not (args.require_finite and not verdict.is_finite):
            return verdict.describe(args.digits, variable)
        return self._report(args, label, field, verdict, closed, variable)

    def table(self, args) -> str:

        options = self.quad_options()

        if args.transpose:
            records = [{
                "id": pair.function_id,
                "value": pair.verdict.value,
                "transpose_verdict": pair.transpose_verdict.kind,
                "transpose_exponent": pair.transpose_verdict.exponent,
                "dichotomy": pair.dichotomy,
            } for pair in transpose_dichotomy(monotone_catalog(), **options)]
            return render(records, TRANSPOSE_COLUMNS, args.format, args.digits)

        rows = reproduce_table(monotone_catalog(), threads=args.threads, **options)
        records = [r for row in rows for r in row.records()]
        return render(records, TABLE_COLUMNS, args.format, args.digits)


def setup(pool: StateVolPool):
    pool.add_command_group(QubitCommands(pool))
