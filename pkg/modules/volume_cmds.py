# -*- coding: utf-8 -*-
from __future__ import annotations

from typing import TYPE_CHECKING

from utils.others import CommandArgparse, CommandGroup, format_number, render, to_json
from utils.statespace.models import ScalarField
from utils.statespace.volumes import expected_det_alpha, expected_det_alpha_exact, volume_lebesgue

if TYPE_CHECKING:
    from utils.client import StateVolPool

FIELDS = [f.name for f in ScalarField]

VOLUME_COLUMNS = ["field", "n", "coeff_num", "coeff_den", "pi_pow", "decimal"]
EXPECTED_DET_COLUMNS = ["field", "n", "alpha", "value", "exact"]


class VolumeCommands(CommandGroup):

    name = "volume"

    def register(self, subparsers, common: CommandArgparse):

        volume = subparsers.add_parser(
            "volume", parents=[common], help="exact Lebesgue volume of the state space",
            description="Exact Lebesgue volume of the n x n state space, as rational * pi^k."
        )
        volume.add_argument("--field", required=True, choices=FIELDS)
        volume.add_argument("--n", required=True, type=int, help="matrix order")
        volume.set_defaults(handler=self.volume)

        expected = subparsers.add_parser(
            "expected-det", parents=[common], help="E[det^alpha] under the uniform distribution",
            description="Expectation of det(D)^alpha for D uniform on the state space."
        )
        expected.add_argument("--field", required=True, choices=FIELDS)
        expected.add_argument("--n", required=True, type=int, help="matrix order")
        expected.add_argument("--alpha", required=True, type=float)
        expected.set_defaults(handler=self.expected_det)

    def volume(self, args) -> str:

        field = ScalarField.parse(args.field)
        vol = volume_lebesgue(field, args.n)

        record = {
            "field": field.name,
            "n": args.n,
            "coeff_num": vol.coeff.numerator,
            "coeff_den": vol.coeff.denominator,
            "pi_pow": vol.pi_pow,
            "decimal": vol.decimal(args.digits),
        }

        if args.format == "json":
            return to_json(record)

        if args.format == "csv":
            return render([record], VOLUME_COLUMNS, "csv", args.digits)

        if vol.is_rational:
            return vol.to_text()

        return f"{vol.to_text()} ≈ {vol.decimal(args.digits)}"

    def expected_det(self, args) -> str:

        field = ScalarField.parse(args.field)
        value = expected_det_alpha(field, args.n, args.alpha)
        exact = expected_det_alpha_exact(field, args.n, args.alpha)

        record = {
            "field": field.name,
            "n": args.n,
            "alpha": args.alpha,
            "value": value,
            "exact": None if exact is None else str(exact),
        }

        if args.format == "json":
            return to_json(record)

        if args.format == "csv":
            return render([record], EXPECTED_DET_COLUMNS, "csv", args.digits)

        txt = format_number(value, args.digits)
        if exact is not None and exact.denominator != 1:
            txt += f" ({exact})"
        return txt


def setup(pool: StateVolPool):
    pool.add_command_group(VolumeCommands(pool))
