# -*- coding: utf-8 -*-
from __future__ import annotations

import io
from typing import TYPE_CHECKING

import humanize
import numpy as np

from utils.others import CommandArgparse, CommandGroup, dump_rows, format_number, render, to_json
from utils.statespace.errors import DomainError
from utils.statespace.metrics import monotone_functional, pullback_functional, resolve_admissible, resolve_monotone
from utils.statespace.models import ScalarField
from utils.statespace.sampling import (
    RngStream, estimate_functional_mc, estimate_volume_mc, flatten_samples, nested_samples, run_streams,
    sample_columns, sample_states,
)

if TYPE_CHECKING:
    from utils.client import StateVolPool

FIELDS = [f.name for f in ScalarField]


class SamplingCommands(CommandGroup):

    name = "sampling"

    def register(self, subparsers, common: CommandArgparse):

        sample = subparsers.add_parser(
            "sample", parents=[common], help="exact uniform draws from the state space",
            description="Draw states uniformly (Lebesgue measure); output is CSV unless --format json."
        )
        sample.add_argument("--field", required=True, choices=FIELDS)
        sample.add_argument("--n", required=True, type=int, help="matrix order")
        sample.add_argument("--count", required=True, type=int)
        sample.add_argument("--seed", type=int, default=self.config["SEED"])
        sample.set_defaults(handler=self.sample)

        estimate = subparsers.add_parser(
            "estimate", parents=[common], help="Monte Carlo volume estimates",
            description="Rejection estimate of the Lebesgue volume, or V_Leb * E[sqrt det g] for a metric."
        )
        estimate.add_argument("--field", required=True, choices=FIELDS)
        estimate.add_argument("--n", required=True, type=int, help="matrix order")
        estimate.add_argument("--samples", required=True, type=int)
        estimate.add_argument("--seed", type=int, default=self.config["SEED"])
        metric = estimate.add_mutually_exclusive_group()
        metric.add_argument("--metric", help="monotone metric id (sld, km, alpha:0.25, ...)")
        metric.add_argument("--pullback", help="pull-back metric id (identity, log, power:P)")
        estimate.set_defaults(handler=self.estimate)

    def sample(self, args) -> str:

        field = ScalarField.parse(args.field)

        if args.count < 1:
            raise DomainError(f"--count must be >= 1, got {args.count}")

        def worker(g: np.random.Generator, count: int) -> np.ndarray:
            if not count:
                return np.zeros((0, args.n, args.n, field.d))
            return sample_states(field, args.n, count, g)

        comps = np.concatenate(run_streams(worker, RngStream(args.seed), args.count, args.threads))

        if args.format == "json":
            return to_json({
                "field": field.name,
                "n": args.n,
                "count": args.count,
                "seed": args.seed,
                "threads": args.threads,
                "columns": sample_columns(field, args.n),
                "samples": nested_samples(field, comps),
            })

        stream = io.StringIO()
        dump_rows(flatten_samples(field, comps), sample_columns(field, args.n), stream)
        return stream.getvalue()

    def estimate(self, args) -> str:

        field = ScalarField.parse(args.field)
        rng = RngStream(args.seed)
        batch_size = self.config["MC_BATCH_SIZE"]

        if args.metric or args.pullback:
            if args.metric:
                functional = monotone_functional(field, resolve_monotone(args.metric))
            else:
                functional = pullback_functional(field, resolve_admissible(args.pullback))
            result = estimate_functional_mc(
                field, args.n, args.samples, functional, rng, threads=args.threads, batch_size=batch_size,
                nonfinite_warn_fraction=self.config["NONFINITE_WARN_FRACTION"]
            )
        else:
            result = estimate_volume_mc(field, args.n, args.samples, rng, threads=args.threads,
                                        batch_size=batch_size)

        data = result.to_dict()

        if args.format == "json":
            return to_json(data)

        if args.format == "csv":
            return render([data], list(data), "csv", args.digits)

        txt = (f"{format_number(result.value, args.digits)} ± {format_number(result.std_error, 3)} "
               f"({humanize.intcomma(result.n_samples)} samples")
        if result.n_accepted is not None:
            txt += f", {humanize.intcomma(result.n_accepted)} accepted"
        txt += f", seed {result.seed}, {result.streams} stream{'s' if result.streams != 1 else ''})"
        if result.flags:
            txt += f" [{', '.join(result.flags)}]"
        return txt


def setup(pool: StateVolPool):
    pool.add_command_group(SamplingCommands(pool))
