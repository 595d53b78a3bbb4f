# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import os
import sys
from importlib import import_module
from typing import Callable, Dict, List, Optional, Sequence

from config_loader import load_config
from utils.others import FORMATS, CommandArgparse, CommandGroup
from utils.statespace.errors import parse_error

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s %(message)s'


class StateVolPool:

    def __init__(self, *, stdout=None, stderr=None, environment: Optional[dict] = None):
        self.config = {}
        self.environment = environment
        self.stdout = stdout
        self.stderr = stderr
        self.command_groups: Dict[str, CommandGroup] = {}
        self.error_handler: Optional[Callable[[Exception], int]] = None
        self.parser: Optional[CommandArgparse] = None
        self.handlers: List[logging.Handler] = []

    @property
    def out(self):
        return self.stdout or sys.stdout

    @property
    def err(self):
        return self.stderr or sys.stderr

    def setup_logging(self):

        root = logging.getLogger()

        for handler in self.handlers:
            root.removeHandler(handler)
        self.handlers.clear()

        handler = logging.StreamHandler(self.err)
        handler.setLevel(getattr(logging, self.config["LOG_LEVEL"], logging.WARNING))
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self.handlers.append(handler)

        if self.config['ENABLE_LOGGER']:

            if not os.path.isdir("./.logs"):
                os.makedirs("./.logs")

            file_handler = logging.FileHandler(filename='./.logs/statevol.log', encoding='utf-8', mode='w')
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            self.handlers.append(file_handler)

        root.setLevel(min(h.level for h in self.handlers))
        for h in self.handlers:
            root.addHandler(h)

    def add_command_group(self, group: CommandGroup):
        self.command_groups[group.name] = group

    def load_modules(self):

        modules_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "modules")

        load_status = {
            "loaded": [],
        }

        for file in sorted(os.listdir(modules_dir)):
            if not file.endswith('.py') or file.startswith('_'):
                continue
            filename, _ = os.path.splitext(file)
            try:
                module = import_module(f"modules.{filename}")
                module.setup(self)
            except Exception:
                logger.error(f"{'=' * 48}\n[ERRO] Failed to load module: {filename}")
                raise
            logger.debug(f"{'=' * 48}\n[OK] {filename}.py loaded.")
            load_status["loaded"].append(f"{filename}.py")

        return load_status

    def common_options(self) -> CommandArgparse:
        common = CommandArgparse()
        common.add_argument("--format", choices=FORMATS, default=self.config["FORMAT"],
                            help="output format (default: %(default)s)")
        common.add_argument("--digits", type=int, default=self.config["DIGITS"],
                            help="significant digits of printed numbers (default: %(default)s)")
        common.add_argument("--threads", type=int, default=self.config["THREADS"],
                            help="worker streams; part of the reproducibility contract (default: %(default)s)")
        return common

    def build_parser(self) -> CommandArgparse:
        parser = CommandArgparse(
            prog="statevol", add_help=True,
            description="Volumes of real, complex and quaternionic quantum state spaces."
        )
        subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CommandArgparse)
        common = self.common_options()
        for name in sorted(self.command_groups):
            self.command_groups[name].register(subparsers, common)
        self.parser = parser
        return parser

    def handle_error(self, error: Exception) -> int:

        if self.error_handler:
            return self.error_handler(error)

        error_txt, full_error_txt, exit_code = parse_error(error)
        self.err.write(f"statevol: {error_txt}\n" if error_txt else full_error_txt)
        return exit_code

    def run(self, argv: Optional[Sequence[str]] = None) -> int:

        args = self.parser.parse_args(argv)

        if args.digits < 1:
            args.digits = 1
        if args.threads < 1:
            self.parser.error(f"--threads must be >= 1, got {args.threads}")

        output = args.handler(args)
        if output:
            self.out.write(output if output.endswith("\n") else output + "\n")
        return 0

    def setup(self, argv: Optional[Sequence[str]] = None) -> int:

        try:
            self.config = load_config(self.environment)
            self.setup_logging()
            if not self.command_groups:
                self.load_modules()
            self.build_parser()
            return self.run(argv)
        except Exception as e:
            return self.handle_error(e)
