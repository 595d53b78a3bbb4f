# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from utils.statespace.errors import parse_error

if TYPE_CHECKING:
    from utils.client import StateVolPool

logger = logging.getLogger(__name__)


class ErrorHandler:

    def __init__(self, pool: StateVolPool):
        self.pool = pool

    def __call__(self, error: Exception) -> int:
        return self.on_command_error(error)

    def on_command_error(self, error: Exception) -> int:

        error_msg, full_error_msg, exit_code = parse_error(error)

        if not error_msg:
            logger.error("unexpected error:\n%s", full_error_msg)
            self.pool.err.write(f"statevol: unexpected error\n{full_error_msg}")
            return exit_code

        logger.debug("command failed with exit code %d: %s", exit_code, error_msg)
        self.pool.err.write(f"statevol: {error_msg}\n")
        return exit_code


def setup(pool: StateVolPool):
    pool.error_handler = ErrorHandler(pool)
