# -*- coding: utf-8 -*-
from json import load
from os import environ

import psutil
from dotenv import dotenv_values

from utils.statespace.errors import ConfigError

ENV_PREFIX = "STATEVOL_"

bools = {
    "true": True,
    "false": False,
    "none": None
}

DEFAULT_CONFIG = {
    "THREADS": "1",
    "DIGITS": 10,
    "SEED": 0,
    "FORMAT": "text",

    ###################
    ### Monte Carlo ###
    ###################
    "MC_BATCH_SIZE": 65536,
    "NONFINITE_WARN_FRACTION": 0.001,

    ##################
    ### Quadrature ###
    ##################
    "QUAD_REL_TOL": 1e-10,
    "QUAD_ABS_TOL": 1e-13,
    "QUAD_MAX_LEVEL": 12,
    "DIVERGENCE_THRESHOLD": 0.99,
    "PROBE_AGREEMENT": 0.05,

    ###############
    ### Logging ###
    ###############
    "ENABLE_LOGGER": False,
    "LOG_LEVEL": "WARNING",
}


def _prefixed(values: dict) -> dict:
    return {k[len(ENV_PREFIX):]: v for k, v in values.items() if k.startswith(ENV_PREFIX) and v is not None}


def load_config(environment=None, dotenv_path=None):

    environment = environ if environment is None else environment

    CONFIG = dict(DEFAULT_CONFIG)

    for cfg in list(CONFIG):
        try:
            CONFIG[cfg] = environment[ENV_PREFIX + cfg]
        except KeyError:
            continue

    try:
        with open("config.json") as f:
            CONFIG.update(load(f))
    except FileNotFoundError:
        pass

    try:
        CONFIG.update(_prefixed(dotenv_values(dotenv_path)))
    except OSError:
        pass

    # valores inteiros
    for i in ["DIGITS", "SEED", "MC_BATCH_SIZE", "QUAD_MAX_LEVEL"]:
        try:
            CONFIG[i] = int(CONFIG[i])
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid configuration value! {i}: {CONFIG[i]}")

    for i in ["QUAD_REL_TOL", "QUAD_ABS_TOL", "DIVERGENCE_THRESHOLD", "PROBE_AGREEMENT", "NONFINITE_WARN_FRACTION"]:
        try:
            CONFIG[i] = float(CONFIG[i])
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid configuration value! {i}: {CONFIG[i]}")

    for i in ["ENABLE_LOGGER"]:
        if CONFIG[i] in (True, False, None):
            continue

        try:
            CONFIG[i] = bools[str(CONFIG[i]).lower()]
        except KeyError:
            raise ConfigError(f"Invalid configuration value! {i}: {CONFIG[i]}")

    if str(CONFIG["THREADS"]).lower() == "auto":
        CONFIG["THREADS"] = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    else:
        try:
            CONFIG["THREADS"] = int(CONFIG["THREADS"])
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid configuration value! THREADS: {CONFIG['THREADS']}")
        if CONFIG["THREADS"] < 1:
            raise ConfigError(f"Invalid configuration value! THREADS: {CONFIG['THREADS']}")

    if CONFIG["FORMAT"] not in ("text", "json", "csv"):
        raise ConfigError(f"Invalid configuration value! FORMAT: {CONFIG['FORMAT']}")

    CONFIG["LOG_LEVEL"] = str(CONFIG["LOG_LEVEL"]).upper()

    if CONFIG["DIGITS"] < 3:
        CONFIG["DIGITS"] = 3
    elif CONFIG["DIGITS"] > 17:
        CONFIG["DIGITS"] = 17

    if CONFIG["MC_BATCH_SIZE"] < 1024:
        CONFIG["MC_BATCH_SIZE"] = 1024

    if CONFIG["QUAD_MAX_LEVEL"] < 4:
        CONFIG["QUAD_MAX_LEVEL"] = 4
    elif CONFIG["QUAD_MAX_LEVEL"] > 16:
        CONFIG["QUAD_MAX_LEVEL"] = 16

    return CONFIG
