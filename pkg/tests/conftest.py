# -*- coding: utf-8 -*-
import io
import json
from pathlib import Path

import numpy as np
import pytest

from utils.client import StateVolPool
from utils.statespace.models import ScalarField, SelfAdjointMatrix
from utils.statespace.sampling import RngStream

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def rng():
    return RngStream(20240611).generator()


@pytest.fixture
def golden():

    def load(name: str):
        with open(GOLDEN_DIR / name, encoding="utf-8") as f:
            return json.load(f)

    return load


def random_positive_definite(field: ScalarField, n: int, g: np.random.Generator) -> SelfAdjointMatrix:
    """B B* + n I for a random field-valued B, as a SelfAdjointMatrix."""
    field = ScalarField.parse(field)
    comps = g.standard_normal((n, n, field.d))
    rep = np.einsum('ijc,cab->iajb', comps, field.basis).reshape(n * field.d, n * field.d)
    gram = rep @ rep.T + n * np.eye(n * field.d)
    # left-multiplication matrices keep their first column block as the field components
    out = gram.reshape(n, field.d, n, field.d)[:, :, :, 0].transpose(0, 2, 1)
    return SelfAdjointMatrix(field, out)


@pytest.fixture
def run_cli(tmp_path, monkeypatch):
    """Run the command line in-process; returns (exit code, stdout, stderr)."""
    monkeypatch.chdir(tmp_path)

    def run(*argv, environment=None):
        out, err = io.StringIO(), io.StringIO()
        pool = StateVolPool(stdout=out, stderr=err, environment=environment or {})
        code = pool.setup(list(argv))
        return code, out.getvalue(), err.getvalue()

    return run
