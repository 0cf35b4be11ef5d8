"""Homeostatic growth material point model."""

import json
import os

from ._homeo import (
    DegenerateMaterial,
    InvalidInput,
    NumericalError,
    ParseError,
    moduli_text,
    run_cli,
    simulate_text,
    verify,
)

__all__ = [
    "DegenerateMaterial",
    "InvalidInput",
    "NumericalError",
    "ParseError",
    "moduli",
    "run_cli",
    "simulate",
    "verify",
]


def _weights_json(weights):
    if isinstance(weights, dict):
        return json.dumps(weights)
    with open(os.fspath(weights), encoding="utf-8") as f:
        return f.read()


def moduli(weights):
    """Linearized moduli of a weights dict or weights JSON file."""
    return moduli_text(_weights_json(weights))


def simulate(weights, protocol):
    """Simulate a protocol CSV file; returns time_h, stress, gamma_hat and phi_hat lists."""
    with open(os.fspath(protocol), encoding="utf-8") as f:
        return simulate_text(_weights_json(weights), f.read())
