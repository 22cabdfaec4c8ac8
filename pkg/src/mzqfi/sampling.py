"""Randomized catalog states for property checks and self-verification."""

from __future__ import annotations

import math

import numpy as np

from .state_catalog import (
    InputStateSpec,
    PortState,
    coherent,
    fock,
    squeezed_coherent,
    squeezed_vacuum,
    tmsv,
    vacuum,
)


def random_port(
    rng: np.random.Generator,
    max_amp: float = 2.0,
    max_squeeze: float = 1.0,
    max_fock: int = 4,
) -> PortState:
    kind = rng.choice(["vacuum", "coherent", "fock", "squeezed_vacuum", "squeezed_coherent"])
    angle = lambda: float(rng.uniform(-math.pi, math.pi))  # noqa: E731
    if kind == "vacuum":
        return vacuum()
    if kind == "coherent":
        return coherent(float(rng.uniform(0.1, max_amp)), angle())
    if kind == "fock":
        return fock(int(rng.integers(0, max_fock + 1)))
    if kind == "squeezed_vacuum":
        return squeezed_vacuum(float(rng.uniform(0.05, max_squeeze)), angle())
    return squeezed_coherent(
        float(rng.uniform(0.1, max_amp)), angle(), float(rng.uniform(0.05, max_squeeze)), angle()
    )


def random_spec(
    rng: np.random.Generator,
    max_amp: float = 2.0,
    max_squeeze: float = 1.0,
    max_fock: int = 4,
    tmsv_fraction: float = 0.15,
) -> InputStateSpec:
    """Draw a catalog state; separable pairs dominate, twin-beam states mixed in."""
    if rng.random() < tmsv_fraction:
        return tmsv(float(rng.uniform(0.1, max_squeeze)), float(rng.uniform(-math.pi, math.pi)))
    return InputStateSpec.separable(
        random_port(rng, max_amp, max_squeeze, max_fock),
        random_port(rng, max_amp, max_squeeze, max_fock),
    )
