#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import math

import numpy as np

# |z B| below which the stationary density is treated as flat.
ZERO_DRIFT_TOLERANCE = 1e-12


def standalone_llr_closed_form(
    lambda_on: float,
    lambda_off: float,
    r_on: float,
    r_off: float,
    B: float,
) -> float:
    """Exact standalone LLR of one agent driven by a two-state on/off chain.

    The chain switches off->on at rate `lambda_on` and on->off at rate
    `lambda_off`; the battery fills at `r_on` > 0 and drains at `r_off` < 0.
    On (0, B) level crossings balance, so the off density is r_on / |r_off|
    times the on density and both grow like exp(z x) with

        z = (r_on * lambda_on - |r_off| * lambda_off) / (r_on * |r_off|).

    The atoms at 0 (off) and B (on) follow from the flux at each boundary,
    and the lost load is |r_off| times the mass of the empty atom. When z
    vanishes the densities are flat.

    Args:
        lambda_on: Rate of off->on transitions.
        lambda_off: Rate of on->off transitions.
        r_on: Net generation in the on state (> 0).
        r_off: Net generation in the off state (< 0).
        B: Battery capacity (> 0).

    Returns:
        float: The long-run loss of load rate.
    """
    if not (lambda_on > 0 and lambda_off > 0):
        raise ValueError(f"switching rates must be > 0, got ({lambda_on:g}, {lambda_off:g})")
    if not (r_on > 0 > r_off):
        raise ValueError(f"expected r_on > 0 > r_off, got ({r_on:g}, {r_off:g})")
    if not B > 0:
        raise ValueError(f"capacity must be > 0, got {B:g}")

    a, d = r_on, -r_off
    alpha, beta = lambda_off, lambda_on
    z = (a * beta - d * alpha) / (a * d)
    zb = z * B

    # LLR = a d / (alpha + beta) / (I + a exp(zB) / alpha), I = integral of exp(zx)
    # on [0, B]. For z > 0 numerator and denominator are scaled by exp(-zB).
    scale = a * d / (alpha + beta)
    if abs(zb) < ZERO_DRIFT_TOLERANCE:
        return float(scale / (B + a / alpha))
    if z > 0:
        return float(scale * math.exp(-zb) / (-np.expm1(-zb) / z + a / alpha))
    return float(scale / (np.expm1(zb) / z + a * math.exp(zb) / alpha))


def mean_drift(lambda_on: float, lambda_off: float, r_on: float, r_off: float) -> float:
    """Stationary mean net generation of the on/off chain."""
    return (lambda_on * r_on + lambda_off * r_off) / (lambda_on + lambda_off)
