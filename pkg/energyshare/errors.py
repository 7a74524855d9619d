#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#


class EnergyShareError(Exception):
    """Base class for all errors raised by energyshare."""

    pass


class ModelError(EnergyShareError, ValueError):
    """A model or sharing configuration is not usable for the requested run."""

    pass


class RateConsistencyError(EnergyShareError):
    """A residual loss or overflow rate came out negative.

    This signals a bug in the sharing rules, never bad user input.
    """

    pass


class EventLoopError(EnergyShareError):
    """The intra-slot event loop exceeded its iteration cap."""

    pass


class TraceError(EnergyShareError, ValueError):
    """A generation trace could not be parsed or is not uniformly spaced."""

    pass


class ConfigError(EnergyShareError):
    """An experiment configuration could not be read or resolved."""

    pass
