"""Python access to the rnpm library: performance formulas, repeater chains,
optimizer, distillation and the command runners behind the CLI."""

import json as _json

from ._core import (
    ChainResult,
    DetectorKind,
    OptimumRecord,
    PerfPoint,
    RecurrenceResult,
    binary_entropy,
    chain_closed_form,
    chain_recursive,
    direct_transmission_time,
    key_rate,
    optimize_chain,
    performance,
    performance_oracle,
    recurrence_oracle,
    recurrence_step,
    simulate_waiting_time,
)
from ._core import run_command as _run_command


class CommandError(RuntimeError):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def run(command, config, fmt="csv", threads=0):
    """Run a CLI subcommand on a configuration (dict or JSON text).

    Returns the command output as text. Raises CommandError carrying the
    CLI exit code when the command fails.
    """
    text = config if isinstance(config, str) else _json.dumps(config)
    code, out, err = _run_command(command, text, fmt, threads)
    if code != 0:
        raise CommandError(code, err.strip())
    return out


__all__ = [
    "ChainResult",
    "CommandError",
    "DetectorKind",
    "OptimumRecord",
    "PerfPoint",
    "RecurrenceResult",
    "binary_entropy",
    "chain_closed_form",
    "chain_recursive",
    "direct_transmission_time",
    "key_rate",
    "optimize_chain",
    "performance",
    "performance_oracle",
    "recurrence_oracle",
    "recurrence_step",
    "run",
    "simulate_waiting_time",
]
