"""Built-in vortex configurations: regular polygons with an optional center.

Vertices sit on the unit circle at e^{2 pi i k / m}, counter-clockwise, with
unit circulation each; the center vortex comes last and carries the free
parameter gamma.  Choosing gamma equal to minus the vertex count switches the
total circulation to zero and with it the reduction regime; gamma = 0 is
rejected because every vortex must have nonzero circulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Circulations
from .dynamics import moment_map, relative_coordinates
from .errors import ExcludedParameter, UnsupportedScenario
from .hamiltonian import VortexConfiguration

KINDS = (
    "equilateral3",
    "triangle-with-center",
    "square-with-center",
    "polygon-with-center",
    "custom",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    positions: tuple[complex, ...]
    circ: Circulations
    free_parameter: float | None = None

    @property
    def configuration(self) -> VortexConfiguration:
        return VortexConfiguration(self.positions, self.circ)


def _polygon_vertices(m: int) -> list[complex]:
    return [complex(np.exp(2j * np.pi * k / m)) for k in range(m)]


def _circulations(gammas: tuple[float, ...]) -> Circulations:
    try:
        return Circulations(tuple(float(g) for g in gammas))
    except ValueError as exc:
        raise ExcludedParameter(str(exc)) from exc


def build_scenario(
    kind: str,
    gamma: float | None = None,
    m: int | None = None,
    circulations: tuple[float, ...] | None = None,
    positions: tuple[complex, ...] | None = None,
) -> Scenario:
    """Construct one of the named configurations or a custom one."""
    if kind == "equilateral3":
        circs = circulations if circulations is not None else (1.0, 1.0, 1.0)
        if len(circs) != 3:
            raise UnsupportedScenario("equilateral3 takes exactly 3 circulations")
        return Scenario(
            name=kind,
            positions=tuple(_polygon_vertices(3)),
            circ=_circulations(circs),
        )
    if kind == "triangle-with-center":
        return _polygon_with_center(kind, 3, gamma)
    if kind == "square-with-center":
        return _polygon_with_center(kind, 4, gamma)
    if kind == "polygon-with-center":
        if m is None or m < 2:
            raise UnsupportedScenario("polygon-with-center needs m >= 2")
        return _polygon_with_center(f"{kind}-{m}", int(m), gamma)
    if kind == "custom":
        if positions is None or circulations is None:
            raise UnsupportedScenario("custom needs explicit positions and circulations")
        if len(positions) != len(circulations):
            raise UnsupportedScenario("positions and circulations must have equal length")
        return Scenario(
            name=kind,
            positions=tuple(complex(p) for p in positions),
            circ=_circulations(circulations),
        )
    raise UnsupportedScenario(f"unknown scenario kind {kind!r} (choose from {KINDS})")


def _polygon_with_center(name: str, m: int, gamma: float | None) -> Scenario:
    if gamma is None:
        raise UnsupportedScenario(f"{name} needs a gamma value for the center vortex")
    gamma = float(gamma)
    if gamma == 0.0:
        raise ExcludedParameter("center circulation gamma = 0 is excluded")
    return Scenario(
        name=name,
        positions=tuple(_polygon_vertices(m)) + (0j,),
        circ=_circulations((1.0,) * m + (gamma,)),
        free_parameter=gamma,
    )


def scenario_fixed_point(scenario: Scenario):
    """Reduced-space point mu0 = J(z) of the scenario geometry."""
    return moment_map(relative_coordinates(scenario.configuration))
