"""Analysis orchestration and serialized reports.

Reports hold only JSON-native values (lists, floats, strings) so that a
serialize/parse round trip reproduces an equal object bit for bit.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .algebra import flatten
from .dynamics import integrate, invariant_drift_report
from .errors import ExcludedParameter, NotAFixedPoint, VortexStabError
from .scenarios import Scenario, build_scenario, scenario_fixed_point
from .stability import energy_casimir_certificate, is_fixed_point

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("vortexstab")
except Exception:
    VERSION = "unknown"


@dataclass
class AnalysisReport:
    scenario_name: str
    positions: list[list[float]]
    circulations: list[float]
    free_parameter: float | None
    regime: str
    casimir_subset: list[int]
    rng_seed: int
    fixed_point: list[float]
    fixed_point_residual: float
    spectrum: list[list[float]]
    verdict: str
    reason: str
    multipliers: dict | None
    minors: list[float] | None
    restricted_hessian: list[list[float]] | None
    drift: dict | None = None
    version: str = VERSION


def analyze(
    scenario: Scenario,
    casimir_subset=(1,),
    rng_seed: int = 0,
    with_drift: bool = False,
    drift_t_end: float = 5.0,
    drift_dt: float = 1e-3,
) -> AnalysisReport:
    """Fixed point, spectrum, and stability certificate for a scenario."""
    mu0 = scenario_fixed_point(scenario)
    circ = scenario.circ
    check = is_fixed_point(mu0, circ)
    if not check.ok:
        raise NotAFixedPoint(
            f"scenario {scenario.name} is not a relative equilibrium "
            f"(residual {check.residual:.3e})"
        )
    res = energy_casimir_certificate(mu0, circ, casimir_subset, rng_seed=rng_seed)
    mult = None
    if res.multipliers is not None:
        mult = {
            "a0": res.multipliers.a0,
            "a": list(res.multipliers.a),
            "b": list(res.multipliers.b),
            "c": list(res.multipliers.c),
            "d": list(res.multipliers.d),
            "residual": res.multipliers.residual,
            "solution_space_dim": res.multipliers.solution_space_dim,
        }
    drift = None
    if with_drift:
        traj = integrate(flatten(mu0), circ, t_end=drift_t_end, dt=drift_dt)
        rep = invariant_drift_report(traj)
        drift = {
            "hamiltonian_max": rep.hamiltonian_max,
            "casimir_max": [float(x) for x in rep.casimir_max],
            "residual_max": rep.residual_max,
            "t_end": drift_t_end,
            "dt": drift_dt,
        }
    return AnalysisReport(
        scenario_name=scenario.name,
        positions=[[p.real, p.imag] for p in scenario.positions],
        circulations=list(circ.gammas),
        free_parameter=scenario.free_parameter,
        regime=circ.regime.name,
        casimir_subset=list(casimir_subset),
        rng_seed=rng_seed,
        fixed_point=[float(x) for x in flatten(mu0)],
        fixed_point_residual=check.residual,
        spectrum=[[float(z.real), float(z.imag)] for z in res.spectrum],
        verdict=res.verdict.value,
        reason=res.reason,
        multipliers=mult,
        minors=None if res.minors is None else [float(m) for m in res.minors],
        restricted_hessian=(
            None
            if res.restricted_hessian is None
            else [[float(x) for x in row] for row in res.restricted_hessian]
        ),
        drift=drift,
    )


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(asdict(report), indent=2)


def report_from_json(text: str) -> AnalysisReport:
    return AnalysisReport(**json.loads(text))


@dataclass
class SweepRow:
    gamma: float
    verdict: str
    max_real_part: float | None
    minors: list[float] | None
    note: str = ""


@dataclass
class SweepTable:
    kind: str
    rows: list[SweepRow]
    skipped: list[dict] = field(default_factory=list)


def _sweep_point(kind: str, gamma: float, m: int | None, casimir_subset) -> SweepRow:
    try:
        scen = build_scenario(kind, gamma=gamma, m=m)
        rep = analyze(scen, casimir_subset=casimir_subset)
        max_re = max(re for re, _ in rep.spectrum)
        return SweepRow(
            gamma=gamma, verdict=rep.verdict, max_real_part=max_re, minors=rep.minors
        )
    except VortexStabError as exc:
        return SweepRow(
            gamma=gamma,
            verdict="error",
            max_real_part=None,
            minors=None,
            note=f"{type(exc).__name__}: {exc}",
        )


def gamma_sweep(
    kind: str,
    gamma_min: float,
    gamma_max: float,
    step: float,
    m: int | None = None,
    casimir_subset=(1,),
    max_workers: int = 8,
) -> SweepTable:
    """Certificate verdict at each grid point of the center circulation.

    Excluded parameter values (gamma = 0) are skipped and recorded aside;
    other per-point failures appear inline as rows with verdict ``error``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    gammas = []
    skipped = []
    g = gamma_min
    while g <= gamma_max + 1e-12 * max(1.0, abs(gamma_max)):
        gamma = round(g, 12)
        try:
            build_scenario(kind, gamma=gamma, m=m)
            gammas.append(gamma)
        except ExcludedParameter as exc:
            skipped.append({"gamma": gamma, "note": str(exc)})
        g += step
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(lambda g: _sweep_point(kind, g, m, casimir_subset), gammas))
    return SweepTable(kind=kind, rows=rows, skipped=skipped)


SWEEP_CSV_HEADER = ["gamma", "verdict", "max_real_part", "minors", "note"]


def sweep_to_csv(table: SweepTable) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in table.rows:
        writer.writerow(
            [
                repr(row.gamma),
                row.verdict,
                "" if row.max_real_part is None else repr(row.max_real_part),
                "" if row.minors is None else ";".join(repr(m) for m in row.minors),
                row.note,
            ]
        )
    return buf.getvalue()


def emit(obj, fmt: str, path: str) -> None:
    """Write a report or sweep table to disk as json or csv."""
    if fmt == "json":
        if isinstance(obj, AnalysisReport):
            text = report_to_json(obj)
        else:
            text = json.dumps(asdict(obj), indent=2)
    elif fmt == "csv":
        if not isinstance(obj, SweepTable):
            raise ValueError("csv output is only defined for sweep tables")
        text = sweep_to_csv(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)
