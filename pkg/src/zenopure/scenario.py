"""
Scenario files: INI-style key/value text describing one run.

Schema
------
::

    [scenario]
    name = fig2a                 ; required
    description = free text      ; optional
    n_steps = 20                 ; required, integer >= 1
    tau = pi_over_2delta         ; number | pi_over_2delta | zeta_over_sqrt2 | optimize

    [model]
    topology = single_pair       ; single_pair | chain | star
    frequencies = 5, 6           ; X, A, B, ...
    couplings = 1                ; X-A, A-B (chain) or X-A, X-B (star)

    [probe]
    theta = 0                    ; numbers may use pi, e.g. pi/2 or 0.5*pi
    phi = 0                      ; optional, default 0

    [initial]
    preset = maximally_mixed_a   ; thermal | product | maximally_mixed_a
    x_state = up                 ; maximally_mixed_a only (default up)
    beta = 1                     ; thermal only
    states = right, up, down     ; product only, one label per qubit

    [optimize]                   ; required iff tau = optimize
    start = 0.001
    stop = 3
    step = 0.001

    [outputs]                    ; optional file names, relative to --out
    trace_csv = fig2a_trace.csv
    spectrum_csv = fig2a_spectrum.csv

Derived times are symbolic: ``pi_over_2delta`` is pi / (2 delta) for the
single pair and ``zeta_over_sqrt2`` is zeta / (sqrt2 gbar) for three-qubit
models, which is zeta / sqrt2 in units where gbar = 1.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Union

from .closed_forms import single_delta, zeta_angle
from .errors import InvalidSpec, ParseError, ValidationError
from .protocols import InitialPreset, RunConfig, TauGrid, optimize_tau
from .qubits import HamiltonianSpec, ProbeState, Topology

TAU_PRESETS = ("pi_over_2delta", "zeta_over_sqrt2", "optimize")

_SCHEMA: Dict[str, Dict[str, bool]] = {
    # section -> key -> required
    "scenario": {"name": True, "description": False, "n_steps": True, "tau": True},
    "model": {"topology": True, "frequencies": True, "couplings": True},
    "probe": {"theta": True, "phi": False},
    "initial": {"preset": True, "x_state": False, "beta": False, "states": False},
    "optimize": {"start": True, "stop": True, "step": True},
    "outputs": {"trace_csv": False, "spectrum_csv": False},
}
_REQUIRED_SECTIONS = ("scenario", "model", "probe", "initial")

_TOKEN = re.compile(r"^\s*([+-]?)\s*(pi|[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*$")


def parse_number(text: str) -> float:
    """
    Parse a real number that may contain ``pi``, ``*`` and ``/``.

    >>> parse_number("pi/2") == math.pi / 2
    True
    >>> parse_number("-0.5*pi") == -0.5 * math.pi
    True
    """
    parts = re.split(r"([*/])", text.strip())
    if not parts or parts == [""]:
        raise ValueError("empty number")
    value = None
    op = "*"
    for i, part in enumerate(parts):
        if i % 2:
            op = part
            continue
        m = _TOKEN.match(part)
        if not m:
            raise ValueError(f"cannot parse {text!r} as a number")
        sign, body = m.groups()
        x = math.pi if body == "pi" else float(body)
        if sign == "-":
            x = -x
        if value is None:
            value = x
        elif op == "*":
            value *= x
        else:
            value /= x
    return float(value)


def parse_grid(text: str) -> TauGrid:
    """Parse ``start:stop:step``."""
    pieces = text.split(":")
    if len(pieces) != 3:
        raise ValidationError(f"grid must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (parse_number(p) for p in pieces)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    return TauGrid(start, stop, step)


@dataclass(frozen=True)
class ScenarioFile:
    name: str
    hamiltonian: HamiltonianSpec
    probe: ProbeState
    tau_mode: str
    tau: Optional[float]
    initial: InitialPreset
    n_steps: int
    grid: Optional[TauGrid] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    description: str = ""
    source: str = ""

    @property
    def needs_optimization(self) -> bool:
        return self.tau_mode == "optimize"

    def run_config(self, tau: Optional[float] = None) -> RunConfig:
        if tau is None:
            tau = self.tau
        if tau is None:
            tau = optimize_tau(self.hamiltonian, self.probe, self.grid).tau
        return RunConfig(self.hamiltonian, self.probe, tau, self.n_steps, self.initial)


def _resolve_tau(mode: str, spec: HamiltonianSpec) -> float:
    if mode == "pi_over_2delta":
        if spec.topology is not Topology.SINGLE_PAIR:
            raise ValidationError("tau = pi_over_2delta needs the single_pair topology")
        om_x, om_a = spec.frequencies
        return math.pi / (2 * single_delta(om_x, om_a, spec.couplings[0]))
    if mode == "zeta_over_sqrt2":
        if spec.n_qubits != 3:
            raise ValidationError("tau = zeta_over_sqrt2 needs a three-qubit model")
        g1, g2 = spec.couplings
        return zeta_angle(g1, g2) / (math.sqrt(2) * spec.gbar)
    raise AssertionError(mode)


def _floats(text: str) -> List[float]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_scenario(text: str, source: str = "<string>") -> ScenarioFile:
    cp = configparser.ConfigParser(
        inline_comment_prefixes=(";", "#"),
        interpolation=None,
        default_section="__none__",
    )
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from None

    problems: List[str] = []
    for sec in cp.sections():
        if sec not in _SCHEMA:
            problems.append(f"unknown section [{sec}]")
            continue
        for key in cp[sec]:
            if key not in _SCHEMA[sec]:
                problems.append(f"[{sec}] unknown key {key!r}")
        for key, required in _SCHEMA[sec].items():
            if required and key not in cp[sec]:
                problems.append(f"[{sec}] missing key {key!r}")
    for sec in _REQUIRED_SECTIONS:
        if sec not in cp:
            problems.append(f"missing section [{sec}]")
    if problems:
        raise ValidationError([f"{source}: {p}" for p in problems])

    def num(sec, key, default=None):
        if key not in cp[sec]:
            return default
        try:
            return parse_number(cp[sec][key])
        except ValueError as exc:
            problems.append(f"[{sec}] {key}: {exc}")
            return default

    sc = cp["scenario"]
    name = sc["name"].strip()
    if not name:
        problems.append("[scenario] name must not be empty")

    n_steps_raw = sc["n_steps"].strip()
    n_steps = 0
    if not re.fullmatch(r"\d+", n_steps_raw) or int(n_steps_raw) < 1:
        problems.append(f"[scenario] n_steps must be an integer >= 1, got {n_steps_raw!r}")
    else:
        n_steps = int(n_steps_raw)

    hamiltonian = None
    try:
        hamiltonian = HamiltonianSpec(
            cp["model"]["topology"].strip(),
            _floats(cp["model"]["frequencies"]),
            _floats(cp["model"]["couplings"]),
        )
    except (InvalidSpec, ValueError) as exc:
        problems.append(f"[model] {exc}")

    probe = None
    theta = num("probe", "theta")
    phi = num("probe", "phi", 0.0)
    if theta is not None:
        try:
            probe = ProbeState(theta, phi)
        except InvalidSpec as exc:
            problems.append(f"[probe] {exc}")

    ini = cp["initial"]
    initial = None
    try:
        kind = ini["preset"].strip()
        kwargs = {}
        if "beta" in ini:
            kwargs["beta"] = parse_number(ini["beta"])
        if "states" in ini:
            kwargs["labels"] = tuple(s.strip() for s in ini["states"].split(",") if s.strip())
        if "x_state" in ini:
            kwargs["x_state"] = ini["x_state"].strip()
        initial = InitialPreset(kind, **kwargs)
    except (ValidationError, ValueError) as exc:
        problems.append(f"[initial] {exc}")

    tau_text = sc["tau"].strip()
    tau_mode, tau, grid = "value", None, None
    if tau_text in TAU_PRESETS:
        tau_mode = tau_text
    else:
        try:
            tau = parse_number(tau_text)
        except ValueError as exc:
            problems.append(f"[scenario] tau: {exc}")
        else:
            if not (math.isfinite(tau) and tau > 0):
                problems.append(f"[scenario] tau must be positive, got {tau_text!r}")
    if tau_mode == "optimize":
        if "optimize" not in cp:
            problems.append("tau = optimize needs an [optimize] section")
        else:
            start, stop, step = (num("optimize", k) for k in ("start", "stop", "step"))
            if None not in (start, stop, step):
                try:
                    grid = TauGrid(start, stop, step)
                except ValidationError as exc:
                    problems.append(f"[optimize] {exc}")
                else:
                    if start <= 0:
                        problems.append("[optimize] start must be positive")
    elif "optimize" in cp:
        problems.append("[optimize] section given but tau is not 'optimize'")

    if problems:
        raise ValidationError([f"{source}: {p}" for p in problems])

    if tau_mode in ("pi_over_2delta", "zeta_over_sqrt2"):
        try:
            tau = _resolve_tau(tau_mode, hamiltonian)
        except ValidationError as exc:
            raise ValidationError([f"{source}: {p}" for p in exc.problems]) from None

    outputs = dict(cp["outputs"]) if "outputs" in cp else {}
    scn = ScenarioFile(
        name=name,
        hamiltonian=hamiltonian,
        probe=probe,
        tau_mode=tau_mode,
        tau=tau,
        initial=initial,
        n_steps=n_steps,
        grid=grid,
        outputs={k: v.strip() for k, v in outputs.items()},
        description=sc.get("description", "").strip(),
        source=source,
    )
    # presets that only fail against the model (e.g. label count) surface here
    try:
        scn.initial.resolve(scn.hamiltonian)
        if tau is not None:
            scn.run_config()
    except ValidationError as exc:
        raise ValidationError([f"{source}: {p}" for p in exc.problems]) from None
    return scn


def bundled_names() -> List[str]:
    root = resources.files("zenopure.scenarios")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_scenario(path_or_name: Union[str, Path]) -> ScenarioFile:
    """Load a scenario from a file path, or by name from the bundled set."""
    p = Path(path_or_name)
    if p.is_file():
        return parse_scenario(p.read_text(encoding="utf-8"), source=str(p))
    name = str(path_or_name)
    if name in bundled_names():
        res = resources.files("zenopure.scenarios") / f"{name}.ini"
        return parse_scenario(res.read_text(encoding="utf-8"), source=f"<bundled:{name}>")
    raise ValidationError(
        f"no scenario file or bundled scenario named {name!r} (bundled: {', '.join(bundled_names())})"
    )
