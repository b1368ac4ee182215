"""Command-line interface.

    qfi-probe curves      QFI per channel use, closed form next to the SLD oracle
    qfi-probe thresholds  B-vs-O crossing points and the ancilla-depolarization bound
    qfi-probe partial     partially entangled probes and the O <= J <= E sandwich
    qfi-probe crb         Monte Carlo MLE against the Cramer-Rao bound

Settings come from built-in defaults, then an optional ``--config`` file of
``key=value`` lines, then command-line flags. The seed falls back to the
``QFI_PROBE_SEED`` environment variable when neither file nor flag sets it.
Exit codes: 0 success, 2 bad configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .channels import SchemeSpec, family
from .closed_form import g_eta, j_e, j_o, qfi_scheme, threshold_b_vs_o
from .errors import InvalidInput, NumericalError
from .oracle import crb_experiment, qfi_numeric
from .partial import qfi_partial, random_psi

SEED_ENV = "QFI_PROBE_SEED"
THETA_MIN, THETA_MAX = 0.01, 0.99
SANDWICH_SLACK = 1e-9

COMMANDS = ("curves", "thresholds", "partial", "crb")

DEFAULTS = {
    "curves": dict(d="2,3,4,5", theta_start=0.1, theta_stop=0.9, theta_step=0.1,
                   schemes="O,E,B", n="1", eta="0.9"),
    "thresholds": dict(d="2,3,4,5,6,7,8,9,10", eta="0.7,0.8,0.9,1"),
    "partial": dict(d="3", theta_start=0.1, theta_stop=0.9, theta_step=0.2),
    "crb": dict(d="2", theta_start=0.5, theta_stop=0.5, theta_step=0.1, schemes="E,O",
                n="1", eta="0.9", shots=100000, trials=400),
}
COMMON = dict(d="2", theta_start=0.1, theta_stop=0.9, theta_step=0.1, schemes="",
              n="1", eta="", psi="", samples=0, seed=None, out="-", shots=100000, trials=400)


class ConfigError(InvalidInput):
    pass


@dataclass
class RunConfig:
    command: str
    d: list = field(default_factory=list)
    theta_start: float = 0.1
    theta_stop: float = 0.9
    theta_step: float = 0.1
    schemes: list = field(default_factory=list)
    n: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    psi: list = field(default_factory=list)
    samples: int = 0
    seed: int = 0
    out: str = "-"
    shots: int = 100000
    trials: int = 400

    def thetas(self) -> list[float]:
        if self.theta_step <= 0:
            raise ConfigError("theta-step must be positive")
        if self.theta_stop < self.theta_start:
            raise ConfigError("theta-stop is below theta-start")
        count = int(math.floor((self.theta_stop - self.theta_start) / self.theta_step + 1e-9)) + 1
        grid = [round(self.theta_start + k * self.theta_step, 12) for k in range(count)]
        if grid[0] < THETA_MIN or grid[-1] > THETA_MAX:
            raise ConfigError(f"theta grid must lie within [{THETA_MIN}, {THETA_MAX}]")
        return grid


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _split(text) -> list[str]:
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _ints(text, name) -> list[int]:
    try:
        return [int(t) for t in _split(text)]
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of integers") from None


def _floats(text, name) -> list[float]:
    try:
        return [float(t) for t in _split(text)]
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of numbers") from None


def read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                key = key.strip().replace("-", "_")
                if key not in COMMON:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return values


def resolve_config(command: str, flags: dict) -> RunConfig:
    raw = dict(COMMON)
    raw.update(DEFAULTS[command])
    if flags.get("config"):
        raw.update(read_config_file(flags["config"]))
    raw.update({k: v for k, v in flags.items() if v is not None and k in COMMON})
    if raw["seed"] is None:
        raw["seed"] = os.environ.get(SEED_ENV, 0)
    try:
        seed = int(raw["seed"])
        samples = int(raw["samples"])
        shots = int(raw["shots"])
        trials = int(raw["trials"])
        t0, t1, dt = (float(raw[k]) for k in ("theta_start", "theta_stop", "theta_step"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric setting: {exc}") from None
    psi = [_floats(chunk, "psi") for chunk in str(raw["psi"]).split(";") if chunk.strip()]
    cfg = RunConfig(
        command=command,
        d=_ints(raw["d"], "d"),
        theta_start=t0,
        theta_stop=t1,
        theta_step=dt,
        schemes=_split(raw["schemes"]),
        n=_ints(raw["n"], "n"),
        eta=_floats(raw["eta"], "eta"),
        psi=psi,
        samples=samples,
        seed=seed,
        out=str(raw["out"]),
        shots=shots,
        trials=trials,
    )
    if any(d < 2 for d in cfg.d):
        raise ConfigError("every d must be >= 2")
    if any(n < 1 for n in cfg.n):
        raise ConfigError("every n must be >= 1")
    if any(not (0 < e <= 1) for e in cfg.eta):
        raise ConfigError("every eta must lie in (0, 1]")
    if cfg.samples < 0 or cfg.shots < 1 or cfg.trials < 1:
        raise ConfigError("samples must be >= 0, shots and trials >= 1")
    for s in cfg.schemes:
        if s not in ("O", "E", "B", "E_eta"):
            raise ConfigError(f"unknown scheme {s!r}; expected O, E, B or E_eta")
    return cfg


def _specs(cfg: RunConfig):
    for kind in cfg.schemes:
        for d in cfg.d:
            if kind == "E_eta":
                for eta in cfg.eta:
                    yield SchemeSpec(kind, d, eta=eta)
            else:
                for n in cfg.n:
                    yield SchemeSpec(kind, d, n=n)


def cmd_curves(cfg: RunConfig):
    header = ["scheme", "d", "n", "eta", "theta", "j_per_use", "j_numeric", "rel_err"]
    thetas = cfg.thetas()
    rows = []
    for spec in _specs(cfg):
        fam = family(spec)
        for theta in thetas:
            point = qfi_scheme(spec, theta)
            j_num = qfi_numeric(fam, theta) / spec.channel_uses
            rel = abs(j_num - point.j_per_use) / abs(point.j_per_use) if point.j_per_use else abs(j_num)
            rows.append([spec.kind, spec.d, spec.n, spec.eta, theta, point.j_per_use, j_num, rel])
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3] if r[3] is not None else -1.0, r[4]))
    return header, rows


def cmd_thresholds(cfg: RunConfig):
    header = ["kind", "d", "eta", "theta_star"]
    rows = [["B_vs_O", d, None, threshold_b_vs_o(d)] for d in sorted(cfg.d)]
    rows += [["g_eta", d, eta, g_eta(eta, d)] for d in sorted(cfg.d) for eta in sorted(cfg.eta)]
    return header, rows


def _psi_list(cfg: RunConfig) -> list[np.ndarray]:
    psis = [np.asarray(p, dtype=float) for p in cfg.psi]
    if cfg.samples:
        rng = np.random.default_rng(cfg.seed)
        for d in cfg.d:
            psis.extend(random_psi(d, rng, size=cfg.samples))
    return psis


def cmd_partial(cfg: RunConfig):
    if not cfg.psi and not cfg.samples:
        raise ConfigError("partial needs --psi or --samples")
    header = ["psi", "theta", "j_partial", "j_O", "j_E", "j_oracle", "sandwich_ok"]
    thetas = cfg.thetas()
    rows = []
    for psi in _psi_list(cfg):
        spec = SchemeSpec("Partial", psi.size, psi=tuple(psi))
        fam = family(spec)
        label = ";".join(fmt(float(x)) for x in spec.psi)
        for theta in thetas:
            jp = qfi_partial(spec.psi, theta)
            lo, hi = j_o(theta, spec.d), j_e(theta, spec.d)
            ok = (jp - lo >= -SANDWICH_SLACK) and (hi - jp >= -SANDWICH_SLACK)
            rows.append([label, theta, jp, lo, hi, qfi_numeric(fam, theta), ok])
    return header, rows


def cmd_crb(cfg: RunConfig):
    header = ["scheme", "d", "n", "eta", "theta", "n_shots", "n_trials", "seed",
              "mse", "crb", "ratio"]
    thetas = cfg.thetas()
    rows = []
    for spec in _specs(cfg):
        for theta in thetas:
            rep = crb_experiment(spec, theta, cfg.shots, cfg.trials, cfg.seed)
            rows.append([spec.kind, spec.d, spec.n, spec.eta, theta, rep.n_shots,
                         rep.n_trials, cfg.seed, rep.mse, rep.crb, rep.ratio])
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3] if r[3] is not None else -1.0, r[4]))
    return header, rows


HANDLERS = {"curves": cmd_curves, "thresholds": cmd_thresholds,
            "partial": cmd_partial, "crb": cmd_crb}


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def manifest(cfg: RunConfig) -> dict:
    return {"command": cfg.command, "version": __version__, "seed": cfg.seed,
            "config": asdict(cfg)}


def run(cfg: RunConfig) -> str:
    header, rows = HANDLERS[cfg.command](cfg)
    text = render_csv(header, rows)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
        with open(cfg.out + ".manifest.json", "w", newline="") as fh:
            json.dump(manifest(cfg), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return text


def _error_line(kind: str, exc: BaseException) -> None:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__,
                                 "message": str(exc)}) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _error_line("config", ConfigError(message))
        self.exit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfi-probe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--d", help="comma-separated dimensions")
        p.add_argument("--theta-start", type=float)
        p.add_argument("--theta-stop", type=float)
        p.add_argument("--theta-step", type=float)
        p.add_argument("--schemes", help="comma-separated subset of O,E,B,E_eta")
        p.add_argument("--n", help="comma-separated circulation counts")
        p.add_argument("--eta", help="comma-separated ancilla survival probabilities")
        p.add_argument("--psi", help="Schmidt coefficients, e.g. 0.6,0.8; separate vectors with ';'")
        p.add_argument("--samples", type=int, help="random Schmidt vectors per d")
        p.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV})")
        p.add_argument("--shots", type=int, help="measurements per trial (crb)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials (crb)")
        p.add_argument("--out", help="output CSV path, '-' for stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        cfg = resolve_config(args.command, flags)
        run(cfg)
    except InvalidInput as exc:
        _error_line("config", exc)
        return 2
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as exc:
        _error_line("numerical", exc)
        return 3
    except OSError as exc:
        _error_line("config", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
