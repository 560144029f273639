"""Batch front-end: ``qsdcnet <command> [flags]``.

Exit codes: 0 success, 1 usage or configuration error, 2 protocol abort
(eavesdropping detected).  Summaries go to stdout; transcripts and CSV
curves only to the files named by ``--transcript`` / ``--csv``.

Config files are YAML; command-line flags override file values::

    command: run-bidirectional
    seed: 7
    repetitions: 1
    workers: 1
    session: {pairs: 256, sample_fraction: 0.2, decoys: 16,
              error_threshold: 0.0, loss_prob: 0.0,
              groups: 64, purification_yield: 1.0}
    attack: {kind: intercept-resend, basis_policy: random, targets: [B, C]}
    message_hex: deadbeef
    output: {transcript: run.json, csv: sweep.csv}
    sweep: {grid: [0.0, 0.25, 0.5], trials: 2000}
    holevo: {d: 0.25, priors: [0.25, 0.25, 0.25, 0.25], digits: 4}
    trojan: {extra_photons: 1, trials: 10000}
"""

from __future__ import annotations

import argparse
import copy
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import adversary
from .bidirectional import CapacityMismatch, ProtocolAbort, SessionConfig, run_session
from .quantum import RandomStream
from .security import attack_sweep, holevo_numeric, write_sweep_csv
from .swapping import SwapSessionConfig, run_swap_session

COMMANDS = ("run-bidirectional", "run-swapping", "sweep", "holevo", "trojan-check")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ABORT = 2

DEFAULTS = {
    "command": None,
    "seed": 0,
    "repetitions": 1,
    "workers": 1,
    "session": {
        "pairs": 256,
        "sample_fraction": 0.2,
        "decoys": 16,
        "error_threshold": 0.0,
        "loss_prob": 0.0,
        "groups": 64,
        "purification_yield": 1.0,
    },
    "attack": {"kind": "none", "basis_policy": "random", "d": 0.25, "lie_fraction": 1.0,
               "extra_photons": 1, "targets": ["B", "C"]},
    "message_hex": "",
    "output": {"transcript": None, "csv": None},
    "sweep": {"grid": [round(0.05 * i, 2) for i in range(11)], "trials": 2000},
    "holevo": {"d": 0.25, "priors": [0.25, 0.25, 0.25, 0.25], "digits": 4},
    "trojan": {"extra_photons": 1, "trials": 10000},
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class CliConfig:
    command: str
    seed: int
    repetitions: int
    workers: int
    session: dict
    attack: adversary.AttackModel
    attack_targets: tuple[str, ...]
    message_hex: str
    transcript_path: Path | None
    csv_path: Path | None
    sweep: dict = field(default_factory=dict)
    holevo: dict = field(default_factory=dict)
    trojan: dict = field(default_factory=dict)


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        path = f"{prefix}{k}"
        if k not in base:
            raise ConfigError(path, "unknown field")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(path, "expected a mapping")
            out[k] = _merge(base[k], v, path + ".")
        else:
            out[k] = v
    return out


def _number(doc: dict, path: str, kind=float, lo=None, hi=None, lo_open=False):
    node = doc
    *parents, leaf = path.split(".")
    for p in parents:
        node = node[p]
    v = node[leaf]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(path, f"expected an integer, got {v!r}")
    v = kind(v)
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(path, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(path, f"must be <= {hi}, got {v}")
    return v


def _build_attack(doc: dict) -> adversary.AttackModel:
    a = doc["attack"]
    kind = a["kind"]
    if kind not in adversary.ATTACKS:
        raise ConfigError("attack.kind", f"unknown attack {kind!r}; valid names: {', '.join(adversary.ATTACKS)}")
    if kind == "intercept-resend":
        try:
            policy = adversary.BasisPolicy(a["basis_policy"])
        except ValueError:
            valid = ", ".join(p.value for p in adversary.BasisPolicy)
            raise ConfigError("attack.basis_policy", f"unknown policy {a['basis_policy']!r}; valid: {valid}") from None
        return adversary.InterceptResend(policy)
    if kind == "ancilla":
        return adversary.AncillaEntangling(_number(doc, "attack.d", lo=0.0, hi=1.0))
    if kind == "dishonest-server":
        return adversary.DishonestServer(_number(doc, "attack.lie_fraction", lo=0.0, hi=1.0))
    if kind == "trojan-horse":
        return adversary.TrojanHorse(_number(doc, "attack.extra_photons", int, lo=1))
    return adversary.NoAttack()


def validate(doc: dict) -> CliConfig:
    """Check a merged config document and turn it into a :class:`CliConfig`."""
    if doc["command"] not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {doc['command']!r}")
    seed = _number(doc, "seed", int, lo=0, hi=2**64 - 1)
    reps = _number(doc, "repetitions", int, lo=1)
    workers = _number(doc, "workers", int, lo=1)
    session = {
        "pairs": _number(doc, "session.pairs", int, lo=4),
        "sample_fraction": _number(doc, "session.sample_fraction", lo=0.0, hi=1.0, lo_open=True),
        "decoys": _number(doc, "session.decoys", int, lo=1),
        "error_threshold": _number(doc, "session.error_threshold", lo=0.0, hi=1.0),
        "loss_prob": _number(doc, "session.loss_prob", lo=0.0, hi=1.0),
        "groups": _number(doc, "session.groups", int, lo=1),
        "purification_yield": _number(doc, "session.purification_yield", lo=0.0, hi=1.0, lo_open=True),
    }
    if session["sample_fraction"] >= 1.0:
        raise ConfigError("session.sample_fraction", "must be < 1")
    attack = _build_attack(doc)
    targets = doc["attack"]["targets"]
    if isinstance(targets, str):
        targets = [t for t in targets.split(",") if t]
    if not targets or any(t not in ("B", "C") for t in targets):
        raise ConfigError("attack.targets", f"must be a non-empty subset of [B, C], got {targets!r}")
    msg = doc["message_hex"] or ""
    if not isinstance(msg, str):
        raise ConfigError("message_hex", "expected a hex string")
    try:
        bytes.fromhex(msg if len(msg) % 2 == 0 else msg + "0")
    except ValueError:
        raise ConfigError("message_hex", f"not a hex string: {msg!r}") from None
    sweep = {"grid": [float(x) for x in doc["sweep"]["grid"]], "trials": _number(doc, "sweep.trials", int, lo=1)}
    if not sweep["grid"] or any(not 0.0 <= x <= 1.0 for x in sweep["grid"]):
        raise ConfigError("sweep.grid", "grid points must lie in [0, 1]")
    priors = [float(x) for x in doc["holevo"]["priors"]]
    if len(priors) != 4 or min(priors) < 0 or abs(sum(priors) - 1.0) > 1e-12:
        raise ConfigError("holevo.priors", "need four non-negative numbers summing to 1")
    holevo = {
        "d": _number(doc, "holevo.d", lo=0.0, hi=1.0),
        "priors": priors,
        "digits": _number(doc, "holevo.digits", int, lo=0, hi=17),
    }
    trojan = {
        "extra_photons": _number(doc, "trojan.extra_photons", int, lo=0),
        "trials": _number(doc, "trojan.trials", int, lo=1),
    }
    out = doc["output"]
    return CliConfig(
        command=doc["command"],
        seed=seed,
        repetitions=reps,
        workers=workers,
        session=session,
        attack=attack,
        attack_targets=tuple(targets),
        message_hex=msg.lower(),
        transcript_path=Path(out["transcript"]) if out["transcript"] else None,
        csv_path=Path(out["csv"]) if out["csv"] else None,
        sweep=sweep,
        holevo=holevo,
        trojan=trojan,
    )


def _read_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("--config", f"invalid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a mapping at the top level")
    return doc


def load_config(path, overrides: dict | None = None) -> CliConfig:
    """Load a YAML config, apply ``overrides`` (same nesting) and validate."""
    doc = _merge(DEFAULTS, _read_document(path))
    if overrides:
        doc = _merge(doc, overrides)
    return validate(doc)


# -- argument parsing --------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# flag dest -> config field path
FLAG_PATHS = {
    "seed": "seed",
    "repetitions": "repetitions",
    "workers": "workers",
    "pairs": "session.pairs",
    "sample_frac": "session.sample_fraction",
    "decoys": "session.decoys",
    "threshold": "session.error_threshold",
    "loss": "session.loss_prob",
    "groups": "session.groups",
    "purification_yield": "session.purification_yield",
    "attack": "attack.kind",
    "basis_policy": "attack.basis_policy",
    "attack_d": "attack.d",
    "lie_fraction": "attack.lie_fraction",
    "attack_extra_photons": "attack.extra_photons",
    "attack_targets": "attack.targets",
    "message_hex": "message_hex",
    "transcript": "output.transcript",
    "csv": "output.csv",
    "grid": "sweep.grid",
    "trials": None,  # command-dependent
    "d": "holevo.d",
    "priors": "holevo.priors",
    "digits": "holevo.digits",
    "extra_photons": "trojan.extra_photons",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsdcnet", description="Simulate EPR-pair QSDC network sessions.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="YAML config file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--repetitions", type=int)
        p.add_argument("--workers", type=int)

    def attack_flags(p):
        p.add_argument("--attack", help=f"one of: {', '.join(adversary.ATTACKS)}")
        p.add_argument("--basis-policy", help="intercept-resend basis: random, Z or X")
        p.add_argument("--attack-d", type=float, help="ancilla attack detection parameter")
        p.add_argument("--lie-fraction", type=float)
        p.add_argument("--attack-extra-photons", type=int, help="Trojan-horse extra photons")
        p.add_argument("--attack-targets", help="photons attacked in transit, e.g. B,C")

    p = sub.add_parser("run-bidirectional", help="run the seven-step bidirectional session")
    common(p)
    attack_flags(p)
    p.add_argument("--pairs", type=int)
    p.add_argument("--sample-frac", type=float)
    p.add_argument("--decoys", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--loss", type=float)
    p.add_argument("--message-hex")
    p.add_argument("--transcript")

    p = sub.add_parser("run-swapping", help="run the entanglement-swapping session")
    common(p)
    attack_flags(p)
    p.add_argument("--groups", type=int)
    p.add_argument("--yield", dest="purification_yield", type=float)
    p.add_argument("--sample-frac", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--message-hex")
    p.add_argument("--transcript")

    p = sub.add_parser("sweep", help="detection/leakage sweep over the ancilla attack")
    common(p)
    p.add_argument("--grid", type=_floats, help="comma-separated d values")
    p.add_argument("--trials", type=int)
    p.add_argument("--csv")

    p = sub.add_parser("holevo", help="leakage bound at one detection level")
    common(p)
    p.add_argument("--d", type=float)
    p.add_argument("--priors", type=_floats)
    p.add_argument("--digits", type=int)

    p = sub.add_parser("trojan-check", help="beam-splitter test statistics")
    common(p)
    p.add_argument("--extra-photons", type=int)
    p.add_argument("--trials", type=int)
    return parser


def _set(doc: dict, path: str, value):
    *parents, leaf = path.split(".")
    node = doc
    for p in parents:
        node = node.setdefault(p, {})
    node[leaf] = value


def config_from_args(args: argparse.Namespace) -> CliConfig:
    overrides: dict = {"command": args.command}
    for dest, path in FLAG_PATHS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if dest == "trials":
            path = "sweep.trials" if args.command == "sweep" else "trojan.trials"
        _set(overrides, path, value)
    doc = _merge(DEFAULTS, _read_document(args.config)) if args.config else copy.deepcopy(DEFAULTS)
    if args.config and doc.get("command") not in (None, args.command):
        raise ConfigError("command", f"config file is for {doc['command']!r}, not {args.command!r}")
    try:
        return validate(_merge(doc, overrides))
    except ConfigError as exc:
        flag = _flag_for(exc.path, args)
        if flag is None:
            raise
        raise ConfigError(f"{flag} ({exc.path})", str(exc).split(": ", 1)[1]) from None


def _flag_for(path: str, args: argparse.Namespace) -> str | None:
    for dest, p in FLAG_PATHS.items():
        if dest == "trials":
            p = "sweep.trials" if args.command == "sweep" else "trojan.trials"
        if p == path and getattr(args, dest, None) is not None:
            flag = "--yield" if dest == "purification_yield" else "--" + dest.replace("_", "-")
            return flag
    return None


# -- commands ---------------------------------------------------------------------


def hex_to_bits(text: str) -> list[int]:
    return [int(b) for ch in text for b in format(int(ch, 16), "04b")]


def bits_to_hex(bits: Sequence[int]) -> str:
    if len(bits) % 4:
        raise ValueError("bit count must be a multiple of 4")
    return "".join(format(int("".join(map(str, bits[i : i + 4])), 2), "x") for i in range(0, len(bits), 4))


def derived_seeds(seed: int, n: int) -> list[int]:
    if n == 1:
        return [seed]
    root = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, np.uint64)[0]) for s in root.spawn(n)]


def _padded_message(cfg: CliConfig, capacity_bits: int) -> tuple[list[int], int]:
    bits = hex_to_bits(cfg.message_hex)
    if len(bits) > capacity_bits:
        raise ConfigError(
            "--message-hex", f"{len(bits)} message bits exceed the session capacity of {capacity_bits}"
        )
    return bits + [0] * (capacity_bits - len(bits)), len(bits)


def _transcript_path(base: Path, rep: int, reps: int) -> Path:
    if reps == 1:
        return base
    return base.with_name(f"{base.stem}.rep{rep}{base.suffix or '.json'}")


def _run_protocol(cfg: CliConfig, out) -> int:
    swapping = cfg.command == "run-swapping"
    seeds = derived_seeds(cfg.seed, cfg.repetitions)
    s = cfg.session
    try:
        if swapping:
            configs = [
                SwapSessionConfig(
                    n_groups=s["groups"],
                    purification_yield=s["purification_yield"],
                    sample_fraction=s["sample_fraction"],
                    error_threshold=s["error_threshold"],
                    attack=cfg.attack,
                    attack_targets=cfg.attack_targets,
                    seed=sd,
                )
                for sd in seeds
            ]
        else:
            configs = [
                SessionConfig(
                    n_pairs=s["pairs"],
                    sample_fraction=s["sample_fraction"],
                    k_decoys=s["decoys"],
                    error_threshold=s["error_threshold"],
                    loss_prob=s["loss_prob"],
                    attack=cfg.attack,
                    attack_targets=cfg.attack_targets,
                    seed=sd,
                )
                for sd in seeds
            ]
    except ValueError as exc:
        raise ConfigError("session", str(exc)) from None
    message, n_bits = _padded_message(cfg, configs[0].capacity_bits)
    runner = run_swap_session if swapping else run_session

    def one(c):
        try:
            return runner(c, message), None
        except ProtocolAbort as exc:
            return exc.transcript, exc

    if cfg.workers > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(one, configs))
    else:
        results = [one(c) for c in configs]

    aborted = 0
    for rep, (t, exc) in enumerate(results):
        if cfg.transcript_path is not None:
            path = _transcript_path(cfg.transcript_path, rep, len(results))
            path.write_text(t.to_json())
        prefix = f"[rep {rep}] " if len(results) > 1 else ""
        print(f"{prefix}status: {t.status}", file=out)
        ch = t.channel
        if ch is not None and ch.sample_check is not None:
            sc = ch.sample_check
            print(f"{prefix}sample_check: compared={sc.compared} errors={sc.errors} rate={sc.rate:.6g}", file=out)
        if ch is not None and ch.trojan_check is not None:
            tc = ch.trojan_check
            print(f"{prefix}beam_splitter: photons={tc.photons_tested} both_clicks={tc.both_clicks}", file=out)
        if exc is not None:
            aborted += 1
            print(f"{prefix}eavesdropping detected: {exc}", file=out)
            continue
        if not swapping and t.verification is not None:
            v = t.verification
            print(f"{prefix}decoy_check: checked={v.checked} mismatches={v.mismatches} rate={v.rate:.6g}", file=out)
        decoded = t.decoded_bits[:n_bits]
        if len(decoded) == n_bits and n_bits % 4 == 0:
            print(f"{prefix}decoded_message: {bits_to_hex(decoded)}", file=out)
        else:
            print(f"{prefix}decoded_bits: {''.join(map(str, decoded))}", file=out)
        if swapping:
            print(f"{prefix}bits_per_pair: {t.bits_per_pair}", file=out)
        else:
            e = t.efficiency
            print(f"{prefix}efficiency: q_u={e.q_u} q_t={e.q_t} eta_q={e.eta_q:.6g}", file=out)
    if len(results) > 1:
        print(f"sessions: {len(results)} aborted: {aborted}", file=out)
    return EXIT_ABORT if aborted else EXIT_OK


def _run_sweep(cfg: CliConfig, out) -> int:
    rows = attack_sweep(cfg.sweep["grid"], cfg.sweep["trials"], cfg.seed, workers=cfg.workers)
    if cfg.csv_path is not None:
        write_sweep_csv(rows, cfg.csv_path)
    for r in rows:
        print(
            f"d={r.d:.4f} error_rate_z={r.error_rate_z:.4f} error_rate_x={r.error_rate_x:.4f} "
            f"i0={r.i0_closed:.4f} twice_i0={r.twice_i0:.4f}",
            file=out,
        )
    return EXIT_OK


def _run_holevo(cfg: CliConfig, out) -> int:
    rep = holevo_numeric(cfg.holevo["d"], cfg.holevo["priors"])
    k = cfg.holevo["digits"]
    print(f"d {rep.d:.{k}f}", file=out)
    print(f"i0_closed {rep.i0_closed:.{k}f}", file=out)
    print(f"i0_numeric {rep.i0_numeric:.{k}f}", file=out)
    print(f"twice_i0 {rep.twice_i0:.{k}f}", file=out)
    print(f"s_mix {rep.s_mix:.{k}f}", file=out)
    return EXIT_OK


def _run_trojan(cfg: CliConfig, out) -> int:
    rand = RandomStream(cfg.seed, name="trojan-check")
    extra = cfg.trojan["extra_photons"]
    trials = cfg.trojan["trials"]
    both = sum(adversary.trojan_beam_splitter_check(extra, rand).both_clicked for _ in range(trials))
    print(f"photons_per_pulse {extra + 1}", file=out)
    print(f"trials {trials}", file=out)
    print(f"both_click_frequency {both / trials:.6f}", file=out)
    print(f"expected {adversary.both_click_probability(extra + 1):.6f}", file=out)
    return EXIT_OK


_HANDLERS = {
    "run-bidirectional": _run_protocol,
    "run-swapping": _run_protocol,
    "sweep": _run_sweep,
    "holevo": _run_holevo,
    "trojan-check": _run_trojan,
}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        cfg = config_from_args(args)
        return _HANDLERS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"qsdcnet: error: {exc}", file=err)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"qsdcnet: config error: {exc}", file=err)
        return EXIT_USAGE
    except CapacityMismatch as exc:
        print(f"qsdcnet: capacity error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qsdcnet: cannot write output: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
