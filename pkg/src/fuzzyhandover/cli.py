"""Command-line front end.

Subcommands::

    decide SERVICE --case {1,2} --femto RSSI RATE VEL SNIR --macro RSSI RATE VEL SNIR
    sweep SERVICE PRESET [-o OUT]
    rules export [PATH] | rules validate PATH
    linkbudget macro|femto ...

Primary output goes to stdout, diagnostics to stderr. Settings resolve as
command-line flags, then ``--config`` file, then built-in defaults.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import radio
from .decision import DEFAULT_GAMMA, DEFAULT_K, DecisionConfig, decide
from .errors import HandoverError
from .fuzzy import FuzzyInput, load_rulebase, serialize_rulebase, synthesize_default_rulebase, validate_rule_text
from .profiles import (
    NetworkKind,
    builtin_profiles,
    load_profile,
    parse_network,
    parse_profile_fields,
    parse_service,
)
from .sweep import SweepSpec, export_csv, load_presets, run_sweep

log = logging.getLogger("fuzzyhandover")

DEFAULT_STEP = 0.1
_CONFIG_KEYS = ("gamma", "k", "step", "rules", "femto_profile", "macro_profile")


class CliError(Exception):
    pass


def read_config(path: str) -> Dict[str, object]:
    """Parse a ``key = value`` config file.

    Known keys are ``gamma``, ``k``, ``step`` and the paths ``rules``,
    ``femto_profile``, ``macro_profile`` (relative to the config file).
    """
    text = Path(path).read_text(encoding="utf-8")
    ranges, extras = parse_profile_fields(text, extra_keys=_CONFIG_KEYS)
    if ranges:
        raise CliError(f"{path}: profile ranges belong in a separate profile file "
                       "(use femto_profile/macro_profile)")
    base = Path(path).parent
    cfg: Dict[str, object] = {}
    for key, (value, lineno) in extras.items():
        if key in ("gamma", "k", "step"):
            try:
                cfg[key] = float(value)
            except ValueError:
                raise CliError(f"{path}: line {lineno}: {key} is not a number: {value!r}") from None
        else:
            cfg[key] = str(base / value)
    return cfg


def _settings(args) -> Dict[str, object]:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    merged = {"gamma": DEFAULT_GAMMA, "k": DEFAULT_K, "step": DEFAULT_STEP,
              "rules": None, "femto_profile": None, "macro_profile": None}
    merged.update(cfg)
    for key in merged:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if not merged["step"] > 0:
        raise CliError(f"step must be positive, got {merged['step']}")
    return merged


def _decision_config(s) -> DecisionConfig:
    try:
        return DecisionConfig(gamma_threshold=s["gamma"], k_weight=s["k"])
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _rulebase(s):
    if s["rules"] is None:
        return synthesize_default_rulebase()
    return load_rulebase(Path(s["rules"]).read_text(encoding="utf-8"))


def _profiles(service, s):
    table = builtin_profiles()
    for network, key in ((NetworkKind.FEMTOCELL, "femto_profile"), (NetworkKind.MACROCELL, "macro_profile")):
        if s[key] is not None:
            table[(service, network)] = load_profile(Path(s[key]).read_text(encoding="utf-8"))
    return table


def _service(token):
    try:
        return parse_service(token)
    except ValueError as exc:
        raise CliError(str(exc)) from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_decide(args, out) -> int:
    s = _settings(args)
    service = _service(args.service)
    outcome = decide(
        args.case,
        service,
        femto=FuzzyInput(*args.femto),
        macro=FuzzyInput(*args.macro),
        cfg=_decision_config(s),
        rb=_rulebase(s),
        profiles=_profiles(service, s),
    )
    out.write(f"verdict: {outcome.verdict.value}\n")
    out.write(f"gamma_f: {outcome.gamma_f:.4f}\n")
    out.write(f"gamma_m: {outcome.gamma_m:.4f}\n")
    return 0


def _parse_override(token: str):
    # femto.snir=low
    try:
        lhs, level = token.split("=", 1)
        network, key = lhs.split(".", 1)
    except ValueError:
        raise CliError(f"--set expects NETWORK.VAR=LEVEL, got {token!r}") from None
    try:
        return parse_network(network), key.strip().lower(), level.strip()
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_sweep(args, out) -> int:
    s = _settings(args)
    service = _service(args.service)
    presets = load_presets()
    if args.preset not in presets:
        raise CliError(f"unknown preset {args.preset!r} (expected one of: {', '.join(presets)})")
    preset = presets[args.preset]
    for token in args.set or ():
        network, key, level = _parse_override(token)
        preset = preset.with_levels(network, **{key: level})
    spec = SweepSpec(
        service=service,
        preset=preset,
        v_min=args.vmin,
        v_max=args.vmax,
        step=s["step"],
        rulebase=_rulebase(s),
        config=_decision_config(s),
        profiles=_profiles(service, s),
    )
    result = run_sweep(spec)
    if args.output and args.output != "-":
        export_csv(result, args.output)
    else:
        export_csv(result, out)

    found = ", ".join(f"{v:.2f}" for v in result.intersections) or "none"
    log.info("%s %s: intersections at %s km/h", service.value, preset.name, found)
    ref = preset.reference_intersections.get(service.value)
    if ref:
        log.info("reference annotation: %s km/h", ", ".join(f"{v:g}" for v in ref))
    for seg in result.segments:
        log.info("  %6.2f - %6.2f km/h: %s", seg.start, seg.end, seg.network.value)
    return 0


def cmd_rules(args, out) -> int:
    if args.action == "export":
        text = serialize_rulebase(synthesize_default_rulebase())
        if args.path and args.path != "-":
            Path(args.path).write_text(text, encoding="utf-8")
        else:
            out.write(text)
        return 0

    if not args.path:
        raise CliError("rules validate needs a PATH")
    problems = validate_rule_text(Path(args.path).read_text(encoding="utf-8"))
    if problems:
        for line in problems:
            out.write(line + "\n")
        return 1
    out.write("81 rules, complete, monotone, matches 4 published rules\n")
    return 0


def cmd_linkbudget(args, out) -> int:
    if args.kind == "macro":
        link = radio.MacroLink(fc_m=args.fc, hb=args.hb, hm=args.hm, d=args.d, lsh=args.lsh, pt_dbm=args.pt)
        loss = radio.macro_path_loss(link)
    else:
        link = radio.FemtoLink(fc_f=args.fc, d1=args.d1, n_exp=args.n, pt_dbm=args.pt)
        loss = radio.femto_path_loss(link)
    rssi = radio.received_power_dbm(args.pt, loss)

    snir_db = None
    femto_i = [radio.dbm_to_mw(p) for p in args.femto_interferer or ()]
    macro_i = [radio.dbm_to_mw(p) for p in args.macro_interferer or ()]
    if args.noise is not None or femto_i or macro_i:
        noise = radio.dbm_to_mw(args.noise) if args.noise is not None else 0.0
        fld = radio.InterferenceField(radio.dbm_to_mw(rssi), femto_i, macro_i, noise)
        snir_db = radio.snir(fld)
    if args.bandwidth is not None and snir_db is None:
        raise CliError("capacity needs an SNIR: give --noise and/or interferer powers")

    out.write(f"path_loss_db: {loss:.4f}\n")
    out.write(f"rssi_dbm: {rssi:.4f}\n")
    if snir_db is not None:
        out.write(f"snir_db: {snir_db:.4f}\n")
    if args.bandwidth is not None:
        cap = radio.channel_capacity(radio.ChannelAllocation(args.bandwidth * 1e6), snir_db)
        out.write(f"capacity_mbps: {cap / 1e6:.4f}\n")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="key = value file with gamma, k, step, rules, femto_profile, macro_profile")
    p.add_argument("--rules", help="rule file (default: built-in 81-rule table)")
    p.add_argument("--femto-profile", dest="femto_profile", help="femtocell profile file for this service")
    p.add_argument("--macro-profile", dest="macro_profile", help="macrocell profile file for this service")
    p.add_argument("--gamma", type=float, help=f"femtocell threshold (default {DEFAULT_GAMMA})")
    p.add_argument("--k", type=float, help=f"femtocell weight K (default {DEFAULT_K})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyhandover", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="one-shot handover decision")
    p.add_argument("service", help="voice, video or data")
    p.add_argument("--case", type=int, choices=(1, 2), required=True,
                   help="1: mobile in macrocell, 2: mobile in femtocell")
    p.add_argument("--femto", type=float, nargs=4, required=True, metavar=("RSSI", "RATE", "VEL", "SNIR"))
    p.add_argument("--macro", type=float, nargs=4, required=True, metavar=("RSSI", "RATE", "VEL", "SNIR"))
    _add_common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("sweep", help="handover factors over a velocity range, as CSV")
    p.add_argument("service")
    p.add_argument("preset", help="fig8-high, fig9-medium or fig10-low")
    p.add_argument("-o", "--output", help="CSV destination (default stdout)")
    p.add_argument("--step", type=float, help=f"velocity step in km/h (default {DEFAULT_STEP})")
    p.add_argument("--vmin", type=float, default=0.0)
    p.add_argument("--vmax", type=float, default=20.0)
    p.add_argument("--set", action="append", metavar="NET.VAR=LEVEL",
                   help="pin a fixed input, e.g. femto.snir=low or macro.rate=medium")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rules", help="export or validate a rule file")
    p.add_argument("action", choices=("export", "validate"))
    p.add_argument("path", nargs="?")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("linkbudget", help="path loss, RSSI, SNIR and capacity")
    lsub = p.add_subparsers(dest="kind", required=True)
    m = lsub.add_parser("macro")
    m.add_argument("--fc", type=float, required=True, help="carrier frequency, MHz")
    m.add_argument("--hb", type=float, default=30.0, help="base station height, m")
    m.add_argument("--hm", type=float, default=1.5, help="mobile height, m")
    m.add_argument("--d", type=float, required=True, help="distance, km")
    m.add_argument("--lsh", type=float, default=0.0, help="shadowing offset, dB")
    m.add_argument("--pt", type=float, default=46.0, help="transmit power, dBm")
    f = lsub.add_parser("femto")
    f.add_argument("--fc", type=float, required=True, help="carrier frequency, MHz")
    f.add_argument("--d1", type=float, required=True, help="distance, m")
    f.add_argument("--n", type=float, default=radio.DEFAULT_FEMTO_EXPONENT, help="distance loss coefficient")
    f.add_argument("--pt", type=float, default=20.0, help="transmit power, dBm")
    for q in (m, f):
        q.add_argument("--noise", type=float, help="noise power, dBm")
        q.add_argument("--femto-interferer", type=float, action="append", metavar="DBM")
        q.add_argument("--macro-interferer", type=float, action="append", metavar="DBM")
        q.add_argument("--bandwidth", type=float, help="allocated bandwidth, MHz")
        q.set_defaults(func=cmd_linkbudget)
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    log.propagate = False
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except (HandoverError, CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
