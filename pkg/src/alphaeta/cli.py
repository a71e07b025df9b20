"""Command-line front end: bounds tables, protocol simulation, signal design,
and one-shot recomputation of the canonical security figures.

All randomness flows from an explicit --seed recorded in a run manifest;
rerunning from the manifest reproduces report bodies byte for byte
(timestamps live only in the manifest).  Floats print with 17 significant
digits so downstream comparisons can be exact.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, attacks, channel, cipher, detection, reproduce
from .constellation import ModulationKind, design_bases, make_ask, make_psk, neighbor_error

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["M", "S", "key_bits", "seed"],
    "additionalProperties": False,
    "properties": {
        "M": {"type": "integer", "minimum": 1},
        "S": {"type": "number", "minimum": 0},
        "key_bits": {"type": "integer", "minimum": 4},
        "seed": {"type": "integer", "minimum": 1},
        "lfsr_taps": {"type": ["integer", "string"]},
        "osk": {"type": "boolean"},
        "kind": {"enum": ["psk", "ask"]},
        "kappa": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "ask_S_min": {"type": "number"},
        "ask_S_max": {"type": "number"},
    },
}


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


def validate_config_dict(cfg: dict) -> list[str]:
    """Schema violations as '/json/pointer: message' strings; empty when valid."""
    import jsonschema

    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path)):
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        problems.append(f"{pointer}: {err.message}")
    m = cfg.get("M")
    if isinstance(m, int) and m >= 1 and m & (m - 1):
        problems.append("/M: must be a power of two for encoding")
    if cfg.get("kind", "psk") == "ask" and (
            "ask_S_min" not in cfg or "ask_S_max" not in cfg):
        problems.append("/kind: ask requires ask_S_min and ask_S_max")
    return problems


def _config_from_dict(cfg: dict) -> cipher.CipherConfig:
    taps = cfg.get("lfsr_taps")
    if isinstance(taps, str):
        taps = int(taps, 0)
    return cipher.CipherConfig(
        M=cfg["M"], S=cfg["S"], key_bits=cfg["key_bits"], seed=cfg["seed"],
        lfsr_taps=taps, osk=cfg.get("osk", False),
        kind=ModulationKind(cfg.get("kind", "psk")), kappa=cfg.get("kappa", 1.0),
        ask_S_min=cfg.get("ask_S_min"), ask_S_max=cfg.get("ask_S_max"))


def load_config(path) -> cipher.CipherConfig:
    cfg = json.loads(Path(path).read_text())
    problems = validate_config_dict(cfg)
    if problems:
        raise SystemExit("invalid config:\n" + "\n".join("  " + p for p in problems))
    return _config_from_dict(cfg)


def _write_rows(rows: list[dict], out, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
        out.write(text)
        return
    writer = csv.writer(out)
    if rows:
        header = list(rows[0])
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(r[h]) for h in header])


def _open_out(args, default_name: str):
    if args.out is None:
        return sys.stdout, None
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / default_name
    return open(path, "w"), path


# --- bounds ------------------------------------------------------------------

def _bound_row(n: int, s: float, kind: str) -> dict:
    if kind == "srm":
        rep = detection.srm_symmetric(n, s)
    elif kind == "usd":
        rep = detection.usd_symmetric(n, s)
    elif kind == "helstrom":
        rep = detection.helstrom_binary_pure(np.sqrt(s), -np.sqrt(s))
    elif kind in ("quadrature-homodyne", "quadrature-heterodyne"):
        rep = detection.quadrature_binary(np.sqrt(s), -np.sqrt(s), kind.split("-")[1])
    else:
        raise SystemExit(f"unknown bound kind: {kind}")
    return {
        "n": n, "s": s, "attack": kind, "value": rep.value, "kind": rep.kind,
        "method": rep.method, "optimality_residual": rep.optimality_residual,
        "eig_clamp_rel": rep.eig_clamp_rel, "residual_alarm": rep.residual_alarm,
    }


def cmd_bounds(args) -> int:
    ns = args.n
    ss = args.s
    if not ns or not ss:
        print("error: empty grid", file=sys.stderr)
        return 2
    grid = [(n, s) for n in ns for s in ss]
    if any(n < 2 for n, _ in grid) or any(s < 0 for _, s in grid):
        print("error: invalid grid (need n >= 2, s >= 0)", file=sys.stderr)
        return 2
    work = lambda point: _bound_row(point[0], point[1], args.kind)
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(work, grid))  # map preserves grid order
    else:
        rows = [work(p) for p in grid]
    out, path = _open_out(args, f"bounds_{args.kind}.{args.format}")
    try:
        _write_rows(rows, out, args.format)
    finally:
        if path is not None:
            out.close()
            print(f"wrote {path}")
    return 0


# --- simulate ----------------------------------------------------------------

def _manifest(args, config_dict: dict, outputs: list[str]) -> dict:
    return {
        "command": "simulate",
        "config": config_dict,
        "seed": args.seed,
        "bits": args.bits,
        "plaintext": args.plaintext,
        "attacks": args.attack,
        "version": __version__,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": outputs,
    }


def _report_to_dict(rep: attacks.AttackReport) -> dict:
    d = dataclasses.asdict(rep)
    return d


def cmd_simulate(args) -> int:
    if args.from_manifest:
        manifest = json.loads(Path(args.from_manifest).read_text())
        ns = argparse.Namespace(**vars(args))
        ns.seed = manifest["seed"]
        ns.bits = manifest["bits"]
        ns.plaintext = manifest["plaintext"]
        ns.attack = manifest["attacks"]
        cfg_dict = manifest["config"]
        problems = validate_config_dict(cfg_dict)
        if problems:
            raise SystemExit("invalid config:\n" + "\n".join("  " + p for p in problems))
        args = ns
    elif args.config is None:
        print("error: --config or --from-manifest is required", file=sys.stderr)
        return 2
    else:
        cfg_dict = json.loads(Path(args.config).read_text())
    if args.seed is None:
        print("error: --seed is required (no silent nondeterminism)", file=sys.stderr)
        return 2

    problems = validate_config_dict(cfg_dict)
    if problems:
        print("invalid config:", file=sys.stderr)
        for p in problems:
            print("  " + p, file=sys.stderr)
        return 2
    config = _config_from_dict(cfg_dict)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    n = args.bits
    if args.plaintext == "zeros":
        plaintext = np.zeros(n, dtype=np.int64)
    else:
        plaintext = rng.integers(0, 2, size=n)

    indices = cipher.encode(plaintext, config)
    record = channel.transmit(indices, config, rng)

    outputs: list[str] = []

    def dump(name: str, payload: dict) -> None:
        path = outdir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        outputs.append(str(path))

    for kind in args.attack:
        if kind == "bob":
            bits, ber = channel.bob_receive(
                channel.apply_loss(config.constellation().amplitudes[indices], config.kappa),
                config, rng=rng, plaintext=plaintext)
            dump("report_bob.json", {
                "attack_kind": "bob_keyed_reception",
                "empirical": {"value": ber, "stderr": float(np.sqrt(max(ber * (1 - ber), 1 / n) / n)),
                              "trials": n},
                "bound": dataclasses.asdict(
                    detection.helstrom_binary_pure(np.sqrt(config.S), -np.sqrt(config.S))),
                "trials": n, "seed": args.seed,
            })
        elif kind == "ctoa-data":
            rep = attacks.eve_ctoa_data(record, config, plaintext, seed=args.seed)
            dump("report_ctoa_data.json", _report_to_dict(rep))
        elif kind == "ctoa-key":
            rep = attacks.eve_key_symbol(record, config, None, seed=args.seed)
            dump("report_ctoa_key.json", _report_to_dict(rep))
        elif kind == "kpa":
            rep = attacks.eve_key_symbol(record, config, plaintext, seed=args.seed)
            dump("report_kpa_key.json", _report_to_dict(rep))
        elif kind == "key-entropy":
            h = attacks.key_posterior_entropy(record, config, plaintext)
            dump("report_key_entropy.json", {
                "attack_kind": "kpa_key_posterior",
                "key_posterior_entropy_bits": h,
                "key_bits": config.key_bits,
                "trials": n, "seed": args.seed,
            })
        else:
            print(f"error: unknown attack {kind}", file=sys.stderr)
            return 2

    if args.save_record:
        rec_path = outdir / "record.bin"
        channel.save_record(rec_path, record, "bin", seed=args.seed)
        outputs += [str(rec_path), str(rec_path) + ".json"]

    manifest = _manifest(args, cfg_dict, outputs)
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(outputs)} report(s) and manifest to {outdir}")
    return 0


# --- design ------------------------------------------------------------------

def cmd_design(args) -> int:
    kind = ModulationKind(args.kind)
    try:
        m = design_bases(args.target_pe, args.s, kind, S_min=args.s_min)
        c = make_psk(m, args.s) if kind is ModulationKind.PSK else \
            make_ask(m, args.s_min, args.s, 1.0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = [{
        "target_pe": args.target_pe, "s": args.s, "kind": kind.value,
        "bases": m,
        "neighbor_error": neighbor_error(c),
    }]
    out, path = _open_out(args, f"design.{args.format}")
    try:
        _write_rows(rows, out, args.format)
    finally:
        if path is not None:
            out.close()
            print(f"wrote {path}")
    return 0


# --- reproduce ---------------------------------------------------------------

def cmd_reproduce(args) -> int:
    results = reproduce.run_all()
    rows = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"[{status}] {r.claim_id:>3}  {r.description}: measured {_fmt(r.measured)} (expected {r.expected}, {r.elapsed_s:.2f}s)"
        print(line)
        if r.detail:
            print(f"           {r.detail}")
        rows.append({
            "claim": r.claim_id, "description": r.description,
            "measured": r.measured, "expected": r.expected,
            "passed": r.passed, "elapsed_s": r.elapsed_s, "detail": r.detail,
        })
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} claims passed")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / f"reproduce.{args.format}"
        with open(path, "w") as f:
            _write_rows(rows, f, args.format)
        print(f"wrote {path}")
    return 1 if n_fail else 0


# --- entry point --------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphaeta",
                                description="Y-00 (alpha-eta) stream-cipher simulator and security-bound toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("bounds", help="tabulate discrimination bounds over an (N, S) grid")
    b.add_argument("--n", type=_int_list, default=[2], help="comma-separated state counts")
    b.add_argument("--s", type=_float_list, required=True, help="comma-separated photon numbers")
    b.add_argument("--kind", default="srm",
                   choices=["helstrom", "quadrature-homodyne", "quadrature-heterodyne", "srm", "usd"])
    b.add_argument("--format", default="csv", choices=["csv", "json"])
    b.add_argument("--out", default=None, help="output directory (default: stdout)")
    b.add_argument("--threads", type=int, default=1)
    b.set_defaults(fn=cmd_bounds)

    s = sub.add_parser("simulate", help="encrypt, transmit, and run receiver/attack reports")
    s.add_argument("--config", default=None, help="JSON protocol config")
    s.add_argument("--from-manifest", default=None, help="rerun a previous manifest")
    s.add_argument("--seed", type=int, default=None, help="master RNG seed (required)")
    s.add_argument("--bits", type=int, default=10000)
    s.add_argument("--plaintext", default="random", choices=["random", "zeros"])
    s.add_argument("--attack", nargs="+", default=["bob"],
                   choices=["bob", "ctoa-data", "ctoa-key", "kpa", "key-entropy"])
    s.add_argument("--out", default="runs")
    s.add_argument("--save-record", action="store_true")
    s.add_argument("--format", default="json", choices=["json"])
    s.set_defaults(fn=cmd_simulate)

    d = sub.add_parser("design", help="pick the base count for a target neighbor confusion")
    d.add_argument("--target-pe", type=float, required=True)
    d.add_argument("--s", type=float, required=True)
    d.add_argument("--kind", default="psk", choices=["psk", "ask"])
    d.add_argument("--s-min", type=float, default=None)
    d.add_argument("--format", default="csv", choices=["csv", "json"])
    d.add_argument("--out", default=None)
    d.set_defaults(fn=cmd_design)

    r = sub.add_parser("reproduce", help="recompute every reference figure and report pass/fail")
    r.add_argument("--out", default=None)
    r.add_argument("--format", default="csv", choices=["csv", "json"])
    r.set_defaults(fn=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
