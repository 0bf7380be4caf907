"""Command-line front end: realization loading, batch verification,
certificate emission and replay.

Machine output is JSON on stdout; human-readable tables go to stderr under
--verbose.  Exit codes: 0 verified, 1 verification failed, 2 usage or
configuration error.  Replaying a certificate recomputes it from the stored
system and inputs and must reproduce the checksum bit-identically.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import coxeter, soergel, hecke, dg, braidhom
from .coxeter import (load_realization, parse_word, parse_braid,
                      RealizationError, PRESETS)
from .ring import rf_str

PLAN_FINGERPRINT = ("default-plan-v1: shortlex-minimal reduced words, "
                    "BFS braid moves, lexicographic tie-breaks")


class UsageError(Exception):
    pass


def _resolve_system(name):
    if name in PRESETS:
        return name, PRESETS[name]
    search = os.environ.get("SOERGEL_SYSTEM_PATH")
    candidates = [name]
    if search:
        candidates.append(os.path.join(search, name))
        candidates.append(os.path.join(search, name + ".json"))
    for path in candidates:
        if os.path.exists(path):
            with open(path) as fh:
                return name, json.load(fh)
    raise UsageError(f"unknown system {name!r}")


def _fingerprint(config):
    blob = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _names(R):
    return [f"a_{g}" for g in R.generators]


def _mor_json(R, m):
    names = _names(R)
    return {
        "src": "".join(R.generators[i] for i in m.src) or "1",
        "tgt": "".join(R.generators[i] for i in m.tgt) or "1",
        "degree": m.degree,
        "entries": {f"{''.join(map(str, f))}|{''.join(map(str, e))}":
                    rf_str(v, names)
                    for (f, e), v in sorted(m.entries.items())},
    }


def _hecke_json(R, h):
    out = {}
    for x, c in sorted(h.coords.items(), key=lambda kv: kv[0].index):
        word = "".join(R.generators[i] for i in R.canonical_word(x)) or "e"
        out[word] = repr(c)
    return out


def _dghom_json(R, phi):
    comps = {}
    for (u, v), m in sorted(phi.comps.items()):
        su = phi.src.by_sid[u]
        sv = phi.tgt.by_sid[v]
        ku = "".join(map(str, su.origin)) if su.origin is not None else str(u)
        kv = "".join(map(str, sv.origin)) if sv.origin is not None else str(v)
        comps[f"{ku}->{kv}"] = _mor_json(R, m)
    return {"p": phi.p, "components": comps}


def emit(cert, out=None):
    blob = json.dumps(cert, sort_keys=True, indent=1)
    checksum = hashlib.sha256(blob.encode()).hexdigest()
    cert = dict(cert)
    cert["replay_checksum"] = checksum
    text = json.dumps(cert, sort_keys=True, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return checksum


def _base_cert(command, name, config, inputs):
    return {
        "command": command,
        "system": name,
        "realization_fingerprint": _fingerprint(config),
        "plan_fingerprint": PLAN_FINGERPRINT,
        "inputs": inputs,
    }


# -- commands -------------------------------------------------------------------

def cmd_relations(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    report = soergel.validate_relations(R, include_m4=args.with_m4)
    ok = all(r["ok"] for r in report)
    cert = _base_cert("relations", name, config,
                      {"with_m4": bool(args.with_m4)})
    cert["verdict"] = "pass" if ok else "fail"
    cert["report"] = report
    if args.verbose:
        for r in report:
            print(f"{'PASS' if r['ok'] else 'FAIL':4}  {r['colors']:8} "
                  f"{r['relation']}", file=sys.stderr)
    emit(cert, args.out)
    return 0 if ok else 1


def cmd_complex(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    braid = parse_braid(R, args.braid)
    C = dg.rouquier(R, braid)
    summands = []
    for sm in C.summands:
        summands.append({
            "origin": "".join(map(str, sm.origin)),
            "word": "".join(R.generators[i] for i in sm.word) or "1",
            "q": sm.q, "p": sm.p,
        })
    diffs = {}
    for (u, v), m in sorted(C.diff.items()):
        ku = "".join(map(str, C.by_sid[u].origin))
        kv = "".join(map(str, C.by_sid[v].origin))
        diffs[f"{ku}->{kv}"] = _mor_json(R, m)
    cert = _base_cert("complex", name, config, {"braid": args.braid})
    cert["summands"] = summands
    cert["differential"] = diffs
    cert["verdict"] = "ok"
    if args.verbose:
        for sm in summands:
            print(f"  {sm['origin']}: B_{sm['word']} q={sm['q']} p={sm['p']}",
                  file=sys.stderr)
    emit(cert, args.out)
    return 0


def cmd_d2check(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    C = dg.rouquier(R, parse_braid(R, args.braid))
    ok = C.d_square_is_zero()
    cert = _base_cert("d2check", name, config, {"braid": args.braid})
    cert["verdict"] = "pass" if ok else "fail"
    emit(cert, args.out)
    return 0 if ok else 1


def cmd_euler(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    C = dg.rouquier(R, parse_braid(R, args.braid))
    ch = hecke.euler_char(C)
    cert = _base_cert("euler", name, config, {"braid": args.braid})
    cert["euler_characteristic"] = _hecke_json(R, ch)
    cert["verdict"] = "ok"
    emit(cert, args.out)
    return 0


def cmd_gamma(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    pair = args.pair.split(",")
    if len(pair) != 2:
        raise UsageError("--pair wants two generator names, e.g. s,t")
    s, t = (R.gen_index(x.strip()) for x in pair)
    basis, labels0, particular, null, beta = braidhom.solve_gamma(R, s, t)
    g = braidhom.gamma_element(R, s, t)
    closed = dg.hom_differential(g).is_zero()
    coeffs = []
    for i, L in enumerate(labels0):
        base = particular.get(i, Fraction(0))
        slopes = [vec.get(i, Fraction(0)) for vec in null]
        coeffs.append({
            "label": repr(L),
            "coefficient": str(base),
            "free_parameter_slopes": [str(x) for x in slopes],
        })
    cert = _base_cert("gamma", name, config, {"pair": args.pair})
    cert["free_parameters"] = len(null)
    cert["coefficients"] = coeffs
    cert["closed"] = closed
    cert["verdict"] = "verified" if closed else "failed"
    emit(cert, args.out)
    return 0 if closed else 1


def cmd_inverse(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    s = R.gen_index(args.gen)
    c1, c2 = braidhom.inverse_certificates(R, s)
    cert = _base_cert("inverse", name, config, {"gen": args.gen})
    cert["verdict"] = "verified"
    cert["identities"] = [
        "eta- . eps+ = id (exact)",
        "id - eps+ . eta- = d(h) with the two-term h",
        "eta+ . eps- = id (exact)",
        "id - eps- . eta+ = d(h') with the two-term h'",
    ]
    cert["homotopy"] = _dghom_json(R, c1.h)
    cert["homotopy_other_order"] = _dghom_json(R, c2.h)
    emit(cert, args.out)
    return 0


def cmd_rouquier_formula(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    w = parse_word(R, args.w)
    v = parse_word(R, args.v)
    try:
        c = braidhom.rouquier_formula(R, w, v)
    except soergel.WordMismatch as exc:
        raise UsageError(str(exc))
    cert = _base_cert("rouquier-formula", name, config,
                      {"w": args.w, "v": args.v})
    cert["verdict"] = c.verdict
    cert["labels_contracted"] = len(c.labels)
    if c.survivor is not None:
        cert["survivor"] = _dghom_json(R, c.survivor)
    emit(cert, args.out)
    return 0


def cmd_hom(args):
    name, config = _resolve_system(args.system)
    R = load_realization(config)
    A = dg.rouquier(R, parse_braid(R, args.source))
    B = dg.rouquier(R, parse_braid(R, args.target))
    lo, hi = (int(x) for x in args.cohrange.split(":"))
    table = dg.cohomology_window(A, B, range(lo, hi + 1),
                                 range(0, args.window + 1))
    cert = _base_cert("hom", name, config,
                      {"source": args.source, "target": args.target,
                       "cohrange": args.cohrange, "window": args.window})
    cert["dimensions"] = {f"p={p},D={d}": dim
                          for (p, d), dim in sorted(table.items()) if dim}
    cert["verdict"] = "ok"
    emit(cert, args.out)
    return 0


COMMANDS = {
    "relations": cmd_relations,
    "complex": cmd_complex,
    "d2check": cmd_d2check,
    "euler": cmd_euler,
    "gamma": cmd_gamma,
    "inverse": cmd_inverse,
    "rouquier-formula": cmd_rouquier_formula,
    "hom": cmd_hom,
}


def cmd_replay(args):
    with open(args.file) as fh:
        stored = json.load(fh)
    checksum = stored.pop("replay_checksum", None)
    if checksum is None:
        raise UsageError("certificate has no replay checksum")
    command = stored.get("command")
    if command not in COMMANDS:
        raise UsageError(f"cannot replay command {command!r}")
    blob = json.dumps(stored, sort_keys=True, indent=1)
    if hashlib.sha256(blob.encode()).hexdigest() != checksum:
        print("replay: stored checksum does not match stored data",
              file=sys.stderr)
        return 1
    # recompute from system + inputs into a temporary file and compare
    ns = argparse.Namespace(system=stored["system"], out=args._tmpfile,
                            verbose=False, with_m4=False)
    for k, v in stored["inputs"].items():
        setattr(ns, k, v)
    code = COMMANDS[command](ns)
    with open(args._tmpfile) as fh:
        fresh = json.load(fh)
    if fresh.get("replay_checksum") != checksum:
        print("replay: recomputed certificate differs", file=sys.stderr)
        return 1
    print(json.dumps({"replay": "ok", "command": command,
                      "checksum": checksum}, indent=1))
    return code


def build_parser():
    p = argparse.ArgumentParser(
        prog="soergeldg",
        description="exact Soergel calculus and Rouquier-complex certificates")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_common(sp):
        sp.add_argument("--system", required=True,
                        help="preset name or realization JSON file")
        sp.add_argument("--out", help="write the certificate to a file")
        sp.add_argument("--verbose", action="store_true")

    sp = sub.add_parser("relations", help="validate the defining relations")
    add_common(sp)
    sp.add_argument("--with-m4", action="store_true",
                    help="include the m=4 two-color relations")

    for nm, hl, field in (("complex", "print a Rouquier complex", "braid"),
                          ("d2check", "check d^2 = 0", "braid"),
                          ("euler", "Euler characteristic", "braid")):
        sp = sub.add_parser(nm, help=hl)
        add_common(sp)
        sp.add_argument("--braid", required=True,
                        help='braid word, e.g. "s s t-"')

    sp = sub.add_parser("gamma", help="solve the braid-relation morphism")
    add_common(sp)
    sp.add_argument("--pair", required=True, help="two generators, e.g. s,t")

    sp = sub.add_parser("inverse", help="inverse-relation certificates")
    add_common(sp)
    sp.add_argument("--gen", required=True, help="generator name")

    sp = sub.add_parser("rouquier-formula", help="Hom(F_w+, F_v-) verdict")
    add_common(sp)
    sp.add_argument("--w", required=True)
    sp.add_argument("--v", required=True)

    sp = sub.add_parser("hom", help="windowed cohomology dimensions")
    add_common(sp)
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--cohrange", default="-2:2")
    sp.add_argument("--window", type=int, default=4)

    sp = sub.add_parser("replay", help="re-verify a stored certificate")
    sp.add_argument("file")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "replay":
            import tempfile
            with tempfile.NamedTemporaryFile("w", suffix=".json",
                                             delete=False) as tf:
                args._tmpfile = tf.name
            try:
                return cmd_replay(args)
            finally:
                os.unlink(args._tmpfile)
        handler = COMMANDS[args.cmd]
        return handler(args)
    except (UsageError, RealizationError, coxeter.UnknownGenerator) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
