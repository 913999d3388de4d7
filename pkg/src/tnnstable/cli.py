"""Command-line front end.

Every invocation writes one JSON document to stdout (or ``--output``).  Exit
codes: 0 the property holds, 1 refuted with a witness, 2 invalid input,
3 undetermined.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import campaign, formats
from .errors import FormatError, TnnStableError
from .grassmann import (
    is_tnn_point,
    plucker_of_matrix,
    representing_polynomial,
)
from .linalg import (
    is_totally_nonnegative,
    is_totally_positive,
    random_rational_matrix,
    random_tnn_word,
    random_tp_matrix,
    word_to_matrix,
)
from .operators import (
    PreserverStatus,
    apply_dense,
    delta_Z,
    exp_t_delta,
    sharp_of_matrix,
    symbol,
    test_sharp_preserver_exact,
    test_stability_preserver,
)
from .poly import elementary_symmetric, lex_key
from .stability import (
    METHODS,
    OracleInapplicable,
    check_rayleigh,
    decide_stability,
    permanent_poly,
    sq_minor_poly,
)
from .witness import plucker_of_poly, validate_witness

OK, REFUTED, INVALID, UNDETERMINED = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 10_000
    method: str = "auto"
    output: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FormatError(f"arguments: {message}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _result(command: str, code: int, status: str, **payload) -> tuple[int, dict]:
    doc = {"command": command, "exit_code": code, "status": status}
    doc.update(payload)
    return code, doc


# -- input loading -----------------------------------------------------------------------------

def _poly(path):
    return formats.poly_from_json(formats.load_file(path))


def _matrix(path):
    return formats.matrix_from_json(formats.load_file(path))


def _plucker(path):
    return formats.plucker_from_json(formats.load_file(path))


def _operator(path):
    return formats.operator_from_json(formats.load_file(path))


# -- subcommands ------------------------------------------------------------------------------------

def cmd_stability_check(cfg: RunConfig, args):
    f = _poly(args.poly)
    v = decide_stability(f, cfg.method, cfg.samples, cfg.seed)
    inp = {"poly": formats.poly_to_json(f)}
    if isinstance(v, OracleInapplicable):
        return _result(cfg.command, UNDETERMINED, "Inapplicable", input=inp,
                       reason=formats.to_jsonable(v.reason))
    code = {True: OK, False: REFUTED, None: UNDETERMINED}[v.stable]
    return _result(cfg.command, code, v.status.value, input=inp,
                   witness=formats.to_jsonable(v.witness), certificate=list(v.certificate),
                   certified=v.certified)


def cmd_stability_rayleigh(cfg: RunConfig, args):
    f = _poly(args.poly)
    r = check_rayleigh(f, cfg.samples if args.samples is not None else 1000, cfg.seed)
    inp = {"poly": formats.poly_to_json(f)}
    if r.ok:
        return _result(cfg.command, OK, r.kind, input=inp, points_checked=r.points_checked,
                       certified=False)
    return _result(cfg.command, REFUTED, r.kind, input=inp, witness=formats.to_jsonable(r))


def _minor_check(cfg: RunConfig, args, test):
    a = _matrix(args.matrix)
    cert = test(a)
    inp = {"matrix": formats.matrix_to_json(a)}
    if cert.ok:
        return _result(cfg.command, OK, cert.kind, input=inp, certificate=cert.kind)
    return _result(cfg.command, REFUTED, cert.kind, input=inp, witness=formats.to_jsonable(cert))


def cmd_tnn_check(cfg, args):
    return _minor_check(cfg, args, is_totally_nonnegative)


def cmd_tnn_tp_check(cfg, args):
    return _minor_check(cfg, args, is_totally_positive)


def cmd_grassmann_plucker(cfg, args):
    m = _matrix(args.matrix)
    p = plucker_of_matrix(m)
    return _result(cfg.command, OK, "Point", plucker=formats.plucker_to_json(p))


def cmd_grassmann_check(cfg, args):
    p = _plucker(args.plucker)
    cert = is_tnn_point(p)
    inp = {"plucker": formats.plucker_to_json(p)}
    if cert.ok:
        return _result(cfg.command, OK, cert.kind, input=inp, phase=formats.to_jsonable(cert.phase))
    return _result(cfg.command, REFUTED, cert.kind, input=inp, witness=formats.to_jsonable(cert))


def cmd_grassmann_represent(cfg, args):
    p = _plucker(args.plucker)
    return _result(cfg.command, OK, "Polynomial", poly=formats.poly_to_json(representing_polynomial(p)))


def cmd_op_sharp(cfg, args):
    a, f = _matrix(args.matrix), _poly(args.poly)
    return _result(cfg.command, OK, "Polynomial", poly=formats.poly_to_json(sharp_of_matrix(a)(f)))


def cmd_op_symbol(cfg, args):
    a = _matrix(args.matrix)
    return _result(cfg.command, OK, "Polynomial", poly=formats.poly_to_json(symbol(sharp_of_matrix(a))))


def cmd_op_preserver(cfg, args):
    if (args.matrix is None) == (args.operator is None):
        raise FormatError("arguments: give exactly one of --matrix or --operator")
    if args.matrix is not None:
        a = _matrix(args.matrix)
        v = test_sharp_preserver_exact(a)
        inp = {"matrix": formats.matrix_to_json(a)}
    else:
        phi = _operator(args.operator)
        v = test_stability_preserver(phi, cfg.samples, cfg.seed)
        inp = {"operator": formats.operator_to_json(phi)}
    code = {
        PreserverStatus.TRUE_PRESERVER: OK,
        PreserverStatus.RANK_ONE_PRESERVER: OK,
        PreserverStatus.NOT_PRESERVER: REFUTED,
        PreserverStatus.UNDETERMINED: UNDETERMINED,
    }[v.status]
    return _result(cfg.command, code, v.status.value, input=inp, rank=v.rank,
                   witness=formats.to_jsonable(v.witness), certificate=list(v.via))


def cmd_delta_build(cfg, args):
    z = _matrix(args.matrix)
    return _result(cfg.command, OK, "Operator", operator=formats.operator_to_json(delta_Z(z)))


def cmd_delta_exp(cfg, args):
    z = _matrix(args.matrix)
    mat = exp_t_delta(z, args.t)
    payload = {"t": repr(args.t), "certified": False}
    if args.apply is not None:
        payload["poly"] = formats.poly_to_json(apply_dense(mat, _poly(args.apply)))
    else:
        payload["matrix"] = [[repr(float(x)) for x in row] for row in mat]
    return _result(cfg.command, OK, "Dense", **payload)


def cmd_gen_tnn_word(cfg, args):
    w = random_tnn_word(args.n, args.len, cfg.seed)
    return _result(cfg.command, OK, "Generated", word=formats.word_to_json(w),
                   matrix=formats.matrix_to_json(word_to_matrix(w)))


def cmd_gen_tp(cfg, args):
    return _result(cfg.command, OK, "Generated",
                   matrix=formats.matrix_to_json(random_tp_matrix(args.n, cfg.seed)))


def cmd_gen_stable(cfg, args):
    if args.kind == "esym":
        if args.n is None or args.k is None:
            raise FormatError("arguments: esym needs --n and --k")
        f = elementary_symmetric(args.n, args.k)
    else:
        if args.matrix is not None:
            m = _matrix(args.matrix)
        else:
            if args.n is None or args.k is None:
                raise FormatError(f"arguments: {args.kind} needs --matrix or --n and --k")
            m = random_rational_matrix(args.n, args.k, random.Random(cfg.seed),
                                       nonneg=args.kind == "perm")
        f = sq_minor_poly(m) if args.kind == "sqminor" else permanent_poly(m)
    return _result(cfg.command, OK, "Generated", poly=formats.poly_to_json(f))


def _campaign(cfg, args, kind: str, params: tuple, label: str):
    names = ("n", "k", "seed", "samples") if kind == "thm1" else ("n", "seed", "samples")
    recorded = {"kind": kind, **dict(zip(names, params))}
    sink = handle = None
    if args.records is not None:
        handle = open(args.records, "a" if args.offset else "w", encoding="utf-8")

        def _write(rec):
            handle.write(json.dumps(rec, sort_keys=True) + "\n")
            handle.flush()

        sink = _write

    try:
        recs = campaign.run_trials(kind, params, args.trials, args.offset, args.jobs, sink)
    finally:
        if handle:
            handle.close()
    agree = sum(1 for r in recs if r["agree"])
    good = sum(1 for r in recs if r["expected"])
    total = len(recs)
    failures = [r for r in recs if not r["expected"]]
    summary = {
        "report": f"{agree}/{total} {label} agreement",
        "trials": total,
        "agreement": agree,
        "as_expected": good,
        "offset": args.offset,
        "seed": cfg.seed,
    }
    if failures:
        return _result(cfg.command, REFUTED, "Refuted", params=recorded, summary=summary,
                       witness=failures)
    return _result(cfg.command, OK, "Verified", params=recorded, summary=summary)


def cmd_campaign_thm1(cfg, args):
    if not 1 <= args.k < args.n:
        raise FormatError("arguments: need 1 <= k < n")
    return _campaign(cfg, args, "thm1", (args.n, args.k, cfg.seed, cfg.samples), "oracle/exact")


def cmd_campaign_thm2(cfg, args):
    return _campaign(cfg, args, "thm2", (args.n, cfg.seed, cfg.samples), "exact/symbol")


def cmd_verify(cfg, args):
    doc = formats.load_file(args.result)
    ok = revalidate_result(doc)
    return _result(cfg.command, OK if ok else REFUTED, "WitnessValid" if ok else "WitnessInvalid")


# -- witness round trip ---------------------------------------------------------------------------

def revalidate_result(doc: dict) -> bool:
    """Re-check the witness of an exit-1 document against the input it embeds."""
    if not isinstance(doc, dict) or doc.get("exit_code") != REFUTED:
        raise FormatError("result: not a refutation document")
    cmd = doc.get("command", "")
    w = doc.get("witness")
    if cmd.startswith("campaign"):
        params = doc["params"]
        return bool(w) and all(not rec["expected"] and _replay(params, rec) == rec for rec in w)
    inp = doc.get("input", {})
    if "poly" in inp:
        f = formats.poly_from_json(inp["poly"], "input.poly")
        plucker = plucker_of_poly(f) if f.is_homogeneous() and not f.is_zero() else None
        return validate_witness(w, poly=f, plucker=plucker)
    if "matrix" in inp:
        a = formats.matrix_from_json(inp["matrix"], "input.matrix")
        return validate_witness(w, matrix=a)
    if "plucker" in inp:
        return validate_witness(w, plucker=formats.plucker_from_json(inp["plucker"], "input.plucker"))
    if "operator" in inp:
        phi = formats.operator_from_json(inp["operator"], "input.operator")
        target = symbol(phi) if (doc.get("rank") or 0) > 1 else _rank_one_image(phi)
        return validate_witness(w, poly=target, plucker=plucker_of_poly(target)
                                if target.is_homogeneous() else None)
    raise FormatError("result.input: nothing to validate against")


def _rank_one_image(phi):
    return next(img for _, img in sorted(phi.images.items(), key=lambda kv: lex_key(kv[0])))


def _replay(params: dict, rec: dict) -> dict:
    """Re-run one campaign trial from its recorded parameters."""
    if params["kind"] == "thm1":
        return campaign.thm1_trial(params["n"], params["k"], rec["trial"], params["seed"], params["samples"])
    return campaign.thm2_trial(params["n"], rec["trial"], params["seed"], params["samples"])


# -- argument parsing --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--samples", type=_positive, default=None)
    common.add_argument("--output", default=None, help="write the result here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indented output")

    p = _Parser(prog="tnnstable", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, **kw):
        q = group.add_parser(name, parents=[common], **kw)
        q.set_defaults(fn=fn)
        return q

    st = groups.add_parser("stability").add_subparsers(dest="action", required=True)
    q = sub(st, "check", cmd_stability_check)
    q.add_argument("--poly", required=True)
    q.add_argument("--method", choices=METHODS, default="auto")
    sub(st, "rayleigh", cmd_stability_rayleigh).add_argument("--poly", required=True)

    tn = groups.add_parser("tnn").add_subparsers(dest="action", required=True)
    sub(tn, "check", cmd_tnn_check).add_argument("--matrix", required=True)
    sub(tn, "tp-check", cmd_tnn_tp_check).add_argument("--matrix", required=True)

    gr = groups.add_parser("grassmann").add_subparsers(dest="action", required=True)
    sub(gr, "plucker", cmd_grassmann_plucker).add_argument("--matrix", required=True)
    sub(gr, "check", cmd_grassmann_check).add_argument("--plucker", required=True)
    sub(gr, "represent", cmd_grassmann_represent).add_argument("--plucker", required=True)

    op = groups.add_parser("op").add_subparsers(dest="action", required=True)
    q = sub(op, "sharp", cmd_op_sharp)
    q.add_argument("--matrix", required=True)
    q.add_argument("--poly", required=True)
    sub(op, "symbol", cmd_op_symbol).add_argument("--matrix", required=True)
    q = sub(op, "preserver", cmd_op_preserver)
    q.add_argument("--matrix")
    q.add_argument("--operator")

    de = groups.add_parser("delta").add_subparsers(dest="action", required=True)
    sub(de, "build", cmd_delta_build).add_argument("--matrix", required=True)
    q = sub(de, "exp", cmd_delta_exp)
    q.add_argument("--matrix", required=True)
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--apply")

    ge = groups.add_parser("gen").add_subparsers(dest="action", required=True)
    q = sub(ge, "tnn-word", cmd_gen_tnn_word)
    q.add_argument("--n", type=_positive, required=True)
    q.add_argument("--len", type=int, required=True)
    sub(ge, "tp", cmd_gen_tp).add_argument("--n", type=_positive, required=True)
    q = sub(ge, "stable", cmd_gen_stable)
    q.add_argument("--kind", choices=("esym", "sqminor", "perm"), required=True)
    q.add_argument("--n", type=_positive)
    q.add_argument("--k", type=int)
    q.add_argument("--matrix")

    ca = groups.add_parser("campaign").add_subparsers(dest="action", required=True)
    for name, fn in (("thm1", cmd_campaign_thm1), ("thm2", cmd_campaign_thm2)):
        q = sub(ca, name, fn)
        q.add_argument("--n", type=_positive, required=True)
        if name == "thm1":
            q.add_argument("--k", type=_positive, required=True)
        q.add_argument("--trials", type=_positive, required=True)
        q.add_argument("--offset", type=int, default=0, help="first trial index (resume)")
        q.add_argument("--records", help="append one JSON line per trial to this file")
        q.add_argument("--jobs", type=_positive, default=1)

    sub(groups, "verify", cmd_verify).add_argument("--result", required=True)
    return p


def run(argv=None) -> tuple[int, dict, argparse.Namespace | None]:
    args = None
    try:
        args = build_parser().parse_args(argv)
        command = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
        cfg = RunConfig(
            command=command,
            inputs={k: v for k, v in vars(args).items()
                    if k in ("poly", "matrix", "plucker", "operator", "apply", "result") and v},
            seed=args.seed,
            samples=args.samples if args.samples is not None else 10_000,
            method=getattr(args, "method", "auto"),
            output=args.output,
        )
        return (*args.fn(cfg, args), args)
    except (FormatError, TnnStableError) as exc:
        return INVALID, {"exit_code": INVALID, "status": "InvalidInput",
                         "error": {"type": type(exc).__name__, "message": str(exc)}}, args


def main(argv=None) -> int:
    code, doc, args = run(argv)
    text = formats.dumps(doc, pretty=bool(args and args.pretty)) + "\n"
    if args is not None and args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
