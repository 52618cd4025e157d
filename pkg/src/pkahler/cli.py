"""Command-line front end.

Exit codes: 0 success, 1 failed identity or inconsistent verdicts, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import detector, model, positivity
from .detector import CLASS_TAGS, ConsistencyError
from .exterior import Form, Scalar
from .model import ModelError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def parse_p(text: str | None, n: int) -> list:
    if text is None:
        return list(range(1, n))
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise InputError(f"bad --p value {text!r}")
    bad = [p for p in out if not 1 <= p <= n - 1]
    if bad:
        raise InputError(f"p={bad[0]} outside [1, {n - 1}]")
    return sorted(set(out))


def parse_classes(values) -> list:
    if not values:
        return list(CLASS_TAGS)
    out = []
    for v in values:
        for tag in v.split(","):
            if tag not in CLASS_TAGS:
                raise InputError(f"unknown class {tag!r}; expected one of {', '.join(CLASS_TAGS)}")
            out.append(tag)
    return out


def parse_form(text: str) -> Form:
    """Form from inline JSON or a JSON file.

    ``{"n": 2, "p": 1, "terms": [{"I": [1], "J": [1], "re": "0", "im": "1/2"}]}``;
    ``p`` is optional unless the form is zero.
    """
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        doc = json.loads(text)
        n = int(doc["n"])
        coeffs = {}
        for t in doc["terms"]:
            key = (tuple(int(i) for i in t["I"]), tuple(int(j) for j in t["J"]))
            c = Scalar.parse(str(t.get("re", "0")), str(t.get("im", "0")))
            coeffs[key] = coeffs.get(key, Scalar(0)) + c
        bideg = (int(doc["p"]), int(doc["p"])) if "p" in doc else None
        return Form(n, coeffs, bideg)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed form: {exc}")


def _seed(args) -> int:
    env = os.environ.get("PKK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"PKK_SEED={env!r} is not an integer")
    return args.seed


# --- commands -------------------------------------------------------------------

def cmd_verify_example(args) -> int:
    m = model.load_model(args.model)
    if not m.same_structure(model.sl2c()):
        raise InputError("model is not the bundled SL(2,C) example")
    report = model.verify_sl2c_example(model.build_complex(m), strict=False)
    if args.format == "json":
        doc = {"ok": report.ok,
               "checks": [{"name": ch.name, "passed": ch.passed, "detail": ch.detail,
                           "residual": detector._form_to_json(ch.residual) if ch.residual is not None else None}
                          for ch in report.checks],
               "exact_scale": str(report.exact_scale) if report.exact_scale is not None else None}
        print(json.dumps(doc, indent=2))
    else:
        for ch in report.checks:
            print(f"{'PASS' if ch.passed else 'FAIL'}  {ch.name}")
        bad = report.first_failure()
        if bad is not None:
            print(f"first failure: {bad.name}: {bad.detail}", file=sys.stderr)
            print(f"residual: {bad.residual!r}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_classify(args) -> int:
    m = model.load_model(args.model)
    c = model.build_complex(m)
    ps = parse_p(args.p, m.n)
    classes = parse_classes(args.cls)
    seed = _seed(args)
    try:
        report = detector.classify(c, ps, classes, tol=args.tol, seed=seed, strict=False)
    except ConsistencyError as exc:
        print(f"inconsistent verdicts: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        print(report.to_json(timings=False))
    else:
        print(f"model {m.name} (n={m.n}), tol={args.tol}, seed={seed}, {report.scope}")
        print(f"{'p':>2}  {'class':<5}  {'verdict':<13}  detail")
        for cell in report.cells:
            if cell.primal is not None:
                detail = f"margin {cell.primal.margin:.6g}"
                if cell.primal.source != "direct":
                    detail += f" ({cell.primal.source})"
            elif cell.dual is not None:
                detail = f"{len(cell.dual.atoms)} atoms"
                if cell.dual.source != "direct":
                    detail += f" ({cell.dual.source})"
            else:
                detail = ""
            print(f"{cell.p:>2}  {cell.tag:<5}  {cell.verdict:<13}  {detail}")
    if not report.consistent:
        print("verdicts are inconsistent", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_cones(args) -> int:
    omega = parse_form(args.form)
    try:
        p = positivity._require_real(omega)
    except ValueError as exc:
        raise InputError(str(exc))
    seed = _seed(args)
    verdicts = [
        positivity.is_positive(omega),
        positivity.is_weakly_positive(omega, tol=args.tol, seed=seed),
        positivity.is_transverse(omega, tol=args.tol, seed=seed),
        positivity.is_strongly_positive(omega, tol=args.tol, seed=seed),
    ]
    if args.format == "json":
        doc = []
        for v in verdicts:
            d = {"cone": v.cone, "status": v.status, "margin": v.margin}
            if v.witness is not None:
                w = v.witness
                d["witness"] = (detector._form_to_json(w) if isinstance(w, Form)
                                else detector._frame_to_json(w))
            if v.separator is not None:
                d["separator"] = detector._form_to_json(v.separator)
            if v.decomposition is not None:
                d["decomposition"] = [{"weight": str(a), "frame": detector._frame_to_json(f)}
                                      for a, f in v.decomposition]
            doc.append(d)
        print(json.dumps({"n": omega.n, "p": p, "verdicts": doc}, indent=2))
    else:
        print(f"real ({p},{p})-form, n={omega.n}")
        for v in verdicts:
            extra = f"  witness {v.witness!r}" if v.witness is not None and v.status != "IN" else ""
            margin = f"  margin {v.margin:.6g}" if v.margin is not None else ""
            print(f"  {v.cone:<12} {v.status:<13}{margin}{extra}")
    return EXIT_OK


def cmd_cohomology(args) -> int:
    m = model.load_model(args.model)
    c = model.build_complex(m)
    n = m.n
    dr = {j: model.cohomology_dim(c, "deRham", j) for j in range(2 * n + 1)}
    bc = {k: model.cohomology_dim(c, "BC", k) for k in range(n + 1)}
    ae = {k: model.cohomology_dim(c, "A", k) for k in range(n + 1)}
    w = {q: model.cohomology_dim(c, "W", q) for q in range(n - 1)}
    if args.format == "json":
        print(json.dumps({"model": m.name, "n": n, "scope": detector.SCOPE,
                          "deRham": dr, "BC": bc, "A": ae, "W": w}, indent=2))
    else:
        print(f"model {m.name} (n={n}), invariant cohomology")
        print("de Rham: " + "  ".join(f"b{j}={v}" for j, v in dr.items()))
        print(f"{'k':>2}  {'BC(k,k)':>8}  {'A(k,k)':>7}")
        for k in range(n + 1):
            print(f"{k:>2}  {bc[k]:>8}  {ae[k]:>7}")
        for q, v in w.items():
            print(f"W^({q + 2},{q + 1}) = {v}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pkahler", description="Generalized p-Kähler classes of invariant complex structures")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_model=True, default_model=None):
        if with_model:
            sp.add_argument("--model", default=default_model, required=default_model is None,
                            help=f"bundled name ({', '.join(model.BUNDLED)}) or JSON file")
        sp.add_argument("--tol", type=float, default=detector.DEFAULT_TOL)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("table", "json"), default="table")

    sp = sub.add_parser("verify-example", help="exact identity suite of the SL(2,C) example")
    common(sp, default_model="sl2c")
    sp.set_defaults(func=cmd_verify_example)

    sp = sub.add_parser("classify", help="primal/dual sweep over classes and p")
    common(sp)
    sp.add_argument("--p", help="p, a range a-b, or a comma list (default 1..n-1)")
    sp.add_argument("--class", dest="cls", action="append", help=f"one of {', '.join(CLASS_TAGS)} (repeatable)")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("cones", help="cone membership of a real (p,p)-form")
    common(sp, with_model=False)
    sp.add_argument("--form", required=True, help="inline JSON or a JSON file")
    sp.set_defaults(func=cmd_cones)

    sp = sub.add_parser("cohomology", help="invariant cohomology dimensions")
    common(sp)
    sp.set_defaults(func=cmd_cohomology)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except model.JacobiError as exc:
        print(f"model rejected: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
