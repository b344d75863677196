"""Command line: every module as a subcommand, JSON reports on stdout.

Exit codes: 0 success, 1 validation failure (structured error on stdout),
2 usage error (bad flags, unknown subcommand, missing input file).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, ConfigError, load_config
from .schemas import SchemaError, validate

__all__ = ["main", "to_jsonable"]


class UsageError(Exception):
    pass


class InputError(ValueError):
    """Malformed input file; carries the file path and a JSON pointer."""

    def __init__(self, path, pointer: str, message: str):
        super().__init__(f"{path}: {message} (at {pointer})")
        self.path, self.pointer, self.message = str(path), pointer, message


# -- I/O helpers -------------------------------------------------------------

def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def _existing(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {p}")
    return p


def read_json(path, schema: str | None = None):
    p = _existing(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(p, "", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if schema is not None:
        validate_input(doc, schema, p)
    return doc


def parse_matrix(doc) -> np.ndarray:
    if isinstance(doc, dict):
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    rows = [[complex(e["re"], e.get("im", 0.0)) if isinstance(e, dict) else complex(e) for e in r] for r in doc]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have different lengths")
    return np.array(rows)


def matrix_json(M) -> list:
    """Row-major array of ``{re, im}``."""
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in np.asarray(M, dtype=complex)]


def read_samples(path) -> list[tuple[float, complex]]:
    p = _existing(path)
    rows = list(csv.DictReader(io.StringIO(p.read_text())))
    if not rows or "epsilon" not in rows[0] or "value" not in rows[0]:
        raise InputError(p, "", "CSV needs a header row with columns 'epsilon' and 'value'")
    out = []
    for i, r in enumerate(rows):
        try:
            out.append((float(r["epsilon"]), complex(float(r["value"]), float(r.get("value_im") or 0.0))))
        except (TypeError, ValueError) as exc:
            raise InputError(p, f"/{i}", f"row {i + 2}: {exc}") from exc
    return out


def write_csv(path: Path, header: list[str], rows) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return str(path)


class Run:
    """Per-invocation state: config, output directory, collected artifacts."""

    def __init__(self, command: str, config: Config, inputs: list[str]):
        self.command, self.config, self.inputs = command, config, inputs
        self.out = Path(config.out) if config.out else None
        self.files: list[str] = []

    def csv(self, name: str, header, rows):
        if self.out is not None:
            self.files.append(write_csv(self.out / name, header, rows))

    def figure(self, fn, *args, name: str, **kwargs):
        if self.out is not None:
            self.files.append(fn(*args, path=self.out / name, **kwargs))

    def report(self, result, ok: bool = True) -> dict:
        rep = {"command": self.command, "ok": bool(ok), "result": result,
               "provenance": {"config": self.config.to_json(), "version": __version__, "inputs": self.inputs}}
        if self.out is not None:
            rep["artifacts"] = sorted(str(Path(f).name) for f in self.files)
            self.out.mkdir(parents=True, exist_ok=True)
            (self.out / f"{self.command.replace(' ', '_')}.json").write_text(dumps(rep) + "\n")
        return rep


# -- subcommands ---------------------------------------------------------------

def cmd_split(args, run: Run):
    from .symplectic import (PositiveQuadratic, SymplecticSpace, hamiltonian_matrix, pairing_matrix,
                             positivity_signature, spectral_splitting)
    doc = read_json(args.input, "split_input")
    space = SymplecticSpace(parse_matrix(doc["omega"]).real)
    quad = PositiveQuadratic(parse_matrix(doc["q"]))
    pair = spectral_splitting(hamiltonian_matrix(space, quad), space.omega)
    sig = positivity_signature(pair, space)
    _, cond = pairing_matrix(pair, space)
    lag = {k: float(np.linalg.norm(E.T @ space.omega @ E)) for k, E in (("plus", pair.E_plus), ("minus", pair.E_minus))}
    ev = pair.eigenvalues
    run.csv("eigenvalues.csv", ["re", "im"], [(z.real, z.imag) for z in np.sort_complex(ev)])
    from .plotting import plot_spectrum
    run.figure(plot_spectrum, ev, ev, name="eigenvalues.png")
    return {"E_plus": matrix_json(pair.E_plus), "E_minus": matrix_json(pair.E_minus),
            "eigenvalues": [{"re": z.real, "im": z.imag} for z in np.sort_complex(ev)],
            "certificate": {**sig, "lagrangian_defect": lag, "pairing_condition": cond, "method": pair.method,
                            "min_abs_imag": float(np.abs(ev.imag).min()), "positivity_c": quad.c}}


def cmd_expand_kernel(args, run: Run):
    from .jets import Jet
    from .laurent import LaurentSymbol, kernel_expansion
    doc = read_json(args.input)
    if isinstance(doc, dict) and "amplitude" in doc:
        validate_input(doc, "phase_kernel", args.input)
        symbol, phase = LaurentSymbol.from_json(doc["amplitude"]), Jet.from_json(doc["phase"])
    else:
        validate_input(doc, "laurent_symbol", args.input)
        symbol = LaurentSymbol.from_json(doc)
        phase = Jet.from_json(read_json(args.phase, "jet")) if args.phase else None
    sing = kernel_expansion(symbol, phase if phase is not None else Jet.zero(symbol.num_vars, symbol.order),
                            max_beta=args.max_beta)
    out = sing.to_json()
    if phase is None:
        out["phase"] = None
    return out


def validate_input(doc, schema, path):
    try:
        validate(doc, schema)
    except SchemaError as exc:
        raise InputError(path, exc.pointer, exc.detail) from exc


def cmd_fit(args, run: Run):
    from .laurent import fit_epsilon_expansion
    samples = read_samples(args.input)
    fit = fit_epsilon_expansion(samples, args.max_pole, args.max_taylor, args.max_log)
    eps = np.array([e for e, _ in samples])
    vals = np.array([v for _, v in samples])
    fitted = fit.evaluate(eps)
    run.csv("fit.csv", ["epsilon", "value", "fitted", "residual"],
            [(e, v.real, f.real, abs(v - f)) for e, v, f in zip(eps, vals, fitted)])
    from .plotting import plot_fit
    run.figure(plot_fit, eps, vals.real, fitted.real, name="fit.png")
    return {"expansion": fit.to_json(), "residual": fit.residual, "samples": len(samples),
            "model": {"max_pole": args.max_pole, "max_taylor": args.max_taylor, "max_log": args.max_log}}


def cmd_compose(args, run: Run):
    from .phase import PhaseKernel, compose_kernels, unit_factor, validate_phase
    k1 = PhaseKernel.from_json(read_json(args.kernel1, "phase_kernel"))
    k2 = PhaseKernel.from_json(read_json(args.kernel2, "phase_kernel"))
    order = min(run.config.order, min(k1.order, k2.order) - 2)
    out = compose_kernels(k1, k2, order, terms=args.terms)
    report = {"phase": validate_phase(out)}
    e, resid = unit_factor(out.phase, k1.phase.truncate(order))
    report["unit_factor"] = {"constant": complex(e.constant_term), "residual": resid}
    return {"kernel": out.to_json(), "validation": report, "order": order}


def cmd_project(args, run: Run):
    from .projectors import MatrixOperator, correct_projector, idempotency_defect, sign_projector
    S0 = parse_matrix(read_json(args.input, "matrix"))
    op = MatrixOperator(S0)
    S = correct_projector(op.entries, args.k_max)
    oracle = sign_projector(op.entries)
    err = float(np.abs(S - oracle).max())
    history = [(k, idempotency_defect(correct_projector(op.entries, k))) for k in range(1, min(args.k_max, 12) + 1)]
    run.csv("defects.csv", ["k_max", "idempotency_defect"], history)
    from .plotting import plot_defects, plot_spectrum
    run.figure(plot_spectrum, np.linalg.eigvals(S0), np.linalg.eigvals(S), name="spectrum.png")
    run.figure(plot_defects, [k for k, _ in history], [d for _, d in history], name="defects.png")
    defect = idempotency_defect(S)
    return {"projector": matrix_json(S), "oracle_max_error": err, "idempotency_defect": defect,
            "rank": int(round(np.trace(S).real)), "k_max": args.k_max,
            "passed": err < max(run.config.tol, 1e-8) and defect < max(run.config.tol, 1e-10)}


def cmd_deform(args, run: Run):
    from .projectors import SymbolOnC, deform_idempotent_symbols, symbol_compose
    a0 = SymbolOnC.from_json(read_json(args.symbol0, "symbol_on_c"))
    a1 = SymbolOnC.from_json(read_json(args.symbol1, "symbol_on_c"))
    path = deform_idempotent_symbols(a0, a1, args.steps)
    t = np.linspace(0, 1, len(path))
    defects = [float(np.abs(symbol_compose(s, s).values - s.values).max()) for s in path]
    run.csv("path_defects.csv", ["t", "idempotence_defect"], zip(t, defects))
    from .plotting import plot_defects
    run.figure(plot_defects, t, defects, name="path_defects.png")
    return {"path": [s.to_json() for s in path], "t": t, "defects": defects, "max_defect": max(defects)}


def _forms(args, count: int):
    from .contact import ContactFormS3, lambda_n
    if args.forms:
        if len(args.forms) != count:
            raise UsageError(f"expected {count} form file(s), got {len(args.forms)}")
        out = []
        for f in args.forms:
            doc = read_json(f, "contact_form")
            try:
                out.append(ContactFormS3.from_json(doc))
            except KeyError as exc:
                raise InputError(f, "", f"missing key {exc}") from exc
        return out
    if args.family is None:
        raise UsageError("give form files or --family")
    if args.family == "lambda_n":
        if args.n is None:
            raise UsageError("--family lambda_n needs --n")
        return [lambda_n(args.n)] * count
    return [ContactFormS3.from_json({"family": args.family})] * count


def _form_fields(form, run: Run, name: str):
    from .contact import contact_value
    from .plotting import plot_contact_form
    phi = np.linspace(0, math.pi / 2, 201)
    a, b, val = form.a(phi), form.b(phi), contact_value(form, phi)
    run.csv(f"{name}.csv", ["phi", "a", "b", "contact_value"], zip(phi, a, b, val))
    run.figure(plot_contact_form, phi, a, b, val, name=f"{name}.png", title=form.label)
    return val


def cmd_contact(args, run: Run):
    from .contact import S3Quadrature, glue_forms, is_contact, volume_integral
    q = S3Quadrature(run.config.n_phi, run.config.n_theta)
    if args.action == "glue":
        f1, f2 = _forms(args, 2)
        g = glue_forms(f1, f2)
        val = _form_fields(g, run, "glued")
        return {"is_contact": is_contact(g), "min_contact_value": float(val.min()),
                "parts": [f1.label, f2.label], "form": g.label}
    (form,) = _forms(args, 1)
    if args.action == "check":
        val = _form_fields(form, run, "form")
        lo, hi = float(val.min()), float(val.max())
        out = {"form": form.label, "is_contact": is_contact(form), "contact_value_range": [lo, hi]}
        if hi - lo <= max(run.config.tol, 1e-12):
            out["contact_value"] = round(0.5 * (lo + hi), 12)
        return out
    if args.action == "volume":
        vol = volume_integral(form, q)
        return {"form": form.label, "volume": vol, "grid": q.provenance()}
    from .hopf import hopf_invariant, linking_number, trivialize
    res = hopf_invariant(trivialize(form, require_contact=form.orientation > 0), q)
    out = {"form": form.label, "hopf": res.to_json()}
    if args.linking:
        out["linking"] = linking_number(trivialize(form, require_contact=False), seed=run.config.seed)
    return out


def cmd_logtrace(args, run: Run):
    from .logtrace import LogTraceScenario, library_scenarios, run_scenario
    from .plotting import plot_chain, plot_invariance
    if args.action == "run":
        if not args.scenario:
            raise UsageError("logtrace run needs a scenario file")
        scenarios = [LogTraceScenario.from_json(read_json(args.scenario, "scenario"))]
    else:
        scenarios = library_scenarios()
    results = [run_scenario(s) for s in scenarios]
    fams = [r["result"] for r in results if "beta0_bar" in r["result"]]
    if fams:
        run.csv("beta0_bar.csv", ["family", "t", "beta0_bar"],
                [(f["family"], t, v) for f in fams for t, v in zip(f["t"], f["beta0_bar"])])
        run.figure(plot_invariance, fams, name="invariance.png")
    for r in results:
        if "forced_L" in r["result"]:
            c = r["result"]
            run.csv("chain.csv", ["n", "L", "forced_L"], zip(c["n"], c["L"], c["forced_L"]))
            run.figure(plot_chain, c, name="chain.png")
    return results if args.action == "suite" else results[0]


def cmd_suite(args, run: Run):
    from .suite import run_suite
    rep = run_suite(run.config.seed, args.only)
    rows = rep["rows"]
    run.csv("suite.csv", ["id", "name", "passed"], [(r["id"], r["name"], r["passed"]) for r in rows])
    from .plotting import plot_suite
    run.figure(plot_suite, rows, name="suite.png")
    for r in rows:
        r.pop("seconds", None)
    return rep


def suite_table(rows) -> str:
    lines = [f"{'id':>3}  {'criterion':<28} result"]
    for r in rows:
        lines.append(f"{r['id']:>3}  {r['name']:<28} {'PASS' if r['passed'] else 'FAIL'}")
    return "\n".join(lines)


# -- parser --------------------------------------------------------------------

def _grid(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.lower().split("x")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be N or NPHIxNTHETA, got {text!r}")
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"grid must be N or NPHIxNTHETA with positive sizes, got {text!r}")
    return parts[0], parts[1]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--order", type=int, help="jet order")
    common.add_argument("--grid", type=_grid, help="quadrature grid N or NPHIxNTHETA")
    common.add_argument("--tol", type=float, help="comparison tolerance in (0, 1)")
    common.add_argument("--seed", type=int, help="RNG seed for randomized checks")
    common.add_argument("--out", help="directory for JSON/CSV reports and figures")

    p = _Parser(prog="tll", description="Logarithmic-trace laboratory.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    s = sub.add_parser("split", parents=[common], help="positive Lagrangian splitting of {omega, q}")
    s.add_argument("input")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("expand-kernel", parents=[common], help="pole and log coefficients of a Laurent symbol")
    s.add_argument("input")
    s.add_argument("--phase", help="phase jet JSON (when the input is a bare symbol)")
    s.add_argument("--max-beta", type=int, default=2)
    s.set_defaults(func=cmd_expand_kernel)

    s = sub.add_parser("fit-asymptotics", parents=[common], help="fit an epsilon expansion to CSV samples")
    s.add_argument("input")
    s.add_argument("--max-pole", type=int, default=2)
    s.add_argument("--max-taylor", type=int, default=3)
    s.add_argument("--max-log", type=int, default=0)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("compose", parents=[common], help="compose two phase kernels")
    s.add_argument("kernel1")
    s.add_argument("kernel2")
    s.add_argument("--terms", type=int, default=2)
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("project", parents=[common], help="correct a near-projector matrix")
    s.add_argument("input")
    s.add_argument("--k-max", type=int, default=40)
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("deform-symbols", parents=[common], help="idempotent path between two symbols")
    s.add_argument("symbol0")
    s.add_argument("symbol1")
    s.add_argument("--steps", type=int, default=10)
    s.set_defaults(func=cmd_deform)

    s = sub.add_parser("contact", parents=[common], help="contact forms on S^3")
    s.add_argument("action", choices=["check", "hopf", "glue", "volume"])
    s.add_argument("forms", nargs="*", help="form JSON file(s)")
    s.add_argument("--family", choices=["lambda_n", "lambda_st", "lambda_st_tilde", "lambda_0"])
    s.add_argument("--n", type=int)
    s.add_argument("--linking", action="store_true", help="also run the linking-number oracle (hopf)")
    s.set_defaults(func=cmd_contact)

    s = sub.add_parser("logtrace", parents=[common], help="log-trace scenarios")
    s.add_argument("action", choices=["run", "suite"])
    s.add_argument("scenario", nargs="?")
    s.set_defaults(func=cmd_logtrace)

    s = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    s.add_argument("--only", type=int, nargs="+", choices=range(1, 12), metavar="ID")
    s.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    s.set_defaults(func=cmd_suite)
    return p


def _error(kind: str, message: str, **extra) -> str:
    return dumps({"ok": False, "error": {"type": kind, "message": message, **extra}})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        grid = args.grid or (None, None)
        config = load_config(order=args.order, n_phi=grid[0], n_theta=grid[1], tol=args.tol,
                             seed=args.seed, out=args.out)
        command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
        inputs = [str(getattr(args, k)) for k in ("input", "kernel1", "kernel2", "symbol0", "symbol1", "scenario")
                  if getattr(args, k, None)] + list(getattr(args, "forms", []) or [])
        run = Run(command, config, inputs)
        result = args.func(args, run)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except FileNotFoundError as exc:
        print(f"tll: error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(_error("InputError", exc.message, path=exc.path, pointer=exc.pointer))
        return 1
    except ConfigError as exc:
        print(_error("ConfigError", str(exc)))
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(_error(type(exc).__name__, str(exc)))
        return 1

    ok = bool(result.get("passed", True)) if isinstance(result, dict) else True
    report = run.report(result, ok)
    if args.command == "suite" and not args.json:
        print(suite_table(result["rows"]))
        print("all criteria passed" if ok else "some criteria FAILED")
    else:
        print(dumps(report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
