"""Command line front end.

Every report is a JSON document with sorted keys that embeds the run
configuration, so identical flags and input give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .descent import CatalogIdeal, descent_report, ideal_membership_salpha
from .errors import PadicIwasawaError, SchemaError
from .fukuda import ClassNumberSequence, fit_lambda_mu_nu, fukuda_check
from .genericity import SubmoduleFamily, det_certificate, image_rank, verify_generic
from .grassmann import (
    enumerate_finite,
    in_neighborhood,
    measure_ball_exact,
    sample_haar,
    standard_point,
    to_chart,
)
from .invariants import (
    InertiaData,
    SplittingProfile,
    check_assumption_decomp,
    d_of_k,
    s_catalog,
    s_from_inertia,
    s_prime_from_decomposition,
)
from .padic import CounterStream
from .series import AlphaVector, TruncatedSeries, parse_univariate
from .algebra import (
    CharIdeal,
    ElementaryModule,
    char_ideal,
    conclude_structure,
    dagger_pseudo_null,
    prime_to_higher_cyclotomic,
    weierstrass,
)

COMMANDS = (
    "gr-sample",
    "gr-measure",
    "generic-rank",
    "s-invariant",
    "salpha-membership",
    "descend",
    "weierstrass",
    "dagger",
    "fukuda",
)
RANDOMIZED = {"gr-sample", "gr-measure", "generic-rank"}


class UsageError(PadicIwasawaError):
    kind = "usage"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 10000
    a: int = 8
    D: int = 12
    p: int | None = None
    fmt: str = "json"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise UsageError("samples must be at least 1")
        if self.a < 1 or self.D < 1:
            raise UsageError("precision and truncation must be at least 1")
        if self.fmt not in ("json", "text"):
            raise UsageError("format is json or text")

    def embed(self) -> dict[str, Any]:
        return {"p": self.p, "a": self.a, "D": self.D, "seed": self.seed, "samples": self.samples}


def _need_p(config: RunConfig, payload: dict[str, Any] | None = None) -> int:
    if payload and "p" in payload:
        return int(payload["p"])
    if config.p is None:
        raise UsageError("--p is required")
    return config.p


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise SchemaError(f"expected a comma-separated integer list, got {text!r}") from exc


# ---------------------------------------------------------------------------
# command handlers: (config, options, payload) -> result dict


def _gr_sample(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    from scipy.stats import chi2

    p, d, i = _need_p(config), int(opts["d"]), int(opts["i"])
    classes = enumerate_finite(d, i, p, 1)
    hist = {_chart_key(to_chart(c)): 0 for c in classes}
    shown = []
    for k in range(config.samples):
        N = sample_haar(d, i, p, config.a, CounterStream(config.seed, k))
        if k < int(opts.get("show", 3)):
            shown.append(to_chart(N).to_dict())
        hist[_chart_key(to_chart(N.reduce(1)))] += 1
    expected = config.samples / len(hist)
    stat = sum((c - expected) ** 2 / expected for c in hist.values())
    df = len(hist) - 1
    return {
        "d": d,
        "i": i,
        "level1_histogram": hist,
        "chi_square": round(stat, 6),
        "df": df,
        "p_value": round(float(chi2.sf(stat, df)), 6) if df else 1.0,
        "points": shown,
    }


def _chart_key(c) -> str:
    return json.dumps(c.to_dict(), sort_keys=True, separators=(",", ":"))


def _gr_measure(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    p, d, i, n = _need_p(config), int(opts["d"]), int(opts["i"]), int(opts["n"])
    exact = measure_ball_exact(d, i, n, p)
    a = max(config.a, n)
    N0 = standard_point(d, i, p, a)
    hits = sum(
        in_neighborhood(sample_haar(d, i, p, a, CounterStream(config.seed, k)), N0, n)
        for k in range(config.samples)
    )
    freq = hits / config.samples
    sd = math.sqrt(float(exact) * (1 - float(exact)) / config.samples)
    return {
        "d": d,
        "i": i,
        "n": n,
        "exact": str(exact),
        "exact_float": round(float(exact), 12),
        "empirical": round(freq, 12),
        "hits": hits,
        "binomial_sd": round(sd, 12),
        "within_3sd": abs(freq - float(exact)) <= 3 * sd,
    }


def _family_payload(payload: Any) -> SubmoduleFamily:
    if not isinstance(payload, dict):
        raise SchemaError("expected a JSON object with the submodule family")
    return SubmoduleFamily.from_dict(payload)


def _generic_rank(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    fam = _family_payload(payload)
    d, i = fam.d, fam.i

    report = verify_generic(
        _FullImageRank(fam), d, i, fam.p, fam.a, config.samples, config.seed,
        workers=config.workers, certificate_used=True,
    )
    # exact recheck: every failure must have a vanishing certificate in its chart
    confirmed = all(
        det_certificate(fam, to_chart(sample_haar(d, i, fam.p, fam.a, CounterStream(config.seed, k)))).is_zero()
        for k in report.witnesses
    )
    out = report.to_dict()
    out.update({"d": d, "i": i, "failing_indices": list(report.witnesses[:20]),
                "failures_certified": confirmed})
    return out


class _FullImageRank:
    """Picklable property: every member maps onto a rank-i image."""

    def __init__(self, fam: SubmoduleFamily) -> None:
        self.fam = fam

    def __call__(self, N) -> bool:
        return all(image_rank(L, N) == self.fam.i for L in self.fam.members)


def _s_invariant(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    if not isinstance(payload, dict):
        raise SchemaError("expected a JSON object (splitting profile, inertia data or family)")
    n = int(opts.get("n", 1))
    if "class" in payload:
        prof = SplittingProfile.from_dict(payload)
        return {"source": "catalog", "d": d_of_k(prof), "s": s_catalog(prof)}
    if "inertia" in payload:
        data = InertiaData.from_dict(payload)
        out: dict[str, Any] = {"source": "inertia", "d": data.d, "inertia": s_from_inertia(data, n).to_dict()}
        out["s"] = out["inertia"]["s"]
        if data.decomposition is not None:
            out["decomposition"] = s_prime_from_decomposition(data, n).to_dict()
            out["s_prime"] = out["decomposition"]["s"]
            out["assumption_decomp"] = check_assumption_decomp(data)
        return out
    fam = _family_payload(payload)
    from .genericity import generic_min_s

    res = generic_min_s(fam, n)
    return {"source": "family", "d": fam.d, "s": res.s, "inertia": res.to_dict()}


def _salpha(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    p = _need_p(config)
    P = CatalogIdeal.parse(str(opts["ideal"]))
    alpha = AlphaVector(p, config.a, tuple(_ints(opts["alpha"])))
    return {
        "ideal": str(P),
        "alpha": list(alpha.entries),
        "member": ideal_membership_salpha(P, alpha, config.D),
    }


def _series_from(opts: dict[str, Any], payload: Any, config: RunConfig, nvars: int) -> TruncatedSeries:
    if opts.get("f") is not None:
        if nvars != 1:
            raise UsageError("multivariate series are accepted as JSON only")
        return parse_univariate(str(opts["f"]), _need_p(config), config.a, config.D)
    if isinstance(payload, dict) and "terms" in payload:
        f = TruncatedSeries.from_json(payload)
        if f.nvars != nvars:
            raise SchemaError(f"expected a series in {nvars} variable(s)")
        return f
    raise UsageError("no series given (use --f or a JSON payload)")


def _descend(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    f = _series_from(opts, payload, config, 2)
    alpha = AlphaVector(f.p, f.a, tuple(_ints(opts["alpha"])))
    return {"alpha": list(alpha.entries), **descent_report(f, alpha)}


def _weierstrass(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    return weierstrass(_series_from(opts, payload, config, 1)).to_dict()


def _dagger(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    if isinstance(payload, dict) and "f" in payload:
        c = char_ideal(ElementaryModule.from_dict(payload))
    else:
        c = CharIdeal.from_weierstrass(weierstrass(_series_from(opts, payload, config, 1)))
    out: dict[str, Any] = {
        "char_ideal": c.to_dict(),
        "dagger_pseudo_null": dagger_pseudo_null(c),
        "prime_to_higher_cyclotomic": prime_to_higher_cyclotomic(c),
    }
    if opts.get("s") is not None:
        out["structure"] = conclude_structure(
            c, bool(opts.get("nonsplit")), bool(opts.get("semisimple")), int(opts["s"])
        ).to_dict()
    return out


def _fukuda(config: RunConfig, opts: dict[str, Any], payload: Any) -> dict[str, Any]:
    n0 = int(opts.get("n0") or 0)
    s = int(opts.get("s") or 0)
    if isinstance(payload, dict):
        seq = ClassNumberSequence.from_dict(payload)
    elif isinstance(payload, str):
        seq = ClassNumberSequence.from_csv(payload, _need_p(config), n0, s)
    elif opts.get("e") is not None:
        seq = ClassNumberSequence(_need_p(config), tuple(_ints(opts["e"])), n0, s)
    else:
        raise UsageError("no sequence given (use --e or --input)")
    out = fukuda_check(seq).to_dict()
    try:
        out["fit"] = fit_lambda_mu_nu(seq).to_dict()
    except PadicIwasawaError as exc:
        out["fit"] = {"error": exc.kind, "message": str(exc)}
    out["sequence"] = seq.to_dict()
    return out


HANDLERS: dict[str, Callable[[RunConfig, dict[str, Any], Any], dict[str, Any]]] = {
    "gr-sample": _gr_sample,
    "gr-measure": _gr_measure,
    "generic-rank": _generic_rank,
    "s-invariant": _s_invariant,
    "salpha-membership": _salpha,
    "descend": _descend,
    "weierstrass": _weierstrass,
    "dagger": _dagger,
    "fukuda": _fukuda,
}


def run(command: str, config: RunConfig, options: dict[str, Any] | None = None,
        payload: Any = None) -> dict[str, Any]:
    """Run one command and return the report document."""
    if command not in HANDLERS:
        raise UsageError(f"unknown command {command!r}")
    result = HANDLERS[command](config, dict(options or {}), payload)
    cfg = config.embed()
    if cfg["p"] is None:
        cfg["p"] = _payload_p(payload, result)
    return {"command": command, "config": cfg, "result": result}


def _payload_p(payload: Any, result: dict[str, Any]) -> int | None:
    if isinstance(payload, dict) and "p" in payload:
        return int(payload["p"])
    if isinstance(payload, dict) and isinstance(payload.get("inertia"), dict):
        return int(payload["inertia"].get("p", 0)) or None
    return None


def error_document(command: str | None, exc: Exception) -> dict[str, Any]:
    kind = getattr(exc, "kind", type(exc).__name__)
    return {"error": {"command": command, "kind": kind, "message": str(exc)}}


def render(doc: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    lines: list[str] = []

    def walk(prefix: str, obj: Any) -> None:
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        else:
            lines.append(f"{prefix}: {json.dumps(obj, sort_keys=True)}")

    walk("", doc)
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--samples", type=int, default=10000)
    common.add_argument("--precision", "--a", dest="a", type=int, default=8)
    common.add_argument("--truncation", "--D", dest="D", type=int, default=12)
    common.add_argument("--p", type=int, default=None)
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    common.add_argument("--input", default=None, help="JSON or CSV payload file, '-' for stdin")
    common.add_argument("--workers", type=int, default=1)

    parser = _Parser(prog="padic-iwasawa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("gr-sample", parents=[common], help="Haar samples of Gr(i, Z_p^d)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--show", type=int, default=3)

    sp = sub.add_parser("gr-measure", parents=[common], help="measure of V_n(N_0)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sub.add_parser("generic-rank", parents=[common], help="generic image rank of a family")

    sp = sub.add_parser("s-invariant", parents=[common], help="s(k) from a profile or inertia data")
    sp.add_argument("--n", type=int, default=1, help="enumeration level")

    sp = sub.add_parser("salpha-membership", parents=[common], help="S_alpha in a catalog ideal")
    sp.add_argument("--ideal", required=True, help="generators, e.g. 'p,T2'")
    sp.add_argument("--alpha", required=True, help="comma-separated integers")

    sp = sub.add_parser("descend", parents=[common], help="descent of a characteristic ideal")
    sp.add_argument("--alpha", required=True)

    sp = sub.add_parser("weierstrass", parents=[common], help="Weierstrass data of a series")
    sp.add_argument("--f", default=None, help="series such as '9+3T'")

    sp = sub.add_parser("dagger", parents=[common], help="dagger pseudo-nullity tests")
    sp.add_argument("--f", default=None)
    sp.add_argument("--s", type=int, default=None)
    sp.add_argument("--nonsplit", action="store_true")
    sp.add_argument("--semisimple", action="store_true")

    sp = sub.add_parser("fukuda", parents=[common], help="Fukuda-type criterion")
    sp.add_argument("--e", default=None, help="comma-separated e_n")
    sp.add_argument("--s", type=int, default=None)
    sp.add_argument("--n0", type=int, default=None)
    return parser


def _read_payload(path: str | None) -> Any:
    if path is None:
        return None
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}") from exc
    stripped = text.strip()
    if stripped.startswith(("{", "[")):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON input: {exc}") from exc
    return text


def main(argv: Sequence[str] | None = None) -> int:
    command = None
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        fmt = args.fmt
        if args.seed is None and command in RANDOMIZED and os.environ.get("CI"):
            raise UsageError("--seed is required for randomized commands in CI mode")
        config = RunConfig(
            seed=args.seed if args.seed is not None else 0,
            samples=args.samples, a=args.a, D=args.D, p=args.p, fmt=args.fmt,
            workers=args.workers,
        )
        skip = {"seed", "samples", "a", "D", "p", "fmt", "input", "workers", "command"}
        opts = {k: v for k, v in vars(args).items() if k not in skip}
        doc = run(command, config, opts, _read_payload(args.input))
    except (PadicIwasawaError, ValueError, ArithmeticError) as exc:
        print(render(error_document(command, exc), fmt))
        return 2 if isinstance(exc, (UsageError, SchemaError)) else 1
    print(render(doc, fmt))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
