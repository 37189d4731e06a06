"""Command line front end: ``udw scan | verify | identities``.

Sweeps are configured by a TOML file (key/value with nested tables) with
flag overrides.  Exit codes: 0 success, 1 validation failure, 2 numeric
non-convergence.
"""

from __future__ import annotations

import argparse
import math
import random
import sys

import tomli

from .detectors import (
    prob_complex,
    prob_real_scalar,
    prob_real_scalar_3d,
    prob_vector_general,
    prob_vector_parallel,
    prob_vector_perp,
)
from .fieldmodes import DetectorSpec, FieldModel, Statistics, WavepacketSpec
from .oracle import (
    QuadratureConfig,
    SwitchingSpec,
    angular_integral_numeric,
    finite_t_complex,
)
from .specfun import angular_exp_integral
from .sweep import SweepConfig, SweepError, run_scan, run_verify

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NONCONVERGENCE = 2

_MODEL_ALIASES = {
    "real": (FieldModel.REAL_SCALAR, None),
    "real-scalar": (FieldModel.REAL_SCALAR, None),
    "vector": (FieldModel.VECTOR, None),
    "fermion": (FieldModel.FERMION, None),
    "complex-bose": (FieldModel.COMPLEX_SCALAR, Statistics.BOSE),
    "complex-fermi": (FieldModel.COMPLEX_SCALAR, Statistics.FERMI),
}


def parse_range(text: str) -> tuple:
    """Parse an axis: ``lo:hi:num`` (linear), ``log:lo:hi:num`` or a comma
    list / single value."""
    text = text.strip()
    if text.startswith("log:"):
        lo, hi, num = text[4:].split(":")
        lo, hi, num = float(lo), float(hi), int(num)
        if num < 1 or lo <= 0 or hi <= 0:
            raise ValueError(f"bad log range {text!r}")
        if num == 1:
            return (lo,)
        r = (math.log(hi) - math.log(lo)) / (num - 1)
        return tuple(math.exp(math.log(lo) + i * r) for i in range(num))
    if ":" in text:
        lo, hi, num = text.split(":")
        lo, hi, num = float(lo), float(hi), int(num)
        if num < 1:
            raise ValueError(f"bad range {text!r}")
        if num == 1:
            return (lo,)
        step = (hi - lo) / (num - 1)
        return tuple(lo + i * step for i in range(num))
    return tuple(float(v) for v in text.split(","))


def _axis_from_toml(value) -> tuple:
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, list):
        return tuple(float(v) for v in value)
    if isinstance(value, dict):
        lo, hi, num = float(value["start"]), float(value["stop"]), int(value["num"])
        if value.get("log", False):
            return parse_range(f"log:{lo}:{hi}:{num}")
        return parse_range(f"{lo}:{hi}:{num}")
    raise SweepError(f"cannot interpret grid axis value {value!r}")


def _complex_pairs(values) -> tuple:
    out = []
    for v in values:
        if isinstance(v, list):
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v), 0.0))
    return tuple(out)


def load_config(path: str | None, args: argparse.Namespace) -> SweepConfig:
    data: dict = {}
    if path is not None:
        with open(path, "rb") as handle:
            data = tomli.load(handle)

    kwargs: dict = {}
    model_name = args.model or data.get("model")
    if model_name is None:
        raise SweepError("a model is required (--model or config key 'model')")
    try:
        model, statistics = _MODEL_ALIASES[str(model_name)]
    except KeyError:
        raise SweepError(
            f"unknown model {model_name!r}; choose from {sorted(_MODEL_ALIASES)}"
        ) from None
    kwargs["model"] = model
    kwargs["statistics"] = statistics

    for key in ("n", "k0", "coupling", "delta", "alpha1"):
        if key in data:
            kwargs[key] = data[key]
    grid = data.get("grid", {})
    for axis in ("omega", "sigma", "m", "theta", "beta"):
        if axis in grid:
            kwargs[axis] = _axis_from_toml(grid[axis])
    fermion = data.get("fermion", {})
    if "amplitudes" in fermion:
        kwargs["fermion_amplitudes"] = _complex_pairs(fermion["amplitudes"])
    if "spinor" in fermion:
        kwargs["fermion_spinor"] = _complex_pairs(fermion["spinor"])
    output = data.get("output", {})
    if "path" in output:
        kwargs["out"] = output["path"]
    if "format" in output:
        kwargs["fmt"] = output["format"]
    if "workers" in output:
        kwargs["workers"] = int(output["workers"])
    oracle = data.get("oracle", {})
    if "tol" in oracle:
        kwargs["oracle_tol"] = float(oracle["tol"])
    if "T0" in oracle:
        kwargs["oracle_T0"] = float(oracle["T0"])
    if "budget" in oracle:
        kwargs["oracle_budget"] = int(oracle["budget"])

    # flag overrides
    if args.omega is not None:
        kwargs["omega"] = parse_range(args.omega)
    if args.sigma is not None:
        kwargs["sigma"] = parse_range(args.sigma)
    if args.mass is not None:
        kwargs["m"] = parse_range(args.mass)
    if args.theta is not None:
        kwargs["theta"] = parse_range(args.theta)
    if getattr(args, "beta", None) is not None:
        kwargs["beta"] = parse_range(args.beta)
    if args.out is not None:
        kwargs["out"] = args.out
    if args.format is not None:
        kwargs["fmt"] = args.format
    if args.workers is not None:
        kwargs["workers"] = args.workers
    if getattr(args, "oracle_tol", None) is not None:
        kwargs["oracle_tol"] = args.oracle_tol
    if getattr(args, "oracle_T0", None) is not None:
        kwargs["oracle_T0"] = args.oracle_T0
    return SweepConfig(**kwargs)


def cmd_scan(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config, args)
        rows = run_scan(config)
    except (SweepError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if config.out is None:
        for row in rows:
            print(row)
    else:
        print(f"wrote {len(rows)} rows to {config.out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config, args)
        rows, failed, nonconverged = run_verify(config)
    except (SweepError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    worst = max(
        (r["relative_deviation"] for r in rows if not math.isnan(r["relative_deviation"])),
        default=math.nan,
    )
    print(
        f"verified {len(rows)} grid points: max deviation {worst:.3e}, "
        f"{failed} failing, {nonconverged} non-converged "
        f"(tolerance {config.oracle_tol:.1e})"
    )
    if config.out is not None:
        print(f"wrote deviation table to {config.out}")
    if nonconverged:
        return EXIT_NONCONVERGENCE
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def _identity_checks(max_n: int, seed: int):
    rng = random.Random(seed)
    q = QuadratureConfig()

    def angular_check():
        worst = 0.0
        for n in range(2, max_n + 1):
            for a in (0.0, 0.5, 2.0, 10.0, 27.0, 50.0):
                exact = angular_exp_integral(n, a).to_float()
                brute = angular_integral_numeric(n, a, q)
                worst = max(worst, abs(exact - brute) / brute)
        return worst < 1e-8, f"max rel dev {worst:.2e}"

    def reduction_check():
        worst = 0.0
        for _ in range(1000):
            m = rng.uniform(0.0, 2.0)
            wp = WavepacketSpec.real_scalar(3, m, rng.uniform(0.1, 3.0), rng.uniform(0.05, 2.0))
            det = DetectorSpec(omega=m + rng.uniform(1e-3, 3.0))
            a = prob_real_scalar(3, det, wp).probability
            b = prob_real_scalar_3d(det, wp).probability
            worst = max(worst, abs(a.log_magnitude - b.log_magnitude))
        return worst < 1e-10, f"max |dlog p| {worst:.2e}"

    def endpoint_check():
        worst = 0.0
        for _ in range(200):
            wp = WavepacketSpec.vector(1.0, rng.uniform(0.05, 1.0), 1.0, 0.0)
            det0 = DetectorSpec(omega=rng.uniform(0.1, 3.0), theta=0.0)
            detp = DetectorSpec(omega=det0.omega, theta=0.5 * math.pi)
            d0 = abs(
                prob_vector_general(det0, wp).probability.log_magnitude
                - prob_vector_parallel(det0, wp).probability.log_magnitude
            )
            dp = abs(
                prob_vector_general(detp, wp).probability.log_magnitude
                - prob_vector_perp(detp, wp).probability.log_magnitude
            )
            worst = max(worst, d0, dp)
        return worst < 1e-10, f"max |dlog p| {worst:.2e}"

    def statistics_check():
        wp = WavepacketSpec.complex_scalar(3, 0.3, 1.0, 0.4, 0.6, 0.8)
        det = DetectorSpec(omega=1.2)
        sw = SwitchingSpec(1.0)
        pb = finite_t_complex(3, Statistics.BOSE, det, wp, sw)
        pf = finite_t_complex(3, Statistics.FERMI, det, wp, sw)
        ok = pf.total < pb.total and pf.total >= 0.0 and pf.counter_rotating <= pf.vacuum
        return ok, f"fermi {pf.total:.6e} < bose {pb.total:.6e}"

    def adiabatic_equality_check():
        wp = WavepacketSpec.complex_scalar(3, 0.2, 1.0, 0.5, 0.6, 0.8)
        det = DetectorSpec(omega=1.1)
        pb = prob_complex(3, Statistics.BOSE, det, wp)
        pf = prob_complex(3, Statistics.FERMI, det, wp)
        return pb.probability == pf.probability, "closed forms identical"

    return [
        ("angular integral vs brute-force quadrature", angular_check),
        ("n=3 reduction of the general closed form", reduction_check),
        ("vector general-angle endpoints", endpoint_check),
        ("Fermi <= Bose at finite T", statistics_check),
        ("Bose/Fermi adiabatic equality", adiabatic_equality_check),
    ]


def cmd_identities(args: argparse.Namespace) -> int:
    if not 2 <= args.max_n <= 6:
        print("error: --max-n must be in [2, 6]", file=sys.stderr)
        return EXIT_VALIDATION
    failures = 0
    for name, check in _identity_checks(args.max_n, args.seed):
        ok, detail = check()
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status}  {name}: {detail}")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udw",
        description="Detector response sweeps: closed forms, oracle verification, identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="TOML sweep configuration file")
        p.add_argument("--model", help="real-scalar | vector | fermion | complex-bose | complex-fermi")
        p.add_argument("--omega", help="gap axis, e.g. 0.1:4:400 or 0.5,1,2")
        p.add_argument("--sigma", help="spectral width axis")
        p.add_argument("--mass", help="field mass axis")
        p.add_argument("--theta", help="dipole angle axis (vector model)")
        p.add_argument("--beta", help="anti-particle amplitude axis (complex model)")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--workers", type=int, help="parallel worker count")

    scan = sub.add_parser("scan", help="evaluate closed forms over a grid")
    add_common(scan)
    scan.set_defaults(func=cmd_scan)

    verify = sub.add_parser("verify", help="closed form vs finite-T oracle over a grid")
    add_common(verify)
    verify.add_argument("--oracle-tol", type=float, dest="oracle_tol",
                        help="relative agreement tolerance (default 1e-3)")
    verify.add_argument("--oracle-T0", type=float, dest="oracle_T0",
                        help="starting switching time for the T-doubling")
    verify.set_defaults(func=cmd_verify)

    identities = sub.add_parser("identities", help="run the analytic identity checks")
    identities.add_argument("--max-n", type=int, default=5, help="largest spatial dimension (<= 6)")
    identities.add_argument("--seed", type=int, default=0, help="seed for the random spot checks")
    identities.set_defaults(func=cmd_identities)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
