"""Command-line front end.

Commands: homogenize, decohere, entangle, channel, generator, integrate.
Every option can also come from a single JSON config document (--config);
explicit flags win over config keys.  Trajectory commands emit a CSV (to
--out or stdout) plus a JSON summary on stdout; analysis commands emit JSON.

Exit codes: 0 success, 2 configuration error, 3 capacity exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import channels as ch
from . import collisions as co
from . import entanglement as ent
from . import lindblad as lb
from .errors import BoundUndefinedError, CapacityError, CollideKitError
from .linalg import SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z
from .states import (
    DensityOperator,
    density_from_bloch,
    density_from_json,
    density_to_json,
    random_density,
)


class ConfigError(Exception):
    """Bad or incomplete run configuration."""


_NAMED_GATES = {
    "I": SIGMA_I,
    "X": SIGMA_X,
    "Y": SIGMA_Y,
    "Z": SIGMA_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0),
}

_NAMED_PURE = {
    "zero": np.array([1.0, 0.0], dtype=complex),
    "one": np.array([0.0, 1.0], dtype=complex),
    "plus": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "minus": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
}


def _g17(x: float) -> str:
    return f"{float(x):.17g}"


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _complex_from(spec, what: str) -> complex:
    if isinstance(spec, (int, float)):
        return complex(spec)
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        return complex(float(spec[0]), float(spec[1]))
    raise ConfigError(f"{what} must be a number or [re, im] pair, got {spec!r}")


def _matrix_from(spec, what: str) -> np.ndarray:
    if isinstance(spec, str):
        if spec.upper() in _NAMED_GATES:
            return _NAMED_GATES[spec.upper()]
        raise ConfigError(f"unknown named operator {spec!r} for {what}")
    if isinstance(spec, dict) and "re" in spec:
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    raise ConfigError(f"{what} must be a named operator or {{re, im}} matrix")


def _state_from(spec, what: str, rng: np.random.Generator) -> DensityOperator:
    try:
        if isinstance(spec, str):
            if spec in _NAMED_PURE:
                return DensityOperator.pure(_NAMED_PURE[spec])
            if spec == "mixed":
                return DensityOperator.maximally_mixed(2)
            if spec == "random":
                return random_density(2, rng)
            raise ConfigError(f"unknown named state {spec!r} for {what}")
        if isinstance(spec, (list, tuple)) and len(spec) == 3:
            return density_from_bloch([float(v) for v in spec])
        if isinstance(spec, dict) and "bloch" in spec:
            return density_from_bloch([float(v) for v in spec["bloch"]])
        if isinstance(spec, dict) and "re" in spec:
            return density_from_json(spec)
    except CollideKitError as exc:
        raise ConfigError(f"invalid state for {what}: {exc}") from exc
    raise ConfigError(f"{what} must be a named state, Bloch triple or matrix JSON")


def _pure_from(spec, what: str, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, str):
        if spec in _NAMED_PURE:
            return _NAMED_PURE[spec]
        if spec == "random":
            v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            return v / np.linalg.norm(v)
        raise ConfigError(f"unknown named pure state {spec!r} for {what}")
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        v = np.array([_complex_from(a, what) for a in spec])
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ConfigError(f"{what} is the zero vector")
        return v / norm
    raise ConfigError(f"{what} must be a named state or two amplitudes")


def _merge_config(args: argparse.Namespace, keys: list[str]) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config document must be a JSON object")
        cfg.update(loaded)
    for key in keys + ["out", "seed", "tol"]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg.setdefault("seed", 0)
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(f"missing required parameter {key!r}")
    return cfg[key]


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    def emit(stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if path:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            emit(fh)
    else:
        emit(sys.stdout)


def _emit_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ----------------------------------------------------------------- commands


def cmd_homogenize(args) -> int:
    cfg = _merge_config(args, ["eta", "rho", "xi", "n_steps", "stride"])
    rng = np.random.default_rng(int(cfg["seed"]))
    eta = float(_require(cfg, "eta"))
    xi = _state_from(_require(cfg, "xi"), "xi", rng)
    rho = _state_from(_require(cfg, "rho"), "rho", rng)
    n_steps = int(_require(cfg, "n_steps"))
    stride = int(cfg.get("stride", 1))

    traj = co.run_homogenization(rho, xi, eta, n_steps, stride=stride)
    header, rows = traj.csv_rows()
    _write_csv(cfg.get("out"), header, rows)

    summary = {"eta": eta, "n_steps": n_steps}
    try:
        delta, n_delta = co.homogenization_bounds(eta)
        summary["delta"] = delta
        summary["N_delta"] = n_delta
    except BoundUndefinedError:
        delta = None
        summary["delta"] = None
        summary["N_delta"] = None
    observed = max((s.d_res for s in traj.steps if s.n > 0), default=0.0)
    summary["observed_max_D_res"] = observed
    steps_to_delta = None
    if delta is not None:
        for s in traj.steps:
            if s.d_sys <= delta:
                steps_to_delta = s.n
                break
    summary["steps_to_delta"] = steps_to_delta
    _emit_json(summary, None)
    return 0


def cmd_decohere(args) -> int:
    cfg = _merge_config(args, ["v0", "v1", "rho", "xi", "n_steps", "stride"])
    rng = np.random.default_rng(int(cfg["seed"]))
    v0 = _matrix_from(_require(cfg, "v0"), "v0")
    v1 = _matrix_from(_require(cfg, "v1"), "v1")
    try:
        cu = co.ControlledUnitary(targets=(v0, v1))
    except CollideKitError as exc:
        raise ConfigError(str(exc)) from exc
    xi = _state_from(_require(cfg, "xi"), "xi", rng)
    rho = _state_from(_require(cfg, "rho"), "rho", rng)
    n_steps = int(_require(cfg, "n_steps"))
    stride = int(cfg.get("stride", 1))

    traj = co.run_decoherence(rho, xi, cu, n_steps, stride=stride)
    header, rows = traj.csv_rows()
    header = header + ["offdiag_abs"]
    offdiags = [abs(s.rho_s.matrix[0, 1]) for s in traj.steps]
    rows = [row + [_g17(v)] for row, v in zip(rows, offdiags)]
    _write_csv(cfg.get("out"), header, rows)

    lam, phi = lb.decoherence_params_from_collision(cu, xi)
    magnitudes = np.array(offdiags)
    steps = np.array([s.n for s in traj.steps], dtype=float)
    if len(magnitudes) < 2 or magnitudes[0] <= 1e-12:
        fitted_rate, lambda_fit = None, None
    elif (magnitudes > 1e-300).all():
        slope = np.polyfit(steps, np.log(magnitudes), 1)[0]
        fitted_rate, lambda_fit = float(slope), float(math.exp(slope))
    else:  # coherence hit exactly zero: terminal damping
        fitted_rate, lambda_fit = None, 0.0
    summary = {
        "lambda": lam,
        "phi": phi,
        "ln_lambda": math.log(lam) if lam > 0 else None,
        "fitted_rate": fitted_rate,
        "lambda_fit": lambda_fit,
    }
    _emit_json(summary, None)
    return 0


def _entangle_rows(cfg: dict, rng: np.random.Generator):
    model = _require(cfg, "model")
    alpha = _complex_from(_require(cfg, "alpha"), "alpha")
    beta = _complex_from(_require(cfg, "beta"), "beta")
    norm = math.hypot(abs(alpha), abs(beta))
    if norm < 1e-12:
        raise ConfigError("alpha and beta cannot both vanish")
    alpha, beta = alpha / norm, beta / norm
    n_steps = int(_require(cfg, "n_steps"))
    n_res = int(cfg.get("n_reservoir", n_steps))

    if model == "homogenization":
        eta = float(_require(cfg, "eta"))
        u = co.partial_swap_unitary(eta)
        phi_res = np.array([1.0, 0.0], dtype=complex)

        def closed_pair(n, j, k):
            if j == 0:
                return ent.predict_homogenization_tangles(alpha, beta, eta, n, k + 1, k)[1]
            return ent.predict_homogenization_tangles(alpha, beta, eta, n, j, k)[0]

        def closed_cut(n, j):
            if j == 0:
                return ent.predict_homogenization_tangles(alpha, beta, eta, n, 1, 2)[3]
            return ent.predict_homogenization_tangles(alpha, beta, eta, n, j, j + 1)[2]

    elif model == "decoherence":
        v0 = _matrix_from(cfg.get("v0", "I"), "v0")
        v1 = _matrix_from(_require(cfg, "v1"), "v1")
        try:
            cu = co.ControlledUnitary(targets=(v0, v1))
        except CollideKitError as exc:
            raise ConfigError(str(exc)) from exc
        u = co.controlled_unitary(cu)
        phi_res = _pure_from(cfg.get("phi_res", "zero"), "phi_res", rng)
        overlap = complex(np.vdot(v0 @ phi_res, v1 @ phi_res))

        def closed_pair(n, j, k):
            if j == 0:
                return ent.predict_decoherence_tangles(alpha, beta, overlap, n, k)[1]
            return 0.0

        def closed_cut(n, j):
            if j == 0:
                return ent.predict_decoherence_tangles(alpha, beta, overlap, n, 1)[3]
            return ent.predict_decoherence_tangles(alpha, beta, overlap, n, j)[2]

    else:
        raise ConfigError(f"unknown model {model!r}")

    psi_s = np.array([alpha, beta])
    header = [
        "step", "j", "k", "tau_jk", "tau_cut_j", "delta_j",
        "tau_jk_closed", "tau_cut_j_closed", "pair_absdiff", "cut_absdiff",
    ]
    rows = []
    max_pair_diff = 0.0
    max_cut_diff = 0.0
    min_delta = math.inf
    for n, psi in ent.collision_state_sequence(psi_s, phi_res, u, n_steps, n_res):
        report = ent.ckw_report(psi, step=n)
        min_delta = min(min_delta, min(report.delta))
        for (j, k), tau in sorted(report.tau_pair.items()):
            pair_closed = closed_pair(n, j, k)
            cut_closed = closed_cut(n, j)
            pair_diff = abs(tau - pair_closed)
            cut_diff = abs(report.tau_cut[j] - cut_closed)
            max_pair_diff = max(max_pair_diff, pair_diff)
            max_cut_diff = max(max_cut_diff, cut_diff)
            rows.append(
                [
                    str(n), str(j), str(k),
                    _g17(tau), _g17(report.tau_cut[j]), _g17(report.delta[j]),
                    _g17(pair_closed), _g17(cut_closed), _g17(pair_diff), _g17(cut_diff),
                ]
            )
    summary = {
        "model": model,
        "max_pair_absdiff": max_pair_diff,
        "max_cut_absdiff": max_cut_diff,
        "min_ckw_residual": min_delta,
    }
    return header, rows, summary


def cmd_entangle(args) -> int:
    cfg = _merge_config(
        args, ["model", "alpha", "beta", "eta", "v0", "v1", "phi_res", "n_steps", "n_reservoir"]
    )
    rng = np.random.default_rng(int(cfg["seed"]))
    header, rows, summary = _entangle_rows(cfg, rng)
    _write_csv(cfg.get("out"), header, rows)
    _emit_json(summary, None)
    return 0


def _channel_from_config(cfg: dict, rng: np.random.Generator) -> ch.PauliTransferMatrix:
    try:
        if cfg.get("ptm") is not None:
            return ch.ptm_from_json({"ptm": cfg["ptm"]})
        if cfg.get("kraus") is not None:
            return ch.kraus_from_json({"kraus": cfg["kraus"]})
        if cfg.get("collision") is not None:
            spec = cfg["collision"]
            u = _matrix_from(spec.get("u"), "collision unitary")
            xi = _state_from(_require(spec, "xi"), "collision xi", rng)
            return ch.channel_from_collision(u, xi)
        model = cfg.get("model")
        if model == "homogenization":
            return lb.homogenization_ptm(float(_require(cfg, "eta")), float(_require(cfg, "w")))
        if model == "decoherence":
            return lb.decoherence_ptm(float(_require(cfg, "lambda")), float(cfg.get("phi", 0.0)))
        if model == "universal_not":
            return ch.universal_not_ptm()
        if model == "transpose":
            return ch.transpose_ptm()
        if model == "identity":
            return ch.identity_ptm()
    except ConfigError:
        raise
    except CollideKitError as exc:
        raise ConfigError(f"invalid channel: {exc}") from exc
    raise ConfigError("no channel source: provide ptm, kraus, collision or model")


def _generator_payload(ptm: ch.PauliTransferMatrix) -> dict:
    gen = lb.generator_from_log(ptm)
    decomp = lb.lindblad_decompose(gen)
    verdict = lb.is_lindblad(gen)
    return {
        "g": gen.g.tolist(),
        "h": decomp.h.tolist(),
        "C_re": decomp.c.real.tolist(),
        "C_im": decomp.c.imag.tolist(),
        "lindblad_valid": verdict.valid,
        "min_eig_C": verdict.min_eig_c,
    }


def cmd_channel(args) -> int:
    cfg = _merge_config(args, ["ptm", "kraus", "collision", "model", "eta", "w", "lambda", "phi"])
    rng = np.random.default_rng(int(cfg["seed"]))
    ptm = _channel_from_config(cfg, rng)
    tol = float(cfg.get("tol") or ch.CP_TOL)
    cp = ch.is_completely_positive(ptm, tol=tol)
    result = {
        "ptm": ptm.m.tolist(),
        "choi_min_eig": cp.min_eigenvalue,
        "completely_positive": cp.is_cp,
        "det": ch.determinant(ptm),
    }
    try:
        payload = _generator_payload(ptm)
        result["generator"] = payload
        result["lindblad"] = payload["lindblad_valid"]
        result["markovian"] = payload["lindblad_valid"]
    except CollideKitError:
        result["generator"] = None
        result["lindblad"] = None
        result["markovian"] = False
    _emit_json(result, cfg.get("out"))
    return 0


def cmd_generator(args) -> int:
    cfg = _merge_config(args, ["ptm", "kraus", "collision", "model", "eta", "w", "lambda", "phi"])
    rng = np.random.default_rng(int(cfg["seed"]))
    ptm = _channel_from_config(cfg, rng)
    payload = _generator_payload(ptm)  # CollideKitError here -> exit 4
    _emit_json(payload, cfg.get("out"))
    return 0


def cmd_integrate(args) -> int:
    cfg = _merge_config(
        args, ["model", "eta", "w", "lambda", "phi", "tau", "rho", "t_end", "dt"]
    )
    rng = np.random.default_rng(int(cfg["seed"]))
    rho0 = _state_from(_require(cfg, "rho"), "rho", rng)
    t_end = float(_require(cfg, "t_end"))
    dt = float(cfg.get("dt", 1e-3))
    model = cfg.get("model")

    closed_form = None
    if model == "homogenization":
        params = lb.HomogenizationSemigroupParams(
            float(_require(cfg, "eta")), float(_require(cfg, "w")), float(cfg.get("tau", 1.0))
        )
        gen = lb.generator_from_log(lb.homogenization_semigroup_map(params, params.tau))
        closed_form = lb.homogenization_semigroup_map(params, t_end)
    elif model == "decoherence":
        ptm = lb.decoherence_ptm(float(_require(cfg, "lambda")), float(cfg.get("phi", 0.0)))
        gen = lb.generator_from_log(ptm)
        closed_form = lb.exp_generator(gen, t_end)
    else:
        ptm = _channel_from_config(cfg, rng)
        gen = lb.generator_from_log(ptm)
        closed_form = lb.exp_generator(gen, t_end)

    decomp = lb.lindblad_decompose(gen)
    final = lb.integrate_master(decomp, rho0, t_end, dt)
    result = {
        "t_end": t_end,
        "dt": dt,
        "state": density_to_json(final),
        "trace": float(final.matrix.trace().real),
    }
    if closed_form is not None:
        exact = ch.apply(closed_form, rho0)
        result["closed_form_error"] = float(np.abs(final.matrix - exact.matrix).max())
    _emit_json(result, cfg.get("out"))
    return 0


# ---------------------------------------------------------------- dispatch


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config document; flags override its keys")
    parser.add_argument("--out", help="output path (CSV for trajectory commands, JSON otherwise)")
    parser.add_argument("--seed", type=int, help="seed for any randomized inputs")
    parser.add_argument("--tol", type=float, help="tolerance override for validity verdicts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collidekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homogenize", help="partial-swap collision trajectory")
    _add_common(p)
    p.add_argument("--eta", type=float, help="swap angle in radians")
    p.add_argument("--rho", type=_parse_value, help="initial system state")
    p.add_argument("--xi", type=_parse_value, help="reservoir particle state")
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--stride", type=int)
    p.set_defaults(func=cmd_homogenize)

    p = sub.add_parser("decohere", help="controlled-unitary collision trajectory")
    _add_common(p)
    p.add_argument("--v0", type=_parse_value, help="target unitary for control 0 (name or {re,im})")
    p.add_argument("--v1", type=_parse_value, help="target unitary for control 1")
    p.add_argument("--rho", type=_parse_value)
    p.add_argument("--xi", type=_parse_value)
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--stride", type=int)
    p.set_defaults(func=cmd_decohere)

    p = sub.add_parser("entangle", help="pure-state run with tangle tracking")
    _add_common(p)
    p.add_argument("--model", choices=["homogenization", "decoherence"])
    p.add_argument("--alpha", type=_parse_value)
    p.add_argument("--beta", type=_parse_value)
    p.add_argument("--eta", type=float)
    p.add_argument("--v0", type=_parse_value)
    p.add_argument("--v1", type=_parse_value)
    p.add_argument("--phi-res", dest="phi_res", type=_parse_value, help="reservoir pure state")
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--n-reservoir", dest="n_reservoir", type=int)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("channel", help="channel diagnostics (Choi, det, Markovianity)")
    _add_common(p)
    p.add_argument("--ptm", type=_parse_value, help="4x4 transfer matrix rows")
    p.add_argument("--kraus", type=_parse_value, help="list of {re, im} Kraus operators")
    p.add_argument("--collision", type=_parse_value, help='{"u": {re,im}, "xi": state}')
    p.add_argument("--model", help="homogenization | decoherence | universal_not | transpose | identity")
    p.add_argument("--eta", type=float)
    p.add_argument("--w", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--phi", type=float)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("generator", help="extract log-generator and Lindblad coefficients")
    _add_common(p)
    p.add_argument("--ptm", type=_parse_value)
    p.add_argument("--kraus", type=_parse_value)
    p.add_argument("--collision", type=_parse_value)
    p.add_argument("--model")
    p.add_argument("--eta", type=float)
    p.add_argument("--w", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--phi", type=float)
    p.set_defaults(func=cmd_generator)

    p = sub.add_parser("integrate", help="RK4 master-equation integration")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--eta", type=float)
    p.add_argument("--w", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--rho", type=_parse_value)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float)
    p.set_defaults(func=cmd_integrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3
    except CollideKitError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
