"""Command-line interface: ``gaussfock <command> ...``.

Every invocation prints one JSON report on stdout.  Exit status is 0 when
all verdicts pass, 1 when a mathematical check fails and 2 for malformed
input, schema violations or capacity errors.
"""

import argparse
import json
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import fock, states
from .exceptions import (
    CapacityError,
    GaussFockError,
    InvalidInputError,
    NoDensityMatrixError,
    NotPositiveDefiniteError,
    NumericalDegeneracyError,
    ValidationError,
)
from .symplectic import RECONSTRUCTION_TOL, SYMPLECTIC_TOL, is_symplectic, williamson
from .tails import TailModel, classify_tail, tail_log_weight, tail_partial_sums

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex_pair(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(M) -> list:
    return np.asarray(M, dtype=float).tolist()


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON in {path}: {exc}") from None


def _load_state(path: str) -> states.GaussianState:
    return states.GaussianState.from_json(_load_json(path))


def _load_matrix(path: str) -> np.ndarray:
    obj = _load_json(path)
    if isinstance(obj, dict):
        obj = obj.get("L", obj.get("matrix"))
    try:
        M = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{path} does not hold a numeric matrix") from None
    if M.ndim != 2:
        raise InvalidInputError(f"{path} does not hold a 2-d matrix")
    return M


def parse_complex_list(text: str) -> np.ndarray:
    """Parse ``[[re, im], ...]``, ``[re, ...]`` or ``"0.3+0.1j, -0.2j"``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        try:
            return np.array([complex(tok.strip().replace(" ", "")) for tok in text.split(",")])
        except ValueError:
            raise InvalidInputError(f"cannot parse complex list {text!r}") from None
    if isinstance(obj, (int, float)):
        obj = [obj]
    out = []
    for item in obj:
        if isinstance(item, list) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item))
        else:
            raise InvalidInputError(f"complex entries must be numbers or [re, im] pairs, got {item!r}")
    return np.array(out, dtype=complex)


def parse_modes(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidInputError(f"modes must be comma-separated integers, got {text!r}") from None


def _state_report(command: str, state: states.GaussianState, args, **extra) -> Tuple[dict, int]:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(state.to_json(), fh, indent=2)
    report = {"command": command, "passed": True, "state": state.to_json()}
    report.update(extra)
    return report, EXIT_OK


# -- commands -------------------------------------------------------------------


def cmd_validate(args):
    rep = states.validate(_load_state(args.state))
    out = {"command": "validate", "input": args.state, "passed": rep.verdict}
    out.update(rep.to_json())
    return out, EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_williamson(args):
    state = _load_state(args.state)
    wd = williamson(state.cov)
    n = state.n
    J = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]]) if n else np.zeros((0, 0))
    sym_res = float(np.abs(wd.L.T @ J @ wd.L - J).max()) if n else 0.0
    rec_res = float(np.abs(wd.reconstruct() - state.cov).max()) if n else 0.0
    scale = max(1.0, float(np.abs(state.cov).max())) if n else 1.0
    passed = sym_res <= SYMPLECTIC_TOL and rec_res <= 1e-8 * scale
    return {
        "command": "williamson",
        "input": args.state,
        "passed": passed,
        "d": wd.d.tolist(),
        "L": _matrix(wd.L),
        "symplectic_residual": sym_res,
        "reconstruction_residual": rec_res,
    }, EXIT_OK if passed else EXIT_FAIL


def cmd_spectrum(args):
    state = _load_state(args.state)
    entries = states.spectrum(state, args.top)
    return {
        "command": "spectrum",
        "input": args.state,
        "top": args.top,
        "passed": True,
        "eigenvalues": [{"p": p, "occupation": list(occ)} for p, occ in entries],
        "levels": [{"p": p, "multiplicity": m} for p, m in states.spectrum_levels(entries)],
    }, EXIT_OK


def cmd_decompose(args):
    state = _load_state(args.state)
    pair = states.extreme_decompose(state)
    residual = float(np.abs(pair.midpoint() - state.cov).max()) if state.n else 0.0
    n_ok = is_symplectic(pair.N) if state.n else True
    m_ok = is_symplectic(pair.M) if state.n else True
    passed = residual <= RECONSTRUCTION_TOL and n_ok and m_ok
    return {
        "command": "decompose",
        "input": args.state,
        "passed": passed,
        "N": _matrix(pair.N),
        "M": _matrix(pair.M),
        "midpoint_residual": residual,
        "N_symplectic": n_ok,
        "M_symplectic": m_ok,
    }, EXIT_OK if passed else EXIT_FAIL


def cmd_displace(args):
    alpha = parse_complex_list(args.alpha)
    out = states.displace(_load_state(args.state), alpha)
    return _state_report("displace", out, args, alpha=[_complex_pair(a) for a in alpha])


def cmd_conjugate(args):
    L = _load_matrix(args.symplectic)
    out = states.shale_conjugate(_load_state(args.state), L)
    return _state_report("conjugate", out, args)


def cmd_tensor(args):
    out = states.tensor(_load_state(args.a), _load_state(args.b))
    return _state_report("tensor", out, args)


def cmd_marginal(args):
    out = states.marginal(_load_state(args.state), parse_modes(args.modes))
    return _state_report("marginal", out, args, modes=parse_modes(args.modes))


def cmd_mix(args):
    out = states.beam_splitter_mix(_load_state(args.a), _load_state(args.b), args.theta)
    return _state_report("mix", out, args, theta=args.theta)


def cmd_purify(args):
    out = states.purify(_load_state(args.state))
    return _state_report("purify", out, args, is_pure=states.is_pure(out))


def cmd_verify_cf(args):
    state = _load_state(args.state)
    basis = fock.FockBasis.uniform(state.n, args.cutoff)
    rng = np.random.default_rng(args.seed)
    zs = fock.random_disk(rng, args.samples, state.n, args.radius)
    rep = fock.verify_gaussian(state, basis, zs, args.tol)
    out = {"command": "oracle verify-cf", "input": args.state, "cutoff": args.cutoff, "seed": args.seed}
    out.update(rep.to_json())
    return out, EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify_weyl(args):
    rep = fock.verify_weyl(args.cutoff, args.pairs, args.tol, seed=args.seed, levels=args.levels)
    out = {"command": "oracle verify-weyl", "cutoff": args.cutoff, "seed": args.seed}
    out.update(rep)
    return out, EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_tail_classify(args):
    obj = _load_json(args.tail)
    if isinstance(obj, dict) and "tail" in obj and "kind" not in obj:
        obj = obj["tail"]
    tail = TailModel.from_json(obj)
    cls = classify_tail(tail)
    s1, s2 = tail_partial_sums(tail, args.terms)
    passed = cls.cond1_uncertainty and cls.cond2_hilbert_schmidt and cls.cond3_trace_class
    out = {"command": "tail classify", "input": args.tail, "tail": tail.to_json(), "passed": passed}
    out.update(cls.to_json())
    out.update({
        "partial_sum_terms": args.terms,
        "partial_sum_excess": s1,
        "partial_sum_excess_squared": s2,
        "log_weight": tail_log_weight(tail) if passed else None,
    })
    return out, EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussfock", description="Gaussian states on boson Fock space.")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized samples")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def state_cmd(name, func, help_text, out=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("state")
        if out:
            p.add_argument("--out", help="also write the resulting state here")
        p.set_defaults(func=func)
        return p

    state_cmd("validate", cmd_validate, "check the three admissibility conditions")
    state_cmd("williamson", cmd_williamson, "Williamson normal form of the covariance")
    p = state_cmd("spectrum", cmd_spectrum, "largest eigenvalues of the density matrix")
    p.add_argument("--top", type=int, default=10)
    state_cmd("decompose", cmd_decompose, "midpoint of two pure covariances")
    p = state_cmd("displace", cmd_displace, "apply W(alpha)", out=True)
    p.add_argument("--alpha", required=True, help="JSON [[re, im], ...] or '0.3+0.1j,-0.2j'")
    p = state_cmd("conjugate", cmd_conjugate, "conjugate by Gamma_s(L)", out=True)
    p.add_argument("--symplectic", required=True, help="JSON file holding L")
    p = state_cmd("marginal", cmd_marginal, "restrict to a subset of modes", out=True)
    p.add_argument("--modes", required=True, help="comma-separated mode indices")
    state_cmd("purify", cmd_purify, "pure state on twice the modes", out=True)

    for name, func, help_text in (
        ("tensor", cmd_tensor, "tensor product of two states"),
        ("mix", cmd_mix, "beam-splitter mixing of two mean-zero states"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("a")
        p.add_argument("b")
        p.add_argument("--out")
        if name == "mix":
            p.add_argument("--theta", type=float, required=True)
        p.set_defaults(func=func)

    oracle = sub.add_parser("oracle", help="truncated Fock-space checks")
    osub = oracle.add_subparsers(dest="oracle_command", parser_class=_Parser)
    osub.required = True
    p = osub.add_parser("verify-cf", help="compare tr(rho W(z)) with the closed form")
    p.add_argument("state")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--radius", type=float, default=1.0)
    p.set_defaults(func=cmd_verify_cf)
    p = osub.add_parser("verify-weyl", help="Weyl relation on random pairs")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--levels", type=int, default=None, help="projection size, default cutoff // 2")
    p.set_defaults(func=cmd_verify_weyl)

    tail = sub.add_parser("tail", help="tail models")
    tsub = tail.add_subparsers(dest="tail_command", parser_class=_Parser)
    tsub.required = True
    p = tsub.add_parser("classify", help="decide the summability conditions")
    p.add_argument("tail")
    p.add_argument("--terms", type=int, default=10000, help="terms in the reported partial sums")
    p.set_defaults(func=cmd_tail_classify)
    return parser


def run(argv: Optional[List[str]] = None) -> Tuple[dict, int]:
    """Execute one command and return (report, exit code) without printing."""
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ValidationError, NoDensityMatrixError, NumericalDegeneracyError) as exc:
        return {"passed": False, "error": type(exc).__name__, "message": str(exc)}, EXIT_FAIL
    except (InvalidInputError, NotPositiveDefiniteError, CapacityError, GaussFockError) as exc:
        return {"passed": False, "error": type(exc).__name__, "message": str(exc)}, EXIT_USAGE
    except OSError as exc:
        return {"passed": False, "error": "OSError", "message": str(exc)}, EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    report, code = run(argv)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if code == EXIT_USAGE and "message" in report:
        print(f"gaussfock: {report['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
