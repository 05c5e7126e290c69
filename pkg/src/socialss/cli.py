"""``socialss`` command line.

Payloads (JSON or CSV) go to stdout or to the ``--out*`` paths; diagnostics go
to stderr.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import cloudsim
from .dynamics import RefreshPolynomial, disenroll, enroll, refresh
from .errors import ConfigError, InconsistentShares, SocialSSError, TooFewContributors
from .field import Modulus
from .shamir import (
    ShareCommitment,
    SharePoint,
    commit,
    commit_secret,
    deal,
    deal_with_coefficients,
    interpolate_at,
)
from .social import social_factors
from .trust import TrustParams, mu, mu_prime, step_value


def _int_list(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like 1,2,3 or 1..5, got {text!r}") from None


def _share_arg(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(":")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x:y, got {text!r}") from None


def _pattern(text: str) -> str:
    if not text or set(text) - {"C", "D"}:
        raise argparse.ArgumentTypeError(f"pattern must be a nonempty string over C and D, got {text!r}")
    return text


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _share_doc(
    modulus: Modulus,
    t: int,
    epoch: int,
    shares: Sequence[SharePoint],
    commitments: Sequence[ShareCommitment],
    **extra: Any,
) -> dict[str, Any]:
    doc = {
        "p": str(modulus.p),
        "threshold": t,
        "epoch": epoch,
        "shares": [s.to_json(epoch) for s in shares],
        "commitments": [c.to_json() for c in commitments],
    }
    doc.update(extra)
    return doc


def _read_doc(path: str) -> dict[str, Any]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not a share document ({exc})") from exc


def _load_doc(path: str) -> tuple[Modulus, int, int, list[SharePoint], list[ShareCommitment] | None, list[int]]:
    doc = _read_doc(path)
    try:
        modulus = Modulus(int(doc["p"]))
        shares = [SharePoint.from_json(s) for s in doc["shares"]]
        comms = None
        if doc.get("commitments"):
            comms = [ShareCommitment.from_json(c, modulus) for c in doc["commitments"]]
        return modulus, int(doc["threshold"]), int(doc.get("epoch", 0)), shares, comms, list(doc.get("retired_xs", []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SocialSSError):
            raise
        raise ConfigError(f"{path}: malformed share document ({exc!r})") from exc


def _refresh_poly(args: argparse.Namespace, t: int, modulus: Modulus) -> RefreshPolynomial | None:
    if args.g is None:
        return None
    if len(args.g) != t - 1:
        raise ConfigError(f"--g needs t-1 = {t - 1} coefficients, got {len(args.g)}")
    return RefreshPolynomial(modulus, tuple(c % modulus.p for c in args.g))


def cmd_deal(args: argparse.Namespace) -> int:
    modulus = Modulus(args.prime)
    if args.coeffs is not None:
        if not args.insecure_deterministic:
            print("warning: --coeffs fixes the polynomial; use only to reproduce worked examples", file=sys.stderr)
        t = len(args.coeffs)
        if args.threshold is not None and args.threshold != t:
            raise ConfigError(f"--threshold {args.threshold} disagrees with {t} coefficients")
        xs = args.xs if args.xs is not None else list(range(1, (args.shares or t) + 1))
        coeffs = [modulus(c) for c in args.coeffs]
        secret = coeffs[0]
        shares, comms = deal_with_coefficients(coeffs, [modulus(x) for x in xs], epoch=args.epoch)
    else:
        if args.secret is None or args.threshold is None:
            raise ConfigError("random mode needs --secret and --threshold (or use --coeffs)")
        t = args.threshold
        xs = args.xs if args.xs is not None else list(range(1, (args.shares or t) + 1))
        secret = modulus(args.secret)
        shares, comms = deal(secret, t, [modulus(x) for x in xs], random.Random(args.seed), epoch=args.epoch)
    if args.format == "csv":
        _emit("x,y\n" + "".join(f"{s.x.value},{s.y.value}\n" for s in shares), args.out)
    else:
        doc = _share_doc(modulus, t, args.epoch, shares, comms, secret_commitment=commit_secret(secret))
        _emit(_dump(doc), args.out)
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    points: list[SharePoint] = []
    t = args.threshold
    if args.shares_file:
        modulus, doc_t, _, points, _, _ = _load_doc(args.shares_file)
        t = t if t is not None else doc_t
        if args.prime is not None and args.prime != modulus.p:
            raise ConfigError("--prime disagrees with the share document")
    else:
        if args.prime is None:
            raise ConfigError("--prime is required without --shares-file")
        modulus = Modulus(args.prime)
    points += [SharePoint(modulus(x), modulus(y)) for x, y in args.share or []]
    if t is None:
        raise ConfigError("--threshold is required")
    value = interpolate_at(points, t, modulus(args.at), cross_check=args.cross_check)
    print(value.value)
    return 0


def cmd_refresh(args: argparse.Namespace) -> int:
    modulus, t, epoch, shares, comms, retired = _load_doc(args.input)
    g = _refresh_poly(args, t, modulus)
    new, new_comms, tr = refresh(shares, t, random.Random(args.seed), epoch=epoch, commitments=comms, g=g)
    doc = _share_doc(modulus, t, tr.new_epoch, new, new_comms, retired_xs=retired, transition=tr.to_json())
    _emit(_dump(doc), args.out)
    return 0


def cmd_enroll(args: argparse.Namespace) -> int:
    modulus, t, epoch, shares, comms, retired = _load_doc(args.input)
    if comms is not None:
        by_x = {c.x.value: c for c in comms}
        for s in shares:
            if s.x.value not in by_x or not (by_x[s.x.value].epoch == epoch and commit(s, epoch) == by_x[s.x.value]):
                raise InconsistentShares(f"share at x = {s.x.value} fails its commitment")
    pool = sorted(shares, key=lambda s: s.x.value)
    if args.contributors:
        wanted = set(args.contributors)
        pool = [s for s in pool if s.x.value in wanted]
        if len(pool) != len(wanted):
            raise TooFewContributors("some --contributors are not in the share document")
    else:
        pool = pool[:t]
    used = {s.x.value for s in shares} | set(retired)
    point = enroll(pool, args.x_new, random.Random(args.seed), t=t, used_xs=used)
    out = {"share": point.to_json(epoch), "commitment": commit(point, epoch).to_json(),
           "contributors": [s.x.value for s in pool]}
    _emit(_dump(out), args.out)
    return 0


def cmd_disenroll(args: argparse.Namespace) -> int:
    modulus, t, epoch, shares, comms, retired = _load_doc(args.input)
    g = _refresh_poly(args, t, modulus)
    new, new_comms, tr = disenroll(
        shares, args.revoke, t, random.Random(args.seed), epoch=epoch, commitments=comms, g=g
    )
    doc = _share_doc(
        modulus, t, tr.new_epoch, new, new_comms, retired_xs=sorted(set(retired) | {args.revoke}), transition=tr.to_json()
    )
    _emit(_dump(doc), args.out)
    return 0


def _trust_params(args: argparse.Namespace) -> TrustParams:
    values: dict[str, float] = {}
    if args.params:
        try:
            values.update(json.loads(Path(args.params).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.params}: {exc}") from exc
    for name in ("alpha", "beta", "epsilon", "eta", "theta", "kappa"):
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    return TrustParams.from_dict(values)


def cmd_trust_curve(args: argparse.Namespace) -> int:
    params = _trust_params(args)
    rounds = args.rounds if args.rounds is not None else len(args.pattern)
    population = ""
    if args.social is not None:
        if args.social < 1:
            raise ConfigError("--social needs a population of at least 1")
        population = args.population if args.population is not None else "C" * (args.social - 1)
        if len(population) != args.social - 1:
            raise ConfigError(f"--population must give {args.social - 1} actions, got {len(population)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("round", "action", "x", "function", "value", "factor", "T"))
    x = args.start
    for rnd in range(1, rounds + 1):
        action = args.pattern[(rnd - 1) % len(args.pattern)]
        cooperated = action == "C"
        factor = 1.0
        if args.social is not None:
            delta_ = cooperated + population.count("C")
            reward, penalty = social_factors(delta_, args.social)
            factor = float(reward if cooperated else penalty)
        value = mu(x, params) if cooperated else mu_prime(x, params)
        new = step_value(x, cooperated, params, factor)
        writer.writerow((rnd, action, repr(x), "mu" if cooperated else "mu_prime", repr(value), repr(factor), repr(new)))
        x = new
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    obj = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.periods is not None:
        obj["periods"] = args.periods
    if args.trace:
        obj["trace"] = json.loads(Path(args.trace).read_text())
        obj["mode"] = "replay"
    config = cloudsim.SimConfig.from_dict(obj)
    reports = cloudsim.run(config)
    csv_text = cloudsim.reports_to_csv(reports)
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text)
    if args.out_json:
        Path(args.out_json).write_text(cloudsim.reports_to_json(reports))
    if args.out_trace:
        ids = [p.player_id for p in config.providers]
        Path(args.out_trace).write_text(_dump(cloudsim.trace_from_reports(reports, ids)))
    if not (args.out_csv or args.out_json or args.out_trace):
        sys.stdout.write(csv_text)
    s = cloudsim.summarize(reports)
    print(
        f"periods={s['periods']} reconstructions_ok={s['reconstructions_ok']} "
        f"reconstructions_failed={s['reconstructions_failed']} sla_violations={s['sla_violations']} "
        f"aborted={s['aborted']}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deal", help="split a secret into Shamir shares")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("-t", "--threshold", type=int)
    p.add_argument("--secret", type=int, help="secret for random dealing")
    p.add_argument("--shares", type=int, help="number of shares, dealt at x = 1..n")
    p.add_argument("--xs", type=_int_list, help="explicit x-coordinates, e.g. 1..5 or 1,3,7")
    p.add_argument("--coeffs", type=_int_list,
                   help="INSECURE deterministic mode: a0,a1,... with a0 the secret (reproduction only)")
    p.add_argument("--insecure-deterministic", action="store_true",
                   help="acknowledge that --coeffs exposes the polynomial")
    p.add_argument("--seed", type=int, help="seed for the (non-cryptographic) coefficient generator")
    p.add_argument("--epoch", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_deal)

    p = sub.add_parser("reconstruct", help="Lagrange-interpolate the secret from shares")
    p.add_argument("--prime", type=int)
    p.add_argument("-t", "--threshold", type=int)
    p.add_argument("--share", type=_share_arg, action="append", metavar="X:Y")
    p.add_argument("--shares-file", help="share document written by deal/refresh/disenroll")
    p.add_argument("--at", type=int, default=0, help="evaluate the interpolant here instead of 0")
    p.add_argument("--cross-check", action="store_true", help="fail if surplus shares disagree")
    p.set_defaults(func=cmd_reconstruct)

    for name, func, helptext in (
        ("refresh", cmd_refresh, "add a zero-constant polynomial to every share"),
        ("disenroll", cmd_disenroll, "refresh every share but one, leaving it stale"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--in", dest="input", required=True, help="share document, or - for stdin")
        p.add_argument("--seed", type=int)
        p.add_argument("--g", type=_int_list, help="explicit refresh coefficients g1,...,g_{t-1}")
        p.add_argument("--out")
        if name == "disenroll":
            p.add_argument("--revoke", type=int, required=True, help="x-coordinate to retire")
        p.set_defaults(func=func)

    p = sub.add_parser("enroll", help="create a share at a new x without a dealer")
    p.add_argument("--in", dest="input", required=True, help="share document, or - for stdin")
    p.add_argument("--x-new", type=int, required=True)
    p.add_argument("--contributors", type=_int_list, help="x-coordinates of the t contributors")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("trust-curve", help="trust trajectory for an action pattern")
    p.add_argument("--params", help="JSON file with alpha/beta/epsilon/eta/theta/kappa")
    for name in ("alpha", "beta", "epsilon", "eta", "theta", "kappa"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--pattern", type=_pattern, required=True, help="actions over C/D, cycled")
    p.add_argument("--rounds", type=int)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--social", type=int, metavar="N", help="population size for the social update")
    p.add_argument("--population", type=_pattern, help="actions of the other N-1 players each round")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trust_curve)

    p = sub.add_parser("sim", help="run the cloud provider simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--periods", type=int)
    p.add_argument("--trace", help="replay this action trace instead of sampling")
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.add_argument("--out-trace")
    p.set_defaults(func=cmd_sim)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SocialSSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
