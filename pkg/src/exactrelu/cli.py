"""Command-line interface.

Exit codes: 0 on success, 1 on bad input, 2 when an enumeration budget is
exceeded.
"""

from __future__ import annotations

import argparse
import sys

from ._numeric import DEFAULT_PRECISION_BITS
from .concave import DEFAULT_SUBSET_BUDGET, train_concave
from .convex import DEFAULT_CELL_BUDGET, SubproblemSpec, train_l1, train_l2
from .core import BudgetExceeded, LossSpec, ReluNetwork, loss_value, rational
from .dichotomies import enumerate_open_dichotomies, enumerate_open_dichotomies_geometric
from .linf import check_realizable, train_linf_interval
from .reduction import decode_clique, generate_instance
from .serialization import (
    dataset_from_json,
    dataset_to_json,
    dumps,
    enc,
    graph_from_json,
    loss_to_json,
    metadata_from_json,
    metadata_to_json,
    model_from_json,
    model_to_json,
    read_json,
    result_to_json,
    write_json,
)


class InputError(Exception):
    pass


def _loss_spec(args) -> LossSpec:
    if args.loss == "linf":
        return LossSpec.linf()
    if args.p is None:
        raise InputError("--loss lp needs --p")
    return LossSpec.lp(rational(args.p))


def _certificate(cert) -> dict:
    if isinstance(cert, SubproblemSpec):
        return {"dichotomies": [list(p) for p in cert.dichotomies], "signs": list(cert.signs)}
    return {}


def cmd_train(args) -> int:
    data = dataset_from_json(read_json(args.data))
    spec = _loss_spec(args)
    if args.k < 1:
        raise InputError("--k must be positive")
    if spec.kind == "linf":
        if args.k != 1:
            raise InputError("the interval loss is only supported for k = 1 (no algorithm is known for k >= 2)")
        res = train_linf_interval(data)
        net = res.network
        loss = loss_value(net, data, spec, args.precision)
        cert = {"s": res.s, "gamma": enc(res.gamma)}
        stats = {"subproblems": res.lp_solves, "lp_solves": res.lp_solves}
    else:
        p = spec.p
        if p == 1 and args.backend != "concave":
            res = train_l1(data, args.k, args.threads, args.budget or DEFAULT_CELL_BUDGET,
                           args.precision)
        elif p == 2:
            res = train_l2(data, args.k, args.threads, args.budget or DEFAULT_CELL_BUDGET,
                           args.precision)
        elif 0 <= p <= 1:
            res = train_concave(data, args.k, p, args.threads,
                                args.budget or DEFAULT_SUBSET_BUDGET, precision_bits=args.precision)
        else:
            raise InputError(f"p = {enc(p)} is not supported; use p in [0, 1], p = 2 or --loss linf")
        net, loss = res.network, res.loss
        cert = _certificate(res.certificate)
        stats = {"subproblems": res.subproblems_solved, "lp_solves": res.lp_solves}
    result = result_to_json(net, loss, cert, stats)
    if args.out:
        write_json(args.out, model_to_json(net))
    if args.result:
        write_json(args.result, result)
    else:
        sys.stdout.write(dumps(result))
    return 0


def cmd_gen_clique(args) -> int:
    graph = graph_from_json(read_json(args.graph))
    out = generate_instance(graph, rational(args.p))
    write_json(args.out, dataset_to_json(out.dataset))
    meta = metadata_to_json(out)
    if args.meta:
        write_json(args.meta, meta)
    else:
        sys.stdout.write(dumps(meta))
    return 0


def cmd_decode(args) -> int:
    data = dataset_from_json(read_json(args.data))
    graph = graph_from_json(read_json(args.graph)) if args.graph else None
    out = metadata_from_json(read_json(args.meta), data, graph)
    net = model_from_json(read_json(args.model))
    clique = decode_clique(net, out)
    print(" ".join(clique) if clique else "(empty)")
    if graph is not None:
        print("multicolored clique" if graph.is_multicolored_clique(clique) else "not a multicolored clique")
    return 0


def cmd_eval(args) -> int:
    data = dataset_from_json(read_json(args.data))
    net = model_from_json(read_json(args.model))
    lv = loss_value(net, data, _loss_spec(args), args.precision)
    val = loss_to_json(lv)
    print(val if isinstance(val, str) else f"{val['approx']} (approximate)")
    return 0


def _distinct_points(data):
    seen = []
    known = set()
    for pt in data.points:
        if pt.x not in known:
            known.add(pt.x)
            seen.append(pt.x)
    return seen


def cmd_dichotomies(args) -> int:
    data = dataset_from_json(read_json(args.data))
    pts = _distinct_points(data)
    if args.method == "lp":
        dich = enumerate_open_dichotomies(pts)
    else:
        dich = enumerate_open_dichotomies_geometric(pts, data.dim)
    if args.count:
        print(len(dich))
    else:
        for dc in dich:
            print("{" + ", ".join(str(i) for i in dc.plus) + "}")
    return 0


def cmd_check_realizable(args) -> int:
    data = dataset_from_json(read_json(args.data))
    ok, wit = check_realizable(data)
    if ok:
        w, b = wit
        print("realizable")
        sys.stdout.write(dumps(model_to_json(ReluNetwork.single(w, b, 1))))
    else:
        print("not realizable")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exactrelu",
                                 description="Exact globally optimal training of small ReLU networks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes (output is identical for any value)")
    common.add_argument("--budget", type=int, default=None, help="hard cap on enumerated cells or subsets")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION_BITS,
                        help="bits of precision for irrational loss values")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train a network to global optimality")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--loss", choices=["lp", "linf"], default="lp")
    p.add_argument("--p", default=None, help="loss exponent as an integer or fraction, e.g. 1/2")
    p.add_argument("--out", help="model JSON output")
    p.add_argument("--result", help="result JSON output (stdout when omitted)")
    p.add_argument("--backend", choices=["auto", "concave"], default="auto",
                   help="force the vertex-enumeration trainer for p = 1")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gen-clique", parents=[common], help="build a hard instance from a coloured graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", default="1")
    p.add_argument("--out", required=True, help="dataset JSON output")
    p.add_argument("--meta", help="metadata JSON output (stdout when omitted)")
    p.set_defaults(func=cmd_gen_clique)

    p = sub.add_parser("decode", parents=[common], help="read a clique off a trained single neuron")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--graph")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", parents=[common], help="loss of a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--loss", choices=["lp", "linf"], default="lp")
    p.add_argument("--p", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dichotomies", parents=[common], help="list open dichotomies of the points")
    p.add_argument("--data", required=True)
    p.add_argument("--count", action="store_true")
    p.add_argument("--method", choices=["geometric", "lp"], default="geometric")
    p.set_defaults(func=cmd_dichotomies)

    p = sub.add_parser("check-realizable", parents=[common], help="can one ReLU fit every label?")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_check_realizable)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 2
    except (InputError, ValueError, TypeError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
