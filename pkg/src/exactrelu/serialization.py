"""JSON file formats. Every number is written as a rational string.

Rationals are encoded as ``"7"`` or ``"-3/8"``; on input, JSON integers are
accepted too, floats never.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import Dataset, Label, LabeledPoint, LossValue, Neuron, ReluNetwork, rational
from .reduction import ColoredGraph, ReductionOutput


class FormatError(ValueError):
    pass


def enc(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dec(v) -> Fraction:
    if isinstance(v, float):
        raise FormatError(f"floating-point number {v!r} in input; write it as a fraction string")
    try:
        return rational(v)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormatError(str(e)) from None


def _need(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return v


def _int(obj, key):
    v = _need(obj, key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(f"field {key!r} must be an integer")
    return v


# --- dataset ---------------------------------------------------------------


def dataset_to_json(data: Dataset) -> dict:
    pts = []
    for pt in data.points:
        item = {"x": [enc(v) for v in pt.x]}
        if pt.label.is_interval:
            item["interval"] = [enc(pt.label.alpha), enc(pt.label.beta)]
        else:
            item["y"] = enc(pt.label.alpha)
        if pt.multiplicity != 1:
            item["mult"] = pt.multiplicity
        pts.append(item)
    return {"dim": data.dim, "points": pts}


def dataset_from_json(obj) -> Dataset:
    dim = _int(obj, "dim")
    raw = _need(obj, "points", list)
    pts = []
    for item in raw:
        x = tuple(dec(v) for v in _need(item, "x", list))
        if "interval" in item:
            iv = item["interval"]
            if not isinstance(iv, list) or len(iv) != 2:
                raise FormatError("interval must be a pair")
            lab = Label.interval(dec(iv[0]), dec(iv[1]))
        elif "y" in item:
            lab = Label.scalar(dec(item["y"]))
        else:
            raise FormatError("point needs 'y' or 'interval'")
        mult = item.get("mult", 1)
        if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
            raise FormatError("mult must be a positive integer")
        pts.append(LabeledPoint(x, lab, mult))
    return Dataset(dim, tuple(pts))


# --- model -----------------------------------------------------------------


def model_to_json(net: ReluNetwork) -> dict:
    return {"k": net.k, "neurons": [{"w": [enc(v) for v in nr.w], "b": enc(nr.b), "a": nr.a}
                                    for nr in net.neurons]}


def model_from_json(obj) -> ReluNetwork:
    k = _int(obj, "k")
    raw = _need(obj, "neurons", list)
    if len(raw) != k:
        raise FormatError(f"model says k={k} but lists {len(raw)} neurons")
    neurons = []
    for item in raw:
        a = _need(item, "a")
        if a not in (1, -1) or isinstance(a, bool):
            raise FormatError("neuron sign 'a' must be 1 or -1")
        neurons.append(Neuron(tuple(dec(v) for v in _need(item, "w", list)), dec(_need(item, "b")), a))
    return ReluNetwork(tuple(neurons))


# --- graph -----------------------------------------------------------------


def graph_to_json(g: ColoredGraph) -> dict:
    edges = sorted(sorted(e) for e in g.edges)
    return {"colors": g.k_colors,
            "vertices": [{"id": v, "color": c} for v, c in g.vertices],
            "edges": [list(e) for e in edges]}


def graph_from_json(obj) -> ColoredGraph:
    k = _int(obj, "colors")
    verts = []
    for item in _need(obj, "vertices", list):
        vid = _need(item, "id")
        if not isinstance(vid, str):
            raise FormatError("vertex id must be a string")
        c = _int(item, "color")
        verts.append((vid, c))
    edges = []
    for e in _need(obj, "edges", list):
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError("edge must be a pair of ids")
        edges.append(frozenset(e))
    return ColoredGraph(tuple(verts), frozenset(edges), k)


# --- reduction metadata ----------------------------------------------------


def metadata_to_json(out: ReductionOutput) -> dict:
    return {
        "gamma": enc(out.gamma),
        "delta": enc(out.delta),
        "M": out.m_copies,
        "p": enc(out.p),
        "decode_map": {str(i): v for i, v in sorted(out.decode_map.items())},
    }


def metadata_from_json(obj, dataset: Dataset, graph: ColoredGraph | None = None) -> ReductionOutput:
    dm = _need(obj, "decode_map", dict)
    return ReductionOutput(dataset, dec(_need(obj, "gamma")), dec(_need(obj, "delta")),
                           _int(obj, "M"), dec(_need(obj, "p")),
                           {int(i): v for i, v in dm.items()}, graph)


# --- results ---------------------------------------------------------------


def loss_to_json(lv: LossValue):
    if lv.is_exact:
        return enc(lv.exact)
    return {"approx": str(lv.approx), "exact": False}


def loss_from_json(obj) -> LossValue:
    from decimal import Decimal

    if isinstance(obj, dict):
        return LossValue(None, Decimal(_need(obj, "approx", str)))
    return LossValue.of_exact(dec(obj))


def result_to_json(net: ReluNetwork, loss: LossValue, certificate: dict, stats: dict) -> dict:
    return {"loss": loss_to_json(loss), "model": model_to_json(net),
            "certificate": certificate, "stats": stats}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(obj))
