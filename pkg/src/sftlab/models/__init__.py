"""Concrete models and a name registry used by the command line."""

import re

from ..burton_steif import lift
from ..gibbs import validate_hypothesis_H
from ..sft import full_shift, CROSS
from . import edge_potts, potts, vertex, yprime


def vertex_interaction(spec=None):
    return validate_hypothesis_H(vertex.arrow_energies(spec))


def potts_interaction(q):
    return validate_hypothesis_H(potts.potts_letter_energies(q))


def vertex_lift(N):
    """Toned loop model: dots and crosses carry ``N`` tones, arrows none.

    Adjacency is tone-blind on colour classes, and a dot or cross may not be
    surrounded by four straight arrows.  The result equals the generic tone
    lift of the loop model with that extra exclusion, which is how it is
    built; ``base`` is still the plain loop model.
    """
    plain = vertex.vertex_spec()
    strict = vertex.vertex_spec(rule_d=True)
    tl = lift(strict, vertex_interaction(strict), N)
    tl.base = plain
    tl.effective_base = strict
    tl.custom_rules = True
    tl.lifted.name = f"vertex-lift-{N}"
    return tl


def vertex_lift_spec(N):
    return vertex_lift(N).lifted


_NAME = re.compile(r"^(potts|vertex|vertex-d|vertex-lift|edge-potts|yprime|full)((?::\d+)*)$")


def parse_model_name(name):
    m = _NAME.match(name)
    if not m:
        raise ValueError(f"unknown model name {name!r}")
    args = [int(a) for a in m.group(2).split(":")[1:]]
    return m.group(1), args


def build(name):
    """Return ``(spec, interaction, tone_lift)`` for a registry name.

    Names: ``potts:q``, ``vertex``, ``vertex-d``, ``vertex-lift:N``,
    ``edge-potts:q:N``, ``yprime``, ``full:q``.  ``interaction`` and
    ``tone_lift`` are ``None`` where they do not apply.
    """
    kind, args = parse_model_name(name)
    need = {"potts": 1, "vertex": 0, "vertex-d": 0, "vertex-lift": 1, "edge-potts": 2, "yprime": 0, "full": 1}[kind]
    if len(args) != need:
        raise ValueError(f"model {kind!r} takes {need} integer parameter(s)")
    if kind == "potts":
        return potts.potts_cross_spec(args[0]), potts_interaction(args[0]), None
    if kind in ("vertex", "vertex-d"):
        spec = vertex.vertex_spec(rule_d=kind == "vertex-d")
        return spec, vertex_interaction(spec), None
    if kind == "vertex-lift":
        tl = vertex_lift(args[0])
        return tl.lifted, None, tl
    if kind == "edge-potts":
        return edge_potts.edge_potts_spec(*args), None, None
    if kind == "yprime":
        return yprime.yprime_spec(), None, None
    spec = full_shift(args[0], CROSS)
    return spec, None, None


def potts_lift(q, N):
    spec = potts.potts_cross_spec(q)
    return lift(spec, potts_interaction(q), N)
