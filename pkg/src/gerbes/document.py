"""JSON documents describing groups, modules, extensions, and models.

One input format only: a UTF-8 JSON object with the optional top-level
sections ``groups``, ``modules``, ``extensions``, ``model``, and ``tasks``.
Entities refer to each other by string identifiers.  Example:

    {
      "groups": {
        "G": {"table": [[0, 1], [1, 0]]},
        "H": {"permutations": [[1, 2, 0]]}
      },
      "modules": {
        "M": {"group": "G", "factors": [2], "action": {}}
      },
      "extensions": {
        "E": {"total": "T", "quotient": "G", "kernel": "H",
               "projection": [0, 1, ...], "injection": [0, ...]}
      },
      "model": {
        "group": "G",
        "mu": {"modulus": 8, "character": {"1": 7}},
        "places": [{"name": "v0", "subgroup": [0, 1], "inv": ["1/2"]}],
        "chebotarev_complete": false
      },
      "tasks": {"cohomology": {"module": "M", "degree": 2}}
    }

Omitted action entries mean the identity matrix (trivial-action shorthand);
place invariants align with the canonical H^2 generator order, which the
cochain machinery fixes deterministically.  Q/Z values are always reduced
fraction strings, never floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .arith import ArithmeticModel, AxiomReport, Place, ShaResult
from .cochain import Cochain, CohomologyGroup
from .errors import InputError
from .finab import QmodZ
from .gerbe import BMFunctional, BMTrace, FactorizationReport, GerbeExtension
from .groups import FiniteGroup, GroupHom, Subgroup, build_group
from .modules import GModule, cyclic_module
from .finab import FinAb


@dataclass
class Document:
    """Parsed and fully resolved input document."""

    groups: dict[str, FiniteGroup]
    modules: dict[str, GModule]
    extensions: dict[str, GerbeExtension]
    model: ArithmeticModel | None
    tasks: dict[str, Any]
    raw: dict[str, Any]

    def group(self, name: str) -> FiniteGroup:
        return _lookup(self.groups, name, "group")

    def module(self, name: str) -> GModule:
        return _lookup(self.modules, name, "module")

    def extension(self, name: str) -> GerbeExtension:
        return _lookup(self.extensions, name, "extension")

    def require_model(self) -> ArithmeticModel:
        if self.model is None:
            raise InputError("this command needs a 'model' section in the document")
        return self.model


def _lookup(table: dict, name: str, kind: str):
    if name not in table:
        raise InputError(f"unresolved {kind} reference {name!r}")
    return table[name]


def load_document(path: str, max_group_order: int = 10080) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_document(raw, max_group_order=max_group_order)


def parse_document(raw: dict[str, Any], max_group_order: int = 10080) -> Document:
    if not isinstance(raw, dict):
        raise InputError("document root must be a JSON object")
    known = {"groups", "modules", "extensions", "model", "tasks"}
    for key in raw:
        if key not in known:
            raise InputError(f"unknown top-level section {key!r}")
    groups: dict[str, FiniteGroup] = {}
    for name, spec in (raw.get("groups") or {}).items():
        try:
            groups[name] = build_group(spec, max_order=max_group_order, name=name)
        except InputError:
            raise
        except Exception as exc:
            raise InputError(f"group {name!r}: {exc}") from exc
    modules: dict[str, GModule] = {}
    for name, spec in (raw.get("modules") or {}).items():
        modules[name] = _parse_module(name, spec, groups)
    extensions: dict[str, GerbeExtension] = {}
    for name, spec in (raw.get("extensions") or {}).items():
        extensions[name] = _parse_extension(name, spec, groups)
    model = None
    if raw.get("model") is not None:
        model = _parse_model(raw["model"], groups)
    tasks = raw.get("tasks") or {}
    if not isinstance(tasks, dict):
        raise InputError("'tasks' must be an object")
    return Document(groups, modules, extensions, model, tasks, raw)


def _parse_module(name: str, spec: dict[str, Any], groups: dict[str, FiniteGroup]) -> GModule:
    if "group" not in spec:
        raise InputError(f"module {name!r} is missing its 'group' reference")
    group = _lookup(groups, spec["group"], "group")
    factors = tuple(int(d) for d in spec.get("factors", ()))
    action = {int(k): v for k, v in (spec.get("action") or {}).items()}
    try:
        return GModule(group, FinAb(factors), action or None, name=name)
    except InputError as exc:
        raise InputError(f"module {name!r}: {exc}") from exc


def _parse_extension(name: str, spec: dict[str, Any], groups: dict[str, FiniteGroup]) -> GerbeExtension:
    for key in ("total", "quotient", "kernel", "projection", "injection"):
        if key not in spec:
            raise InputError(f"extension {name!r} is missing {key!r}")
    total = _lookup(groups, spec["total"], "group")
    quotient = _lookup(groups, spec["quotient"], "group")
    kernel = _lookup(groups, spec["kernel"], "group")
    try:
        proj = GroupHom(total, quotient, [int(x) for x in spec["projection"]])
        incl = GroupHom(kernel, total, [int(x) for x in spec["injection"]])
        return GerbeExtension(proj, incl)
    except InputError as exc:
        raise InputError(f"extension {name!r}: {exc}") from exc
    except Exception as exc:
        raise InputError(f"extension {name!r}: {exc}") from exc


def _parse_model(spec: dict[str, Any], groups: dict[str, FiniteGroup]) -> ArithmeticModel:
    if "group" not in spec:
        raise InputError("model is missing its 'group' reference")
    group = _lookup(groups, spec["group"], "group")
    mu_spec = spec.get("mu") or {}
    modulus = int(mu_spec.get("modulus", 0))
    if modulus < 2:
        raise InputError("model 'mu' needs a modulus >= 2")
    character = {int(k): int(v) for k, v in (mu_spec.get("character") or {}).items()}
    mu = cyclic_module(group, modulus, character or None, name="mu")
    places = []
    for i, pspec in enumerate(spec.get("places") or []):
        pname = pspec.get("name", f"v{i}")
        sub = Subgroup(group, tuple(int(x) for x in pspec.get("subgroup", [0])))
        inv = tuple(QmodZ.parse(str(v)) for v in pspec.get("inv", []))
        places.append(Place(pname, sub, inv))
    return ArithmeticModel(
        group,
        mu,
        places,
        chebotarev_complete=bool(spec.get("chebotarev_complete", False)),
    )


# -- serialization ------------------------------------------------------------


def canonical_json(obj: Any) -> str:
    """Sorted-key JSON with a trailing newline; byte-stable across runs."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def group_json(group: FiniteGroup) -> dict[str, Any]:
    return {"table": [list(row) for row in group.table]}


def module_json(module: GModule, group_name: str) -> dict[str, Any]:
    k = module.rank
    ident = tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))
    action = {
        str(g): [list(r) for r in module.matrix(g)]
        for g in range(module.group.order)
        if module.matrix(g) != ident
    }
    return {
        "group": group_name,
        "factors": list(module.carrier.factors),
        "action": action,
    }


def extension_json(ext: GerbeExtension) -> dict[str, Any]:
    return {
        "projection": list(ext.proj.images),
        "injection": list(ext.incl.images),
        "orders": {
            "total": ext.total.order,
            "quotient": ext.quotient.order,
            "kernel": ext.kernel_group.order,
        },
    }


def model_json(model: ArithmeticModel, group_name: str = "G") -> dict[str, Any]:
    character = {
        str(g): model.mu.matrix(g)[0][0]
        for g in range(model.group.order)
        if model.mu.matrix(g)[0][0] != 1
    }
    return {
        "group": group_name,
        "mu": {"modulus": model.modulus, "character": character},
        "places": [
            {
                "name": p.name,
                "subgroup": list(p.subgroup.elements),
                "inv": [str(v) for v in p.inv],
            }
            for p in model.places
        ],
        "chebotarev_complete": model.chebotarev_complete,
    }


def echo_document(
    document: Document,
    module_names: tuple[str, ...] = (),
    extension_names: tuple[str, ...] = (),
    include_model: bool = False,
    tasks: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """A re-ingestable document built from the resolved entities.

    Ingesting the result reproduces the same computation outputs, which is
    the round-trip contract of ``--output json``.
    """

    def name_of(group: FiniteGroup) -> str:
        for n, obj in document.groups.items():
            if obj is group:
                return n
        raise InputError("cannot echo a group that is not part of the document")

    groups: dict[str, Any] = {}
    modules: dict[str, Any] = {}
    extensions: dict[str, Any] = {}
    for name in module_names:
        module = document.module(name)
        gname = name_of(module.group)
        groups[gname] = group_json(module.group)
        modules[name] = module_json(module, gname)
    for name in extension_names:
        ext = document.extension(name)
        tname, qname, kname = (
            name_of(ext.total),
            name_of(ext.quotient),
            name_of(ext.kernel_group),
        )
        for n, g in ((tname, ext.total), (qname, ext.quotient), (kname, ext.kernel_group)):
            groups[n] = group_json(g)
        extensions[name] = {
            "total": tname,
            "quotient": qname,
            "kernel": kname,
            "projection": list(ext.proj.images),
            "injection": list(ext.incl.images),
        }
    out: dict[str, Any] = {"groups": groups}
    if modules:
        out["modules"] = modules
    if extensions:
        out["extensions"] = extensions
    if include_model:
        model = document.require_model()
        gname = name_of(model.group)
        groups[gname] = group_json(model.group)
        out["model"] = model_json(model, gname)
    if tasks:
        out["tasks"] = tasks
    return out


def cochain_json(c: Cochain) -> dict[str, Any]:
    return {"degree": c.degree, "values": [list(v) for v in c.values]}


def cohomology_json(h: CohomologyGroup, certificates: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "degree": h.degree,
        "invariant_factors": list(h.factors),
        "order": h.order,
    }
    if certificates:
        out["representatives"] = [cochain_json(r) for r in h.representatives]
    return out


def axiom_report_json(report: AxiomReport) -> dict[str, Any]:
    return {
        "passed": report.passed,
        "a1": [
            {
                "place": e.place,
                "generator": e.generator,
                "generator_order": e.generator_order,
                "value": str(e.value),
                "ok": e.ok,
            }
            for e in report.a1
        ],
        "a2": [
            {
                "generator": e.generator,
                "contributions": [[p, str(v)] for p, v in e.contributions],
                "total": str(e.total),
                "ok": e.ok,
            }
            for e in report.a2
        ],
        "a3": {
            "checked": report.a3.checked,
            "uncovered": [list(u) for u in report.a3.uncovered],
            "ok": report.a3.ok,
        },
    }


def sha_json(result: ShaResult, certificates: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "degree": result.degree,
        "ambient_factors": list(result.ambient.factors),
        "invariant_factors": list(result.factors),
        "order": result.order,
    }
    if certificates:
        out["generators"] = [
            {
                "order": g.order,
                "ambient_coords": list(g.ambient_coords),
                "cochain": cochain_json(g.cochain),
                "local_primitives": {
                    name: cochain_json(c) for name, c in g.local_primitives
                },
            }
            for g in result.generators
        ]
    return out


def trace_json(trace: BMTrace) -> dict[str, Any]:
    return {
        "class_cochain": cochain_json(trace.e),
        "generators": [
            {
                "b": cochain_json(g.b),
                "cup": cochain_json(g.u),
                "gamma": cochain_json(g.gamma),
                "places": [
                    {
                        "place": p.place,
                        "c_v": cochain_json(p.c_v),
                        "w_v": cochain_json(p.w_v),
                        "contribution": str(p.contribution),
                    }
                    for p in g.places
                ],
            }
            for g in trace.generators
        ],
    }


def functional_json(f: BMFunctional, certificates: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "domain_factors": list(f.sha.factors),
        "values": [str(v) for v in f.values],
        "mu_modulus": f.modulus,
        "is_zero": f.is_zero(),
    }
    if certificates:
        out["domain"] = sha_json(f.sha, certificates=True)
        if f.trace is not None:
            out["trace"] = trace_json(f.trace)
    return out


def factorization_json(rep: FactorizationReport, certificates: bool = False) -> dict[str, Any]:
    return {
        "holds": rep.equal,
        "via_extension": functional_json(rep.via_extension, certificates),
        "via_pushout": functional_json(rep.via_pushout, certificates),
        "differences": [
            {"generator": j, "extension": str(a), "pushout": str(b)}
            for j, a, b in rep.differences
        ],
    }
