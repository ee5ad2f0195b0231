"""Parsing of the JSON analysis config into groups, families and targets."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from . import groups, representations as reps
from .errors import ConfigError, EquivcheckError, UnknownFamily
from .groups import PermGroup
from .polynomials import MultiPoly, from_json, power_of_sum, product_monomial

SCHEMA_VERSION = 1
ANALYSIS_TYPES = ("separation", "membership", "failure_tests", "certificate", "compare", "fit")


@dataclass
class AnalysisConfig:
    version: int
    families: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)
    analyses: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    name: str = "config"


def parse_group(spec) -> PermGroup:
    """``{"kind": "symmetric", "n": 4}`` or the shorthand string ``"symmetric:4"``."""
    if isinstance(spec, str):
        kind, _, n = spec.partition(":")
        try:
            spec = {"kind": kind, "n": int(n)}
        except ValueError as exc:
            raise ConfigError(f"bad group shorthand {spec!r}") from exc
    if not isinstance(spec, dict):
        raise ConfigError(f"group spec must be an object, got {spec!r}")
    kind, n = spec.get("kind"), spec.get("n")
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"group spec needs a positive integer 'n': {spec!r}")
    try:
        if kind == "symmetric":
            return groups.symmetric_group(n)
        if kind == "alternating":
            return groups.alternating_group(n)
        if kind == "cyclic":
            return groups.cyclic_group(n)
        if kind == "trivial":
            return groups.trivial_group(n)
        if kind == "generators":
            return groups.group_closure(spec.get("gens", []), base_size=n)
    except EquivcheckError as exc:
        raise ConfigError(f"invalid group {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown group kind {kind!r}")


def parse_subgroup(spec, G: PermGroup) -> PermGroup:
    """Named subgroup (``alternating``, ``trivial``, ``whole``) or a generator list."""
    if isinstance(spec, str):
        name = spec.strip()
        if name == "alternating":
            return groups.alternating_group(G.base_size) if _is_symmetric(G) else _fail(name)
        if name == "trivial":
            return groups.trivial_group(G.base_size)
        if name == "whole":
            return G
        try:
            spec = json.loads(name)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"unknown subgroup {name!r}") from exc
    if isinstance(spec, dict):
        spec = spec.get("gens", [])
    try:
        return groups.subgroup(G, spec)
    except EquivcheckError as exc:
        raise ConfigError(f"invalid subgroup {spec!r}: {exc}") from exc


def _is_symmetric(G: PermGroup) -> bool:
    from math import factorial
    return G.order == factorial(G.base_size)


def _fail(name):
    raise ConfigError(f"subgroup {name!r} is only defined for symmetric groups")


def parse_rep(spec, G: PermGroup) -> reps.PermRep:
    if spec == "natural":
        return reps.natural_rep(G)
    if spec == "regular":
        return reps.regular_rep(G)
    if spec == "trivial":
        return reps.trivial_rep(G)
    if isinstance(spec, dict) and "cosets" in spec:
        return reps.coset_rep(G, parse_subgroup(spec["cosets"], G))
    if isinstance(spec, dict) and "sum" in spec:
        parts = [parse_rep(s, G) for s in spec["sum"]]
        out = parts[0]
        for p in parts[1:]:
            out = reps.direct_sum(out, p)
        return out
    raise ConfigError(f"unknown representation {spec!r}")


def parse_layer(spec: dict) -> reps.LayerSpace:
    kind = spec.get("kind")
    try:
        if kind == "conv":
            return reps.layer_conv(int(spec["n"]), int(spec.get("k", 1)))
        if kind == "pointnet":
            return reps.layer_pointnet(int(spec["n"]))
        if kind in ("full", "custom"):
            G = parse_group(spec["group"])
            V = parse_rep(spec.get("source", "natural"), G)
            W = parse_rep(spec.get("target", "natural"), G)
            if kind == "full":
                return reps.layer_full(V, W)
            return reps.LayerSpace.custom(V, W, spec["matrices"])
    except KeyError as exc:
        raise ConfigError(f"layer spec {spec!r} misses {exc}") from exc
    except (EquivcheckError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid layer spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown layer kind {kind!r}")


def parse_family(spec: dict, name: str) -> reps.BasisMapFamily:
    layer = parse_layer(spec)
    if "basis_change" in spec:
        try:
            layer = layer.with_basis_change(spec["basis_change"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid basis change for {name!r}: {exc}") from exc
    F = reps.basis_maps(layer)
    return reps.BasisMapFamily(F.maps, F.m, F.source_dim, F.group, name)


def parse_target(spec) -> MultiPoly:
    if not isinstance(spec, dict):
        raise ConfigError(f"target spec must be an object, got {spec!r}")
    try:
        n = int(spec["n"])
        builder = spec.get("builder")
        if builder == "power_of_sum":
            return power_of_sum(n, int(spec["degree"]))
        if builder == "product_monomial":
            return product_monomial(n)
        if builder is None:
            return from_json(n, spec["terms"])
    except KeyError as exc:
        raise ConfigError(f"target spec {spec!r} misses {exc}") from exc
    except (EquivcheckError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid target {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown target builder {builder!r}")


def bundled_config_path(name: str) -> Path | None:
    res = resources.files("equivcheck") / "data" / f"{name}.json"
    return Path(str(res)) if res.is_file() else None


def load_config(path, seed: int | None = None) -> AnalysisConfig:
    p = Path(path)
    if not p.exists():
        bundled = bundled_config_path(str(path))
        if bundled is None:
            raise ConfigError(f"config file {path} not found")
        p = bundled
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {p}: {exc}") from exc
    return parse_config(raw, name=p.stem, seed=seed)


def parse_config(raw: Any, name: str = "config", seed: int | None = None) -> AnalysisConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "version" not in raw:
        raise ConfigError("config misses the 'version' field")
    if raw["version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {raw['version']!r}")
    cfg = AnalysisConfig(version=raw["version"], name=name,
                         seed=int(raw.get("seed", 0)) if seed is None else seed,
                         outputs=dict(raw.get("outputs", {})))
    for fname, spec in raw.get("families", {}).items():
        cfg.families[fname] = parse_family(spec, fname)
    for tname, spec in raw.get("targets", {}).items():
        cfg.targets[tname] = parse_target(spec)
    analyses = raw.get("analyses", [])
    if not isinstance(analyses, list):
        raise ConfigError("'analyses' must be a list")
    for a in analyses:
        if not isinstance(a, dict) or a.get("type") not in ANALYSIS_TYPES:
            raise ConfigError(f"unknown analysis {a!r}")
        for key in ("family", "first", "second"):
            if key in a and a[key] not in cfg.families:
                raise UnknownFamily(f"analysis references unknown family {a[key]!r}")
        if "target" in a and a["target"] not in cfg.targets:
            raise ConfigError(f"analysis references unknown target {a['target']!r}")
        cfg.analyses.append(a)
    return cfg
