"""Experiment descriptions: a single JSON document naming the group, the
array, the candidate limit law, the evaluation grid and tolerances, and
the Monte Carlo block.  Everything a report contains is recomputable from
this document plus the master seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arrays import (
    BernoulliArray,
    GeneralArray,
    IIDSymmetricArray,
    RademacherArray,
    Schedule,
    TriangularArraySpec,
    check_null_rule,
    row_distribution,
)
from .groups import (
    PADIC,
    SOLENOID,
    TORUS,
    Character,
    CompactSubgroup,
    GroupElement,
    GroupId,
    Neighborhood,
    character,
    cyclic_subgroup,
    from_angle,
    from_base_angle,
    from_digits,
    from_int,
    from_turns,
    full_subgroup,
    identity,
    lambda_subgroup,
    trivial_subgroup,
)
from .measures import (
    LimitLaw,
    QuadraticFormParam,
    discrete_measure,
    local_mean,
    validate_levy,
)
from .verify import ConfigError, VerifySettings


@dataclass(frozen=True)
class MonteCarloSettings:
    enabled: bool = False
    replicates: int = 10_000
    seed: int = 0
    n_points: tuple[int, ...] = ()
    sample_law: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    group: GroupId
    array: TriangularArraySpec
    law: LimitLaw
    settings: VerifySettings
    mc: MonteCarloSettings
    out_dir: str = "reports"
    source: dict = field(default_factory=dict)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _get(doc: dict, key: str, context: str):
    if key not in doc:
        raise ConfigError(f"missing field {key!r} in {context}")
    return doc[key]


def parse_group(doc) -> GroupId:
    _require(isinstance(doc, dict), "group must be an object")
    kind = _get(doc, "kind", "group")
    if kind == "torus":
        return GroupId(TORUS)
    _require(kind in (PADIC, SOLENOID), f"unknown group kind {kind!r}")
    _require("p" in doc, f"missing prime p for {kind} group")
    p = doc["p"]
    _require(isinstance(p, int), "prime p must be an integer")
    depth = doc.get("depth", 16 if kind == PADIC else 8)
    try:
        return GroupId(kind, p, depth)
    except ValueError as exc:
        raise ConfigError(f"group: {exc}") from exc


def parse_element(doc, group: GroupId, context: str = "element") -> GroupElement:
    _require(isinstance(doc, dict), f"{context} must be an object")
    try:
        if group.kind == TORUS:
            if "angle" in doc:
                return from_angle(group, float(doc["angle"]))
            if "turns" in doc:
                return from_turns(group, float(doc["turns"]))
            raise ConfigError(f"{context}: torus elements need 'angle' or 'turns'")
        if group.kind == PADIC:
            if "digits" in doc:
                digits = list(doc["digits"])
                # short digit vectors are padded with zeros up to the depth
                _require(
                    len(digits) <= group.depth + 1,
                    f"{context}: more digits than the working depth allows",
                )
                digits += [0] * (group.depth + 1 - len(digits))
                return from_digits(group, digits)
            if "int" in doc:
                return from_int(group, int(doc["int"]))
            raise ConfigError(f"{context}: padic elements need 'digits' or 'int'")
        if "base_angle" in doc:
            return from_base_angle(group, float(doc["base_angle"]))
        if "deep_angle" in doc:
            return from_angle(group, float(doc["deep_angle"]))
        if "turns" in doc:
            return from_turns(group, float(doc["turns"]))
        raise ConfigError(
            f"{context}: solenoid elements need 'base_angle', 'deep_angle' or 'turns'"
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def parse_schedule(doc, context: str) -> Schedule:
    _require(isinstance(doc, dict), f"{context} must be a schedule object")
    kind = _get(doc, "kind", context)
    try:
        if kind == "constant":
            return Schedule("constant", coef=float(_get(doc, "value", context)))
        if kind == "linear":
            return Schedule("linear", coef=float(_get(doc, "coef", context)))
        if kind == "power":
            return Schedule(
                "power",
                coef=float(_get(doc, "coef", context)),
                exp=float(_get(doc, "exp", context)),
            )
        if kind == "table":
            values = _get(doc, "values", context)
            return Schedule(
                "table",
                table=tuple(sorted((int(k), float(v)) for k, v in values.items())),
            )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc
    raise ConfigError(f"{context}: unknown schedule kind {kind!r}")


def _parse_atoms(doc, group: GroupId, context: str):
    _require(isinstance(doc, list), f"{context} must be a list of atoms")
    atoms = []
    for i, entry in enumerate(doc):
        _require(isinstance(entry, dict), f"{context}[{i}] must be an object")
        x = parse_element(_get(entry, "x", f"{context}[{i}]"), group, f"{context}[{i}].x")
        w = float(_get(entry, "weight", f"{context}[{i}]"))
        atoms.append((x, w))
    return atoms


def parse_array(doc, group: GroupId) -> TriangularArraySpec:
    _require(isinstance(doc, dict), "array must be an object")
    kind = _get(doc, "kind", "array")
    if kind == "rademacher":
        K = parse_schedule(_get(doc, "K", "array"), "array.K")
        if group.kind == PADIC:
            elements = _get(doc, "elements", "array (padic rademacher)")
            pairs = tuple(
                sorted(
                    (int(n), parse_element(e, group, f"array.elements[{n}]"))
                    for n, e in elements.items()
                )
            )
            return RademacherArray(group, K, elements=pairs)
        angle = parse_schedule(_get(doc, "angle", "array"), "array.angle")
        return RademacherArray(group, K, angle=angle)
    if kind == "bernoulli":
        x = parse_element(_get(doc, "x", "array"), group, "array.x")
        p = parse_schedule(_get(doc, "p", "array"), "array.p")
        K = parse_schedule(_get(doc, "K", "array"), "array.K")
        try:
            return BernoulliArray(group, x, p, K)
        except ValueError as exc:
            raise ConfigError(f"array: {exc}") from exc
    if kind == "iid_symmetric":
        K = parse_schedule(_get(doc, "K", "array"), "array.K")
        rows = _get(doc, "rows", "array")
        dists = {}
        for n, atoms in rows.items():
            dists[int(n)] = row_distribution(
                group, _parse_atoms(atoms, group, f"array.rows[{n}]")
            )

        def rule(n: int, _table=dists):
            if n not in _table:
                raise ConfigError(f"array.rows has no entry for n={n}")
            return _table[n]

        return IIDSymmetricArray(group, rule, K)
    if kind == "general":
        rows = _get(doc, "rows", "array")
        per_n = {}
        for n, row_list in rows.items():
            _require(isinstance(row_list, list), f"array.rows[{n}] must be a list")
            per_n[int(n)] = tuple(
                row_distribution(group, _parse_atoms(atoms, group, f"array.rows[{n}][{k}]"))
                for k, atoms in enumerate(row_list)
            )

        def rows_rule(n: int, _table=per_n):
            if n not in _table:
                raise ConfigError(f"array.rows has no entry for n={n}")
            return _table[n]

        return GeneralArray(group, rows_rule)
    raise ConfigError(f"unknown array kind {kind!r}")


def parse_subgroup(doc, group: GroupId) -> CompactSubgroup:
    if doc is None:
        return trivial_subgroup(group)
    _require(isinstance(doc, dict), "law.H must be an object")
    kind = _get(doc, "kind", "law.H")
    try:
        if kind == "trivial":
            return trivial_subgroup(group)
        if kind == "full":
            return full_subgroup(group)
        if kind == "cyclic":
            return cyclic_subgroup(group, int(_get(doc, "r", "law.H")))
        if kind == "lambda":
            return lambda_subgroup(group, int(_get(doc, "r", "law.H")))
    except ValueError as exc:
        raise ConfigError(f"law.H: {exc}") from exc
    raise ConfigError(f"law.H: unknown subgroup kind {kind!r}")


def parse_law(doc, group: GroupId) -> LimitLaw:
    _require(isinstance(doc, dict), "law must be an object")
    H = parse_subgroup(doc.get("H"), group)
    try:
        b = QuadraticFormParam(group, float(doc.get("b", 0.0)))
    except ValueError as exc:
        raise ConfigError(f"law.b: {exc}") from exc
    eta_doc = doc.get("eta", [])
    try:
        eta = validate_levy(
            discrete_measure(group, _parse_atoms(eta_doc, group, "law.eta"))
        )
    except ValueError as exc:
        raise ConfigError(f"law.eta: {exc}") from exc
    a_doc = doc.get("a")
    if a_doc is None:
        a = identity(group)
    elif a_doc == "mean":
        a = local_mean(eta.measure)
    else:
        a = parse_element(a_doc, group, "law.a")
    try:
        return LimitLaw(H, a, b, eta)
    except ValueError as exc:
        raise ConfigError(f"law: {exc}") from exc


def parse_characters(doc, group: GroupId) -> tuple[Character, ...]:
    _require(isinstance(doc, list), "characters must be a list")
    out = []
    for i, entry in enumerate(doc):
        _require(isinstance(entry, dict), f"characters[{i}] must be an object")
        ell = int(_get(entry, "l", f"characters[{i}]"))
        d = int(entry.get("d", 0))
        try:
            out.append(character(group, ell, d))
        except ValueError as exc:
            raise ConfigError(f"characters[{i}]: {exc}") from exc
    return tuple(out)


def parse_neighborhoods(doc, group: GroupId) -> tuple[Neighborhood, ...]:
    _require(isinstance(doc, list), "neighborhoods must be a list")
    out = []
    for i, entry in enumerate(doc):
        _require(isinstance(entry, dict), f"neighborhoods[{i}] must be an object")
        try:
            if group.kind == PADIC:
                out.append(Neighborhood(group, rank=int(_get(entry, "rank", f"neighborhoods[{i}]"))))
            elif group.kind == TORUS:
                out.append(Neighborhood(group, eps=float(_get(entry, "eps", f"neighborhoods[{i}]"))))
            else:
                out.append(
                    Neighborhood(
                        group,
                        eps=float(_get(entry, "eps", f"neighborhoods[{i}]")),
                        d=int(entry.get("d", 0)),
                    )
                )
        except ValueError as exc:
            raise ConfigError(f"neighborhoods[{i}]: {exc}") from exc
    return tuple(out)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate an experiment document; raises ConfigError
    with the offending field named."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "config must be a JSON object")

    group = parse_group(_get(doc, "group", "config"))
    array = parse_array(_get(doc, "array", "config"), group)
    law = parse_law(_get(doc, "law", "config"), group)

    grid = tuple(int(n) for n in doc.get("grid", ()))
    tol_doc = doc.get("tolerances", {})
    settings = VerifySettings(
        grid=grid or VerifySettings().grid,
        characters=parse_characters(doc["characters"], group)
        if "characters" in doc
        else (),
        neighborhoods=parse_neighborhoods(doc["neighborhoods"], group)
        if "neighborhoods" in doc
        else (),
        trend_tol=float(tol_doc.get("trend", VerifySettings().trend_tol)),
        window=int(tol_doc.get("window", VerifySettings().window)),
        divergence_threshold=float(
            tol_doc.get("divergence", VerifySettings().divergence_threshold)
        ),
        ft_tol=float(tol_doc.get("ft", VerifySettings().ft_tol)),
    )
    try:
        settings = settings.resolved(group)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    mc_doc = doc.get("mc", {})
    _require(isinstance(mc_doc, dict), "mc must be an object")
    n_points = tuple(int(n) for n in mc_doc.get("n", ())) or (settings.grid[0],)
    mc = MonteCarloSettings(
        enabled=bool(mc_doc.get("enabled", False)),
        replicates=int(mc_doc.get("replicates", 10_000)),
        seed=int(mc_doc.get("seed", 0)),
        n_points=n_points,
        sample_law=bool(mc_doc.get("sample_law", group.kind != SOLENOID)),
    )
    _require(mc.replicates >= 1, "mc.replicates must be at least 1")

    # fail early on table schedules that do not cover the grid
    _probe_array(array, settings.grid, mc.n_points)

    return ExperimentConfig(
        group=group,
        array=array,
        law=law,
        settings=settings,
        mc=mc,
        out_dir=str(doc.get("out", "reports")),
        source=doc,
    )


def _probe_array(array: TriangularArraySpec, grid, n_points) -> None:
    try:
        for n in tuple(grid) + tuple(n_points):
            array.row_count(n)
            if array.is_iid():
                array.iid_dist(n)
            else:
                array.rows(n)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"array rules do not cover the grid: {exc}") from exc
    try:
        check_null_rule(array, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
