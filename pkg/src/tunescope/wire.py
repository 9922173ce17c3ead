"""JSON wire format shared by the HTTP service and the CLI.

Field names are snake_case.  Every real number is rounded to 12
significant digits before serialization so payloads are stable across
platforms and the CLI's CSV output can byte-match service JSON.
"""

from __future__ import annotations

from typing import Any

from .dataset import Dataset, DatasetError, ParameterSchema
from .filtering import AggregateSummary, FilterState, RDSummary
from .importance import ImportanceReport
from .provenance import ProvenanceEntry
from .sampling import SamplePlan
from .search import SearchTrace
from .stats import DensityCurve, KSResult, StatSummary


def wire_real(x: float) -> float:
    """Round to 12 significant digits (the serialization contract)."""
    return float(f"{float(x):.12g}")


def _opt(x: float | None) -> float | None:
    return None if x is None else wire_real(x)


def wire_parameter(schema: ParameterSchema) -> dict[str, Any]:
    return {
        "name": schema.name,
        "levels": list(schema.levels),
        "ordinal": schema.ordinal,
    }


def wire_stat_summary(stats: StatSummary) -> dict[str, Any]:
    out: dict[str, Any] = {
        "count": stats.count,
        "percentile_cuts": [wire_real(q) for q in stats.percentile_cuts],
    }
    if stats.count > 0:
        out.update(
            min=wire_real(stats.min),
            max=wire_real(stats.max),
            mean=wire_real(stats.mean),
            range=wire_real(stats.range),
            percentile_values=[wire_real(v) for v in stats.percentile_values],
        )
    return out


def wire_density(density: DensityCurve | None) -> dict[str, Any] | None:
    if density is None:
        return None
    return {
        "positions": [wire_real(x) for x in density.positions],
        "densities": [wire_real(x) for x in density.densities],
        "bandwidth": wire_real(density.bandwidth),
    }


def wire_ks(ks: KSResult | None) -> dict[str, Any] | None:
    if ks is None:
        return None
    return {
        "statistic": wire_real(ks.statistic),
        "p_value": wire_real(ks.p_value),
        "n1": ks.n1,
        "n2": ks.n2,
    }


def wire_sample_plan(plan: SamplePlan) -> dict[str, Any]:
    return {
        "fraction": wire_real(plan.fraction),
        "seed": plan.seed,
        "sampled_rows": plan.sampled_rows,
        "reason": plan.reason.value,
        "ks": wire_ks(plan.ks),
    }


def wire_rd_summary(summary: RDSummary) -> dict[str, Any]:
    return {
        "parameter": summary.parameter,
        "level": summary.level,
        "selected": summary.selected,
        "available": summary.available,
        "stats": wire_stat_summary(summary.stats),
        "density": wire_density(summary.density),
    }


def wire_aggregate(summary: AggregateSummary) -> dict[str, Any]:
    return {
        "matched_rows": summary.matched_rows,
        "available": summary.available,
        "stats": wire_stat_summary(summary.stats),
        "density": wire_density(summary.density),
    }


def wire_filter(state: FilterState, dataset: Dataset) -> dict[str, Any]:
    parameters = []
    for schema, on, chosen in zip(dataset.parameters, state.enabled, state.selected):
        parameters.append(
            {
                "name": schema.name,
                "enabled": on,
                "selected_levels": [lvl for lvl in schema.levels if lvl in chosen],
            }
        )
    return {"parameters": parameters}


def parse_filter(payload: dict[str, Any], dataset: Dataset) -> FilterState:
    """Inverse of wire_filter; validates against the dataset schema."""
    try:
        entries = {p["name"]: p for p in payload["parameters"]}
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"malformed filter payload: {exc}") from None
    if set(entries) != set(dataset.parameter_names):
        raise DatasetError("filter payload parameters do not match the dataset schema")
    state = FilterState(
        parameters=dataset.parameter_names,
        enabled=tuple(bool(entries[n]["enabled"]) for n in dataset.parameter_names),
        selected=tuple(
            frozenset(entries[n]["selected_levels"]) for n in dataset.parameter_names
        ),
    )
    state.validate(dataset)
    return state


def wire_provenance_entry(entry: ProvenanceEntry, dataset: Dataset) -> dict[str, Any]:
    return {
        "stage": entry.stage,
        "label": entry.label,
        "min": _opt(entry.min),
        "max": _opt(entry.max),
        "replicated_from": entry.replicated_from,
        "filter": wire_filter(entry.filter, dataset),
    }


def apply_operations(
    state: FilterState, operations: list[dict[str, Any]], dataset: Dataset
) -> FilterState:
    """Apply a sequence of filter edits, in order.

    Operations: toggle_level {parameter, level}, set_levels {parameter,
    levels}, toggle_parameter {parameter}, set_enabled {parameter,
    enabled}.  The resulting state is validated against the schema.
    """
    for op in operations:
        kind = op.get("op")
        parameter = op.get("parameter")
        if not isinstance(parameter, str):
            raise DatasetError("filter operation misses 'parameter'")
        schema = dataset.parameter(parameter)
        if kind == "toggle_level":
            level = op.get("level")
            if not isinstance(level, str):
                raise DatasetError("toggle_level misses 'level'")
            if level not in schema.levels:
                raise DatasetError(
                    f"unknown level {level!r} for parameter {parameter!r}"
                )
            state = state.toggle_level(parameter, level)
        elif kind == "set_levels":
            levels = op.get("levels")
            if not isinstance(levels, list):
                raise DatasetError("set_levels misses 'levels'")
            state = state.with_selection(parameter, levels)
        elif kind == "toggle_parameter":
            state = state.toggle_parameter(parameter)
        elif kind == "set_enabled":
            enabled = op.get("enabled")
            if not isinstance(enabled, bool):
                raise DatasetError("set_enabled misses boolean 'enabled'")
            state = state.with_enabled(parameter, enabled)
        else:
            raise DatasetError(f"unknown filter operation {kind!r}")
    state.validate(dataset)
    return state


def wire_search_step(step) -> dict[str, Any]:
    return {
        "step": step.step,
        "configuration": dict(step.configuration),
        "value": _opt(step.value),
        "feasible": step.feasible,
        "best_value": _opt(step.best_value),
        "accepted": step.accepted,
    }


def wire_trace(trace: SearchTrace, include_steps: bool = True) -> dict[str, Any]:
    return {
        "algorithm": trace.algorithm,
        "objective": trace.objective,
        "budget": trace.budget,
        "seed": trace.seed,
        "steps": [wire_search_step(s) for s in trace.steps] if include_steps else [],
        "best_configuration": trace.best_configuration,
        "best_value": _opt(trace.best_value),
        "total_evaluations": trace.total_evaluations,
        "wall_time_s": wire_real(trace.wall_time_s),
    }


def wire_importance(report: ImportanceReport) -> dict[str, Any]:
    out: dict[str, Any] = {
        "parameters": list(report.parameters),
        "scores": [wire_real(s) for s in report.scores],
        "ranking": list(report.ranking),
        "recovery": None,
    }
    if report.recovery is not None:
        out["recovery"] = [
            {
                "fraction": wire_real(p.fraction),
                "top1": wire_real(p.top1),
                "top2": wire_real(p.top2),
                "top3": wire_real(p.top3),
            }
            for p in report.recovery
        ]
    return out
