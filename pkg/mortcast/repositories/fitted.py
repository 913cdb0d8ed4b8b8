"""Fitted-model bundle repository.

A bundle is a `param,index,value` CSV (index = age, year or cohort) headed by
a metadata line carrying the spec, the convergence flag and the objective.
"""
import math
from typing import Optional

import numpy as np
import pandas as pd

from mortcast.exceptions import MalformedRow
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import Sex
from mortcast.repositories.base import FileRepository
from mortcast.repositories.metadata import join_document, parse_bool, split_document

NONE_TOKEN = "none"
COHORT_FLAG = "cohort_estimated"


def _optional(value) -> str:
    if value is None:
        return NONE_TOKEN
    return repr(float(value)) if isinstance(value, float) else str(value)


def _read_optional(text: Optional[str], cast):
    if text is None or text == NONE_TOKEN or text == "":
        return None
    return cast(text)


def _rows(param: str, index: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({"param": param, "index": np.asarray(index, dtype=np.int64), "value": values})


def serialize_fitted(fitted: FittedModel) -> str:
    """Bundle text for a fitted model."""
    frames = [_rows("alpha", fitted.ages, fitted.alpha)]
    for j, beta in enumerate(fitted.beta, start=1):
        frames.append(_rows(f"beta{j}", fitted.ages, beta))
    for j, kappa in enumerate(fitted.kappa, start=1):
        frames.append(_rows(f"kappa{j}", fitted.years, kappa))
    if fitted.has_cohort:
        frames.append(_rows("gamma", fitted.cohorts, fitted.gamma))
        mask = fitted.cohort_mask if fitted.cohort_mask is not None else np.ones(fitted.gamma.size, bool)
        frames.append(_rows(COHORT_FLAG, fitted.cohorts, mask.astype(float)))

    spec = fitted.spec
    meta = {
        "model": spec.kind.value,
        "converged": fitted.converged,
        "objective": repr(float(fitted.objective)),
        "n_iter": fitted.n_iter,
        "country": fitted.country_code or NONE_TOKEN,
        "sex": fitted.sex.value if fitted.sex else NONE_TOKEN,
        "x_bar": _optional(fitted.x_bar),
        "sigma2": _optional(fitted.sigma2),
        "plat_period_terms": _optional(spec.plat_period_terms),
        "max_iter": spec.max_iter,
        "tol": repr(float(spec.tol)),
        "min_cohort_cells": spec.min_cohort_cells,
    }
    return join_document(meta, pd.concat(frames, ignore_index=True))


def parse_fitted(text: str) -> FittedModel:
    """Rebuild a FittedModel from bundle text.

    Only the final objective survives serialization, so the restored
    `loglik_trace` has a single entry.

    Raises:
        MalformedRow: Missing metadata or parameters
    """
    meta, frame = split_document(text)
    if "model" not in meta or not {"param", "index", "value"} <= set(frame.columns):
        raise MalformedRow(["Fitted bundle needs model metadata and param,index,value columns"])

    groups = {name: group for name, group in frame.groupby("param", sort=False)}

    def param(name: str) -> tuple[np.ndarray, np.ndarray]:
        if name not in groups:
            raise MalformedRow([f"Fitted bundle lacks parameter {name!r}"])
        group = groups[name]
        return group["index"].to_numpy(dtype=np.int64), group["value"].to_numpy(dtype=float)

    ages, alpha = param("alpha")
    n_components = sum(1 for name in groups if name.startswith("kappa"))
    betas = [param(f"beta{j}")[1] for j in range(1, n_components + 1)]
    kappas = [param(f"kappa{j}") for j in range(1, n_components + 1)]
    years = kappas[0][0] if kappas else np.array([], dtype=np.int64)

    gamma = cohorts = mask = None
    if "gamma" in groups:
        cohorts, gamma = param("gamma")
        mask = param(COHORT_FLAG)[1] > 0.5 if COHORT_FLAG in groups else None

    objective = float(meta.get("objective", "nan"))
    spec = ModelSpec(
        kind=ModelKind(meta["model"]),
        plat_period_terms=_read_optional(meta.get("plat_period_terms"), int),
        max_iter=int(meta.get("max_iter", ModelSpec.max_iter)),
        tol=float(meta.get("tol", ModelSpec.tol)),
        min_cohort_cells=int(meta.get("min_cohort_cells", ModelSpec.min_cohort_cells)),
    )
    country = meta.get("country", "")
    return FittedModel(
        spec=spec,
        ages=ages,
        years=years,
        alpha=alpha,
        beta=tuple(betas),
        kappa=tuple(k for _, k in kappas),
        gamma=gamma,
        cohorts=cohorts,
        cohort_mask=mask,
        sigma2=_read_optional(meta.get("sigma2"), float),
        loglik_trace=() if math.isnan(objective) else (objective,),
        converged=parse_bool(meta.get("converged", "true")),
        n_iter=int(meta.get("n_iter", 0)),
        x_bar=_read_optional(meta.get("x_bar"), float),
        country_code="" if country == NONE_TOKEN else country,
        sex=_read_optional(meta.get("sex"), Sex.parse),
    )


class FittedModelRepository(FileRepository):
    """Repository for fitted parameter bundles."""

    @staticmethod
    def filename(fitted: FittedModel) -> str:
        sex = fitted.sex.value if fitted.sex else "X"
        return f"fit_{fitted.country_code or 'NA'}_{sex}_{fitted.spec.kind.value}.csv"

    def save(self, fitted: FittedModel, name: Optional[str] = None):
        return self.write_text(name or self.filename(fitted), serialize_fitted(fitted))

    def load(self, name: str) -> FittedModel:
        return parse_fitted(self.read_text(name))
