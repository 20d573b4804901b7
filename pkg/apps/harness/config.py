"""Experiment config documents.

A config is one JSON object. Each section is validated by a Django form and
violations are collected as ``"section.field: message"`` strings.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from django import forms
from django.conf import settings

from apps.graphgen.seeding import SEED_MAX
from apps.stats.exceptions import BoundsError
from apps.stats.fitting import FitMethod
from apps.stats.strata import default_bounds, parse_bounds

from .exceptions import ConfigError

SOURCE_KINDS = [("synthetic", "Synthetic power law"), ("edge_list", "Edge-list file")]


@dataclass(frozen=True)
class SourceConfig:
    kind: str
    gamma: float | None = None
    n: int | None = None
    k_max: int | None = None
    path: str | None = None


@dataclass(frozen=True)
class FitConfig:
    k_min: int = 10
    methods: tuple = (
        FitMethod.LOGLOG_REGRESSION_CCDF.value,
        FitMethod.MLE_HILL.value,
    )


@dataclass(frozen=True)
class ReferenceConfig:
    """Published exponents to compare against when the real snapshot is used."""

    underlying: float
    groups: tuple
    tolerance: float = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig
    group_bounds: tuple
    roots_per_group: int = 10
    seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)
    replicates: int = 200
    pvis_bins: int = 10
    bound_gammas: tuple = (2.1, 2.3, 2.5, 2.7, 2.9)
    t_grid_size: int = 100
    validate: bool = True
    threads: int = 0
    reference: ReferenceConfig | None = None

    def as_dict(self):
        """JSON-ready form. ``threads`` is left out so reports do not vary with it."""
        data = asdict(self)
        data.pop("threads")
        data["group_bounds"] = [list(pair) for pair in self.group_bounds]
        data["fit"]["methods"] = list(self.fit.methods)
        data["bound_gammas"] = list(self.bound_gammas)
        if self.reference is not None:
            data["reference"]["groups"] = list(self.reference.groups)
        return data


class SourceForm(forms.Form):
    kind = forms.ChoiceField(choices=SOURCE_KINDS)
    gamma = forms.FloatField(required=False)
    n = forms.IntegerField(required=False, min_value=2)
    k_max = forms.IntegerField(required=False, min_value=2)
    path = forms.CharField(required=False)

    def clean(self):
        cleaned = super().clean()
        if cleaned.get("kind") == "synthetic":
            gamma = cleaned.get("gamma")
            if gamma is None:
                self.add_error("gamma", "required for a synthetic source")
            elif not gamma > 2:
                self.add_error("gamma", "must be > 2")
            if cleaned.get("n") is None:
                self.add_error("n", "required for a synthetic source")
        elif cleaned.get("kind") == "edge_list" and not cleaned.get("path"):
            self.add_error("path", "required for an edge_list source")
        return cleaned


class FitForm(forms.Form):
    k_min = forms.IntegerField(min_value=1)
    methods = forms.MultipleChoiceField(choices=FitMethod.choices)


class ReferenceForm(forms.Form):
    underlying = forms.FloatField()
    tolerance = forms.FloatField(min_value=0, required=False)


class ExperimentForm(forms.Form):
    roots_per_group = forms.IntegerField(min_value=1)
    seed = forms.IntegerField(min_value=0, max_value=SEED_MAX)
    replicates = forms.IntegerField(min_value=1)
    pvis_bins = forms.IntegerField(min_value=5)
    t_grid_size = forms.IntegerField(min_value=2)
    threads = forms.IntegerField(min_value=0)
    validate = forms.BooleanField(required=False)


def defaults():
    return {
        "source": {"kind": "synthetic", "gamma": 2.5, "n": 100_000},
        "group_bounds": [list(pair) for pair in default_bounds()],
        "roots_per_group": getattr(settings, "BFSBIAS_ROOTS_PER_GROUP", 10),
        "seed": 0,
        "fit": {
            "k_min": getattr(settings, "BFSBIAS_FIT_K_MIN", 10),
            "methods": list(FitConfig.methods),
        },
        "replicates": 200,
        "pvis_bins": 10,
        "bound_gammas": [2.1, 2.3, 2.5, 2.7, 2.9],
        "t_grid_size": 100,
        "validate": True,
        "threads": getattr(settings, "BFSBIAS_THREADS", 0),
        "reference": None,
    }


def _form_errors(prefix, form):
    messages = []
    for name, errors in form.errors.items():
        path = prefix if name == "__all__" else f"{prefix}{name}"
        messages.extend(f"{path.rstrip('.')}: {error}" for error in errors)
    return messages


def _section(document, name, errors):
    value = document.get(name)
    if not isinstance(value, dict):
        errors.append(f"{name}: must be an object")
        return None
    return value


def build_config(document, seed=None, threads=None):
    """Validate a config mapping layered over the defaults."""
    if not isinstance(document, dict):
        raise ConfigError(["(root): config must be a JSON object"])

    merged = defaults()
    for key, value in document.items():
        if key not in merged:
            raise ConfigError([f"{key}: unknown field"])
        if isinstance(value, dict) and isinstance(merged[key], dict):
            value = {**merged[key], **value}
            if key == "source" and value.get("kind") == "edge_list":
                value = {k: v for k, v in value.items() if k in ("kind", "path")}
        merged[key] = value
    if seed is not None:
        merged["seed"] = seed
    if threads is not None:
        merged["threads"] = threads

    errors = []
    top = ExperimentForm(data=merged)
    errors.extend(_form_errors("", top))

    source_data = _section(merged, "source", errors)
    source_form = SourceForm(data=source_data) if source_data is not None else None
    if source_form is not None:
        errors.extend(_form_errors("source.", source_form))

    fit_data = _section(merged, "fit", errors)
    fit_form = FitForm(data=fit_data) if fit_data is not None else None
    if fit_form is not None:
        errors.extend(_form_errors("fit.", fit_form))

    try:
        bounds = parse_bounds(merged["group_bounds"] or [])
        if not bounds:
            errors.append("group_bounds: at least one group is required")
    except (BoundsError, TypeError) as exc:
        errors.append(f"group_bounds: {exc}")
        bounds = []

    gammas = merged["bound_gammas"]
    if not isinstance(gammas, list) or not gammas:
        errors.append("bound_gammas: must be a non-empty list")
        gammas = []
    for index, gamma in enumerate(gammas):
        if not isinstance(gamma, (int, float)) or not gamma > 2:
            errors.append(f"bound_gammas[{index}]: must be a number > 2")

    reference = None
    if merged["reference"] is not None:
        reference = _build_reference(merged["reference"], len(bounds), errors)

    if errors:
        raise ConfigError(errors)

    source = source_form.cleaned_data
    return ExperimentConfig(
        source=SourceConfig(
            kind=source["kind"],
            gamma=source["gamma"],
            n=source["n"],
            k_max=source["k_max"],
            path=source["path"] or None,
        ),
        group_bounds=tuple(bounds),
        roots_per_group=top.cleaned_data["roots_per_group"],
        seed=top.cleaned_data["seed"],
        fit=FitConfig(
            k_min=fit_form.cleaned_data["k_min"],
            methods=tuple(fit_form.cleaned_data["methods"]),
        ),
        replicates=top.cleaned_data["replicates"],
        pvis_bins=top.cleaned_data["pvis_bins"],
        bound_gammas=tuple(float(g) for g in gammas),
        t_grid_size=top.cleaned_data["t_grid_size"],
        validate=top.cleaned_data["validate"],
        threads=top.cleaned_data["threads"],
        reference=reference,
    )


def _build_reference(data, group_count, errors):
    if not isinstance(data, dict):
        errors.append("reference: must be an object")
        return None
    form = ReferenceForm(data=data)
    errors.extend(_form_errors("reference.", form))
    groups = data.get("groups")
    if not isinstance(groups, list) or len(groups) != group_count:
        errors.append(f"reference.groups: must list {group_count} exponents")
        return None
    if not form.is_valid():
        return None
    tolerance = form.cleaned_data["tolerance"]
    return ReferenceConfig(
        underlying=form.cleaned_data["underlying"],
        groups=tuple(float(g) for g in groups),
        tolerance=0.05 if tolerance is None else tolerance,
    )


def load_config(path=None, seed=None, threads=None):
    document = {}
    if path is not None:
        try:
            document = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError([f"(root): invalid JSON: {exc}"]) from None
    return build_config(document, seed=seed, threads=threads)
