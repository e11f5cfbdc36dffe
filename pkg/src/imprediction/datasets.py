"""Bundled example datasets."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterDomainError


@dataclass(frozen=True)
class BundledDataset:
    name: str
    values: tuple[float, ...]
    units: str
    description: str
    model: str


BUNDLED = {
    d.name: d
    for d in (
        BundledDataset(
            "soil_lead_offsite",
            (26, 63, 3, 70, 16, 5, 1, 57, 5, 3, 24, 2, 1, 48, 3),
            "mg/kg",
            "Lead concentration in 15 background (off-site) soil borings.",
            "lognormal",
        ),
        BundledDataset(
            "soil_lead_onsite",
            (50, 82, 95, 103, 88),
            "mg/kg",
            "Lead concentration in 5 on-site soil borings at a former plating facility.",
            "lognormal",
        ),
        BundledDataset(
            "machine_breakdowns",
            (18, 23, 29, 409, 24, 74, 13, 62, 46, 4, 57, 19, 47, 13, 19, 208, 119, 209, 10, 188),
            "hours",
            "First breakdown times of 20 machines.",
            "gamma",
        ),
    )
}


def get_dataset(name: str) -> BundledDataset:
    try:
        return BUNDLED[name]
    except KeyError:
        raise ParameterDomainError(f"unknown dataset {name!r}; available: {sorted(BUNDLED)}") from None
