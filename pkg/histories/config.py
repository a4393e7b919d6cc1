"""
Created on 2026-10-08

@author: wf
"""
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from histories.errors import ConfigError, HistoriesError
from histories.history import HistoryBudget, HistorySpace
from histories.models import (
    BranchTree,
    division_model,
    hilbert_bernoulli_model,
    hilbert_tree_model,
    partial_decoherence_model,
)
from histories.operators import (
    TAU_ALG,
    Operator,
    ProjectiveDecomposition,
    Tolerance,
    complex_values,
    qubit_ket,
)


@dataclass
class Settings:
    """
    user defaults from ~/.histories/settings.yaml
    """

    tol_alg: float = 1e-10
    eps_dec: float = 1e-8
    warn_histories: int = 10**6
    max_histories: int = 10**7
    max_bytes: int = 2**30

    @classmethod
    def get_config_path(cls) -> str:
        home = str(Path.home())
        return os.path.join(home, ".histories")

    @classmethod
    def get_settings_path(cls) -> str:
        """
        get the settings path
        """
        return os.path.join(cls.get_config_path(), "settings.yaml")

    @classmethod
    def load(cls, settings_path: Optional[str] = None) -> "Settings":
        """
        load the settings - a missing file gives the built-in defaults

        Args:
            settings_path(str): the yaml file to read - defaults to get_settings_path()

        Raises:
            ConfigError: for unknown keys or values of the wrong type
        """
        if settings_path is None:
            settings_path = cls.get_settings_path()
        if not os.path.isfile(settings_path):
            return cls()
        record = load_yaml(settings_path) or {}
        if not isinstance(record, dict):
            raise ConfigError(f"settings {settings_path} must be a mapping")
        types = {field.name: field.type for field in fields(cls)}
        unknown = set(record) - set(types)
        if unknown:
            raise ConfigError(f"unknown settings {sorted(unknown)} in {settings_path}")
        values = {
            key: _coerce(value, types[key], f"setting '{key}' in {settings_path}")
            for key, value in record.items()
        }
        return cls(**values)

    def tolerance(self, tol: Optional[float] = None) -> Tolerance:
        """
        the tolerances - a given tol overrides both
        """
        if tol is not None:
            return Tolerance.uniform(tol)
        return Tolerance(alg=self.tol_alg, dec=self.eps_dec)

    def budget(self) -> HistoryBudget:
        """
        the resource budget for history enumerations
        """
        return HistoryBudget(
            warn_histories=self.warn_histories,
            max_histories=self.max_histories,
            max_bytes=self.max_bytes,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(value: Any, kind: type, where: str) -> Any:
    """
    convert a yaml scalar to the given numeric type

    yaml reads 1e7 as a string so numeric strings are accepted

    Raises:
        ConfigError: if the value is not a nonnegative number of the given kind
    """
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{where} must be a number but is {value!r}")
    try:
        number = float(value)
    except ValueError as ex:
        raise ConfigError(f"{where} must be a number but is {value!r}") from ex
    if not math.isfinite(number) or number < 0:
        raise ConfigError(
            f"{where} must be a finite nonnegative number but is {value!r}"
        )
    if kind is int:
        if not number.is_integer():
            raise ConfigError(f"{where} must be an integer but is {value!r}")
        return int(number)
    return number


def load_yaml(path: str) -> Any:
    """
    read the given yaml file
    """
    try:
        with open(path, "r") as stream:
            return yaml.safe_load(stream)
    except yaml.YAMLError as ex:
        raise ConfigError(f"invalid yaml in {path}: {ex}") from ex


def load_config(path: str) -> Dict[str, Any]:
    """
    load a model config
    """
    config = load_yaml(path)
    if not isinstance(config, dict):
        raise ConfigError(f"model config {path} must be a mapping")
    return config


def save_config(config: Dict[str, Any], path: str):
    """
    save the given model config as yaml
    """
    with open(path, "w") as stream:
        yaml.safe_dump(config, stream, sort_keys=False, allow_unicode=True)


def _mapping(section: Any, where: str) -> Dict[str, Any]:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping but is {section!r}")
    return section


def _require(section: Dict[str, Any], key: str, where: str) -> Any:
    if key not in _mapping(section, where):
        raise ConfigError(f"missing key '{key}' in {where}")
    return section[key]


def _build_model(model: Dict[str, Any], tol: float) -> HistorySpace:
    kind = _require(model, "kind", "model")
    try:
        if kind == "bernoulli":
            return hilbert_bernoulli_model(
                int(_require(model, "N", "model")),
                float(_require(model, "p", "model")),
                model.get("present", 0),
                tol=tol,
            )
        if kind == "partial-decoherence":
            return partial_decoherence_model(float(model.get("delta", 0.0)), tol=tol)
        if kind == "tree":
            tree = BranchTree(_require(model, "weights", "model"), model.get("labels"))
            return hilbert_tree_model(tree, model.get("present", 0), tol=tol)
        if kind == "division":
            return division_model(tol=tol)
    except HistoriesError:
        raise
    except (TypeError, ValueError) as ex:
        raise ConfigError(f"invalid {kind} model parameters: {ex}") from ex
    raise ConfigError(
        f"unknown model kind '{kind}' - expected bernoulli, partial-decoherence, tree or division"
    )


def _build_rho(section: Dict[str, Any], dim: int) -> Operator:
    _mapping(section, "rho")
    if "state" in section:
        ket = qubit_ket(str(section["state"]))
        if len(ket) != dim:
            raise ConfigError(
                f"state '{section['state']}' has dim {len(ket)} instead of {dim}"
            )
        return Operator.from_ket(ket)
    if "ket" in section:
        ket = complex_values(section["ket"])
        if len(ket) != dim:
            raise ConfigError(f"ket has {len(ket)} entries instead of {dim}")
        return Operator.from_ket(ket)
    if "matrix" in section:
        return Operator.from_entries(section["matrix"], dim)
    raise ConfigError("rho needs one of state, ket or matrix")


def _build_decomposition(
    section: Dict[str, Any], dim: int, tol: float
) -> ProjectiveDecomposition:
    labels = section.get("labels")
    if "basis" in section:
        n_qubits = int(round(math.log2(dim)))
        if 2**n_qubits != dim:
            raise ConfigError(f"named bases need a qubit register but dim is {dim}")
        decomposition = ProjectiveDecomposition.qubit(
            section["basis"], int(section.get("qubit", 0)), n_qubits, tol
        )
        if labels is not None:
            decomposition = ProjectiveDecomposition(
                decomposition.projectors, labels, tol
            )
        return decomposition
    if "projectors" in section:
        projectors = [
            Operator.from_entries(entries, dim) for entries in section["projectors"]
        ]
        return ProjectiveDecomposition(projectors, labels, tol)
    raise ConfigError(f"time section {section} needs basis or projectors")


def build_space(config: Dict[str, Any], tol: float = TAU_ALG) -> HistorySpace:
    """
    build the history space declared by the given model config

    Args:
        config: either a model section naming a builder
            or dim, rho, present and the times with their decompositions
        tol(float): τ_alg for the validation of ρ and the projectors

    Returns:
        HistorySpace: the validated space

    Raises:
        ConfigError: for missing keys or sections of the wrong shape
    """
    _mapping(config, "config")
    if "model" in config:
        return _build_model(config["model"], tol)
    try:
        dim = int(_require(config, "dim", "config"))
    except (TypeError, ValueError) as ex:
        raise ConfigError(f"dim must be an integer: {ex}") from ex
    rho = _build_rho(_require(config, "rho", "config"), dim)
    time_sections: List[Dict[str, Any]] = _require(config, "times", "config")
    if not isinstance(time_sections, list) or not time_sections:
        raise ConfigError("times must be a non-empty list")
    for index, section in enumerate(time_sections):
        _mapping(section, f"time section {index}")
    try:
        times = [
            int(_require(section, "t", "time section")) for section in time_sections
        ]
    except (TypeError, ValueError) as ex:
        raise ConfigError(f"time values must be integers: {ex}") from ex
    decompositions = [
        _build_decomposition(section, dim, tol) for section in time_sections
    ]
    return HistorySpace(
        rho,
        decompositions,
        times,
        config.get("present"),
        tol=tol,
        name=config.get("name", "config"),
    )


def dump_space(space: HistorySpace) -> Dict[str, Any]:
    """
    the explicit config of the given space - loadable with build_space
    """
    return {
        "name": space.name,
        "dim": space.dim,
        "present": space.present,
        "rho": {"matrix": space.rho.to_entries()},
        "times": [
            {
                "t": t,
                "labels": list(decomposition.labels),
                "projectors": [
                    projector.to_entries() for projector in decomposition.projectors
                ],
            }
            for t, decomposition in zip(space.times, space.decompositions)
        ],
    }
