"""YAML-backed defaults for builds, searches, workloads and benchmarks."""
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

import yaml

from cliqueann.exceptions import ParameterError


@dataclass
class BuildSettings:
    k_prime: int = 200
    tau: int = 50
    alpha0: float = 1.2
    alpha_expansion: float = 2.0
    alpha_max: float = 10.0
    supercenter_fraction: float = 0.01
    supercenter_min_cap: int = 8
    threads: int = 1
    knng_method: str = "auto"
    nn_descent_iterations: int = 12
    nn_descent_sample_rate: float = 0.5
    seed: int = 0


@dataclass
class SearchSettings:
    k: int = 10
    l_s: int = 100
    epsilon: float = 1.0
    rng_seed: int = 0
    lazy_predicate: bool = False


@dataclass
class WorkloadSettings:
    kind: str = "zipf"
    num_queries: int = 200
    num_labels: int = 12
    zipf_s: float = 1.0
    targets: List[float] = field(default_factory=lambda: [0.3, 0.15, 0.07, 0.03, 0.015, 0.007, 0.003, 0.001])
    per_target: int = 25
    selectivity: float = 0.01
    k: int = 10
    seed: int = 0


@dataclass
class BenchSettings:
    l_s_grid: List[int] = field(default_factory=lambda: [10, 20, 40, 80, 160])
    epsilons: List[float] = field(default_factory=lambda: [1.0])
    repeats: int = 3
    threads: int = 1
    dataset_name: str = "synthetic"


@dataclass
class Settings:
    build: BuildSettings = field(default_factory=BuildSettings)
    search: SearchSettings = field(default_factory=SearchSettings)
    workload: WorkloadSettings = field(default_factory=WorkloadSettings)
    bench: BenchSettings = field(default_factory=BenchSettings)

    def build_params(self, audit: bool = False):
        from cliqueann.index.builder import BuildParams
        b = self.build
        return BuildParams(k_prime=b.k_prime, tau=b.tau, alpha0=b.alpha0, alpha_expansion=b.alpha_expansion,
                           alpha_max=b.alpha_max, supercenter_fraction=b.supercenter_fraction,
                           supercenter_min_cap=b.supercenter_min_cap, audit=audit)

    def search_params(self):
        from cliqueann.search.beam import SearchParams
        s = self.search
        return SearchParams(k=s.k, l_s=s.l_s, epsilon=s.epsilon, rng_seed=s.rng_seed,
                            lazy_predicate=s.lazy_predicate)


def _overlay(section, values: Dict[str, Any], name: str):
    known = {f.name for f in fields(section)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ParameterError(f"unknown keys in [{name}]: {', '.join(unknown)}")
    return replace(section, **values)


def settings_from_dict(data: Optional[Dict[str, Any]]) -> Settings:
    data = data or {}
    settings = Settings()
    unknown = sorted(set(data) - {"build", "search", "workload", "bench"})
    if unknown:
        raise ParameterError(f"unknown config sections: {', '.join(unknown)}")
    for name in ("build", "search", "workload", "bench"):
        if data.get(name):
            setattr(settings, name, _overlay(getattr(settings, name), data[name], name))
    return settings


def load_settings(path: Optional[str] = None) -> Settings:
    if not path:
        return Settings()
    with open(path) as fh:
        return settings_from_dict(yaml.safe_load(fh))
