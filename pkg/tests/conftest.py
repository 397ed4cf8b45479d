"""Shared parameter sets and solved amplitudes."""

from dataclasses import dataclass
from functools import lru_cache

import pytest

from src.cc.amplitudes import CCAmplitudes
from src.cc.solver import CoupledClusterSolver
from src.model.aim import AimParams, ReferenceState, reference_state

BENCHMARKS = {
    "two_site": AimParams(n_bath=1, u_c=8.0, eps=(4.0, 0.0), v=(1.0,)),
    "atomic_limit": AimParams(n_bath=1, u_c=8.0, eps=(4.0, 0.0), v=(0.0,)),
    "three_site_symmetric": AimParams(n_bath=2, u_c=8.0, eps=(4.0, 3.61, 4.39), v=(0.63, 0.63)),
    "three_site_asymmetric": AimParams(n_bath=2, u_c=8.0, eps=(4.0, -0.13, 10.1), v=(1.0, 0.15)),
}
COUPLED = ("two_site", "three_site_symmetric", "three_site_asymmetric")


@dataclass(frozen=True)
class Benchmark:
    name: str
    params: AimParams
    reference: ReferenceState
    amplitudes: CCAmplitudes

    @property
    def p(self) -> int:
        return self.reference.occupied_impurity()


@lru_cache(maxsize=None)
def solve_benchmark(name: str) -> Benchmark:
    params = BENCHMARKS[name]
    reference = reference_state(params)
    amplitudes = CoupledClusterSolver(params, reference).solve()
    return Benchmark(name, params, reference, amplitudes)


@pytest.fixture(scope="session", params=list(BENCHMARKS))
def benchmark(request) -> Benchmark:
    """Every benchmark parameter set with converged T and Lambda."""
    return solve_benchmark(request.param)


@pytest.fixture(scope="session", params=list(COUPLED))
def coupled(request) -> Benchmark:
    """Parameter sets with non-zero hybridization."""
    return solve_benchmark(request.param)


@pytest.fixture(scope="session")
def two_site() -> Benchmark:
    return solve_benchmark("two_site")


@pytest.fixture(scope="session")
def atomic_limit() -> Benchmark:
    return solve_benchmark("atomic_limit")


@pytest.fixture(scope="session")
def three_site() -> Benchmark:
    return solve_benchmark("three_site_symmetric")
