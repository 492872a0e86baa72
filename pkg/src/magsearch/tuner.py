"""Parameter selection for q, k and the reduced alphabet size.

The closed forms only fix orders of magnitude, so the stride is refined by
a small grid search over :func:`predicted_cost`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qgram import GRAM_BUDGET, MAX_Q
from .superimpose import superimposed_length


@dataclass(frozen=True)
class TuningInput:
    sigma: int
    sigma_prime: int
    r: int
    m: int
    n: int
    w: int = 64

    def __post_init__(self) -> None:
        for name in ("sigma", "sigma_prime", "r", "m", "w"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n < 0:
            raise ValueError("n must be non-negative")


@dataclass(frozen=True)
class TuningResult:
    q: int
    k: int
    sigma_prime: int
    rho: float
    predicted_p: float
    predicted_cost: float


def expected_class_size(sigma_eff: float, n_super: int) -> float:
    """Expected number of distinct symbols among ``n_super`` uniform draws."""
    return sigma_eff * (1.0 - (1.0 - 1.0 / sigma_eff) ** n_super)


def match_probability(sigma_eff: float, n_super: int) -> float:
    """Chance that a uniform text symbol falls in a class built from ``n_super`` draws."""
    return 1.0 - (1.0 - 1.0 / sigma_eff) ** n_super


def _log(x: float, base: float) -> float:
    return math.log(x) / math.log(base) if base > 1 else 0.0


def choose_q(ti: TuningInput, budget: int | None = GRAM_BUDGET) -> int:
    q = round(_log(ti.r * ti.m, ti.sigma_prime)) if ti.r * ti.m > 1 else 1
    q = max(1, min(MAX_Q, q))
    while q > 1 and ((budget is not None and ti.sigma_prime**q > budget) or ti.m < 2 * q - 1):
        q -= 1
    return q


def effective_m_prime(L: int, k: int, w: int) -> int:
    return min(L // k, w // k)


def predicted_cost(ti: TuningInput, q: int, k: int, code_space: int | None = None) -> float:
    """Filter reads plus expected verification work, in byte-comparison units."""
    n_q = ti.n // q
    L = superimposed_length(ti.m, q)
    m_prime = effective_m_prime(L, k, ti.w)
    sigma_eff = code_space if code_space is not None else ti.sigma_prime**q
    p = match_probability(sigma_eff, q * ti.r)
    return n_q / k + n_q * p**m_prime * (2 * q - 1) * ti.r * ti.m


def closed_form_k(ti: TuningInput) -> float:
    """Unrounded stride seed; logarithms are taken base sigma'."""
    log_rm = _log(ti.r * ti.m, ti.sigma_prime)
    if log_rm <= 0:
        return 1.0
    rho = log_rm / ti.m
    if rho >= 1:
        return 1.0
    log_inv_rho = _log(1.0 / rho, ti.sigma_prime)
    return ti.m / log_rm * log_inv_rho / (log_rm + log_inv_rho)


def choose_k(ti: TuningInput, q: int, code_space: int | None = None) -> int:
    L = superimposed_length(ti.m, q)
    if L <= 1:
        return 1
    k_max = min(L, ti.w)
    k0 = max(1, min(k_max, round(closed_form_k(ti))))
    grid = range(max(1, k0 - 2), min(k_max, k0 + 2) + 1)
    # ties go to the larger stride
    return min(grid, key=lambda k: (predicted_cost(ti, q, k, code_space), -k))


def tune(ti: TuningInput, q: int | None = None, k: int | None = None) -> TuningResult:
    if q is None:
        q = choose_q(ti)
    if k is None:
        k = choose_k(ti, q)
    log_rm = _log(ti.r * ti.m, ti.sigma_prime)
    return TuningResult(
        q=q,
        k=k,
        sigma_prime=ti.sigma_prime,
        rho=log_rm / ti.m,
        predicted_p=match_probability(ti.sigma_prime**q, q * ti.r),
        predicted_cost=predicted_cost(ti, q, k),
    )


def single_pattern_k(m: int, sigma: int) -> float:
    """Stride that balances filtering against verification for one pattern."""
    return m / (2 * _log(m, sigma)) if m > 1 else 1.0
