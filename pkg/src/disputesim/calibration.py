"""Closed-form parameter bounds for the payout share, deposit and deterrence.

Every function works in exact rationals. Currency arguments are in whole
currency units (decimal strings, ints or Fractions), not minor units.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidParams, InvalidPopulation
from .money import Numberish, to_fraction


class Regime(enum.Enum):
    SCALE_LIMITED_ALPHA_ONE = "ScaleLimited_AlphaOne"
    SCALE_FREE_DETERRENCE_BOUND = "ScaleFree_DeterrenceBound"


@dataclass(frozen=True, slots=True)
class FeasibleInterval:
    alpha_lower: Fraction
    alpha_upper: Fraction
    regime: Regime

    @property
    def nonempty(self) -> bool:
        return self.alpha_lower <= self.alpha_upper

    def __contains__(self, alpha: object) -> bool:
        a = to_fraction(alpha)  # type: ignore[arg-type]
        return self.alpha_lower <= a <= self.alpha_upper


@dataclass(frozen=True, slots=True)
class GoalCheck:
    o1_holds: bool
    o2_holds: bool


@dataclass(frozen=True, slots=True)
class MinDeposit:
    deposit: Fraction
    # no colluders: the deterrence branch never binds
    honest_population: bool = False


def _check_eta(eta: Fraction) -> None:
    if not 0 < eta < 1:
        raise InvalidParams(f"eta must lie in (0, 1), got {eta}")


def alpha_lower_bound(m: int, f: Numberish, c_tilde: Numberish, d_p: Numberish) -> Fraction:
    """Smallest payout share keeping a worst-case winner whole: m(c~ + f)/D_p.

    Values above 1 mean no admissible share works.
    """
    f, c_tilde, d_p = to_fraction(f), to_fraction(c_tilde), to_fraction(d_p)
    if m < 1:
        raise InvalidParams("m must be >= 1")
    if f < 0 or c_tilde < 0:
        raise InvalidParams("fee and cost bound must be non-negative")
    if d_p == 0:
        raise ZeroDivisionError("deposit must be non-zero")
    if d_p < 0:
        raise InvalidParams("deposit must be positive")
    return m * (c_tilde + f) / d_p


def alpha_upper_bound(eta: Numberish, phi: Numberish) -> Fraction:
    """Largest share compatible with eta-deterrence at recapture fraction phi."""
    eta, phi = to_fraction(eta), to_fraction(phi)
    _check_eta(eta)
    if not 0 <= phi <= 1:
        raise InvalidParams(f"phi must lie in [0, 1], got {phi}")
    if phi == 0:
        return Fraction(1)
    return min(Fraction(1), (1 - eta) / phi)


def phi_free_upper_bound(eta: Numberish) -> tuple[Fraction, bool]:
    """Deterrence bound at the worst admissible phi = 1/2.

    Returns ``(min(1, 2(1 - eta)), eta > 1/2)``; the flag says whether the
    bound actually restricts alpha.
    """
    eta = to_fraction(eta)
    _check_eta(eta)
    return min(Fraction(1), 2 * (1 - eta)), eta > Fraction(1, 2)


def fair_single_winner_min_payout(
    n: int, c_tilde_init: Numberish, c_tilde_proc: Numberish
) -> Fraction:
    """Minimum alpha*D_p for ex-ante IR when one of n fair-ordered challengers wins."""
    if n < 1:
        raise InvalidParams("n must be >= 1")
    return n * to_fraction(c_tilde_init) + to_fraction(c_tilde_proc)


def fair_single_winner_feasible(
    n: int,
    c_tilde_init: Numberish,
    c_tilde_proc: Numberish,
    d_p: Numberish,
    eta: Numberish,
    phi: Numberish,
) -> bool:
    """Whether some admissible alpha pays the fair single-winner minimum."""
    need = fair_single_winner_min_payout(n, c_tilde_init, c_tilde_proc)
    return need <= alpha_upper_bound(eta, phi) * to_fraction(d_p)


def _validate_population(n: int, a: int) -> None:
    if n < 1:
        raise InvalidPopulation("n must be >= 1")
    if a < 0 or 2 * a >= n:
        raise InvalidPopulation(f"coalition size {a} violates 0 <= A < N/2 for N={n}")


def feasible_interval(
    n: int,
    a: int,
    c_tilde: Numberish,
    d_p: Numberish,
    eta: Numberish,
    phi: Numberish | None = None,
) -> FeasibleInterval:
    """Alpha interval satisfying both goals under non-exclusion with zero fees.

    ``phi`` defaults to ``a / n``; pass an override for a different recapture
    fraction.
    """
    _validate_population(n, a)
    eta = to_fraction(eta)
    _check_eta(eta)
    phi = Fraction(a, n) if phi is None else to_fraction(phi)
    lower = alpha_lower_bound(n, 0, c_tilde, d_p)
    upper = alpha_upper_bound(eta, phi)
    alpha_one_binds = phi == 0 or (1 - eta) / phi >= 1
    regime = (
        Regime.SCALE_LIMITED_ALPHA_ONE if alpha_one_binds else Regime.SCALE_FREE_DETERRENCE_BOUND
    )
    return FeasibleInterval(lower, upper, regime)


def scale_free_min_deposit(c_tilde: Numberish, a: int, eta: Numberish) -> MinDeposit:
    """Deposit c~ * A / (1 - eta) that keeps the interval non-empty in the
    deterrence-bound regime, whatever N is."""
    eta = to_fraction(eta)
    _check_eta(eta)
    if a < 0:
        raise InvalidPopulation("coalition size must be non-negative")
    if a == 0:
        return MinDeposit(Fraction(0), honest_population=True)
    return MinDeposit(to_fraction(c_tilde) * a / (1 - eta))


def deterrence_binds(n: int, a: int, eta: Numberish) -> bool:
    """True when (1 - eta)/phi < 1, i.e. A/N > 1 - eta."""
    eta = to_fraction(eta)
    return a > 0 and Fraction(a, n) > 1 - eta


def check_goals(
    alpha: Numberish,
    n: int,
    a: int,
    c_tilde: Numberish,
    d_p: Numberish,
    eta: Numberish,
    m: int | None = None,
    f: Numberish = 0,
    phi: Numberish | None = None,
) -> GoalCheck:
    """Analytic O1/O2 verdicts; ``m`` defaults to non-exclusion (m = n)."""
    _validate_population(n, a)
    alpha = to_fraction(alpha)
    m = n if m is None else m
    phi = Fraction(a, n) if phi is None else phi
    return GoalCheck(
        o1_holds=alpha >= alpha_lower_bound(m, f, c_tilde, d_p),
        o2_holds=alpha <= alpha_upper_bound(eta, phi),
    )
