"""Kernel catalog and custom-kernel construction.

A kernel is an absolutely continuous function g on [0, 1] with
g(0) = g(1) = 0 and an essentially bounded a.e. derivative phi = g'.
Because the boundary values pin the integral of phi to zero, phi takes both
signs (unless g is identically zero), so the reciprocal slope bounds

    Lambda = 1 / ess sup phi  > 0,        lam = 1 / ess inf phi  < 0,

are well defined. They control everything downstream: the Bernoulli success
probability pi = Lambda / (Lambda - lam) of the mixture construction, the
admissible dependence range, and (through the signed area
kappa = integral_0^1 g) the attainable rank correlations.

The catalog ships twenty classical and constructed kernels. Rational
constants are also carried exactly (`fractions.Fraction`) so closed-form
rank correlations such as 1/3 or 3/4 round once, not per factor.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize, special

from .errors import (
    DegenerateKernel,
    NotAnchored,
    ParamOutOfRange,
    UnboundedDerivative,
    UnknownKernel,
)
from .numerics import gradient_on_grid, quad01, scan_extrema, sign_changes

ANCHOR_TOL = 1e-9
DEGENERATE_TOL = 1e-12

_E = math.e
_PI = math.pi


@dataclass(frozen=True)
class Kernel:
    """A kernel g with derivative phi, slope bounds and signed area.

    ``Lambda`` and ``lam`` are the reciprocals of the essential sup/inf of
    phi; ``kappa`` is the integral of g over [0, 1]. ``sign_constant`` is
    True iff g does not change sign on (0, 1). Exact rational values of the
    three constants are kept alongside the floats when they exist.
    Instances are immutable and all evaluations are pure.
    """

    id: str
    params: Mapping[str, float]
    g: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray] | None
    Lambda: float
    lam: float
    kappa: float
    sign_constant: bool
    breakpoints: tuple[float, ...] = ()
    degenerate: bool = False
    Lambda_exact: Fraction | None = None
    lam_exact: Fraction | None = None
    kappa_exact: Fraction | None = None

    def slope_sup(self) -> float:
        """Sup-norm of phi: max(1/Lambda, -1/lam)."""
        if self.degenerate:
            return 0.0
        return max(1.0 / self.Lambda, -1.0 / self.lam)

    def describe(self) -> str:
        ps = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.id}({ps})" if ps else self.id


def _frac(x) -> Fraction:
    # every binary float is an exact rational, so this loses nothing
    return Fraction(x)


def _is_integral(x) -> bool:
    return float(x).is_integer()


def sin_asym_slope_root() -> float:
    """Root y of y*tan(y) = 2 on (0, pi/2); locates the steepest descent of
    the asymmetric sine kernel."""
    return float(optimize.brentq(lambda y: y * math.tan(y) - 2.0, 1e-12, _PI / 2 - 1e-9, xtol=1e-14))


# ---------------------------------------------------------------------------
# catalog rows
# ---------------------------------------------------------------------------
# Each builder returns the Kernel for validated params. Derivatives are
# analytic. kappa/Lambda/lam carry exact Fractions whenever rational.


def _require(cond: bool, msg: str):
    if not cond:
        raise ParamOutOfRange(msg)


def _row_fgm(p) -> Kernel:
    return Kernel(
        "fgm", {},
        g=lambda u: u * (1.0 - u),
        phi=lambda u: 1.0 - 2.0 * u,
        Lambda=1.0, lam=-1.0, kappa=1.0 / 6.0, sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-1), kappa_exact=Fraction(1, 6),
    )


def _row_hki(p) -> Kernel:
    pe = p["p"]
    _require(pe > 0, "hki requires p > 0")
    fp = _frac(pe)
    return Kernel(
        "hki", {"p": pe},
        g=lambda u, pe=pe: u * (1.0 - u ** pe),
        phi=lambda u, pe=pe: 1.0 - (pe + 1.0) * u ** pe,
        Lambda=1.0, lam=-1.0 / pe, kappa=pe / (2.0 * (pe + 2.0)), sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=-1 / fp, kappa_exact=fp / (2 * (fp + 2)),
    )


def _row_hkii(p) -> Kernel:
    q = p["q"]
    _require(q > 1, "hkii requires q > 1 (phi unbounded otherwise)")
    fq = _frac(q)
    lam = -(((q + 1.0) / (q - 1.0)) ** (q - 1.0))
    lam_exact = -((fq + 1) / (fq - 1)) ** int(q - 1) if _is_integral(q) else None
    return Kernel(
        "hkii", {"q": q},
        g=lambda u, q=q: u * (1.0 - u) ** q,
        phi=lambda u, q=q: (1.0 - u) ** (q - 1.0) * (1.0 - (q + 1.0) * u),
        Lambda=1.0, lam=lam, kappa=1.0 / ((q + 1.0) * (q + 2.0)), sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=lam_exact,
        kappa_exact=1 / ((fq + 1) * (fq + 2)),
    )


def _row_bkb(prm) -> Kernel:
    p, q = prm["p"], prm["q"]
    _require(p > 0, "bkb requires p > 0")
    _require(q > 1, "bkb requires q > 1 (phi unbounded otherwise)")
    lam = -((1.0 + p * q) ** (q - 1.0)) / (p ** q * (q - 1.0) ** (q - 1.0))
    lam_exact = None
    if _is_integral(q):
        fp, n = _frac(p), int(q)
        lam_exact = -((1 + fp * n) ** (n - 1)) / (fp ** n * Fraction(n - 1) ** (n - 1))
    kappa = special.beta(2.0 / p, q + 1.0) / p
    kappa_exact = None
    if _is_integral(q) and p > 0 and _is_integral(2.0 / p):
        # B(n, q+1) = (n-1)! q! / (n+q)! for integer arguments
        n, iq = int(2.0 / p), int(q)
        kappa_exact = Fraction(math.factorial(n - 1) * math.factorial(iq),
                               math.factorial(n + iq)) / _frac(p)
    return Kernel(
        "bkb", {"p": p, "q": q},
        g=lambda u, p=p, q=q: u * (1.0 - u ** p) ** q,
        phi=lambda u, p=p, q=q: (1.0 - u ** p) ** (q - 1.0) * (1.0 - (1.0 + p * q) * u ** p),
        Lambda=1.0, lam=lam, kappa=kappa, sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=lam_exact, kappa_exact=kappa_exact,
    )


def _row_sin(p) -> Kernel:
    return Kernel(
        "sin", {},
        g=lambda u: np.sin(_PI * u) / _PI,
        phi=lambda u: np.cos(_PI * u),
        Lambda=1.0, lam=-1.0, kappa=2.0 / _PI ** 2, sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-1),
    )


def _row_sin_squared(p) -> Kernel:
    return Kernel(
        "sin_squared", {},
        g=lambda u: np.sin(_PI * u) ** 2 / _PI,
        phi=lambda u: np.sin(2.0 * _PI * u),
        Lambda=1.0, lam=-1.0, kappa=1.0 / (2.0 * _PI), sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-1),
    )


def _row_checkerboard(p) -> Kernel:
    return Kernel(
        "checkerboard", {},
        g=lambda u: np.minimum(u, 1.0 - u),
        phi=lambda u: np.where(np.asarray(u) <= 0.5, 1.0, -1.0),
        Lambda=1.0, lam=-1.0, kappa=0.25, sign_constant=True,
        breakpoints=(0.5,),
        Lambda_exact=Fraction(1), lam_exact=Fraction(-1), kappa_exact=Fraction(1, 4),
    )


def _row_lai_xie(prm) -> Kernel:
    a, b = prm["a"], prm["b"]
    _require(a > 1 and b > 1, "lai_xie requires a > 1 and b > 1")
    s = math.sqrt(a * b / (a + b - 1.0))
    common = (a + b) ** (a + b - 2.0) * math.sqrt(a + b - 1.0) / math.sqrt(a * b)
    Lambda = common / ((b - s) ** (b - 1.0) * (a + s) ** (a - 1.0))
    lam = -common / ((b + s) ** (b - 1.0) * (a - s) ** (a - 1.0))
    kappa = special.beta(b + 1.0, a + 1.0)
    kappa_exact = None
    if _is_integral(a) and _is_integral(b):
        ia, ib = int(a), int(b)
        kappa_exact = Fraction(math.factorial(ib) * math.factorial(ia),
                               math.factorial(ia + ib + 1))
    return Kernel(
        "lai_xie", {"a": a, "b": b},
        g=lambda u, a=a, b=b: u ** b * (1.0 - u) ** a,
        phi=lambda u, a=a, b=b: u ** (b - 1.0) * (1.0 - u) ** (a - 1.0) * (b - (a + b) * u),
        Lambda=Lambda, lam=lam, kappa=kappa, sign_constant=True,
        kappa_exact=kappa_exact,
    )


def _row_lee_quadratic(p) -> Kernel:
    return Kernel(
        "lee_quadratic", {},
        g=lambda u: u * (u - 1.0) / 2.0,
        phi=lambda u: u - 0.5,
        Lambda=2.0, lam=-2.0, kappa=-1.0 / 12.0, sign_constant=True,
        Lambda_exact=Fraction(2), lam_exact=Fraction(-2), kappa_exact=Fraction(-1, 12),
    )


def _row_lee_power(prm) -> Kernel:
    k = prm["k"]
    _require(_is_integral(k) and k >= 1, "lee_power requires integer k >= 1")
    k = int(k)
    return Kernel(
        "lee_power", {"k": k},
        g=lambda u, k=k: (u ** (k + 1) - u) / (k + 1.0),
        phi=lambda u, k=k: ((k + 1.0) * u ** k - 1.0) / (k + 1.0),
        Lambda=(k + 1.0) / k, lam=-(k + 1.0),
        kappa=-k / (2.0 * (k + 1.0) * (k + 2.0)), sign_constant=True,
        Lambda_exact=Fraction(k + 1, k), lam_exact=Fraction(-(k + 1)),
        kappa_exact=Fraction(-k, 2 * (k + 1) * (k + 2)),
    )


def _row_lee_exponential(p) -> Kernel:
    slope = 1.0 - 1.0 / _E
    return Kernel(
        "lee_exponential", {},
        g=lambda u: (1.0 - np.exp(-np.asarray(u, dtype=float))) - slope * np.asarray(u, dtype=float),
        phi=lambda u: np.exp(-np.asarray(u, dtype=float)) - slope,
        Lambda=_E, lam=-_E / (_E - 2.0), kappa=(3.0 - _E) / (2.0 * _E), sign_constant=True,
    )


def _row_norm_lee(p) -> Kernel:
    c = math.exp(2.0 / 3.0) / math.sqrt(3.0)
    s3 = math.sqrt(3.0)

    def g(u, c=c, s3=s3):
        u = np.asarray(u, dtype=float)
        z = special.ndtri(u)  # +-inf at the endpoints; arithmetic below is inf-safe
        return c * (special.ndtr(s3 * z + 2.0 / s3) - u)

    def phi(u, c=c, s3=s3):
        u = np.asarray(u, dtype=float)
        z = special.ndtri(u)
        return c * (s3 * math.exp(1.0 / 3.0) * np.exp(-((z + 1.0) ** 2)) - 1.0)

    return Kernel(
        "norm_lee", {},
        g=g, phi=phi,
        Lambda=1.0 / (_E - c), lam=-s3 * math.exp(-2.0 / 3.0),
        kappa=c * (special.ndtr(1.0 / s3) - 0.5),
        sign_constant=False,  # dips below zero near the origin
    )


def _row_exp_bridge(p) -> Kernel:
    den = _E ** 2 - 1.0
    return Kernel(
        "exp_bridge", {},
        g=lambda u: u * (np.exp(2.0 * (1.0 - np.asarray(u, dtype=float))) - 1.0) / den,
        phi=lambda u: ((1.0 - 2.0 * np.asarray(u, dtype=float))
                       * np.exp(2.0 * (1.0 - np.asarray(u, dtype=float))) - 1.0) / den,
        Lambda=1.0, lam=-den / 2.0, kappa=(_E ** 2 - 5.0) / (4.0 * den), sign_constant=True,
        Lambda_exact=Fraction(1),
    )


def _row_fgm_damped(p) -> Kernel:
    return Kernel(
        "fgm_damped", {},
        g=lambda u: u * (1.0 - u) / (1.0 + u),
        phi=lambda u: (1.0 - 2.0 * u - u ** 2) / (1.0 + u) ** 2,
        Lambda=1.0, lam=-2.0, kappa=1.5 - math.log(4.0), sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-2),
    )


def _row_legendre2(p) -> Kernel:
    return Kernel(
        "legendre2", {},
        g=lambda u: u * (1.0 - u) * (1.0 - 2.0 * u),
        phi=lambda u: 1.0 - 6.0 * u + 6.0 * u ** 2,
        Lambda=1.0, lam=-2.0, kappa=0.0, sign_constant=False,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-2), kappa_exact=Fraction(0),
    )


def _row_sin_asym(p) -> Kernel:
    y = sin_asym_slope_root()
    lam = -_PI * math.sqrt(y * y + 4.0) / (y * y + 2.0)
    return Kernel(
        "sin_asym", {},
        g=lambda u: (1.0 - u) * np.sin(_PI * u) / _PI,
        phi=lambda u: -np.sin(_PI * u) / _PI + (1.0 - u) * np.cos(_PI * u),
        Lambda=1.0, lam=lam, kappa=1.0 / _PI ** 2, sign_constant=True,
        Lambda_exact=Fraction(1),
    )


def _row_fgm_damped_sq(p) -> Kernel:
    return Kernel(
        "fgm_damped_sq", {},
        g=lambda u: u * (1.0 - u) / (1.0 + u ** 2),
        phi=lambda u: (1.0 - 2.0 * u - u ** 2) / (1.0 + u ** 2) ** 2,
        Lambda=1.0, lam=-2.0, kappa=-1.0 + math.log(2.0) / 2.0 + _PI / 4.0, sign_constant=True,
        Lambda_exact=Fraction(1), lam_exact=Fraction(-2),
    )


def _row_hkii_damped(p) -> Kernel:
    return Kernel(
        "hkii_damped", {},
        g=lambda u: u * (1.0 - u) ** 2 / (1.0 + u),
        phi=lambda u: (1.0 - u) * (1.0 - 3.0 * u - 2.0 * u ** 2) / (1.0 + u) ** 2,
        Lambda=1.0, lam=1.0 / (3.0 * 4.0 ** (1.0 / 3.0) - 5.0),
        kappa=17.0 / 6.0 - math.log(16.0), sign_constant=True,
        Lambda_exact=Fraction(1),
    )


def _row_fgm_exp(p) -> Kernel:
    return Kernel(
        "fgm_exp", {},
        g=lambda u: u * (1.0 - u) * np.exp(-np.asarray(u, dtype=float)),
        phi=lambda u: (1.0 - 3.0 * u + u ** 2) * np.exp(-np.asarray(u, dtype=float)),
        Lambda=1.0, lam=-_E, kappa=-1.0 + 3.0 / _E, sign_constant=True,
        Lambda_exact=Fraction(1),
    )


def _row_two_slope(p) -> Kernel:
    return Kernel(
        "two_slope", {},
        g=lambda u: np.where(np.asarray(u) <= 0.25, 3.0 * np.asarray(u, dtype=float),
                             1.0 - np.asarray(u, dtype=float)),
        phi=lambda u: np.where(np.asarray(u) <= 0.25, 3.0, -1.0),
        Lambda=1.0 / 3.0, lam=-1.0, kappa=3.0 / 8.0, sign_constant=True,
        breakpoints=(0.25,),
        Lambda_exact=Fraction(1, 3), lam_exact=Fraction(-1), kappa_exact=Fraction(3, 8),
    )


_CATALOG: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "fgm": (_row_fgm, ()),
    "hki": (_row_hki, ("p",)),
    "hkii": (_row_hkii, ("q",)),
    "bkb": (_row_bkb, ("p", "q")),
    "sin": (_row_sin, ()),
    "sin_squared": (_row_sin_squared, ()),
    "checkerboard": (_row_checkerboard, ()),
    "lai_xie": (_row_lai_xie, ("a", "b")),
    "lee_quadratic": (_row_lee_quadratic, ()),
    "lee_power": (_row_lee_power, ("k",)),
    "lee_exponential": (_row_lee_exponential, ()),
    "norm_lee": (_row_norm_lee, ()),
    "exp_bridge": (_row_exp_bridge, ()),
    "fgm_damped": (_row_fgm_damped, ()),
    "legendre2": (_row_legendre2, ()),
    "sin_asym": (_row_sin_asym, ()),
    "fgm_damped_sq": (_row_fgm_damped_sq, ()),
    "hkii_damped": (_row_hkii_damped, ()),
    "fgm_exp": (_row_fgm_exp, ()),
    "two_slope": (_row_two_slope, ()),
}

CATALOG_IDS: tuple[str, ...] = tuple(_CATALOG)

#: parameters used when a catalog listing needs one concrete kernel per id
DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    "hki": {"p": 2}, "hkii": {"q": 2}, "bkb": {"p": 2, "q": 2},
    "lai_xie": {"a": 2, "b": 2}, "lee_power": {"k": 2},
}


def catalog_lookup(name: str, params: Mapping[str, float] | None = None) -> Kernel:
    """Build a catalog kernel with analytic g, phi, Lambda, lam and kappa.

    Raises UnknownKernel for an unlisted id and ParamOutOfRange when the
    parameters fall outside the row's validity range (or are unexpected).
    """
    if name not in _CATALOG:
        raise UnknownKernel(f"no catalog kernel named {name!r}; known: {sorted(_CATALOG)}")
    builder, expected = _CATALOG[name]
    params = dict(params or {})
    if set(params) != set(expected):
        raise ParamOutOfRange(
            f"kernel {name!r} takes parameters {list(expected)}, got {sorted(params)}"
        )
    return builder(params)


def kernel_area(k: Kernel, numeric: bool = False) -> float:
    """Signed area kappa = integral of g over [0, 1].

    Returns the stored analytic value unless ``numeric`` forces adaptive
    quadrature (used as the anti-typo oracle for the catalog).
    """
    if numeric:
        return quad01(k.g, k.breakpoints)
    return k.kappa


def numeric_slope_bounds(k: Kernel, n_grid: int = 200_001) -> tuple[float, float]:
    """Re-derive (Lambda, lam) by dense-grid extremization of phi.

    Independent of the stored analytic values; used to cross-check every
    catalog row.
    """
    phi = k.phi if k.phi is not None else _numeric_phi_from_callable(k.g, n_grid)
    sup, inf = scan_extrema(phi, n_grid)
    if sup <= 0 or inf >= 0:
        raise DegenerateKernel(f"kernel {k.id} has one-signed derivative")
    return 1.0 / sup, 1.0 / inf


def _numeric_phi_from_callable(g: Callable, n_grid: int) -> Callable:
    xs = np.linspace(0.0, 1.0, n_grid)
    phi_vals = gradient_on_grid(np.asarray(g(xs), dtype=float))
    return lambda u, xs=xs, pv=phi_vals: np.interp(u, xs, pv)


def custom_kernel(
    g: Callable | Sequence[float] | np.ndarray,
    phi: Callable | None = None,
    n_grid: int = 200_001,
) -> Kernel:
    """Kernel from a user-supplied map: a callable on [0, 1] or values
    tabulated on a uniform grid.

    Slope bounds come from dense-grid extremization (with golden-section
    refinement for callables); kappa from adaptive quadrature (trapezoid for
    tabulated input). The zero kernel is allowed and flagged degenerate.

    Raises NotAnchored when g(0) or g(1) is nonzero beyond 1e-9, and
    UnboundedDerivative when difference-quotient extremes keep growing
    under grid refinement.
    """
    if callable(g):
        g_fn = g
        tabulated = None
    else:
        vals = np.asarray(g, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise ValueError("tabulated kernel needs a 1-d array of >= 3 values")
        xs = np.linspace(0.0, 1.0, vals.size)
        g_fn = lambda u, xs=xs, vals=vals: np.interp(u, xs, vals)  # noqa: E731
        tabulated = vals

    g0, g1 = float(g_fn(0.0)), float(g_fn(1.0))
    if abs(g0) > ANCHOR_TOL or abs(g1) > ANCHOR_TOL:
        raise NotAnchored(f"kernel boundary values g(0)={g0:.3g}, g(1)={g1:.3g} must vanish")

    probe = np.asarray(g_fn(np.linspace(0.0, 1.0, 4001)), dtype=float)
    if np.max(np.abs(probe)) < DEGENERATE_TOL:
        return Kernel(
            "custom", {}, g=g_fn, phi=(phi or (lambda u: np.zeros_like(np.asarray(u, dtype=float)))),
            Lambda=math.inf, lam=-math.inf, kappa=0.0, sign_constant=True,
            degenerate=True, kappa_exact=Fraction(0),
        )

    if phi is not None:
        phi_fn = phi
        sup, inf = scan_extrema(phi_fn, n_grid)
    elif tabulated is not None:
        phi_vals = gradient_on_grid(tabulated)
        xs = np.linspace(0.0, 1.0, tabulated.size)
        phi_fn = lambda u, xs=xs, pv=phi_vals: np.interp(u, xs, pv)  # noqa: E731
        sup, inf = float(np.max(phi_vals)), float(np.min(phi_vals))
    else:
        _check_bounded_derivative(g_fn)
        phi_fn = _numeric_phi_from_callable(g_fn, n_grid)
        sup, inf = scan_extrema(phi_fn, n_grid, refine=False)

    if sup <= 0 or inf >= 0:
        raise DegenerateKernel("derivative does not take both signs; g cannot anchor at 0 and 1")

    if tabulated is None:
        kappa = quad01(g_fn)
    else:
        kappa = float(np.trapezoid(tabulated, dx=1.0 / (tabulated.size - 1)))
    return Kernel(
        "custom", {}, g=g_fn, phi=phi_fn,
        Lambda=1.0 / sup, lam=1.0 / inf, kappa=kappa,
        sign_constant=not sign_changes(g_fn),
    )


def _check_bounded_derivative(g_fn: Callable, levels: int = 4) -> None:
    """Reject kernels whose difference quotients diverge under refinement."""
    prev = None
    growth = 0
    for n in (25_001, 50_001, 100_001, 200_001)[:levels]:
        xs = np.linspace(0.0, 1.0, n)
        quot = np.abs(np.diff(np.asarray(g_fn(xs), dtype=float))) * (n - 1)
        cur = float(np.max(quot))
        if prev is not None and cur > 1.25 * prev:
            growth += 1
        prev = cur
    if growth >= 2:
        raise UnboundedDerivative(
            "difference-quotient extremes grow under grid refinement; derivative appears unbounded"
        )


def validate_kernel(k: Kernel, grid: int = 2001) -> None:
    """Assert the structural kernel invariants; raises AssertionError.

    Checks boundary anchoring, zero-mean derivative, slope-bound signs and
    the Lipschitz envelope |g(u)| <= max(1/Lambda, -1/lam) * min(u, 1-u).
    """
    assert abs(float(k.g(0.0))) <= 1e-12 and abs(float(k.g(1.0))) <= 1e-12
    if k.degenerate:
        return
    assert k.lam < 0 < k.Lambda
    if k.phi is not None:
        assert abs(quad01(k.phi, k.breakpoints, tol=1e-10)) < 1e-8
    u = np.linspace(0.0, 1.0, grid)
    envelope = k.slope_sup() * np.minimum(u, 1.0 - u)
    assert np.all(np.abs(np.asarray(k.g(u), dtype=float)) <= envelope + 1e-12)
