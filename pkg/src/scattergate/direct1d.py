"""Direct scattering for the stationary 1-D Schrodinger problem.

Conventions: units hbar = 2m = 1 and the wave equation

    psi'' + (k^2 + Q(x)) psi = 0,

so positive Q is an attractive well and bound states sit at k = i eta with
eta > 0.  The amplitude pair (a, b) is read off at the right edge of the
support window from phi = a e^{-ikx} + b e^{+ikx}, where phi is the solution
launched as e^{-ikx} at the left edge; |a|^2 - |b|^2 = 1 for real Q, and the
transmission / reflection amplitudes are T = 1/a, R = b/a.

Integration works on the plane-wave envelope (u, v) with
phi = u e^{+ikx} + v e^{-ikx} (and the gauge phi' = ik(u e^{ikx} - v e^{-ikx})),
which is constant wherever Q vanishes.  Long zero-potential stretches cost
nothing and the (a, b) extraction at the window edge is then simply
a = v(x_max), b = u(x_max).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .algebra import SU11Element, tau
from .errors import NumericalError

_RTOL = 1e-10
_ATOL = 1e-12


class PotentialSpec:
    """Base class for real potentials decaying at both infinities.

    Subclasses expose a support window outside which |Q| <= 1e-10 (widened
    automatically for the analytic families) and vectorized evaluation.
    """

    variant = "abstract"

    @property
    def window(self) -> tuple[float, float]:
        raise NotImplementedError

    def __call__(self, x):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Zero(PotentialSpec):
    """Free particle, Q identically zero."""

    variant = "zero"

    @property
    def window(self):
        return (0.0, 0.0)

    def __call__(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        return out if out.ndim else 0.0

    def to_json(self):
        return {"variant": "zero", "window": [0.0, 0.0]}


@dataclass(frozen=True, eq=False)
class SquareWell(PotentialSpec):
    """Constant Q = q0 on [x0, x0 + length], zero elsewhere."""

    q0: float
    x0: float
    length: float

    variant = "square_well"

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("length must be positive")

    @property
    def window(self):
        return (float(self.x0), float(self.x0 + self.length))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= self.x0) & (x <= self.x0 + self.length), float(self.q0), 0.0)
        return out if out.ndim else float(out)

    def to_json(self):
        return {
            "variant": "square_well",
            "q0": float(self.q0),
            "x0": float(self.x0),
            "length": float(self.length),
            "window": list(self.window),
        }


@dataclass(frozen=True, eq=False)
class SechSquared(PotentialSpec):
    """Reflectionless well Q = 2 eta^2 sech^2(eta (x - center)).

    Hosts exactly one bound state, at eta, and has transmission
    T(k) = (k + i eta)/(k - i eta) with R identically zero.
    """

    eta: float
    center: float = 0.0

    variant = "sech_squared"

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")

    @property
    def window(self):
        pad = 40.0 / self.eta
        return (float(self.center - pad), float(self.center + pad))

    def __call__(self, x):
        # sech via decaying exponentials only; no overflow at any x
        u = np.abs(self.eta * (np.asarray(x, dtype=float) - self.center))
        e = np.exp(-u)
        sech = 2.0 * e / (1.0 + e * e)
        out = 2.0 * self.eta**2 * sech * sech
        return out if out.ndim else float(out)

    def to_json(self):
        return {
            "variant": "sech_squared",
            "eta": float(self.eta),
            "center": float(self.center),
            "window": list(self.window),
        }


@dataclass(frozen=True, eq=False)
class LorentzianSum(PotentialSpec):
    """Q(x) = sum_j 2 a_j b_j / (x^2 + a_j^2).

    The 1/x^2 tails force a very wide support window to honour the
    |Q| <= 1e-10 decay contract, so scattering solves are noticeably
    slower than for the exponentially confined families.
    """

    pairs: tuple

    variant = "lorentzian_sum"

    def __post_init__(self):
        pairs = tuple((float(a), float(b)) for a, b in self.pairs)
        if any(a <= 0 for a, _ in pairs):
            raise ValueError("widths a_j must be positive")
        object.__setattr__(self, "pairs", pairs)

    @property
    def window(self):
        if not self.pairs:
            return (0.0, 0.0)
        amax = max(a for a, _ in self.pairs)
        mass = sum(2.0 * a * abs(b) for a, b in self.pairs)
        pad = max(12.0 * amax, np.sqrt(mass / 1e-10))
        return (-float(pad), float(pad))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b in self.pairs:
            out = out + 2.0 * a * b / (x * x + a * a)
        return out if out.ndim else float(out)

    def to_json(self):
        return {
            "variant": "lorentzian_sum",
            "pairs": [[a, b] for a, b in self.pairs],
            "window": list(self.window),
        }


@dataclass(frozen=True, eq=False)
class Tabulated(PotentialSpec):
    """Cubic-spline interpolant of samples (x, q); zero outside the grid hull."""

    x: np.ndarray
    q: np.ndarray

    variant = "tabulated"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if x.ndim != 1 or x.size < 4 or x.shape != q.shape:
            raise ValueError("need matching 1-D arrays with at least 4 samples")
        if not np.all(np.diff(x) > 0):
            raise ValueError("sample grid must be strictly ascending")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(q))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "_spline", CubicSpline(x, q))

    @property
    def window(self):
        return (float(self.x[0]), float(self.x[-1]))

    def __call__(self, xq):
        xx = np.asarray(xq, dtype=float)
        out = np.where((xx >= self.x[0]) & (xx <= self.x[-1]), self._spline(xx), 0.0)
        return out if out.ndim else float(out)

    def to_json(self):
        return {
            "variant": "tabulated",
            "x": self.x.tolist(),
            "q": self.q.tolist(),
            "window": list(self.window),
        }


def potential_from_json(doc: dict) -> PotentialSpec:
    """Rebuild a PotentialSpec from its JSON form (see to_json on each variant).

    Windows of analytic variants are re-derived from the parameters, so a
    stored document never smuggles in a window violating the decay contract.
    """
    kind = doc.get("variant")
    if kind == "zero":
        return Zero()
    if kind == "square_well":
        return SquareWell(q0=float(doc["q0"]), x0=float(doc["x0"]), length=float(doc["length"]))
    if kind == "sech_squared":
        return SechSquared(eta=float(doc["eta"]), center=float(doc.get("center", 0.0)))
    if kind == "lorentzian_sum":
        return LorentzianSum(pairs=tuple((float(a), float(b)) for a, b in doc["pairs"]))
    if kind == "tabulated":
        return Tabulated(x=np.asarray(doc["x"], dtype=float), q=np.asarray(doc["q"], dtype=float))
    raise ValueError(f"unknown potential variant: {kind!r}")


def momentum_grid(kmin: float, kmax: float, n: int) -> np.ndarray:
    """Ascending positive momentum grid with n points."""
    if not (kmin > 0 and n >= 1):
        raise ValueError("need kmin > 0 and n >= 1")
    if n == 1:
        return np.array([float(kmin)])
    if not kmax > kmin:
        raise ValueError("need kmax > kmin")
    return np.linspace(float(kmin), float(kmax), int(n))


@dataclass(frozen=True)
class ScatterCoeffs:
    """Amplitude pair (a, b) at momentum k; T = 1/a, R = b/a."""

    k: float
    a: complex
    b: complex

    def __post_init__(self):
        defect = (1.0 + abs(self.b) ** 2) / abs(self.a) ** 2 - 1.0
        if not np.isfinite(defect) or abs(defect) > 1e-8:
            raise NumericalError(
                f"|T|^2 + |R|^2 - 1 = {defect:.3e} at k = {self.k} exceeds 1e-8"
            )

    @property
    def transmission(self) -> complex:
        return 1.0 / self.a

    @property
    def reflection(self) -> complex:
        return self.b / self.a

    @property
    def su11(self) -> SU11Element:
        return SU11Element(self.a, self.b, atol=1e-8 * (1.0 + abs(self.b) ** 2))

    @property
    def smatrix(self) -> np.ndarray:
        return tau(self.a, self.b, atol=1e-8 * (1.0 + abs(self.b) ** 2))


def _envelope_rhs(q, k):
    half_ik = 0.5j / k

    def rhs(x, y):
        u, v = y
        c = half_ik * q(x)
        e = np.exp(-2j * k * x)
        return (c * (u + v * e), -c * (u / e + v))

    return rhs


def solve_scattering(q: PotentialSpec, k: float, rtol: float = _RTOL, atol: float = _ATOL) -> ScatterCoeffs:
    """Solve the direct problem at momentum k > 0.

    Launches phi = e^{-ikx} at the left window edge, integrates the envelope
    system with an adaptive RK (DOP853), and reads (a, b) at the right edge.
    """
    k = float(k)
    if not k > 0:
        raise ValueError(f"momentum must be positive, got {k}")
    x0, x1 = q.window
    if not x1 > x0:
        return ScatterCoeffs(k=k, a=1.0 + 0.0j, b=0.0j)
    sol = solve_ivp(
        _envelope_rhs(q, k),
        (x0, x1),
        np.array([0.0j, 1.0 + 0.0j]),
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NumericalError(f"scattering integration failed at k = {k}: {sol.message}")
    return ScatterCoeffs(k=k, a=complex(sol.y[1, -1]), b=complex(sol.y[0, -1]))


def solve_grid(q: PotentialSpec, ks, threads: int = 1, rtol: float = _RTOL, atol: float = _ATOL):
    """solve_scattering mapped over a momentum grid, order preserved."""
    ks = [float(k) for k in np.asarray(ks, dtype=float).ravel()]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda k: solve_scattering(q, k, rtol, atol), ks))
    return [solve_scattering(q, k, rtol, atol) for k in ks]


@dataclass(frozen=True)
class BoundState:
    """Discrete eigenvalue k = i eta with the left/right Jost ratio as norming."""

    eta: float
    norming: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")


def _tilted_left(q, eta, x_from, x_to):
    # left solution in the frame w = phi e^{-eta x}: bounded for all x
    def rhs(x, y):
        w, chi = y
        return (chi - eta * w, (eta * eta - q(x)) * w - eta * chi)

    sol = solve_ivp(rhs, (x_from, x_to), np.array([1.0, eta]), method="DOP853", rtol=_RTOL, atol=_ATOL)
    if not sol.success:
        raise NumericalError(f"bound-state integration failed at eta = {eta}: {sol.message}")
    return sol.y[0, -1], sol.y[1, -1]


def _tilted_right(q, eta, x_from, x_to):
    # right solution in the frame v = psi e^{+eta x}, integrated leftward
    def rhs(x, y):
        v, u = y
        return (u + eta * v, (eta * eta - q(x)) * v + eta * u)

    sol = solve_ivp(rhs, (x_from, x_to), np.array([1.0, -eta]), method="DOP853", rtol=_RTOL, atol=_ATOL)
    if not sol.success:
        raise NumericalError(f"bound-state integration failed at eta = {eta}: {sol.message}")
    return sol.y[0, -1], sol.y[1, -1]


def _norming_ratio(q, eta):
    """b_j = phi(x, i eta)/psi(x, i eta), checked for x-independence.

    Evaluated as (phi psi + phi' psi')/(psi^2 + psi'^2) so nodes of the
    eigenfunction (where the plain ratio is 0/0) stay well conditioned.
    """
    x0, x1 = q.window
    xm = 0.5 * (x0 + x1)
    # stay near the well: far out in the tails the ratio is dominated by the
    # residual growing component left over from the finite-precision eta root
    off = min(1.5, (x1 - x0) / 10.0)
    vals = []
    for xs in (xm - off, xm, xm + off):
        w, chi = _tilted_left(q, eta, x0, xs)
        v, u = _tilted_right(q, eta, x1, xs)
        vals.append(np.exp(2.0 * eta * xs) * (w * v + chi * u) / (v * v + u * u))
    vals = np.asarray(vals)
    mean = vals.mean()
    spread = np.max(np.abs(vals - mean)) / max(abs(mean), 1e-300)
    if spread > 1e-6:
        raise NumericalError(
            f"norming ratio varies with x (spread {spread:.2e}) at eta = {eta}"
        )
    return float(vals[1])


def find_bound_states(q: PotentialSpec, eta_max: float, n_scan: int = None):
    """Locate all bound states with eta in (0, eta_max].

    The matching determinant m(eta) (the coefficient of the growing
    exponential of the left solution at the right edge, ~ 2 eta a(i eta))
    is scanned for sign changes and each bracket is refined by brentq.
    """
    if not eta_max > 0:
        raise ValueError("eta_max must be positive")
    x0, x1 = q.window
    if not x1 > x0:
        return []
    if n_scan is None:
        n_scan = max(40, int(round(40 * eta_max)))

    def matching(eta):
        w, chi = _tilted_left(q, eta, x0, x1)
        return eta * w + chi

    etas = np.linspace(eta_max / n_scan, eta_max, n_scan)
    vals = np.array([matching(e) for e in etas])
    roots = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0:
            roots.append(etas[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(matching, etas[i], etas[i + 1], xtol=1e-12))
    if vals[-1] == 0.0:
        roots.append(etas[-1])
    return [BoundState(eta=float(r), norming=_norming_ratio(q, r)) for r in roots]


def fields_from_potentials(u: PotentialSpec, v: PotentialSpec, x):
    """Gauge pair (A, Q) with A' = (U - V)/2 and Q = A^2 + (U + V)/2.

    A is the running integral from the left grid end (A(x[0]) = 0).  The
    identities Q + A' - A^2 = U and Q - A' - A^2 = V invert the map exactly.
    Returns the sampled arrays (A, Q) on the supplied grid, which must cover
    both support windows.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2 or not np.all(np.diff(x) > 0):
        raise ValueError("evaluation grid must be strictly ascending")
    lo = min(u.window[0], v.window[0])
    hi = max(u.window[1], v.window[1])
    if x[0] > lo or x[-1] < hi:
        raise ValueError(
            f"grid [{x[0]}, {x[-1]}] does not cover the support windows out to [{lo}, {hi}]"
        )
    uu = np.asarray(u(x), dtype=float)
    vv = np.asarray(v(x), dtype=float)
    a = cumulative_trapezoid(0.5 * (uu - vv), x, initial=0.0)
    return a, a * a + 0.5 * (uu + vv)


def em_spin_smatrix(u: PotentialSpec, v: PotentialSpec, k: float, rtol: float = _RTOL, atol: float = _ATOL) -> np.ndarray:
    """Block scattering gate diag(S_U, S_V) of the spin particle.

    The spin-up channel scatters on U and the spin-down channel on V; the
    off-diagonal blocks vanish identically.
    """
    s_u = solve_scattering(u, k, rtol, atol).smatrix
    s_v = solve_scattering(v, k, rtol, atol).smatrix
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = s_u
    out[2:, 2:] = s_v
    return out
