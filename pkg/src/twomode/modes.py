"""Model parameters from a 1D double-well trap.

Pipeline: ``PotentialSpec -> solve_trap -> build_modes -> compute_integrals``.
The single-particle operator is ``-mass_factor * d²/dx² + V`` with Dirichlet
ends (zero outside the grid). Integrals use the trapezoid rule on the same
grid, and every ``H_t`` application uses the stencil of the trap solve.

The quasilocalized modes are built from the eigenfunctions of the
*reference* (untilted) potential, then all energies are evaluated with the
full tilted trap. For ``samples`` potentials the reference is the optional
``reference_values`` array, or the potential itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.linalg import eig_banded

from .eigensolver import jacobi_eigh
from .hamiltonian import CouplingSet, ModelParams

MIN_POINTS = 64

# -(d²/dx²) stencils, coefficient of f[i+k] for k = 0, 1, 2, ... (times 1/h²)
STENCILS = {
    3: (2.0, -1.0),
    5: (30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0),
}


class InvalidPotential(ValueError):
    pass


class GridTooCoarse(ArithmeticError):
    pass


class NotLocalized(ArithmeticError):
    pass


def quartic_tilted(x, b: float, w: float, alpha: float = 0.0) -> np.ndarray:
    return b * (x * x - w * w) ** 2 + alpha * x


def gaussian_barrier(x, omega: float, h: float, s: float, alpha: float = 0.0) -> np.ndarray:
    return 0.5 * omega**2 * x * x + h * np.exp(-x * x / (2.0 * s * s)) + alpha * x


KINDS = {"quartic_tilted": quartic_tilted, "gaussian_barrier": gaussian_barrier}


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    x: np.ndarray
    V: np.ndarray
    mass_factor: float
    g1d: float
    kind: str = "samples"
    params: dict = field(default_factory=dict)
    barrier_scale: float = 0.0
    V_reference: np.ndarray | None = None  # untilted samples, when known

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "V", V)
        if x.ndim != 1 or x.size < MIN_POINTS:
            raise InvalidPotential(f"grid needs at least {MIN_POINTS} points, got {x.size}")
        if V.shape != x.shape:
            raise InvalidPotential("potential samples must match the grid length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(V))):
            raise InvalidPotential("grid and potential must be finite")
        steps = np.diff(x)
        if np.any(steps <= 0):
            raise InvalidPotential("grid must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-12 * max(abs(steps.mean()), np.max(np.abs(x))):
            raise InvalidPotential("grid spacing must be uniform")
        if not (self.mass_factor > 0 and math.isfinite(self.mass_factor)):
            raise InvalidPotential("mass_factor must be positive")
        if not math.isfinite(self.g1d):
            raise InvalidPotential("g1d must be finite")
        if self.V_reference is not None:
            ref = np.asarray(self.V_reference, dtype=float)
            if ref.shape != x.shape or not np.all(np.isfinite(ref)):
                raise InvalidPotential("reference samples must be finite and match the grid length")
            object.__setattr__(self, "V_reference", ref)
        floor = np.min(V[1:-1]) + self.barrier_scale
        if V[0] < floor or V[-1] < floor or min(V[0], V[-1]) <= np.min(V[1:-1]):
            raise InvalidPotential("potential must rise toward both grid ends (confinement)")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def points(self) -> int:
        return int(self.x.size)

    def reference(self) -> "PotentialSpec":
        """Untilted potential whose eigenfunctions define the quasilocalized modes."""
        if self.V_reference is not None:
            return PotentialSpec(self.x, self.V_reference, self.mass_factor, self.g1d,
                                 barrier_scale=self.barrier_scale)
        if self.kind not in KINDS or not self.params.get("alpha"):
            return self
        params = dict(self.params, alpha=0.0)
        return self._rebuild(self.x, params)

    def refined(self) -> "PotentialSpec":
        """Same interval with ``2M - 1`` points (every old point kept)."""
        x = np.linspace(self.x[0], self.x[-1], 2 * self.points - 1)
        if self.kind in KINDS:
            return self._rebuild(x, self.params)
        ref = None if self.V_reference is None else np.interp(x, self.x, self.V_reference)
        return PotentialSpec(x, np.interp(x, self.x, self.V), self.mass_factor, self.g1d,
                             barrier_scale=self.barrier_scale, V_reference=ref)

    def _rebuild(self, x, params) -> "PotentialSpec":
        return PotentialSpec(x, KINDS[self.kind](x, **params), self.mass_factor, self.g1d,
                             self.kind, dict(params), self.barrier_scale)


def potential_from_dict(doc: dict) -> PotentialSpec:
    """Build a :class:`PotentialSpec` from its JSON form.

    ``{"grid": {"xmin", "xmax", "points"}, "potential": {"kind": ..., ...},
    "mass_factor": float, "g1d": float}``
    """
    grid = doc["grid"]
    x = np.linspace(float(grid["xmin"]), float(grid["xmax"]), int(grid["points"]))
    pot = doc["potential"]
    kind = pot["kind"]
    common = dict(mass_factor=float(doc["mass_factor"]), g1d=float(doc["g1d"]),
                  barrier_scale=float(doc.get("barrier_scale", 0.0)))
    if kind == "samples":
        ref = pot.get("reference_values")
        return PotentialSpec(x, np.asarray(pot["values"], dtype=float),
                             V_reference=None if ref is None else np.asarray(ref, dtype=float), **common)
    if kind not in KINDS:
        raise InvalidPotential(f"unknown potential kind {kind!r}")
    params = {k: float(v) for k, v in pot.get("params", {}).items()}
    try:
        V = KINDS[kind](x, **params)
    except TypeError as exc:
        raise InvalidPotential(f"bad parameters for {kind}: {exc}") from None
    return PotentialSpec(x, V, kind=kind, params=params, **common)


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.full(x.size, float(x[1] - x[0]))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def integrate(x: np.ndarray, f: np.ndarray) -> float:
    return float(np.dot(trapezoid_weights(x), f))


def trap_banded(spec: PotentialSpec, stencil: int = 5) -> np.ndarray:
    """Upper banded storage of the discretized trap Hamiltonian (for eig_banded)."""
    coeffs = STENCILS[stencil]
    u = len(coeffs) - 1
    M = spec.points
    scale = spec.mass_factor / spec.dx**2
    ab = np.zeros((u + 1, M))
    ab[u] = coeffs[0] * scale + spec.V
    for k in range(1, u + 1):
        ab[u - k, k:] = coeffs[k] * scale
    return ab


def trap_dense(spec: PotentialSpec, stencil: int = 5) -> np.ndarray:
    coeffs = STENCILS[stencil]
    scale = spec.mass_factor / spec.dx**2
    H = np.diag(coeffs[0] * scale + spec.V)
    for k in range(1, len(coeffs)):
        band = np.full(spec.points - k, coeffs[k] * scale)
        H += np.diag(band, k) + np.diag(band, -k)
    return H


def apply_trap(spec: PotentialSpec, f: np.ndarray, stencil: int = 5) -> np.ndarray:
    coeffs = STENCILS[stencil]
    scale = spec.mass_factor / spec.dx**2
    out = (coeffs[0] * scale + spec.V) * f
    for k in range(1, len(coeffs)):
        c = coeffs[k] * scale
        out[k:] += c * f[:-k]
        out[:-k] += c * f[k:]
    return out


@dataclass(frozen=True, eq=False)
class TrapSolution:
    x: np.ndarray
    energies: np.ndarray
    states: np.ndarray  # (M, k), trapezoid-normalized
    stencil: int


def is_mirror_symmetric(spec: PotentialSpec, tol: float = 1e-12) -> bool:
    """Grid and potential both invariant under x -> -x."""
    x, V = spec.x, spec.V
    if np.max(np.abs(x + x[::-1])) > tol * np.max(np.abs(x)):
        return False
    return bool(np.max(np.abs(V - V[::-1])) <= tol * max(np.max(np.abs(V)), 1.0))


def _lowest_pairs(spec, k, stencil, method):
    if method == "banded":
        w, v = eig_banded(trap_banded(spec, stencil), lower=False, select="i", select_range=(0, k - 1))
        return w, v
    if method == "jacobi":
        dec = jacobi_eigh(trap_dense(spec, stencil))
        return dec.eigenvalues[:k], dec.eigenvectors[:, :k]
    raise ValueError(f"unknown trap solver {method!r}")


def solve_trap(
    spec: PotentialSpec,
    k: int = 2,
    stencil: int = 5,
    method: str = "banded",
    self_check: bool = False,
    rel_tol: float = 1e-6,
) -> TrapSolution:
    """Lowest ``k`` eigenpairs of the discretized trap Hamiltonian.

    Eigenfunctions are normalized under the trapezoid rule and signed so
    that their largest-magnitude sample is positive. For mirror-symmetric
    potentials each eigenfunction is projected onto its dominant parity. With ``self_check`` the
    problem is re-solved on a grid twice as fine and :class:`GridTooCoarse`
    is raised if E0 or E1 moves by more than ``rel_tol`` relative.
    """
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    w, v = _lowest_pairs(spec, k, stencil, method)
    weights = trapezoid_weights(spec.x)
    mirror = is_mirror_symmetric(spec)
    states = np.empty_like(v)
    for j in range(k):
        phi = v[:, j]
        if mirror:
            # near-degenerate doublets come back mixed; restore definite parity
            even, odd = 0.5 * (phi + phi[::-1]), 0.5 * (phi - phi[::-1])
            phi = even if np.dot(even, even) >= np.dot(odd, odd) else odd
        phi = phi / math.sqrt(np.dot(weights, phi**2))
        if phi[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        states[:, j] = phi
    if self_check:
        fine, _ = _lowest_pairs(spec.refined(), min(k, 2), stencil, "banded")
        ref = max(np.max(np.abs(w[: fine.size])), np.finfo(float).tiny)
        shift = np.max(np.abs(fine - w[: fine.size])) / ref
        if shift > rel_tol:
            raise GridTooCoarse(
                f"grid doubling shifts the lowest levels by {shift:.2e} relative (limit {rel_tol:.0e})"
            )
    return TrapSolution(spec.x, w, states, stencil)


@dataclass(frozen=True, eq=False)
class ModeSet:
    x: np.ndarray
    phiS: np.ndarray
    phiA: np.ndarray
    phia: np.ndarray
    phib: np.ndarray
    ES: float
    EA: float
    left_mass_a: float
    right_mass_b: float
    stencil: int


def _mass_below(x, f, split):
    w = trapezoid_weights(x) * f * f
    return float(np.sum(w[x < split]) + 0.5 * np.sum(w[x == split])) / float(np.sum(w))


def build_modes(trap: TrapSolution, split: float = 0.0, min_mass: float = 0.8) -> ModeSet:
    """Quasilocalized modes ``phia, phib = (phiS ± phiA)/√2``.

    ``phia`` is oriented into the left well (``x < split``) by choosing the
    sign of ``phiA``.
    """
    if trap.states.shape[1] < 2:
        raise ValueError("need the two lowest trap eigenpairs")
    phiS, phiA = trap.states[:, 0], trap.states[:, 1]
    if _mass_below(trap.x, phiS + phiA, split) < 0.5:
        phiA = -phiA
    phia = (phiS + phiA) / math.sqrt(2.0)
    phib = (phiS - phiA) / math.sqrt(2.0)
    left_a = _mass_below(trap.x, phia, split)
    right_b = 1.0 - _mass_below(trap.x, phib, split)
    if left_a < min_mass or right_b < min_mass:
        raise NotLocalized(
            f"quasilocalized modes hold {left_a:.3f} / {right_b:.3f} of their weight in their "
            f"own wells (need {min_mass}); barrier too low for a two-mode description"
        )
    return ModeSet(trap.x, phiS, phiA, phia, phib, float(trap.energies[0]), float(trap.energies[1]),
                   left_a, right_b, trap.stencil)


@dataclass(frozen=True)
class IntegralSet:
    Ea: float
    Eb: float
    E12: float
    epsilon: float
    norm_dev_a: float
    norm_dev_b: float
    Uaa: float
    Ubb: float
    U: float
    U_asymmetry: float
    I1: float
    I2: float
    I3: float
    I1_over_Uaa: float
    I2_over_Uaa: float
    I3_over_Uaa: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


@dataclass(frozen=True)
class IntegralReport:
    integrals: IntegralSet
    couplings: CouplingSet
    params: ModelParams
    omega: float  # (θ + π/2)/2, metadata only


def compute_integrals(m: ModeSet, p: PotentialSpec, theta: float, N: int = 1) -> IntegralReport:
    """Every overlap integral of the two-mode model, by trapezoid quadrature.

    ``phia`` and ``phib`` are renormalized to unit norm before any energy
    integral; the norm deviations are reported separately. Interaction
    integrals include the ``g1d/2`` prefactor.
    """
    if p.points != m.x.size or np.max(np.abs(p.x - m.x)) > 1e-12 * np.max(np.abs(p.x)):
        raise ValueError("modes and potential live on different grids")
    x = p.x
    Ht = lambda f: apply_trap(p, f, m.stencil)  # noqa: E731
    quad = lambda f: integrate(x, f)  # noqa: E731
    half_g = 0.5 * p.g1d

    na, nb = quad(m.phia**2), quad(m.phib**2)
    a, b = m.phia / math.sqrt(na), m.phib / math.sqrt(nb)
    Ea, Eb = quad(a * Ht(a)), quad(b * Ht(b))
    eps = 0.5 * (quad(a * Ht(b)) + quad(b * Ht(a)))
    Uaa, Ubb = half_g * quad(a**4), half_g * quad(b**4)
    I1 = half_g * quad(a * a * b * b)
    I2 = half_g * quad(a**3 * b)
    I3 = half_g * quad(b**3 * a)
    U = 0.5 * (Uaa + Ubb)

    c, s = math.cos(theta / 2), math.sin(theta / 2)
    phi1 = c * a - s * b
    phi2 = c * b + s * a
    E12 = 0.5 * (quad(phi1 * Ht(phi2)) + quad(phi2 * Ht(phi1)))
    couplings = CouplingSet(
        E1=quad(phi1 * Ht(phi1)),
        E2=quad(phi2 * Ht(phi2)),
        E12=E12,
        U1111=half_g * quad(phi1**4),
        U2222=half_g * quad(phi2**4),
        U1212=half_g * quad(phi1**2 * phi2**2),
        U1112=half_g * quad(phi1**3 * phi2),
        U2212=half_g * quad(phi2**3 * phi1),
        U1122=half_g * quad(phi1**2 * phi2**2),
    )
    integrals = IntegralSet(
        Ea=Ea, Eb=Eb, E12=E12, epsilon=eps,
        norm_dev_a=na - 1.0, norm_dev_b=nb - 1.0,
        Uaa=Uaa, Ubb=Ubb, U=U,
        U_asymmetry=(Uaa - Ubb) / U if U else 0.0,
        I1=I1, I2=I2, I3=I3,
        I1_over_Uaa=I1 / Uaa if Uaa else 0.0,
        I2_over_Uaa=I2 / Uaa if Uaa else 0.0,
        I3_over_Uaa=I3 / Uaa if Uaa else 0.0,
    )
    params = ModelParams(N=N, theta=theta, A1=0.5 * (Ea - Eb), A2=0.5 * U,
                         epsilon=eps, I1=I1, I2=I2, I3=I3)
    return IntegralReport(integrals, couplings, params, 0.5 * (theta + 0.5 * math.pi))


def integrals_from_potential(
    spec: PotentialSpec,
    theta: float,
    N: int = 1,
    stencil: int = 5,
    method: str = "banded",
    split: float = 0.0,
    self_check: bool = False,
) -> tuple[ModeSet, IntegralReport]:
    trap = solve_trap(spec.reference(), k=2, stencil=stencil, method=method, self_check=self_check)
    modes = build_modes(trap, split=split)
    return modes, compute_integrals(modes, spec, theta, N)


ABSOLUTE_DELTA_KEYS = ("norm_dev_a", "norm_dev_b", "U_asymmetry")


def refinement_deltas(spec: PotentialSpec, theta: float, stencil: int = 5, split: float = 0.0) -> dict:
    """Change of every IntegralSet entry when the grid is doubled.

    Energies are compared relative to themselves, floored at 1e-12 of the
    largest energy so values that vanish by symmetry do not blow up. The
    dimensionless bookkeeping entries (norm deviations, U asymmetry) are
    reported as absolute changes.
    """
    _, coarse = integrals_from_potential(spec, theta, stencil=stencil, split=split)
    _, fine = integrals_from_potential(spec.refined(), theta, stencil=stencil, split=split)
    c, f = coarse.integrals.as_dict(), fine.integrals.as_dict()
    floor = 1e-12 * max(abs(c["Ea"]), abs(c["Eb"]), abs(c["Uaa"]))
    out = {}
    for key in c:
        if key in ABSOLUTE_DELTA_KEYS:
            out[key] = abs(f[key] - c[key])
        elif key.endswith("_over_Uaa"):
            out[key] = abs(f[key] - c[key]) / max(abs(c[key]), 1e-300)
        else:
            out[key] = abs(f[key] - c[key]) / max(abs(c[key]), floor)
    return out


@dataclass(frozen=True)
class RegimeReport:
    ratio: float  # |ε| / |A1 θ|
    tunneling_estimate: float  # A1 θ + ε
    status: str  # "pass" | "warn" | "fail"
    pass_below: float = 0.1
    warn_below: float = 0.5


def check_regime(params: ModelParams, pass_below: float = 0.1, warn_below: float = 0.5) -> RegimeReport:
    """Is ``H'`` small next to ``H0``'s tunnelling, i.e. ``ε << A1 θ``?"""
    drive = abs(params.A1 * params.theta)
    if params.epsilon == 0:
        ratio = 0.0
    elif drive == 0:
        ratio = math.inf
    else:
        ratio = abs(params.epsilon) / drive
    if ratio < pass_below:
        status = "pass"
    elif ratio < warn_below:
        status = "warn"
    else:
        status = "fail"
    return RegimeReport(ratio, params.A1 * params.theta + params.epsilon, status, pass_below, warn_below)
