"""Rank-one spectral pairs, eigenvalue tracking along parameter paths, and
derivative/density evaluation for isolated nondegenerate eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import Circle, extract_eigenvalue, rank_of_projection, riesz_projection
from .errors import IsolationLostError, RankNotOneError
from .numcore import as_matrix, eigvals_oracle
from . import schrodinger

GAP_FLOOR = 1e-6
RADIUS_GAP_FACTOR = 0.4
PIN_FLOOR = 0.1


@dataclass(frozen=True)
class RankOnePair:
    """|phi><eta| data of a rank-one projection: |phi| = 1, <eta, phi> = 1.

    The residual common phase is pinned by making the largest-magnitude
    component of phi (index ``pin``) real positive.
    """

    phi: np.ndarray
    eta: np.ndarray
    pin: int

    def projection(self) -> np.ndarray:
        return np.outer(self.phi, self.eta.conj())


def _pin_phase(phi: np.ndarray, eta: np.ndarray, pin: int | None):
    if pin is None or abs(phi[pin]) < PIN_FLOOR:
        pin = int(np.argmax(np.abs(phi)))
        repinned = True
    else:
        repinned = False
    phase = phi[pin] / abs(phi[pin])
    return phi / phase, eta / phase, pin, repinned


def rank_one_decompose(p, pin: int | None = None) -> RankOnePair:
    """Split a rank-one projection into its |phi><eta| pair.

    ``pin`` carries a previous phase-pinning component for continuity along
    paths; by default the largest component of phi is pinned.
    """
    p = as_matrix(p)
    if rank_of_projection(p) != 1:
        raise RankNotOneError(f"trace {complex(np.trace(p)):.3f} is not 1")
    col = int(np.argmax(np.linalg.norm(p, axis=0)))
    phi = p[:, col]
    phi = phi / np.linalg.norm(phi)
    eta_h = phi.conj() @ p          # phi* P = (phi* phi) eta* = eta*
    eta = eta_h.conj()
    overlap = complex(eta.conj() @ phi)
    eta = eta / np.conj(overlap)
    phi, eta, pin, _ = _pin_phase(phi, eta, pin)
    return RankOnePair(phi=phi, eta=eta, pin=pin)


@dataclass(frozen=True)
class TrackPoint:
    """One tracked sample: path parameter, eigenvalue, isolation gap, pinning."""

    index: int
    s: float
    energy: complex
    gap: float
    repinned: bool
    pair: RankOnePair


def _gap_at(matrix: np.ndarray, energy: complex) -> float:
    spec = eigvals_oracle(matrix)
    dist = np.abs(spec - energy)
    if len(dist) < 2:
        return float("inf")
    order = np.argsort(dist)
    return float(abs(spec[order[1]] - spec[order[0]]))


def track_eigenvalue(family_f, path, c0: Circle, s_values=None,
                     gap_floor: float = GAP_FLOOR) -> list[TrackPoint]:
    """Follow an isolated nondegenerate eigenvalue along a sampled path.

    The initial contour must enclose exactly one simple eigenvalue of
    family_f(path[0]).  At each subsequent sample the circle is re-centered
    at the previous eigenvalue with radius min(previous, 0.4 * gap); the gap
    to the rest of the spectrum is monitored and IsolationLostError raised
    when it falls below ``gap_floor``.  Eigenvector phases are carried
    continuously; re-pinning events are flagged.
    """
    path = list(path)
    if s_values is None:
        s_values = list(range(len(path)))
    s_values = [float(s) for s in s_values]
    if len(s_values) != len(path):
        raise ValueError("s_values must match the path length")

    out: list[TrackPoint] = []
    circle = c0
    pin = None
    for k, (s, p) in enumerate(zip(s_values, path)):
        matrix = as_matrix(family_f(p))
        energy = extract_eigenvalue(matrix, circle)
        gap = _gap_at(matrix, energy)
        if gap < gap_floor:
            raise IsolationLostError(f"gap {gap:.3e} < floor {gap_floor:.1e} at step {k}")
        proj = riesz_projection(matrix, circle)
        pair = rank_one_decompose(proj, pin=pin)
        repinned = k > 0 and pair.pin != pin
        pin = pair.pin
        out.append(TrackPoint(index=k, s=s, energy=energy, gap=gap,
                              repinned=repinned, pair=pair))
        radius = min(circle.radius, RADIUS_GAP_FACTOR * gap)
        circle = Circle(center=energy, radius=radius, nodes=circle.nodes)
    return out


def track_to_rows(points: list[TrackPoint]) -> list[dict]:
    """CSV-ready rows: parameter_index, s, Re E, Im E, gap, re-pin flag."""
    return [
        {
            "parameter_index": p.index,
            "s": p.s,
            "re_E": p.energy.real,
            "im_E": p.energy.imag,
            "gap": p.gap,
            "repinned": int(p.repinned),
        }
        for p in points
    ]


def hellmann_feynman(family_f, x, w, contour: Circle, dfamily=None,
                     adjoint_tol: float = 1e-7, fd_step: float = 1e-2) -> complex:
    """Directional eigenvalue derivative <eta| (D h . w) |phi> at parameter x.

    ``dfamily(x, w)`` supplies the directional derivative of the form matrix;
    when omitted it is taken as the central difference of family_f over
    x +/- fd_step * w, which is exact (to rounding) for families of
    polynomial degree <= 2 in the parameter.  The left vector is validated
    as an adjoint eigenvector: |H* eta - conj(E) eta| <= adjoint_tol * |H|.
    """
    matrix = as_matrix(family_f(x))
    proj = riesz_projection(matrix, contour)
    pair = rank_one_decompose(proj)
    energy = complex(np.trace(matrix @ proj))
    resid = matrix.conj().T @ pair.eta - np.conj(energy) * pair.eta
    scale = np.linalg.norm(matrix, 2)
    if np.linalg.norm(resid) > adjoint_tol * max(1.0, scale):
        raise RankNotOneError("left vector fails the adjoint eigenvector identity")
    if dfamily is not None:
        dh = as_matrix(dfamily(x, w))
    else:
        plus = as_matrix(family_f(x + fd_step * w))
        minus = as_matrix(family_f(x - fd_step * w))
        dh = (plus - minus) / (2.0 * fd_step)
    return complex(pair.eta.conj() @ dh @ pair.phi)


def eigenstate_density(grid, space, cfg, contour: Circle):
    """(rho, J) of the isolated eigenstate of a lattice family enclosed by the contour.

    Decomposes the Riesz projection into its rank-one pair and evaluates the
    lattice charge/current formulas at the configuration's vector potential.
    """
    matrix = schrodinger.family(grid, space, cfg)
    proj = riesz_projection(matrix, contour)
    pair = rank_one_decompose(proj)
    return schrodinger.charge_current_from_pair(space, grid, pair.phi, pair.eta, cfg.a)
