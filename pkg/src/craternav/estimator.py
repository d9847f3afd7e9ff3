"""Pose estimation from crater observations.

Position: Gauss-Newton on squared-range residuals f_j = |c_j - x|^2 - rho_j^2,
one residual per matched crater center c_j and measured range rho_j.  The
Jacobian is linear in x, so each step is a small least-squares solve.

Attitude: QUEST on the measured body-frame directions paired with reference
directions computed from the estimated position to the matched crater
centers.  The attitude profile matrix is built reference-first
(B = sum w r b^T), which makes the dominant eigenvector of the Davenport
matrix the body-to-inertial quaternion directly.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .frames import quat_multiply, quat_normalize

__all__ = [
    "NlsSettings",
    "PoseEstimate",
    "STATUS_CONVERGED",
    "STATUS_DIVERGED",
    "STATUS_SKIPPED",
    "build_reference_vectors",
    "cold_start_position",
    "estimate_attitude_quest",
    "estimate_pose",
    "estimate_position",
    "nls_jacobian",
    "nls_residuals",
    "wahba_loss",
]

log = logging.getLogger(__name__)

STATUS_CONVERGED = "converged"
STATUS_DIVERGED = "diverged"
STATUS_SKIPPED = "skipped-insufficient-craters"

# 180-degree rotations used by the sequential-rotation fallback, paired with
# the quaternion that undoes each one.
_SEQ_DCMS = (
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)
_SEQ_QUATS = (
    np.array([0.0, 1.0, 0.0, 0.0]),
    np.array([0.0, 0.0, 1.0, 0.0]),
    np.array([0.0, 0.0, 0.0, 1.0]),
)


@dataclass(frozen=True)
class NlsSettings:
    """Gauss-Newton controls: step-norm tolerance (km) and iteration cap."""

    tolerance_km: float = 1e-9
    max_iterations: int = 50

    def __post_init__(self):
        if self.tolerance_km <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class PoseEstimate:
    """Result of one estimation step.

    ``position_mci``/``quaternion_ib`` are None unless the position solve
    converged; ``residual_history`` holds the sum of squared residuals at the
    initial guess and after every Gauss-Newton step.
    """

    status: str
    position_mci: np.ndarray | None = None
    quaternion_ib: np.ndarray | None = None
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    n_craters: int = 0


def nls_residuals(x, centers_mci, ranges_km) -> np.ndarray:
    """Squared-range residuals |c_j - x|^2 - rho_j^2 for each crater."""
    d = np.atleast_2d(np.asarray(centers_mci, dtype=float)) - np.asarray(x, dtype=float)
    return np.einsum("ij,ij->i", d, d) - np.asarray(ranges_km, dtype=float) ** 2


def nls_jacobian(x, centers_mci) -> np.ndarray:
    """Jacobian of the squared-range residuals: row j is -2 (c_j - x)^T."""
    d = np.atleast_2d(np.asarray(centers_mci, dtype=float)) - np.asarray(x, dtype=float)
    return -2.0 * d


def cold_start_position(centers_mci, ranges_km) -> np.ndarray:
    """Initial guess with no prior: mean range above the crater centroid.

    Puts the guess on the outward radial through the centroid of the matched
    craters at the centroid's radius plus the mean measured range, a rough
    stand-in for "altitude above the patch we are looking at".
    """
    centers = np.atleast_2d(np.asarray(centers_mci, dtype=float))
    centroid = centers.mean(axis=0)
    nc = float(np.linalg.norm(centroid))
    if nc == 0.0:
        raise ValueError("crater centroid is at the origin; cannot form a cold start")
    return (nc + float(np.mean(ranges_km))) * (centroid / nc)


def estimate_position(centers_mci, ranges_km, initial_guess=None,
                      settings: NlsSettings = NlsSettings()):
    """Gauss-Newton position solve.

    Returns (position, status, iterations, residual_history); ``position``
    is None unless status is "converged".  Fewer than three craters cannot
    fix three coordinates, so such steps are skipped outright.
    """
    centers = np.atleast_2d(np.asarray(centers_mci, dtype=float))
    ranges = np.asarray(ranges_km, dtype=float)
    n = centers.shape[0]
    if n <= 2:
        return None, STATUS_SKIPPED, 0, []

    x = (cold_start_position(centers, ranges) if initial_guess is None
         else np.asarray(initial_guess, dtype=float).copy())
    f = nls_residuals(x, centers, ranges)
    history = [float(f @ f)]
    for it in range(1, settings.max_iterations + 1):
        step, _, rank, _ = np.linalg.lstsq(nls_jacobian(x, centers), -f, rcond=None)
        x = x + step
        if not np.all(np.isfinite(x)):
            return None, STATUS_DIVERGED, it, history
        f = nls_residuals(x, centers, ranges)
        history.append(float(f @ f))
        if float(np.linalg.norm(step)) < settings.tolerance_km:
            if rank < 3:
                # Collinear crater centers leave a whole circle of positions
                # with identical ranges; the min-norm step settles on one of
                # them, but the fix is not unique, so refuse it.
                log.warning("position solve rank-deficient (rank %d); "
                            "crater geometry does not fix a unique point", rank)
                return None, STATUS_DIVERGED, it, history
            return x, STATUS_CONVERGED, it, history
    return None, STATUS_DIVERGED, settings.max_iterations, history


def build_reference_vectors(position_mci, centers_mci) -> np.ndarray:
    """Unit vectors from the (estimated) position toward each crater center."""
    d = np.atleast_2d(np.asarray(centers_mci, dtype=float)) - np.asarray(position_mci, dtype=float)
    norms = np.linalg.norm(d, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("crater center coincides with the position")
    return d / norms[:, None]


def _davenport_parts(body_dirs, ref_dirs, weights):
    """Profile matrix pieces (B, S, Z, sigma) with B = sum w r b^T."""
    b = np.atleast_2d(np.asarray(body_dirs, dtype=float))
    r = np.atleast_2d(np.asarray(ref_dirs, dtype=float))
    mat = (r * weights[:, None]).T @ b
    s = mat + mat.T
    z = np.array([mat[2, 1] - mat[1, 2], mat[0, 2] - mat[2, 0], mat[1, 0] - mat[0, 1]])
    return mat, s, z, float(np.trace(mat))


def _quest_lambda(s, z, sigma, lam0):
    """Largest root of the QUEST quartic by Newton from lam0 (total weight)."""
    kappa = 0.5 * (np.trace(s) ** 2 - np.trace(s @ s))
    a = sigma * sigma - kappa
    b = sigma * sigma + float(z @ z)
    c = float(np.linalg.det(s)) + float(z @ s @ z)
    d = float(z @ s @ s @ z)
    lam = lam0
    for _ in range(100):
        f = lam**4 - (a + b) * lam**2 - c * lam + (a * b + c * sigma - d)
        fp = 4.0 * lam**3 - 2.0 * (a + b) * lam - c
        if fp == 0.0:
            break
        delta = f / fp
        lam -= delta
        if abs(delta) <= 1e-13 * max(1.0, abs(lam0)):
            break
    return lam, kappa


def _quest_quaternion(s, z, sigma, lam, kappa):
    """Rodrigues-parameter extraction; returns (quaternion, gibbs_norm_sq)."""
    alpha = lam * lam - sigma * sigma + kappa
    beta = lam - sigma
    gamma = (lam + sigma) * alpha - float(np.linalg.det(s))
    x = (alpha * np.eye(3) + beta * s + s @ s) @ z
    scale = gamma * gamma + float(x @ x)
    q = np.concatenate(([gamma], x)) / math.sqrt(scale)
    return q, scale


def estimate_attitude_quest(body_dirs, ref_dirs, weights=None) -> np.ndarray:
    """Body-to-inertial quaternion that best aligns the direction pairs.

    Solves Wahba's problem by QUEST with the sequential-rotation fallback:
    the extraction above is singular when the optimal rotation is near 180
    degrees, so the frame is pre-rotated by each axis flip in turn and the
    best-conditioned extraction wins.  Scalar-first, scalar >= 0.
    """
    b = np.atleast_2d(np.asarray(body_dirs, dtype=float))
    r = np.atleast_2d(np.asarray(ref_dirs, dtype=float))
    if b.shape != r.shape or b.shape[1] != 3:
        raise ValueError("direction sets must both be (n, 3)")
    if b.shape[0] < 2:
        raise ValueError("attitude needs at least two direction pairs")
    w = (np.full(b.shape[0], 1.0 / b.shape[0]) if weights is None
         else np.asarray(weights, dtype=float) / float(np.sum(weights)))
    if np.any(w <= 0.0):
        raise ValueError("weights must be positive")
    if np.linalg.matrix_rank(b) < 2 or np.linalg.matrix_rank(r) < 2:
        raise ValueError("direction pairs are all parallel; attitude is underdetermined")

    mat0, _, _, _ = _davenport_parts(b, r, w)
    best_q, best_scale = None, -1.0
    for rot, undo in ((None, None), *zip(_SEQ_DCMS, _SEQ_QUATS)):
        mat = mat0 if rot is None else mat0 @ rot
        s = mat + mat.T
        z = np.array([mat[2, 1] - mat[1, 2], mat[0, 2] - mat[2, 0], mat[1, 0] - mat[0, 1]])
        sigma = float(np.trace(mat))
        lam, kappa = _quest_lambda(s, z, sigma, 1.0)
        q, scale = _quest_quaternion(s, z, sigma, lam, kappa)
        if undo is not None:
            q = quat_multiply(q, undo)
        if scale > best_scale:
            best_q, best_scale = q, scale
    q = quat_normalize(best_q)
    return q if q[0] >= 0.0 else -q


def wahba_loss(q_ib, body_dirs, ref_dirs, weights=None) -> float:
    """Weighted alignment loss 0.5 sum w |b_i - R_bi r_i|^2 for a candidate
    quaternion; used to compare attitude solutions without sign ambiguity."""
    from .frames import quat_to_dcm

    b = np.atleast_2d(np.asarray(body_dirs, dtype=float))
    r = np.atleast_2d(np.asarray(ref_dirs, dtype=float))
    w = np.full(b.shape[0], 1.0 / b.shape[0]) if weights is None else np.asarray(weights, float)
    resid = b - r @ quat_to_dcm(q_ib)
    return 0.5 * float(np.sum(w * np.einsum("ij,ij->i", resid, resid)))


def _chirality_triple(dirs):
    """Best-conditioned direction triple: indices and the triple product.

    Scans triples among the first eight directions and returns the one with
    the largest |det|; rotations preserve its sign, reflections flip it.
    """
    n = min(len(dirs), 8)
    best, best_det = None, 0.0
    for i, j, k in itertools.combinations(range(n), 3):
        det = float(np.linalg.det(dirs[[i, j, k]]))
        if abs(det) > abs(best_det):
            best, best_det = (i, j, k), det
    return best, best_det


def _mirror_about_center_plane(x, centers):
    """Reflect x about the least-squares plane through the crater centers."""
    centroid = centers.mean(axis=0)
    _, _, vt = np.linalg.svd(centers - centroid)
    normal = vt[-1]
    return x - 2.0 * float((x - centroid) @ normal) * normal


def estimate_pose(centers_mci, ranges_km, directions_body, initial_guess=None,
                  settings: NlsSettings = NlsSettings()) -> PoseEstimate:
    """Position solve followed, when it converges, by the QUEST attitude fit
    using reference vectors rebuilt from the estimated position.

    Range-only multilateration is two-fold ambiguous when the craters are
    coplanar (always, for exactly three): the true position and its mirror
    image through the crater plane fit the ranges equally well.  The measured
    directions settle it — a mirror solution reverses the handedness of the
    reconstructed reference vectors — so on a chirality mismatch the solve is
    restarted once from the reflected point.
    """
    centers = np.atleast_2d(np.asarray(centers_mci, dtype=float))
    dirs = np.atleast_2d(np.asarray(directions_body, dtype=float))
    x, status, iters, history = estimate_position(centers, ranges_km, initial_guess, settings)
    est = PoseEstimate(status=status, iterations=iters, residual_history=history,
                       n_craters=centers.shape[0] if np.size(centers) else 0)
    if status != STATUS_CONVERGED:
        return est

    refs = build_reference_vectors(x, centers)
    triple, det_body = _chirality_triple(dirs)
    if triple is not None and abs(det_body) > 1e-3:
        det_ref = float(np.linalg.det(refs[list(triple)]))
        if det_ref * det_body < 0.0:
            log.debug("mirror position solution detected; restarting from reflection")
            x2, status2, iters2, history2 = estimate_position(
                centers, ranges_km, _mirror_about_center_plane(x, centers), settings)
            est.iterations += iters2
            est.residual_history = history + history2
            if status2 != STATUS_CONVERGED:
                est.status = STATUS_DIVERGED
                return est
            refs2 = build_reference_vectors(x2, centers)
            if float(np.linalg.det(refs2[list(triple)])) * det_body < 0.0:
                est.status = STATUS_DIVERGED
                return est
            x, refs = x2, refs2

    est.position_mci = x
    est.quaternion_ib = estimate_attitude_quest(dirs, refs)
    return est
