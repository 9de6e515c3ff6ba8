"""Coincidence statistics, finite-shot sampling, and readout error.

A counts tensor is a (3**N, 2**N) array: one row per pre-rotation
setting, one column per measured bitstring (qubit 1 = leftmost bit).
Rows sum to the shot count.  Counts are floats; sampling returns whole
numbers and confusion-matrix mitigation generally does not.
"""

import warnings

import numpy as np

__all__ = [
    "ideal_counts",
    "sample_counts",
    "apply_confusion",
    "mitigate_confusion",
    "validate_confusion",
    "setting_probabilities",
]

NEGATIVE_PROB_TOL = -1e-10


def setting_probabilities(rho, projectors):
    """Outcome probabilities <xi_jk| rho |xi_jk> for every setting.

    Returns a (n_settings, dim) real array; each row resolves the
    identity so rows sum to one.
    """
    kets = projectors.kets
    probs = np.einsum("jka,ab,jkb->jk", kets.conj(), rho, kets).real
    low = probs.min()
    if low < NEGATIVE_PROB_TOL:
        raise ValueError(f"physicality violation: probability {low:.3e}")
    return np.clip(probs, 0.0, None)


def ideal_counts(rho, projectors, shots):
    """Expected coincidence counts shots * <xi_jk| rho |xi_jk>."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    if rho.shape[0] != projectors.dim:
        raise ValueError("state and projector dimensions differ")
    return shots * setting_probabilities(rho, projectors)


def sample_counts(ideal, seed):
    """Multinomial finite-shot sample of an ideal counts tensor.

    One draw per setting row with probabilities ``row / row_sum``.  The
    stream is the Philox 4x32-10 counter-based generator keyed by
    ``seed``; rows are drawn in setting order, so a given (tensor, seed)
    pair reproduces exactly.
    """
    ideal = np.asarray(ideal, dtype=float)
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    out = np.empty_like(ideal)
    for j, row in enumerate(ideal):
        total = row.sum()
        if total <= 0:
            raise ValueError(f"setting {j} has non-positive total count")
        shots = int(round(total))
        out[j] = rng.multinomial(shots, row / total)
    return out


def validate_confusion(M, cond_warn=1e3):
    """Check a confusion matrix: non-negative, column-stochastic, invertible.

    Columns index the prepared basis state, rows the observed one.
    A condition number above ``cond_warn`` triggers a warning.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"confusion matrix must be square, got {M.shape}")
    if M.min() < -1e-12:
        raise ValueError("confusion matrix has negative entries")
    col_sums = M.sum(axis=0)
    if np.max(np.abs(col_sums - 1.0)) > 1e-9:
        raise ValueError("confusion matrix columns must sum to 1")
    cond = np.linalg.cond(M)
    if not np.isfinite(cond):
        raise ValueError("confusion matrix is singular")
    if cond > cond_warn:
        warnings.warn(
            f"ill-conditioned confusion matrix (cond={cond:.1e})",
            RuntimeWarning,
            stacklevel=2,
        )
    return M


def apply_confusion(M, counts):
    """Skew counts by readout error: each setting row maps to M @ row."""
    M = validate_confusion(M)
    counts = np.asarray(counts, dtype=float)
    return counts @ M.T


def mitigate_confusion(M, counts, clamp=False):
    """Invert the readout error: each setting row maps to M^-1 @ row.

    Mitigated rows may contain small negative quasi-counts; they are
    passed through by default because the likelihood fitters tolerate
    them.  ``clamp=True`` clips at zero and rescales the row total
    instead.
    """
    M = validate_confusion(M)
    counts = np.asarray(counts, dtype=float)
    fixed = np.linalg.solve(M, counts.T).T
    if clamp:
        totals = fixed.sum(axis=1, keepdims=True)
        fixed = np.clip(fixed, 0.0, None)
        new_totals = fixed.sum(axis=1, keepdims=True)
        scale = np.where(new_totals > 0, totals / new_totals, 1.0)
        fixed = fixed * scale
    return fixed
