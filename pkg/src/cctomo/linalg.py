"""Dense linear algebra for small multi-qubit Hilbert spaces.

Pauli strings, state overlap metrics, physicality projection, and the
triangular (Cholesky-style) parametrization of density matrices used by
the maximum-likelihood fitters.

Basis convention: the computational basis is indexed with qubit 1 as the
most significant bit, so for two qubits the order is |gg>, |ge>, |eg>,
|ee>.  All matrices are dense ``complex128`` numpy arrays; target system
sizes are a handful of qubits, where dense storage wins.
"""

import warnings

import numpy as np
import scipy.linalg

__all__ = [
    "PAULIS",
    "pauli_string",
    "all_pauli_strings",
    "basis_ket",
    "fidelity",
    "fidelity_general",
    "concurrence",
    "project_to_physical",
    "rho_from_params",
    "params_from_rho",
    "validate_density",
]

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Single-qubit operators in index order 0=I, 1=X, 2=Y, 3=Z.
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)

HERMITICITY_TOL = 1e-8


def pauli_string(indices, n_qubits=None):
    """Tensor product of single-qubit Pauli operators.

    Parameters
    ----------
    indices : sequence of int
        One index per qubit, each in 0..3 (0=I, 1=X, 2=Y, 3=Z).  Qubit 1
        comes first and ends up as the most significant tensor factor.
    n_qubits : int, optional
        Expected length of ``indices``; mismatch raises.

    Returns
    -------
    ndarray
        The ``2**N x 2**N`` operator, unitary and Hermitian.
    """
    indices = list(indices)
    if n_qubits is not None and len(indices) != n_qubits:
        raise ValueError(
            f"expected {n_qubits} Pauli indices, got {len(indices)}"
        )
    if not indices:
        raise ValueError("need at least one Pauli index")
    op = np.array([[1.0 + 0j]])
    for k in indices:
        if not 0 <= int(k) <= 3:
            raise ValueError(f"invalid Pauli index {k!r}, must be in 0..3")
        op = np.kron(op, PAULIS[int(k)])
    return op


def all_pauli_strings(n_qubits):
    """All 4**N Pauli strings, stacked in base-4 index order.

    Entry ``m`` corresponds to the base-4 digits of ``m`` read with the
    qubit-1 digit most significant, matching :func:`pauli_string`.
    """
    dim = 2**n_qubits
    out = np.empty((4**n_qubits, dim, dim), dtype=complex)
    for m in range(4**n_qubits):
        digits = [(m // 4**(n_qubits - 1 - q)) % 4 for q in range(n_qubits)]
        out[m] = pauli_string(digits)
    return out


def basis_ket(index, dim):
    """Computational basis ket |index> as a length-``dim`` vector."""
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def _check_square(mat):
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def fidelity(rho, target):
    """Overlap <psi|rho|psi> of a density matrix with a pure target state.

    The result is clamped to [0, 1]; an imaginary residual above 1e-12
    indicates a non-Hermitian ``rho`` and raises.
    """
    rho = _check_square(rho)
    target = np.asarray(target, dtype=complex).ravel()
    if target.shape[0] != rho.shape[0]:
        raise ValueError(
            f"dimension mismatch: rho is {rho.shape[0]}-dim, "
            f"target is {target.shape[0]}-dim"
        )
    val = np.vdot(target, rho @ target)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"overlap has imaginary residual {val.imag:.3e}")
    return float(min(1.0, max(0.0, val.real)))


def fidelity_general(rho, sigma):
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2.

    Works for arbitrary mixed states; coincides with :func:`fidelity`
    when ``sigma`` is a pure-state projector.  Computed by Hermitian
    eigendecomposition.
    """
    rho = _check_square(rho)
    sigma = _check_square(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch between the two states")
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = sqrt_rho @ sigma @ sqrt_rho
    eigs = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    root = np.sum(np.sqrt(np.clip(eigs, 0.0, None)))
    return float(min(1.0, root * root))


def concurrence(rho):
    """Wootters concurrence of a two-qubit density matrix.

    Returns max(0, l1 - l2 - l3 - l4) where l_i are the descending square
    roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
    """
    rho = _check_square(rho)
    if rho.shape[0] != 4:
        raise ValueError("concurrence is defined for two qubits (dim 4) only")
    syy = np.kron(PAULI_Y, PAULI_Y)
    spin_flipped = syy @ rho.conj() @ syy
    # same spectrum as rho @ spin_flipped, but through a Hermitian matrix
    # so the eigenvalues are well conditioned
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = sqrt_rho @ spin_flipped @ sqrt_rho
    eigs = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    lam = np.sqrt(np.clip(eigs, 0.0, None))
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def project_to_physical(mat):
    """Nearest-by-construction density matrix for a Hermitian input.

    Negative eigenvalues are clipped at zero and the spectrum is
    renormalized to unit trace.  Idempotent on already-physical input.
    If every eigenvalue is non-positive the maximally mixed state is
    returned with a warning.
    """
    mat = _check_square(mat)
    if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL:
        raise ValueError("input is not Hermitian within tolerance 1e-8")
    herm = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0.0:
        warnings.warn(
            "all eigenvalues non-positive; returning the maximally mixed state",
            RuntimeWarning,
            stacklevel=2,
        )
        dim = mat.shape[0]
        return np.eye(dim, dtype=complex) / dim
    rho = (v * (w / total)) @ v.conj().T
    return (rho + rho.conj().T) / 2


def _param_dim(n_params):
    dim = int(round(np.sqrt(n_params)))
    if dim * dim != n_params:
        raise ValueError(
            f"parameter vector length {n_params} is not a perfect square"
        )
    return dim


def _triangular_from_params(params):
    """Lower-triangular T from the real parameter vector.

    Layout: the first ``d`` entries are the real diagonal, followed by
    (re, im) pairs for the strictly-lower entries in row-major order.
    """
    params = np.asarray(params, dtype=float).ravel()
    dim = _param_dim(params.size)
    t = np.zeros((dim, dim), dtype=complex)
    t[np.diag_indices(dim)] = params[:dim]
    pos = dim
    for i in range(1, dim):
        for j in range(i):
            t[i, j] = params[pos] + 1j * params[pos + 1]
            pos += 2
    return t


def _params_from_triangular(t):
    dim = t.shape[0]
    params = np.empty(dim * dim, dtype=float)
    params[:dim] = np.diag(t).real
    pos = dim
    for i in range(1, dim):
        for j in range(i):
            params[pos] = t[i, j].real
            params[pos + 1] = t[i, j].imag
            pos += 2
    return params


def rho_from_params(params):
    """Density matrix T^dag T / Tr(T^dag T) from real parameters.

    Any nonzero real vector of length 4**N maps to a valid density
    matrix; the all-zero vector is rejected.
    """
    t = _triangular_from_params(params)
    gram = t.conj().T @ t
    trace = np.trace(gram).real
    if trace <= 0.0:
        raise ValueError("degenerate parameters: T^dag T has zero trace")
    return gram / trace


def params_from_rho(rho):
    """Inverse of :func:`rho_from_params` up to the trace-one gauge.

    Rank-deficient input is regularized by adding 1e-12 * identity before
    factorization, then renormalized.
    """
    rho = _check_square(rho)
    dim = rho.shape[0]
    reg = rho + 1e-12 * np.eye(dim)
    reg = (reg + reg.conj().T) / 2
    reg /= np.trace(reg).real
    # T is lower triangular with rho = T^dag T; flipping both axes turns
    # this into a standard upper Cholesky factorization.
    flip = np.eye(dim)[::-1]
    upper = scipy.linalg.cholesky(flip @ reg @ flip, lower=False)
    t = flip @ upper @ flip
    return _params_from_triangular(t)


def validate_density(rho, herm_tol=1e-10, trace_tol=1e-10, eig_tol=1e-10):
    """Raise unless ``rho`` is Hermitian, unit trace, and PSD within tolerance."""
    rho = _check_square(rho)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"not Hermitian: max deviation {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace {tr!r} differs from 1")
    low = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if low < -eig_tol:
        raise ValueError(f"negative eigenvalue {low:.3e}")
    return rho
