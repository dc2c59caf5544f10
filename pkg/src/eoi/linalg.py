"""Complex linear algebra primitives for finite-dimensional pure states.

States are plain 1-D complex ndarrays, operators are 2-D complex ndarrays.
Every function here is pure and safe to call from multiple threads.

The matrix exponential is computed through a full Hermitian eigendecomposition
rather than a series expansion: for the small dimensions this library targets
(n <= 64) the eigensolver is cheap and the resulting evolution operator is
unitary up to roundoff.
"""

from __future__ import annotations

import numpy as np

# Default tolerances.  Double precision with n <= 64 leaves ample headroom.
TOL_NORM = 1e-10
TOL_HERM = 1e-10
TOL_UNITARY = 1e-10
TOL_ORTH = 1e-10
TOL_RANK = 1e-8
TOL_PSD = 1e-10
TOL_GAUGE = 1e-9


class RankDeficiencyError(ValueError):
    """A vector in an orthonormalization is dependent on its predecessors."""

    def __init__(self, index: int, pivot: float):
        self.index = index
        self.pivot = pivot
        super().__init__(
            f"vector {index} is linearly dependent on its predecessors "
            f"(pivot {pivot:.3e} below rank tolerance)"
        )


def as_state(vec, dim: int | None = None, *, check_norm: bool = True) -> np.ndarray:
    """Validate and return a state vector as a read-only complex128 array."""
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("state must be a nonempty 1-D vector")
    if dim is not None and arr.size != dim:
        raise ValueError(f"state has dimension {arr.size}, expected {dim}")
    if check_norm:
        norm2 = float(np.real(np.vdot(arr, arr)))
        if abs(norm2 - 1.0) > TOL_NORM:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
    out = arr.copy()
    out.setflags(write=False)
    return out


def inner_product(a, b) -> complex:
    """Return <a|b> = sum_k conj(a_k) b_k."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def gram_matrix(states) -> np.ndarray:
    """Overlap matrix G[i, j] = <psi_i|psi_j>, Hermitian by construction."""
    if len(states) == 0:
        raise ValueError("gram_matrix requires at least one state")
    cols = [np.asarray(s, dtype=np.complex128) for s in states]
    n = cols[0].size
    for idx, c in enumerate(cols):
        if c.ndim != 1 or c.size != n:
            raise ValueError(f"state {idx} has dimension {c.size}, expected {n}")
    m = len(cols)
    g = np.empty((m, m), dtype=np.complex128)
    for i in range(m):
        g[i, i] = np.real(np.vdot(cols[i], cols[i]))
        for j in range(i + 1, m):
            v = np.vdot(cols[i], cols[j])
            g[i, j] = v
            g[j, i] = np.conj(v)
    g.setflags(write=False)
    return g


def check_gram(g, tol_norm: float = TOL_NORM, tol_psd: float = TOL_PSD) -> None:
    """Raise if g is not a valid overlap matrix of normalized states."""
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("gram matrix must be square")
    if np.max(np.abs(g - g.conj().T)) > tol_norm:
        raise ValueError("gram matrix is not Hermitian")
    if np.max(np.abs(np.diagonal(g) - 1.0)) > tol_norm:
        raise ValueError("gram matrix diagonal is not 1")
    w = np.linalg.eigvalsh(g)
    if w[0] < -tol_psd:
        raise ValueError(f"gram matrix is not positive semidefinite (min eig {w[0]:.3e})")


def phase_invariant_fidelity(a, b) -> float:
    """|<a|b>| for normalized states; 1 exactly when a and b agree up to a global phase."""
    a = as_state(a)
    b = as_state(b, dim=a.size)
    return min(1.0, abs(np.vdot(a, b)))


def hermiticity_defect(h) -> float:
    """Largest entrywise deviation of h from its own adjoint."""
    h = np.asarray(h, dtype=np.complex128)
    return float(np.max(np.abs(h - h.conj().T)))


def unitarity_defect(u) -> float:
    """Largest entrywise deviation of u^dag u and u u^dag from the identity."""
    u = np.asarray(u, dtype=np.complex128)
    eye = np.eye(u.shape[0])
    return float(
        max(np.max(np.abs(u.conj().T @ u - eye)), np.max(np.abs(u @ u.conj().T - eye)))
    )


def hermitian_expm_apply(h, t: float, psi) -> np.ndarray:
    """Evolve psi by exp(-i h t) using the eigendecomposition of Hermitian h.

    hbar = 1; the output has unit norm up to roundoff because the evolution
    operator built this way is exactly unitary given an exact eigenbasis.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("hamiltonian must be a square matrix")
    defect = hermiticity_defect(h)
    if defect > TOL_HERM:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    psi = as_state(psi, dim=h.shape[0])
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * float(t))
    return v @ (phases * (v.conj().T @ psi))


def _mgs(cols: np.ndarray, tol: float, *, allow_dependent: bool, sign_fix: bool):
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns (q, r, kept) with q of shape (n, rank), r of shape (rank, m) such
    that cols ~= q @ r, and kept the pivot column indices.  Dependent columns
    raise RankDeficiencyError unless allow_dependent, in which case they are
    recorded in r but contribute no q column.
    """
    n, m = cols.shape
    q_cols: list[np.ndarray] = []
    r_full = np.zeros((m, m), dtype=np.complex128)
    kept: list[int] = []
    for c in range(m):
        v = cols[:, c].astype(np.complex128).copy()
        for _ in range(2):  # second pass keeps orthogonality near roundoff
            for row, q in enumerate(q_cols):
                coeff = np.vdot(q, v)
                r_full[kept[row], c] += coeff
                v -= coeff * q
        pivot = float(np.linalg.norm(v))
        if pivot <= tol:
            if not allow_dependent:
                raise RankDeficiencyError(c, pivot)
            continue
        q_cols.append(v / pivot)
        r_full[c, c] = pivot
        kept.append(c)
    q = np.column_stack(q_cols) if q_cols else np.zeros((n, 0), dtype=np.complex128)
    r = r_full[kept, :] if kept else np.zeros((0, m), dtype=np.complex128)
    if sign_fix:
        for k in range(q.shape[1]):
            nz = np.flatnonzero(np.abs(q[:, k]) > 1e-12)
            lead = q[nz[0], k]
            phase = lead / abs(lead)
            q[:, k] *= np.conj(phase)
            r[k, :] *= phase
    return q, r, kept


def orthonormalize(states):
    """Modified Gram-Schmidt orthonormalization of a linearly independent set.

    Returns (basis, r) with basis a list of orthonormal states spanning the
    input and r upper-triangular such that column-stacked states = Q r.  The
    leading nonzero entry of each basis vector is made real and positive so
    the output is free of phase ambiguity.
    """
    if len(states) == 0:
        raise ValueError("orthonormalize requires at least one state")
    cols = np.column_stack([np.asarray(s, dtype=np.complex128) for s in states])
    q, r, _ = _mgs(cols, TOL_RANK, allow_dependent=False, sign_fix=True)
    return [q[:, k].copy() for k in range(q.shape[1])], r


def complete_unitary(columns, dim: int | None = None) -> np.ndarray:
    """Extend k orthonormal columns to an n x n unitary.

    The fill is deterministic: standard basis vectors are orthonormalized
    against the existing columns in index order, skipping any whose residual
    falls below the rank tolerance.
    """
    cols = [np.asarray(c, dtype=np.complex128) for c in columns]
    if cols:
        n = cols[0].size
    elif dim is not None:
        n = dim
    else:
        raise ValueError("dim is required when no columns are given")
    k = len(cols)
    if k > n:
        raise ValueError(f"cannot complete {k} columns in dimension {n}")
    basis = np.zeros((n, n), dtype=np.complex128)
    for idx, c in enumerate(cols):
        if c.size != n:
            raise ValueError(f"column {idx} has dimension {c.size}, expected {n}")
        basis[:, idx] = c
    if k:
        defect = np.max(np.abs(basis[:, :k].conj().T @ basis[:, :k] - np.eye(k)))
        if defect > TOL_ORTH:
            raise ValueError(f"input columns are not orthonormal (defect {defect:.3e})")
    filled = k
    for i in range(n):
        if filled == n:
            break
        v = np.zeros(n, dtype=np.complex128)
        v[i] = 1.0
        for _ in range(2):
            v -= basis[:, :filled] @ (basis[:, :filled].conj().T @ v)
        norm = float(np.linalg.norm(v))
        if norm <= TOL_RANK:
            continue
        basis[:, filled] = v / norm
        filled += 1
    if filled != n:
        raise ValueError("failed to complete unitary from the standard basis fill")
    return basis


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    arr = np.asarray(x, dtype=float)
    out = np.mod(arr + np.pi, 2.0 * np.pi) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    return float(out) if arr.ndim == 0 else out
