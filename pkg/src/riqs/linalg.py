"""Dense complex linear algebra kernel.

Conventions used by every module in this package:

* Operators are ``numpy.ndarray`` of ``dtype=complex`` in row-major (C-order)
  layout; equality is always entrywise within a stated tolerance.
* A tensor factorization is a tuple of factor dimensions, e.g. ``(2, 2**n, 2)``
  for system x bath x chain element. The product of the factors must equal the
  matrix dimension it annotates.
* Linear maps on operators are represented in the column-stacking
  vectorization ``vec(A) = A.T.reshape(-1)``.  With this convention
  ``vec(U X V) = (V.T kron U) vec(X)`` and composition of maps equals the
  product of their matrices.

Matrix exponentials are restricted to Hermitian generators (all step
Hamiltonians here are Hermitian) and computed by eigendecomposition.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import scipy.linalg

HERMITICITY_TOL = 1e-8

__all__ = [
    "kron",
    "nkron",
    "expm_unitary",
    "eig_general",
    "partial_trace",
    "vec",
    "unvec",
    "map_to_matrix",
    "apply_map_matrix",
    "hermitianize",
    "hermiticity_defect",
    "trace_norm",
    "trace_distance",
    "conjugate_on_factors",
    "apply_superop_on_factor",
    "embed_on_factors",
    "expectation_value",
]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker (tensor) product of two operators."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def nkron(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of operators, left to right."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^dagger) / 2."""
    return (a + a.conj().T) / 2


def hermiticity_defect(a: np.ndarray) -> float:
    """Max-entry distance of A from its Hermitian part."""
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def expm_unitary(h: np.ndarray, t: float, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Unitary ``exp(-i t h)`` of a Hermitian generator via eigendecomposition.

    Parameters
    ----------
    h : Hermitian matrix (checked entrywise within ``tol`` relative to scale).
    t : evolution time.

    Raises
    ------
    ValueError
        If ``h`` is not Hermitian within tolerance.
    """
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    if hermiticity_defect(h) > tol * scale:
        raise ValueError(
            f"expm_unitary requires a Hermitian generator; defect "
            f"{hermiticity_defect(h):.3e} exceeds {tol * scale:.3e}"
        )
    w, v = np.linalg.eigh(hermitianize(h))
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def _sort_order(eigenvalues: np.ndarray) -> np.ndarray:
    """Deterministic eigenvalue ordering: modulus desc, then real desc, then
    imaginary desc. Keys are rounded to 12 digits so that exact conjugate
    pairs are ordered by the documented tie-break and not by last-ulp noise."""
    mod = np.round(np.abs(eigenvalues), 12)
    re = np.round(eigenvalues.real, 12)
    im = np.round(eigenvalues.imag, 12)
    return np.lexsort((-im, -re, -mod))


def eig_general(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full eigendecomposition of a general square matrix.

    Returns ``(eigenvalues, right, left)`` with eigenvalues sorted by
    descending modulus (ties: descending real part, then imaginary part),
    right/left eigenvectors as columns in matching order. Where an eigenvalue
    is simple, the pair is biorthogonalized to ``left[:, i]^dagger @
    right[:, i] = 1``.

    Raises
    ------
    np.linalg.LinAlgError
        If the underlying QR iteration fails to converge; the message carries
        the matrix dimension and a condition estimate.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"eig_general requires a square matrix, got {m.shape}")
    try:
        w, vl, vr = scipy.linalg.eig(m, left=True, right=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:  # pragma: no cover
        cond = float(np.linalg.cond(m)) if np.all(np.isfinite(m)) else np.inf
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed for dimension {m.shape[0]} "
            f"(condition estimate {cond:.3e}): {exc}"
        ) from exc
    order = _sort_order(w)
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    # Biorthogonalize simple eigenvalues: scale left vectors so l^dag r = 1.
    n = w.size
    for i in range(n):
        gap = np.min(np.abs(np.delete(w, i) - w[i])) if n > 1 else np.inf
        if gap <= 1e-8 * max(1.0, float(np.abs(w[i]))):
            continue
        c = vl[:, i].conj() @ vr[:, i]
        if np.abs(c) > 1e-12:
            vl[:, i] = vl[:, i] / np.conj(c)
    return w, vr, vl


def _check_factorization(dim: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValueError(
            f"tensor factorization {dims} does not match matrix dimension {dim}"
        )
    return dims


def partial_trace(
    rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]
) -> np.ndarray:
    """Trace out all tensor factors except those in ``keep``.

    ``dims`` is the factorization of ``rho``; ``keep`` lists the indices of
    factors to retain (order preserved ascending). Trace-preserving and linear.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _check_factorization(rho.shape[0], dims)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # einsum subscripts: traced factors share an index on ket and bra sides
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many tensor factors")
    ket = list(letters[:n])
    bra = list(letters[n : 2 * n])
    for f in range(n):
        if f not in keep:
            bra[f] = ket[f]
    out_sub = "".join(ket[k] for k in keep) + "".join(bra[k] for k in keep)
    reduced = np.einsum("".join(ket) + "".join(bra) + "->" + out_sub, t)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.ravel(np.asarray(a, dtype=complex), order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex).ravel()
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"cannot unvec length {v.size} into a square matrix")
    return v.reshape((dim, dim), order="F")


def map_to_matrix(apply: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Matrix of a linear operator-to-operator map in the column-stacking basis.

    Column ``j`` is ``vec(apply(unvec(e_j)))`` where ``e_j`` runs over the
    column-stacked matrix units. ``apply_map_matrix(map_to_matrix(f, d), X)``
    reproduces ``f(X)`` for every ``X``.
    """
    m = np.empty((dim * dim, dim * dim), dtype=complex)
    basis = np.zeros(dim * dim, dtype=complex)
    for j in range(dim * dim):
        basis[:] = 0.0
        basis[j] = 1.0
        m[:, j] = vec(apply(unvec(basis, dim)))
    return m


def apply_map_matrix(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a vectorized map matrix to an operator."""
    d = x.shape[0]
    return unvec(m @ vec(x), d)


def trace_norm(a: np.ndarray) -> float:
    """Trace norm ||A||_1 (sum of singular values)."""
    return float(np.sum(scipy.linalg.svdvals(np.asarray(a, dtype=complex))))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)||rho - sigma||_1 between two states."""
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def _front_permutation(dims: tuple[int, ...], factors: tuple[int, ...]):
    rest = tuple(f for f in range(len(dims)) if f not in factors)
    perm = factors + rest
    d_act = int(np.prod([dims[f] for f in factors]))
    d_rest = int(np.prod([dims[f] for f in rest])) if rest else 1
    return perm, d_act, d_rest


def conjugate_on_factors(
    rho: np.ndarray, dims: Sequence[int], u: np.ndarray, factors: Sequence[int]
) -> np.ndarray:
    """Conjugate ``rho`` by a unitary acting on the listed tensor factors.

    ``u`` has dimension equal to the product of ``dims[f]`` for ``f`` in
    ``factors`` (taken in the given order); all other factors are spectators.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _check_factorization(rho.shape[0], dims)
    factors = tuple(int(f) for f in factors)
    perm, d_act, d_rest = _front_permutation(dims, factors)
    if u.shape != (d_act, d_act):
        raise ValueError(f"unitary shape {u.shape} != acting dimension {d_act}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    axes = perm + tuple(n + p for p in perm)
    t = t.transpose(axes).reshape(d_act, d_rest, d_act, d_rest)
    # (a,r,c,s) = U[a,b] t[b,r,c,s]; then contract the bra side with U*
    t = np.tensordot(u, t, axes=([1], [0]))
    t = np.tensordot(t, u.conj(), axes=([2], [1]))  # -> (a, r, s, d)
    t = t.transpose(0, 1, 3, 2)
    # undo: reshape to permuted factor layout, then invert the permutation
    pdims = tuple(dims[p] for p in perm)
    t = t.reshape(pdims + pdims)
    inv = np.argsort(perm)
    t = t.transpose(tuple(inv) + tuple(n + i for i in inv))
    d = int(np.prod(dims))
    return t.reshape(d, d)


def apply_superop_on_factor(
    rho: np.ndarray, dims: Sequence[int], superop: np.ndarray, factor: int
) -> np.ndarray:
    """Apply a vectorized operator map (column-stacking convention) to one
    tensor factor of a joint state, leaving the other factors untouched."""
    rho = np.asarray(rho, dtype=complex)
    dims = _check_factorization(rho.shape[0], dims)
    d = dims[factor]
    if superop.shape != (d * d, d * d):
        raise ValueError(f"superoperator shape {superop.shape} != ({d*d}, {d*d})")
    perm, d_act, d_rest = _front_permutation(dims, (factor,))
    n = len(dims)
    t = rho.reshape(dims + dims)
    axes = perm + tuple(n + p for p in perm)
    t = t.transpose(axes).reshape(d, d_rest, d, d_rest)
    # column stacking: vec index i + d*j unpacks C-order as (j, i)
    m4 = superop.reshape(d, d, d, d)  # [j, i, j', i']
    t = np.einsum("jiJI,IaJb->iajb", m4, t, optimize=True)
    pdims = tuple(dims[p] for p in perm)
    t = t.reshape(pdims + pdims)
    inv = np.argsort(perm)
    t = t.transpose(tuple(inv) + tuple(n + i for i in inv))
    dtot = int(np.prod(dims))
    return t.reshape(dtot, dtot)


def embed_on_factors(
    op: np.ndarray, dims: Sequence[int], factors: Sequence[int]
) -> np.ndarray:
    """Embed an operator acting on the listed factors into the full space.

    The embedding is ``op (x) identity`` brought to the factor order of
    ``dims`` by a permutation of tensor axes.
    """
    dims = _check_factorization(int(np.prod(tuple(dims))), dims)
    factors = tuple(int(f) for f in factors)
    perm, d_act, d_rest = _front_permutation(dims, factors)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d_act, d_act):
        raise ValueError(f"operator shape {op.shape} != acting dimension {d_act}")
    big = np.kron(op, np.eye(d_rest, dtype=complex))
    n = len(dims)
    pdims = tuple(dims[p] for p in perm)
    t = big.reshape(pdims + pdims)
    inv = np.argsort(perm)
    t = t.transpose(tuple(inv) + tuple(n + i for i in inv))
    d = int(np.prod(dims))
    return t.reshape(d, d)


def expectation_value(
    rho: np.ndarray, dims: Sequence[int], op: np.ndarray, factors: Sequence[int]
) -> complex:
    """Expectation of an operator supported on the listed factors."""
    keep = tuple(sorted(set(int(f) for f in factors)))
    if keep != tuple(factors):
        raise ValueError("factors must be sorted and unique for expectations")
    reduced = partial_trace(rho, dims, keep)
    return complex(np.trace(reduced @ np.asarray(op, dtype=complex)))
