"""Dense complex linear algebra primitives.

Hermitian spectral calculus, principal matrix powers, row-major
vectorization, partial traces, and Schatten norms. Everything here is a
pure function over numpy arrays; dimensions are desk scale (a few
qubits), so no attempt is made at sparsity or blocking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidOrder,
    NonHermitian,
    NonSquare,
    NotPositiveDefinite,
)

# Strict-positivity floor for matrix powers with negative or fractional
# exponents.
EPS_POS = 1e-10

# Hermiticity tolerance, relative to the Frobenius norm of the input.
HERM_RTOL = 1e-10


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def herm_part(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a^dagger) / 2."""
    return 0.5 * (a + dagger(a))


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def _as_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-data of a Hermitian matrix: real ascending eigenvalues and a
    unitary whose columns are the matching eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, fn) -> np.ndarray:
        """Return V f(lambda) V^dagger for a scalar function fn."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ dagger(v)

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda w: w)


def hermitian_eig(m: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Raises NonSquare / NonHermitian when the input fails the shape or
    symmetry checks; the symmetry tolerance is HERM_RTOL relative to the
    Frobenius norm.
    """
    m = _as_square(m)
    scale = max(frobenius(m), 1.0)
    if frobenius(m - dagger(m)) > HERM_RTOL * scale:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def matrix_power_psd(m: np.ndarray, z: complex) -> np.ndarray:
    """Principal power m^z of a strictly positive Hermitian matrix.

    Computed as V diag(lambda^z) V^dagger with lambda^z = exp(z ln lambda),
    so complex exponents are allowed. The result is re-Hermitized when z
    is real.
    """
    sd = hermitian_eig(m)
    if sd.eigenvalues.min() < EPS_POS:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {sd.eigenvalues.min():.3e} below floor {EPS_POS:.0e}"
        )
    if complex(z) == 0.0:
        return np.eye(m.shape[0], dtype=complex)
    out = sd.apply(lambda w: np.power(w.astype(complex), z))
    if np.isrealobj(z) or (isinstance(z, complex) and z.imag == 0.0):
        out = herm_part(out)
    return out


def matrix_log_psd(m: np.ndarray) -> np.ndarray:
    """Principal logarithm of a strictly positive Hermitian matrix."""
    sd = hermitian_eig(m)
    if sd.eigenvalues.min() < EPS_POS:
        raise NotPositiveDefinite("matrix logarithm needs a strictly positive input")
    return herm_part(sd.apply(np.log))


def product_power(rho: np.ndarray, sigma: np.ndarray, alpha: float, z: complex) -> np.ndarray:
    """Principal power (rho sigma^-alpha)^z for strictly positive rho, sigma.

    The product rho sigma^-alpha is not Hermitian, but it is similar to the
    positive matrix sigma^{-alpha/2} rho sigma^{-alpha/2}, so the power is
    evaluated as

        sigma^{alpha/2} (sigma^{-alpha/2} rho sigma^{-alpha/2})^z sigma^{-alpha/2}

    which avoids any non-normal eigenproblem.
    """
    rho = _as_square(rho)
    sigma = _as_square(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} and {sigma.shape} differ")
    s_half = matrix_power_psd(sigma, alpha / 2.0)
    s_mhalf = matrix_power_psd(sigma, -alpha / 2.0)
    mid = herm_part(s_mhalf @ rho @ s_mhalf)
    return s_half @ matrix_power_psd(mid, z) @ s_mhalf


def partial_trace(m: np.ndarray, dims: tuple[int, int], traced: str = "B") -> np.ndarray:
    """Partial trace over one factor of a bipartite operator.

    `dims` is (d_A, d_B) and `traced` names the subsystem that is traced
    out, "A" or "B".
    """
    m = _as_square(m)
    d_a, d_b = int(dims[0]), int(dims[1])
    if m.shape[0] != d_a * d_b:
        raise DimensionMismatch(
            f"matrix side {m.shape[0]} does not factor as {d_a} x {d_b}"
        )
    t = m.reshape(d_a, d_b, d_a, d_b)
    if traced == "B":
        return np.einsum("ijkj->ik", t)
    if traced == "A":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"traced must be 'A' or 'B', got {traced!r}")


def vectorize(a: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt vector |a> of a square matrix.

    Convention: |a> = (a otimes I) |I> with |I> = sum_j |j>|j> in the
    computational basis, i.e. row-major flattening. Under this map
    <a|b> = Tr[a^dagger b].
    """
    a = _as_square(a)
    return a.reshape(-1).copy()


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of vectorize."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = round(len(v) ** 0.5)
    if d * d != len(v):
        raise NonSquare(f"length {len(v)} is not a perfect square")
    return v.reshape(d, d).copy()


def schatten_norm(m: np.ndarray, p: float) -> float:
    """Schatten p-norm, (sum_i s_i^p)^(1/p) over singular values."""
    if p < 1.0:
        raise InvalidOrder(f"Schatten order must satisfy p >= 1, got {p}")
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    return float(np.sum(s**p) ** (1.0 / p))


def trace_norm(m: np.ndarray) -> float:
    return schatten_norm(m, 1.0)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance (1/2) ||a - b||_1."""
    return 0.5 * trace_norm(np.asarray(a) - np.asarray(b))


def matrix_to_json(m: np.ndarray) -> dict:
    """Encode a matrix as {"rows", "cols", "re", "im"} with nested row-major lists."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise NonSquare(f"expected a 2-d array, got shape {m.shape}")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode the matrix exchange format produced by matrix_to_json."""
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise DimensionMismatch(
            f"payload shape {re.shape}/{im.shape} does not match header {(rows, cols)}"
        )
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix payload has non-finite entries")
    return m
