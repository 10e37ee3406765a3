"""Density matrices, purifications, and CPTP channels.

States are strictly positive throughout; near-singular random samples are
regularized toward the maximally mixed state and flagged. Channels are
kept in Kraus form with Stinespring dilations derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite
from .linalg import (
    EPS_POS,
    HERM_RTOL,
    dagger,
    frobenius,
    herm_part,
    hermitian_eig,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    vectorize,
)

TRACE_TOL = 1e-10
CHANNEL_TOL = 1e-10

# Random-state regularization: mix in delta * I/d whenever the smallest
# eigenvalue of a raw Ginibre sample falls below the trigger.
REG_TRIGGER = 1e-8
REG_DELTA = 1e-6


class DensityMatrix:
    """Strictly positive, unit-trace Hermitian matrix with cached eigen-data.

    Immutable after construction; `regularized` records whether the value
    came out of the sampler's near-singularity fixup.
    """

    def __init__(self, matrix: np.ndarray, regularized: bool = False):
        m = np.asarray(matrix, dtype=complex)
        scale = max(frobenius(m), 1.0)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or frobenius(m - dagger(m)) > HERM_RTOL * scale:
            hermitian_eig(m)  # raises with the precise reason
        # Decompose the hermitized matrix so the cached spectral data is a
        # pure function of the stored value (byte-equal states share it).
        stored = herm_part(m)
        spectral = hermitian_eig(stored)
        tr = float(np.sum(spectral.eigenvalues))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} is not 1 within {TRACE_TOL:.0e}")
        min_eig = float(spectral.eigenvalues.min())
        if min_eig < EPS_POS:
            raise NotPositiveDefinite(
                f"density matrix has eigenvalue {min_eig:.3e} below floor {EPS_POS:.0e}"
            )
        self.matrix = stored
        self.matrix.setflags(write=False)
        self.spectral = spectral
        self.dim = int(self.matrix.shape[0])
        self.min_eig = min_eig
        self.regularized = bool(regularized)
        self._pow_cache: dict[complex, np.ndarray] = {}

    def power(self, z: complex) -> np.ndarray:
        """Principal matrix power, cached per exponent."""
        key = complex(z)
        got = self._pow_cache.get(key)
        if got is None:
            if key == 0.0:
                got = np.eye(self.dim, dtype=complex)
            else:
                got = self.spectral.apply(lambda w: np.power(w.astype(complex), key))
                if key.imag == 0.0:
                    got = herm_part(got)
            self._pow_cache[key] = got
        return got

    def sqrt(self) -> np.ndarray:
        return self.power(0.5)

    def log(self) -> np.ndarray:
        return herm_part(self.spectral.apply(np.log))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, min_eig={self.min_eig:.3e})"


@dataclass(frozen=True, eq=False)
class PurifiedState:
    """Canonical purification |rho^(1/2)> as a unit vector of length dim^2."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"purification norm {norm!r} is not 1")


def canonical_purification(rho: DensityMatrix) -> PurifiedState:
    """Vectorize rho^(1/2); the reduced state on the first factor is rho."""
    return PurifiedState(dim=rho.dim, amplitudes=vectorize(rho.sqrt()))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map as a family of out_dim x in_dim Kraus operators."""

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.kraus_ops) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionMismatch("Kraus operators have inconsistent shapes")
        object.__setattr__(self, "kraus_ops", ops)
        comp = sum(dagger(k) @ k for k in ops)
        if frobenius(comp - np.eye(self.in_dim)) > CHANNEL_TOL:
            raise ValueError("Kraus family is not trace preserving within tolerance")

    @property
    def in_dim(self) -> int:
        return int(self.kraus_ops[0].shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.kraus_ops[0].shape[0])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Channel action sum_i K_i rho K_i^dagger."""
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatch(
                f"state of side {rho.shape} does not match in_dim {self.in_dim}"
            )
        return sum(k @ rho @ dagger(k) for k in self.kraus_ops)

    def adjoint_apply(self, a: np.ndarray) -> np.ndarray:
        """Hilbert-Schmidt adjoint sum_i K_i^dagger a K_i (unital)."""
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.out_dim, self.out_dim):
            raise DimensionMismatch(
                f"observable of side {a.shape} does not match out_dim {self.out_dim}"
            )
        return sum(dagger(k) @ a @ k for k in self.kraus_ops)

    def apply_density(self, rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(self.apply(rho.matrix))


@dataclass(frozen=True, eq=False)
class StinespringIsometry:
    """Isometry V with channel action Tr_env[V rho V^dagger].

    The dilated space is ordered out (x) env, so the adjoint channel is
    a -> V^dagger (a otimes I_env) V.
    """

    isometry: np.ndarray
    out_dim: int
    env_dim: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        v = self.isometry
        return partial_trace(v @ rho @ dagger(v), (self.out_dim, self.env_dim), "B")

    def adjoint_apply(self, a: np.ndarray) -> np.ndarray:
        v = self.isometry
        return dagger(v) @ np.kron(a, np.eye(self.env_dim)) @ v


def stinespring_dilate(ch: KrausChannel) -> StinespringIsometry:
    """Stack the Kraus family into an isometry V = sum_e K_e otimes |e>."""
    env = len(ch.kraus_ops)
    v = np.zeros((ch.out_dim * env, ch.in_dim), dtype=complex)
    for e, k in enumerate(ch.kraus_ops):
        basis = np.zeros((env, 1), dtype=complex)
        basis[e, 0] = 1.0
        v += np.kron(k, basis)
    if frobenius(dagger(v) @ v - np.eye(ch.in_dim)) > CHANNEL_TOL:
        raise ValueError("dilation failed the isometry check")
    return StinespringIsometry(isometry=v, out_dim=ch.out_dim, env_dim=env)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),))


def partial_trace_channel(d_a: int, d_b: int) -> KrausChannel:
    """The channel Tr_B on A (x) B, with Kraus operators I_A otimes <j|."""
    ops = []
    for j in range(d_b):
        bra = np.zeros((1, d_b), dtype=complex)
        bra[0, j] = 1.0
        ops.append(np.kron(np.eye(d_a, dtype=complex), bra))
    return KrausChannel(tuple(ops))


def stream(seed, *key) -> np.random.Generator:
    """Seedable, splittable generator; trial streams derive from (seed, key)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Complex standard-normal matrix."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_density(dim: int, rng_seed) -> DensityMatrix:
    """Full-rank random state rho = G G^dagger / Tr from the Ginibre ensemble.

    Samples with a smallest eigenvalue below REG_TRIGGER are mixed with
    REG_DELTA * I/d and flagged as regularized.
    """
    rng = stream(rng_seed)
    g = ginibre(rng, dim, dim)
    rho = g @ dagger(g)
    rho = rho / np.trace(rho).real
    regularized = False
    if float(np.linalg.eigvalsh(herm_part(rho)).min()) < REG_TRIGGER:
        rho = (1.0 - REG_DELTA) * rho + REG_DELTA * np.eye(dim) / dim
        regularized = True
    return DensityMatrix(rho, regularized=regularized)


def _fix_phases(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    # Make the QR factor unique so samples are Haar distributed and
    # reproducible across runs.
    d = np.diagonal(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d / np.abs(d))


def random_unitary(dim: int, rng_seed) -> np.ndarray:
    """Haar-random unitary via phase-fixed QR of a Ginibre matrix."""
    rng = stream(rng_seed)
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    return _fix_phases(q, r)


def random_isometry(rows: int, cols: int, rng_seed) -> np.ndarray:
    """Haar-random isometry (orthonormal columns), rows >= cols."""
    if rows < cols:
        raise DimensionMismatch(f"no isometry from dim {cols} into dim {rows}")
    rng = stream(rng_seed)
    q, r = np.linalg.qr(ginibre(rng, rows, cols))
    return _fix_phases(q, r)


def random_channel(in_dim: int, out_dim: int | None = None, env_dim: int | None = None,
                   rng_seed=0) -> KrausChannel:
    """Generic CPTP map from a Haar-random Stinespring isometry.

    env_dim defaults to out_dim, which produces full-rank channels.
    """
    out_dim = in_dim if out_dim is None else out_dim
    env_dim = out_dim if env_dim is None else env_dim
    v = random_isometry(out_dim * env_dim, in_dim, rng_seed)
    blocks = v.reshape(out_dim, env_dim, in_dim)
    return KrausChannel(tuple(blocks[:, e, :] for e in range(env_dim)))


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "in_dim": ch.in_dim,
        "out_dim": ch.out_dim,
        "kraus": [matrix_to_json(k) for k in ch.kraus_ops],
    }


def channel_from_json(obj: dict) -> KrausChannel:
    ch = KrausChannel(tuple(matrix_from_json(k) for k in obj["kraus"]))
    if ch.in_dim != int(obj["in_dim"]) or ch.out_dim != int(obj["out_dim"]):
        raise DimensionMismatch("kraus payload contradicts declared dimensions")
    return ch
