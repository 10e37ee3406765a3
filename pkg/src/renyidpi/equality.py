"""Equality conditions for data-processing saturation and recovery maps.

Residual evaluators for the algebraic saturation conditions (the
geometric-mean form, the adjoint-channel form, the complex-power family,
and the simpler necessary conditions), the Petz recovery map and its
one-parameter power-family generalization, plus constructors for triples
that saturate the inequality by design.

Residuals are Frobenius norms divided by sqrt(dim) of the ambient space,
so tolerances are dimension stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, RenyiDpiError, SingularOutputState
from .linalg import (
    EPS_POS,
    dagger,
    frobenius,
    herm_part,
    matrix_power_psd,
    partial_trace,
    product_power,
    trace_norm,
)
from .modular import (
    CompressionIsometry,
    RelativeModularOperator,
    jensen_commutator_norm,
)
from .quantum import (
    DensityMatrix,
    KrausChannel,
    ginibre,
    partial_trace_channel,
    random_unitary,
    stinespring_dilate,
    stream,
)
from .divergence import as_order, closed_form_optimizer, dpi_gap

SATURATION_TOL = 1e-8

# Spectra of constructed saturating triples are kept moderate (eigenvalue
# spread of a few) because the beta-grid conditions raise states to powers
# as large as 1/(alpha-1) ~ 10, which amplifies roundoff far beyond the
# saturation tolerance on wildly conditioned inputs.
TRIPLE_MIX = 1.0

RECOVERABLE_KINDS = ("product", "blocked", "conjugated-product")


def geometric_mean(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Weighted geometric mean a^(1/2) (a^(-1/2) b a^(-1/2))^lam a^(1/2).

    Defined for any real weight; both operands must be strictly positive.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    a_half = matrix_power_psd(a, 0.5)
    a_mhalf = matrix_power_psd(a, -0.5)
    mid = herm_part(a_mhalf @ b @ a_mhalf)
    return herm_part(a_half @ matrix_power_psd(mid, float(lam)) @ a_half)


def default_beta_grid(alpha: float) -> tuple[complex, ...]:
    """Nine-point surrogate for 'all complex beta' in the power-family
    condition; includes every exponent the saturation analysis itself uses."""
    a = float(alpha)
    return (-1.0 + 0j, -0.5 + 0j, complex(-a), complex(a - 1.0), complex(1.0 - a),
            0.5 + 0j, 1.0 + 0j, 0.5j, 0.5 + 1j)


def _normalized(diff: np.ndarray) -> float:
    return frobenius(diff) / np.sqrt(diff.shape[0])


def _reduced(state: DensityMatrix, dims: tuple[int, int]) -> DensityMatrix:
    return DensityMatrix(partial_trace(state.matrix, dims, "B"))


def t1_residual(rho: DensityMatrix, sigma: DensityMatrix, ch: KrausChannel, order) -> float:
    """Residual of the adjoint-channel saturation condition.

    sigma^(-a/2) (sigma^(-a/2) rho sigma^(-a/2))^(a/(1-a)) sigma^(-a/2)
    against the adjoint channel applied to the same expression in the
    output states; zero exactly at data-processing saturation.
    """
    order = as_order(order)
    a = order.alpha
    power = a / (1.0 - a)

    def side(r: DensityMatrix, s: DensityMatrix) -> np.ndarray:
        s_m = s.power(-a / 2.0)
        mid = herm_part(s_m @ r.matrix @ s_m)
        return herm_part(s_m @ matrix_power_psd(mid, power) @ s_m)

    lhs = side(rho, sigma)
    rhs = ch.adjoint_apply(side(ch.apply_density(rho), ch.apply_density(sigma)))
    return _normalized(lhs - rhs)


def t1_geo_residual(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                    dims: tuple[int, int], order) -> float:
    """Residual of the geometric-mean saturation condition for Tr_B.

    rho_A #_(1/(1-a)) sigma_A^a otimes I_B against the same mean on AB.
    """
    order = as_order(order)
    lam = 1.0 / (1.0 - order.alpha)
    a = order.alpha
    rho_a = _reduced(rho_ab, dims)
    sigma_a = _reduced(sigma_ab, dims)
    lhs = np.kron(geometric_mean(rho_a.matrix, sigma_a.power(a), lam), np.eye(dims[1]))
    rhs = geometric_mean(rho_ab.matrix, sigma_ab.power(a), lam)
    return _normalized(lhs - rhs)


def _t3_side(rho_mat: np.ndarray, sigma_mat: np.ndarray, alpha: float, beta: complex) -> np.ndarray:
    z = beta / (alpha - 1.0)
    return matrix_power_psd(sigma_mat, beta) @ product_power(rho_mat, sigma_mat, alpha, z)


def t3_residual(rho: DensityMatrix, sigma: DensityMatrix, ch: KrausChannel, order,
                beta: complex) -> float:
    """Residual of the complex-power saturation family.

    sigma^beta (rho sigma^-a)^(beta/(a-1)) against the adjoint channel of
    the same expression in the output states; the full family over beta in
    C characterizes saturation, and beta = -alpha recovers the adjoint-
    channel condition of t1_residual.
    """
    order = as_order(order)
    beta = complex(beta)
    lhs = _t3_side(rho.matrix, sigma.matrix, order.alpha, beta)
    out_r = ch.apply_density(rho)
    out_s = ch.apply_density(sigma)
    rhs = ch.adjoint_apply(_t3_side(out_r.matrix, out_s.matrix, order.alpha, beta))
    return _normalized(lhs - rhs)


def t3_residual_dilated(rho: DensityMatrix, sigma: DensityMatrix, ch: KrausChannel,
                        order, beta: complex) -> float:
    """Same residual with the channel routed through its Stinespring dilation.

    The channel acts as Tr_env[V . V^dagger] and the adjoint as
    V^dagger (. otimes I_env) V, tracing the condition down to the
    partial-trace picture; the value agrees with the direct route to
    roundoff.
    """
    order = as_order(order)
    beta = complex(beta)
    v = stinespring_dilate(ch)
    lhs = _t3_side(rho.matrix, sigma.matrix, order.alpha, beta)
    out_r = DensityMatrix(v.apply(rho.matrix))
    out_s = DensityMatrix(v.apply(sigma.matrix))
    rhs = v.adjoint_apply(_t3_side(out_r.matrix, out_s.matrix, order.alpha, beta))
    return _normalized(lhs - rhs)


def petz_beta_residual(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                       dims: tuple[int, int], beta: complex) -> float:
    """Residual of sigma_AB^beta rho_AB^-beta = sigma_A^beta rho_A^-beta otimes I_B,
    the relative-entropy saturation family."""
    beta = complex(beta)
    rho_a = _reduced(rho_ab, dims)
    sigma_a = _reduced(sigma_ab, dims)
    lhs = sigma_ab.power(beta) @ rho_ab.power(-beta)
    rhs = np.kron(sigma_a.power(beta) @ rho_a.power(-beta), np.eye(dims[1]))
    return _normalized(lhs - rhs)


def petz_recover(sigma: DensityMatrix, ch: KrausChannel, y: np.ndarray) -> np.ndarray:
    """Petz recovery map sigma^(1/2) ch*(ch(sigma)^(-1/2) y ch(sigma)^(-1/2)) sigma^(1/2).

    Recovers sigma from ch(sigma) exactly, and recovers any rho from
    ch(rho) exactly when the data-processing inequality saturates.
    """
    out_sigma = herm_part(ch.apply(sigma.matrix))
    if np.linalg.eigvalsh(out_sigma).min() < EPS_POS:
        raise SingularOutputState("channel output of sigma is below the positivity floor")
    pivot = matrix_power_psd(out_sigma, -0.5)
    s_half = sigma.sqrt()
    return s_half @ ch.adjoint_apply(pivot @ np.asarray(y, dtype=complex) @ pivot) @ s_half


def alpha_recover(sigma_ab: DensityMatrix, dims: tuple[int, int], order,
                  x_a: np.ndarray) -> np.ndarray:
    """Power-family recovery map for Tr_B,

        sigma_AB^(1-a) (sigma_A^(a-1) x sigma_A^-a otimes I_B) sigma_AB^a.

    Trace preserving for every order; coincides with the Petz map at
    alpha = 1/2 but is not asserted to be positive elsewhere.
    """
    order = as_order(order)
    a = order.alpha
    sigma_a = _reduced(sigma_ab, dims)
    x_a = np.asarray(x_a, dtype=complex)
    if x_a.shape != (dims[0], dims[0]):
        raise DimensionMismatch(f"input side {x_a.shape} does not match d_A {dims[0]}")
    inner = np.kron(sigma_a.power(a - 1.0) @ x_a @ sigma_a.power(-a), np.eye(dims[1]))
    return sigma_ab.power(1.0 - a) @ inner @ sigma_ab.power(a)


def necessary1_residual(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                        dims: tuple[int, int], order) -> float:
    """Perfect-recovery form of the power-family condition at beta = alpha - 1:
    the power-family map must send rho_A back to rho_AB."""
    rho_a = _reduced(rho_ab, dims)
    recovered = alpha_recover(sigma_ab, dims, order, rho_a.matrix)
    return _normalized(recovered - rho_ab.matrix)


def necessary2_residual(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                        dims: tuple[int, int]) -> float:
    """Residual of sigma_A rho_A^-1 otimes I_B = sigma_AB rho_AB^-1, the
    beta = 1 - alpha corollary; necessary but possibly not sufficient."""
    rho_a = _reduced(rho_ab, dims)
    sigma_a = _reduced(sigma_ab, dims)
    lhs = np.kron(sigma_a.matrix @ rho_a.power(-1.0), np.eye(dims[1]))
    rhs = sigma_ab.matrix @ rho_ab.power(-1.0)
    return _normalized(lhs - rhs)


def recovery_error(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                   dims: tuple[int, int]) -> float:
    """Trace-norm error of Petz recovery from the reduced state,
    || R_{sigma,Tr_B}(rho_A) - rho_AB ||_1."""
    ch = partial_trace_channel(*dims)
    rho_a = _reduced(rho_ab, dims)
    return trace_norm(petz_recover(sigma_ab, ch, rho_a.matrix) - rho_ab.matrix)


def weighted_modular_pair(rho_ab: DensityMatrix, sigma_ab: DensityMatrix,
                          dims: tuple[int, int], order
                          ) -> tuple[RelativeModularOperator, RelativeModularOperator]:
    """Modular operators weighted by the optimizer a_*^2 on AB and on A.

    The A weight is rho_A^(1/2) a_*^2 rho_A^(1/2), which is exactly the
    closed-form optimizing state; the AB weight lifts a_*^2 otimes I_B
    through rho_AB^(1/2). Both weighted states have unit trace.
    """
    order = as_order(order)
    rho_a = _reduced(rho_ab, dims)
    sigma_a = _reduced(sigma_ab, dims)
    omega_a = closed_form_optimizer(rho_a, sigma_a, order).omega_star
    r_mhalf = rho_a.power(-0.5)
    a_star_sq = herm_part(r_mhalf @ omega_a.matrix @ r_mhalf)
    lifted = herm_part(
        rho_ab.sqrt() @ np.kron(a_star_sq, np.eye(dims[1])) @ rho_ab.sqrt()
    )
    omega_ab = DensityMatrix(lifted / np.trace(lifted).real)
    return (RelativeModularOperator(sigma_ab, omega_ab),
            RelativeModularOperator(sigma_a, omega_a))


def _tempered_density(dim: int, rng: np.random.Generator, mix: float = TRIPLE_MIX) -> DensityMatrix:
    g = ginibre(rng, dim, dim)
    rho = g @ dagger(g)
    rho = rho / np.trace(rho).real
    rho = (rho + mix * np.eye(dim) / dim) / (1.0 + mix)
    return DensityMatrix(rho)


def build_recoverable_triple(kind: str, dims: tuple[int, int], rng_seed
                             ) -> tuple[DensityMatrix, DensityMatrix]:
    """Construct (rho_AB, sigma_AB) that saturate data processing under Tr_B.

    Kinds:
      product             rho_A otimes tau and sigma_A otimes tau with a
                          shared environment state tau.
      blocked             block-diagonal marginals: two blocks embedded on
                          orthogonal subspaces of A with independent
                          (distinct) classical weights for rho and sigma,
                          all sharing one environment state. Distinct
                          per-block environments would still be
                          recoverable but break the Jensen commutation
                          [P, Delta] = 0, which is strictly stronger.
      conjugated-product  a product pair conjugated by U_A otimes I_B for
                          a Haar-random unitary on A.

    Every output is certified at construction: the Petz map rebuilds
    rho_AB from rho_A to within 1e-9.
    """
    d_a, d_b = int(dims[0]), int(dims[1])
    if d_a < 2 or d_b < 2:
        raise DimensionMismatch(f"dims must be at least 2, got {dims}")
    rng = stream(rng_seed)
    if kind == "product":
        tau = _tempered_density(d_b, rng)
        rho_ab = np.kron(_tempered_density(d_a, rng).matrix, tau.matrix)
        sigma_ab = np.kron(_tempered_density(d_a, rng).matrix, tau.matrix)
    elif kind == "blocked":
        sizes = (d_a - d_a // 2, d_a // 2)
        w = _block_weights(rng)
        v = _block_weights(rng)
        tau = _tempered_density(d_b, rng)
        rho_a = np.zeros((d_a, d_a), dtype=complex)
        sigma_a = np.zeros_like(rho_a)
        offset = 0
        for k, size in enumerate(sizes):
            sl = slice(offset, offset + size)
            rho_a[sl, sl] = w[k] * _tempered_density(size, rng).matrix
            sigma_a[sl, sl] = v[k] * _tempered_density(size, rng).matrix
            offset += size
        rho_ab = np.kron(rho_a, tau.matrix)
        sigma_ab = np.kron(sigma_a, tau.matrix)
    elif kind == "conjugated-product":
        tau = _tempered_density(d_b, rng)
        base_r = np.kron(_tempered_density(d_a, rng).matrix, tau.matrix)
        base_s = np.kron(_tempered_density(d_a, rng).matrix, tau.matrix)
        u = np.kron(random_unitary(d_a, rng), np.eye(d_b))
        rho_ab = u @ base_r @ dagger(u)
        sigma_ab = u @ base_s @ dagger(u)
    else:
        raise ValueError(f"kind must be one of {RECOVERABLE_KINDS}, got {kind!r}")
    pair = DensityMatrix(rho_ab), DensityMatrix(sigma_ab)
    cert = recovery_error(pair[0], pair[1], (d_a, d_b))
    if cert > 1e-9:
        raise RenyiDpiError(
            f"recoverable-triple certificate failed: recovery error {cert:.3e}"
        )
    return pair


def _block_weights(rng: np.random.Generator) -> tuple[float, float]:
    u = 0.5 + 0.3 * (rng.random() - 0.5)
    return (u, 1.0 - u)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Named saturation residuals at one Renyi order.

    residuals holds one nonnegative scalar per condition; the beta-indexed
    families are aggregated as maxima over the grid, with the per-beta
    values kept alongside. The dpi_gap entry is clamped at zero since the
    inequality guarantees nonnegativity up to roundoff. The commutator
    entry is the Jensen commutator norm divided by the super-operator
    sqrt(dim), i.e. by d_A * d_B.
    """

    alpha: float
    beta_grid: tuple[complex, ...]
    residuals: dict[str, float]
    t3_by_beta: tuple[float, ...] = field(default_factory=tuple)
    petz_beta_by_beta: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name, value in self.residuals.items():
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"residual {name}={value!r} is not a nonnegative real")

    def max_residual(self) -> float:
        return max(self.residuals.values())

    def saturated(self, tol: float = SATURATION_TOL) -> bool:
        """Whether every saturation-equivalent condition sits below tol.

        The commutator entry is excluded from the judgment: it is
        strictly stronger than saturation and can be large on recoverable
        pairs without a common product structure.
        """
        return max(v for k, v in self.residuals.items() if k != "commutator") <= tol

    def to_json(self) -> dict:
        out = {
            "alpha": self.alpha,
            "beta_re": [b.real for b in self.beta_grid],
            "beta_im": [b.imag for b in self.beta_grid],
        }
        out.update({k: float(v) for k, v in self.residuals.items()})
        return out


def full_report(rho_ab: DensityMatrix, sigma_ab: DensityMatrix, dims: tuple[int, int],
                order, beta_grid=None) -> ResidualReport:
    """All saturation diagnostics for a partial-trace triple at one order.

    Bundles the divergence gap with every equality-condition residual over
    the beta grid; on a saturating triple all entries sit at roundoff,
    and on a generic triple the gap and the residuals are jointly positive.
    """
    order = as_order(order)
    if beta_grid is None:
        beta_grid = default_beta_grid(order.alpha)
    beta_grid = tuple(complex(b) for b in beta_grid)
    ch = partial_trace_channel(*dims)
    t3_vals = tuple(t3_residual(rho_ab, sigma_ab, ch, order, b) for b in beta_grid)
    pb_vals = tuple(petz_beta_residual(rho_ab, sigma_ab, dims, b) for b in beta_grid)
    ci = CompressionIsometry(rho_ab, *dims)
    dop = RelativeModularOperator(sigma_ab, rho_ab)
    residuals = {
        "t1": t1_residual(rho_ab, sigma_ab, ch, order),
        "t1_geo": t1_geo_residual(rho_ab, sigma_ab, dims, order),
        "t3": max(t3_vals),
        "petz_beta": max(pb_vals),
        "necessary1": necessary1_residual(rho_ab, sigma_ab, dims, order),
        "necessary2": necessary2_residual(rho_ab, sigma_ab, dims),
        "commutator": jensen_commutator_norm(ci, dop) / (dims[0] * dims[1]),
        "dpi_gap": max(dpi_gap(rho_ab, sigma_ab, ch, order), 0.0),
    }
    return ResidualReport(alpha=order.alpha, beta_grid=beta_grid, residuals=residuals,
                          t3_by_beta=t3_vals, petz_beta_by_beta=pb_vals)


def mutual_implication_ok(report: ResidualReport, gap_tol: float = 1e-9,
                          residual_tol: float = 1e-7) -> bool:
    """Check that the gap and the power-family residuals vanish together.

    A vanishing gap must force every saturation-equivalent residual
    down, and a vanishing power family must force the gap down; either
    implication failing is a counterexample to the saturation
    equivalence. The commutator entry stays out of the check because it
    is strictly stronger than saturation.
    """
    gap = report.residuals["dpi_gap"]
    others = max(v for k, v in report.residuals.items()
                 if k not in ("dpi_gap", "commutator"))
    if gap <= gap_tol and others > residual_tol:
        return False
    if report.residuals["t3"] <= gap_tol and gap > residual_tol:
        return False
    return True
