"""Finite-dimensional brute-force checks with numpy and scipy.

Everything here works on dense ``FiniteMatrix`` values. Tolerances are
relative: they are scaled by the norm of the matrix under test.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
from pydantic import BaseModel, ConfigDict

from .errors import NotAMError, OperatorModelError
from .operators import (
    NormalDiagonalModel,
    PositiveDiagonalModel,
    min_modulus,
    truncate,
    truncation_deviation,
)
from .operators.matrix import FiniteMatrix
from .utils.exact import to_complex, to_float
from .utils.logger import get_logger

logger = get_logger(__name__)

ComplexArray = npt.NDArray[np.complex128]

HERMITIAN_TOLERANCE = 1e-12
RANK_CUTOFF = 1e-10
PSD_SLACK = 1e-8
PROJECTOR_TOLERANCE = 1e-8


class OracleReport(BaseModel):
    """Base for oracle check results."""

    model_config = ConfigDict(frozen=True)


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Ascending eigenvalues of a Hermitian matrix with orthonormal eigenvectors (columns)."""

    values: npt.NDArray[np.float64]
    vectors: ComplexArray


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Ascending singular values with ``a = left @ diag(singular_values) @ right^H``."""

    singular_values: npt.NDArray[np.float64]
    left: ComplexArray
    right: ComplexArray

    @property
    def smallest(self) -> float:
        return float(self.singular_values[0])

    @property
    def largest(self) -> float:
        return float(self.singular_values[-1])


def _scale(a: ComplexArray) -> float:
    return max(1.0, float(np.linalg.norm(a, ord=2)))


def hermitian_eigen(a: FiniteMatrix, tolerance: float = HERMITIAN_TOLERANCE) -> EigenResult:
    """Full eigendecomposition of a Hermitian matrix.

    Raises:
        OperatorModelError: If ``a`` is not square or not Hermitian.
    """
    if not a.is_square:
        raise OperatorModelError(f"Eigen decomposition needs a square matrix, got {a.rows}x{a.cols}")
    array = a.array
    asymmetry = float(np.linalg.norm(array - array.conj().T, ord=2))
    if asymmetry > tolerance * float(np.linalg.norm(array, ord=2)) and asymmetry > 0.0:
        raise OperatorModelError(f"Matrix is not Hermitian (||a - a*|| = {asymmetry:.3e})")
    values, vectors = la.eigh((array + array.conj().T) / 2)
    return EigenResult(values=np.asarray(values, dtype=np.float64), vectors=np.asarray(vectors, dtype=np.complex128))


def svd(a: FiniteMatrix) -> SvdResult:
    """Thin singular value decomposition, singular values ascending."""
    u, s, vh = la.svd(a.array, full_matrices=False)
    return SvdResult(
        singular_values=np.asarray(s[::-1], dtype=np.float64),
        left=np.asarray(u[:, ::-1], dtype=np.complex128),
        right=np.asarray(vh[::-1, :].conj().T, dtype=np.complex128),
    )


def _cutoff(s: npt.NDArray[np.float64], rank_tol: float | None, rank_cutoff: float) -> float:
    if rank_tol is not None:
        return rank_tol
    return rank_cutoff * float(s.max()) if s.size else 0.0


def numerical_rank(a: FiniteMatrix, rank_cutoff: float = RANK_CUTOFF) -> int:
    s = la.svdvals(a.array)
    return int(np.sum(s > _cutoff(s, None, rank_cutoff)))


def pseudoinverse_fd(a: FiniteMatrix, rank_tol: float | None = None, rank_cutoff: float = RANK_CUTOFF) -> FiniteMatrix:
    """Moore-Penrose inverse: reciprocals of singular values above the cutoff, zero below.

    The cutoff is ``rank_tol`` when given, otherwise ``rank_cutoff * sigma_max``.
    """
    u, s, vh = la.svd(a.array, full_matrices=False)
    cutoff = _cutoff(s, rank_tol, rank_cutoff)
    inverted = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return FiniteMatrix(vh.conj().T @ np.diag(inverted) @ u.conj().T)


def range_projector(a: ComplexArray, rank_cutoff: float = RANK_CUTOFF) -> ComplexArray:
    """Orthogonal projector onto the column space."""
    u, s, _ = la.svd(a, full_matrices=False)
    basis = u[:, s > _cutoff(s, None, rank_cutoff)]
    return basis @ basis.conj().T


def kernel_projector(a: ComplexArray, rank_cutoff: float = RANK_CUTOFF) -> ComplexArray:
    """Orthogonal projector onto the null space."""
    return np.eye(a.shape[1], dtype=np.complex128) - range_projector(a.conj().T, rank_cutoff)


def projector_distance(p: ComplexArray, q: ComplexArray) -> float:
    return float(np.linalg.norm(p - q, ord=2))


def _relative_residual(x: ComplexArray, y: ComplexArray) -> float:
    return float(np.linalg.norm(x - y, ord=2)) / max(1.0, float(np.linalg.norm(y, ord=2)))


def _min_hermitian_eigenvalue(x: ComplexArray) -> float:
    return float(la.eigvalsh((x + x.conj().T) / 2)[0])


class MoorePenroseReport(OracleReport):
    """Numerical check of the Moore-Penrose identities for one matrix."""

    range_of_pinv: bool
    kernel_of_pinv: bool
    bounded: bool
    double_pinv: bool
    adjoint_commutes: bool
    kernel_of_adjoint_pinv: bool
    gram_star_first: bool
    gram_star_last: bool
    residuals: dict[str, float]

    @property
    def all_hold(self) -> bool:
        return all(
            (
                self.range_of_pinv,
                self.kernel_of_pinv,
                self.bounded,
                self.double_pinv,
                self.adjoint_commutes,
                self.kernel_of_adjoint_pinv,
                self.gram_star_first,
                self.gram_star_last,
            ),
        )


def check_moore_penrose(
    a: FiniteMatrix,
    tolerance: float = PROJECTOR_TOLERANCE,
    rank_cutoff: float = RANK_CUTOFF,
    psd_slack: float = PSD_SLACK,
) -> MoorePenroseReport:
    """Verify the eight Moore-Penrose properties of ``a`` numerically.

    1. ``R(T^+) = N(T)^perp``
    2. ``N(T^+) = R(T)^perp = N(T*)``
    3. ``||T^+|| = 1 / (smallest nonzero singular value)`` (bounded in finite dimension)
    4. ``(T^+)^+ = T``
    5. ``(T*)^+ = (T^+)*``
    6. ``N((T*)^+) = N(T)``
    7. ``T^+ (T*)^+ >= 0`` and ``(T*T)^+ = T^+ (T*)^+``
    8. ``(T*)^+ T^+ >= 0`` and ``(TT*)^+ = (T*)^+ T^+``
    """
    t = a.array
    t_star = t.conj().T
    pinv = pseudoinverse_fd(a, rank_cutoff=rank_cutoff).array
    pinv_star = pseudoinverse_fd(a.conj_transpose(), rank_cutoff=rank_cutoff).array
    n_cols = t.shape[1]
    identity_cols = np.eye(n_cols, dtype=np.complex128)
    identity_rows = np.eye(t.shape[0], dtype=np.complex128)

    residuals: dict[str, float] = {}
    residuals["range_of_pinv"] = projector_distance(
        range_projector(pinv, rank_cutoff),
        identity_cols - kernel_projector(t, rank_cutoff),
    )
    kernel_pinv = kernel_projector(pinv, rank_cutoff)
    residuals["kernel_of_pinv"] = max(
        projector_distance(kernel_pinv, identity_rows - range_projector(t, rank_cutoff)),
        projector_distance(kernel_pinv, kernel_projector(t_star, rank_cutoff)),
    )

    s = la.svdvals(t)
    kept = s[s > _cutoff(s, None, rank_cutoff)]
    expected_norm = 1.0 / float(kept.min()) if kept.size else 0.0
    residuals["bounded"] = abs(float(np.linalg.norm(pinv, ord=2)) - expected_norm) / max(1.0, expected_norm)

    residuals["double_pinv"] = _relative_residual(pseudoinverse_fd(FiniteMatrix(pinv), rank_cutoff=rank_cutoff).array, t)
    residuals["adjoint_commutes"] = _relative_residual(pinv_star, pinv.conj().T)
    residuals["kernel_of_adjoint_pinv"] = projector_distance(
        kernel_projector(pinv_star, rank_cutoff),
        kernel_projector(t, rank_cutoff),
    )

    product_first = pinv @ pinv_star
    product_last = pinv_star @ pinv
    gram_first = pseudoinverse_fd(FiniteMatrix(t_star @ t), rank_cutoff=rank_cutoff).array
    gram_last = pseudoinverse_fd(FiniteMatrix(t @ t_star), rank_cutoff=rank_cutoff).array
    residuals["gram_star_first"] = _relative_residual(gram_first, product_first)
    residuals["gram_star_last"] = _relative_residual(gram_last, product_last)
    first_psd = _min_hermitian_eigenvalue(product_first) >= -psd_slack * _scale(product_first)
    last_psd = _min_hermitian_eigenvalue(product_last) >= -psd_slack * _scale(product_last)

    def ok(name: str) -> bool:
        return residuals[name] <= tolerance

    return MoorePenroseReport(
        range_of_pinv=ok("range_of_pinv"),
        kernel_of_pinv=ok("kernel_of_pinv"),
        bounded=ok("bounded"),
        double_pinv=ok("double_pinv"),
        adjoint_commutes=ok("adjoint_commutes"),
        kernel_of_adjoint_pinv=ok("kernel_of_adjoint_pinv"),
        gram_star_first=ok("gram_star_first") and first_psd,
        gram_star_last=ok("gram_star_last") and last_psd,
        residuals=residuals,
    )


def is_hyponormal_fd(a: FiniteMatrix, tolerance: float = PSD_SLACK) -> bool:
    """``a a* <= a* a`` up to ``tolerance * ||a||^2``."""
    if not a.is_square:
        raise OperatorModelError("Hyponormality needs a square matrix")
    t = a.array
    gap = t.conj().T @ t - t @ t.conj().T
    return _min_hermitian_eigenvalue(gap) >= -tolerance * _scale(t) ** 2


def random_unit_vectors(rng: np.random.Generator, dim: int, count: int) -> ComplexArray:
    """``count`` complex unit vectors as rows."""
    if count == 0:
        return np.zeros((0, dim), dtype=np.complex128)
    vectors = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


class ParanormalVerdict(OracleReport):
    """Either the paranormal inequality holds, or a falsifying unit vector."""

    holds: bool
    witness: tuple[tuple[float, float], ...] | None = None
    source: Literal["candidate", "grid"] | None = None

    @property
    def witness_vector(self) -> ComplexArray | None:
        if self.witness is None:
            return None
        return np.array([complex(re, im) for re, im in self.witness], dtype=np.complex128)


def _as_witness(x: ComplexArray) -> tuple[tuple[float, float], ...]:
    return tuple((float(z.real), float(z.imag)) for z in x)


def is_paranormal_fd(
    a: FiniteMatrix,
    lambda_grid_size: int = 64,
    trials: int = 1000,
    tolerance: float = PSD_SLACK,
    seed: int = 0,
) -> ParanormalVerdict:
    """Decide ``||Tx||^2 <= ||T^2 x||`` on unit vectors.

    Falsification tries basis vectors, eigenvectors of ``T*T`` and ``trials``
    random unit vectors. If none fails, ``T*^2 T^2 - 2 lam T*T + lam^2 I >= 0`` is
    checked on a log grid of ``lam`` spanning ``[sigma_min^2, sigma_max^2]``; a
    negative direction there is itself a falsifying vector.
    """
    if not a.is_square:
        raise OperatorModelError("Paranormality needs a square matrix")
    t = a.array
    n = t.shape[0]
    t2 = t @ t
    scale = _scale(t)
    slack = tolerance * scale**2

    def violation(x: ComplexArray) -> float:
        return float(np.linalg.norm(t @ x) ** 2 - np.linalg.norm(t2 @ x))

    gram = t.conj().T @ t
    _, eigenvectors = la.eigh((gram + gram.conj().T) / 2)
    rng = np.random.default_rng(seed)
    candidates = [
        *np.eye(n, dtype=np.complex128),
        *eigenvectors.T,
        *random_unit_vectors(rng, n, trials),
    ]
    for x in candidates:
        x = x / np.linalg.norm(x)
        if violation(x) > slack:
            return ParanormalVerdict(holds=False, witness=_as_witness(x), source="candidate")

    s = la.svdvals(t)
    top = float(s.max()) ** 2
    if top == 0.0:
        return ParanormalVerdict(holds=True)
    bottom = max(float(s.min()) ** 2, top * 1e-12)
    quartic = t2.conj().T @ t2
    identity = np.eye(n, dtype=np.complex128)
    for lam in np.geomspace(bottom, top, lambda_grid_size):
        family = quartic - 2.0 * lam * gram + lam**2 * identity
        values, vectors = la.eigh((family + family.conj().T) / 2)
        if values[0] < -tolerance * scale**4:
            x = vectors[:, 0]
            logger.debug(f"Paranormal grid criterion fails at lambda={lam:.4e}")
            return ParanormalVerdict(holds=False, witness=_as_witness(x / np.linalg.norm(x)), source="grid")
    return ParanormalVerdict(holds=True)


class SpectralEqualityReport(OracleReport):
    """Eigenvalue multisets of ``A*A`` and ``AA*``."""

    nonzero_match: bool
    full_match: bool
    kernel_dimensions_equal: bool
    max_deviation: float


def check_spectral_equalities(
    a: FiniteMatrix,
    tolerance: float = 1e-9,
    rank_cutoff: float = RANK_CUTOFF,
) -> SpectralEqualityReport:
    """Compare the spectra of ``A*A`` and ``AA*``.

    Nonzero parts must always agree; the full multisets agree when the kernels
    of ``A`` and ``A*`` have equal dimension, which holds for square ``A``.
    """
    t = a.array
    first = np.sort(la.eigvalsh(t.conj().T @ t))
    last = np.sort(la.eigvalsh(t @ t.conj().T))
    top = max(float(first.max(initial=0.0)), float(last.max(initial=0.0)))
    cutoff = rank_cutoff * top
    first_nonzero = first[first > cutoff]
    last_nonzero = last[last > cutoff]
    slack = tolerance * max(1.0, top)

    nonzero_match = first_nonzero.shape == last_nonzero.shape and bool(
        np.all(np.abs(first_nonzero - last_nonzero) <= slack),
    )
    deviation = float(np.max(np.abs(first_nonzero - last_nonzero), initial=0.0)) if nonzero_match else float("inf")
    kernel_equal = (t.shape[1] - numerical_rank(a, rank_cutoff)) == (t.shape[0] - numerical_rank(a.conj_transpose(), rank_cutoff))
    full_match = first.shape == last.shape and bool(np.all(np.abs(first - last) <= slack))
    if full_match:
        deviation = max(deviation, float(np.max(np.abs(first - last), initial=0.0)))
    return SpectralEqualityReport(
        nonzero_match=nonzero_match,
        full_match=full_match,
        kernel_dimensions_equal=kernel_equal,
        max_deviation=deviation,
    )


class KernelLemmaReport(OracleReport):
    """Kernel and pseudoinverse facts about a paranormal matrix.

    ``None`` marks a check whose hypothesis does not hold.
    """

    paranormal: bool
    kernel_powers_equal: bool | None
    kernels_symmetric: bool
    ranges_powers_equal: bool
    pinv_paranormal_from_kernels: bool | None
    pinv_paranormal_from_ranges: bool | None

    @property
    def holds(self) -> bool:
        return all(
            value is not False
            for value in (
                self.kernel_powers_equal,
                self.pinv_paranormal_from_kernels,
                self.pinv_paranormal_from_ranges,
            )
        )


def check_kernel_lemmas(
    a: FiniteMatrix,
    tolerance: float = PROJECTOR_TOLERANCE,
    lambda_grid_size: int = 64,
    trials: int = 1000,
    seed: int = 0,
) -> KernelLemmaReport:
    """For paranormal ``a``: ``N(a) = N(a^2)``, and ``a^+`` is paranormal when
    ``N(a) = N(a*)`` or ``R(a) = R(a^2)``."""
    t = a.array
    t2 = t @ t
    paranormal = is_paranormal_fd(a, lambda_grid_size, trials, seed=seed).holds
    kernels_symmetric = projector_distance(kernel_projector(t), kernel_projector(t.conj().T)) <= tolerance
    ranges_equal = projector_distance(range_projector(t), range_projector(t2)) <= tolerance

    kernel_powers_equal: bool | None = None
    from_kernels: bool | None = None
    from_ranges: bool | None = None
    if paranormal:
        kernel_powers_equal = projector_distance(kernel_projector(t), kernel_projector(t2)) <= tolerance
        if kernels_symmetric or ranges_equal:
            pinv_paranormal = is_paranormal_fd(pseudoinverse_fd(a), lambda_grid_size, trials, seed=seed).holds
            from_kernels = pinv_paranormal if kernels_symmetric else None
            from_ranges = pinv_paranormal if ranges_equal else None
    return KernelLemmaReport(
        paranormal=paranormal,
        kernel_powers_equal=kernel_powers_equal,
        kernels_symmetric=kernels_symmetric,
        ranges_powers_equal=ranges_equal,
        pinv_paranormal_from_kernels=from_kernels,
        pinv_paranormal_from_ranges=from_ranges,
    )


def random_unitary(rng: np.random.Generator, dim: int) -> ComplexArray:
    """Haar-distributed unitary from a QR factorisation."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = la.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


CandidateKind = Literal["normal", "perturbed-normal", "non-normal"]
CANDIDATE_KINDS: tuple[CandidateKind, ...] = ("normal", "perturbed-normal", "non-normal")


def candidate_matrix(
    entries: list[complex],
    kind: CandidateKind,
    rng: np.random.Generator,
    epsilon: float = 0.5,
) -> FiniteMatrix:
    """Small matrix built from diagonal entries: unitarily rotated, perturbed, or made non-normal."""
    dim = len(entries)
    u = random_unitary(rng, dim)
    diagonal = np.diag(np.asarray(entries, dtype=np.complex128))
    if kind == "perturbed-normal":
        noise = rng.standard_normal(dim) * 1e-3
        diagonal = diagonal + np.diag(noise)
    elif kind == "non-normal":
        upper = np.triu(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)), k=1)
        diagonal = diagonal + epsilon * upper
    return FiniteMatrix(u @ diagonal @ u.conj().T)


class HyponormalSearchReport(OracleReport):
    """Truncation checks plus a randomized search for paranormal, non-hyponormal matrices."""

    truncations_hyponormal: dict[int, bool]
    samples: int
    paranormal_kernel_symmetric: int
    failures: int
    counterexample: list[list[list[float]]] | None = None

    @property
    def holds(self) -> bool:
        return self.failures == 0 and all(self.truncations_hyponormal.values())


def check_hyponormal_from_paranormal_am(
    model: PositiveDiagonalModel | NormalDiagonalModel,
    trials: int = 500,
    seed: int = 0,
    sizes: tuple[int, ...] = (8, 32, 128),
    sample_dimension: int = 4,
    tolerance: float = PSD_SLACK,
    vector_trials: int = 200,
) -> HyponormalSearchReport:
    """Paranormal AM operators with ``N(T) = N(T*)`` should be hyponormal.

    The truncations of a diagonal model are diagonal, so they are checked
    directly. Then ``trials`` small matrices built from the model's first
    entries are sampled; every one that is paranormal and has ``N(A) = N(A*)``
    must be hyponormal. This is a falsification search, not a proof.

    Raises:
        NotAMError: If ``model`` is not AM.
    """
    from .classify import classify_am_normal, classify_am_positive

    if isinstance(model, PositiveDiagonalModel):
        classification = classify_am_positive(model)
    else:
        classification = classify_am_normal(model)
    if not classification.verdict.holds:
        raise NotAMError(f"The hyponormality search needs an AM operator ({classification.reason.value})")

    truncations: dict[int, bool] = {}
    for n in sizes:
        if model.dimension is not None and n > model.dimension:
            continue
        truncations[n] = is_hyponormal_fd(truncate(model, n), tolerance)

    dim = sample_dimension if model.dimension is None else min(sample_dimension, model.dimension)
    entries = [to_complex(e) for e in model.entries(dim)] if dim > 0 else []
    rng = np.random.default_rng(seed)
    qualifying = 0
    failures = 0
    counterexample = None
    for trial in range(trials if entries else 0):
        kind = CANDIDATE_KINDS[trial % len(CANDIDATE_KINDS)]
        sample = candidate_matrix(entries, kind, rng)
        t = sample.array
        if projector_distance(kernel_projector(t), kernel_projector(t.conj().T)) > PROJECTOR_TOLERANCE:
            continue
        if not is_paranormal_fd(sample, trials=vector_trials, tolerance=tolerance, seed=seed + trial).holds:
            continue
        qualifying += 1
        if not is_hyponormal_fd(sample, tolerance):
            failures += 1
            counterexample = counterexample or sample.to_pairs()
    logger.debug(f"Hyponormal search: {trials} samples, {qualifying} qualifying, {failures} failures")
    return HyponormalSearchReport(
        truncations_hyponormal=truncations,
        samples=trials if entries else 0,
        paranormal_kernel_symmetric=qualifying,
        failures=failures,
        counterexample=counterexample,
    )


class TruncationGap(OracleReport):
    """``sigma_min`` of a truncation against the exact minimum modulus."""

    n: int
    sigma_min: float
    min_modulus: float
    bound: float | None
    within_bound: bool | None


def truncation_gap(model: PositiveDiagonalModel | NormalDiagonalModel, n: int, tolerance: float = 1e-12) -> TruncationGap:
    """Compare ``sigma_min(truncate(model, n))`` with ``m(model)``.

    The gap is bounded by how far each tail's last included term is from its limit.
    """
    sigma_min = svd(truncate(model, n)).smallest
    exact = to_float(min_modulus(model))
    deviation = truncation_deviation(model, n)
    bound = None if deviation is None else to_float(deviation)
    within = None if bound is None else abs(sigma_min - exact) <= bound + tolerance * max(1.0, exact)
    return TruncationGap(n=n, sigma_min=sigma_min, min_modulus=exact, bound=bound, within_bound=within)


__all__ = [
    "EigenResult",
    "HyponormalSearchReport",
    "KernelLemmaReport",
    "MoorePenroseReport",
    "ParanormalVerdict",
    "SpectralEqualityReport",
    "SvdResult",
    "TruncationGap",
    "candidate_matrix",
    "check_hyponormal_from_paranormal_am",
    "check_kernel_lemmas",
    "check_moore_penrose",
    "check_spectral_equalities",
    "hermitian_eigen",
    "is_hyponormal_fd",
    "is_paranormal_fd",
    "kernel_projector",
    "numerical_rank",
    "projector_distance",
    "pseudoinverse_fd",
    "random_unit_vectors",
    "random_unitary",
    "range_projector",
    "svd",
    "truncation_gap",
]
