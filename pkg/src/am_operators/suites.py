"""Randomized property suites with replayable counterexamples."""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from . import generators
from .classify import (
    Reason,
    SpectralDecomposition,
    Verdict,
    check_duality_am_an,
    check_restriction_lemma,
    classify_am_adjoint_transfer,
    classify_am_positive,
    compose_am_form,
    reconstruct,
    spectral_decomposition_normal,
)
from .config import Config
from .description import description_document, description_from_model
from .errors import UnknownSuiteError
from .multiplication import check_diagonal_reduction
from .operators import (
    FiniteMatrix,
    is_min_attaining,
    pseudoinverse,
    restrict,
    truncate,
)
from .oracle import (
    CANDIDATE_KINDS,
    candidate_matrix,
    check_kernel_lemmas,
    check_moore_penrose,
    check_spectral_equalities,
    is_hyponormal_fd,
    is_paranormal_fd,
    kernel_projector,
    projector_distance,
    svd,
)
from .spectra import map_spectrum_pseudoinverse, same_spectrum, spectrum_of_diagonal
from .utils.exact import exact_equal, modulus
from .utils.logger import get_logger, trial_logger

SUBSPACES_PER_MODEL = 50
RECONSTRUCTION_DEPTH = 32
TRUNCATION_SIZE = 8
SHARED_MODULUS_TERMS = 16
PARANORMAL_VECTOR_TRIALS = 200


@dataclass(frozen=True)
class Failure:
    """A failed property and the object to replay it on."""

    message: str
    subject: Any = None


TrialCheck = Callable[[np.random.Generator, Config], Failure | None]


@dataclass(frozen=True)
class Suite:
    name: str
    summary: str
    default_trials: int
    check: TrialCheck


class TrialFailure(BaseModel):
    trial: int
    message: str
    replay: dict[str, Any] | None = None


class SuiteResult(BaseModel):
    """Outcome of one suite run; identical for identical name, seed and trials."""

    name: str
    seed: int
    trials: int
    failures: list[TrialFailure] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_document(self) -> dict[str, Any]:
        document = self.model_dump(mode="json")
        document["passed"] = self.passed
        return document


def check_am_roundtrip(rng: np.random.Generator, config: Config) -> Failure | None:
    """Composed ``beta*I - K + F`` is AM with the same beta; violated models fail for the right reason."""
    if rng.random() < 0.5:
        beta, compact, finite = generators.am_triple(rng)
        model = compose_am_form(beta, compact, finite)
        result = classify_am_positive(model)
        if result.decomposition is None:
            return Failure(f"composed operator classified {result.verdict.value} ({result.reason.value})", model)
        if not exact_equal(result.decomposition.beta, beta):
            return Failure(f"recovered beta {result.decomposition.beta} instead of {beta}", model)
        return None

    model, reason = generators.violated_model(rng)
    result = classify_am_positive(model)
    if result.verdict is not Verdict.NOT_AM or result.reason is not reason:
        return Failure(f"expected NotAM/{reason.value}, got {result.verdict.value}/{result.reason.value}", model)
    if reason is Reason.INFINITELY_MANY_EIGENVALUES_ABOVE_ME:
        if result.counterexample is None:
            return Failure("no witness subspace emitted", model)
        if is_min_attaining(restrict(model.canonical(), result.counterexample)).attained:
            return Failure("witness subspace attains its minimum", model)
    return None


def check_am_duality(rng: np.random.Generator, config: Config) -> Failure | None:
    """AM iff the range is closed and the pseudoinverse is AN."""
    model = generators.positive_model(rng)
    duality = check_duality_am_an(model)
    if not duality.consistent:
        return Failure(f"inconsistent duality {duality.model_dump(mode='json')}", model)
    if duality.am.holds and not duality.range_closed:
        return Failure("AM operator without closed range", model)
    return None


def check_pseudoinverse_spectrum(rng: np.random.Generator, config: Config) -> Failure | None:
    """The spectrum of ``T^+`` is the pseudo-reciprocal image of the spectrum of ``T``."""
    model = generators.closed_range_model(rng)
    spectrum = spectrum_of_diagonal(model)
    inverse = pseudoinverse(model)
    if not same_spectrum(map_spectrum_pseudoinverse(spectrum), spectrum_of_diagonal(inverse)):
        return Failure("mapped spectrum differs from the spectrum of the pseudoinverse", model)
    if not same_spectrum(spectrum_of_diagonal(pseudoinverse(inverse)), spectrum):
        return Failure("double pseudoinverse changed the spectrum", model)
    return None


def check_moore_penrose_identities(rng: np.random.Generator, config: Config) -> Failure | None:
    rank = None
    if rng.random() < 0.3:
        rank = int(rng.integers(1, generators.MAX_MATRIX_DIMENSION))
    a = generators.complex_matrix(rng, rank=rank)
    report = check_moore_penrose(
        a,
        tolerance=config.projector_tolerance,
        rank_cutoff=config.rank_cutoff,
        psd_slack=config.psd_slack,
    )
    if not report.all_hold:
        failing = {name: value for name, value in report.residuals.items() if value > config.projector_tolerance}
        return Failure(f"Moore-Penrose identities fail: {failing}", a)
    decomposition = svd(a)
    adjoint = svd(a.conj_transpose())
    if abs(decomposition.smallest - adjoint.smallest) > 1e-10 * max(1.0, decomposition.largest):
        return Failure("m(A) differs from m(A*)", a)
    return None


def check_gram_spectra(rng: np.random.Generator, config: Config) -> Failure | None:
    """Eigenvalues of ``A*A`` and ``AA*`` agree; shifted models keep equal essential spectra."""
    dim = int(rng.integers(1, generators.MAX_MATRIX_DIMENSION + 1))
    a = generators.complex_matrix(rng, dim, dim)
    equalities = check_spectral_equalities(a, rank_cutoff=config.rank_cutoff)
    if not (equalities.nonzero_match and equalities.full_match):
        return Failure(f"Gram eigenvalues differ by {equalities.max_deviation:.3e}", a)
    model = generators.shifted_model(rng)
    transfer = classify_am_adjoint_transfer(model)
    if not transfer.ess_equal:
        return Failure("essential spectra of T*T and TT* differ", model)
    if not transfer.consistent:
        return Failure("equal essential spectra but different AM verdicts for T and T*", model)
    return None


def _loose_shared_modulus(decomposition: SpectralDecomposition) -> str | None:
    """A modulus left on two tail families instead of in one block, within the first terms."""
    families = decomposition.tail_families
    for i, family in enumerate(families):
        for other in families[i + 1 :]:
            for n in range(family.rule.start_index, family.rule.start_index + SHARED_MODULUS_TERMS):
                if n in family.absorbed:
                    continue
                m = other.rule.index_of(family.rule.term(n))
                if m is not None and m not in other.absorbed:
                    return f"tails {family.tail_id} and {other.tail_id} share the modulus {family.rule.term(n)} outside a block"
    return None


def check_spectral_decomposition(rng: np.random.Generator, config: Config) -> Failure | None:
    """``T = ⊕ beta U_beta`` reproduces the model exactly."""
    model = generators.normal_am_model(rng)
    decomposition = spectral_decomposition_normal(model)
    for block in decomposition.blocks:
        for member in block.members:
            if member.source == "cell":
                value = model.cells[member.index].value
            elif member.term is None:
                return Failure(f"tail member {member.index} of block {block.beta} has no term index", model)
            else:
                value = model.tails[member.index].term(member.term)
            if not exact_equal(modulus(value), block.beta):
                return Failure(f"block {block.beta} holds an entry of modulus {modulus(value)}", model)
    loose = _loose_shared_modulus(decomposition)
    if loose is not None:
        return Failure(loose, model)
    rebuilt = reconstruct(decomposition)
    pairs = zip(rebuilt.entries(RECONSTRUCTION_DEPTH), model.entries(RECONSTRUCTION_DEPTH), strict=True)
    if not all(exact_equal(left, right) for left, right in pairs):
        return Failure("reconstruction differs from the model", model)
    gap = np.max(np.abs(truncate(rebuilt, TRUNCATION_SIZE).array - truncate(model, TRUNCATION_SIZE).array))
    if gap != 0.0:
        return Failure(f"truncated reconstruction differs by {gap:.3e}", model)
    return None


def check_multiplication(rng: np.random.Generator, config: Config) -> Failure | None:
    model = generators.measure_model(rng)
    check = check_diagonal_reduction(model)
    if not check.holds:
        return Failure(f"measure-space criteria disagree with the diagonal reduction: {check.model_dump()}", model)
    return None


def _truncated_shift(dim: int = 3) -> FiniteMatrix:
    return FiniteMatrix(np.eye(dim, k=-1, dtype=np.complex128))


def check_paranormal(rng: np.random.Generator, config: Config) -> Failure | None:
    """Hyponormal implies paranormal; paranormal implies ``N(T) = N(T^2)``; the search finds no counterexample."""
    if is_paranormal_fd(_truncated_shift(), trials=0).holds:
        return Failure("truncated shift passed the paranormal test", _truncated_shift())

    dim = int(rng.integers(2, 5))
    entries = list(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    kind = CANDIDATE_KINDS[int(rng.integers(len(CANDIDATE_KINDS)))]
    sample = candidate_matrix(entries, kind, rng)
    seed = int(rng.integers(2**31))
    hyponormal = is_hyponormal_fd(sample, config.psd_slack)
    paranormal = is_paranormal_fd(
        sample,
        lambda_grid_size=config.paranormal_grid_size,
        trials=PARANORMAL_VECTOR_TRIALS,
        tolerance=config.psd_slack,
        seed=seed,
    ).holds
    if hyponormal and not paranormal:
        return Failure("hyponormal matrix is not paranormal", sample)
    if paranormal:
        lemmas = check_kernel_lemmas(
            sample,
            tolerance=config.projector_tolerance,
            lambda_grid_size=config.paranormal_grid_size,
            trials=PARANORMAL_VECTOR_TRIALS,
            seed=seed,
        )
        if lemmas.kernel_powers_equal is False:
            return Failure("paranormal matrix with N(T) != N(T^2)", sample)
        t = sample.array
        symmetric = projector_distance(kernel_projector(t), kernel_projector(t.conj().T)) <= config.projector_tolerance
        if symmetric and not hyponormal:
            return Failure("paranormal matrix with N(T) = N(T*) that is not hyponormal", sample)
    return None


def check_restriction(rng: np.random.Generator, config: Config) -> Failure | None:
    """AM models attain their minimum on coordinate subspaces; NotAM witnesses do not."""
    model = generators.positive_model(rng)
    lemma = check_restriction_lemma(model)
    if not lemma.holds:
        return Failure("support restriction changed the essential or nonzero discrete spectrum", model)
    result = classify_am_positive(model)
    if result.verdict is Verdict.AM:
        for _ in range(SUBSPACES_PER_MODEL):
            subspace = generators.coordinate_subspace(rng, model)
            if not is_min_attaining(restrict(model, subspace)).attained:
                return Failure(f"AM operator fails to attain its minimum on {subspace.model_dump()}", model)
    elif result.reason is Reason.INFINITELY_MANY_EIGENVALUES_ABOVE_ME and result.counterexample is not None:
        if is_min_attaining(restrict(model.canonical(), result.counterexample)).attained:
            return Failure("NotAM witness subspace attains its minimum", model)
    return None


SUITES: dict[str, Suite] = {
    suite.name: suite
    for suite in (
        Suite("am-roundtrip", "beta*I - K + F round trip and NotAM reasons", 1000, check_am_roundtrip),
        Suite("am-duality", "AM iff closed range and AN pseudoinverse", 1000, check_am_duality),
        Suite("pseudoinverse-spectrum", "spectral mapping under the pseudoinverse", 500, check_pseudoinverse_spectrum),
        Suite("moore-penrose", "Moore-Penrose identities on random matrices", 200, check_moore_penrose_identities),
        Suite("gram-spectra", "spectra of T*T and TT*", 200, check_gram_spectra),
        Suite("spectral-decomposition", "normal AM spectral decomposition round trip", 500, check_spectral_decomposition),
        Suite("multiplication", "multiplication operators against their diagonal reduction", 500, check_multiplication),
        Suite("paranormal", "hyponormal, paranormal and kernel properties", 500, check_paranormal),
        Suite("restriction", "minimum attainment on coordinate subspaces", 200, check_restriction),
    )
}


class SuiteRunner:
    """Runs property suites, optionally on a thread pool.

    Trial ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``, so
    results do not depend on how trials are scheduled.
    """

    def __init__(self, config: Config | None = None):
        self.config = config or Config.from_env()
        self.logger = get_logger(__name__)

    def _trial(self, suite: Suite, index: int, seed: np.random.SeedSequence) -> TrialFailure | None:
        rng = np.random.default_rng(seed)
        log = trial_logger(suite.name, index)
        try:
            failure = suite.check(rng, self.config)
        except Exception as e:
            log.warning(f"{suite.name} trial {index} raised {type(e).__name__}: {e}")
            return TrialFailure(trial=index, message=f"{type(e).__name__}: {e}")
        if failure is None:
            return None
        replay = None
        if failure.subject is not None:
            try:
                replay = description_document(
                    description_from_model(failure.subject, name=f"{suite.name}-trial-{index}", notes=failure.message),
                )
            except Exception as e:
                log.warning(f"Cannot dump counterexample for trial {index}: {e}")
        return TrialFailure(trial=index, message=failure.message, replay=replay)

    def run(self, name: str, seed: int | None = None, trials: int | None = None, workers: int | None = None) -> SuiteResult:
        """Run a suite by name.

        Raises:
            UnknownSuiteError: If no suite has that name
        """
        if name not in SUITES:
            raise UnknownSuiteError(f"Unknown suite '{name}'; available: {', '.join(SUITES)}")
        suite = SUITES[name]
        seed = self.config.default_seed if seed is None else seed
        trials = suite.default_trials if trials is None else trials
        workers = workers or self.config.workers
        children = np.random.SeedSequence(seed).spawn(trials)

        self.logger.info(f"Running suite {name}: {trials} trials, seed {seed}, {workers} workers")
        if workers == 1:
            outcomes = [self._trial(suite, i, child) for i, child in enumerate(children)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda item: self._trial(suite, *item), enumerate(children)))

        failures = [outcome for outcome in outcomes if outcome is not None]
        if failures:
            self.logger.warning(f"Suite {name}: {len(failures)} of {trials} trials failed")
        return SuiteResult(name=name, seed=seed, trials=trials, failures=failures)


def run_suite(name: str, seed: int | None = None, trials: int | None = None, config: Config | None = None) -> SuiteResult:
    """Run a suite with a fresh runner."""
    return SuiteRunner(config).run(name, seed, trials)


def list_suites() -> list[tuple[str, str]]:
    return [(suite.name, suite.summary) for suite in SUITES.values()]
