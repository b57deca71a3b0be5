"""Exact recovery of separated real signals with unobserved frequencies.

A real signal f on Z_N^d is transmitted as its spectrum, with the
coefficients on a hidden set S withheld.  When the values of f are
delta-separated and ||f||_(2d/k) < delta / (2 sqrt(C_size)), where
|S| = C_size * N^k, the signal is the unique feasible delta-separated
candidate, and it is recovered by minimizing the L^(2d/k) norm over all
real signals whose spectrum matches the observed coefficients.

The minimizer is computed by first-order descent over the free hidden
coefficients; real-valuedness is enforced structurally by optimizing one
(re, im) pair per negation orbit of the hidden set.  When a value
alphabet is declared, the alphabet-valued feasible signals are enumerated
exactly through the same parameterization and the minimal-norm separated
one is returned, with nearest-value rounding of the descent output as the
out-of-budget fallback.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EnumerationBudgetExceeded, RecoveryError
from .fourier import FreqSet, Signal, Spectrum, forward, inverse
from .inequalities import lp_norm
from .lattice import GridShape, all_coords, decode, negate_indices
from .rng import as_generator

#: Feasibility tolerance: a reconstruction must match the observed
#: spectrum off the hidden set to within this much, entrywise.
FEASIBILITY_TOL = 1e-7

#: Two floating values are considered the same signal level below this.
VALUE_EQ_TOL = 1e-9


def mask_spectrum(F: Spectrum, S: FreqSet) -> Spectrum:
    """Zero out the entries of F on S, modeling unobserved frequencies."""
    values = F.values.copy()
    values[S.members] = 0.0
    return Spectrum(F.shape, values)


def uniqueness_certificate(norm: float, delta: float, c_size: float) -> bool:
    """True iff norm < delta / (2 sqrt(c_size)), strictly.

    This is the contrapositive of the chain
    delta <= ||h||_inf <= 2 * ||f||_(2d/k) * sqrt(C_size)
    applied to the difference h of two feasible separated candidates.
    """
    if norm < 0 or delta < 0 or c_size < 0:
        raise ValueError("certificate inputs must be non-negative")
    return norm < delta / (2.0 * math.sqrt(c_size))


def separation_check(f: Signal, delta: float) -> bool:
    """True iff distinct values of f differ by at least delta and f is not constant.

    Requires f real-valued; values within VALUE_EQ_TOL of each other count
    as the same level.
    """
    if float(np.abs(f.values.imag).max(initial=0.0)) >= 1e-9:
        raise ValueError("separation check requires a real-valued signal")
    vals = np.sort(f.values.real)
    gaps = np.diff(vals)
    distinct = gaps[gaps > VALUE_EQ_TOL]
    if distinct.size == 0:
        return False  # constant signals are excluded
    return bool(distinct.min() >= delta - 1e-12)


@dataclass(frozen=True)
class RecoveryProblem:
    """Observed spectrum with a hidden set, plus the norm exponent and separation.

    hidden is symmetrized (S union -S) on construction so that real
    candidates exist; observed is zeroed on hidden and must be
    conjugate-symmetric elsewhere.  c_size is derived: with k = 2d/p,
    c_size = |hidden| / N^k.
    """

    shape: GridShape
    observed: Spectrum
    hidden: FreqSet
    p: float
    delta: float

    def __post_init__(self):
        if self.p == math.inf or self.p < 1:
            raise ValueError(f"norm exponent must be finite and >= 1, got {self.p}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.hidden.size == 0:
            raise ValueError("hidden set must be non-empty")
        sym = self.hidden.symmetrized()
        if sym.size != self.hidden.size:
            warnings.warn(
                f"hidden set symmetrized: |S| grew {self.hidden.size} -> {sym.size}",
                stacklevel=2,
            )
            object.__setattr__(self, "hidden", sym)
        object.__setattr__(
            self, "observed", mask_spectrum(self.observed, self.hidden)
        )
        _check_conjugate_symmetry(self.observed, self.hidden)

    @property
    def k(self) -> float:
        return 2.0 * self.shape.dim / self.p

    @property
    def c_size(self) -> float:
        # |hidden| = c_size * N^k with k = 2d/p, so that the support-size
        # coefficient sqrt(|S| / N^(2d/p)) is exactly sqrt(c_size)
        return self.hidden.size / self.shape.modulus**self.k

    @property
    def threshold(self) -> float:
        """Norm level below which recovery is provably unique."""
        return self.delta / (2.0 * math.sqrt(self.c_size))


def _check_conjugate_symmetry(F: Spectrum, hidden: FreqSet) -> None:
    neg = negate_indices(np.arange(F.shape.size), F.shape)
    known = ~hidden.mask()
    diff = F.values[known] - np.conj(F.values[neg][known])
    scale = max(1.0, float(np.abs(F.values).max(initial=0.0)))
    if diff.size and float(np.abs(diff).max()) > 1e-9 * scale:
        raise ValueError(
            "observed spectrum is not conjugate-symmetric off the hidden "
            "set; no real-valued signal can produce it"
        )


@dataclass(frozen=True)
class UniquenessCertificate:
    threshold: float
    norm_at_solution: float
    unique: bool


@dataclass(frozen=True)
class RecoveryResult:
    signal: Signal
    objective: float
    certificate: UniquenessCertificate
    iterations: int
    converged: bool
    snapped: bool


def _negation_orbits(problem: RecoveryProblem) -> list[tuple[int, int]]:
    """Hidden indices grouped as (m, -m) pairs; self-paired appear as (m, m)."""
    members = problem.hidden.members
    neg = negate_indices(members, problem.shape)
    orbits = []
    seen: set[int] = set()
    for m, mm in zip(members.tolist(), neg.tolist()):
        if m in seen:
            continue
        seen.add(m)
        seen.add(mm)
        orbits.append((m, mm))
    return orbits


def reconstruction_basis(problem: RecoveryProblem) -> tuple[np.ndarray, np.ndarray]:
    """Affine parameterization of the feasible real signals.

    Returns (g0, B): g0 is the minimum-energy completion (hidden
    coefficients zero) and the columns of B span the real signals whose
    spectra live on the hidden set, so every feasible candidate is
    exactly g0 + B @ v.  One self-paired frequency contributes one column
    (real coefficient); a (m, -m) pair contributes a cosine and a sine
    column for the shared (re, im) coefficient.
    """
    shape = problem.shape
    root = shape.size**-0.5
    coords = all_coords(shape)
    cols = []
    for m, mm in _negation_orbits(problem):
        angles = 2.0 * np.pi * (coords @ np.array(decode(m, shape)) % shape.modulus) / shape.modulus
        if m == mm:
            cols.append(np.cos(angles) * root)
        else:
            cols.append(2.0 * np.cos(angles) * root)
            cols.append(-2.0 * np.sin(angles) * root)
    B = np.stack(cols, axis=1)
    g0 = inverse(problem.observed).values.real
    return g0, B


def free_parameter_count(problem: RecoveryProblem) -> int:
    return sum(1 if m == mm else 2 for m, mm in _negation_orbits(problem))


def signal_from_parameters(problem: RecoveryProblem, v: np.ndarray) -> Signal:
    g0, B = reconstruction_basis(problem)
    return Signal(problem.shape, g0 + B @ np.asarray(v, dtype=float))


def objective_and_gradient(
    problem: RecoveryProblem, v: np.ndarray
) -> tuple[float, np.ndarray]:
    """sum_x |g(x)|^p and its gradient in the free hidden coefficients."""
    g0, B = reconstruction_basis(problem)
    return _objective_and_gradient(g0, B, np.asarray(v, dtype=float), problem.p)


def _objective_and_gradient(g0, B, v, p):
    g = g0 + B @ v
    a = np.abs(g)
    obj = float(np.sum(a**p))
    grad = B.T @ (p * np.sign(g) * a ** (p - 1.0))
    return obj, grad


def recover(
    problem: RecoveryProblem,
    tol: float = 1e-8,
    max_iters: int = 50_000,
    alphabet: Sequence[float] | None = None,
) -> RecoveryResult:
    """Minimize ||g||_p over real signals matching the observed spectrum.

    Feasibility is structural (free hidden coefficients, everything else
    pinned), so every iterate matches the observed spectrum exactly.  For
    p > 1 the objective is differentiable and plain descent with Armijo
    backtracking is used; p = 1 falls back to subgradient steps with a
    diminishing schedule and no convergence guarantee.

    With an alphabet, the feasible alphabet-valued signals are enumerated
    exactly through the parameterization (see :func:`alphabet_candidates`)
    and the minimal-norm value-separated one is returned; this decodes
    correctly whenever the instance determines the signal at all.  When
    that enumeration is out of budget, the descent output is rounded to
    the nearest alphabet values instead, and the rounded signal replaces
    the raw minimizer only if it reproduces the observed spectrum; note
    rounding alone can mis-decode when the continuous minimizer sits more
    than half a level away from the transmitted signal.
    """
    if problem.hidden.size == problem.shape.size:
        raise RecoveryError(
            "every frequency is hidden; the constraints carry no information"
        )
    g0, B = reconstruction_basis(problem)
    p = problem.p
    v = np.zeros(B.shape[1])
    obj, grad = _objective_and_gradient(g0, B, v, p)

    converged = False
    iters = 0
    if p > 1:
        step = 1.0
        for iters in range(1, max_iters + 1):
            gn = float(np.linalg.norm(grad))
            if gn <= tol * max(1.0, obj):
                converged = True
                break
            t = step
            accepted = False
            for _ in range(60):
                v_new = v - t * grad
                obj_new, grad_new = _objective_and_gradient(g0, B, v_new, p)
                if obj_new <= obj - 1e-4 * t * gn * gn:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break  # step collapsed below float resolution
            v, obj, grad = v_new, obj_new, grad_new
            step = min(2.0 * t, 1e6)
    else:
        best_v, best_obj = v.copy(), obj
        for iters in range(1, max_iters + 1):
            gn = float(np.linalg.norm(grad))
            if gn <= tol * max(1.0, obj):
                converged = True
                break
            v = v - (1.0 / math.sqrt(iters)) * grad / max(gn, 1e-30)
            obj, grad = _objective_and_gradient(g0, B, v, p)
            if obj < best_obj:
                best_v, best_obj = v.copy(), obj
        v, obj = best_v, best_obj

    raw = g0 + B @ v
    signal = Signal(problem.shape, raw)
    snapped = False
    if alphabet is not None:
        candidates = alphabet_candidates(problem, alphabet)
        if candidates:
            separated = [c for c in candidates if separation_check(c, problem.delta)]
            pool = separated or candidates
            signal = min(pool, key=lambda c: lp_norm(c, p))
            snapped = True
        else:
            levels = np.asarray(sorted(alphabet), dtype=float)
            rounded = levels[
                np.argmin(np.abs(raw[:, None] - levels[None, :]), axis=1)
            ]
            candidate = Signal(problem.shape, rounded)
            if feasibility_error(problem, candidate) <= FEASIBILITY_TOL:
                signal = candidate
                snapped = True

    norm = lp_norm(signal, p)
    cert = UniquenessCertificate(
        threshold=problem.threshold,
        norm_at_solution=norm,
        unique=uniqueness_certificate(norm, problem.delta, problem.c_size),
    )
    return RecoveryResult(
        signal=signal,
        objective=norm,
        certificate=cert,
        iterations=iters,
        converged=converged,
        snapped=snapped,
    )


def feasibility_error(problem: RecoveryProblem, candidate: Signal) -> float:
    """Largest deviation of the candidate's spectrum from the observed one."""
    diff = forward(candidate).values - problem.observed.values
    diff[problem.hidden.members] = 0.0
    return float(np.abs(diff).max(initial=0.0))


def _pivot_rows(B: np.ndarray) -> np.ndarray:
    """Indices of t well-conditioned rows spanning the row space of B."""
    n, t = B.shape
    rows: list[int] = []
    basis = np.zeros((0, t))
    residual = B.copy()
    for _ in range(t):
        norms = np.linalg.norm(residual, axis=1)
        pick = int(np.argmax(norms))
        if norms[pick] < 1e-12:
            raise np.linalg.LinAlgError("parameterization basis is rank-deficient")
        rows.append(pick)
        q = residual[pick] / norms[pick]
        basis = np.vstack([basis, q])
        residual = residual - np.outer(residual @ q, q)
    return np.array(sorted(rows))


def alphabet_candidates(
    problem: RecoveryProblem,
    alphabet: Sequence[float],
    limit: int = 4096,
    value_tol: float = 1e-6,
) -> list[Signal] | None:
    """All alphabet-valued signals consistent with the observed spectrum.

    Every feasible real signal is g0 + B v for the affine parameterization,
    and v is pinned by the signal's values on t independent coordinates, so
    running over the |alphabet|^t assignments of levels to those
    coordinates enumerates every alphabet-valued feasible signal exactly.
    Returns None when |alphabet|^t exceeds `limit` (callers fall back to
    rounding).  This stays far cheaper than enumerating all |alphabet|^(N^d)
    signals and never inspects more than the hidden coefficients.
    """
    levels = np.asarray(sorted(set(float(a) for a in alphabet)))
    g0, B = reconstruction_basis(problem)
    t = B.shape[1]
    if len(levels) ** t > limit:
        return None
    rows = _pivot_rows(B)
    B_sub = B[rows]
    found: list[Signal] = []
    seen: set[tuple] = set()
    for combo in itertools.product(levels.tolist(), repeat=t):
        v = np.linalg.solve(B_sub, np.asarray(combo) - g0[rows])
        g = g0 + B @ v
        snapped = levels[np.argmin(np.abs(g[:, None] - levels[None, :]), axis=1)]
        if float(np.abs(g - snapped).max()) > value_tol:
            continue
        key = tuple(snapped.tolist())
        if key in seen:
            continue
        candidate = Signal(problem.shape, snapped)
        if feasibility_error(problem, candidate) <= FEASIBILITY_TOL:
            seen.add(key)
            found.append(candidate)
    return found


@dataclass(frozen=True)
class BruteForceResult:
    signal: Signal
    objective: float
    feasible_count: int
    ambiguous: bool
    runner_up_gap: float | None


def brute_force_recover(
    problem: RecoveryProblem,
    value_alphabet: Sequence[float],
    match_tol: float = 1e-8,
    budget: int = 10_000_000,
) -> BruteForceResult:
    """Enumerate every alphabet-valued signal and keep the feasible minimum.

    Independent of :func:`recover`: feasibility is checked against the
    observed spectrum with an explicitly built character-sum transform
    matrix.  Ambiguity is reported when a second feasible signal comes
    within 1e-9 of the minimal norm.
    """
    shape = problem.shape
    levels = sorted(set(float(a) for a in value_alphabet))
    count = len(levels) ** shape.size
    if count > budget:
        raise EnumerationBudgetExceeded(
            f"{len(levels)}^{shape.size} = {count} candidates exceed the "
            f"budget of {budget}"
        )
    coords = all_coords(shape)
    dots = (coords @ coords.T) % shape.modulus
    W = np.exp(-2j * np.pi * dots / shape.modulus) * shape.size**-0.5

    known = ~problem.hidden.mask()
    obs_known = problem.observed.values[known]
    Wk = W[known, :]

    best: tuple[float, np.ndarray] | None = None
    second: float | None = None
    feasible = 0
    chunk = 1 << 14
    batch: list[Sequence[float]] = []

    def flush(batch_rows):
        nonlocal best, second, feasible
        arr = np.asarray(batch_rows, dtype=float)
        spectra = arr @ Wk.T
        err = np.abs(spectra - obs_known[None, :]).max(axis=1)
        for row in np.nonzero(err <= match_tol)[0]:
            feasible += 1
            norm = lp_norm(arr[row], problem.p)
            if best is None or norm < best[0] - 1e-15:
                second = None if best is None else best[0]
                best = (norm, arr[row].copy())
            elif second is None or norm < second:
                second = norm

    for values in itertools.product(levels, repeat=shape.size):
        batch.append(values)
        if len(batch) >= chunk:
            flush(batch)
            batch = []
    if batch:
        flush(batch)

    if best is None:
        raise RecoveryError("no alphabet-valued signal matches the observed spectrum")
    norm, values = best
    ambiguous = second is not None and (second - norm) <= 1e-9
    return BruteForceResult(
        signal=Signal(shape, values),
        objective=norm,
        feasible_count=feasible,
        ambiguous=ambiguous,
        runner_up_gap=None if second is None else second - norm,
    )


def symmetric_hidden_set(shape: GridShape, size: int, seed) -> FreqSet:
    """A random negation-closed frequency set with exactly `size` elements."""
    rng = as_generator(seed)
    indices = np.arange(shape.size)
    neg = negate_indices(indices, shape)
    fixed = indices[neg == indices]
    pair_lo = indices[indices < neg]
    choices = []
    for pairs in range(size // 2 + 1):
        singles = size - 2 * pairs
        if singles <= fixed.size and pairs <= pair_lo.size:
            choices.append((pairs, singles))
    if not choices:
        raise ValueError(f"no negation-closed set of size {size} exists on {shape}")
    pairs, singles = choices[rng.integers(len(choices))]
    members = []
    if pairs:
        lo = rng.choice(pair_lo, size=pairs, replace=False)
        members.extend(lo.tolist())
        members.extend(negate_indices(lo, shape).tolist())
    if singles:
        members.extend(rng.choice(fixed, size=singles, replace=False).tolist())
    return FreqSet.from_indices(shape, members)


def random_instance(
    shape: GridShape,
    hidden_size: int,
    seed,
    alphabet: Sequence[float] = (0.0, 1.0),
    delta: float | None = None,
    p_grid: Sequence[float] = (2.5, 2.25, 2.0, 1.9, 1.75, 1.5, 1.4, 1.3, 1.25, 1.1),
    max_tries: int = 2000,
    well_posed: bool = True,
) -> tuple[RecoveryProblem, Signal]:
    """A random alphabet-valued instance satisfying the uniqueness threshold.

    Draws a separated non-constant alphabet signal and a symmetric hidden
    set, then picks the largest exponent from p_grid for which
    ||truth||_p < delta / (2 sqrt(c_size)); combinations admitting no such
    exponent are rejected and redrawn.

    The threshold guarantees uniqueness of the separated candidate only in
    the p >= 2 regime of the sup-norm bound; for the exponents below 2
    that small grids force, a threshold-satisfying instance can still
    admit two feasible alphabet signals.  With well_posed=True (default)
    such draws are rejected by enumerating the feasible alphabet signals,
    so the returned instance always determines its truth.
    """
    rng = as_generator(seed)
    levels = np.asarray(sorted(set(float(a) for a in alphabet)))
    if levels.size < 2:
        raise ValueError("alphabet must contain at least two values")
    if delta is None:
        delta = float(np.diff(levels).min())
    for _ in range(max_tries):
        values = levels[rng.integers(levels.size, size=shape.size)]
        truth = Signal(shape, values)
        if not separation_check(truth, delta):
            continue
        hidden = symmetric_hidden_set(shape, hidden_size, rng)
        observed = mask_spectrum(forward(truth), hidden)
        for p in p_grid:
            k = 2.0 * shape.dim / p
            c_size = hidden.size / shape.modulus**k
            if lp_norm(truth, p) < delta / (2.0 * math.sqrt(c_size)):
                problem = RecoveryProblem(
                    shape=shape, observed=observed, hidden=hidden, p=p, delta=delta
                )
                if well_posed:
                    candidates = alphabet_candidates(problem, levels)
                    if candidates is not None and len(candidates) != 1:
                        break  # ambiguous draw; redraw signal and set
                return problem, truth
    raise RecoveryError(
        f"no instance satisfying the uniqueness threshold found in "
        f"{max_tries} draws (grid {shape}, hidden size {hidden_size})"
    )
