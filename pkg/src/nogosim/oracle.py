"""Brute-force reference paths for the two-step measurement process.

The enumeration path builds every outcome projector as an explicit outer
product, collapses the joint state by matrix-vector products, and forms the
Bayesian ratios from traces; it shares nothing with the formula path above
the eigensolver, so agreement between the two is a real cross-check. The
sampler draws projective outcomes and postselection accept/reject decisions
from a seeded PCG64 generator (identical seed, identical stream on every
platform) and reports raw counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroProbability
from .linalg import TOL_POSTSELECT, outer, readonly, spectral_decompose, tensor_ket, tensor_product
from .measurement import MeasurementScenario, _require_postselect


def _term_product_vectors(sys_op: np.ndarray, dev_op: np.ndarray) -> tuple[np.ndarray, list[list[np.ndarray]]]:
    """Factor eigenvalue grid and product eigenvectors, straight from the factors."""
    sys_dec = spectral_decompose(sys_op)
    dev_dec = spectral_decompose(dev_op)
    grid = np.outer(sys_dec.eigenvalues, dev_dec.eigenvalues)
    vectors = [
        [tensor_ket(sys_dec.eigenvectors[:, i], dev_dec.eigenvectors[:, j]) for j in range(dev_dec.dim)]
        for i in range(sys_dec.dim)
    ]
    return grid, vectors


@dataclass(frozen=True)
class EnumerationResult:
    """Joint and conditional probabilities per outcome (k, i, j)."""

    joint: np.ndarray
    conditional: np.ndarray
    denominators: np.ndarray
    values: np.ndarray

    def conditional_expectation(self, k: int) -> float:
        return float(np.sum(self.values[k] * self.conditional[k]))


def enumerate_two_step(scenario: MeasurementScenario, tol_p: float = TOL_POSTSELECT) -> EnumerationResult:
    """Collapse-then-postselect enumeration over every outcome of every term."""
    phi = _require_postselect(scenario)
    n, m = scenario.n, scenario.m
    psi_joint = scenario.joint_state()
    rho = np.outer(psi_joint, psi_joint.conj())
    pi = tensor_product(outer(phi), np.eye(m))

    num_terms = scenario.observable.num_terms
    joint = np.zeros((num_terms, n, m))
    values = np.zeros((num_terms, n, m))
    for k, (sys_op, dev_op) in enumerate(scenario.observable.terms):
        grid, vectors = _term_product_vectors(sys_op, dev_op)
        values[k] = grid
        for i in range(n):
            for j in range(m):
                proj = outer(vectors[i][j])
                collapsed = proj @ rho @ proj
                joint[k, i, j] = float(np.trace(pi @ collapsed).real)

    denominators = joint.sum(axis=(1, 2))
    if np.all(denominators <= tol_p):
        raise ZeroProbability("postselection is incompatible with every outcome of every term")
    conditional = np.zeros_like(joint)
    for k in range(num_terms):
        if denominators[k] <= tol_p:
            raise ZeroProbability(f"postselection probability vanishes for term {k}")
        conditional[k] = joint[k] / denominators[k]

    return EnumerationResult(
        joint=readonly(joint),
        conditional=readonly(conditional),
        denominators=readonly(denominators),
        values=readonly(values),
    )


@dataclass(frozen=True)
class SamplingResult:
    """Counts of postselection-accepted outcomes for one term."""

    seed: int
    shots: int
    counts: np.ndarray
    accepted: int

    def frequencies(self) -> np.ndarray:
        if self.accepted == 0:
            return np.zeros_like(self.counts, dtype=float)
        return self.counts / self.accepted

    def conditional_expectation(self, values: np.ndarray) -> float:
        return float(np.sum(np.asarray(values) * self.frequencies()))


def sample_two_step(
    scenario: MeasurementScenario,
    shots: int,
    seed: int,
    term: int = 0,
    shards: int = 1,
) -> SamplingResult:
    """Monte Carlo draw of the projective outcome followed by postselection.

    Shard s uses the generator seeded by (seed, s), so shard results are
    independent and the merge is a plain sum. Identical arguments reproduce
    identical counts.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if shards < 1 or shards > shots:
        raise ValueError("shards must be in [1, shots]")
    phi = _require_postselect(scenario)
    n, m = scenario.n, scenario.m
    psi_joint = scenario.joint_state()
    pi = tensor_product(outer(phi), np.eye(m))

    sys_op, dev_op = scenario.observable.terms[term]
    _, vectors = _term_product_vectors(sys_op, dev_op)
    outcome_probs = np.zeros(n * m)
    accept_probs = np.zeros(n * m)
    for i in range(n):
        for j in range(m):
            collapsed = outer(vectors[i][j]) @ psi_joint
            p = float(np.vdot(collapsed, collapsed).real)
            outcome_probs[i * m + j] = p
            if p > 0.0:
                accept_probs[i * m + j] = float(np.vdot(collapsed, pi @ collapsed).real) / p
    outcome_probs = np.clip(outcome_probs, 0.0, None)
    outcome_probs /= outcome_probs.sum()
    accept_probs = np.clip(accept_probs, 0.0, 1.0)

    counts = np.zeros(n * m, dtype=np.int64)
    base = shots // shards
    sizes = [base + (1 if s < shots % shards else 0) for s in range(shards)]
    for shard_index, size in enumerate(sizes):
        if size == 0:
            continue
        rng = np.random.default_rng((int(seed), shard_index))
        drawn = rng.choice(n * m, size=size, p=outcome_probs)
        accepted_mask = rng.random(size) < accept_probs[drawn]
        counts += np.bincount(drawn[accepted_mask], minlength=n * m)

    return SamplingResult(
        seed=int(seed),
        shots=int(shots),
        counts=readonly(counts.reshape(n, m)),
        accepted=int(counts.sum()),
    )
