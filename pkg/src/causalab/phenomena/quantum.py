"""Two-qubit states, sigma_z x sigma_z measurements and entanglement.

Random states come from the Ginibre ensemble, ``rho = G G^† / tr(G G^†)``
with ``G`` a 4x4 matrix of standard complex normals (full rank).  The
measurement correlation of a run is ``C = mean(m_a * m_b)``, which is the
sample estimate of ``<sigma_z x sigma_z>`` and is defined even when one
side's outcomes are constant.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from ..dag import parse_dot

COLUMNS = ["state", "E", "M_A", "M_B", "C", "absC"]

# E drives both outcomes and the size of their correlation
DOMAIN_MODEL = parse_dot(
    "digraph { E -> M_A; E -> M_B; E -> absC; M_A -> absC; M_B -> absC; }"
)

SIGMA_Z = np.diag([1.0, -1.0])
ZZ = np.kron(SIGMA_Z, SIGMA_Z)

BELL_PHI_PLUS = np.outer([1, 0, 0, 1], [1, 0, 0, 1]).astype(complex) / 2


def check_density_matrix(rho, tol=1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def random_density_matrix(rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit."""
    return np.asarray(rho).reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def log_negativity(rho) -> float:
    """``log2`` of the trace norm of the partial transpose, floored at 0."""
    ev = np.linalg.eigvalsh(partial_transpose(rho))
    return max(0.0, float(np.log2(np.abs(ev).sum())))


def measure_zz(rho, shots, rng=None) -> np.ndarray:
    """Sample ``shots`` joint sigma_z outcomes as an array of ``(m_a, m_b)`` in ``{+1, -1}``.

    Basis state ``|ab>`` maps to ``(1 - 2a, 1 - 2b)``.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = np.random.default_rng(rng)
    p = np.clip(np.real(np.diag(rho)), 0.0, None)
    p = p / p.sum()
    k = rng.choice(4, size=shots, p=p)
    return np.column_stack([1 - 2 * (k >> 1), 1 - 2 * (k & 1)])


def correlation(samples) -> float:
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("no samples")
    return float(np.mean(samples[:, 0] * samples[:, 1]))


def _children(rng, n):
    if isinstance(rng, np.random.Generator):
        return rng.spawn(n)
    return [np.random.default_rng(s) for s in np.random.SeedSequence(rng).spawn(n)]


def build_entanglement_dataset(n_states, shots, rng=None, states=None) -> pd.DataFrame:
    """Simulate ``n_states`` random states with ``shots`` measurements each.

    Each state gets its own child generator, so state ``i`` is reproducible
    independently of the others.  ``states`` overrides the random draws.
    Rows are ordered by state id, then shot index.
    """
    if n_states < 1 or shots < 1:
        raise ValueError("n_states and shots must be at least 1")
    if states is not None and len(states) != n_states:
        raise ValueError("len(states) must equal n_states")
    blocks = []
    for sid, child in enumerate(_children(rng, n_states)):
        rho = random_density_matrix(child) if states is None else check_density_matrix(states[sid], tol=1e-10)
        e = log_negativity(rho)
        m = measure_zz(rho, shots, child)
        c = correlation(m)
        blocks.append(
            pd.DataFrame(
                {
                    "state": float(sid),
                    "E": e,
                    "M_A": m[:, 0].astype(float),
                    "M_B": m[:, 1].astype(float),
                    "C": c,
                    "absC": abs(c),
                }
            )
        )
    return pd.concat(blocks, ignore_index=True)[COLUMNS]
