"""
Brute-force Fock-space model of the lossy interferometer.

Three modes (a, b and one environment mode e) share a fixed photon budget N;
the basis is the simplex n_a + n_b + n_e = N in lexicographic order of
(n_a, n_b, n_e), descending in n_a then n_b. Loss is a beam splitter between
b and e with amplitude transmission lambda. Unitaries are exponentials of
explicit Hermitian generators through their eigendecomposition.
"""
import logging
import math

import numpy as np
from scipy import linalg

from app.config import settings
from app.models.errors import InvalidInputError
from app.models.schemas import JState

logger = logging.getLogger(__name__)

MODES = {"a": 0, "b": 1, "e": 2}


class FockOracle:
    """Three-mode simulator for one total photon number."""

    def __init__(self, n_total: int):
        if not 1 <= n_total <= settings.ORACLE_MAX_N:
            raise InvalidInputError(
                f"Oracle supports 1 <= N <= {settings.ORACLE_MAX_N}, got {n_total}"
            )
        self.n_total = n_total
        self.basis = [
            (na, nb, n_total - na - nb)
            for na in range(n_total, -1, -1)
            for nb in range(n_total - na, -1, -1)
        ]
        self.index = {occ: k for k, occ in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._occupations = np.array(self.basis, dtype=float)

    def hopping_generator(self, pair: tuple[str, str]) -> np.ndarray:
        """J_x of a mode pair, (u^dagger v + v^dagger u)/2, on the simplex."""
        u, v = MODES[pair[0]], MODES[pair[1]]
        gen = np.zeros((self.dim, self.dim), dtype=complex)
        for col, occ in enumerate(self.basis):
            if occ[v] == 0:
                continue
            target = list(occ)
            target[u] += 1
            target[v] -= 1
            row = self.index[tuple(target)]
            amp = 0.5 * math.sqrt((occ[u] + 1) * occ[v])
            gen[row, col] += amp
            gen[col, row] += amp
        return gen

    def beam_splitter_unitary(self, pair: tuple[str, str], theta: float) -> np.ndarray:
        """e^{-i theta J_x^{(pair)}} via eigendecomposition of the generator."""
        eigvals, eigvecs = linalg.eigh(self.hopping_generator(pair))
        return (eigvecs * np.exp(-1j * theta * eigvals)) @ eigvecs.conj().T

    def phase_unitary(self, phi: float) -> np.ndarray:
        """e^{i phi n_b}, equal to e^{-i phi J_z} on the a-b sector up to a global phase."""
        return np.diag(np.exp(1j * phi * self._occupations[:, 1]))

    def embed(self, state: JState) -> np.ndarray:
        """|j,m> -> |j+m, j-m, 0>."""
        if state.two_j != self.n_total:
            raise InvalidInputError(f"State has N = {state.two_j}, oracle N = {self.n_total}")
        vec = np.zeros(self.dim, dtype=complex)
        for p, amp in enumerate(state.amps):
            vec[self.index[(p, self.n_total - p, 0)]] = amp
        return vec

    def surviving_amplitudes(self, vec: np.ndarray) -> np.ndarray:
        """Amplitudes on n_e = 0 indexed like JState (position p = n_a)."""
        return np.array([vec[self.index[(p, self.n_total - p, 0)]] for p in range(self.n_total + 1)])

    def propagate(self, state: JState, phi: float, transmission: float) -> tuple[np.ndarray, list[float]]:
        """
        BS_+, phase, loss, BS_-.

        Returns:
            (final vector, norms after each stage).
        """
        loss_angle = 2.0 * math.acos(transmission)
        stages = [
            self.beam_splitter_unitary(("a", "b"), math.pi / 2),
            self.phase_unitary(phi),
            self.beam_splitter_unitary(("b", "e"), loss_angle),
            self.beam_splitter_unitary(("a", "b"), -math.pi / 2),
        ]
        vec = self.embed(state)
        norms = []
        for unitary in stages:
            vec = unitary @ vec
            norms.append(float(np.linalg.norm(vec)))
        return vec, norms

    def simulate_pipeline(self, state: JState, phi: float, transmission: float) -> tuple[float, float]:
        """(<P_N>, <P_N^2>) with parity on mode b restricted to n_e = 0."""
        vec, _ = self.propagate(state, phi, transmission)
        surviving = self.surviving_amplitudes(vec)
        weights = np.abs(surviving) ** 2
        signs = np.where((self.n_total - np.arange(self.n_total + 1)) % 2, -1.0, 1.0)
        return float(signs @ weights), float(weights.sum())

    def survival_matrix(self, transmission: float) -> np.ndarray:
        """<j,m| L^dagger L |j,n> at phi = 0, built column by column."""
        size = self.n_total + 1
        columns = []
        for p in range(size):
            amps = np.zeros(size, dtype=complex)
            amps[p] = 1.0
            vec, _ = self.propagate(JState(two_j=self.n_total, amps=amps), 0.0, transmission)
            columns.append(self.surviving_amplitudes(vec))
        out = np.array(columns).T
        return out.conj().T @ out


def simulate_pipeline(state: JState, phi: float, transmission: float) -> tuple[float, float]:
    """Module-level shortcut that builds a FockOracle for the state's N."""
    return FockOracle(state.two_j).simulate_pipeline(state, phi, transmission)
