"""Linear-optical elements acting on Fock kets.

An element is a unitary matrix on a small set of modes.  It acts on a ket
through the creation-operator substitution a_k^dag -> sum_j M[j,k] a_j^dag,
expanded multinomially with exact integer factorials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockKet, ModeRegister

MAX_FACTORIAL_CUTOFF = 20


@dataclass(frozen=True)
class ModeUnitary:
    """Complex unitary on ``size`` modes (every built-in element has size 2)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("mode unitary must be a square matrix")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if dev > 1e-12:
            raise ValueError(f"matrix is not unitary (max deviation {dev:.3g})")
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self.matrix.conj().T)


def balanced_bs() -> ModeUnitary:
    """50/50 beam splitter: (1/sqrt2) [[1, 1], [1, -1]]."""
    return ModeUnitary(np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0))


def unbalanced_bs(eps: float) -> ModeUnitary:
    """Almost-transparent beam splitter (1/sqrt(1+eps^2)) [[1, eps], [eps, -1]]."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"unbalanced beam splitter needs 0 < eps < 1, got {eps}")
    r = 1.0 / math.sqrt(1.0 + eps * eps)
    return ModeUnitary(r * np.array([[1.0, eps], [eps, -1.0]]))


def polarization_rotation(eps: float) -> ModeUnitary:
    """Rotate an (H, V) mode pair: a_H^dag -> (a_H^dag + eps a_V^dag)/sqrt(1+eps^2)."""
    if eps < 0.0:
        raise ValueError(f"rotation parameter must be >= 0, got {eps}")
    r = 1.0 / math.sqrt(1.0 + eps * eps)
    return ModeUnitary(r * np.array([[1.0, -eps], [eps, 1.0]]))


def pbs(beam_in: tuple[str, str], beam_out: tuple[str, str]) -> dict[str, str]:
    """Polarizing beam splitter as a mode relabeling.

    The H mode of the input beam routes to the first output label, the V mode
    to the second.  Phase convention: pure relabeling, no extra phase on
    either output (any convention differing by local phases is equivalent for
    the schemes here).
    """
    h_in, v_in = beam_in
    h_out, v_out = beam_out
    labels = (h_in, v_in, h_out, v_out)
    if len(set(labels)) != 4:
        raise ValueError(f"pbs labels must be distinct: {labels}")
    return {h_in: h_out, v_in: v_out}


def _poly_multiply_linear(poly: dict, coeffs: np.ndarray, k_max: int) -> dict:
    # multiply a polynomial in creation operators by sum_j coeffs[j] * a_j^dag
    out: dict[tuple[int, ...], complex] = {}
    for powers, c in poly.items():
        for j, cj in enumerate(coeffs):
            if cj == 0.0:
                continue
            p = list(powers)
            p[j] += 1
            key = tuple(p)
            out[key] = out.get(key, 0.0) + c * cj
    return out


def apply_mode_unitary(
    state: FockKet,
    u: ModeUnitary,
    modes: tuple[str, ...],
    cutoff_policy: str = "grow",
) -> FockKet:
    """Apply ``u`` to the listed modes of ``state``.

    Photon number is conserved exactly and the norm is preserved.  Under the
    default "grow" policy the register cutoff is raised when interference
    creates occupations above it (e.g. |1,1> -> |2,0> on a balanced beam
    splitter); "strict" raises instead.
    """
    if cutoff_policy not in ("grow", "strict"):
        raise ValueError(f"unknown cutoff policy {cutoff_policy!r}")
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"acted modes must be distinct: {modes}")
    if len(modes) != u.size:
        raise ValueError(f"unitary acts on {u.size} modes, got {len(modes)}")
    reg = state.register
    idx = [reg.index(m) for m in modes]
    if reg.cutoff > MAX_FACTORIAL_CUTOFF:
        raise ValueError(f"cutoff {reg.cutoff} exceeds factorial table limit")

    out: dict[tuple[int, ...], complex] = {}
    max_occ = 0
    for occ, amp in state.terms.items():
        acted = [occ[i] for i in idx]
        # expand prod_k (sum_j M[j,k] a_j^dag)^{n_k} |0...0> on the acted modes
        poly: dict[tuple[int, ...], complex] = {(0,) * len(modes): 1.0 + 0.0j}
        for k, n_k in enumerate(acted):
            col = u.matrix[:, k]
            for _ in range(n_k):
                poly = _poly_multiply_linear(poly, col, len(modes))
        pref = amp / math.sqrt(math.prod(math.factorial(n) for n in acted))
        for powers, c in poly.items():
            coeff = pref * c * math.sqrt(math.prod(math.factorial(p) for p in powers))
            new_occ = list(occ)
            for pos, i in enumerate(idx):
                new_occ[i] = powers[pos]
            key = tuple(new_occ)
            out[key] = out.get(key, 0.0) + coeff
            max_occ = max(max_occ, max(powers))

    if max_occ > reg.cutoff:
        if cutoff_policy == "strict":
            raise ValueError(
                f"occupation {max_occ} exceeds cutoff {reg.cutoff} under strict policy"
            )
        reg = reg.with_cutoff(max_occ)
    return FockKet(reg, out)
