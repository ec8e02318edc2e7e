"""Initial-state constructors for the swapping schemes.

Every constructor returns a normalized ket.  Polarization encoding: beam b
maps to the two modes "bH", "bV"; a state like |HV>_b is occupation (1, 1)
on that pair, and |2H>_b is occupation 2 on "bH".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .fock import FockKet, ModeRegister, reorder, tensor_product, vacuum


@dataclass(frozen=True)
class SpdcParams:
    """Pair-emission amplitude ratio and truncation order for one SPDC pass."""

    tau: complex
    order: int = 1

    def __post_init__(self):
        if abs(self.tau) >= 1.0:
            raise ValueError(f"|tau| must be < 1, got {abs(self.tau)}")
        if self.order < 1:
            raise ValueError("truncation order must be >= 1")


def spdc_pair(p: SpdcParams, modes: tuple[str, str], cutoff: int | None = None) -> FockKet:
    """Normalized sum_{n=0..order} tau^n |n, n> on the given mode pair."""
    if cutoff is None:
        cutoff = p.order
    if p.order > cutoff:
        raise ValueError(f"order {p.order} exceeds cutoff {cutoff}")
    reg = ModeRegister(tuple(modes), cutoff)
    terms = {(n, n): p.tau**n for n in range(p.order + 1)}
    return FockKet(reg, terms).normalized()


def double_pass_source(p: SpdcParams, cutoff: int | None = None) -> FockKet:
    """Two SPDC passes: pair state on beams (1,4) times pair state on (2,3)."""
    a = spdc_pair(p, ("1", "4"), cutoff)
    b = spdc_pair(p, ("2", "3"), cutoff)
    return tensor_product(a, b)


_X_TERMS = (
    # (1, 3) singlet factor x (2, 4) singlet factor, signs (+, -, -, +)
    (("1H", "3V", "2H", "4V"), +1.0),
    (("1H", "3V", "2V", "4H"), -1.0),
    (("1V", "3H", "2H", "4V"), -1.0),
    (("1V", "3H", "2V", "4H"), +1.0),
)


def _pol_register(cutoff: int = 2) -> ModeRegister:
    labels = tuple(f"{b}{pol}" for b in "1234" for pol in "HV")
    return ModeRegister(labels, cutoff)


def _y_terms(i: str, j: str):
    # |2H>_i |2V>_j + |2V>_i |2H>_j - |HV>_i |HV>_j
    return (
        ({f"{i}H": 2, f"{j}V": 2}, +1.0),
        ({f"{i}V": 2, f"{j}H": 2}, +1.0),
        ({f"{i}H": 1, f"{i}V": 1, f"{j}H": 1, f"{j}V": 1}, -1.0),
    )


def polarization_double_pass(
    include_double_pairs: bool = True,
    double_pair_weight: float = 1.0,
    cutoff: int = 2,
) -> FockKet:
    """Double-pass polarization source on beams 1-4 (8 modes, cutoff >= 2).

    The single-pair-per-pass term is a product of polarization singlets on
    beams (1,3) and (2,4); ``include_double_pairs`` adds the two-pair terms
    on (1,3) and on (2,4).  The addends carry unit relative weight as a
    default; ``double_pair_weight`` scales the two-pair terms uniformly for
    sensitivity runs.
    """
    if cutoff < 2:
        raise ValueError("polarization double-pass source needs cutoff >= 2")
    reg = _pol_register(cutoff)
    terms: dict[tuple[int, ...], complex] = {}

    def put(counts: dict[str, int], amp: complex):
        occ = [0] * reg.size
        for label, n in counts.items():
            occ[reg.index(label)] = n
        key = tuple(occ)
        terms[key] = terms.get(key, 0.0) + amp

    for labels, sign in _X_TERMS:
        put({l: 1 for l in labels}, sign)
    if include_double_pairs:
        for pair in (("1", "3"), ("2", "4")):
            for counts, sign in _y_terms(*pair):
                put(counts, double_pair_weight * sign)
    return FockKet(reg, terms).normalized()


def vacuum_one_photon_postbs(cutoff: int = 2) -> FockKet:
    """Post-beam-splitter state in the vacuum/one-photon setup.

    Modes (2', 3', 1, 4); the five branches carry printed amplitudes
    1, 1/2, 1/2, 1/sqrt2, -1/sqrt2 and are then normalized (overall
    1/sqrt(5/2)).
    """
    if cutoff < 2:
        raise ValueError("needs cutoff >= 2")
    reg = ModeRegister(("2'", "3'", "1", "4"), cutoff)
    r2 = 1.0 / math.sqrt(2.0)
    terms = {
        (0, 0, 1, 1): 1.0,
        # (1/2) |10> psi+_14 and (1/2) |01> psi-_14
        (1, 0, 0, 1): 0.5 * r2,
        (1, 0, 1, 0): 0.5 * r2,
        (0, 1, 0, 1): 0.5 * r2,
        (0, 1, 1, 0): -0.5 * r2,
        (2, 0, 0, 0): r2,
        (0, 2, 0, 0): -r2,
    }
    return FockKet(reg, terms).normalized()


def theta_product(theta: float, cutoff: int = 1) -> FockKet:
    """(cos t |00> + sin t |11>)_{12} x (cos t |00> + sin t |11>)_{34}."""
    c, s = math.cos(theta), math.sin(theta)
    a = FockKet(ModeRegister(("1", "2"), cutoff), {(0, 0): c, (1, 1): s})
    b = FockKet(ModeRegister(("3", "4"), cutoff), {(0, 0): c, (1, 1): s})
    return tensor_product(a, b).normalized()


def chi_state(eps: float, modes: tuple[str, str] = ("A", "C"), cutoff: int = 1) -> FockKet:
    """Weakly entangling pair (|00> + eps |11>)/sqrt(1 + eps^2)."""
    reg = ModeRegister(tuple(modes), cutoff)
    return FockKet(reg, {(0, 0): 1.0, (1, 1): eps}).normalized()
