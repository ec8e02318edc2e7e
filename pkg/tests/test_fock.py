import json
import math

import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from swapsim.fock import (
    BELL_KINDS,
    FockKet,
    ModeRegister,
    WeightedEnsemble,
    bell_state,
    fidelity,
    from_json_dict,
    inner_product,
    partial_project,
    pruning,
    relabel,
    reorder,
    tensor_product,
    to_json_dict,
    vacuum,
)

from conftest import random_kets

R2 = 1.0 / math.sqrt(2.0)


def test_register_validation():
    with pytest.raises(ValueError):
        ModeRegister(("1", "1"), 1)
    with pytest.raises(ValueError):
        ModeRegister(("1",), 0)
    reg = ModeRegister(("a", "b"), 2)
    assert reg.index("b") == 1
    with pytest.raises(KeyError):
        reg.index("c")


def test_cutoff_enforced():
    reg = ModeRegister(("1",), 1)
    with pytest.raises(ValueError):
        FockKet(reg, {(2,): 1.0})
    with pytest.raises(ValueError):
        FockKet(reg, {(-1,): 1.0})


def test_tensor_vacuum_identity():
    a = vacuum(ModeRegister(("1",), 1))
    b = vacuum(ModeRegister(("2",), 1))
    out = tensor_product(a, b)
    assert out.amplitude((0, 0)) == 1.0
    assert out.num_terms() == 1


def test_tensor_two_singlets():
    out = tensor_product(bell_state("psi-", ("1", "2")), bell_state("psi-", ("3", "4")))
    assert out.num_terms() == 4
    assert out.amplitude((0, 1, 0, 1)) == pytest.approx(0.5)
    assert out.amplitude((0, 1, 1, 0)) == pytest.approx(-0.5)
    assert out.amplitude((1, 0, 0, 1)) == pytest.approx(-0.5)
    assert out.amplitude((1, 0, 1, 0)) == pytest.approx(0.5)


def test_tensor_two_pair_sources():
    tau = 0.2
    pref = 1.0 / (1.0 + tau * tau)
    a = FockKet(ModeRegister(("1", "4"), 1), {(0, 0): 1.0, (1, 1): tau}).normalized()
    b = FockKet(ModeRegister(("2", "3"), 1), {(0, 0): 1.0, (1, 1): tau}).normalized()
    out = tensor_product(a, b)
    assert out.amplitude((0, 0, 0, 0)) == pytest.approx(pref)
    assert out.amplitude((1, 1, 0, 0)) == pytest.approx(tau * pref)
    assert out.amplitude((0, 0, 1, 1)) == pytest.approx(tau * pref)
    assert out.amplitude((1, 1, 1, 1)) == pytest.approx(tau * tau * pref)


def test_tensor_label_collision():
    a = vacuum(ModeRegister(("1",), 1))
    with pytest.raises(ValueError, match="collision"):
        tensor_product(a, vacuum(ModeRegister(("1",), 1)))


def test_inner_product_bell_cases():
    psi_p = bell_state("psi+", ("1", "2"))
    psi_m = bell_state("psi-", ("1", "2"))
    assert inner_product(psi_p, psi_p) == pytest.approx(1.0)
    assert inner_product(psi_p, psi_m) == pytest.approx(0.0)


def test_inner_product_weak_pair_overlap():
    eps = 0.3
    chi = FockKet(ModeRegister(("1", "2"), 1), {(0, 0): 1.0, (1, 1): eps}).normalized()
    v = vacuum(ModeRegister(("1", "2"), 1))
    assert inner_product(v, chi) == pytest.approx(1.0 / math.sqrt(1 + eps * eps))
    one_one = FockKet(ModeRegister(("1", "2"), 1), {(1, 1): 1.0})
    assert inner_product(one_one, chi) == pytest.approx(eps / math.sqrt(1 + eps * eps))


def test_inner_product_register_mismatch():
    with pytest.raises(ValueError):
        inner_product(bell_state("psi+", ("1", "2")), bell_state("psi+", ("1", "3")))


def test_normalize_symmetric_pair():
    ket = FockKet(ModeRegister(("1", "2"), 1), {(0, 0): 1.0, (1, 1): 1.0})
    n = ket.normalized()
    assert n.amplitude((0, 0)) == pytest.approx(R2)
    assert n.norm() == pytest.approx(1.0)


def test_normalize_weak_pair_prefactor():
    eps = 0.05
    ket = FockKet(ModeRegister(("1", "2"), 1), {(0, 0): 1.0, (1, 1): eps}).normalized()
    assert ket.amplitude((0, 0)) == pytest.approx(1.0 / math.sqrt(1 + eps * eps))


def test_normalize_zero_ket_rejected():
    reg = ModeRegister(("1",), 1)
    with pytest.raises(ValueError):
        FockKet(reg, {}).normalized()


def test_bell_state_signs():
    psi_m = bell_state("psi-", ("2", "3"))
    assert psi_m.amplitude((0, 1)) == pytest.approx(R2)
    assert psi_m.amplitude((1, 0)) == pytest.approx(-R2)
    phi_m = bell_state("phi-", ("2", "3"))
    assert phi_m.amplitude((0, 0)) == pytest.approx(R2)
    assert phi_m.amplitude((1, 1)) == pytest.approx(-R2)


def test_bell_overlap_table_is_identity():
    for i, a in enumerate(BELL_KINDS):
        for j, b in enumerate(BELL_KINDS):
            ov = inner_product(bell_state(a, ("1", "2")), bell_state(b, ("1", "2")))
            assert abs(ov - (1.0 if i == j else 0.0)) < 1e-12


def test_bell_unknown_kind():
    with pytest.raises(ValueError):
        bell_state("omega", ("1", "2"))


def test_fidelity_pure_match_and_mixture():
    psi_p = bell_state("psi+", ("1", "2"))
    ens = WeightedEnsemble.pure(psi_p)
    assert fidelity(ens, psi_p) == pytest.approx(1.0)
    vac = vacuum(ModeRegister(("1", "2"), 1))
    mix = WeightedEnsemble(psi_p.register, ((0.5, psi_p), (0.5, vac)))
    assert fidelity(mix, psi_p) == pytest.approx(0.5)


def test_fidelity_requires_normalized_target():
    psi_p = bell_state("psi+", ("1", "2"))
    ens = WeightedEnsemble.pure(psi_p)
    with pytest.raises(ValueError):
        fidelity(ens, psi_p.scaled(2.0))


def test_ensemble_weight_validation():
    psi_p = bell_state("psi+", ("1", "2"))
    with pytest.raises(ValueError):
        WeightedEnsemble(psi_p.register, ((0.7, psi_p),))
    with pytest.raises(ValueError):
        WeightedEnsemble(psi_p.register, ((-0.5, psi_p), (1.5, psi_p)))


def test_reorder_and_relabel():
    ket = FockKet(ModeRegister(("1", "4", "2"), 1), {(1, 0, 1): 1.0})
    out = reorder(ket, ("1", "2", "4"))
    assert out.amplitude((1, 1, 0)) == 1.0
    ren = relabel(ket, {"4": "x"})
    assert ren.register.labels == ("1", "x", "2")


def test_partial_project():
    state = tensor_product(bell_state("psi+", ("1", "2")), bell_state("psi+", ("3", "4")))
    cond = partial_project(state, bell_state("psi+", ("2", "3")))
    assert cond.register.labels == ("1", "4")
    assert cond.norm() ** 2 == pytest.approx(0.25)


@given(random_kets(), random_kets())
@settings(max_examples=60, deadline=None)
def test_tensor_norm_multiplicative(a, b):
    b = relabel(b, {l: f"r{l}" for l in b.register.labels})
    out = tensor_product(a, b)
    assert out.norm() == pytest.approx(a.norm() * b.norm(), abs=1e-12)


@given(random_kets(max_modes=2, max_cutoff=1), st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_fidelity_bounded_and_affine(ket, w):
    assume(ket.register.size == 2)
    target = bell_state("psi+", ket.register.labels)
    other = vacuum(ket.register)
    f_a = fidelity(WeightedEnsemble.pure(ket), target)
    f_b = fidelity(WeightedEnsemble.pure(other), target)
    mix = WeightedEnsemble.from_branches([(w, ket.normalized()), (1 - w, other)])
    f_mix = fidelity(mix, target)
    assert -1e-12 <= f_mix <= 1.0 + 1e-12
    assert f_mix == pytest.approx(w * f_a + (1 - w) * f_b, abs=1e-12)


@given(random_kets())
@settings(max_examples=40, deadline=None)
def test_json_round_trip(ket):
    data = json.loads(json.dumps(to_json_dict(ket)))
    back = from_json_dict(data, cutoff=ket.register.cutoff)
    assert back.register.labels == ket.register.labels
    for occ, amp in ket.items():
        assert back.amplitude(occ) == pytest.approx(amp, abs=1e-15)


def test_pruning_context():
    reg = ModeRegister(("1",), 1)
    tiny = FockKet(reg, {(0,): 1.0, (1,): 1e-16})
    assert tiny.num_terms() == 1
    with pruning(0.0):
        kept = FockKet(reg, {(0,): 1.0, (1,): 1e-16})
    assert kept.num_terms() == 2
