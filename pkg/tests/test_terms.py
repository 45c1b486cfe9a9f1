"""Term construction, typing, serialization, and comparison normal forms."""

import pytest

from dworklab.errors import TermError
from dworklab.geometry import FuncName, FuncPull, SubName
from dworklab.terms import (
    Exp,
    Oim,
    Opb,
    RGamma,
    Shift,
    Struct,
    Tensor,
    Var,
    equal_normal,
    navigate,
    normalize,
    replace,
    serialize,
    size,
    split_shift,
    subterm_paths,
    variety_of,
)


def _section_side(ctx):
    return Opb(ctx.composite("iotacheck"), Oim(ctx.composite("s"), Struct("X")))


def test_variety_of_basic(dwork):
    assert variety_of(dwork, Struct("X")) == "X"
    assert variety_of(dwork, Exp("V", FuncName("F"))) == "V"
    assert variety_of(dwork, _section_side(dwork)) == "X"
    assert variety_of(dwork, Shift(RGamma(SubName("S"), Struct("X")), 1)) == "X"
    assert variety_of(dwork, Var("M", "X")) == "X"


def test_variety_of_rejects_mismatches(dwork):
    with pytest.raises(TermError):
        variety_of(dwork, Opb(dwork.composite("s"), Struct("X")))  # wants Adual
    with pytest.raises(TermError):
        variety_of(dwork, Tensor(Struct("X"), Struct("V")))
    with pytest.raises(TermError):
        variety_of(dwork, RGamma(SubName("iotaS"), Struct("X")))
    with pytest.raises(TermError):
        variety_of(dwork, Exp("X", FuncName("F")))  # F lives on V
    with pytest.raises(TermError):
        variety_of(dwork, Struct("nope"))


def test_serialize_is_stable_and_injective_enough(dwork):
    t = _section_side(dwork)
    s1, s2 = serialize(t), serialize(t)
    assert s1 == s2
    assert serialize(Shift(t, 1)) != s1
    assert serialize(Oim(dwork.composite("s"), Struct("X"))) != s1


def test_navigate_and_replace(dwork):
    t = _section_side(dwork)
    assert navigate(t, ()) is t
    assert navigate(t, (0,)) is t.arg
    assert navigate(t, (0, 0)) == Struct("X")
    swapped = replace(t, (0, 0), Struct("X"))
    assert equal_normal(dwork, swapped, t)
    with pytest.raises(TermError):
        navigate(t, (1,))
    with pytest.raises(TermError):
        navigate(t, (0, 0, 0))


def test_subterm_paths_and_size(dwork):
    t = _section_side(dwork)
    paths = list(subterm_paths(t))
    assert ((), (0,), (0, 0)) == tuple(paths)
    assert size(t) == 3


def test_shift_canonicalization(dwork):
    t = Shift(Oim(dwork.composite("s"), Shift(Struct("X"), 2)), -1)
    core, k = split_shift(normalize(dwork, t))
    assert k == 1
    assert serialize(core) == serialize(Oim(dwork.composite("s"), Struct("X")))
    assert equal_normal(dwork, t, Shift(Oim(dwork.composite("s"), Struct("X")), 1))
    # shift by zero is dropped entirely
    assert serialize(normalize(dwork, Shift(Struct("X"), 0))) == \
        serialize(normalize(dwork, Struct("X")))


def test_normalize_drops_identity_images(dwork):
    i = dwork.identity("X")
    t = Oim(i, Opb(i, Struct("X")))
    assert equal_normal(dwork, t, Struct("X"))
    # declared-identity composites count as identities too
    m = dwork.composite("p1", "stilde")
    assert equal_normal(dwork, Opb(m, Struct("V")), Struct("V"))


def test_normalize_collapses_structure_pullbacks(dwork):
    t = Opb(dwork.composite("pi"), Struct("X"))
    assert equal_normal(dwork, t, Struct("V"))
    phi = FuncPull(FuncName("t"), dwork.composite("gammaV"))
    e = Opb(dwork.composite("stilde"), Exp("VA", phi))
    assert equal_normal(dwork, e, Exp("V", FuncName("F")))


def test_normalize_tensor_unit_and_order(dwork):
    M = Var("M", "X")
    t = Tensor(M, Struct("X"))
    assert equal_normal(dwork, t, M)
    a = Tensor(M, Oim(dwork.composite("j"), Struct("S")))
    b = Tensor(Oim(dwork.composite("j"), Struct("S")), M)
    assert equal_normal(dwork, a, b)


def test_equal_normal_distinguishes(dwork):
    assert not equal_normal(dwork, Struct("X"), Struct("V"))
    assert not equal_normal(dwork, Shift(Struct("X"), 1), Struct("X"))
    lhs = Oim(dwork.composite("pi"), Exp("V", FuncName("F")))
    rhs = Shift(RGamma(SubName("S"), Struct("X")), 1)
    assert not equal_normal(dwork, lhs, rhs)  # needs the proof, not just nf
