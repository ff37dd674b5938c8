import logging
from math import gcd

import numpy as np
import pytest

from spinorigami.spin import framed, is_primitive, make_spin
from spinorigami.symplectic import HomologyClass, intersection_pairing
from spinorigami.thurstonveech import Curve, CurveSystem, build_origami, d_system, prototype
from spinorigami.words import (
    AffineAction,
    BoundExceededError,
    ConfigurationError,
    FramedConfig,
    TwistWord,
    boundary_curves,
    chain_config,
    compare_words,
    core_config,
    d_boundary_names,
    d_config,
    d_names,
    d_target,
    default_probes,
    gcd_procedure,
    lantern_config,
    prototype_surface,
    pushforward,
    realization_surface,
    slide_word,
    twist_realized,
    verify_braid,
    verify_chain_relation,
    verify_d_membership,
    verify_lantern,
    verify_sliding_word,
    words_agree,
)

G = 2
R = 4


def x(i: int) -> HomologyClass:
    return HomologyClass.x(G, i)


def y(i: int) -> HomologyClass:
    return HomologyClass.y(G, i)


@pytest.fixture(scope="module")
def surface3():
    return prototype_surface(prototype([4], 1))


@pytest.fixture(scope="module")
def proto5():
    return prototype([8], 1)


def abstract_chain(windings=(0, 0, 0)) -> FramedConfig:
    curves = [
        framed("a1", x(1), windings[0], R),
        framed("a2", y(1), windings[1], R),
        framed("a3", x(2) - x(1), windings[2], R),
    ]
    return FramedConfig(
        curves=curves,
        intersections={("a1", "a2"): 1, ("a2", "a3"): 1, ("a1", "a3"): 0},
    )


def test_empty_word_fixes_everything():
    d = framed("d", x(1) + y(2), 3, R)
    assert pushforward(TwistWord(), d) == d
    assert repr(TwistWord()) == "TwistWord(1)"


def test_single_twist():
    a = framed("a", x(1), 1, R)
    d = framed("d", y(1), 2, R)
    image = pushforward(TwistWord.twist(a), d)
    assert image.h == y(1) - x(1)
    assert image.w == 1
    assert pushforward(TwistWord.twist(a), framed("e", x(2), 3, R)).w == 3


def test_admissible_twists_keep_windings():
    rng = np.random.default_rng(2)
    c = framed("c", x(1) + y(2), 0, R)
    for _ in range(20):
        d = framed("d", HomologyClass(rng.integers(-3, 4, size=2 * G)), int(rng.integers(R)), R)
        for e in (-2, -1, 1, 3):
            assert pushforward(TwistWord.twist(c, e), d).w == d.w


def test_composition_and_inverse():
    rng = np.random.default_rng(4)
    curves = [
        framed("a", x(1), 1, R),
        framed("b", y(1), 2, R),
        framed("c", x(2) + y(1), 3, R),
    ]

    def random_word() -> TwistWord:
        return TwistWord(
            (curves[int(rng.integers(3))], int(rng.integers(-2, 3))) for _ in range(6)
        )

    for _ in range(20):
        w1, w2 = random_word(), random_word()
        d = framed("d", HomologyClass(rng.integers(-3, 4, size=2 * G)), int(rng.integers(R)), R)
        assert pushforward(w1 * w2, d) == pushforward(w1, pushforward(w2, d))
        assert pushforward(w1.inverse(), pushforward(w1, d)) == d
        assert pushforward(w1.normalized(), d) == pushforward(w1, d)
        assert (w1 * w2).symplectic_map(G) == w1.symplectic_map(G) @ w2.symplectic_map(G)


def test_power():
    a = framed("a", x(1), 1, R)
    d = framed("d", y(1), 0, R)
    assert pushforward(TwistWord.twist(a).power(3), d) == pushforward(TwistWord.twist(a, 3), d)
    assert TwistWord.twist(a).power(-2) == TwistWord([(a, -1), (a, -1)])
    assert len(TwistWord.twist(a).power(0)) == 0


def test_normalized():
    a = framed("a", x(1), 1, R)
    b = framed("b", y(1), 2, R)
    assert TwistWord([(a, 1), (a, -1), (b, 2)]).normalized() == TwistWord([(b, 2)])
    assert TwistWord([(a, 1), (b, 1), (b, -1), (a, 2)]).normalized() == TwistWord([(a, 3)])
    assert TwistWord([(a, 0)]).normalized() == TwistWord()


def test_modulus_mismatch():
    a = framed("a", x(1), 1, R)
    d = framed("d", y(1), 0, 2)
    with pytest.raises(ConfigurationError):
        pushforward(TwistWord.twist(a), d)


def test_compare_pinpoints_difference():
    a = framed("a", x(1), 1, R)
    probes = [framed("d", y(1), 0, R)]
    result = compare_words(TwistWord.twist(a), TwistWord.twist(a, 2), probes)
    assert not result.agree
    assert "entry" in result.detail
    assert not words_agree(TwistWord.twist(a), TwistWord.twist(a, 2), probes)
    assert words_agree(TwistWord.twist(a, 2), TwistWord.twist(a).power(2), probes)

    # Same class, different winding: only a probe can tell them apart.
    shifted = framed("a", x(1), 2, R)
    result = compare_words(TwistWord.twist(a), TwistWord.twist(shifted), probes)
    assert not result.agree
    assert "probe d" in result.detail


def test_to_json():
    a = framed("a", x(1), 5, R)
    assert TwistWord.twist(a, -2).to_json() == [
        {"curve": "a", "class": [1, 0, 0, 0], "winding": 1, "modulus": 4, "exponent": -2}
    ]


def test_framed_config_validation():
    a = framed("a", x(1), 0, R)
    b = framed("b", y(1), 0, R)
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[a, a.renamed("a")])
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[a, b], intersections={("a", "b"): 2})
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[a, b], intersections={("a", "b"): 0})
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[a, b], intersections={("a", "c"): 0})
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[a, framed("c", y(1), 0, 2)])
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[])

    config = FramedConfig(curves=[a, b], intersections={("a", "b"): 1})
    assert config.meets("b", "a") == 1
    assert config.meets("a", "a") is None
    assert (config.g, config.r) == (G, R)
    with pytest.raises(ConfigurationError):
        config["c"]


def test_winding_parity_against_spin():
    spin = make_spin(2, G, [0, 0, 0, 0])
    FramedConfig(curves=[framed("a", x(1), 0, 2)], spin=spin)
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[framed("a", x(1), 1, 2)], spin=spin)
    with pytest.raises(ConfigurationError):
        FramedConfig(curves=[framed("a", x(1), 0, 4)], spin=spin)


def test_default_probes():
    config = abstract_chain((1, 2, 3))
    probes = default_probes(config, np.random.default_rng(0), count=5)
    assert len(probes) == 3 + 2 * G + 5
    assert [p.name for p in probes[:3]] == ["a1", "a2", "a3"]
    assert all(p.r == R for p in probes)


def test_braid_relation():
    a = framed("a", x(1), 1, R)
    b = framed("b", y(1), 3, R)
    verdict = verify_braid(a, b)
    assert verdict["agree"]
    assert verdict["relation"] == "braid a b"
    assert "necessary condition" in verdict["note"]
    with pytest.raises(ConfigurationError):
        verify_braid(a, framed("c", x(2), 0, R))


def test_two_chain_with_null_homologous_boundary():
    chain = FramedConfig(
        curves=[framed("a1", x(1), 1, R), framed("a2", y(1), 2, R)],
        intersections={("a1", "a2"): 1},
    )
    d = framed("d", HomologyClass.zero(G), 3, R)
    assert verify_chain_relation(chain, [d])["agree"]
    with pytest.raises(ConfigurationError):
        verify_chain_relation(chain, [d, d.renamed("e")])


def test_chain_shape_is_checked():
    chain = abstract_chain()
    d = framed("d", HomologyClass.zero(G), 0, R)
    with pytest.raises(ConfigurationError):
        verify_chain_relation(chain, [d])
    loose = FramedConfig(curves=[chain["a1"], chain["a2"]])
    with pytest.raises(ConfigurationError):
        verify_chain_relation(loose, [d])
    with pytest.raises(ConfigurationError):
        verify_chain_relation(FramedConfig(curves=[chain["a1"]]), [d])


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_realized_chain_relation(surface3, k):
    chain, boundary = chain_config(surface3, [f"a{i}" for i in range(1, k + 1)])
    assert len(boundary) == (1 if k % 2 == 0 else 2)
    verdict = verify_chain_relation(chain, boundary)
    assert verdict["agree"], verdict["detail"]
    assert verdict["relation"] == f"chain k={k}"


def test_corrupted_chain_winding_is_refuted(surface3):
    chain, boundary = chain_config(surface3, ["a1", "a2", "a3"])
    d1, d2 = boundary
    assert not d1.h.is_zero
    corrupted = [framed(d1.name, d1.h, d1.w + 1, d1.r), d2]
    assert not verify_chain_relation(chain, corrupted)["agree"]


def test_two_chain_boundary(surface3):
    (d,) = boundary_curves(surface3, ["a1", "a2"])
    assert d.h.is_zero
    assert d.w == -1 % d.r


def test_boundary_needs_known_cylinders(surface3):
    with pytest.raises(ConfigurationError):
        boundary_curves(surface3, ["a1", "nope"])


def test_lantern(surface3):
    config = lantern_config(surface3, ["a1", "a2", "a3", "a4", "a5"])
    assert config.names == ["d1", "d2", "d3", "d4", "x", "y", "z"]
    boundary = [config[name] for name in ("d1", "d2", "d3", "d4")]
    assert np.linalg.matrix_rank(np.array([d.h.coords for d in boundary])) == 3
    total = HomologyClass.zero(config.g)
    for d in boundary:
        total = total + d.h
    assert total.is_zero
    assert (config["d4"].w + 2) % config.r == 0
    verdict = verify_lantern(config)
    assert verdict["agree"], verdict["detail"]


def test_lantern_on_the_d7_surface():
    d7 = realization_surface(build_origami(d_system(7)))
    config = lantern_config(d7, ["c1", "c2", "c3", "c4", "c5"])
    boundary = [config[name] for name in ("d1", "d2", "d3", "d4")]
    assert np.linalg.matrix_rank(np.array([d.h.coords for d in boundary])) == 3
    verdict = verify_lantern(config)
    assert verdict["agree"], verdict["detail"]


def test_corrupted_lantern_is_refuted(surface3):
    config = lantern_config(surface3, ["a1", "a2", "a3", "a4", "a5"])
    curves = [config[name] for name in config.names]
    ybar = config["y"]
    assert not ybar.h.is_zero
    curves[5] = framed("y", ybar.h, ybar.w + 1, ybar.r)
    corrupted = FramedConfig(curves=curves)
    assert not verify_lantern(corrupted)["agree"]


def test_lantern_with_nullhomologous_holes_still_agrees():
    zero = HomologyClass.zero(G)
    curves = [
        framed("d1", x(1), 1, R),
        framed("d2", -x(1), 3, R),
        framed("d3", zero, 0, R),
        framed("d4", zero, -6, R),
        framed("x", zero, 5, R),
        framed("y", -x(1), 4, R),
        framed("z", x(1), 2, R),
    ]
    verdict = verify_lantern(FramedConfig(curves=curves))
    assert verdict["agree"], verdict["detail"]


def test_lantern_needs_five_curves(surface3):
    with pytest.raises(ConfigurationError):
        lantern_config(surface3, ["a1", "a2", "a3"])


def test_affine_action_matches_pushforward():
    rng = np.random.default_rng(9)
    curves = [framed("a", x(1), 1, R), framed("b", y(1), 2, R), framed("c", x(2) - y(1), 3, R)]
    for modulus, shift_modulus in ((2, 2), (4, 4), (4, 2)):
        for _ in range(10):
            word = TwistWord(
                (curves[int(rng.integers(3))], int(rng.integers(-2, 3))) for _ in range(5)
            )
            action = AffineAction.of_word(word, G, modulus, shift_modulus)
            d = framed("d", HomologyClass(rng.integers(-3, 4, size=2 * G)), int(rng.integers(R)), R)
            image = pushforward(word, d)
            assert action(d) == (
                tuple(int(v) % modulus for v in image.h.coords),
                image.w % shift_modulus,
            )


def test_affine_action_moduli():
    with pytest.raises(ConfigurationError):
        AffineAction.identity(G, 2, 4)
    with pytest.raises(ConfigurationError):
        AffineAction.of_twist(framed("a", x(1), 1, 2), 1, 4, 4)
    a = framed("a", x(1), 1, R)
    assert AffineAction.of_twist(a, 2, 2, 2) == AffineAction.identity(G, 2, 2)


def test_d_names():
    assert d_names(5) == ["a", "a'", "c1", "c2", "c3"]
    assert d_boundary_names(5) == ["delta0", "delta2"]
    assert d_boundary_names(6) == ["delta0", "delta1", "delta1'"]
    with pytest.raises(ConfigurationError):
        d_names(3)


@pytest.mark.parametrize("names", [["b0", "a2", "a3", "a4"], ["b0", "a2", "a3", "a4", "a5"]])
def test_d_membership_genus_three(surface3, names):
    n = len(names)
    config = d_config(surface3, names)
    assert config.names == d_names(n) + d_boundary_names(n)
    a, a_prime = config["a"], config["a'"]
    if intersection_pairing(a.h, config["c1"].h) != intersection_pairing(a_prime.h, config["c1"].h):
        a_prime = a_prime.reversed()
    assert config["delta0"].h in (a.h - a_prime.h, a_prime.h - a.h)

    report = verify_d_membership(n, config)
    assert report["member"]
    assert report["relation"] == f"D{n}"
    assert report["windings_kept"]
    assert report["shift_modulus"] == config.r == 4
    assert report["modulus"] == 2


def test_odd_d_target_is_trivial_on_homology_mod_two(surface3):
    config = d_config(surface3, ["b0", "a2", "a3", "a4", "a5"])
    assert config["delta2"].h in (config["delta0"].h, -config["delta0"].h)
    report = verify_d_membership(5, config)
    assert report["member"]
    assert report["homology_trivial"]
    assert report["states"] == 1

    inverse = verify_d_membership(5, config, target=d_target(5, config).inverse())
    assert inverse["member"]


@pytest.mark.parametrize(
    "exponents",
    [
        [("delta0", 3)],
        [("delta0", 3), ("delta2", -1)],
        [("delta0", 10), ("delta2", 4)],
    ],
)
def test_wrong_d5_exponents_are_rejected(surface3, exponents):
    config = d_config(surface3, ["b0", "a2", "a3", "a4", "a5"])
    target = TwistWord([(config[name], e) for name, e in exponents])
    report = verify_d_membership(5, config, target=target)
    assert not report["member"]
    assert not report["windings_kept"]
    assert report["states"] == 0


def test_wrong_d5_exponents_are_rejected_in_genus_five(proto5):
    config = d_config(prototype_surface(proto5), ["b0", "a4", "a5", "a6", "a7"])
    assert config.r == 8
    assert verify_d_membership(5, config)["member"]
    for exponents in ((3, 0), (3, -1), (2, 2)):
        target = TwistWord([(config["delta0"], exponents[0]), (config["delta2"], exponents[1])])
        assert not verify_d_membership(5, config, target=target)["member"], exponents


def test_generator_product_needs_a_search(surface3):
    config = d_config(surface3, ["b0", "a2", "a3", "a4", "a5"])
    target = TwistWord.product([config["a"], config["c1"], config["c2"]])
    report = verify_d_membership(5, config, target=target)
    assert report["member"]
    assert not report["homology_trivial"]
    assert report["states"] > 1


def test_d_generators_must_keep_windings(surface3):
    config = d_config(surface3, ["b0", "a2", "a3", "a4"])
    table = {}
    for i, a in enumerate(config.names):
        for b in config.names[i + 1:]:
            if config.meets(a, b) is not None:
                table[(a, b)] = config.meets(a, b)
    curves = [config[name] for name in config.names]
    assert curves[0].name == "a"
    curves[0] = framed("a", curves[0].h, 2, config.r)
    with pytest.raises(ConfigurationError):
        verify_d_membership(4, FramedConfig(curves=curves, intersections=table))


def test_d7_on_its_own_surface():
    d7 = realization_surface(build_origami(d_system(7)))
    report = verify_d_membership(7, d_config(d7, d_names(7)))
    assert report["member"]


def test_foreign_target_is_not_a_member(surface3):
    names = ["b0", "a2", "a3", "a4"]
    config = d_config(surface3, names)
    foreign = core_config(surface3, ["a1"])["a1"]
    report = verify_d_membership(4, config, target=TwistWord.twist(foreign))
    assert not report["member"]
    assert report["states"] > 1


def test_d_search_bound(surface3, caplog):
    config = d_config(surface3, ["b0", "a2", "a3", "a4"])
    foreign = core_config(surface3, ["a1"])["a1"]
    with caplog.at_level(logging.WARNING):
        with pytest.raises(BoundExceededError):
            verify_d_membership(4, config, bound=1, target=TwistWord.twist(foreign))
    assert "stopped" in caplog.text


def test_d_pattern_is_checked(surface3):
    config = core_config(surface3, ["a1", "a2", "a3", "a4"], d_names(4))
    with pytest.raises(ConfigurationError):
        verify_d_membership(4, config)


def test_slide_word():
    chain = abstract_chain()
    a1, a2, a3 = chain["a1"], chain["a2"], chain["a3"]
    assert slide_word(chain, 1, 1) == TwistWord()
    assert slide_word(chain, 0, 1) == TwistWord.product([a1, a2])
    assert slide_word(chain, 0, 2) == TwistWord.product([a2, a3, a1, a2])
    assert pushforward(slide_word(chain, 0, 1), a1).h in (a2.h, -a2.h)
    assert pushforward(slide_word(chain, 0, 2), a1).h in (a3.h, -a3.h)
    assert pushforward(slide_word(chain, 2, 0), a3).h in (a1.h, -a1.h)
    with pytest.raises(ConfigurationError):
        slide_word(chain, 0, 3)


def test_sliding_word(proto5):
    report = verify_sliding_word(proto5)
    assert report["verified"]
    assert report["readings"]["right-to-left"]["verified"]
    assert report["readings"]["right-to-left"]["realized"]
    assert report["readings"]["left-to-right"]["realized"]
    assert not report["readings"]["left-to-right"]["verified"]


def test_twisting_a_core_on_the_origami_matches_the_action():
    proto = prototype([4], 1)
    curves = proto.curves
    cyls = proto.realization.cylinders
    word = TwistWord([(curves["a1"], 1), (curves["a2"], -1), (curves["a3"], 2)])
    for name in ("a1", "a2", "a4"):
        moved = twist_realized(proto.origami, cyls, word, cyls[name].core)
        assert proto.framed(name, moved) == pushforward(word, curves[name])
    stranger = framed("elsewhere", curves["a1"].h, 0, proto.r)
    with pytest.raises(ConfigurationError):
        twist_realized(proto.origami, cyls, TwistWord([(stranger, 1)]), cyls["a1"].core)


def test_sliding_needs_the_chain():
    with pytest.raises(ConfigurationError):
        verify_sliding_word(prototype([4], 1))


@pytest.mark.parametrize("k1,k2,expected", [(4, 6, 2), (0, 5, 5), (3, 0, 3), (3, 5, 1), (6, 6, 6)])
def test_gcd_procedure(k1, k2, expected):
    g, modulus = 5, 8
    a1 = framed("a1", HomologyClass.x(g, 1), k1, modulus)
    a2 = framed("a2", HomologyClass.x(g, 2), k2, modulus)
    word, result = gcd_procedure(a1, a2)
    assert result.w == expected
    assert pushforward(word, a2).w == result.w or len(word) == 0


def test_gcd_procedure_all_pairs():
    g, modulus = 5, 8
    for k1 in range(modulus):
        for k2 in range(modulus):
            a1 = framed("a1", HomologyClass.x(g, 1), k1, modulus)
            a2 = framed("a2", HomologyClass.x(g, 2), k2, modulus)
            _, result = gcd_procedure(a1, a2)
            assert result.w == gcd(k1, k2) % modulus


@pytest.mark.parametrize("k1,k2,expected", [(8, 6, 2), (9, 4, 1), (10, 4, 2), (3, 9, 3)])
def test_gcd_procedure_modulus_twelve(k1, k2, expected):
    g, modulus = 4, 12
    a1 = framed("a1", HomologyClass.x(g, 1), k1, modulus)
    a2 = framed("a2", HomologyClass.y(g, 3), k2, modulus)
    _, result = gcd_procedure(a1, a2)
    assert result.w == expected
    assert is_primitive(result.h)


def test_gcd_word_shape():
    g, modulus = 5, 8
    a2 = framed("a2", HomologyClass.x(g, 2), 6, modulus)
    word, result = gcd_procedure(framed("a1", HomologyClass.x(g, 1), 4, modulus), a2)
    assert len(word) == 1
    ((b1, e),) = word.letters
    assert b1.w == 4 and e == -1
    assert intersection_pairing(a2.h, b1.h) == 1
    assert result.h == a2.h + b1.h * e


def test_torus_realization_is_rejected():
    system = CurveSystem(
        [Curve(name="h", family="h", points=["p"]), Curve(name="v", family="v", points=["p"])]
    )
    with pytest.raises(ConfigurationError):
        realization_surface(build_origami(system))
