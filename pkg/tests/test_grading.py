import pytest

from cdgkit.grading import Z, Z2, GradingError, GradingGroup, grading_morphism


@pytest.mark.parametrize("G,g,expected", [(Z2, 1, 1), (Z, 4, 0), (Z, -3, 1), (Z2, 0, 0)])
def test_parity(G, g, expected):
    assert G.parity(g) == expected


def test_koszul_sign():
    for G in (Z, Z2):
        assert G.koszul_sign(G.one, G.one) == -1
        for g in range(-3, 4):
            assert G.koszul_sign(0, G.normalize(g)) == 1
    assert Z.koszul_sign(2, 3) == 1


def test_embed_int():
    assert Z2.embed_int(3) == 1
    assert Z.embed_int(3) == 3
    assert Z.embed_int(0) == Z2.embed_int(0) == 0


def test_sigma_is_bilinear_and_symmetric():
    for G in (Z, Z2):
        for a in range(-2, 3):
            for b in range(-2, 3):
                a, b = G.normalize(a), G.normalize(b)
                assert G.sigma(a, b) == G.sigma(b, a)
                for c in range(0, 3):
                    assert G.sigma(G.add(a, c), b) == (G.sigma(a, b) + G.sigma(c, b)) % 2


def test_grading_morphisms():
    phi = grading_morphism(Z, Z2)
    assert phi(5) == 1 and phi(-2) == 0
    ident = grading_morphism(Z, Z)
    assert ident(7) == 7
    with pytest.raises(GradingError):
        grading_morphism(Z2, Z)


def test_labels_round_trip():
    assert Z2.label(0) == "even" and Z2.label(3) == "odd"
    assert Z2.parse_label("odd") == 1
    assert Z.parse_label(Z.label(-4)) == -4


def test_unknown_group():
    with pytest.raises(GradingError):
        GradingGroup("Z/3")
