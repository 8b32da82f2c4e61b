import random

import pytest

from shukla.errors import NotInIdeal, TruncationOverflow, UndefinedGenerator
from shukla.dpalgebra import (
    DIVIDED_POWER, EXTERIOR, POLYNOMIAL, Element, GammaDerivation, Generator,
    GradedAlgebra, basis_slice, contraction_complex, derivation_matrix, derive,
    homotopy_h,
)
from shukla.linalg import GroundRing

Z = GroundRing.Z()


def hypersurface_algebra():
    """Generators of the Gamma-forms of the model of Z[x]/(x^2)."""
    return GradedAlgebra(Z, [
        Generator("x", 0, POLYNOMIAL, poly_weight=1),
        Generator("y", 1, EXTERIOR, poly_weight=2),
        Generator("dx", 1, EXTERIOR, weight=1, poly_weight=1),
        Generator("dy", 2, DIVIDED_POWER, weight=1, poly_weight=2),
    ])


def test_basis_slice_exterior_square_vanishes():
    alg = GradedAlgebra(Z, [Generator("dx", 1, EXTERIOR, weight=1, poly_weight=1)])
    s = basis_slice(alg, 2, 2, poly_bound=10)
    assert s.monomials == ()


def test_basis_slice_divided_power_witness():
    alg = GradedAlgebra(Z, [Generator("dy", 2, DIVIDED_POWER, weight=1)])
    for p in (1, 2, 3):
        s = basis_slice(alg, 2 * p, p)
        assert s.monomials == (((0, p),),)


def test_basis_slice_polynomial_filtration():
    alg = GradedAlgebra(Z, [Generator("x", 0, POLYNOMIAL, poly_weight=1)])
    s = basis_slice(alg, 0, 0, poly_bound=2)
    assert s.monomials == ((), ((0, 1),), ((0, 2),))
    with pytest.raises(ValueError):
        basis_slice(alg, 0, 0)


def test_mul_divided_power_binomial():
    alg = hypersurface_algebra()
    dy = alg.gen_element("dy")
    g2 = dy * dy
    assert g2 == alg.element({(("dy", 2),): 2})
    g3 = g2 * dy
    assert g3 == alg.element({(("dy", 3),): 6})
    # gamma^p gamma^q = C(p+q, p) gamma^{p+q} for all p+q <= 8
    from math import comb
    for p in range(1, 8):
        for q in range(1, 9 - p):
            gp = alg.element({(("dy", p),): 1})
            gq = alg.element({(("dy", q),): 1})
            assert gp * gq == alg.element({(("dy", p + q),): comb(p + q, p)})


def test_mul_exterior_and_koszul_sign():
    alg = hypersurface_algebra()
    dx = alg.gen_element("dx")
    assert (dx * dx).is_zero()
    x = alg.gen_element("x")
    y = alg.gen_element("y")
    xdx = x * dx
    # y odd, x*dx odd: (x dx) y = - y (x dx)
    assert xdx * y == (y * xdx).scale(-1)
    # associativity on a mixed product
    assert (x * y) * dx == x * (y * dx)


def test_derive_gamma_rule():
    alg = hypersurface_algebra()
    d = GammaDerivation(alg, +1, {
        "x": alg.gen_element("dx"),
        "y": alg.gen_element("dy"),
        "dx": Element(alg),
        "dy": Element(alg),
    })
    for n in (1, 2, 3):
        gn = alg.element({(("dy", n),): 1})
        expected = (alg.element({(("dy", n - 1),): 1}) if n > 1 else alg.one())
        assert derive(d, gn).is_zero()  # d(dy) = 0 kills the gamma rule image
    # d(y * gamma_n(dy)) = dy * gamma_n(dy) = (n+1) gamma_{n+1}(dy)
    y = alg.gen_element("y")
    for n in (1, 2):
        gn = alg.element({(("dy", n),): 1})
        img = derive(d, y * gn)
        assert img == alg.element({(("dy", n + 1),): n + 1})


def test_derive_witness_identities():
    # model with boundary dz = y, dy = 0: delta(gamma^p(dy)) = 0 and
    # delta(gamma^{p-1}(dy) dz) = -p gamma^p(dy)
    alg = GradedAlgebra(Z, [
        Generator("y", 1, EXTERIOR),
        Generator("z", 2, POLYNOMIAL),
        Generator("dy", 2, DIVIDED_POWER, weight=1),
        Generator("dz", 3, EXTERIOR, weight=1),
    ])
    dmap = {"y": alg.gen_element("dy"), "z": alg.gen_element("dz"),
            "dy": Element(alg), "dz": Element(alg)}
    d = GammaDerivation(alg, +1, dmap)
    delta = GammaDerivation(alg, -1, {
        "y": Element(alg),               # boundary of y is 0
        "z": alg.gen_element("y"),       # boundary of z is y
        "dy": Element(alg),              # -d(0)
        "dz": alg.gen_element("dy").scale(-1),  # -d(y)
    })
    for p in (2, 3):
        gp = alg.element({(("dy", p),): 1})
        assert derive(delta, gp).is_zero()
        beta = alg.element({(("dy", p - 1),): 1}) * alg.gen_element("dz")
        assert derive(delta, beta) == gp.scale(-p)


def test_derive_leibniz_random():
    alg = hypersurface_algebra()
    delta = GammaDerivation(alg, -1, {
        "x": Element(alg),
        "y": alg.element({(("x", 2),): 1}),
        "dx": Element(alg),
        "dy": alg.element({(("x", 1), ("dx", 1)): -2}),
    })
    rng = random.Random(2)
    monos = [alg.monomial(m) for m in
             ([("x", 2)], [("y", 1)], [("dx", 1)], [("dy", 2)],
              [("x", 1), ("dx", 1)], [("y", 1), ("dy", 1)])]
    for _ in range(200):
        a = alg.element({rng.choice(monos): rng.randint(-3, 3)})
        b = alg.element({rng.choice(monos): rng.randint(-3, 3)})
        lhs = derive(delta, a * b)
        da = list(a.terms)
        par = alg.mono_hdeg(da[0]) % 2 if da else 0
        rhs = derive(delta, a) * b + (a * derive(delta, b)).scale(-1 if par else 1)
        assert lhs == rhs


def test_derive_undefined_generator():
    alg = hypersurface_algebra()
    d = GammaDerivation(alg, +1, {"x": alg.gen_element("dx")})
    with pytest.raises(UndefinedGenerator):
        derive(d, alg.gen_element("y"))


def test_derivation_matrix_examples():
    alg = hypersurface_algebra()
    zero = GammaDerivation(alg, -1, {g.name: Element(alg) for g in alg.generators})
    s2 = basis_slice(alg, 2, 1, poly_bound=4)
    s1 = basis_slice(alg, 1, 1, poly_bound=6)
    m = derivation_matrix(zero, s2, s1)
    assert m.is_zero()
    # delta(dy) = -2 x dx as a 1x1 matrix in the bases {dy} -> {x dx}
    delta = GammaDerivation(alg, -1, {
        "x": Element(alg),
        "y": alg.element({(("x", 2),): 1}),
        "dx": Element(alg),
        "dy": alg.element({(("x", 1), ("dx", 1)): -2}),
    })
    from shukla.dpalgebra import Slice
    src = Slice(alg, 2, 1, None, (alg.monomial([("dy", 1)]),))
    tgt = Slice(alg, 1, 1, None, (alg.monomial([("x", 1), ("dx", 1)]),))
    m = derivation_matrix(delta, src, tgt)
    assert m.to_rows() == [[-2]]
    # d on span{y} -> span{dy} is (1)
    d = GammaDerivation(alg, +1, {
        "x": alg.gen_element("dx"), "y": alg.gen_element("dy"),
        "dx": Element(alg), "dy": Element(alg)})
    src = Slice(alg, 1, 0, None, (alg.monomial([("y", 1)]),))
    tgt = Slice(alg, 2, 1, None, (alg.monomial([("dy", 1)]),))
    assert derivation_matrix(d, src, tgt).to_rows() == [[1]]


def test_derivation_matrix_truncation_overflow():
    alg = hypersurface_algebra()
    delta = GammaDerivation(alg, -1, {
        "x": Element(alg),
        "y": alg.element({(("x", 2),): 1}),
        "dx": Element(alg),
        "dy": alg.element({(("x", 1), ("dx", 1)): -2}),
    })
    src = basis_slice(alg, 1, 0, poly_bound=4)   # contains x^2 y
    tgt = basis_slice(alg, 0, 0, poly_bound=2)   # too small for x^4
    with pytest.raises(TruncationOverflow):
        derivation_matrix(delta, src, tgt)


def test_homotopy_block_rules():
    # even w: h(w^{n+1}) = w^n dw, h(w^n dw) = 0
    data = contraction_complex(Z, [], [("w", 2)])
    alg = data.algebra
    for n in range(0, 4):
        e = alg.element({(("w", n + 1),): 1})
        expected = alg.element({alg.monomial([("w", n), ("dw", 1)]): 1})
        assert homotopy_h(data, e) == expected
        wn_dw = alg.element({alg.monomial([("w", n), ("dw", 1)]): 1})
        assert homotopy_h(data, wn_dw).is_zero()
    # odd w: h(w gamma_p(dw)) = gamma_{p+1}(dw), h(gamma_p(dw)) = 0
    data = contraction_complex(Z, [], [("w", 1)])
    alg = data.algebra
    for p in range(0, 4):
        e = alg.element({alg.monomial([("w", 1), ("dw", p)] if p else [("w", 1)]): 1})
        expected = alg.element({(("dw-index-fix", 0),): 1})
        got = homotopy_h(data, e)
        assert got == alg.element({alg.monomial([("dw", p + 1)]): 1})
        if p:
            gp = alg.element({alg.monomial([("dw", p)]): 1})
            assert homotopy_h(data, gp).is_zero()
    # h(1) = 0 in either case; with the ideal check it raises
    one = alg.one()
    assert homotopy_h(data, one).is_zero()
    with pytest.raises(NotInIdeal):
        homotopy_h(data, one, check_ideal=True)


def random_element(data, rng, max_terms=3):
    alg = data.algebra
    gens = alg.generators
    e = Element(alg)
    for _ in range(rng.randint(1, max_terms)):
        letters = []
        has_w = False
        for i, g in enumerate(gens):
            if g.kind == EXTERIOR:
                exp = rng.randint(0, 1)
            else:
                exp = rng.randint(0, 2)
            if exp:
                letters.append((g.name, exp))
                if g.name in data.w_names or g.name in data.dw_of.values():
                    has_w = True
        if not has_w:
            w = rng.choice(data.w_names)
            letters.append((w, 1))
        try:
            mono = alg.monomial(letters)
        except ValueError:
            continue
        e._add_term(mono, rng.randint(-4, 4))
    return e


def test_homotopy_identities_random():
    rng = random.Random(424242)
    for trial in range(25):
        nv = rng.randint(0, 2)
        nw = rng.randint(1, 3)
        v_gens = [(f"v{i}", rng.randint(1, 3)) for i in range(nv)]
        w_gens = [(f"w{i}", rng.randint(1, 3)) for i in range(nw)]
        data = contraction_complex(Z, v_gens, w_gens)
        D = data.boundary
        for _ in range(4):
            e = random_element(data, rng)
            if e.is_zero():
                continue
            # hD + Dh = Id on the ideal generated by W and dW
            lhs = homotopy_h(data, derive(D, e)) + derive(D, homotopy_h(data, e))
            assert lhs == e, (v_gens, w_gens, repr(e))
            # h^2 = 0
            assert homotopy_h(data, homotopy_h(data, e)).is_zero()
            # DhD = D
            assert derive(D, homotopy_h(data, derive(D, e))) == derive(D, e)


def test_homotopy_drops_w_adic_filtration():
    # h(I^r K) is inside I^{r-1} K, where I is generated by W
    rng = random.Random(7)
    data = contraction_complex(Z, [("v0", 2)], [("w0", 2), ("w1", 1)])
    alg = data.algebra
    w_indices = {alg.index[w] for w in data.w_names}

    def w_multiplicity(mono):
        return sum(e for i, e in mono if i in w_indices)

    for _ in range(50):
        e = random_element(data, rng)
        if e.is_zero():
            continue
        r = min((w_multiplicity(m) for m in e.terms), default=0)
        h = homotopy_h(data, e)
        for m in h.terms:
            assert w_multiplicity(m) >= max(r - 1, 0)
