"""Divided-power envelopes of quasi-monic complete intersections and the
filtered de Rham complexes built from them.

The envelope of R = k[x_1..x_n] along relations f_1..f_r is presented
on formal words gamma^Q(f) x^alpha with alpha reduced; multiplying an
unreduced coefficient back in rewrites x_i^{m_i} into (lower terms plus
a weight bump), using f_i^s gamma_q(f_i) = ((q+s)!/q!) gamma_{q+s}(f_i).
Constant relations c contribute honest module relations
c * w = (q_t + 1) * w^{+t} instead of rewrites.

The gamma-filtration is by total weight |Q|.  From its graded pieces
and truncated quotients we build, for each Hodge index p, two chain
complexes over k:

  level complex   position i holds  F_i Omega^{p-i} / F_{i+1}   (graded)
  prime complex   position i holds  Omega^{p-i} / F_{i+1}       (truncated)

with the induced derivation lowering the position.  Homology of the
level complex at position n - p gives the weight-p Hodge layer of
Hochschild homology in degree n; the prime complex plays the same role
on the cyclic side (exactly, for at most two variables).
"""

from dataclasses import dataclass
from itertools import combinations

from .errors import TooManyVariables
from .linalg import HomologyGroup, SparseMatrix, _int_columns, homology_from_presentation
from .mixed import FilteredGroups


@dataclass
class Envelope:
    """Envelope data for a quasi-monic presentation.

    Words are (alpha, Q, S): reduced variable exponents, one gamma
    exponent per relation, and a sorted tuple of form indices (the
    dx factors).  The weight of a word is sum(Q).
    """

    presentation: object
    bounds: tuple        # exponent bound per variable
    var_rules: tuple     # (relation index, variable, m, lower poly)
    const_rules: tuple   # (relation index, c)

    @staticmethod
    def make(pres):
        pres.require_quasi_monic()
        bounds = tuple(pres.variable_bounds())
        var_rules = []
        const_rules = []
        for t, d in enumerate(pres.quasi_monic):
            if d[0] == "var":
                var_rules.append((t, d[1], d[2], d[3]))
            else:
                const_rules.append((t, d[1]))
        return Envelope(pres, bounds, tuple(var_rules), tuple(const_rules))

    @property
    def ring(self):
        return self.presentation.ring

    @property
    def nvars(self):
        return len(self.presentation.variables)

    @property
    def nrels(self):
        return len(self.presentation.relations)

    def reduced_exponents(self):
        exps = [()]
        for b in self.bounds:
            exps = [e + (k,) for e in exps for k in range(b)]
        return sorted(exps)


def _push_coefficient(env, terms, Q, out, sign=1):
    """Rewrite integer-coefficient terms {exps: c} times gamma^Q into
    reduced words, bumping gamma exponents along the way."""
    work = [(e, c, Q) for e, c in terms.items()]
    rules = {v: (t, m, lower) for t, v, m, lower in env.var_rules}
    while work:
        e, c, Q = work.pop()
        if c == 0:
            continue
        hit = None
        for i, b in enumerate(env.bounds):
            if e[i] >= b:
                hit = i
                break
        if hit is None:
            key = (e, Q)
            out[key] = out.get(key, 0) + c * sign
            if out[key] == 0:
                del out[key]
            continue
        t, m, lower = rules[hit]
        rest = tuple(v - (m if i == hit else 0) for i, v in enumerate(e))
        # x_hit^m = f_t + lower; the f_t branch bumps gamma_t
        bumped = tuple(q + (1 if i == t else 0) for i, q in enumerate(Q))
        work.append((rest, c * (Q[t] + 1), bumped))
        for le, lc in lower.items():
            ne = tuple(a + b for a, b in zip(rest, le))
            work.append((ne, c * lc, Q))
    return out


def word_product(env, w1, w2):
    """Product of two envelope words as a dict word -> coefficient.

    Combines the binomial rule gamma^a(f) gamma^b(f) = C(a+b, a)
    gamma^{a+b}(f) with the rewriting of the coefficient product; the
    dx-parts multiply with the usual exterior sign.
    """
    from math import comb
    a1, q1, s1 = w1
    a2, q2, s2 = w2
    if set(s1) & set(s2):
        return {}
    sign = 1
    for j in s2:
        sign *= (-1) ** sum(1 for i in s1 if i > j)
    coeff = sign
    for t in range(env.nrels):
        if q1[t] and q2[t]:
            coeff *= comb(q1[t] + q2[t], q1[t])
    Q = tuple(a + b for a, b in zip(q1, q2))
    S = tuple(sorted(s1 + s2))
    alpha = tuple(a + b for a, b in zip(a1, a2))
    pushed = {}
    _push_coefficient(env, {alpha: coeff}, Q, pushed)
    return {(na, nq, S): c for (na, nq), c in pushed.items()}


def dbar(env, element, weight_cap=None):
    """The gamma-derivation extending de Rham d on envelope forms.

    element: dict word -> integer coefficient.  Terms whose weight
    exceeds weight_cap are dropped (the quotient by that filtration
    level); without a cap the result is exact.
    """
    variables = env.presentation.variables
    relations = env.presentation.relations
    out = {}

    def add(word, c):
        if c:
            out[word] = out.get(word, 0) + c
            if out[word] == 0:
                del out[word]

    for (alpha, Q, S), coeff in element.items():
        # de Rham part on the reduced coefficient
        if weight_cap is None or sum(Q) <= weight_cap:
            for j, a in enumerate(alpha):
                if a == 0 or j in S:
                    continue
                sign = (-1) ** sum(1 for s in S if s < j)
                na = tuple(v - (1 if i == j else 0) for i, v in enumerate(alpha))
                ns = tuple(sorted(S + (j,)))
                add((na, Q, ns), coeff * a * sign)
        # gamma part: gamma_q(f_t) -> gamma_{q-1}(f_t) df_t
        for t, q in enumerate(Q):
            if q == 0:
                continue
            rel = relations[t]
            Qm = tuple(v - (1 if i == t else 0) for i, v in enumerate(Q))
            for j in range(len(variables)):
                if j in S:
                    continue
                dpart = {}
                for exps, c in rel.items():
                    if exps[j]:
                        ne = tuple(v - (1 if i == j else 0)
                                   for i, v in enumerate(exps))
                        dpart[ne] = dpart.get(ne, 0) + c * exps[j]
                if not dpart:
                    continue
                shifted = {tuple(a + b for a, b in zip(alpha, e)): c
                           for e, c in dpart.items()}
                sign = (-1) ** sum(1 for s in S if s < j)
                ns = tuple(sorted(S + (j,)))
                pushed = {}
                _push_coefficient(env, shifted, Qm, pushed)
                for (na, nq), c in pushed.items():
                    if weight_cap is not None and sum(nq) > weight_cap:
                        continue
                    add((na, nq, ns), coeff * c * sign)
    return out


def envelope_slice(env, weight_max, poly_bound=None):
    """Deterministic list of envelope words gamma^Q(f) x^alpha with
    weight at most weight_max, ordered by weight then exponents."""
    words = []
    for alpha in env.reduced_exponents():
        if poly_bound is not None and sum(alpha) > poly_bound:
            continue
        for Q in _weights_upto(env.nrels, weight_max):
            words.append((alpha, Q, ()))
    words.sort(key=lambda w: (sum(w[1]), w[1], w[0]))
    return words


def _weights_upto(r, wmax):
    out = []

    def rec(i, left, acc):
        if i == r:
            out.append(tuple(acc))
            return
        for v in range(left + 1):
            acc.append(v)
            rec(i + 1, left - v, acc)
            acc.pop()

    rec(0, wmax, [])
    return sorted(out, key=lambda q: (sum(q), q))


def _form_words(env, form_degree, weights):
    """Words with the given dx-degree and gamma weight in `weights`."""
    if form_degree > env.nvars or form_degree < 0:
        return []
    words = []
    ss = list(combinations(range(env.nvars), form_degree))
    for alpha in env.reduced_exponents():
        for Q in weights:
            for S in ss:
                words.append((alpha, Q, tuple(S)))
    words.sort(key=lambda w: (sum(w[1]), w[1], w[0], w[2]))
    return words


def _weights_exact(env, w):
    return [q for q in _weights_upto(env.nrels, w) if sum(q) == w]


def _relation_vectors(env, words, index, weight_cap):
    """Module relations on the span of `words`: the ring modulus and the
    constant-relation bumps c*w = (q_t+1)*w^{+t} (bump dropped beyond
    the cap, i.e. in the quotient by that filtration level)."""
    rels = []
    m = env.ring.modulus
    if m:
        for w in words:
            rels.append({index[w]: m})
    for t, c in env.const_rules:
        for w in words:
            alpha, Q, S = w
            vec = {index[w]: int(c)}
            bumped = tuple(q + (1 if i == t else 0) for i, q in enumerate(Q))
            if weight_cap is None or sum(bumped) <= weight_cap:
                w2 = (alpha, bumped, S)
                j = index.get(w2)
                if j is None:
                    raise AssertionError("bump target missing from word list")
                vec[j] = vec.get(j, 0) - (Q[t] + 1)
            if vec:
                rels.append(vec)
    return rels


@dataclass
class FilteredComplex:
    """A chain complex of presented k-modules, positions 0..p, with the
    differential lowering the position by one."""

    env: Envelope
    hodge: int
    positions: list      # list of (words, index, relation vectors)
    mats: dict           # j -> SparseMatrix, position j -> j-1

    def homology(self, j):
        if j < 0 or j > self.hodge:
            return HomologyGroup(0, ())
        words, _, rels = self.positions[j]
        n = len(words)
        if n == 0:
            return HomologyGroup(0, ())
        d_in = self.mats.get(j + 1)
        d_out = self.mats.get(j)
        in_cols = _int_columns(d_in) if d_in is not None else []
        out_dim = len(self.positions[j - 1][0]) if j >= 1 else 0
        out_cols = _int_columns(d_out) if d_out is not None else [dict() for _ in range(n)]
        rel_out = self.positions[j - 1][2] if j >= 1 else []
        group, _ = homology_from_presentation(
            in_cols, out_cols, n, out_dim, rel_mid=rels, rel_out=rel_out)
        if self.env.ring.kind == "Q":
            return HomologyGroup(group.free_rank, ())
        return group


def _build_filtered(env, p, graded):
    """Shared builder: graded=True gives the level complex (weight
    exactly i at position i), graded=False the prime complex (weight
    at most i, quotient by F_{i+1})."""
    positions = []
    for i in range(p + 1):
        weights = _weights_exact(env, i) if graded else _weights_upto(env.nrels, i)
        words = _form_words(env, p - i, weights)
        index = {w: j for j, w in enumerate(words)}
        rels = _relation_vectors(env, words, index, i)
        positions.append((words, index, rels))
    mats = {}
    ring = env.ring
    for j in range(1, p + 1):
        src_words, _, _ = positions[j]
        tgt_words, tgt_index, _ = positions[j - 1]
        mat = SparseMatrix(len(tgt_words), len(src_words), ring)
        for col, w in enumerate(src_words):
            img = dbar(env, {w: ring.one}, weight_cap=j - 1)
            for w2, c in img.items():
                if graded and sum(w2[1]) != j - 1:
                    raise AssertionError("derivation dropped weight by more than one")
                row = tgt_index.get(w2)
                if row is None:
                    raise AssertionError(f"image word {w2} missing at position {j - 1}")
                mat.add_at(row, col, c)
        mats[j] = mat
    return FilteredComplex(env, p, positions, mats)


def L_complex(env, p):
    """The level complex of Hodge index p: position i carries the weight-i
    graded piece of the p-i forms."""
    return _build_filtered(env, p, graded=True)


def Lprime_complex(env, p):
    """The truncated complex of Hodge index p: position i carries the
    p-i forms modulo filtration weight i+1."""
    return _build_filtered(env, p, graded=False)


def hodge_hh(env, n_max):
    """Hochschild homology with its Hodge decomposition: the (n, p) layer
    is the homology of the level complex L^p at position n - p."""
    layers = {}
    totals = {}
    complexes = {}
    for n in range(n_max + 1):
        parts = []
        for p in range(n + 1):
            j = n - p
            if j > p:
                continue  # positions run 0..p
            if p not in complexes:
                complexes[p] = L_complex(env, p)
            g = complexes[p].homology(j)
            if not g.is_trivial():
                layers[(n, p)] = g
            parts.append(g)
        totals[n] = HomologyGroup(0, ()).direct_sum(*parts)
    return FilteredGroups(totals, layers)


def lprime_homology(env, p, q):
    """H_q of the truncated complex: the degenerate second-page entry of
    the cyclic spectral sequence at column p, row q."""
    return Lprime_complex(env, p).homology(q)


def hc_layers_small(env, n_max):
    """Cyclic homology layers via the truncated complexes, valid for
    presentations in at most two variables."""
    if env.nvars > 2:
        raise TooManyVariables(
            "the truncated-complex layer formula holds for <= 2 variables; "
            "use the forms-complex cyclic assembly instead")
    layers = {}
    totals = {}
    complexes = {}
    for n in range(n_max + 1):
        parts = []
        for p in range(n + 1):
            j = n - p
            if j > p:
                continue
            if p not in complexes:
                complexes[p] = Lprime_complex(env, p)
            g = complexes[p].homology(j)
            if not g.is_trivial():
                layers[(n, p)] = g
            parts.append(g)
        totals[n] = HomologyGroup(0, ()).direct_sum(*parts)
    return FilteredGroups(totals, layers)
