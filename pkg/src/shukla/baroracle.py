"""Brute-force ground truth: the normalized cyclic bar complex.

For a commutative algebra A, finite free over the ground ring with a
basis containing 1, the slices A (x) (A/k)^(x q) carry the Hochschild
boundary b (as the q-lowering map) and the Connes boundary B (raising
q).  Totalizing through the mixed-complex machinery gives HH and HC,
which agree with the model pipelines exactly when A is free over k.
"""

from dataclasses import dataclass
from itertools import product

from .errors import NotQuasiMonic
from .mixed import DoubleMixedComplex, cyclic_total, hochschild_total
from .linalg import SparseMatrix
from .models import quasi_monic_reduce


@dataclass
class FiniteAlgebra:
    """Structure constants of A on a free basis whose first element is 1.

    mult[(i, j)] is the expansion of basis_i * basis_j as a dict
    {basis index: coefficient}.
    """

    ring: object
    basis: tuple
    mult: dict

    def __post_init__(self):
        if not self.basis:
            raise ValueError("the algebra needs at least a unit")
        r = len(self.basis)
        ring = self.ring
        for i in range(r):
            for j in range(r):
                mij = self.mult[(i, j)]
                if self.mult[(j, i)] != mij:
                    raise ValueError("structure constants not commutative")
                if i == 0:
                    expected = {j: ring.one} if j else {0: ring.one}
                    if mij != expected:
                        raise ValueError("basis element 0 is not a unit")
        for i in range(r):
            for j in range(r):
                for k in range(r):
                    if self._mul3(i, j, k) != self._mul3_right(i, j, k):
                        raise ValueError("structure constants not associative")

    @property
    def rank(self):
        return len(self.basis)

    def _mul_into(self, coeffs, j):
        out = {}
        ring = self.ring
        for i, c in coeffs.items():
            for k, v in self.mult[(i, j)].items():
                w = ring.add(out.get(k, ring.zero), ring.mul(c, v))
                if ring.is_zero(w):
                    out.pop(k, None)
                else:
                    out[k] = w
        return out

    def _mul3(self, i, j, k):
        # (i * j) * k
        return self._mul_into(self.mult[(i, j)], k)

    def _mul3_right(self, i, j, k):
        # i * (j * k), using commutativity to multiply i in from the right
        return self._mul_into(self.mult[(j, k)], i)

    def product(self, i, j):
        return self.mult[(i, j)]


def from_presentation(pres):
    """Finite free algebra on the reduced monomial basis of a quasi-monic
    presentation; raises NotQuasiMonic when no finite free basis exists."""
    if pres.const_relations:
        raise NotQuasiMonic("constant relations leave A non-free over k; "
                            "use the model pipelines instead")
    basis = tuple(pres.reduced_monomials())
    idx = {e: i for i, e in enumerate(basis)}
    ring = pres.ring
    mult = {}
    for i, e1 in enumerate(basis):
        for j, e2 in enumerate(basis):
            prod_exps = tuple(a + b for a, b in zip(e1, e2))
            reduced = quasi_monic_reduce(pres, {prod_exps: ring.one})
            mult[(i, j)] = {idx[e]: c for e, c in reduced.items()}
    return FiniteAlgebra(ring, basis, mult)


def cyclic_mixed(algebra, n_max):
    """The normalized cyclic mixed complex of A through tensor length
    n_max + 1, as a double mixed complex concentrated in p = 0."""
    ring = algebra.ring
    r = algebra.rank
    qmax = n_max + 1
    slices = {}
    labels = {}
    for q in range(qmax + 1):
        labs = [(i0,) + rest
                for i0 in range(r)
                for rest in product(range(1, r), repeat=q)]
        labels[q] = {lab: pos for pos, lab in enumerate(labs)}
        slices[(0, q)] = tuple(labs)
    maps_d = {}
    maps_b = {}
    for q in range(1, qmax + 1):
        maps_d[(0, q)] = _hochschild_boundary(algebra, q, slices[(0, q)],
                                              labels[q - 1])
    for q in range(qmax):
        maps_b[(0, q)] = _connes_boundary(algebra, q, slices[(0, q)],
                                          labels[q + 1])
    return DoubleMixedComplex(ring, slices, maps_d=maps_d, maps_b=maps_b,
                              window_total=qmax)


def _add_tensor(algebra, mat, row_index, col, tensor, coeff, slot, coeffs):
    """Accumulate a tensor whose given slot holds an expanded A-element."""
    ring = algebra.ring
    for k, v in coeffs.items():
        if slot > 0 and k == 0:
            continue  # normalized: unit in an interior slot dies
        lab = tensor[:slot] + (k,) + tensor[slot + 1:]
        mat.add_at(row_index[lab], col, ring.mul(coeff, v))


def _hochschild_boundary(algebra, q, source_labels, target_index):
    ring = algebra.ring
    mat = SparseMatrix(len(target_index), len(source_labels), ring)
    for col, lab in enumerate(source_labels):
        for i in range(q):
            sign = ring.one if i % 2 == 0 else ring.neg(ring.one)
            prod = algebra.product(lab[i], lab[i + 1])
            tensor = lab[:i] + (0,) + lab[i + 2:]
            _add_tensor(algebra, mat, target_index, col, tensor, sign, i, prod)
        sign = ring.one if q % 2 == 0 else ring.neg(ring.one)
        prod = algebra.product(lab[q], lab[0])
        tensor = (0,) + lab[1:q]
        _add_tensor(algebra, mat, target_index, col, tensor, sign, 0, prod)
    return mat


def _connes_boundary(algebra, q, source_labels, target_index):
    ring = algebra.ring
    mat = SparseMatrix(len(target_index), len(source_labels), ring)
    for col, lab in enumerate(source_labels):
        for i in range(q + 1):
            sign = ring.one if (q * i) % 2 == 0 else ring.neg(ring.one)
            rotated = lab[i:] + lab[:i]
            if any(x == 0 for x in rotated):
                continue  # some unit lands in an interior slot
            lab2 = (0,) + rotated
            mat.add_at(target_index[lab2], col, sign)
    return mat


def hh_oracle(algebra, n_max):
    """HH_n(A) for n <= n_max by brute force."""
    return hochschild_total(cyclic_mixed(algebra, n_max), n_max)


def hc_oracle(algebra, n_max):
    """HC_n(A) for n <= n_max by brute force."""
    return cyclic_total(cyclic_mixed(algebra, n_max), n_max)
