"""Graded vector spaces, modules and algebras over P_W = F_p[y_1..y_w].

Everything lives on a finite degree window ``[lo, hi]``.  A module also
records what is known outside the window: ``bounded_below`` means it is zero
below ``lo`` and ``bounded_above`` that it is zero above ``hi``.  Asking for a
degree outside the window that is not known to vanish raises
:class:`WindowTooSmall`; nothing is ever silently truncated to zero.

Action matrices use the column convention: ``M.act(k, d)`` maps coordinates
in degree ``d`` to coordinates in degree ``d + sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import linalg as la


class WindowTooSmall(Exception):
    """The answer depends on degrees outside the available window."""


@dataclass(frozen=True)
class PWAlgebra:
    p: int
    w: int

    def __post_init__(self):
        la.check_prime(self.p)
        if self.w < 0:
            raise ValueError("rank of W must be nonnegative")

    @property
    def sigma(self) -> int:
        return 1 if self.p == 2 else 2

    @property
    def labels(self) -> list[str]:
        return [f"y{k + 1}" for k in range(self.w)]

    def sigma_j(self, j: int) -> int:
        return self.sigma * j


@lru_cache(maxsize=None)
def monomials(r: int, total: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of length r summing to ``total``, lex-descending."""
    if total < 0:
        return ()
    if r == 0:
        return ((),) if total == 0 else ()
    out = []
    for a in range(total, -1, -1):
        out.extend((a,) + rest for rest in monomials(r - 1, total - a))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(r: int, total: int) -> dict:
    return {m: i for i, m in enumerate(monomials(r, total))}


def poly_dim(r: int, e: int, sigma: int) -> int:
    """dim of the degree-e part of a polynomial ring on r generators of degree sigma."""
    if e < 0 or e % sigma:
        return 0
    return len(monomials(r, e // sigma))


@lru_cache(maxsize=None)
def _var_mult(r: int, j: int, total: int) -> np.ndarray:
    """Matrix of multiplication by the j-th variable, exponent-total ``total`` -> ``total+1``."""
    src = monomials(r, total)
    idx = monomial_index(r, total + 1)
    A = la.zeros(len(idx), len(src))
    for c, m in enumerate(src):
        m2 = list(m)
        m2[j] += 1
        A[idx[tuple(m2)], c] = 1
    A.setflags(write=False)
    return A


@dataclass(frozen=True)
class GradedVS:
    lo: int
    hi: int
    dims: tuple[int, ...]
    labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if len(self.dims) != max(self.hi - self.lo + 1, 0):
            raise ValueError("dims must cover the window exactly")

    def dim(self, d: int) -> int:
        return self.dims[d - self.lo] if self.lo <= d <= self.hi else 0

    def basis_labels(self, d: int) -> tuple[str, ...]:
        if self.labels is not None and self.lo <= d <= self.hi:
            return self.labels[d - self.lo]
        return tuple(f"e{d}_{i}" for i in range(self.dim(d)))


@dataclass(frozen=True, eq=False)
class GradedModule:
    """A graded P_W-module on the window ``[lo, hi]``.

    ``actions[k][d - lo]`` is the matrix of y_{k+1} from degree d to d+sigma,
    present for every d with d + sigma <= hi.
    """

    alg: PWAlgebra
    lo: int
    hi: int
    dims: tuple[int, ...]
    actions: tuple[tuple[np.ndarray, ...], ...]
    bounded_below: bool = True
    bounded_above: bool = False
    labels: tuple[tuple[str, ...], ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.hi - self.lo + 1
        if n < 0:
            raise ValueError("empty window must have hi = lo - 1")
        if len(self.dims) != n:
            raise ValueError("dims must cover the window exactly")
        if len(self.actions) != self.alg.w:
            raise ValueError("need one action list per generator")
        s = self.alg.sigma
        want = max(n - s, 0)
        for k, mats in enumerate(self.actions):
            if len(mats) != want:
                raise ValueError(f"generator y{k + 1}: expected {want} matrices, got {len(mats)}")
            for i, A in enumerate(mats):
                d = self.lo + i
                if A.shape != (self.dims[i + s], self.dims[i]):
                    raise ValueError(
                        f"generator y{k + 1}, degree {d}: shape {A.shape}, "
                        f"expected {(self.dims[i + s], self.dims[i])}"
                    )

    # -- basic access -------------------------------------------------
    @property
    def p(self) -> int:
        return self.alg.p

    @property
    def w(self) -> int:
        return self.alg.w

    @property
    def sigma(self) -> int:
        return self.alg.sigma

    @property
    def space(self) -> GradedVS:
        return GradedVS(self.lo, self.hi, self.dims, self.labels)

    def known(self, d: int) -> bool:
        return (self.lo <= d <= self.hi) or (d < self.lo and self.bounded_below) or (
            d > self.hi and self.bounded_above
        )

    def dim(self, d: int) -> int:
        if self.lo <= d <= self.hi:
            return self.dims[d - self.lo]
        if self.known(d):
            return 0
        raise WindowTooSmall(f"degree {d} is outside the window [{self.lo}, {self.hi}]")

    def act(self, k: int, d: int) -> np.ndarray:
        """Matrix of y_{k+1}: M_d -> M_{d+sigma}."""
        m, n = self.dim(d + self.sigma), self.dim(d)
        if m == 0 or n == 0:
            return la.zeros(m, n)
        return self.actions[k][d - self.lo]

    def act_form(self, coeffs, d: int) -> np.ndarray:
        """Matrix of the linear form sum_k coeffs[k] y_{k+1} on degree d (cached)."""
        key = ("form", tuple(int(c) % self.p for c in coeffs), d)
        if key not in self._cache:
            out = la.zeros(self.dim(d + self.sigma), self.dim(d))
            for k, c in enumerate(key[1]):
                if c:
                    out = (out + c * self.act(k, d)) % self.p
            self._cache[key] = out
        return self._cache[key]

    def power(self, k: int, n: int, d: int) -> np.ndarray:
        """Matrix of y_{k+1}^n on degree d (cached)."""
        if n == 0:
            return la.eye(self.dim(d))
        key = ("pow", k, n, d)
        if key not in self._cache:
            prev = self.power(k, n - 1, d)
            self._cache[key] = la.matmul(self.act(k, d + (n - 1) * self.sigma), prev, self.p)
        return self._cache[key]

    def act_monomial(self, exps, d: int) -> np.ndarray:
        """Matrix of y^exps on degree d."""
        out = la.eye(self.dim(d))
        e = d
        for k, a in enumerate(exps):
            if a:
                out = la.matmul(self.power(k, a, e), out, self.p)
                e += a * self.sigma
        return out

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def restrict(self, lo: int, hi: int) -> "GradedModule":
        """The same module viewed on a smaller window."""
        if lo < self.lo or hi > self.hi:
            raise WindowTooSmall("can only shrink the window")
        s = self.sigma
        dims = tuple(self.dim(d) for d in range(lo, hi + 1))
        acts = tuple(
            tuple(self.act(k, d) for d in range(lo, hi - s + 1)) for k in range(self.w)
        )
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[d - self.lo] for d in range(lo, hi + 1))
        return GradedModule(
            self.alg, lo, hi, dims, acts,
            bounded_below=self.bounded_below and lo == self.lo,
            bounded_above=self.bounded_above and hi == self.hi,
            labels=labels,
        )


def make_module(alg: PWAlgebra, lo: int, hi: int, dims: dict, action, **kw) -> GradedModule:
    """Build a module from ``dims[d]`` and a callable ``action(k, d) -> matrix``."""
    s = alg.sigma
    dl = tuple(int(dims.get(d, 0)) for d in range(lo, hi + 1))

    def get(k, d):
        m, n = dl[d + s - lo], dl[d - lo]
        if m == 0 or n == 0:
            return la.zeros(m, n)
        return la.mat(action(k, d), alg.p, (m, n))

    acts = tuple(tuple(get(k, d) for d in range(lo, hi - s + 1)) for k in range(alg.w))
    return GradedModule(alg, lo, hi, dl, acts, **kw)


def zero_module(alg: PWAlgebra, lo: int, hi: int) -> GradedModule:
    return make_module(alg, lo, hi, {}, None, bounded_below=True, bounded_above=True)


def validate_module(M: GradedModule) -> list[str]:
    """Every commutativity failure, as readable messages.  Empty iff valid."""
    out = []
    s, p = M.sigma, M.p
    for d in range(M.lo, M.hi - 2 * s + 1):
        for j in range(M.w):
            for k in range(j + 1, M.w):
                a = la.matmul(M.act(j, d + s), M.act(k, d), p)
                b = la.matmul(M.act(k, d + s), M.act(j, d), p)
                if not np.array_equal(a, b):
                    out.append(f"y{j + 1} y{k + 1} != y{k + 1} y{j + 1} in degree {d}")
    for k in range(M.w):
        for i, A in enumerate(M.actions[k]):
            if np.any(A < 0) or np.any(A >= p):
                out.append(f"y{k + 1} in degree {M.lo + i}: entries not reduced mod {p}")
    return out


def suspend(M: GradedModule, d: int) -> GradedModule:
    labels = M.labels
    return GradedModule(
        M.alg, M.lo + d, M.hi + d, M.dims, M.actions,
        M.bounded_below, M.bounded_above, labels,
    )


def hilbert_function(M: GradedModule) -> dict[int, int]:
    return {d: M.dim(d) for d in M.degrees()}


def matlis_dual(M: GradedModule) -> GradedModule:
    """Degreewise dual with negated grading.

    y_k on (M^*)_{-e} -> (M^*)_{-e+sigma} is the transpose of y_k: M_{e-sigma} -> M_e.
    """
    s = M.sigma
    lo, hi = -M.hi, -M.lo

    def action(k, d):
        return M.act(k, -d - s).T

    return make_module(
        M.alg, lo, hi, {d: M.dim(-d) for d in range(lo, hi + 1)}, action,
        bounded_below=M.bounded_above, bounded_above=M.bounded_below,
    )


def direct_sum(*mods: GradedModule) -> GradedModule:
    if not mods:
        raise ValueError("need at least one summand")
    alg, lo, hi = mods[0].alg, mods[0].lo, mods[0].hi
    for M in mods:
        if (M.alg, M.lo, M.hi) != (alg, lo, hi):
            raise ValueError("summands must share algebra and window")
    s = alg.sigma

    def action(k, d):
        out = la.zeros(sum(M.dim(d + s) for M in mods), sum(M.dim(d) for M in mods))
        r = c = 0
        for M in mods:
            A = M.act(k, d)
            out[r:r + A.shape[0], c:c + A.shape[1]] = A
            r += A.shape[0]
            c += A.shape[1]
        return out

    return make_module(
        alg, lo, hi, {d: sum(M.dim(d) for M in mods) for d in range(lo, hi + 1)}, action,
        bounded_below=all(M.bounded_below for M in mods),
        bounded_above=all(M.bounded_above for M in mods),
    )


# -- submodules and subquotients ------------------------------------------

def is_submodule(M: GradedModule, basis: dict) -> list[int]:
    """Degrees where the span of ``basis[d]`` fails to be closed under the actions."""
    bad = []
    p, s = M.p, M.sigma
    for d in range(M.lo, M.hi - s + 1):
        B = basis.get(d)
        if B is None or B.shape[1] == 0:
            continue
        T = basis.get(d + s, la.zeros(M.dim(d + s), 0))
        for k in range(M.w):
            img = la.matmul(M.act(k, d), B, p)
            if la.rank(np.hstack([T, img]), p) != la.rank(T, p):
                bad.append(d)
                break
    return bad


def subquotient(M: GradedModule, top: dict, bottom: dict, reps: dict | None = None) -> GradedModule:
    """The module top/bottom for action-closed subspaces bottom ⊆ top of M.

    Its degree-d basis is the classes of ``reps[d]``, which default to
    columns of ``top[d]`` complementing ``bottom[d]``.
    """
    p, s = M.p, M.sigma

    def get(D, d):
        B = D.get(d)
        return B if B is not None else la.zeros(M.dim(d), 0)

    if reps is None:
        reps = {d: la.complement_in(get(bottom, d), get(top, d), p) for d in M.degrees()}

    def action(k, d):
        C = get(reps, d)
        Bn, Cn = get(bottom, d + s), get(reps, d + s)
        img = la.matmul(M.act(k, d), C, p)
        x = la.solve(np.hstack([Bn, Cn]), img, p)
        if x is None:
            raise ValueError(f"subspace not action-closed at degree {d}")
        return x[Bn.shape[1]:]

    return make_module(
        M.alg, M.lo, M.hi, {d: get(reps, d).shape[1] for d in M.degrees()}, action,
        bounded_below=M.bounded_below, bounded_above=M.bounded_above,
    )


def submodule(M: GradedModule, basis: dict) -> GradedModule:
    return subquotient(M, basis, {}, reps=basis)


# -- bounded factors, subspaces, j-free modules ---------------------------

@dataclass(frozen=True)
class BoundedFactor:
    """Graded data of a bounded connected algebra N (dims in degrees 0..t).

    ``mult`` may hold the multiplication, but only the graded dimensions are
    used anywhere downstream.
    """

    dims: tuple[int, ...]
    mult: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.dims or self.dims[0] != 1:
            raise ValueError("bounded factor must be connected (dim 1 in degree 0)")
        if self.dims[-1] == 0:
            raise ValueError("top entry must be nonzero")
        if any(n < 0 for n in self.dims):
            raise ValueError("negative dimension")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @property
    def connected(self) -> bool:
        return self.dims[0] == 1

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    @classmethod
    def point(cls) -> "BoundedFactor":
        return cls((1,))

    @classmethod
    def from_dims(cls, dims: dict) -> "BoundedFactor":
        t = max(dims)
        return cls(tuple(int(dims.get(k, 0)) for k in range(t + 1)))


@dataclass(frozen=True, eq=False)
class SubspaceV:
    """A subspace V of W = F_p^w, given by a w x r matrix of full column rank."""

    matrix: np.ndarray
    p: int

    def __post_init__(self):
        A = la.mat(self.matrix, self.p)
        if A.ndim != 2:
            raise ValueError("V must be a w x r matrix")
        object.__setattr__(self, "matrix", A)
        if la.rank(A, self.p) != A.shape[1]:
            raise ValueError("columns of V must be linearly independent")

    @property
    def w(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]

    def same_subspace(self, other: "SubspaceV") -> bool:
        if self.rank != other.rank or self.w != other.w:
            return False
        return la.rank(np.hstack([self.matrix, other.matrix]), self.p) == self.rank

    def annihilating_forms(self) -> np.ndarray:
        """Rows spanning the linear forms on W vanishing on V, shape (w - r, w)."""
        return la.nullspace(self.matrix.T, self.p).T.copy()

    @classmethod
    def full(cls, w: int, p: int) -> "SubspaceV":
        return cls(la.eye(w), p)

    @classmethod
    def zero(cls, w: int, p: int) -> "SubspaceV":
        return cls(la.zeros(w, 0), p)


def pv_action(V: SubspaceV, k: int, e: int, sigma: int) -> np.ndarray:
    """Matrix of y_{k+1} on (P_V)_e, acting as sum_j V[k, j] * (j-th coordinate of V)."""
    r = V.rank
    src = poly_dim(r, e, sigma)
    dst = poly_dim(r, e + sigma, sigma)
    out = la.zeros(dst, src)
    if src == 0 or dst == 0:
        return out
    for j in range(r):
        c = int(V.matrix[k, j])
        if c:
            out = (out + c * _var_mult(r, j, e // sigma)) % V.p
    return out


def pv_module(alg: PWAlgebra, V: SubspaceV, lo: int, hi: int, shift: int = 0) -> GradedModule:
    """Sigma^shift P_V as a P_W-module."""
    return jfree_build(alg, V, shift, BoundedFactor.point(), lo, hi)


def jfree_build(
    alg: PWAlgebra, V: SubspaceV, d: int, N: BoundedFactor, lo: int | None = None, hi: int | None = None
) -> GradedModule:
    """Sigma^d (P_V ⊗ N) as a P_W-module on the window [lo, hi].

    The degree-e basis is ordered by (N-degree k, N-basis index, monomial of
    P_V in degree e - d - k), with monomials lex-descending.
    """
    if V.w != alg.w:
        raise ValueError(f"V has rank-of-W {V.w}, algebra has w = {alg.w}")
    if V.p != alg.p:
        raise ValueError("V and algebra over different primes")
    if lo is None:
        lo = d
    if hi is None:
        hi = d + N.top + 4 * alg.sigma
    s = alg.sigma

    def dim(e):
        return sum(N.dim(k) * poly_dim(V.rank, e - d - k, s) for k in range(N.top + 1))

    def action(k, e):
        blocks = []
        for t in range(N.top + 1):
            A = pv_action(V, k, e - d - t, s)
            blocks.extend([A] * N.dim(t))
        out = la.zeros(dim(e + s), dim(e))
        r = c = 0
        for A in blocks:
            out[r:r + A.shape[0], c:c + A.shape[1]] = A
            r += A.shape[0]
            c += A.shape[1]
        return out

    return make_module(
        alg, lo, hi, {e: dim(e) for e in range(lo, hi + 1)}, action,
        bounded_below=lo <= d, bounded_above=(V.rank == 0 and hi >= d + N.top),
    )


def subsets(w: int, a: int) -> list[tuple[int, ...]]:
    return list(combinations(range(w), a))


# -- algebras ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    """A graded-commutative P_W-algebra on a window.

    ``mult[(a, b)]`` has shape ``(dim_{a+b}, dim_a, dim_b)``.  ``unit`` is a
    vector in degree 0.  The P_W-module structure in ``module`` must agree
    with multiplication by the images of the y_k (checked by validate_algebra).
    """

    module: GradedModule
    unit: np.ndarray
    mult: dict

    @property
    def p(self) -> int:
        return self.module.p

    def product(self, a: int, x: np.ndarray, b: int, y: np.ndarray) -> np.ndarray:
        """x in degree a times y in degree b (vectors)."""
        T = self.mult.get((a, b))
        if T is None:
            M = self.module
            if M.dim(a) == 0 or M.dim(b) == 0 or M.dim(a + b) == 0:
                return la.zeros(M.dim(a + b), 1)[:, 0]
            raise WindowTooSmall(f"product of degrees {a} and {b} not stored")
        return np.einsum("kij,i,j->k", T, x, y) % self.p

    def left_mult(self, a: int, x: np.ndarray, b: int) -> np.ndarray:
        """Matrix of y -> x*y from degree b to degree a+b."""
        M = self.module
        T = self.mult.get((a, b))
        if T is None:
            if M.dim(a) == 0 or M.dim(b) == 0 or M.dim(a + b) == 0:
                return la.zeros(M.dim(a + b), M.dim(b))
            raise WindowTooSmall(f"product of degrees {a} and {b} not stored")
        return np.einsum("kij,i->kj", T, x) % self.p


def validate_algebra(R: GradedAlgebra) -> list[str]:
    M, p, s = R.module, R.p, R.module.sigma
    out = validate_module(M)
    lo, hi = M.lo, M.hi
    if R.unit.shape != (M.dim(0),):
        return out + ["unit must be a degree-0 vector"]
    for b in M.degrees():
        if M.dim(b) == 0:
            continue
        for x in la.eye(M.dim(b)).T:
            if not np.array_equal(R.product(0, R.unit, b, x), x):
                out.append(f"unit is not a left identity in degree {b}")
                break
            if not np.array_equal(R.product(b, x, 0, R.unit), x):
                out.append(f"unit is not a right identity in degree {b}")
                break
    for (a, b), T in R.mult.items():
        if (b, a) not in R.mult:
            continue
        sign = -1 if (a * b) % 2 else 1
        S = np.transpose(R.mult[(b, a)], (0, 2, 1))
        if not np.array_equal(T % p, (sign * S) % p):
            out.append(f"not graded-commutative in degrees ({a}, {b})")
    degs = [d for d in M.degrees() if M.dim(d)]
    for a in degs:
        for b in degs:
            for c in degs:
                if a + b + c > hi or a + b > hi or b + c > hi:
                    continue
                if (a, b) not in R.mult or (a + b, c) not in R.mult:
                    continue
                if (b, c) not in R.mult or (a, b + c) not in R.mult:
                    continue
                lhs = np.einsum("mkc,kab->mabc", R.mult[(a + b, c)], R.mult[(a, b)]) % p
                rhs = np.einsum("mak,kbc->mabc", R.mult[(a, b + c)], R.mult[(b, c)]) % p
                if not np.array_equal(lhs, rhs):
                    out.append(f"not associative in degrees ({a}, {b}, {c})")
    # module structure = multiplication by the image of y_k
    if M.dim(s) and lo <= 0:
        gens = [M.act(k, 0) @ R.unit % p for k in range(M.w)]
        for d in range(lo, hi - s + 1):
            if M.dim(d) == 0 or (s, d) not in R.mult:
                continue
            for k in range(M.w):
                if not np.array_equal(R.left_mult(s, gens[k], d), M.act(k, d)):
                    out.append(f"y{k + 1} action differs from multiplication in degree {d}")
    return out


def algebra_from_table(
    alg: PWAlgebra,
    lo: int,
    hi: int,
    basis: dict,
    product,
    gens: list,
    **kw,
) -> GradedAlgebra:
    """Build an algebra from labelled bases and a product rule.

    ``basis[d]`` lists hashable labels, ``product(u, v)`` returns a dict
    label -> coefficient (labels of degree deg u + deg v, possibly outside the
    window), and ``gens[k]`` is the label-dict of the image of y_{k+1}.
    """
    p, s = alg.p, alg.sigma
    index = {d: {u: i for i, u in enumerate(basis.get(d, []))} for d in range(lo, hi + 1)}

    def vec(d, comb):
        v = la.zeros(len(index[d]), 1)[:, 0]
        for u, c in comb.items():
            v[index[d][u]] = (v[index[d][u]] + c) % p
        return v

    mult = {}
    for a in range(lo, hi + 1):
        for b in range(lo, hi + 1):
            if not (lo <= a + b <= hi):
                continue
            T = la.zeros(len(index[a + b]), len(index[a]) * len(index[b])).reshape(
                len(index[a + b]), len(index[a]), len(index[b]))
            for u, i in index[a].items():
                for v, j in index[b].items():
                    T[:, i, j] = vec(a + b, product(u, v))
            mult[(a, b)] = T
    unit = la.zeros(len(index[0]), 1)[:, 0]
    unit[0] = 1
    gvec = [vec(s, g) for g in gens]

    def action(k, d):
        return np.einsum("kij,i->kj", mult[(s, d)], gvec[k]) % p

    M = make_module(alg, lo, hi, {d: len(index[d]) for d in range(lo, hi + 1)}, action, **kw)
    return GradedAlgebra(M, unit, mult)


def tensor_polynomial_algebra(alg: PWAlgebra, N_basis: dict, N_product, lo: int, hi: int,
                              change: np.ndarray | None = None) -> GradedAlgebra:
    """P_W ⊗ N for a bounded algebra N given by labelled bases and products.

    With ``change`` (an invertible w x w matrix) the generator y_k acts as
    sum_i change[i, k] y_i, a linear change of coordinates on W.
    """
    p, s, w = alg.p, alg.sigma, alg.w
    basis = {}
    for d in range(lo, hi + 1):
        labels = []
        for nd, nb in sorted(N_basis.items()):
            for m in monomials(w, (d - nd) // s) if (d - nd) >= 0 and (d - nd) % s == 0 else ():
                labels.extend((m, u) for u in nb)
        basis[d] = labels

    def product(x, y):
        (m1, u1), (m2, u2) = x, y
        m = tuple(a + b for a, b in zip(m1, m2))
        # polynomial generators sit in even degree for odd p, so signs come only from N
        return {(m, u): c for u, c in N_product(u1, u2).items()}

    unit_n = N_basis[0][0]
    gens = []
    C = np.eye(w, dtype=np.int64) if change is None else la.mat(change, p)
    for k in range(w):
        g = {}
        for i in range(w):
            if C[i, k]:
                e = [0] * w
                e[i] = 1
                g[(tuple(e), unit_n)] = int(C[i, k])
        gens.append(g)
    return algebra_from_table(alg, lo, hi, basis, product, gens, bounded_below=lo <= 0)
