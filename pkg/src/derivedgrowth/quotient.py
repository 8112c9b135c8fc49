"""Word-problem oracles for quotients G = F_m/R and the shortest-relation search.

Every oracle hands out canonical element values (plain tuples/ints) and a
fixed-width little-endian byte encoding of them. Batched right
multiplication by a letter works directly on arrays of encodings, which is
what the level-synchronous searches use.

Encodings:

* free_abelian: m x int64 exponent sums.
* nilpotent_class2: m x int64 exponents ``e`` then int64 commutator
  coordinates ``c_ij`` for i < j in the order (1,2), (1,3), ..., (m-1,m).
* finite_perm: the 0-based images of 0..degree-1, one byte each
  (uint16 little-endian when degree > 256).
* subdirect_phi_finite: int64 phi value, then the permutation.
* direct_product: the factor encodings concatenated.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _frontier
from .words import PhiSpec, RankMismatch, alphabet, check_rank, format_word, inverse, \
    is_cyclically_reduced, word_key


class BudgetExceeded(RuntimeError):
    """A search needed more states than its budget allowed."""

    def __init__(self, message, depth=None, partial=None):
        super().__init__(message)
        self.depth = depth
        self.partial = partial


class GroupOracle:
    kind = "abstract"
    m: int
    width: int

    def identity(self):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def generator(self, letter: int):
        raise NotImplementedError

    def encode(self, x) -> bytes:
        raise NotImplementedError

    def decode(self, b: bytes):
        raise NotImplementedError

    def step_batch(self, arr: np.ndarray, letter: int) -> np.ndarray:
        """Right-multiply every encoded row of ``arr`` by ``letter``."""
        raise NotImplementedError

    def step(self, x, letter: int):
        return self.mul(x, self.generator(letter))

    def is_identity(self, x) -> bool:
        return x == self.identity()

    def eval_word(self, w: Sequence[int]):
        check_rank(w, self.m)
        x = self.identity()
        for letter in w:
            x = self.step(x, letter)
        return x

    def encode_batch(self, elements) -> np.ndarray:
        elements = list(elements)
        buf = b"".join(self.encode(x) for x in elements)
        return np.frombuffer(buf, dtype=np.uint8).reshape(len(elements), self.width).copy()

    def _check_letter(self, letter):
        if letter == 0 or abs(letter) > self.m:
            raise RankMismatch(f"letter {letter} is not in the alphabet of rank {self.m}")

    def __repr__(self):
        return f"<{type(self).__name__} kind={self.kind} m={self.m}>"


def _int_cols(arr: np.ndarray, start: int, count: int) -> np.ndarray:
    """int64 view of ``count`` columns starting at byte ``start`` (copied)."""
    block = np.ascontiguousarray(arr[:, start:start + 8 * count])
    return block.view("<i8").reshape(arr.shape[0], count).copy()


class FreeAbelian(GroupOracle):
    kind = "free_abelian"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("free abelian oracle needs m >= 1")
        self.m = m
        self.width = 8 * m
        self._fmt = f"<{m}q"

    def identity(self):
        return (0,) * self.m

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def generator(self, letter):
        self._check_letter(letter)
        v = [0] * self.m
        v[abs(letter) - 1] = 1 if letter > 0 else -1
        return tuple(v)

    def step(self, x, letter):
        self._check_letter(letter)
        v = list(x)
        v[abs(letter) - 1] += 1 if letter > 0 else -1
        return tuple(v)

    def encode(self, x):
        return struct.pack(self._fmt, *x)

    def decode(self, b):
        return struct.unpack(self._fmt, b)

    def step_batch(self, arr, letter):
        v = _int_cols(arr, 0, self.m)
        v[:, abs(letter) - 1] += 1 if letter > 0 else -1
        return v.view(np.uint8).reshape(arr.shape[0], self.width)


class NilpotentClass2(GroupOracle):
    """Free nilpotent group of class 2, F_m / gamma_3.

    Normal form (e, c) stands for a_1^e1 ... a_m^em * prod_{i<j} [a_i, a_j]^c_ij
    with [x, y] = x^-1 y^-1 x y central. Multiplication:
    (e, c)(e', c') = (e + e', c + c' - e'_i e_j) for each pair i < j.
    """

    kind = "nilpotent_class2"

    def __init__(self, m: int):
        if m < 2:
            raise ValueError("nilpotent class 2 oracle needs m >= 2")
        self.m = m
        self.pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        self.npairs = len(self.pairs)
        self.width = 8 * (m + self.npairs)
        self._fmt = f"<{m + self.npairs}q"

    def identity(self):
        return ((0,) * self.m, (0,) * self.npairs)

    def mul(self, x, y):
        e, c = x
        e2, c2 = y
        return (tuple(a + b for a, b in zip(e, e2)),
                tuple(c[p] + c2[p] - e2[i] * e[j] for p, (i, j) in enumerate(self.pairs)))

    def inv(self, x):
        e, c = x
        return (tuple(-a for a in e),
                tuple(-c[p] - e[i] * e[j] for p, (i, j) in enumerate(self.pairs)))

    def generator(self, letter):
        self._check_letter(letter)
        e = [0] * self.m
        e[abs(letter) - 1] = 1 if letter > 0 else -1
        return (tuple(e), (0,) * self.npairs)

    def step(self, x, letter):
        self._check_letter(letter)
        e, c = x
        i, s = abs(letter) - 1, (1 if letter > 0 else -1)
        c = list(c)
        for p, (a, b) in enumerate(self.pairs):
            if a == i:
                c[p] -= s * e[b]
        e = list(e)
        e[i] += s
        return (tuple(e), tuple(c))

    def encode(self, x):
        return struct.pack(self._fmt, *x[0], *x[1])

    def decode(self, b):
        v = struct.unpack(self._fmt, b)
        return (tuple(v[:self.m]), tuple(v[self.m:]))

    def step_batch(self, arr, letter):
        v = _int_cols(arr, 0, self.m + self.npairs)
        i, s = abs(letter) - 1, (1 if letter > 0 else -1)
        for p, (a, b) in enumerate(self.pairs):
            if a == i:
                v[:, self.m + p] -= s * v[:, b]
        v[:, i] += s
        return v.view(np.uint8).reshape(arr.shape[0], self.width)


def _perm_mul(p, q):
    # apply p, then q
    return tuple(q[i] for i in p)


def _perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class FinitePerm(GroupOracle):
    """The permutation group generated by given images of a_1..a_m.

    Permutations act on the right: the product ``p * q`` applies ``p`` first.
    Elements are 0-based image tuples.
    """

    kind = "finite_perm"

    def __init__(self, m: int, perms: Sequence[Sequence[int]], degree: int):
        if m < 1 or len(perms) != m:
            raise ValueError(f"need exactly m={m} generator permutations, got {len(perms)}")
        checked = []
        for p in perms:
            p = tuple(int(v) for v in p)
            if len(p) != degree or sorted(p) != list(range(degree)):
                raise ValueError(f"{p} is not a permutation of 0..{degree - 1}")
            checked.append(p)
        self.m = m
        self.degree = degree
        self.perms = tuple(checked)
        self._inv = tuple(_perm_inv(p) for p in self.perms)
        self._dtype = np.dtype(np.uint8) if degree <= 256 else np.dtype("<u2")
        self.width = degree * self._dtype.itemsize
        self._np = [None] + [np.array(p, dtype=self._dtype) for p in self.perms]
        self._np_inv = [None] + [np.array(p, dtype=self._dtype) for p in self._inv]

    def identity(self):
        return tuple(range(self.degree))

    def mul(self, x, y):
        return _perm_mul(x, y)

    def inv(self, x):
        return _perm_inv(x)

    def generator(self, letter):
        self._check_letter(letter)
        return self.perms[letter - 1] if letter > 0 else self._inv[-letter - 1]

    def encode(self, x):
        return np.asarray(x, dtype=self._dtype).tobytes()

    def decode(self, b):
        return tuple(int(v) for v in np.frombuffer(b, dtype=self._dtype))

    def step_batch(self, arr, letter):
        g = self._np[letter] if letter > 0 else self._np_inv[-letter]
        p = np.ascontiguousarray(arr).view(self._dtype)
        return np.ascontiguousarray(g[p]).view(np.uint8).reshape(arr.shape[0], self.width)

    def order(self) -> int:
        """Group order by orbit enumeration of the identity (small groups only)."""
        seen = {self.identity()}
        frontier = [self.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for p in self.perms:
                    y = _perm_mul(x, p)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)


class _PhiImage(GroupOracle):
    """Z as the image of phi; used as the first factor of a subdirect oracle."""

    kind = "phi_image"

    def __init__(self, phi: PhiSpec):
        self.phi = phi
        self.m = phi.m
        self.width = 8

    def identity(self):
        return 0

    def mul(self, x, y):
        return x + y

    def inv(self, x):
        return -x

    def generator(self, letter):
        self._check_letter(letter)
        return self.phi.letter_value(letter)

    def encode(self, x):
        return struct.pack("<q", x)

    def decode(self, b):
        return struct.unpack("<q", b)[0]

    def step_batch(self, arr, letter):
        v = _int_cols(arr, 0, 1)
        v += self.phi.letter_value(letter)
        return v.view(np.uint8).reshape(arr.shape[0], 8)


class DirectProduct(GroupOracle):
    """Image of F_m in a direct product of oracles of the same rank."""

    kind = "direct_product"

    def __init__(self, factors: Sequence[GroupOracle]):
        if not factors:
            raise ValueError("direct product needs at least one factor")
        ms = {f.m for f in factors}
        if len(ms) != 1:
            raise RankMismatch(f"factor ranks differ: {sorted(ms)}")
        self.factors = tuple(factors)
        self.m = factors[0].m
        self.width = sum(f.width for f in factors)
        self._offsets = np.cumsum([0] + [f.width for f in factors]).tolist()

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def inv(self, x):
        return tuple(f.inv(a) for f, a in zip(self.factors, x))

    def generator(self, letter):
        self._check_letter(letter)
        return tuple(f.generator(letter) for f in self.factors)

    def step(self, x, letter):
        return tuple(f.step(a, letter) for f, a in zip(self.factors, x))

    def encode(self, x):
        return b"".join(f.encode(a) for f, a in zip(self.factors, x))

    def decode(self, b):
        o = self._offsets
        return tuple(f.decode(b[o[i]:o[i + 1]]) for i, f in enumerate(self.factors))

    def step_batch(self, arr, letter):
        o = self._offsets
        parts = [f.step_batch(np.ascontiguousarray(arr[:, o[i]:o[i + 1]]), letter)
                 for i, f in enumerate(self.factors)]
        return np.hstack(parts)


class Subdirect(DirectProduct):
    """Image of F_m in Z x P under w -> (phi(w), finite(w)).

    Its kernel is ker(phi) intersected with the kernel of the finite quotient.
    """

    kind = "subdirect_phi_finite"

    def __init__(self, phi: PhiSpec, finite: FinitePerm):
        if not isinstance(finite, FinitePerm):
            raise TypeError("the finite factor must be a finite_perm oracle")
        if phi.m != finite.m:
            raise RankMismatch(f"phi has rank {phi.m}, finite oracle has rank {finite.m}")
        super().__init__([_PhiImage(phi), finite])
        self.phi = phi
        self.finite = finite


def make_free_abelian(m: int) -> FreeAbelian:
    return FreeAbelian(m)


def make_nilpotent_class2(m: int) -> NilpotentClass2:
    return NilpotentClass2(m)


def make_finite_perm(m: int, generator_permutations, degree: int) -> FinitePerm:
    """Build a permutation oracle from 1-based image lists (``[2, 1, 3]`` swaps 1 and 2)."""
    perms = []
    for p in generator_permutations:
        p = [int(v) for v in p]
        if any(v < 1 or v > degree for v in p):
            raise ValueError(f"{p} has entries outside 1..{degree}")
        perms.append([v - 1 for v in p])
    return FinitePerm(m, perms, degree)


def make_subdirect(phi: PhiSpec, finite: FinitePerm) -> Subdirect:
    return Subdirect(phi, finite)


def make_direct_product(*factors: GroupOracle) -> DirectProduct:
    return DirectProduct(factors)


def eval_word(o: GroupOracle, w: Sequence[int]):
    return o.eval_word(w)


# --- shortest relations -------------------------------------------------------

@dataclass(frozen=True)
class RhoCertificate:
    rho: int
    witness: tuple
    exhaustive_up_to: int

    found = True

    @property
    def lower_bound(self) -> int:
        return self.rho

    def describe(self) -> str:
        return f"rho={self.rho} witness={format_word(self.witness)} exhaustive_up_to={self.exhaustive_up_to}"


@dataclass(frozen=True)
class NotFound:
    """No nontrivial relation of length <= max_len exists."""

    max_len: int

    found = False

    @property
    def lower_bound(self) -> int:
        return self.max_len + 1

    def describe(self) -> str:
        return f"rho>{self.max_len} (no relation up to length {self.max_len})"


def _word_at(parents, letters, depth, idx) -> tuple:
    out = []
    while depth > 0:
        out.append(int(letters[depth][idx]))
        idx = int(parents[depth][idx])
        depth -= 1
    return tuple(reversed(out))


DEFAULT_MAX_STATES = 20_000_000


def compute_rho(o: GroupOracle, max_len: int, max_states: int = DEFAULT_MAX_STATES,
                threads: int = 1):
    """Length of the shortest nonempty reduced word trivial in ``o``.

    Meet-in-the-middle over the tree of reduced words: level ``d`` holds the
    images of all reduced words of length ``d`` (all distinct while no
    relation has shown up). A reduced relation of odd length 2d+1 is
    ``u s v^-1`` with ``u s`` and ``v`` meeting in level-``d`` images; one
    of even length 2d+2 is ``u s (v t)^-1`` with two distinct extensions
    colliding in level ``d+1``. Returns a :class:`RhoCertificate` with the
    lexicographically least witness of minimal length, or :class:`NotFound`.
    Raises :class:`BudgetExceeded` when a level needs more than
    ``max_states`` rows.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    letters = alphabet(o.m)
    level = o.encode_batch([o.identity()])
    last = np.zeros(1, dtype=np.int16)  # last letter of each level word, 0 for empty
    parents = [np.full(1, -1, dtype=np.int64)]
    lastletters = [last]
    d = 0
    while 2 * d + 1 <= max_len:
        masks = [last != -x for x in letters]
        n_cand = int(sum(int(mk.sum()) for mk in masks))
        if n_cand + level.shape[0] > max_states:
            raise BudgetExceeded(
                f"relation search needs {n_cand + level.shape[0]} states at depth {d + 1}",
                depth=2 * d)
        parts = _frontier.expand(o, level, letters, masks, threads)
        cand = np.vstack([p[2] for p in parts]) if parts else np.zeros((0, o.width), np.uint8)
        src = np.concatenate([p[1] for p in parts])
        via = np.concatenate([np.full(len(p[1]), p[0], dtype=np.int16) for p in parts])
        nl = level.shape[0]
        labels, ngroups = _frontier.group_rows(np.vstack([level, cand]))
        lv, cl = labels[:nl], labels[nl:]
        in_level = np.zeros(ngroups, dtype=bool)
        in_level[lv] = True
        counts = np.bincount(cl, minlength=ngroups)

        # odd: a candidate equals a level-d image
        hit = np.flatnonzero(in_level & (counts > 0))
        if hit.size:
            level_of = np.full(ngroups, -1, dtype=np.int64)
            level_of[lv] = np.arange(nl)
            best = None
            for ci in np.flatnonzero(np.isin(cl, hit)):
                u = _word_at(parents, lastletters, d, src[ci]) + (int(via[ci]),)
                v = _word_at(parents, lastletters, d, level_of[cl[ci]])
                best = _better(best, u + inverse(v))
            return _certify(o, best, 2 * d + 1)

        if 2 * d + 2 > max_len:
            break
        # even: two candidates collide
        multi = np.flatnonzero(counts > 1)
        if multi.size:
            best = None
            members: dict[int, list[int]] = {}
            for ci in np.flatnonzero(np.isin(cl, multi)):
                members.setdefault(int(cl[ci]), []).append(int(ci))
            for group in members.values():
                words = [_word_at(parents, lastletters, d, src[ci]) + (int(via[ci]),) for ci in group]
                for u in words:
                    for v in words:
                        if u != v:
                            best = _better(best, u + inverse(v))
            return _certify(o, best, 2 * d + 2)

        order = np.argsort(cl, kind="stable")
        level = cand[order]
        parents.append(src[order])
        last = via[order]
        lastletters.append(last)
        d += 1
    return NotFound(max_len)


def _better(best, w):
    if best is None or word_key(w) < word_key(best):
        return w
    return best


def _certify(o, witness, length):
    assert len(witness) == length
    assert is_cyclically_reduced(witness), witness
    assert o.is_identity(o.eval_word(witness)), witness
    return RhoCertificate(rho=length, witness=witness, exhaustive_up_to=length)


# --- high-girth finite quotients ------------------------------------------------

def random_perm(rng: random.Random, degree: int) -> list[int]:
    p = list(range(1, degree + 1))
    rng.shuffle(p)
    return p


def find_girth(phi: PhiSpec, degree: int, tries: int, target: int, seed: int = 0,
               screen: int = 12, max_states: int = DEFAULT_MAX_STATES, threads: int = 1):
    """Seeded random search for permutation images giving a subdirect oracle of large girth.

    Each try draws uniform random permutations for a_1..a_m, screens them
    with a cheap relation search up to length ``screen`` and fully
    certifies the survivors up to ``target - 1``. Returns
    ``(best_oracle, best_result, tries_used)`` where ``best_result`` is the
    best certificate seen (a :class:`NotFound` beats any certificate).
    """
    rng = random.Random(seed)
    best = None
    best_res = None
    for attempt in range(1, tries + 1):
        perms = [random_perm(rng, degree) for _ in range(phi.m)]
        o = make_subdirect(phi, make_finite_perm(phi.m, perms, degree))
        res = compute_rho(o, min(screen, target - 1), max_states, threads)
        if not res.found:
            res = compute_rho(o, target - 1, max_states, threads)
        if best_res is None or res.lower_bound > best_res.lower_bound:
            best, best_res = o, res
        if best_res.lower_bound >= target:
            return best, best_res, attempt
    return best, best_res, tries
