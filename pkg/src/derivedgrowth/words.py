"""Free-group words: reduction, homomorphisms onto Z, and good words.

A letter is a nonzero int: ``i`` stands for the generator a_i and ``-i``
for its inverse (1-based). A word is a tuple of letters. Keeping letters
as plain ints keeps enumeration cheap and makes words hashable for free.

Letters are ordered a_1 < a_1^-1 < a_2 < a_2^-1 < ..., see :func:`letter_key`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

Word = tuple  # tuple[int, ...]


class RankMismatch(ValueError):
    """A word mentions a generator outside the rank of the group it is used with."""


def make_letter(index: int, sign: int = 1) -> int:
    if index < 1:
        raise ValueError(f"generator index must be >= 1, got {index}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return index * sign


def letter_index(x: int) -> int:
    return abs(x)


def letter_sign(x: int) -> int:
    return 1 if x > 0 else -1


def letter_key(x: int) -> int:
    # a_1 -> 0, a_1^-1 -> 1, a_2 -> 2, ...
    return 2 * (abs(x) - 1) + (x < 0)


def word_key(w: Sequence[int]) -> tuple:
    return tuple(letter_key(x) for x in w)


def alphabet(m: int) -> list[int]:
    """All 2m letters in canonical order."""
    out = []
    for i in range(1, m + 1):
        out += [i, -i]
    return out


def check_rank(w: Iterable[int], m: int) -> None:
    for x in w:
        if x == 0 or abs(x) > m:
            raise RankMismatch(f"letter {x} is not in the alphabet of rank {m}")


def free_reduce(raw: Iterable[int]) -> Word:
    stack: list[int] = []
    for x in raw:
        if x == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclically_reduce(w: Sequence[int]) -> Word:
    """Strip conjugating letters ``x ... x^-1`` until none are left."""
    if not is_reduced(w):
        raise ValueError("cyclically_reduce expects a freely reduced word")
    lo, hi = 0, len(w)
    while hi - lo >= 2 and w[lo] == -w[hi - 1]:
        lo += 1
        hi -= 1
    return tuple(w[lo:hi])


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def multiply(u: Sequence[int], v: Sequence[int]) -> Word:
    return free_reduce(tuple(u) + tuple(v))


def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    """[u, v] = u^-1 v^-1 u v, reduced."""
    return free_reduce(inverse(u) + inverse(v) + tuple(u) + tuple(v))


# --- text forms -------------------------------------------------------------

def format_word(w: Sequence[int]) -> str:
    """Long form: ``a1 a2^-1 a1``; the empty word is ``""``."""
    return " ".join(f"a{abs(x)}" + ("^-1" if x < 0 else "") for x in w)


def format_compact(w: Sequence[int]) -> str:
    """Compact form: ``a b A`` style letters without spaces, capitals for inverses."""
    out = []
    for x in w:
        if abs(x) > 26:
            raise ValueError("compact form needs rank <= 26")
        c = chr(ord("a") + abs(x) - 1)
        out.append(c.upper() if x < 0 else c)
    return "".join(out)


def parse_word(text: str, m: int | None = None, reduce: bool = True) -> Word:
    """Parse either text form.

    Accepts ``a1 a2^-1``, compact ``abA`` and whitespace-separated mixtures
    of compact letters with a ``^-1`` suffix (``a b^-1``). Empty text is the
    empty word. The result is freely reduced unless ``reduce`` is false.
    """
    letters: list[int] = []
    for tok in text.split():
        inv = False
        if tok.endswith("^-1"):
            inv, tok = True, tok[:-3]
        if len(tok) >= 2 and tok[0] == "a" and tok[1:].isdigit():
            x = int(tok[1:])
            if x < 1:
                raise ValueError(f"bad letter {tok!r}")
            letters.append(-x if inv else x)
            continue
        if inv and len(tok) != 1:
            raise ValueError(f"bad letter {tok!r}^-1")
        for c in tok:
            if not c.isalpha() or not c.isascii():
                raise ValueError(f"bad letter {c!r} in {text!r}")
            x = ord(c.lower()) - ord("a") + 1
            if c.isupper():
                x = -x
            letters.append(-x if inv else x)
    if m is not None:
        check_rank(letters, m)
    return free_reduce(letters) if reduce else tuple(letters)


# --- homomorphisms onto Z ---------------------------------------------------

@dataclass(frozen=True)
class PhiSpec:
    """A homomorphism F_m -> Z given by the images of a_1..a_m.

    ``C`` is the largest value of phi on a letter or inverse letter and
    ``a`` is the letter attaining it (lowest index first, then positive sign).
    """

    images: tuple
    m: int = field(init=False)

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "m", len(images))
        if not images:
            raise ValueError("phi needs at least one generator image")
        if math.gcd(*images) != 1:
            raise ValueError(
                f"phi={images} is not onto Z (gcd of images is {math.gcd(*images)})")

    @property
    def C(self) -> int:
        return max(abs(v) for v in self.images)

    @property
    def a(self) -> int:
        c = self.C
        for i, v in enumerate(self.images, start=1):
            if v == c:
                return i
            if v == -c:
                return -i
        raise AssertionError("unreachable")

    def letter_value(self, x: int) -> int:
        return self.images[abs(x) - 1] * (1 if x > 0 else -1)


def phi_eval(phi: PhiSpec, w: Iterable[int]) -> int:
    total = 0
    for x in w:
        if x == 0 or abs(x) > phi.m:
            raise RankMismatch(f"letter {x} is not in the alphabet of rank {phi.m}")
        total += phi.images[abs(x) - 1] if x > 0 else -phi.images[abs(x) - 1]
    return total


def is_good(phi: PhiSpec, w: Sequence[int]) -> bool:
    if not w or not is_reduced(w):
        return False
    if any(x == 0 or abs(x) > phi.m for x in w):
        return False
    a = phi.a
    return w[0] == a and w[-1] != -a and phi_eval(phi, w) > 0


def enumerate_good(phi: PhiSpec, k: int) -> list[Word]:
    """All good words of length ``k`` in lexicographic order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, C = phi.a, phi.C
    letters = alphabet(phi.m)
    value = {x: phi.letter_value(x) for x in letters}
    out: list[Word] = []
    buf = [a]

    def extend(total: int) -> None:
        depth = len(buf)
        if depth == k:
            if buf[-1] != -a and total > 0:
                out.append(tuple(buf))
            return
        # every remaining letter adds at most C
        if total + C * (k - depth) <= 0:
            return
        last = buf[-1]
        for x in letters:
            if x == -last:
                continue
            buf.append(x)
            extend(total + value[x])
            buf.pop()

    extend(value[a])
    return out


def iter_reduced(m: int, length: int, first: int | None = None) -> Iterator[Word]:
    """Reduced words of exactly ``length`` letters, in lexicographic order."""
    letters = alphabet(m)
    if length == 0:
        yield ()
        return
    starts = letters if first is None else [first]
    # iterative DFS; push children in reverse so pops come out in order
    stack: list[Word] = [(x,) for x in reversed(starts)]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        last = w[-1]
        for x in reversed(letters):
            if x != -last:
                stack.append(w + (x,))


def count_reduced(m: int, length: int) -> int:
    """Number of freely reduced words of the given length: 2m(2m-1)^(len-1).

    Python integers are unbounded, so there is nothing to overflow.
    """
    if m < 1 or length < 0:
        raise ValueError("need m >= 1 and length >= 0")
    if length == 0:
        return 1
    return 2 * m * (2 * m - 1) ** (length - 1)
