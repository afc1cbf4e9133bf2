"""Finite-word helpers: morphism iteration, factor sets, balance."""
from __future__ import annotations

from typing import Hashable, Mapping, Sequence

import numpy as np


def iterate_morphism(rules: Mapping[Hashable, Sequence], seed, min_len: int,
                     max_iter: int = 200) -> tuple[list, int]:
    """Apply ``rules`` to ``[seed]`` until the word has at least ``min_len`` letters.

    Returns the word and the number of iterations used.
    """
    word = [seed]
    k = 0
    while len(word) < min_len:
        if k >= max_iter:
            raise RuntimeError("morphism does not grow")
        word = [b for a in word for b in rules[a]]
        k += 1
    return word, k


def morphism_lengths(rules: Mapping[Hashable, Sequence], seed, count: int) -> list[int]:
    word = [seed]
    out = [1]
    for _ in range(count - 1):
        word = [b for a in word for b in rules[a]]
        out.append(len(word))
    return out


def incidence_matrix(rules: Mapping[Hashable, Sequence], alphabet: Sequence) -> np.ndarray:
    """``M[i, j]`` = number of occurrences of ``alphabet[i]`` in the image of ``alphabet[j]``."""
    index = {a: i for i, a in enumerate(alphabet)}
    M = np.zeros((len(alphabet), len(alphabet)), dtype=np.int64)
    for j, a in enumerate(alphabet):
        for b in rules[a]:
            M[index[b], j] += 1
    return M


def encode(word: Sequence, alphabet: Sequence) -> str:
    """Map a word onto single characters so factor searches can use ``str``."""
    table = {a: chr(ord("a") + i) for i, a in enumerate(alphabet)}
    return "".join(table[x] for x in word)


def factors(text: str, length: int) -> set[str]:
    return {text[i:i + length] for i in range(len(text) - length + 1)}


def factor_sets(text: str, max_len: int) -> dict[int, set[str]]:
    """All factors of lengths ``1..max_len``.

    Only the length-``max_len`` windows and the tail are sliced; shorter
    factors are read off as prefixes of those.
    """
    longest = factors(text, max_len)
    tail = [text[i:] for i in range(max(0, len(text) - max_len + 1), len(text))]
    out = {max_len: longest}
    for ell in range(1, max_len):
        s = {w[:ell] for w in longest}
        s.update(t[:ell] for t in tail if len(t) >= ell)
        out[ell] = s
    return out


def balance(bits: np.ndarray, max_len: int) -> dict[int, int]:
    """For each window length, max minus min number of ones."""
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    out = {}
    for ell in range(1, max_len + 1):
        if ell > len(bits):
            break
        w = csum[ell:] - csum[:-ell]
        out[ell] = int(w.max() - w.min())
    return out
