"""Shared test utilities: seeded libraries and symbolic one-hot libraries.

A "basis" library gives every subfile a distinct one-hot bit pattern, so
an XOR of subfiles equals the characteristic vector of the XORed symbol
set.  That turns the worked-example tables into exact symbolic equality
checks on real code paths.
"""

from __future__ import annotations

import random

from privcache.bitvec import Bits, xor_all
from privcache.combinat import SubsetIndex, binomial, subset_rank
from privcache.scheme import FileLibrary, SchemeParams


def seeded_library(n, k, r, seed=0, bits_per_subfile=8):
    params = SchemeParams.minimal(n, k, r, bits_per_subfile)
    return params, FileLibrary.random(params, random.Random(seed))


def basis_library(n, k, r):
    positions = n * k - k + 1
    count = binomial(positions, r)
    width = n * count
    params = SchemeParams(n, k, r, count * width)
    files = tuple(
        Bits.concat(Bits(1 << (fi * count + j), width) for j in range(count))
        for fi in range(n)
    )
    return params, FileLibrary(params, files)


def symbol(params: SchemeParams, file_index: int, members) -> Bits:
    """Expected one-hot pattern of subfile (file_index, set(members))."""
    count = binomial(params.positions, params.r)
    rank = subset_rank(SubsetIndex.of(members, params.positions))
    return Bits(1 << (file_index * count + rank), n_basis_width(params))


def n_basis_width(params: SchemeParams) -> int:
    return params.num_files * binomial(params.positions, params.r)


def xor_symbols(params: SchemeParams, terms) -> Bits:
    """XOR of expected one-hots for [(file_index, members), ...]."""
    return xor_all([symbol(params, fi, mem) for fi, mem in terms], n_basis_width(params))
