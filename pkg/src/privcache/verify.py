"""Exhaustive verification engines.

Correctness sweeps every (demand vector, key vector, t-choice, user)
tuple and checks bit-exact decoding.  Privacy builds the exact rational
distribution of the serialized observable (broadcast, cache) per user and
per own-demand value, and requires it to be identical across every
completion of the other demands; no sampling, no floats.  The oracle
engines brute-force the file-identity and reconstruction formulas the
scheme relies on.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Mapping

from . import yma
from .bitvec import Bits
from .combinat import SubsetIndex, enumerate_r_subsets
from .scheme import (
    AuxDemand,
    CacheContent,
    DeliverySignal,
    FileLibrary,
    SchemeParams,
    SessionRandomness,
    aux_demand,
    build_delivery,
    build_v,
    g_map,
    place,
    decode,
)

_CASE_CAP = 20_000_000
_MARGINAL_BIT_CAP = 14

CONDITIONAL = "conditional-on-files"
FULL_MARGINAL = "full-marginal"


class ScaleLimitError(ValueError):
    """The requested enumeration is too large to run exhaustively."""


@dataclass
class VerificationReport:
    """Outcome of one verification run; empty failures means pass."""

    scope: str
    cases_run: int
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def describe(self) -> str:
        verdict = "PASS" if self.passed else f"FAIL ({len(self.failures)} failures)"
        return f"{verdict} {self.scope} [cases={self.cases_run}, {self.elapsed:.2f}s]"

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "passed": self.passed,
            "cases_run": self.cases_run,
            "failures": [
                {"configuration": repr(c), "expected": repr(e), "actual": repr(a)}
                for c, e, a in self.failures
            ],
            "elapsed_seconds": self.elapsed,
        }


class OutcomeHistogram:
    """Exact distribution of a serialized observable.

    Maps each observed byte string to its probability as a Fraction; the
    probabilities always sum to exactly 1.
    """

    __slots__ = ("probs",)

    def __init__(self, probs: Mapping[bytes, Fraction]) -> None:
        total = sum(probs.values())
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.probs = {k: v for k, v in probs.items() if v}

    @classmethod
    def from_weights(cls, weights: Mapping[bytes, int]) -> OutcomeHistogram:
        total = sum(weights.values())
        if total <= 0:
            raise ValueError("no outcomes recorded")
        return cls({k: Fraction(w, total) for k, w in weights.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OutcomeHistogram) and self.probs == other.probs

    def __len__(self) -> int:
        return len(self.probs)

    def __repr__(self) -> str:
        return f"OutcomeHistogram({len(self.probs)} outcomes)"


def _all_digit_vectors(num_files: int, length: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(num_files), repeat=length))


def _caches_by_key(params: SchemeParams, files: FileLibrary) -> dict[tuple[int, int], CacheContent]:
    """Cache content per (user, key digit), via the real placement path."""
    out = {}
    for s in range(params.num_files):
        rand = SessionRandomness(params.num_files, (s,) * params.num_users)
        for cache in place(files, params, rand):
            out[(cache.user, s)] = cache
    return out


def _guard_enumeration(params: SchemeParams, label: str) -> None:
    n, k = params.num_files, params.num_users
    estimate = n ** (2 * k) * params.positions * k
    if estimate > _CASE_CAP:
        raise ScaleLimitError(f"{label} enumeration of ~{estimate} cases exceeds the cap")


def verify_correctness_exhaustive(
    params: SchemeParams,
    files: FileLibrary,
    mutate_delivery: Callable[[DeliverySignal], DeliverySignal] | None = None,
) -> VerificationReport:
    """Decode check over all demands, all keys, all t-choices, all users.

    `mutate_delivery` taps the broadcast before it reaches the decoders;
    fault-injection tests use it to confirm that corruption is detected
    and reported with the exact failing (D, S, t, k) tuples.
    """
    _guard_enumeration(params, "correctness")
    start = time.perf_counter()
    n, k_users = params.num_files, params.num_users
    caches = _caches_by_key(params, files)
    deliveries: dict[tuple[tuple[int, ...], int], DeliverySignal] = {}
    failures = []
    cases = 0
    vectors = _all_digit_vectors(n, k_users)
    for demands in vectors:
        for keys in vectors:
            d = aux_demand(demands, keys, n)
            for t in build_v(d).members:
                x = deliveries.get((d.digits, t))
                if x is None:
                    x = build_delivery(files, d, t)
                    if mutate_delivery is not None:
                        x = mutate_delivery(x)
                    deliveries[(d.digits, t)] = x
                for k in range(k_users):
                    got = decode(caches[(k, keys[k])], x, k, demands[k])
                    cases += 1
                    if got != files.files[demands[k]]:
                        failures.append(
                            (
                                (demands, keys, t, k),
                                files.files[demands[k]].to01(),
                                got.to01(),
                            )
                        )
    scope = f"correctness N={n} K={k_users} r={params.r} F={params.file_bits}"
    return VerificationReport(scope, cases, failures, time.perf_counter() - start)


def _selector_lcm(num_files: int, num_users: int) -> int:
    sizes = {
        len(build_v(AuxDemand(digits, num_files)).members)
        for digits in _all_digit_vectors(num_files, num_users)
    }
    return lcm(*sizes)


def _observable_parts(
    params: SchemeParams, files: FileLibrary
) -> tuple[dict[tuple[tuple[int, ...], int], bytes], dict[tuple[int, int], bytes]]:
    """Canonical serializations of every broadcast and every cache."""
    xd = {}
    for digits in _all_digit_vectors(params.num_files, params.num_users):
        d = AuxDemand(digits, params.num_files)
        for t in build_v(d).members:
            xd[(digits, t)] = build_delivery(files, d, t).to_bytes()
    zk = {key: cache.to_bytes() for key, cache in _caches_by_key(params, files).items()}
    return xd, zk


def _masked_aux(demands, keys, num_files, masked):
    if masked:
        return aux_demand(demands, keys, num_files)
    # negative control: broadcast driven by the raw demands
    return AuxDemand(tuple(demands), num_files)


def _completion_demands(completion, k, dk):
    return completion[:k] + (dk,) + completion[k:]


def _compare_histograms(
    params: SchemeParams,
    build_histogram: Callable[[int, int, tuple[int, ...]], OutcomeHistogram],
) -> tuple[int, list]:
    """Run the per-(user, own demand) equality check over all completions."""
    n, k_users = params.num_files, params.num_users
    completions = _all_digit_vectors(n, k_users - 1)
    cases = 0
    failures = []
    for k in range(k_users):
        for dk in range(n):
            reference = None
            ref_completion = None
            for completion in completions:
                hist = build_histogram(k, dk, completion)
                cases += 1
                if reference is None:
                    reference, ref_completion = hist, completion
                elif hist != reference:
                    failures.append(
                        (
                            (k, dk, completion),
                            f"distribution identical to completion {ref_completion}",
                            f"{len(hist)} outcomes differ",
                        )
                    )
    return cases, failures


def verify_privacy(
    params: SchemeParams,
    mode: str = CONDITIONAL,
    files: FileLibrary | None = None,
    masked: bool = True,
) -> VerificationReport:
    """Exact distribution-equality test of the observable (X_D, Z_k).

    Conditional mode fixes the library and enumerates keys and t-choices;
    full-marginal mode additionally enumerates every 1-bit-subfile library.
    For every user k and own demand value, the histogram must be identical
    across all completions of the other demands -- exactly, as rationals.
    With masked=False the broadcast is driven by the raw demands instead
    of the key-masked ones; that variant must fail and serves as the
    negative control for the test machinery itself.
    """
    if mode in (CONDITIONAL, "conditional"):
        if files is None:
            raise ValueError("conditional mode needs a file library")
        return _privacy_conditional(params, files, masked, with_demand_file=False)
    if mode == FULL_MARGINAL:
        return _privacy_marginal(params, masked)
    raise ValueError(f"unknown privacy mode {mode!r}")


def _privacy_conditional(
    params: SchemeParams, files: FileLibrary, masked: bool, with_demand_file: bool
) -> VerificationReport:
    _guard_enumeration(params, "privacy")
    start = time.perf_counter()
    n, k_users = params.num_files, params.num_users
    xd_bytes, zk_bytes = _observable_parts(params, files)
    weight_lcm = _selector_lcm(n, k_users)
    key_vectors = _all_digit_vectors(n, k_users)

    def build_histogram(k: int, dk: int, completion: tuple[int, ...]) -> OutcomeHistogram:
        demands = _completion_demands(completion, k, dk)
        suffix = files.files[dk].to_bytes() if with_demand_file else b""
        weights: dict[bytes, int] = {}
        for keys in key_vectors:
            d = _masked_aux(demands, keys, n, masked)
            members = build_v(d).members
            w = weight_lcm // len(members)
            tail = zk_bytes[(k, keys[k])] + suffix
            for t in members:
                key = xd_bytes[(d.digits, t)] + tail
                weights[key] = weights.get(key, 0) + w
        return OutcomeHistogram.from_weights(weights)

    cases, failures = _compare_histograms(params, build_histogram)
    what = "joint with demanded file" if with_demand_file else "conditional-on-files"
    scope = (
        f"privacy[{what}] N={n} K={k_users} r={params.r}"
        + ("" if masked else " (unmasked negative control)")
    )
    return VerificationReport(scope, cases, failures, time.perf_counter() - start)


def _basis_library(params: SchemeParams) -> tuple[SchemeParams, FileLibrary, int]:
    """Library whose subfile (n, R) is the matching one-hot bit mask.

    Running the real placement and delivery code over it yields, for every
    payload bit, the mask of true library bits that XOR into it; each
    concrete library is then evaluated by bit parities against the masks.
    """
    count = params.subfile_count
    total = params.num_files * count
    wide = SchemeParams(params.num_files, params.num_users, params.r, count * total)
    files = []
    for fi in range(params.num_files):
        blocks = [Bits(1 << (fi * count + j), total) for j in range(count)]
        files.append(Bits.concat(blocks))
    return wide, FileLibrary(wide, tuple(files)), total


def _mask_values(parts: Iterable[Bits]) -> list[int]:
    return [b.value for b in parts]


def _pack_parities(masks: list[int], lib: int) -> Bits:
    value = 0
    for i, mask in enumerate(masks):
        value |= ((mask & lib).bit_count() & 1) << i
    return Bits(value, len(masks))


def _marginal_serializations(params: SchemeParams):
    """Serialized broadcast and cache per (…, library index).

    Payload bits are GF(2)-linear in the library bits, so one placement
    and delivery pass over the one-hot basis library yields a bit mask per
    payload position; each concrete library is then serialized by mask
    parities.  The layout is byte-identical to DeliverySignal.to_bytes /
    CacheContent.to_bytes with 1-bit subfiles.
    """
    from .scheme import cache_header, delivered_segment_indices, delivery_header, stored_signal_indices

    n, k_users = params.num_files, params.num_users
    wide_params, basis, total_bits = _basis_library(params)
    libraries = range(1 << total_bits)

    xd_ser: dict[tuple[tuple[int, ...], int], list[bytes]] = {}
    for digits in _all_digit_vectors(n, k_users):
        d = AuxDemand(digits, n)
        for t in build_v(d).members:
            wide = build_delivery(basis, d, t)
            masks = _mask_values(
                wide.segments[key] for key in delivered_segment_indices(wide_params, t)
            )
            header = delivery_header(digits, t, len(masks))
            xd_ser[(digits, t)] = [
                header + _pack_parities(masks, lib).to_bytes() for lib in libraries
            ]

    zk_ser: dict[tuple[int, int], list[bytes]] = {}
    for (k, s), cache in _caches_by_key(wide_params, basis).items():
        masks = _mask_values(cache.signals[idx] for idx in stored_signal_indices(wide_params))
        header = cache_header(s, len(masks))
        zk_ser[(k, s)] = [header + _pack_parities(masks, lib).to_bytes() for lib in libraries]
    return xd_ser, zk_ser, libraries


def library_from_bit_index(params: SchemeParams, lib: int) -> FileLibrary:
    """The 1-bit-subfile library whose concatenated file bits spell `lib`."""
    if params.subfile_bits != 1:
        raise ValueError("bit-indexed libraries need 1-bit subfiles")
    count = params.subfile_count
    files = tuple(
        Bits(lib >> (fi * count) & ((1 << count) - 1), count)
        for fi in range(params.num_files)
    )
    return FileLibrary(params, files)


def _privacy_marginal(params: SchemeParams, masked: bool) -> VerificationReport:
    if params.subfile_bits != 1:
        raise ScaleLimitError("full-marginal mode needs 1-bit subfiles")
    total_bits = params.num_files * params.subfile_count
    if total_bits > _MARGINAL_BIT_CAP:
        raise ScaleLimitError(
            f"full-marginal mode over {total_bits} library bits exceeds the "
            f"{_MARGINAL_BIT_CAP}-bit cap"
        )
    _guard_enumeration(params, "privacy")
    start = time.perf_counter()
    n, k_users = params.num_files, params.num_users
    xd_ser, zk_ser, libraries = _marginal_serializations(params)
    weight_lcm = _selector_lcm(n, k_users)
    key_vectors = _all_digit_vectors(n, k_users)

    def build_histogram(k: int, dk: int, completion: tuple[int, ...]) -> OutcomeHistogram:
        demands = _completion_demands(completion, k, dk)
        weights: dict[bytes, int] = {}
        for keys in key_vectors:
            d = _masked_aux(demands, keys, n, masked)
            members = build_v(d).members
            w = weight_lcm // len(members)
            zk = zk_ser[(k, keys[k])]
            for t in members:
                xd = xd_ser[(d.digits, t)]
                for lib in libraries:
                    key = xd[lib] + zk[lib]
                    weights[key] = weights.get(key, 0) + w
        return OutcomeHistogram.from_weights(weights)

    cases, failures = _compare_histograms(params, build_histogram)
    scope = (
        f"privacy[full-marginal over {1 << total_bits} libraries] "
        f"N={n} K={k_users} r={params.r}"
        + ("" if masked else " (unmasked negative control)")
    )
    return VerificationReport(scope, cases, failures, time.perf_counter() - start)


def verify_distribution_lemma(
    params: SchemeParams, files: FileLibrary, masked: bool = True
) -> VerificationReport:
    """Equality of the joint (X_D, Z_k, W_{D_k}) histogram across D_{-k}.

    Same enumeration as conditional privacy with the demanded file's bits
    appended to the observable; given the library, the demanded file is a
    function of the own demand alone, so any inequality points at the
    broadcast or cache leaking the other users' demands.
    """
    return _privacy_conditional(params, files, masked, with_demand_file=True)


def oracle_demand_identity(params: SchemeParams, files: FileLibrary) -> VerificationReport:
    """Brute-force check of the selector/label file identity.

    For every auxiliary demand d, user k, and key shift: the XOR of the
    files demanded by user k under the labeled demands in d's selector
    set equals the file demanded under d (shifted), bit for bit.  Whole
    files are compared, which covers every subfile index at once.
    """
    start = time.perf_counter()
    n, k_users = params.num_files, params.num_users
    cases = 0
    failures = []
    for digits in _all_digit_vectors(n, k_users):
        d = AuxDemand(digits, n)
        members = build_v(d).members
        labeled = [g_map(t, n, k_users).digits for t in members]
        for k in range(k_users):
            for shift in range(n):
                acc = Bits.zeros(params.file_bits)
                for label_digits in labeled:
                    acc = acc ^ files.files[(label_digits[k] + shift) % n]
                want = files.files[(digits[k] + shift) % n]
                cases += 1
                if acc != want:
                    failures.append(((digits, k, shift), want.to01(), acc.to01()))
    scope = f"demand-identity N={n} K={k_users} (all d, users, shifts)"
    return VerificationReport(scope, cases, failures, time.perf_counter() - start)


def oracle_y_reconstruction(params: SchemeParams, files: FileLibrary) -> VerificationReport:
    """Brute-force gate for the non-leader signal reconstruction identity.

    Every signal indexed outside the leader block must be reproducible
    from the stored leader-intersecting ones; vacuously passes when no
    such index exists (K' - N < r + 1).
    """
    start = time.perf_counter()
    n, k_users, kp = params.num_files, params.num_users, params.positions
    outside = kp - n
    non_leader = []
    if outside > 0:
        non_leader = [
            SubsetIndex(tuple(m + n for m in s.members), kp)
            for s in enumerate_r_subsets(outside, params.r + 1)
        ]
    cases = 0
    failures = []
    for k in range(k_users):
        for s in range(n):
            u = yma.build_u_vector(n, k_users, k, s)
            delivered = yma.yma_delivery(files, u)
            for index in non_leader:
                got = yma.reconstruct_y(delivered, u, index)
                want = yma.compute_y(files, u, index)
                cases += 1
                if got != want:
                    failures.append(((k, s, index.members), want.to01(), got.to01()))
    scope = f"signal-reconstruction N={n} K={k_users} r={params.r} ({len(non_leader)} non-leader indices)"
    return VerificationReport(scope, cases, failures, time.perf_counter() - start)
