"""Randomized verification campaigns.

Trial ``t`` of a campaign started with seed ``s`` uses seed ``s + t``, so any
trial can be replayed alone and trials may run in any order or in parallel.
Even trials draw from the positive side (totally positive points, totally
nonnegative matrices); odd trials draw sign-mixed counterexamples.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable

from .errors import PreconditionError
from .grassmann import act, plucker_of_matrix, representing_polynomial, standard_point_matrix
from .linalg import (
    RationalMatrix,
    is_totally_nonnegative,
    random_rational_matrix,
    random_tnn_word,
    random_tp_matrix,
    word_to_matrix,
)
from .operators import PreserverStatus, sharp_of_matrix, symbol, test_sharp_preserver_exact
from .poly import MultiaffinePoly, phase_normalize
from .stability import (
    Status,
    _exact_route,
    exact_stability_deg2,
    falsify_stability,
    grassmann_stability_oracle,
)

STABLE_SIDE = (Status.STABLE_CERTIFIED, Status.STABLE_ORACLE, Status.NO_COUNTEREXAMPLE)


def tp_point_polynomial(n: int, k: int, seed: int) -> MultiaffinePoly:
    """Representing polynomial of ``A V0`` for a random totally positive ``A``."""
    a = random_tp_matrix(n, seed)
    return representing_polynomial(act(a, standard_point_matrix(n, k)).plucker)


def sign_mixed_point_matrix(n: int, k: int, seed: int) -> RationalMatrix:
    """``A M0`` with one row negated: a genuine point whose coordinates have both signs.

    Coordinates containing the negated row flip sign, the others stay positive,
    and ``k < n`` guarantees both kinds occur.
    """
    if not 1 <= k < n:
        raise PreconditionError("sign-mixed points need 1 <= k < n")
    a = random_tp_matrix(n, seed)
    m = a @ standard_point_matrix(n, k)
    r = random.Random(seed).randrange(n)
    return RationalMatrix([[-x if i == r else x for x in row] for i, row in enumerate(m.data)])


def _second_opinion(f: MultiaffinePoly, k: int, samples: int, seed: int):
    if k == 2:
        return "exact", exact_stability_deg2(f)
    v = _exact_route(f)
    if v is not None:
        return "exact", v
    return "sampler", falsify_stability(f, samples, seed)


def thm1_trial(n: int, k: int, trial: int, seed: int, samples: int = 10_000) -> dict:
    s = seed + trial
    forward = trial % 2 == 0
    if forward:
        f = tp_point_polynomial(n, k, s)
    else:
        m = sign_mixed_point_matrix(n, k, s)
        f = representing_polynomial(plucker_of_matrix(m))
    oracle = grassmann_stability_oracle(f)
    oracle_status = getattr(oracle, "status", None)
    route, second = _second_opinion(f, k, samples, s)
    o_stable = oracle_status is Status.STABLE_ORACLE
    agree = oracle_status is not None and o_stable == (second.status in STABLE_SIDE)
    return {
        "trial": trial,
        "seed": s,
        "side": "forward" if forward else "converse",
        "oracle": oracle_status.value if oracle_status else "Inapplicable",
        "second": second.status.value,
        "second_route": route,
        "agree": agree,
        "expected": agree and o_stable == forward,
    }


def thm2_matrix(n: int, trial: int, seed: int) -> RationalMatrix:
    s = seed + trial
    if trial % 2 == 0:
        length = random.Random(s).randint(n, 4 * n)
        return word_to_matrix(random_tnn_word(n, length, s))
    rng = random.Random(s)
    while True:
        a = random_rational_matrix(n, n, rng)
        if not is_totally_nonnegative(a).ok:
            return a


def thm2_trial(n: int, trial: int, seed: int, samples: int = 10_000) -> dict:
    s = seed + trial
    a = thm2_matrix(n, trial, seed)
    exact = test_sharp_preserver_exact(a)
    h = symbol(sharp_of_matrix(a))
    positive = trial % 2 == 0
    if positive:
        sym = falsify_stability(h, samples, s).status.value
        ok = exact.status is PreserverStatus.TRUE_PRESERVER and sym == Status.NO_COUNTEREXAMPLE.value
    else:
        sym = "phase-ok" if phase_normalize(h).ok else "phase-violated"
        ok = exact.status is PreserverStatus.NOT_PRESERVER and sym == "phase-violated"
    return {
        "trial": trial,
        "seed": s,
        "side": "tnn" if positive else "negative-minor",
        "exact": exact.status.value,
        "symbol": sym,
        "agree": ok,
        "expected": ok,
    }


def _run_one(args):
    fn, params, trial = args
    return fn(*params[:-2], trial, *params[-2:])


def run_trials(kind: str, params: tuple, trials: int, offset: int = 0, jobs: int = 1,
               sink: Callable[[dict], None] | None = None) -> list[dict]:
    """Run trials ``offset .. trials-1``; records come back (and reach ``sink``) in trial order."""
    fn = {"thm1": thm1_trial, "thm2": thm2_trial}[kind]
    work: Iterable = ((fn, params, t) for t in range(offset, trials))
    out = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_run_one, list(work))
            for rec in results:
                out.append(rec)
                if sink:
                    sink(rec)
    else:
        for item in work:
            rec = _run_one(item)
            out.append(rec)
            if sink:
                sink(rec)
    return out
