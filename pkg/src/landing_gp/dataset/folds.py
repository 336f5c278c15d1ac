import hashlib
import logging

import numpy as np

from .models import FoldPlan

logger = logging.getLogger(__name__)


class FoldCapacityError(ValueError):
    """Requested folds need more landings than the database holds."""


def split_folds(n_ob: int, n_folds: int, n_test: int, seed: int) -> FoldPlan:
    """
    Draw `n_folds` disjoint test sets of `n_test` landing positions, uniformly at random.

    Positions not covered by any fold (n_ob - n_folds * n_test of them) stay in every training
    set and are never tested.
    """
    if n_folds < 1 or n_test < 1:
        raise FoldCapacityError(f"need at least one fold of at least one landing, got M={n_folds}, n_test={n_test}")
    if n_folds * n_test > n_ob:
        raise FoldCapacityError(f"{n_folds} folds of {n_test} landings need {n_folds * n_test} > {n_ob} landings")

    rng = np.random.default_rng(seed)
    chosen = rng.permutation(n_ob)[: n_folds * n_test]
    folds = tuple(
        tuple(sorted(int(i) for i in chosen[p * n_test : (p + 1) * n_test])) for p in range(n_folds)
    )
    plan = FoldPlan(folds=folds, n_ob=n_ob)
    logger.info(f"Split {n_ob} landings into {n_folds} folds of {n_test} ({len(plan.uncovered())} uncovered)")
    return plan


def fold_plan_digest(plan: FoldPlan) -> str:
    text = ";".join(",".join(str(i) for i in fold) for fold in plan.folds)
    return hashlib.sha256(f"{plan.n_ob}|{text}".encode()).hexdigest()
