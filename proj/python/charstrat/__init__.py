from ._core import (
    CharstratError,
    __version__,
    bad_locus_codim,
    box_rank_stratum_codim,
    census,
    classify,
    corank1_normal_form,
    crit_codim,
    delta_codim,
    delta_nonempty,
    estimate_codim,
    first_degeneracy_codim,
    milnor,
    minimize,
    morse,
    run_cli,
    second_order_codim,
)

__all__ = [
    "CharstratError",
    "__version__",
    "bad_locus_codim",
    "box_rank_stratum_codim",
    "census",
    "classify",
    "corank1_normal_form",
    "crit_codim",
    "delta_codim",
    "delta_nonempty",
    "estimate_codim",
    "first_degeneracy_codim",
    "milnor",
    "minimize",
    "morse",
    "run_cli",
    "second_order_codim",
]
