"""Exact cyclotomic arithmetic for braided vector spaces and the braid group images they induce."""

from .bvs import (
    BVS,
    BraidWord,
    braid_generator,
    braid_generators,
    check_unitary,
    check_ybe,
    eval_braid_word,
    flip_bvs,
    operator_order,
    parse_braid_word,
)
from .closure import (
    ClosureResult,
    VirtAbelianCert,
    braid_relation_check,
    closure_mod_scalars,
    dimino_closure,
    discussion_example,
    monomial_certificate,
)
from .cyclo import CycMatrix, CycNum, make_root, sqrt_int
from .errors import *  # noqa: F401,F403
from .gaussian import gauss_sum, gaussian_bvs, jones_conditions
from .grouptype import (
    Cocycle3,
    FiniteGroup,
    PhaseTwist,
    SetSolution,
    YDModule,
    check_set_theoretic,
    check_twisted_action,
    conjugation_module,
    cyclic_3cocycle,
    gamma_coeff,
    linearize,
    mu_coeff,
    yd_braiding,
)

__version__ = "0.1.0"
