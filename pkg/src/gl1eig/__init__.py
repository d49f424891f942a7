"""Exact p-adic computations for the GL(1) eigenvariety of a number field.

Weight spaces of ``(O_K (x) Z_p)^x`` at a totally split prime, the closure of
the congruence units, the dimension ``1 + r2 + delta``, admissible infinity
types, and the rigid-analytic locus cut out by ``kappa -> log kappa(u)``.
"""

from .padic import PadicContext, PadicInt, PrecisionError, exp_p, log_iwasawa, teichmuller, zp_power
from .linalg import (
    GroupStructure,
    LatticeBasis,
    ZpMatrix,
    howell_form,
    integer_reconstruct,
    kernel_lattice,
    quotient_structure,
    smith_structure,
)
from .number_field import (
    FieldElement,
    NumberFieldData,
    SplitPrimeData,
    TameLevel,
    embed,
    gamma_u,
    hensel_embeddings,
    load_field,
    ray_class_order,
    split_prime_search,
)
from .weights import (
    CharValue,
    Classification,
    Kind,
    Weight,
    algebraic_weight,
    classify,
    conductor,
    eval_weight,
    is_locally_parallel,
    is_parallel,
    is_trivial_on,
    norm_one_basis,
    rigid_locus_values,
)
from .eigenvariety import (
    EigReport,
    classify_point,
    eig_report,
    infinity_type_lattice,
    leopoldt_defect,
    quotient_QU,
    unit_log_lattice,
)
from .demos import finite_quotient_order, formal_density_check, unit_disc_torsion_check

__version__ = "0.1.0"
