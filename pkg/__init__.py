from gf import (
    FieldElement,
    FieldSpec,
    MlcountError,
    enumerate_elements,
    kappa,
    make_field,
    primitive_element,
)
from exactla import MatrixFq, choose_submatrix, invert, rank
from model import (
    CountQuery,
    Partition,
    SystemSpec,
    parse_problem,
    serialize_problem,
    validate_system,
)
from counting import (
    count,
    count_product_nonzero,
    count_product_zero,
    count_single,
    count_system,
)
from oracle import brute_count, brute_count_system
from codes import CodeSpec, min_distance, weight_hierarchy

__version__ = "1.0.0"
