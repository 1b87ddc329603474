"""Discrete chains, edge-path groups and small-loop subgroups of finite metric spaces."""

from .chains import (
    Chain,
    HomotopyVerdict,
    Move,
    VertexAdd,
    VertexDelete,
    chain_homotopic,
    concat,
    discretize_path,
    interleaved_chain,
    inverse,
    replay,
)
from .complexes import (
    SimplicialComplex2,
    SimplicialMap,
    build_nerve_2skeleton,
    build_rips_2skeleton,
    extend_vertex_map,
)
from .errors import ChainShapeError
from .fixtures import fixture_space, shipped_fixture, triangle_space
from .io import parse_csv, read_space, space_csv
from .grouppres import (
    AbelianInvariant,
    GroupMap,
    Presentation,
    Word,
    abelianize,
    chain_to_word,
    edge_path_group,
    induced_hom,
    smith_normal_form,
)
from .metric_cover import (
    Cover,
    FiniteMetricSpace,
    build_ball_cover,
    build_space,
    is_refinement,
    is_star_refinement,
    refines,
    star_cover,
    star_refines,
)
from .shapesys import (
    Lasso,
    ScaleTower,
    ShapeReport,
    build_tower,
    check_diagram_commutes,
    filtration_report,
    lasso_factorization,
    lasso_neighbor,
    nerve_to_rips,
    rips_to_nerve,
    spanier_membership,
    spanier_quotient,
    whisker_neighbor,
)

__version__ = "0.1.0"
