"""Frozen desk-scale profiles: parameter sets small enough to build and
embed on one machine in seconds, with every certificate checked exactly.

The asymptotic constants make the machinery vacuous below astronomic sizes,
so these profiles shrink them while keeping every inequality the pipeline
actually checks.  Numbers here are load-bearing: tests pin success rates
against them.
"""
from __future__ import annotations

from fractions import Fraction

from .digraphs import Digraph, Layering, compute_layering, grid_digraph, hypercube_digraph
from .embedding import Embedding, PipelineReport, embed_graded_pipeline, embed_pipeline
from .structure import (
    SQRT_HALF_LOW,
    GradedParams,
    StepTuning,
    StructureParams,
    _subseed,
    build_graded_structure,
    build_structure,
)
from .tournaments import Tournament, random_tournament

DESK_FLOOR_FACTOR = 2
DESK_GRADED_FLOOR_FACTOR = 4
DESK_ORDER_MODE = "identity"


def desk_params() -> StructureParams:
    """Five blocks sized for the 9-vertex grid guest; N = 46800."""
    return StructureParams(
        delta_comm=2,
        w=1,
        h=5,
        s=(10, 10, 12, 10, 10),
        delta=Fraction(1),
        c_m=Fraction(15),
        c_b=Fraction(4),
        c_a=Fraction(5, 2),
        c_mid=Fraction(2),
    )


def desk_tuning() -> StepTuning:
    return StepTuning(k_in=1, delta_inner=Fraction(1, 8))


def desk_guest() -> tuple[Digraph, Layering]:
    """2x3 grid, oriented right and down: height 5, width 1, degrees <= 2."""
    G = grid_digraph(2, 3)
    return G, compute_layering(G)


def run_desk_pipeline(
    seed: int, report: PipelineReport | None = None
) -> tuple[Embedding, Tournament]:
    """Host, structure, and embedding from one master seed."""
    G, L = desk_guest()
    p = desk_params()
    T = random_tournament(p.n_required, seed=_subseed(seed, "host"))
    es = build_structure(
        T, p, desk_tuning(), seed=_subseed(seed, "structure"),
        order_mode=DESK_ORDER_MODE,
    )
    emb = embed_pipeline(
        G, L, T, es, seed=_subseed(seed, "embed"),
        floor_factor=DESK_FLOOR_FACTOR, report=report,
    )
    return emb, T


def desk_graded_params() -> GradedParams:
    """Hand-sized ladder for the oriented 3-cube; N = 18432.

    delta_list follows the (1/(4 d- d+)) (2^{-1/2} s_{i+1}/b_{i+1})^{d-_i}
    shape with the rational lower bound standing in for 2^{-1/2}.
    """
    a = (256, 384, 448, 448)
    b = (128, 192, 224, 224)
    s = (48, 32, 24, 4)
    din = (1, 2, 3)

    def dl(i: int) -> Fraction:
        half = Fraction(1, 2) ** (din[i] // 2) * (SQRT_HALF_LOW if din[i] % 2 else 1)
        return Fraction(1, 36) * half * Fraction(s[i + 1], b[i + 1]) ** din[i]

    return GradedParams(
        height=4,
        layer_sizes=(1, 3, 3, 1),
        delta_in=din,
        delta_plus=3,
        delta_minus=3,
        eps=Fraction(2, 5),
        ell=6,
        k=(1, 1, 1),
        a=a,
        b=b,
        s=s,
        delta_list=tuple(dl(i) for i in range(3)),
    )


def desk_graded_guest() -> tuple[Digraph, Layering]:
    G = hypercube_digraph(3)
    return G, compute_layering(G)


def run_desk_graded_pipeline(
    seed: int, report: PipelineReport | None = None
) -> tuple[Embedding, Tournament]:
    G, L = desk_graded_guest()
    p = desk_graded_params()
    T = random_tournament(p.n_required, seed=_subseed(seed, "host"))
    gs = build_graded_structure(
        T, G, L, p, seed=_subseed(seed, "structure"), order_mode=DESK_ORDER_MODE,
    )
    emb = embed_graded_pipeline(
        G, L, T, gs, seed=_subseed(seed, "embed"),
        floor_factor=DESK_GRADED_FLOOR_FACTOR, report=report,
    )
    return emb, T
