"""Constructors for every spin-model family handled by the library."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..matrix import SpinMatrix
from .abelian import (
    BadEtaChoice,
    TZeroBranchUnresolved,
    abelian_theta,
    build_abelian_model,
    build_cyclic_bb_model,
    cyclic_bb_parameters,
)
from .hadamard import (
    HadamardSource,
    NotHadamard,
    hadamard,
    hadamard_array,
    hadamard_transform,
    normalized_order4,
    paley1,
    sylvester,
)
from .hadamard_models import BadParameters, build_index_m_model, build_symmetric_model, potts
from .higman_sims import (
    ConstructionInvariantViolated,
    HigmanSimsGraph,
    higman_sims_graph,
    jaeger_model,
    srg_parameters,
)

FAMILY_ALIASES = {
    "potts": "potts",
    "whua": "hadamard_index_m",
    "hadamard_index_m": "hadamard_index_m",
    "index-m": "hadamard_index_m",
    "whub": "hadamard_symmetric",
    "hadamard_symmetric": "hadamard_symmetric",
    "symmetric": "hadamard_symmetric",
    "abelian": "abelian",
    "cyclic-bb": "cyclic_bb",
    "cyclic_bb": "cyclic_bb",
    "higman-sims": "higman_sims",
    "higman_sims": "higman_sims",
    "jaeger": "higman_sims",
}


@dataclass
class ModelSpec:
    """Parameters selecting one model; unused fields are ignored by the family."""

    family: str
    m: int | None = None
    r: int | None = None
    hadamard: HadamardSource | None = None
    a_exp: int = 1
    b_exp: int = 1
    eta_exp: int = 1
    u_branch: int | None = None
    group: list[int] = field(default_factory=list)
    eta_exps: list[int] | None = None
    chi_exps: list[int] | None = None
    d_sign: int = 1
    t0_sign: int = 1

    def __post_init__(self):
        key = FAMILY_ALIASES.get(self.family)
        if key is None:
            raise BadParameters(f"unknown family {self.family!r}")
        self.family = key


def build_model(spec: ModelSpec) -> SpinMatrix:
    f = spec.family
    if f == "potts":
        if spec.r is None:
            raise BadParameters("potts needs r")
        return potts(spec.r, spec.u_branch)
    if f == "hadamard_index_m":
        return build_index_m_model(spec.m, spec.r, spec.a_exp, spec.hadamard, spec.u_branch)
    if f == "hadamard_symmetric":
        return build_symmetric_model(spec.m, spec.r, spec.b_exp, spec.eta_exp, spec.hadamard, spec.u_branch)
    if f == "abelian":
        return build_abelian_model(spec.group, spec.eta_exps, spec.chi_exps, spec.d_sign, spec.t0_sign)
    if f == "cyclic_bb":
        return build_cyclic_bb_model(spec.m, spec.a_exp)
    if f == "higman_sims":
        return jaeger_model()
    raise BadParameters(f"unknown family {f!r}")


__all__ = [
    "BadEtaChoice",
    "BadParameters",
    "ConstructionInvariantViolated",
    "FAMILY_ALIASES",
    "HadamardSource",
    "HigmanSimsGraph",
    "ModelSpec",
    "NotHadamard",
    "TZeroBranchUnresolved",
    "abelian_theta",
    "build_abelian_model",
    "build_cyclic_bb_model",
    "build_index_m_model",
    "build_model",
    "build_symmetric_model",
    "cyclic_bb_parameters",
    "hadamard",
    "hadamard_array",
    "hadamard_transform",
    "higman_sims_graph",
    "jaeger_model",
    "normalized_order4",
    "paley1",
    "potts",
    "srg_parameters",
    "sylvester",
]
