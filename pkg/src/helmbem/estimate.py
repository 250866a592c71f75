"""Memory estimates: structural non-zero counts of the FMM matrices from the
cluster tree alone, next to closed-form rules of thumb.  No kernel is
evaluated here."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fmm.operators import FmmConfig, choose_method, count_nonzeros
from .fmm.tree import cluster_tree
from .mesh import Mesh, element_diameter_stats

BYTES_PER_ENTRY = 16

# Empirical constants that reproduce the tabulated estimates: about ten
# nearfield clusters per cluster, and 250 N nearfield entries for the
# multi-level tree (25 elements per leaf, 10 near clusters).
NEAR_CLUSTERS = 10
MLFMM_NEAR_PER_ELEMENT = 250
ROOT_CLUSTER_FACTOR = 0.9
CHILDREN = 4
INTERACTIONS = 40


def appendix_b_estimates(n: int, truncations, method: str) -> dict:
    """Closed-form entry counts per matrix for SLFMM or MLFMM.

    SLFMM: N ~ 10 N^1.5, T = S = 2L^2 N, D ~ sqrt(N)(sqrt(N) - 10) 2L^2.
    MLFMM: N ~ 250 N, T_l = S_l = 2L_l^2 N,
    D_1 ~ n1(n1 - 10) 2L_1^2 with n1 = round(0.9 sqrt(N)),
    D_l ~ 4^(l-1) 0.9 sqrt(N) 2L_l^2 40 for l > 1.
    """
    Ls = list(truncations)
    if method == "SLFMM":
        L = Ls[0]
        r = math.sqrt(n)
        return {"N": round(10 * n ** 1.5), "T1": 2 * L * L * n, "S1": 2 * L * L * n,
                "D1": math.floor(r * max(r - NEAR_CLUSTERS, 0.0) * 2 * L * L)}
    if method != "MLFMM":
        raise ValueError(f"no closed-form estimate for {method!r}")
    out = {"N": MLFMM_NEAR_PER_ELEMENT * n}
    n1 = round(ROOT_CLUSTER_FACTOR * math.sqrt(n))
    for lv, L in enumerate(Ls, start=1):
        out[f"T{lv}"] = 2 * L * L * n
        out[f"S{lv}"] = 2 * L * L * n
        if lv == 1:
            out["D1"] = max(n1 - NEAR_CLUSTERS, 0) * n1 * 2 * L * L
        else:
            out[f"D{lv}"] = math.floor(CHILDREN ** (lv - 1) * ROOT_CLUSTER_FACTOR * math.sqrt(n) * 2 * L * L
                                  * INTERACTIONS)
    return out


@dataclass
class RamEstimate:
    step: int
    frequency: float
    method: str
    reasons: list
    n: int
    truncations: list = field(default_factory=list)
    clusters: list = field(default_factory=list)
    structural: dict = field(default_factory=dict)
    formula: dict = field(default_factory=dict)

    @property
    def dense_entries(self) -> int:
        return self.n * self.n

    @property
    def structural_bytes(self) -> int:
        if self.method == "NoFMM":
            return BYTES_PER_ENTRY * self.dense_entries
        return BYTES_PER_ENTRY * sum(self.structural.values())

    @property
    def formula_bytes(self) -> int:
        if self.method == "NoFMM":
            return BYTES_PER_ENTRY * self.dense_entries
        return BYTES_PER_ENTRY * sum(self.formula.values())

    @property
    def dense_bytes(self) -> int:
        return BYTES_PER_ENTRY * self.dense_entries

    def lines(self) -> list:
        out = [f"step {self.step}: f = {self.frequency:g} Hz, method {self.method}"]
        out += [f"  {r}" for r in self.reasons]
        if self.method != "NoFMM":
            out.append("  clusters per level: " + ", ".join(str(c) for c in self.clusters)
                       + "; truncation L per level: " + ", ".join(str(L) for L in self.truncations))
            out.append(f"  {'matrix':<8}{'structural':>14}{'estimate':>14}")
            for key in self.structural:
                out.append(f"  {key:<8}{self.structural[key]:>14d}{self.formula.get(key, 0):>14d}")
        out.append(f"  memory: {self.structural_bytes / 1e9:.3f} GByte from the cluster tree, "
                   f"{self.formula_bytes / 1e9:.3f} GByte from the closed form, "
                   f"{self.dense_bytes / 1e9:.3f} GByte without FMM")
        return out


def estimate_step(mesh: Mesh, frequency: float, method: str, c: float = 340.0, box_edge: float = 0.0,
                  config: FmmConfig | None = None, step: int = 1, diameter: float | None = None,
                  n_levels: int | None = None) -> RamEstimate:
    """Cluster tree plus structural and closed-form counts for one frequency."""
    config = config or FmmConfig()
    bnd = mesh.boundary() if (mesh.kind != 0).any() else mesh
    k = 2 * math.pi * frequency / c
    if diameter is None:
        diameter = element_diameter_stats(bnd)[3]
    eff, why = choose_method(method, bnd.n_elements, k, diameter)
    rep = RamEstimate(step, frequency, eff, why, bnd.n_elements)
    if eff == "NoFMM":
        return rep
    tree = cluster_tree(bnd, eff, box_edge, n_levels)
    Ls = tree.truncations(k, config.truncation_factor, config.min_expansion)
    rep.truncations = Ls
    rep.clusters = [lv.n_clusters for lv in tree.levels]
    rep.structural = count_nonzeros(tree, Ls)
    rep.formula = appendix_b_estimates(bnd.n_elements, Ls, eff)
    return rep


def estimate_job(job, steps=None, config: FmmConfig | None = None) -> list:
    """One RamEstimate per frequency step of a parsed deck."""
    steps = range(1, job.plan.num_steps + 1) if steps is None else steps
    bnd = job.mesh.boundary()
    diameter = element_diameter_stats(bnd)[3]
    cfg = config or FmmConfig(min_expansion=job.min_expansion_length)
    return [estimate_step(bnd, job.plan.frequency_at(n), job.method, job.c, job.box_length, cfg, n, diameter)
            for n in steps]


__all__ = ["BYTES_PER_ENTRY", "RamEstimate", "appendix_b_estimates", "estimate_job", "estimate_step"]
