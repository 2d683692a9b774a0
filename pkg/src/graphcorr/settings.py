"""Simulation settings: model families and the catalogue used by the experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .graph import CommunityAssignment
from .samplers import CorrelatedBernoulliParams, CorrelatedGaussianParams, rho_bounds


def block_sizes(n: int, proportions) -> list[int]:
    props = np.asarray(proportions, dtype=float)
    if np.any(props <= 0):
        raise ValidationError("block proportions must be positive")
    edges = np.rint(np.cumsum(props / props.sum()) * n).astype(int)
    sizes = np.diff(np.concatenate([[0], edges]))
    if np.any(sizes < 1):
        raise ValidationError(f"n={n} is too small for block proportions {props.tolist()}")
    return sizes.tolist()


def _two_block(diag, off):
    return [[diag, off], [off, diag]]


@dataclass(frozen=True)
class SbmSetting:
    """A rho-correlated SBM family, instantiated for any n and rho by :meth:`params`.

    Bernoulli settings use ``bx``/``by`` as block edge probabilities; Gaussian
    settings use them as block means together with ``sigx``/``sigy``.
    """

    name: str
    model: str
    bx: tuple
    by: tuple
    proportions: tuple = (1.0,)
    sigx: Optional[tuple] = None
    sigy: Optional[tuple] = None
    estimate: bool = False
    prior_k: Optional[int] = None
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.model not in ("bernoulli", "gaussian"):
            raise ValidationError(f"model must be 'bernoulli' or 'gaussian', got {self.model!r}")
        for name in ("bx", "by", "sigx", "sigy"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(map(tuple, np.atleast_2d(np.asarray(val, dtype=float)).tolist())))
        object.__setattr__(self, "proportions", tuple(float(p) for p in self.proportions))
        k = len(self.proportions)
        if np.asarray(self.bx).shape != (k, k) or np.asarray(self.by).shape != (k, k):
            raise ValidationError(f"{self.name}: block matrices must be {k}x{k}")
        if self.model == "gaussian":
            if self.sigx is None:
                object.__setattr__(self, "sigx", tuple(map(tuple, np.ones((k, k)).tolist())))
            if self.sigy is None:
                object.__setattr__(self, "sigy", tuple(map(tuple, np.ones((k, k)).tolist())))

    @property
    def k(self) -> int:
        return len(self.proportions)

    def assignment(self, n: int) -> CommunityAssignment:
        return CommunityAssignment.from_sizes(block_sizes(n, self.proportions))

    def params(self, n: int, rho: float):
        z = self.assignment(n)
        if self.model == "gaussian":
            return CorrelatedGaussianParams(
                np.array(self.bx), np.array(self.by), np.array(self.sigx), np.array(self.sigy), rho, z
            )
        return CorrelatedBernoulliParams(np.array(self.bx), np.array(self.by), rho, z)

    def rho_range(self) -> tuple[float, float]:
        """Admissible rho shared by every block (Bernoulli), or (-1, 1) exclusive for Gaussian."""
        if self.model == "gaussian":
            return (-1.0, 1.0)
        lo, hi = -1.0, 1.0
        bx, by = np.array(self.bx), np.array(self.by)
        for i in range(self.k):
            for j in range(i, self.k):
                a, b = rho_bounds(bx[i, j], by[i, j])
                lo, hi = max(lo, a), min(hi, b)
        return lo, hi

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "model": self.model,
            "bx": [list(r) for r in self.bx],
            "by": [list(r) for r in self.by],
            "proportions": list(self.proportions),
            "estimate": self.estimate,
        }
        if self.model == "gaussian":
            out["sigx"] = [list(r) for r in self.sigx]
            out["sigy"] = [list(r) for r in self.sigy]
        if self.prior_k is not None:
            out["prior_k"] = self.prior_k
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SbmSetting":
        known = {"name", "model", "bx", "by", "proportions", "sigx", "sigy", "estimate", "prior_k", "description"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown setting fields: {sorted(unknown)}")
        d = dict(d)
        d.setdefault("name", "custom")
        d.setdefault("model", "bernoulli")
        if "proportions" not in d:
            d["proportions"] = [1.0] * len(np.atleast_2d(d["bx"]))
        return cls(**d)

    def with_estimation(self, name: str, proportions=None) -> "SbmSetting":
        return SbmSetting(
            name,
            self.model,
            self.bx,
            self.by,
            tuple(proportions) if proportions is not None else self.proportions,
            self.sigx,
            self.sigy,
            estimate=True,
            prior_k=self.k,
        )


# Bernoulli settings; the four FIG1 panels are rows 1-4 of FIG3
ER_SAME = SbmSetting("er_p0.5_q0.5", "bernoulli", [[0.5]], [[0.5]], description="rho-ER, p = q = 0.5")
ER_DIFF = SbmSetting("er_p0.7_q0.2", "bernoulli", [[0.7]], [[0.2]], description="rho-ER, p = 0.7, q = 0.2")
SBM_SAME = SbmSetting(
    "sbm_same", "bernoulli", _two_block(0.7, 0.3), _two_block(0.7, 0.3), (0.5, 0.5),
    description="rho-SBM, Bx = By, 0.7 within / 0.3 between",
)
SBM_DIFF = SbmSetting(
    "sbm_diff", "bernoulli", _two_block(0.7, 0.3), _two_block(0.2, 0.5), (0.5, 0.5),
    description="rho-SBM, Bx 0.7/0.3, By 0.2/0.5",
)
SBM_DIFF_EST = SBM_DIFF.with_estimation("sbm_diff_estimated")
SBM_DIFF_UNEQUAL = SBM_DIFF.with_estimation("sbm_diff_unequal_estimated", (0.7, 0.3))

FIG1 = {"a": ER_SAME, "b": ER_DIFF, "c": SBM_SAME, "d": SBM_DIFF}
FIG3 = {1: ER_SAME, 2: ER_DIFF, 3: SBM_SAME, 4: SBM_DIFF, 5: SBM_DIFF_EST, 6: SBM_DIFF_UNEQUAL}

# Gaussian settings, unit variances; "first block" means within-community, "second" between
FIG4 = {
    1: SbmSetting("gauss_er_same", "gaussian", [[0.0]], [[0.0]], description="Gaussian rho-ER, mu_x = mu_y = 0"),
    2: SbmSetting("gauss_er_diff", "gaussian", [[0.0]], [[2.0]], description="Gaussian rho-ER, mu_x = 0, mu_y = 2"),
    3: SbmSetting(
        "gauss_sbm_same", "gaussian", _two_block(0.0, 2.0), _two_block(0.0, 2.0), (0.5, 0.5),
        description="Gaussian rho-SBM, means 0 within / 2 between for both graphs",
    ),
    4: SbmSetting(
        "gauss_sbm_diff", "gaussian", _two_block(2.0, 0.0), _two_block(4.0, 2.0), (0.5, 0.5),
        description="Gaussian rho-SBM, mu_x 2/0, mu_y 4/2 (within/between)",
    ),
}
