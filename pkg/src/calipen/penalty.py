"""Penalty families (SCAD, MCP, L1) and the convex-concave split p = J + lam*|.|."""

import enum
from dataclasses import dataclass

import numpy as np


class Family(enum.Enum):
    SCAD = "scad"
    MCP = "mcp"
    L1 = "l1"


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family with shape parameter ``a`` (SCAD needs a > 2, MCP a > 1)."""

    family: Family = Family.SCAD
    a: float = 3.7

    def __post_init__(self):
        if self.family is Family.SCAD and not self.a > 2:
            raise ValueError("SCAD requires a > 2")
        if self.family is Family.MCP and not self.a > 1:
            raise ValueError("MCP requires a > 1")

    @staticmethod
    def scad(a=3.7):
        return PenaltySpec(Family.SCAD, a)

    @staticmethod
    def mcp(a=3.0):
        return PenaltySpec(Family.MCP, a)

    @staticmethod
    def l1():
        return PenaltySpec(Family.L1, a=float("nan"))


def penalty_deriv(spec, t, lam):
    """Derivative of the penalty at t >= 0; flat beyond a*lam for SCAD/MCP."""
    t = np.asarray(t, dtype=float)
    if spec.family is Family.L1:
        out = np.full_like(t, lam)
    elif spec.family is Family.SCAD:
        a = spec.a
        out = np.where(
            t <= lam,
            lam,
            np.maximum(a * lam - t, 0.0) / (a - 1.0),
        )
    else:  # MCP
        out = np.maximum(spec.a * lam - t, 0.0) / spec.a
    return out if out.ndim else float(out)


def penalty_value(spec, t, lam):
    """Penalty value: the antiderivative of penalty_deriv with p(0) = 0."""
    t = np.asarray(t, dtype=float)
    if spec.family is Family.L1:
        out = lam * t
    elif spec.family is Family.SCAD:
        a = spec.a
        out = np.where(
            t <= lam,
            lam * t,
            np.where(
                t <= a * lam,
                (2 * a * lam * t - t**2 - lam**2) / (2 * (a - 1.0)),
                (a + 1.0) * lam**2 / 2.0,
            ),
        )
    else:  # MCP
        a = spec.a
        out = np.where(t <= a * lam, lam * t - t**2 / (2 * a), a * lam**2 / 2.0)
    return out if out.ndim else float(out)


def concave_value(spec, t, lam):
    """Concave part J(t) = p(t) - lam*t of the decomposition."""
    t = np.asarray(t, dtype=float)
    return penalty_value(spec, t, lam) - lam * t


def concave_grad(spec, beta_j, lam):
    """Signed derivative of J(|.|): sign(b) * (pderiv(|b|) - lam), 0 at b = 0."""
    b = np.asarray(beta_j, dtype=float)
    out = np.sign(b) * (penalty_deriv(spec, np.abs(b), lam) - lam)
    out = np.where(b == 0.0, 0.0, out)
    return out if out.ndim else float(out)


def soft_threshold(z, lam):
    """sign(z) * max(|z| - lam, 0), the coordinate minimizer under an L1 penalty."""
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)
    return out if out.ndim else float(out)
