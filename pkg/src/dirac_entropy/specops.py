"""Dense spectral discretizations on interval sets.

* band-limited (sine kernel) projector restricted to a union of intervals,
* the off-diagonal block ``T`` of the Fermi projector between two intervals,
* the diagonal blocks ``Q P Q`` with their principal-value part,
* eigen/singular value helpers, Schatten norms and entropy sums.

All Nystrom matrices use the symmetric weighting ``sqrt(w_i) K(x_i, x_j) sqrt(w_j)``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, GeometryError, NumericalError, ResourceError, TouchingClosuresError
from .geometry import Interval, IntervalSet
from .quad import (QuadratureRule, composite_gauss_legendre, gauss_legendre, oscillatory_nodes,
                   pv_rule)
from .testfns import TestFunction

log = logging.getLogger(__name__)

NODE_CAP = 4000
CLIP_WARN = 1e-6
CLIP_FAIL = 1e-3
CSV_VERSION = "dirac-entropy/spectrum v1"


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """Nodes, weights and a dense operator matrix over an interval set.

    ``matrix`` is real symmetric for cutoff projectors and complex Hermitian
    for principal-value blocks. ``cutoff_k`` is zero for non-cutoff systems.
    """

    support: IntervalSet
    rule_per_interval: tuple
    matrix: np.ndarray = field(repr=False)
    cutoff_k: float = 0.0

    @property
    def kappa(self) -> float:
        return 0.5 * self.cutoff_k

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([r.nodes for r in self.rule_per_interval])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([r.weights for r in self.rule_per_interval])

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class CrossBlock:
    """Real form ``R`` of the block ``T = i R`` coupling two intervals.

    ``R_ij = sqrt(w_i) sqrt(v_j) / (2 pi (x_i - y_j))``. ``tail_bound`` bounds
    the Hilbert-Schmidt mass lost by truncating an unbounded interval.
    """

    rows_support: Interval
    cols_support: Interval
    matrix: np.ndarray = field(repr=False)
    row_rule: QuadratureRule | None = field(default=None, repr=False)
    col_rule: QuadratureRule | None = field(default=None, repr=False)
    tail_bound: float = 0.0

    @property
    def complex_matrix(self) -> np.ndarray:
        return 1j * self.matrix


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    residual_norm: float
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class EntropySum:
    value: float
    clipped: int
    worst_excursion: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class SchattenResult:
    value: float
    p: float
    tail_bound: float
    singular_values: np.ndarray = field(repr=False)

    def __float__(self):
        return self.value


# ---------------------------------------------------------------- node sizing

def _check_cap(n: int, cap: int):
    if n > cap:
        raise ResourceError(f"{n} nodes requested for one interval exceeds the cap of {cap}")


def cutoff_rules(support: IntervalSet, kappa: float, nodes_per_interval=None,
                 node_cap: int = NODE_CAP) -> list[QuadratureRule]:
    """Gauss-Legendre rule per interval, sized for wavenumber ``kappa``."""
    if not support.bounded:
        raise ArgumentError("cutoff systems need bounded intervals")
    if nodes_per_interval is None:
        counts = [oscillatory_nodes(kappa, iv.length) for iv in support]
    elif np.ndim(nodes_per_interval) == 0:
        counts = [int(nodes_per_interval)] * len(support)
    else:
        counts = [int(n) for n in nodes_per_interval]
        if len(counts) != len(support):
            raise ArgumentError("one node count per interval expected")
    for n in counts:
        _check_cap(n, node_cap)
    return [gauss_legendre(n, iv) for iv, n in zip(support, counts)]


# ---------------------------------------------------------------- assembly

def sine_kernel_matrix(nodes: np.ndarray, weights: np.ndarray, kappa: float) -> np.ndarray:
    sw = np.sqrt(weights)
    d = nodes[:, None] - nodes[None, :]
    # sin(kd)/(pi d) = (k/pi) sinc(k d/pi); exact k/pi on the diagonal
    K = (kappa / math.pi) * np.sinc(d * (kappa / math.pi))
    M = sw[:, None] * K * sw[None, :]
    return 0.5 * (M + M.T)


def assemble_cutoff_projector(support: IntervalSet, k: float, nodes_per_interval=None,
                              rules: Sequence[QuadratureRule] | None = None,
                              node_cap: int = NODE_CAP) -> SpectralSystem:
    """Band-limited projector ``1_S P_k 1_S`` as a symmetric Nystrom matrix.

    The one-sided cutoff symbol ``1_[0,k]`` is modulated to the centered sine
    kernel with ``kappa = k/2``. Pass ``rules`` to reuse panels across systems.
    """
    if not k > 0:
        raise ArgumentError("cutoff wavenumber must be positive")
    if not support.bounded:
        raise ArgumentError("cutoff systems need bounded intervals")
    kappa = 0.5 * k
    if rules is None:
        rules = cutoff_rules(support, kappa, nodes_per_interval, node_cap)
    rules = tuple(rules)
    x = np.concatenate([r.nodes for r in rules])
    w = np.concatenate([r.weights for r in rules])
    return SpectralSystem(support, rules, sine_kernel_matrix(x, w, kappa), float(k))


def _far_graded_rule(iv: Interval, near: str, n: int, truncation: float) -> tuple[QuadratureRule, Interval]:
    """Rule on an interval, truncated if unbounded, with panels growing away
    from the end facing the other interval."""
    if iv.bounded:
        return gauss_legendre(n, iv), iv
    if math.isinf(iv.b):
        lo, hi = iv.a, iv.a + truncation
    else:
        lo, hi = iv.b - truncation, iv.b
    n_panels = max(1, int(math.ceil(math.log2(truncation))) + 1)
    widths = 2.0 ** np.arange(n_panels)
    widths *= truncation / widths.sum()
    offs = np.concatenate([[0.0], np.cumsum(widths)])
    offs[-1] = truncation
    breaks = lo + offs if near == "left" else hi - offs[::-1]
    dom = Interval(lo, hi)
    return composite_gauss_legendre(breaks, n, dom), dom


def assemble_cross_block(i1: Interval, i2: Interval, n1: int, n2: int,
                         truncation: float = 1e4, rules=None) -> CrossBlock:
    """Off-diagonal block of the Fermi projector between two separated intervals.

    An unbounded interval is truncated to length ``truncation``; it then uses
    composite panels of ``n`` nodes each, doubling in width away from the gap.
    """
    if i1.gap_to(i2) == 0:
        raise TouchingClosuresError(f"closures of ({i1}) and ({i2}) touch")
    if i1.gap_to(i2) < 0:
        raise GeometryError(f"intervals ({i1}) and ({i2}) overlap")
    if not (i1.bounded or i2.bounded):
        raise GeometryError("at most one interval may be unbounded")
    tail = 0.0
    if rules is not None:
        r1, r2 = rules
        d1, d2 = r1.domain, r2.domain
    else:
        left_first = i1.a < i2.a
        r1, d1 = _far_graded_rule(i1, "right" if left_first else "left", n1, truncation)
        r2, d2 = _far_graded_rule(i2, "left" if left_first else "right", n2, truncation)
    for iv, dom, other in ((i1, d1, i2), (i2, d2, i1)):
        if not iv.bounded:
            # HS mass of 1/(2 pi (x - y)) beyond the truncation point
            far = dom.b if math.isinf(iv.b) else dom.a
            tail += abs(math.log(abs(far - other.a) / abs(far - other.b))) / (4 * math.pi ** 2)
    x, w = r1.nodes, r1.weights
    y, v = r2.nodes, r2.weights
    R = np.sqrt(w)[:, None] * np.sqrt(v)[None, :] / (2 * math.pi * (x[:, None] - y[None, :]))
    return CrossBlock(i1, i2, R, r1, r2, tail)


@dataclass(frozen=True, eq=False)
class PVBlock(SpectralSystem):
    """``Q_I P Q_I``: ``1/2 + (i / 2 pi) S`` with ``S`` real antisymmetric.

    ``S_ij = sqrt(w_i w_j)/(x_i - x_j)`` is the weight-symmetrized off-diagonal
    part of the principal-value rule, so ``matrix`` is exactly Hermitian.
    ``collocation`` adds the subtract-and-add diagonal and self terms in the
    same weighted coordinates; it is not Hermitian but resolves products of
    blocks to second order and is what block-word traces use.
    """

    skew: np.ndarray | None = field(default=None, repr=False)

    @property
    def rule(self):
        return self.rule_per_interval[0]

    @property
    def collocation(self) -> np.ndarray:
        sw = np.sqrt(self.rule.weights)
        H = sw[:, None] * self.rule.matrix / sw[None, :]
        return 0.5 * np.eye(len(sw)) + (1j / (2 * math.pi)) * H

    def apply(self, phi_values) -> np.ndarray:
        """Action on function values at the nodes (unweighted coordinates)."""
        return 0.5 * np.asarray(phi_values) + (1j / (2 * math.pi)) * self.rule.apply(phi_values)


def assemble_pv_block(interval: Interval, n: int, breaks=None) -> PVBlock:
    """Diagonal block on one interval; ``breaks`` gives composite panels of ``n`` nodes."""
    if not interval.bounded:
        raise ArgumentError("principal-value blocks need a bounded interval")
    rule = pv_rule(n, interval, breaks)
    sw = np.sqrt(rule.weights)
    d = rule.nodes[:, None] - rule.nodes[None, :]
    np.fill_diagonal(d, 1.0)
    S = sw[:, None] * sw[None, :] / d
    np.fill_diagonal(S, 0.0)
    S = 0.5 * (S - S.T)
    M = 0.5 * np.eye(len(sw)) + (1j / (2 * math.pi)) * S
    return PVBlock(IntervalSet([interval]), (rule,), M, 0.0, skew=S)


# ---------------------------------------------------------------- linear algebra

def sym_eig(matrix, vectors: bool = False, check: bool = True) -> SpectrumResult:
    """Full symmetric (or Hermitian) eigendecomposition, eigenvalues descending."""
    M = np.asarray(matrix)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ArgumentError("square matrix expected")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if M.size and np.max(np.abs(M - M.conj().T)) > 1e-12 * max(scale, 1e-300):
        raise ArgumentError("matrix is not symmetric")
    try:
        lam, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    lam, V = lam[::-1], V[:, ::-1]
    resid = 0.0
    if check and M.size:
        norm = max(float(np.max(np.abs(lam))), 1e-300)  # spectral norm of a Hermitian matrix
        R = M @ V - V * lam
        resid = float(np.max(np.linalg.norm(R, axis=0))) / norm
        orth = float(np.max(np.abs(V.conj().T @ V - np.eye(M.shape[0]))))
        if resid > 1e-10 or orth > 1e-10:
            raise NumericalError("eigendecomposition failed its residual check",
                                 residual=resid, orthogonality=orth)
    return SpectrumResult(lam, resid, V if vectors else None)


def singular_values(block: CrossBlock | np.ndarray) -> np.ndarray:
    M = block.matrix if isinstance(block, CrossBlock) else np.asarray(block)
    return np.linalg.svd(M, compute_uv=False)


def schatten_norm(block: CrossBlock | np.ndarray, p: float) -> SchattenResult:
    """``(sum s_i^p)^(1/p)`` with an extrapolated bound on the omitted tail.

    Singular values below ``1e-14 s_max`` are treated as rounding noise. The
    tail bound continues the geometric decay of the last resolved values.
    """
    if not p > 0:
        raise ArgumentError("Schatten exponent must be positive")
    s = singular_values(block)
    if s.size == 0 or s[0] == 0:
        return SchattenResult(0.0, p, 0.0, s)
    keep = s > 1e-14 * s[0]
    s_kept = s[keep]
    tail = 0.0
    if s_kept.size >= 6:
        q = (s_kept[-1] / s_kept[-6]) ** 0.2
        if q < 1:
            tail = s_kept[-1] ** p * q ** p / (1 - q ** p)
    if isinstance(block, CrossBlock) and block.tail_bound and p == 2:
        tail += block.tail_bound
    total = float(np.sum(s_kept ** p))
    return SchattenResult(total ** (1.0 / p), float(p), float(tail), s)


def hs_norm_sq(block: CrossBlock) -> float:
    """Squared Frobenius norm, i.e. the discrete ``||T||_2^2``."""
    return float(np.sum(block.matrix ** 2))


def entropy_sum(spec: SpectrumResult | np.ndarray, f: TestFunction) -> EntropySum:
    """``sum_i f(clip(lambda_i, 0, 1))``.

    Excursions beyond ``[0, 1]`` up to 1e-6 are clipped silently, up to 1e-3
    with a warning; larger ones raise ``NumericalError``.
    """
    lam = np.asarray(spec.eigenvalues if isinstance(spec, SpectrumResult) else spec, dtype=float)
    exc = np.maximum(-lam, lam - 1.0)
    worst = float(np.max(exc)) if lam.size else 0.0
    if worst > CLIP_FAIL:
        bad = float(lam[np.argmax(exc)])
        raise NumericalError(f"eigenvalue {bad!r} outside [0, 1] beyond tolerance", eigenvalue=bad)
    if worst > CLIP_WARN:
        warnings.warn(f"eigenvalues exceed [0, 1] by up to {worst:.2e}; clipped", RuntimeWarning,
                      stacklevel=2)
    clipped = int(np.count_nonzero(exc > 0))
    vals = f.eval(np.clip(lam, 0.0, 1.0))
    return EntropySum(float(np.sum(np.sort(vals))), clipped, max(worst, 0.0))


def spectrum_csv(spec: SpectrumResult, path=None) -> str:
    """CSV with a versioned header comment; columns ``index,eigenvalue``."""
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "eigenvalue"])
    for i, lam in enumerate(spec.eigenvalues):
        w.writerow([i, repr(float(lam))])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_spectrum_csv(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    return np.array([float(r["eigenvalue"]) for r in rows])
