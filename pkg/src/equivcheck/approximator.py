"""Random-feature fits of shallow invariant networks.

Inner weights of the first (equivariant) layer are drawn once and frozen;
only the outer weights of the invariant layer are fitted, by ridge-regularized
least squares.  Two feature constructions are provided and agree bitwise:

* ``network``: hidden units ``sigma(sum_t b_jt phi^t(x) + c_j 1)`` summed over
  the output coordinates by the invariant layer.
* ``ridge``: one profile ``zeta_j(y) = sigma(b_j . y + c_j)`` evaluated on every
  basis-map image ``phi_i(x)`` and summed over ``i``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit
from scipy.stats import qmc
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import SingularSystem
from .polynomials import MultiPoly
from .representations import BasisMapFamily

ACTIVATIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "relu": lambda z: np.maximum(z, 0.0),
    "sigmoid": expit,
    "tanh": np.tanh,
    "softplus": lambda z: np.logaddexp(0.0, z),
}

HELDOUT_SIZE = 4096


@dataclass(frozen=True)
class FitConfig:
    width: int = 64
    sample_count: int = 2000
    seed: int = 0
    activation: str = "relu"
    inner_scale: float = 3.0
    ridge_lambda: float = 1e-10
    domain_box: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if self.sample_count < 10 * self.width:
            raise ValueError("sample_count must be at least 10 * width")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {sorted(ACTIVATIONS)}")
        if self.inner_scale <= 0:
            raise ValueError("inner_scale must be positive")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    rms_error: float
    max_error: float
    train_error: float
    width: int
    family_id: str
    seed: int = 0


def box_bounds(domain_box, n: int) -> tuple[np.ndarray, np.ndarray]:
    box = np.asarray(domain_box, dtype=float)
    if box.shape == (2,):
        box = np.tile(box, (n, 1))
    if box.shape != (n, 2) or np.any(box[:, 0] >= box[:, 1]):
        raise ValueError(f"domain_box must be (lo, hi) or {n} such pairs with lo < hi")
    return box[:, 0].copy(), box[:, 1].copy()


def family_tensor(F: BasisMapFamily) -> np.ndarray:
    """Basis maps as a float array of shape ``(l, m, n)``."""
    return np.array([[[float(v) for v in row] for row in M.rows] for M in F.maps], dtype=float)


def basis_responses(phi: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``R[p, t, i] = phi^t_i(x_p)``, shared by both feature constructions."""
    return np.einsum("itk,pk->pti", phi, X)


def sample_inner_weights(phi: np.ndarray, width: int, inner_scale: float, domain_box,
                         rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Inner weights ``b`` uniform on ``[-s, s]^m``; bias ``c_j`` uniform on the
    range of ``b_j . phi_i(x)`` over the box (maximized over ``i``)."""
    ell, m, n = phi.shape
    lo, hi = box_bounds(domain_box, n)
    B = rng.uniform(-inner_scale, inner_scale, size=(width, m))
    W = np.einsum("jt,itk->jik", B, phi)  # effective first-layer rows per (j, i)
    upper = np.maximum(W * lo, W * hi).sum(axis=2)
    lower = np.minimum(W * lo, W * hi).sum(axis=2)
    radius = np.maximum(np.abs(upper), np.abs(lower)).max(axis=1)
    radius = np.where(radius > 0, radius, 1.0)
    C = rng.uniform(-radius, radius)
    return B, C


def _network_features(R: np.ndarray, B: np.ndarray, C: np.ndarray, sigma) -> np.ndarray:
    npts, m, ell = R.shape
    # first layer: channel j, output coordinate i
    pre = np.broadcast_to(C[None, :, None], (npts, B.shape[0], ell)).copy()
    for t in range(m):
        pre = pre + B[None, :, t, None] * R[:, None, t, :]
    hidden = sigma(pre)
    # invariant layer with unit outer weights: sum over output coordinates
    out = np.zeros((npts, B.shape[0]))
    for i in range(ell):
        out = out + hidden[:, :, i]
    return out


def _ridge_features(R: np.ndarray, B: np.ndarray, C: np.ndarray, sigma) -> np.ndarray:
    npts, m, ell = R.shape
    out = np.zeros((npts, B.shape[0]))
    for i in range(ell):
        y = R[:, :, i]  # phi_i(x)
        z = np.broadcast_to(C[None, :], (npts, B.shape[0])).copy()
        for t in range(m):
            z = z + y[:, t, None] * B[None, :, t]
        out = out + sigma(z)
    return out


class InvariantRandomFeatures(TransformerMixin, BaseEstimator):
    """Frozen random hidden units of a shallow invariant network."""

    def __init__(self, family=None, width=64, activation="relu", inner_scale=3.0,
                 domain_box=(-1.0, 1.0), mode="network", random_state=0):
        self.family = family
        self.width = width
        self.activation = activation
        self.inner_scale = inner_scale
        self.domain_box = domain_box
        self.mode = mode
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.family is None:
            raise ValueError("family is required")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {sorted(ACTIVATIONS)}")
        if self.mode not in ("network", "ridge"):
            raise ValueError("mode must be 'network' or 'ridge'")
        X = check_array(X)
        if X.shape[1] != self.family.source_dim:
            raise ValueError(f"X has {X.shape[1]} features, family expects {self.family.source_dim}")
        self.phi_ = family_tensor(self.family)
        rng = np.random.default_rng(self.random_state)
        self.weights_, self.biases_ = sample_inner_weights(
            self.phi_, self.width, self.inner_scale, self.domain_box, rng)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "weights_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        R = basis_responses(self.phi_, X)
        build = _network_features if self.mode == "network" else _ridge_features
        return build(R, self.weights_, self.biases_, ACTIVATIONS[self.activation])


def solve_ridge(Phi: np.ndarray, y: np.ndarray, ridge_lambda: float) -> tuple[np.ndarray, float]:
    """Outer weights and intercept minimizing ``|A w - y|^2 + lambda |w|^2``.

    Columns are rescaled to unit RMS before solving; the intercept is not
    penalized.
    """
    A = np.hstack([np.ones((Phi.shape[0], 1)), Phi])
    scale = np.sqrt(np.mean(A * A, axis=0))
    scale[scale == 0] = 1.0
    As = A / scale
    if ridge_lambda == 0:
        if np.linalg.matrix_rank(As) < As.shape[1]:
            raise SingularSystem("features are rank-deficient and ridge_lambda is 0")
        w, *_ = np.linalg.lstsq(As, y, rcond=None)
    else:
        k = As.shape[1]
        penalty = np.sqrt(ridge_lambda * As.shape[0]) * np.eye(k)[1:]
        aug = np.vstack([As, penalty])
        w, *_ = np.linalg.lstsq(aug, np.concatenate([y, np.zeros(k - 1)]), rcond=None)
    w = w / scale
    return w[1:], float(w[0])


class InvariantNetworkRegressor(RegressorMixin, BaseEstimator):
    """Shallow invariant network with frozen inner weights and a ridge-fitted outer layer."""

    def __init__(self, family=None, width=64, activation="relu", inner_scale=3.0,
                 ridge_lambda=1e-10, domain_box=(-1.0, 1.0), mode="network", random_state=0):
        self.family = family
        self.width = width
        self.activation = activation
        self.inner_scale = inner_scale
        self.ridge_lambda = ridge_lambda
        self.domain_box = domain_box
        self.mode = mode
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_array(X), np.asarray(y, dtype=float).ravel()
        if len(y) != X.shape[0]:
            raise ValueError("X and y have different numbers of samples")
        self.features_ = InvariantRandomFeatures(
            self.family, self.width, self.activation, self.inner_scale, self.domain_box,
            self.mode, self.random_state).fit(X)
        self.coef_, self.intercept_ = solve_ridge(self.features_.transform(X), y, self.ridge_lambda)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.features_.transform(X) @ self.coef_ + self.intercept_


def poly_to_numpy(f: MultiPoly) -> Callable[[np.ndarray], np.ndarray]:
    terms = [(np.array(e), float(c)) for e, c in f.sorted_terms()]

    def evaluate(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for e, c in terms:
            out += c * np.prod(X ** e, axis=1)
        return out

    return evaluate


def heldout_grid(n: int, domain_box, size: int = HELDOUT_SIZE) -> np.ndarray:
    """Deterministic Halton lattice in the box (first point dropped)."""
    lo, hi = box_bounds(domain_box, n)
    pts = qmc.Halton(d=n, scramble=False).random(size + 1)[1:]
    return qmc.scale(pts, lo, hi)


def _streams(seed: int) -> tuple[np.random.Generator, int]:
    sample_seq, weight_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(sample_seq), int(weight_seq.generate_state(1)[0])


def training_points(n: int, cfg: FitConfig) -> np.ndarray:
    rng, _ = _streams(cfg.seed)
    lo, hi = box_bounds(cfg.domain_box, n)
    return rng.uniform(lo, hi, size=(cfg.sample_count, n))


def _transformer(F: BasisMapFamily, cfg: FitConfig, mode: str, points) -> InvariantRandomFeatures:
    _, weight_seed = _streams(cfg.seed)
    return InvariantRandomFeatures(F, cfg.width, cfg.activation, cfg.inner_scale,
                                   cfg.domain_box, mode, weight_seed).fit(points)


def network_features(F: BasisMapFamily, cfg: FitConfig, points) -> np.ndarray:
    return _transformer(F, cfg, "network", points).transform(points)


def ridge_superposition_features(F: BasisMapFamily, cfg: FitConfig, points) -> np.ndarray:
    return _transformer(F, cfg, "ridge", points).transform(points)


def fit(target: MultiPoly, F: BasisMapFamily, cfg: FitConfig, mode: str = "network",
        grid: np.ndarray | None = None) -> FitResult:
    n = F.source_dim
    X = training_points(n, cfg)
    f = poly_to_numpy(target)
    y = f(X)
    _, weight_seed = _streams(cfg.seed)
    model = InvariantNetworkRegressor(F, cfg.width, cfg.activation, cfg.inner_scale,
                                      cfg.ridge_lambda, cfg.domain_box, mode, weight_seed).fit(X, y)
    if grid is None:
        grid = heldout_grid(n, cfg.domain_box)
    resid = model.predict(grid) - f(grid)
    train_resid = model.predict(X) - y
    return FitResult(
        rms_error=float(np.sqrt(np.mean(resid ** 2))),
        max_error=float(np.max(np.abs(resid))),
        train_error=float(np.sqrt(np.mean(train_resid ** 2))),
        width=cfg.width,
        family_id=F.name,
        seed=cfg.seed,
    )


def error_curve(target: MultiPoly, F: BasisMapFamily, widths: Sequence[int],
                cfg: FitConfig) -> list[FitResult]:
    widths = list(widths)
    if any(a >= b for a, b in zip(widths, widths[1:])):
        raise ValueError("widths must be strictly increasing")
    if not widths:
        return []
    grid = heldout_grid(F.source_dim, cfg.domain_box)
    out = []
    for h in widths:
        run = FitConfig(h, max(cfg.sample_count, 10 * h), cfg.seed, cfg.activation,
                        cfg.inner_scale, cfg.ridge_lambda, cfg.domain_box)
        out.append(fit(target, F, run, grid=grid))
    return out


CSV_FIELDS = ("width", "train_rms", "test_rms", "test_max", "seed")


def results_to_csv(results: Sequence[FitResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        w.writerow([r.width, repr(r.train_error), repr(r.rms_error), repr(r.max_error), r.seed])
    return buf.getvalue()


def result_to_dict(r: FitResult) -> dict:
    return asdict(r)


def load_gap_thresholds() -> dict:
    """Thresholds locked by the pre-build calibration run (``scripts/calibrate_gap.py``)."""
    text = (resources.files("equivcheck") / "data" / "gap_thresholds.json").read_text()
    return json.loads(text)["locked"]
