"""Auto-associative compression of the 20-entry observation history.

Architecture 20 → 12 → 6 → 12 → 20: tanh hidden layers around a linear
6-unit bottleneck, linear output.  Inputs are standardized per feature on
the training batch (zero-variance features get unit scale).  Training
minimizes mean squared reconstruction error over the standardized batch
with full-batch Polak–Ribière conjugate gradient: backtracking Armijo line
search, restarts to steepest descent whenever the search direction stops
being a descent direction, stop at ``max_iters`` or when the relative loss
improvement drops below ``tol``.  Accepted steps never increase the loss.

Fewer than 20 samples cannot support a fit, so training then returns a
flagged pass-through encoder whose code is simply the first six
standardized features; early closed-loop days keep running on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

INPUT_DIM = 20
HIDDEN_DIM = 12
CODE_DIM = 6
MIN_TRAIN_SAMPLES = 20

_LAYER_SHAPES = (
    (INPUT_DIM, HIDDEN_DIM), (HIDDEN_DIM,),
    (HIDDEN_DIM, CODE_DIM), (CODE_DIM,),
    (CODE_DIM, HIDDEN_DIM), (HIDDEN_DIM,),
    (HIDDEN_DIM, INPUT_DIM), (INPUT_DIM,),
)


@dataclass(frozen=True)
class EncoderWeights:
    """Trained parameters plus the input standardization fitted with them."""

    params: np.ndarray              # flat parameter vector (empty if pass-through)
    mean: np.ndarray
    std: np.ndarray
    passthrough: bool = False
    training_losses: np.ndarray = field(default_factory=lambda: np.empty(0))


def _unpack(theta: np.ndarray) -> list[np.ndarray]:
    out = []
    pos = 0
    for shape in _LAYER_SHAPES:
        size = int(np.prod(shape))
        out.append(theta[pos:pos + size].reshape(shape))
        pos += size
    return out


def _n_params() -> int:
    return sum(int(np.prod(s)) for s in _LAYER_SHAPES)


def _forward(theta: np.ndarray, Z: np.ndarray):
    w1, b1, w2, b2, w3, b3, w4, b4 = _unpack(theta)
    h1 = np.tanh(Z @ w1 + b1)
    code = h1 @ w2 + b2            # linear bottleneck
    h3 = np.tanh(code @ w3 + b3)
    out = h3 @ w4 + b4             # linear reconstruction
    return h1, code, h3, out


def _loss(theta: np.ndarray, Z: np.ndarray) -> float:
    out = _forward(theta, Z)[3]
    return float(np.mean((out - Z) ** 2))


def _loss_grad(theta: np.ndarray, Z: np.ndarray) -> tuple[float, np.ndarray]:
    w1, b1, w2, b2, w3, b3, w4, b4 = _unpack(theta)
    h1 = np.tanh(Z @ w1 + b1)
    code = h1 @ w2 + b2
    h3 = np.tanh(code @ w3 + b3)
    out = h3 @ w4 + b4
    diff = out - Z
    loss = float(np.mean(diff ** 2))

    d_out = diff * (2.0 / diff.size)
    g_w4 = h3.T @ d_out
    g_b4 = d_out.sum(axis=0)
    d_h3 = (d_out @ w4.T) * (1.0 - h3 ** 2)
    g_w3 = code.T @ d_h3
    g_b3 = d_h3.sum(axis=0)
    d_code = d_h3 @ w3.T
    g_w2 = h1.T @ d_code
    g_b2 = d_code.sum(axis=0)
    d_h1 = (d_code @ w2.T) * (1.0 - h1 ** 2)
    g_w1 = Z.T @ d_h1
    g_b1 = d_h1.sum(axis=0)

    grad = np.concatenate([g.ravel() for g in
                           (g_w1, g_b1, g_w2, g_b2, g_w3, g_b3, g_w4, g_b4)])
    return loss, grad


def gradient(weights: EncoderWeights, batch: np.ndarray) -> np.ndarray:
    """Exact backpropagation gradient of the mean squared reconstruction loss.

    ``batch`` is taken in raw units and standardized with the encoder's own
    statistics, matching what training sees.
    """
    if weights.passthrough:
        raise ValueError("pass-through encoder has no trainable parameters")
    Z = _standardize(batch, weights.mean, weights.std)
    return _loss_grad(weights.params, Z)[1]


def _standardize(batch: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=float)
    return (batch - mean) / std


def _fit_standardizer(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if batch.shape[0] == 0:
        return np.zeros(INPUT_DIM), np.ones(INPUT_DIM)
    mean = batch.mean(axis=0)
    std = batch.std(axis=0)
    std[std == 0.0] = 1.0
    return mean, std


def train(histories: np.ndarray, seed: int = 0, max_iters: int = 500,
          tol: float = 1e-6) -> EncoderWeights:
    """Fit the auto-encoder on a batch of raw history vectors (N × 20)."""
    Z_raw = np.asarray(histories, dtype=float)
    if Z_raw.ndim != 2 or Z_raw.shape[1] != INPUT_DIM:
        raise ValueError(f"histories must be (*, {INPUT_DIM}), got {Z_raw.shape}")
    mean, std = _fit_standardizer(Z_raw)
    if Z_raw.shape[0] < MIN_TRAIN_SAMPLES:
        return EncoderWeights(params=np.empty(0), mean=mean, std=std,
                              passthrough=True)
    Z = _standardize(Z_raw, mean, std)

    rng = np.random.default_rng(seed)
    theta = rng.uniform(-0.1, 0.1, size=_n_params())
    theta, losses = _minimize_pr_cg(theta, Z, max_iters, tol)
    return EncoderWeights(params=theta, mean=mean, std=std,
                          training_losses=np.asarray(losses))


def _minimize_pr_cg(theta: np.ndarray, Z: np.ndarray,
                    max_iters: int, tol: float) -> tuple[np.ndarray, list[float]]:
    f, g = _loss_grad(theta, Z)
    losses = [f]
    d = -g
    last_decrease = None
    steepest = True
    for _ in range(max_iters):
        slope = float(g @ d)
        if slope >= 0.0:            # not a descent direction: restart
            d = -g
            steepest = True
            slope = float(g @ d)
            if slope >= 0.0:        # gradient numerically zero
                break
        # trial step sized to repeat the previous first-order decrease
        if last_decrease is None or last_decrease <= 0.0:
            alpha0 = 1.0 / (1.0 + float(np.linalg.norm(g)))
        else:
            alpha0 = min(max(2.0 * last_decrease / -slope, 1e-10), 1e6)
        alpha, f_new, g_new = _wolfe_search(theta, d, f, slope, alpha0, Z)
        if alpha is None:
            if steepest:
                break               # even steepest descent cannot improve
            d = -g
            steepest = True
            continue
        theta = theta + alpha * d
        f_old, g_old = f, g
        f, g = f_new, g_new
        losses.append(f)
        beta = float(g @ (g - g_old)) / float(g_old @ g_old)
        d = -g + max(beta, 0.0) * d  # Polak–Ribière with non-negativity restart
        steepest = beta <= 0.0
        last_decrease = f_old - f
        if last_decrease < tol * max(abs(f_old), 1e-300):
            if steepest:
                break
            # confirm stagnation on a fresh steepest-descent direction
            d = -g
            steepest = True
    return theta, losses


_C1 = 1e-4   # sufficient-decrease coefficient
_C2 = 0.1    # curvature coefficient (tight: CG wants near-exact searches)


def _wolfe_search(theta, d, f0, slope0, alpha0, Z):
    """Strong-Wolfe line search: bracket by doubling, refine by bisection.

    Returns (alpha, f, grad) at the accepted point, or (None, None, None)
    when no acceptable step exists along ``d``.  Accepted points always
    satisfy the sufficient-decrease condition, so the loss never increases.
    """

    def phi(a):
        fa, ga = _loss_grad(theta + a * d, Z)
        return fa, ga, float(ga @ d)

    a_prev, f_prev = 0.0, f0
    a = alpha0
    best = (None, None, None)
    for i in range(30):
        fa, ga, sa = phi(a)
        if fa > f0 + _C1 * a * slope0 or (i > 0 and fa >= f_prev):
            best = _zoom(a_prev, f_prev, a, fa, f0, slope0, phi)
            break
        if abs(sa) <= -_C2 * slope0:
            best = (a, fa, ga)
            break
        if sa >= 0.0:
            best = _zoom(a, fa, a_prev, f_prev, f0, slope0, phi)
            break
        a_prev, f_prev = a, fa
        a = min(a * 2.0, 1e8)
        if a == a_prev:
            break
    return best


def _zoom(a_lo, f_lo, a_hi, f_hi, f0, slope0, phi):
    g_best = None
    for _ in range(40):
        a = 0.5 * (a_lo + a_hi)
        fa, ga, sa = phi(a)
        if fa > f0 + _C1 * a * slope0 or fa >= f_lo:
            a_hi, f_hi = a, fa
        else:
            if abs(sa) <= -_C2 * slope0:
                return a, fa, ga
            if sa * (a_hi - a_lo) >= 0.0:
                a_hi, f_hi = a_lo, f_lo
            a_lo, f_lo, g_best = a, fa, ga
        if abs(a_hi - a_lo) < 1e-14 * max(1.0, abs(a_lo)):
            break
    # fall back to the best sufficient-decrease point found, if any
    if g_best is not None and f_lo < f0:
        return a_lo, f_lo, g_best
    return None, None, None


def encode(weights: EncoderWeights, z: np.ndarray) -> np.ndarray:
    """Map raw history vectors to their 6-entry codes (pure function)."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    Z = z[None, :] if single else z
    if Z.ndim != 2 or Z.shape[1] != INPUT_DIM:
        raise ValueError(f"expected vectors of length {INPUT_DIM}, got shape {z.shape}")
    Zs = _standardize(Z, weights.mean, weights.std)
    if weights.passthrough:
        codes = Zs[:, :CODE_DIM]
    else:
        w1, b1, w2, b2 = _unpack(weights.params)[:4]
        codes = np.tanh(Zs @ w1 + b1) @ w2 + b2
    return codes[0] if single else codes


def reconstruct(weights: EncoderWeights, z: np.ndarray) -> np.ndarray:
    """Round-trip standardized reconstruction (diagnostic/testing aid)."""
    if weights.passthrough:
        raise ValueError("pass-through encoder does not reconstruct")
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    Z = z[None, :] if single else z
    Zs = _standardize(Z, weights.mean, weights.std)
    out = _forward(weights.params, Zs)[3]
    return out[0] if single else out


def reconstruction_rmse(weights: EncoderWeights, histories: np.ndarray) -> float:
    """RMSE between standardized inputs and their reconstructions."""
    Z = _standardize(np.asarray(histories, dtype=float), weights.mean, weights.std)
    out = _forward(weights.params, Z)[3]
    return float(np.sqrt(np.mean((out - Z) ** 2)))


def save_weights(weights: EncoderWeights, path) -> None:
    """Snapshot for reproducibility audits (flat parameters + layer shapes)."""
    np.savez(path, params=weights.params, mean=weights.mean, std=weights.std,
             passthrough=np.array(weights.passthrough),
             shapes=np.array([s for shape in _LAYER_SHAPES for s in
                              (shape + (0,))[:2]]))


def load_weights(path) -> EncoderWeights:
    data = np.load(path)
    return EncoderWeights(params=data["params"], mean=data["mean"],
                          std=data["std"], passthrough=bool(data["passthrough"]))
