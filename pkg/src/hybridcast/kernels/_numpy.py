"""Vectorised numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_numba`` and the
two must agree to floating-point round-off.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import lfilter


def trailing_mean(y, m):
    """Mean of each length-``m`` trailing window; output has ``len(y) - m + 1`` points."""
    return sliding_window_view(y, m).mean(axis=1)


def arma_residuals(w, intercept, ar, ma):
    """Conditional residuals of an ARMA recursion, zero before index ``len(ar)``.

    eps_t = w_t - c - sum_i ar_i w_{t-i} + sum_j ma_j eps_{t-j}
    """
    n = w.shape[0]
    p = ar.shape[0]
    eps = np.zeros(n)
    if n <= p:
        return eps
    u = w[p:] - intercept
    for i in range(p):
        u = u - ar[i] * w[p - i - 1:n - i - 1]
    if ma.shape[0] == 0:
        eps[p:] = u
    else:
        den = np.concatenate(([1.0], -ma))
        eps[p:] = lfilter([1.0], den, u)
    return eps


def _collapse_runs(x):
    # start index and length of each run of equal consecutive values
    change = np.flatnonzero(np.diff(x) != 0) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [x.shape[0]])))
    return starts, lengths


def local_extrema(x):
    """Indices of interior local maxima and minima; plateaus report their middle sample."""
    n = x.shape[0]
    if n < 3:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    starts, lengths = _collapse_runs(x)
    vals = x[starts]
    if vals.shape[0] < 3:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    mid = vals[1:-1]
    left = vals[:-2]
    right = vals[2:]
    pos = starts[1:-1] + (lengths[1:-1] - 1) // 2
    is_max = (mid > left) & (mid > right)
    is_min = (mid < left) & (mid < right)
    return pos[is_max].astype(np.int64), pos[is_min].astype(np.int64)


def zero_crossings(x):
    """Number of sign changes, ignoring exact zeros."""
    s = np.sign(x)
    s = s[s != 0]
    if s.shape[0] < 2:
        return 0
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def mlp_loss_grad(X, y, W, b, v, c):
    """MSE loss of a one-hidden-layer sigmoid network and its gradient."""
    n = X.shape[0]
    h = _sigmoid(X @ W.T + b)
    e = h @ v + c - y
    loss = float(e @ e) / n
    dp = (2.0 / n) * e
    gv = h.T @ dp
    gc = float(dp.sum())
    dz = np.outer(dp, v) * h * (1.0 - h)
    gW = dz.T @ X
    gb = dz.sum(axis=0)
    return loss, gW, gb, gv, gc


def _mse(X, y, W, b, v, c):
    e = _sigmoid(X @ W.T + b) @ v + c - y
    return float(e @ e) / X.shape[0]


def mlp_train_adam(X, y, Xv, yv, W, b, v, c, lr, beta1, beta2, eps,
                   max_epochs, patience):
    """Full-batch Adam with validation early stopping.

    Returns ``(W, b, v, c, best_epoch, epochs_run, train_hist, val_hist,
    diverged_epoch)``. Weights are the ones with the lowest monitored loss
    (validation loss, or training loss when ``Xv`` is empty). ``diverged_epoch``
    is -1 unless a non-finite loss was met.
    """
    W = W.copy()
    b = b.copy()
    v = v.copy()
    mW = np.zeros_like(W)
    sW = np.zeros_like(W)
    mb = np.zeros_like(b)
    sb = np.zeros_like(b)
    mv = np.zeros_like(v)
    sv = np.zeros_like(v)
    mc = 0.0
    sc = 0.0
    train_hist = np.full(max_epochs + 1, np.nan)
    val_hist = np.full(max_epochs + 1, np.nan)
    use_val = Xv.shape[0] > 0

    best = (W.copy(), b.copy(), v.copy(), c)
    best_loss = np.inf
    best_epoch = 0
    wait = 0
    epoch = 0
    for epoch in range(max_epochs + 1):
        loss, gW, gb, gv, gc = mlp_loss_grad(X, y, W, b, v, c)
        train_hist[epoch] = loss
        if not np.isfinite(loss):
            return best[0], best[1], best[2], best[3], best_epoch, epoch, train_hist, val_hist, epoch
        monitored = _mse(Xv, yv, W, b, v, c) if use_val else loss
        val_hist[epoch] = monitored
        if monitored < best_loss:
            best_loss = monitored
            best = (W.copy(), b.copy(), v.copy(), c)
            best_epoch = epoch
            wait = 0
        else:
            wait += 1
            if wait >= patience:
                break
        if epoch == max_epochs:
            break
        t = epoch + 1
        bc1 = 1.0 - beta1 ** t
        bc2 = 1.0 - beta2 ** t
        mW = beta1 * mW + (1 - beta1) * gW
        sW = beta2 * sW + (1 - beta2) * gW * gW
        W = W - lr * (mW / bc1) / (np.sqrt(sW / bc2) + eps)
        mb = beta1 * mb + (1 - beta1) * gb
        sb = beta2 * sb + (1 - beta2) * gb * gb
        b = b - lr * (mb / bc1) / (np.sqrt(sb / bc2) + eps)
        mv = beta1 * mv + (1 - beta1) * gv
        sv = beta2 * sv + (1 - beta2) * gv * gv
        v = v - lr * (mv / bc1) / (np.sqrt(sv / bc2) + eps)
        mc = beta1 * mc + (1 - beta1) * gc
        sc = beta2 * sc + (1 - beta2) * gc * gc
        c = c - lr * (mc / bc1) / (np.sqrt(sc / bc2) + eps)
    return best[0], best[1], best[2], best[3], best_epoch, epoch, train_hist, val_hist, -1
