"""Loop kernels compiled with numba; twins of ``_numpy``."""
import math

import numpy as np
from numba import njit

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def trailing_mean(y, m):
    n = y.shape[0]
    out = np.empty(n - m + 1)
    for t in range(n - m + 1):
        s = 0.0
        for i in range(m):
            s += y[t + i]
        out[t] = s / m
    return out


@njit(**_opts)
def arma_residuals(w, intercept, ar, ma):
    n = w.shape[0]
    p = ar.shape[0]
    q = ma.shape[0]
    eps = np.zeros(n)
    for t in range(p, n):
        e = w[t] - intercept
        for i in range(p):
            e -= ar[i] * w[t - i - 1]
        for j in range(q):
            if t - j - 1 >= p:
                e += ma[j] * eps[t - j - 1]
        eps[t] = e
    return eps


@njit(**_opts)
def local_extrema(x):
    n = x.shape[0]
    maxima = np.empty(n, np.int64)
    minima = np.empty(n, np.int64)
    nmax = 0
    nmin = 0
    if n < 3:
        return maxima[:0], minima[:0]
    # walk runs of equal values; compare each interior run with its neighbours
    prev_val = x[0]
    i = 0
    while i < n and x[i] == prev_val:
        i += 1
    if i >= n:
        return maxima[:0], minima[:0]
    run_start = i
    while run_start < n:
        j = run_start
        while j + 1 < n and x[j + 1] == x[run_start]:
            j += 1
        if j + 1 >= n:
            break
        cur = x[run_start]
        nxt = x[j + 1]
        mid = run_start + (j - run_start) // 2
        if cur > prev_val and cur > nxt:
            maxima[nmax] = mid
            nmax += 1
        elif cur < prev_val and cur < nxt:
            minima[nmin] = mid
            nmin += 1
        prev_val = cur
        run_start = j + 1
    return maxima[:nmax].copy(), minima[:nmin].copy()


@njit(**_opts)
def zero_crossings(x):
    count = 0
    last = 0.0
    for i in range(x.shape[0]):
        s = 0.0
        if x[i] > 0:
            s = 1.0
        elif x[i] < 0:
            s = -1.0
        if s == 0.0:
            continue
        if last != 0.0 and s != last:
            count += 1
        last = s
    return count


@njit(**_opts)
def _sigmoid(z):
    return 0.5 * (1.0 + math.tanh(0.5 * z))


@njit(**_opts)
def _forward_hidden(X, W, b, h):
    n, N = X.shape
    H = W.shape[0]
    for r in range(n):
        for j in range(H):
            z = b[j]
            for i in range(N):
                z += W[j, i] * X[r, i]
            h[r, j] = _sigmoid(z)


@njit(**_opts)
def _mse(X, y, W, b, v, c):
    n = X.shape[0]
    H = W.shape[0]
    h = np.empty((n, H))
    _forward_hidden(X, W, b, h)
    s = 0.0
    for r in range(n):
        p = c
        for j in range(H):
            p += v[j] * h[r, j]
        e = p - y[r]
        s += e * e
    return s / n


@njit(**_opts)
def _loss_grad_into(X, y, W, b, v, c, h, gW, gb, gv):
    n, N = X.shape
    H = W.shape[0]
    _forward_hidden(X, W, b, h)
    gW[:, :] = 0.0
    gb[:] = 0.0
    gv[:] = 0.0
    gc = 0.0
    loss = 0.0
    for r in range(n):
        p = c
        for j in range(H):
            p += v[j] * h[r, j]
        e = p - y[r]
        loss += e * e
        dp = 2.0 * e / n
        gc += dp
        for j in range(H):
            gv[j] += h[r, j] * dp
            dz = dp * v[j] * h[r, j] * (1.0 - h[r, j])
            gb[j] += dz
            for i in range(N):
                gW[j, i] += dz * X[r, i]
    return loss / n, gc


@njit(**_opts)
def mlp_loss_grad(X, y, W, b, v, c):
    n = X.shape[0]
    H, N = W.shape
    h = np.empty((n, H))
    gW = np.empty((H, N))
    gb = np.empty(H)
    gv = np.empty(H)
    loss, gc = _loss_grad_into(X, y, W, b, v, c, h, gW, gb, gv)
    return loss, gW, gb, gv, gc


@njit(**_opts)
def mlp_train_adam(X, y, Xv, yv, W, b, v, c, lr, beta1, beta2, eps,
                   max_epochs, patience):
    n = X.shape[0]
    H, N = W.shape
    W = W.copy()
    b = b.copy()
    v = v.copy()
    h = np.empty((n, H))
    gW = np.empty((H, N))
    gb = np.empty(H)
    gv = np.empty(H)
    mW = np.zeros((H, N))
    sW = np.zeros((H, N))
    mb = np.zeros(H)
    sb = np.zeros(H)
    mv = np.zeros(H)
    sv = np.zeros(H)
    mc = 0.0
    sc = 0.0
    train_hist = np.full(max_epochs + 1, np.nan)
    val_hist = np.full(max_epochs + 1, np.nan)
    use_val = Xv.shape[0] > 0

    bW = W.copy()
    bb = b.copy()
    bv = v.copy()
    bc = c
    best_loss = np.inf
    best_epoch = 0
    wait = 0
    epoch = 0
    for epoch in range(max_epochs + 1):
        loss, gc = _loss_grad_into(X, y, W, b, v, c, h, gW, gb, gv)
        train_hist[epoch] = loss
        if not np.isfinite(loss):
            return bW, bb, bv, bc, best_epoch, epoch, train_hist, val_hist, epoch
        monitored = _mse(Xv, yv, W, b, v, c) if use_val else loss
        val_hist[epoch] = monitored
        if monitored < best_loss:
            best_loss = monitored
            bW[:, :] = W
            bb[:] = b
            bv[:] = v
            bc = c
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
        for j in range(H):
            for i in range(N):
                g = gW[j, i]
                mW[j, i] = beta1 * mW[j, i] + (1 - beta1) * g
                sW[j, i] = beta2 * sW[j, i] + (1 - beta2) * g * g
                W[j, i] -= lr * (mW[j, i] / bc1) / (math.sqrt(sW[j, i] / bc2) + eps)
            g = gb[j]
            mb[j] = beta1 * mb[j] + (1 - beta1) * g
            sb[j] = beta2 * sb[j] + (1 - beta2) * g * g
            b[j] -= lr * (mb[j] / bc1) / (math.sqrt(sb[j] / bc2) + eps)
            g = gv[j]
            mv[j] = beta1 * mv[j] + (1 - beta1) * g
            sv[j] = beta2 * sv[j] + (1 - beta2) * g * g
            v[j] -= lr * (mv[j] / bc1) / (math.sqrt(sv[j] / bc2) + eps)
        mc = beta1 * mc + (1 - beta1) * gc
        sc = beta2 * sc + (1 - beta2) * gc * gc
        c -= lr * (mc / bc1) / (math.sqrt(sc / bc2) + eps)
    return bW, bb, bv, bc, best_epoch, epoch, train_hist, val_hist, -1
