"""Independent oracles shared by unit and acceptance tests."""
import numpy as np

from hopcpt.hopfield import PARAM_NAMES, init_model, loss_value


def numeric_gradient(model, x, t, v, total_T, h=1e-6, **kw):
    """Central finite differences of the loss computed through the forward path only."""
    grads = {}
    params = model.params()
    for name in PARAM_NAMES:
        base = params[name]
        g = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            plus, minus = base.copy(), base.copy()
            plus[idx] += h
            minus[idx] -= h
            lp = loss_value(model.with_params({**params, name: plus}), x, t, v, total_T, **kw)
            lm = loss_value(model.with_params({**params, name: minus}), x, t, v, total_T, **kw)
            g[idx] = (lp - lm) / (2 * h)
        grads[name] = g
    return grads


def relative_error(numeric, analytic):
    scale = max(np.linalg.norm(numeric), np.linalg.norm(analytic), 1e-12)
    return float(np.linalg.norm(numeric - analytic) / scale)


def small_problem(seed, n=12, d_in=2, hidden=4, d_enc=3, d_attn=3, beta=1.0, **kw):
    rng = np.random.default_rng(seed)
    model = init_model(d_in, hidden, d_enc, d_attn, beta=beta, seed=seed, **kw)
    x = rng.normal(size=(n, d_in))
    t = np.arange(n)
    v = np.abs(rng.normal(size=n)) * 3
    return model, x, t, v
