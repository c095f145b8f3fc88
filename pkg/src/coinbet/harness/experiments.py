"""Declarative experiments and their tabular output.

Every runner returns a list of :class:`RegretTrace`; :func:`write_traces`
turns them into one CSV per algorithm plus ``summary.csv`` and
``config.json``. Floats are written with ``repr`` so that equal inputs give
byte-identical files.
"""

import csv
import json
import math
import os
import re
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Optional

import numpy as np

from ..coin_betting import kelly_fraction, validate_coins
from ..lea import DoublingKTExperts, KTExperts, hedge_predictions, run_experts
from ..numerics import kl_bernoulli
from ..olo import KTHilbertLearner, OnlineGradientDescent, absolute_loss_reward
from ..potentials import KTPotential
from .data import load_libsvm, normalize_all, synthetic_regression, to_dense
from .hadamard import GAP_MODES, hadamard_experts

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RegretTrace",
    "eta_grid",
    "run_lea_experiment",
    "run_olo_experiment",
    "run_coin_game",
    "run_experiment",
    "write_traces",
    "summary_rows",
]

TASKS = ("olo_regression", "lea_synthetic", "coin_game")
KT_VARIANTS = ("unshifted", "shifted", "doubling")
COIN_SEQUENCES = ("all_heads", "alternating", "zero_sum", "random_pm1", "random_uniform")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    task: str
    seed: int = 0
    T: int = 32768
    out: Optional[str] = None
    epsilon: float = 1.0
    # (lo, hi, points) for a log-spaced rate grid; None picks the task default
    eta_grid: Optional[tuple] = None
    # LEA
    experts_k: int = 5
    order: int = 64
    gap: float = 0.025
    gap_mode: str = "compress"
    kt_variant: str = "unshifted"
    delta_fraction: float = 0.5
    # OLO
    dataset: Optional[str] = None
    dim: int = 10
    u_norm: float = 3.0
    noise: float = 0.1
    shuffle: bool = False
    # coin game
    sequences: tuple = COIN_SEQUENCES
    heads_prob: float = 0.6

    def __post_init__(self):
        if self.eta_grid is not None:
            self.eta_grid = tuple(self.eta_grid)
        self.sequences = tuple(self.sequences)
        self.validate()

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if int(self.T) != self.T or self.T < 0:
            raise ConfigError("T must be a nonnegative integer")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.eta_grid is not None:
            if len(self.eta_grid) != 3:
                raise ConfigError("eta_grid must be (lo, hi, points)")
            lo, hi, n = self.eta_grid
            if not (lo > 0 and hi >= lo and int(n) == n and n >= 1):
                raise ConfigError("eta_grid needs 0 < lo <= hi and a positive point count")
        if self.gap_mode not in GAP_MODES:
            raise ConfigError(f"unknown gap mode {self.gap_mode!r}")
        if self.kt_variant not in KT_VARIANTS:
            raise ConfigError(f"unknown KT variant {self.kt_variant!r}")
        if self.delta_fraction < 0:
            raise ConfigError("delta_fraction must be nonnegative")
        bad = set(self.sequences) - set(COIN_SEQUENCES)
        if bad:
            raise ConfigError(f"unknown coin sequences {sorted(bad)}")
        if not 0.0 <= self.heads_prob <= 1.0:
            raise ConfigError("heads_prob must be a probability")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "task" not in data:
            raise ConfigError("config needs a 'task'")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self):
        d = asdict(self)
        d["eta_grid"] = list(self.eta_grid) if self.eta_grid is not None else None
        d["sequences"] = list(self.sequences)
        return d


@dataclass
class RegretTrace:
    """Per-round records for one algorithm run.

    ``value`` is the cumulative loss (OLO), cumulative reward (LEA) or wealth
    (coin game), named by ``value_name``; ``regret`` is measured against the
    competitor described in ``params["competitor"]``.
    """

    algorithm: str
    params: Dict
    t: np.ndarray
    value: np.ndarray
    regret: np.ndarray
    value_name: str = "cumulative_reward"
    extra: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t.size and not np.all(np.diff(self.t) > 0):
            raise ValueError("round index must be strictly increasing")
        if self.t.size and self.t[0] != 1:
            raise ValueError("round index must start at 1")

    @property
    def final_regret(self):
        return float(self.regret[-1]) if self.regret.size else 0.0

    @property
    def final_value(self):
        return float(self.value[-1]) if self.value.size else 0.0


def eta_grid(grid, default):
    lo, hi, n = grid if grid is not None else default
    return np.logspace(math.log10(lo), math.log10(hi), int(n))


# ---------------------------------------------------------------- LEA


def _lea_trace(name, params, P, G, best):
    inst = np.einsum("tn,tn->t", G, P)
    cum = np.cumsum(inst)
    reg = np.cumsum(G[:, best]) - cum
    t = np.arange(1, G.shape[0] + 1)
    return RegretTrace(name, params, t, cum, reg, "cumulative_reward")


def run_lea_experiment(config, stream=None):
    """KT experts versus Hedge over a rate grid on the Hadamard stream.

    The competitor is the best single expert in hindsight at the final round,
    so the last ``regret`` entry is the regret to the best expert.
    """
    if stream is None:
        stream = hadamard_experts(
            order=config.order, k=config.experts_k, gap=config.gap,
            T=config.T, seed=config.seed, mode=config.gap_mode,
        )
    G = stream.rewards
    T, N = G.shape
    if T == 0:
        return []
    prior = np.full(N, 1.0 / N)
    best = int(np.argmax(G.sum(axis=0)))
    competitor = f"expert {best}"

    if config.kt_variant == "unshifted":
        learner = KTExperts(prior)
        kt_params = {"variant": "unshifted"}
    elif config.kt_variant == "shifted":
        learner = KTExperts(prior, horizon=T, delta_fraction=config.delta_fraction)
        kt_params = {"variant": "shifted", "delta_fraction": config.delta_fraction}
    else:
        learner = DoublingKTExperts(prior, config.delta_fraction)
        kt_params = {"variant": "doubling", "delta_fraction": config.delta_fraction}
    P = run_experts(learner, G)
    kt_params["competitor"] = competitor
    traces = [_lea_trace("kt", kt_params, P, G, best)]
    dominance = learner.state.max_dominance if isinstance(learner, KTExperts) else learner.max_dominance
    traces[0].extra["max_dominance"] = dominance

    for eta in eta_grid(config.eta_grid, (1e-2, 1e1, 25)):
        P = hedge_predictions(prior, G, eta)
        traces.append(_lea_trace("hedge", {"eta": float(eta), "competitor": competitor}, P, G, best))
    return traces


# ---------------------------------------------------------------- OLO


def _olo_run(learner, X, y, comp_losses):
    T = X.shape[0]
    losses = np.empty(T)
    for t in range(T):
        w = learner.predict()
        x = X[t]
        losses[t] = abs(float(w @ x) - y[t])
        learner.update(absolute_loss_reward(w, x, y[t]), w)
    cum = np.cumsum(losses)
    return cum, cum - np.cumsum(comp_losses)


def _olo_data(config):
    if config.dataset:
        examples, _ = normalize_all(load_libsvm(config.dataset))
        if config.T:
            examples = examples[: config.T]
        X, y = to_dense(examples)
        u = np.zeros(X.shape[1])
        competitor = "zero vector"
    else:
        X, y, u = synthetic_regression(config.T, config.dim, config.seed, config.u_norm, config.noise)
        competitor = "generating vector"
    if config.shuffle and len(y):
        order = np.random.default_rng(config.seed).permutation(len(y))
        X, y = X[order], y[order]
    return X, y, u, competitor


def run_olo_experiment(config, data=None):
    """Single online pass of the KT learner and OGD (rate grid) with absolute loss.

    ``data`` may be given as ``(X, y, u)`` with unit-norm rows; otherwise the
    config's dataset or synthetic generator is used. ``value`` is the
    cumulative online absolute loss.
    """
    if data is None:
        X, y, u, competitor = _olo_data(config)
    else:
        X, y, u = data
        competitor = "supplied vector"
    if len(y) == 0:
        return []
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("OLO inputs must have unit L2 norm")
    comp = np.abs(X @ u - y)
    t = np.arange(1, len(y) + 1)
    d = X.shape[1]
    traces = []
    cum, reg = _olo_run(KTHilbertLearner(d, config.epsilon), X, y, comp)
    traces.append(RegretTrace("kt", {"epsilon": config.epsilon, "competitor": competitor},
                              t, cum, reg, "cumulative_loss"))
    for eta in eta_grid(config.eta_grid, (1e-2, 1e2, 25)):
        cum, reg = _olo_run(OnlineGradientDescent(d, eta), X, y, comp)
        traces.append(RegretTrace("ogd", {"eta": float(eta), "competitor": competitor},
                                  t, cum, reg, "cumulative_loss"))
    return traces


# ---------------------------------------------------------------- coin game


def _coin_sequence(name, T, rng, heads_prob):
    if name == "all_heads":
        return np.ones(T)
    if name == "alternating":
        return np.where(np.arange(T) % 2 == 0, 1.0, -1.0)
    if name == "zero_sum":
        half = np.ones(T // 2)
        seq = np.concatenate([half, -half])
        return np.concatenate([seq, np.zeros(T - seq.size)])
    if name == "random_pm1":
        return np.where(rng.random(T) < heads_prob, 1.0, -1.0)
    return rng.uniform(-1.0, 1.0, T)


def _fixed_fraction_wealth(coins, fraction, eps):
    return eps * np.cumprod(1.0 + fraction * coins)


def run_coin_game(config):
    """KT bettor, hindsight-optimal fixed fraction and Kelly bettor on scripted coins.

    The Kelly bettor uses ``heads_prob`` for the random +-1 sequence and the
    empirical heads frequency otherwise. The KT trace carries the floor
    columns ``F_t(sum g)`` and, on +-1 sequences, ``W_t(beta*_t) / (2 sqrt(t))``.
    ``regret`` is ``ln W(beta*) - ln W`` (log-wealth regret to the oracle).
    """
    T = int(config.T)
    if T == 0:
        return []
    eps = config.epsilon
    rng = np.random.default_rng(config.seed)
    pot = KTPotential(eps)
    traces = []
    t = np.arange(1, T + 1)
    for name in config.sequences:
        coins = validate_coins(_coin_sequence(name, T, rng, config.heads_prob))
        sums = np.cumsum(coins)
        beta_star = float(sums[-1]) / T
        oracle = _fixed_fraction_wealth(coins, beta_star, eps)
        log_oracle = math.log(oracle[-1]) if oracle[-1] > 0 else -math.inf

        prev = np.concatenate([[0.0], sums[:-1]])
        kt_frac = prev / t
        kt = eps * np.cumprod(1.0 + kt_frac * coins)
        floor = np.array([pot.value(int(s), float(x)) for s, x in zip(t, sums)])
        extra = {"wealth_floor": floor}
        if np.all(np.abs(coins) == 1.0):
            kl = np.array([kl_bernoulli(min(1.0, 0.5 + x / (2 * s)), 0.5) for s, x in zip(t, sums)])
            extra["oracle_over_2sqrt_t"] = eps * np.exp(t * kl) / (2.0 * np.sqrt(t))

        if name == "random_pm1":
            p = config.heads_prob
        else:
            p = float(np.mean(coins > 0)) if np.all(np.abs(coins) == 1.0) else 0.5 + beta_star / 2
        kelly = _fixed_fraction_wealth(coins, kelly_fraction(p), eps)

        for algo, wealth, params, ex in (
            ("kt", kt, {}, extra),
            ("oracle", oracle, {"fraction": beta_star}, {}),
            ("kelly", kelly, {"p": p}, {}),
        ):
            with np.errstate(divide="ignore"):
                reg = log_oracle - np.log(wealth)
            params = dict(params, sequence=name, competitor="hindsight fixed fraction")
            traces.append(RegretTrace(f"{algo}_{name}", params, t.copy(), wealth, reg, "wealth", dict(ex)))
    return traces


def run_experiment(config):
    if config.task == "lea_synthetic":
        return run_lea_experiment(config)
    if config.task == "olo_regression":
        return run_olo_experiment(config)
    return run_coin_game(config)


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _trace_filename(trace, used):
    parts = [trace.algorithm] + [
        f"{k}={v:.6g}" if isinstance(v, float) else "" for k, v in trace.params.items()
    ]
    stem = re.sub(r"[^A-Za-z0-9_.=-]+", "_", "_".join(p for p in parts if p))
    name, n = stem, 1
    while name in used:
        n += 1
        name = f"{stem}_{n}"
    used.add(name)
    return name + ".csv"


def summary_rows(traces):
    rows = []
    for tr in traces:
        rows.append({
            "algorithm": tr.algorithm,
            "params": json.dumps(tr.params, sort_keys=True),
            "rounds": int(tr.t[-1]) if tr.t.size else 0,
            f"final_{tr.value_name}": tr.final_value,
            "final_regret": tr.final_regret,
        })
    return rows


def write_traces(traces, out_dir, config=None):
    """Write per-trace CSVs, ``summary.csv`` and (if given) ``config.json``."""
    os.makedirs(out_dir, exist_ok=True)
    used = set()
    summary = []
    for tr in traces:
        fname = _trace_filename(tr, used)
        array_extra = {k: v for k, v in tr.extra.items() if np.ndim(v) == 1}
        header = ["t", tr.value_name, "regret"] + list(array_extra)
        with open(os.path.join(out_dir, fname), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            cols = [tr.t, tr.value, tr.regret] + list(array_extra.values())
            for row in zip(*cols):
                w.writerow([str(int(row[0]))] + [_fmt(v) for v in row[1:]])
        summary.append((fname, tr))
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "algorithm", "params", "rounds", "final_value", "value_name", "final_regret"])
        for fname, tr in summary:
            w.writerow([fname, tr.algorithm, json.dumps(tr.params, sort_keys=True),
                        int(tr.t[-1]) if tr.t.size else 0, _fmt(tr.final_value),
                        tr.value_name, _fmt(tr.final_regret)])
    if config is not None:
        with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8") as fh:
            json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
