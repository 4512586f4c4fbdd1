"""Recurrent skill value functions trained on local-entropy-change rewards.

A single-layer gated recurrent cell reads the context window step by step
(observation channels concatenated with a one-hot of the action taken from
that observation; the newest observation has no action yet and gets zeros)
and an affine head maps the final hidden state to one value per skill.
Forward and backward passes are written out explicitly so gradients can be
checked against central finite differences.

Cell equations, with x the step input and h the carried state:

    r = sigmoid(x Wr + h Ur + br)          reset gate
    u = sigmoid(x Wu + h Uu + bu)          update (carry) gate
    c = tanh(x Wc + (r * h) Uc + bc)       candidate state
    h' = u * h + (1 - u) * c

Sequences in a batch are front-padded and masked, so every sequence ends at
the final time step and the padded prefix leaves h at zero.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .history import HistoryContext, r_info

__all__ = [
    "AdamState",
    "ContextBatch",
    "SkillValueModel",
    "encode_context",
    "forward",
    "gamma_hat",
    "gradient_check",
    "train_step",
    "y_high",
    "y_low",
]

OBS_CHANNELS = 8
N_ACTIONS = 4
INPUT_SIZE = OBS_CHANNELS + N_ACTIONS

PARAM_KEYS = ("Wr", "Ur", "br", "Wu", "Uu", "bu", "Wc", "Uc", "bc", "Wo", "bo")


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def encode_context(h: HistoryContext, include_actions: bool = True,
                   coord_scale: float = 10.0) -> np.ndarray:
    """Encode a context window as a (T, 12) input matrix.

    Position channels are divided by coord_scale; wall bits and offsets pass
    through unchanged. With include_actions False the one-hot action
    channels are zeroed (state-history-only ablation).
    """
    rows = np.zeros((len(h), INPUT_SIZE))
    for i, (obs, action) in enumerate(h.entries):
        ch = obs.channels()
        rows[i, 0] = ch[0] / coord_scale
        rows[i, 1] = ch[1] / coord_scale
        rows[i, 2:OBS_CHANNELS] = ch[2:]
        if include_actions and action is not None:
            rows[i, OBS_CHANNELS + action] = 1.0
    return rows


class SkillValueModel:
    """GRU encoder plus affine head producing one value per skill."""

    def __init__(self, hidden_size: int = 32, n_skills: int = 4,
                 input_size: int = INPUT_SIZE, max_context: int = 10,
                 include_actions: bool = True, coord_scale: float = 10.0,
                 rng: np.random.Generator | None = None):
        self.hidden_size = hidden_size
        self.n_skills = n_skills
        self.input_size = input_size
        self.max_context = max_context
        self.include_actions = include_actions
        self.coord_scale = coord_scale
        rng = rng if rng is not None else np.random.default_rng(0)
        s = 1.0 / math.sqrt(hidden_size)
        H, D, Z = hidden_size, input_size, n_skills
        self.params = {
            "Wr": rng.uniform(-s, s, (D, H)),
            "Ur": rng.uniform(-s, s, (H, H)),
            "br": np.zeros(H),
            "Wu": rng.uniform(-s, s, (D, H)),
            "Uu": rng.uniform(-s, s, (H, H)),
            "bu": np.zeros(H),
            "Wc": rng.uniform(-s, s, (D, H)),
            "Uc": rng.uniform(-s, s, (H, H)),
            "bc": np.zeros(H),
            "Wo": rng.uniform(-s, s, (H, Z)),
            "bo": np.zeros(Z),
        }

    # -- parameter plumbing -------------------------------------------------

    def get_flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in PARAM_KEYS])

    def set_flat(self, vec: np.ndarray) -> None:
        i = 0
        for k in PARAM_KEYS:
            p = self.params[k]
            self.params[k] = vec[i:i + p.size].reshape(p.shape).copy()
            i += p.size
        if i != vec.size:
            raise ValueError("flat vector size mismatch")

    def clone(self) -> "SkillValueModel":
        other = SkillValueModel(
            hidden_size=self.hidden_size, n_skills=self.n_skills,
            input_size=self.input_size, max_context=self.max_context,
            include_actions=self.include_actions, coord_scale=self.coord_scale,
        )
        other.set_flat(self.get_flat())
        return other

    def save(self, path) -> None:
        np.savez(
            path,
            version=1,
            hidden_size=self.hidden_size,
            n_skills=self.n_skills,
            input_size=self.input_size,
            max_context=self.max_context,
            include_actions=int(self.include_actions),
            coord_scale=self.coord_scale,
            flat=self.get_flat(),
        )

    @classmethod
    def load(cls, path) -> "SkillValueModel":
        with np.load(path) as data:
            if int(data["version"]) != 1:
                raise ValueError(f"unsupported checkpoint version {data['version']}")
            model = cls(
                hidden_size=int(data["hidden_size"]),
                n_skills=int(data["n_skills"]),
                input_size=int(data["input_size"]),
                max_context=int(data["max_context"]),
                include_actions=bool(int(data["include_actions"])),
                coord_scale=float(data["coord_scale"]),
            )
            model.set_flat(data["flat"])
        return model

    # -- forward / backward -------------------------------------------------

    def forward_batch(self, inputs: np.ndarray, mask: np.ndarray):
        """Run the cell over (B, T, D) inputs with a (B, T) validity mask.

        Returns (values (B, Z), cache for backward).
        """
        p = self.params
        B, T, _ = inputs.shape
        H = self.hidden_size
        h = np.zeros((B, H))
        steps = []
        for t in range(T):
            x = inputs[:, t, :]
            m = mask[:, t][:, None]
            r = _sigmoid(x @ p["Wr"] + h @ p["Ur"] + p["br"])
            u = _sigmoid(x @ p["Wu"] + h @ p["Uu"] + p["bu"])
            rh = r * h
            c = np.tanh(x @ p["Wc"] + rh @ p["Uc"] + p["bc"])
            h_new = u * h + (1.0 - u) * c
            h_next = m * h_new + (1.0 - m) * h
            steps.append((x, h, r, u, rh, c, m))
            h = h_next
        values = h @ p["Wo"] + p["bo"]
        return values, (steps, h)

    def backward_batch(self, cache, dvalues: np.ndarray) -> dict:
        """Backpropagate dL/dvalues through head and cell; returns grad dict."""
        p = self.params
        steps, h_final = cache
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        grads["Wo"] = h_final.T @ dvalues
        grads["bo"] = dvalues.sum(axis=0)
        dh = dvalues @ p["Wo"].T
        for (x, h_prev, r, u, rh, c, m) in reversed(steps):
            dh_new = m * dh
            dh_prev = (1.0 - m) * dh
            du = dh_new * (h_prev - c)
            dc = dh_new * (1.0 - u)
            dh_prev += dh_new * u
            da_c = dc * (1.0 - c * c)
            grads["Wc"] += x.T @ da_c
            grads["Uc"] += rh.T @ da_c
            grads["bc"] += da_c.sum(axis=0)
            drh = da_c @ p["Uc"].T
            dr = drh * h_prev
            dh_prev += drh * r
            da_u = du * u * (1.0 - u)
            grads["Wu"] += x.T @ da_u
            grads["Uu"] += h_prev.T @ da_u
            grads["bu"] += da_u.sum(axis=0)
            dh_prev += da_u @ p["Uu"].T
            da_r = dr * r * (1.0 - r)
            grads["Wr"] += x.T @ da_r
            grads["Ur"] += h_prev.T @ da_r
            grads["br"] += da_r.sum(axis=0)
            dh_prev += da_r @ p["Ur"].T
            dh = dh_prev
        return grads

    def forward_context(self, h: HistoryContext,
                        include_actions: bool | None = None) -> np.ndarray:
        """Values for one context; longer windows are truncated to the newest
        max_context steps."""
        if len(h) == 0:
            raise ValueError("cannot evaluate an empty context")
        use_actions = self.include_actions if include_actions is None else include_actions
        rows = encode_context(h, use_actions, self.coord_scale)
        if rows.shape[0] > self.max_context:
            rows = rows[-self.max_context:]
        inputs = rows[None, :, :]
        mask = np.ones((1, rows.shape[0]))
        values, _ = self.forward_batch(inputs, mask)
        return values[0]


def forward(model: SkillValueModel, h: HistoryContext,
            include_actions: bool | None = None) -> np.ndarray:
    """Skill values Q(h, z) for every skill z."""
    return model.forward_context(h, include_actions)


def gamma_hat(k: int) -> float:
    """Short-horizon discount 1 - 1/k used by the low-level target."""
    if k < 1:
        raise ValueError("skill horizon must be >= 1")
    return 1.0 - 1.0 / k


def y_high(context_path) -> float:
    """High-level target: summed one-step entropy changes over a skill run.

    `context_path` holds the k+1 consecutive contexts spanning one skill
    execution; by telescoping the sum equals the endpoint entropy
    difference. No bootstrap term.
    """
    if len(context_path) < 2:
        raise ValueError("need at least two consecutive contexts")
    return sum(r_info(a, b) for a, b in zip(context_path, context_path[1:]))


def y_low(h_t: HistoryContext, h_next: HistoryContext, z: int,
          model: SkillValueModel, gamma: float, terminal: bool = False) -> float:
    """Low-level target: one-step entropy change plus a discounted bootstrap
    of the same skill's value at the next context (dropped at episode end)."""
    target = r_info(h_t, h_next)
    if not terminal:
        target += gamma * float(forward(model, h_next)[z])
    return target


@dataclass
class ContextBatch:
    """Padded context batch with targets for one regression step.

    Sequences are front-padded; mask rows are a contiguous suffix of ones,
    which is also what random context truncation preserves.
    """

    inputs: np.ndarray          # (B, T, D)
    mask: np.ndarray            # (B, T)
    z_index: np.ndarray         # (B,) skill whose value is regressed
    targets: np.ndarray         # (B,)
    weights: np.ndarray         # (B,) importance weights (1 for high scheme)
    scheme: str = "low"         # {"high", "low"}
    data_scope: str = "all"     # {"all", "skill-only"}
    truncated: np.ndarray = field(default=None)  # (B,) bool, diagnostics

    def __len__(self) -> int:
        return len(self.targets)

    def validate(self) -> None:
        if len(self) == 0:
            raise ValueError("empty batch")
        if self.scheme not in ("high", "low"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "high" and not np.allclose(self.weights, 1.0):
            raise ValueError("high-scheme batches are unweighted")
        for row in self.mask:
            on = np.flatnonzero(row)
            if on.size == 0 or on[-1] != row.size - 1 or \
                    not np.array_equal(on, np.arange(on[0], row.size)):
                raise ValueError("mask must be a contiguous suffix of ones")


def pack_sequences(rows_list, truncated=None):
    """Front-pad a list of (T_i, D) matrices into (inputs, mask)."""
    B = len(rows_list)
    T = max(r.shape[0] for r in rows_list)
    D = rows_list[0].shape[1]
    inputs = np.zeros((B, T, D))
    mask = np.zeros((B, T))
    for i, rows in enumerate(rows_list):
        L = rows.shape[0]
        inputs[i, T - L:, :] = rows
        mask[i, T - L:] = 1.0
    return inputs, mask


def loss_and_grads(model: SkillValueModel, batch: ContextBatch):
    """Weighted MSE at the selected skills and its parameter gradients."""
    values, cache = model.forward_batch(batch.inputs, batch.mask)
    idx = np.arange(len(batch))
    picked = values[idx, batch.z_index]
    err = picked - batch.targets
    loss = float(np.mean(batch.weights * err * err))
    dvalues = np.zeros_like(values)
    dvalues[idx, batch.z_index] = 2.0 * batch.weights * err / len(batch)
    grads = model.backward_batch(cache, dvalues)
    return loss, grads


@dataclass
class AdamState:
    """First/second-moment accumulators for the optional Adam optimizer."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def apply(self, params: dict, grads: dict, lr: float) -> None:
        self.t += 1
        for k, g in grads.items():
            if k not in self.m:
                self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            mhat = self.m[k] / (1 - self.beta1 ** self.t)
            vhat = self.v[k] / (1 - self.beta2 ** self.t)
            params[k] -= lr * mhat / (np.sqrt(vhat) + self.eps)


def train_step(model: SkillValueModel, batch: ContextBatch,
               scheme: str | None = None, data_scope: str | None = None,
               step_size: float = 1e-3, optimizer: AdamState | None = None) -> float:
    """One gradient step on the batch; returns the pre-step loss.

    A non-finite loss is reported and the step skipped. Plain gradient
    descent by default; pass an AdamState for the adaptive variant.
    """
    if scheme is not None and scheme != batch.scheme:
        raise ValueError(f"batch was built for scheme {batch.scheme!r}")
    if data_scope is not None and data_scope != batch.data_scope:
        raise ValueError(f"batch was built for data scope {batch.data_scope!r}")
    batch.validate()
    values, cache = model.forward_batch(batch.inputs, batch.mask)
    idx = np.arange(len(batch))
    err = values[idx, batch.z_index] - batch.targets
    loss = float(np.mean(batch.weights * err * err))
    if not math.isfinite(loss):
        import logging
        logging.getLogger(__name__).warning(
            "non-finite loss %r; gradient step skipped", loss)
        return loss
    dvalues = np.zeros_like(values)
    dvalues[idx, batch.z_index] = 2.0 * batch.weights * err / len(batch)
    grads = model.backward_batch(cache, dvalues)
    if optimizer is not None:
        optimizer.apply(model.params, grads, step_size)
    else:
        for k, g in grads.items():
            model.params[k] -= step_size * g
    return loss


def gradient_check(model: SkillValueModel, batch: ContextBatch,
                   epsilon: float = 1e-5) -> float:
    """Max relative error between backprop and central finite differences.

    The denominator is floored at 1e-5 so round-off noise on parameters
    with (near-)zero gradient does not register as disagreement.
    """
    _, grads = loss_and_grads(model, batch)
    analytic = np.concatenate([grads[k].ravel() for k in PARAM_KEYS])
    theta = model.get_flat()
    numeric = np.zeros_like(theta)
    for i in range(theta.size):
        bumped = theta.copy()
        bumped[i] = theta[i] + epsilon
        model.set_flat(bumped)
        up, _ = loss_and_grads(model, batch)
        bumped[i] = theta[i] - epsilon
        model.set_flat(bumped)
        down, _ = loss_and_grads(model, batch)
        numeric[i] = (up - down) / (2.0 * epsilon)
    model.set_flat(theta)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-5)
    return float(np.max(np.abs(analytic - numeric) / denom))
