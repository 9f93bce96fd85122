""" Dense networks

Minimal multilayer perceptron with hand-derived gradients, all arithmetic in
float64. Hidden layers use ReLU, the output layer tanh (actors) or identity
(critics).

Classes
-------
Mlp
    Weights, forward pass and backpropagation
AdamState
    Moment estimates for one network

Functions
---------
adam_step
    One bias-corrected Adam update, in place
soft_update
    Blend online weights into target weights
save_weights / load_weights
    JSON checkpoint of one network
"""
import json
from typing import List, Optional

import numpy as np

from . import utils

ACTIVATIONS = ("tanh", "identity")


class Mlp:
    """ Multilayer perceptron

    Attributes
    ----------
    widths: list
        Layer widths, input first and output last
    output_activation: str
        'tanh' or 'identity'
    weights: list
        Arrays of shape (fan_in, fan_out)
    biases: list
        Arrays of shape (fan_out,)

    Methods
    -------
    forward
        Output for one input vector or a batch of rows
    backward
        Parameter and input gradients of the last forward pass
    gradients
        forward followed by backward
    parameters
        Weights and biases interleaved, the order optimizers use
    """

    def __init__(self, widths: List[int], output_activation: str = "tanh",
                 rng: Optional[np.random.Generator] = None) -> None:
        widths = [int(w) for w in widths]
        if len(widths) < 2 or min(widths) < 1:
            raise ValueError(f"Need at least an input and an output layer "
                             f"of positive width, got {widths}")
        if output_activation not in ACTIVATIONS:
            raise ValueError(f"Unknown output activation "
                             f"{output_activation}, expected one of "
                             f"{ACTIVATIONS}")
        self.widths = widths
        self.output_activation = output_activation
        if rng is None:
            rng = np.random.default_rng(0)

        self.weights = []
        self.biases = []
        n_layers = len(widths) - 1
        for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            if i < n_layers - 1:
                # He-uniform for ReLU layers
                limit = np.sqrt(6.0 / fan_in)
            else:
                # Xavier-uniform for the output layer
                limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self._cache = None

    def parameters(self) -> List[np.ndarray]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend([w, b])
        return(params)

    def copy(self) -> "Mlp":
        clone = Mlp.__new__(Mlp)
        clone.widths = list(self.widths)
        clone.output_activation = self.output_activation
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        clone._cache = None
        return(clone)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        batch = np.atleast_2d(x)
        if batch.ndim != 2 or batch.shape[1] != self.widths[0]:
            raise IndexError(f"Expected inputs of length {self.widths[0]}, "
                             f"got shape {x.shape}")
        activations = [batch]
        preactivations = []
        a = batch
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            preactivations.append(z)
            if i < last:
                a = np.maximum(z, 0.0)
            elif self.output_activation == "tanh":
                a = np.tanh(z)
            else:
                a = z
            activations.append(a)
        self._cache = (activations, preactivations, single)
        return(a[0] if single else a)

    def backward(self, upstream) -> tuple:
        """ Gradients of sum(upstream * output) for the last forward pass

        Returns (parameter gradients in `parameters()` order, input
        gradient). Batch gradients are summed over rows.
        """
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        activations, preactivations, single = self._cache
        g = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
        if g.shape != activations[-1].shape:
            raise IndexError(f"Upstream gradient shape {g.shape} does not "
                             f"match output shape {activations[-1].shape}")
        if self.output_activation == "tanh":
            g = g * (1.0 - activations[-1] ** 2)

        grads = [None] * (2 * len(self.weights))
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = activations[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                g = g * (preactivations[i - 1] > 0.0)
        return(grads, g[0] if single else g)

    def gradients(self, x, upstream) -> tuple:
        self.forward(x)
        return(self.backward(upstream))

    # Serialization
    def to_dict(self) -> dict:
        return({"widths": list(self.widths),
                "output_activation": self.output_activation,
                "layers": [{"weights": w.tolist(), "bias": b.tolist()}
                           for w, b in zip(self.weights, self.biases)]})

    @classmethod
    def from_dict(cls, data: dict, name: str = "network") -> "Mlp":
        try:
            widths = [int(w) for w in data["widths"]]
            activation = data["output_activation"]
            layers = data["layers"]
        except (KeyError, TypeError, ValueError) as e:
            raise RuntimeError(f"{name} is missing its header: {e!r}")
        net = cls.__new__(cls)
        net.widths = widths
        net.output_activation = activation
        net._cache = None
        if len(layers) != len(widths) - 1:
            raise RuntimeError(f"{name} declares {len(widths) - 1} layers "
                               f"but stores {len(layers)}")
        net.weights = []
        net.biases = []
        for i, layer in enumerate(layers):
            try:
                w = np.asarray(layer["weights"], dtype=np.float64)
                b = np.asarray(layer["bias"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as e:
                raise RuntimeError(f"{name} layer {i} is corrupt: {e!r}")
            expected = (widths[i], widths[i + 1])
            if w.shape != expected or b.shape != (widths[i + 1],):
                raise RuntimeError(f"{name} layer {i} has weights "
                                   f"{w.shape} and bias {b.shape}, header "
                                   f"declares {expected}")
            net.weights.append(w)
            net.biases.append(b)
        return(net)


class AdamState:
    def __init__(self, params: List[np.ndarray], beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]


def adam_step(params: List[np.ndarray], grads: List[np.ndarray],
              state: AdamState, lr: float) -> List[np.ndarray]:
    """ One Adam step applied in place

    Nothing changes, moments and step count included, when a shape does not
    match or the step would leave a parameter non-finite.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise IndexError(f"Got {len(params)} parameters, {len(grads)} "
                         f"gradients and {len(state.m)} moments")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise IndexError(f"Gradient shape {g.shape} does not match "
                             f"parameter shape {p.shape}")
    step = state.step + 1
    correction1 = 1.0 - state.beta1 ** step
    correction2 = 1.0 - state.beta2 ** step
    updates = []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m_new = state.beta1 * m + (1.0 - state.beta1) * g
        v_new = state.beta2 * v + (1.0 - state.beta2) * g * g
        p_new = p - lr * (m_new / correction1) / \
            (np.sqrt(v_new / correction2) + state.eps)
        if not np.all(np.isfinite(p_new)):
            raise RuntimeError("Adam update produced non-finite parameters")
        updates.append((m_new, v_new, p_new))
    for (m_new, v_new, p_new), p, m, v in zip(updates, params, state.m,
                                             state.v):
        m[...] = m_new
        v[...] = v_new
        p[...] = p_new
    state.step = step
    return(params)


def soft_update(target: Mlp, online: Mlp, tau: float) -> Mlp:
    if target.widths != online.widths:
        raise IndexError(f"Cannot blend widths {online.widths} into "
                         f"{target.widths}")
    for t, o in zip(target.parameters(), online.parameters()):
        t *= (1.0 - tau)
        t += tau * o
    return(target)


def save_weights(net: Mlp, path: str) -> None:
    utils.write_atomic(path, json.dumps(net.to_dict()))


def load_weights(path: str) -> Mlp:
    return(Mlp.from_dict(utils.import_json(path), name=f"File '{path}'"))
