""" DDPG agent

Classes
-------
Transition
    One (s, a, r, s') experience
ReplayBuffer
    Fixed capacity ring buffer with uniform sampling
AgentParameters
    Hyperparameters of one agent
DdpgAgent
    Actor, critic, their targets, a replay buffer and the exploration noise
"""
import json
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from . import utils
from .neural import AdamState, Mlp, adam_step, soft_update


class Transition(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


class ReplayBuffer:
    """ Ring buffer of transitions

    Sampling is uniform with replacement and only allowed once the buffer
    holds at least a batch.
    """

    def __init__(self, capacity: int, state_dim: int,
                 action_dim: int) -> None:
        if capacity < 1:
            raise ValueError(f"Replay capacity must be positive, got "
                             f"{capacity}")
        self.capacity = capacity
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.size = 0
        self.stored = 0
        self._index = 0

    def __len__(self) -> int:
        return(self.size)

    def add(self, transition: Transition) -> None:
        state = np.asarray(transition.state, dtype=np.float64)
        action = np.atleast_1d(np.asarray(transition.action,
                                          dtype=np.float64))
        next_state = np.asarray(transition.next_state, dtype=np.float64)
        if state.shape != (self.state_dim,) or \
                next_state.shape != (self.state_dim,):
            raise IndexError(f"Expected states of length {self.state_dim}, "
                             f"got {state.shape} and {next_state.shape}")
        if action.shape != (self.action_dim,):
            raise IndexError(f"Expected actions of length "
                             f"{self.action_dim}, got {action.shape}")
        i = self._index
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = float(transition.reward)
        self.next_states[i] = next_state
        self._index = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        self.stored += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> tuple:
        if self.size < batch_size:
            raise RuntimeError(f"Replay buffer holds {self.size} "
                               f"transitions, need {batch_size} to sample")
        idx = rng.integers(0, self.size, size=batch_size)
        return(self.states[idx], self.actions[idx], self.rewards[idx],
               self.next_states[idx])


@dataclass
class AgentParameters:
    gamma: float = 0.9
    noise_std: float = 0.1
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    batch_size: int = 128
    buffer_size: int = 100000
    tau: float = 1e-4
    actor_layers: List[int] = field(default_factory=lambda: [200, 200, 100])
    critic_layers: List[int] = field(
        default_factory=lambda: [300, 200, 200])


class DdpgAgent:
    """ Deterministic policy gradient agent

    Attributes
    ----------
    actor, critic: Mlp
        Online networks; the critic reads [state, action]
    target_actor, target_critic: Mlp
        Slowly tracking copies used for the critic target
    buffer: ReplayBuffer
    params: AgentParameters

    Methods
    -------
    act
        Actor output, with clipped Gaussian noise when exploring
    critic_target
        r + gamma * Q'(s', pi'(s'))
    update
        One critic step, one actor step, then soft target updates
    """

    def __init__(self, state_dim: int, action_dim: int,
                 params: AgentParameters = None,
                 rng: np.random.Generator = None,
                 init_rng: np.random.Generator = None) -> None:
        if params is None:
            params = AgentParameters()
        if rng is None:
            rng = utils.get_rng("agent")
        if init_rng is None:
            init_rng = rng
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.params = params
        self.rng = rng

        self.actor = Mlp([state_dim] + list(params.actor_layers)
                         + [action_dim], "tanh", init_rng)
        self.critic = Mlp([state_dim + action_dim]
                          + list(params.critic_layers) + [1],
                          "identity", init_rng)
        self.target_actor = self.actor.copy()
        self.target_critic = self.critic.copy()
        self.actor_optimizer = AdamState(self.actor.parameters())
        self.critic_optimizer = AdamState(self.critic.parameters())
        self.buffer = ReplayBuffer(params.buffer_size, state_dim, action_dim)

    def _check_state(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=np.float64)
        if state.shape[-1] != self.state_dim:
            raise IndexError(f"Expected states of length {self.state_dim}, "
                             f"got {state.shape}")
        return(state)

    def act(self, state, explore: bool = False) -> np.ndarray:
        action = self.actor.forward(self._check_state(state))
        if explore:
            noise = self.rng.normal(0.0, self.params.noise_std,
                                    size=action.shape)
            action = np.clip(action + noise, -1.0, 1.0)
        return(action)

    def store(self, transition: Transition) -> None:
        self.buffer.add(transition)

    def critic_target(self, reward, next_state) -> np.ndarray:
        next_state = self._check_state(next_state)
        next_action = self.target_actor.forward(next_state)
        joined = np.concatenate([next_state, next_action], axis=-1)
        q_next = self.target_critic.forward(joined)
        return(np.asarray(reward) + self.params.gamma * q_next[..., 0])

    def update(self, batch: tuple = None) -> tuple:
        """ One learning step on a sampled (or given) batch

        Returns (critic loss, actor objective) measured before the steps.
        """
        if batch is None:
            batch = self.buffer.sample(self.params.batch_size, self.rng)
        states, actions, rewards, next_states = batch
        n = states.shape[0]

        # Critic: minimise mean (Q(s, a) - y)^2
        y = self.critic_target(rewards, next_states)
        q = self.critic.forward(np.concatenate([states, actions], axis=1))
        error = q[:, 0] - y
        critic_loss = float(np.mean(error ** 2))
        grads, _ = self.critic.backward((2.0 / n) * error[:, None])
        adam_step(self.critic.parameters(), grads, self.critic_optimizer,
                  self.params.critic_lr)

        # Actor: ascend mean Q(s, pi(s)) through dQ/da
        policy = self.actor.forward(states)
        q_policy = self.critic.forward(
            np.concatenate([states, policy], axis=1))
        actor_objective = float(np.mean(q_policy))
        _, dq_dinput = self.critic.backward(np.full((n, 1), 1.0 / n))
        dq_da = dq_dinput[:, self.state_dim:]
        self.actor.forward(states)
        grads, _ = self.actor.backward(-dq_da)
        adam_step(self.actor.parameters(), grads, self.actor_optimizer,
                  self.params.actor_lr)

        soft_update(self.target_critic, self.critic, self.params.tau)
        soft_update(self.target_actor, self.actor, self.params.tau)
        return(critic_loss, actor_objective)

    def ready(self) -> bool:
        return(len(self.buffer) >= self.params.batch_size)

    # Checkpoints
    def to_dict(self) -> dict:
        return({"state_dim": self.state_dim,
                "action_dim": self.action_dim,
                "actor": self.actor.to_dict(),
                "critic": self.critic.to_dict(),
                "target_actor": self.target_actor.to_dict(),
                "target_critic": self.target_critic.to_dict()})

    def save(self, path: str) -> None:
        utils.write_atomic(path, json.dumps(self.to_dict()))

    def load(self, path: str) -> None:
        data = utils.import_json(path)
        name = f"File '{path}'"
        try:
            dims = (int(data["state_dim"]), int(data["action_dim"]))
            nets = {key: Mlp.from_dict(data[key], name=f"{name} {key}")
                    for key in ("actor", "critic", "target_actor",
                                "target_critic")}
        except (KeyError, TypeError) as e:
            raise RuntimeError(f"{name} is not an agent checkpoint: {e!r}")
        if dims != (self.state_dim, self.action_dim):
            raise RuntimeError(f"{name} holds an agent for dimensions "
                               f"{dims}, expected "
                               f"{(self.state_dim, self.action_dim)}")
        if nets["actor"].widths != self.actor.widths or \
                nets["critic"].widths != self.critic.widths:
            raise RuntimeError(f"{name} network widths do not match the "
                               f"configured layers")
        self.actor = nets["actor"]
        self.critic = nets["critic"]
        self.target_actor = nets["target_actor"]
        self.target_critic = nets["target_critic"]
        self.actor_optimizer = AdamState(self.actor.parameters())
        self.critic_optimizer = AdamState(self.critic.parameters())
