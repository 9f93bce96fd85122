import numpy as np
import pytest

from ..packages.ddpg import (AgentParameters, DdpgAgent, ReplayBuffer,
                             Transition)


class FixedNoise:
    """ Stands in for a Generator whose normal draws are all `value` """

    def __init__(self, value):
        self.value = value

    def normal(self, loc=0.0, scale=1.0, size=None):
        return(np.full(size, self.value))


def small_params(**changes):
    values = dict(batch_size=4, buffer_size=100, actor_layers=[8, 8, 8],
                  critic_layers=[8, 8, 8])
    values.update(changes)
    return(AgentParameters(**values))


def make_agent(seed=0, state_dim=3, action_dim=1, **changes):
    return(DdpgAgent(state_dim, action_dim, small_params(**changes),
                     np.random.default_rng(seed),
                     np.random.default_rng(seed + 100)))


def constant_network(net, value):
    for p in net.parameters():
        p[...] = 0.0
    net.biases[-1][...] = value


def fixed_batch(agent, reward=2.0, rows=4):
    states = np.tile([0.1, -0.2, 0.3], (rows, 1))
    actions = np.full((rows, agent.action_dim), 0.4)
    rewards = np.full(rows, reward)
    return(states, actions, rewards, states.copy())


class TestReplayBuffer:
    def test_ring(self):
        buffer = ReplayBuffer(3, 1, 1)
        for i in range(5):
            buffer.add(Transition([i], [0.0], float(i), [i]))
        assert len(buffer) == 3
        assert buffer.stored == 5
        assert sorted(buffer.rewards) == [2.0, 3.0, 4.0]

    def test_sample_too_early(self):
        buffer = ReplayBuffer(10, 1, 1)
        buffer.add(Transition([0.0], [0.0], 0.0, [0.0]))
        with pytest.raises(RuntimeError):
            buffer.sample(2, np.random.default_rng(0))

    def test_sample_shapes(self):
        buffer = ReplayBuffer(10, 2, 1)
        for i in range(4):
            buffer.add(Transition([i, i], [0.5], -1.0, [i, i]))
        states, actions, rewards, next_states = buffer.sample(
            4, np.random.default_rng(0))
        assert states.shape == (4, 2)
        assert actions.shape == (4, 1)
        assert rewards.shape == (4,)
        assert next_states.shape == (4, 2)

    def test_dimension_check(self):
        buffer = ReplayBuffer(10, 2, 1)
        with pytest.raises(IndexError):
            buffer.add(Transition([0.0], [0.0], 0.0, [0.0, 0.0]))

    def test_positive_capacity(self):
        with pytest.raises(ValueError):
            ReplayBuffer(0, 1, 1)


class TestAct:
    def test_deterministic_without_noise(self):
        agent = make_agent()
        state = np.array([0.3, -0.1, 0.8])
        assert np.array_equal(agent.act(state), agent.act(state))

    def test_targets_start_equal(self):
        agent = make_agent()
        for a, b in zip(agent.actor.parameters(),
                        agent.target_actor.parameters()):
            assert np.array_equal(a, b)

    def test_noise_clipped(self):
        agent = make_agent()
        constant_network(agent.actor, np.arctanh(0.99))
        agent.rng = FixedNoise(0.5)
        assert agent.act(np.zeros(3), explore=True) == pytest.approx([1.0])

    def test_noise_reproducible(self):
        first = [make_agent(4).act(np.zeros(3), True) for _ in range(3)]
        second = [make_agent(4).act(np.zeros(3), True) for _ in range(3)]
        assert np.array_equal(first, second)

    def test_exploration_in_range(self):
        agent = make_agent(noise_std=5.0)
        actions = np.array([agent.act(np.ones(3), True) for _ in range(200)])
        assert np.all(np.abs(actions) <= 1.0)
        assert np.any(actions == 1.0) and np.any(actions == -1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(IndexError):
            make_agent().act(np.zeros(4))


class TestCriticTarget:
    def test_bootstrapped_value(self):
        agent = make_agent(gamma=0.9)
        constant_network(agent.target_critic, -10.0)
        assert agent.critic_target(-5.0, np.zeros(3)) == pytest.approx(-14.0)

    def test_no_discount(self):
        agent = make_agent(gamma=0.0)
        assert agent.critic_target(3.5, np.ones(3)) == pytest.approx(3.5)

    def test_zero_target_critic(self):
        agent = make_agent()
        constant_network(agent.target_critic, 0.0)
        assert agent.critic_target(-2.0, np.ones(3)) == pytest.approx(-2.0)

    def test_uses_target_networks(self):
        agent = make_agent(gamma=0.9)
        constant_network(agent.target_critic, 1.0)
        constant_network(agent.critic, 50.0)
        assert agent.critic_target(0.0, np.zeros(3)) == pytest.approx(0.9)


class TestUpdate:
    def test_regression_to_reward(self):
        agent = make_agent(gamma=0.0)
        batch = fixed_batch(agent, reward=2.0)
        for _ in range(3000):
            loss, _ = agent.update(batch)
        assert loss < 1e-3
        q = agent.critic.forward(np.concatenate([batch[0][0], batch[1][0]]))
        assert q[0] == pytest.approx(2.0, abs=0.05)

    def test_actor_step_raises_objective(self):
        agent = make_agent(critic_lr=0.0, actor_lr=1e-4)
        batch = fixed_batch(agent)
        _, before = agent.update(batch)
        _, after = agent.update(batch)
        assert after > before

    def test_frozen_targets(self):
        agent = make_agent(tau=0.0)
        before = [p.copy() for p in agent.target_critic.parameters()]
        batch = fixed_batch(agent)
        for _ in range(10):
            agent.update(batch)
        for a, b in zip(before, agent.target_critic.parameters()):
            assert np.array_equal(a, b)

    def test_target_step_bounded(self):
        agent = make_agent(tau=0.01)
        before = [p.copy() for p in agent.target_actor.parameters()]
        agent.update(fixed_batch(agent))
        for old, new, online in zip(before, agent.target_actor.parameters(),
                                    agent.actor.parameters()):
            assert np.all(np.abs(new - old) <=
                          0.01 * np.abs(online - old) + 1e-12)

    def test_parameters_finite(self):
        agent = make_agent()
        rng = np.random.default_rng(1)
        for _ in range(50):
            agent.store(Transition(rng.normal(size=3), rng.uniform(-1, 1, 1),
                                   rng.normal() * 100, rng.normal(size=3)))
        for _ in range(100):
            agent.update()
        for net in (agent.actor, agent.critic, agent.target_actor,
                    agent.target_critic):
            for p in net.parameters():
                assert np.all(np.isfinite(p))

    def test_insufficient_buffer(self):
        agent = make_agent()
        assert not agent.ready()
        with pytest.raises(RuntimeError):
            agent.update()

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_quadratic_bandit(self, seed):
        agent = DdpgAgent(1, 1, AgentParameters(
            gamma=0.0, actor_lr=1e-3, critic_lr=1e-3, batch_size=64,
            buffer_size=5000, actor_layers=[32, 32],
            critic_layers=[64, 64]),
            np.random.default_rng(seed), np.random.default_rng(seed + 10))
        rng = np.random.default_rng(seed + 20)
        for _ in range(5000):
            s = rng.uniform(-1.0, 1.0, 1)
            a = rng.uniform(-1.0, 1.0, 1)
            agent.store(Transition(s, a, -float((a[0] - 0.5 * s[0]) ** 2),
                                   s))
        for _ in range(5000):
            agent.update()
        states = np.linspace(-1.0, 1.0, 101)[:, None]
        policy = agent.act(states)[:, 0]
        assert np.mean(np.abs(policy - 0.5 * states[:, 0])) < 0.1


class TestCheckpoint:
    def test_save_and_load(self, tmp_path):
        agent = make_agent(1)
        agent.update(fixed_batch(agent))
        path = str(tmp_path / "agent.json")
        agent.save(path)
        other = make_agent(2)
        other.load(path)
        states = np.random.default_rng(3).normal(size=(10, 3))
        assert np.array_equal(agent.act(states), other.act(states))
        assert np.array_equal(
            agent.critic_target(np.zeros(10), states),
            other.critic_target(np.zeros(10), states))

    def test_dimension_mismatch(self, tmp_path):
        path = str(tmp_path / "agent.json")
        make_agent(state_dim=3).save(path)
        with pytest.raises(RuntimeError):
            make_agent(state_dim=4).load(path)

    def test_width_mismatch(self, tmp_path):
        path = str(tmp_path / "agent.json")
        make_agent().save(path)
        other = DdpgAgent(3, 1, small_params(actor_layers=[4, 4]))
        with pytest.raises(RuntimeError):
            other.load(path)

    def test_not_a_checkpoint(self, tmp_path):
        path = tmp_path / "agent.json"
        path.write_text("{\"actor\": 1}")
        with pytest.raises(RuntimeError):
            make_agent().load(str(path))
