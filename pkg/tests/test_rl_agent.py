from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest
from pydantic import ValidationError

from grid_model import Grid, grid_hash
from neural_core import forward, init_mlp
from power_flow import InjectionSet, PowerFlowSolution, solve_power_flow
from rl_agent import (
    Batch,
    CurtailmentEnv,
    DdpgAgent,
    EnvironmentStateError,
    Experience,
    NonFiniteLossError,
    ReplayBuffer,
    ReplayBufferError,
    TrainConfig,
    action_to_setpoints,
    actor_gradient,
    compute_reward,
    critic_targets,
    ddpg_update,
    load_agent,
    normaliser,
    run_episode,
    save_agent,
    setpoints_to_action,
    train,
)
from scenario_gen import Dataset, ProfileConfig, generate_profiles, label_violations
from types_shared import SupplyTask

from conftest import build_task


def _solution(v: list[float], loading: list[float], converged: bool = True) -> PowerFlowSolution:
    n = len(v)
    return PowerFlowSolution(
        v_mag=np.array(v, dtype=float),
        v_ang=np.zeros(n),
        s_from=np.zeros(len(loading), dtype=complex),
        s_to=np.zeros(len(loading), dtype=complex),
        loading=np.array(loading, dtype=float),
        converged=converged,
        iterations=1,
        max_mismatch=0.0,
        p_calc=np.zeros(n),
        q_calc=np.zeros(n),
    )


def _two_controllable_grid(grid: Grid) -> Grid:
    buses = [
        bus.model_copy(update={"controllable": True, "p_max": 0.2, "cost_coeffs": [0.0, -10.0, 1.0]})
        if bus.id == 2
        else bus
        for bus in grid.buses
    ]
    return grid.model_copy(update={"buses": buses})


def _params_equal(a, b) -> bool:
    return all(
        np.array_equal(x.weight, y.weight) and np.array_equal(x.bias, y.bias)
        for x, y in zip(a.layers, b.layers)
    )


def _agent_copy(agent: DdpgAgent) -> list:
    return [agent.actor.copy(), agent.critic.copy(), agent.actor_target.copy(), agent.critic_target.copy()]


# environment


def test_zero_injection_observation(five_bus_grid: Grid) -> None:
    env = CurtailmentEnv(five_bus_grid)
    task = build_task(five_bus_grid, [0.0] * 5, boxes={4: (0.0, 0.2, -0.1, 0.1)})
    obs = env.reset_task(task)
    assert obs.shape == (3 * 2 + 4 * 1,)
    measured = obs[:6].reshape(2, 3)
    np.testing.assert_allclose(measured[:, 0], 0.0, atol=1e-9)
    np.testing.assert_allclose(measured[:, 1], 0.0, atol=1e-9)
    np.testing.assert_allclose(measured[:, 2], 1.0, atol=1e-9)
    np.testing.assert_array_equal(obs[6:], [0.0, 0.2, -0.1, 0.1])


def test_observation_matches_power_flow(five_bus_grid: Grid, quiet_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid)
    obs = env.reset_task(quiet_task)
    solution = solve_power_flow(
        five_bus_grid, InjectionSet.from_lists(quiet_task.p_ref, quiet_task.q_ref)
    )
    for row, bus in enumerate(five_bus_grid.observable_ids):
        assert obs[3 * row] == pytest.approx(solution.p_calc[bus])
        assert obs[3 * row + 1] == pytest.approx(solution.q_calc[bus])
        assert obs[3 * row + 2] == pytest.approx(solution.v_mag[bus])


@pytest.mark.parametrize(("a_p", "expected"), [(1.0, 0.2), (-1.0, 0.0), (0.0, 0.1), (5.0, 0.2)])
def test_action_maps_onto_box(five_bus_grid: Grid, a_p: float, expected: float) -> None:
    task = build_task(five_bus_grid, [0.0, 0.0, 0.0, 0.0, 0.2], boxes={4: (0.0, 0.2, -0.1, 0.1)})
    p_set, q_set = action_to_setpoints(task, np.array([a_p, 0.0]))
    assert p_set[0] == pytest.approx(expected)
    assert q_set[0] == pytest.approx(0.0)


def test_setpoints_round_trip_to_action(five_bus_grid: Grid) -> None:
    grid = _two_controllable_grid(five_bus_grid)
    task = build_task(
        grid, [0.0, 0.0, 0.1, 0.0, 0.3], boxes={2: (0.0, 0.1, -0.05, 0.05), 4: (0.05, 0.3, -0.1, 0.1)}
    )
    rng = np.random.default_rng(5)
    for _ in range(50):
        action = rng.uniform(-1.0, 1.0, size=4)
        p_set, q_set = action_to_setpoints(task, action)
        np.testing.assert_allclose(setpoints_to_action(task, p_set, q_set), action, atol=1e-12)


def test_degenerate_axis_maps_to_upper_end(five_bus_grid: Grid) -> None:
    task = build_task(five_bus_grid, [0.0, 0.0, 0.0, 0.0, 0.2], boxes={4: (0.2, 0.2, -0.1, 0.1)})
    action = setpoints_to_action(task, np.array([0.2]), np.array([-0.1]))
    assert action.tolist() == [1.0, -1.0]


def test_episode_length_and_done(five_bus_grid: Grid, quiet_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid, steps_per_task=5)
    env.reset_task(quiet_task)
    flags = [env.step(np.array([1.0, 0.0]))[2] for _ in range(5)]
    assert flags == [False, False, False, False, True]
    with pytest.raises(EnvironmentStateError):
        env.step(np.array([1.0, 0.0]))


def test_step_before_reset_is_rejected(five_bus_grid: Grid) -> None:
    with pytest.raises(EnvironmentStateError):
        CurtailmentEnv(five_bus_grid).step(np.zeros(2))


def test_setpoints_persist_between_steps(five_bus_grid: Grid, overload_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid)
    env.reset_task(overload_task)
    rng = np.random.default_rng(0)
    previous = overload_task.uncurtailed_setpoints()
    for _ in range(5):
        *_, info = env.step(rng.uniform(-1, 1, size=2))
        np.testing.assert_array_equal(info["pre_p_set"], previous[0])
        np.testing.assert_array_equal(info["pre_q_set"], previous[1])
        previous = (info["p_set"], info["q_set"])


def test_identity_action_on_quiet_task(five_bus_grid: Grid, quiet_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid)
    env.reset_task(quiet_task)
    _, reward, _, _, info = env.step(np.array([1.0, 0.0]))
    assert reward == pytest.approx(1.0)
    assert not info["violations"].has_violation


def test_full_curtailment_resolves_overload(five_bus_grid: Grid, overload_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid)
    env.reset_task(overload_task)
    assert env.solution.max_loading > 1.0
    _, reward, _, _, info = env.step(np.array([-1.0, 0.0]))
    assert info["violations"].max_loading < 1.0
    assert reward > 0.0


def test_observation_ignores_unobservable_buses(five_bus_grid: Grid, quiet_task: SupplyTask) -> None:
    env = CurtailmentEnv(five_bus_grid)
    env.reset_task(quiet_task)
    solution = env.solution
    hidden = 3
    assert hidden not in five_bus_grid.observable_ids

    v = solution.v_mag.copy()
    v[hidden] = 0.9
    p = solution.p_calc.copy()
    p[hidden] -= 0.05
    mutated = dataclasses.replace(solution, v_mag=v, p_calc=p)

    np.testing.assert_array_equal(env.observe(solution), env.observe(mutated))
    p_set, _ = quiet_task.uncurtailed_setpoints()
    before = compute_reward(five_bus_grid, quiet_task, solution, p_set)
    after = compute_reward(five_bus_grid, quiet_task, mutated, p_set)
    assert before.reward > 0.0 > after.reward


def test_gymnasium_protocol(five_bus_grid: Grid, quiet_task: SupplyTask, overload_task) -> None:
    env = CurtailmentEnv(five_bus_grid, tasks=[quiet_task, overload_task])
    obs, info = env.reset(seed=3)
    assert env.observation_space.contains(obs)
    assert env.action_space.shape == (2,)
    assert "violations" in info
    obs, reward, terminated, truncated, info = env.step(env.action_space.sample())
    assert env.observation_space.contains(obs)
    assert -1.0 <= reward <= 1.0
    assert not terminated and not truncated

    obs_explicit, _ = env.reset(options={"task": overload_task})
    np.testing.assert_array_equal(obs_explicit, CurtailmentEnv(five_bus_grid).reset_task(overload_task))
    with pytest.raises(EnvironmentStateError):
        CurtailmentEnv(five_bus_grid).reset()


def test_divergent_reset_is_rejected(two_bus_grid: Grid) -> None:
    env = CurtailmentEnv(two_bus_grid)
    task = build_task(two_bus_grid, [0.0, -10.0], boxes={1: (-10.0, -10.0, 0.0, 0.0)})
    with pytest.raises(EnvironmentStateError):
        env.reset_task(task)


def test_foreign_task_is_rejected(five_bus_grid: Grid, two_bus_grid: Grid) -> None:
    task = build_task(two_bus_grid, [0.0, -0.1])
    with pytest.raises(EnvironmentStateError):
        CurtailmentEnv(five_bus_grid).reset_task(task)


def test_grid_without_controllables(five_bus_grid: Grid) -> None:
    buses = [bus.model_copy(update={"controllable": False}) for bus in five_bus_grid.buses]
    with pytest.raises(EnvironmentStateError):
        CurtailmentEnv(five_bus_grid.model_copy(update={"buses": buses}))


# reward


def _reference_reward(
    grid: Grid,
    v: list[float],
    loading: list[float],
    p_ref: list[float],
    p_set: list[float],
    p_min: list[float],
    p_max: list[float],
    reward_lambda: float,
    converged: bool = True,
) -> float:
    if not converged:
        return -1.0
    l_v = 0.0
    for bus, v_i in zip(grid.buses, v, strict=True):
        clamped = min(max(v_i, bus.v_min), bus.v_max)
        l_v = max(l_v, abs(v_i - clamped))
    l_i = 0.0
    for value in loading:
        l_i = max(l_i, value - 1.0)
    k = len(p_set)
    c_p = sum(abs(r - s) for r, s in zip(p_ref, p_set, strict=True)) / k
    s = reward_lambda / k * sum(abs(hi - lo) for lo, hi in zip(p_min, p_max, strict=True))
    if l_v + l_i > 0.0:
        if s == 0.0:
            return -1.0 if l_v > 0.0 else -min(l_i, 1.0)
        return -min(l_v / s + l_i, 1.0)
    return 1.0 if s == 0.0 else 1.0 - c_p / s


def test_reward_voltage_arithmetic(five_bus_grid: Grid) -> None:
    task = build_task(five_bus_grid, [0.0, 0.0, 0.0, 0.0, 0.05], boxes={4: (0.0, 0.05, 0.0, 0.0)})
    solution = _solution([1.0, 1.0, 1.0, 1.0, 1.07], [0.5] * 4)
    terms = compute_reward(five_bus_grid, task, solution, np.array([0.05]), 2.0)
    assert terms.s == pytest.approx(0.1)
    assert terms.l_v == pytest.approx(0.02)
    assert terms.reward == pytest.approx(-0.2)


def test_reward_curtailment_arithmetic(five_bus_grid: Grid) -> None:
    grid = _two_controllable_grid(five_bus_grid)
    task = build_task(
        grid, [0.0, 0.0, 0.1, 0.0, 0.3], boxes={2: (0.0, 0.1, 0.0, 0.0), 4: (0.0, 0.3, 0.0, 0.0)}
    )
    solution = _solution([1.0] * 5, [0.5] * 4)
    terms = compute_reward(grid, task, solution, np.array([0.06, 0.24]), 2.0)
    assert terms.s == pytest.approx(0.4)
    assert terms.c_p == pytest.approx(0.05)
    assert terms.reward == pytest.approx(0.875)


def test_diverged_state_scores_minus_one(five_bus_grid: Grid, overload_task) -> None:
    solution = _solution([1.0] * 5, [0.0] * 4, converged=False)
    terms = compute_reward(five_bus_grid, overload_task, solution, np.array([0.3]))
    assert terms.reward == -1.0
    assert not terms.converged


def test_reward_needs_controllables(five_bus_grid: Grid) -> None:
    task = SupplyTask(task_id=0, timestamp=0, p_ref=[0.0] * 5, q_ref=[0.0] * 5)
    with pytest.raises(EnvironmentStateError):
        normaliser(task, 2.0)


def test_reward_bounds_and_separation(five_bus_grid: Grid) -> None:
    grid = _two_controllable_grid(five_bus_grid)
    rng = np.random.default_rng(11)
    reward_lambda = 2.0
    lowest_clean, highest_violating = np.inf, -np.inf
    for _ in range(10_000):
        widths = rng.uniform(0.01, 0.3, size=2)
        p_max = rng.uniform(0.0, 0.3, size=2)
        p_min = p_max - widths
        p_ref = [0.0, 0.0, p_max[0], 0.0, p_max[1]]
        task = build_task(
            grid,
            p_ref,
            boxes={2: (p_min[0], p_max[0], 0.0, 0.0), 4: (p_min[1], p_max[1], 0.0, 0.0)},
        )
        v = rng.uniform(0.93, 1.07, size=5)
        loading = rng.uniform(0.0, 1.3, size=4)
        p_set = rng.uniform(p_min, p_max)
        terms = compute_reward(grid, task, _solution(list(v), list(loading)), p_set, reward_lambda)
        expected = _reference_reward(
            grid, list(v), list(loading), list(p_max), list(p_set), list(p_min), list(p_max), reward_lambda
        )
        assert terms.reward == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert -1.0 <= terms.reward <= 1.0
        if terms.violating:
            assert terms.reward < 0.0
            highest_violating = max(highest_violating, terms.reward)
        else:
            assert terms.reward >= 1.0 - 1.0 / reward_lambda - 1e-12
            lowest_clean = min(lowest_clean, terms.reward)
    assert highest_violating < 0.0 < lowest_clean


def test_reward_without_flexibility(five_bus_grid: Grid) -> None:
    task = build_task(five_bus_grid, [0.0, 0.0, 0.0, 0.0, 0.1], boxes={4: (0.1, 0.1, 0.0, 0.0)})
    cases = [
        ([1.0] * 5, [0.5] * 4),
        ([1.0, 1.0, 1.0, 1.0, 1.07], [0.5] * 4),
        ([1.0] * 5, [0.5, 0.5, 0.5, 1.2]),
    ]
    for v, loading in cases:
        terms = compute_reward(five_bus_grid, task, _solution(v, loading), np.array([0.1]), 2.0)
        assert terms.s == 0.0
        assert terms.reward == pytest.approx(
            _reference_reward(five_bus_grid, v, loading, [0.1], [0.1], [0.1], [0.1], 2.0)
        )
    assert [
        compute_reward(five_bus_grid, task, _solution(v, loading), np.array([0.1]), 2.0).reward
        for v, loading in cases
    ] == pytest.approx([1.0, -1.0, -0.2])


def test_diverged_reward_matches_reference(five_bus_grid: Grid, overload_task) -> None:
    v, loading = [1.0, 1.0, 1.0, 1.0, 1.2], [0.0, 0.0, 0.0, 2.0]
    terms = compute_reward(
        five_bus_grid, overload_task, _solution(v, loading, converged=False), np.array([0.0]), 2.0
    )
    expected = _reference_reward(five_bus_grid, v, loading, [0.3], [0.0], [0.0], [0.3], 2.0, converged=False)
    assert terms.reward == expected == -1.0


# replay buffer


def _experience(value: float, obs_dim: int = 2, act_dim: int = 1) -> Experience:
    return Experience(
        observation=np.full(obs_dim, value),
        action=np.full(act_dim, value),
        reward=value,
        next_observation=np.full(obs_dim, value + 1),
        done=False,
    )


def test_ring_buffer_evicts_oldest() -> None:
    buffer = ReplayBuffer(2, 1, capacity=3)
    for value in range(4):
        buffer.push(_experience(float(value)))
    assert len(buffer) == 3
    assert buffer.insertions == 4
    assert sorted(buffer.rewards.tolist()) == [1.0, 2.0, 3.0]


def test_push_rejects_wrong_shapes() -> None:
    buffer = ReplayBuffer(2, 1, capacity=3)
    good = _experience(1.0)
    for bad in (
        dataclasses.replace(good, observation=np.float64(1.0)),
        dataclasses.replace(good, next_observation=np.zeros(3)),
        dataclasses.replace(good, action=np.zeros((1, 1))),
    ):
        with pytest.raises(ReplayBufferError):
            buffer.push(bad)
    assert len(buffer) == 0
    assert buffer.insertions == 0


def test_sampling_is_seeded() -> None:
    buffer = ReplayBuffer(2, 1, capacity=10)
    for value in range(10):
        buffer.push(_experience(float(value)))
    first = buffer.sample(5, np.random.default_rng(4))
    second = buffer.sample(5, np.random.default_rng(4))
    np.testing.assert_array_equal(first.rewards, second.rewards)
    np.testing.assert_array_equal(first.observations, second.observations)


def test_underfilled_buffer_refuses_to_sample() -> None:
    buffer = ReplayBuffer(2, 1, capacity=10)
    buffer.push(_experience(0.0))
    with pytest.raises(ReplayBufferError):
        buffer.sample(2, np.random.default_rng(0))


def test_sampling_is_uniform() -> None:
    buffer = ReplayBuffer(1, 1, capacity=100)
    for value in range(100):
        buffer.push(_experience(float(value), obs_dim=1))
    rng = np.random.default_rng(2024)
    counts = np.zeros(100)
    for _ in range(1_000):
        batch = buffer.sample(100, rng)
        counts += np.bincount(batch.rewards.astype(int), minlength=100)
    expected = 1_000.0
    sigma = np.sqrt(100_000 * 0.01 * 0.99)
    assert np.max(np.abs(counts - expected)) < 4 * sigma
    chi_square = float(np.sum((counts - expected) ** 2 / expected))
    assert chi_square < 148.0


# DDPG


def _batch(obs: np.ndarray, actions: np.ndarray, rewards: np.ndarray, dones=None) -> Batch:
    n = len(rewards)
    return Batch(
        observations=obs,
        actions=actions,
        rewards=rewards,
        next_observations=obs + 0.1,
        dones=np.zeros(n) if dones is None else dones,
        indices=np.arange(n),
    )


def test_zero_discount_regresses_to_reward() -> None:
    agent = DdpgAgent.create(3, 2, 16, np.random.default_rng(0), gamma=0.0)
    obs = np.tile([0.2, -0.4, 0.6], (8, 1))
    actions = np.tile([0.5, -0.5], (8, 1))
    batch = _batch(obs, actions, np.full(8, 1.0))
    np.testing.assert_array_equal(critic_targets(agent, batch), np.full(8, 1.0))
    losses = [ddpg_update(agent, batch).critic_loss for _ in range(20)]
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_actor_gradient_matches_finite_differences() -> None:
    rng = np.random.default_rng(5)
    agent = DdpgAgent.create(3, 2, 4, rng)
    agent.actor = init_mlp([3, 4, 4, 2], "tanh", rng, final_scale=0.5)
    agent.critic = init_mlp([5, 4, 4, 1], "identity", rng, final_scale=0.5)
    obs = rng.normal(size=(6, 3))
    grads, _ = actor_gradient(agent, obs)

    def loss() -> float:
        actions, _ = forward(agent.actor, obs)
        q, _ = forward(agent.critic, np.concatenate([obs, actions], axis=1))
        return -float(np.mean(q))

    h = 1e-6
    for layer, analytic_w, analytic_b in zip(agent.actor.layers, grads.weights, grads.biases):
        for array, analytic in ((layer.weight, analytic_w), (layer.bias, analytic_b)):
            for idx in np.ndindex(array.shape):
                saved = array[idx]
                array[idx] = saved + h
                plus = loss()
                array[idx] = saved - h
                minus = loss()
                array[idx] = saved
                numeric = (plus - minus) / (2 * h)
                scale = max(abs(numeric), abs(analytic[idx]), 1e-6)
                assert abs(numeric - analytic[idx]) / scale < 1e-3


def test_full_tau_copies_online_networks() -> None:
    rng = np.random.default_rng(1)
    agent = DdpgAgent.create(3, 2, 8, rng, tau=1.0)
    batch = _batch(rng.normal(size=(4, 3)), rng.uniform(-1, 1, size=(4, 2)), rng.normal(size=4))
    ddpg_update(agent, batch)
    assert _params_equal(agent.actor_target, agent.actor)
    assert _params_equal(agent.critic_target, agent.critic)


def test_non_finite_update_changes_nothing() -> None:
    rng = np.random.default_rng(2)
    agent = DdpgAgent.create(3, 2, 8, rng)
    before = _agent_copy(agent)
    batch = _batch(rng.normal(size=(4, 3)), rng.uniform(-1, 1, size=(4, 2)), np.array([0.0, np.nan, 0.0, 0.0]))
    with pytest.raises(NonFiniteLossError) as excinfo:
        ddpg_update(agent, batch)
    assert "critic_loss" in excinfo.value.diagnostics
    after = _agent_copy(agent)
    assert all(_params_equal(a, b) for a, b in zip(before, after))


def test_act_is_greedy_without_noise() -> None:
    agent = DdpgAgent.create(4, 2, 8, np.random.default_rng(3))
    obs = np.array([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_array_equal(agent.act(obs), agent.act(obs))
    noisy = agent.act(obs, noise_sigma=5.0, rng=np.random.default_rng(0))
    assert np.all(np.abs(noisy) <= 1.0)
    with pytest.raises(ValueError):
        agent.act(obs, noise_sigma=0.1)


def test_agent_checkpoint_round_trip(tmp_path) -> None:
    agent = DdpgAgent.create(4, 2, 8, np.random.default_rng(4), gamma=0.9, tau=0.01)
    path = save_agent(tmp_path / "agent.npz", agent, {"grid_hash": "x"})
    loaded, metadata = load_agent(path)
    assert metadata["grid_hash"] == "x"
    assert loaded.gamma == 0.9 and loaded.tau == 0.01
    obs = np.ones(4)
    np.testing.assert_array_equal(loaded.act(obs), agent.act(obs))


def test_episode_runner_reports_resolution(five_bus_grid: Grid, overload_task) -> None:
    env = CurtailmentEnv(five_bus_grid)
    agent = DdpgAgent.create(env.observation_dim, env.action_dim, 8, np.random.default_rng(0))
    result = run_episode(env, agent, overload_task)
    assert len(result.rewards) == 5
    assert result.initial_report.overload
    assert result.inference_time >= 0.0


# training


def test_train_config_accepts_lambda_key() -> None:
    config = TrainConfig.model_validate({"lambda": 3.0, "total_steps": 10})
    assert config.reward_lambda == 3.0
    assert config.model_dump(by_alias=True)["lambda"] == 3.0
    with pytest.raises(ValidationError):
        TrainConfig.model_validate({"lambda": 1.0})
    assert config.noise_sigma(0) == pytest.approx(0.1)
    assert config.noise_sigma(9) == pytest.approx(0.01)


def test_zero_steps_returns_initial_agent(five_bus_grid: Grid) -> None:
    config = TrainConfig(total_steps=0, hidden_width=8, seed=9)
    dataset = Dataset(grid_hash=grid_hash(five_bus_grid))
    result = train(five_bus_grid, dataset, config)
    env = CurtailmentEnv(five_bus_grid)
    fresh = DdpgAgent.create(env.observation_dim, env.action_dim, 8, np.random.default_rng(9))
    assert result.steps == 0 and result.metrics == []
    assert _params_equal(result.agent.actor, fresh.actor)
    assert _params_equal(result.agent.critic, fresh.critic)


def test_training_is_reproducible(five_bus_grid: Grid, tmp_path) -> None:
    dataset = label_violations(
        five_bus_grid,
        generate_profiles(five_bus_grid, ProfileConfig(n_steps=24, pv_peak=0.3), seed=0),
    )
    config = TrainConfig(
        total_steps=60,
        warmup=20,
        batch_size=8,
        hidden_width=8,
        log_every=20,
        checkpoint_every=30,
        validation_tasks=4,
        seed=1,
    )
    first = train(five_bus_grid, dataset, config, tmp_path / "a")
    second = train(five_bus_grid, dataset, config, tmp_path / "b")

    assert first.steps == 60
    assert [row.step for row in first.metrics] == [20, 40, 60]
    assert len(first.checkpoints) == 2
    for name in ("metrics.csv", "agent.npz", "checkpoints/step_30.npz"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "metrics.csv").read_text().splitlines()[0]
    assert header == "step,mean_reward,resolution_rate,critic_loss,actor_loss"
    timing = json.loads((tmp_path / "a" / "timing.json").read_text())
    assert timing["steps"] == 60

    _, metadata = load_agent(first.agent_path)
    assert metadata["grid_hash"] == grid_hash(five_bus_grid)
    assert metadata["config"]["lambda"] == 2.0
