"""Python bindings for the covsim coverage path planning simulator.

Structured values (configs, scenarios, reports, traces) are plain dicts;
observations are dicts of numpy arrays.
"""

import json

from . import _core
from ._core import (
    ContractViolation,
    GenerationFailure,
    ParseError,
    SamplingExhausted,
    ValidationError,
)

__all__ = [
    "CoverageEnv",
    "ProtocolSession",
    "ContractViolation",
    "GenerationFailure",
    "ParseError",
    "SamplingExhausted",
    "ValidationError",
    "power",
    "fov_side",
    "kappa_max",
    "action_to_curve",
    "check",
    "generate",
    "next_difficulty",
    "record",
    "run_rollout",
    "run_eval",
    "render_svg",
]


def _cfg(config):
    return None if config is None else json.dumps(config)


def power(phi, config=None):
    return _core.power(phi, _cfg(config))


def fov_side(config=None):
    return _core.fov_side(_cfg(config))


def kappa_max(config=None):
    return _core.kappa_max(_cfg(config))


def action_to_curve(position, heading, curvature, action, lambda_=240.0):
    return _core.action_to_curve(position, heading, curvature, action, lambda_)


def check(scenario, position, heading, curvature, action, config=None):
    return _core.check(json.dumps(scenario), position, heading, curvature, action, _cfg(config))


def generate(seed, difficulty, config=None):
    return json.loads(_core.generate(seed, difficulty, _cfg(config)))


def next_difficulty(progress, config=None):
    return _core.next_difficulty(progress, _cfg(config))


def record(progress, success, difficulty, config=None):
    return _core.record(progress, success, difficulty, _cfg(config))


def run_rollout(planner, seed=0, difficulty=0.1, scenario=None, config=None, with_trace=False):
    """Returns (report, trace); trace is None unless with_trace."""
    map_text = None if scenario is None else json.dumps(scenario)
    report, trace = _core.run_rollout(planner, seed, difficulty, map_text, _cfg(config), with_trace)
    return json.loads(report), (json.loads(trace) if trace is not None else None)


def run_eval(planner, episodes, difficulty, first_seed=0, config=None, jobs=1):
    return json.loads(_core.run_eval(planner, first_seed, episodes, difficulty, _cfg(config), jobs))


def render_svg(trace):
    return _core.render_svg(json.dumps(trace))


class CoverageEnv:
    """Gym-style wrapper: reset() -> obs, step(a) -> (obs, r, terminated, truncated, info)."""

    def __init__(self, config=None):
        self._env = _core.Env(_cfg(config))

    def reset(self, seed=0, difficulty=0.1, scenario=None):
        if scenario is not None:
            return self._env.reset_map(json.dumps(scenario))
        return self._env.reset(seed, difficulty)

    def step(self, action):
        return self._env.step([float(x) for x in action])

    def step_json(self, action):
        return json.loads(self._env.step_json([float(x) for x in action]))

    def sample_feasible_action(self, seed, max_tries=1000):
        return self._env.sample_feasible_action(seed, max_tries)

    def greedy_action(self, seed):
        return self._env.greedy_action(seed)

    @property
    def pose(self):
        return self._env.pose

    @property
    def coverage_remaining(self):
        return self._env.coverage_remaining

    @property
    def done(self):
        return self._env.done

    @property
    def step_index(self):
        return self._env.step_index

    @property
    def scenario(self):
        return json.loads(self._env.scenario)


class ProtocolSession:
    """In-process version of the stdio protocol; handle() takes and returns dicts."""

    def __init__(self, config=None):
        self._s = _core.ProtocolSession(_cfg(config))

    def handle(self, request):
        line = request if isinstance(request, str) else json.dumps(request)
        return json.loads(self._s.handle(line))

    @property
    def finished(self):
        return self._s.finished
