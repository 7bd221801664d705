"""Packaged example models.

Two tiny two-world models used throughout the test suite and handy for
CLI experiments:

* ``m1``: one agent aware only of ``p``; the agent cannot tell the worlds
  apart, and they differ on ``p`` but agree on ``q``.
* ``m2``: one agent aware only of ``p``; the agent can tell the worlds
  apart, and they agree on ``p`` but differ on ``q``. Evaluating
  ``X[a] I[a] X[a] q`` at ``w1`` on this model is the stock witness that
  the truth-preservation property needs its vocabulary hypothesis: the
  composed-operator reading is false while the transformed reading is
  true.
"""

from __future__ import annotations

import json
from importlib import resources

from .model import EpistemicModel, model_from_dict


def _load(name: str) -> EpistemicModel:
    text = resources.files("awb.data").joinpath(name).read_text(encoding="utf-8")
    return model_from_dict(json.loads(text))


def m1() -> EpistemicModel:
    return _load("m1.json")


def m2() -> EpistemicModel:
    return _load("m2.json")
