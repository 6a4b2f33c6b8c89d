# bayes_fuzzy_ocr/bench/registry.py
"""
Initializer and cut-method registrations for the bench harness.

This module is IMPORT-SAFE:
- no registry mutations
- no heavy imports

Call `register_all()` explicitly before looking anything up.
"""

from __future__ import annotations

from functools import partial
from threading import RLock
from typing import Any, Callable, Dict, List

from bayes_fuzzy_ocr.exceptions import ConfigError

_LOCK = RLock()
_REGISTERED = False


class Registry:
    """Name -> callable map with an explicit override switch."""

    def __init__(self, kind: str):
        self.kind = kind
        self._entries: Dict[str, Callable[..., Any]] = {}

    def register(self, key: str, fn: Callable[..., Any], *, override: bool = False) -> None:
        if key in self._entries and not override:
            raise ValueError(f"{self.kind} {key!r} is already registered")
        self._entries[key] = fn

    def get(self, key: str) -> Callable[..., Any]:
        try:
            return self._entries[key]
        except KeyError:
            raise ConfigError(
                f"unknown {self.kind} {key!r}; known: {', '.join(self.all_names())}"
            ) from None

    def all_names(self) -> List[str]:
        return list(self._entries)

    def __contains__(self, key: object) -> bool:
        return key in self._entries


# initializer(layer_sizes, data, init_cfg, activation, use_bias) -> Mlp
INITIALIZERS = Registry("initializer")
# cut_method(img, config=FuzzyConfig) -> column index
CUT_METHODS = Registry("cut method")


def register_all(*, override: bool = False) -> None:
    """
    Register everything the harness sweeps over:
      1) weight initializers (random, bayes)
      2) cut methods (fuzzy, g_only, h_only)

    Idempotent per process.
    """
    global _REGISTERED
    with _LOCK:
        if _REGISTERED and not override:
            return
        register_initializers(override=override)
        register_cut_methods(override=override)
        _REGISTERED = True


def _random_init(layer_sizes, data, cfg, activation, use_bias):
    from bayes_fuzzy_ocr.ann.mlp import random_initialize

    return random_initialize(layer_sizes, cfg.h, cfg.seed, activation, use_bias)


def _bayes_init(layer_sizes, data, cfg, activation, use_bias):
    from bayes_fuzzy_ocr.ann.bayes_init import bayes_initialize

    return bayes_initialize(layer_sizes, data, cfg, activation, use_bias)


def register_initializers(*, override: bool = False) -> None:
    _safe_register(INITIALIZERS, "random", _random_init, override=override)
    _safe_register(INITIALIZERS, "bayes", _bayes_init, override=override)


def register_cut_methods(*, override: bool = False) -> None:
    """Blank-gap dominance applies to every method, so all three go through locate_cut."""
    from bayes_fuzzy_ocr.segmentation.segment import CUT_METHODS as METHOD_NAMES
    from bayes_fuzzy_ocr.segmentation.segment import locate_cut

    for name in METHOD_NAMES:
        _safe_register(CUT_METHODS, name, partial(locate_cut, method=name), override=override)


def _safe_register(registry: Registry, key: str, fn: Callable[..., Any], *, override: bool) -> None:
    """
    Registry helper that:
    - leaves an existing entry alone unless override is requested
    - never runs at import time (only called from register_* functions)
    """
    if key in registry and not override:
        return
    registry.register(key, fn, override=True)
