"""Name-or-path resolution for containers and scenes.

CLI arguments accept either a bundled asset name (``cyl50``, ``empty``)
or a filesystem path to a JSON file; names are checked first so a stray
file of the same name cannot shadow a bundled asset.
"""

from __future__ import annotations

import os

from sfrrt.container import ContainerSpec, load_container
from sfrrt.errors import InvalidConfig
from sfrrt.scene import Scene, load_scene
from sfrrt.scenes import GATE_CONTAINER, SCENE_BUILDERS

_ASSET_DIR = os.path.join(os.path.dirname(__file__), "assets")

CONTAINER_ASSETS = ("cyl30", "cyl50", "cyl80", "gate_cup")


def asset_path(filename: str) -> str:
    return os.path.join(_ASSET_DIR, filename)


def resolve_container(name_or_path: str) -> ContainerSpec:
    """A bundled container by name, or any JSON container file by path."""
    if name_or_path in CONTAINER_ASSETS:
        return load_container(asset_path(f"{name_or_path}.json"))
    if os.path.exists(name_or_path):
        return load_container(name_or_path)
    raise InvalidConfig(
        f"unknown container {name_or_path!r}: not one of {', '.join(CONTAINER_ASSETS)} "
        "and no such file"
    )


def resolve_scene(name_or_path: str) -> Scene:
    """A benchmark scene by name, or any JSON scene file by path."""
    if name_or_path in SCENE_BUILDERS:
        return SCENE_BUILDERS[name_or_path]()
    if os.path.exists(name_or_path):
        return load_scene(name_or_path)
    raise InvalidConfig(
        f"unknown scene {name_or_path!r}: not one of {', '.join(SCENE_BUILDERS)} "
        "and no such file"
    )


__all__ = [
    "CONTAINER_ASSETS",
    "GATE_CONTAINER",
    "asset_path",
    "resolve_container",
    "resolve_scene",
]
