"""Experiment configuration: loading, schema validation, and assembly of
the classification pipeline a config describes."""

from __future__ import annotations

import json
import os
from importlib import resources

import jsonschema

from .datasets import (
    DatasetSchema,
    Pipeline,
    build_pipeline,
    complete_similarity_graph,
    default_similarity_alpha,
    epsilon_graph,
    gen_slashed_o,
    gen_two_moon,
    load_cloud_csv,
    load_csv,
    minmax_scale,
    PointCloud,
)
from .errors import ConfigError, IoError, ParseError


def _schema() -> dict:
    with resources.files("gbflearn").joinpath("schemas/experiment.schema.json").open() as fh:
        return json.load(fh)


def resolve_config_path(path: str) -> str:
    """Resolve a config path, falling back to the bundled table configs."""
    if os.path.exists(path):
        return path
    bundled = resources.files("gbflearn").joinpath(path)
    if bundled.is_file():
        return str(bundled)
    raise IoError(f"config file not found: {path}")


def load_config(path: str) -> dict:
    path = resolve_config_path(path)
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    validate_config(obj, base_dir=os.path.dirname(os.path.abspath(path)))
    return obj


def validate_config(obj: dict, base_dir: str = ".") -> None:
    """Schema-validate a config and check referenced files exist.

    Relative file references resolve against the config's directory first
    and fall back to the working directory (bundled configs reference
    repository data this way).
    """
    public = {k: v for k, v in obj.items() if not k.startswith("_")}
    try:
        jsonschema.validate(public, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    obj["_base_dir"] = base_dir
    for ref in _referenced_files(obj):
        if not os.path.exists(_resolve(obj, ref)):
            raise IoError(f"config references missing file: {ref}")


def _referenced_files(obj: dict):
    dataset = obj.get("dataset", {})
    for key in ("csv", "points"):
        if key in dataset:
            yield dataset[key]
    for feature in obj.get("features", ()):
        source = feature.get("source", "")
        if source.startswith("file:"):
            yield source[5:]


def _resolve(obj: dict, path: str) -> str:
    if os.path.isabs(path):
        return path
    base = obj.get("_base_dir", ".")
    beside_config = os.path.join(base, path)
    return beside_config if os.path.exists(beside_config) else path


def config_cloud(obj: dict):
    """Point cloud plus reference shapes (when the generator provides them)."""
    dataset = obj["dataset"]
    shapes = None
    if "generator" in dataset:
        name = dataset["generator"]
        seed = int(dataset.get("seed", 0))
        noise = float(dataset.get("noise", 0.0))
        count = int(dataset.get("n_per_part", 300))
        if name == "two-moon":
            cloud = gen_two_moon(seed, count, noise)
        elif name == "slashed-o":
            cloud, shapes = gen_slashed_o(seed, count, noise)
        else:
            raise ConfigError(f"unknown generator {name!r}")
    elif "csv" in dataset:
        schema_obj = dataset["schema"]
        schema = DatasetSchema(
            label_column=int(schema_obj["label_column"]),
            positive_label=str(schema_obj["positive_label"]),
            negative_label=str(schema_obj["negative_label"]),
            feature_columns=tuple(int(c) for c in schema_obj["feature_columns"]),
            missing_marker=str(schema_obj.get("missing_marker", "?")),
            drop_missing=bool(schema_obj.get("drop_missing", True)),
            name_column=schema_obj.get("name_column"),
        )
        cloud = load_csv(_resolve(obj, dataset["csv"]), schema)
        if dataset.get("scale") == "minmax":
            cloud = PointCloud(
                points=minmax_scale(cloud.points),
                truth=cloud.truth,
                names=cloud.names,
            )
    elif "points" in dataset:
        cloud = load_cloud_csv(_resolve(obj, dataset["points"]))
        sidecar = _resolve(obj, dataset["points"]) + ".shapes.json"
        if os.path.exists(sidecar):
            shapes = load_shapes(sidecar)
    else:
        raise ConfigError("dataset must give a generator, a csv, or a points file")
    return cloud, shapes


def config_graph(obj: dict, cloud):
    recipe = obj["graph"]
    kind = recipe.get("kind", "normalized")
    if recipe["recipe"] == "epsilon":
        return epsilon_graph(cloud, float(recipe["radius"]), kind)
    if recipe["recipe"] == "complete-similarity":
        alpha = recipe.get("alpha", "auto")
        if alpha == "auto":
            alpha = default_similarity_alpha(cloud.points)
        return complete_similarity_graph(cloud, float(alpha), kind)
    raise ConfigError(f"unknown graph recipe {recipe['recipe']!r}")


def config_pipeline(obj: dict) -> Pipeline:
    cloud, shapes = config_cloud(obj)
    graph = config_graph(obj, cloud)
    features = []
    for feature in obj.get("features", ()):
        feature = dict(feature)
        source = feature.get("source", "")
        if source.startswith("file:"):
            feature["source"] = "file:" + _resolve(obj, source[5:])
        features.append(feature)
    return build_pipeline(
        name=obj.get("name", ""),
        cloud=cloud,
        graph=graph,
        gbf_spec=obj["gbf"],
        feature_specs=features,
        gamma=float(obj["gamma"]),
        shapes=shapes,
    )


# -- reference-shape sidecar -----------------------------------------------------

def save_shapes(shapes: dict, path) -> None:
    from .datasets import ReferenceCircle, ReferenceLine

    out = {}
    for key, shape in shapes.items():
        if isinstance(shape, ReferenceCircle):
            out[key] = {"circle": {"center": list(shape.center), "radius": shape.radius}}
        elif isinstance(shape, ReferenceLine):
            out[key] = {"line": {"p0": list(shape.p0), "p1": list(shape.p1)}}
    with open(path, "w") as fh:
        json.dump(out, fh)
        fh.write("\n")


def load_shapes(path) -> dict:
    from .datasets import ReferenceCircle, ReferenceLine

    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    shapes = {}
    for key, spec in raw.items():
        if "circle" in spec:
            c = spec["circle"]
            shapes[key] = ReferenceCircle(center=tuple(c["center"]), radius=c["radius"])
        elif "line" in spec:
            l = spec["line"]
            shapes[key] = ReferenceLine(p0=tuple(l["p0"]), p1=tuple(l["p1"]))
    return shapes
