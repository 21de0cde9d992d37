"""Synthetic outdoor scenes and rotation-labeled datasets.

Scenes are deliberately orientation-informative: a bright sky above a
horizontal horizon, darker textured ground below, a few vertical
structures rising from the ground line, and an optional sun disc. Those
are exactly the cues an upright-image detector can learn, which makes the
training problem solvable without any external imagery.

A dataset is a list of `LabeledSample`s: image + binary "rotated" label +
the ground-truth absolute angle (kept for evaluation only). On disk a
dataset is a `manifest.csv` (filename,label,true_angle_deg) next to an
image directory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .angles import wrap_angle
from .codecs import read_image, write_image
from .image import check_square_image, rotate_circular

__all__ = [
    "SceneSpec",
    "LabeledSample",
    "gen_scene",
    "build_rotation_dataset",
    "build_eval_set",
    "save_dataset",
    "load_dataset",
    "load_image_dir",
    "make_retrieval_groups",
]

MIN_SIDE = 32


@dataclass(frozen=True)
class SceneSpec:
    """Parameters of one synthetic scene.

    The layout (horizon, palette, object placement) is drawn
    deterministically from `seed`; identical seed and side give a
    bit-identical scene. `object_count` and `sun` may be pinned, otherwise
    they are drawn too. A nonzero `jitter_seed` perturbs the layout
    slightly, producing a recognizable variant of the same scene (used to
    build retrieval relevance groups).
    """

    seed: int
    side: int = 64
    ground_texture_amplitude: float = 0.06
    object_count: int | None = None
    sun: bool | None = None
    jitter_seed: int = 0


@dataclass
class LabeledSample:
    """One training/eval unit: image, binary rotatedness label, true angle."""

    image: np.ndarray
    label: int
    true_angle: float


def gen_scene(spec: SceneSpec) -> np.ndarray:
    """Render a square RGB scene from its spec."""
    if spec.side < MIN_SIDE:
        raise ValueError(f"scene side must be >= {MIN_SIDE}, got {spec.side}")
    side = spec.side
    rng = np.random.default_rng(spec.seed)

    # Layout draws happen in a fixed order so seeds stay comparable.
    horizon_frac = rng.uniform(0.45, 0.65)
    sky_top = np.array([rng.uniform(0.40, 0.60), rng.uniform(0.55, 0.75), rng.uniform(0.80, 1.00)])
    sky_horizon = np.array([rng.uniform(0.70, 0.88), rng.uniform(0.75, 0.92), rng.uniform(0.88, 1.00)])
    ground_base = np.array([rng.uniform(0.12, 0.30), rng.uniform(0.18, 0.38), rng.uniform(0.08, 0.22)])
    n_objects = int(rng.integers(0, 4)) if spec.object_count is None else int(spec.object_count)
    has_sun = bool(rng.random() < 0.5) if spec.sun is None else bool(spec.sun)

    objects = []
    for _ in range(n_objects):
        objects.append(
            {
                "x": rng.uniform(0.08, 0.92),
                "width": rng.uniform(0.04, 0.11),
                "height": rng.uniform(0.25, 0.80),
                "color": np.array(
                    [rng.uniform(0.08, 0.45), rng.uniform(0.08, 0.45), rng.uniform(0.08, 0.45)]
                ),
            }
        )
    sun_x = rng.uniform(0.12, 0.88)
    sun_y = rng.uniform(0.10, 0.60)
    sun_r = rng.uniform(0.05, 0.09)
    texture = rng.uniform(-1.0, 1.0, size=(side, side))

    if spec.jitter_seed:
        jrng = np.random.default_rng([spec.seed, spec.jitter_seed])
        horizon_frac += jrng.uniform(-0.02, 0.02)
        for obj in objects:
            obj["x"] += jrng.uniform(-0.04, 0.04)
            obj["width"] += jrng.uniform(-0.015, 0.015)
            obj["height"] += jrng.uniform(-0.06, 0.06)
        sun_x += jrng.uniform(-0.03, 0.03)
        sun_y += jrng.uniform(-0.03, 0.03)
        texture = texture + 0.3 * jrng.uniform(-1.0, 1.0, size=(side, side))

    horizon_row = int(round(np.clip(horizon_frac, 0.40, 0.70) * side))
    img = np.zeros((side, side, 3))

    # Sky: vertical gradient from sky_top down to sky_horizon.
    t = (np.arange(horizon_row) / max(horizon_row - 1, 1))[:, None]
    img[:horizon_row] = ((1 - t) * sky_top[None, :] + t * sky_horizon[None, :])[:, None, :]

    # Ground: dark base plus texture noise.
    ground = ground_base[None, None, :] + (
        spec.ground_texture_amplitude * texture[horizon_row:, :, None]
    )
    img[horizon_row:] = ground

    if has_sun:
        cx, cy = sun_x * side, sun_y * horizon_row
        radius = max(sun_r * side, 2.0)
        xs, ys = np.meshgrid(np.arange(side), np.arange(side))
        disc = ((xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2) & (ys < horizon_row)
        img[disc] = np.array([0.98, 0.95, 0.75])

    for obj in objects:
        half_w = max(int(round(obj["width"] * side / 2)), 1)
        cx = int(round(np.clip(obj["x"], 0.0, 1.0) * (side - 1)))
        top = horizon_row - int(round(np.clip(obj["height"], 0.1, 0.95) * horizon_row))
        x0, x1 = max(cx - half_w, 0), min(cx + half_w, side)
        img[max(top, 0) : horizon_row, x0:x1] = obj["color"]

    return np.clip(img, 0.0, 1.0)


def build_rotation_dataset(
    images,
    rotations_per_image: int = 5,
    tolerant: bool = False,
    tol: float = 10.0,
    seed: int = 0,
) -> list[LabeledSample]:
    """Emit each image at its canonical angle plus random rotations.

    Per image: the original (true angle 0) followed by
    `rotations_per_image` copies rotated by angles drawn uniformly from
    [-180, 180). Labels follow the strict rule (label 0 only at exactly
    0 degrees) or the tolerant rule (label 0 when |angle| <= tol). The
    drawn angles do not depend on the labeling mode, so strict and
    tolerant datasets from one seed differ only in labels.
    """
    images = list(images)
    if not images:
        raise ValueError("cannot build a dataset from an empty image list")
    rng = np.random.default_rng(seed)
    samples = []
    for img in images:
        img = check_square_image(img)
        samples.append(LabeledSample(img, _label_for(0.0, tolerant, tol), 0.0))
        for _ in range(rotations_per_image):
            angle = float(rng.uniform(-180.0, 180.0))
            samples.append(
                LabeledSample(rotate_circular(img, angle), _label_for(angle, tolerant, tol), angle)
            )
    return samples


def _label_for(angle: float, tolerant: bool, tol: float) -> int:
    if tolerant:
        return 0 if abs(angle) <= tol else 1
    return 0 if angle == 0.0 else 1


def build_eval_set(images, angles) -> list[LabeledSample]:
    """Cartesian product of images x angles, rotated circularly.

    Labels follow the strict rule; `true_angle` records the rotation
    applied, which is what evaluation consumes.
    """
    images = list(images)
    angles = [wrap_angle(a) for a in angles]
    samples = []
    for img in images:
        img = check_square_image(img)
        for angle in angles:
            samples.append(
                LabeledSample(rotate_circular(img, angle), _label_for(angle, False, 0.0), angle)
            )
    return samples


def save_dataset(samples, out_dir, prefix: str = "sample") -> Path:
    """Write PNG images plus a manifest.csv; returns the manifest path."""
    out_dir = Path(out_dir)
    img_dir = out_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)
    manifest = out_dir / "manifest.csv"
    with manifest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["filename", "label", "true_angle_deg"])
        for i, sample in enumerate(samples):
            name = f"images/{prefix}_{i:05d}.png"
            write_image(out_dir / name, sample.image)
            writer.writerow([name, sample.label, repr(float(sample.true_angle))])
    return manifest


def load_dataset(data_dir) -> list[LabeledSample]:
    """Load a dataset written by `save_dataset` (or any matching manifest)."""
    data_dir = Path(data_dir)
    manifest = data_dir / "manifest.csv"
    if not manifest.exists():
        raise FileNotFoundError(f"no manifest.csv under {data_dir}")
    samples = []
    with manifest.open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            img = read_image(data_dir / row["filename"])
            samples.append(
                LabeledSample(img, int(row["label"]), float(row["true_angle_deg"]))
            )
    if not samples:
        raise ValueError(f"manifest {manifest} lists no samples")
    return samples


def load_image_dir(data_dir) -> list[tuple[str, np.ndarray]]:
    """Load all PNG/PPM/PGM images in a directory, sorted by filename."""
    data_dir = Path(data_dir)
    paths = sorted(
        p for p in data_dir.iterdir() if p.suffix.lower() in (".png", ".ppm", ".pgm")
    )
    if not paths:
        raise FileNotFoundError(f"no images under {data_dir}")
    return [(p.name, read_image(p)) for p in paths]


def make_retrieval_groups(
    n_groups: int,
    per_group: int,
    side: int = 64,
    seed: int = 0,
    queries_per_group: int = 2,
):
    """Build grouped scene variants for retrieval experiments.

    Each group renders one base scene and `per_group - 1` jittered
    variants of it. Returns (names, images, groups) where `groups` maps a
    query name to the set of names relevant to it (its group, query
    excluded). The first `queries_per_group` members of each group act as
    queries.
    """
    if n_groups < 1 or per_group < 2:
        raise ValueError("need at least one group with two members")
    names, images, groups = [], [], {}
    for g in range(n_groups):
        base = SceneSpec(seed=seed + 1000 * g, side=side, object_count=2 + (g % 2), sun=g % 2 == 0)
        member_names = []
        for v in range(per_group):
            spec = base if v == 0 else replace(base, jitter_seed=v)
            name = f"group{g:02d}_var{v:02d}.png"
            member_names.append(name)
            names.append(name)
            images.append(gen_scene(spec))
        for q in member_names[: min(queries_per_group, per_group)]:
            groups[q] = set(member_names) - {q}
    return names, images, groups
