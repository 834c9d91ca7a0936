"""Tiny helpers for writing image files the pipeline tests consume."""

import numpy as np
from PIL import Image


def write_ppm(path, pixels_hw3: np.ndarray):
    """Binary P6 with the given H x W x 3 uint8 pixels."""
    h, w, _ = pixels_hw3.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    path.write_bytes(header + pixels_hw3.astype(np.uint8).tobytes())


def write_png(path, pixels_hw3: np.ndarray):
    Image.fromarray(pixels_hw3.astype(np.uint8), mode="RGB").save(path)


def write_gray_png(path, pixels_hw: np.ndarray):
    Image.fromarray(pixels_hw.astype(np.uint8), mode="L").save(path)


def random_pixels(seed: int, h: int, w: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.int64).astype(np.uint8)
