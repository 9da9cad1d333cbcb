"""Regenerate the JPEG test corpus under crates/core/tests/.

Covers are scikit-image sample photographs, converted to 8-bit grayscale where
needed and saved at quality 95 with Pillow (libjpeg-turbo). Covers must come
from uncompressed sources; the fixtures
directory holds smaller files that exercise chroma subsampling, restart
markers, odd dimensions, metadata segments and one progressive file.
"""
from pathlib import Path

import numpy as np
import skimage.data as d
from PIL import Image

ROOT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests"


def gray(a):
    if a.ndim == 3:
        return np.asarray(Image.fromarray(a[..., :3]).convert("L"))
    return a


def main():
    corpus = {
        "camera": d.camera(),
        "moon": d.moon(),
        "brick": d.brick(),
        "gravel": d.gravel(),
        "astronaut": gray(d.astronaut()),
        "ihc": gray(d.immunohistochemistry()),
        "hubble": gray(d.hubble_deep_field()[180:692, 244:756]),
    }
    (ROOT / "corpus").mkdir(parents=True, exist_ok=True)
    (ROOT / "fixtures").mkdir(parents=True, exist_ok=True)
    for name, pixels in corpus.items():
        assert pixels.shape == (512, 512), name
        Image.fromarray(pixels).save(ROOT / "corpus" / f"{name}.jpg", quality=95)

    fx = ROOT / "fixtures"
    # The grass texture was JPEG-compressed before it was published: its raw
    # DCT coefficients already sit on a coarse quantization lattice. It is kept
    # for codec tests but is not a single-compression cover.
    Image.fromarray(d.grass()).save(fx / "grass_double_compressed.jpg", quality=95)
    Image.fromarray(d.astronaut()).resize((256, 256)).save(fx / "color420.jpg", quality=95)
    Image.fromarray(d.chelsea()).save(fx / "color444_odd.jpg", quality=90, subsampling=0)
    Image.fromarray(d.coins()).save(fx / "gray_odd_restart.jpg", quality=85, restart_marker_blocks=7)
    Image.fromarray(d.coffee()).resize((200, 133)).save(
        fx / "color422_restart.jpg", quality=92, subsampling=1, restart_marker_rows=1
    )
    Image.fromarray(d.camera()[:64, :64]).save(fx / "progressive.jpg", quality=90, progressive=True)
    Image.fromarray(d.camera()[100:180, 200:260]).save(
        fx / "small_meta.jpg",
        quality=95,
        comment=b"hello stego",
        exif=b"Exif\x00\x00MM\x00\x2a\x00\x00\x00\x08\x00\x00",
    )


if __name__ == "__main__":
    main()
