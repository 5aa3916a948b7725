"""Regenerates the bundled test fixtures under fixtures/.

natural64.png   64x64 RGB center square of the public-domain coffee photo
                shipped with scikit-image (area-downsampled).
gradient64.png  64x64 RGB synthetic gradient.
small16.png     16x16 RGB downsample of natural64.png.
chord.wav       0.5 s, 8 kHz, mono PCM16 A-major triad.
"""
import pathlib
import wave

import numpy as np
from PIL import Image
from skimage import data

out = pathlib.Path(__file__).resolve().parents[2] / "fixtures"
out.mkdir(exist_ok=True)

coffee = Image.fromarray(data.coffee())
w, h = coffee.size
s = min(w, h)
box = ((w - s) // 2, (h - s) // 2, (w - s) // 2 + s, (h - s) // 2 + s)
natural = coffee.crop(box).resize((64, 64), Image.BOX)
natural.save(out / "natural64.png")
natural.resize((16, 16), Image.BOX).save(out / "small16.png")

y, x = np.mgrid[0:64, 0:64]
grad = np.stack([x * 4, y * 4, (x + y) * 2], axis=-1).clip(0, 255).astype(np.uint8)
Image.fromarray(grad).save(out / "gradient64.png")

rate = 8000
t = np.arange(rate // 2) / rate
chord = sum(np.sin(2 * np.pi * f * t) for f in (220.0, 277.18, 329.63)) / 3.0
pcm = np.round(chord * 0.8 * 32767).astype("<i2")
with wave.open(str(out / "chord.wav"), "wb") as w:
    w.setnchannels(1)
    w.setsampwidth(2)
    w.setframerate(rate)
    w.writeframes(pcm.tobytes())
