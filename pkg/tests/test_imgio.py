import numpy as np
import pytest
from PIL import Image

from palimpsest import (
    GrayImage,
    HoleMask,
    MalformedImage,
    RasterImage,
    UnsupportedDepth,
    load_image,
    load_mask,
    save_image,
    save_mask,
)

from reference import image_from_rows


def _random_image(seed, width=7, height=5):
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


# --- PPM decode --------------------------------------------------------------


def test_decode_minimal_p6(tmp_path):
    p = tmp_path / "one.ppm"
    p.write_bytes(b"P6\n1 1\n255\n" + bytes([10, 20, 30]))
    img = load_image(p)
    assert img.width == 1 and img.height == 1
    assert img.pixel(0, 0) == (10, 20, 30)


def test_decode_all_white_2x2(tmp_path):
    p = tmp_path / "white.ppm"
    p.write_bytes(b"P6\n2 2\n255\n" + bytes([255] * 12))
    img = load_image(p)
    assert img.width == 2 and img.height == 2
    assert (img.pixels == 255).all()


def test_decode_tolerates_comments_and_whitespace(tmp_path):
    p = tmp_path / "messy.ppm"
    p.write_bytes(b"P6 # comment\n#another\n  2\t1 # w h\n\n255 " + bytes(range(6)))
    img = load_image(p)
    assert img.pixel(0, 0) == (0, 1, 2)
    assert img.pixel(1, 0) == (3, 4, 5)


def test_decode_p5_grayscale_expands(tmp_path):
    p = tmp_path / "gray.pgm"
    p.write_bytes(b"P5\n2 1\n255\n" + bytes([9, 200]))
    img = load_image(p)
    assert img.pixel(0, 0) == (9, 9, 9)
    assert img.pixel(1, 0) == (200, 200, 200)


@pytest.mark.parametrize(
    "data",
    [
        b"P6\n1 1\n255\n" + bytes([10, 20]),  # truncated pixels
        b"P6\n1 1\n",  # truncated header
        b"P6\n0 1\n255\n",  # zero dimension
        b"P6\nx 1\n255\n" + bytes(3),  # non-numeric width
        b"P3\n1 1\n255\n1 2 3",  # ascii variant unsupported
        b"GIF89a whatever",  # wrong magic entirely
    ],
)
def test_malformed_ppm_rejected(tmp_path, data):
    p = tmp_path / "bad.ppm"
    p.write_bytes(data)
    with pytest.raises(MalformedImage):
        load_image(p)


def test_ppm_maxval_other_than_255_rejected(tmp_path):
    p = tmp_path / "deep.ppm"
    p.write_bytes(b"P6\n1 1\n65535\n" + bytes(6))
    with pytest.raises(UnsupportedDepth):
        load_image(p)


def test_trailing_bytes_after_pixels_ignored(tmp_path):
    p = tmp_path / "extra.ppm"
    p.write_bytes(b"P6\n1 1\n255\n" + bytes([1, 2, 3]) + b"junk")
    assert load_image(p).pixel(0, 0) == (1, 2, 3)


# --- PPM encode --------------------------------------------------------------


def test_ppm_write_framing_is_exact(tmp_path):
    img = image_from_rows([[(1, 2, 3), (4, 5, 6)]])
    p = tmp_path / "framed.ppm"
    save_image(img, p)
    assert p.read_bytes() == b"P6\n2 1\n255\n" + bytes([1, 2, 3, 4, 5, 6])


def test_gray_saved_as_ppm_replicates_tone(tmp_path):
    g = GrayImage(np.array([[7, 250]], dtype=np.uint8))
    p = tmp_path / "gray.ppm"
    save_image(g, p)
    img = load_image(p)
    assert img.pixel(0, 0) == (7, 7, 7)
    assert img.pixel(1, 0) == (250, 250, 250)


# --- round-trips --------------------------------------------------------------


@pytest.mark.parametrize("suffix", ["ppm", "png"])
def test_load_save_load_identity(tmp_path, suffix):
    for seed in range(5):
        img = _random_image(seed)
        p1 = tmp_path / f"a{seed}.{suffix}"
        p2 = tmp_path / f"b{seed}.{suffix}"
        save_image(img, p1)
        first = load_image(p1)
        save_image(first, p2)
        assert load_image(p2) == first == img


def test_cross_format_round_trip(tmp_path):
    img = _random_image(99)
    save_image(img, tmp_path / "x.png")
    save_image(load_image(tmp_path / "x.png"), tmp_path / "x.ppm")
    assert load_image(tmp_path / "x.ppm") == img


def test_gray_png_round_trip(tmp_path):
    g = GrayImage(np.arange(12, dtype=np.uint8).reshape(3, 4))
    save_image(g, tmp_path / "g.png")
    img = load_image(tmp_path / "g.png")
    assert (img.pixels[:, :, 0] == g.values).all()
    assert (img.pixels[:, :, 0] == img.pixels[:, :, 1]).all()
    assert (img.pixels[:, :, 1] == img.pixels[:, :, 2]).all()


# --- PNG specifics ------------------------------------------------------------


def test_png_rgba_alpha_discarded(tmp_path):
    arr = np.zeros((2, 2, 4), dtype=np.uint8)
    arr[..., :3] = (11, 22, 33)
    arr[..., 3] = 77
    Image.fromarray(arr, mode="RGBA").save(tmp_path / "a.png")
    img = load_image(tmp_path / "a.png")
    assert img.pixel(1, 1) == (11, 22, 33)


def test_png_palette_expanded(tmp_path):
    base = np.array([[[200, 10, 10], [10, 200, 10]]], dtype=np.uint8)
    pal = Image.fromarray(base, mode="RGB").convert("P", palette=Image.Palette.ADAPTIVE)
    pal.save(tmp_path / "p.png")
    img = load_image(tmp_path / "p.png")
    assert img.pixel(0, 0) == (200, 10, 10)
    assert img.pixel(1, 0) == (10, 200, 10)


def test_png_16_bit_rejected(tmp_path):
    arr = np.full((2, 2), 40000, dtype=np.uint16)
    Image.fromarray(arr).save(tmp_path / "deep.png")
    with pytest.raises(UnsupportedDepth):
        load_image(tmp_path / "deep.png")


def test_png_garbage_rejected(tmp_path):
    p = tmp_path / "junk.png"
    p.write_bytes(b"\x89PNG\r\n\x1a\n" + b"\x00" * 40)
    with pytest.raises(MalformedImage):
        load_image(p)


# --- format forcing and errors --------------------------------------------------


def test_format_mismatch_rejected(tmp_path):
    img = _random_image(1)
    save_image(img, tmp_path / "real.png")
    with pytest.raises(MalformedImage):
        load_image(tmp_path / "real.png", fmt="ppm")


def test_unknown_format_rejected(tmp_path):
    img = _random_image(1)
    with pytest.raises(ValueError):
        save_image(img, tmp_path / "x.bmp")
    (tmp_path / "x.ppm").write_bytes(b"P6\n1 1\n255\n" + bytes(3))
    with pytest.raises(ValueError):
        load_image(tmp_path / "x.ppm", fmt="jpeg")


def test_missing_file_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.png")


def test_unwritable_path_raises_oserror(tmp_path):
    img = _random_image(1)
    with pytest.raises(OSError):
        save_image(img, tmp_path / "no" / "such" / "dir" / "x.png")


# --- masks ---------------------------------------------------------------------


def test_mask_round_trip_and_encoding(tmp_path):
    holes = np.zeros((3, 4), dtype=bool)
    holes[1, 2] = holes[0, 0] = True
    mask = HoleMask(holes)
    p = tmp_path / "mask.png"
    save_mask(mask, p)
    assert load_mask(p) == mask
    # holes are stored white, background black
    img = load_image(p)
    assert img.pixel(2, 1) == (255, 255, 255)
    assert img.pixel(1, 1) == (0, 0, 0)
