"""Writes the binary COLMAP model in colmap_bin/ with plain struct packing."""
import pathlib
import struct

OUT = pathlib.Path(__file__).parent / "colmap_bin"

CAMERAS = [
    # id, model id, width, height, params
    (1, 1, 640, 480, [500.25, 501.5, 320.0, 240.125]),   # PINHOLE
    (7, 2, 1024, 768, [812.0, 511.5, 383.5, -0.0125]),  # SIMPLE_RADIAL
]

IMAGES = [
    # id, qvec (w x y z), tvec, camera id, name, keypoints (x, y, point3D id)
    (3, (1.0, 0.0, 0.0, 0.0), (0.5, -1.25, 2.0), 1, "frame_0003.jpg",
     [(10.5, 20.25, 101), (300.0, 200.0, 2**64 - 1)]),
    (9, (0.5, 0.5, -0.5, 0.5), (-3.0, 0.0, 7.75), 7, "sub/frame_0009.png",
     [(1.0, 2.0, 102), (3.5, 4.5, 101), (640.0, 1.0, 2**64 - 1)]),
]

POINTS = [
    # id, xyz, rgb, error, track (image id, keypoint index)
    (101, (1.5, -2.25, 3.0), (255, 128, 0), 0.375, [(3, 0), (9, 1)]),
    (102, (-0.001, 1e6, 2.5e-7), (0, 0, 0), 1.75, [(9, 0)]),
    (250, (0.0, 0.0, -4.0), (12, 34, 56), 0.0, []),
]


def cameras():
    b = struct.pack("<Q", len(CAMERAS))
    for cid, model, w, h, params in CAMERAS:
        b += struct.pack("<IiQQ", cid, model, w, h)
        b += struct.pack("<%dd" % len(params), *params)
    return b


def images():
    b = struct.pack("<Q", len(IMAGES))
    for iid, q, t, cid, name, kps in IMAGES:
        b += struct.pack("<I4d3dI", iid, *q, *t, cid)
        b += name.encode() + b"\0"
        b += struct.pack("<Q", len(kps))
        for x, y, pid in kps:
            b += struct.pack("<ddQ", x, y, pid)
    return b


def points():
    b = struct.pack("<Q", len(POINTS))
    for pid, xyz, rgb, err, track in POINTS:
        b += struct.pack("<Q3d3BdQ", pid, *xyz, *rgb, err, len(track))
        for iid, idx in track:
            b += struct.pack("<II", iid, idx)
    return b


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    (OUT / "cameras.bin").write_bytes(cameras())
    (OUT / "images.bin").write_bytes(images())
    (OUT / "points3D.bin").write_bytes(points())
