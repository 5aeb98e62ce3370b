"""Reference values for the sphere, rotation, layout and viewport tests.

Conventions: x points at theta=0 on the equator, z at the north pole,
theta is the azimuth and phi the elevation. Yaw-pitch-roll composes as
Rz(yaw) @ Ry(pitch) @ Rx(roll).
"""
import itertools
import math

import numpy as np
from scipy.spatial.transform import Rotation


def sph_to_vec(theta, phi):
    return np.array([math.cos(phi) * math.cos(theta), math.cos(phi) * math.sin(theta), math.sin(phi)])


def haversine(t1, p1, t2, p2):
    h = math.sin((p2 - p1) / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin((t2 - t1) / 2) ** 2
    return 2 * math.asin(math.sqrt(h))


def rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def ry(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def main():
    print("sph_to_vec(0.7, -0.3) =", repr(list(sph_to_vec(0.7, -0.3))))
    print("haversine((0,0),(pi/2,0)) =", repr(haversine(0, 0, math.pi / 2, 0)))
    print("haversine((0.3,0.2),(2.1,-0.7)) =", repr(haversine(0.3, 0.2, 2.1, -0.7)))

    m = rz(0.2) @ ry(-0.1) @ rx(0.4)
    m_scipy = Rotation.from_euler("ZYX", [0.2, -0.1, 0.4]).as_matrix()
    assert np.allclose(m, m_scipy, atol=1e-15)
    print("ypr(0.2,-0.1,0.4) @ (1,0,0) =", repr(list(m @ np.array([1.0, 0, 0]))))
    print("ypr(0.2,-0.1,0.4) @ (0,0,1) =", repr(list(m @ np.array([0, 0, 1.0]))))

    # Rhombic dodecahedron: face normals are the permutations of (+-1,+-1,0).
    normals = set()
    for signs in itertools.product([1, -1], repeat=2):
        for zero in range(3):
            v = [0, 0, 0]
            idx = [i for i in range(3) if i != zero]
            v[idx[0]], v[idx[1]] = signs
            normals.add(tuple(v))
    normals = [np.array(n) / math.sqrt(2) for n in sorted(normals)]
    angles = {}
    for a, b in itertools.combinations(normals, 2):
        ang = round(math.degrees(math.acos(max(-1, min(1, float(a @ b))))), 9)
        angles[ang] = angles.get(ang, 0) + 1
    print("dodecahedron pairwise angle histogram (deg: count) =", angles)

    # Pinhole corner: angle between the optical axis and the continuous corner.
    w, h, hfov = 1920, 1080, math.radians(120)
    vfov = 2 * math.atan(math.tan(hfov / 2) * h / w)
    print("vfov(1920x1080, 120deg) =", repr(vfov))
    corner = math.atan(math.sqrt(math.tan(hfov / 2) ** 2 + math.tan(vfov / 2) ** 2))
    print("corner angle =", repr(corner))

    # Cube face 0 spans +-45 degrees around +x; the 45-degree direction between
    # +x and +y lies on the shared edge: gnomonic u = y / x = 1.
    print("gnomonic u at x=y =", 1.0)

    # Octahedron set used by the nearest-QEC example.
    octa = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    fov = sph_to_vec(0.1, 0.05)
    d = [math.acos(max(-1, min(1, float(fov @ np.array(p))))) for p in octa]
    print("octahedron distances from (0.1, 0.05) =", [round(x, 6) for x in d], "argmin", int(np.argmin(d)))


if __name__ == "__main__":
    main()
