#!/usr/bin/env python3
"""Regenerates data/bunny_b0.ply and data/bunny_b0r.ply.

Source mesh: the public-domain Stanford bunny distributed as the npm package
`bunny` (1,839 vertices, arbitrary units). Usage:

    npm pack bunny && tar xzf bunny-1.0.1.tgz
    node -e "process.stdout.write(JSON.stringify(require('./package')))" > bunny.json
    python3 tools/data/make_bunny_data.py bunny.json data/

Requires numpy, scipy and pymeshlab.
"""
import json
import sys

import numpy as np
import pymeshlab
from scipy.spatial import cKDTree

# Quadric decimation to exactly 1,597 vertices.
DECIMATION_TARGET_FACES = 3190
# Scale applied after decimation so that the mean 4th-neighbour distance is 3.13 mm.
TARGET_R4TH_MM = 3.13
# Isotropic remeshing edge length (mm) giving a remeshed cloud of ~970 vertices.
REMESH_EDGE_MM = 4.078


def r4th(points):
    return cKDTree(points).query(points, 5)[0][:, 4].mean()


def write_ply(path, points, comment):
    with open(path, "w") as f:
        f.write("ply\nformat ascii 1.0\n")
        f.write(f"comment {comment}\n")
        f.write(f"element vertex {len(points)}\n")
        f.write("property float x\nproperty float y\nproperty float z\nend_header\n")
        for p in points:
            f.write(f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f}\n")


def main():
    src, out_dir = sys.argv[1], sys.argv[2]
    mesh = json.load(open(src))
    v = np.array(mesh["positions"], float)
    f = np.array(mesh["cells"], np.int32)

    ms = pymeshlab.MeshSet()
    ms.add_mesh(pymeshlab.Mesh(v, f))
    ms.meshing_decimation_quadric_edge_collapse(
        targetfacenum=DECIMATION_TARGET_FACES, preservetopology=True,
        preserveboundary=True, qualitythr=0.5, optimalplacement=False)
    ms.meshing_remove_unreferenced_vertices()
    v = ms.current_mesh().vertex_matrix()
    f = ms.current_mesh().face_matrix()
    scale = float("%.4g" % (TARGET_R4TH_MM / r4th(v)))
    v = np.round(v * scale, 6)

    ms = pymeshlab.MeshSet()
    ms.add_mesh(pymeshlab.Mesh(v, f))
    ms.meshing_isotropic_explicit_remeshing(
        iterations=3, targetlen=pymeshlab.PureValue(REMESH_EDGE_MM))
    vr = np.round(ms.current_mesh().vertex_matrix(), 6)

    write_ply(f"{out_dir}/bunny_b0.ply", v,
              f"stanford bunny, quadric decimation, scale {scale}, units mm")
    write_ply(f"{out_dir}/bunny_b0r.ply", vr,
              f"bunny_b0 isotropic remesh, edge {REMESH_EDGE_MM} mm, units mm")
    print(len(v), r4th(v), len(vr), r4th(vr))


if __name__ == "__main__":
    main()
