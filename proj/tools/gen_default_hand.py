#!/usr/bin/env python3
"""Generates the bundled hand description.

Writes data/sabd_default.json and include/sabd/default_hand.hpp. Geometry is
nominal adult-hand scale; tendon rest lengths are evaluated at the all-zero
posture, where every joint frame is just its origin.

    python3 tools/gen_default_hand.py
"""
import argparse
import ast
import json
import math
import pathlib
import re

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent

P = {
    "branch_axis": (-23.5, 72.0, 0.0),
    "branch_dir": (0.0, 0.0, 1.0),
    "d2_base": (24.0, 87.0), "d2_len": (45.0, 28.0, 22.0),
    "d3_base": (4.0, 90.0), "d3_len": (48.0, 30.0, 23.0),
    "d4_base": (12.0, 0.0), "d4_len": (47.0, 29.0, 23.0),
    "d5_base": (0.0, -5.0), "d5_len": (36.0, 22.0, 20.0),
    "thumb_base": (22.0, 20.0, 0.0), "thumb_yaw_deg": 40.0, "thumb_axis": (0.643, -0.766, 0.0),
    "thumb_len": (52.0, 44.0, 34.0), "thumb_mcp_abd_limits": (-0.8, 0.8),
    "mcp_flex_limits": (-0.2, 1.57), "pip_limits": (0.0, 1.75), "dip_limits": (0.0, 1.25),
}

_args = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
_args.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a geometry parameter")
_args.add_argument("--json-only", metavar="PATH", help="write only the document, to PATH")
ARGS = _args.parse_args()
for item in ARGS.set:
    key, value = item.split("=", 1)
    if key not in P:
        raise SystemExit(f"unknown parameter {key}")
    P[key] = ast.literal_eval(value)


def rpy_matrix(rpy):
    r, p, y = rpy
    rx = np.array([[1, 0, 0], [0, math.cos(r), -math.sin(r)], [0, math.sin(r), math.cos(r)]])
    ry = np.array([[math.cos(p), 0, math.sin(p)], [0, 1, 0], [-math.sin(p), 0, math.cos(p)]])
    rz = np.array([[math.cos(y), -math.sin(y), 0], [math.sin(y), math.cos(y), 0], [0, 0, 1]])
    return rz @ ry @ rx


def pose(xyz, rpy=(0.0, 0.0, 0.0)):
    t = np.eye(4)
    t[:3, :3] = rpy_matrix(rpy)
    t[:3, 3] = xyz
    return t


def rolling(name, axis, origin, radius, limits, neutral=0.0):
    return {"name": name, "kind": "rolling_contact", "axis": list(axis), "origin": {"xyz": list(origin)},
            "rolling_radius": radius, "link_dir": [0.0, 1.0, 0.0], "limits": list(limits), "neutral": neutral}


def revolute(name, axis, origin, limits, rpy=(0.0, 0.0, 0.0), neutral=0.0):
    return {"name": name, "kind": "revolute", "axis": list(axis), "origin": {"xyz": list(origin), "rpy": list(rpy)},
            "limits": list(limits), "neutral": neutral}


def patch(frame, center, radius, normal=(0.0, 0.0, 1.0)):
    return {"frame": frame, "center": list(center), "normal": list(normal), "radius": radius}


# -- geometry -----------------------------------------------------------------

BRANCH_AXIS = tuple(P["branch_axis"])
MCP_R = 2.5

wrist = revolute("wrist", (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), (-0.7, 0.7))
_bd = np.array(P["branch_dir"], dtype=float)
branch = revolute("abd45", tuple(float(c) for c in _bd / np.linalg.norm(_bd)), BRANCH_AXIS, (0.0, 1.48))


def finger(n, parent, base, lengths, with_abd):
    """Digits 2-5. `base` is the first MCP hinge in the parent frame."""
    prox, mid, dist = lengths
    p = f"d{n}_"
    joints = []
    if with_abd:
        joints.append(rolling(p + "mcp_abd", (0, 0, 1), (base[0], base[1] + 2 * MCP_R, 0.0), MCP_R, (-0.35, 0.35)))
        joints.append(rolling(p + "mcp_flex", (1, 0, 0), (0.0, 2 * MCP_R, 0.0), MCP_R, P["mcp_flex_limits"]))
    else:
        joints.append(rolling(p + "mcp_flex", (1, 0, 0), (base[0], base[1] + 2 * MCP_R, 0.0), MCP_R,
                              P["mcp_flex_limits"]))
    joints.append(rolling(p + "pip", (1, 0, 0), (0.0, prox, 0.0), 3.0, P["pip_limits"]))
    joints.append(rolling(p + "dip", (1, 0, 0), (0.0, mid, 0.0), 2.5, P["dip_limits"]))
    patches = [patch(p + "mcp_flex", (0.0, 0.5 * prox, 6.0), 8.0),
               patch(p + "pip", (0.0, 0.5 * mid, 5.5), 7.0),
               patch(p + "dip", (0.0, 0.5 * dist, 5.0), 7.0)]
    return {"name": f"digit{n}", "parent": parent, "joints": joints, "fingertip": [0.0, dist, 0.0],
            "patches": patches}


THUMB_BASE = tuple(P["thumb_base"])
THUMB_YAW = -math.radians(P["thumb_yaw_deg"])
_ta = np.array(P["thumb_axis"], dtype=float)
THUMB_AXIS = tuple(float(c) for c in _ta / np.linalg.norm(_ta))
THUMB_META, THUMB_PROX, THUMB_DIST = P["thumb_len"]
THUMB_R = 3.0

thumb = {
    "name": "digit1", "parent": "palm",
    "joints": [
        revolute("d1_cmc", THUMB_AXIS, THUMB_BASE, (0.0, 1.4), rpy=(0.0, 0.0, THUMB_YAW)),
        revolute("d1_mcp_abd", (0, 0, 1), (0.0, THUMB_META, 0.0), tuple(P["thumb_mcp_abd_limits"])),
        rolling("d1_mcp_flex", (1, 0, 0), (0.0, 2 * THUMB_R, 0.0), THUMB_R, (-0.3, 1.3)),
        rolling("d1_ip", (1, 0, 0), (0.0, THUMB_PROX, 0.0), 2.5, (-0.2, 1.4)),
    ],
    "fingertip": [0.0, THUMB_DIST, 0.0],
    "patches": [patch("d1_mcp_flex", (0.0, 0.5 * THUMB_PROX, 6.0), 8.0),
                patch("d1_ip", (0.0, 0.5 * THUMB_DIST, 5.0), 7.0)],
}

digits = [
    thumb,
    finger(2, "palm", P["d2_base"], P["d2_len"], True),
    finger(3, "palm", P["d3_base"], P["d3_len"], True),
    finger(4, "abd45", P["d4_base"], P["d4_len"], False),
    finger(5, "abd45", P["d5_base"], P["d5_len"], False),
]

palm_patches = [patch("palm", (2.0, 48.0, 8.0), 26.0), patch("abd45", (-4.0, 6.0, 8.0), 12.0)]

couplings = [{"driver": f"d{n}_pip", "driven": f"d{n}_dip", "factor": 0.71} for n in (2, 3, 4, 5)]

# -- frames at the zero posture ---------------------------------------------------

frames = {"palm": np.eye(4)}
joint_specs = {}


def origin_matrix(j):
    o = j["origin"]
    return pose(o["xyz"], o.get("rpy", (0.0, 0.0, 0.0)))


frames["abd45"] = origin_matrix(branch)
joint_specs["abd45"] = (branch, "palm")
for d in digits:
    parent = d["parent"]
    for j in d["joints"]:
        frames[j["name"]] = frames[parent] @ origin_matrix(j)
        joint_specs[j["name"]] = (j, parent)
        parent = j["name"]


def to_world(frame, p):
    return (frames[frame] @ np.array([*p, 1.0]))[:3]


def to_local(frame, p):
    return (np.linalg.inv(frames[frame]) @ np.array([*p, 1.0]))[:3]


# -- tendon routes ----------------------------------------------------------------

routes = []
motors = []


def add_route(name, role, via, crossed):
    length = sum(np.linalg.norm(to_world(*via[i]) - to_world(*via[i - 1])) for i in range(1, len(via)))
    routes.append({"name": name, "role": role,
                   "via_points": [{"frame": f, "point": [round(float(c), 6) for c in p]} for f, p in via],
                   "crossed_joints": [{"joint": j, "sign": s, "passive": pas} for j, s, pas in crossed],
                   "rest_length": None})
    return name


def hinge_points(joint, side, offset=4.0, height=6.0, lateral=0.0):
    """Via points either side of a rolling joint; side +1 palmar, -1 dorsal."""
    j, parent = joint_specs[joint]
    o = np.array(j["origin"]["xyz"])
    r = j["rolling_radius"]
    first = o - np.array([0.0, 2 * r, 0.0])
    return ((parent, first + np.array([lateral, -offset, side * height])),
            (joint, np.array([lateral, offset, side * height])))


def flex_pair(joint, height=6.0):
    a = hinge_points(joint, +1, height=height)
    b = hinge_points(joint, -1, height=height)
    ag = add_route(joint + "_flexor", "flexor", list(a), [(joint, 1, False)])
    an = add_route(joint + "_extensor", "extensor", list(b), [(joint, -1, False)])
    motors.append({"name": "m_" + joint, "kind": "tendon_pair", "joints": [joint], "agonist": ag, "antagonist": an})


def perpendicular_basis(axis):
    a = np.array(axis, dtype=float)
    a /= np.linalg.norm(a)
    helper = np.array([0.0, 0.0, 1.0]) if abs(a[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return a, e1, e2


def revolute_pair(joint, parent_dist, child_radius, roles=("flexor", "extensor"), names=("flexor", "extensor"),
                  axial=0.0):
    """Agonist relative angle centred on -90 deg over the ROM, antagonist on +90 deg."""
    j, parent = joint_specs[joint]
    lo, hi = j["limits"]
    w = hi - lo
    a, e1, e2 = perpendicular_basis(j["axis"])
    origin = origin_matrix(j)
    out = []
    for sign, role, nm in ((-1, roles[0], names[0]), (+1, roles[1], names[1])):
        beta_lo = sign * math.pi / 2 - w / 2
        alpha_p = 0.0
        alpha_c = alpha_p + beta_lo - lo
        p_local = parent_dist * (math.cos(alpha_p) * e1 + math.sin(alpha_p) * e2) + axial * a
        p_parent = (origin @ np.array([*p_local, 1.0]))[:3]
        c_local = child_radius * (math.cos(alpha_c) * e1 + math.sin(alpha_c) * e2) + axial * a
        out.append(add_route(f"{joint}_{nm}", role, [(parent, p_parent), (joint, c_local)], [(joint, -sign, False)]))
    motors.append({"name": "m_" + joint, "kind": "tendon_pair", "joints": [joint], "agonist": out[0],
                   "antagonist": out[1]})


def crosswise(n, s=5.0, height=6.0):
    abd, flex = f"d{n}_mcp_abd", f"d{n}_mcp_flex"
    j, _ = joint_specs[abd]
    o = np.array(j["origin"]["xyz"])
    first = o - np.array([0.0, 2 * j["rolling_radius"], 0.0])
    names = {}
    for role, x, z, sa, sf in (("flex_abduct", -s, +height, 1, 1), ("flex_adduct", +s, +height, -1, 1),
                               ("ext_abduct", -s, -height, 1, -1), ("ext_adduct", +s, -height, -1, -1)):
        names[role] = add_route(f"d{n}_mcp_{role}", role,
                                [("palm", first + np.array([x, -4.0, z])), (flex, np.array([x, 4.0, z]))],
                                [(abd, sa, False), (flex, sf, False)])
    motors.append({"name": f"m_d{n}_mcp_1", "kind": "crosswise_pair", "joints": [flex, abd],
                   "agonist": names["flex_abduct"], "antagonist": names["ext_adduct"],
                   "partner": f"m_d{n}_mcp_2", "partner_agonist": names["flex_adduct"],
                   "partner_antagonist": names["ext_abduct"]})


BRANCH_TENDON_OFFSET = 3.0  # mm from the branch axis


def branch_crossing_point():
    # polar angle chosen so both tendons lengthen across the whole abduction range
    beta0 = math.pi / 2 - 1.48 / 2
    ang = -math.pi / 2 + beta0
    return np.array([BRANCH_TENDON_OFFSET * math.cos(ang), BRANCH_TENDON_OFFSET * math.sin(ang)])


def branch_finger_mcp(n, height=6.0):
    joint = f"d{n}_mcp_flex"
    a = np.array(BRANCH_AXIS)
    c = branch_crossing_point()
    out = []
    for side, role in ((+1, "flexor"), (-1, "extensor")):
        par, chi = hinge_points(joint, side, height=height)
        palm_pt = a + np.array([0.0, -30.0, side * height])
        cross_pt = np.array([c[0], c[1], side * height])
        out.append(add_route(f"{joint}_{role}", role, [("palm", palm_pt), ("abd45", cross_pt), par, chi],
                             [("abd45", 1, True), (joint, side, False)]))
    motors.append({"name": "m_" + joint, "kind": "tendon_pair", "joints": [joint], "agonist": out[0],
                   "antagonist": out[1]})


def link(n):
    add_route(f"d{n}_link", "link", [(f"d{n}_pip", (0.0, 6.0, -3.0)), (f"d{n}_dip", (0.0, 3.0, -3.0))], [])


motors.append({"name": "m_wrist", "kind": "linkage", "joints": ["wrist"], "linkage_ratio": 1.5})
revolute_pair("d1_cmc", 18.0, 10.0)
revolute_pair("d1_mcp_abd", 14.0, 7.0)
flex_pair("d1_mcp_flex", height=7.0)
flex_pair("d1_ip")
for n in (2, 3):
    crosswise(n)
    flex_pair(f"d{n}_pip")
revolute_pair("abd45", 22.0, 10.0, roles=("flex_abduct", "ext_adduct"), names=("abductor", "adductor"))
for n in (4, 5):
    branch_finger_mcp(n)
    flex_pair(f"d{n}_pip")
for n in (2, 3, 4, 5):
    link(n)

for r in routes:
    pts = [to_world(v["frame"], v["point"]) for v in r["via_points"]]
    r["rest_length"] = round(float(sum(np.linalg.norm(pts[i] - pts[i - 1]) for i in range(1, len(pts)))), 9)

# -- document -------------------------------------------------------------------

doc = {
    "schema": "sabd-hand/1",
    "name": "sabd_default",
    "palm_frame": {"xyz": [0.0, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
    "wrist": wrist,
    "branch": branch,
    "digits": digits,
    "palm_patches": palm_patches,
    "couplings": couplings,
    "effective_limits": {"enabled": False, "joints": {"d1_mcp_abd": [P["thumb_mcp_abd_limits"][0] + math.radians(15),
                                                          P["thumb_mcp_abd_limits"][1] - math.radians(15)]}},
    "transmission": {
        "actuator": {"stall_torque": 0.92, "no_load_speed": 65.0, "current_limit": 300.0,
                     "spool_radius_agonist": 6.0, "spool_radius_antagonist": 6.0},
        "spring": {"rate": 1.94, "pretension": 20.0, "max_deflection": 45.0},
        "routes": routes,
        "motors": motors,
    },
}

text = json.dumps(doc, indent=1)
# keep short numeric arrays on one line
text = re.sub(r"\[\s*(-?[0-9.e+-]+(?:,\s*-?[0-9.e+-]+)*)\s*\]",
              lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text)
if ARGS.json_only:
    pathlib.Path(ARGS.json_only).write_text(text + "\n")
    raise SystemExit(0)
(ROOT / "data").mkdir(exist_ok=True)
(ROOT / "data" / "sabd_default.json").write_text(text + "\n")
header = f'''#pragma once

// Generated by tools/gen_default_hand.py from data/sabd_default.json.

namespace sabd {{

/// The bundled nominal hand description ("sabd_default").
inline const char* default_hand_document() {{
    return R"json({text})json";
}}

}}  // namespace sabd
'''
(ROOT / "include" / "sabd" / "default_hand.hpp").write_text(header)
print(f"{len(routes)} routes, {len(motors)} motor entries")
