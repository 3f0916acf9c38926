"""Writes lab.json: a 12 m x 9 m five-room flat around a central hall."""

import json
import math
from pathlib import Path

RES = 0.1
W, H = 120, 90

grid = [["." for _ in range(W)] for _ in range(H)]


def wall(c0, c1, r0, r1):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            grid[r][c] = "#"


def door(c0, c1, r0, r1):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            grid[r][c] = "."


wall(0, W - 1, 0, 0)
wall(0, W - 1, H - 1, H - 1)
wall(0, 0, 0, H - 1)
wall(W - 1, W - 1, 0, H - 1)
wall(45, 45, 0, H - 1)
wall(75, 75, 0, H - 1)
wall(0, 45, 45, 45)
wall(75, W - 1, 45, 45)
door(45, 45, 60, 69)  # kitchen - hall
door(45, 45, 20, 29)  # dining - hall
door(75, 75, 60, 69)  # bedroom - hall
door(75, 75, 20, 29)  # living - hall
door(15, 24, 45, 45)  # kitchen - dining


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


rooms = [
    {"id": "kitchen", "polygon": rect(0.1, 4.6, 4.5, 8.9)},
    {"id": "dining_room", "polygon": rect(0.1, 0.1, 4.5, 4.5)},
    {"id": "central_hall", "polygon": rect(4.6, 0.1, 7.5, 8.9)},
    {"id": "bedroom", "polygon": rect(7.6, 4.6, 11.9, 8.9)},
    {"id": "living_room", "polygon": rect(7.6, 0.1, 11.9, 4.5)},
]

furniture = [
    ("kitchen_cupboard", "shelf", rect(1.0, 8.3, 2.2, 8.9), 0.9, "kitchen"),
    ("kitchen_table", "table", rect(2.8, 5.2, 3.8, 6.0), 0.75, "kitchen"),
    ("kitchen_windowsill", "windowsill", rect(0.1, 5.5, 0.4, 7.0), 0.8, "kitchen"),
    ("dining_table", "table", rect(0.6, 1.8, 1.8, 3.2), 0.75, "dining_room"),
    ("dining_sideboard", "shelf", rect(2.6, 0.1, 3.6, 0.5), 0.8, "dining_room"),
    ("hall_console", "table", rect(7.0, 3.5, 7.5, 4.7), 0.8, "central_hall"),
    ("living_shelf", "shelf", rect(11.5, 1.0, 11.9, 2.5), 1.6, "living_room"),
    ("coffee_table", "table", rect(9.0, 1.4, 10.2, 2.0), 0.45, "living_room"),
    ("tv_stand", "shelf", rect(9.0, 4.1, 10.6, 4.5), 0.5, "living_room"),
    ("bed", "other", rect(9.5, 6.0, 11.9, 8.0), 0.5, "bedroom"),
    ("nightstand", "nightstand", rect(11.4, 5.3, 11.9, 5.8), 0.55, "bedroom"),
    ("bedroom_desk", "table", rect(8.0, 8.3, 9.2, 8.9), 0.75, "bedroom"),
    ("bedroom_windowsill", "windowsill", rect(9.8, 8.6, 11.2, 8.9), 0.9, "bedroom"),
]

objects = [
    {"id": "asus_box", "name": "asus_box", "on": "dining_table", "pose": {"x": 1.2, "y": 2.5}},
    {"id": "handbag", "name": "handbag", "on": "nightstand", "pose": {"x": 11.65, "y": 5.55}},
    {"id": "wallet", "name": "wallet", "on": "living_shelf", "pose": {"x": 11.7, "y": 1.75}},
    {"id": "mug", "name": "mug", "on": "kitchen_table", "pose": {"x": 3.3, "y": 5.6}},
    {"id": "book", "name": "book", "on": "bedroom_desk", "pose": {"x": 8.6, "y": 8.6}},
]

half_pi = math.pi / 2
annotations = [
    {"id": "kitchen_table", "x": 3.3, "y": 6.6, "yaw": -half_pi},
    {"id": "kitchen_windowsill", "x": 1.0, "y": 6.25, "yaw": math.pi},
    {"id": "dining_table", "x": 2.4, "y": 2.5, "yaw": math.pi},
    {"id": "dining_sideboard", "x": 3.1, "y": 1.1, "yaw": -half_pi},
    {"id": "hall_console", "x": 6.4, "y": 4.1, "yaw": 0.0},
    {"id": "living_shelf", "x": 10.9, "y": 1.75, "yaw": 0.0},
    {"id": "coffee_table", "x": 9.6, "y": 0.8, "yaw": half_pi},
    {"id": "bedroom_desk", "x": 8.6, "y": 7.7, "yaw": half_pi},
    {"id": "bedroom_windowsill", "x": 10.5, "y": 8.3, "yaw": half_pi},
]

doc = {
    "grid": {"resolution": RES, "width": W, "height": H, "rows": ["".join(row) for row in reversed(grid)]},
    "rooms": rooms,
    "furniture": [
        {"id": i, "class": c, "footprint": fp, "surface_height": h, "room": r} for i, c, fp, h, r in furniture
    ],
    "objects": objects,
    "robot": {"x": 6.05, "y": 4.5, "yaw": 0.0},
    "user": {"last_seen_room": "bedroom"},
    "annotations": annotations,
}

out = Path(__file__).with_name("lab.json")
out.write_text(json.dumps(doc, indent=1) + "\n")
print(f"wrote {out}")
