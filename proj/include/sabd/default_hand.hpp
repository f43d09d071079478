#pragma once

// Generated by tools/gen_default_hand.py from data/sabd_default.json.

namespace sabd {

/// The bundled nominal hand description ("sabd_default").
inline const char* default_hand_document() {
    return R"json({
 "schema": "sabd-hand/1",
 "name": "sabd_default",
 "palm_frame": {
  "xyz": [0.0, 0.0, 0.0],
  "rpy": [0.0, 0.0, 0.0]
 },
 "wrist": {
  "name": "wrist",
  "kind": "revolute",
  "axis": [1.0, 0.0, 0.0],
  "origin": {
   "xyz": [0.0, 0.0, 0.0],
   "rpy": [0.0, 0.0, 0.0]
  },
  "limits": [-0.7, 0.7],
  "neutral": 0.0
 },
 "branch": {
  "name": "abd45",
  "kind": "revolute",
  "axis": [0.0, 0.0, 1.0],
  "origin": {
   "xyz": [-23.5, 72.0, 0.0],
   "rpy": [0.0, 0.0, 0.0]
  },
  "limits": [0.0, 1.48],
  "neutral": 0.0
 },
 "digits": [
  {
   "name": "digit1",
   "parent": "palm",
   "joints": [
    {
     "name": "d1_cmc",
     "kind": "revolute",
     "axis": [0.6429341026315474, -0.7659214970696194, 0.0],
     "origin": {
      "xyz": [22.0, 20.0, 0.0],
      "rpy": [0.0, 0.0, -0.6981317007977318]
     },
     "limits": [0.0, 1.4],
     "neutral": 0.0
    },
    {
     "name": "d1_mcp_abd",
     "kind": "revolute",
     "axis": [0, 0, 1],
     "origin": {
      "xyz": [0.0, 52.0, 0.0],
      "rpy": [0.0, 0.0, 0.0]
     },
     "limits": [-0.8, 0.8],
     "neutral": 0.0
    },
    {
     "name": "d1_mcp_flex",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 6.0, 0.0]
     },
     "rolling_radius": 3.0,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.3, 1.3],
     "neutral": 0.0
    },
    {
     "name": "d1_ip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 44.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.2, 1.4],
     "neutral": 0.0
    }
   ],
   "fingertip": [0.0, 34.0, 0.0],
   "patches": [
    {
     "frame": "d1_mcp_flex",
     "center": [0.0, 22.0, 6.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 8.0
    },
    {
     "frame": "d1_ip",
     "center": [0.0, 17.0, 5.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    }
   ]
  },
  {
   "name": "digit2",
   "parent": "palm",
   "joints": [
    {
     "name": "d2_mcp_abd",
     "kind": "rolling_contact",
     "axis": [0, 0, 1],
     "origin": {
      "xyz": [24.0, 92.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.35, 0.35],
     "neutral": 0.0
    },
    {
     "name": "d2_mcp_flex",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 5.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.2, 1.57],
     "neutral": 0.0
    },
    {
     "name": "d2_pip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 45.0, 0.0]
     },
     "rolling_radius": 3.0,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.75],
     "neutral": 0.0
    },
    {
     "name": "d2_dip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 28.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.25],
     "neutral": 0.0
    }
   ],
   "fingertip": [0.0, 22.0, 0.0],
   "patches": [
    {
     "frame": "d2_mcp_flex",
     "center": [0.0, 22.5, 6.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 8.0
    },
    {
     "frame": "d2_pip",
     "center": [0.0, 14.0, 5.5],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    },
    {
     "frame": "d2_dip",
     "center": [0.0, 11.0, 5.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    }
   ]
  },
  {
   "name": "digit3",
   "parent": "palm",
   "joints": [
    {
     "name": "d3_mcp_abd",
     "kind": "rolling_contact",
     "axis": [0, 0, 1],
     "origin": {
      "xyz": [4.0, 95.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.35, 0.35],
     "neutral": 0.0
    },
    {
     "name": "d3_mcp_flex",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 5.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.2, 1.57],
     "neutral": 0.0
    },
    {
     "name": "d3_pip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 48.0, 0.0]
     },
     "rolling_radius": 3.0,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.75],
     "neutral": 0.0
    },
    {
     "name": "d3_dip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 30.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.25],
     "neutral": 0.0
    }
   ],
   "fingertip": [0.0, 23.0, 0.0],
   "patches": [
    {
     "frame": "d3_mcp_flex",
     "center": [0.0, 24.0, 6.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 8.0
    },
    {
     "frame": "d3_pip",
     "center": [0.0, 15.0, 5.5],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    },
    {
     "frame": "d3_dip",
     "center": [0.0, 11.5, 5.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    }
   ]
  },
  {
   "name": "digit4",
   "parent": "abd45",
   "joints": [
    {
     "name": "d4_mcp_flex",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [12.0, 5.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.2, 1.57],
     "neutral": 0.0
    },
    {
     "name": "d4_pip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 47.0, 0.0]
     },
     "rolling_radius": 3.0,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.75],
     "neutral": 0.0
    },
    {
     "name": "d4_dip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 29.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.25],
     "neutral": 0.0
    }
   ],
   "fingertip": [0.0, 23.0, 0.0],
   "patches": [
    {
     "frame": "d4_mcp_flex",
     "center": [0.0, 23.5, 6.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 8.0
    },
    {
     "frame": "d4_pip",
     "center": [0.0, 14.5, 5.5],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    },
    {
     "frame": "d4_dip",
     "center": [0.0, 11.5, 5.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    }
   ]
  },
  {
   "name": "digit5",
   "parent": "abd45",
   "joints": [
    {
     "name": "d5_mcp_flex",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 0.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [-0.2, 1.57],
     "neutral": 0.0
    },
    {
     "name": "d5_pip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 36.0, 0.0]
     },
     "rolling_radius": 3.0,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.75],
     "neutral": 0.0
    },
    {
     "name": "d5_dip",
     "kind": "rolling_contact",
     "axis": [1, 0, 0],
     "origin": {
      "xyz": [0.0, 22.0, 0.0]
     },
     "rolling_radius": 2.5,
     "link_dir": [0.0, 1.0, 0.0],
     "limits": [0.0, 1.25],
     "neutral": 0.0
    }
   ],
   "fingertip": [0.0, 20.0, 0.0],
   "patches": [
    {
     "frame": "d5_mcp_flex",
     "center": [0.0, 18.0, 6.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 8.0
    },
    {
     "frame": "d5_pip",
     "center": [0.0, 11.0, 5.5],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    },
    {
     "frame": "d5_dip",
     "center": [0.0, 10.0, 5.0],
     "normal": [0.0, 0.0, 1.0],
     "radius": 7.0
    }
   ]
  }
 ],
 "palm_patches": [
  {
   "frame": "palm",
   "center": [2.0, 48.0, 8.0],
   "normal": [0.0, 0.0, 1.0],
   "radius": 26.0
  },
  {
   "frame": "abd45",
   "center": [-4.0, 6.0, 8.0],
   "normal": [0.0, 0.0, 1.0],
   "radius": 12.0
  }
 ],
 "couplings": [
  {
   "driver": "d2_pip",
   "driven": "d2_dip",
   "factor": 0.71
  },
  {
   "driver": "d3_pip",
   "driven": "d3_dip",
   "factor": 0.71
  },
  {
   "driver": "d4_pip",
   "driven": "d4_dip",
   "factor": 0.71
  },
  {
   "driver": "d5_pip",
   "driven": "d5_dip",
   "factor": 0.71
  }
 ],
 "effective_limits": {
  "enabled": false,
  "joints": {
   "d1_mcp_abd": [-0.5382006122008507, 0.5382006122008507]
  }
 },
 "transmission": {
  "actuator": {
   "stall_torque": 0.92,
   "no_load_speed": 65.0,
   "current_limit": 300.0,
   "spool_radius_agonist": 6.0,
   "spool_radius_antagonist": 6.0
  },
  "spring": {
   "rate": 1.94,
   "pretension": 20.0,
   "max_deflection": 45.0
  },
  "routes": [
   {
    "name": "d1_cmc_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "palm",
      "point": [40.0, 20.003442, 0.0]
     },
     {
      "frame": "d1_cmc",
      "point": [-4.934202, -4.141895, -7.648422]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_cmc",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 25.610903696
   },
   {
    "name": "d1_cmc_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "palm",
      "point": [40.0, 20.003442, 0.0]
     },
     {
      "frame": "d1_cmc",
      "point": [4.934202, 4.141895, 7.648422]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_cmc",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 13.859352109
   },
   {
    "name": "d1_mcp_abd_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d1_cmc",
      "point": [14.0, 52.0, 0.0]
     },
     {
      "frame": "d1_mcp_abd",
      "point": [0.0, -7.0, 0.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_mcp_abd",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 15.652475842
   },
   {
    "name": "d1_mcp_abd_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d1_cmc",
      "point": [14.0, 52.0, 0.0]
     },
     {
      "frame": "d1_mcp_abd",
      "point": [0.0, 7.0, 0.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_mcp_abd",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 15.652475842
   },
   {
    "name": "d1_mcp_flex_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d1_mcp_abd",
      "point": [0.0, -4.0, 7.0]
     },
     {
      "frame": "d1_mcp_flex",
      "point": [0.0, 4.0, 7.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d1_mcp_flex_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d1_mcp_abd",
      "point": [0.0, -4.0, -7.0]
     },
     {
      "frame": "d1_mcp_flex",
      "point": [0.0, 4.0, -7.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d1_ip_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d1_mcp_flex",
      "point": [0.0, 35.0, 6.0]
     },
     {
      "frame": "d1_ip",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_ip",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 13.0
   },
   {
    "name": "d1_ip_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d1_mcp_flex",
      "point": [0.0, 35.0, -6.0]
     },
     {
      "frame": "d1_ip",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d1_ip",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 13.0
   },
   {
    "name": "d2_mcp_flex_abduct",
    "role": "flex_abduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [19.0, 83.0, 6.0]
     },
     {
      "frame": "d2_mcp_flex",
      "point": [-5.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_mcp_abd",
      "sign": 1,
      "passive": false
     },
     {
      "joint": "d2_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d2_mcp_flex_adduct",
    "role": "flex_adduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [29.0, 83.0, 6.0]
     },
     {
      "frame": "d2_mcp_flex",
      "point": [5.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_mcp_abd",
      "sign": -1,
      "passive": false
     },
     {
      "joint": "d2_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d2_mcp_ext_abduct",
    "role": "ext_abduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [19.0, 83.0, -6.0]
     },
     {
      "frame": "d2_mcp_flex",
      "point": [-5.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_mcp_abd",
      "sign": 1,
      "passive": false
     },
     {
      "joint": "d2_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d2_mcp_ext_adduct",
    "role": "ext_adduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [29.0, 83.0, -6.0]
     },
     {
      "frame": "d2_mcp_flex",
      "point": [5.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_mcp_abd",
      "sign": -1,
      "passive": false
     },
     {
      "joint": "d2_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d2_pip_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d2_mcp_flex",
      "point": [0.0, 35.0, 6.0]
     },
     {
      "frame": "d2_pip",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_pip",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d2_pip_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d2_mcp_flex",
      "point": [0.0, 35.0, -6.0]
     },
     {
      "frame": "d2_pip",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d2_pip",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d3_mcp_flex_abduct",
    "role": "flex_abduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [-1.0, 86.0, 6.0]
     },
     {
      "frame": "d3_mcp_flex",
      "point": [-5.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_mcp_abd",
      "sign": 1,
      "passive": false
     },
     {
      "joint": "d3_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d3_mcp_flex_adduct",
    "role": "flex_adduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [9.0, 86.0, 6.0]
     },
     {
      "frame": "d3_mcp_flex",
      "point": [5.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_mcp_abd",
      "sign": -1,
      "passive": false
     },
     {
      "joint": "d3_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d3_mcp_ext_abduct",
    "role": "ext_abduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [-1.0, 86.0, -6.0]
     },
     {
      "frame": "d3_mcp_flex",
      "point": [-5.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_mcp_abd",
      "sign": 1,
      "passive": false
     },
     {
      "joint": "d3_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d3_mcp_ext_adduct",
    "role": "ext_adduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [9.0, 86.0, -6.0]
     },
     {
      "frame": "d3_mcp_flex",
      "point": [5.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_mcp_abd",
      "sign": -1,
      "passive": false
     },
     {
      "joint": "d3_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 18.0
   },
   {
    "name": "d3_pip_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d3_mcp_flex",
      "point": [0.0, 38.0, 6.0]
     },
     {
      "frame": "d3_pip",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_pip",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d3_pip_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d3_mcp_flex",
      "point": [0.0, 38.0, -6.0]
     },
     {
      "frame": "d3_pip",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d3_pip",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "abd45_abductor",
    "role": "flex_abduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [-1.5, 72.0, 0.0]
     },
     {
      "frame": "abd45",
      "point": [-6.742879, -7.384686, 0.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 29.676365689
   },
   {
    "name": "abd45_adductor",
    "role": "ext_adduct",
    "via_points": [
     {
      "frame": "palm",
      "point": [-1.5, 72.0, 0.0]
     },
     {
      "frame": "abd45",
      "point": [6.742879, 7.384686, 0.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 16.950319423
   },
   {
    "name": "d4_mcp_flex_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "palm",
      "point": [-23.5, 42.0, 6.0]
     },
     {
      "frame": "abd45",
      "point": [2.215406, -2.022864, 6.0]
     },
     {
      "frame": "abd45",
      "point": [12.0, -4.0, 6.0]
     },
     {
      "frame": "d4_mcp_flex",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": 1,
      "passive": true
     },
     {
      "joint": "d4_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 51.047065585
   },
   {
    "name": "d4_mcp_flex_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "palm",
      "point": [-23.5, 42.0, -6.0]
     },
     {
      "frame": "abd45",
      "point": [2.215406, -2.022864, -6.0]
     },
     {
      "frame": "abd45",
      "point": [12.0, -4.0, -6.0]
     },
     {
      "frame": "d4_mcp_flex",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": 1,
      "passive": true
     },
     {
      "joint": "d4_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 51.047065585
   },
   {
    "name": "d4_pip_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d4_mcp_flex",
      "point": [0.0, 37.0, 6.0]
     },
     {
      "frame": "d4_pip",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d4_pip",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d4_pip_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d4_mcp_flex",
      "point": [0.0, 37.0, -6.0]
     },
     {
      "frame": "d4_pip",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d4_pip",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d5_mcp_flex_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "palm",
      "point": [-23.5, 42.0, 6.0]
     },
     {
      "frame": "abd45",
      "point": [2.215406, -2.022864, 6.0]
     },
     {
      "frame": "abd45",
      "point": [0.0, -9.0, 6.0]
     },
     {
      "frame": "d5_mcp_flex",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": 1,
      "passive": true
     },
     {
      "joint": "d5_mcp_flex",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 48.385127107
   },
   {
    "name": "d5_mcp_flex_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "palm",
      "point": [-23.5, 42.0, -6.0]
     },
     {
      "frame": "abd45",
      "point": [2.215406, -2.022864, -6.0]
     },
     {
      "frame": "abd45",
      "point": [0.0, -9.0, -6.0]
     },
     {
      "frame": "d5_mcp_flex",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "abd45",
      "sign": 1,
      "passive": true
     },
     {
      "joint": "d5_mcp_flex",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 48.385127107
   },
   {
    "name": "d5_pip_flexor",
    "role": "flexor",
    "via_points": [
     {
      "frame": "d5_mcp_flex",
      "point": [0.0, 26.0, 6.0]
     },
     {
      "frame": "d5_pip",
      "point": [0.0, 4.0, 6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d5_pip",
      "sign": 1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d5_pip_extensor",
    "role": "extensor",
    "via_points": [
     {
      "frame": "d5_mcp_flex",
      "point": [0.0, 26.0, -6.0]
     },
     {
      "frame": "d5_pip",
      "point": [0.0, 4.0, -6.0]
     }
    ],
    "crossed_joints": [
     {
      "joint": "d5_pip",
      "sign": -1,
      "passive": false
     }
    ],
    "rest_length": 14.0
   },
   {
    "name": "d2_link",
    "role": "link",
    "via_points": [
     {
      "frame": "d2_pip",
      "point": [0.0, 6.0, -3.0]
     },
     {
      "frame": "d2_dip",
      "point": [0.0, 3.0, -3.0]
     }
    ],
    "crossed_joints": [],
    "rest_length": 25.0
   },
   {
    "name": "d3_link",
    "role": "link",
    "via_points": [
     {
      "frame": "d3_pip",
      "point": [0.0, 6.0, -3.0]
     },
     {
      "frame": "d3_dip",
      "point": [0.0, 3.0, -3.0]
     }
    ],
    "crossed_joints": [],
    "rest_length": 27.0
   },
   {
    "name": "d4_link",
    "role": "link",
    "via_points": [
     {
      "frame": "d4_pip",
      "point": [0.0, 6.0, -3.0]
     },
     {
      "frame": "d4_dip",
      "point": [0.0, 3.0, -3.0]
     }
    ],
    "crossed_joints": [],
    "rest_length": 26.0
   },
   {
    "name": "d5_link",
    "role": "link",
    "via_points": [
     {
      "frame": "d5_pip",
      "point": [0.0, 6.0, -3.0]
     },
     {
      "frame": "d5_dip",
      "point": [0.0, 3.0, -3.0]
     }
    ],
    "crossed_joints": [],
    "rest_length": 19.0
   }
  ],
  "motors": [
   {
    "name": "m_wrist",
    "kind": "linkage",
    "joints": [
     "wrist"
    ],
    "linkage_ratio": 1.5
   },
   {
    "name": "m_d1_cmc",
    "kind": "tendon_pair",
    "joints": [
     "d1_cmc"
    ],
    "agonist": "d1_cmc_flexor",
    "antagonist": "d1_cmc_extensor"
   },
   {
    "name": "m_d1_mcp_abd",
    "kind": "tendon_pair",
    "joints": [
     "d1_mcp_abd"
    ],
    "agonist": "d1_mcp_abd_flexor",
    "antagonist": "d1_mcp_abd_extensor"
   },
   {
    "name": "m_d1_mcp_flex",
    "kind": "tendon_pair",
    "joints": [
     "d1_mcp_flex"
    ],
    "agonist": "d1_mcp_flex_flexor",
    "antagonist": "d1_mcp_flex_extensor"
   },
   {
    "name": "m_d1_ip",
    "kind": "tendon_pair",
    "joints": [
     "d1_ip"
    ],
    "agonist": "d1_ip_flexor",
    "antagonist": "d1_ip_extensor"
   },
   {
    "name": "m_d2_mcp_1",
    "kind": "crosswise_pair",
    "joints": [
     "d2_mcp_flex",
     "d2_mcp_abd"
    ],
    "agonist": "d2_mcp_flex_abduct",
    "antagonist": "d2_mcp_ext_adduct",
    "partner": "m_d2_mcp_2",
    "partner_agonist": "d2_mcp_flex_adduct",
    "partner_antagonist": "d2_mcp_ext_abduct"
   },
   {
    "name": "m_d2_pip",
    "kind": "tendon_pair",
    "joints": [
     "d2_pip"
    ],
    "agonist": "d2_pip_flexor",
    "antagonist": "d2_pip_extensor"
   },
   {
    "name": "m_d3_mcp_1",
    "kind": "crosswise_pair",
    "joints": [
     "d3_mcp_flex",
     "d3_mcp_abd"
    ],
    "agonist": "d3_mcp_flex_abduct",
    "antagonist": "d3_mcp_ext_adduct",
    "partner": "m_d3_mcp_2",
    "partner_agonist": "d3_mcp_flex_adduct",
    "partner_antagonist": "d3_mcp_ext_abduct"
   },
   {
    "name": "m_d3_pip",
    "kind": "tendon_pair",
    "joints": [
     "d3_pip"
    ],
    "agonist": "d3_pip_flexor",
    "antagonist": "d3_pip_extensor"
   },
   {
    "name": "m_abd45",
    "kind": "tendon_pair",
    "joints": [
     "abd45"
    ],
    "agonist": "abd45_abductor",
    "antagonist": "abd45_adductor"
   },
   {
    "name": "m_d4_mcp_flex",
    "kind": "tendon_pair",
    "joints": [
     "d4_mcp_flex"
    ],
    "agonist": "d4_mcp_flex_flexor",
    "antagonist": "d4_mcp_flex_extensor"
   },
   {
    "name": "m_d4_pip",
    "kind": "tendon_pair",
    "joints": [
     "d4_pip"
    ],
    "agonist": "d4_pip_flexor",
    "antagonist": "d4_pip_extensor"
   },
   {
    "name": "m_d5_mcp_flex",
    "kind": "tendon_pair",
    "joints": [
     "d5_mcp_flex"
    ],
    "agonist": "d5_mcp_flex_flexor",
    "antagonist": "d5_mcp_flex_extensor"
   },
   {
    "name": "m_d5_pip",
    "kind": "tendon_pair",
    "joints": [
     "d5_pip"
    ],
    "agonist": "d5_pip_flexor",
    "antagonist": "d5_pip_extensor"
   }
  ]
 }
})json";
}

}  // namespace sabd
