"""Resample command - uniform arc-length resampling of a polygon file.

Input is either JSON with a `vertices` list or a CSV of x,y rows. Output is
a CSV of x,y rows, written to --out or the console.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ... import config
from ...core.polygons import ResamplingError, resample_polygon
from ...lib.plannerUtils import log
from ...models.outline import InvalidPolygonError

# Command identity
CMD_ID = f'{config.COMPANY_NAME}_{config.APP_NAME}_resample'
CMD_NAME = 'resample'
CMD_DESCRIPTION = 'Resample a polygon to near-uniform vertex spacing'


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(CMD_NAME, help=CMD_DESCRIPTION, description=CMD_DESCRIPTION)
    parser.add_argument('polygon', type=Path, help='Polygon file (.json with "vertices" or .csv)')
    parser.add_argument('--spacing', type=float, required=True, help='Target vertex spacing (m)')
    parser.add_argument('--out', type=Path, default=None, help='Output CSV (defaults to the console)')
    parser.set_defaults(cmd_id=CMD_ID)


def read_polygon(path: Path) -> np.ndarray:
    """
    Vertices of a polygon file.

    Raises:
        ValueError: If the file content is not a vertex list
        OSError: If the file cannot be read
    """
    if path.suffix.lower() == '.json':
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
        if not isinstance(data, dict) or 'vertices' not in data:
            raise ValueError(f"{path} has no 'vertices' list")
        return np.asarray(data['vertices'], dtype=float)
    rows = np.genfromtxt(path, delimiter=',', comments='#', ndmin=2)
    # a header row parses to NaN
    return rows[~np.isnan(rows).any(axis=1)]


def run(args: argparse.Namespace) -> int:
    try:
        vertices = read_polygon(args.polygon)
        resampled = resample_polygon(vertices, args.spacing)
    except (InvalidPolygonError, ResamplingError, OSError, ValueError) as e:
        log(str(e), logging.ERROR)
        return 1

    buffer = io.StringIO()
    np.savetxt(buffer, resampled, delimiter=',', header='x,y', comments='', fmt='%.12g')
    if args.out is None:
        print(buffer.getvalue(), end='')
    else:
        args.out.write_text(buffer.getvalue(), encoding='utf-8')
    log(f'{vertices.shape[0]} vertices resampled to {resampled.shape[0]}')
    return 0
