"""GeoJSON export of a network and a newly added line."""

from __future__ import annotations

from typing import Any

from .core import CoordinateSystem, Line, Network

NEW_LINE_STROKE = "#00FFFF"


def _coords(net: Network, station: str) -> list[float]:
    a, b = net.station(station).position
    if net.coordinate_system is CoordinateSystem.GEOGRAPHIC:
        return [b, a]
    return [a, b]


def _line_feature(net: Network, r: Line, properties: dict[str, Any]) -> dict[str, Any]:
    return {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": [_coords(net, s) for s in r.stations]},
        "properties": {"id": r.id, **properties},
    }


def export_geojson(net: Network, new_line: Line) -> dict[str, Any]:
    """FeatureCollection with existing lines, the new line and every station."""
    if not new_line.edges:
        raise ValueError("the new line must have at least one edge")
    features = [_line_feature(net, r, {"role": "existing"}) for r in net.lines]
    features.append(_line_feature(net, new_line, {"role": "new", "stroke": NEW_LINE_STROKE}))
    for s in net.stations.values():
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": _coords(net, s.id)},
                "properties": {"id": s.id, "name": s.name},
            }
        )
    doc: dict[str, Any] = {"type": "FeatureCollection", "features": features}
    if net.coordinate_system is CoordinateSystem.PLANAR:
        doc["crs_note"] = "planar-miles"
    return doc
