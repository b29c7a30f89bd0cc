"""Pydantic-compatible argument types for the tool server.

Clients often send ``"400,500,10"`` instead of ``[400, 500, 10]``, or
``"A2=450, B=7.5e6"`` instead of an object. These annotated types absorb
that before validation so tools see plain lists and dicts.

Usage in tool signatures::

    from ..coerce import FloatList, ParamDict

    @mcp.tool()
    def my_tool(a2_grid: FloatList | None = None, params: ParamDict | None = None) -> str: ...
"""

from __future__ import annotations

import json as _json
from typing import Annotated

from pydantic import BeforeValidator


def _try_json(v: str, kind: type) -> list | dict | None:
    """Try to parse a stringified JSON array or object."""
    s = v.strip()
    opener, closer = ("[", "]") if kind is list else ("{", "}")
    if s.startswith(opener) and s.endswith(closer):
        try:
            parsed = _json.loads(s)
            if isinstance(parsed, kind):
                return parsed
        except (ValueError, TypeError):
            pass
    return None


def _coerce_float_list(v: object) -> object:
    if isinstance(v, str):
        parsed = _try_json(v, list)
        if parsed is not None:
            try:
                return [float(x) for x in parsed]
            except (ValueError, TypeError):
                pass
        # "300, 600, 10" -> [300.0, 600.0, 10.0]
        parts = [s.strip() for s in v.split(",") if s.strip()]
        try:
            return [float(p) for p in parts]
        except ValueError:
            return v  # let Pydantic raise the real error
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [float(v)]
    return v


def _coerce_param_dict(v: object) -> object:
    if isinstance(v, str):
        parsed = _try_json(v, dict)
        if parsed is not None:
            return {str(k): str(x) for k, x in parsed.items()}
        # "A2=450, B=7.5e6" -> {"A2": "450", "B": "7.5e6"}
        pairs = [s.strip() for s in v.replace(";", ",").split(",") if s.strip()]
        if pairs and all("=" in p for p in pairs):
            return {k.strip(): x.strip() for k, _, x in (p.partition("=") for p in pairs)}
        return v
    if isinstance(v, dict):
        return {str(k): str(x) for k, x in v.items()}
    return v


FloatList = Annotated[list[float], BeforeValidator(_coerce_float_list)]
ParamDict = Annotated[dict[str, str], BeforeValidator(_coerce_param_dict)]
