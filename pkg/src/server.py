import logging
import os
from importlib import import_module
from functools import lru_cache
from pathlib import Path
from mcp.server.fastmcp import FastMCP

logging.basicConfig(level=logging.INFO, format="%(message)s")

mcp = FastMCP("productivity-mcp")

TOOL_MODULES = (
    "fitting",
    "forecasting",
    "parameters",
)


def default_workers() -> int:
    """Grid evaluation threads for tool calls (``PRODUCTIVITY_MCP_WORKERS``, default 1)."""
    value = (os.environ.get("PRODUCTIVITY_MCP_WORKERS") or "1").strip()
    try:
        return max(int(value), 1)
    except ValueError:
        logging.warning("Ignoring PRODUCTIVITY_MCP_WORKERS=%r (not an integer)", value)
        return 1


def _register_tool_modules() -> None:
    for name in TOOL_MODULES:
        import_module(f".tools.{name}", package=__package__)


# Import tool modules to trigger @mcp.tool() registration.
_register_tool_modules()


SKILL_RESOURCE_URI = "resource://productivity-mcp/skill"
SKILL_FILE = (
    Path(__file__).resolve().parent.parent / "skills" / "productivity-model" / "SKILL.md"
)


@lru_cache(maxsize=1)
def _read_skill_file() -> str:
    """Read the local usage guide once and cache it for prompt/resource calls."""
    try:
        return SKILL_FILE.read_text(encoding="utf-8")
    except FileNotFoundError:
        logging.warning("Skill file not found: %s", SKILL_FILE)
        return "Skill file not found."
    except OSError as exc:
        logging.warning("Could not read skill file %s: %s", SKILL_FILE, exc)
        return "Skill file could not be loaded."


@mcp.resource(SKILL_RESOURCE_URI)
def get_skill() -> str:
    """Productivity model usage guide exposed as an MCP resource."""
    return _read_skill_file()


@mcp.prompt()
def productivity_assistant() -> str:
    """Default assistant instructions for MCP clients like Claude Desktop."""
    base_rules = (
        "You are a labor productivity modelling assistant connected via MCP.\n"
        "Every run starts from an ini run configuration; pass its path as config_path.\n"
        "Use list_presets to see the documented parameter sets before simulating.\n"
        "Run check_model_params on any parameter set before trusting it; report flagged steady-state rates.\n"
        "Use calibrate_model to fit constants, simulate_model for forward runs, and evaluate_model to score fixed constants against observed growth.\n"
        "Use forecast_productivity_tool only when a population table by age is configured, and cohort_consistency_report to check the shifted cohorts.\n"
        "Use potential_growth to compare GDP growth with the A/G potential rate.\n"
        "Only N0/B is identified in the GDP family; do not present N0 or B alone as estimates.\n"
        "Quote R2 together with the fitted span and the smoothing window.\n"
        f"Reference resource: {SKILL_RESOURCE_URI}\n"
        "Load the reference resource only when you need file formats or the full parameter list.\n"
    )
    return base_rules


def main():
    mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
