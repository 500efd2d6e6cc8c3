import os
import sys
import argparse
import json
import logging
from typing import Optional

from dotenv import load_dotenv
from mcp.server.fastmcp import FastMCP

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from src.experiments import config as experiment_config
from src.experiments.config import parse_config_text
from src.experiments.runner import analyze_experiment, optimize_experiment, run_experiment, with_overrides
from src.model.latency import backhaul_latency
from src.model.types import LatencyParams

load_dotenv()

logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
)
logger = logging.getLogger(__name__)


def _error(tool: str, e: Exception) -> str:
    logger.error(f"{tool} failed: {e}")
    return json.dumps({"error": str(e), "type": type(e).__name__})


class HitProbabilityMCP:
    """MCP server exposing the hit probability model, placement solvers and simulator.

    Every tool takes an experiment document (YAML or JSON text, same schema
    as the files in configs/) and returns a JSON string; failures come back
    as {"error": ..., "type": ...} instead of raising.
    """

    def __init__(self, server_host: Optional[str] = None, server_port: Optional[int] = None):
        self.server_host = server_host or os.environ.get("MCP_SERVER_HOST", "127.0.0.1")
        self.server_port = server_port or int(os.environ.get("MCP_SERVER_PORT", "8080"))

        self.mcp = FastMCP(
            name="Cache Placement Server",
            host=self.server_host,
            port=self.server_port
        )

        self._register_tools()
        self._register_resources()

    def _register_tools(self):
        for tool in (
            self.compute_hit_probability,
            self.optimize_placement,
            self.simulate_hit_probability,
            self.estimate_backhaul_latency,
        ):
            self.mcp.tool()(tool)

    async def compute_hit_probability(self, config: str) -> str:
        """Closed-form hit probability of every policy in an experiment

        Args:
            config: Experiment document (YAML or JSON)

        Returns:
            JSON with the overall hit probability plus per-file conditional
            hit probabilities and per-tier contributions
        """
        try:
            return json.dumps(analyze_experiment(parse_config_text(config)))
        except Exception as e:
            return _error("compute_hit_probability", e)

    async def optimize_placement(self, config: str) -> str:
        """Placement matrix of every policy in an experiment

        Args:
            config: Experiment document (YAML or JSON)

        Returns:
            JSON with placement matrices, solver reports and file ranges
        """
        try:
            return json.dumps(optimize_experiment(parse_config_text(config)))
        except Exception as e:
            return _error("optimize_placement", e)

    async def simulate_hit_probability(
        self,
        config: str,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> str:
        """Analytic hit probability checked against the Monte Carlo simulator

        Args:
            config: Experiment document (YAML or JSON)
            trials: Monte Carlo trials (overrides the document)
            seed: Simulation seed (overrides the document)

        Returns:
            JSON array of result rows with analytic and simulated values
        """
        try:
            cfg = with_overrides(parse_config_text(config), seed=seed, trials=trials, simulate=True)
            return json.dumps([row.to_dict() for row in run_experiment(cfg)])
        except Exception as e:
            return _error("simulate_hit_probability", e)

    async def estimate_backhaul_latency(
        self,
        hit_probability: float,
        density_ratio: float = 10.0,
        c1_ms: float = 10.0,
        c2_ms: float = 100.0,
    ) -> str:
        """Average backhaul latency for a given hit probability

        Args:
            hit_probability: Hit probability in [0, 1]
            density_ratio: BS density over gateway density
            c1_ms: Per-hop wireless delay in ms
            c2_ms: Delay of the core network in ms

        Returns:
            JSON with the latency in ms
        """
        try:
            latency = backhaul_latency(hit_probability, LatencyParams(density_ratio, 1.0, c1_ms, c2_ms))
            return json.dumps({"hit_probability": hit_probability, "backhaul_latency_ms": latency})
        except Exception as e:
            return _error("estimate_backhaul_latency", e)

    def _register_resources(self):
        @self.mcp.resource("schema://experiment")
        def get_experiment_schema() -> str:
            """Experiment document format with an example"""
            return experiment_config.__doc__

    def start(self, transport="stdio"):
        """Start the MCP server

        Args:
            transport: "stdio", "http" (streamable-http) or "sse"
        """
        if transport == "http":
            logger.info(f"MCP server (HTTP) listening on http://{self.server_host}:{self.server_port}/mcp")
            self.mcp.run(transport="streamable-http")
        elif transport == "sse":
            logger.info(f"MCP server (SSE) listening on http://{self.server_host}:{self.server_port}/sse")
            self.mcp.run(transport="sse")
        else:
            logger.info("MCP server started on stdio")
            self.mcp.run(transport="stdio")


def main():
    parser = argparse.ArgumentParser(description="Cache placement MCP server")
    parser.add_argument("--transport", choices=["stdio", "http", "sse"], default="stdio", help="MCP transport")
    parser.add_argument("--host", help="Bind address for HTTP/SSE (default: MCP_SERVER_HOST)")
    parser.add_argument("--port", type=int, help="Port for HTTP/SSE (default: MCP_SERVER_PORT)")

    args = parser.parse_args()

    server = HitProbabilityMCP(server_host=args.host, server_port=args.port)
    server.start(transport=args.transport)


if __name__ == "__main__":
    main()
