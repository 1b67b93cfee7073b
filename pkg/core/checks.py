import asyncio
import glob
import importlib.util
import logging
import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

CHECKS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "checks")


@dataclass(frozen=True)
class Measurement:
    """What a check function returns: the measured error and the allowed error."""

    error: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status}  {self.name:<36} measured={self.measured:.3e}  tol={self.tolerance:.3e}"
        if self.detail:
            line += f"  {self.detail}"
        return line


class CheckRegistry:
    """Named verification checks, loaded from plugin files and run concurrently."""

    def __init__(self):
        self.checks: Dict[str, Dict] = {}
        self.descriptions: List[str] = []

    def register(self, name: str, func: Callable[[], Measurement], description: str):
        if name in self.checks:
            raise ValueError(f"check {name!r} is already registered")
        self.checks[name] = {"func": func, "description": description}
        self.descriptions.append(f"- {name}: {description}")

    def load_modules(self, checks_dir: str = CHECKS_DIR):
        """Import every checks/*.py and call its register_checks(registry)."""
        for filepath in sorted(glob.glob(os.path.join(checks_dir, "*.py"))):
            module_name = os.path.basename(filepath)[:-3]
            if module_name == "__init__":
                continue
            spec = importlib.util.spec_from_file_location(f"checks.{module_name}", filepath)
            if spec and spec.loader:
                module = importlib.util.module_from_spec(spec)
                sys.modules[spec.name] = module
                spec.loader.exec_module(module)
                if hasattr(module, "register_checks"):
                    module.register_checks(self)
                    logging.debug(f"Loaded check module: {module_name}")

    def names(self, prefix: Optional[str] = None) -> List[str]:
        return [n for n in self.checks if prefix is None or n.startswith(prefix)]

    def get_descriptions(self) -> str:
        return "\n".join(self.descriptions)

    def run_one(self, name: str) -> CheckResult:
        if name not in self.checks:
            raise KeyError(f"check {name!r} not found")
        try:
            m = self.checks[name]["func"]()
        except Exception as e:
            logging.error(f"Check {name} raised: {e}")
            return CheckResult(name, False, float("nan"), float("nan"), f"error: {e}")
        passed = bool(m.error <= m.tolerance)
        if not passed:
            logging.error(f"Check {name} failed: {m.error:.3e} > {m.tolerance:.3e} {m.detail}")
        return CheckResult(name, passed, float(m.error), float(m.tolerance), m.detail)

    async def _run_all(self, names: List[str]) -> List[CheckResult]:
        tasks = [asyncio.to_thread(self.run_one, n) for n in names]
        return list(await asyncio.gather(*tasks))

    def run(self, prefix: Optional[str] = None) -> List[CheckResult]:
        """Run the selected checks concurrently; results come back in registration order."""
        return asyncio.run(self._run_all(self.names(prefix)))


def relative_error(measured, reference, floor: float = 1e-8) -> float:
    measured = np.asarray(measured, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    return float(np.linalg.norm(measured - reference) / max(np.linalg.norm(reference), floor))

