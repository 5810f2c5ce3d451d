"""
Experiment registry: maps experiment names to their handlers.
"""
import logging
from typing import Callable, Dict, List, Optional

from itl_transport_lab.core.exceptions import ConfigurationError
from itl_transport_lab.core.models.enums import ExperimentKind
from itl_transport_lab.runner.artifacts import ExperimentResult
from itl_transport_lab.runner.config import ExperimentConfig

logger = logging.getLogger(__name__)

ExperimentHandler = Callable[[ExperimentConfig], ExperimentResult]


class ExperimentRegistry:
    """
    Registry for experiment handlers keyed by ``ExperimentKind``.
    """

    def __init__(self) -> None:
        self._handlers: Dict[ExperimentKind, ExperimentHandler] = {}

    def register(self, experiment: ExperimentKind, handler: ExperimentHandler) -> None:
        """Register (or replace) the handler of an experiment."""
        kind = ExperimentKind(experiment)
        if kind in self._handlers:
            logger.warning("Replacing handler for experiment: %s", kind.value)
        self._handlers[kind] = handler
        logger.info("Registered experiment handler: %s", kind.value)

    def handler(self, experiment: ExperimentKind) -> Callable[[ExperimentHandler], ExperimentHandler]:
        """Decorator form of ``register``."""

        def decorator(func: ExperimentHandler) -> ExperimentHandler:
            self.register(experiment, func)
            return func

        return decorator

    def get(self, experiment: ExperimentKind) -> Optional[ExperimentHandler]:
        return self._handlers.get(ExperimentKind(experiment))

    def require(self, experiment: ExperimentKind) -> ExperimentHandler:
        handler = self.get(experiment)
        if handler is None:
            raise ConfigurationError(
                f"no handler registered for experiment {ExperimentKind(experiment).value}",
                field="experiment",
            )
        return handler

    def list_experiments(self) -> List[str]:
        return sorted(kind.value for kind in self._handlers)

    def __contains__(self, experiment: object) -> bool:
        try:
            return ExperimentKind(experiment) in self._handlers  # type: ignore[arg-type]
        except ValueError:
            return False


# Global registry instance
experiment_registry = ExperimentRegistry()
