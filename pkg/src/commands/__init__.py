"""Lab subcommands; each module exposes a COMMAND dict and ``async run(config)``."""

from . import compare
from . import convergence
from . import eigen
from . import measure
from . import solve
from . import symmetrize

COMMANDS_REGISTRY = {
    "measure": measure,
    "solve": solve,
    "symmetrize": symmetrize,
    "eigen": eigen,
    "compare": compare,
    "convergence": convergence,
}

__all__ = ["COMMANDS_REGISTRY", "compare", "convergence", "eigen", "measure", "solve", "symmetrize"]
