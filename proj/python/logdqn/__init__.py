"""Semi-supervised log anomaly detection with a deep Q-network agent.

The heavy lifting lives in the compiled ``_logdqn`` extension; this package
just re-exports it. The extension is importable either as a submodule of this
package (wheel layout) or as a flat module on ``sys.path`` (in-tree build).
"""

try:
    from ._logdqn import *  # noqa: F401,F403
    from ._logdqn import __version__  # noqa: F401
except ImportError:
    from _logdqn import *  # noqa: F401,F403
    from _logdqn import __version__  # noqa: F401
