from ._fosl import *  # noqa: F401,F403
from ._fosl import __version__  # noqa: F401
