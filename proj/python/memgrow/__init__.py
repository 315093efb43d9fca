from ._memgrow import *  # noqa: F401,F403
