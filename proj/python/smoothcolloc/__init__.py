from ._smoothcolloc import *  # noqa: F401,F403
