"""Exact verification toolkit: balanced group-ring modules, finite
patching systems, weight-one Hecke identities and local
deformation-ring fixtures.

The compiled extension carries all operations; this package re-exports
them whether the extension was installed inside the package (wheel
builds) or sits on the path next to it (in-tree CMake builds).
"""

try:
    from ._twpatch import *  # noqa: F401,F403
    from ._twpatch import __version__  # noqa: F401
except ImportError:  # in-tree build: extension on sys.path
    from _twpatch import *  # noqa: F401,F403
    from _twpatch import __version__  # noqa: F401
