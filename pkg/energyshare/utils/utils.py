#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import collections
import itertools
import threading

_COUNTS = collections.defaultdict(itertools.count)
_COUNTS_LOCK = threading.Lock()
_ID = itertools.count()
_ID_LOCK = threading.Lock()


def obj_id() -> int:
    """Generate a unique id for an object.

    >>> a, b = obj_id(), obj_id()
    >>> b - a
    1
    """
    with _ID_LOCK:
        return next(_ID)


def obj_count(obj) -> int:
    """Count the instances created so far for the object's class name.

    >>> new_type = type('NewType', (object,), {})
    >>> obj_count(new_type())
    0
    >>> obj_count(new_type())
    1
    """
    with _COUNTS_LOCK:
        return next(_COUNTS[obj.__class__.__name__])


def pos(x: float) -> float:
    """Positive part, [x]_+ = max(0, x).

    >>> pos(-1.5), pos(2.0)
    (0.0, 2.0)
    """
    return x if x > 0.0 else 0.0


def neg(x: float) -> float:
    """Negative part, [x]_- = -min(0, x).

    >>> neg(-1.5), neg(2.0)
    (1.5, 0.0)
    """
    return -x if x < 0.0 else 0.0
