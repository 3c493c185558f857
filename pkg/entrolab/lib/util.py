# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# The MIT License (MIT)
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files (the
# "Software"), to deal in the Software without restriction, including
# without limitation the rights to use, copy, modify, merge, publish,
# distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to
# the following conditions:
#
# The above copyright notice and this permission notice shall be
# included in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND
# NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE
# LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION
# WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

'''Miscellaneous utility classes and functions.'''

import asyncio
import inspect
import logging
import math
import sys

import numpy as np
from aiorpcx import TaskGroup, run_in_thread

# Logging utilities


class CompactFormatter(logging.Formatter):
    '''Strips the module from the logger name to leave the class only.'''

    def format(self, record):
        record.name = record.name.rpartition('.')[-1]
        return super().format(record)


def make_logger(name, *, handler, level):
    '''Return the root entrolab logger.'''
    logger = logging.getLogger(name)
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger


def class_logger(path, classname):
    '''Return a hierarchical logger for a class.'''
    return logging.getLogger(path).getChild(classname)


def subclasses(base_class, strict=True):
    '''Return a list of subclasses of base_class in its module.'''

    def select(obj):
        return (inspect.isclass(obj) and issubclass(obj, base_class) and
                (not strict or obj != base_class))

    pairs = inspect.getmembers(sys.modules[base_class.__module__], select)
    return [pair[1] for pair in pairs]


# Seeds

SEED_MASK = (1 << 64) - 1


def derive_seed(seed, *counters):
    '''Return a 64-bit seed derived from seed and a path of counters.

    Distinct counter paths give independent streams; the same path always
    gives the same stream.'''
    entropy = [seed & SEED_MASK] + [int(c) & SEED_MASK for c in counters]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(seed, *counters):
    return np.random.default_rng(derive_seed(seed, *counters))


# Concurrency

async def _map_in_threads(func, items):
    async with TaskGroup() as group:
        tasks = [await group.spawn(run_in_thread(func, item))
                 for item in items]
        async for task in group:
            if not task.cancelled():
                task.result()
    return [task.result() for task in tasks]


def _loop_running():
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return False
    return True


def map_in_threads(func, items, concurrent=True):
    '''Apply func to every item, on worker threads if concurrent.

    Results are returned in input order whatever the scheduling.  Called
    from inside a running event loop it maps sequentially on the calling
    thread, since asyncio.run cannot nest.'''
    items = list(items)
    if not concurrent or len(items) < 2 or _loop_running():
        return [func(item) for item in items]
    return asyncio.run(_map_in_threads(func, items))


# Formatting

def round_sig(value, digits=12):
    '''Round a float to a fixed number of significant digits.'''
    if not math.isfinite(value) or value == 0:
        return value
    return float(f'{value:.{digits}g}')


def rounded(obj, digits=12):
    '''Recursively round every float in a JSON-like structure.'''
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj), digits)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {key: rounded(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(item, digits) for item in obj]
    raise TypeError(f'cannot round object of type {type(obj).__name__}')


def all_finite(obj):
    '''True if no float in a JSON-like structure is infinite or NaN.'''
    if isinstance(obj, float):
        return math.isfinite(obj)
    if isinstance(obj, dict):
        return all(all_finite(value) for value in obj.values())
    if isinstance(obj, (list, tuple)):
        return all(all_finite(item) for item in obj)
    return True
