# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Base class for environment configuration and defaults.'''


from os import environ

from entrolab.lib.util import class_logger


class EnvBase(object):
    '''Wraps environment configuration.

    Subclasses read their settings in __init__ through the typed
    accessors below; a bad value raises EnvBase.Error naming the variable.
    '''

    class Error(Exception):
        pass

    def __init__(self):
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.loop_policy = self.event_loop_policy()

    @classmethod
    def default(cls, envvar, default):
        return environ.get(envvar, default)

    @classmethod
    def boolean(cls, envvar, default):
        default = 'Yes' if default else ''
        return bool(cls.default(envvar, default).strip())

    @classmethod
    def _number(cls, envvar, default, kind, minimum):
        value = environ.get(envvar)
        if value is None:
            return default
        try:
            result = kind(value)
        except Exception:
            raise cls.Error(f'cannot convert envvar {envvar} value {value} '
                            f'to {"an integer" if kind is int else "a float"}'
                            ) from None
        if minimum is not None and result < minimum:
            raise cls.Error(f'envvar {envvar} value {value} is below the '
                            f'minimum {minimum}')
        return result

    @classmethod
    def integer(cls, envvar, default, minimum=None):
        return cls._number(envvar, default, int, minimum)

    @classmethod
    def floating(cls, envvar, default, minimum=None):
        return cls._number(envvar, default, float, minimum)

    @classmethod
    def choice(cls, envvar, default, choices):
        value = cls.default(envvar, default)
        if value not in choices:
            raise cls.Error(f'envvar {envvar} value {value} is not one of '
                            f'{", ".join(sorted(choices))}')
        return value

    def event_loop_policy(self):
        policy = self.default('EVENT_LOOP_POLICY', None)
        if policy is None:
            return None
        if policy == 'uvloop':
            import uvloop
            return uvloop.EventLoopPolicy()
        raise self.Error(f'unknown event loop policy "{policy}"')
