# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Class for handling environment configuration and defaults.'''


from entrolab.lib.env_base import EnvBase
from entrolab.measures.search import OptimizerConfig


class Env(EnvBase):
    '''Optimizer defaults and output settings from the environment.

    Command-line flags override these values, which override the
    built-in defaults.'''

    FORMATS = ('json', 'csv', 'table')
    METHODS = ('Powell', 'Nelder-Mead', 'COBYLA', 'L-BFGS-B')

    def __init__(self):
        super().__init__()

        # Optimizer

        self.seed = self.integer('ENTROLAB_SEED', 0, minimum=0)
        self.restarts = self.integer('ENTROLAB_RESTARTS', 16, minimum=1)
        self.max_iters = self.integer('ENTROLAB_MAX_ITERS', 400, minimum=1)
        self.rel_tol = self.floating('ENTROLAB_REL_TOL', 1e-7, minimum=0)
        self.max_evals = self.integer('ENTROLAB_MAX_EVALS', 20000, minimum=1)
        self.method = self.choice('ENTROLAB_METHOD', 'Powell', self.METHODS)
        self.concurrent = self.boolean('ENTROLAB_CONCURRENT', True)

        # Output

        self.format = self.choice('ENTROLAB_FORMAT', 'json', self.FORMATS)
        self.log_level = self.default('LOG_LEVEL', 'info').upper()

    def optimizer_config(self, **overrides):
        '''An OptimizerConfig from the environment; overrides that are
        None are ignored.'''
        settings = {
            'seed': self.seed,
            'restarts': self.restarts,
            'max_iters': self.max_iters,
            'rel_tol': self.rel_tol,
            'max_evals': self.max_evals,
            'method': self.method,
            'concurrent': self.concurrent,
        }
        settings.update((key, value) for key, value in overrides.items()
                        if value is not None)
        try:
            return OptimizerConfig(**settings)
        except (TypeError, ValueError) as e:
            raise self.Error(f'bad optimizer setting: {e}') from None
