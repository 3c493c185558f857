version = 'entrolab 0.1.0'
version_short = version.split()[-1]

from entrolab.measures.env import Env
from entrolab.measures.search import OptimizerConfig
