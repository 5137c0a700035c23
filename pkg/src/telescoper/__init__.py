"""Exact creative telescoping for first-order linear shift systems.

Modules
-------
exact
    Polynomial and rational-function arithmetic over Q(t, x), parsing, printing.
shifts
    Integer-linear polynomials, orbit exponents and shift equivalence.
module
    Shift systems, module elements and the actions of S_x, S_t and Delta_x.
reduction
    Abramov-Petkovsek style reduction, remainder forms and normal forms.
telescoping
    Stems, the existence test, order bounds and telescoper construction.
cli
    Problem files and the ``telescoper`` command.
"""

from .exact import *  # noqa: F401,F403
from .shifts import *  # noqa: F401,F403
from .module import *  # noqa: F401,F403
from .reduction import *  # noqa: F401,F403
from .telescoping import *  # noqa: F401,F403
from .cli import corpus_path, parse_problem, parse_problem_text, load_problem, run_command  # noqa: F401

__version__ = "0.1.0"
