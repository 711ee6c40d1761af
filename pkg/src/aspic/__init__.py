"""Interactive answer-set-programming shell.

A session holds ground rules, externally controlled input atoms, and
assumptions; commands move that state and queries ask about the stable
models it induces. The package ships the engine (syntax, ground, solver,
state, query), a line-oriented shell, and a JSON session service.
"""

__version__ = "0.1.0"
