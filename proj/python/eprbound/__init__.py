"""Steady-state dissipation bounds for confined 2-D irreversible diffusions.

Thin wrapper over the compiled ``_eprbound`` module: the report builders
take and return plain dicts here, with the JSON round trip handled
internally.
"""

import json as _json

try:  # installed wheel layout: extension lives inside the package
    from . import _eprbound as _core
except ImportError:  # build-tree layout: extension on sys.path
    import _eprbound as _core

ConfigError = _core.ConfigError
NumericError = _core.NumericError
ExprParseError = _core.ExprParseError
ExprEvalError = _core.ExprEvalError
Expression = _core.Expression
System = _core.System
catalog_names = _core.catalog_names
catalog_system = _core.catalog_system
system_from_config = _core.system_from_config
parse_expression = _core.parse_expression
solve = _core.solve
estimate_constants = _core.estimate_constants


def _report(builder):
    def wrapper(config: dict) -> dict:
        return _json.loads(builder(_json.dumps(config)))

    wrapper.__name__ = builder.__name__
    wrapper.__doc__ = builder.__doc__
    return wrapper


solve_report = _report(_core.solve_report)
functionals_report = _report(_core.functionals_report)
constants_report = _report(_core.constants_report)
certify_report = _report(_core.certify_report)
sweep_report = _report(_core.sweep_report)
locality_report = _report(_core.locality_report)
simulate_report = _report(_core.simulate_report)

__all__ = [
    "ConfigError",
    "ExprEvalError",
    "ExprParseError",
    "Expression",
    "NumericError",
    "System",
    "catalog_names",
    "catalog_system",
    "certify_report",
    "constants_report",
    "estimate_constants",
    "functionals_report",
    "locality_report",
    "parse_expression",
    "simulate_report",
    "solve",
    "solve_report",
    "sweep_report",
    "system_from_config",
]
