"""Condensed DAG construction, equilibrium solvers and learning dynamics."""

try:
    from ._codag import (
        CoDAG,
        ConfigError,
        EnumerationLimitError,
        Network,
        SchemaError,
        build_codag,
        codag_from_json,
        load_network,
        network_from_json,
        simulate,
        solve,
        verify_structure,
    )
except ImportError:  # in-tree builds keep the extension next to the package
    from _codag import (
        CoDAG,
        ConfigError,
        EnumerationLimitError,
        Network,
        SchemaError,
        build_codag,
        codag_from_json,
        load_network,
        network_from_json,
        simulate,
        solve,
        verify_structure,
    )

__all__ = [
    "CoDAG",
    "ConfigError",
    "EnumerationLimitError",
    "Network",
    "SchemaError",
    "build_codag",
    "codag_from_json",
    "load_network",
    "network_from_json",
    "simulate",
    "solve",
    "verify_structure",
]
