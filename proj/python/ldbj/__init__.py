"""Definite-clause engine with ISO catch/throw, native backjumping and the
A1/A1a/A2 backjump transformations."""

from ._ldbj import (
    DimacsError,
    SyntaxError,
    TransformError,
    bench,
    brute_force,
    corpus_source,
    dimacs_export,
    dimacs_import,
    gen_cnf,
    lower_native,
    run_sat,
    solve,
    transform,
)

__all__ = [
    "DimacsError",
    "SyntaxError",
    "TransformError",
    "bench",
    "brute_force",
    "corpus_source",
    "dimacs_export",
    "dimacs_import",
    "gen_cnf",
    "lower_native",
    "run_sat",
    "solve",
    "transform",
]
