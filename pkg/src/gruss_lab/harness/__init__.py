"""Generators, scenario I/O, fuzzing, worked-example reproduction and the CLI."""
