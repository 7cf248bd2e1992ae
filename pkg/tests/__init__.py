"""entlab test suite."""
