"""Exit codes for entlab CLI commands.

All subcommands use the same three outcomes.
"""

# Success
SUCCESS = 0

# Errors
DOMAIN_ERROR = 1
NOT_CONVERGED = 2
