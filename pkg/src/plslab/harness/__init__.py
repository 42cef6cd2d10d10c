"""Instance text format, randomized reduction suites and the command-line client."""
