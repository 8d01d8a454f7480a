"""Plan command - run the planner on one scenario and write the result files."""
