"""Decision support for open-source contribution strategy: score artifacts on
business impact and control complexity, classify them into strategy quadrants,
govern contribution requests, and trace contributions back to features and
platforms."""

__version__ = "0.1.0"
