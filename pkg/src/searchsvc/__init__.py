"""searchsvc: declarative search services over third-party HTML search UIs."""

__version__ = "0.1.0"
