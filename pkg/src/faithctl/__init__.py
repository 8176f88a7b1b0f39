"""faithctl: measure, control, and enforce evidence-faithfulness of
knowledge-grounded dialogue responses."""

__version__ = "0.1.0"
