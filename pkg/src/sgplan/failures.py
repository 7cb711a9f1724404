"""Failure taxonomy shared by the decomposer and the trial harness."""

from enum import Enum


class FailureClass(str, Enum):
    LLM_ERROR = "LLM_ERROR"
    SYNTAX_ERROR = "SYNTAX_ERROR"
    PRUNING_ERROR = "PRUNING_ERROR"
    UNDECLARED_ITEM = "UNDECLARED_ITEM"
    PLANNER_TIMEOUT = "PLANNER_TIMEOUT"
    INVALID_PLAN = "INVALID_PLAN"
    INCORRECT_ACTION = "INCORRECT_ACTION"
    DECOMPOSITION_ERROR = "DECOMPOSITION_ERROR"
