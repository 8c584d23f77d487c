"""
Reference sets and ordinal thresholds
=====================================

Normalization divides each theory's scores by their spread over a reference
("general") set of actions.  By default that set is the decision set itself,
which makes the scores relative to the options on the table.  This script
shows how a wider reference set and a probability threshold for an ordinal
theory change the outcome.
"""

from mec import Action, DecisionSituation, TheoryKind, TheorySpec, run_mec

actions = [Action("a"), Action("b"), Action("c")]
theories = [
    TheorySpec("welfare", TheoryKind.CARDINAL_INCOMPARABLE, 1.0),
    TheorySpec("rules", TheoryKind.ORDINAL, 1.0, scores_are_probabilities=True),
]
tables = {
    # welfare barely separates the options on the table, but other actions
    # exist that it cares about a great deal
    "welfare": {"a": 1.0, "b": 1.3, "c": 0.9, "x": -6.0, "y": 8.0},
    "rules": {"a": 0.9, "b": 0.6, "c": 0.2, "x": 0.1, "y": 0.55},
}


def show(label, result):
    values = ", ".join(f"{a}={result.expected[a]:+.3f}" for a in result.ranking)
    print(f"{label:<42} {values}  -> {result.selected}")


narrow = DecisionSituation(actions, theories, tables)
show("reference = decision set", run_mec(narrow))

wide = DecisionSituation(actions, theories, tables, general_set=["a", "b", "c", "x", "y"])
show("reference = {a, b, c, x, y}", run_mec(wide))

# With a threshold, 0.9 and 0.6 both count as "permissible" and the ordinal
# theory stops separating a from b.
show("reference = decision set, threshold 0.5", run_mec(narrow, threshold=0.5))
show("reference = {a, b, c, x, y}, threshold 0.5", run_mec(wide, threshold=0.5))
