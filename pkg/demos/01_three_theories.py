"""
Aggregating three theory-based models
=====================================

Three model outputs for the same set of actions are read through the
conventions used for utilitarian, deontology and virtue classifiers, and
then combined by maximizing expected choiceworthiness.
"""

from pathlib import Path

from mec import (
    Action,
    DecisionSituation,
    SentimentMap,
    TheoryKind,
    TheorySpec,
    TraitDistribution,
    deontology_prompt,
    render_explanation,
    run_mec,
    utilitarian_score,
)
from mec.evaluators import virtue_prompt, virtue_scores

DATA = Path(__file__).parent / "data"

actions = [
    Action("return", "return the extra change the cashier gave me"),
    Action("keep", "keep the extra change the cashier gave me"),
    Action("donate", "donate the extra change to a charity box"),
]

# A utilitarian model emits a scalar per action.
utility = utilitarian_score({"return": 0.4, "keep": 0.1, "donate": 0.7})

# A deontology model is prompted like this; its probability of
# "permissible" is the score.
for a in actions:
    print(deontology_prompt(a.text))
permissible = {"return": 0.93, "keep": 0.08, "donate": 0.41}

# A virtue model scores (action, trait) pairs; the action inherits the
# sentiment of its most probable trait.
print(virtue_prompt(actions[0].text, "honest"))
sentiments = SentimentMap.load(DATA / "sentiments.json")
virtue = virtue_scores([
    TraitDistribution("return", {"honest": 0.81, "kind": 0.40, "greedy": 0.02}),
    TraitDistribution("keep", {"greedy": 0.77, "dishonest": 0.70, "honest": 0.05}),
    TraitDistribution("donate", {"generous": 0.88, "honest": 0.31}),
], sentiments)
print("virtue scores:", virtue.to_dict())

situation = DecisionSituation(
    actions=actions,
    theories=[
        TheorySpec("utilitarianism", TheoryKind.CARDINAL_COMPARABLE, 1.0),
        TheorySpec("deontology", TheoryKind.ORDINAL, 1.0),
        TheorySpec("virtue", TheoryKind.CARDINAL_INCOMPARABLE, 1.0),
    ],
    score_tables={"utilitarianism": utility, "deontology": permissible, "virtue": virtue},
)

result = run_mec(situation)
print("\nexpected choiceworthiness")
for a in result.ranking:
    parts = ", ".join(f"{k}={v[a]:+.3f}" for k, v in result.contributions.items())
    print(f"  {a:<7} {result.expected[a]:+.3f}   ({parts})")
print("selected:", result.selected)

# Each theory can justify its own pairwise preference.
best, worst = result.ranking[0], result.ranking[-1]
for theory in ("utilitarianism", "deontology", "virtue"):
    table = situation.score_tables[theory]
    if table[best] > table[worst]:
        print(render_explanation(best, worst, theory, scores=table))
