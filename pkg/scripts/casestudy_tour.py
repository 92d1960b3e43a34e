#!/usr/bin/env python3
"""Walk the bundled case-study knowledge bases: load, check, materialize,
and run each one's characteristic queries.

    python scripts/casestudy_tour.py
"""

from __future__ import annotations

from cdcgraph import (
    FactStore,
    builtin_registry,
    check,
    eval_query,
    load_casestudy,
    materialize,
    parse_query,
)

TOUR = {
    "education": [
        'is_a_star(quadratic_function, ?S, "math@algebra")',
        'all_prerequisites(calculus, ?P, "highschool")',
        'strategy(explain_function, ?S, "design_background@cs")',
        'analogous_to(neural_network, ?C, "ai@ml", ?D)',
    ],
    "enterprise": [
        'analogous_to(user_story, ?C, "product@requirements", ?D)',
        'fuses_with(?A, ?B, ?N, "product+engineering")',
        'conflicts_with(real_time_sync, ?X, "product+engineering@mobile")',
    ],
    "techdocs": [
        'evolves_to(class_component, ?N, "react@paradigm_shift")',
        'analogous_to(component_did_mount, ?C, "react@pre16.8", ?D)',
        'if_then(mobile_app, ?Advice, "react@mobile@perf")',
    ],
    "cbt": [
        "cognitive_pattern(zhang_san, ?Pattern, ?Score)",
        'cbt_distortion(all_or_nothing_thinking, ?Marker, "CBT@language_markers")',
        'first_line_treatment(all_or_nothing_thinking, ?T, "CBT@treatment_planning")',
    ],
}


def main() -> None:
    for case, queries in TOUR.items():
        store = FactStore(builtin_registry())
        result = load_casestudy(case, store)
        report = check(store)
        closure = materialize(store)
        print(f"== {case}: {len(store)} facts, {len(result.warnings)} load warnings, "
              f"{len(report.errors)} errors, {len(report.separation_witnesses)} witnesses, "
              f"{closure.size()} derived facts")
        for text in queries:
            bindings = eval_query(parse_query(text, store.registry), store, closure)
            print(f"  ?- {text}")
            for line in bindings.render_lines():
                print(f"     {line}")
            if not bindings:
                print("     (no solutions)")
        print()


if __name__ == "__main__":
    main()
