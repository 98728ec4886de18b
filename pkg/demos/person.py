"""Two addresses for one person: repairs, a rejected candidate, consistent answers."""

from repairlab import (ICSet, Instance, Schema, FD, check_denial, consistent_answers_open, cqa_dispatch,
                       enumerate_repairs, fact)
from repairlab.textio import parse_query

schema = Schema.build({"Person": ["name", "city", "street"]})
ics = ICSet(schema, fds=(FD("Person", ("name",), ("city", "street")),))
r = Instance(schema, [
    fact("Person", "Brown", "Amherst", "115 Klein"),
    fact("Person", "Brown", "Amherst", "120 Maple"),
    fact("Person", "Green", "Clarence", "4000 Transit"),
])

print("repairs:")
for rep in enumerate_repairs(r, ics):
    print("  ", sorted(map(str, rep.facts)))

green = r.restrict([fact("Person", "Green", "Clarence", "4000 Transit")])
v = check_denial(r, green, ics)
print("Green alone is a repair?", v.ok, "-", v.certificate)

for text in ("exists s: Person(n, c, s)", "Person(n, c, s)"):
    print(text, "->", sorted(consistent_answers_open(r, ics, parse_query(text, schema))))

closed = parse_query("Person('Brown', 'Amherst', '115 Klein') or Person('Brown', 'Amherst', '120 Maple')", schema)
verdict = cqa_dispatch(r, ics, closed)
print("disjunction consistently true:", verdict.consistent, f"[{verdict.engine}]")
