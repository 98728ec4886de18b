"""Build hard instances from small SAT inputs and confirm the encoded answer with the oracle."""

from repairlab import enumerate_repairs, oracle_cqa, oracle_repair_check
from repairlab.reductions import (CnfFormula, gen_exponential_family, gen_fd_ind_repaircheck, gen_one_denial,
                                  is_satisfiable)

for clauses in ([(1, 2), (-1, -2)], [(1,), (-1,)]):
    f = CnfFormula.of(clauses)
    red = gen_one_denial(f)
    answer = oracle_cqa(red.instance, red.ics, red.query)
    print(f"{clauses}: satisfiable={is_satisfiable(f)}  query consistently true={answer}  "
          f"({len(red.instance)} facts, one denial)")

    red = gen_fd_ind_repaircheck(f)
    print(f"   empty candidate is a repair under FDs+INDs: "
          f"{oracle_repair_check(red.instance, red.candidate, red.ics)}")

for n in range(1, 6):
    red = gen_exponential_family(n)
    print(f"n={n}: {len(red.instance)} facts, {len(enumerate_repairs(red.instance, red.ics))} repairs")
